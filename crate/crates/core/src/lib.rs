//! Nonstationary series forecasting by variational mode decomposition and a
//! per-mode LSTM ensemble, with a plain-LSTM baseline for comparison.
//!
//! The pieces, bottom-up:
//!
//! - [`ingest`]: CSV loading and descriptive statistics
//! - [`series`]: MinMax scaling, lookback windows, chronological splits
//! - [`vmd`]: the mode decomposition and the residual-energy `K` sweep
//! - [`neural`]: LSTM cell, BPTT, Adam, training loop, model files
//! - [`metrics`]: RMSE / MAE / MSE / R²
//! - [`pipeline`]: hybrid and plain pipelines, recursive forecasts, comparison

pub mod ingest;
pub mod metrics;
pub mod neural;
pub mod pipeline;
pub mod series;
pub mod vmd;

pub use ingest::{describe, load_csv, DescriptiveStats, TimeSeries};
pub use metrics::{evaluate, MetricsReport};
pub use series::{FitMode, ScalerParams, SplitIndex, SupervisedWindows};
pub use vmd::{decompose, residual_energy, sweep_k, ModeSet, VmdConfig};
