//! The two end-to-end forecasting systems and their head-to-head comparison.
//!
//! Hybrid: scale the series, decompose it into `K` modes, MinMax-scale each
//! mode, window it, and train one LSTM per mode. Predictions of the modes are
//! mapped back to the series scale, summed in mode order, and restored to
//! price units. Plain: the same windowing and training on the scaled series.
//!
//! In [`FitMode::Paper`] the series scaler, the decomposition and the per-mode
//! scalers all see the full series, test period included. In
//! [`FitMode::Strict`] they are fitted on the training prefix, and each test
//! window is cut from a decomposition of only the data observed before its
//! target, which costs one decomposition per test target.

use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::TimeSeries;
use crate::metrics::{evaluate, MetricsError, MetricsReport};
use crate::neural::{self, EpochLoss, LstmParams, ModelFile, NeuralError, TrainConfig};
use crate::series::{
    fit_scaler, make_windows, FitMode, ScalerParams, SeriesError, SplitIndex, SupervisedWindows,
};
use crate::vmd::{decompose, VmdConfig, VmdError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("decomposition failed: {0}")]
    Vmd(#[from] VmdError),
    #[error("IMF {index}: {source}")]
    ImfScale {
        index: usize,
        #[source]
        source: SeriesError,
    },
    #[error("IMF {index}: {source}")]
    ImfModel {
        index: usize,
        #[source]
        source: NeuralError,
    },
    #[error("plain model: {0}")]
    Neural(#[from] NeuralError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("forecast horizon must be at least 1")]
    HorizonZero,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("model has no in-sample windows (loaded from disk?)")]
    NotFitted,
    #[error("model directory: {0}")]
    Persist(String),
}

/// Everything that shapes a pipeline run besides the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub vmd: VmdConfig,
    pub train: TrainConfig,
    pub train_fraction: f64,
    pub mode: FitMode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            vmd: VmdConfig::default(),
            train: TrainConfig::default(),
            train_fraction: 0.8,
            mode: FitMode::Paper,
        }
    }
}

/// One trained LSTM and the data it forecasts from.
#[derive(Debug, Clone, PartialEq)]
pub struct SubModel {
    pub params: LstmParams,
    pub config: TrainConfig,
    pub history: Vec<EpochLoss>,
    /// Maps the component to [0, 1]; its inverse yields series-scale values.
    pub scaler: ScalerParams,
    /// Last `lookback` component values, component-scaled.
    pub tail: Vec<f64>,
    /// In-sample windows for every target, component-scaled. Empty after loading.
    pub windows: SupervisedWindows,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridModel {
    pub vmd_config: VmdConfig,
    pub train_config: TrainConfig,
    pub mode: FitMode,
    pub split: SplitIndex,
    pub series_scaler: ScalerParams,
    pub center_freqs: Vec<f64>,
    /// Index-aligned with the modes, lowest frequency first.
    pub sub_models: Vec<SubModel>,
    pub last_date: NaiveDate,
    pub target_dates: Vec<NaiveDate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlainModel {
    pub train_config: TrainConfig,
    pub mode: FitMode,
    pub split: SplitIndex,
    pub series_scaler: ScalerParams,
    pub sub_model: SubModel,
    pub last_date: NaiveDate,
    pub target_dates: Vec<NaiveDate>,
}

/// Anything that maps a lookback window to the next value.
pub trait OneStep {
    fn predict_one(&self, window: &[f64]) -> Result<f64, NeuralError>;

    fn predict_many(&self, windows: &[Vec<f64>]) -> Result<Vec<f64>, NeuralError> {
        windows.iter().map(|w| self.predict_one(w)).collect()
    }
}

impl OneStep for LstmParams {
    fn predict_one(&self, window: &[f64]) -> Result<f64, NeuralError> {
        neural::predict(self, window)
    }

    fn predict_many(&self, windows: &[Vec<f64>]) -> Result<Vec<f64>, NeuralError> {
        neural::predict_batch(self, windows)
    }
}

struct ComponentData {
    scaler: ScalerParams,
    windows: SupervisedWindows,
    tail: Vec<f64>,
}

fn validation_cut(boundary: usize) -> usize {
    boundary - (boundary / 10).max(1)
}

fn check_length(series: &TimeSeries, config: &PipelineConfig) -> Result<SplitIndex, PipelineError> {
    config.train.validate()?;
    let lookback = config.train.lookback;
    if series.len() <= lookback {
        return Err(SeriesError::SeriesTooShort {
            len: series.len(),
            lookback,
        }
        .into());
    }
    let split = SplitIndex::new(series.len() - lookback, config.train_fraction)?;
    if split.boundary < 2 {
        return Err(SeriesError::EmptyPartition {
            fraction: config.train_fraction,
            train: split.boundary,
            test: series.len() - lookback - split.boundary,
        }
        .into());
    }
    Ok(split)
}

fn series_scaler(
    series: &TimeSeries,
    split: &SplitIndex,
    lookback: usize,
    mode: FitMode,
) -> Result<ScalerParams, SeriesError> {
    match mode {
        FitMode::Paper => fit_scaler(&series.values),
        FitMode::Strict => fit_scaler(&series.values[..lookback + split.boundary]),
    }
}

fn train_component(
    data: ComponentData,
    split: &SplitIndex,
    config: TrainConfig,
) -> Result<SubModel, NeuralError> {
    let cut = validation_cut(split.boundary);
    let fit_part = data.windows.slice(0..cut);
    let val_part = data.windows.slice(cut..split.boundary);
    let outcome = neural::train(&fit_part, &val_part, &config)?;
    Ok(SubModel {
        params: outcome.params,
        config,
        history: outcome.history,
        scaler: data.scaler,
        tail: data.tail,
        windows: data.windows,
    })
}

fn component_from(
    values: &[f64],
    scaler: ScalerParams,
    lookback: usize,
) -> Result<ComponentData, SeriesError> {
    let scaled = scaler.transform(values);
    Ok(ComponentData {
        windows: make_windows(&scaled, lookback)?,
        tail: scaled[scaled.len() - lookback..].to_vec(),
        scaler,
    })
}

/// Decompose, scale and window every mode.
fn hybrid_components(
    scaled: &[f64],
    split: &SplitIndex,
    config: &PipelineConfig,
) -> Result<(Vec<ComponentData>, Vec<f64>), PipelineError> {
    let lookback = config.train.lookback;
    match config.mode {
        FitMode::Paper => {
            let set = decompose(scaled, &config.vmd)?;
            let comps = set
                .modes
                .iter()
                .enumerate()
                .map(|(index, mode)| {
                    let scaler = fit_scaler(mode)
                        .map_err(|source| PipelineError::ImfScale { index, source })?;
                    Ok(component_from(mode, scaler, lookback)?)
                })
                .collect::<Result<Vec<_>, PipelineError>>()?;
            Ok((comps, set.center_freqs))
        }
        FitMode::Strict => {
            let train_end = lookback + split.boundary;
            let prefix = decompose(&scaled[..train_end], &config.vmd)?;
            let full = decompose(scaled, &config.vmd)?;
            // one decomposition per test target, observed data only
            let test_sets = (train_end..scaled.len())
                .into_par_iter()
                .map(|t| decompose(&scaled[..t], &config.vmd))
                .collect::<Vec<_>>()
                .into_iter()
                .collect::<Result<Vec<_>, _>>()?;

            let comps = prefix
                .modes
                .iter()
                .enumerate()
                .map(|(index, mode)| {
                    let scaler = fit_scaler(mode)
                        .map_err(|source| PipelineError::ImfScale { index, source })?;
                    let mut data = component_from(mode, scaler, lookback)?;
                    let last = &full.modes[index];
                    // component targets past the prefix only feed diagnostics,
                    // scoring uses the observed prices
                    for (set, t) in test_sets.iter().zip(train_end..) {
                        let m = &set.modes[index];
                        data.windows
                            .inputs
                            .push(scaler.transform(&m[t - lookback..t]));
                        data.windows.targets.push(scaler.scale(last[t]));
                    }
                    data.tail = scaler.transform(&last[last.len() - lookback..]);
                    Ok(data)
                })
                .collect::<Result<Vec<_>, PipelineError>>()?;
            Ok((comps, prefix.center_freqs))
        }
    }
}

pub fn fit_hybrid(
    series: &TimeSeries,
    config: &PipelineConfig,
) -> Result<HybridModel, PipelineError> {
    let split = check_length(series, config)?;
    let lookback = config.train.lookback;
    let scaler = series_scaler(series, &split, lookback, config.mode)?;
    let scaled = scaler.transform(&series.values);
    let (components, center_freqs) = hybrid_components(&scaled, &split, config)?;

    let base_seed = config.train.seed;
    let sub_models = components
        .into_par_iter()
        .enumerate()
        .map(|(index, data)| {
            let cfg = TrainConfig {
                seed: base_seed.wrapping_add(index as u64),
                ..config.train
            };
            train_component(data, &split, cfg)
                .map_err(|source| PipelineError::ImfModel { index, source })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;

    Ok(HybridModel {
        vmd_config: config.vmd.clone(),
        train_config: config.train,
        mode: config.mode,
        split,
        series_scaler: scaler,
        center_freqs,
        sub_models,
        last_date: series.last_date().expect("nonempty"),
        target_dates: series.dates[lookback..].to_vec(),
    })
}

pub fn fit_plain(
    series: &TimeSeries,
    config: &PipelineConfig,
) -> Result<PlainModel, PipelineError> {
    let split = check_length(series, config)?;
    let lookback = config.train.lookback;
    let scaler = series_scaler(series, &split, lookback, config.mode)?;
    let scaled = scaler.transform(&series.values);
    // the scaled series is its own single component; an identity scaler keeps
    // the preprocessing identical to one hybrid sub-model in paper mode
    let component_scaler = match config.mode {
        FitMode::Paper => fit_scaler(&scaled)?,
        FitMode::Strict => fit_scaler(&scaled[..lookback + split.boundary])?,
    };
    let data = component_from(&scaled, component_scaler, lookback)?;
    let sub_model = train_component(data, &split, config.train)?;
    Ok(PlainModel {
        train_config: config.train,
        mode: config.mode,
        split,
        series_scaler: scaler,
        sub_model,
        last_date: series.last_date().expect("nonempty"),
        target_dates: series.dates[lookback..].to_vec(),
    })
}

/// In-sample one-step predictions, restored to price units.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedPredictions {
    pub dates: Vec<NaiveDate>,
    pub predicted: Vec<f64>,
    /// Index of the first test target.
    pub boundary: usize,
}

impl FittedPredictions {
    pub fn train(&self) -> &[f64] {
        &self.predicted[..self.boundary]
    }

    pub fn test(&self) -> &[f64] {
        &self.predicted[self.boundary..]
    }
}

/// Sum component predictions (mapped back to series scale) in component
/// order and undo the series scaling.
pub fn ensemble_restore<P: OneStep + Sync>(
    predictors: &[P],
    scalers: &[ScalerParams],
    windows: &[&[Vec<f64>]],
    series_scaler: &ScalerParams,
) -> Result<Vec<f64>, PipelineError> {
    if predictors.len() != scalers.len() || predictors.len() != windows.len() {
        return Err(PipelineError::ShapeMismatch(format!(
            "{} predictors, {} scalers, {} window sets",
            predictors.len(),
            scalers.len(),
            windows.len()
        )));
    }
    let len = windows.first().map_or(0, |w| w.len());
    if windows.iter().any(|w| w.len() != len) {
        return Err(PipelineError::ShapeMismatch(
            "window sets differ in length".into(),
        ));
    }
    let per_component = predictors
        .par_iter()
        .zip(windows.par_iter())
        .enumerate()
        .map(|(index, (p, w))| {
            p.predict_many(w)
                .map_err(|source| PipelineError::ImfModel { index, source })
        })
        .collect::<Vec<_>>();
    let mut ensemble = vec![0.0; len];
    for (preds, scaler) in per_component.into_iter().zip(scalers) {
        for (e, y) in ensemble.iter_mut().zip(preds?) {
            *e += scaler.unscale(y);
        }
    }
    Ok(series_scaler.inverse_transform(&ensemble))
}

fn fitted(
    sub_models: &[SubModel],
    series_scaler: &ScalerParams,
    dates: &[NaiveDate],
    split: &SplitIndex,
) -> Result<FittedPredictions, PipelineError> {
    if sub_models.iter().any(|m| m.windows.len() != dates.len()) {
        return Err(PipelineError::NotFitted);
    }
    let params: Vec<&LstmParams> = sub_models.iter().map(|m| &m.params).collect();
    let scalers: Vec<ScalerParams> = sub_models.iter().map(|m| m.scaler).collect();
    let windows: Vec<&[Vec<f64>]> = sub_models
        .iter()
        .map(|m| m.windows.inputs.as_slice())
        .collect();
    let predicted = ensemble_restore(&params, &scalers, &windows, series_scaler)?;
    debug_assert!(dates[..split.boundary]
        .iter()
        .all(|d| *d < dates[split.boundary]));
    Ok(FittedPredictions {
        dates: dates.to_vec(),
        predicted,
        boundary: split.boundary,
    })
}

impl<P: OneStep + ?Sized> OneStep for &P {
    fn predict_one(&self, window: &[f64]) -> Result<f64, NeuralError> {
        (**self).predict_one(window)
    }

    fn predict_many(&self, windows: &[Vec<f64>]) -> Result<Vec<f64>, NeuralError> {
        (**self).predict_many(windows)
    }
}

pub fn predict_fitted(model: &HybridModel) -> Result<FittedPredictions, PipelineError> {
    fitted(
        &model.sub_models,
        &model.series_scaler,
        &model.target_dates,
        &model.split,
    )
}

pub fn predict_fitted_plain(model: &PlainModel) -> Result<FittedPredictions, PipelineError> {
    fitted(
        std::slice::from_ref(&model.sub_model),
        &model.series_scaler,
        &model.target_dates,
        &model.split,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastReport {
    pub horizon: usize,
    /// Per-mode forecasts in series scale.
    pub per_mode: Vec<Vec<f64>>,
    pub ensemble_scaled: Vec<f64>,
    pub ensemble_restored: Vec<f64>,
    /// Date of the first forecast value.
    pub start_date: NaiveDate,
}

impl ForecastReport {
    pub fn dates(&self) -> Vec<NaiveDate> {
        self.start_date.iter_days().take(self.horizon).collect()
    }
}

/// Iterated one-step forecast of one component: predict, append, shift.
pub fn recursive_component<P: OneStep>(
    predictor: &P,
    seed_window: &[f64],
    horizon: usize,
) -> Result<Vec<f64>, NeuralError> {
    let mut window = seed_window.to_vec();
    let mut out = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let y = predictor.predict_one(&window)?;
        out.push(y);
        window.remove(0);
        window.push(y);
    }
    Ok(out)
}

/// Forecast every component recursively, then sum and restore.
pub fn ensemble_forecast<P: OneStep + Sync>(
    predictors: &[P],
    scalers: &[ScalerParams],
    tails: &[&[f64]],
    series_scaler: &ScalerParams,
    horizon: usize,
    last_date: NaiveDate,
) -> Result<ForecastReport, PipelineError> {
    if horizon == 0 {
        return Err(PipelineError::HorizonZero);
    }
    if predictors.len() != scalers.len() || predictors.len() != tails.len() {
        return Err(PipelineError::ShapeMismatch(
            "components disagree in count".into(),
        ));
    }
    let per_mode = predictors
        .par_iter()
        .zip(tails.par_iter())
        .enumerate()
        .map(|(index, (p, tail))| {
            recursive_component(p, tail, horizon)
                .map_err(|source| PipelineError::ImfModel { index, source })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .zip(scalers)
        .map(|(r, s)| r.map(|v| s.inverse_transform(&v)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut ensemble_scaled = vec![0.0; horizon];
    for mode in &per_mode {
        for (e, v) in ensemble_scaled.iter_mut().zip(mode) {
            *e += v;
        }
    }
    let ensemble_restored = series_scaler.inverse_transform(&ensemble_scaled);
    Ok(ForecastReport {
        horizon,
        per_mode,
        ensemble_scaled,
        ensemble_restored,
        start_date: last_date.succ_opt().expect("date in range"),
    })
}

pub fn forecast_recursive(
    model: &HybridModel,
    horizon: usize,
) -> Result<ForecastReport, PipelineError> {
    let params: Vec<&LstmParams> = model.sub_models.iter().map(|m| &m.params).collect();
    let scalers: Vec<ScalerParams> = model.sub_models.iter().map(|m| m.scaler).collect();
    let tails: Vec<&[f64]> = model.sub_models.iter().map(|m| m.tail.as_slice()).collect();
    ensemble_forecast(
        &params,
        &scalers,
        &tails,
        &model.series_scaler,
        horizon,
        model.last_date,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionMetrics {
    pub train: MetricsReport,
    pub test: MetricsReport,
}

/// Which pipeline did better on each test metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Winners {
    pub rmse: bool,
    pub mae: bool,
    pub mse: bool,
    pub r2: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    #[serde(rename = "vmd_lstm")]
    pub hybrid: PartitionMetrics,
    #[serde(rename = "plain_lstm")]
    pub plain: PartitionMetrics,
}

impl ComparisonReport {
    pub fn new(hybrid: PartitionMetrics, plain: PartitionMetrics) -> Self {
        Self { hybrid, plain }
    }

    /// `true` where the hybrid wins on the test partition.
    pub fn hybrid_wins(&self) -> Winners {
        let (h, p) = (self.hybrid.test, self.plain.test);
        Winners {
            rmse: h.rmse < p.rmse,
            mae: h.mae < p.mae,
            mse: h.mse < p.mse,
            r2: h.r2 > p.r2,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Actual prices and both pipelines' in-sample predictions, target-aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionTable {
    pub dates: Vec<NaiveDate>,
    pub actual: Vec<f64>,
    pub hybrid: Vec<f64>,
    pub plain: Vec<f64>,
    pub boundary: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub report: ComparisonReport,
    pub hybrid: HybridModel,
    pub plain: PlainModel,
    pub predictions: PredictionTable,
}

fn partition_metrics(
    actual: &[f64],
    predicted: &FittedPredictions,
) -> Result<PartitionMetrics, PipelineError> {
    let b = predicted.boundary;
    Ok(PartitionMetrics {
        train: evaluate(&actual[..b], predicted.train())?,
        test: evaluate(&actual[b..], predicted.test())?,
    })
}

/// Train both pipelines with the same base seed and score them in price units.
pub fn compare(series: &TimeSeries, config: &PipelineConfig) -> Result<Comparison, PipelineError> {
    let hybrid = fit_hybrid(series, config)?;
    let plain = fit_plain(series, config)?;
    let h_pred = predict_fitted(&hybrid)?;
    let p_pred = predict_fitted_plain(&plain)?;
    if h_pred.dates != p_pred.dates {
        return Err(PipelineError::ShapeMismatch(
            "pipelines disagree on target dates".into(),
        ));
    }
    let actual = series.values[config.train.lookback..].to_vec();
    let report = ComparisonReport::new(
        partition_metrics(&actual, &h_pred)?,
        partition_metrics(&actual, &p_pred)?,
    );
    let predictions = PredictionTable {
        dates: h_pred.dates,
        actual,
        hybrid: h_pred.predicted,
        plain: p_pred.predicted,
        boundary: h_pred.boundary,
    };
    Ok(Comparison {
        report,
        hybrid,
        plain,
        predictions,
    })
}

/// Metadata that, together with the per-mode model files, reproduces a
/// hybrid model's forecasts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridManifest {
    pub vmd_config: VmdConfig,
    pub train_config: TrainConfig,
    pub mode: FitMode,
    pub split: SplitIndex,
    pub series_scaler: ScalerParams,
    pub center_freqs: Vec<f64>,
    pub imf_scalers: Vec<ScalerParams>,
    pub tails: Vec<Vec<f64>>,
    pub last_date: NaiveDate,
}

pub const HYBRID_MANIFEST: &str = "hybrid.json";
pub const PLAIN_MODEL: &str = "plain.json";

pub fn imf_model_name(index: usize) -> String {
    format!("imf_{:02}.json", index + 1)
}

fn write(path: &Path, contents: &str) -> Result<(), PipelineError> {
    fs::write(path, contents)
        .map_err(|e| PipelineError::Persist(format!("{}: {e}", path.display())))
}

fn read(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|e| PipelineError::Persist(format!("{}: {e}", path.display())))
}

impl HybridModel {
    pub fn manifest(&self) -> HybridManifest {
        HybridManifest {
            vmd_config: self.vmd_config.clone(),
            train_config: self.train_config,
            mode: self.mode,
            split: self.split,
            series_scaler: self.series_scaler,
            center_freqs: self.center_freqs.clone(),
            imf_scalers: self.sub_models.iter().map(|m| m.scaler).collect(),
            tails: self.sub_models.iter().map(|m| m.tail.clone()).collect(),
            last_date: self.last_date,
        }
    }

    /// Writes `hybrid.json` and one `imf_NN.json` per mode.
    pub fn save(&self, dir: &Path) -> Result<(), PipelineError> {
        let manifest = serde_json::to_string_pretty(&self.manifest()).expect("manifest serializes");
        write(&dir.join(HYBRID_MANIFEST), &manifest)?;
        for (index, m) in self.sub_models.iter().enumerate() {
            write(
                &dir.join(imf_model_name(index)),
                &ModelFile::new(&m.params, &m.config).to_json(),
            )?;
        }
        Ok(())
    }

    /// Loads a saved model. In-sample windows and loss histories are not stored.
    pub fn load(dir: &Path) -> Result<Self, PipelineError> {
        let manifest: HybridManifest = serde_json::from_str(&read(&dir.join(HYBRID_MANIFEST))?)
            .map_err(|e| PipelineError::Persist(format!("{HYBRID_MANIFEST}: {e}")))?;
        if manifest.imf_scalers.len() != manifest.tails.len() {
            return Err(PipelineError::Persist(
                "manifest scalers and tails disagree".into(),
            ));
        }
        let sub_models = manifest
            .imf_scalers
            .iter()
            .zip(&manifest.tails)
            .enumerate()
            .map(|(index, (scaler, tail))| {
                let name = imf_model_name(index);
                let file = ModelFile::from_json(&read(&dir.join(&name))?)
                    .map_err(|e| PipelineError::Persist(format!("{name}: {e}")))?;
                let params = file
                    .params()
                    .map_err(|e| PipelineError::Persist(format!("{name}: {e}")))?;
                if tail.len() != file.lookback {
                    return Err(PipelineError::Persist(format!(
                        "{name}: tail length differs from lookback"
                    )));
                }
                Ok(SubModel {
                    params,
                    config: file.config,
                    history: Vec::new(),
                    scaler: *scaler,
                    tail: tail.clone(),
                    windows: SupervisedWindows::default(),
                })
            })
            .collect::<Result<Vec<_>, PipelineError>>()?;
        Ok(Self {
            vmd_config: manifest.vmd_config,
            train_config: manifest.train_config,
            mode: manifest.mode,
            split: manifest.split,
            series_scaler: manifest.series_scaler,
            center_freqs: manifest.center_freqs,
            sub_models,
            last_date: manifest.last_date,
            target_dates: Vec::new(),
        })
    }
}

impl PlainModel {
    pub fn save(&self, dir: &Path) -> Result<(), PipelineError> {
        let m = &self.sub_model;
        write(
            &dir.join(PLAIN_MODEL),
            &ModelFile::new(&m.params, &m.config).to_json(),
        )
    }
}
