//! Command-line front end. Each command validates its [`RunConfig`], writes it
//! to the output directory as `run_config.json`, then calls into `modecast`.
//!
//! Exit codes: 0 success, 2 configuration, 3 data, 4 numeric failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use modecast::ingest::{describe, load_csv, IngestError, TimeSeries};
use modecast::metrics::MetricsError;
use modecast::neural::{EpochLoss, NeuralError, TrainConfig};
use modecast::pipeline::{
    compare, fit_hybrid, fit_plain, forecast_recursive, imf_model_name, HybridModel,
    PipelineConfig, PipelineError,
};
use modecast::series::{fit_scaler, SeriesError};
use modecast::vmd::{decompose, sweep_k, VmdConfig, VmdError};
use modecast::FitMode;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DATE_COLUMN: &str = "Date";
pub const VALUE_COLUMN: &str = "Close";

#[derive(Debug, Parser)]
#[command(name = "modecast", version, about = "VMD + LSTM ensemble forecasting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Summary statistics of the input series (stats.json)
    Describe(Flags),
    /// Residual energy for each K in kmin..=kmax (ksweep.csv)
    Ksweep(Flags),
    /// Decompose the price series into K modes (modes.csv, freqs.json)
    Decompose(Flags),
    /// Train the hybrid and plain models (model files, loss_history.csv)
    Train(Flags),
    /// Recursive forecast from a trained model directory (forecast.csv)
    Forecast(Flags),
    /// Train and score both pipelines (comparison.json, predictions.csv, models)
    Compare(Flags),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Describe(_) => "describe",
            Command::Ksweep(_) => "ksweep",
            Command::Decompose(_) => "decompose",
            Command::Train(_) => "train",
            Command::Forecast(_) => "forecast",
            Command::Compare(_) => "compare",
        }
    }

    pub fn flags(&self) -> &Flags {
        match self {
            Command::Describe(f)
            | Command::Ksweep(f)
            | Command::Decompose(f)
            | Command::Train(f)
            | Command::Forecast(f)
            | Command::Compare(f) => f,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    /// Price CSV with `Date` and `Close` columns
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output directory, created if missing
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Trained model directory (forecast)
    #[arg(long)]
    pub model_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 15)]
    pub k: usize,
    #[arg(long, default_value_t = 2000.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 5)]
    pub kmin: usize,
    #[arg(long, default_value_t = 20)]
    pub kmax: usize,
    #[arg(long, default_value_t = 30)]
    pub lookback: usize,
    #[arg(long, default_value_t = 20)]
    pub epochs: usize,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    #[arg(long, env = "MODECAST_SEED", default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long, default_value_t = 30)]
    pub horizon: usize,
    /// paper: fit scalers and VMD on the full series; strict: training prefix only
    #[arg(long, default_value_t = FitMode::Paper)]
    pub mode: FitMode,
}

/// The validated settings of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub model_dir: Option<PathBuf>,
    pub k: usize,
    pub alpha: f64,
    pub kmin: usize,
    pub kmax: usize,
    pub lookback: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub train_fraction: f64,
    pub horizon: usize,
    pub mode: FitMode,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        CliError::Data(e.to_string())
    }
}

fn vmd_error(e: &VmdError) -> fn(String) -> CliError {
    match e {
        VmdError::InvalidConfig(_) => CliError::Config,
        VmdError::SignalTooShort { .. } | VmdError::NonFiniteInput(_) | VmdError::ZeroSignal => {
            CliError::Data
        }
        VmdError::AtK { source, .. } => vmd_error(source),
        _ => CliError::Numeric,
    }
}

impl From<VmdError> for CliError {
    fn from(e: VmdError) -> Self {
        vmd_error(&e)(e.to_string())
    }
}

fn neural_error(e: &NeuralError) -> fn(String) -> CliError {
    match e {
        NeuralError::InvalidConfig(_) => CliError::Config,
        NeuralError::Persist(_) | NeuralError::EmptyPartition(_) => CliError::Data,
        _ => CliError::Numeric,
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        let kind: fn(String) -> CliError = match &e {
            PipelineError::Series(_) | PipelineError::ImfScale { .. } => CliError::Data,
            PipelineError::Vmd(v) => vmd_error(v),
            PipelineError::ImfModel { source, .. } | PipelineError::Neural(source) => {
                neural_error(source)
            }
            PipelineError::Metrics(MetricsError::ConstantActual) => CliError::Data,
            PipelineError::HorizonZero => CliError::Config,
            PipelineError::Persist(_) | PipelineError::NotFitted => CliError::Data,
            PipelineError::Metrics(_) | PipelineError::ShapeMismatch(_) => CliError::Numeric,
        };
        kind(e.to_string())
    }
}

impl RunConfig {
    pub fn from_command(command: &Command) -> Self {
        let f = command.flags();
        Self {
            command: command.name().to_string(),
            input: f.input.clone(),
            out: f.out.clone(),
            model_dir: f.model_dir.clone(),
            k: f.k,
            alpha: f.alpha,
            kmin: f.kmin,
            kmax: f.kmax,
            lookback: f.lookback,
            epochs: f.epochs,
            batch_size: f.batch_size,
            learning_rate: f.lr,
            seed: f.seed,
            train_fraction: f.train_fraction,
            horizon: f.horizon,
            mode: f.mode,
        }
    }

    pub fn vmd(&self) -> VmdConfig {
        VmdConfig {
            alpha: self.alpha,
            ..VmdConfig::with_k(self.k)
        }
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            vmd: self.vmd(),
            train: TrainConfig {
                epochs: self.epochs,
                batch_size: self.batch_size,
                learning_rate: self.learning_rate,
                seed: self.seed,
                hidden_size: TrainConfig::default().hidden_size,
                lookback: self.lookback,
            },
            train_fraction: self.train_fraction,
            mode: self.mode,
        }
    }

    /// Checks everything the command will use before any work starts.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let needs_input = self.command != "forecast";
        if needs_input && self.input.is_none() {
            return bad("--input is required".into());
        }
        if self.command == "forecast" && self.model_dir.is_none() {
            return bad("--model-dir is required".into());
        }
        match self.command.as_str() {
            "ksweep" => {
                if self.kmin == 0 {
                    return bad("kmin must be at least 1".into());
                }
                if self.kmin > self.kmax {
                    return bad("kmin exceeds kmax".into());
                }
                VmdConfig {
                    alpha: self.alpha,
                    ..VmdConfig::with_k(self.kmin)
                }
                .validate()?;
            }
            "decompose" => self.vmd().validate()?,
            "train" | "compare" => {
                let p = self.pipeline();
                p.vmd.validate()?;
                p.train
                    .validate()
                    .map_err(|e| CliError::Config(e.to_string()))?;
                if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
                    return bad(format!(
                        "train fraction {} is outside (0, 1)",
                        self.train_fraction
                    ));
                }
            }
            "forecast" if self.horizon == 0 => {
                return bad("horizon must be at least 1".into());
            }
            _ => {}
        }
        Ok(())
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn prepare_out(config: &RunConfig) -> Result<(), CliError> {
    fs::create_dir_all(&config.out)
        .map_err(|e| CliError::Data(format!("{}: {e}", config.out.display())))?;
    let json = serde_json::to_string_pretty(config).expect("run config serializes");
    write_file(&config.out.join("run_config.json"), &(json + "\n"))
}

fn load(config: &RunConfig) -> Result<TimeSeries, CliError> {
    let input = config.input.as_ref().expect("validated");
    Ok(load_csv(input, DATE_COLUMN, VALUE_COLUMN)?.series)
}

fn scaled(series: &TimeSeries) -> Result<Vec<f64>, CliError> {
    Ok(fit_scaler(&series.values)?.transform(&series.values))
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let config = RunConfig::from_command(&cli.command);
    config.validate()?;
    prepare_out(&config)?;
    match config.command.as_str() {
        "describe" => cmd_describe(&config),
        "ksweep" => cmd_ksweep(&config),
        "decompose" => cmd_decompose(&config),
        "train" => cmd_train(&config),
        "forecast" => cmd_forecast(&config),
        "compare" => cmd_compare(&config),
        _ => unreachable!(),
    }
}

/// Parses `args`, runs, reports errors on stderr and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("modecast: {e}");
            e.exit_code()
        }
    }
}

pub fn cmd_describe(config: &RunConfig) -> Result<(), CliError> {
    let stats = describe(&load(config)?)?;
    let json = serde_json::to_string_pretty(&stats).expect("stats serialize") + "\n";
    print!("{json}");
    write_file(&config.out.join("stats.json"), &json)
}

pub fn cmd_ksweep(config: &RunConfig) -> Result<(), CliError> {
    let signal = scaled(&load(config)?)?;
    let base = VmdConfig {
        alpha: config.alpha,
        ..VmdConfig::default()
    };
    let sweep = sweep_k(&signal, config.kmin, config.kmax, &base)?;
    let mut csv = String::from("K,residual_energy\n");
    for row in &sweep.rows {
        writeln!(csv, "{},{}", row.k, row.residual_energy_ratio).unwrap();
    }
    write_file(&config.out.join("ksweep.csv"), &csv)
}

#[derive(Serialize)]
struct Freqs<'a> {
    center_freqs: &'a [f64],
    alpha: f64,
    #[serde(rename = "K")]
    k: usize,
}

pub fn cmd_decompose(config: &RunConfig) -> Result<(), CliError> {
    let signal = load(config)?.values;
    let vmd = config.vmd();
    let set = decompose(&signal, &vmd)?;
    let mut csv = String::from("t");
    for k in 1..=set.k() {
        write!(csv, ",imf_{k}").unwrap();
    }
    csv.push('\n');
    for t in 0..signal.len() {
        write!(csv, "{t}").unwrap();
        for mode in &set.modes {
            write!(csv, ",{}", mode[t]).unwrap();
        }
        csv.push('\n');
    }
    write_file(&config.out.join("modes.csv"), &csv)?;
    let freqs = Freqs {
        center_freqs: &set.center_freqs,
        alpha: vmd.alpha,
        k: vmd.k,
    };
    let json = serde_json::to_string_pretty(&freqs).expect("freqs serialize") + "\n";
    write_file(&config.out.join("freqs.json"), &json)
}

fn loss_history<'a>(rows: impl IntoIterator<Item = (String, &'a [EpochLoss])>) -> String {
    let mut csv = String::from("model,epoch,train_mse,val_mse\n");
    for (name, history) in rows {
        for e in history {
            writeln!(csv, "{name},{},{},{}", e.epoch, e.train_mse, e.val_mse).unwrap();
        }
    }
    csv
}

fn save_models(
    dir: &Path,
    hybrid: &HybridModel,
    plain: &modecast::pipeline::PlainModel,
) -> Result<(), CliError> {
    hybrid.save(dir)?;
    plain.save(dir)?;
    let rows = hybrid
        .sub_models
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let name = imf_model_name(i);
            (
                name.trim_end_matches(".json").to_string(),
                m.history.as_slice(),
            )
        })
        .chain(std::iter::once((
            "plain".to_string(),
            plain.sub_model.history.as_slice(),
        )));
    write_file(&dir.join("loss_history.csv"), &loss_history(rows))
}

pub fn cmd_train(config: &RunConfig) -> Result<(), CliError> {
    let series = load(config)?;
    let pipeline = config.pipeline();
    let hybrid = fit_hybrid(&series, &pipeline)?;
    let plain = fit_plain(&series, &pipeline)?;
    save_models(&config.out, &hybrid, &plain)
}

pub fn cmd_forecast(config: &RunConfig) -> Result<(), CliError> {
    let dir = config.model_dir.as_ref().expect("validated");
    let model = HybridModel::load(dir)?;
    let report = forecast_recursive(&model, config.horizon)?;
    if report.ensemble_restored.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Numeric("forecast is not finite".into()));
    }
    let mut csv = String::from("date,forecast_usd\n");
    for (date, v) in report.dates().iter().zip(&report.ensemble_restored) {
        writeln!(csv, "{},{}", date.format("%Y-%m-%d"), v).unwrap();
    }
    write_file(&config.out.join("forecast.csv"), &csv)
}

pub fn cmd_compare(config: &RunConfig) -> Result<(), CliError> {
    let series = load(config)?;
    let c = compare(&series, &config.pipeline())?;
    write_file(
        &config.out.join("comparison.json"),
        &(c.report.to_json() + "\n"),
    )?;
    let t = &c.predictions;
    let mut csv = String::from("date,actual,hybrid_pred,plain_pred,partition\n");
    for i in 0..t.dates.len() {
        let partition = if i < t.boundary { "train" } else { "test" };
        writeln!(
            csv,
            "{},{},{},{},{partition}",
            t.dates[i].format("%Y-%m-%d"),
            t.actual[i],
            t.hybrid[i],
            t.plain[i]
        )
        .unwrap();
    }
    write_file(&config.out.join("predictions.csv"), &csv)?;
    save_models(&config.out, &c.hybrid, &c.plain)
}
