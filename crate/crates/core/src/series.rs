//! MinMax scaling, supervised windowing and chronological splitting.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("need at least 2 values to fit a scaler, got {0}")]
    TooFewValues(usize),
    #[error("degenerate range: all values equal {0}")]
    DegenerateRange(f64),
    #[error("series of length {len} is too short for lookback {lookback}")]
    SeriesTooShort { len: usize, lookback: usize },
    #[error("train fraction {fraction} leaves an empty partition ({train} train / {test} test)")]
    EmptyPartition {
        fraction: f64,
        train: usize,
        test: usize,
    },
}

/// Where scalers (and, in the pipeline, the decomposition) are fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMode {
    /// Fit on the full series before splitting. Leaks test-period range
    /// information into training.
    #[default]
    Paper,
    /// Fit on the training prefix only.
    Strict,
}

impl std::str::FromStr for FitMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Self::Paper),
            "strict" => Ok(Self::Strict),
            other => Err(format!("unknown mode `{other}` (expected paper|strict)")),
        }
    }
}

impl std::fmt::Display for FitMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Paper => "paper",
            Self::Strict => "strict",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub observed_min: f64,
    pub observed_max: f64,
}

impl ScalerParams {
    pub fn range(&self) -> f64 {
        self.observed_max - self.observed_min
    }

    pub fn scale(&self, x: f64) -> f64 {
        (x - self.observed_min) / self.range()
    }

    pub fn unscale(&self, y: f64) -> f64 {
        y * self.range() + self.observed_min
    }

    pub fn transform(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&x| self.scale(x)).collect()
    }

    pub fn inverse_transform(&self, scaled: &[f64]) -> Vec<f64> {
        scaled.iter().map(|&y| self.unscale(y)).collect()
    }
}

pub fn fit_scaler(values: &[f64]) -> Result<ScalerParams, SeriesError> {
    if values.len() < 2 {
        return Err(SeriesError::TooFewValues(values.len()));
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if hi <= lo {
        return Err(SeriesError::DegenerateRange(lo));
    }
    Ok(ScalerParams {
        observed_min: lo,
        observed_max: hi,
    })
}

/// `(x - min) / (max - min)`; values outside the fitted range map outside [0, 1].
pub fn transform(params: &ScalerParams, values: &[f64]) -> Vec<f64> {
    params.transform(values)
}

pub fn inverse_transform(params: &ScalerParams, scaled: &[f64]) -> Vec<f64> {
    params.inverse_transform(scaled)
}

/// Input windows of length `lookback` and the value that follows each.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SupervisedWindows {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    pub lookback: usize,
}

impl SupervisedWindows {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Windows `range` as a new set.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            inputs: self.inputs[range.clone()].to_vec(),
            targets: self.targets[range].to_vec(),
            lookback: self.lookback,
        }
    }
}

/// Window `i` is `values[i..i + lookback]`, its target `values[i + lookback]`.
pub fn make_windows(values: &[f64], lookback: usize) -> Result<SupervisedWindows, SeriesError> {
    if lookback == 0 || values.len() <= lookback {
        return Err(SeriesError::SeriesTooShort {
            len: values.len(),
            lookback,
        });
    }
    let (inputs, targets) = values
        .windows(lookback + 1)
        .map(|w| (w[..lookback].to_vec(), w[lookback]))
        .unzip();
    Ok(SupervisedWindows {
        inputs,
        targets,
        lookback,
    })
}

/// Chronological train/test boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitIndex {
    pub train_fraction: f64,
    pub boundary: usize,
}

impl SplitIndex {
    /// `boundary = floor(train_fraction * count)`, both sides nonempty.
    pub fn new(count: usize, train_fraction: f64) -> Result<Self, SeriesError> {
        let bad = |train, test| SeriesError::EmptyPartition {
            fraction: train_fraction,
            train,
            test,
        };
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(bad(0, count));
        }
        let boundary = (train_fraction * count as f64).floor() as usize;
        if boundary == 0 || boundary >= count {
            return Err(bad(boundary, count.saturating_sub(boundary)));
        }
        Ok(Self {
            train_fraction,
            boundary,
        })
    }
}

pub fn chrono_split(
    windows: &SupervisedWindows,
    train_fraction: f64,
) -> Result<(SupervisedWindows, SupervisedWindows), SeriesError> {
    let split = SplitIndex::new(windows.len(), train_fraction)?;
    Ok((
        windows.slice(0..split.boundary),
        windows.slice(split.boundary..windows.len()),
    ))
}
