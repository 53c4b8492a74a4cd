//! Regression error metrics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("length mismatch: {actual} actual vs {predicted} predicted")]
    LengthMismatch { actual: usize, predicted: usize },
    #[error("need at least 2 points, got {0}")]
    Empty(usize),
    #[error("actual values are constant, R² is undefined")]
    ConstantActual,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub rmse: f64,
    pub mae: f64,
    pub mse: f64,
    pub r2: f64,
}

/// RMSE, MAE, MSE and R² (against the mean of `actual`).
pub fn evaluate(actual: &[f64], predicted: &[f64]) -> Result<MetricsReport, MetricsError> {
    if actual.len() != predicted.len() {
        return Err(MetricsError::LengthMismatch {
            actual: actual.len(),
            predicted: predicted.len(),
        });
    }
    let n = actual.len();
    if n < 2 {
        return Err(MetricsError::Empty(n));
    }
    let mean = actual.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = actual.iter().map(|y| (y - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(MetricsError::ConstantActual);
    }
    let (ss_res, abs_sum) = actual
        .iter()
        .zip(predicted)
        .fold((0.0, 0.0), |(sq, ab), (y, p)| {
            let e = y - p;
            (sq + e * e, ab + e.abs())
        });
    let mse = ss_res / n as f64;
    Ok(MetricsReport {
        rmse: mse.sqrt(),
        mae: abs_sum / n as f64,
        mse,
        r2: 1.0 - ss_res / ss_tot,
    })
}
