//! Daily closing-price CSV loading and descriptive statistics.

use std::collections::HashSet;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("unparseable date `{value}` on line {line}")]
    UnparseableDate { line: usize, value: String },
    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),
    #[error("no usable rows remain after dropping {dropped} incomplete rows")]
    EmptyAfterDrop { dropped: usize },
    #[error("series is empty")]
    EmptySeries,
}

/// One observation of the raw price file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub date: NaiveDate,
    pub close: f64,
}

/// Ordered daily observations.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TimeSeries {
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(dates: Vec<NaiveDate>, values: Vec<f64>) -> Self {
        assert_eq!(dates.len(), values.len(), "dates and values must align");
        Self { dates, values }
    }

    /// A series indexed by consecutive days starting at 2000-01-01, for synthetic inputs.
    pub fn from_values(values: Vec<f64>) -> Self {
        let start = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
        let dates = start.iter_days().take(values.len()).collect();
        Self { dates, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = RawRecord> + '_ {
        self.dates
            .iter()
            .zip(&self.values)
            .map(|(&date, &close)| RawRecord { date, close })
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.dates.last().copied()
    }
}

/// Result of [`load_csv`]: the cleaned series plus how many rows were dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub series: TimeSeries,
    pub drop_count: usize,
}

impl Loaded {
    pub fn raw_row_count(&self) -> usize {
        self.series.len() + self.drop_count
    }
}

/// Load a `Date`/`Close` style CSV.
///
/// Rows whose value cell is empty, non-numeric, non-finite or non-positive are
/// dropped and counted. An unparseable date is an error, as is a repeated date.
/// The output is sorted ascending by date.
pub fn load_csv(
    path: impl AsRef<Path>,
    date_column: &str,
    value_column: &str,
) -> Result<Loaded, IngestError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_csv(file, date_column, value_column)
}

/// Same as [`load_csv`] over any reader.
pub fn read_csv<R: std::io::Read>(
    reader: R,
    date_column: &str,
    value_column: &str,
) -> Result<Loaded, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    };
    let date_idx = find(date_column)?;
    let value_idx = find(value_column)?;

    let mut records = Vec::new();
    let mut dropped = 0usize;
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        // header is line 1
        let line = row + 2;
        let raw_date = rec.get(date_idx).unwrap_or("");
        let date = NaiveDate::parse_from_str(raw_date, "%Y-%m-%d").map_err(|_| {
            IngestError::UnparseableDate {
                line,
                value: raw_date.to_string(),
            }
        })?;
        match rec.get(value_idx).and_then(|v| v.parse::<f64>().ok()) {
            Some(close) if close.is_finite() && close > 0.0 => {
                records.push(RawRecord { date, close })
            }
            _ => dropped += 1,
        }
    }
    if records.is_empty() {
        return Err(IngestError::EmptyAfterDrop { dropped });
    }

    records.sort_by_key(|r| r.date);
    let mut seen = HashSet::with_capacity(records.len());
    for r in &records {
        if !seen.insert(r.date) {
            return Err(IngestError::DuplicateDate(r.date));
        }
    }

    let (dates, values) = records.into_iter().map(|r| (r.date, r.close)).unzip();
    Ok(Loaded {
        series: TimeSeries { dates, values },
        drop_count: dropped,
    })
}

/// Summary statistics of a series' values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

/// Count, mean, sample standard deviation (n-1), extremes and the three
/// quartiles (linear interpolation between order statistics).
pub fn describe(series: &TimeSeries) -> Result<DescriptiveStats, IngestError> {
    describe_values(&series.values)
}

pub fn describe_values(values: &[f64]) -> Result<DescriptiveStats, IngestError> {
    if values.is_empty() {
        return Err(IngestError::EmptySeries);
    }
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);

    // summing the sorted copy keeps the result permutation invariant
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        let ss: f64 = sorted.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };

    Ok(DescriptiveStats {
        count: n,
        mean,
        std,
        min: sorted[0],
        q25: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        q75: quantile_sorted(&sorted, 0.75),
        max: sorted[n - 1],
    })
}

/// Type-7 quantile of an ascending slice.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}
