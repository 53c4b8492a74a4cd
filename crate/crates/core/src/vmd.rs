//! Variational mode decomposition.
//!
//! The signal is mirror-extended by half its length on each side, moved to
//! the one-sided (analytic) spectrum, and split into `K` modes by alternating
//! updates: each mode spectrum is a Wiener-filtered residual centred on its
//! current frequency, each centre frequency is the power-weighted centroid of
//! its mode, and an optional dual ascent step pushes the modes towards exact
//! reconstruction. Frequencies are in cycles/sample, within [0, 0.5].

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VmdError {
    #[error("signal of length {len} is too short for {k} modes (need at least {})", 2 * k)]
    SignalTooShort { len: usize, k: usize },
    #[error("signal contains a non-finite value at index {0}")]
    NonFiniteInput(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(
        "no convergence after {iterations} iterations (mode change {change:.3e}, residual energy {residual:.3e})"
    )]
    NoConvergence {
        iterations: usize,
        change: f64,
        residual: f64,
    },
    #[error("mode {index} has length {got}, signal has {expected}")]
    LengthMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("signal has zero energy")]
    ZeroSignal,
    #[error("K = {k}: {source}")]
    AtK {
        k: usize,
        #[source]
        source: Box<VmdError>,
    },
}

/// Initial centre frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitScheme {
    /// Midpoints of `K` equal bands over (0, 0.5).
    #[default]
    Uniform,
    Zero,
    /// Sorted log-uniform draws between 1/N and 0.5.
    Random(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VmdConfig {
    pub k: usize,
    /// Bandwidth penalty.
    pub alpha: f64,
    /// Dual ascent step; 0 tolerates a reconstruction residual.
    pub tau: f64,
    pub tol: f64,
    pub max_iters: usize,
    /// Pin the first mode at zero frequency.
    pub dc_mode: bool,
    pub init: InitScheme,
}

impl Default for VmdConfig {
    fn default() -> Self {
        Self {
            k: 15,
            alpha: 2000.0,
            tau: 0.0,
            tol: 1e-7,
            max_iters: 500,
            dc_mode: false,
            init: InitScheme::Uniform,
        }
    }
}

impl VmdConfig {
    pub fn with_k(k: usize) -> Self {
        Self {
            k,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), VmdError> {
        let bad = |m: &str| Err(VmdError::InvalidConfig(m.to_string()));
        if self.k < 1 {
            return bad("K must be at least 1");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive");
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return bad("tau must be non-negative");
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad("tol must be positive");
        }
        if self.max_iters < 1 {
            return bad("max_iters must be at least 1");
        }
        Ok(())
    }
}

/// Decomposition output, modes sorted by ascending centre frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSet {
    pub modes: Vec<Vec<f64>>,
    pub center_freqs: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
    /// Relative mode change at the last iteration.
    pub final_change: f64,
}

impl ModeSet {
    pub fn k(&self) -> usize {
        self.modes.len()
    }

    /// Index-ordered sum of the modes.
    pub fn reconstruct(&self) -> Vec<f64> {
        sum_modes(&self.modes, self.modes.first().map_or(0, Vec::len))
    }
}

fn sum_modes(modes: &[Vec<f64>], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for m in modes {
        for (o, v) in out.iter_mut().zip(m) {
            *o += v;
        }
    }
    out
}

/// `‖signal − Σ modes‖² / ‖signal‖²`.
pub fn residual_energy(signal: &[f64], modes: &[Vec<f64>]) -> Result<f64, VmdError> {
    for (index, m) in modes.iter().enumerate() {
        if m.len() != signal.len() {
            return Err(VmdError::LengthMismatch {
                index,
                expected: signal.len(),
                got: m.len(),
            });
        }
    }
    let energy: f64 = signal.iter().map(|v| v * v).sum();
    if energy == 0.0 {
        return Err(VmdError::ZeroSignal);
    }
    let recon = sum_modes(modes, signal.len());
    let residual: f64 = signal
        .iter()
        .zip(&recon)
        .map(|(s, r)| (s - r).powi(2))
        .sum();
    Ok(residual / energy)
}

fn initial_freqs(config: &VmdConfig, n: usize) -> Vec<f64> {
    let k = config.k;
    let mut omega: Vec<f64> = match config.init {
        InitScheme::Uniform => (0..k).map(|i| 0.5 * (i as f64 + 0.5) / k as f64).collect(),
        InitScheme::Zero => vec![0.0; k],
        InitScheme::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let lo = (1.0 / n as f64).ln();
            let hi = 0.5f64.ln();
            let mut w: Vec<f64> = (0..k)
                .map(|_| (lo + (hi - lo) * rng.gen::<f64>()).exp())
                .collect();
            w.sort_by(f64::total_cmp);
            w
        }
    };
    if config.dc_mode {
        omega[0] = 0.0;
    }
    omega
}

/// Mirror-extended copy and the offset of the original samples inside it.
fn mirror_extend(signal: &[f64]) -> (Vec<f64>, usize) {
    let n = signal.len();
    let head = n.div_ceil(2);
    let mut ext = Vec::with_capacity(2 * n);
    ext.extend(signal[..head].iter().rev());
    ext.extend_from_slice(signal);
    ext.extend(signal[head..].iter().rev());
    (ext, head)
}

pub fn decompose(signal: &[f64], config: &VmdConfig) -> Result<ModeSet, VmdError> {
    config.validate()?;
    let k = config.k;
    let n = signal.len();
    if n < 2 * k || n < 2 {
        return Err(VmdError::SignalTooShort { len: n, k });
    }
    if let Some(i) = signal.iter().position(|v| !v.is_finite()) {
        return Err(VmdError::NonFiniteInput(i));
    }

    let (ext, offset) = mirror_extend(signal);
    let t_len = ext.len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(t_len);
    let inv = planner.plan_fft_inverse(t_len);

    let mut buf: Vec<Complex64> = ext.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fwd.process(&mut buf);
    // one-sided spectrum, bins 0..=T/2
    let bins = t_len / 2 + 1;
    let f_hat: Vec<Complex64> = buf[..bins].to_vec();
    let freqs: Vec<f64> = (0..bins).map(|b| b as f64 / t_len as f64).collect();

    let mut omega = initial_freqs(config, n);
    let mut u_hat = vec![vec![Complex64::new(0.0, 0.0); bins]; k];
    let mut prev = u_hat.clone();
    let mut lambda = vec![Complex64::new(0.0, 0.0); bins];
    let mut total = vec![Complex64::new(0.0, 0.0); bins];

    let two_alpha = 2.0 * config.alpha;
    let mut iterations = 0;
    let mut change = f64::INFINITY;
    let mut converged = false;

    while iterations < config.max_iters {
        iterations += 1;
        for (p, u) in prev.iter_mut().zip(&u_hat) {
            p.copy_from_slice(u);
        }
        for m in 0..k {
            let w_k = omega[m];
            let mode = &mut u_hat[m];
            let mut num = 0.0;
            let mut den = 0.0;
            for b in 0..bins {
                let others = total[b] - mode[b];
                let filt = 1.0 + two_alpha * (freqs[b] - w_k).powi(2);
                let v = (f_hat[b] - others + lambda[b] * 0.5) / filt;
                total[b] = others + v;
                mode[b] = v;
                let p = v.norm_sqr();
                num += freqs[b] * p;
                den += p;
            }
            if !(config.dc_mode && m == 0) && den > 0.0 {
                omega[m] = num / den;
            }
        }
        // refresh the running sum so rounding does not accumulate across iterations
        for (b, t) in total.iter_mut().enumerate() {
            *t = u_hat
                .iter()
                .fold(Complex64::new(0.0, 0.0), |acc, u| acc + u[b]);
        }
        if config.tau > 0.0 {
            for b in 0..bins {
                lambda[b] += (f_hat[b] - total[b]) * config.tau;
            }
        }

        change = u_hat
            .iter()
            .zip(&prev)
            .map(|(u, p)| {
                let diff: f64 = u.iter().zip(p).map(|(a, b)| (a - b).norm_sqr()).sum();
                let base: f64 = p.iter().map(Complex64::norm_sqr).sum();
                match (diff == 0.0, base == 0.0) {
                    (true, _) => 0.0,
                    (false, true) => f64::INFINITY,
                    (false, false) => diff / base,
                }
            })
            .sum();
        if change < config.tol {
            converged = true;
            break;
        }
    }

    let mut modes = Vec::with_capacity(k);
    let mut full = vec![Complex64::new(0.0, 0.0); t_len];
    for u in &u_hat {
        full[..bins].copy_from_slice(u);
        for b in 1..(t_len - bins + 1) {
            full[t_len - b] = u[b].conj();
        }
        inv.process(&mut full);
        let scale = 1.0 / t_len as f64;
        modes.push(
            full[offset..offset + n]
                .iter()
                .map(|c| c.re * scale)
                .collect::<Vec<f64>>(),
        );
    }

    if modes.iter().flatten().any(|v| !v.is_finite()) {
        return Err(VmdError::NoConvergence {
            iterations,
            change,
            residual: f64::NAN,
        });
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| omega[a].total_cmp(&omega[b]));
    let modes: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| std::mem::take(&mut modes[i]))
        .collect();
    let center_freqs: Vec<f64> = order.iter().map(|&i| omega[i]).collect();

    // With tau = 0 a residual is part of the model, so only an enforced
    // reconstruction that misses badly counts as a failure.
    if !converged && config.tau > 0.0 {
        let residual = residual_energy(signal, &modes).unwrap_or(0.0);
        if residual > 100.0 * config.tol {
            return Err(VmdError::NoConvergence {
                iterations,
                change,
                residual,
            });
        }
    }

    Ok(ModeSet {
        modes,
        center_freqs,
        iterations_used: iterations,
        converged,
        final_change: change,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KSweepRow {
    pub k: usize,
    pub residual_energy_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct KSweepResult {
    pub rows: Vec<KSweepRow>,
}

/// Decompose once per `K` in `k_min..=k_max`, all other settings from `template`.
/// Rows come back in ascending `K`.
pub fn sweep_k(
    signal: &[f64],
    k_min: usize,
    k_max: usize,
    template: &VmdConfig,
) -> Result<KSweepResult, VmdError> {
    if k_min < 1 || k_min > k_max {
        return Err(VmdError::InvalidConfig(format!(
            "K range {k_min}..={k_max} is empty or starts below 1"
        )));
    }
    let rows = (k_min..=k_max)
        .into_par_iter()
        .map(|k| {
            let config = VmdConfig {
                k,
                ..template.clone()
            };
            let tag = |source| VmdError::AtK {
                k,
                source: Box::new(source),
            };
            let set = decompose(signal, &config).map_err(tag)?;
            let ratio = residual_energy(signal, &set.modes).map_err(tag)?;
            Ok(KSweepRow {
                k,
                residual_energy_ratio: ratio,
            })
        })
        .collect::<Vec<Result<KSweepRow, VmdError>>>();
    // first failing K wins, independent of completion order
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(KSweepResult { rows })
}
