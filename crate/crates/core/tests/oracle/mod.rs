//! Independent reference computations used by the integration and acceptance
//! tests. Nothing here calls into the library's numeric code paths.
#![allow(dead_code)]

use modecast::neural::LstmParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Plain nested-vector copy of the weights.
pub struct Weights {
    pub hidden: usize,
    pub w: [Vec<Vec<f64>>; 4],
    pub b: [Vec<f64>; 4],
    pub w_out: Vec<f64>,
    pub b_out: f64,
}

impl Weights {
    pub fn from(p: &LstmParams) -> Self {
        let rows =
            |a: &ndarray::Array2<f64>| a.outer_iter().map(|r| r.to_vec()).collect::<Vec<_>>();
        Self {
            hidden: p.hidden(),
            w: [rows(&p.w_f), rows(&p.w_i), rows(&p.w_c), rows(&p.w_o)],
            b: [
                p.b_f.to_vec(),
                p.b_i.to_vec(),
                p.b_c.to_vec(),
                p.b_o.to_vec(),
            ],
            w_out: p.w_out.to_vec(),
            b_out: p.b_out,
        }
    }
}

/// One step of the LSTM equations, written out term by term.
/// Returns (f, i, c_tilde, o, c, h).
pub fn cell(wts: &Weights, h_prev: &[f64], c_prev: &[f64], x: &[f64]) -> [Vec<f64>; 6] {
    let z: Vec<f64> = h_prev.iter().chain(x).copied().collect();
    let affine = |g: usize, j: usize| {
        let mut s = wts.b[g][j];
        for (k, zk) in z.iter().enumerate() {
            s += wts.w[g][j][k] * zk;
        }
        s
    };
    let n = wts.hidden;
    let f: Vec<f64> = (0..n).map(|j| sigmoid(affine(0, j))).collect();
    let i: Vec<f64> = (0..n).map(|j| sigmoid(affine(1, j))).collect();
    let ct: Vec<f64> = (0..n).map(|j| affine(2, j).tanh()).collect();
    let c: Vec<f64> = (0..n).map(|j| f[j] * c_prev[j] + i[j] * ct[j]).collect();
    let o: Vec<f64> = (0..n).map(|j| sigmoid(affine(3, j))).collect();
    let h: Vec<f64> = (0..n).map(|j| o[j] * c[j].tanh()).collect();
    [f, i, ct, o, c, h]
}

pub fn predict(wts: &Weights, window: &[f64]) -> f64 {
    let mut h = vec![0.0; wts.hidden];
    let mut c = vec![0.0; wts.hidden];
    for &x in window {
        let [_, _, _, _, c2, h2] = cell(wts, &h, &c, &[x]);
        h = h2;
        c = c2;
    }
    let mut y = wts.b_out;
    for (w, hv) in wts.w_out.iter().zip(&h) {
        y += w * hv;
    }
    y
}

pub fn batch_mse(p: &LstmParams, windows: &[Vec<f64>], targets: &[f64]) -> f64 {
    let wts = Weights::from(p);
    let mut s = 0.0;
    for (w, t) in windows.iter().zip(targets) {
        s += (predict(&wts, w) - t).powi(2);
    }
    s / windows.len() as f64
}

/// Central finite-difference gradient of the batch MSE for every parameter,
/// flattened in tensor order.
pub fn fd_gradient(p: &LstmParams, windows: &[Vec<f64>], targets: &[f64], eps: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut work = p.clone();
    for t in 0..10 {
        let len = work.tensors()[t].len();
        for j in 0..len {
            let orig = work.tensors()[t][j];
            work.tensors_mut()[t][j] = orig + eps;
            let up = batch_mse(&work, windows, targets);
            work.tensors_mut()[t][j] = orig - eps;
            let down = batch_mse(&work, windows, targets);
            work.tensors_mut()[t][j] = orig;
            out.push((up - down) / (2.0 * eps));
        }
    }
    out
}

/// A small random network (hidden 1..=4, window 1..=5) and a batch of three
/// random windows with targets.
pub fn gradient_case(seed: u64) -> (LstmParams, Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
    let hidden = 1 + (seed as usize % 4);
    let len = 1 + (seed as usize % 5);
    let mut p = LstmParams::init(hidden, 1, seed);
    p.b_out = rng.gen_range(-0.5..0.5);
    p.b_i.iter_mut().for_each(|b| *b = rng.gen_range(-0.5..0.5));
    let windows = (0..3)
        .map(|_| (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let targets = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (p, windows, targets)
}

pub fn flatten(p: &LstmParams) -> Vec<f64> {
    p.tensors().iter().flat_map(|t| t.iter().copied()).collect()
}

/// Largest relative disagreement; magnitudes below `floor` are compared absolutely.
pub fn max_rel_error(a: &[f64], b: &[f64], floor: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(floor))
        .fold(0.0, f64::max)
}

/// Isolate the spectral content within `half_width` bins of the strongest peak
/// nearest to `approx` (cycles/sample). Returns (peak frequency, isolated tone).
pub fn fft_isolate(signal: &[f64], approx: f64, half_width: usize) -> (f64, Vec<f64>) {
    let n = signal.len();
    let mut planner = FftPlanner::<f64>::new();
    let mut buf: Vec<Complex64> = signal.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    let centre = (approx * n as f64).round() as usize;
    let lo = centre.saturating_sub(half_width).max(1);
    let hi = (centre + half_width).min(n / 2);
    let peak = (lo..=hi)
        .max_by(|&a, &b| buf[a].norm().total_cmp(&buf[b].norm()))
        .unwrap();
    let mut keep = vec![Complex64::new(0.0, 0.0); n];
    for k in lo..=hi {
        keep[k] = buf[k];
        keep[n - k] = buf[n - k];
    }
    planner.plan_fft_inverse(n).process(&mut keep);
    let tone = keep.iter().map(|c| c.re / n as f64).collect();
    (peak as f64 / n as f64, tone)
}

pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}

/// Brute-force regression metrics: (rmse, mae, mse, r2).
pub fn metrics(actual: &[f64], predicted: &[f64]) -> (f64, f64, f64, f64) {
    let n = actual.len() as f64;
    let mut sq = 0.0;
    let mut ab = 0.0;
    for i in 0..actual.len() {
        sq += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
        ab += (actual[i] - predicted[i]).abs();
    }
    let mut ybar = 0.0;
    for y in actual {
        ybar += y;
    }
    ybar /= n;
    let mut tot = 0.0;
    for y in actual {
        tot += (y - ybar) * (y - ybar);
    }
    ((sq / n).sqrt(), ab / n, sq / n, 1.0 - sq / tot)
}

/// Sort-and-interpolate quantile.
pub fn quantile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = p * (v.len() - 1) as f64;
    let below = pos.floor() as usize;
    if below + 1 >= v.len() {
        return v[v.len() - 1];
    }
    v[below] * (1.0 - (pos - below as f64)) + v[below + 1] * (pos - below as f64)
}

pub fn fixture_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/btc_fixture.csv")
}

pub fn two_tone(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = i as f64;
            (2.0 * std::f64::consts::PI * 0.01 * t).cos()
                + (2.0 * std::f64::consts::PI * 0.12 * t).cos()
        })
        .collect()
}
