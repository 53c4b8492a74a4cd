//! Single-layer LSTM regressor with a scalar dense head, trained from scratch
//! with backpropagation through time and Adam.

mod adam;
mod lstm;
mod train;

pub use adam::{adam_step, AdamState, BETA1, BETA2, EPSILON};
pub use lstm::{
    backward, cell_step, forward, mse_loss, predict, predict_batch, ForwardCache, GateCache,
};
pub use train::{train, EpochLoss, TrainOutcome};

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NeuralError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite activation at step {step}")]
    NonFiniteActivation { step: usize },
    #[error("length mismatch: {0} predictions vs {1} targets")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    Empty,
    #[error("empty {0} partition")]
    EmptyPartition(&'static str),
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("model file: {0}")]
    Persist(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub hidden_size: usize,
    pub lookback: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 20,
            batch_size: 32,
            learning_rate: 1e-3,
            seed: 42,
            hidden_size: 64,
            lookback: 30,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), NeuralError> {
        let bad = |m: &str| Err(NeuralError::InvalidConfig(m.to_string()));
        if self.epochs == 0 {
            return bad("epochs must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch size must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive");
        }
        if self.hidden_size == 0 {
            return bad("hidden size must be positive");
        }
        if self.lookback == 0 {
            return bad("lookback must be positive");
        }
        Ok(())
    }
}

/// Gate weights act on the concatenation `[h_{t-1}, x_t]`: the first `hidden`
/// columns multiply the previous hidden state, the rest the input.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    pub w_f: Array2<f64>,
    pub w_i: Array2<f64>,
    pub w_c: Array2<f64>,
    pub w_o: Array2<f64>,
    pub b_f: Array1<f64>,
    pub b_i: Array1<f64>,
    pub b_c: Array1<f64>,
    pub b_o: Array1<f64>,
    pub w_out: Array1<f64>,
    pub b_out: f64,
}

/// Recurrent state carried between steps.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub h: Array1<f64>,
    pub c: Array1<f64>,
}

impl LstmState {
    pub fn zeros(hidden: usize) -> Self {
        Self {
            h: Array1::zeros(hidden),
            c: Array1::zeros(hidden),
        }
    }
}

pub const TENSOR_NAMES: [&str; 10] = [
    "w_f", "w_i", "w_c", "w_o", "b_f", "b_i", "b_c", "b_o", "w_out", "b_out",
];

impl LstmParams {
    pub fn zeros(hidden: usize, input: usize) -> Self {
        let cols = hidden + input;
        Self {
            w_f: Array2::zeros((hidden, cols)),
            w_i: Array2::zeros((hidden, cols)),
            w_c: Array2::zeros((hidden, cols)),
            w_o: Array2::zeros((hidden, cols)),
            b_f: Array1::zeros(hidden),
            b_i: Array1::zeros(hidden),
            b_c: Array1::zeros(hidden),
            b_o: Array1::zeros(hidden),
            w_out: Array1::zeros(hidden),
            b_out: 0.0,
        }
    }

    /// Weights uniform in ±1/sqrt(fan_in), biases zero except the forget gate at 1.
    pub fn init(hidden: usize, input: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = Self::zeros(hidden, input);
        let gate_bound = 1.0 / ((hidden + input) as f64).sqrt();
        for w in [&mut p.w_f, &mut p.w_i, &mut p.w_c, &mut p.w_o] {
            w.iter_mut()
                .for_each(|v| *v = rng.gen_range(-gate_bound..gate_bound));
        }
        let head_bound = 1.0 / (hidden as f64).sqrt();
        p.w_out
            .iter_mut()
            .for_each(|v| *v = rng.gen_range(-head_bound..head_bound));
        p.b_f.fill(1.0);
        p
    }

    pub fn hidden(&self) -> usize {
        self.w_f.nrows()
    }

    pub fn input(&self) -> usize {
        self.w_f.ncols() - self.hidden()
    }

    pub fn tensors(&self) -> [&[f64]; 10] {
        fn s(a: &Array2<f64>) -> &[f64] {
            a.as_slice().expect("standard layout")
        }
        fn v(a: &Array1<f64>) -> &[f64] {
            a.as_slice().expect("standard layout")
        }
        [
            s(&self.w_f),
            s(&self.w_i),
            s(&self.w_c),
            s(&self.w_o),
            v(&self.b_f),
            v(&self.b_i),
            v(&self.b_c),
            v(&self.b_o),
            v(&self.w_out),
            std::slice::from_ref(&self.b_out),
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 10] {
        let Self {
            w_f,
            w_i,
            w_c,
            w_o,
            b_f,
            b_i,
            b_c,
            b_o,
            w_out,
            b_out,
        } = self;
        [
            w_f.as_slice_mut().expect("standard layout"),
            w_i.as_slice_mut().expect("standard layout"),
            w_c.as_slice_mut().expect("standard layout"),
            w_o.as_slice_mut().expect("standard layout"),
            b_f.as_slice_mut().expect("standard layout"),
            b_i.as_slice_mut().expect("standard layout"),
            b_c.as_slice_mut().expect("standard layout"),
            b_o.as_slice_mut().expect("standard layout"),
            w_out.as_slice_mut().expect("standard layout"),
            std::slice::from_mut(b_out),
        ]
    }

    pub fn param_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|t| t.iter().all(|v| v.is_finite()))
    }

    fn check_shapes(&self) -> Result<(), NeuralError> {
        let h = self.hidden();
        let cols = self.w_f.ncols();
        let ok = cols > h
            && [&self.w_i, &self.w_c, &self.w_o]
                .iter()
                .all(|w| w.dim() == (h, cols))
            && [&self.b_f, &self.b_i, &self.b_c, &self.b_o, &self.w_out]
                .iter()
                .all(|b| b.len() == h);
        if ok {
            Ok(())
        } else {
            Err(NeuralError::ShapeMismatch(
                "gate tensors disagree on hidden/input size".into(),
            ))
        }
    }
}

/// On-disk model: shapes, row-major weights and the run that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub hidden_size: usize,
    pub input_size: usize,
    pub lookback: usize,
    pub seed: u64,
    pub config: TrainConfig,
    pub w_f: Vec<f64>,
    pub w_i: Vec<f64>,
    pub w_c: Vec<f64>,
    pub w_o: Vec<f64>,
    pub b_f: Vec<f64>,
    pub b_i: Vec<f64>,
    pub b_c: Vec<f64>,
    pub b_o: Vec<f64>,
    pub w_out: Vec<f64>,
    pub b_out: f64,
}

impl ModelFile {
    pub fn new(params: &LstmParams, config: &TrainConfig) -> Self {
        let [w_f, w_i, w_c, w_o, b_f, b_i, b_c, b_o, w_out, _] =
            params.tensors().map(<[f64]>::to_vec);
        Self {
            hidden_size: params.hidden(),
            input_size: params.input(),
            lookback: config.lookback,
            seed: config.seed,
            config: *config,
            w_f,
            w_i,
            w_c,
            w_o,
            b_f,
            b_i,
            b_c,
            b_o,
            w_out,
            b_out: params.b_out,
        }
    }

    pub fn params(&self) -> Result<LstmParams, NeuralError> {
        let h = self.hidden_size;
        let cols = h + self.input_size;
        let mat = |name: &str, v: &[f64]| {
            Array2::from_shape_vec((h, cols), v.to_vec())
                .map_err(|e| NeuralError::Persist(format!("{name}: {e}")))
        };
        let vec = |name: &str, v: &[f64]| {
            if v.len() == h {
                Ok(Array1::from(v.to_vec()))
            } else {
                Err(NeuralError::Persist(format!(
                    "{name}: expected {h} values, got {}",
                    v.len()
                )))
            }
        };
        let p = LstmParams {
            w_f: mat("w_f", &self.w_f)?,
            w_i: mat("w_i", &self.w_i)?,
            w_c: mat("w_c", &self.w_c)?,
            w_o: mat("w_o", &self.w_o)?,
            b_f: vec("b_f", &self.b_f)?,
            b_i: vec("b_i", &self.b_i)?,
            b_c: vec("b_c", &self.b_c)?,
            b_o: vec("b_o", &self.b_o)?,
            w_out: vec("w_out", &self.w_out)?,
            b_out: self.b_out,
        };
        if !p.is_finite() {
            return Err(NeuralError::Persist("non-finite weight".into()));
        }
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, NeuralError> {
        serde_json::from_str(s).map_err(|e| NeuralError::Persist(e.to_string()))
    }
}
