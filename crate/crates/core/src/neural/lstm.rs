use ndarray::linalg::general_mat_mul;
use ndarray::{concatenate, s, Array1, Array2, ArrayView1, Axis, Zip};

use super::{LstmParams, LstmState, NeuralError};

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Activations of one cell step, kept for backpropagation.
#[derive(Debug, Clone, PartialEq)]
pub struct GateCache {
    /// `[h_{t-1}, x_t]`
    pub hx: Array1<f64>,
    pub f: Array1<f64>,
    pub i: Array1<f64>,
    pub c_tilde: Array1<f64>,
    pub o: Array1<f64>,
    pub c_prev: Array1<f64>,
    pub c: Array1<f64>,
    pub h: Array1<f64>,
}

pub fn cell_step(
    params: &LstmParams,
    state: &LstmState,
    x: &[f64],
) -> Result<(LstmState, GateCache), NeuralError> {
    params.check_shapes()?;
    let hidden = params.hidden();
    if state.h.len() != hidden || state.c.len() != hidden {
        return Err(NeuralError::ShapeMismatch(format!(
            "state has lengths ({}, {}), hidden size is {hidden}",
            state.h.len(),
            state.c.len()
        )));
    }
    if x.len() != params.input() {
        return Err(NeuralError::ShapeMismatch(format!(
            "input has length {}, expected {}",
            x.len(),
            params.input()
        )));
    }
    let hx =
        concatenate(Axis(0), &[state.h.view(), ArrayView1::from(x)]).expect("1-d concatenation");

    let f = (params.w_f.dot(&hx) + &params.b_f).mapv(sigmoid);
    let i = (params.w_i.dot(&hx) + &params.b_i).mapv(sigmoid);
    let c_tilde = (params.w_c.dot(&hx) + &params.b_c).mapv(f64::tanh);
    let o = (params.w_o.dot(&hx) + &params.b_o).mapv(sigmoid);
    let c = &f * &state.c + &i * &c_tilde;
    let h = &o * &c.mapv(f64::tanh);

    if !(h.iter().chain(c.iter()).all(|v| v.is_finite())) {
        return Err(NeuralError::NonFiniteActivation { step: 0 });
    }
    let next = LstmState {
        h: h.clone(),
        c: c.clone(),
    };
    Ok((
        next,
        GateCache {
            hx,
            f,
            i,
            c_tilde,
            o,
            c_prev: state.c.clone(),
            c,
            h,
        },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardCache {
    pub steps: Vec<GateCache>,
}

/// Run the window through the cell from a zero state and apply the head to
/// the final hidden state.
pub fn forward(params: &LstmParams, window: &[f64]) -> Result<(f64, ForwardCache), NeuralError> {
    if params.input() != 1 {
        return Err(NeuralError::ShapeMismatch(format!(
            "windows feed scalar inputs, model expects {}",
            params.input()
        )));
    }
    if window.is_empty() {
        return Err(NeuralError::Empty);
    }
    let mut state = LstmState::zeros(params.hidden());
    let mut steps = Vec::with_capacity(window.len());
    for (t, &x) in window.iter().enumerate() {
        let (next, cache) = cell_step(params, &state, &[x]).map_err(|e| match e {
            NeuralError::NonFiniteActivation { .. } => NeuralError::NonFiniteActivation { step: t },
            other => other,
        })?;
        state = next;
        steps.push(cache);
    }
    let prediction = params.w_out.dot(&state.h) + params.b_out;
    Ok((prediction, ForwardCache { steps }))
}

/// Batch-mean squared error.
pub fn mse_loss(predictions: &[f64], targets: &[f64]) -> Result<f64, NeuralError> {
    if predictions.len() != targets.len() {
        return Err(NeuralError::LengthMismatch(
            predictions.len(),
            targets.len(),
        ));
    }
    if predictions.is_empty() {
        return Err(NeuralError::Empty);
    }
    let sum: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t).powi(2))
        .sum();
    Ok(sum / predictions.len() as f64)
}

/// Gate weights stacked as `[f; i; c; o]` so each time step is one matrix product.
pub(crate) struct Packed {
    w: Array2<f64>,
    b: Array1<f64>,
    hidden: usize,
}

impl Packed {
    pub(crate) fn new(p: &LstmParams) -> Self {
        Self {
            w: concatenate(
                Axis(0),
                &[p.w_f.view(), p.w_i.view(), p.w_c.view(), p.w_o.view()],
            )
            .expect("gate shapes agree"),
            b: concatenate(
                Axis(0),
                &[p.b_f.view(), p.b_i.view(), p.b_c.view(), p.b_o.view()],
            )
            .expect("bias shapes agree"),
            hidden: p.hidden(),
        }
    }
}

struct StepCache {
    hx: Array2<f64>,
    /// post-activation gates, rows `[f; i; c~; o]`
    gates: Array2<f64>,
    tanh_c: Array2<f64>,
}

struct BatchCache {
    steps: Vec<StepCache>,
    /// cell state after each step
    cells: Vec<Array2<f64>>,
    h_last: Array2<f64>,
}

fn check_windows(params: &LstmParams, windows: &[Vec<f64>]) -> Result<usize, NeuralError> {
    params.check_shapes()?;
    if params.input() != 1 {
        return Err(NeuralError::ShapeMismatch(format!(
            "windows feed scalar inputs, model expects {}",
            params.input()
        )));
    }
    let len = windows.first().ok_or(NeuralError::Empty)?.len();
    if len == 0 {
        return Err(NeuralError::Empty);
    }
    if let Some(w) = windows.iter().find(|w| w.len() != len) {
        return Err(NeuralError::ShapeMismatch(format!(
            "ragged batch: window lengths {len} and {}",
            w.len()
        )));
    }
    Ok(len)
}

fn batch_forward(
    params: &LstmParams,
    packed: &Packed,
    windows: &[Vec<f64>],
    keep_cache: bool,
) -> Result<(Vec<f64>, Option<BatchCache>), NeuralError> {
    let steps = check_windows(params, windows)?;
    let h = packed.hidden;
    let batch = windows.len();
    let mut h_prev = Array2::<f64>::zeros((h, batch));
    let mut c_prev = Array2::<f64>::zeros((h, batch));
    let mut cache = keep_cache.then(|| BatchCache {
        steps: Vec::with_capacity(steps),
        cells: Vec::with_capacity(steps),
        h_last: Array2::zeros((0, 0)),
    });
    let bias = packed.b.view().insert_axis(Axis(1));

    for t in 0..steps {
        let mut hx = Array2::<f64>::zeros((h + 1, batch));
        hx.slice_mut(s![..h, ..]).assign(&h_prev);
        for (b, w) in windows.iter().enumerate() {
            hx[[h, b]] = w[t];
        }
        let mut gates = Array2::<f64>::zeros((4 * h, batch));
        gates.assign(&bias);
        general_mat_mul(1.0, &packed.w, &hx, 1.0, &mut gates);
        gates.slice_mut(s![..2 * h, ..]).mapv_inplace(sigmoid);
        gates
            .slice_mut(s![2 * h..3 * h, ..])
            .mapv_inplace(f64::tanh);
        gates.slice_mut(s![3 * h.., ..]).mapv_inplace(sigmoid);

        let mut c = Array2::<f64>::zeros((h, batch));
        Zip::from(&mut c)
            .and(&c_prev)
            .and(gates.slice(s![..h, ..]))
            .and(gates.slice(s![h..2 * h, ..]))
            .and(gates.slice(s![2 * h..3 * h, ..]))
            .for_each(|c, &cp, &f, &i, &g| *c = f * cp + i * g);
        let tanh_c = c.mapv(f64::tanh);
        let h_next = &gates.slice(s![3 * h.., ..]) * &tanh_c;
        if h_next.iter().any(|v| !v.is_finite()) {
            return Err(NeuralError::NonFiniteActivation { step: t });
        }

        h_prev = h_next;
        if let Some(cache) = cache.as_mut() {
            cache.steps.push(StepCache { hx, gates, tanh_c });
            cache.cells.push(c.clone());
        }
        c_prev = c;
    }

    let preds: Vec<f64> = params
        .w_out
        .dot(&h_prev)
        .iter()
        .map(|v| v + params.b_out)
        .collect();
    if let Some(cache) = cache.as_mut() {
        cache.h_last = h_prev;
    }
    Ok((preds, cache))
}

/// One-step predictions for many windows.
pub fn predict_batch(params: &LstmParams, windows: &[Vec<f64>]) -> Result<Vec<f64>, NeuralError> {
    if windows.is_empty() {
        return Ok(Vec::new());
    }
    let packed = Packed::new(params);
    let mut out = Vec::with_capacity(windows.len());
    // bounded chunks keep the per-step matrices small
    for chunk in windows.chunks(256) {
        out.extend(batch_forward(params, &packed, chunk, false)?.0);
    }
    Ok(out)
}

pub fn predict(params: &LstmParams, window: &[f64]) -> Result<f64, NeuralError> {
    Ok(predict_batch(params, &[window.to_vec()])?[0])
}

/// Gradients of the batch-mean squared error with respect to every parameter.
pub fn backward(
    params: &LstmParams,
    windows: &[Vec<f64>],
    targets: &[f64],
) -> Result<LstmParams, NeuralError> {
    Ok(loss_and_gradients(params, &Packed::new(params), windows, targets)?.1)
}

pub(crate) fn loss_and_gradients(
    params: &LstmParams,
    packed: &Packed,
    windows: &[Vec<f64>],
    targets: &[f64],
) -> Result<(f64, LstmParams), NeuralError> {
    if windows.len() != targets.len() {
        return Err(NeuralError::ShapeMismatch(format!(
            "{} windows but {} targets",
            windows.len(),
            targets.len()
        )));
    }
    let (preds, cache) = batch_forward(params, packed, windows, true)?;
    let cache = cache.expect("cache requested");
    let loss = mse_loss(&preds, targets)?;

    let h = packed.hidden;
    let batch = windows.len();
    let scale = 2.0 / batch as f64;
    let d_pred: Array1<f64> = preds
        .iter()
        .zip(targets)
        .map(|(p, t)| scale * (p - t))
        .collect();

    let mut grads = LstmParams::zeros(h, 1);
    grads.w_out = cache.h_last.dot(&d_pred);
    grads.b_out = d_pred.iter().sum();

    let mut d_w = Array2::<f64>::zeros(packed.w.dim());
    let mut d_b = Array1::<f64>::zeros(4 * h);
    // outer product w_out ⊗ d_pred
    let mut d_h = params
        .w_out
        .view()
        .insert_axis(Axis(1))
        .dot(&d_pred.view().insert_axis(Axis(0)));
    let mut d_c = Array2::<f64>::zeros((h, batch));
    let zeros = Array2::<f64>::zeros((h, batch));
    let mut d_pre = Array2::<f64>::zeros((4 * h, batch));
    let mut d_hx = Array2::<f64>::zeros((h + 1, batch));

    for t in (0..cache.steps.len()).rev() {
        let step = &cache.steps[t];
        let c_prev = if t > 0 { &cache.cells[t - 1] } else { &zeros };
        let g = &step.gates;
        let (f, i, gt, o) = (
            g.slice(s![..h, ..]),
            g.slice(s![h..2 * h, ..]),
            g.slice(s![2 * h..3 * h, ..]),
            g.slice(s![3 * h.., ..]),
        );
        // through h_t = o ⊙ tanh(c_t)
        Zip::from(&mut d_c)
            .and(&d_h)
            .and(&o)
            .and(&step.tanh_c)
            .for_each(|dc, &dh, &o, &tc| *dc += dh * o * (1.0 - tc * tc));
        {
            let (mut dp_f, rest) = d_pre.view_mut().split_at(Axis(0), h);
            let (mut dp_i, rest) = rest.split_at(Axis(0), h);
            let (mut dp_g, mut dp_o) = rest.split_at(Axis(0), h);
            Zip::from(&mut dp_o)
                .and(&d_h)
                .and(&step.tanh_c)
                .and(&o)
                .for_each(|d, &dh, &tc, &o| *d = dh * tc * o * (1.0 - o));
            Zip::from(&mut dp_f)
                .and(&d_c)
                .and(c_prev)
                .and(&f)
                .for_each(|d, &dc, &cp, &f| *d = dc * cp * f * (1.0 - f));
            Zip::from(&mut dp_i)
                .and(&d_c)
                .and(&gt)
                .and(&i)
                .for_each(|d, &dc, &g, &i| *d = dc * g * i * (1.0 - i));
            Zip::from(&mut dp_g)
                .and(&d_c)
                .and(&i)
                .and(&gt)
                .for_each(|d, &dc, &i, &g| *d = dc * i * (1.0 - g * g));
        }
        general_mat_mul(1.0, &d_pre, &step.hx.t(), 1.0, &mut d_w);
        // batch reduction in index order
        for (db, row) in d_b.iter_mut().zip(d_pre.rows()) {
            *db += row.iter().sum::<f64>();
        }
        general_mat_mul(1.0, &packed.w.t(), &d_pre, 0.0, &mut d_hx);
        d_h.assign(&d_hx.slice(s![..h, ..]));
        Zip::from(&mut d_c).and(&f).for_each(|dc, &f| *dc *= f);
    }

    grads.w_f = d_w.slice(s![..h, ..]).to_owned();
    grads.w_i = d_w.slice(s![h..2 * h, ..]).to_owned();
    grads.w_c = d_w.slice(s![2 * h..3 * h, ..]).to_owned();
    grads.w_o = d_w.slice(s![3 * h.., ..]).to_owned();
    grads.b_f = d_b.slice(s![..h]).to_owned();
    grads.b_i = d_b.slice(s![h..2 * h]).to_owned();
    grads.b_c = d_b.slice(s![2 * h..3 * h]).to_owned();
    grads.b_o = d_b.slice(s![3 * h..]).to_owned();
    Ok((loss, grads))
}
