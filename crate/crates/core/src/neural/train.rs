use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamState};
use super::lstm::{loss_and_gradients, mse_loss, predict_batch, Packed};
use super::{LstmParams, NeuralError, TrainConfig};
use crate::series::SupervisedWindows;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    /// Size-weighted mean of the minibatch losses seen during the epoch.
    pub train_mse: f64,
    /// Loss on the validation windows after the epoch.
    pub val_mse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub params: LstmParams,
    pub history: Vec<EpochLoss>,
}

/// Minibatch Adam on MSE. Each epoch visits the training windows in a freshly
/// shuffled order drawn from a generator seeded with `config.seed`.
pub fn train(
    train: &SupervisedWindows,
    validation: &SupervisedWindows,
    config: &TrainConfig,
) -> Result<TrainOutcome, NeuralError> {
    config.validate()?;
    if train.is_empty() {
        return Err(NeuralError::EmptyPartition("train"));
    }
    if validation.is_empty() {
        return Err(NeuralError::EmptyPartition("validation"));
    }
    for set in [train, validation] {
        if let Some(w) = set.inputs.iter().find(|w| w.len() != config.lookback) {
            return Err(NeuralError::ShapeMismatch(format!(
                "window of length {} with lookback {}",
                w.len(),
                config.lookback
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = LstmParams::init(config.hidden_size, 1, config.seed);
    let mut adam = AdamState::new(&params);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut history = Vec::with_capacity(config.epochs);
    let mut step = 0u64;
    let mut batch_inputs = Vec::with_capacity(config.batch_size);
    let mut batch_targets = Vec::with_capacity(config.batch_size);

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut weighted = 0.0;
        for chunk in order.chunks(config.batch_size) {
            batch_inputs.clear();
            batch_targets.clear();
            for &i in chunk {
                batch_inputs.push(train.inputs[i].clone());
                batch_targets.push(train.targets[i]);
            }
            let packed = Packed::new(&params);
            let (loss, grads) =
                loss_and_gradients(&params, &packed, &batch_inputs, &batch_targets)?;
            weighted += loss * chunk.len() as f64;
            step += 1;
            adam_step(&mut params, &grads, &mut adam, config.learning_rate, step);
        }
        let val_pred = predict_batch(&params, &validation.inputs)?;
        history.push(EpochLoss {
            epoch,
            train_mse: weighted / train.len() as f64,
            val_mse: mse_loss(&val_pred, &validation.targets)?,
        });
    }
    if !params.is_finite() {
        return Err(NeuralError::NonFiniteActivation { step: 0 });
    }
    Ok(TrainOutcome { params, history })
}
