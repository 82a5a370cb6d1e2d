use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{gradients, sample_dropout_mask, AdamState, LossSpec, MlpModel};
use crate::error::{Error, Result};
use crate::seed;

/// Mini-batch ADAM training settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub dropout_rate: f64,
    pub patience: usize,
    pub min_delta: f64,
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            batch_size: 64,
            epochs: 50,
            dropout_rate: 0.2,
            patience: 5,
            min_delta: 1e-4,
            validation_fraction: 0.1,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("{msg}: {self:?}")));
        if !(self.learning_rate >= 0.0 && self.learning_rate <= 1.0) {
            return bad("learning rate must lie in [0, 1]");
        }
        if !(16..=128).contains(&self.batch_size) {
            return bad("batch size must lie in 16..=128");
        }
        if self.epochs == 0 {
            return bad("at least one epoch is required");
        }
        if !(self.dropout_rate >= 0.1 && self.dropout_rate <= 0.5) {
            return bad("dropout rate must lie in [0.1, 0.5]");
        }
        if self.patience == 0 {
            return bad("patience must be at least 1");
        }
        if !(self.min_delta >= 0.0 && self.min_delta.is_finite()) {
            return bad("min_delta must be finite and nonnegative");
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 0.5) {
            return bad("validation fraction must lie in (0, 0.5)");
        }
        Ok(())
    }
}

/// Hidden-layer sizes allowed for training: at most three layers, the first
/// with 100 to 500 units, never widening.
pub fn validate_architecture(hidden: &[usize]) -> Result<()> {
    if hidden.len() > 3 {
        return Err(Error::InvalidArchitecture(format!(
            "at most three hidden layers, got {hidden:?}"
        )));
    }
    if let Some(&first) = hidden.first() {
        if !(100..=500).contains(&first) {
            return Err(Error::InvalidArchitecture(format!(
                "the first hidden layer needs 100 to 500 units, got {first}"
            )));
        }
    }
    if hidden.contains(&0) || hidden.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidArchitecture(format!(
            "hidden layer sizes must be positive and nonincreasing, got {hidden:?}"
        )));
    }
    Ok(())
}

/// Split `0..n` into training and validation rows. The last
/// `ceil(fraction · n)` rows of a seeded shuffle (clamped to `1..n`) are
/// held out.
pub fn validation_split(n: usize, fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed::stream(seed, "validation-split"));
    idx.shuffle(&mut rng);
    let n_val = ((fraction * n as f64).ceil() as usize).clamp(1, n.saturating_sub(1).max(1));
    let val = idx.split_off(n - n_val.min(n));
    (idx, val)
}

/// Losses after an epoch; epoch 0 is the initialized network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// Weights from the epoch with the lowest validation loss.
    pub model: MlpModel,
    pub history: Vec<EpochStats>,
    pub best_epoch: usize,
    pub stopped_early: bool,
}

fn gather(rows: &[f64], p: usize, ys: &[f64], idx: &[usize], xb: &mut Vec<f64>, yb: &mut Vec<f64>) {
    xb.clear();
    yb.clear();
    for &i in idx {
        xb.extend_from_slice(&rows[i * p..(i + 1) * p]);
        yb.push(ys[i]);
    }
}

/// Fit a network to row-major inputs `rows` (`n × p`) and targets `ys`.
///
/// The run is a pure function of its arguments: the validation split,
/// initialization, shuffles and dropout masks all come from `config.seed`.
/// After each epoch the validation loss is checked; training stops once it
/// has failed to improve on the best value by more than `min_delta` for
/// `patience` consecutive epochs, and the weights with the lowest validation
/// loss seen are returned.
///
/// When every target is identical the constant network (zero weights, output
/// bias equal to the target) is returned without training: it attains zero
/// loss under either objective.
pub fn train(
    rows: &[f64],
    p: usize,
    ys: &[f64],
    hidden: &[usize],
    config: &TrainConfig,
    loss: &LossSpec,
) -> Result<TrainOutcome> {
    config.validate()?;
    loss.validate()?;
    validate_architecture(hidden)?;
    let n = ys.len();
    if p == 0 || rows.len() != n * p {
        return Err(Error::DimensionMismatch {
            expected: n * p,
            got: rows.len(),
        });
    }
    if n < 20 {
        return Err(Error::InvalidParameter(format!(
            "training needs at least 20 rows, got {n}"
        )));
    }
    let mut dims = Vec::with_capacity(hidden.len() + 2);
    dims.push(p);
    dims.extend_from_slice(hidden);
    dims.push(1);

    if ys.iter().all(|&y| y == ys[0]) {
        let mut model = MlpModel::zeros(&dims)?;
        let last = model.layers().len() - 1;
        model.layers_mut()[last].biases[0] = ys[0];
        return Ok(TrainOutcome {
            model,
            history: alloc::vec![EpochStats {
                epoch: 0,
                train_loss: 0.0,
                val_loss: 0.0,
            }],
            best_epoch: 0,
            stopped_early: false,
        });
    }

    let (mut train_idx, val_idx) = validation_split(n, config.validation_fraction, config.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed::stream(config.seed, "training"));
    let mut model = MlpModel::he_uniform(&dims, &mut rng)?;
    let mut adam = AdamState::new(&model);

    let (mut xt, mut yt) = (Vec::new(), Vec::new());
    gather(rows, p, ys, &train_idx, &mut xt, &mut yt);
    let (mut xv, mut yv) = (Vec::new(), Vec::new());
    gather(rows, p, ys, &val_idx, &mut xv, &mut yv);
    let evaluate = |m: &MlpModel, epoch: usize| -> Result<EpochStats> {
        let train_loss = loss.mean(&m.forward(&xt)?, &yt);
        let val_loss = loss.mean(&m.forward(&xv)?, &yv);
        if !(train_loss.is_finite() && val_loss.is_finite()) {
            return Err(Error::Diverged { epoch });
        }
        Ok(EpochStats {
            epoch,
            train_loss,
            val_loss,
        })
    };

    let mut history = alloc::vec![evaluate(&model, 0)?];
    let mut best_model = model.clone();
    let mut best_val = f64::INFINITY;
    let mut best_epoch = 0;
    // Reference value for patience: only improvements beyond min_delta reset it.
    let mut reference = f64::INFINITY;
    let mut stale = 0;
    let mut stopped_early = false;
    let use_dropout = !hidden.is_empty();
    let (mut xb, mut yb) = (Vec::new(), Vec::new());

    for epoch in 1..=config.epochs {
        train_idx.shuffle(&mut rng);
        for batch in train_idx.chunks(config.batch_size) {
            gather(rows, p, ys, batch, &mut xb, &mut yb);
            let mask = use_dropout.then(|| sample_dropout_mask(&model, batch.len(), config.dropout_rate, &mut rng));
            let (batch_loss, grads) = gradients(&model, &xb, &yb, loss, mask.as_ref())?;
            if !batch_loss.is_finite() {
                return Err(Error::Diverged { epoch });
            }
            adam.step(&mut model, &grads, config.learning_rate);
        }
        let stats = evaluate(&model, epoch)?;
        history.push(stats);
        if stats.val_loss < best_val {
            best_val = stats.val_loss;
            best_model = model.clone();
            best_epoch = epoch;
        }
        if stats.val_loss < reference - config.min_delta {
            reference = stats.val_loss;
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.patience {
                stopped_early = true;
                break;
            }
        }
    }
    Ok(TrainOutcome {
        model: best_model,
        history,
        best_epoch,
        stopped_early,
    })
}
