use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{LayerParams, LossSpec, MlpModel};
use crate::error::{Error, Result};
use crate::linalg::dot;

/// Inverted-dropout multipliers for the hidden layers of one batch.
///
/// `layers[l]` is `batch × h_{l+1}`, row-major, with entries `0` (dropped) or
/// `1 / (1 − rate)` (kept).
#[derive(Debug, Clone, PartialEq)]
pub struct DropoutMask {
    pub layers: Vec<Vec<f64>>,
}

/// Draw a dropout mask for a batch of `batch` rows.
pub fn sample_dropout_mask<R: Rng + ?Sized>(
    model: &MlpModel,
    batch: usize,
    rate: f64,
    rng: &mut R,
) -> DropoutMask {
    let keep = 1.0 - rate;
    let scale = 1.0 / keep;
    let layers = model.dims()[1..model.dims().len() - 1]
        .iter()
        .map(|&h| {
            (0..batch * h)
                .map(|_| if rng.random::<f64>() < keep { scale } else { 0.0 })
                .collect()
        })
        .collect();
    DropoutMask { layers }
}

/// Gradients with the same shapes as the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerParams>,
}

impl Gradients {
    pub fn zeros_like(model: &MlpModel) -> Self {
        Gradients {
            layers: model
                .layers()
                .iter()
                .map(|l| LayerParams::zeros(l.inputs, l.outputs))
                .collect(),
        }
    }

    /// All gradient coordinates, layer by layer, weights before biases.
    pub fn flatten(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.biases).copied())
            .collect()
    }
}

/// Mean batch loss and its exact gradient.
///
/// `rows` is `batch × p` row-major. With a mask, hidden activations are
/// multiplied by it after the ReLU, as in training; without one the pass is
/// deterministic. The ReLU derivative at 0 is taken as 0.
pub fn gradients(
    model: &MlpModel,
    rows: &[f64],
    ys: &[f64],
    loss: &LossSpec,
    mask: Option<&DropoutMask>,
) -> Result<(f64, Gradients)> {
    let p = model.n_inputs();
    let batch = ys.len();
    if rows.len() != batch * p {
        return Err(Error::DimensionMismatch {
            expected: batch * p,
            got: rows.len(),
        });
    }
    if batch == 0 {
        return Err(Error::InvalidParameter("empty batch".into()));
    }
    let layers = model.layers();
    let last = layers.len() - 1;
    if let Some(m) = mask {
        let ok = m.layers.len() == last
            && m.layers.iter().zip(layers).all(|(ml, l)| ml.len() == batch * l.outputs);
        if !ok {
            return Err(Error::InvalidParameter("dropout mask does not match the hidden layers".into()));
        }
    }

    // acts[0] = input; acts[l] = post-activation output of layer l.
    let mut acts: Vec<Vec<f64>> = Vec::with_capacity(layers.len() + 1);
    acts.push(rows.to_vec());
    for (l, layer) in layers.iter().enumerate() {
        let input = &acts[l];
        let mut out = vec![0.0; batch * layer.outputs];
        for (a, z) in input.chunks_exact(layer.inputs).zip(out.chunks_exact_mut(layer.outputs)) {
            for (j, zj) in z.iter_mut().enumerate() {
                *zj = layer.biases[j] + dot(layer.weight_row(j), a);
            }
        }
        if l < last {
            match mask {
                Some(m) => {
                    for (v, &k) in out.iter_mut().zip(&m.layers[l]) {
                        *v = v.max(0.0) * k;
                    }
                }
                None => out.iter_mut().for_each(|v| *v = v.max(0.0)),
            }
        }
        acts.push(out);
    }

    let preds = &acts[layers.len()];
    let inv = 1.0 / batch as f64;
    let mean_loss = loss.mean(preds, ys);
    let mut delta: Vec<f64> = preds
        .iter()
        .zip(ys)
        .map(|(&pr, &y)| loss.d_pred(pr, y) * inv)
        .collect();

    let mut grads = Gradients::zeros_like(model);
    for l in (0..layers.len()).rev() {
        let layer = &layers[l];
        let input = &acts[l];
        let g = &mut grads.layers[l];
        for (r, d) in delta.chunks_exact(layer.outputs).enumerate() {
            let a = &input[r * layer.inputs..(r + 1) * layer.inputs];
            for (j, &dj) in d.iter().enumerate() {
                if dj == 0.0 {
                    continue;
                }
                g.biases[j] += dj;
                let gw = &mut g.weights[j * layer.inputs..(j + 1) * layer.inputs];
                for (w, &av) in gw.iter_mut().zip(a) {
                    *w += dj * av;
                }
            }
        }
        if l == 0 {
            break;
        }
        // Back through layer l's weights into the previous hidden layer.
        let mut prev = vec![0.0; batch * layer.inputs];
        for (r, d) in delta.chunks_exact(layer.outputs).enumerate() {
            let pr = &mut prev[r * layer.inputs..(r + 1) * layer.inputs];
            for (j, &dj) in d.iter().enumerate() {
                if dj == 0.0 {
                    continue;
                }
                for (pv, &w) in pr.iter_mut().zip(layer.weight_row(j)) {
                    *pv += dj * w;
                }
            }
        }
        // A = ReLU(Z)·mask, so dZ = dA·mask on units with Z > 0. A > 0 iff
        // Z > 0 and the unit was kept; a kept unit with Z > 0 has A = Z·k.
        let act = &acts[l];
        match mask {
            Some(m) => {
                for ((pv, &a), &k) in prev.iter_mut().zip(act).zip(&m.layers[l - 1]) {
                    *pv = if a > 0.0 { *pv * k } else { 0.0 };
                }
            }
            None => {
                for (pv, &a) in prev.iter_mut().zip(act) {
                    if a <= 0.0 {
                        *pv = 0.0;
                    }
                }
            }
        }
        delta = prev;
    }
    Ok((mean_loss, grads))
}
