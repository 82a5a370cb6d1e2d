//! Multilayer perceptron regression.
//!
//! `Z¹ = W¹x + b¹, A¹ = ReLU(Z¹), …, f(x) = Wᴸ Aᴸ⁻¹ + bᴸ` with a single
//! linear output, fitted under squared loss (conditional mean) or check loss
//! (conditional quantile). Residuals are `u = y − f(x)` throughout.

mod adam;
mod backprop;
mod train;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot;

pub use adam::AdamState;
pub use backprop::{gradients, sample_dropout_mask, DropoutMask, Gradients};
pub use train::{
    train, validate_architecture, validation_split, EpochStats, TrainConfig, TrainOutcome,
};

/// At most three hidden layers.
pub const MAX_LAYERS: usize = 4;

/// Weights (`outputs × inputs`, row-major) and biases of one dense layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerParams {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl LayerParams {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        LayerParams {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            biases: vec![0.0; outputs],
        }
    }

    pub fn weight_row(&self, j: usize) -> &[f64] {
        &self.weights[j * self.inputs..(j + 1) * self.inputs]
    }

    pub fn n_params(&self) -> usize {
        self.weights.len() + self.biases.len()
    }
}

/// Dense ReLU network with a linear scalar output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    dims: Vec<usize>,
    layers: Vec<LayerParams>,
}

impl MlpModel {
    /// All-zero network with the given layer sizes `[p, h₁, …, 1]`.
    pub fn zeros(dims: &[usize]) -> Result<Self> {
        check_dims(dims)?;
        let layers = dims.windows(2).map(|w| LayerParams::zeros(w[0], w[1])).collect();
        Ok(MlpModel {
            dims: dims.to_vec(),
            layers,
        })
    }

    /// He-uniform weights, `U(±√(6 / fan_in))`, and zero biases.
    pub fn he_uniform<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<Self> {
        let mut model = Self::zeros(dims)?;
        for layer in &mut model.layers {
            let limit = (6.0 / layer.inputs as f64).sqrt();
            for w in &mut layer.weights {
                *w = rng.random_range(-limit..limit);
            }
        }
        Ok(model)
    }

    pub fn from_layers(layers: Vec<LayerParams>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidArchitecture("a network needs at least one layer".into()));
        }
        let mut dims = vec![layers[0].inputs];
        for (l, layer) in layers.iter().enumerate() {
            if layer.inputs != *dims.last().unwrap() {
                return Err(Error::InvalidArchitecture(format!(
                    "layer {} expects {} inputs but the previous layer has {} outputs",
                    l + 1,
                    layer.inputs,
                    dims.last().unwrap()
                )));
            }
            if layer.weights.len() != layer.inputs * layer.outputs || layer.biases.len() != layer.outputs {
                return Err(Error::InvalidArchitecture(format!(
                    "layer {} parameter shapes do not match {}x{}",
                    l + 1,
                    layer.outputs,
                    layer.inputs
                )));
            }
            dims.push(layer.outputs);
        }
        check_dims(&dims)?;
        Ok(MlpModel { dims, layers })
    }

    /// Layer sizes `[p, h₁, …, 1]`.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_inputs(&self) -> usize {
        self.dims[0]
    }

    pub fn n_hidden(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn layers(&self) -> &[LayerParams] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [LayerParams] {
        &mut self.layers
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(LayerParams::n_params).sum()
    }

    /// Inference-mode outputs for row-major inputs (no dropout).
    pub fn forward(&self, rows: &[f64]) -> Result<Vec<f64>> {
        let p = self.n_inputs();
        if rows.len() % p != 0 {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: rows.len(),
            });
        }
        let mut act = rows.to_vec();
        let n = rows.len() / p;
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let mut next = vec![0.0; n * layer.outputs];
            for (a, z) in act.chunks_exact(layer.inputs).zip(next.chunks_exact_mut(layer.outputs)) {
                for (j, zj) in z.iter_mut().enumerate() {
                    let v = layer.biases[j] + dot(layer.weight_row(j), a);
                    *zj = if l < last { v.max(0.0) } else { v };
                }
            }
            act = next;
        }
        Ok(act)
    }

    /// Output for a single input row.
    pub fn forward_row(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_inputs() {
            return Err(Error::DimensionMismatch {
                expected: self.n_inputs(),
                got: x.len(),
            });
        }
        Ok(self.forward(x)?[0])
    }
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.len() < 2 || dims.len() > MAX_LAYERS + 1 {
        return Err(Error::InvalidArchitecture(format!(
            "expected between 1 and {MAX_LAYERS} layers, got layer sizes {dims:?}"
        )));
    }
    if dims.contains(&0) {
        return Err(Error::InvalidArchitecture(format!("zero-width layer in {dims:?}")));
    }
    if *dims.last().unwrap() != 1 {
        return Err(Error::InvalidArchitecture("the output layer must have one unit".into()));
    }
    Ok(())
}

/// Training objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LossSpec {
    /// `u²`.
    Squared,
    /// `u (γ − 1{u < 0})`, minimized by the γ-quantile.
    Check { gamma: f64 },
}

impl LossSpec {
    pub fn check(gamma: f64) -> Result<Self> {
        let s = LossSpec::Check { gamma };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LossSpec::Squared => Ok(()),
            LossSpec::Check { gamma } if gamma > 0.0 && gamma < 1.0 => Ok(()),
            LossSpec::Check { gamma } => Err(Error::InvalidParameter(format!(
                "quantile level must lie in (0, 1), got {gamma}"
            ))),
        }
    }

    /// Loss at residual `u = y − pred`.
    #[inline]
    pub fn of_residual(&self, u: f64) -> f64 {
        match *self {
            LossSpec::Squared => u * u,
            LossSpec::Check { gamma } => u * (gamma - if u < 0.0 { 1.0 } else { 0.0 }),
        }
    }

    /// Derivative of the loss with respect to the prediction. For check
    /// loss the subgradient at `u = 0` is taken as `−γ`.
    #[inline]
    pub fn d_pred(&self, pred: f64, y: f64) -> f64 {
        let u = y - pred;
        match *self {
            LossSpec::Squared => -2.0 * u,
            LossSpec::Check { gamma } => -(gamma - if u < 0.0 { 1.0 } else { 0.0 }),
        }
    }

    pub fn mean(&self, preds: &[f64], ys: &[f64]) -> f64 {
        let n = preds.len().max(1) as f64;
        preds.iter().zip(ys).map(|(p, y)| self.of_residual(y - p)).sum::<f64>() / n
    }
}

/// `l(y − pred)` under `spec`.
pub fn loss_value(pred: f64, y: f64, spec: &LossSpec) -> f64 {
    spec.of_residual(y - pred)
}

impl fmt::Display for LossSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossSpec::Squared => f.write_str("mse"),
            LossSpec::Check { gamma } => write!(f, "quantile:{gamma}"),
        }
    }
}

impl FromStr for LossSpec {
    type Err = Error;

    /// `mse` or `quantile:<γ>`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "mse" {
            return Ok(LossSpec::Squared);
        }
        if let Some(g) = s.strip_prefix("quantile:") {
            let gamma: f64 = g
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad quantile level `{g}`")))?;
            return LossSpec::check(gamma);
        }
        Err(Error::InvalidParameter(String::from(
            "loss must be `mse` or `quantile:<gamma>`",
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_network_outputs_zero() {
        let m = MlpModel::zeros(&[3, 4, 2, 1]).unwrap();
        assert_eq!(m.forward(&[1.0, -2.0, 3.0, 0.5, 0.5, 0.5]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn affine_network() {
        let m = MlpModel::from_layers(vec![LayerParams {
            inputs: 1,
            outputs: 1,
            weights: vec![2.0],
            biases: vec![1.0],
        }])
        .unwrap();
        assert_eq!(m.forward_row(&[3.0]).unwrap(), 7.0);
    }

    #[test]
    fn relu_clips() {
        let m = MlpModel::from_layers(vec![
            LayerParams {
                inputs: 1,
                outputs: 1,
                weights: vec![-1.0],
                biases: vec![0.0],
            },
            LayerParams {
                inputs: 1,
                outputs: 1,
                weights: vec![1.0],
                biases: vec![0.0],
            },
        ])
        .unwrap();
        assert_eq!(m.forward_row(&[5.0]).unwrap(), 0.0);
    }

    #[test]
    fn dimension_checks() {
        let m = MlpModel::zeros(&[2, 1]).unwrap();
        assert!(matches!(m.forward(&[1.0, 2.0, 3.0]), Err(Error::DimensionMismatch { .. })));
        assert!(MlpModel::zeros(&[2, 5, 5, 5, 5, 1]).is_err());
        assert!(MlpModel::zeros(&[2, 3]).is_err());
    }

    #[test]
    fn loss_values() {
        assert_eq!(loss_value(0.0, 2.0, &LossSpec::Squared), 4.0);
        let q95 = LossSpec::check(0.95).unwrap();
        assert!((q95.of_residual(-1.0) - 0.05).abs() < 1e-15);
        let q25 = LossSpec::check(0.25).unwrap();
        assert_eq!(q25.of_residual(2.0), 0.5);
        assert!(LossSpec::check(1.0).is_err());
    }

    #[test]
    fn loss_parsing() {
        assert_eq!("mse".parse::<LossSpec>().unwrap(), LossSpec::Squared);
        assert_eq!("quantile:0.25".parse::<LossSpec>().unwrap(), LossSpec::Check { gamma: 0.25 });
        assert!("quantile:1.5".parse::<LossSpec>().is_err());
        assert!("mae".parse::<LossSpec>().is_err());
        assert_eq!(alloc::format!("{}", LossSpec::Check { gamma: 0.975 }), "quantile:0.975");
    }
}
