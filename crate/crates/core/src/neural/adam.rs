use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{Gradients, LayerParams, MlpModel};

/// ADAM moment estimates for every parameter of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Steps taken so far.
    pub t: u64,
    first: Vec<LayerParams>,
    second: Vec<LayerParams>,
}

impl AdamState {
    pub fn new(model: &MlpModel) -> Self {
        let zeros: Vec<LayerParams> = model
            .layers()
            .iter()
            .map(|l| LayerParams::zeros(l.inputs, l.outputs))
            .collect();
        AdamState {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            t: 0,
            first: zeros.clone(),
            second: zeros,
        }
    }

    /// One bias-corrected update of `model` in place.
    pub fn step(&mut self, model: &mut MlpModel, grads: &Gradients, learning_rate: f64) {
        self.t += 1;
        let (b1, b2, eps) = (self.beta1, self.beta2, self.epsilon);
        let t = self.t.min(1 << 30) as i32;
        let c1 = 1.0 - b1.powi(t);
        let c2 = 1.0 - b2.powi(t);
        let update = |theta: &mut f64, m: &mut f64, v: &mut f64, g: f64| {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *theta -= learning_rate * m_hat / (v_hat.sqrt() + eps);
        };
        for (((layer, g), m), v) in model
            .layers_mut()
            .iter_mut()
            .zip(&grads.layers)
            .zip(&mut self.first)
            .zip(&mut self.second)
        {
            for (((w, &gw), mw), vw) in layer
                .weights
                .iter_mut()
                .zip(&g.weights)
                .zip(&mut m.weights)
                .zip(&mut v.weights)
            {
                update(w, mw, vw, gw);
            }
            for (((b, &gb), mb), vb) in layer
                .biases
                .iter_mut()
                .zip(&g.biases)
                .zip(&mut m.biases)
                .zip(&mut v.biases)
            {
                update(b, mb, vb, gb);
            }
        }
    }
}
