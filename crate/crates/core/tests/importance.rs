mod common;

use common::rng;
use fourn_core::importance::garson_importance;
use fourn_core::neural::LayerParams;
use fourn_core::MlpModel;
use rand::Rng;

fn layer(inputs: usize, outputs: usize, w: &[f64]) -> LayerParams {
    LayerParams {
        inputs,
        outputs,
        weights: w.to_vec(),
        biases: vec![0.3; outputs],
    }
}

#[test]
fn hand_computed_two_two_one() {
    let m = MlpModel::from_layers(vec![layer(2, 2, &[1.0, 2.0, 3.0, 1.0]), layer(2, 1, &[1.0, 1.0])]).unwrap();
    let imp = garson_importance(&m).unwrap();
    assert!((imp[0] - 13.0 / 24.0).abs() < 1e-15);
    assert!((imp[1] - 11.0 / 24.0).abs() < 1e-15);
}

#[test]
fn invariant_to_sign_flips_and_layer_scaling() {
    let mut r = rng(4);
    for _ in 0..50 {
        let dims = [6, 5, 4, 1];
        let mut m = MlpModel::he_uniform(&dims, &mut r).unwrap();
        let base = garson_importance(&m).unwrap();
        assert!((base.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(base.iter().all(|&v| v >= 0.0));
        let l = r.random_range(0..3);
        let layer = &mut m.layers_mut()[l];
        let col = r.random_range(0..layer.inputs);
        for j in 0..layer.outputs {
            layer.weights[j * layer.inputs + col] *= -1.0;
        }
        let flipped = garson_importance(&m).unwrap();
        let s = r.random_range(0.1..10.0);
        m.layers_mut()[r.random_range(0..3)].weights.iter_mut().for_each(|w| *w *= s);
        let scaled = garson_importance(&m).unwrap();
        for ((a, b), c) in base.iter().zip(&flipped).zip(&scaled) {
            assert!((a - b).abs() < 1e-15);
            assert!((a - c).abs() < 1e-12);
        }
    }
}
