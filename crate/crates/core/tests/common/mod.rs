#![allow(dead_code)]

use gangan::nn::{Activation, Matrix, Mlp, MlpSpec};
use gangan::Prng;

/// Straight-line reference forward pass, independent of the engine's
/// kernels: `h = act(W h + b)` with plain nested loops in f64.
pub fn reference_forward(net: &Mlp<f64>, x: &Matrix<f64>) -> Matrix<f64> {
    let spec = net.spec();
    let mut h: Vec<Vec<f64>> = x.iter_rows().map(|r| r.to_vec()).collect();
    for (idx, layer) in net.layers().iter().enumerate() {
        let act = spec.activation(idx);
        h = h
            .iter()
            .map(|row| {
                (0..layer.bias.len())
                    .map(|o| {
                        let mut s = layer.bias[o];
                        for (i, v) in row.iter().enumerate() {
                            s += layer.weights.row(o)[i] * v;
                        }
                        match act {
                            Activation::LeakyRelu => {
                                if s > 0.0 {
                                    s
                                } else {
                                    0.2 * s
                                }
                            }
                            Activation::Tanh => s.tanh(),
                            Activation::Sigmoid => 1.0 / (1.0 + (-s).exp()),
                        }
                    })
                    .collect()
            })
            .collect();
    }
    let cols = spec.output_dim();
    Matrix::from_vec(h.len(), cols, h.concat()).unwrap()
}

/// Scalar objective `sum(out .* weights)` and its gradient w.r.t. the output.
pub fn weighted_sum(out: &Matrix<f64>, weights: &[f64]) -> f64 {
    out.as_slice().iter().zip(weights).map(|(a, b)| a * b).sum()
}

/// `|a - n| / max(|a|, |n|)`, or the absolute difference when both are
/// tiny (relative error is meaningless at zero).
pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    let scale = analytic.abs().max(numeric.abs());
    if scale < 1e-7 {
        (analytic - numeric).abs()
    } else {
        (analytic - numeric).abs() / scale
    }
}

pub struct GradCheck {
    pub checked: usize,
    pub max_rel_err: f64,
}

/// Central differences over every parameter and every input element of a
/// random network, objective `sum(w .* net(x))`.
pub fn gradcheck(spec: &MlpSpec, batch: usize, seed: u64, h: f64) -> GradCheck {
    let mut prng = Prng::new(seed);
    let net: Mlp<f64> = Mlp::init(spec, &mut prng);
    let x = Matrix::from_vec(
        batch,
        spec.input_dim(),
        prng.standard_normal(batch * spec.input_dim()),
    )
    .unwrap();
    let w: Vec<f64> = prng.standard_normal(batch * spec.output_dim());

    let tape = net.forward(&x).unwrap();
    let reference = reference_forward(&net, &x);
    for (a, b) in tape.output().as_slice().iter().zip(reference.as_slice()) {
        assert!((a - b).abs() < 1e-12, "forward disagrees with reference");
    }
    let up = Matrix::from_vec(batch, spec.output_dim(), w.clone()).unwrap();
    let grads = net.backward(&tape, &up, true).unwrap();

    let objective = |n: &Mlp<f64>, x: &Matrix<f64>| weighted_sum(&reference_forward(n, x), &w);

    let mut worst = 0.0f64;
    let mut checked = 0;
    let analytic: Vec<Vec<f64>> = grads.tensors().iter().map(|t| t.to_vec()).collect();
    for (t, tensor_grad) in analytic.iter().enumerate() {
        for (i, &g) in tensor_grad.iter().enumerate() {
            let mut plus = net.clone();
            plus.tensors_mut()[t][i] += h;
            let mut minus = net.clone();
            minus.tensors_mut()[t][i] -= h;
            let numeric = (objective(&plus, &x) - objective(&minus, &x)) / (2.0 * h);
            worst = worst.max(rel_err(g, numeric));
            checked += 1;
        }
    }
    let dx = grads.input.unwrap();
    for i in 0..x.as_slice().len() {
        let mut xp = x.clone();
        xp.as_mut_slice()[i] += h;
        let mut xm = x.clone();
        xm.as_mut_slice()[i] -= h;
        let numeric = (objective(&net, &xp) - objective(&net, &xm)) / (2.0 * h);
        worst = worst.max(rel_err(dx.as_slice()[i], numeric));
        checked += 1;
    }
    GradCheck {
        checked,
        max_rel_err: worst,
    }
}
