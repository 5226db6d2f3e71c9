mod common;

use common::{gradcheck, rel_err};
use gangan::nn::{bce_const, Activation, Matrix, Mlp, MlpSpec};
use gangan::Prng;

#[test]
fn every_parameter_matches_central_differences() {
    let shapes = [
        vec![3, 4, 4, 2],
        vec![4, 4, 4, 4],
        vec![7, 16, 9, 1],
        vec![2, 3, 1],
        vec![5, 1],
    ];
    for dims in shapes {
        for out in [Activation::Tanh, Activation::Sigmoid, Activation::LeakyRelu] {
            for (batch, seed) in [(1, 1), (3, 2), (4, 3)] {
                let spec = MlpSpec::new(dims.clone(), out).unwrap();
                let r = gradcheck(&spec, batch, seed, 1e-5);
                assert!(
                    r.max_rel_err < 1e-4,
                    "{dims:?} {out:?} batch {batch}: rel err {}",
                    r.max_rel_err
                );
            }
        }
    }
}

/// BCE on a sigmoid discriminator, through the clamp: the loss the GAN
/// actually optimizes.
#[test]
fn bce_through_sigmoid_matches_central_differences() {
    let spec = MlpSpec::new(vec![6, 4, 4, 1], Activation::Sigmoid).unwrap();
    let mut prng = Prng::new(31);
    let net: Mlp<f64> = Mlp::init(&spec, &mut prng);
    let x = Matrix::from_vec(4, 6, prng.standard_normal(24)).unwrap();
    let loss = |n: &Mlp<f64>| {
        bce_const(n.predict(&x).unwrap().as_slice(), 1.0)
            .unwrap()
            .loss
    };

    let tape = net.forward(&x).unwrap();
    let up = bce_const(tape.output().as_slice(), 1.0).unwrap().grad;
    let grads = net
        .backward(&tape, &Matrix::from_vec(4, 1, up).unwrap(), false)
        .unwrap();
    let h = 1e-5;
    let analytic: Vec<Vec<f64>> = grads.tensors().iter().map(|t| t.to_vec()).collect();
    for (t, tg) in analytic.iter().enumerate() {
        for (i, &g) in tg.iter().enumerate() {
            let mut p = net.clone();
            p.tensors_mut()[t][i] += h;
            let mut m = net.clone();
            m.tensors_mut()[t][i] -= h;
            let numeric = (loss(&p) - loss(&m)) / (2.0 * h);
            assert!(
                rel_err(g, numeric) < 1e-4,
                "tensor {t}[{i}]: {g} vs {numeric}"
            );
        }
    }
}

/// The generator's gradient when its loss is routed through a frozen
/// discriminator, as in the generator step.
#[test]
fn generator_gradient_through_discriminator() {
    let gen_spec = MlpSpec::new(vec![3, 5, 5, 4], Activation::Tanh).unwrap();
    let disc_spec = MlpSpec::new(vec![4, 3, 3, 1], Activation::Sigmoid).unwrap();
    let mut prng = Prng::new(8);
    let g: Mlp<f64> = Mlp::init(&gen_spec, &mut prng);
    let d: Mlp<f64> = Mlp::init(&disc_spec, &mut prng);
    let z = Matrix::from_vec(3, 3, prng.standard_normal(9)).unwrap();
    let loss = |g: &Mlp<f64>| {
        let p = d.predict(&g.predict(&z).unwrap()).unwrap();
        bce_const(p.as_slice(), 1.0).unwrap().loss
    };

    let gt = g.forward(&z).unwrap();
    let dt = d.forward(gt.output()).unwrap();
    let up = bce_const(dt.output().as_slice(), 1.0).unwrap().grad;
    let through = d
        .input_gradient(&dt, &Matrix::from_vec(3, 1, up).unwrap())
        .unwrap();
    let grads = g.backward(&gt, &through, false).unwrap();
    let h = 1e-5;
    let analytic: Vec<Vec<f64>> = grads.tensors().iter().map(|t| t.to_vec()).collect();
    for (t, tg) in analytic.iter().enumerate() {
        for (i, &a) in tg.iter().enumerate() {
            let mut p = g.clone();
            p.tensors_mut()[t][i] += h;
            let mut m = g.clone();
            m.tensors_mut()[t][i] -= h;
            let numeric = (loss(&p) - loss(&m)) / (2.0 * h);
            assert!(
                rel_err(a, numeric) < 1e-4,
                "tensor {t}[{i}]: {a} vs {numeric}"
            );
        }
    }
}
