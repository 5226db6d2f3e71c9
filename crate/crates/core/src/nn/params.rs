use crate::error::{Error, Result};

use super::mlp::{Layer, Mlp, MlpSpec};

/// All parameters of a generator/discriminator pair as one flat `f32`
/// vector. Order: generator layers then discriminator layers; within a
/// layer the weight matrix row by row (one row per output unit), then the
/// bias.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    values: Vec<f32>,
}

impl ParamVector {
    pub fn new(values: Vec<f32>) -> Self {
        ParamVector { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f32> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|x| x.is_finite())
    }
}

impl From<Vec<f32>> for ParamVector {
    fn from(values: Vec<f32>) -> Self {
        ParamVector { values }
    }
}

impl Mlp<f32> {
    pub fn flatten_into(&self, out: &mut Vec<f32>) {
        for layer in self.layers() {
            out.extend_from_slice(layer.weights.as_slice());
            out.extend_from_slice(&layer.bias);
        }
    }

    /// Rebuilds a network from exactly `spec.param_count()` values.
    pub fn from_flat(spec: &MlpSpec, values: &[f32]) -> Result<Self> {
        if values.len() != spec.param_count() {
            return Err(Error::DimensionMismatch {
                what: "flat parameters",
                expected: spec.param_count(),
                found: values.len(),
            });
        }
        let mut net = Mlp::zeros(spec);
        let mut rest = values;
        for layer in net.layers_mut() {
            let Layer { weights, bias } = layer;
            let (w, tail) = rest.split_at(weights.as_slice().len());
            weights.as_mut_slice().copy_from_slice(w);
            let (b, tail) = tail.split_at(bias.len());
            bias.copy_from_slice(b);
            rest = tail;
        }
        Ok(net)
    }
}

pub fn flatten(generator: &Mlp, discriminator: &Mlp) -> ParamVector {
    let mut values =
        Vec::with_capacity(generator.spec().param_count() + discriminator.spec().param_count());
    generator.flatten_into(&mut values);
    discriminator.flatten_into(&mut values);
    ParamVector { values }
}

pub fn unflatten(
    params: &[f32],
    generator: &MlpSpec,
    discriminator: &MlpSpec,
) -> Result<(Mlp, Mlp)> {
    let expected = generator.param_count() + discriminator.param_count();
    if params.len() != expected {
        return Err(Error::DimensionMismatch {
            what: "parameter vector",
            expected,
            found: params.len(),
        });
    }
    let (g, d) = params.split_at(generator.param_count());
    Ok((
        Mlp::from_flat(generator, g)?,
        Mlp::from_flat(discriminator, d)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::GanArch;
    use crate::rng::Prng;

    fn random_gan(seed: u64) -> (Mlp, Mlp) {
        let mut prng = Prng::new(seed);
        let g = Mlp::init(&GanArch::MNIST.generator_spec().unwrap(), &mut prng);
        let d = Mlp::init(&GanArch::MNIST.discriminator_spec().unwrap(), &mut prng);
        (g, d)
    }

    #[test]
    fn mnist_pair_flattens_to_113745() {
        let (g, d) = random_gan(1);
        assert_eq!(flatten(&g, &d).dim(), 113745);
    }

    #[test]
    fn off_by_one_is_rejected() {
        let arch = GanArch::MNIST;
        let v = vec![0.0f32; 113744];
        let err = unflatten(
            &v,
            &arch.generator_spec().unwrap(),
            &arch.discriminator_spec().unwrap(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                expected: 113745,
                found: 113744,
                ..
            }
        ));
    }

    #[test]
    fn canonical_order() {
        let (g, d) = random_gan(2);
        let v = flatten(&g, &d);
        let first = &g.layers()[0];
        assert_eq!(v.as_slice()[0], first.weights.as_slice()[0]);
        // second row of W1 starts after fan_in entries
        assert_eq!(v.as_slice()[64], first.weights.row(1)[0]);
        assert_eq!(v.as_slice()[64 * 64], first.bias[0]);
        let d_last = d.layers().last().unwrap();
        assert_eq!(*v.as_slice().last().unwrap(), d_last.bias[0]);
        assert_eq!(v.as_slice()[59280], d.layers()[0].weights.as_slice()[0]);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(16))]

        #[test]
        fn roundtrip_is_bitwise(seed: u64) {
            let arch = GanArch::MNIST;
            let (g, d) = random_gan(seed);
            let v = flatten(&g, &d);
            let (g2, d2) = unflatten(
                v.as_slice(),
                &arch.generator_spec().unwrap(),
                &arch.discriminator_spec().unwrap(),
            ).unwrap();
            proptest::prop_assert_eq!(&g, &g2);
            proptest::prop_assert_eq!(&d, &d2);
            let bits = |p: &ParamVector| p.as_slice().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            proptest::prop_assert_eq!(bits(&flatten(&g2, &d2)), bits(&v));
        }
    }
}
