//! Adam with explicit bias correction.

use crate::error::{Error, Result};
use crate::nn::{Mlp, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    /// Learning rate 2e-4; betas and epsilon at the usual framework defaults.
    fn default() -> Self {
        AdamConfig {
            lr: 2e-4,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn with_lr(lr: f64) -> Self {
        AdamConfig {
            lr,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.lr > 0.0
            && self.lr.is_finite()
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.epsilon > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("bad Adam settings {self:?}")))
        }
    }
}

/// First and second moment estimates, one buffer per parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T = f32> {
    m: Vec<Vec<T>>,
    v: Vec<Vec<T>>,
    t: u64,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(tensor_lens: impl IntoIterator<Item = usize>) -> Self {
        let (m, v) = tensor_lens
            .into_iter()
            .map(|n| (vec![T::zero(); n], vec![T::zero(); n]))
            .unzip();
        AdamState { m, v, t: 0 }
    }

    pub fn for_mlp(net: &Mlp<T>) -> Self {
        Self::new(net.tensors().iter().map(|t| t.len()))
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    pub fn first_moment(&self) -> &[Vec<T>] {
        &self.m
    }

    pub fn second_moment(&self) -> &[Vec<T>] {
        &self.v
    }
}

/// One Adam update of `params` in place. Shapes and finiteness of `grads`
/// are checked before anything is modified.
pub fn adam_step<T: Scalar>(
    params: &mut [&mut [T]],
    grads: &[&[T]],
    state: &mut AdamState<T>,
    cfg: &AdamConfig,
) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(Error::DimensionMismatch {
            what: "adam tensor count",
            expected: state.m.len(),
            found: grads.len(),
        });
    }
    for (i, ((p, g), m)) in params.iter().zip(grads).zip(&state.m).enumerate() {
        if p.len() != g.len() || p.len() != m.len() {
            return Err(Error::DimensionMismatch {
                what: "adam tensor shape",
                expected: m.len(),
                found: g.len(),
            });
        }
        if let Some(index) = g.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteGradient {
                network: None,
                tensor: i,
                index,
            });
        }
    }

    state.t += 1;
    let t = state.t as i32;
    let b1 = T::lit(cfg.beta1);
    let b2 = T::lit(cfg.beta2);
    let one_b1 = T::lit(1.0 - cfg.beta1);
    let one_b2 = T::lit(1.0 - cfg.beta2);
    let bc1 = T::lit(1.0 - cfg.beta1.powi(t));
    let bc2 = T::lit(1.0 - cfg.beta2.powi(t));
    let lr = T::lit(cfg.lr);
    let eps = T::lit(cfg.epsilon);

    for (((p, g), m), v) in params
        .iter_mut()
        .zip(grads)
        .zip(&mut state.m)
        .zip(&mut state.v)
    {
        for (((theta, &g), m), v) in p.iter_mut().zip(*g).zip(m).zip(v) {
            *m = b1 * *m + one_b1 * g;
            *v = b2 * *v + one_b2 * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *theta -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step1(theta: &mut [f64], g: &[f64], state: &mut AdamState<f64>) -> Result<()> {
        adam_step(&mut [theta], &[g], state, &AdamConfig::default())
    }

    #[test]
    fn first_step_closed_form() {
        let mut theta = vec![0.0f64; 3];
        let mut state = AdamState::new([3]);
        step1(&mut theta, &[1.0; 3], &mut state).unwrap();
        let expected = -2e-4 / (1.0 + 1e-8);
        for &x in &theta {
            assert!((x - expected).abs() < 1e-10);
            assert!((x + 1.99999998e-4).abs() < 1e-12);
        }
        assert_eq!(state.step_count(), 1);
    }

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut theta = vec![0.3f64, -1.2];
        let mut state = AdamState::new([2]);
        step1(&mut theta, &[0.0, 0.0], &mut state).unwrap();
        assert_eq!(theta, vec![0.3, -1.2]);
    }

    #[test]
    fn constant_gradient_moves_against_its_sign() {
        for c in [2.5f64, -0.01] {
            let mut theta = [1.0f64];
            let mut state = AdamState::new([1]);
            for _ in 0..2 {
                let before = theta[0];
                step1(&mut theta, &[c], &mut state).unwrap();
                assert_eq!((theta[0] - before).signum(), -c.signum());
            }
        }
    }

    #[test]
    fn opposite_gradients_opposite_deltas() {
        let g = [0.7f64, -3.0, 1e-3];
        let mut a = vec![0.0f64; 3];
        let mut b = vec![0.0f64; 3];
        let (mut sa, mut sb) = (AdamState::new([3]), AdamState::new([3]));
        for _ in 0..5 {
            step1(&mut a, &g, &mut sa).unwrap();
            step1(&mut b, &g.map(|x| -x), &mut sb).unwrap();
        }
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(*x, -*y);
        }
        assert_eq!(sa.second_moment(), sb.second_moment());
    }

    #[test]
    fn state_ignores_parameter_values() {
        let g = [0.5f64, -0.25];
        let (mut sa, mut sb) = (AdamState::new([2]), AdamState::new([2]));
        step1(&mut [0.0, 0.0], &g, &mut sa).unwrap();
        step1(&mut [100.0, -7.0], &g, &mut sb).unwrap();
        assert_eq!(sa, sb);
    }

    #[test]
    fn quadratic_converges() {
        // At lr 2e-4 each step moves at most ~lr, so 2000 steps cannot cover
        // the distance from 1 to 0; the stock 1e-3 rate can.
        let cfg = AdamConfig::with_lr(1e-3);
        let mut theta = [1.0f64];
        let mut state = AdamState::new([1]);
        for _ in 0..2000 {
            let g = 2.0 * theta[0];
            adam_step(&mut [&mut theta[..]], &[&[g][..]], &mut state, &cfg).unwrap();
        }
        assert!(theta[0].abs() < 0.05, "theta = {}", theta[0]);

        let mut slow = vec![1.0f64];
        let mut state = AdamState::new([1]);
        for _ in 0..2000 {
            let g = 2.0 * slow[0];
            step1(&mut slow, &[g], &mut state).unwrap();
        }
        assert!(slow[0] > 0.6 && slow[0] < 0.65, "theta = {}", slow[0]);
    }

    #[test]
    fn rejects_bad_gradients_without_mutation() {
        let mut theta = vec![0.5f32, 0.5];
        let mut state = AdamState::<f32>::new([2]);
        let err = adam_step(
            &mut [&mut theta[..]],
            &[&[1.0, f32::NAN][..]],
            &mut state,
            &AdamConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::NonFiniteGradient {
                tensor: 0,
                index: 1,
                ..
            }
        ));
        assert_eq!(state.step_count(), 0);
        assert_eq!(theta, vec![0.5, 0.5]);

        let err = adam_step(
            &mut [&mut theta[..]],
            &[&[1.0][..]],
            &mut state,
            &AdamConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn config_validation() {
        assert!(AdamConfig::default().validate().is_ok());
        assert!(AdamConfig::with_lr(0.0).validate().is_err());
        let cfg = AdamConfig {
            beta2: 1.0,
            ..AdamConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
