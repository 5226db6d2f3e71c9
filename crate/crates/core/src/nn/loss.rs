use crate::error::{Error, Result};

use super::matrix::Scalar;

/// Predictions are clamped into `[CLAMP_EPS, 1 - CLAMP_EPS]` before taking logs.
pub const CLAMP_EPS: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct BceOutput<T> {
    /// Mean binary cross-entropy over the batch.
    pub loss: f64,
    /// dLoss/dPrediction per element, already divided by the batch size.
    pub grad: Vec<T>,
}

/// Mean binary cross-entropy `-mean[y ln p + (1 - y) ln(1 - p)]`.
pub fn bce<T: Scalar>(predictions: &[T], targets: &[T]) -> Result<BceOutput<T>> {
    if predictions.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if predictions.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            what: "bce targets",
            expected: predictions.len(),
            found: targets.len(),
        });
    }
    let lo = T::lit(CLAMP_EPS);
    let hi = T::one() - lo;
    let inv_n = T::one() / T::lit(predictions.len() as f64);
    let mut total = 0.0f64;
    let mut grad = Vec::with_capacity(predictions.len());
    for (&p, &y) in predictions.iter().zip(targets) {
        // NaN must survive the clamp so the caller sees a non-finite loss.
        let p = if p.is_nan() { p } else { p.max(lo).min(hi) };
        let (pf, yf) = (p.as_f64(), y.as_f64());
        total -= yf * pf.ln() + (1.0 - yf) * (1.0 - pf).ln();
        grad.push((p - y) / (p * (T::one() - p)) * inv_n);
    }
    Ok(BceOutput {
        loss: total / predictions.len() as f64,
        grad,
    })
}

/// BCE of a whole batch against one constant label.
pub fn bce_const<T: Scalar>(predictions: &[T], label: T) -> Result<BceOutput<T>> {
    bce(predictions, &vec![label; predictions.len()])
}
