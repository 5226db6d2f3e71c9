use crate::error::{Error, Result};

use super::SnapshotStore;

/// Magnitude at which a snapshot coordinate is counted as pressing
/// against the tanh range of the meta-generator.
pub const SATURATION_THRESHOLD: f32 = 0.999;

#[derive(Debug, Clone, PartialEq)]
pub struct StoreStats {
    pub coord_min: Vec<f32>,
    pub coord_max: Vec<f32>,
    pub mean_abs: f64,
    /// Fraction of all stored values with `|x| >= 0.999`.
    pub saturated_fraction: f64,
    pub values: u64,
}

impl StoreStats {
    pub fn min(&self) -> f32 {
        self.coord_min.iter().copied().fold(f32::INFINITY, f32::min)
    }

    pub fn max(&self) -> f32 {
        self.coord_max
            .iter()
            .copied()
            .fold(f32::NEG_INFINITY, f32::max)
    }
}

pub fn store_stats(store: &SnapshotStore) -> Result<StoreStats> {
    let first = store.records().first().ok_or(Error::EmptyStore)?;
    let mut coord_min = first.params.as_slice().to_vec();
    let mut coord_max = coord_min.clone();
    let mut abs_sum = 0.0f64;
    let mut saturated = 0u64;
    for r in store.records() {
        for ((&x, lo), hi) in r
            .params
            .as_slice()
            .iter()
            .zip(&mut coord_min)
            .zip(&mut coord_max)
        {
            *lo = lo.min(x);
            *hi = hi.max(x);
            abs_sum += x.abs() as f64;
            saturated += (x.abs() >= SATURATION_THRESHOLD) as u64;
        }
    }
    let values = store.len() as u64 * coord_min.len() as u64;
    Ok(StoreStats {
        coord_min,
        coord_max,
        mean_abs: abs_sum / values as f64,
        saturated_fraction: saturated as f64 / values as f64,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{SnapshotRecord, SnapshotSink, StoreArch};
    use crate::nn::ParamVector;

    fn store_of(vectors: Vec<Vec<f32>>) -> SnapshotStore {
        let arch = StoreArch::new(1, 1, 1).unwrap();
        let mut s = SnapshotStore::new(arch);
        for (i, v) in vectors.into_iter().enumerate() {
            s.push(SnapshotRecord {
                gan_index: 0,
                epoch: i as u32 + 1,
                params: ParamVector::new(v),
            })
            .unwrap();
        }
        s
    }

    #[test]
    fn all_zero_store() {
        let n = StoreArch::new(1, 1, 1).unwrap().param_count as usize;
        let st = store_stats(&store_of(vec![vec![0.0; n]; 3])).unwrap();
        assert_eq!(st.mean_abs, 0.0);
        assert_eq!(st.saturated_fraction, 0.0);
        assert_eq!(st.values, 3 * n as u64);
    }

    #[test]
    fn single_large_value() {
        let n = StoreArch::new(1, 1, 1).unwrap().param_count as usize;
        let mut a = vec![0.25; n];
        a[2] = 1.5;
        let b = vec![-0.5; n];
        let st = store_stats(&store_of(vec![a, b])).unwrap();
        assert_eq!(st.max(), 1.5);
        assert_eq!(st.min(), -0.5);
        assert_eq!(st.coord_max[2], 1.5);
        assert_eq!(st.coord_min[0], -0.5);
        assert!((st.saturated_fraction - 1.0 / (2 * n) as f64).abs() < 1e-15);
        let expected_mean = (0.25 * (n - 1) as f64 + 1.5 + 0.5 * n as f64) / (2 * n) as f64;
        assert!((st.mean_abs - expected_mean).abs() < 1e-12);
    }

    #[test]
    fn empty_store_is_an_error() {
        assert!(matches!(
            store_stats(&store_of(vec![])),
            Err(Error::EmptyStore)
        ));
    }
}
