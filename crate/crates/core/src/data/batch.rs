use crate::error::{Error, Result};
use crate::rng::Prng;

use super::Examples;

/// One epoch's shuffled visiting order, consumed in chunks of `batch_size`.
/// The last batch is short when the dataset size is not a multiple.
#[derive(Debug, Clone)]
pub struct EpochBatches {
    order: Vec<usize>,
    batch_size: usize,
}

impl EpochBatches {
    pub fn iter(&self) -> std::slice::Chunks<'_, usize> {
        self.order.chunks(self.batch_size)
    }

    pub fn len(&self) -> usize {
        self.order.len().div_ceil(self.batch_size)
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

impl<'a> IntoIterator for &'a EpochBatches {
    type Item = &'a [usize];
    type IntoIter = std::slice::Chunks<'a, usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

pub fn batches<D: Examples + ?Sized>(
    dataset: &D,
    batch_size: usize,
    prng: &mut Prng,
) -> Result<EpochBatches> {
    if batch_size == 0 {
        return Err(Error::InvalidConfig("batch size must be at least 1".into()));
    }
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    prng.shuffle(&mut order);
    Ok(EpochBatches { order, batch_size })
}
