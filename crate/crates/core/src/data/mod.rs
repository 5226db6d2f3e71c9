//! MNIST ingestion, the snapshot store and epoch batching.

mod batch;
mod mnist;
mod stats;
mod store;

pub use batch::{batches, EpochBatches};
pub use mnist::{
    load_mnist, normalize_pixel, parse_idx_images, MnistDataset, IDX_IMAGES_MAGIC, IMAGE_DIM,
    IMAGE_SIDE,
};
pub use stats::{store_stats, StoreStats, SATURATION_THRESHOLD};
pub use store::{
    read_store, write_store, SnapshotRecord, SnapshotSink, SnapshotStore, StoreArch, StoreWriter,
    STORE_MAGIC, STORE_VERSION,
};

use crate::error::Result;
use crate::nn::Matrix;

/// A dataset of fixed-width `f32` rows.
pub trait Examples {
    fn len(&self) -> usize;
    fn width(&self) -> usize;
    fn example(&self, i: usize) -> &[f32];

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Stacks the selected rows into a batch matrix.
    fn gather(&self, indices: &[usize]) -> Result<Matrix> {
        Matrix::from_rows(self.width(), indices.iter().map(|&i| self.example(i)))
    }
}
