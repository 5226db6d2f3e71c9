//! Train a fleet of small fully connected MNIST GANs, record every epoch's
//! parameters, and train a second GAN whose samples are entire GANs.
//!
//! The pieces, bottom up:
//!
//! - [`nn`]: dense MLPs with exact reverse-mode gradients and the flat
//!   parameter layout used everywhere else.
//! - [`optim`]: the Adam optimizer.
//! - [`rng`]: seeded ChaCha8 streams.
//! - [`data`]: MNIST IDX ingestion, the `GGAN` snapshot store, batching.
//! - [`gan`]: adversarial training and the snapshotting fleet.
//! - [`gangan`]: the meta-GAN over snapshots and its `GGMN` model file.
//! - [`render`]: image tiles, figure grids, PGM output.

pub mod data;
pub mod error;
pub mod gan;
pub mod gangan;
pub mod io;
pub mod nn;
pub mod optim;
pub mod render;
pub mod rng;

pub use data::{
    load_mnist, read_store, store_stats, write_store, Examples, MnistDataset, SnapshotRecord,
    SnapshotSink, SnapshotStore, StoreArch, StoreStats,
};
pub use error::{Error, Network, Result};
pub use gan::{
    run_fleet, train_gan_with_snapshots, AdversarialPair, EpochLosses, FleetReport, GanConfig,
    GanTrainer,
};
pub use gangan::{
    latent_sweep, read_model, sample_gan, sample_params, train_gangan, write_model, GanGanConfig,
    GanGanModel,
};
pub use nn::{flatten, param_count, unflatten, GanArch, Matrix, Mlp, MlpSpec, ParamVector};
pub use optim::{adam_step, AdamConfig, AdamState};
pub use render::{
    compose_grid, render_epoch_figure, render_sweep_figure, vector_to_tile, write_pgm, GrayImage,
    SweepFigure,
};
pub use rng::Prng;
