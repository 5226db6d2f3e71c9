use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Train MNIST GANs, train a GAN over their snapshots, and render samples.
///
/// Defaults reproduce the full-size experiment; pass smaller counts for a
/// quick run. Exit codes: 0 success, 1 usage error, 2 data or format
/// error, 3 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "gangan", version, args_override_self = true)]
pub struct Cli {
    /// Plain-text `key = value` file of flag defaults; command-line flags win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a fleet of MNIST GANs and store a snapshot after every epoch.
    TrainFleet(TrainFleet),
    /// Train the meta-GAN over a snapshot store.
    TrainMeta(TrainMeta),
    /// Render samples of GANs swept along the meta-GAN's 1-D latent space.
    Sweep(Sweep),
    /// Render one GAN's samples at selected training epochs.
    EpochsFigure(EpochsFigure),
    /// Print a snapshot store's header and value statistics.
    SnapshotsInfo(SnapshotsInfo),
}

#[derive(Debug, Args)]
pub struct TrainFleet {
    /// MNIST training images (IDX, optionally gzipped). Defaults to
    /// `$GANGAN_MNIST_DIR/train-images-idx3-ubyte`.
    #[arg(long, value_name = "PATH")]
    pub mnist_images: Option<PathBuf>,
    /// Output snapshot store.
    #[arg(long, default_value = "snapshots.ggan", value_name = "PATH")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 35)]
    pub num_gans: usize,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[arg(long, default_value_t = 128)]
    pub batch: usize,
    #[arg(long, default_value_t = 0.0002)]
    pub lr: f64,
    #[arg(long, default_value_t = 64)]
    pub latent_dim: usize,
    #[arg(long, default_value_t = 64)]
    pub hidden_dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// GANs trained in parallel; the output does not depend on it.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Train on only the first N images.
    #[arg(long, value_name = "N")]
    pub subset: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainMeta {
    /// Snapshot store to train on.
    #[arg(long, value_name = "PATH")]
    pub snapshots: PathBuf,
    /// Output model file.
    #[arg(long, default_value = "gangan.ggmn", value_name = "PATH")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 250)]
    pub epochs: usize,
    #[arg(long, default_value_t = 32)]
    pub batch: usize,
    #[arg(long, default_value_t = 0.0002)]
    pub lr: f64,
    #[arg(long, default_value_t = 1)]
    pub latent_dim: usize,
    #[arg(long, default_value_t = 64)]
    pub gen_hidden: usize,
    #[arg(long, default_value_t = 8)]
    pub disc_hidden: usize,
    /// Expected snapshot dimension; defaults to the store's param_count.
    #[arg(long)]
    pub data_dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct Sweep {
    /// Trained meta-GAN model with a 1-D latent space.
    #[arg(long, value_name = "PATH")]
    pub model: PathBuf,
    /// Output PGM image.
    #[arg(long, default_value = "sweep.pgm", value_name = "PATH")]
    pub out: PathBuf,
    /// Number of GANs sampled along the latent axis.
    #[arg(long, default_value_t = 32)]
    pub rows: usize,
    /// Number of shared noise vectors.
    #[arg(long, default_value_t = 40)]
    pub cols: usize,
    /// Latent interval `LO:HI`, endpoints included.
    #[arg(
        long,
        default_value = "-2:2",
        allow_hyphen_values = true,
        value_name = "LO:HI"
    )]
    pub range: String,
    #[arg(long, default_value_t = 0)]
    pub noise_seed: u64,
    #[arg(long, default_value_t = 2)]
    pub padding: usize,
}

#[derive(Debug, Args)]
pub struct EpochsFigure {
    /// Snapshot store holding the requested epochs.
    #[arg(long, value_name = "PATH")]
    pub snapshots: PathBuf,
    /// Output PGM image.
    #[arg(long, default_value = "epochs.pgm", value_name = "PATH")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub gan_index: u32,
    /// Comma-separated epochs, one figure row each.
    #[arg(
        long,
        default_value = "1,2,10,25,27,30,32,35,40,49",
        value_name = "LIST"
    )]
    pub epochs: String,
    /// Samples per row.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub noise_seed: u64,
    #[arg(long, default_value_t = 2)]
    pub padding: usize,
}

#[derive(Debug, Args)]
pub struct SnapshotsInfo {
    #[arg(long, value_name = "PATH")]
    pub snapshots: PathBuf,
}
