use std::fmt;
use std::path::{Path, PathBuf};

use gangan::data::{read_store, store_stats, StoreArch, STORE_VERSION};
use gangan::gangan::preflight;
use gangan::{
    load_mnist, read_model, render_epoch_figure, render_sweep_figure, run_fleet, train_gangan,
    write_model, write_pgm, AdamConfig, Error, GanConfig, GanGanConfig, SweepFigure,
};

use crate::args::{EpochsFigure, SnapshotsInfo, Sweep, TrainFleet, TrainMeta};

pub const MNIST_DIR_ENV: &str = "GANGAN_MNIST_DIR";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(anyhow::Error),
    Numerical(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Data(e) | CliError::Numerical(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            e if e.is_numerical() => CliError::Numerical(e.into()),
            Error::InvalidConfig(_) | Error::SweepNeeds1d(_) => CliError::Usage(e.to_string()),
            e => CliError::Data(e.into()),
        }
    }
}

type CliResult = Result<(), CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn require_input(path: &Path, what: &str) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(format!("{what} {} does not exist", path.display())))
    }
}

fn require_output_dir(path: &Path) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !dir.is_dir() {
        return Err(usage(format!(
            "output directory {} does not exist",
            dir.display()
        )));
    }
    if std::fs::metadata(dir)
        .map(|m| m.permissions().readonly())
        .unwrap_or(true)
    {
        return Err(usage(format!(
            "output directory {} is not writable",
            dir.display()
        )));
    }
    Ok(())
}

fn positive(name: &str, v: usize) -> Result<(), CliError> {
    if v == 0 {
        Err(usage(format!("--{name} must be at least 1")))
    } else {
        Ok(())
    }
}

fn adam(lr: f64) -> Result<AdamConfig, CliError> {
    let cfg = AdamConfig::with_lr(lr);
    cfg.validate()
        .map_err(|_| usage(format!("--lr must be a positive number, got {lr}")))?;
    Ok(cfg)
}

fn mnist_path(explicit: Option<PathBuf>) -> Result<PathBuf, CliError> {
    if let Some(p) = explicit {
        return Ok(p);
    }
    let dir = std::env::var_os(MNIST_DIR_ENV).ok_or_else(|| {
        usage(format!(
            "--mnist-images is required (or set {MNIST_DIR_ENV} to the MNIST directory)\n\n\
             Usage: gangan train-fleet --mnist-images <PATH> [OPTIONS]"
        ))
    })?;
    let dir = PathBuf::from(dir);
    let plain = dir.join("train-images-idx3-ubyte");
    let gz = dir.join("train-images-idx3-ubyte.gz");
    Ok(if !plain.exists() && gz.exists() {
        gz
    } else {
        plain
    })
}

pub fn train_fleet(a: TrainFleet) -> CliResult {
    let images = mnist_path(a.mnist_images)?;
    require_input(&images, "MNIST image file")?;
    require_output_dir(&a.out)?;
    for (n, v) in [
        ("num-gans", a.num_gans),
        ("epochs", a.epochs),
        ("batch", a.batch),
        ("workers", a.workers),
        ("latent-dim", a.latent_dim),
        ("hidden-dim", a.hidden_dim),
    ] {
        positive(n, v)?;
    }
    if let Some(n) = a.subset {
        positive("subset", n)?;
    }
    let config = GanConfig {
        latent_dim: a.latent_dim,
        hidden_dim: a.hidden_dim,
        epochs: a.epochs,
        batch_size: a.batch,
        adam: adam(a.lr)?,
        seed: a.seed,
        ..GanConfig::default()
    };

    let mut data = load_mnist(&images)?;
    if let Some(n) = a.subset {
        data = data.truncated(n);
    }
    eprintln!(
        "training {} GANs x {} epochs on {} images ({} workers)",
        a.num_gans,
        a.epochs,
        gangan::Examples::len(&data),
        a.workers
    );
    let report = run_fleet(a.num_gans, &config, &data, &a.out, a.workers, &|gan, l| {
        println!(
            "gan={gan} epoch={} d_loss={:.3} g_loss={:.3}",
            l.epoch, l.d_loss, l.g_loss
        );
    })?;
    eprintln!("wrote {} snapshots to {}", report.records, a.out.display());
    Ok(())
}

pub fn train_meta(a: TrainMeta) -> CliResult {
    require_input(&a.snapshots, "snapshot store")?;
    require_output_dir(&a.out)?;
    for (n, v) in [
        ("epochs", a.epochs),
        ("batch", a.batch),
        ("latent-dim", a.latent_dim),
        ("gen-hidden", a.gen_hidden),
        ("disc-hidden", a.disc_hidden),
    ] {
        positive(n, v)?;
    }
    let store = read_store(&a.snapshots)?;
    let config = GanGanConfig {
        latent_dim: a.latent_dim,
        gen_hidden: a.gen_hidden,
        disc_hidden: a.disc_hidden,
        data_dim: a.data_dim.unwrap_or(store.arch().param_count as usize),
        epochs: a.epochs,
        batch_size: a.batch,
        adam: adam(a.lr)?,
        seed: a.seed,
    };
    let stats = preflight(&config, &store)?;
    if stats.saturated_fraction > 0.0 {
        eprintln!(
            "warning: {:.6} of snapshot values have |x| >= 0.999, at the edge of the tanh output range",
            stats.saturated_fraction
        );
    }
    eprintln!(
        "training meta-GAN on {} snapshots of dim {} for {} epochs",
        store.len(),
        config.data_dim,
        config.epochs
    );
    let trained = train_gangan(&config, &store, |l| {
        println!(
            "epoch={} d_loss={:.3} g_loss={:.3}",
            l.epoch, l.d_loss, l.g_loss
        );
    })?;
    write_model(&a.out, &trained.model)?;
    eprintln!("wrote model to {}", a.out.display());
    Ok(())
}

fn parse_range(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || usage(format!("--range expects LO:HI, got {s:?}"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !lo.is_finite() || !hi.is_finite() || lo == hi {
        return Err(usage(format!("--range {s} is degenerate")));
    }
    Ok((lo, hi))
}

pub fn sweep(a: Sweep) -> CliResult {
    require_input(&a.model, "model")?;
    require_output_dir(&a.out)?;
    positive("rows", a.rows)?;
    positive("cols", a.cols)?;
    let range = parse_range(&a.range)?;
    let model = read_model(&a.model)?;
    if model.latent_dim() != 1 {
        return Err(usage(format!(
            "sweep needs a model with a 1-dimensional latent space; {} has {} (sample it with explicit latent vectors instead)",
            a.model.display(),
            model.latent_dim()
        )));
    }
    let fig = SweepFigure {
        rows: a.rows,
        cols: a.cols,
        range,
        noise_seed: a.noise_seed,
        padding: a.padding,
    };
    let image = render_sweep_figure(&model, &fig)?;
    write_pgm(&a.out, &image)?;
    eprintln!(
        "wrote {}x{} figure to {}",
        image.width,
        image.height,
        a.out.display()
    );
    Ok(())
}

fn parse_epochs(s: &str) -> Result<Vec<u32>, CliError> {
    let epochs = s
        .split(',')
        .map(|e| e.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| {
            usage(format!(
                "--epochs expects a comma-separated list, got {s:?}"
            ))
        })?;
    if epochs.is_empty() {
        return Err(usage("--epochs is empty"));
    }
    Ok(epochs)
}

pub fn epochs_figure(a: EpochsFigure) -> CliResult {
    require_input(&a.snapshots, "snapshot store")?;
    require_output_dir(&a.out)?;
    positive("samples", a.samples)?;
    let epochs = parse_epochs(&a.epochs)?;
    let store = read_store(&a.snapshots)?;
    let image = render_epoch_figure(
        &store,
        a.gan_index,
        &epochs,
        a.samples,
        a.noise_seed,
        a.padding,
    )?;
    write_pgm(&a.out, &image)?;
    eprintln!(
        "wrote {}x{} figure to {}",
        image.width,
        image.height,
        a.out.display()
    );
    Ok(())
}

pub fn snapshots_info(a: SnapshotsInfo) -> CliResult {
    require_input(&a.snapshots, "snapshot store")?;
    let store = read_store(&a.snapshots)?;
    let StoreArch {
        latent_dim,
        hidden_dim,
        data_dim,
        param_count,
    } = *store.arch();
    println!("magic: GGAN");
    println!("version: {STORE_VERSION}");
    println!("latent_dim: {latent_dim}");
    println!("hidden_dim: {hidden_dim}");
    println!("data_dim: {data_dim}");
    println!("param_count: {param_count}");
    println!("records: {}", store.len());
    println!("gans: {}", store.gan_indices().len());
    println!("max_epoch: {}", store.max_epoch().unwrap_or(0));
    if !store.is_empty() {
        let st = store_stats(&store)?;
        println!("min: {}", st.min());
        println!("max: {}", st.max());
        println!("mean_abs: {}", st.mean_abs);
        println!("saturated_fraction: {}", st.saturated_fraction);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-2:2").unwrap(), (-2.0, 2.0));
        assert!(parse_range("0:0").is_err());
        assert!(parse_range("1").is_err());
        assert!(parse_range("a:b").is_err());
    }

    #[test]
    fn epoch_lists() {
        assert_eq!(parse_epochs("1, 2,10").unwrap(), vec![1, 2, 10]);
        assert!(parse_epochs("1,,2").is_err());
    }

    #[test]
    fn error_classes() {
        assert_eq!(CliError::from(Error::SweepNeeds1d(4)).exit_code(), 1);
        assert_eq!(CliError::from(Error::EmptyStore).exit_code(), 2);
        let nan = Error::NonFiniteLoss {
            network: gangan::Network::Generator,
            epoch: 3,
        };
        assert_eq!(CliError::from(nan).exit_code(), 3);
    }
}
