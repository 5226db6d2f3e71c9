//! Adversarial training: one generator/discriminator pair, the per-epoch
//! snapshotting loop and the fleet of independent MNIST GANs.

use std::path::Path;

use rayon::prelude::*;

use crate::data::{
    batches, Examples, SnapshotRecord, SnapshotSink, SnapshotStore, StoreArch, StoreWriter,
};
use crate::error::{Error, Network, Result};
use crate::nn::{bce_const, flatten, GanArch, Matrix, Mlp};
use crate::optim::{adam_step, AdamConfig, AdamState};
use crate::rng::Prng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GanConfig {
    pub latent_dim: usize,
    pub hidden_dim: usize,
    pub data_dim: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub adam: AdamConfig,
    pub seed: u64,
}

impl Default for GanConfig {
    fn default() -> Self {
        GanConfig {
            latent_dim: 64,
            hidden_dim: 64,
            data_dim: 784,
            epochs: 100,
            batch_size: 128,
            adam: AdamConfig::default(),
            seed: 0,
        }
    }
}

impl GanConfig {
    pub fn arch(&self) -> GanArch {
        GanArch::symmetric(self.latent_dim, self.hidden_dim, self.data_dim)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("latent_dim", self.latent_dim),
            ("hidden_dim", self.hidden_dim),
            ("data_dim", self.data_dim),
            ("epochs", self.epochs),
            ("batch_size", self.batch_size),
        ] {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be positive")));
            }
        }
        self.adam.validate()
    }
}

/// Mean losses of one training epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochLosses {
    pub epoch: usize,
    pub d_loss: f64,
    pub g_loss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchLosses {
    pub d_loss: f64,
    pub g_loss: f64,
}

fn in_network(network: Network) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::NonFiniteGradient { tensor, index, .. } => Error::NonFiniteGradient {
            network: Some(network),
            tensor,
            index,
        },
        other => other,
    }
}

/// A generator and discriminator with their optimizer states. Shared by
/// the MNIST GANs and the meta-GAN.
#[derive(Debug, Clone)]
pub struct AdversarialPair {
    pub generator: Mlp,
    pub discriminator: Mlp,
    g_opt: AdamState,
    d_opt: AdamState,
    adam: AdamConfig,
}

impl AdversarialPair {
    /// Initializes the generator, then the discriminator, from `prng`.
    pub fn init(arch: &GanArch, adam: AdamConfig, prng: &mut Prng) -> Result<Self> {
        let generator = Mlp::init(&arch.generator_spec()?, prng);
        let discriminator = Mlp::init(&arch.discriminator_spec()?, prng);
        Ok(Self::from_networks(generator, discriminator, adam))
    }

    pub fn from_networks(generator: Mlp, discriminator: Mlp, adam: AdamConfig) -> Self {
        AdversarialPair {
            g_opt: AdamState::for_mlp(&generator),
            d_opt: AdamState::for_mlp(&discriminator),
            generator,
            discriminator,
            adam,
        }
    }

    pub fn latent_dim(&self) -> usize {
        self.generator.spec().input_dim()
    }

    fn noise(&self, rows: usize, prng: &mut Prng) -> Matrix {
        let cols = self.latent_dim();
        Matrix::from_vec(rows, cols, prng.standard_normal(rows * cols)).unwrap()
    }

    /// One discriminator step on `real` against fresh fakes, then one
    /// non-saturating generator step with new noise. `epoch` only labels
    /// errors.
    pub fn train_batch(
        &mut self,
        real: &Matrix,
        prng: &mut Prng,
        epoch: usize,
    ) -> Result<BatchLosses> {
        let n = real.rows();
        if n == 0 {
            return Err(Error::EmptyBatch);
        }
        let d = &self.discriminator;

        // Discriminator: real -> 1, fake -> 0, generator frozen.
        let fake = self.generator.predict(&self.noise(n, prng))?;
        let tape_real = d.forward(real)?;
        let loss_real = bce_const(tape_real.output().as_slice(), 1.0)?;
        let tape_fake = d.forward(&fake)?;
        let loss_fake = bce_const(tape_fake.output().as_slice(), 0.0)?;
        let d_loss = loss_real.loss + loss_fake.loss;
        if !d_loss.is_finite() {
            return Err(Error::NonFiniteLoss {
                network: Network::Discriminator,
                epoch,
            });
        }
        let mut d_grads =
            d.backward(&tape_real, &Matrix::from_vec(n, 1, loss_real.grad)?, false)?;
        d_grads.add_assign(&d.backward(
            &tape_fake,
            &Matrix::from_vec(n, 1, loss_fake.grad)?,
            false,
        )?)?;
        adam_step(
            &mut self.discriminator.tensors_mut(),
            &d_grads.tensors(),
            &mut self.d_opt,
            &self.adam,
        )
        .map_err(in_network(Network::Discriminator))?;

        // Generator: make the updated discriminator call fresh fakes real.
        let z = self.noise(n, prng);
        let g_tape = self.generator.forward(&z)?;
        let d_tape = self.discriminator.forward(g_tape.output())?;
        let g_out = bce_const(d_tape.output().as_slice(), 1.0)?;
        if !g_out.loss.is_finite() {
            return Err(Error::NonFiniteLoss {
                network: Network::Generator,
                epoch,
            });
        }
        let through_d = self
            .discriminator
            .input_gradient(&d_tape, &Matrix::from_vec(n, 1, g_out.grad)?)?;
        let g_grads = self.generator.backward(&g_tape, &through_d, false)?;
        adam_step(
            &mut self.generator.tensors_mut(),
            &g_grads.tensors(),
            &mut self.g_opt,
            &self.adam,
        )
        .map_err(in_network(Network::Generator))?;

        Ok(BatchLosses {
            d_loss,
            g_loss: g_out.loss,
        })
    }

    /// One shuffled pass over `data`, returning mean batch losses.
    pub fn train_epoch<D: Examples + ?Sized>(
        &mut self,
        data: &D,
        batch_size: usize,
        prng: &mut Prng,
        epoch: usize,
    ) -> Result<EpochLosses> {
        if data.width() != self.discriminator.spec().input_dim() {
            return Err(Error::DimensionMismatch {
                what: "training example width",
                expected: self.discriminator.spec().input_dim(),
                found: data.width(),
            });
        }
        let order = batches(data, batch_size, prng)?;
        let (mut d_sum, mut g_sum) = (0.0, 0.0);
        for idx in &order {
            let real = data.gather(idx)?;
            let l = self.train_batch(&real, prng, epoch)?;
            d_sum += l.d_loss;
            g_sum += l.g_loss;
        }
        let k = order.len() as f64;
        Ok(EpochLosses {
            epoch,
            d_loss: d_sum / k,
            g_loss: g_sum / k,
        })
    }
}

/// Mean discriminator output on `real` and on generator samples from `noise`.
pub fn discriminator_probe(
    generator: &Mlp,
    discriminator: &Mlp,
    real: &Matrix,
    noise: &Matrix,
) -> Result<(f64, f64)> {
    let on_real = discriminator.predict(real)?.mean();
    let on_fake = discriminator.predict(&generator.predict(noise)?)?.mean();
    Ok((on_real, on_fake))
}

/// One MNIST GAN of the fleet, with its own random stream.
#[derive(Debug, Clone)]
pub struct GanTrainer {
    pair: AdversarialPair,
    config: GanConfig,
    gan_index: u32,
    epoch: usize,
    history: Vec<EpochLosses>,
    prng: Prng,
}

impl GanTrainer {
    /// Everything random about GAN `gan_index` comes from stream
    /// `gan_index` of `config.seed`.
    pub fn new(config: GanConfig, gan_index: u32) -> Result<Self> {
        config.validate()?;
        let mut prng = Prng::derive(config.seed, gan_index as u64);
        let pair = AdversarialPair::init(&config.arch(), config.adam, &mut prng)?;
        Ok(GanTrainer {
            pair,
            config,
            gan_index,
            epoch: 0,
            history: Vec::new(),
            prng,
        })
    }

    pub fn pair(&self) -> &AdversarialPair {
        &self.pair
    }

    pub fn epoch(&self) -> usize {
        self.epoch
    }

    pub fn history(&self) -> &[EpochLosses] {
        &self.history
    }

    pub fn train_batch(&mut self, real: &Matrix) -> Result<BatchLosses> {
        self.pair.train_batch(real, &mut self.prng, self.epoch + 1)
    }

    pub fn train_epoch<D: Examples + ?Sized>(&mut self, data: &D) -> Result<EpochLosses> {
        let losses =
            self.pair
                .train_epoch(data, self.config.batch_size, &mut self.prng, self.epoch + 1)?;
        self.epoch += 1;
        self.history.push(losses);
        Ok(losses)
    }

    pub fn snapshot(&self) -> SnapshotRecord {
        SnapshotRecord {
            gan_index: self.gan_index,
            epoch: self.epoch as u32,
            params: flatten(&self.pair.generator, &self.pair.discriminator),
        }
    }
}

/// Trains GAN `gan_index` for `config.epochs` epochs, pushing a snapshot
/// after each one.
pub fn train_gan_with_snapshots<D, S>(
    config: &GanConfig,
    gan_index: u32,
    data: &D,
    sink: &mut S,
    mut on_epoch: impl FnMut(&EpochLosses),
) -> Result<Vec<EpochLosses>>
where
    D: Examples + ?Sized,
    S: SnapshotSink + ?Sized,
{
    let mut trainer = GanTrainer::new(*config, gan_index)?;
    for _ in 0..config.epochs {
        let losses = trainer.train_epoch(data)?;
        on_epoch(&losses);
        sink.push(trainer.snapshot())?;
    }
    Ok(trainer.history)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FleetReport {
    pub records: usize,
    pub histories: Vec<Vec<EpochLosses>>,
}

/// Trains `num_gans` GANs on up to `workers` threads and streams every
/// snapshot to `out_path`, ordered by `(gan_index, epoch)`. The file is
/// identical for any worker count.
pub fn run_fleet<D>(
    num_gans: usize,
    config: &GanConfig,
    data: &D,
    out_path: impl AsRef<Path>,
    workers: usize,
    progress: &(dyn Fn(u32, &EpochLosses) + Sync),
) -> Result<FleetReport>
where
    D: Examples + Sync + ?Sized,
{
    if num_gans == 0 || workers == 0 {
        return Err(Error::InvalidConfig(
            "num_gans and workers must be at least 1".into(),
        ));
    }
    config.validate()?;
    if data.width() != config.data_dim {
        return Err(Error::DimensionMismatch {
            what: "dataset width",
            expected: config.data_dim,
            found: data.width(),
        });
    }
    let arch = StoreArch::from_gan_arch(&config.arch())?;
    let total = u32::try_from(num_gans * config.epochs)
        .map_err(|_| Error::InvalidConfig("too many snapshot records".into()))?;
    let mut writer = StoreWriter::create(out_path, arch, total)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;

    let mut histories = Vec::with_capacity(num_gans);
    let indices: Vec<u32> = (0..num_gans as u32).collect();
    // Bounded memory: one chunk of `workers` GANs is held at a time.
    for chunk in indices.chunks(workers) {
        let results: Vec<Result<(SnapshotStore, Vec<EpochLosses>)>> = pool.install(|| {
            chunk
                .par_iter()
                .map(|&gan| {
                    let mut local = SnapshotStore::new(arch);
                    let hist = train_gan_with_snapshots(config, gan, data, &mut local, |l| {
                        progress(gan, l)
                    })?;
                    Ok((local, hist))
                })
                .collect()
        });
        for (&gan, result) in chunk.iter().zip(results) {
            let (local, hist) = result.map_err(|e| Error::GanFailed {
                gan_index: gan as usize,
                source: Box::new(e),
            })?;
            for record in local.into_records() {
                writer.push(record)?;
            }
            histories.push(hist);
        }
    }
    writer.finish()?;
    Ok(FleetReport {
        records: total as usize,
        histories,
    })
}
