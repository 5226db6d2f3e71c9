//! The meta-GAN: a GAN whose training examples are flattened GAN
//! snapshots, and sampling concrete MNIST GANs from its latent space.
//!
//! Model files (`GGMN`) use the same conventions as snapshot stores, all
//! integers little-endian `u32`:
//!
//! ```text
//! "GGMN" | version=1 | latent_dim | gen_hidden | disc_hidden | data_dim | epochs_trained
//!        | src_latent_dim | src_hidden_dim | src_data_dim | src_param_count
//!        | gen_param_count | disc_param_count
//! gen_param_count x f32 | disc_param_count x f32
//! ```

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use crate::data::{store_stats, SnapshotStore, StoreArch, StoreStats};
use crate::error::{Error, Result};
use crate::gan::{AdversarialPair, EpochLosses};
use crate::io::{self as bin, read_u32, write_u32};
use crate::nn::{unflatten, GanArch, Matrix, Mlp, ParamVector};
use crate::optim::AdamConfig;
use crate::rng::Prng;

pub const MODEL_MAGIC: [u8; 4] = *b"GGMN";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GanGanConfig {
    pub latent_dim: usize,
    pub gen_hidden: usize,
    pub disc_hidden: usize,
    /// Must equal the source store's parameter count.
    pub data_dim: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub adam: AdamConfig,
    pub seed: u64,
}

impl Default for GanGanConfig {
    fn default() -> Self {
        GanGanConfig {
            latent_dim: 1,
            gen_hidden: 64,
            disc_hidden: 8,
            data_dim: 113745,
            epochs: 250,
            batch_size: 32,
            adam: AdamConfig::default(),
            seed: 0,
        }
    }
}

impl GanGanConfig {
    pub fn arch(&self) -> GanArch {
        GanArch {
            latent_dim: self.latent_dim,
            gen_hidden: self.gen_hidden,
            disc_hidden: self.disc_hidden,
            data_dim: self.data_dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("latent_dim", self.latent_dim),
            ("gen_hidden", self.gen_hidden),
            ("disc_hidden", self.disc_hidden),
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

#[derive(Debug, Clone, PartialEq)]
pub struct GanGanModel {
    pub generator: Mlp,
    pub discriminator: Mlp,
    pub epochs_trained: u32,
    /// Architecture of the GANs this model generates.
    pub source: StoreArch,
}

impl GanGanModel {
    pub fn latent_dim(&self) -> usize {
        self.generator.spec().input_dim()
    }

    pub fn arch(&self) -> GanArch {
        GanArch {
            latent_dim: self.latent_dim(),
            gen_hidden: self.generator.spec().layer_dims()[1],
            disc_hidden: self.discriminator.spec().layer_dims()[1],
            data_dim: self.generator.spec().output_dim(),
        }
    }

    /// Freshly initialized, untrained model.
    pub fn init(config: &GanGanConfig, source: StoreArch, prng: &mut Prng) -> Result<Self> {
        let pair = AdversarialPair::init(&config.arch(), config.adam, prng)?;
        Self::from_pair(pair, source, 0)
    }

    fn from_pair(pair: AdversarialPair, source: StoreArch, epochs_trained: u32) -> Result<Self> {
        if pair.generator.spec().output_dim() != source.param_count as usize {
            return Err(Error::DimensionMismatch {
                what: "meta-generator output",
                expected: source.param_count as usize,
                found: pair.generator.spec().output_dim(),
            });
        }
        Ok(GanGanModel {
            generator: pair.generator,
            discriminator: pair.discriminator,
            epochs_trained,
            source,
        })
    }
}

#[derive(Debug, Clone)]
pub struct GanGanTraining {
    pub model: GanGanModel,
    pub history: Vec<EpochLosses>,
}

/// Checks a store against a meta-GAN config and summarizes it. A non-zero
/// `saturated_fraction` means some snapshot values sit at the edge of what
/// a tanh generator can emit.
pub fn preflight(config: &GanGanConfig, store: &SnapshotStore) -> Result<StoreStats> {
    config.validate()?;
    if store.is_empty() {
        return Err(Error::EmptyStore);
    }
    let pc = store.arch().param_count as usize;
    if config.data_dim != pc {
        return Err(Error::DimensionMismatch {
            what: "meta-GAN data_dim vs store param_count",
            expected: pc,
            found: config.data_dim,
        });
    }
    store_stats(store)
}

/// Adversarial training over snapshot vectors, same two-step schedule as
/// the MNIST GANs. Randomness comes from stream 0 of `config.seed`.
pub fn train_gangan(
    config: &GanGanConfig,
    store: &SnapshotStore,
    mut on_epoch: impl FnMut(&EpochLosses),
) -> Result<GanGanTraining> {
    preflight(config, store)?;
    let mut prng = Prng::new(config.seed);
    let mut pair = AdversarialPair::init(&config.arch(), config.adam, &mut prng)?;
    let mut history = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        let losses = pair.train_epoch(store, config.batch_size, &mut prng, epoch)?;
        on_epoch(&losses);
        history.push(losses);
    }
    let model = GanGanModel::from_pair(pair, *store.arch(), config.epochs as u32)?;
    Ok(GanGanTraining { model, history })
}

/// The parameter vector the meta-generator emits for latent code `z`.
pub fn sample_params(model: &GanGanModel, z: &[f32]) -> Result<ParamVector> {
    if z.len() != model.latent_dim() {
        return Err(Error::DimensionMismatch {
            what: "latent code",
            expected: model.latent_dim(),
            found: z.len(),
        });
    }
    let input = Matrix::from_vec(1, z.len(), z.to_vec())?;
    Ok(ParamVector::new(
        model.generator.predict(&input)?.into_vec(),
    ))
}

/// A concrete MNIST generator/discriminator pair for latent code `z`.
pub fn sample_gan(model: &GanGanModel, z: &[f32]) -> Result<(Mlp, Mlp)> {
    let params = sample_params(model, z)?;
    let arch = model.source.gan_arch();
    unflatten(
        params.as_slice(),
        &arch.generator_spec()?,
        &arch.discriminator_spec()?,
    )
}

/// `n` evenly spaced points from `lo` to `hi`, both included.
pub fn sweep_points(n: usize, lo: f64, hi: f64) -> Result<Vec<f32>> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!(
            "a sweep needs at least 2 points, got {n}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite()) || lo == hi {
        return Err(Error::InvalidConfig(format!(
            "degenerate sweep range {lo}:{hi}"
        )));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|k| if k + 1 == n { hi } else { lo + step * k as f64 } as f32)
        .collect())
}

#[derive(Debug, Clone)]
pub struct SweptGan {
    pub z: f32,
    pub generator: Mlp,
    pub discriminator: Mlp,
}

/// Samples GANs along a 1-D latent space, in order of increasing `k`.
pub fn latent_sweep(model: &GanGanModel, n: usize, range: (f64, f64)) -> Result<Vec<SweptGan>> {
    if model.latent_dim() != 1 {
        return Err(Error::SweepNeeds1d(model.latent_dim()));
    }
    sweep_points(n, range.0, range.1)?
        .into_iter()
        .map(|z| {
            let (generator, discriminator) = sample_gan(model, &[z])?;
            Ok(SweptGan {
                z,
                generator,
                discriminator,
            })
        })
        .collect()
}

impl GanGanModel {
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        let arch = self.arch();
        w.write_all(&MODEL_MAGIC)?;
        for x in [
            MODEL_VERSION,
            arch.latent_dim as u32,
            arch.gen_hidden as u32,
            arch.disc_hidden as u32,
            arch.data_dim as u32,
            self.epochs_trained,
            self.source.latent_dim,
            self.source.hidden_dim,
            self.source.data_dim,
            self.source.param_count,
            self.generator.spec().param_count() as u32,
            self.discriminator.spec().param_count() as u32,
        ] {
            write_u32(w, x)?;
        }
        let mut flat = Vec::with_capacity(self.generator.spec().param_count());
        self.generator.flatten_into(&mut flat);
        bin::write_f32s(w, &flat)?;
        flat.clear();
        self.discriminator.flatten_into(&mut flat);
        bin::write_f32s(w, &flat)?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if magic != MODEL_MAGIC {
            return Err(Error::BadMagic {
                what: "meta-GAN model",
                expected: bin::magic_u32(MODEL_MAGIC),
                found: bin::magic_u32(magic),
            });
        }
        let version = read_u32(r)?;
        if version != MODEL_VERSION {
            return Err(Error::UnsupportedVersion {
                what: "meta-GAN model",
                expected: MODEL_VERSION,
                found: version,
            });
        }
        let mut h = [0u32; 11];
        for x in &mut h {
            *x = read_u32(r)?;
        }
        let [latent, gen_hidden, disc_hidden, data_dim, epochs_trained, s_lat, s_hid, s_data, s_pc, g_pc, d_pc] =
            h;
        let source = StoreArch::new(s_lat, s_hid, s_data)?;
        if source.param_count != s_pc {
            return Err(Error::DimensionMismatch {
                what: "model source param_count",
                expected: source.param_count as usize,
                found: s_pc as usize,
            });
        }
        let arch = GanArch {
            latent_dim: latent as usize,
            gen_hidden: gen_hidden as usize,
            disc_hidden: disc_hidden as usize,
            data_dim: data_dim as usize,
        };
        let (gs, ds) = (arch.generator_spec()?, arch.discriminator_spec()?);
        for (what, expected, found) in [
            (
                "model generator param count",
                gs.param_count(),
                g_pc as usize,
            ),
            (
                "model discriminator param count",
                ds.param_count(),
                d_pc as usize,
            ),
        ] {
            if expected != found {
                return Err(Error::DimensionMismatch {
                    what,
                    expected,
                    found,
                });
            }
        }
        let truncated = |_| Error::Truncated {
            what: "meta-GAN model payload",
            expected: 4 * (g_pc as u64 + d_pc as u64),
            found: 0,
        };
        let g = bin::read_f32s(r, g_pc as usize).map_err(truncated)?;
        let d = bin::read_f32s(r, d_pc as usize).map_err(truncated)?;
        if !bin::at_eof(r)? {
            return Err(Error::InvalidConfig(
                "trailing bytes after model payload".into(),
            ));
        }
        let generator = Mlp::from_flat(&gs, &g)?;
        let discriminator = Mlp::from_flat(&ds, &d)?;
        if !generator.is_finite() || !discriminator.is_finite() {
            return Err(Error::NonFinitePayload { record: 0 });
        }
        let pair = AdversarialPair::from_networks(generator, discriminator, AdamConfig::default());
        Self::from_pair(pair, source, epochs_trained)
    }
}

pub fn write_model(path: impl AsRef<Path>, model: &GanGanModel) -> Result<()> {
    bin::write_atomic(path.as_ref(), |w| model.write_to(w))
}

pub fn read_model(path: impl AsRef<Path>) -> Result<GanGanModel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    GanGanModel::read_from(&mut BufReader::new(file))
}
