//! Grayscale tiles, figure grids and binary PGM output.

use std::io::Write;
use std::path::Path;

use crate::data::{SnapshotStore, IMAGE_DIM, IMAGE_SIDE};
use crate::error::{Error, Result};
use crate::gangan::{latent_sweep, GanGanModel};
use crate::io::write_atomic;
use crate::nn::{unflatten, Matrix, Mlp};
use crate::rng::Prng;

pub const DEFAULT_PADDING: usize = 2;

/// 8-bit grayscale image, rows top to bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

/// Maps `[-1, 1]` to `0..=255` with `round((v + 1) * 127.5)`, rounding
/// halves away from zero. Values outside the range are clamped.
pub fn vector_to_tile(v: &[f32]) -> Result<Vec<u8>> {
    if v.len() != IMAGE_DIM {
        return Err(Error::DimensionMismatch {
            what: "image vector",
            expected: IMAGE_DIM,
            found: v.len(),
        });
    }
    Ok(v.iter().map(|&x| quantize(x)).collect())
}

#[inline]
fn quantize(x: f32) -> u8 {
    let x = (x as f64).clamp(-1.0, 1.0);
    ((x + 1.0) * 127.5).round() as u8
}

/// `rows x cols` tiles of 28x28 bytes, row-major, separated and framed by
/// `padding` black pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageGrid {
    rows: usize,
    cols: usize,
    padding: usize,
    tiles: Vec<Vec<u8>>,
}

impl ImageGrid {
    pub fn new(tiles: Vec<Vec<u8>>, rows: usize, cols: usize, padding: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidConfig(
                "grid needs at least one row and column".into(),
            ));
        }
        if tiles.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "grid tile count",
                expected: rows * cols,
                found: tiles.len(),
            });
        }
        if let Some(t) = tiles.iter().find(|t| t.len() != IMAGE_DIM) {
            return Err(Error::DimensionMismatch {
                what: "tile size",
                expected: IMAGE_DIM,
                found: t.len(),
            });
        }
        Ok(ImageGrid {
            rows,
            cols,
            padding,
            tiles,
        })
    }

    pub fn width(&self) -> usize {
        self.cols * IMAGE_SIDE + (self.cols + 1) * self.padding
    }

    pub fn height(&self) -> usize {
        self.rows * IMAGE_SIDE + (self.rows + 1) * self.padding
    }

    pub fn compose(&self) -> GrayImage {
        let (width, height) = (self.width(), self.height());
        let mut pixels = vec![0u8; width * height];
        for (i, tile) in self.tiles.iter().enumerate() {
            let (r, c) = (i / self.cols, i % self.cols);
            let top = self.padding + r * (IMAGE_SIDE + self.padding);
            let left = self.padding + c * (IMAGE_SIDE + self.padding);
            for (y, line) in tile.chunks_exact(IMAGE_SIDE).enumerate() {
                let at = (top + y) * width + left;
                pixels[at..at + IMAGE_SIDE].copy_from_slice(line);
            }
        }
        GrayImage {
            width,
            height,
            pixels,
        }
    }
}

pub fn compose_grid(
    tiles: Vec<Vec<u8>>,
    rows: usize,
    cols: usize,
    padding: usize,
) -> Result<GrayImage> {
    Ok(ImageGrid::new(tiles, rows, cols, padding)?.compose())
}

pub fn encode_pgm(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend_from_slice(&image.pixels);
    out
}

pub fn write_pgm(path: impl AsRef<Path>, image: &GrayImage) -> Result<()> {
    let bytes = encode_pgm(image);
    write_atomic(path.as_ref(), |w| Ok(w.write_all(&bytes)?))
}

/// Samples of one generator on fixed noise, one tile per noise row.
fn generator_tiles(generator: &Mlp, noise: &Matrix) -> Result<Vec<Vec<u8>>> {
    generator
        .predict(noise)?
        .iter_rows()
        .map(vector_to_tile)
        .collect()
}

fn fixed_noise(count: usize, dim: usize, seed: u64) -> Matrix {
    Matrix::from_vec(count, dim, Prng::new(seed).standard_normal(count * dim)).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepFigure {
    pub rows: usize,
    pub cols: usize,
    pub range: (f64, f64),
    pub noise_seed: u64,
    pub padding: usize,
}

impl Default for SweepFigure {
    /// 32 swept GANs by 40 shared noise vectors over `[-2, 2]`.
    fn default() -> Self {
        SweepFigure {
            rows: 32,
            cols: 40,
            range: (-2.0, 2.0),
            noise_seed: 0,
            padding: DEFAULT_PADDING,
        }
    }
}

/// Row `k` shows the GAN at the `k`-th latent sweep point; column `j`
/// feeds all of them the same noise vector `j`.
pub fn render_sweep_figure(model: &GanGanModel, fig: &SweepFigure) -> Result<GrayImage> {
    if fig.cols == 0 {
        return Err(Error::InvalidConfig(
            "figure needs at least one column".into(),
        ));
    }
    let gans = if fig.rows == 1 {
        // a single row is the midpoint of the range
        let mid = (fig.range.0 + fig.range.1) / 2.0;
        if model.latent_dim() != 1 {
            return Err(Error::SweepNeeds1d(model.latent_dim()));
        }
        let (g, _) = crate::gangan::sample_gan(model, &[mid as f32])?;
        vec![g]
    } else {
        latent_sweep(model, fig.rows, fig.range)?
            .into_iter()
            .map(|s| s.generator)
            .collect()
    };
    let noise = fixed_noise(fig.cols, model.source.latent_dim as usize, fig.noise_seed);
    let mut tiles = Vec::with_capacity(fig.rows * fig.cols);
    for g in &gans {
        tiles.extend(generator_tiles(g, &noise)?);
    }
    compose_grid(tiles, fig.rows, fig.cols, fig.padding)
}

/// One row per requested epoch of GAN `gan_index`, each showing
/// `n_samples` draws on the same fixed noise.
pub fn render_epoch_figure(
    store: &SnapshotStore,
    gan_index: u32,
    epochs: &[u32],
    n_samples: usize,
    noise_seed: u64,
    padding: usize,
) -> Result<GrayImage> {
    if epochs.is_empty() || n_samples == 0 {
        return Err(Error::InvalidConfig(
            "need at least one epoch and one sample".into(),
        ));
    }
    let arch = store.arch().gan_arch();
    let (gs, ds) = (arch.generator_spec()?, arch.discriminator_spec()?);
    let noise = fixed_noise(n_samples, arch.latent_dim, noise_seed);
    let mut tiles = Vec::with_capacity(epochs.len() * n_samples);
    for &epoch in epochs {
        let record = store.get(gan_index, epoch)?;
        let (g, _) = unflatten(record.params.as_slice(), &gs, &ds)?;
        tiles.extend(generator_tiles(&g, &noise)?);
    }
    compose_grid(tiles, epochs.len(), n_samples, padding)
}
