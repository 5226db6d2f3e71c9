use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;

use crate::error::{Error, Result};

use super::Examples;

pub const IMAGE_SIDE: usize = 28;
pub const IMAGE_DIM: usize = IMAGE_SIDE * IMAGE_SIDE;
pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;

/// MNIST images as rows of 784 floats, pixels mapped `p -> p / 127.5 - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MnistDataset {
    pixels: Vec<f32>,
    count: usize,
}

#[inline]
pub fn normalize_pixel(p: u8) -> f32 {
    p as f32 / 127.5 - 1.0
}

/// Loads an IDX image file, plain or gzip-compressed.
pub fn load_mnist(path: impl AsRef<Path>) -> Result<MnistDataset> {
    let path = path.as_ref();
    let raw = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let bytes = if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(&raw[..])
            .read_to_end(&mut out)
            .map_err(|e| Error::io(path, e))?;
        out
    } else {
        raw
    };
    parse_idx_images(&bytes)
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<MnistDataset> {
    if bytes.len() < 16 {
        return Err(Error::Truncated {
            what: "IDX header",
            expected: 16,
            found: bytes.len() as u64,
        });
    }
    let word = |i: usize| u32::from_be_bytes(bytes[i..i + 4].try_into().unwrap());
    let magic = word(0);
    if magic != IDX_IMAGES_MAGIC {
        return Err(Error::BadMagic {
            what: "IDX image file",
            expected: IDX_IMAGES_MAGIC,
            found: magic,
        });
    }
    let (count, rows, cols) = (word(4), word(8), word(12));
    if rows as usize != IMAGE_SIDE || cols as usize != IMAGE_SIDE {
        return Err(Error::WrongImageDims { rows, cols });
    }
    let expected = 16 + count as u64 * IMAGE_DIM as u64;
    if (bytes.len() as u64) < expected {
        return Err(Error::Truncated {
            what: "IDX image payload",
            expected,
            found: bytes.len() as u64,
        });
    }
    let pixels = bytes[16..expected as usize]
        .iter()
        .map(|&p| normalize_pixel(p))
        .collect();
    Ok(MnistDataset {
        pixels,
        count: count as usize,
    })
}

impl MnistDataset {
    pub fn from_pixels(pixels: Vec<f32>) -> Result<Self> {
        if !pixels.len().is_multiple_of(IMAGE_DIM) {
            return Err(Error::DimensionMismatch {
                what: "image buffer",
                expected: (pixels.len() / IMAGE_DIM + 1) * IMAGE_DIM,
                found: pixels.len(),
            });
        }
        let count = pixels.len() / IMAGE_DIM;
        Ok(MnistDataset { pixels, count })
    }

    /// The first `n` images (all of them if `n` exceeds the count).
    pub fn truncated(mut self, n: usize) -> Self {
        self.count = self.count.min(n);
        self.pixels.truncate(self.count * IMAGE_DIM);
        self
    }

    pub fn image(&self, i: usize) -> &[f32] {
        &self.pixels[i * IMAGE_DIM..(i + 1) * IMAGE_DIM]
    }

    pub fn pixels(&self) -> &[f32] {
        &self.pixels
    }
}

impl Examples for MnistDataset {
    fn len(&self) -> usize {
        self.count
    }

    fn width(&self) -> usize {
        IMAGE_DIM
    }

    fn example(&self, i: usize) -> &[f32] {
        self.image(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(count: u32, rows: u32, cols: u32, payload: &[u8]) -> Vec<u8> {
        let mut b = Vec::new();
        for w in [IDX_IMAGES_MAGIC, count, rows, cols] {
            b.extend_from_slice(&w.to_be_bytes());
        }
        b.extend_from_slice(payload);
        b
    }

    #[test]
    fn pixel_endpoints() {
        assert_eq!(normalize_pixel(0), -1.0);
        assert_eq!(normalize_pixel(255), 1.0);
    }

    #[test]
    fn parses_small_file() {
        let mut payload = vec![0u8; 2 * IMAGE_DIM];
        payload[IMAGE_DIM] = 255;
        let ds = parse_idx_images(&idx(2, 28, 28, &payload)).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.image(0)[0], -1.0);
        assert_eq!(ds.image(1)[0], 1.0);
    }

    #[test]
    fn distinct_failures() {
        let mut bad = idx(1, 28, 28, &[0; IMAGE_DIM]);
        bad[3] = 0x01; // label-file magic
        assert!(matches!(
            parse_idx_images(&bad),
            Err(Error::BadMagic { found: 0x801, .. })
        ));
        assert!(matches!(
            parse_idx_images(&idx(1, 28, 27, &[0; 756])),
            Err(Error::WrongImageDims { rows: 28, cols: 27 })
        ));
        assert!(matches!(
            parse_idx_images(&idx(2, 28, 28, &[0; IMAGE_DIM])),
            Err(Error::Truncated { .. })
        ));
        assert!(matches!(
            parse_idx_images(&[0, 0, 8]),
            Err(Error::Truncated { .. })
        ));
    }

    #[test]
    fn reads_gzip() {
        use flate2::write::GzEncoder;
        use std::io::Write;
        let raw = idx(1, 28, 28, &[128; IMAGE_DIM]);
        let mut enc = GzEncoder::new(Vec::new(), flate2::Compression::fast());
        enc.write_all(&raw).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("imgs.gz");
        std::fs::write(&path, enc.finish().unwrap()).unwrap();
        let ds = load_mnist(&path).unwrap();
        assert_eq!(ds.len(), 1);
        assert!((ds.image(0)[5] - (128.0 / 127.5 - 1.0)).abs() < 1e-7);
    }
}
