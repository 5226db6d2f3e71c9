//! The `GGAN` snapshot container.
//!
//! Layout, all integers little-endian `u32`:
//!
//! ```text
//! "GGAN" | version=1 | latent_dim | hidden_dim | data_dim | param_count | record_count
//! record_count x ( gan_index | epoch | param_count x f32 )
//! ```

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::{Error, Result};
use crate::io::{self as bin, read_u32, write_u32};
use crate::nn::{GanArch, ParamVector};

use super::Examples;

pub const STORE_MAGIC: [u8; 4] = *b"GGAN";
pub const STORE_VERSION: u32 = 1;

/// Architecture of the GANs whose parameters a store holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoreArch {
    pub latent_dim: u32,
    pub hidden_dim: u32,
    pub data_dim: u32,
    pub param_count: u32,
}

impl StoreArch {
    pub fn new(latent_dim: u32, hidden_dim: u32, data_dim: u32) -> Result<Self> {
        let arch = GanArch::symmetric(latent_dim as usize, hidden_dim as usize, data_dim as usize);
        let param_count = u32::try_from(arch.param_count()?)
            .map_err(|_| Error::InvalidConfig("parameter count exceeds u32".into()))?;
        Ok(StoreArch {
            latent_dim,
            hidden_dim,
            data_dim,
            param_count,
        })
    }

    pub fn mnist() -> Self {
        Self::from_gan_arch(&GanArch::MNIST).unwrap()
    }

    pub fn from_gan_arch(arch: &GanArch) -> Result<Self> {
        if arch.gen_hidden != arch.disc_hidden {
            return Err(Error::InvalidConfig(
                "snapshot stores hold GANs with one shared hidden width".into(),
            ));
        }
        Self::new(
            arch.latent_dim as u32,
            arch.gen_hidden as u32,
            arch.data_dim as u32,
        )
    }

    pub fn gan_arch(&self) -> GanArch {
        GanArch::symmetric(
            self.latent_dim as usize,
            self.hidden_dim as usize,
            self.data_dim as usize,
        )
    }

    fn record_bytes(&self) -> u64 {
        8 + 4 * self.param_count as u64
    }

    fn write<W: Write>(&self, w: &mut W, record_count: u32) -> std::io::Result<()> {
        w.write_all(&STORE_MAGIC)?;
        write_u32(w, STORE_VERSION)?;
        for x in [
            self.latent_dim,
            self.hidden_dim,
            self.data_dim,
            self.param_count,
            record_count,
        ] {
            write_u32(w, x)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotRecord {
    pub gan_index: u32,
    pub epoch: u32,
    pub params: ParamVector,
}

/// Destination for per-epoch snapshots.
pub trait SnapshotSink {
    fn push(&mut self, record: SnapshotRecord) -> Result<()>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotStore {
    arch: StoreArch,
    records: Vec<SnapshotRecord>,
    keys: HashSet<(u32, u32)>,
}

impl SnapshotStore {
    pub fn new(arch: StoreArch) -> Self {
        SnapshotStore {
            arch,
            records: Vec::new(),
            keys: HashSet::new(),
        }
    }

    pub fn arch(&self) -> &StoreArch {
        &self.arch
    }

    pub fn records(&self) -> &[SnapshotRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<SnapshotRecord> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, gan_index: u32, epoch: u32) -> Result<&SnapshotRecord> {
        self.records
            .iter()
            .find(|r| r.gan_index == gan_index && r.epoch == epoch)
            .ok_or(Error::MissingRecord { gan_index, epoch })
    }

    /// Distinct GAN indices, ascending.
    pub fn gan_indices(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.records.iter().map(|r| r.gan_index).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn max_epoch(&self) -> Option<u32> {
        self.records.iter().map(|r| r.epoch).max()
    }

    pub fn sort(&mut self) {
        self.records.sort_by_key(|r| (r.gan_index, r.epoch));
    }

    fn check(&self, record: &SnapshotRecord, index: usize) -> Result<()> {
        if record.params.dim() != self.arch.param_count as usize {
            return Err(Error::DimensionMismatch {
                what: "snapshot parameters",
                expected: self.arch.param_count as usize,
                found: record.params.dim(),
            });
        }
        if !record.params.is_finite() {
            return Err(Error::NonFinitePayload { record: index });
        }
        if self.keys.contains(&(record.gan_index, record.epoch)) {
            return Err(Error::DuplicateRecord {
                gan_index: record.gan_index,
                epoch: record.epoch,
            });
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        self.arch.write(w, self.records.len() as u32)?;
        for r in &self.records {
            write_record(w, r)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(|_| Error::Truncated {
            what: "snapshot store header",
            expected: 28,
            found: 0,
        })?;
        if magic != STORE_MAGIC {
            return Err(Error::BadMagic {
                what: "snapshot store",
                expected: bin::magic_u32(STORE_MAGIC),
                found: bin::magic_u32(magic),
            });
        }
        let version = read_u32(r)?;
        if version != STORE_VERSION {
            return Err(Error::UnsupportedVersion {
                what: "snapshot store",
                expected: STORE_VERSION,
                found: version,
            });
        }
        let (latent_dim, hidden_dim, data_dim) = (read_u32(r)?, read_u32(r)?, read_u32(r)?);
        let param_count = read_u32(r)?;
        let record_count = read_u32(r)?;
        let arch = StoreArch::new(latent_dim, hidden_dim, data_dim)?;
        if arch.param_count != param_count {
            return Err(Error::DimensionMismatch {
                what: "store header param_count",
                expected: arch.param_count as usize,
                found: param_count as usize,
            });
        }

        let mut store = SnapshotStore::new(arch);
        for i in 0..record_count {
            let Ok(gan_index) = read_u32(r) else {
                return Err(Error::CountMismatch {
                    header: record_count as u64,
                    actual: i as u64,
                });
            };
            let (epoch, values) = match (read_u32(r), bin::read_f32s(r, param_count as usize)) {
                (Ok(e), Ok(v)) => (e, v),
                _ => {
                    return Err(Error::CountMismatch {
                        header: record_count as u64,
                        actual: i as u64,
                    })
                }
            };
            store.push(SnapshotRecord {
                gan_index,
                epoch,
                params: ParamVector::new(values),
            })?;
        }
        if !bin::at_eof(r)? {
            let mut rest = Vec::new();
            r.read_to_end(&mut rest)?;
            return Err(Error::CountMismatch {
                header: record_count as u64,
                actual: record_count as u64 + (1 + rest.len() as u64) / arch.record_bytes(),
            });
        }
        Ok(store)
    }
}

impl SnapshotSink for SnapshotStore {
    fn push(&mut self, record: SnapshotRecord) -> Result<()> {
        self.check(&record, self.records.len())?;
        self.keys.insert((record.gan_index, record.epoch));
        self.records.push(record);
        Ok(())
    }
}

impl Examples for SnapshotStore {
    fn len(&self) -> usize {
        self.records.len()
    }

    fn width(&self) -> usize {
        self.arch.param_count as usize
    }

    fn example(&self, i: usize) -> &[f32] {
        self.records[i].params.as_slice()
    }
}

fn write_record<W: Write>(w: &mut W, r: &SnapshotRecord) -> std::io::Result<()> {
    write_u32(w, r.gan_index)?;
    write_u32(w, r.epoch)?;
    bin::write_f32s(w, r.params.as_slice())
}

pub fn write_store(path: impl AsRef<Path>, store: &SnapshotStore) -> Result<()> {
    bin::write_atomic(path.as_ref(), |w| store.write_to(w))
}

pub fn read_store(path: impl AsRef<Path>) -> Result<SnapshotStore> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    SnapshotStore::read_from(&mut BufReader::new(file))
}

/// Streams records straight to disk for stores too large to assemble in
/// memory. The record count is fixed up front; the file only appears at
/// `path` once [`StoreWriter::finish`] sees exactly that many records.
pub struct StoreWriter {
    path: PathBuf,
    out: BufWriter<NamedTempFile>,
    arch: StoreArch,
    declared: u32,
    written: u32,
    keys: HashSet<(u32, u32)>,
}

impl StoreWriter {
    pub fn create(path: impl AsRef<Path>, arch: StoreArch, record_count: u32) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let tmp = bin::create_temp_for(&path)?;
        let mut out = BufWriter::new(tmp);
        arch.write(&mut out, record_count)
            .map_err(|e| Error::io(&path, e))?;
        Ok(StoreWriter {
            path,
            out,
            arch,
            declared: record_count,
            written: 0,
            keys: HashSet::new(),
        })
    }

    pub fn written(&self) -> u32 {
        self.written
    }

    pub fn finish(self) -> Result<()> {
        if self.written != self.declared {
            return Err(Error::CountMismatch {
                header: self.declared as u64,
                actual: self.written as u64,
            });
        }
        let tmp = self
            .out
            .into_inner()
            .map_err(|e| Error::io(&self.path, e.into_error()))?;
        bin::persist(tmp, &self.path)
    }
}

impl SnapshotSink for StoreWriter {
    fn push(&mut self, record: SnapshotRecord) -> Result<()> {
        if self.written == self.declared {
            return Err(Error::CountMismatch {
                header: self.declared as u64,
                actual: self.declared as u64 + 1,
            });
        }
        if record.params.dim() != self.arch.param_count as usize {
            return Err(Error::DimensionMismatch {
                what: "snapshot parameters",
                expected: self.arch.param_count as usize,
                found: record.params.dim(),
            });
        }
        if !record.params.is_finite() {
            return Err(Error::NonFinitePayload {
                record: self.written as usize,
            });
        }
        if !self.keys.insert((record.gan_index, record.epoch)) {
            return Err(Error::DuplicateRecord {
                gan_index: record.gan_index,
                epoch: record.epoch,
            });
        }
        write_record(&mut self.out, &record).map_err(|e| Error::io(&self.path, e))?;
        self.written += 1;
        Ok(())
    }
}
