use std::fmt;
use std::path::PathBuf;

/// Which half of an adversarial pair a failure belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Network {
    Generator,
    Discriminator,
}

impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Network::Generator => f.write_str("generator"),
            Network::Discriminator => f.write_str("discriminator"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {0}")]
    NonFiniteInput(&'static str),

    #[error("non-finite gradient in {} (tensor {tensor}, element {index})", network.map_or("network".to_string(), |n| n.to_string()))]
    NonFiniteGradient {
        network: Option<Network>,
        tensor: usize,
        index: usize,
    },

    #[error("non-finite {network} loss at epoch {epoch}")]
    NonFiniteLoss { network: Network, epoch: usize },

    #[error("empty batch")]
    EmptyBatch,

    #[error("empty dataset")]
    EmptyDataset,

    #[error("snapshot store has no records")]
    EmptyStore,

    #[error("bad magic in {what}: expected {expected:#010x}, found {found:#010x}")]
    BadMagic {
        what: &'static str,
        expected: u32,
        found: u32,
    },

    #[error("unsupported {what} version {found} (expected {expected})")]
    UnsupportedVersion {
        what: &'static str,
        expected: u32,
        found: u32,
    },

    #[error("truncated {what}: expected {expected} bytes, found {found}")]
    Truncated {
        what: &'static str,
        expected: u64,
        found: u64,
    },

    #[error("IDX images must be 28x28, found {rows}x{cols}")]
    WrongImageDims { rows: u32, cols: u32 },

    #[error("record count mismatch: header says {header}, payload holds {actual}")]
    CountMismatch { header: u64, actual: u64 },

    #[error("duplicate snapshot record (gan {gan_index}, epoch {epoch})")]
    DuplicateRecord { gan_index: u32, epoch: u32 },

    #[error("non-finite parameter in record {record}")]
    NonFinitePayload { record: usize },

    #[error("no snapshot for gan {gan_index} at epoch {epoch}")]
    MissingRecord { gan_index: u32, epoch: u32 },

    #[error("latent sweep needs a 1-dimensional latent space, model has {0}")]
    SweepNeeds1d(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("gan {gan_index} failed: {source}")]
    GanFailed {
        gan_index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Stream(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by NaN/Inf showing up during training.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NonFiniteGradient { .. } | Error::NonFiniteLoss { .. } => true,
            Error::GanFailed { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
