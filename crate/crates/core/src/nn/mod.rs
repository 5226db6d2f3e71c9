//! Dense MLP engine: forward and reverse passes, losses and the flat
//! parameter layout shared by snapshots and the meta-model.

mod loss;
mod matrix;
mod mlp;
mod params;

pub use loss::{bce, bce_const, BceOutput, CLAMP_EPS};
pub use matrix::{Matrix, Scalar};
pub use mlp::{
    param_count, Activation, GanArch, Gradients, Layer, Mlp, MlpSpec, Tape, LEAKY_SLOPE,
};
pub use params::{flatten, unflatten, ParamVector};
