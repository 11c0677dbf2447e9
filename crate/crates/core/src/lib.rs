// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod actions;
pub mod dynamics;
pub mod embed;
pub mod error;
pub mod harness;
pub mod spaces;
pub mod spectral;
pub mod warp;

pub use error::{Error, Result};
