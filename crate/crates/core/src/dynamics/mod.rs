//! Negative-type kernels built from per-level embeddings, and the transfer
//! of almost invariant measures on a level to measures on the group.

mod kernel;
mod transfer;

pub use kernel::{negative_definite_check, truncated_kernel, KernelData, NegativeTypeReport};
pub use transfer::{
    default_delta, folner_windows, point_masses, roe_transfer, TransferParams, TransferResult, TRANSFER_BALL_CAP,
};
