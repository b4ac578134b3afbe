//! Dense linear algebra, seeded randomness, initialization and a
//! finite-difference gradient oracle.
//!
//! Everything here works on 64-bit floats in row-major, batch-major layout
//! (one sample per row).

mod gradcheck;
mod init;
mod matrix;
mod rng;

pub use gradcheck::{finite_diff_grad, relative_error};
pub use init::{init_glorot_uniform, init_uniform};
pub use matrix::{concat_features, elementwise, relu, relu_grad_mask, ElementwiseOp, Matrix};
pub use rng::Rng;
