//! ρ-numerical radii, ρ-kernels and Harnack equivalence for truncated shifts.

// `!(x >= lo)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod determinants;
pub mod error;
pub mod explore;
pub mod harnack;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod radius;
pub mod shifts;
pub mod structure;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::CMatrix;
