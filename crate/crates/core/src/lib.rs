//! Radial finite-volume experiments for elliptic problems with a degenerate
//! coercivity and a singular lower-order term.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exponents;
pub mod harness;
pub mod mesh;
pub mod problem;
pub mod regularity;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
