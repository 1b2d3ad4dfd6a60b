//! Numerical laboratory for zero-number dynamics of one-dimensional
//! parabolic equations on fixed, moving and free-boundary domains.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod export;
pub mod expr;
pub mod harness;
pub mod model;
pub mod plot;
pub mod scenarios;
pub mod solver;
pub mod stefan;
pub mod suite;
pub mod transform;
pub mod tridiag;
pub mod zeros;

pub use error::{LabError, Result};
