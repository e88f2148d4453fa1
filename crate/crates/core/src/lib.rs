//! Directional outlyingness for multivariate functional data.
//!
//! Curves sampled on a shared grid are compared against labelled reference
//! groups through their point-wise directional outlyingness. The crate
//! provides the scalar summaries (`MO`, `VO`, `FO`), the outlyingness
//! matrices (`FOM`, `VOM`), the two shape classifiers built on them (robust
//! Mahalanobis distance of `(MO, VO)` under an MCD fit, and the Frobenius
//! norm of `VOM`), four integrated/random-projection depth baselines, and
//! seeded generators for the benchmark curve families.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the
//! experiment runner and the command-line tool live in the `dirout` crate.

#![no_std]
// NaN must fail range checks, so `!(x > 0.0)` is deliberate; index loops
// mirror the matrix algebra.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classify;
pub mod curves;
mod error;
pub mod linalg;
pub mod outlyingness;
pub mod pointwise;
pub mod robust;
pub mod seed;
pub mod simulate;
pub mod special;

pub use classify::{Method, Orientation, Prediction, TrainedModel};
pub use curves::{Curve, FunctionalGroup, Grid};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use outlyingness::OutlyingnessSummary;
pub use robust::McdFit;
