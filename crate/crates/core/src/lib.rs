//! Haar and conditional Haar measures on the unitary and orthogonal groups,
//! built as products of independent random reflections, together with exact
//! product-of-independent-variables representations of characteristic
//! polynomial derivatives and the closed-form transforms that verify them.
//!
//! The crate is `no_std` and only needs `alloc`. Everything is a pure function
//! of its parameters and an [`RngStream`]; IO, parallel fan-out and reporting
//! live in the `condhaar` companion crate.
#![no_std]
#![cfg_attr(test, allow(unused_imports))]

extern crate alloc;

pub mod analytics;
pub mod charpoly;
pub mod distributions;
mod error;
pub mod linalg;
pub mod measures;
pub mod quadrature;
pub mod reflections;
mod rng;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use rng::RngStream;

/// Eigenvalues within this angular distance of 1 count toward a pinned multiplicity.
pub const DEFLATION_TOLERANCE: f64 = 1e-8;
