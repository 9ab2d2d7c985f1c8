//! Nonnegative matrix factorization with explicit estimation of sparse outliers.
//!
//! The observed data `X` is modeled as `X ≈ UV + E` where `U`, `V` are
//! nonnegative low-rank factors and `E` is a sparse outlier matrix split into
//! nonnegative parts `E = E⁺ − E⁻`. Everything is fit by deterministic
//! multiplicative updates, so a fixed seed reproduces a run bit for bit.
//!
//! Modules:
//! - [`matrix`]: dense row-major matrices and the small kernel set used everywhere.
//! - [`rng`]: the seeded generator behind every random draw in this crate.
//! - [`nmf`]: baseline multiplicative-update factorization.
//! - [`augmented`]: the stacked least-squares system used by the robust solver,
//!   with a dense reference path and a block-structured fast path.
//! - [`robust`]: the robust factorization itself.
//! - [`theory`]: executable checks for the majorization argument that backs the
//!   robust update (surrogate function, diagonal majorizer, curvature form).
//! - [`wnmf`]: weighted factorization that ignores masked entries.
//! - [`eval`]: corruption injection, detection scoring, and reconstruction-error
//!   experiments.
//!
//! The crate is `no_std`-compatible (requires `alloc`); disable the default
//! `std` feature for embedded or wasm use.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod augmented;
pub mod config;
pub mod error;
pub mod eval;
pub mod matrix;
pub mod nmf;
pub mod rng;
pub mod robust;
pub mod theory;
pub mod wnmf;

pub use config::FitConfig;
pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use nmf::{nmf_fit, Factorization};
pub use rng::RngSeed;
pub use robust::{robust_fit, RobustModel};
pub use wnmf::wnmf_fit;
