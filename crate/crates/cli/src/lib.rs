//! File formats, experiment sweeps, and the plumbing behind the `rnmf`
//! binary: CSV matrices, binary PGM images, patch extraction, key=value run
//! manifests, and the benchmark table writers.

pub mod commands;
pub mod csv;
pub mod error;
pub mod kv;
pub mod manifest;
pub mod patches;
pub mod pgm;
pub mod sweep;

pub use error::CliError;
