pub mod bench;
pub mod denoise;
pub mod detect;
pub mod factorize;
pub mod rerun;

use std::fs;
use std::path::Path;

use clap::Args;
use rnmf_core::eval::LambdaScale;
use rnmf_core::{FitConfig, RngSeed};

use crate::error::{CliError, Result};
use crate::kv::KvFile;
use crate::manifest::RunManifest;

/// Fit options shared by every subcommand that runs a solver.
#[derive(Args, Debug, Clone)]
pub struct FitFlags {
    /// Inner rank of the factorization
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Sparsity penalty weight (before any scale adaptation)
    #[arg(long, default_value_t = 0.04)]
    pub lambda: f64,
    /// Seed for every random draw in the run
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Iteration cap
    #[arg(long = "max-iters", default_value_t = 500)]
    pub max_iters: usize,
    /// Relative objective-change tolerance over a 5-iteration window
    #[arg(long = "tol", default_value_t = 1e-9)]
    pub tol: f64,
}

impl FitFlags {
    pub fn config(&self) -> FitConfig {
        FitConfig::default()
            .with_k(self.k)
            .with_lambda(self.lambda)
            .with_seed(RngSeed(self.seed))
            .with_max_iters(self.max_iters)
            .with_rel_tol(self.tol)
    }

    pub fn record(&self, manifest: &mut RunManifest) {
        manifest
            .push("k", self.k)
            .push("lambda", self.lambda)
            .push("seed", self.seed)
            .push("max_iters", self.max_iters)
            .push("tol", self.tol);
    }

    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        Ok(FitFlags {
            k: kv.parsed_or("k", 10)?,
            lambda: kv.parsed_or("lambda", 0.04)?,
            seed: kv.parsed_or("seed", 0)?,
            max_iters: kv.parsed_or("max_iters", 500)?,
            tol: kv.parsed_or("tol", 1e-9)?,
        })
    }
}

pub fn parse_lambda_scale(raw: &str) -> std::result::Result<LambdaScale, String> {
    match raw {
        "none" => Ok(LambdaScale::None),
        "8bit-linear" => Ok(LambdaScale::EightBitLinear),
        "8bit-squared" => Ok(LambdaScale::EightBitSquared),
        other => Err(format!(
            "unknown lambda scale `{other}` (expected none, 8bit-linear, or 8bit-squared)"
        )),
    }
}

pub fn ensure_out_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path.display().to_string(), e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path.display().to_string(), e))
}

/// `iteration,objective` CSV of an objective trace.
pub fn trace_csv(trace: &[f64]) -> String {
    let mut out = String::from("iteration,objective\n");
    for (i, value) in trace.iter().enumerate() {
        out.push_str(&format!("{i},{value}\n"));
    }
    out
}
