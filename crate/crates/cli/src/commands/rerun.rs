use std::path::PathBuf;

use clap::Args;

use super::{bench, denoise, detect, factorize};
use crate::error::{CliError, Result};
use crate::manifest::read_manifest;

#[derive(Args, Debug, Clone)]
pub struct RerunArgs {
    /// Manifest written by a previous run
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output directory for the replayed run
    #[arg(long = "out-dir")]
    pub out_dir: PathBuf,
}

pub fn run(args: &RerunArgs) -> Result<()> {
    let kv = read_manifest(&args.manifest)?;
    let subcommand = kv.require("subcommand")?;
    match subcommand {
        "factorize" => factorize::run(&factorize::from_manifest(&kv, args.out_dir.clone())?),
        "detect" => detect::run(&detect::from_manifest(&kv, args.out_dir.clone())?),
        "denoise" => denoise::run(&denoise::from_manifest(&kv, args.out_dir.clone())?),
        "bench" => {
            let (resolved, out_dir) = bench::from_manifest(&kv, args.out_dir.clone())?;
            bench::run_resolved(&resolved, &out_dir)
        }
        other => Err(CliError::invalid(format!(
            "manifest names unknown subcommand `{other}`"
        ))),
    }
}
