use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use rnmf_core::nmf::nmf_fit;
use rnmf_core::robust::robust_fit;

use super::{ensure_out_dir, trace_csv, write_text, FitFlags};
use crate::csv;
use crate::error::{CliError, Result};
use crate::kv::KvFile;
use crate::manifest::RunManifest;

#[derive(Args, Debug, Clone)]
pub struct FactorizeArgs {
    /// Solver to run
    #[arg(long, value_parser = ["nmf", "robust"])]
    pub method: String,
    /// Input matrix (CSV)
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory
    #[arg(long = "out-dir")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub fit: FitFlags,
}

pub fn from_manifest(kv: &KvFile, out_dir: PathBuf) -> Result<FactorizeArgs> {
    Ok(FactorizeArgs {
        method: kv.require("method")?.to_string(),
        input: PathBuf::from(kv.require("input")?),
        out_dir,
        fit: FitFlags::from_kv(kv)?,
    })
}

pub fn run(args: &FactorizeArgs) -> Result<()> {
    let start = Instant::now();
    let x = csv::read_matrix(&args.input)?;
    ensure_out_dir(&args.out_dir)?;
    let config = args.fit.config();

    let mut metadata = KvFile::new();
    metadata.push("method", &args.method);
    metadata.push("k", config.k);
    metadata.push("lambda", config.lambda);

    let trace = match args.method.as_str() {
        "nmf" => {
            let fit = nmf_fit(&x, &config)?;
            csv::write_matrix(args.out_dir.join("U.csv"), &fit.u)?;
            csv::write_matrix(args.out_dir.join("V.csv"), &fit.v)?;
            metadata.push("iterations_run", fit.objective_trace.len() - 1);
            metadata.push("final_objective", fit.final_objective());
            fit.objective_trace
        }
        "robust" => {
            let model = robust_fit(&x, &config)?;
            csv::write_matrix(args.out_dir.join("U.csv"), &model.u)?;
            csv::write_matrix(args.out_dir.join("V.csv"), &model.v)?;
            csv::write_matrix(args.out_dir.join("Ep.csv"), &model.e_pos)?;
            csv::write_matrix(args.out_dir.join("En.csv"), &model.e_neg)?;
            metadata.push("iterations_run", model.iterations_run);
            metadata.push("final_objective", model.final_objective());
            model.objective_trace
        }
        other => return Err(CliError::invalid(format!("unknown method `{other}`"))),
    };

    metadata.write(args.out_dir.join("metadata.txt"))?;
    write_text(
        &args.out_dir.join("objective_trace.csv"),
        &trace_csv(&trace),
    )?;

    let mut manifest = RunManifest::new("factorize");
    manifest.push("method", &args.method);
    manifest.push("input", args.input.display());
    args.fit.record(&mut manifest);
    manifest.push("out_dir", args.out_dir.display());
    manifest.finish(&args.out_dir, start.elapsed().as_millis())?;

    println!(
        "wrote factors for method={} to {}",
        args.method,
        args.out_dir.display()
    );
    Ok(())
}
