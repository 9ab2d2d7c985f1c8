use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use rnmf_core::eval::Scenario;

use super::{ensure_out_dir, parse_lambda_scale, write_text};
use crate::error::{CliError, Result};
use crate::kv::KvFile;
use crate::manifest::RunManifest;
use crate::sweep::{
    detection_csv, msre_csv, run_detection_sweep, run_msre_comparison, MsreConfig, SweepAxis,
    SweepConfig,
};

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    /// Benchmark suite to run
    #[arg(long, value_parser = ["detect-sweep", "msre"])]
    pub suite: String,
    /// key=value config file
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory
    #[arg(long = "out-dir")]
    pub out_dir: PathBuf,
}

/// Fully resolved suite parameters; reruns rebuild this from the manifest so
/// they do not depend on the original config file still existing.
#[derive(Debug, Clone)]
pub struct ResolvedBench {
    pub suite: String,
    pub scenario: Scenario,
    pub runs: usize,
    pub base_seed: u64,
    pub axis: Option<SweepAxis>,
}

fn parse_list<T: std::str::FromStr>(raw: &str, key: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::invalid(format!("bad value in `{key}`: `{s}`")))
        })
        .collect()
}

fn resolve(kv: &KvFile, suite: &str) -> Result<ResolvedBench> {
    let defaults = Scenario::default();
    let scenario = Scenario {
        m: kv.parsed_or("m", defaults.m)?,
        n: kv.parsed_or("n", defaults.n)?,
        rank: kv.parsed_or("rank", defaults.rank)?,
        corruption_fraction: kv.parsed_or("corruption_fraction", defaults.corruption_fraction)?,
        value_factor: kv.parsed_or("value_factor", defaults.value_factor)?,
        k: kv.parsed_or("k", defaults.k)?,
        lambda_base: kv.parsed_or("lambda", defaults.lambda_base)?,
        lambda_scale: parse_lambda_scale(kv.get("lambda_scale").unwrap_or("8bit-linear"))
            .map_err(CliError::invalid)?,
        max_iters: kv.parsed_or("max_iters", defaults.max_iters)?,
        rel_tol: kv.parsed_or("rel_tol", defaults.rel_tol)?,
        detect_threshold: kv.parsed_or("detect_threshold", defaults.detect_threshold)?,
    };
    let runs = kv.parsed_or("runs", 10usize)?;
    let base_seed = kv.parsed_or("base_seed", 1u64)?;

    let axis = if suite == "detect-sweep" {
        let param = kv.get("sweep").unwrap_or("lambda");
        let values = kv.require("values")?;
        Some(match param {
            "lambda" => SweepAxis::Lambda(parse_list(values, "values")?),
            "n_samples" => SweepAxis::NSamples(parse_list(values, "values")?),
            other => {
                return Err(CliError::invalid(format!(
                    "unknown sweep parameter `{other}` (expected lambda or n_samples)"
                )))
            }
        })
    } else {
        None
    };

    Ok(ResolvedBench {
        suite: suite.to_string(),
        scenario,
        runs,
        base_seed,
        axis,
    })
}

fn echo(resolved: &ResolvedBench, manifest: &mut RunManifest) {
    let s = &resolved.scenario;
    manifest.push("cfg_m", s.m);
    manifest.push("cfg_n", s.n);
    manifest.push("cfg_rank", s.rank);
    manifest.push("cfg_corruption_fraction", s.corruption_fraction);
    manifest.push("cfg_value_factor", s.value_factor);
    manifest.push("cfg_k", s.k);
    manifest.push("cfg_lambda", s.lambda_base);
    manifest.push("cfg_lambda_scale", s.lambda_scale.name());
    manifest.push("cfg_max_iters", s.max_iters);
    manifest.push("cfg_rel_tol", s.rel_tol);
    manifest.push("cfg_detect_threshold", s.detect_threshold);
    manifest.push("cfg_runs", resolved.runs);
    manifest.push("cfg_base_seed", resolved.base_seed);
    if let Some(axis) = &resolved.axis {
        manifest.push("cfg_sweep", axis.param_name());
        let values = match axis {
            SweepAxis::Lambda(v) => v
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(","),
            SweepAxis::NSamples(v) => v
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(","),
        };
        manifest.push("cfg_values", values);
    }
}

pub fn from_manifest(kv: &KvFile, out_dir: PathBuf) -> Result<(ResolvedBench, PathBuf)> {
    // The manifest echoes the resolved config under cfg_ keys; strip the
    // prefix and resolve again from those.
    let mut stripped = KvFile::new();
    for (key, value) in kv.entries() {
        if let Some(bare) = key.strip_prefix("cfg_") {
            stripped.push(bare, value);
        }
    }
    let suite = kv.require("suite")?;
    Ok((resolve(&stripped, suite)?, out_dir))
}

pub fn run(args: &BenchArgs) -> Result<()> {
    let kv = KvFile::read(&args.config)?;
    let resolved = resolve(&kv, &args.suite)?;
    run_resolved(&resolved, &args.out_dir)
}

pub fn run_resolved(resolved: &ResolvedBench, out_dir: &Path) -> Result<()> {
    let start = Instant::now();
    ensure_out_dir(out_dir)?;

    let table = match resolved.suite.as_str() {
        "detect-sweep" => {
            let config = SweepConfig {
                scenario: resolved.scenario,
                axis: resolved
                    .axis
                    .clone()
                    .ok_or_else(|| CliError::invalid("detect-sweep needs a sweep axis"))?,
                runs: resolved.runs,
                base_seed: resolved.base_seed,
            };
            let rows = run_detection_sweep(&config);
            let csv = detection_csv(&rows);
            write_text(&out_dir.join("detection_sweep.csv"), &csv)?;
            "detection_sweep.csv"
        }
        "msre" => {
            let config = MsreConfig {
                scenario: resolved.scenario,
                runs: resolved.runs,
                base_seed: resolved.base_seed,
            };
            let rows = run_msre_comparison(&config);
            let csv = msre_csv(&rows);
            write_text(&out_dir.join("msre.csv"), &csv)?;
            "msre.csv"
        }
        other => return Err(CliError::invalid(format!("unknown suite `{other}`"))),
    };

    let mut manifest = RunManifest::new("bench");
    manifest.push("suite", &resolved.suite);
    echo(resolved, &mut manifest);
    manifest.push("table", table);
    manifest.push("out_dir", out_dir.display());
    manifest.finish(out_dir, start.elapsed().as_millis())?;

    println!("wrote {table} to {}", out_dir.display());
    Ok(())
}
