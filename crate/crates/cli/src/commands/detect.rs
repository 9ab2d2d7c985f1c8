use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use rnmf_core::eval::{
    absolute_threshold, detect_mask, precision_recall, scaled_lambda, LambdaScale,
};
use rnmf_core::robust::robust_fit;

use super::{ensure_out_dir, parse_lambda_scale, write_text, FitFlags};
use crate::csv;
use crate::error::{CliError, Result};
use crate::kv::KvFile;
use crate::manifest::RunManifest;

#[derive(Args, Debug, Clone)]
pub struct DetectArgs {
    /// Input matrix (CSV)
    #[arg(long)]
    pub input: PathBuf,
    /// Ground-truth corruption mask (CSV of 0/1), enables scoring
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Detection threshold relative to the data maximum
    #[arg(long, default_value_t = 0.01)]
    pub threshold: f64,
    /// How the penalty weight adapts to the data scale
    #[arg(long = "lambda-scale", default_value = "8bit-linear", value_parser = parse_lambda_scale)]
    pub lambda_scale: LambdaScale,
    /// Output directory
    #[arg(long = "out-dir")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub fit: FitFlags,
}

pub fn from_manifest(kv: &KvFile, out_dir: PathBuf) -> Result<DetectArgs> {
    Ok(DetectArgs {
        input: PathBuf::from(kv.require("input")?),
        truth: kv.get("truth").map(PathBuf::from),
        threshold: kv.parsed_or("threshold", 0.01)?,
        lambda_scale: parse_lambda_scale(kv.get("lambda_scale").unwrap_or("8bit-linear"))
            .map_err(CliError::invalid)?,
        out_dir,
        fit: FitFlags::from_kv(kv)?,
    })
}

pub fn run(args: &DetectArgs) -> Result<()> {
    let start = Instant::now();
    let x = csv::read_matrix(&args.input)?;
    ensure_out_dir(&args.out_dir)?;

    let data_max = x.max_value();
    let lambda_effective = scaled_lambda(args.fit.lambda, data_max, args.lambda_scale);
    let mut config = args.fit.config().with_lambda(lambda_effective);
    config.detect_threshold = args.threshold;

    let model = robust_fit(&x, &config)?;
    let threshold_abs = absolute_threshold(&x, args.threshold);
    let detected = detect_mask(&model.e_pos, &model.e_neg, threshold_abs)?;
    csv::write_mask(args.out_dir.join("detected_mask.csv"), &detected)?;
    println!("detected={}", detected.count());

    if let Some(truth_path) = &args.truth {
        let truth = csv::read_mask(truth_path)?;
        if truth.shape() != (x.rows(), x.cols()) {
            return Err(CliError::invalid(format!(
                "truth mask is {}x{} but input is {}x{}",
                truth.rows(),
                truth.cols(),
                x.rows(),
                x.cols()
            )));
        }
        let scores = precision_recall(&detected, &truth)?;
        println!("precision={}", scores.precision);
        println!("recall={}", scores.recall);
        println!("vacuous_precision={}", scores.vacuous_precision);
        println!("vacuous_recall={}", scores.vacuous_recall);

        let mut report = String::from(
            "precision,recall,detected,truth_positives,vacuous_precision,vacuous_recall\n",
        );
        report.push_str(&format!(
            "{},{},{},{},{},{}\n",
            scores.precision,
            scores.recall,
            detected.count(),
            truth.count(),
            scores.vacuous_precision,
            scores.vacuous_recall
        ));
        write_text(&args.out_dir.join("detection_report.csv"), &report)?;
    }

    let mut manifest = RunManifest::new("detect");
    manifest.push("input", args.input.display());
    if let Some(truth) = &args.truth {
        manifest.push("truth", truth.display());
    }
    manifest.push("threshold", args.threshold);
    manifest.push("lambda_scale", args.lambda_scale.name());
    manifest.push("lambda_effective", lambda_effective);
    manifest.push("data_max", data_max);
    args.fit.record(&mut manifest);
    manifest.push("out_dir", args.out_dir.display());
    manifest.finish(&args.out_dir, start.elapsed().as_millis())?;
    Ok(())
}
