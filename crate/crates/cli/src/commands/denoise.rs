use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use rnmf_core::eval::{CorruptionMode, CorruptionSpec};
use rnmf_core::nmf::nmf_fit;
use rnmf_core::rng::{derive_seed, RngSeed};
use rnmf_core::robust::robust_fit;
use rnmf_core::wnmf::{mask_from_noise, wnmf_fit};
use rnmf_core::DenseMatrix;

use super::{ensure_out_dir, FitFlags};
use crate::error::{CliError, Result};
use crate::kv::KvFile;
use crate::manifest::RunManifest;
use crate::patches::{extract_patches, reassemble_with};
use crate::pgm::{read_pgm, write_pgm, GrayImage};

#[derive(Args, Debug, Clone)]
pub struct DenoiseArgs {
    /// Input image (binary PGM)
    #[arg(long)]
    pub input: PathBuf,
    /// Reconstruction method
    #[arg(long, value_parser = ["nmf", "robust", "robust+wnmf"])]
    pub method: String,
    /// Patch edge length in pixels
    #[arg(long = "patch-size", default_value_t = 8)]
    pub patch_size: usize,
    /// Self-inject salt-and-pepper noise at this density before denoising
    #[arg(long)]
    pub density: Option<f64>,
    /// Detection threshold relative to the patch-matrix maximum
    /// (robust+wnmf only)
    #[arg(long, default_value_t = 0.01)]
    pub threshold: f64,
    /// Output directory
    #[arg(long = "out-dir")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub fit: FitFlags,
}

pub fn from_manifest(kv: &KvFile, out_dir: PathBuf) -> Result<DenoiseArgs> {
    Ok(DenoiseArgs {
        input: PathBuf::from(kv.require("input")?),
        method: kv.require("method")?.to_string(),
        patch_size: kv.parsed_or("patch_size", 8)?,
        density: kv.parsed("density")?,
        threshold: kv.parsed_or("threshold", 0.01)?,
        out_dir,
        fit: FitFlags::from_kv(kv)?,
    })
}

fn mean_squared_error(a: &GrayImage, b: &GrayImage) -> f64 {
    let diff: f64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum();
    diff / a.pixels().len() as f64
}

pub fn run(args: &DenoiseArgs) -> Result<()> {
    let start = Instant::now();
    let original = read_pgm(&args.input)?;
    ensure_out_dir(&args.out_dir)?;

    let work = match args.density {
        Some(density) if density > 0.0 => {
            let spec = CorruptionSpec {
                mode: CorruptionMode::SaltPepper {
                    density,
                    salt_value: 255.0,
                },
                seed: derive_seed(RngSeed(args.fit.seed), 7),
            };
            let (noisy, _) = rnmf_core::eval::inject_corruption(&original.to_matrix(), &spec)?;
            let noisy_img = GrayImage::from_matrix_clamped(&noisy);
            write_pgm(args.out_dir.join("noisy.pgm"), &noisy_img)?;
            noisy_img
        }
        _ => original.clone(),
    };

    let grid = extract_patches(&work, args.patch_size)?;
    let x = &grid.columns;
    let config = args.fit.config();

    let reconstruction: DenseMatrix = match args.method.as_str() {
        "nmf" => nmf_fit(x, &config)?.product(),
        "robust" => robust_fit(x, &config)?.product(),
        "robust+wnmf" => {
            let model = robust_fit(x, &config)?;
            let threshold_abs = args.threshold * x.max_value();
            let mask = mask_from_noise(&model.e_pos, &model.e_neg, threshold_abs)?;
            let dead = mask.unconstrained_columns();
            if !dead.is_empty() {
                eprintln!(
                    "warning: {} patch column(s) fully masked; left at initialization",
                    dead.len()
                );
            }
            wnmf_fit(x, &mask, &config)?.product()
        }
        other => return Err(CliError::invalid(format!("unknown method `{other}`"))),
    };

    let denoised = reassemble_with(&grid, &reconstruction)?;
    write_pgm(args.out_dir.join("denoised.pgm"), &denoised)?;

    if args.density.unwrap_or(0.0) > 0.0 {
        println!("mse_noisy={}", mean_squared_error(&original, &work));
        println!("mse_denoised={}", mean_squared_error(&original, &denoised));
    }

    let mut manifest = RunManifest::new("denoise");
    manifest.push("input", args.input.display());
    manifest.push("method", &args.method);
    manifest.push("patch_size", args.patch_size);
    if let Some(density) = args.density {
        manifest.push("density", density);
    }
    manifest.push("threshold", args.threshold);
    args.fit.record(&mut manifest);
    manifest.push("out_dir", args.out_dir.display());
    manifest.finish(&args.out_dir, start.elapsed().as_millis())?;
    Ok(())
}
