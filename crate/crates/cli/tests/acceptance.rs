//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured numbers. Run with
//! `cargo test -p rnmf-cli --test acceptance`.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rnmf_core::augmented::{abs_gram, build_augmented, structured, update_stacked};
use rnmf_core::eval::{detection_experiment, msre_experiment, LambdaScale, Scenario};
use rnmf_core::nmf::nmf_fit;
use rnmf_core::rng::{RngSeed, Xoshiro256PlusPlus};
use rnmf_core::robust::{robust_fit_with, robust_objective, update_u, NoiseInit, RobustOptions};
use rnmf_core::theory::{
    curvature_form, curvature_form_expanded, gradient, objective, surrogate,
    thresholded_step_is_descent, ColumnProblem,
};
use rnmf_core::wnmf::{wnmf_fit, WeightMask};
use rnmf_core::{DenseMatrix, FitConfig};

fn random(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    DenseMatrix::random_uniform(rows, cols, RngSeed(seed), 1.0)
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        for &index in &order[i..=j] {
            out[index] = avg_rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation; 0 when either side has no variation.
fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let rx = ranks(x);
    let ry = ranks(y);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    if vx == 0.0 || vy == 0.0 {
        0.0
    } else {
        cov / (vx * vy).sqrt()
    }
}

// Criterion 1: with the feasibility projection disabled, both update rules
// decrease the robust objective on every random instance.
#[test]
fn criterion_01_descent_of_both_updates() {
    let start = Instant::now();
    let mut checked = 0;
    for seed in 0..100u64 {
        let m = 2 + (seed % 19) as usize;
        let n = 2 + (seed % 14) as usize;
        let k = 1 + (seed % 4) as usize;
        let lambda = [0.01, 0.04, 1.0][(seed % 3) as usize];

        let x = random(m, n, seed).scale(2.0);
        let u = random(m, k, seed ^ 0xA1);
        let v = random(k, n, seed ^ 0xA2);
        // E <= X keeps the instance feasible for the basis update.
        let e_pos = x.hadamard(&random(m, n, seed ^ 0xA3)).unwrap();
        let e_neg = random(m, n, seed ^ 0xA4).scale(0.4);

        let before = robust_objective(&x, &u, &v, &e_pos, &e_neg, lambda).unwrap();
        let slack = 1e-10 * (1.0 + before);

        let stacked = DenseMatrix::vstack(&[&v, &e_pos, &e_neg]).unwrap();
        let next = structured::update_stacked(&x, &u, lambda, &stacked, 1e-12).unwrap();
        let after_stacked = robust_objective(
            &x,
            &u,
            &next.row_block(0, k),
            &next.row_block(k, m),
            &next.row_block(k + m, m),
            lambda,
        )
        .unwrap();
        assert!(
            after_stacked <= before + slack,
            "stacked ascent at seed {seed}: {before} -> {after_stacked}"
        );

        let e = e_pos.sub(&e_neg).unwrap();
        let u_next = update_u(&x, &e, &u, &v, 1e-12).unwrap();
        let after_u = robust_objective(&x, &u_next, &v, &e_pos, &e_neg, lambda).unwrap();
        assert!(
            after_u <= before + slack,
            "basis ascent at seed {seed}: {before} -> {after_u}"
        );
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}");
    println!("criterion 1 PASS: descent held on {checked} instances in {elapsed:?}");
}

// Criterion 2: the surrogate machinery behaves as the analysis promises.
#[test]
fn criterion_02_auxiliary_function_suite() {
    let start = Instant::now();

    fn problem(seed: u64, rows: usize, cols: usize) -> ColumnProblem {
        let mut rng = Xoshiro256PlusPlus::new(RngSeed(seed));
        let design = DenseMatrix::from_fn(rows, cols, |_, _| rng.next_unit() * 2.0 - 1.0);
        let target: Vec<f64> = (0..rows).map(|_| rng.next_unit() * 2.0 - 1.0).collect();
        let anchor: Vec<f64> = (0..cols).map(|_| 0.05 + rng.next_unit()).collect();
        ColumnProblem::new(target, design, anchor).unwrap()
    }

    // Z(v, v) == F(v).
    for seed in 0..50u64 {
        let p = problem(seed, 6, 4);
        let v: Vec<f64> = {
            let mut rng = Xoshiro256PlusPlus::new(RngSeed(seed ^ 0xB1));
            (0..4).map(|_| 0.05 + rng.next_unit()).collect()
        };
        let z = surrogate(&p, &v, &v).unwrap();
        let f = objective(&p, &v).unwrap();
        assert!((z - f).abs() <= 1e-12 * (1.0 + f.abs()), "{z} vs {f}");
    }

    // Z(v, anchor) >= F(v) over 200 random pairs.
    for seed in 0..200u64 {
        let p = problem(seed, 6, 5);
        let v: Vec<f64> = {
            let mut rng = Xoshiro256PlusPlus::new(RngSeed(seed ^ 0xB2));
            (0..5).map(|_| rng.next_unit() * 2.0).collect()
        };
        let f = objective(&p, &v).unwrap();
        let z = surrogate(&p, &v, &p.anchor).unwrap();
        assert!(z >= f - 1e-10 * (1.0 + f.abs()), "seed {seed}: Z={z} F={f}");
    }

    // Curvature form nonnegative and equal to its sum-of-squares expansion
    // over 500 random triples.
    for seed in 0..500u64 {
        let p = problem(seed, 5, 4);
        let mut rng = Xoshiro256PlusPlus::new(RngSeed(seed ^ 0xB3));
        let anchor: Vec<f64> = (0..4).map(|_| rng.next_unit()).collect();
        let mu: Vec<f64> = (0..4).map(|_| rng.next_unit() * 2.0 - 1.0).collect();
        let direct = curvature_form(&p, &anchor, &mu).unwrap();
        let expanded = curvature_form_expanded(&p, &anchor, &mu).unwrap();
        assert!(direct >= -1e-10, "seed {seed}: {direct}");
        assert!(
            (direct - expanded).abs() <= 1e-9 * (1.0 + expanded.abs()),
            "seed {seed}: {direct} vs {expanded}"
        );
    }

    // Thresholded surrogate step descends on 200 instances.
    for seed in 0..200u64 {
        let p = problem(seed, 6, 5);
        assert!(
            thresholded_step_is_descent(&p, &p.anchor).unwrap(),
            "seed {seed}"
        );
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}");
    println!(
        "criterion 2 PASS: surrogate identities, PSD form, and thresholded descent in {elapsed:?}"
    );
}

// Criterion 3: analytic gradient vs central finite differences.
#[test]
fn criterion_03_gradient_check() {
    for seed in 0..50u64 {
        let mut rng = Xoshiro256PlusPlus::new(RngSeed(seed));
        let design = DenseMatrix::from_fn(6, 4, |_, _| rng.next_unit() * 2.0 - 1.0);
        let target: Vec<f64> = (0..6).map(|_| rng.next_unit() * 2.0 - 1.0).collect();
        let anchor: Vec<f64> = (0..4).map(|_| 0.1 + rng.next_unit()).collect();
        let p = ColumnProblem::new(target, design, anchor).unwrap();
        let v: Vec<f64> = (0..4).map(|_| rng.next_unit() * 2.0).collect();

        let grad = gradient(&p, &v).unwrap();
        let h = 1e-6;
        for i in 0..v.len() {
            let mut plus = v.clone();
            plus[i] += h;
            let mut minus = v.clone();
            minus[i] -= h;
            let fd = (objective(&p, &plus).unwrap() - objective(&p, &minus).unwrap()) / (2.0 * h);
            let scale = grad[i].abs().max(fd.abs()).max(1e-6);
            assert!(
                (grad[i] - fd).abs() / scale < 1e-5,
                "seed {seed} coord {i}: {} vs {fd}",
                grad[i]
            );
        }
    }
    println!("criterion 3 PASS: gradient matches central differences on 50 instances");
}

// Criterion 4: the robust and weighted solvers reduce to the baseline.
#[test]
fn criterion_04_reduction_checks() {
    // (a) Noise pinned at zero reproduces the baseline trajectory.
    let x = random(12, 9, 41).scale(2.0);
    let config = FitConfig::default()
        .with_k(3)
        .with_max_iters(50)
        .with_rel_tol(0.0)
        .with_seed(7u64);
    let pinned = robust_fit_with(
        &x,
        &config,
        &RobustOptions {
            noise_init: NoiseInit::Zero,
            ..RobustOptions::default()
        },
    )
    .unwrap();
    let baseline = nmf_fit(&x, &config).unwrap();
    assert_eq!(pinned.iterations_run, 50);
    for (a, b) in pinned.u.data().iter().zip(baseline.u.data()) {
        assert!((a - b).abs() <= 1e-8 * (1.0 + b.abs()), "U: {a} vs {b}");
    }
    for (a, b) in pinned.v.data().iter().zip(baseline.v.data()) {
        assert!((a - b).abs() <= 1e-8 * (1.0 + b.abs()), "V: {a} vs {b}");
    }

    // (b) All-ones weight mask reproduces the baseline bit for bit.
    let mask = WeightMask::all_ones(12, 9);
    let weighted = wnmf_fit(&x, &mask, &config).unwrap();
    assert_eq!(weighted.u, baseline.u);
    assert_eq!(weighted.v, baseline.v);
    assert_eq!(weighted.objective_trace, baseline.objective_trace);

    // (c) Zeroing the negative identity block leaves a nonnegative design,
    // and the thresholded rule collapses to the plain multiplicative form.
    let (m, k, n) = (6, 2, 5);
    let xs = random(m, n, 43);
    let u = random(m, k, 44);
    let stacked = random(k + 2 * m, n, 45);
    let sys = build_augmented(&xs, &u, 0.04).unwrap();
    let mut u_nonneg = sys.u_aug.clone();
    for r in 0..m {
        for c in (k + m)..(k + 2 * m) {
            u_nonneg.set(r, c, 0.0);
        }
    }
    let s = abs_gram(&u_nonneg);
    let epsilon = 1e-12;
    let ours = update_stacked(&sys.x_aug, &u_nonneg, &stacked, &s, epsilon).unwrap();
    let ut = u_nonneg.transpose();
    let numer = ut.matmul(&sys.x_aug).unwrap();
    let denom = ut.matmul(&u_nonneg.matmul(&stacked).unwrap()).unwrap();
    for i in 0..ours.rows() {
        for j in 0..ours.cols() {
            let plain_rule = stacked.get(i, j) * numer.get(i, j) / (denom.get(i, j) + epsilon);
            let got = ours.get(i, j);
            assert!(
                (got - plain_rule).abs() <= 1e-10 * (1.0 + plain_rule.abs()),
                "({i},{j}): {got} vs {plain_rule}"
            );
        }
    }

    println!("criterion 4 PASS: pinned-noise, all-ones-mask, and nonnegative-design reductions");
}

// Criterion 5: the block-structured path equals the dense reference and is
// measurably faster at m = 256.
#[test]
fn criterion_05_structured_vs_dense() {
    for seed in 0..25u64 {
        let m = 2 + (seed % 63) as usize;
        let k = 1 + (seed % 8) as usize;
        let n = 1 + (seed % 32) as usize;
        let lambda = [0.0, 0.04, 1.0, 2.5][(seed % 4) as usize];
        let x = random(m, n, seed);
        let u = random(m, k, seed ^ 0xC1);
        let stacked = random(k + 2 * m, n, seed ^ 0xC2);

        let sys = build_augmented(&x, &u, lambda).unwrap();
        let s = abs_gram(&sys.u_aug);

        let dense_s_w = s.matmul(&stacked).unwrap();
        let fast_s_w = structured::abs_gram_times(m, &u, lambda, &stacked).unwrap();
        for (a, b) in dense_s_w.data().iter().zip(fast_s_w.data()) {
            assert!(
                (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1.0),
                "S-product mismatch at seed {seed}: {a} vs {b}"
            );
        }

        let dense = update_stacked(&sys.x_aug, &sys.u_aug, &stacked, &s, 1e-12).unwrap();
        let fast = structured::update_stacked(&x, &u, lambda, &stacked, 1e-12).unwrap();
        for (a, b) in dense.data().iter().zip(fast.data()) {
            assert!(
                (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1.0),
                "update mismatch at seed {seed}: {a} vs {b}"
            );
        }
    }

    // Timing at m = 256 (k = 8, n = 32), median of 5 runs each.
    let (m, k, n) = (256, 8, 32);
    let x = random(m, n, 90);
    let u = random(m, k, 91);
    let stacked = random(k + 2 * m, n, 92);
    let time_median = |f: &mut dyn FnMut()| {
        let mut times: Vec<f64> = (0..5)
            .map(|_| {
                let t = Instant::now();
                f();
                t.elapsed().as_secs_f64()
            })
            .collect();
        times.sort_by(f64::total_cmp);
        times[2]
    };
    let dense_time = time_median(&mut || {
        let sys = build_augmented(&x, &u, 0.04).unwrap();
        let s = abs_gram(&sys.u_aug);
        let _ = update_stacked(&sys.x_aug, &sys.u_aug, &stacked, &s, 1e-12).unwrap();
    });
    let fast_time = time_median(&mut || {
        let _ = structured::update_stacked(&x, &u, 0.04, &stacked, 1e-12).unwrap();
    });
    let ratio = dense_time / fast_time;
    assert!(
        dense_time > fast_time,
        "structured path not faster: dense {dense_time:.6}s vs structured {fast_time:.6}s"
    );
    println!(
        "criterion 5 PASS: paths agree; at m=256 dense/structured wall-clock ratio = {ratio:.1} \
         ({dense_time:.4}s vs {fast_time:.4}s)"
    );
}

// Criterion 6: large-additive-noise detection on the synthetic stand-in.
#[test]
fn criterion_06_detection_on_synthetic_data() {
    let start = Instant::now();
    let scenario = Scenario::default();
    assert_eq!(scenario.lambda_scale, LambdaScale::EightBitLinear);
    let mut precisions = Vec::new();
    let mut recalls = Vec::new();
    for seed in 1..=10u64 {
        let outcome = detection_experiment(&scenario, RngSeed(seed)).unwrap();
        precisions.push(outcome.report.scores.precision);
        recalls.push(outcome.report.scores.recall);
    }
    let med_p = median(&precisions);
    let med_r = median(&recalls);
    let elapsed = start.elapsed();
    assert!(med_p >= 0.90, "median precision {med_p}");
    assert!(med_r >= 0.50, "median recall {med_r}");
    assert!(elapsed.as_secs() < 120, "took {elapsed:?}");
    println!(
        "criterion 6 PASS: median precision {med_p:.3}, median recall {med_r:.3} over 10 seeds in {elapsed:?}"
    );
}

// Criterion 7: larger lambda trades recall for precision.
#[test]
fn criterion_07_lambda_trend() {
    let lambdas = [0.02, 0.04, 0.08, 0.16];
    let mut med_precision = Vec::new();
    let mut med_recall = Vec::new();
    for &lambda in &lambdas {
        let scenario = Scenario {
            lambda_base: lambda,
            ..Scenario::default()
        };
        let mut ps = Vec::new();
        let mut rs = Vec::new();
        for seed in 1..=5u64 {
            let outcome = detection_experiment(&scenario, RngSeed(seed)).unwrap();
            ps.push(outcome.report.scores.precision);
            rs.push(outcome.report.scores.recall);
        }
        med_precision.push(median(&ps));
        med_recall.push(median(&rs));
    }
    let xs: Vec<f64> = lambdas.to_vec();
    let rho_p = spearman(&med_precision, &xs);
    let rho_r = spearman(&med_recall, &xs);
    assert!(
        rho_p >= 0.0,
        "precision trend {rho_p} (medians {med_precision:?})"
    );
    assert!(
        rho_r <= 0.0,
        "recall trend {rho_r} (medians {med_recall:?})"
    );
    println!(
        "criterion 7 PASS: spearman(precision, lambda) = {rho_p:.2}, spearman(recall, lambda) = {rho_r:.2}; \
         precision medians {med_precision:?}, recall medians {med_recall:?}"
    );
}

// Criterion 8: reconstruction-error ordering of the three methods.
#[test]
fn criterion_08_msre_ordering() {
    let scenario = Scenario::default();
    let mut nmf = Vec::new();
    let mut robust = Vec::new();
    let mut combined = Vec::new();
    for seed in 1..=10u64 {
        let reports = msre_experiment(&scenario, RngSeed(seed)).unwrap();
        nmf.push(reports[0].msre);
        robust.push(reports[1].msre);
        combined.push(reports[2].msre);
    }
    let (m_nmf, m_rob, m_comb) = (median(&nmf), median(&robust), median(&combined));
    assert!(m_rob < m_nmf, "robust {m_rob} vs nmf {m_nmf}");
    assert!(
        m_comb <= 1.05 * m_rob,
        "combined {m_comb} vs 1.05 * robust {}",
        1.05 * m_rob
    );

    // Zero corruption: the three methods coincide.
    let clean_scenario = Scenario {
        corruption_fraction: 0.0,
        ..Scenario::default()
    };
    let mut clean = [Vec::new(), Vec::new(), Vec::new()];
    for seed in 1..=3u64 {
        let reports = msre_experiment(&clean_scenario, RngSeed(seed)).unwrap();
        for (bucket, report) in clean.iter_mut().zip(&reports) {
            bucket.push(report.msre);
        }
    }
    let medians: Vec<f64> = clean.iter().map(|v| median(v)).collect();
    for i in 0..3 {
        for j in (i + 1)..3 {
            let (a, b) = (medians[i], medians[j]);
            assert!(
                (a - b).abs() <= 0.10 * a.max(b),
                "clean-data medians diverge: {medians:?}"
            );
        }
    }
    println!(
        "criterion 8 PASS: corrupted medians nmf={m_nmf:.1} robust={m_rob:.1} robust+wnmf={m_comb:.1}; \
         clean medians {medians:?}"
    );
}

// Criterion 9: the weighted solver completes exactly-rank-1 data.
#[test]
fn criterion_09_wnmf_matrix_completion() {
    let u_true = random(10, 1, 61);
    let v_true = random(1, 10, 62);
    let x = u_true.matmul(&v_true).unwrap();

    let mut rng = Xoshiro256PlusPlus::new(RngSeed(63));
    let mut w = DenseMatrix::from_fn(10, 10, |_, _| 1.0);
    let mut masked = Vec::new();
    while masked.len() < 10 {
        let r = rng.next_index(10);
        let c = rng.next_index(10);
        if w.get(r, c) == 1.0 {
            w.set(r, c, 0.0);
            masked.push((r, c));
        }
    }
    let mask = WeightMask::from_matrix(w).unwrap();
    let config = FitConfig::default()
        .with_k(1)
        .with_max_iters(2000)
        .with_rel_tol(0.0)
        .with_seed(64u64);
    let fit = wnmf_fit(&x, &mask, &config).unwrap();
    let product = fit.product();
    let mut worst: f64 = 0.0;
    for &(r, c) in &masked {
        let rel = (product.get(r, c) - x.get(r, c)).abs() / x.get(r, c);
        worst = worst.max(rel);
    }
    assert!(worst < 1e-3, "worst masked-entry relative error {worst}");
    println!(
        "criterion 9 PASS: worst masked-entry relative error {worst:.2e} over 10 held-out entries"
    );
}

// ---------------------------------------------------------------------------
// Criterion 10: every subcommand replays byte-identically from its manifest.
// ---------------------------------------------------------------------------

struct TempDir(PathBuf);

impl TempDir {
    fn new(name: &str) -> Self {
        let path = std::env::temp_dir().join(format!("rnmf-accept-{}-{name}", std::process::id()));
        let _ = std::fs::remove_dir_all(&path);
        std::fs::create_dir_all(&path).unwrap();
        TempDir(path)
    }

    fn path(&self) -> &Path {
        &self.0
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn rnmf() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rnmf"))
}

fn run_ok(cmd: &mut Command) {
    let output = cmd.output().expect("binary runs");
    assert!(
        output.status.success(),
        "command failed: {:?}\nstdout: {}\nstderr: {}",
        cmd,
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

/// Byte-compares every regular file in two run directories, except the
/// manifest (whose duration and out_dir legitimately differ).
fn assert_outputs_identical(a: &Path, b: &Path) {
    let mut names: Vec<String> = std::fs::read_dir(a)
        .unwrap()
        .map(|entry| entry.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(!names.is_empty());
    let mut compared = 0;
    for name in names {
        if name == "manifest.txt" {
            continue;
        }
        let left = std::fs::read(a.join(&name)).unwrap();
        let right =
            std::fs::read(b.join(&name)).unwrap_or_else(|_| panic!("rerun missing output {name}"));
        assert_eq!(left, right, "output {name} differs between run and rerun");
        compared += 1;
    }
    assert!(compared > 0, "no outputs compared");
}

fn write_test_matrix(path: &Path) {
    let clean = rnmf_core::eval::gen_lowrank(30, 12, 2, RngSeed(11));
    let spec = rnmf_core::eval::CorruptionSpec {
        mode: rnmf_core::eval::CorruptionMode::PixelCount {
            per_column: 2,
            value: 10.0 * clean.max_value(),
        },
        seed: RngSeed(12),
    };
    let (noisy, _) = rnmf_core::eval::inject_corruption(&clean, &spec).unwrap();
    rnmf_cli::csv::write_matrix(path, &noisy).unwrap();
}

fn write_test_image(path: &Path) {
    let intensities = DenseMatrix::from_fn(40, 48, |y, x| {
        128.0 + 80.0 * (x as f64 / 6.0).sin() * (y as f64 / 5.0).cos()
    });
    let img = rnmf_cli::pgm::GrayImage::from_matrix_clamped(&intensities);
    rnmf_cli::pgm::write_pgm(path, &img).unwrap();
}

#[test]
fn criterion_10_cli_reproducibility() {
    let dir = TempDir::new("cli");
    let root = dir.path();

    // factorize
    let input = root.join("x.csv");
    write_test_matrix(&input);
    let run1 = root.join("fact1");
    run_ok(rnmf().args([
        "factorize",
        "--method",
        "robust",
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        run1.to_str().unwrap(),
        "--k",
        "3",
        "--seed",
        "5",
        "--max-iters",
        "80",
    ]));
    let run2 = root.join("fact2");
    run_ok(rnmf().args([
        "rerun",
        "--manifest",
        run1.join("manifest.txt").to_str().unwrap(),
        "--out-dir",
        run2.to_str().unwrap(),
    ]));
    assert_outputs_identical(&run1, &run2);

    // detect
    let det1 = root.join("det1");
    run_ok(rnmf().args([
        "detect",
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        det1.to_str().unwrap(),
        "--k",
        "3",
        "--max-iters",
        "120",
    ]));
    let det2 = root.join("det2");
    run_ok(rnmf().args([
        "rerun",
        "--manifest",
        det1.join("manifest.txt").to_str().unwrap(),
        "--out-dir",
        det2.to_str().unwrap(),
    ]));
    assert_outputs_identical(&det1, &det2);

    // denoise
    let image = root.join("img.pgm");
    write_test_image(&image);
    let den1 = root.join("den1");
    run_ok(rnmf().args([
        "denoise",
        "--input",
        image.to_str().unwrap(),
        "--method",
        "robust",
        "--density",
        "0.05",
        "--out-dir",
        den1.to_str().unwrap(),
        "--k",
        "6",
        "--seed",
        "3",
        "--max-iters",
        "120",
    ]));
    let den2 = root.join("den2");
    run_ok(rnmf().args([
        "rerun",
        "--manifest",
        den1.join("manifest.txt").to_str().unwrap(),
        "--out-dir",
        den2.to_str().unwrap(),
    ]));
    assert_outputs_identical(&den1, &den2);

    // bench (both suites)
    let config = root.join("bench.cfg");
    std::fs::write(
        &config,
        "m=40\nn=16\nrank=2\nk=3\nruns=2\nbase_seed=1\nmax_iters=60\nsweep=lambda\nvalues=0.02,0.08\n",
    )
    .unwrap();
    for suite in ["detect-sweep", "msre"] {
        let b1 = root.join(format!("bench1-{suite}"));
        run_ok(rnmf().args([
            "bench",
            "--suite",
            suite,
            "--config",
            config.to_str().unwrap(),
            "--out-dir",
            b1.to_str().unwrap(),
        ]));
        let b2 = root.join(format!("bench2-{suite}"));
        run_ok(rnmf().args([
            "rerun",
            "--manifest",
            b1.join("manifest.txt").to_str().unwrap(),
            "--out-dir",
            b2.to_str().unwrap(),
        ]));
        assert_outputs_identical(&b1, &b2);
    }

    // Round trips of the on-disk formats.
    let matrix = rnmf_cli::csv::read_matrix(&input).unwrap();
    let copy = root.join("copy.csv");
    rnmf_cli::csv::write_matrix(&copy, &matrix).unwrap();
    assert_eq!(
        std::fs::read(&input).unwrap(),
        std::fs::read(&copy).unwrap()
    );
    let img = rnmf_cli::pgm::read_pgm(&image).unwrap();
    let img_copy = root.join("copy.pgm");
    rnmf_cli::pgm::write_pgm(&img_copy, &img).unwrap();
    assert_eq!(
        std::fs::read(&image).unwrap(),
        std::fs::read(&img_copy).unwrap()
    );

    println!("criterion 10 PASS: factorize/detect/denoise/bench replay byte-identically; formats round-trip");
}
