//! Benchmark sweeps over synthetic scenarios, emitting plot-ready CSV
//! tables. One row per (sweep point, seeded run); aggregation is left to the
//! consumer.

use std::fmt::Write as _;

use rnmf_core::eval::{detection_experiment, msre_experiment, Scenario};
use rnmf_core::rng::RngSeed;

#[derive(Debug, Clone)]
pub enum SweepAxis {
    Lambda(Vec<f64>),
    NSamples(Vec<usize>),
}

impl SweepAxis {
    pub fn param_name(&self) -> &'static str {
        match self {
            SweepAxis::Lambda(_) => "lambda",
            SweepAxis::NSamples(_) => "n_samples",
        }
    }

    fn points(&self) -> Vec<f64> {
        match self {
            SweepAxis::Lambda(values) => values.clone(),
            SweepAxis::NSamples(values) => values.iter().map(|&n| n as f64).collect(),
        }
    }

    fn apply(&self, base: &Scenario, value: f64) -> Scenario {
        let mut scenario = *base;
        match self {
            SweepAxis::Lambda(_) => scenario.lambda_base = value,
            SweepAxis::NSamples(_) => scenario.n = value as usize,
        }
        scenario
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub scenario: Scenario,
    pub axis: SweepAxis,
    pub runs: usize,
    pub base_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectRow {
    pub sweep_param: &'static str,
    pub value: f64,
    pub run_seed: u64,
    pub precision: f64,
    pub recall: f64,
}

/// Runs every (point, seed) pair in order. A failing point is reported on
/// stderr and skipped; the sweep continues.
pub fn run_detection_sweep(config: &SweepConfig) -> Vec<DetectRow> {
    let mut rows = Vec::new();
    for value in config.axis.points() {
        let scenario = config.axis.apply(&config.scenario, value);
        for run in 0..config.runs {
            let seed = config.base_seed + run as u64;
            match detection_experiment(&scenario, RngSeed(seed)) {
                Ok(outcome) => rows.push(DetectRow {
                    sweep_param: config.axis.param_name(),
                    value,
                    run_seed: seed,
                    precision: outcome.report.scores.precision,
                    recall: outcome.report.scores.recall,
                }),
                Err(e) => {
                    eprintln!(
                        "sweep point {}={value} seed={seed} failed: {e}",
                        config.axis.param_name()
                    );
                }
            }
        }
    }
    rows
}

pub fn detection_csv(rows: &[DetectRow]) -> String {
    let mut out = String::from(
        "# precision and recall are pooled over all matrix entries of each run\n\
         sweep_param,value,run_seed,precision,recall\n",
    );
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.sweep_param, row.value, row.run_seed, row.precision, row.recall
        );
    }
    out
}

#[derive(Debug, Clone)]
pub struct MsreConfig {
    pub scenario: Scenario,
    pub runs: usize,
    pub base_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MsreRow {
    pub method: &'static str,
    pub msre: f64,
    pub seed: u64,
}

pub fn run_msre_comparison(config: &MsreConfig) -> Vec<MsreRow> {
    let mut rows = Vec::new();
    for run in 0..config.runs {
        let seed = config.base_seed + run as u64;
        match msre_experiment(&config.scenario, RngSeed(seed)) {
            Ok(reports) => {
                for report in reports {
                    rows.push(MsreRow {
                        method: report.method.name(),
                        msre: report.msre,
                        seed,
                    });
                }
            }
            Err(e) => eprintln!("msre run seed={seed} failed: {e}"),
        }
    }
    rows
}

pub fn msre_csv(rows: &[MsreRow]) -> String {
    let mut out = String::from("method,msre,seed\n");
    for row in rows {
        let _ = writeln!(out, "{},{},{}", row.method, row.msre, row.seed);
    }
    out
}
