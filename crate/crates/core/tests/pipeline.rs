//! Cross-module pipeline checks: detection feeding the weighted refit.

use rnmf_core::eval::{detection_experiment, msre_experiment, trust_mask, MsreMethod, Scenario};
use rnmf_core::rng::RngSeed;
use rnmf_core::wnmf::WeightMask;

fn small_scenario() -> Scenario {
    Scenario {
        m: 40,
        n: 20,
        rank: 3,
        k: 4,
        max_iters: 120,
        ..Scenario::default()
    }
}

#[test]
fn detection_mask_and_trust_mask_are_complements() {
    let outcome = detection_experiment(&small_scenario(), RngSeed(2)).unwrap();
    let trust = trust_mask(&outcome);
    let detected = &outcome.report.detected;
    assert_eq!(trust.shape(), detected.shape());
    for r in 0..detected.rows() {
        for c in 0..detected.cols() {
            let w = trust.matrix().get(r, c);
            assert_eq!(w == 0.0, detected.get(r, c));
        }
    }
    // Same construction as the library helper.
    assert_eq!(trust, WeightMask::from_detection(detected));
}

#[test]
fn detected_positions_track_ground_truth() {
    let outcome = detection_experiment(&small_scenario(), RngSeed(2)).unwrap();
    let scores = outcome.report.scores;
    assert!(scores.precision >= 0.8, "precision {}", scores.precision);
    assert!(scores.recall >= 0.7, "recall {}", scores.recall);
}

#[test]
fn msre_experiment_reports_all_methods_on_shared_data() {
    let reports = msre_experiment(&small_scenario(), RngSeed(4)).unwrap();
    assert_eq!(reports.len(), 3);
    assert_eq!(reports[0].method, MsreMethod::Nmf);
    assert_eq!(reports[1].method, MsreMethod::Robust);
    assert_eq!(reports[2].method, MsreMethod::RobustWnmf);
    for report in &reports {
        assert!(report.msre.is_finite() && report.msre >= 0.0);
        assert_eq!(report.n_samples, 20);
    }
    // The robust fit explains the spikes through the noise term, so its
    // reconstruction tracks the clean data better than the baseline's.
    assert!(reports[1].msre < reports[0].msre);
}
