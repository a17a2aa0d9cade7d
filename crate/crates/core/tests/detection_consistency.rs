//! Detection experiment behavior across sample sizes: at a detectable point
//! the empirical total error shrinks as n grows, and the experiment is a
//! pure function of its seed.

use simsig::harness::{run_detection_experiment, DetectionConfig, SigmaMode};
use simsig::params::SignalStrength;

fn config(n: usize, sigma: f64) -> DetectionConfig {
    DetectionConfig {
        n,
        beta: 0.45,
        epsilon: 0.35,
        a: SignalStrength::Algebraic(0.15),
        b: SignalStrength::Algebraic(0.15),
        sigma,
        replications: 200,
        master_seed: 41,
        sigma_mode: SigmaMode::Known,
        lambda_override: None,
    }
}

#[test]
fn total_error_decreases_in_n_at_detectable_point() {
    // sigma chosen so the signal crosses the tau threshold inside the n
    // range: errors fall from near-total to near-zero
    let sums: Vec<f64> = [1_000usize, 10_000, 100_000]
        .iter()
        .map(|&n| {
            let out = run_detection_experiment(&config(n, 0.8)).unwrap();
            out.type1 + out.type2
        })
        .collect();
    // binomial standard error at 200 reps is about 0.035 per rate
    let slack = 3.0 * (0.5f64 * 0.5 * 2.0 / 200.0).sqrt();
    assert!(
        sums[1] <= sums[0] + slack && sums[2] <= sums[1] + slack,
        "total errors not decreasing within MC error: {sums:?}"
    );
    assert!(
        sums[2] < sums[0],
        "no overall improvement from n=1e3 to n=1e5: {sums:?}"
    );
}

#[test]
fn mad_estimated_sigma_mode_still_separates() {
    let mut cfg = config(50_000, 0.1);
    cfg.sigma_mode = SigmaMode::MadEstimated;
    let out = run_detection_experiment(&cfg).unwrap();
    assert!(out.type1 + out.type2 <= 0.05, "{out:?}");
}

#[test]
fn reported_thresholds_follow_both_calibrations() {
    let out = run_detection_experiment(&config(10_000, 0.8)).unwrap();
    assert_eq!(out.lambda_used, out.lambda_power_law);
    // floor-q calibration differs once floor(n^eps) != n^eps
    assert!(out.lambda_worst_pair <= out.lambda_power_law);
    assert!(out.lambda_worst_pair > 0.0);
}
