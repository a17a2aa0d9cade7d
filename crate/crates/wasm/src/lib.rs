//! Browser bindings for the simsig demo page. Each export returns a
//! self-contained SVG string; the page wires them to sliders.
//!
//! The chart builders live in [`charts`] as ordinary fallible functions so
//! they test on any target; the `wasm_bindgen` wrappers only translate
//! errors into `JsValue` (which can exist solely on wasm32).

use wasm_bindgen::prelude::*;

pub mod charts {
    use simsig::detection::{detect_region_two_seq, DetectionRegion};
    use simsig::estimators::EstimatorKind;
    use simsig::harness::{fit_log_slope, run_mse_experiment, SigmaMode, SimConfig};
    use simsig::params::{PairConfig, SignalStrength};
    use simsig::rates::{optimal_estimator, rate_two_seq_equal, regime_of};
    use simsig::svgplot::{category_map, line_chart, ChartSpec, Series};

    /// Rate exponent r(beta, epsilon, b) against b for the chosen epsilon
    /// plus one representative epsilon per regime.
    pub fn rate_exponent_chart(beta: f64, epsilon: f64) -> simsig::Result<String> {
        let mut series = Vec::new();
        let mut add_curve = |eps: f64| -> simsig::Result<()> {
            let regime = regime_of(beta, eps)?;
            let points: Vec<(f64, f64)> = (0..=240)
                .map(|i| {
                    let b = -0.3 + i as f64 * (0.6 / 240.0);
                    rate_two_seq_equal(beta, eps, b).map(|r| (b, r.exponent))
                })
                .collect::<simsig::Result<_>>()?;
            series.push(Series {
                label: format!("eps={eps:.3} ({regime})"),
                points,
            });
            Ok(())
        };
        add_curve(epsilon)?;
        for frac in [0.25, 0.65, 0.9] {
            let eps = beta * frac;
            if (eps - epsilon).abs() > 1e-9 {
                add_curve(eps)?;
            }
        }
        let spec = ChartSpec {
            title: format!("rate exponent vs signal strength (beta={beta})"),
            x_label: "b".into(),
            y_label: "r".into(),
            ..Default::default()
        };
        Ok(line_chart(&spec, &series))
    }

    /// Detectable/undetectable region map over the (a, b) plane.
    pub fn detection_region_chart(beta: f64, epsilon: f64) -> simsig::Result<String> {
        let res = 120usize;
        let (lo, hi) = (-0.2f64, 0.3f64);
        let mut grid = Vec::with_capacity(res);
        for row in 0..res {
            // row 0 is the top of the plot (largest b)
            let b = hi - (row as f64 + 0.5) * (hi - lo) / res as f64;
            let mut cells = Vec::with_capacity(res);
            for col in 0..res {
                let a = lo + (col as f64 + 0.5) * (hi - lo) / res as f64;
                cells.push(match detect_region_two_seq(beta, epsilon, a, b)? {
                    DetectionRegion::Undetectable => 0u8,
                    DetectionRegion::Boundary => 1,
                    DetectionRegion::Detectable => 2,
                });
            }
            grid.push(cells);
        }
        let regime = regime_of(beta, epsilon)?;
        let spec = ChartSpec {
            title: format!("detection regions, beta={beta} epsilon={epsilon} ({regime})"),
            x_label: "a".into(),
            y_label: "b".into(),
            ..Default::default()
        };
        Ok(category_map(
            &spec,
            &grid,
            (lo, hi),
            (lo, hi),
            &[
                ("undetectable", "#f2dede"),
                ("boundary", "#c9c9c9"),
                ("detectable", "#dff0d8"),
            ],
        ))
    }

    /// Small seeded MSE experiment comparing Q0/Q2/Q4, with fitted log-log
    /// slopes in the legend. Sized to run in-browser in a second or two.
    pub fn mse_simulation_chart(
        beta: f64,
        epsilon: f64,
        b: f64,
        sigma: f64,
        replications: usize,
        seed: u64,
    ) -> simsig::Result<String> {
        let config = SimConfig {
            n_values: vec![300, 1000, 3000, 10_000],
            betas: vec![beta],
            epsilons: vec![epsilon],
            a_values: None,
            b_values: vec![SignalStrength::Algebraic(b)],
            sigma,
            estimators: vec![EstimatorKind::Q0, EstimatorKind::Q2, EstimatorKind::Q4],
            replications: replications.clamp(1, 500),
            pair_config: PairConfig::stress(),
            master_seed: seed,
            sigma_mode: SigmaMode::Known,
        };
        let rows = run_mse_experiment(&config)?;
        let mut series = Vec::new();
        for kind in [EstimatorKind::Q0, EstimatorKind::Q2, EstimatorKind::Q4] {
            let cell: Vec<_> = rows
                .iter()
                .filter(|r| r.estimator == kind)
                .cloned()
                .collect();
            let points: Vec<(f64, f64)> = cell
                .iter()
                .filter(|r| r.mse > 0.0)
                .map(|r| ((r.n as f64).log10(), r.mse.log10()))
                .collect();
            let label = match fit_log_slope(&cell) {
                Ok(fit) => format!("{kind} slope={:.2}", fit.slope),
                Err(_) => kind.to_string(),
            };
            series.push(Series { label, points });
        }
        let theory = rate_two_seq_equal(beta, epsilon, b)?;
        let choice = optimal_estimator(
            beta,
            epsilon,
            SignalStrength::Algebraic(b),
            SignalStrength::Algebraic(b),
        )?;
        let spec = ChartSpec {
            title: format!(
                "MSE vs n (theory r={:.3}, optimal {})",
                theory.exponent, choice.kind
            ),
            x_label: "log10 n".into(),
            y_label: "log10 MSE".into(),
            ..Default::default()
        };
        Ok(line_chart(&spec, &series))
    }
}

fn err_to_js(err: simsig::SimsigError) -> JsValue {
    JsValue::from_str(&err.to_string())
}

#[wasm_bindgen]
pub fn rate_exponent_chart(beta: f64, epsilon: f64) -> Result<String, JsValue> {
    charts::rate_exponent_chart(beta, epsilon).map_err(err_to_js)
}

#[wasm_bindgen]
pub fn detection_region_chart(beta: f64, epsilon: f64) -> Result<String, JsValue> {
    charts::detection_region_chart(beta, epsilon).map_err(err_to_js)
}

#[wasm_bindgen]
pub fn mse_simulation_chart(
    beta: f64,
    epsilon: f64,
    b: f64,
    sigma: f64,
    replications: usize,
    seed: u64,
) -> Result<String, JsValue> {
    charts::mse_simulation_chart(beta, epsilon, b, sigma, replications, seed).map_err(err_to_js)
}
