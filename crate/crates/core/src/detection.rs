//! Minimax simultaneous-signal detection: region classification, the
//! threshold `lambda_n = (1/2) n^{epsilon + 2a + 2b − 1}`, and tests built
//! from the quadratic-functional estimators.
//!
//! Two-sequence testing distinguishes a null with disjoint supports
//! (`‖mu ⋆ theta‖₀ = 0`) from an alternative with exactly `q` simultaneous
//! coordinates. In the sparse regime the test thresholds `Q2` (with
//! `tau = log n`); in the dense regime it thresholds `Q4` (with
//! `tau = 4 log n`).

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimsigError};
use crate::estimators::{estimate, EstimatorKind, EstimatorSettings};
use crate::params::ProblemParams;
use crate::rates::{regime_of, RegimeLabel};

/// Where a parameter point sits relative to the detection boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetectionRegion {
    Detectable,
    Undetectable,
    /// Exactly on the dividing set; the asymptotic theory leaves these
    /// measure-zero points open.
    Boundary,
}

impl std::fmt::Display for DetectionRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DetectionRegion::Detectable => "detectable",
            DetectionRegion::Undetectable => "undetectable",
            DetectionRegion::Boundary => "boundary",
        })
    }
}

/// Outcome of a threshold test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    /// The estimator value used as the test statistic.
    pub statistic: f64,
    /// The threshold `lambda_n`.
    pub threshold: f64,
    /// `statistic >= threshold`.
    pub reject: bool,
}

impl TestOutcome {
    fn new(statistic: f64, threshold: f64) -> Self {
        TestOutcome {
            statistic,
            threshold,
            reject: statistic >= threshold,
        }
    }
}

/// Classify `(a, b)` for the two-sequence detection problem.
///
/// Sparse regime (`epsilon < beta/2`): detectable iff `a ∧ b > 0`,
/// undetectable iff `a ∧ b < 0`. Dense regime: detectable iff
/// `a ∧ b > (beta − 2 epsilon)/4` and `a ∨ b > 0`, undetectable iff
/// `a ∧ b < (beta − 2 epsilon)/4` or `a ∨ b < 0`. Ties are reported as
/// [`DetectionRegion::Boundary`].
pub fn detect_region_two_seq(beta: f64, epsilon: f64, a: f64, b: f64) -> Result<DetectionRegion> {
    let regime = regime_of(beta, epsilon)?;
    let min = a.min(b);
    let max = a.max(b);
    Ok(match regime {
        RegimeLabel::Sparse => {
            if min > 0.0 {
                DetectionRegion::Detectable
            } else if min < 0.0 {
                DetectionRegion::Undetectable
            } else {
                DetectionRegion::Boundary
            }
        }
        _ => {
            let gap = (beta - 2.0 * epsilon) / 4.0;
            if min > gap && max > 0.0 {
                DetectionRegion::Detectable
            } else if min < gap || max < 0.0 {
                DetectionRegion::Undetectable
            } else {
                DetectionRegion::Boundary
            }
        }
    })
}

/// Test threshold `lambda_n = (1/2) n^{epsilon + 2a + 2b − 1}`, i.e. half the
/// worst-case value of the functional under the real-valued calibration
/// `q = n^epsilon`.
pub fn lambda_threshold(n: usize, epsilon: f64, a: f64, b: f64) -> f64 {
    0.5 * (n as f64).powf(epsilon + 2.0 * a + 2.0 * b - 1.0)
}

/// Run the two-sequence simultaneous-signal test on observed data. The
/// regime of `params` selects the statistic (`Q2` at `tau = log n` for
/// sparse, `Q4` at `tau = 4 log n` for dense); the threshold is
/// [`lambda_threshold`] at the algebraic orders of the strengths.
///
/// `sqrt(c log n)` strengths have algebraic order zero here. The tests
/// remain effective at that calibration only for large enough `c`, and no
/// sharp constant is available, so such inputs sit on the boundary of the
/// test's guarantees.
pub fn run_test_two_seq(
    x: &[f64],
    y: &[f64],
    sigma: f64,
    params: &ProblemParams,
) -> Result<TestOutcome> {
    if x.len() != y.len() {
        return Err(SimsigError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    let regime = regime_of(params.beta, params.epsilon)?;
    let kind = if regime.is_dense() {
        EstimatorKind::Q4
    } else {
        EstimatorKind::Q2
    };
    let settings = EstimatorSettings::for_sample_size(kind, params.n, sigma)?;
    let statistic = estimate(&settings, Some(x), y)?;
    let threshold = lambda_threshold(
        params.n,
        params.epsilon,
        params.a.exponent_or_zero(),
        params.b.exponent_or_zero(),
    );
    Ok(TestOutcome::new(statistic, threshold))
}

/// Scale at which a one-sequence detection boundary is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryScale {
    /// `s_n = n^b`; the boundary is a value of `b`.
    Algebraic,
    /// `s_n = sigma sqrt(d log n)`; the boundary is a value of `d`.
    /// Meaningful only for `beta < 1/2`.
    LogScale,
}

/// One-sequence detection boundary. Algebraic scale: `(1 − 2 beta)/4` for
/// `beta >= 1/2`, zero for `beta < 1/2`. On the `sqrt(d log n)` scale
/// (`beta < 1/2` only) the boundary in `d` is `2 (1 − sqrt(beta))²` for
/// `beta <= 1/4` and `1 − 2 beta` above.
pub fn one_seq_boundary(beta: f64, scale: BoundaryScale) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(SimsigError::ConstraintViolation(format!(
            "requires 0 < beta < 1, got {beta}"
        )));
    }
    match scale {
        BoundaryScale::Algebraic => Ok(if beta >= 0.5 {
            (1.0 - 2.0 * beta) / 4.0
        } else {
            0.0
        }),
        BoundaryScale::LogScale => {
            if beta >= 0.5 {
                return Err(SimsigError::ConstraintViolation(format!(
                    "sqrt(log) boundary is defined for beta < 1/2, got {beta}"
                )));
            }
            Ok(if beta <= 0.25 {
                2.0 * (1.0 - beta.sqrt()).powi(2)
            } else {
                1.0 - 2.0 * beta
            })
        }
    }
}

/// One-sequence signal detection test. Dense (`beta >= 1/2`): statistic `Q3`
/// against `lambda_n = (1/2) n^{beta + 2b − 1}` (one valid choice satisfying
/// the asymptotic threshold condition). Sparse (`beta < 1/2`): statistic `Q1`
/// with `tau = 2 log n` against `lambda_n = (log n)/n`.
pub fn run_test_one_seq(
    y: &[f64],
    sigma: f64,
    beta: f64,
    b: f64,
    dense: bool,
) -> Result<TestOutcome> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(SimsigError::ConstraintViolation(format!(
            "requires 0 < beta < 1, got {beta}"
        )));
    }
    if dense != (beta >= 0.5) {
        return Err(SimsigError::ConstraintViolation(format!(
            "dense flag {dense} inconsistent with beta = {beta}"
        )));
    }
    let n = y.len();
    if n < 2 {
        return Err(SimsigError::DegenerateSize(n));
    }
    let nf = n as f64;
    if dense {
        let settings = EstimatorSettings::for_sample_size(EstimatorKind::Q3, n, sigma)?;
        let statistic = estimate(&settings, None, y)?;
        let threshold = 0.5 * nf.powf(beta + 2.0 * b - 1.0);
        Ok(TestOutcome::new(statistic, threshold))
    } else {
        let settings = EstimatorSettings::for_sample_size(EstimatorKind::Q1, n, sigma)?;
        let statistic = estimate(&settings, None, y)?;
        let threshold = nf.ln() / nf;
        Ok(TestOutcome::new(statistic, threshold))
    }
}
