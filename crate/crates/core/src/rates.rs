//! Minimax rates of convergence for the quadratic functional, as piecewise
//! functions of the sparsity exponents `(beta, epsilon)` and the signal
//! strength exponents `(a, b)`.
//!
//! A rate is reported as `gamma_n ≍ n^r (log n)^p` via [`RateResult`]. Three
//! regimes partition `0 < epsilon <= beta < 1/2`:
//!
//! * sparse: `epsilon < beta/2` (simultaneous signal rarer than `sqrt(k)`);
//! * moderately dense: `beta/2 <= epsilon <= 3 beta/4`;
//! * strongly dense: `3 beta/4 < epsilon <= beta`.
//!
//! Boundary values of `b` take the left-listed branch of each piecewise
//! display; the exponent is continuous across every boundary, so the choice
//! only pins the log power there.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimsigError};
use crate::estimators::EstimatorKind;
use crate::params::{check_sparsity_exponents, SignalStrength};

/// A rate `gamma_n ≍ n^exponent (log n)^log_power`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub exponent: f64,
    /// Power of the `log n` multiplier; only 0, 2, 4 occur.
    pub log_power: u8,
    /// Set when `exponent > 0`: the risk diverges and consistent estimation
    /// is impossible.
    pub divergent: bool,
}

impl RateResult {
    fn new(exponent: f64, log_power: u8) -> Self {
        debug_assert!(matches!(log_power, 0 | 2 | 4));
        RateResult {
            exponent,
            log_power,
            divergent: exponent > 0.0,
        }
    }

    /// `log10` of the rate at a given `n` (exponent plus the log factor).
    pub fn log10_at(&self, n: f64) -> f64 {
        self.exponent * n.log10() + self.log_power as f64 * n.ln().ln().max(0.0) / std::f64::consts::LN_10
    }
}

/// Regime of the simultaneous sparsity relative to `sqrt(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeLabel {
    Sparse,
    ModeratelyDense,
    StronglyDense,
}

impl RegimeLabel {
    pub fn name(&self) -> &'static str {
        match self {
            RegimeLabel::Sparse => "sparse",
            RegimeLabel::ModeratelyDense => "moderately-dense",
            RegimeLabel::StronglyDense => "strongly-dense",
        }
    }

    pub fn is_dense(&self) -> bool {
        !matches!(self, RegimeLabel::Sparse)
    }
}

impl std::fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Classify `(beta, epsilon)`. Both regime boundaries are closed on the
/// moderately dense side.
pub fn regime_of(beta: f64, epsilon: f64) -> Result<RegimeLabel> {
    check_sparsity_exponents(beta, epsilon)?;
    Ok(if epsilon < beta / 2.0 {
        RegimeLabel::Sparse
    } else if epsilon <= 0.75 * beta {
        RegimeLabel::ModeratelyDense
    } else {
        RegimeLabel::StronglyDense
    })
}

/// Minimax rate for equal signal strengths `r_n = s_n = n^b`.
pub fn rate_two_seq_equal(beta: f64, epsilon: f64, b: f64) -> Result<RateResult> {
    let regime = regime_of(beta, epsilon)?;
    let e = epsilon;
    Ok(match regime {
        RegimeLabel::Sparse => {
            if b <= 0.0 {
                RateResult::new(2.0 * e + 8.0 * b - 2.0, 0)
            } else if b <= e / 2.0 {
                RateResult::new(2.0 * e + 4.0 * b - 2.0, 2)
            } else {
                RateResult::new(e + 6.0 * b - 2.0, 0)
            }
        }
        RegimeLabel::ModeratelyDense => {
            if b <= 0.0 {
                RateResult::new(2.0 * e + 8.0 * b - 2.0, 0)
            } else if b <= (2.0 * e - beta) / 4.0 {
                RateResult::new(2.0 * e - 2.0, 4)
            } else if b <= (beta - e) / 2.0 {
                RateResult::new(beta + 4.0 * b - 2.0, 0)
            } else {
                RateResult::new(e + 6.0 * b - 2.0, 0)
            }
        }
        RegimeLabel::StronglyDense => {
            if b <= 0.0 {
                RateResult::new(2.0 * e + 8.0 * b - 2.0, 0)
            } else if b <= e / 6.0 {
                RateResult::new(2.0 * e - 2.0, 4)
            } else {
                RateResult::new(e + 6.0 * b - 2.0, 0)
            }
        }
    })
}

/// Phase label of a signal strength within its regime's table. The interval
/// bounds depend on the regime:
///
/// | label                | sparse          | moderately dense            | strongly dense              |
/// |----------------------|-----------------|-----------------------------|-----------------------------|
/// | `Weak`               | `a <= 0`        | `a <= (b-2e)/4`             | `a <= (b-2e)/4`             |
/// | `WeakNearZero`       | (absent)        | `(b-2e)/4 < a <= 0`         | `(b-2e)/4 < a <= 0`         |
/// | `SqrtLog`            | `sqrt(c log n)` | `sqrt(c log n)`             | `sqrt(c log n)`             |
/// | `ModeratePositive`   | `0 < a <= e/2`  | `0 < a <= (2e-b)/4`         | `0 < a <= (b-e)/2`          |
/// | `StrongIntermediate` | (absent)        | `(2e-b)/4 < a <= (b-e)/2`   | `(b-e)/2 < a <= (2e-b)/4`   |
/// | `Strong`             | `a > e/2`       | `a > (b-e)/2`               | `a > (2e-b)/4`              |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseCategory {
    Weak,
    WeakNearZero,
    SqrtLog,
    ModeratePositive,
    StrongIntermediate,
    Strong,
}

/// A table cell's rate: a single expression or the larger of two candidates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TableRate {
    Single(RateResult),
    /// Both candidates are kept; `resolved` picks the dominant one.
    MaxOf(RateResult, RateResult),
}

impl TableRate {
    /// The asymptotically dominant rate. Equal exponents resolve to the
    /// higher log power.
    pub fn resolved(&self) -> RateResult {
        match *self {
            TableRate::Single(r) => r,
            TableRate::MaxOf(r1, r2) => {
                if r1.exponent > r2.exponent
                    || (r1.exponent == r2.exponent && r1.log_power >= r2.log_power)
                {
                    r1
                } else {
                    r2
                }
            }
        }
    }
}

/// One cell of the unequal-strength rate tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableEntry {
    pub a_category: PhaseCategory,
    pub b_category: PhaseCategory,
    pub rate: TableRate,
    /// Shaded cell: the zero estimator attains the minimax rate (possibly
    /// jointly with the thresholding estimator on boundary rows).
    pub q0_optimal: bool,
}

fn single(exponent: f64, log_power: u8) -> TableRate {
    TableRate::Single(RateResult::new(exponent, log_power))
}

fn max_of(e1: f64, p1: u8, e2: f64, p2: u8) -> TableRate {
    TableRate::MaxOf(RateResult::new(e1, p1), RateResult::new(e2, p2))
}

fn categorize_sparse(s: SignalStrength, epsilon: f64) -> PhaseCategory {
    match s {
        SignalStrength::LogScale(_) => PhaseCategory::SqrtLog,
        SignalStrength::Algebraic(a) => {
            if a <= 0.0 {
                PhaseCategory::Weak
            } else if a <= epsilon / 2.0 {
                PhaseCategory::ModeratePositive
            } else {
                PhaseCategory::Strong
            }
        }
    }
}

fn categorize_dense(s: SignalStrength, t_mid: f64, t_top: f64, gap: f64) -> PhaseCategory {
    match s {
        SignalStrength::LogScale(_) => PhaseCategory::SqrtLog,
        SignalStrength::Algebraic(a) => {
            if a <= gap {
                PhaseCategory::Weak
            } else if a <= 0.0 {
                PhaseCategory::WeakNearZero
            } else if a <= t_mid {
                PhaseCategory::ModeratePositive
            } else if a <= t_top {
                PhaseCategory::StrongIntermediate
            } else {
                PhaseCategory::Strong
            }
        }
    }
}

/// Minimax rate over the unequal-strength parameter space. The sparse regime
/// uses the closed three-branch formula; the dense regimes follow the rate
/// tables cell by cell, including the `sqrt(c log n)` boundary rows and the
/// `max{...}` cells.
pub fn rate_two_seq_general(
    beta: f64,
    epsilon: f64,
    a: SignalStrength,
    b: SignalStrength,
) -> Result<TableEntry> {
    let regime = regime_of(beta, epsilon)?;
    if let SignalStrength::LogScale(c) = a {
        if c <= 0.0 {
            return Err(SimsigError::ConstraintViolation(
                "LogScale coefficient must be > 0".into(),
            ));
        }
    }
    if let SignalStrength::LogScale(c) = b {
        if c <= 0.0 {
            return Err(SimsigError::ConstraintViolation(
                "LogScale coefficient must be > 0".into(),
            ));
        }
    }
    let e = epsilon;
    let x = a.exponent_or_zero();
    let y = b.exponent_or_zero();

    if regime == RegimeLabel::Sparse {
        let ca = categorize_sparse(a, e);
        let cb = categorize_sparse(b, e);
        // Closed formula, with each sqrt(log) side contributing one extra
        // log^2 factor (its algebraic order is zero).
        let log_bump = 2 * (a.is_log_scale() as u8 + b.is_log_scale() as u8);
        let amin = x.min(y);
        let amax = x.max(y);
        let rate = if amin <= 0.0 {
            single(2.0 * e + 4.0 * x + 4.0 * y - 2.0, log_bump)
        } else if amin <= e / 2.0 {
            single(2.0 * e + 4.0 * amax - 2.0, 2)
        } else {
            single(e + 4.0 * amax + 2.0 * amin - 2.0, 0)
        };
        // Weak region: a ∧ b <= 0 with sqrt(log) counting as the boundary 0.
        let q0 = amin <= 0.0;
        return Ok(TableEntry {
            a_category: ca,
            b_category: cb,
            rate,
            q0_optimal: q0,
        });
    }

    let gap = (beta - 2.0 * e) / 4.0;
    let (t_mid, t_top) = if regime == RegimeLabel::ModeratelyDense {
        ((2.0 * e - beta) / 4.0, (beta - e) / 2.0)
    } else {
        ((beta - e) / 2.0, (2.0 * e - beta) / 4.0)
    };
    let ca = categorize_dense(a, t_mid, t_top, gap);
    let cb = categorize_dense(b, t_mid, t_top, gap);

    let rate = if regime == RegimeLabel::ModeratelyDense {
        moderately_dense_cell(beta, e, x, y, ca, cb)
    } else {
        strongly_dense_cell(beta, e, x, y, ca, cb)
    };
    // Weak region of the dense tables: a ∨ b <= 0 or a ∧ b <= (beta-2e)/4,
    // sqrt(log) counting as the boundary 0.
    let q0 = x.max(y) <= 0.0 || x.min(y) <= gap;
    Ok(TableEntry {
        a_category: ca,
        b_category: cb,
        rate,
        q0_optimal: q0,
    })
}

/// Cell of the moderately dense table (`beta/2 <= epsilon <= 3 beta/4`).
/// Rows and columns in the order Weak, WeakNearZero, SqrtLog,
/// ModeratePositive, StrongIntermediate, Strong.
fn moderately_dense_cell(
    beta: f64,
    e: f64,
    x: f64,
    y: f64,
    ca: PhaseCategory,
    cb: PhaseCategory,
) -> TableRate {
    use PhaseCategory::*;
    let both = 2.0 * e + 4.0 * x + 4.0 * y - 2.0;
    match (ca, cb) {
        (Weak, SqrtLog) => single(2.0 * e + 4.0 * x - 2.0, 2),
        (SqrtLog, Weak) => single(2.0 * e + 4.0 * y - 2.0, 2),
        (Weak, _) | (_, Weak) => single(both, 0),

        (WeakNearZero, WeakNearZero) => single(both, 0),
        (WeakNearZero, SqrtLog) => single(2.0 * e + 4.0 * x - 2.0, 2),
        (SqrtLog, WeakNearZero) => single(2.0 * e + 4.0 * y - 2.0, 2),
        (WeakNearZero, ModeratePositive) => {
            max_of(beta + 4.0 * y - 2.0, 0, 2.0 * e + 4.0 * x - 2.0, 2)
        }
        (ModeratePositive, WeakNearZero) => {
            max_of(beta + 4.0 * x - 2.0, 0, 2.0 * e + 4.0 * y - 2.0, 2)
        }
        (WeakNearZero, StrongIntermediate | Strong) => single(beta + 4.0 * y - 2.0, 0),
        (StrongIntermediate | Strong, WeakNearZero) => single(beta + 4.0 * x - 2.0, 0),

        (SqrtLog, SqrtLog) => single(2.0 * e - 2.0, 4),
        (SqrtLog, ModeratePositive) | (ModeratePositive, SqrtLog) => single(2.0 * e - 2.0, 4),
        (SqrtLog, StrongIntermediate | Strong) => single(beta + 4.0 * y - 2.0, 0),
        (StrongIntermediate | Strong, SqrtLog) => single(beta + 4.0 * x - 2.0, 0),

        (ModeratePositive, ModeratePositive) => single(2.0 * e - 2.0, 4),
        (ModeratePositive, StrongIntermediate | Strong) => single(beta + 4.0 * y - 2.0, 0),
        (StrongIntermediate | Strong, ModeratePositive) => single(beta + 4.0 * x - 2.0, 0),

        (StrongIntermediate, StrongIntermediate) => single(beta + 4.0 * x.max(y) - 2.0, 0),
        (StrongIntermediate, Strong) => single(beta + 4.0 * x - 2.0, 0),
        (Strong, StrongIntermediate) => single(beta + 4.0 * y - 2.0, 0),
        (Strong, Strong) => single(e + 4.0 * x.max(y) + 2.0 * x.min(y) - 2.0, 0),
    }
}

/// Cell of the strongly dense table (`3 beta/4 < epsilon <= beta`).
fn strongly_dense_cell(
    beta: f64,
    e: f64,
    x: f64,
    y: f64,
    ca: PhaseCategory,
    cb: PhaseCategory,
) -> TableRate {
    use PhaseCategory::*;
    let both = 2.0 * e + 4.0 * x + 4.0 * y - 2.0;
    match (ca, cb) {
        (Weak, SqrtLog) => single(2.0 * e + 4.0 * x - 2.0, 2),
        (SqrtLog, Weak) => single(2.0 * e + 4.0 * y - 2.0, 2),
        (Weak, _) | (_, Weak) => single(both, 0),

        (WeakNearZero, WeakNearZero) => single(both, 0),
        (WeakNearZero, SqrtLog) => single(2.0 * e + 4.0 * x - 2.0, 2),
        (SqrtLog, WeakNearZero) => single(2.0 * e + 4.0 * y - 2.0, 2),
        (WeakNearZero, ModeratePositive | StrongIntermediate) => {
            max_of(beta + 4.0 * y - 2.0, 0, 2.0 * e + 4.0 * x - 2.0, 2)
        }
        (ModeratePositive | StrongIntermediate, WeakNearZero) => {
            max_of(beta + 4.0 * x - 2.0, 0, 2.0 * e + 4.0 * y - 2.0, 2)
        }
        (WeakNearZero, Strong) => single(beta + 4.0 * y - 2.0, 0),
        (Strong, WeakNearZero) => single(beta + 4.0 * x - 2.0, 0),

        (SqrtLog, SqrtLog) => single(2.0 * e - 2.0, 4),
        (SqrtLog, ModeratePositive | StrongIntermediate)
        | (ModeratePositive | StrongIntermediate, SqrtLog) => single(2.0 * e - 2.0, 4),
        (SqrtLog, Strong) => single(beta + 4.0 * y - 2.0, 0),
        (Strong, SqrtLog) => single(beta + 4.0 * x - 2.0, 0),

        (ModeratePositive, ModeratePositive | StrongIntermediate)
        | (StrongIntermediate, ModeratePositive) => single(2.0 * e - 2.0, 4),
        (ModeratePositive, Strong) => single(beta + 4.0 * y - 2.0, 0),
        (Strong, ModeratePositive) => single(beta + 4.0 * x - 2.0, 0),

        (StrongIntermediate, StrongIntermediate) => max_of(
            2.0 * e - 2.0,
            4,
            e + 4.0 * x.max(y) + 2.0 * x.min(y) - 2.0,
            0,
        ),
        (StrongIntermediate, Strong) => single(e + 2.0 * x + 4.0 * y - 2.0, 0),
        (Strong, StrongIntermediate) => single(e + 4.0 * x + 2.0 * y - 2.0, 0),
        (Strong, Strong) => single(e + 4.0 * x.max(y) + 2.0 * x.min(y) - 2.0, 0),
    }
}

/// Minimax rate for the one-sequence functional `Q(theta)` over vectors with
/// at most `n^beta` nonzero entries. `beta` may range over `(0, 1)`; the
/// sparse display applies for `beta < 1/2` and the dense one for
/// `beta >= 1/2`. A `sqrt(d log n)` magnitude gives `n^{2beta-2} (log n)^2`
/// when `beta < 1/2` and sits inside the parametric `n^{-1}` plateau when
/// `beta >= 1/2`.
pub fn rate_one_seq(beta: f64, b: SignalStrength) -> Result<RateResult> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(SimsigError::ConstraintViolation(format!(
            "requires 0 < beta < 1, got {beta}"
        )));
    }
    Ok(match b {
        SignalStrength::LogScale(c) => {
            if c <= 0.0 {
                return Err(SimsigError::ConstraintViolation(
                    "LogScale coefficient must be > 0".into(),
                ));
            }
            if beta < 0.5 {
                RateResult::new(2.0 * beta - 2.0, 2)
            } else {
                RateResult::new(-1.0, 0)
            }
        }
        SignalStrength::Algebraic(b) => {
            if beta < 0.5 {
                if b <= 0.0 {
                    RateResult::new(2.0 * beta + 4.0 * b - 2.0, 0)
                } else if b <= beta / 2.0 {
                    RateResult::new(2.0 * beta - 2.0, 2)
                } else {
                    RateResult::new(beta + 2.0 * b - 2.0, 0)
                }
            } else if b <= (1.0 - 2.0 * beta) / 4.0 {
                RateResult::new(2.0 * beta + 4.0 * b - 2.0, 0)
            } else if b <= (1.0 - beta) / 2.0 {
                RateResult::new(-1.0, 0)
            } else {
                RateResult::new(beta + 2.0 * b - 2.0, 0)
            }
        }
    })
}

/// Which problem an l2-constrained rate refers to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum L2Kind {
    /// One sequence with sparsity exponent `beta` in `(0, 1)`.
    OneSeq { beta: f64 },
    /// Two sequences; the rate depends only on the strength exponents.
    TwoSeq { a_tilde: f64 },
}

/// Minimax rates when signal strength is an l2-norm budget `n^{b_tilde}`
/// instead of a sup-norm bound. The two-sequence rate is degenerate: it does
/// not involve the sparsities at all.
pub fn rate_l2(kind: L2Kind, b_tilde: f64) -> Result<RateResult> {
    Ok(match kind {
        L2Kind::TwoSeq { a_tilde } => {
            let lo = a_tilde.min(b_tilde);
            let hi = a_tilde.max(b_tilde);
            if lo <= 0.0 {
                RateResult::new(4.0 * a_tilde + 4.0 * b_tilde - 2.0, 0)
            } else {
                RateResult::new(4.0 * hi + 2.0 * lo - 2.0, 0)
            }
        }
        L2Kind::OneSeq { beta } => {
            if !(beta > 0.0 && beta < 1.0) {
                return Err(SimsigError::ConstraintViolation(format!(
                    "requires 0 < beta < 1, got {beta}"
                )));
            }
            if beta < 0.5 {
                if b_tilde <= beta / 2.0 {
                    RateResult::new(4.0 * b_tilde - 2.0, 0)
                } else if b_tilde <= beta {
                    RateResult::new(2.0 * beta - 2.0, 2)
                } else {
                    RateResult::new(2.0 * b_tilde - 2.0, 0)
                }
            } else if b_tilde <= 0.25 {
                RateResult::new(4.0 * b_tilde - 2.0, 0)
            } else if b_tilde <= 0.5 {
                RateResult::new(-1.0, 0)
            } else {
                RateResult::new(2.0 * b_tilde - 2.0, 0)
            }
        }
    })
}

/// Rate-optimal estimator plus a flag for boundary inputs where the zero
/// estimator and the thresholding estimator are both optimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimatorChoice {
    pub kind: EstimatorKind,
    pub boundary: bool,
}

/// Rate-optimal estimator over the unequal-strength space. Sparse regime:
/// `Q2` when `a ∧ b > 0`, else `Q0`. Dense regime: `Q4` when `a ∨ b > 0` and
/// `a ∧ b > (beta − 2 epsilon)/4`, else `Q0`. A `sqrt(log)` strength sits on
/// the weak/strong boundary (algebraic order zero); when the decision rests
/// on that tie the thresholding estimator is returned with `boundary` set.
pub fn optimal_estimator(
    beta: f64,
    epsilon: f64,
    a: SignalStrength,
    b: SignalStrength,
) -> Result<EstimatorChoice> {
    let regime = regime_of(beta, epsilon)?;
    let x = a.exponent_or_zero();
    let y = b.exponent_or_zero();
    let min = x.min(y);
    let max = x.max(y);
    let min_is_log = (x <= y && a.is_log_scale()) || (y <= x && b.is_log_scale());
    let max_is_log = (x >= y && a.is_log_scale()) || (y >= x && b.is_log_scale());

    Ok(match regime {
        RegimeLabel::Sparse => {
            if min > 0.0 {
                EstimatorChoice {
                    kind: EstimatorKind::Q2,
                    boundary: false,
                }
            } else if min == 0.0 && min_is_log {
                EstimatorChoice {
                    kind: EstimatorKind::Q2,
                    boundary: true,
                }
            } else {
                EstimatorChoice {
                    kind: EstimatorKind::Q0,
                    boundary: min == 0.0,
                }
            }
        }
        _ => {
            let gap = (beta - 2.0 * epsilon) / 4.0;
            if max > 0.0 && min > gap {
                EstimatorChoice {
                    kind: EstimatorKind::Q4,
                    boundary: false,
                }
            } else if (max == 0.0 && max_is_log && min > gap)
                || (min == gap && min_is_log && max > 0.0)
            {
                EstimatorChoice {
                    kind: EstimatorKind::Q4,
                    boundary: true,
                }
            } else {
                EstimatorChoice {
                    kind: EstimatorKind::Q0,
                    boundary: max == 0.0 || min == gap,
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const B: f64 = 0.45;

    fn alg(e: f64) -> SignalStrength {
        SignalStrength::Algebraic(e)
    }

    #[test]
    fn regime_examples_from_figure() {
        assert_eq!(regime_of(0.45, 0.12).unwrap(), RegimeLabel::Sparse);
        assert_eq!(regime_of(0.45, 0.28).unwrap(), RegimeLabel::ModeratelyDense);
        assert_eq!(regime_of(0.45, 0.4).unwrap(), RegimeLabel::StronglyDense);
        // closed boundaries
        assert_eq!(
            regime_of(0.4, 0.2).unwrap(),
            RegimeLabel::ModeratelyDense
        );
        assert_eq!(
            regime_of(0.4, 0.3).unwrap(),
            RegimeLabel::ModeratelyDense
        );
        assert!(regime_of(0.45, 0.5).is_err());
        assert!(regime_of(0.55, 0.3).is_err());
    }

    #[test]
    fn equal_strength_rate_examples() {
        let r = rate_two_seq_equal(0.45, 0.12, -0.1).unwrap();
        assert!((r.exponent + 2.56).abs() < 1e-12);
        assert_eq!(r.log_power, 0);
        assert!(!r.divergent);

        let r = rate_two_seq_equal(0.45, 0.3, 0.15).unwrap();
        assert!((r.exponent + 0.8).abs() < 1e-12);
        assert_eq!(r.log_power, 0);

        let r = rate_two_seq_equal(0.45, 0.4, 0.05).unwrap();
        assert!((r.exponent + 1.2).abs() < 1e-12);
        assert_eq!(r.log_power, 4);

        // divergence above (2 - epsilon)/6
        let r = rate_two_seq_equal(0.45, 0.3, 0.4).unwrap();
        assert!(r.divergent);
    }

    #[test]
    fn exponent_is_continuous_at_phase_boundaries() {
        let eps = 1e-9;
        let tol = 1e-7;
        for &(beta, e) in &[(0.45, 0.12), (0.45, 0.3), (0.45, 0.4), (0.3, 0.15), (0.49, 0.4)] {
            let breaks: Vec<f64> = match regime_of(beta, e).unwrap() {
                RegimeLabel::Sparse => vec![0.0, e / 2.0],
                RegimeLabel::ModeratelyDense => {
                    vec![0.0, (2.0 * e - beta) / 4.0, (beta - e) / 2.0]
                }
                RegimeLabel::StronglyDense => vec![0.0, e / 6.0],
            };
            for b0 in breaks {
                let left = rate_two_seq_equal(beta, e, b0 - eps).unwrap().exponent;
                let right = rate_two_seq_equal(beta, e, b0 + eps).unwrap().exponent;
                assert!(
                    (left - right).abs() < tol,
                    "discontinuity at beta={beta} eps={e} b={b0}: {left} vs {right}"
                );
            }
        }
    }

    #[test]
    fn general_table_examples() {
        // sparse closed formula: a ∧ b in (0, e/2] branch
        let t = rate_two_seq_general(B, 0.12, alg(0.2), alg(0.05)).unwrap();
        let r = t.rate.resolved();
        assert!((r.exponent + 0.96).abs() < 1e-12);
        assert_eq!(r.log_power, 2);
        assert!(!t.q0_optimal);

        // moderately dense max cell: a in ((beta-2e)/4, 0], b in (0, (2e-beta)/4]
        let t = rate_two_seq_general(B, 0.3, alg(-0.02), alg(0.02)).unwrap();
        match t.rate {
            TableRate::MaxOf(r1, r2) => {
                assert!((r1.exponent - (B + 4.0 * 0.02 - 2.0)).abs() < 1e-12);
                assert_eq!(r1.log_power, 0);
                assert!((r2.exponent - (2.0 * 0.3 + 4.0 * -0.02 - 2.0)).abs() < 1e-12);
                assert_eq!(r2.log_power, 2);
            }
            _ => panic!("expected max cell"),
        }
        let r = t.rate.resolved();
        assert!((r.exponent + 1.47).abs() < 1e-12);
        assert!(!t.q0_optimal);

        // below the (beta-2e)/4 row boundary the cell is a single shaded rate
        let t = rate_two_seq_general(B, 0.3, alg(-0.05), alg(0.02)).unwrap();
        assert_eq!(t.a_category, PhaseCategory::Weak);
        let r = t.rate.resolved();
        assert!((r.exponent - (2.0 * 0.3 + 4.0 * (-0.05) + 4.0 * 0.02 - 2.0)).abs() < 1e-12);
        assert!(t.q0_optimal);

        // deep-weak corner is always Q0-optimal in the dense regime
        let t = rate_two_seq_general(B, 0.3, alg(-0.2), alg(0.3)).unwrap();
        assert!(t.q0_optimal);
        assert_eq!(t.a_category, PhaseCategory::Weak);
    }

    #[test]
    fn one_seq_rate_examples() {
        let r = rate_one_seq(0.3, alg(0.1)).unwrap();
        assert!((r.exponent + 1.4).abs() < 1e-12);
        assert_eq!(r.log_power, 2);

        let r = rate_one_seq(0.7, alg(0.1)).unwrap();
        assert!((r.exponent + 1.0).abs() < 1e-12);
        assert_eq!(r.log_power, 0);

        let r = rate_one_seq(0.3, SignalStrength::LogScale(2.0)).unwrap();
        assert!((r.exponent + 1.4).abs() < 1e-12);
        assert_eq!(r.log_power, 2);

        assert!(rate_one_seq(1.0, alg(0.1)).is_err());
    }

    #[test]
    fn l2_rate_examples() {
        let r = rate_l2(L2Kind::TwoSeq { a_tilde: 0.1 }, -0.05).unwrap();
        assert!((r.exponent + 1.8).abs() < 1e-12);

        let r = rate_l2(L2Kind::TwoSeq { a_tilde: 0.2 }, 0.2).unwrap();
        assert!((r.exponent + 0.8).abs() < 1e-12);

        let r = rate_l2(L2Kind::OneSeq { beta: 0.4 }, 0.3).unwrap();
        assert!((r.exponent + 1.2).abs() < 1e-12);
        assert_eq!(r.log_power, 2);
    }

    #[test]
    fn l2_substitution_identity() {
        // b_tilde = beta/2 + b turns the l2 one-sequence rate into the
        // sup-norm one, including log powers.
        for beta in [0.1, 0.3, 0.49, 0.5, 0.7, 0.9] {
            for b in [-0.5, -0.1, 0.0, 0.05, 0.2, 0.5, 0.9] {
                let lhs = rate_l2(L2Kind::OneSeq { beta }, beta / 2.0 + b).unwrap();
                let rhs = rate_one_seq(beta, alg(b)).unwrap();
                assert!(
                    (lhs.exponent - rhs.exponent).abs() < 1e-12 && lhs.log_power == rhs.log_power,
                    "beta={beta} b={b}: {lhs:?} vs {rhs:?}"
                );
            }
        }
    }

    #[test]
    fn optimal_estimator_examples() {
        let c = optimal_estimator(B, 0.12, alg(0.1), alg(0.1)).unwrap();
        assert_eq!(c.kind, EstimatorKind::Q2);
        assert!(!c.boundary);

        let c = optimal_estimator(B, 0.3, alg(0.1), alg(-0.02)).unwrap();
        assert_eq!(c.kind, EstimatorKind::Q4);
        assert!(!c.boundary);

        let c = optimal_estimator(B, 0.12, alg(0.1), alg(-0.1)).unwrap();
        assert_eq!(c.kind, EstimatorKind::Q0);

        let c = optimal_estimator(B, 0.12, SignalStrength::LogScale(1.0), alg(0.1)).unwrap();
        assert_eq!(c.kind, EstimatorKind::Q2);
        assert!(c.boundary);

        // dense: sqrt(log) max with positive min is unambiguous Q4 territory
        let c = optimal_estimator(B, 0.3, SignalStrength::LogScale(1.0), alg(0.1)).unwrap();
        assert_eq!(c.kind, EstimatorKind::Q4);
    }

    #[test]
    fn q0_region_matches_optimal_estimator() {
        let grid = [-0.3, -0.1, -0.0375, 0.0, 0.01, 0.06, 0.1, 0.25];
        for &e in &[0.12, 0.3, 0.4] {
            for &xa in &grid {
                for &xb in &grid {
                    let t = rate_two_seq_general(B, e, alg(xa), alg(xb)).unwrap();
                    let c = optimal_estimator(B, e, alg(xa), alg(xb)).unwrap();
                    let shaded = c.kind == EstimatorKind::Q0 || c.boundary;
                    assert_eq!(
                        t.q0_optimal, shaded,
                        "mismatch at eps={e} a={xa} b={xb}: {t:?} vs {c:?}"
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn diagonal_consistency(
            beta in 0.05f64..0.499,
            efrac in 0.01f64..1.0,
            b in -0.5f64..0.5,
        ) {
            let e = beta * efrac;
            prop_assume!(e > 0.0);
            let eq = rate_two_seq_equal(beta, e, b).unwrap();
            let gen = rate_two_seq_general(beta, e, alg(b), alg(b)).unwrap().rate.resolved();
            prop_assert!(
                (eq.exponent - gen.exponent).abs() < 1e-12 && eq.log_power == gen.log_power,
                "beta={beta} e={e} b={b}: equal {eq:?} vs table {gen:?}"
            );
        }

        #[test]
        fn monotone_in_b_and_epsilon(
            beta in 0.05f64..0.499,
            efrac in 0.02f64..1.0,
            b1 in -0.5f64..0.5,
            db in 0.0f64..0.3,
            de_frac in 0.0f64..0.5,
        ) {
            let e1 = beta * efrac;
            let e2 = (e1 + beta * de_frac).min(beta);
            let r_b1 = rate_two_seq_equal(beta, e1, b1).unwrap().exponent;
            let r_b2 = rate_two_seq_equal(beta, e1, b1 + db).unwrap().exponent;
            prop_assert!(r_b2 >= r_b1 - 1e-12, "not monotone in b");
            let r_e2 = rate_two_seq_equal(beta, e2, b1).unwrap().exponent;
            prop_assert!(r_e2 >= r_b1 - 1e-12, "not monotone in epsilon");
        }

        #[test]
        fn table_is_symmetric_in_a_b(
            beta in 0.05f64..0.499,
            efrac in 0.01f64..1.0,
            ea in -0.4f64..0.4,
            eb in -0.4f64..0.4,
        ) {
            let e = beta * efrac;
            prop_assume!(e > 0.0);
            let t1 = rate_two_seq_general(beta, e, alg(ea), alg(eb)).unwrap();
            let t2 = rate_two_seq_general(beta, e, alg(eb), alg(ea)).unwrap();
            let r1 = t1.rate.resolved();
            let r2 = t2.rate.resolved();
            prop_assert!((r1.exponent - r2.exponent).abs() < 1e-12);
            prop_assert_eq!(r1.log_power, r2.log_power);
            prop_assert_eq!(t1.q0_optimal, t2.q0_optimal);
        }
    }
}
