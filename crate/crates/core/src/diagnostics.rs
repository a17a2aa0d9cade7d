//! Computable pieces of the lower-bound machinery: chi-square affinities of
//! the least-favorable prior pairs, the constrained-risk-inequality bound,
//! and the per-term bias/variance bound evaluators used by the estimator
//! analyses.
//!
//! The mixture priors all reduce to `E[w^M]` where `M` counts support
//! overlap and follows a hypergeometric law; the closed-form upper bound
//! `(1 − q/k + (q/k) w)^q` replaces `M` by a Binomial via a coupling plus
//! Jensen. Sums and bounds are evaluated in log space so large `k` and
//! strong signals degrade to `+inf` instead of panicking.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimsigError};
use crate::normal::{phi, std_normal_sf};

/// Which least-favorable prior pair an affinity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PriorKind {
    /// One sequence fixed, the other's support mixed over the first's
    /// support at magnitude `rho`: per-overlap weight `e^{rho²/σ²}`.
    ShiftMixture,
    /// As above with signs mixed too: weight `cosh(rho²/σ²)`.
    SignMixture,
    /// Both sequences mixed simultaneously over all positions (pass the
    /// ambient dimension as `k`): weight `e^{2 rho²/σ²}`.
    FullMixture,
    /// No mixing; nonzero entries perturbed by `delta`.
    Perturbation,
}

/// Exact chi-square affinity and its closed-form upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffinityResult {
    /// Exact affinity from the hypergeometric sum; `None` above the exact
    /// evaluation cutoff (`k > 10^6`).
    pub exact: Option<f64>,
    /// The Binomial/Jensen bound; always finite or `+inf`.
    pub bound: f64,
    pub prior_kind: PriorKind,
}

/// Cutoff above which the hypergeometric sum is skipped.
const EXACT_K_LIMIT: u64 = 1_000_000;

fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    libm::lgamma((n + 1) as f64) - libm::lgamma((k + 1) as f64) - libm::lgamma((n - k + 1) as f64)
}

/// `ln cosh(x)` without overflow.
fn ln_cosh(x: f64) -> f64 {
    let ax = x.abs();
    ax + (-2.0 * ax).exp().ln_1p() - std::f64::consts::LN_2
}

/// Exact `E[w^M]` for `M` hypergeometric with pmf
/// `C(q, m) C(k − q, q − m) / C(k, q)`, evaluated by log-sum-exp.
fn hypergeometric_mgf(k: u64, q: u64, ln_w: f64) -> f64 {
    let m_lo = q.saturating_sub(k - q);
    let ln_ckq = ln_binomial(k, q);
    let mut terms = Vec::with_capacity((q - m_lo + 1) as usize);
    for m in m_lo..=q {
        let ln_pmf = ln_binomial(q, m) + ln_binomial(k - q, q - m) - ln_ckq;
        terms.push(ln_pmf + m as f64 * ln_w);
    }
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    let ln_total = max + sum.ln();
    if ln_total > f64::MAX.ln() {
        f64::INFINITY
    } else {
        ln_total.exp()
    }
}

/// `(1 − q/k + (q/k) e^{ln_w})^q` in log space.
fn binomial_bound(k: u64, q: u64, ln_w: f64) -> f64 {
    let frac = q as f64 / k as f64;
    // ln(1 − frac + frac e^{ln_w}), stable for huge ln_w.
    let t = frac.ln() + ln_w;
    let ln_base = if t > 30.0 {
        t + ((1.0 - frac) * (-t).exp()).ln_1p()
    } else {
        ((ln_w.exp_m1()) * frac).ln_1p()
    };
    let ln_total = q as f64 * ln_base;
    if ln_total > f64::MAX.ln() {
        f64::INFINITY
    } else {
        ln_total.exp()
    }
}

/// Chi-square affinity of a mixture prior pair. `k` is the number of mixed
/// positions (the ambient dimension for [`PriorKind::FullMixture`]), `q` the
/// number of simultaneous coordinates, `rho` the planted magnitude.
pub fn affinity_mixture(
    kind: PriorKind,
    k: u64,
    q: u64,
    rho: f64,
    sigma: f64,
) -> Result<AffinityResult> {
    if kind == PriorKind::Perturbation {
        return Err(SimsigError::ConstraintViolation(
            "perturbation priors go through affinity_perturbation".into(),
        ));
    }
    if q < 1 || q > k {
        return Err(SimsigError::ConstraintViolation(format!(
            "requires 1 <= q <= k, got q = {q}, k = {k}"
        )));
    }
    if !(rho >= 0.0) {
        return Err(SimsigError::ConstraintViolation(format!(
            "requires rho >= 0, got {rho}"
        )));
    }
    if !(sigma > 0.0) {
        return Err(SimsigError::DomainError(format!(
            "sigma must be > 0, got {sigma}"
        )));
    }
    let x = rho * rho / (sigma * sigma);
    let ln_w = match kind {
        PriorKind::ShiftMixture => x,
        PriorKind::SignMixture => ln_cosh(x),
        PriorKind::FullMixture => 2.0 * x,
        PriorKind::Perturbation => unreachable!(),
    };
    let exact = (k <= EXACT_K_LIMIT).then(|| hypergeometric_mgf(k, q, ln_w));
    Ok(AffinityResult {
        exact,
        bound: binomial_bound(k, q, ln_w),
        prior_kind: kind,
    })
}

/// Chi-square affinity `e^{q delta²/σ²}` of the perturbation prior pair;
/// exact and bound coincide.
pub fn affinity_perturbation(q: u64, delta: f64, sigma: f64) -> Result<AffinityResult> {
    if q < 1 {
        return Err(SimsigError::ConstraintViolation(format!(
            "requires q >= 1, got {q}"
        )));
    }
    if !(sigma > 0.0) {
        return Err(SimsigError::DomainError(format!(
            "sigma must be > 0, got {sigma}"
        )));
    }
    let ln_xi = q as f64 * delta * delta / (sigma * sigma);
    let xi = if ln_xi > f64::MAX.ln() {
        f64::INFINITY
    } else {
        ln_xi.exp()
    };
    Ok(AffinityResult {
        exact: Some(xi),
        bound: xi,
        prior_kind: PriorKind::Perturbation,
    })
}

/// Constrained-risk-inequality lower bound `Δ² / (1 + √ξ)²` on the minimax
/// squared-error risk, for prior pairs with functional gap `Δ` and
/// chi-square affinity `ξ >= 1`.
pub fn cri_lower_bound(delta_q: f64, xi: f64) -> Result<f64> {
    if !(xi >= 1.0) {
        return Err(SimsigError::ConstraintViolation(format!(
            "chi-square affinity must be >= 1, got {xi}"
        )));
    }
    Ok(delta_q * delta_q / (1.0 + xi.sqrt()).powi(2))
}

/// Closed-form per-term bias/variance bounds for the thresholded
/// estimators, evaluated at one coordinate `(mu, theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermBounds {
    /// `|θ₀| <= 4σ² / (√(2π) √τ e^{τ/2})`.
    pub theta0_abs_bound: f64,
    /// Bias bound `min{2σ²τ, θ²}` for the thresholded square.
    pub q1_bias_bound: f64,
    /// Variance bound `6σ²θ² + σ⁴ (4√τ + 18) e^{−τ/2}`.
    pub q1_var_bound: f64,
    /// Bias bound for the jointly thresholded product term.
    pub q4_bias_bound: f64,
    /// Variance bound for the jointly thresholded product term; the null
    /// branch uses `d = E₀₀[(X²−σ²)⁴(Y²−σ²)⁴] = (60 σ⁸)²`.
    pub q4_var_bound: f64,
}

/// Evaluate the per-term bounds at `(mu, theta, tau, sigma)`; requires
/// `tau >= 1` (their validity range).
pub fn term_bounds(mu: f64, theta: f64, tau: f64, sigma: f64) -> Result<TermBounds> {
    if !(tau >= 1.0) {
        return Err(SimsigError::ConstraintViolation(format!(
            "term bounds need tau >= 1, got {tau}"
        )));
    }
    if !(sigma > 0.0) {
        return Err(SimsigError::DomainError(format!(
            "sigma must be > 0, got {sigma}"
        )));
    }
    let s2 = sigma * sigma;
    let s4 = s2 * s2;
    let rt = tau.sqrt();
    let theta0_abs_bound = 4.0 * s2 / ((2.0 * std::f64::consts::PI).sqrt() * rt * (tau / 2.0).exp());
    let q1_bias_bound = (2.0 * s2 * tau).min(theta * theta);
    let q1_var_bound = 6.0 * s2 * theta * theta + s4 * (4.0 * rt + 18.0) * (-tau / 2.0).exp();

    let mu_clip = (mu * mu).min(3.0 * s2 * tau);
    let theta_clip = (theta * theta).min(3.0 * s2 * tau);
    let edge = 2.0 * s2 * rt * phi(rt);
    let q4_bias_bound = mu_clip * theta_clip + edge * (mu_clip + theta_clip);

    let q4_var_bound = if mu == 0.0 && theta == 0.0 {
        let d_sqrt = 60.0 * s4 * s4;
        2.0 * d_sqrt * std_normal_sf(rt).sqrt()
    } else {
        let (m2, t2) = (mu * mu, theta * theta);
        4.0 * s2 * m2 * m2 * t2
            + 4.0 * s2 * m2 * t2 * t2
            + 16.0 * s4 * m2 * t2
            + 2.0 * s4 * m2 * m2
            + 2.0 * s4 * t2 * t2
            + 8.0 * s4 * s2 * m2
            + 8.0 * s4 * s2 * t2
            + 4.0 * s4 * s4
            + 8.0 * s4 * m2 * t2 * tau * tau
    };

    Ok(TermBounds {
        theta0_abs_bound,
        q1_bias_bound,
        q1_var_bound,
        q4_bias_bound,
        q4_var_bound,
    })
}
