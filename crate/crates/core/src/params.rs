//! Parameter spaces, mean-pair configurations, and observation sampling for
//! the Gaussian two-sequence model
//!
//! ```text
//!     X_i = mu_i + sigma * z'_i,    Y_i = theta_i + sigma * z_i,
//! ```
//!
//! with all `2n` noise variables iid standard normal. A parameter-space
//! member constrains the support sizes of `mu` and `theta` (at most `k`
//! nonzero each), the number of simultaneously nonzero coordinates (at most
//! `q`), and the sup-norms (at most `r` and `s`).

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimsigError};
use crate::rng::stream_rng;

/// Per-coordinate signal magnitude, either algebraic `n^e` or the
/// `sigma * sqrt(c * log n)` calibration that sits on the weak/strong
/// boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SignalStrength {
    /// Magnitude `n^e`.
    Algebraic(f64),
    /// Magnitude `sigma * sqrt(c * log n)`, `c > 0`.
    LogScale(f64),
}

impl SignalStrength {
    /// Resolve the magnitude at a given vector length and noise level.
    pub fn magnitude(&self, n: usize, sigma: f64) -> Result<f64> {
        match *self {
            SignalStrength::Algebraic(e) => Ok((n as f64).powf(e)),
            SignalStrength::LogScale(c) => {
                if c <= 0.0 {
                    return Err(SimsigError::ConstraintViolation(format!(
                        "LogScale coefficient must be > 0, got {c}"
                    )));
                }
                Ok(sigma * (c * (n as f64).ln()).sqrt())
            }
        }
    }

    /// The algebraic exponent used in rate and region formulas. A
    /// `sqrt(log n)` magnitude has algebraic order zero.
    pub fn exponent_or_zero(&self) -> f64 {
        match *self {
            SignalStrength::Algebraic(e) => e,
            SignalStrength::LogScale(_) => 0.0,
        }
    }

    pub fn is_log_scale(&self) -> bool {
        matches!(self, SignalStrength::LogScale(_))
    }
}

/// One experiment cell: vector length, sparsity exponents, signal strengths,
/// and the integer sparsities / magnitudes they resolve to at this `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemParams {
    pub n: usize,
    pub beta: f64,
    pub epsilon: f64,
    pub a: SignalStrength,
    pub b: SignalStrength,
    pub sigma: f64,
    /// Per-sequence sparsity `max(1, floor(n^beta))`.
    pub k: usize,
    /// Simultaneous sparsity `max(1, floor(n^epsilon))`.
    pub q: usize,
    /// Magnitude of `mu` entries resolved from `a`.
    pub r: f64,
    /// Magnitude of `theta` entries resolved from `b`.
    pub s: f64,
}

/// Build a [`ProblemParams`], checking `n >= 2`, `0 < epsilon <= beta < 1/2`,
/// and `sigma > 0`. Integer sparsities use the floor clamped below at 1.
pub fn derive_params(
    n: usize,
    beta: f64,
    epsilon: f64,
    a: SignalStrength,
    b: SignalStrength,
    sigma: f64,
) -> Result<ProblemParams> {
    if n < 2 {
        return Err(SimsigError::DegenerateSize(n));
    }
    check_sparsity_exponents(beta, epsilon)?;
    if !(sigma > 0.0) {
        return Err(SimsigError::DomainError(format!(
            "sigma must be > 0, got {sigma}"
        )));
    }
    let nf = n as f64;
    let k = (nf.powf(beta).floor() as usize).max(1);
    let q = (nf.powf(epsilon).floor() as usize).max(1);
    let r = a.magnitude(n, sigma)?;
    let s = b.magnitude(n, sigma)?;
    Ok(ProblemParams {
        n,
        beta,
        epsilon,
        a,
        b,
        sigma,
        k,
        q,
        r,
        s,
    })
}

pub(crate) fn check_sparsity_exponents(beta: f64, epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= beta && beta < 0.5) {
        return Err(SimsigError::ConstraintViolation(format!(
            "requires 0 < epsilon <= beta < 0.5, got epsilon = {epsilon}, beta = {beta}"
        )));
    }
    Ok(())
}

/// Sign assignment for the nonzero entries of a generated pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignPattern {
    AllPositive,
    /// Independent ±1 signs drawn from the pair seed.
    Rademacher,
}

/// Support layout of a generated `(mu, theta)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairLayout {
    /// `q` simultaneous coordinates at `(±r, ±s)`, then `k − q` mu-only and
    /// `k − q` theta-only coordinates, in disjoint blocks. This layout
    /// saturates every constraint of the parameter space and attains the
    /// worst-case value of the quadratic functional.
    FullOverlapStress,
    /// Only the `q` simultaneous coordinates.
    OverlapOnly,
    /// `k` mu-only and `k` theta-only coordinates, disjoint supports, so
    /// the simultaneous signal count is zero.
    NullOnly,
}

/// How a [`MeanPair`] is realized from a [`ProblemParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairConfig {
    pub layout: PairLayout,
    pub sign: SignPattern,
}

impl PairConfig {
    pub fn stress() -> Self {
        PairConfig {
            layout: PairLayout::FullOverlapStress,
            sign: SignPattern::AllPositive,
        }
    }
}

/// A sparse `(mu, theta)` configuration with its recorded support counts.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanPair {
    pub mu: Vec<f64>,
    pub theta: Vec<f64>,
    pub mu_nonzero: usize,
    pub theta_nonzero: usize,
    pub overlap_nonzero: usize,
}

impl MeanPair {
    /// Wrap arbitrary mean vectors, recording their support counts.
    pub fn from_vectors(mu: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        if mu.len() != theta.len() {
            return Err(SimsigError::LengthMismatch {
                x: mu.len(),
                y: theta.len(),
            });
        }
        let mu_nonzero = mu.iter().filter(|v| **v != 0.0).count();
        let theta_nonzero = theta.iter().filter(|v| **v != 0.0).count();
        let overlap_nonzero = mu
            .iter()
            .zip(&theta)
            .filter(|(m, t)| **m != 0.0 && **t != 0.0)
            .count();
        Ok(MeanPair {
            mu,
            theta,
            mu_nonzero,
            theta_nonzero,
            overlap_nonzero,
        })
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }
}

/// One noisy realization of the two-sequence model.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationPair {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Realize a parameter-space member for `params` under the given layout.
/// Deterministic in `seed`; the seed only matters for `Rademacher` signs.
pub fn generate_pair(params: &ProblemParams, config: PairConfig, seed: u64) -> Result<MeanPair> {
    let (n, k, q) = (params.n, params.k, params.q);
    let needed = match config.layout {
        PairLayout::FullOverlapStress => 2 * k - q,
        PairLayout::OverlapOnly => q,
        PairLayout::NullOnly => 2 * k,
    };
    if needed > n {
        return Err(SimsigError::ConfigInfeasible(format!(
            "layout {:?} needs {needed} coordinates but n = {n} (k = {k}, q = {q})",
            config.layout
        )));
    }

    let mut mu = vec![0.0; n];
    let mut theta = vec![0.0; n];
    match config.layout {
        PairLayout::FullOverlapStress => {
            for v in mu.iter_mut().take(k) {
                *v = params.r;
            }
            for v in theta.iter_mut().take(q) {
                *v = params.s;
            }
            for v in theta.iter_mut().take(2 * k - q).skip(k) {
                *v = params.s;
            }
        }
        PairLayout::OverlapOnly => {
            for i in 0..q {
                mu[i] = params.r;
                theta[i] = params.s;
            }
        }
        PairLayout::NullOnly => {
            for i in 0..k {
                mu[i] = params.r;
                theta[k + i] = params.s;
            }
        }
    }
    if config.sign == SignPattern::Rademacher {
        let mut rng = stream_rng(seed, &[0x7061_6972]);
        for v in mu.iter_mut().chain(theta.iter_mut()) {
            if *v != 0.0 && rng.gen::<bool>() {
                *v = -*v;
            }
        }
    }
    MeanPair::from_vectors(mu, theta)
}

/// Membership predicate for the parameter space resolved by `params`:
/// support counts within `(k, k, q)` and sup-norms within `(r, s)`.
pub fn satisfies_omega(params: &ProblemParams, pair: &MeanPair) -> bool {
    let tol = 1e-12;
    pair.len() == params.n
        && pair.mu_nonzero <= params.k
        && pair.theta_nonzero <= params.k
        && pair.overlap_nonzero <= params.q
        && pair.mu.iter().all(|v| v.abs() <= params.r * (1.0 + tol))
        && pair.theta.iter().all(|v| v.abs() <= params.s * (1.0 + tol))
}

/// Draw one observation pair `X = mu + sigma Z'`, `Y = theta + sigma Z`.
/// Deterministic in `seed`; the `x` coordinates consume the stream first.
pub fn sample_observations(pair: &MeanPair, sigma: f64, seed: u64) -> Result<ObservationPair> {
    if !(sigma > 0.0) {
        return Err(SimsigError::DomainError(format!(
            "sigma must be > 0, got {sigma}"
        )));
    }
    let mut rng = stream_rng(seed, &[0x6f_6273]);
    let x = pair
        .mu
        .iter()
        .map(|m| m + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let y = pair
        .theta
        .iter()
        .map(|t| t + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(ObservationPair { x, y })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strength(e: f64) -> SignalStrength {
        SignalStrength::Algebraic(e)
    }

    #[test]
    fn derive_params_resolves_example_cell() {
        let p = derive_params(10_000, 0.45, 0.3, strength(0.15), strength(0.15), 1.0).unwrap();
        assert_eq!(p.k, 63);
        assert_eq!(p.q, 15);
        assert!((p.r - 10f64.powf(0.6)).abs() < 1e-9);
        assert!((p.s - p.r).abs() == 0.0);
    }

    #[test]
    fn derive_params_clamps_small_n() {
        let p = derive_params(2, 0.1, 0.05, strength(0.0), strength(0.0), 1.0).unwrap();
        assert_eq!(p.k, 1);
        assert_eq!(p.q, 1);
    }

    #[test]
    fn derive_params_rejects_bad_exponents() {
        assert!(matches!(
            derive_params(10_000, 0.45, 0.5, strength(0.0), strength(0.0), 1.0),
            Err(SimsigError::ConstraintViolation(_))
        ));
        assert!(matches!(
            derive_params(1, 0.3, 0.2, strength(0.0), strength(0.0), 1.0),
            Err(SimsigError::DegenerateSize(1))
        ));
        assert!(matches!(
            derive_params(100, 0.3, 0.2, strength(0.0), strength(0.0), 0.0),
            Err(SimsigError::DomainError(_))
        ));
    }

    #[test]
    fn log_scale_magnitude() {
        let p = derive_params(
            10_000,
            0.45,
            0.3,
            SignalStrength::LogScale(2.0),
            strength(0.1),
            2.0,
        )
        .unwrap();
        assert!((p.r - 2.0 * (2.0 * (10_000f64).ln()).sqrt()).abs() < 1e-12);
        assert!(matches!(
            SignalStrength::LogScale(0.0).magnitude(100, 1.0),
            Err(SimsigError::ConstraintViolation(_))
        ));
    }

    #[test]
    fn stress_layout_matches_block_structure() {
        // n=10, k=3, q=1, r=s=2: mu = (2,2,2,0,...), theta = (2,0,0,2,2,0,...).
        let mut p = derive_params(10, 0.4, 0.3, strength(0.0), strength(0.0), 1.0).unwrap();
        p.k = 3;
        p.q = 1;
        p.r = 2.0;
        p.s = 2.0;
        let pair = generate_pair(&p, PairConfig::stress(), 1).unwrap();
        assert_eq!(pair.mu, vec![2.0, 2.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(
            pair.theta,
            vec![2.0, 0.0, 0.0, 2.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(pair.mu_nonzero, 3);
        assert_eq!(pair.theta_nonzero, 3);
        assert_eq!(pair.overlap_nonzero, 1);
        assert!(satisfies_omega(&p, &pair));
    }

    #[test]
    fn null_only_has_no_overlap() {
        let p = derive_params(100, 0.4, 0.3, strength(0.1), strength(0.1), 1.0).unwrap();
        let pair = generate_pair(
            &p,
            PairConfig {
                layout: PairLayout::NullOnly,
                sign: SignPattern::AllPositive,
            },
            7,
        )
        .unwrap();
        assert_eq!(pair.overlap_nonzero, 0);
        assert_eq!(pair.mu_nonzero, p.k);
        assert_eq!(pair.theta_nonzero, p.k);
        assert!(satisfies_omega(&p, &pair));
    }

    #[test]
    fn infeasible_layout_is_rejected() {
        let mut p = derive_params(10, 0.4, 0.3, strength(0.0), strength(0.0), 1.0).unwrap();
        p.k = 8;
        p.q = 1;
        assert!(matches!(
            generate_pair(&p, PairConfig::stress(), 0),
            Err(SimsigError::ConfigInfeasible(_))
        ));
    }

    #[test]
    fn generation_is_deterministic_and_sign_preserving() {
        let p = derive_params(200, 0.45, 0.3, strength(0.1), strength(0.2), 1.0).unwrap();
        let cfg = PairConfig {
            layout: PairLayout::FullOverlapStress,
            sign: SignPattern::Rademacher,
        };
        let p1 = generate_pair(&p, cfg, 11).unwrap();
        let p2 = generate_pair(&p, cfg, 11).unwrap();
        let p3 = generate_pair(&p, cfg, 12).unwrap();
        assert_eq!(p1, p2);
        assert_ne!(p1, p3);
        // Signs leave magnitudes untouched.
        let base = generate_pair(&p, PairConfig::stress(), 11).unwrap();
        for (a, b) in p1.mu.iter().zip(&base.mu) {
            assert_eq!(a.abs(), b.abs());
        }
        assert!(satisfies_omega(&p, &p1));
    }

    #[test]
    fn observations_are_deterministic_and_nearly_noiseless_at_tiny_sigma() {
        let p = derive_params(50, 0.4, 0.3, strength(0.1), strength(0.1), 1.0).unwrap();
        let pair = generate_pair(&p, PairConfig::stress(), 3).unwrap();
        let o1 = sample_observations(&pair, 1e-12, 99).unwrap();
        let o2 = sample_observations(&pair, 1e-12, 99).unwrap();
        assert_eq!(o1, o2);
        for (x, m) in o1.x.iter().zip(&pair.mu) {
            assert!((x - m).abs() < 1e-9);
        }
        for (y, t) in o1.y.iter().zip(&pair.theta) {
            assert!((y - t).abs() < 1e-9);
        }
    }

    #[test]
    fn overlap_only_layout() {
        let p = derive_params(100, 0.4, 0.3, strength(0.1), strength(0.2), 1.0).unwrap();
        let pair = generate_pair(
            &p,
            PairConfig {
                layout: PairLayout::OverlapOnly,
                sign: SignPattern::AllPositive,
            },
            0,
        )
        .unwrap();
        assert_eq!(pair.mu_nonzero, p.q);
        assert_eq!(pair.theta_nonzero, p.q);
        assert_eq!(pair.overlap_nonzero, p.q);
        assert!(satisfies_omega(&p, &pair));
    }

    proptest::proptest! {
        #[test]
        fn generated_pairs_satisfy_omega(
            n in 10usize..400,
            beta in 0.05f64..0.499,
            efrac in 0.05f64..1.0,
            b in -0.3f64..0.3,
            layout_pick in 0u8..3,
            rademacher in proptest::bool::ANY,
            seed in 0u64..1000,
        ) {
            let eps = beta * efrac;
            proptest::prop_assume!(eps > 0.0);
            let params = derive_params(n, beta, eps, strength(b), strength(b), 1.0).unwrap();
            let layout = match layout_pick {
                0 => PairLayout::FullOverlapStress,
                1 => PairLayout::OverlapOnly,
                _ => PairLayout::NullOnly,
            };
            let sign = if rademacher {
                SignPattern::Rademacher
            } else {
                SignPattern::AllPositive
            };
            match generate_pair(&params, PairConfig { layout, sign }, seed) {
                Ok(pair) => proptest::prop_assert!(satisfies_omega(&params, &pair)),
                Err(SimsigError::ConfigInfeasible(_)) => {}
                Err(other) => return Err(proptest::test_runner::TestCaseError::fail(
                    format!("unexpected error {other}"),
                )),
            }
        }
    }

    #[test]
    fn noise_moments_match_clt_bounds() {
        // Mean within 3 sigma/sqrt(N), variance within 1%.
        let pair = MeanPair::from_vectors(vec![0.0; 1000], vec![0.0; 1000]).unwrap();
        let sigma = 1.7;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        let reps = 1000; // 10^6 draws total
        for r in 0..reps {
            let obs = sample_observations(&pair, sigma, r as u64).unwrap();
            for v in obs.x.iter().chain(obs.y.iter()) {
                sum += v;
                sumsq += v * v;
            }
        }
        let count = (2_000 * reps) as f64;
        let mean = sum / count;
        let var = sumsq / count - mean * mean;
        assert!(mean.abs() < 3.0 * sigma / count.sqrt() * 3.0);
        assert!((var - sigma * sigma).abs() < 0.01 * sigma * sigma);
    }
}
