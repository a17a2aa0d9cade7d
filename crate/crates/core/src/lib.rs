//! Estimation and detection of simultaneous signals in the Gaussian
//! two-sequence model.
//!
//! Paired observations `X_i = mu_i + sigma z'_i`, `Y_i = theta_i + sigma z_i`
//! carry a simultaneous signal at coordinate `i` when `mu_i theta_i != 0`.
//! The crate estimates the quadratic functional
//! `Q(mu, theta) = (1/n) Σ mu_i² theta_i²` — which is zero exactly when no
//! simultaneous signal exists — and tests for its presence:
//!
//! * [`params`] — parameter spaces, sparse mean-pair layouts, seeded
//!   observation sampling;
//! * [`estimators`] — `Q0`–`Q5`, their debiasing constants in closed form,
//!   truncated Gaussian moments, the exact mean of `Q4`, and the MAD noise
//!   estimator;
//! * [`rates`] — minimax rate exponents and phase transitions for every
//!   parameter-space family, including the unequal-strength tables and the
//!   l2-constraint variants;
//! * [`detection`] — detectable/undetectable region classification and the
//!   threshold tests built from `Q1`–`Q4`;
//! * [`diagnostics`] — chi-square affinities of the least-favorable priors,
//!   the constrained-risk-inequality bound, and per-term bias/variance
//!   bound evaluators;
//! * [`harness`] — deterministic Monte-Carlo MSE and detection experiments
//!   with CSV persistence and log-log slope fitting;
//! * [`svgplot`] — static SVG line charts and region maps.

// `!(x > 0.0)`-style guards are used throughout so that NaN arguments fail
// validation instead of slipping past a `x <= 0.0` check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detection;
pub mod diagnostics;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod normal;
pub mod params;
pub mod rates;
pub mod rng;
pub mod svgplot;

pub use error::{Result, SimsigError};
pub use estimators::{EstimatorKind, EstimatorSettings};
pub use params::{MeanPair, ObservationPair, PairConfig, ProblemParams, SignalStrength};
pub use rates::{RateResult, RegimeLabel};
