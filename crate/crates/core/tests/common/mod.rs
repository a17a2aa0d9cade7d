//! Shared oracles for the integration suites. Everything here recomputes
//! target quantities from their definitions (quadrature of the defining
//! integral, Monte-Carlo means of the defining expectation), independently
//! of the closed forms under test.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Composite-Simpson quadrature on [lo, hi]. Callers pick intervals on
/// which the integrand is smooth.
pub fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> f64 {
    let steps = steps + steps % 2;
    let h = (hi - lo) / steps as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + i as f64 * h);
    }
    acc * h / 3.0
}

fn normal_pdf(y: f64) -> f64 {
    (-0.5 * y * y).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Quadrature oracle for `E0 (Y^2 - sigma^2 tau)_+`, `Y ~ N(0, sigma^2)`:
/// `2 sigma^2 ∫_{sqrt(tau)}^∞ (z^2 - tau) phi(z) dz`, truncated where the
/// relative tail contribution is far below 1e-12.
pub fn theta0_quadrature(tau: f64, sigma: f64) -> f64 {
    let rt = tau.sqrt();
    2.0 * sigma * sigma * simpson(|z| (z * z - tau) * normal_pdf(z), rt, rt + 22.0, 400_000)
}

/// Monte-Carlo mean and standard error of `f(X, Y)` over `reps` draws with
/// `X = mu + sigma Z1`, `Y = theta + sigma Z2`. Batched and parallel;
/// deterministic in `seed`.
pub fn mc_mean_se(
    mu: f64,
    theta: f64,
    sigma: f64,
    reps: usize,
    seed: u64,
    f: impl Fn(f64, f64) -> f64 + Sync,
) -> (f64, f64) {
    let batches = 64usize;
    let per = reps / batches;
    let partials: Vec<(f64, f64, usize)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = if b == batches - 1 {
                reps - per * (batches - 1)
            } else {
                per
            };
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..count {
                let x = mu + sigma * rng.sample::<f64, _>(StandardNormal);
                let y = theta + sigma * rng.sample::<f64, _>(StandardNormal);
                let v = f(x, y);
                sum += v;
                sumsq += v * v;
            }
            (sum, sumsq, count)
        })
        .collect();
    let (sum, sumsq, count) = partials
        .iter()
        .fold((0.0, 0.0, 0usize), |acc, p| (acc.0 + p.0, acc.1 + p.1, acc.2 + p.2));
    let nf = count as f64;
    let mean = sum / nf;
    let var = (sumsq / nf - mean * mean).max(0.0);
    (mean, (var / nf).sqrt())
}

/// Monte-Carlo variance of `f(X, Y)` with the standard error of the
/// variance estimate (from the fourth central moment).
pub fn mc_var_se(
    mu: f64,
    theta: f64,
    sigma: f64,
    reps: usize,
    seed: u64,
    f: impl Fn(f64, f64) -> f64 + Sync,
) -> (f64, f64) {
    // two passes keep the central-moment accumulation simple
    let (mean, _) = mc_mean_se(mu, theta, sigma, reps, seed, &f);
    let batches = 64usize;
    let per = reps / batches;
    let partials: Vec<(f64, f64, usize)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = if b == batches - 1 {
                reps - per * (batches - 1)
            } else {
                per
            };
            let mut m2 = 0.0;
            let mut m4 = 0.0;
            for _ in 0..count {
                let x = mu + sigma * rng.sample::<f64, _>(StandardNormal);
                let y = theta + sigma * rng.sample::<f64, _>(StandardNormal);
                let d = f(x, y) - mean;
                m2 += d * d;
                m4 += d * d * d * d;
            }
            (m2, m4, count)
        })
        .collect();
    let (m2, m4, count) = partials
        .iter()
        .fold((0.0, 0.0, 0usize), |acc, p| (acc.0 + p.0, acc.1 + p.1, acc.2 + p.2));
    let nf = count as f64;
    let var = m2 / nf;
    let se = ((m4 / nf - var * var).max(0.0) / nf).sqrt();
    (var, se)
}
