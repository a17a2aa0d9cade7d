//! Deterministic Monte-Carlo experiment runner: MSE studies over a grid of
//! cells, detection error-rate experiments, slope fitting, and CSV
//! persistence.
//!
//! Every cell draws one fixed mean pair and redraws only the noise across
//! replications; the per-replication stream is derived from
//! `(master_seed, cell index, replication index)`, and reductions run in
//! replication order, so output bytes are identical for any worker count.
//! Within a cell, all estimators see the same observations (common random
//! numbers), which sharpens estimator comparisons at equal cost.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimsigError};
use crate::estimators::{estimate, mad_sigma, true_q, EstimatorKind, EstimatorSettings};
use crate::params::{
    derive_params, generate_pair, sample_observations, PairConfig, PairLayout, SignPattern,
    SignalStrength,
};
use crate::rates::{regime_of, RegimeLabel};
use crate::rng::mix;

/// Whether estimators receive the true noise level or a per-replication
/// median-absolute-deviation estimate of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SigmaMode {
    Known,
    MadEstimated,
}

/// Grid specification for an MSE experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_values: Vec<usize>,
    pub betas: Vec<f64>,
    pub epsilons: Vec<f64>,
    /// Strengths for `mu`; `None` reuses each `b` value (equal strengths).
    pub a_values: Option<Vec<SignalStrength>>,
    pub b_values: Vec<SignalStrength>,
    pub sigma: f64,
    pub estimators: Vec<EstimatorKind>,
    pub replications: usize,
    pub pair_config: PairConfig,
    pub master_seed: u64,
    pub sigma_mode: SigmaMode,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(SimsigError::ConstraintViolation(
                "replications must be >= 1".into(),
            ));
        }
        if self.n_values.is_empty()
            || self.betas.is_empty()
            || self.epsilons.is_empty()
            || self.b_values.is_empty()
            || self.estimators.is_empty()
        {
            return Err(SimsigError::ConstraintViolation(
                "empty experiment grid".into(),
            ));
        }
        for &beta in &self.betas {
            for &epsilon in &self.epsilons {
                crate::params::check_sparsity_exponents(beta, epsilon)?;
            }
        }
        Ok(())
    }

    /// Cells in their fixed iteration order:
    /// `n × beta × epsilon × b × a` (one `a = b` when `a_values` is `None`).
    fn cells(&self) -> Vec<(usize, f64, f64, SignalStrength, SignalStrength)> {
        let mut out = Vec::new();
        for &n in &self.n_values {
            for &beta in &self.betas {
                for &epsilon in &self.epsilons {
                    for &b in &self.b_values {
                        match &self.a_values {
                            None => out.push((n, beta, epsilon, b, b)),
                            Some(avs) => {
                                for &a in avs {
                                    out.push((n, beta, epsilon, a, b));
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// One (cell, estimator) result row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub n: usize,
    pub beta: f64,
    pub epsilon: f64,
    pub a: SignalStrength,
    pub b: SignalStrength,
    pub sigma: f64,
    pub estimator: EstimatorKind,
    pub replications: usize,
    pub mse: f64,
    pub mse_stderr: f64,
    pub mean_estimate: f64,
    pub true_q: f64,
    /// Seed of the cell's stream (pair generation and noise derive from it).
    pub seed: u64,
}

const CELL_TAG: u64 = 0xce11;

/// Run the MSE experiment over every cell of `config`. Rows come out in
/// cell-major, estimator-minor order. Output is a pure function of the
/// config (including `master_seed`), independent of thread count.
pub fn run_mse_experiment(config: &SimConfig) -> Result<Vec<SimRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for (cell_idx, (n, beta, epsilon, a, b)) in config.cells().into_iter().enumerate() {
        let params = derive_params(n, beta, epsilon, a, b, config.sigma)?;
        let cell_seed = mix(mix(config.master_seed, CELL_TAG), cell_idx as u64);
        let pair = generate_pair(&params, config.pair_config, cell_seed)?;
        let tq = true_q(&pair);

        let per_rep: Vec<Vec<f64>> = (0..config.replications)
            .into_par_iter()
            .map(|rep| {
                let obs = sample_observations(&pair, config.sigma, mix(cell_seed, 1 + rep as u64))?;
                let sigma_used = match config.sigma_mode {
                    SigmaMode::Known => config.sigma,
                    SigmaMode::MadEstimated => mad_sigma(&obs.x, &obs.y)?,
                };
                config
                    .estimators
                    .iter()
                    .map(|kind| {
                        let settings = EstimatorSettings::for_sample_size(*kind, n, sigma_used)?;
                        let x = kind.needs_x().then_some(obs.x.as_slice());
                        estimate(&settings, x, &obs.y)
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        for (j, &kind) in config.estimators.iter().enumerate() {
            let r = config.replications as f64;
            let values = per_rep.iter().map(|v| v[j]);
            let mean_estimate = values.clone().sum::<f64>() / r;
            let sq_errs: Vec<f64> = values.map(|v| (v - tq) * (v - tq)).collect();
            // identical errors (a deterministic estimator) mean exactly
            // their common value with zero spread; averaging would only
            // add rounding noise
            let all_equal = sq_errs.iter().all(|e| *e == sq_errs[0]);
            let mse = if all_equal {
                sq_errs[0]
            } else {
                sq_errs.iter().sum::<f64>() / r
            };
            let mse_stderr = if config.replications > 1 && !all_equal {
                let var =
                    sq_errs.iter().map(|e| (e - mse) * (e - mse)).sum::<f64>() / (r - 1.0);
                (var / r).sqrt()
            } else {
                0.0
            };
            rows.push(SimRow {
                n,
                beta,
                epsilon,
                a,
                b,
                sigma: config.sigma,
                estimator: kind,
                replications: config.replications,
                mse,
                mse_stderr,
                mean_estimate,
                true_q: tq,
                seed: cell_seed,
            });
        }
    }
    Ok(rows)
}

/// Ordinary least squares fit of `log10(mse)` on `log10(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Fit the log-log MSE trend across rows. Needs at least two distinct `n`
/// values and strictly positive MSEs.
pub fn fit_log_slope(rows: &[SimRow]) -> Result<LineFit> {
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(rows.len());
    for row in rows {
        if !(row.mse > 0.0) {
            return Err(SimsigError::DomainError(format!(
                "log-slope fit needs mse > 0, got {} at n = {}",
                row.mse, row.n
            )));
        }
        pts.push(((row.n as f64).log10(), row.mse.log10()));
    }
    let mut distinct: Vec<u64> = pts.iter().map(|p| p.0.to_bits()).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(SimsigError::InsufficientPoints(
            "need at least two distinct n values".into(),
        ));
    }
    let m = pts.len() as f64;
    let xbar = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ybar = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - xbar) * (p.0 - xbar)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - xbar) * (p.1 - ybar)).sum();
    let slope = sxy / sxx;
    Ok(LineFit {
        slope,
        intercept: ybar - slope * xbar,
    })
}

/// Configuration of a detection error-rate experiment at one parameter
/// point. Type I error is measured on disjoint-support nulls, type II on
/// full-overlap-stress alternatives with exactly `q` simultaneous
/// coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    pub n: usize,
    pub beta: f64,
    pub epsilon: f64,
    pub a: SignalStrength,
    pub b: SignalStrength,
    pub sigma: f64,
    pub replications: usize,
    pub master_seed: u64,
    pub sigma_mode: SigmaMode,
    /// Replaces the default threshold when set (e.g. `f64::INFINITY` to
    /// force acceptance).
    pub lambda_override: Option<f64>,
}

/// Empirical error rates plus the thresholds under both calibrations: the
/// real-valued power law `(1/2) n^{epsilon+2a+2b-1}` and the worst-case pair
/// value `(1/2) q r² s² / n` with the integer `q` actually planted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionErrorRates {
    pub n: usize,
    pub type1: f64,
    pub type2: f64,
    pub statistic: EstimatorKind,
    pub lambda_used: f64,
    pub lambda_power_law: f64,
    pub lambda_worst_pair: f64,
}

/// Run the two-sequence detection experiment. Deterministic per
/// `master_seed`; the statistic is `Q2` (`tau = log n`) in the sparse regime
/// and `Q4` (`tau = 4 log n`) in the dense regime.
pub fn run_detection_experiment(config: &DetectionConfig) -> Result<DetectionErrorRates> {
    if config.replications < 1 {
        return Err(SimsigError::ConstraintViolation(
            "replications must be >= 1".into(),
        ));
    }
    let params = derive_params(
        config.n,
        config.beta,
        config.epsilon,
        config.a,
        config.b,
        config.sigma,
    )?;
    let regime = regime_of(config.beta, config.epsilon)?;
    let kind = if regime == RegimeLabel::Sparse {
        EstimatorKind::Q2
    } else {
        EstimatorKind::Q4
    };
    let lambda_power_law = crate::detection::lambda_threshold(
        config.n,
        config.epsilon,
        config.a.exponent_or_zero(),
        config.b.exponent_or_zero(),
    );
    let lambda_worst_pair =
        0.5 * params.q as f64 * params.r * params.r * params.s * params.s / config.n as f64;
    let lambda = config.lambda_override.unwrap_or(lambda_power_law);

    let null_pair = generate_pair(
        &params,
        PairConfig {
            layout: PairLayout::NullOnly,
            sign: SignPattern::AllPositive,
        },
        mix(config.master_seed, 0),
    )?;
    let alt_pair = generate_pair(&params, PairConfig::stress(), mix(config.master_seed, 1))?;

    let reject_rate = |pair: &crate::params::MeanPair, tag: u64| -> Result<f64> {
        let hits: Vec<bool> = (0..config.replications)
            .into_par_iter()
            .map(|rep| {
                let seed = mix(mix(config.master_seed, 2 + tag), rep as u64);
                let obs = sample_observations(pair, config.sigma, seed)?;
                let sigma_used = match config.sigma_mode {
                    SigmaMode::Known => config.sigma,
                    SigmaMode::MadEstimated => mad_sigma(&obs.x, &obs.y)?,
                };
                let settings = EstimatorSettings::for_sample_size(kind, config.n, sigma_used)?;
                let stat = estimate(&settings, Some(&obs.x), &obs.y)?;
                Ok(stat >= lambda)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(hits.iter().filter(|h| **h).count() as f64 / config.replications as f64)
    };

    let type1 = reject_rate(&null_pair, 0)?;
    let type2 = 1.0 - reject_rate(&alt_pair, 1)?;
    Ok(DetectionErrorRates {
        n: config.n,
        type1,
        type2,
        statistic: kind,
        lambda_used: lambda,
        lambda_power_law,
        lambda_worst_pair,
    })
}

/// CSV header of the MSE experiment output.
pub const CSV_HEADER: &str =
    "n,beta,epsilon,a,b,sigma,estimator,replications,mse,mse_stderr,mean_estimate,true_q,seed";

/// Format a float with 17 significant digits so that parsing round-trips.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_strength(s: SignalStrength) -> String {
    match s {
        SignalStrength::Algebraic(e) => fmt_f64(e),
        SignalStrength::LogScale(c) => format!("log({})", fmt_f64(c)),
    }
}

fn parse_strength(s: &str) -> Result<SignalStrength> {
    if let Some(inner) = s.strip_prefix("log(").and_then(|t| t.strip_suffix(')')) {
        Ok(SignalStrength::LogScale(parse_f64(inner)?))
    } else {
        Ok(SignalStrength::Algebraic(parse_f64(s)?))
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|e| SimsigError::ParseError(format!("bad float '{s}': {e}")))
}

fn parse_int<T: std::str::FromStr>(s: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>()
        .map_err(|e| SimsigError::ParseError(format!("bad integer '{s}': {e}")))
}

/// Serialize rows as CSV (UTF-8, LF line endings, 17-significant-digit
/// floats).
pub fn write_csv<W: Write>(out: W, rows: &[SimRow]) -> Result<()> {
    let mut w = BufWriter::new(out);
    w.write_all(CSV_HEADER.as_bytes())?;
    w.write_all(b"\n")?;
    let mut line = String::new();
    for row in rows {
        line.clear();
        let _ = write!(
            line,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            row.n,
            fmt_f64(row.beta),
            fmt_f64(row.epsilon),
            fmt_strength(row.a),
            fmt_strength(row.b),
            fmt_f64(row.sigma),
            row.estimator,
            row.replications,
            fmt_f64(row.mse),
            fmt_f64(row.mse_stderr),
            fmt_f64(row.mean_estimate),
            fmt_f64(row.true_q),
            row.seed,
        );
        w.write_all(line.as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Write rows to a file path.
pub fn write_csv_path<P: AsRef<Path>>(path: P, rows: &[SimRow]) -> Result<()> {
    write_csv(std::fs::File::create(path)?, rows)
}

/// Parse rows written by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<SimRow>> {
    let reader = BufReader::new(input);
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if i == 0 {
            if line.trim() != CSV_HEADER {
                return Err(SimsigError::ParseError(format!(
                    "unexpected header '{line}'"
                )));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 13 {
            return Err(SimsigError::ParseError(format!(
                "line {}: expected 13 fields, got {}",
                i + 1,
                f.len()
            )));
        }
        rows.push(SimRow {
            n: parse_int(f[0])?,
            beta: parse_f64(f[1])?,
            epsilon: parse_f64(f[2])?,
            a: parse_strength(f[3])?,
            b: parse_strength(f[4])?,
            sigma: parse_f64(f[5])?,
            estimator: f[6].parse()?,
            replications: parse_int(f[7])?,
            mse: parse_f64(f[8])?,
            mse_stderr: parse_f64(f[9])?,
            mean_estimate: parse_f64(f[10])?,
            true_q: parse_f64(f[11])?,
            seed: parse_int(f[12])?,
        });
    }
    Ok(rows)
}

/// Read rows from a file path.
pub fn read_csv_path<P: AsRef<Path>>(path: P) -> Result<Vec<SimRow>> {
    read_csv(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SimConfig {
        SimConfig {
            n_values: vec![500, 2000],
            betas: vec![0.45],
            epsilons: vec![0.3],
            a_values: None,
            b_values: vec![SignalStrength::Algebraic(0.2)],
            sigma: 1.0,
            estimators: vec![EstimatorKind::Q0, EstimatorKind::Q2, EstimatorKind::Q4],
            replications: 20,
            pair_config: PairConfig::stress(),
            master_seed: 7,
            sigma_mode: SigmaMode::Known,
        }
    }

    #[test]
    fn q0_rows_have_exact_mse_and_zero_stderr() {
        let rows = run_mse_experiment(&small_config()).unwrap();
        for row in rows.iter().filter(|r| r.estimator == EstimatorKind::Q0) {
            assert_eq!(row.mse, row.true_q * row.true_q);
            assert_eq!(row.mse_stderr, 0.0);
            assert_eq!(row.mean_estimate, 0.0);
        }
    }

    #[test]
    fn identical_seeds_give_identical_csv_bytes() {
        let rows1 = run_mse_experiment(&small_config()).unwrap();
        let rows2 = run_mse_experiment(&small_config()).unwrap();
        let mut buf1 = Vec::new();
        let mut buf2 = Vec::new();
        write_csv(&mut buf1, &rows1).unwrap();
        write_csv(&mut buf2, &rows2).unwrap();
        assert_eq!(buf1, buf2);

        let mut other = small_config();
        other.master_seed = 8;
        let rows3 = run_mse_experiment(&other).unwrap();
        assert_ne!(rows1[1].mse, rows3[1].mse);
    }

    #[test]
    fn csv_round_trips_losslessly() {
        let rows = run_mse_experiment(&small_config()).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let parsed = read_csv(buf.as_slice()).unwrap();
        assert_eq!(rows, parsed);
        // LF endings, no CR
        assert!(!buf.contains(&b'\r'));
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(read_csv("nonsense\n".as_bytes()).is_err());
        let short = format!("{CSV_HEADER}\n1,2,3\n");
        assert!(read_csv(short.as_bytes()).is_err());
    }

    #[test]
    fn slope_fit_examples() {
        let mk = |n: usize, mse: f64| SimRow {
            n,
            beta: 0.45,
            epsilon: 0.3,
            a: SignalStrength::Algebraic(0.2),
            b: SignalStrength::Algebraic(0.2),
            sigma: 1.0,
            estimator: EstimatorKind::Q4,
            replications: 1,
            mse,
            mse_stderr: 0.0,
            mean_estimate: 0.0,
            true_q: 0.0,
            seed: 0,
        };
        // (3,-1), (4,-1.5), (5,-2) in log10 space: slope exactly -0.5.
        let rows = vec![mk(1000, 1e-1), mk(10_000, 10f64.powf(-1.5)), mk(100_000, 1e-2)];
        let fit = fit_log_slope(&rows).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);

        // duplicated rows leave the OLS slope unchanged
        let mut dup = rows.clone();
        dup.extend(rows.iter().cloned());
        let fit2 = fit_log_slope(&dup).unwrap();
        assert!((fit2.slope - fit.slope).abs() < 1e-12);

        // single n inputs are rejected
        assert!(matches!(
            fit_log_slope(&[mk(1000, 0.1), mk(1000, 0.2)]),
            Err(SimsigError::InsufficientPoints(_))
        ));
    }

    #[test]
    fn detection_experiment_is_deterministic_and_infinity_override_accepts() {
        let cfg = DetectionConfig {
            n: 2000,
            beta: 0.45,
            epsilon: 0.35,
            a: SignalStrength::Algebraic(0.15),
            b: SignalStrength::Algebraic(0.15),
            sigma: 0.1,
            replications: 40,
            master_seed: 3,
            sigma_mode: SigmaMode::Known,
            lambda_override: None,
        };
        let r1 = run_detection_experiment(&cfg).unwrap();
        let r2 = run_detection_experiment(&cfg).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.statistic, EstimatorKind::Q4);

        let forced = DetectionConfig {
            lambda_override: Some(f64::INFINITY),
            ..cfg
        };
        let r3 = run_detection_experiment(&forced).unwrap();
        assert_eq!(r3.type1, 0.0);
        assert_eq!(r3.type2, 1.0);
    }

    #[test]
    fn mad_mode_runs() {
        let mut cfg = small_config();
        cfg.sigma_mode = SigmaMode::MadEstimated;
        cfg.replications = 5;
        let rows = run_mse_experiment(&cfg).unwrap();
        assert_eq!(rows.len(), 6);
        for row in &rows {
            assert!(row.mse.is_finite());
        }
    }
}
