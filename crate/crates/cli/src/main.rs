//! `simsig` — command-line front end for simultaneous-signal estimation and
//! detection in the Gaussian two-sequence model.
//!
//! Subcommands: `rates` (minimax rate and optimal estimator), `simulate`
//! (seeded MSE experiments to CSV), `detect` (run the two-sequence test on
//! paired data), `estimate` (evaluate one estimator on paired data),
//! `affinity` (chi-square affinity diagnostics), `plot` (static SVG chart
//! from simulation CSV).
//!
//! Exit codes: 0 success, 2 usage error, 3 constraint violation, 4 I/O or
//! file-format error.

use std::io::BufRead;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use simsig::detection::{lambda_threshold, run_test_two_seq};
use simsig::diagnostics::{affinity_mixture, affinity_perturbation, PriorKind};
use simsig::error::SimsigError;
use simsig::estimators::{estimate, mad_sigma, EstimatorKind, EstimatorSettings};
use simsig::harness::{
    read_csv_path, run_mse_experiment, write_csv_path, SigmaMode, SimConfig, SimRow,
};
use simsig::params::{derive_params, PairConfig, PairLayout, SignPattern, SignalStrength};
use simsig::rates::{optimal_estimator, rate_two_seq_general, regime_of};
use simsig::svgplot::{line_chart, ChartSpec, Series};

#[derive(Parser)]
#[command(name = "simsig", version, about = "simultaneous-signal estimation and detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print regime, minimax rate, and the rate-optimal estimator.
    Rates(RatesArgs),
    /// Run the seeded MSE experiment grid and write a CSV.
    Simulate(SimulateArgs),
    /// Run the simultaneous-signal test on paired data.
    Detect(DetectArgs),
    /// Evaluate one estimator on paired data.
    Estimate(EstimateArgs),
    /// Chi-square affinity of a least-favorable prior pair.
    Affinity(AffinityArgs),
    /// Render a simulation CSV as an SVG line chart.
    Plot(PlotArgs),
}

fn parse_strength(s: &str) -> Result<SignalStrength, String> {
    if let Some(inner) = s.strip_prefix("log(").and_then(|t| t.strip_suffix(')')) {
        inner
            .parse::<f64>()
            .map(SignalStrength::LogScale)
            .map_err(|e| format!("bad log-scale coefficient '{inner}': {e}"))
    } else {
        s.parse::<f64>()
            .map(SignalStrength::Algebraic)
            .map_err(|e| format!("bad exponent '{s}' (use E or log(C)): {e}"))
    }
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    epsilon: f64,
    /// Signal strength exponent for theta (or log-scale coefficient with
    /// --log-scale).
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    /// Signal strength exponent for mu; defaults to the value of --b.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Interpret --a/--b as coefficients of sigma*sqrt(c log n).
    #[arg(long)]
    log_scale: bool,
}

#[derive(Args, Default)]
struct SimulateArgs {
    /// TOML config mirroring these flags; flags override config values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Vector lengths, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    epsilon: Option<Vec<f64>>,
    /// Strengths for theta: exponents or log(C), comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_strength, allow_hyphen_values = true)]
    b: Option<Vec<SignalStrength>>,
    /// Strengths for mu; omitted means a = b cell-wise.
    #[arg(long, value_delimiter = ',', value_parser = parse_strength, allow_hyphen_values = true)]
    a: Option<Vec<SignalStrength>>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Estimators to run (q0..q5), comma separated.
    #[arg(long, value_delimiter = ',')]
    estimators: Option<Vec<EstimatorKind>>,
    #[arg(long)]
    replications: Option<usize>,
    /// full-overlap-stress | overlap-only | null-only
    #[arg(long)]
    pair_config: Option<String>,
    /// all-positive | rademacher
    #[arg(long)]
    sign_pattern: Option<String>,
    /// known | mad
    #[arg(long)]
    sigma_mode: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism). Output bytes do not
    /// depend on this.
    #[arg(long)]
    threads: Option<usize>,
}

/// Flat key-value config file with the same names as the simulate flags.
#[derive(serde::Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SimulateFile {
    n: Option<Vec<usize>>,
    beta: Option<Vec<f64>>,
    epsilon: Option<Vec<f64>>,
    b: Option<Vec<String>>,
    a: Option<Vec<String>>,
    sigma: Option<f64>,
    estimators: Option<Vec<String>>,
    replications: Option<usize>,
    pair_config: Option<String>,
    sign_pattern: Option<String>,
    sigma_mode: Option<String>,
    seed: Option<u64>,
    out: Option<String>,
    threads: Option<usize>,
}

#[derive(Args)]
struct DetectArgs {
    /// CSV with header `x,y`, one coordinate pair per line.
    #[arg(long)]
    input: PathBuf,
    /// Noise level, or `auto` for the MAD estimate.
    #[arg(long)]
    sigma: String,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, value_parser = parse_strength, allow_hyphen_values = true)]
    a: SignalStrength,
    #[arg(long, value_parser = parse_strength, allow_hyphen_values = true)]
    b: SignalStrength,
}

#[derive(Args)]
struct EstimateArgs {
    /// CSV with header `x,y`, one coordinate pair per line.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    estimator: EstimatorKind,
    /// Noise level, or `auto` for the MAD estimate.
    #[arg(long)]
    sigma: String,
    /// Threshold tau; defaults to the estimator's log-n rule.
    #[arg(long)]
    tau: Option<f64>,
    /// Optional rate context: prints the minimax rate when beta and epsilon
    /// are both given.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_parser = parse_strength, allow_hyphen_values = true)]
    a: Option<SignalStrength>,
    #[arg(long, value_parser = parse_strength, allow_hyphen_values = true)]
    b: Option<SignalStrength>,
}

#[derive(Args)]
struct AffinityArgs {
    /// shift | sign | full | perturb
    #[arg(long)]
    kind: String,
    /// Mixed positions (ambient dimension for `full`); unused by `perturb`.
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    q: u64,
    /// Planted magnitude, or `auto` for the calibrated choice of the kind.
    #[arg(long, default_value = "auto")]
    rho: String,
    /// Perturbation size for `perturb`, or `auto` for sigma/sqrt(q).
    #[arg(long, default_value = "auto")]
    delta: String,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
}

#[derive(Args)]
struct PlotArgs {
    /// Simulation CSV produced by `simulate`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// x axis: log-n | n
    #[arg(long, default_value = "log-n")]
    x: String,
    /// y axis: log-mse | mse
    #[arg(long, default_value = "log-mse")]
    y: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &SimsigError) -> u8 {
    match err {
        SimsigError::Io(_) | SimsigError::ParseError(_) => 4,
        _ => 3,
    }
}

fn run(command: Command) -> simsig::Result<()> {
    match command {
        Command::Rates(args) => cmd_rates(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Detect(args) => cmd_detect(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Affinity(args) => cmd_affinity(args),
        Command::Plot(args) => cmd_plot(args),
    }
}

fn strength_of(value: f64, log_scale: bool) -> SignalStrength {
    if log_scale {
        SignalStrength::LogScale(value)
    } else {
        SignalStrength::Algebraic(value)
    }
}

fn cmd_rates(args: RatesArgs) -> simsig::Result<()> {
    let b = strength_of(args.b, args.log_scale);
    let a = strength_of(args.a.unwrap_or(args.b), args.log_scale);
    let regime = regime_of(args.beta, args.epsilon)?;
    let entry = rate_two_seq_general(args.beta, args.epsilon, a, b)?;
    let rate = entry.rate.resolved();
    let choice = optimal_estimator(args.beta, args.epsilon, a, b)?;
    let est = if choice.boundary {
        format!("{}(boundary)", choice.kind)
    } else {
        choice.kind.to_string()
    };
    println!(
        "regime={} r={} logpow={} estimator={}",
        regime, rate.exponent, rate.log_power, est
    );
    Ok(())
}

fn parse_pair_layout(s: &str) -> simsig::Result<PairLayout> {
    match s {
        "full-overlap-stress" => Ok(PairLayout::FullOverlapStress),
        "overlap-only" => Ok(PairLayout::OverlapOnly),
        "null-only" => Ok(PairLayout::NullOnly),
        other => Err(SimsigError::ParseError(format!(
            "unknown pair config '{other}'"
        ))),
    }
}

fn parse_sign(s: &str) -> simsig::Result<SignPattern> {
    match s {
        "all-positive" => Ok(SignPattern::AllPositive),
        "rademacher" => Ok(SignPattern::Rademacher),
        other => Err(SimsigError::ParseError(format!(
            "unknown sign pattern '{other}'"
        ))),
    }
}

fn parse_sigma_mode(s: &str) -> simsig::Result<SigmaMode> {
    match s {
        "known" => Ok(SigmaMode::Known),
        "mad" => Ok(SigmaMode::MadEstimated),
        other => Err(SimsigError::ParseError(format!(
            "unknown sigma mode '{other}'"
        ))),
    }
}

fn cmd_simulate(args: SimulateArgs) -> simsig::Result<()> {
    let file: SimulateFile = match &args.config {
        Some(path) => toml::from_str(&std::fs::read_to_string(path)?)
            .map_err(|e| SimsigError::ParseError(format!("{}: {e}", path.display())))?,
        None => SimulateFile::default(),
    };

    let parse_strengths = |v: Vec<String>| -> simsig::Result<Vec<SignalStrength>> {
        v.iter()
            .map(|s| parse_strength(s).map_err(SimsigError::ParseError))
            .collect()
    };
    let parse_estimators = |v: Vec<String>| -> simsig::Result<Vec<EstimatorKind>> {
        v.iter().map(|s| s.parse()).collect()
    };

    // flags override config; defaults cover the rest
    let n_values = args.n.or(file.n).unwrap_or(vec![1000, 10_000, 100_000]);
    let betas = args.beta.or(file.beta).unwrap_or(vec![0.45]);
    let epsilons = args.epsilon.or(file.epsilon).unwrap_or(vec![0.02, 0.3, 0.44]);
    let b_values = match (args.b, file.b) {
        (Some(v), _) => v,
        (None, Some(v)) => parse_strengths(v)?,
        (None, None) => vec![
            SignalStrength::Algebraic(-0.1),
            SignalStrength::Algebraic(0.15),
            SignalStrength::Algebraic(0.2),
        ],
    };
    let a_values = match (args.a, file.a) {
        (Some(v), _) => Some(v),
        (None, Some(v)) => Some(parse_strengths(v)?),
        (None, None) => None,
    };
    let estimators = match (args.estimators, file.estimators) {
        (Some(v), _) => v,
        (None, Some(v)) => parse_estimators(v)?,
        (None, None) => vec![EstimatorKind::Q0, EstimatorKind::Q2, EstimatorKind::Q4],
    };
    let layout = parse_pair_layout(
        args.pair_config
            .or(file.pair_config)
            .as_deref()
            .unwrap_or("full-overlap-stress"),
    )?;
    let sign = parse_sign(
        args.sign_pattern
            .or(file.sign_pattern)
            .as_deref()
            .unwrap_or("all-positive"),
    )?;
    let sigma_mode = parse_sigma_mode(
        args.sigma_mode
            .or(file.sigma_mode)
            .as_deref()
            .unwrap_or("known"),
    )?;
    let out = args
        .out
        .or(file.out.map(PathBuf::from))
        .ok_or_else(|| SimsigError::ConstraintViolation("--out is required".into()))?;

    if let Some(threads) = args.threads.or(file.threads) {
        // ignore the error if a pool is already installed
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }

    let config = SimConfig {
        n_values,
        betas,
        epsilons,
        a_values,
        b_values,
        sigma: args.sigma.or(file.sigma).unwrap_or(1.0),
        estimators,
        replications: args.replications.or(file.replications).unwrap_or(200),
        pair_config: PairConfig { layout, sign },
        master_seed: args.seed.or(file.seed).unwrap_or(0),
        sigma_mode,
    };
    let rows = run_mse_experiment(&config)?;
    write_csv_path(&out, &rows)?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

/// Read a two-column CSV with header `x,y`.
fn read_pairs(path: &PathBuf) -> simsig::Result<(Vec<f64>, Vec<f64>)> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if i == 0 {
            if t != "x,y" {
                return Err(SimsigError::ParseError(format!(
                    "{}: expected header 'x,y', got '{t}'",
                    path.display()
                )));
            }
            continue;
        }
        if t.is_empty() {
            continue;
        }
        let (xs, ys) = t.split_once(',').ok_or_else(|| {
            SimsigError::ParseError(format!("{} line {}: expected 'x,y'", path.display(), i + 1))
        })?;
        x.push(xs.trim().parse::<f64>().map_err(|e| {
            SimsigError::ParseError(format!("{} line {}: {e}", path.display(), i + 1))
        })?);
        y.push(ys.trim().parse::<f64>().map_err(|e| {
            SimsigError::ParseError(format!("{} line {}: {e}", path.display(), i + 1))
        })?);
    }
    if x.is_empty() {
        return Err(SimsigError::EmptyInput);
    }
    Ok((x, y))
}

fn resolve_sigma(spec: &str, x: &[f64], y: &[f64]) -> simsig::Result<(f64, bool)> {
    if spec == "auto" {
        Ok((mad_sigma(x, y)?, true))
    } else {
        let v = spec
            .parse::<f64>()
            .map_err(|e| SimsigError::ParseError(format!("bad sigma '{spec}': {e}")))?;
        Ok((v, false))
    }
}

fn cmd_detect(args: DetectArgs) -> simsig::Result<()> {
    let (x, y) = read_pairs(&args.input)?;
    let (sigma, estimated) = resolve_sigma(&args.sigma, &x, &y)?;
    let params = derive_params(x.len(), args.beta, args.epsilon, args.a, args.b, sigma)?;
    let outcome = run_test_two_seq(&x, &y, sigma, &params)?;
    let regime = regime_of(args.beta, args.epsilon)?;
    if estimated {
        println!("sigma_hat={sigma}");
    }
    println!(
        "regime={} statistic={} threshold={} reject={}",
        regime, outcome.statistic, outcome.threshold, outcome.reject
    );
    Ok(())
}

fn cmd_estimate(args: EstimateArgs) -> simsig::Result<()> {
    let (x, y) = read_pairs(&args.input)?;
    let (sigma, estimated) = resolve_sigma(&args.sigma, &x, &y)?;
    let settings = match args.tau {
        Some(tau) => EstimatorSettings::with_tau(args.estimator, tau, sigma)?,
        None => EstimatorSettings::for_sample_size(args.estimator, y.len(), sigma)?,
    };
    if settings.tau_below_bound_range() {
        eprintln!(
            "warning: tau = {} < 1 is outside the range the error bounds cover",
            settings.tau
        );
    }
    let xs = args.estimator.needs_x().then_some(x.as_slice());
    let value = estimate(&settings, xs, &y)?;
    if estimated {
        println!("sigma_hat={sigma}");
    }
    println!("estimator={} estimate={}", args.estimator, value);
    if let (Some(beta), Some(epsilon)) = (args.beta, args.epsilon) {
        let b = args.b.unwrap_or(SignalStrength::Algebraic(0.0));
        let a = args.a.unwrap_or(b);
        let entry = rate_two_seq_general(beta, epsilon, a, b)?;
        let rate = entry.rate.resolved();
        let lambda = lambda_threshold(
            y.len(),
            epsilon,
            a.exponent_or_zero(),
            b.exponent_or_zero(),
        );
        println!(
            "rate: r={} logpow={} lambda={}",
            rate.exponent, rate.log_power, lambda
        );
    }
    Ok(())
}

fn cmd_affinity(args: AffinityArgs) -> simsig::Result<()> {
    let result = match args.kind.as_str() {
        "perturb" => {
            let delta = if args.delta == "auto" {
                args.sigma / (args.q as f64).sqrt()
            } else {
                args.delta
                    .parse::<f64>()
                    .map_err(|e| SimsigError::ParseError(format!("bad delta: {e}")))?
            };
            affinity_perturbation(args.q, delta, args.sigma)?
        }
        name => {
            let kind = match name {
                "shift" => PriorKind::ShiftMixture,
                "sign" => PriorKind::SignMixture,
                "full" => PriorKind::FullMixture,
                other => {
                    return Err(SimsigError::ParseError(format!(
                        "unknown affinity kind '{other}'"
                    )))
                }
            };
            let k = args.k.ok_or_else(|| {
                SimsigError::ConstraintViolation("--k is required for mixture kinds".into())
            })?;
            let rho = if args.rho == "auto" {
                calibrated_rho(kind, k, args.q, args.sigma)?
            } else {
                args.rho
                    .parse::<f64>()
                    .map_err(|e| SimsigError::ParseError(format!("bad rho: {e}")))?
            };
            affinity_mixture(kind, k, args.q, rho, args.sigma)?
        }
    };
    match result.exact {
        Some(exact) => println!("exact={exact:.6} bound={:.6}", result.bound),
        None => println!("exact=unavailable bound={:.6}", result.bound),
    }
    Ok(())
}

/// The calibrated magnitudes used in the lower-bound constructions:
/// `e^{rho^2/sigma^2} = k/q^2` for shift, `rho = (k/q^2)^{1/4}` for sign,
/// `e^{2 rho^2/sigma^2} = k/q^2` for full.
fn calibrated_rho(kind: PriorKind, k: u64, q: u64, sigma: f64) -> simsig::Result<f64> {
    let ratio = k as f64 / (q as f64 * q as f64);
    match kind {
        PriorKind::SignMixture => Ok(ratio.powf(0.25)),
        _ => {
            if ratio <= 1.0 {
                return Err(SimsigError::ConstraintViolation(format!(
                    "calibrated rho needs k > q^2, got k = {k}, q = {q}"
                )));
            }
            let scale = if kind == PriorKind::FullMixture { 0.5 } else { 1.0 };
            Ok(sigma * (scale * ratio.ln()).sqrt())
        }
    }
}

fn cmd_plot(args: PlotArgs) -> simsig::Result<()> {
    let rows = read_csv_path(&args.input)?;
    if rows.is_empty() {
        return Err(SimsigError::EmptyInput);
    }
    let xf: fn(&SimRow) -> f64 = match args.x.as_str() {
        "log-n" => |r| (r.n as f64).log10(),
        "n" => |r| r.n as f64,
        other => {
            return Err(SimsigError::ParseError(format!(
                "unknown x axis '{other}' (log-n|n)"
            )))
        }
    };
    let yf: fn(&SimRow) -> f64 = match args.y.as_str() {
        "log-mse" => |r| r.mse.log10(),
        "mse" => |r| r.mse,
        other => {
            return Err(SimsigError::ParseError(format!(
                "unknown y axis '{other}' (log-mse|mse)"
            )))
        }
    };

    // one series per (estimator, cell); cell params enter labels only when
    // they vary across the file
    let mut keys: Vec<String> = Vec::new();
    let mut series: Vec<Series> = Vec::new();
    let multi_cell = rows.iter().any(|r| {
        r.beta != rows[0].beta
            || r.epsilon != rows[0].epsilon
            || r.a != rows[0].a
            || r.b != rows[0].b
    });
    for row in &rows {
        let label = if multi_cell {
            format!(
                "{} e={:.3} b={}",
                row.estimator,
                row.epsilon,
                strength_label(row.b)
            )
        } else {
            row.estimator.to_string()
        };
        let idx = match keys.iter().position(|k| *k == label) {
            Some(i) => i,
            None => {
                keys.push(label.clone());
                series.push(Series {
                    label,
                    points: Vec::new(),
                });
                keys.len() - 1
            }
        };
        series[idx].points.push((xf(row), yf(row)));
    }
    for s in series.iter_mut() {
        s.points.sort_by(|p, q| p.0.total_cmp(&q.0));
    }
    let spec = ChartSpec {
        title: String::new(),
        x_label: args.x.clone(),
        y_label: args.y.clone(),
        ..Default::default()
    };
    std::fs::write(&args.out, line_chart(&spec, &series))?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn strength_label(s: SignalStrength) -> String {
    match s {
        SignalStrength::Algebraic(e) => format!("{e}"),
        SignalStrength::LogScale(c) => format!("log({c})"),
    }
}
