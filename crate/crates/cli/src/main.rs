use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use romp_core::textio::{read_matrix, read_vector, write_vector};
use romp_core::{
    build_matrix, probe_ric, run_sweep, Algorithm, EnsembleKind, EnsembleSpec, NoiseLevel,
    NoiseTarget, RecoveryOptions, SignalKind, SweepConfig,
};

#[derive(Parser)]
#[command(name = "romp", version, about = "Sparse recovery with Regularized Orthogonal Matching Pursuit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recover a signal from a matrix file and a measurement-vector file.
    Recover(RecoverArgs),
    /// Monte-Carlo sweep over sparsity and measurement counts.
    Sweep(SweepArgs),
    /// Estimate restricted isometry constants by random sampling.
    RicProbe(ProbeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleArg {
    Gaussian,
    Bernoulli,
    PartialFourierReal,
}

impl From<EnsembleArg> for EnsembleKind {
    fn from(a: EnsembleArg) -> Self {
        match a {
            EnsembleArg::Gaussian => EnsembleKind::Gaussian,
            EnsembleArg::Bernoulli => EnsembleKind::Bernoulli,
            EnsembleArg::PartialFourierReal => EnsembleKind::PartialFourierReal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SignalArg {
    FlatSparse,
    GaussianSparse,
    PowerLaw,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    Measurement,
    Signal,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Romp,
    Omp,
    Both,
}

impl AlgoArg {
    fn algorithms(self) -> Vec<Algorithm> {
        match self {
            AlgoArg::Romp => vec![Algorithm::Romp],
            AlgoArg::Omp => vec![Algorithm::Omp],
            AlgoArg::Both => vec![Algorithm::Romp, Algorithm::Omp],
        }
    }
}

#[derive(Args)]
struct RecoverArgs {
    /// Matrix file: `rows cols` header, then row-major entries.
    #[arg(long)]
    matrix: PathBuf,
    /// Measurement vector file: `len` header, then entries.
    #[arg(long)]
    observations: PathBuf,
    #[arg(long)]
    sparsity: usize,
    #[arg(long, value_enum, default_value = "romp")]
    algo: AlgoArg,
    /// Write the reconstruction here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Print per-iteration selections to stderr.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 256)]
    dim: usize,
    /// Comma-separated measurement counts N.
    #[arg(long, value_delimiter = ',', default_values_t = [32, 64, 96, 128, 160, 192, 224, 256])]
    measurements: Vec<usize>,
    /// Comma-separated sparsity levels n.
    #[arg(long, value_delimiter = ',', default_values_t = [4, 8, 12, 16, 20])]
    sparsity: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, value_enum, default_value = "gaussian")]
    ensemble: EnsembleArg,
    #[arg(long, value_enum, default_value = "flat-sparse")]
    signal: SignalArg,
    /// Power-law decay exponent p (> 1).
    #[arg(long, default_value_t = 2.0)]
    exponent: f64,
    /// Power-law scale C_p.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, value_enum, default_value = "measurement")]
    noise: NoiseArg,
    /// Fixed per-entry noise deviation. Without it, sigma is chosen per
    /// trial so that ‖e‖₂ = noise-ratio · ‖Φv‖₂ (or · ‖v‖₂ for signal noise).
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    noise_ratio: f64,
    #[arg(long, value_enum, default_value = "romp")]
    algo: AlgoArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-trial rows; the per-cell summary goes to `<stem>.summary.csv`.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Audit iteration invariants on every recovery.
    #[arg(long)]
    trace: bool,
    /// Draw a new matrix for every trial instead of one per cell.
    #[arg(long)]
    fresh_matrix_per_trial: bool,
}

#[derive(Args)]
struct ProbeArgs {
    /// Probe this matrix file instead of drawing one.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "gaussian")]
    ensemble: EnsembleArg,
    #[arg(long, default_value_t = 128)]
    measurements: usize,
    #[arg(long, default_value_t = 256)]
    dim: usize,
    /// Comma-separated sparsities m to probe.
    #[arg(long, value_delimiter = ',', default_values_t = [4, 8, 16])]
    sparsity: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn recover(args: RecoverArgs) -> Result<()> {
    let phi = read_matrix(&args.matrix).with_context(|| format!("reading {}", args.matrix.display()))?;
    let x = read_vector(&args.observations)
        .with_context(|| format!("reading {}", args.observations.display()))?;
    let algorithm = match args.algo {
        AlgoArg::Romp => Algorithm::Romp,
        AlgoArg::Omp => Algorithm::Omp,
        AlgoArg::Both => bail!("recover takes a single algorithm"),
    };
    let opts = RecoveryOptions {
        trace: args.trace,
        ..RecoveryOptions::default()
    };
    let result = algorithm.recover(&phi, &x, args.sparsity, &opts)?;
    for (k, snap) in result.trace.iter().enumerate() {
        eprintln!(
            "iteration {}: J = {:?}, J0 = {:?}",
            k + 1,
            snap.candidates.as_slice(),
            snap.selected.as_slice()
        );
    }
    eprintln!(
        "{algorithm}: {} iterations, support {:?}, stopped on {}",
        result.iterations,
        result.support.as_slice(),
        result.termination
    );
    match args.output {
        Some(path) => write_vector(&path, &result.estimate)?,
        None => print!("{}", romp_core::textio::format_vector(&result.estimate)),
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let signal = match args.signal {
        SignalArg::FlatSparse => SignalKind::FlatSparse,
        SignalArg::GaussianSparse => SignalKind::GaussianSparse,
        SignalArg::PowerLaw => SignalKind::PowerLaw {
            exponent: args.exponent,
            scale: args.scale,
        },
    };
    let config = SweepConfig {
        dim: args.dim,
        sparsities: args.sparsity,
        measurements: args.measurements,
        trials: args.trials,
        ensemble: args.ensemble.into(),
        signal,
        noise_target: match args.noise {
            NoiseArg::Measurement => NoiseTarget::Measurement,
            NoiseArg::Signal => NoiseTarget::Signal,
        },
        noise_level: match args.sigma {
            Some(s) => NoiseLevel::Absolute(s),
            None => NoiseLevel::Relative(args.noise_ratio),
        },
        algorithms: args.algo.algorithms(),
        seed: args.seed,
        fresh_matrix_per_trial: args.fresh_matrix_per_trial,
        trace: args.trace,
        csv: args.csv,
        svg: args.svg,
    };
    let start = Instant::now();
    let report = run_sweep(&config)?;
    println!("algo     N    n  success  iters  ratio_meas(mean/median)  ratio_sig(mean/median)");
    for c in &report.cells {
        let fmt = |s: Option<romp_core::Stats>| match s {
            Some(s) => format!("{:>9.4} / {:<9.4}", s.mean, s.median),
            None => format!("{:>9} / {:<9}", "-", "-"),
        };
        println!(
            "{:<5} {:>4} {:>4}  {:>7.3}  {:>5.2}  {}  {}",
            c.cell.algorithm,
            c.cell.measurements,
            c.cell.sparsity,
            c.success_rate,
            c.mean_iterations,
            fmt(c.ratio_meas),
            fmt(c.ratio_sig)
        );
    }
    if config.trace {
        let violations: usize = report.records.iter().map(|r| r.violations.len()).sum();
        println!("invariant violations: {violations}");
        for r in report.records.iter().filter(|r| !r.violations.is_empty()).take(10) {
            eprintln!("{} N={} n={} trial {}: {:?}", r.algorithm, r.measurements, r.sparsity, r.trial, r.violations);
        }
    }
    eprintln!("{} trials in {:.2?}", report.records.len(), start.elapsed());
    Ok(())
}

fn ric_probe(args: ProbeArgs) -> Result<()> {
    let phi = match &args.matrix {
        Some(path) => read_matrix(path).with_context(|| format!("reading {}", path.display()))?,
        None => build_matrix(&EnsembleSpec::new(
            args.ensemble.into(),
            args.measurements,
            args.dim,
            args.seed,
        ))?,
    };
    println!("m,samples,lower,upper,epsilon_hat");
    for &m in &args.sparsity {
        let est = probe_ric(&phi, m, args.samples, args.seed)?;
        println!("{},{},{},{},{}", est.sparsity, est.samples, est.lower, est.upper, est.epsilon_hat);
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Recover(a) => recover(a),
        Command::Sweep(a) => sweep(a),
        Command::RicProbe(a) => ric_probe(a),
    }
}
