//! Monte-Carlo recovery experiments.
//!
//! A sweep is a grid of cells, one per `(algorithm, n, N)`. Each cell draws
//! one measurement matrix (or one per trial with
//! [`SweepConfig::fresh_matrix_per_trial`]) and then, for every trial, a
//! fresh signal and fresh noise from streams keyed by the trial index.
//! Romp and omp cells with the same `(n, N)` see identical matrices,
//! signals and noise.

pub mod csv;
pub mod svg;

use std::fmt;
use std::fs::File;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::ensembles::{build_matrix, EnsembleKind, EnsembleSpec};
use crate::error::{Error, Result};
use crate::linalg::{norm1, norm2, sub, DenseMatrix, IndexSet};
use crate::romp::{audit, omp_recover, romp_recover, RecoveryOptions, RecoveryResult};
use crate::rng::{derive_seed, tag};
use crate::signals::{
    add_noise, best_m_term, generate_signal, top_m_indices, NoiseSpec, NoiseTarget, SignalKind,
    SignalSpec,
};

/// Slack allowed in the truncation inequality check.
pub const TRUNCATION_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Romp,
    Omp,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Romp => "romp",
            Algorithm::Omp => "omp",
        }
    }

    pub fn recover(
        self,
        phi: &DenseMatrix,
        x: &[f64],
        n: usize,
        opts: &RecoveryOptions,
    ) -> Result<RecoveryResult> {
        match self {
            Algorithm::Romp => romp_recover(phi, x, n, opts),
            Algorithm::Omp => omp_recover(phi, x, n, opts),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "romp" => Ok(Algorithm::Romp),
            "omp" => Ok(Algorithm::Omp),
            other => Err(Error::invalid(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// How the per-entry noise deviation is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseLevel {
    /// Fixed sigma.
    Absolute(f64),
    /// Sigma picked per trial so that `‖e‖₂ ≈ ratio · ‖Φv‖₂` for measurement
    /// noise, or `‖e‖₂ ≈ ratio · ‖v‖₂` for signal noise.
    Relative(f64),
}

impl Default for NoiseLevel {
    fn default() -> Self {
        NoiseLevel::Relative(0.1)
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub dim: usize,
    pub sparsities: Vec<usize>,
    pub measurements: Vec<usize>,
    pub trials: usize,
    pub ensemble: EnsembleKind,
    pub signal: SignalKind,
    pub noise_target: NoiseTarget,
    pub noise_level: NoiseLevel,
    pub algorithms: Vec<Algorithm>,
    pub seed: u64,
    pub fresh_matrix_per_trial: bool,
    /// Trace every recovery and audit the iteration invariants.
    pub trace: bool,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            dim: 256,
            sparsities: vec![4, 8, 12, 16, 20],
            measurements: (1..=8).map(|k| 32 * k).collect(),
            trials: 100,
            ensemble: EnsembleKind::Gaussian,
            signal: SignalKind::FlatSparse,
            noise_target: NoiseTarget::Measurement,
            noise_level: NoiseLevel::default(),
            algorithms: vec![Algorithm::Romp],
            seed: 0,
            fresh_matrix_per_trial: false,
            trace: false,
            csv: None,
            svg: None,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.sparsities.is_empty() || self.measurements.is_empty() || self.algorithms.is_empty() {
            return Err(Error::invalid("sparsity, measurement and algorithm lists must be nonempty"));
        }
        for &n in &self.sparsities {
            if n == 0 {
                return Err(Error::invalid("sparsity n must be at least 1"));
            }
            if 3 * n > self.dim {
                return Err(Error::invalid(format!("3n = {} exceeds d = {}", 3 * n, self.dim)));
            }
            SignalSpec {
                kind: self.signal,
                dim: self.dim,
                sparsity: n,
                seed: 0,
                stream: 0,
            }
            .validate()?;
        }
        for &rows in &self.measurements {
            EnsembleSpec::new(self.ensemble, rows, self.dim, 0).validate()?;
        }
        let level = match self.noise_level {
            NoiseLevel::Absolute(s) | NoiseLevel::Relative(s) => s,
        };
        if !(level >= 0.0 && level.is_finite()) {
            return Err(Error::invalid(format!("noise level must be nonnegative, got {level}")));
        }
        Ok(())
    }

    /// Cells in output order: algorithm, then n, then N.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &algorithm in &self.algorithms {
            for &sparsity in &self.sparsities {
                for &measurements in &self.measurements {
                    out.push(Cell {
                        algorithm,
                        sparsity,
                        measurements,
                        seed: cell_seed(self.seed, sparsity, measurements),
                    });
                }
            }
        }
        out
    }
}

fn cell_seed(master: u64, sparsity: usize, measurements: usize) -> u64 {
    derive_seed(
        derive_seed(master, tag::CELL_BASE + sparsity as u64),
        measurements as u64,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub algorithm: Algorithm,
    pub sparsity: usize,
    pub measurements: usize,
    /// Derived from the master seed, `n` and `N`.
    pub seed: u64,
}

impl Cell {
    pub fn matrix(&self, config: &SweepConfig, trial: usize) -> Result<DenseMatrix> {
        let base = derive_seed(self.seed, tag::MATRIX);
        let seed = if config.fresh_matrix_per_trial {
            derive_seed(base, trial as u64)
        } else {
            base
        };
        build_matrix(&EnsembleSpec::new(config.ensemble, self.measurements, config.dim, seed))
    }
}

/// One trial's metrics. Ratios are `None` when their denominator vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub algorithm: Algorithm,
    pub measurements: usize,
    pub dim: usize,
    pub sparsity: usize,
    pub trial: usize,
    pub seed: u64,
    pub sigma: f64,
    pub noise_target: NoiseTarget,
    /// ‖e‖₂ of the measurement error.
    pub norm_e: f64,
    /// ‖v̂ − v‖₂.
    pub err2: f64,
    /// ‖v̂ − v_{2n}‖₂.
    pub err2_2n: f64,
    /// ‖v − v_n‖₁.
    pub tail1: f64,
    pub ratio_meas: Option<f64>,
    pub ratio_sig: Option<f64>,
    pub iterations: usize,
    pub support_hit: f64,
    pub termination: String,
    /// ‖v_{2n} − v̂_{2n}‖₂.
    pub truncated_err: f64,
    /// 3 ‖v_{2n} − v̂‖₂, the bound `truncated_err` must respect.
    pub truncation_bound: f64,
    /// Invariant and truncation-inequality failures; only filled when tracing.
    pub violations: Vec<String>,
}

/// `‖best_{2n}(v) − best_{2n}(v̂)‖₂`.
pub fn truncated_error(v: &[f64], v_hat: &[f64], n: usize) -> f64 {
    norm2(&sub(&best_m_term(v, 2 * n), &best_m_term(v_hat, 2 * n)))
}

/// Checks `‖v_{2n} − v̂_{2n}‖₂ <= 3 ‖v_{2n} − v̂‖₂ + TRUNCATION_SLACK`.
/// Returns both sides.
pub fn truncation_check(v: &[f64], v_hat: &[f64], n: usize) -> (bool, f64, f64) {
    let lhs = truncated_error(v, v_hat, n);
    let rhs = 3.0 * norm2(&sub(&best_m_term(v, 2 * n), v_hat));
    (lhs <= rhs + TRUNCATION_SLACK, lhs, rhs)
}

/// Runs trial `trial` of `cell` against `matrix`. Recovery failures end up
/// in `termination`; the estimate reached before the failure is scored.
pub fn run_trial(
    config: &SweepConfig,
    cell: &Cell,
    matrix: &DenseMatrix,
    trial: usize,
) -> Result<TrialRecord> {
    let n = cell.sparsity;
    let (clean, _) = generate_signal(&SignalSpec {
        kind: config.signal,
        dim: config.dim,
        sparsity: n,
        seed: derive_seed(cell.seed, tag::SIGNAL),
        stream: trial as u64,
    })?;
    let noise_seed = derive_seed(cell.seed, tag::NOISE);
    let noise = |target: &[f64], reference: f64, target_kind| {
        let sigma = match config.noise_level {
            NoiseLevel::Absolute(s) => s,
            NoiseLevel::Relative(r) => r * reference / (target.len() as f64).sqrt(),
        };
        add_noise(
            target,
            &NoiseSpec {
                target: target_kind,
                sigma,
                seed: noise_seed,
                stream: trial as u64,
            },
        )
        .map(|(p, e)| (p, e, sigma))
    };

    let (signal, x, norm_e, sigma) = match config.noise_target {
        NoiseTarget::Measurement => {
            let clean_x = matrix.mat_vec(&clean)?;
            let (x, e, sigma) = noise(&clean_x, norm2(&clean_x), NoiseTarget::Measurement)?;
            (clean, x, norm2(&e), sigma)
        }
        NoiseTarget::Signal => {
            let (signal, _, sigma) = noise(&clean, norm2(&clean), NoiseTarget::Signal)?;
            let x = matrix.mat_vec(&signal)?;
            (signal, x, 0.0, sigma)
        }
    };

    let opts = RecoveryOptions {
        trace: config.trace,
        ..RecoveryOptions::default()
    };
    let (result, termination) = match cell.algorithm.recover(matrix, &x, n, &opts) {
        Ok(r) => {
            let t = r.termination.name().to_string();
            (r, t)
        }
        Err(Error::SupportRankDeficient { partial, .. }) => {
            let t = partial.termination.name().to_string();
            (*partial, t)
        }
        Err(e) => return Err(e),
    };
    let v_hat = &result.estimate;

    let err2 = norm2(&sub(v_hat, &signal));
    let err2_2n = norm2(&sub(v_hat, &best_m_term(&signal, 2 * n)));
    let tail1 = norm1(&sub(&signal, &best_m_term(&signal, n)));
    let ratio_meas = (norm_e > 0.0).then(|| err2 / norm_e);
    let ratio_sig = (tail1 > 0.0).then(|| err2_2n / (tail1 / (n as f64).sqrt()));
    let head = IndexSet::from_unsorted(top_m_indices(&signal, n));
    let support_hit = head.intersection_len(&result.support) as f64 / head.len() as f64;
    let (trunc_ok, truncated_err, trunc_rhs) = truncation_check(&signal, v_hat, n);

    let mut violations = Vec::new();
    if config.trace {
        violations.extend(audit(matrix, &x, n, &result).iter().map(|v| v.to_string()));
        if !trunc_ok {
            violations.push(format!("truncation: {truncated_err:e} > 3 * {:e}", trunc_rhs / 3.0));
        }
    }

    Ok(TrialRecord {
        algorithm: cell.algorithm,
        measurements: cell.measurements,
        dim: config.dim,
        sparsity: n,
        trial,
        seed: cell.seed,
        sigma,
        noise_target: config.noise_target,
        norm_e,
        err2,
        err2_2n,
        tail1,
        ratio_meas,
        ratio_sig,
        iterations: result.iterations,
        support_hit,
        termination,
        truncated_err,
        truncation_bound: trunc_rhs,
        violations,
    })
}

/// Count and order statistics of the defined values of a metric.
/// Quantiles interpolate linearly between order statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub p10: f64,
    pub p90: f64,
}

impl Stats {
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let mut v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        Some(Self {
            count: v.len(),
            mean,
            median: quantile(&v, 0.5),
            p10: quantile(&v, 0.1),
            p90: quantile(&v, 0.9),
        })
    }
}

/// `q`-quantile of sorted `v`: position `q (len − 1)`, linear between neighbours.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub cell: Cell,
    pub dim: usize,
    pub trials: usize,
    /// Fraction of trials whose support contains the n largest true coordinates.
    pub success_rate: f64,
    pub mean_iterations: f64,
    pub mean_err2: f64,
    pub ratio_meas: Option<Stats>,
    pub ratio_sig: Option<Stats>,
}

impl CellSummary {
    pub fn from_records(cell: Cell, dim: usize, records: &[TrialRecord]) -> Self {
        let count = records.len() as f64;
        Self {
            cell,
            dim,
            trials: records.len(),
            success_rate: records.iter().filter(|r| r.support_hit == 1.0).count() as f64 / count,
            mean_iterations: records.iter().map(|r| r.iterations as f64).sum::<f64>() / count,
            mean_err2: records.iter().map(|r| r.err2).sum::<f64>() / count,
            ratio_meas: Stats::from_values(records.iter().filter_map(|r| r.ratio_meas)),
            ratio_sig: Stats::from_values(records.iter().filter_map(|r| r.ratio_sig)),
        }
    }

    /// The ratio plotted for `target`.
    pub fn ratio(&self, target: NoiseTarget) -> Option<Stats> {
        match target {
            NoiseTarget::Measurement => self.ratio_meas,
            NoiseTarget::Signal => self.ratio_sig,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub records: Vec<TrialRecord>,
    pub cells: Vec<CellSummary>,
}

impl SweepReport {
    pub fn cell(&self, algorithm: Algorithm, sparsity: usize, measurements: usize) -> Option<&CellSummary> {
        self.cells.iter().find(|c| {
            c.cell.algorithm == algorithm
                && c.cell.sparsity == sparsity
                && c.cell.measurements == measurements
        })
    }
}

/// Runs every cell and trial of `config`, writing CSV and SVG if requested.
/// Output files are created before any trial runs.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let csv_files = match &config.csv {
        Some(path) => Some((File::create(path)?, File::create(csv::summary_path(path))?)),
        None => None,
    };
    let svg_file = config.svg.as_ref().map(File::create).transpose()?;

    let report = compute_sweep(config)?;

    if let Some((trials, summary)) = csv_files {
        csv::write_trials(trials, &report.records)?;
        csv::write_summary(summary, &report.cells)?;
    }
    if let Some(file) = svg_file {
        svg::sweep_plot(config, &report).write_to(file)?;
    }
    Ok(report)
}

/// The sweep without any file output.
pub fn compute_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let cells = config.cells();

    // Shared matrices, one per (n, N), unless each trial draws its own.
    let mut shared: Vec<Option<DenseMatrix>> = vec![None; cells.len()];
    if !config.fresh_matrix_per_trial {
        let built: Vec<DenseMatrix> = cells
            .par_iter()
            .map(|c| c.matrix(config, 0))
            .collect::<Result<_>>()?;
        shared = built.into_iter().map(Some).collect();
    }

    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..config.trials).map(move |t| (c, t)))
        .collect();
    let records: Vec<TrialRecord> = jobs
        .par_iter()
        .map(|&(c, t)| {
            let cell = &cells[c];
            match &shared[c] {
                Some(m) => run_trial(config, cell, m, t),
                None => run_trial(config, cell, &cell.matrix(config, t)?, t),
            }
        })
        .collect::<Result<_>>()?;

    let summaries = cells
        .iter()
        .zip(records.chunks(config.trials))
        .map(|(cell, rs)| CellSummary::from_records(*cell, config.dim, rs))
        .collect();
    Ok(SweepReport {
        records,
        cells: summaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SweepConfig {
        SweepConfig {
            dim: 64,
            sparsities: vec![2],
            measurements: vec![32],
            trials: 3,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn noiseless_trial_is_exact() {
        let config = SweepConfig {
            noise_level: NoiseLevel::Absolute(0.0),
            trace: true,
            ..small()
        };
        let cell = config.cells()[0];
        let m = cell.matrix(&config, 0).unwrap();
        let rec = run_trial(&config, &cell, &m, 0).unwrap();
        assert!(rec.err2 <= 1e-6, "{rec:?}");
        assert_eq!(rec.support_hit, 1.0);
        assert_eq!(rec.ratio_meas, None);
        assert_eq!(rec.ratio_sig, None);
        assert!(rec.violations.is_empty(), "{:?}", rec.violations);
    }

    #[test]
    fn relative_noise_hits_target_ratio() {
        let config = small();
        let cell = config.cells()[0];
        let m = cell.matrix(&config, 0).unwrap();
        let rec = run_trial(&config, &cell, &m, 1).unwrap();
        let clean_norm = rec.norm_e / 0.1;
        assert!(rec.sigma > 0.0);
        assert!(rec.ratio_meas.is_some());
        assert!((rec.sigma * 32f64.sqrt() - 0.1 * clean_norm).abs() < 0.05 * clean_norm);
    }

    #[test]
    fn config_validation() {
        assert!(SweepConfig { sparsities: vec![0], ..small() }.validate().is_err());
        assert!(SweepConfig { trials: 0, ..small() }.validate().is_err());
        assert!(SweepConfig { measurements: vec![65], ..small() }.validate().is_err());
        assert!(SweepConfig { sparsities: vec![22], ..small() }.validate().is_err());
        assert!(SweepConfig {
            noise_level: NoiseLevel::Absolute(-1.0),
            ..small()
        }
        .validate()
        .is_err());
        assert!(small().validate().is_ok());
    }

    #[test]
    fn romp_and_omp_cells_share_inputs() {
        let config = SweepConfig {
            algorithms: vec![Algorithm::Romp, Algorithm::Omp],
            ..small()
        };
        let cells = config.cells();
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[0].seed, cells[1].seed);
        let report = compute_sweep(&config).unwrap();
        assert_eq!(report.records[0].norm_e, report.records[3].norm_e);
    }

    #[test]
    fn truncated_error_examples() {
        let v = [3.0, 0.0, -1.0, 0.5, 0.0, 0.0];
        assert_eq!(truncated_error(&v, &v, 1), 0.0);
        let mut v_hat = v;
        v_hat[5] = 1e-3;
        assert_eq!(truncated_error(&v, &v_hat, 1), 0.0);
    }

    #[test]
    fn quantiles_interpolate() {
        let s = Stats::from_values([4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(s.count, 4);
        assert_eq!(s.mean, 2.5);
        assert_eq!(s.median, 2.5);
        assert!((s.p10 - 1.3).abs() < 1e-12);
        assert!((s.p90 - 3.7).abs() < 1e-12);
        assert!(Stats::from_values([]).is_none());
    }
}
