//! Random measurement ensembles and a Monte-Carlo probe of restricted
//! isometry constants.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{norm2, DenseMatrix};
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnsembleKind {
    /// i.i.d. N(0, 1/N) entries.
    Gaussian,
    /// i.i.d. ±1/√N entries.
    Bernoulli,
    /// N/2 random frequencies of the real cosine/sine system on `d` points.
    PartialFourierReal,
}

impl EnsembleKind {
    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::Gaussian => "gaussian",
            EnsembleKind::Bernoulli => "bernoulli",
            EnsembleKind::PartialFourierReal => "partial-fourier-real",
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(EnsembleKind::Gaussian),
            "bernoulli" => Ok(EnsembleKind::Bernoulli),
            "partial-fourier-real" => Ok(EnsembleKind::PartialFourierReal),
            other => Err(Error::invalid(format!("unknown ensemble '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, rows: usize, cols: usize, seed: u64) -> Self {
        Self {
            kind,
            rows,
            cols,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::invalid("ensemble dimensions must be positive"));
        }
        if self.rows > self.cols {
            return Err(Error::invalid(format!(
                "ensemble needs N <= d, got N={} d={}",
                self.rows, self.cols
            )));
        }
        if self.kind == EnsembleKind::PartialFourierReal {
            if !self.rows.is_multiple_of(2) {
                return Err(Error::invalid(format!(
                    "partial-fourier-real needs an even row count, got {}",
                    self.rows
                )));
            }
            let available = (self.cols - 1) / 2;
            if self.rows / 2 > available {
                return Err(Error::invalid(format!(
                    "partial-fourier-real on d={} has {available} usable frequencies, {} requested",
                    self.cols,
                    self.rows / 2
                )));
            }
        }
        Ok(())
    }
}

/// Draws the matrix described by `spec`. Same spec, same bits.
pub fn build_matrix(spec: &EnsembleSpec) -> Result<DenseMatrix> {
    spec.validate()?;
    let (rows, cols) = (spec.rows, spec.cols);
    let mut rng = stream_rng(spec.seed, 0);
    let scale = 1.0 / (rows as f64).sqrt();
    let m = match spec.kind {
        EnsembleKind::Gaussian => DenseMatrix::from_fn(rows, cols, |_, _| {
            let z: f64 = rng.sample(StandardNormal);
            z * scale
        }),
        EnsembleKind::Bernoulli => DenseMatrix::from_fn(rows, cols, |_, _| {
            if rng.random::<bool>() {
                scale
            } else {
                -scale
            }
        }),
        EnsembleKind::PartialFourierReal => {
            // Frequencies 1..=(d-1)/2 give cosine and sine rows of squared
            // norm d/2 each and every column squared norm exactly 1 after scaling.
            let available = (cols - 1) / 2;
            let mut freqs: Vec<usize> = index::sample(&mut rng, available, rows / 2)
                .into_iter()
                .map(|k| k + 1)
                .collect();
            freqs.sort_unstable();
            let amp = (2.0 / rows as f64).sqrt();
            DenseMatrix::from_fn(rows, cols, |i, t| {
                let k = freqs[i / 2];
                let phase = 2.0 * PI * ((k * t) % cols) as f64 / cols as f64;
                if i % 2 == 0 {
                    amp * phase.cos()
                } else {
                    amp * phase.sin()
                }
            })
        }
    };
    Ok(m)
}

/// Observed extremes of ‖Mv‖₂/‖v‖₂ over random `sparsity`-sparse vectors.
/// `epsilon_hat` is a lower bound on the true isometry constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicEstimate {
    pub sparsity: usize,
    pub lower: f64,
    pub upper: f64,
    pub epsilon_hat: f64,
    pub samples: usize,
}

/// Samples `samples` vectors with a uniformly random support of size
/// `sparsity` and Gaussian coefficients. The k-th draw depends only on
/// `(seed, k)`, so a larger sample count extends the same sequence.
pub fn probe_ric(m: &DenseMatrix, sparsity: usize, samples: usize, seed: u64) -> Result<RicEstimate> {
    if sparsity == 0 || sparsity > m.cols() {
        return Err(Error::invalid(format!(
            "probe sparsity must be in 1..={}, got {sparsity}",
            m.cols()
        )));
    }
    if samples == 0 {
        return Err(Error::invalid("probe needs at least one sample"));
    }
    let mut rng = stream_rng(seed, 0);
    let mut lower = f64::INFINITY;
    let mut upper = 0.0_f64;
    let mut v = vec![0.0; m.cols()];
    let mut drawn = 0;
    while drawn < samples {
        v.iter_mut().for_each(|x| *x = 0.0);
        for j in index::sample(&mut rng, m.cols(), sparsity) {
            v[j] = rng.sample(StandardNormal);
        }
        let vn = norm2(&v);
        if vn == 0.0 {
            continue;
        }
        let ratio = norm2(&m.mat_vec(&v)?) / vn;
        lower = lower.min(ratio);
        upper = upper.max(ratio);
        drawn += 1;
    }
    Ok(RicEstimate {
        sparsity,
        lower,
        upper,
        epsilon_hat: (1.0 - lower).max(upper - 1.0).max(0.0),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_columns_unit_norm_on_average() {
        let m = build_matrix(&EnsembleSpec::new(EnsembleKind::Gaussian, 128, 256, 3)).unwrap();
        let mean: f64 = (0..256)
            .map(|j| m.column(j).iter().map(|x| x * x).sum::<f64>())
            .sum::<f64>()
            / 256.0;
        assert!((mean - 1.0).abs() < 0.1, "mean squared column norm {mean}");
    }

    #[test]
    fn bernoulli_entries_have_fixed_magnitude() {
        let m = build_matrix(&EnsembleSpec::new(EnsembleKind::Bernoulli, 16, 40, 9)).unwrap();
        let expected = 1.0 / 4.0;
        assert!(m.as_slice().iter().all(|x| x.abs() == expected));
        assert!(m.as_slice().iter().any(|&x| x > 0.0));
        assert!(m.as_slice().iter().any(|&x| x < 0.0));
    }

    #[test]
    fn partial_fourier_columns_are_unit_norm() {
        let m = build_matrix(&EnsembleSpec::new(EnsembleKind::PartialFourierReal, 32, 128, 1)).unwrap();
        for j in 0..128 {
            let n2: f64 = m.column(j).iter().map(|x| x * x).sum();
            assert!((n2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_bits() {
        for kind in [
            EnsembleKind::Gaussian,
            EnsembleKind::Bernoulli,
            EnsembleKind::PartialFourierReal,
        ] {
            let spec = EnsembleSpec::new(kind, 20, 64, 77);
            let a = build_matrix(&spec).unwrap();
            let b = build_matrix(&spec).unwrap();
            assert_eq!(a, b);
            let c = build_matrix(&EnsembleSpec { seed: 78, ..spec }).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        let too_tall = EnsembleSpec::new(EnsembleKind::Gaussian, 65, 64, 0);
        assert!(matches!(build_matrix(&too_tall), Err(Error::InvalidArgument(_))));
        let odd = EnsembleSpec::new(EnsembleKind::PartialFourierReal, 31, 64, 0);
        assert!(matches!(build_matrix(&odd), Err(Error::InvalidArgument(_))));
        let crowded = EnsembleSpec::new(EnsembleKind::PartialFourierReal, 64, 64, 0);
        assert!(build_matrix(&crowded).is_err());
    }

    #[test]
    fn kind_round_trips_through_name() {
        for kind in [
            EnsembleKind::Gaussian,
            EnsembleKind::Bernoulli,
            EnsembleKind::PartialFourierReal,
        ] {
            assert_eq!(kind.name().parse::<EnsembleKind>().unwrap(), kind);
        }
        assert!("fourier".parse::<EnsembleKind>().is_err());
    }

    #[test]
    fn identity_is_an_exact_isometry() {
        let id = DenseMatrix::identity(32);
        for m in [1, 3, 8, 32] {
            let est = probe_ric(&id, m, 50, 5).unwrap();
            assert_eq!(est.lower, 1.0);
            assert_eq!(est.upper, 1.0);
            assert_eq!(est.epsilon_hat, 0.0);
        }
    }

    #[test]
    fn doubled_identity_has_epsilon_one() {
        let m = DenseMatrix::identity(16).scaled(2.0);
        let est = probe_ric(&m, 4, 20, 1).unwrap();
        assert_eq!(est.upper, 2.0);
        assert_eq!(est.epsilon_hat, 1.0);
    }

    #[test]
    fn gaussian_probe_regression() {
        let m = build_matrix(&EnsembleSpec::new(EnsembleKind::Gaussian, 128, 256, 42)).unwrap();
        let est = probe_ric(&m, 4, 1000, 42).unwrap();
        assert!(est.epsilon_hat < 0.5, "{est:?}");
        assert!(est.lower <= est.upper);
        assert_eq!(est, probe_ric(&m, 4, 1000, 42).unwrap());
    }

    #[test]
    fn probe_is_monotone_in_samples() {
        let m = build_matrix(&EnsembleSpec::new(EnsembleKind::Bernoulli, 24, 48, 4)).unwrap();
        let mut prev = 0.0;
        for samples in [1, 2, 5, 10, 50, 200] {
            let est = probe_ric(&m, 3, samples, 9).unwrap();
            assert!(est.epsilon_hat >= prev);
            prev = est.epsilon_hat;
        }
    }

    #[test]
    fn probe_rejects_bad_sparsity() {
        let id = DenseMatrix::identity(4);
        assert!(probe_ric(&id, 5, 1, 0).is_err());
        assert!(probe_ric(&id, 0, 1, 0).is_err());
        assert!(probe_ric(&id, 2, 0, 0).is_err());
    }
}
