//! Test signals, Gaussian noise and best m-term truncation.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::IndexSet;
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalKind {
    /// `n` random coordinates set to one.
    FlatSparse,
    /// `n` random coordinates with standard normal values.
    GaussianSparse,
    /// Every coordinate nonzero; the k-th largest magnitude is `scale · k^(-exponent)`.
    PowerLaw { exponent: f64, scale: f64 },
}

impl SignalKind {
    pub fn name(&self) -> &'static str {
        match self {
            SignalKind::FlatSparse => "flat-sparse",
            SignalKind::GaussianSparse => "gaussian-sparse",
            SignalKind::PowerLaw { .. } => "power-law",
        }
    }

    pub fn is_sparse(&self) -> bool {
        !matches!(self, SignalKind::PowerLaw { .. })
    }
}

impl fmt::Display for SignalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses the kind name; `power-law` gets exponent 2 and scale 1.
impl FromStr for SignalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat-sparse" => Ok(SignalKind::FlatSparse),
            "gaussian-sparse" => Ok(SignalKind::GaussianSparse),
            "power-law" => Ok(SignalKind::PowerLaw {
                exponent: 2.0,
                scale: 1.0,
            }),
            other => Err(Error::invalid(format!("unknown signal kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalSpec {
    pub kind: SignalKind,
    pub dim: usize,
    /// Support size for the sparse kinds; ignored for power laws.
    pub sparsity: usize,
    pub seed: u64,
    pub stream: u64,
}

impl SignalSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::invalid("signal dimension must be positive"));
        }
        match self.kind {
            SignalKind::FlatSparse | SignalKind::GaussianSparse => {
                if self.sparsity == 0 || self.sparsity > self.dim {
                    return Err(Error::invalid(format!(
                        "sparsity must be in 1..={}, got {}",
                        self.dim, self.sparsity
                    )));
                }
            }
            SignalKind::PowerLaw { exponent, scale } => {
                if !(exponent > 1.0 && exponent.is_finite()) {
                    return Err(Error::invalid(format!("power-law exponent must exceed 1, got {exponent}")));
                }
                if !(scale > 0.0 && scale.is_finite()) {
                    return Err(Error::invalid(format!("power-law scale must be positive, got {scale}")));
                }
            }
        }
        Ok(())
    }
}

/// Returns the signal and its support.
pub fn generate_signal(spec: &SignalSpec) -> Result<(Vec<f64>, IndexSet)> {
    spec.validate()?;
    let mut rng = stream_rng(spec.seed, spec.stream);
    let mut v = vec![0.0; spec.dim];
    match spec.kind {
        SignalKind::FlatSparse => {
            for i in index::sample(&mut rng, spec.dim, spec.sparsity) {
                v[i] = 1.0;
            }
        }
        SignalKind::GaussianSparse => {
            for i in index::sample(&mut rng, spec.dim, spec.sparsity) {
                v[i] = rng.sample(StandardNormal);
            }
        }
        SignalKind::PowerLaw { exponent, scale } => {
            let mut slots: Vec<usize> = (0..spec.dim).collect();
            slots.shuffle(&mut rng);
            for (rank, &i) in slots.iter().enumerate() {
                let mag = scale * ((rank + 1) as f64).powf(-exponent);
                v[i] = if rng.random::<bool>() { mag } else { -mag };
            }
        }
    }
    let support = IndexSet::from_unsorted((0..spec.dim).filter(|&i| v[i] != 0.0));
    Ok((v, support))
}

/// Indices of the `m` largest |w(i)|, ties to the lower index, in rank order.
pub fn top_m_indices(w: &[f64], m: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| {
        w[b].abs()
            .partial_cmp(&w[a].abs())
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order.truncate(m);
    order
}

/// `w` with everything but its `m` largest-magnitude entries zeroed.
pub fn best_m_term(w: &[f64], m: usize) -> Vec<f64> {
    if m >= w.len() {
        return w.to_vec();
    }
    let mut out = vec![0.0; w.len()];
    for i in top_m_indices(w, m) {
        out[i] = w[i];
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseTarget {
    /// Added to `Φv`.
    Measurement,
    /// Added to `v` before measuring.
    Signal,
}

impl NoiseTarget {
    pub fn name(self) -> &'static str {
        match self {
            NoiseTarget::Measurement => "measurement",
            NoiseTarget::Signal => "signal",
        }
    }
}

impl fmt::Display for NoiseTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "measurement" => Ok(NoiseTarget::Measurement),
            "signal" => Ok(NoiseTarget::Signal),
            other => Err(Error::invalid(format!("unknown noise target '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub target: NoiseTarget,
    /// Per-entry standard deviation.
    pub sigma: f64,
    pub seed: u64,
    pub stream: u64,
}

/// Returns `(target + e, e)` with `e` i.i.d. N(0, sigma²).
pub fn add_noise(target: &[f64], spec: &NoiseSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(spec.sigma >= 0.0 && spec.sigma.is_finite()) {
        return Err(Error::invalid(format!("noise sigma must be nonnegative, got {}", spec.sigma)));
    }
    if spec.sigma == 0.0 {
        return Ok((target.to_vec(), vec![0.0; target.len()]));
    }
    let mut rng = stream_rng(spec.seed, spec.stream);
    let e: Vec<f64> = (0..target.len())
        .map(|_| spec.sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let perturbed = target.iter().zip(&e).map(|(t, n)| t + n).collect();
    Ok((perturbed, e))
}
