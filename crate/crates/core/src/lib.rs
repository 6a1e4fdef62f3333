//! Sparse recovery with Regularized Orthogonal Matching Pursuit (ROMP).
//!
//! * [`linalg`]: dense matrices, index sets, Householder least squares.
//! * [`ensembles`]: Gaussian, Bernoulli and real partial-Fourier
//!   measurement matrices, plus a Monte-Carlo isometry probe.
//! * [`romp`]: ROMP, the OMP baseline and an iteration-invariant audit.
//! * [`signals`]: sparse and power-law test signals, noise, m-term truncation.
//! * [`harness`]: seeded Monte-Carlo sweeps with CSV and SVG output.
//!
//! ```
//! use romp_core::{build_matrix, romp_recover, EnsembleKind, EnsembleSpec, RecoveryOptions};
//!
//! let phi = build_matrix(&EnsembleSpec::new(EnsembleKind::Gaussian, 64, 128, 7)).unwrap();
//! let mut v = vec![0.0; 128];
//! v[3] = 1.0;
//! v[90] = -2.0;
//! let x = phi.mat_vec(&v).unwrap();
//! let result = romp_recover(&phi, &x, 2, &RecoveryOptions::default()).unwrap();
//! assert!((result.estimate[90] + 2.0).abs() < 1e-8);
//! ```

pub mod ensembles;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod rng;
pub mod romp;
pub mod signals;
pub mod textio;

pub use ensembles::{build_matrix, probe_ric, EnsembleKind, EnsembleSpec, RicEstimate};
pub use error::{Error, Result};
pub use harness::{
    compute_sweep, run_sweep, run_trial, truncated_error, Algorithm, Cell, CellSummary, NoiseLevel,
    Stats, SweepConfig, SweepReport, TrialRecord,
};
pub use linalg::{least_squares, DenseMatrix, IndexSet};
pub use romp::{
    audit, identify, omp_recover, regularize, romp_recover, IterationSnapshot, RecoveryOptions,
    RecoveryResult, Termination, Violation,
};
pub use signals::{
    add_noise, best_m_term, generate_signal, NoiseSpec, NoiseTarget, SignalKind, SignalSpec,
};
