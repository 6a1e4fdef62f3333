//! Fixtures shared by the criterion benches.

use romp_core::{build_matrix, generate_signal, DenseMatrix, EnsembleKind, EnsembleSpec, SignalKind, SignalSpec};

/// A Gaussian `rows x dim` matrix and the noiseless measurements of a flat
/// `sparsity`-sparse signal.
pub fn flat_sparse_problem(rows: usize, dim: usize, sparsity: usize, seed: u64) -> (DenseMatrix, Vec<f64>) {
    let phi = build_matrix(&EnsembleSpec::new(EnsembleKind::Gaussian, rows, dim, seed)).expect("valid ensemble");
    let (v, _) = generate_signal(&SignalSpec {
        kind: SignalKind::FlatSparse,
        dim,
        sparsity,
        seed,
        stream: 0,
    })
    .expect("valid signal");
    let x = phi.mat_vec(&v).expect("matching dimensions");
    (phi, x)
}
