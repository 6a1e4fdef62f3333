//! Dense real linear algebra: row-major matrices, sorted index sets and a
//! Householder QR least-squares solver.

use std::fmt;

use crate::error::{Error, Result};

/// Columns whose |R_ii| falls below this fraction of the largest |R_jj| are
/// treated as numerically dependent.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Dense `rows x cols` matrix of finite reals, stored row-major.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DenseMatrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .finish_non_exhaustive()
    }
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("ragged rows"));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { rows: n, cols: n, data }
    }

    /// Entries are generated row by row; `f(i, j)` must return finite values.
    pub(crate) fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// `M z`.
    pub fn mat_vec(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.cols {
            return Err(Error::invalid(format!(
                "mat_vec: vector length {} does not match {} columns",
                z.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), z)).collect())
    }

    /// `Mᵀ w`.
    pub fn adjoint_mat_vec(&self, w: &[f64]) -> Result<Vec<f64>> {
        if w.len() != self.rows {
            return Err(Error::invalid(format!(
                "adjoint_mat_vec: vector length {} does not match {} rows",
                w.len(),
                self.rows
            )));
        }
        let mut out = vec![0.0; self.cols];
        for (i, &wi) in w.iter().enumerate() {
            if wi == 0.0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.row(i)) {
                *o += m * wi;
            }
        }
        Ok(out)
    }

    /// The `rows x |set|` submatrix of the columns in `set`, in set order.
    pub fn restrict_columns(&self, set: &IndexSet) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::invalid("restrict_columns: empty index set"));
        }
        if let Some(&bad) = set.iter().find(|&&j| j >= self.cols) {
            return Err(Error::invalid(format!(
                "restrict_columns: index {bad} out of range for {} columns",
                self.cols
            )));
        }
        let idx = set.as_slice();
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(idx.iter().map(|&j| row[j]));
        }
        Ok(Self {
            rows: self.rows,
            cols: idx.len(),
            data,
        })
    }
}

/// Strictly increasing list of column indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Accepts indices in any order; duplicates are dropped.
    pub fn from_unsorted(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    /// Requires an already strictly increasing list.
    pub fn from_sorted(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("index set must be strictly increasing"));
        }
        Ok(Self(indices))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.0.iter()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&x), Some(&&y)) => {
                    if x < y {
                        out.push(x);
                        a.next();
                    } else if y < x {
                        out.push(y);
                        b.next();
                    } else {
                        out.push(x);
                        a.next();
                        b.next();
                    }
                }
                (Some(&&x), None) => {
                    out.push(x);
                    a.next();
                }
                (None, Some(&&y)) => {
                    out.push(y);
                    b.next();
                }
                (None, None) => break,
            }
        }
        IndexSet(out)
    }

    pub fn intersection_len(&self, other: &IndexSet) -> usize {
        self.iter().filter(|&&i| other.contains(i)).count()
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.intersection_len(other) == 0
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.iter().all(|&i| other.contains(i))
    }

    /// Embeds `coeffs` (one per index, in set order) into a length-`dim` vector.
    pub fn scatter(&self, coeffs: &[f64], dim: usize) -> Vec<f64> {
        debug_assert_eq!(coeffs.len(), self.len());
        let mut out = vec![0.0; dim];
        for (&i, &c) in self.iter().zip(coeffs) {
            out[i] = c;
        }
        out
    }

    pub fn gather(&self, v: &[f64]) -> Vec<f64> {
        self.iter().map(|&i| v[i]).collect()
    }
}

impl<'a> IntoIterator for &'a IndexSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `argmin_y ‖x − A y‖₂` by Householder QR without pivoting.
///
/// Fails with [`Error::RankDeficient`] when `A` has more columns than rows or
/// when some |R_ii| is below [`RANK_CUTOFF`] times the largest.
pub fn least_squares(a: &DenseMatrix, x: &[f64]) -> Result<Vec<f64>> {
    let (m, k) = (a.rows(), a.cols());
    if x.len() != m {
        return Err(Error::invalid(format!(
            "least_squares: rhs length {} does not match {m} rows",
            x.len()
        )));
    }

    // Column-major working copy; reflections are applied in place.
    let mut cols: Vec<Vec<f64>> = (0..k).map(|j| a.column(j)).collect();
    let mut rhs = x.to_vec();
    let steps = m.min(k);
    let mut diag = vec![0.0; steps];

    for j in 0..steps {
        let head = &cols[j][j..];
        let alpha_norm = norm2(head);
        if alpha_norm == 0.0 {
            continue;
        }
        let alpha = if head[0] > 0.0 { -alpha_norm } else { alpha_norm };
        let mut v = head.to_vec();
        v[0] -= alpha;
        let vv = dot(&v, &v);
        diag[j] = alpha;
        cols[j][j] = alpha;
        for c in &mut cols[j][j + 1..] {
            *c = 0.0;
        }
        if vv == 0.0 {
            continue;
        }
        let reflect = |target: &mut [f64]| {
            let s = 2.0 * dot(&v, target) / vv;
            for (t, vi) in target.iter_mut().zip(&v) {
                *t -= s * vi;
            }
        };
        for col in cols.iter_mut().skip(j + 1) {
            reflect(&mut col[j..]);
        }
        reflect(&mut rhs[j..]);
    }

    let largest = diag.iter().fold(0.0_f64, |acc, d| acc.max(d.abs()));
    let rank = diag
        .iter()
        .filter(|d| largest > 0.0 && d.abs() >= RANK_CUTOFF * largest)
        .count();
    if rank < k {
        return Err(Error::RankDeficient { rank, cols: k });
    }

    // Back substitution against the upper triangle.
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = rhs[i];
        for (jj, yj) in y.iter().enumerate().skip(i + 1) {
            s -= cols[jj][i] * yj;
        }
        y[i] = s / cols[i][i];
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
        let data = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
        DenseMatrix::new(rows, cols, data).unwrap()
    }

    fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
        (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    // Gauss-Jordan inverse with partial pivoting; test-only oracle.
    fn invert(mut a: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        let n = a.len();
        let mut inv: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())
                .unwrap();
            a.swap(c, p);
            inv.swap(c, p);
            let piv = a[c][c];
            for j in 0..n {
                a[c][j] /= piv;
                inv[c][j] /= piv;
            }
            for r in 0..n {
                if r != c {
                    let f = a[r][c];
                    for j in 0..n {
                        a[r][j] -= f * a[c][j];
                        inv[r][j] -= f * inv[c][j];
                    }
                }
            }
        }
        inv
    }

    #[test]
    fn mat_vec_identity_and_hand_example() {
        let id = DenseMatrix::identity(2);
        assert_eq!(id.mat_vec(&[3.0, -1.0]).unwrap(), vec![3.0, -1.0]);
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(m.mat_vec(&[1.0, 1.0]).unwrap(), vec![3.0, 7.0]);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn mat_vec_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_matrix(&mut rng, 8, 5);
        let z = random_vec(&mut rng, 5);
        let w = random_vec(&mut rng, 8);
        let got = m.mat_vec(&z).unwrap();
        let got_t = m.adjoint_mat_vec(&w).unwrap();
        for i in 0..8 {
            let mut s = 0.0;
            for j in 0..5 {
                s += m.as_slice()[i * 5 + j] * z[j];
            }
            assert!((got[i] - s).abs() <= 1e-12);
        }
        for j in 0..5 {
            let mut s = 0.0;
            for i in 0..8 {
                s += m.as_slice()[i * 5 + j] * w[i];
            }
            assert!((got_t[j] - s).abs() <= 1e-12);
        }
    }

    #[test]
    fn mat_vec_dimension_mismatch() {
        let m = DenseMatrix::identity(3);
        assert!(matches!(m.mat_vec(&[1.0]), Err(Error::InvalidArgument(_))));
        assert!(matches!(m.adjoint_mat_vec(&[1.0; 4]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::new(0, 2, vec![]).is_err());
        assert!(DenseMatrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(DenseMatrix::new(1, 1, vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn restrict_columns_examples() {
        let id = DenseMatrix::identity(3);
        let mid = id.restrict_columns(&IndexSet::from_unsorted([1])).unwrap();
        assert_eq!(mid.as_slice(), &[0.0, 1.0, 0.0]);

        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let sub = m.restrict_columns(&IndexSet::from_unsorted([0, 2])).unwrap();
        assert_eq!(sub.column(0), m.column(0));
        assert_eq!(sub.column(1), m.column(2));
    }

    #[test]
    fn restrict_columns_random_elementwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_matrix(&mut rng, 6, 10);
        let set = IndexSet::from_unsorted(rand::seq::index::sample(&mut rng, 10, 4));
        let sub = m.restrict_columns(&set).unwrap();
        assert_eq!(sub.rows(), 6);
        assert_eq!(sub.cols(), 4);
        for (c, &j) in set.iter().enumerate() {
            for i in 0..6 {
                assert_eq!(sub.get(i, c), m.get(i, j));
            }
        }
    }

    #[test]
    fn restrict_columns_errors() {
        let m = DenseMatrix::identity(3);
        assert!(m.restrict_columns(&IndexSet::empty()).is_err());
        assert!(m.restrict_columns(&IndexSet::from_unsorted([3])).is_err());
    }

    #[test]
    fn least_squares_closed_forms() {
        let a = DenseMatrix::new(2, 1, vec![1.0, 1.0]).unwrap();
        let y = least_squares(&a, &[1.0, 3.0]).unwrap();
        assert!((y[0] - 2.0).abs() < 1e-14);

        let id = DenseMatrix::identity(4);
        let cols = IndexSet::from_unsorted([0, 2, 3]);
        let a = id.restrict_columns(&cols).unwrap();
        let x = [1.5, -2.0, 0.25, 7.0];
        let y = least_squares(&a, &x).unwrap();
        for (yi, xi) in y.iter().zip(cols.gather(&x)) {
            assert!((yi - xi).abs() < 1e-14);
        }
    }

    #[test]
    fn least_squares_matches_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let a = random_matrix(&mut rng, 12, 4);
        let x = random_vec(&mut rng, 12);
        let y = least_squares(&a, &x).unwrap();

        let ata: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..4).map(|j| dot(&a.column(i), &a.column(j))).collect())
            .collect();
        let atx: Vec<f64> = (0..4).map(|i| dot(&a.column(i), &x)).collect();
        let inv = invert(ata);
        for i in 0..4 {
            let expected: f64 = (0..4).map(|j| inv[i][j] * atx[j]).sum();
            assert!((y[i] - expected).abs() < 1e-8, "{} vs {}", y[i], expected);
        }
    }

    #[test]
    fn least_squares_rank_deficient() {
        // Third column duplicates the first.
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 2.0],
            vec![0.0, 3.0, 0.0],
            vec![1.0, 1.0, 1.0],
        ])
        .unwrap();
        match least_squares(&a, &[1.0, 2.0, 3.0, 4.0]) {
            Err(Error::RankDeficient { rank, cols }) => {
                assert_eq!(rank, 2);
                assert_eq!(cols, 3);
            }
            other => panic!("expected rank deficiency, got {other:?}"),
        }
        let wide = DenseMatrix::new(2, 3, vec![1.0, 0.0, 0.0, 0.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            least_squares(&wide, &[1.0, 1.0]),
            Err(Error::RankDeficient { rank: 2, cols: 3 })
        ));
        let zero = DenseMatrix::new(3, 1, vec![0.0; 3]).unwrap();
        assert!(matches!(
            least_squares(&zero, &[1.0; 3]),
            Err(Error::RankDeficient { rank: 0, cols: 1 })
        ));
    }

    #[test]
    fn index_set_operations() {
        let a = IndexSet::from_unsorted([5, 1, 3, 1]);
        assert_eq!(a.as_slice(), &[1, 3, 5]);
        let b = IndexSet::from_sorted(vec![2, 3, 9]).unwrap();
        assert_eq!(a.union(&b).as_slice(), &[1, 2, 3, 5, 9]);
        assert_eq!(a.intersection_len(&b), 1);
        assert!(!a.is_disjoint(&b));
        assert!(IndexSet::from_unsorted([3]).is_subset(&a));
        assert!(IndexSet::from_sorted(vec![2, 2]).is_err());
        assert_eq!(a.scatter(&[1.0, 2.0, 3.0], 6), vec![0.0, 1.0, 0.0, 2.0, 0.0, 3.0]);
    }
}
