//! Regularized Orthogonal Matching Pursuit and the plain OMP baseline.
//!
//! Each ROMP iteration:
//!
//! 1. **Identify** the `n` largest nonzero coordinates of `u = Φᵀr`.
//! 2. **Regularize**: among subsets of those with magnitudes within a factor
//!    of two of each other, keep the one of maximal energy.
//! 3. **Update** the support, re-solve least squares on it and recompute the
//!    residual.
//!
//! The loop stops after `n` iterations, once the support holds `2n` indices,
//! when `u` vanishes, or when the residual drops below
//! `residual_tol · ‖x‖₂`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{least_squares, norm2, DenseMatrix, IndexSet};

/// Relative tolerance used when auditing `max_{i∈I} |(Φᵀr)(i)|`.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    MaxIterations,
    SupportBudget,
    ZeroObservation,
    ZeroResidual,
    /// Only produced for the partial result carried by
    /// [`Error::SupportRankDeficient`].
    RankDeficient,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::MaxIterations => "max-iterations",
            Termination::SupportBudget => "support-budget",
            Termination::ZeroObservation => "zero-observation",
            Termination::ZeroResidual => "zero-residual",
            Termination::RankDeficient => "rank-deficient",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryOptions {
    /// Record an [`IterationSnapshot`] per iteration.
    pub trace: bool,
    /// Stop once `‖r‖₂ <= residual_tol · ‖x‖₂`.
    pub residual_tol: f64,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        Self {
            trace: false,
            residual_tol: 1e-10,
        }
    }
}

impl RecoveryOptions {
    pub fn traced() -> Self {
        Self {
            trace: true,
            ..Self::default()
        }
    }
}

/// State of one iteration, captured after its update step.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationSnapshot {
    /// Support `I` before this iteration's selection.
    pub support_before: IndexSet,
    /// Identify candidates `J`.
    pub candidates: IndexSet,
    /// Regularized selection `J₀`.
    pub selected: IndexSet,
    /// `Φᵀr` for the residual entering the iteration, zeroed on `I`.
    pub observation: Vec<f64>,
    /// Residual after the update.
    pub residual: Vec<f64>,
    /// Least-squares coefficients after the update, embedded in ℝ^d.
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    pub estimate: Vec<f64>,
    pub support: IndexSet,
    pub iterations: usize,
    pub termination: Termination,
    pub trace: Vec<IterationSnapshot>,
}

fn by_magnitude(u: &[f64]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&a, &b| {
        u[b].abs()
            .partial_cmp(&u[a].abs())
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    }
}

/// Up to `n` indices of the largest nonzero |u(i)|, ties to the lower index.
pub fn identify(u: &[f64], n: usize) -> IndexSet {
    let mut nonzero: Vec<usize> = (0..u.len()).filter(|&i| u[i] != 0.0).collect();
    nonzero.sort_by(by_magnitude(u));
    nonzero.truncate(n);
    IndexSet::from_unsorted(nonzero)
}

/// Maximal-energy subset of `candidates` whose magnitudes are pairwise
/// within a factor of two.
///
/// Sorted by decreasing magnitude, every comparable set lies inside a
/// contiguous window `a[s] <= 2 a[e]`, and growing a set inside its window
/// only adds energy, so only the maximal window for each start is scored.
/// Equal energies resolve to the window with the earliest start.
pub fn regularize(u: &[f64], candidates: &IndexSet) -> Result<IndexSet> {
    if candidates.is_empty() {
        return Err(Error::invalid("regularize: empty candidate set"));
    }
    if let Some(&bad) = candidates.iter().find(|&&i| i >= u.len()) {
        return Err(Error::invalid(format!(
            "regularize: index {bad} out of range for length {}",
            u.len()
        )));
    }
    let mut order: Vec<usize> = candidates.iter().copied().filter(|&i| u[i] != 0.0).collect();
    if order.is_empty() {
        return Err(Error::invalid("regularize: observation vanishes on candidates"));
    }
    order.sort_by(by_magnitude(u));
    let mag: Vec<f64> = order.iter().map(|&i| u[i].abs()).collect();

    let mut best = (0, 0, f64::NEG_INFINITY);
    let mut end = 0;
    let mut prev_end = 0;
    for start in 0..mag.len() {
        end = end.max(start);
        while end + 1 < mag.len() && mag[start] <= 2.0 * mag[end + 1] {
            end += 1;
        }
        // A window ending where the previous one did is contained in it.
        if start > 0 && end == prev_end {
            continue;
        }
        prev_end = end;
        let energy: f64 = mag[start..=end].iter().map(|m| m * m).sum();
        if energy > best.2 {
            best = (start, end, energy);
        }
    }
    Ok(IndexSet::from_unsorted(order[best.0..=best.1].iter().copied()))
}

/// `‖u|_J₀‖₂ >= ‖u|_J‖₂ / (2.5 √max(ln n, 1))`.
pub fn energy_floor_factor(n: usize) -> f64 {
    1.0 / (2.5 * (n as f64).ln().max(1.0).sqrt())
}

fn validate(phi: &DenseMatrix, x: &[f64], n: usize, max_support: usize) -> Result<()> {
    if x.len() != phi.rows() {
        return Err(Error::invalid(format!(
            "measurement length {} does not match {} matrix rows",
            x.len(),
            phi.rows()
        )));
    }
    if n == 0 {
        return Err(Error::invalid("sparsity must be at least 1"));
    }
    if max_support > phi.cols() {
        return Err(Error::invalid(format!(
            "support budget {max_support} exceeds {} columns",
            phi.cols()
        )));
    }
    if let Some(pos) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite measurement at {pos}")));
    }
    Ok(())
}

/// Shared greedy loop. `select` maps `(u, n)` to `(J, J₀)`.
fn pursue(
    phi: &DenseMatrix,
    x: &[f64],
    n: usize,
    opts: &RecoveryOptions,
    support_budget: Option<usize>,
    select: impl Fn(&[f64], usize) -> Result<(IndexSet, IndexSet)>,
) -> Result<RecoveryResult> {
    let dim = phi.cols();
    let rtol = opts.residual_tol * norm2(x);
    let mut state = RecoveryResult {
        estimate: vec![0.0; dim],
        support: IndexSet::empty(),
        iterations: 0,
        termination: Termination::MaxIterations,
        trace: Vec::new(),
    };
    let mut residual = x.to_vec();

    state.termination = loop {
        if state.iterations == n {
            break Termination::MaxIterations;
        }
        if support_budget.is_some_and(|b| state.support.len() >= b) {
            break Termination::SupportBudget;
        }

        let mut u = phi.adjoint_mat_vec(&residual)?;
        // Φ_Iᵀr vanishes in exact arithmetic after every update.
        for &i in &state.support {
            u[i] = 0.0;
        }
        let (candidates, selected) = select(&u, n)?;
        if selected.is_empty() {
            break Termination::ZeroObservation;
        }

        let support = state.support.union(&selected);
        let sub = phi.restrict_columns(&support)?;
        let coeffs = match least_squares(&sub, x) {
            Ok(c) => c,
            Err(Error::RankDeficient { rank, .. }) => {
                state.termination = Termination::RankDeficient;
                return Err(Error::SupportRankDeficient {
                    support,
                    rank,
                    partial: Box::new(state),
                });
            }
            Err(e) => return Err(e),
        };
        let fitted = sub.mat_vec(&coeffs)?;
        residual = x.iter().zip(&fitted).map(|(a, b)| a - b).collect();
        state.estimate = support.scatter(&coeffs, dim);
        state.iterations += 1;
        if opts.trace {
            state.trace.push(IterationSnapshot {
                support_before: state.support.clone(),
                candidates,
                selected,
                observation: u,
                residual: residual.clone(),
                coefficients: state.estimate.clone(),
            });
        }
        state.support = support;

        if norm2(&residual) <= rtol {
            break Termination::ZeroResidual;
        }
    };
    Ok(state)
}

/// Recovers an approximately `n`-sparse `v` from `x = Φv + e` with ROMP.
/// Requires `3n <= d`.
pub fn romp_recover(
    phi: &DenseMatrix,
    x: &[f64],
    n: usize,
    opts: &RecoveryOptions,
) -> Result<RecoveryResult> {
    validate(phi, x, n, 3 * n)?;
    pursue(phi, x, n, opts, Some(2 * n), |u, n| {
        let candidates = identify(u, n);
        if candidates.is_empty() {
            return Ok((candidates, IndexSet::empty()));
        }
        let selected = regularize(u, &candidates)?;
        Ok((candidates, selected))
    })
}

/// Orthogonal Matching Pursuit: one largest coordinate per iteration, `n`
/// iterations.
pub fn omp_recover(
    phi: &DenseMatrix,
    x: &[f64],
    n: usize,
    opts: &RecoveryOptions,
) -> Result<RecoveryResult> {
    validate(phi, x, n, n)?;
    pursue(phi, x, n, opts, None, |u, _| {
        let j = identify(u, 1);
        Ok((j.clone(), j))
    })
}

/// A broken per-iteration invariant found by [`audit`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub iteration: usize,
    pub what: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "iteration {}: {}", self.iteration, self.what)
    }
}

/// Checks a traced result against the iteration invariants:
/// comparability, `J₀ ⊆ J`, `|J| <= n`, `J₀ ∩ I = ∅`, the energy floor,
/// residual orthogonality on `I`, monotone support and the budgets
/// `iterations <= n`, `|I| <= 3n`, `supp(v̂) ⊆ I`.
pub fn audit(phi: &DenseMatrix, x: &[f64], n: usize, result: &RecoveryResult) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut flag = |iteration: usize, what: String| out.push(Violation { iteration, what });
    let x_norm = norm2(x);
    let floor = energy_floor_factor(n);

    if result.iterations > n {
        flag(result.iterations, format!("{} iterations exceed n = {n}", result.iterations));
    }
    if result.support.len() > 3 * n {
        flag(result.iterations, format!("support size {} exceeds 3n", result.support.len()));
    }
    if let Some(i) = (0..result.estimate.len())
        .find(|&i| result.estimate[i] != 0.0 && !result.support.contains(i))
    {
        flag(result.iterations, format!("estimate nonzero at {i} outside the support"));
    }

    let mut prev_after: Option<IndexSet> = None;
    for (k, snap) in result.trace.iter().enumerate() {
        let it = k + 1;
        let u = &snap.observation;
        if let Some(prev) = &prev_after {
            if !prev.is_subset(&snap.support_before) {
                flag(it, "support shrank".into());
            }
        }
        if snap.candidates.len() > n {
            flag(it, format!("|J| = {} exceeds n", snap.candidates.len()));
        }
        if !snap.selected.is_subset(&snap.candidates) {
            flag(it, "J0 is not a subset of J".into());
        }
        if !snap.selected.is_disjoint(&snap.support_before) {
            flag(it, "J0 intersects I".into());
        }
        let mags: Vec<f64> = snap.selected.iter().map(|&i| u[i].abs()).collect();
        let hi = mags.iter().copied().fold(0.0, f64::max);
        let lo = mags.iter().copied().fold(f64::INFINITY, f64::min);
        if !mags.is_empty() && hi > 2.0 * lo {
            flag(it, format!("J0 not comparable: max {hi:e} > 2 * min {lo:e}"));
        }
        let e_sel = norm2(&snap.selected.gather(u));
        let e_cand = norm2(&snap.candidates.gather(u));
        if e_sel < floor * e_cand {
            flag(it, format!("energy floor: {e_sel:e} < {:e}", floor * e_cand));
        }
        let after = snap.support_before.union(&snap.selected);
        match phi.adjoint_mat_vec(&snap.residual) {
            Ok(corr) => {
                let worst = after.iter().map(|&i| corr[i].abs()).fold(0.0, f64::max);
                if worst > ORTHOGONALITY_TOL * x_norm {
                    flag(it, format!("residual not orthogonal to support: {worst:e}"));
                }
            }
            Err(e) => flag(it, e.to_string()),
        }
        prev_after = Some(after);
    }
    if let Some(last) = &prev_after {
        if *last != result.support {
            flag(result.iterations, "final support differs from traced support".into());
        }
    }
    out
}
