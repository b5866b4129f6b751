//! The gap measure over paired sequences of valuations and allocations.
//!
//! For sequences `X = x₁…x_N` and `Q = q₀…q_N` (with `q₀ = 0`), the gap of
//! index `i` at budget `k` is the worst-case advantage of `q_i` under `x_i`
//! over any `k` earlier allocations composed as one lottery:
//!
//! ```text
//! gap_k(i) = min over multisets {j₁…j_k} ⊆ {0..i−1}  x_i · (q_i − Lot(q_j₁…q_j_k))
//! ```
//!
//! and the menu gap is `Σ_i gap_k(i) / ‖x_i‖₁`. Index 0 may be selected and
//! repeated, so "exactly k" choices subsume "at most k". The gap itself is
//! kept unnormalized; the `1/‖x_i‖₁` weight is applied only in the sum, and
//! callers that need normalized per-index gaps divide explicitly.

use crate::combinatorics::for_each_multiset_exact;
use crate::error::{Error, Result};
use crate::model::{lot, AllocationVector, ValuationType};
use crate::scalar::{sum, Scalar};

/// Paired sequences: `N` valuations with strictly positive ℓ1 norm and
/// `N + 1` allocations starting at the zero vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequencePair<T> {
    n: usize,
    xs: Vec<ValuationType<T>>,
    qs: Vec<AllocationVector<T>>,
}

impl<T: Scalar> SequencePair<T> {
    /// Builds a pair, checking `|Q| = |X| + 1`, `q₀ = 0ⁿ`, dimensions, and
    /// that every `x_i` has positive ℓ1 norm (the normalization divides by it).
    pub fn new(
        n: usize,
        xs: Vec<ValuationType<T>>,
        qs: Vec<AllocationVector<T>>,
    ) -> Result<Self> {
        if qs.len() != xs.len() + 1 {
            return Err(Error::Invalid(format!(
                "allocation sequence has {} entries, expected {}",
                qs.len(),
                xs.len() + 1
            )));
        }
        if !qs[0].is_zero() {
            return Err(Error::Invalid("q0 must be the zero allocation".into()));
        }
        for x in &xs {
            if x.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: x.dim() });
            }
            if !x.l1_norm().is_positive() {
                return Err(Error::Invalid(
                    "every valuation in the sequence must have positive l1 norm".into(),
                ));
            }
        }
        for q in &qs {
            if q.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: q.dim() });
            }
        }
        Ok(SequencePair { n, xs, qs })
    }

    /// Convenience constructor for the common `X = Q` shape (`q₀` prepended).
    pub fn from_identical(n: usize, points: Vec<ValuationType<T>>) -> Result<Self> {
        let mut qs = vec![AllocationVector::zeros(n)];
        qs.extend(points.iter().map(|x| AllocationVector::new(x.values.clone())));
        SequencePair::new(n, points, qs)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of paired points `N` (the allocation sequence has `N + 1`).
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn valuations(&self) -> &[ValuationType<T>] {
        &self.xs
    }

    /// Allocations `q₀…q_N`, zero vector first.
    pub fn allocations(&self) -> &[AllocationVector<T>] {
        &self.qs
    }
}

/// Per-index gaps with their minimizing witnesses, and their weighted sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapReport<T> {
    /// Unnormalized gap per index `1..=N`.
    pub gaps: Vec<T>,
    /// Minimizing index multiset per index, in nondecreasing order.
    pub witnesses: Vec<Vec<usize>>,
    /// `Σ gaps[i] / ‖x_i‖₁`.
    pub menugap: T,
}

/// The gap of index `i` (1-based) at budget `k`, with a minimizing witness.
///
/// All `C(i + k − 1, k)` multisets are enumerated in canonical nondecreasing
/// order; on ties the later candidate replaces the earlier, so the recorded
/// witness is the lexicographically largest minimizer.
pub fn gap<T: Scalar>(pair: &SequencePair<T>, k: usize, i: usize) -> Result<(T, Vec<usize>)> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if i == 0 || i > pair.len() {
        return Err(Error::SequenceIndexOutOfRange { index: i, len: pair.len() });
    }
    let x = &pair.xs[i - 1];
    let own_value = x.dot(&pair.qs[i])?;

    let mut best: Option<(T, Vec<usize>)> = None;
    let mut failure: Option<Error> = None;
    for_each_multiset_exact(i, k, &mut |choice| {
        if failure.is_some() {
            return;
        }
        let composed = match lot(pair.n, choice.iter().map(|&j| &pair.qs[j])) {
            Ok(c) => c,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let value = match x.dot(&composed) {
            Ok(v) => own_value.clone() - v,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let replace = match &best {
            None => true,
            Some((current, _)) => value <= *current,
        };
        if replace {
            best = Some((value, choice.to_vec()));
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(best.expect("at least the all-null multiset is enumerated"))
}

/// Full gap report: every per-index gap, witness, and the weighted total.
pub fn menugap<T: Scalar>(pair: &SequencePair<T>, k: usize) -> Result<GapReport<T>> {
    let mut gaps = Vec::with_capacity(pair.len());
    let mut witnesses = Vec::with_capacity(pair.len());
    for i in 1..=pair.len() {
        let (g, w) = gap(pair, k, i)?;
        gaps.push(g);
        witnesses.push(w);
    }
    let menugap = sum(
        gaps.iter()
            .zip(&pair.xs)
            .map(|(g, x)| g.clone() / x.l1_norm()),
    );
    Ok(GapReport { gaps, witnesses, menugap })
}

/// Repeatedly removes the earliest pair whose gap is not strictly positive,
/// recomputing after each removal. Dropping such a point never decreases the
/// menu gap: its own term leaves the sum and later minima range over fewer
/// predecessors.
pub fn prune_nonpositive<T: Scalar>(pair: &SequencePair<T>, k: usize) -> Result<SequencePair<T>> {
    let mut current = pair.clone();
    loop {
        let report = menugap(&current, k)?;
        match report.gaps.iter().position(|g| !g.is_positive()) {
            Some(pos) => {
                current.xs.remove(pos);
                current.qs.remove(pos + 1);
            }
            None => return Ok(current),
        }
    }
}

/// Telescoping upper-bound certificate for an allocation sequence:
/// `Σ_i Σ_d max(q_{i,d} − m_{i−1,d}, 0)` where `m_{i−1}` is the
/// coordinate-wise maximum of `q₀…q_{i−1}`. Each coordinate's contributions
/// telescope inside `[0, 1]`, so the certificate never exceeds the dimension.
pub fn telescoping_certificate<T: Scalar>(qs: &[AllocationVector<T>]) -> Result<T> {
    let Some(first) = qs.first() else {
        return Ok(T::zero());
    };
    let n = first.dim();
    let mut running_max = first.coords.clone();
    let mut total = T::zero();
    for q in &qs[1..] {
        if q.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: q.dim() });
        }
        for (m, c) in running_max.iter_mut().zip(&q.coords) {
            if *c > *m {
                total = total + (c.clone() - m.clone());
                *m = c.clone();
            }
        }
    }
    Ok(total)
}
