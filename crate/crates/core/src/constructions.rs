//! Constructive pipelines.
//!
//! Upper-bound side: menu surgery ([`filter_min_price`], [`band_split`]) and
//! bin-representative extraction ([`extract_sequences`]) turn a menu and a
//! distribution into a sequence pair whose menu gap controls the revenue;
//! [`upper_bound_pipeline`] chains the stages with the standard constants.
//!
//! Lower-bound side: cover-free families ([`greedy_coverfree`],
//! [`kautz_singleton`], [`verify_coverfree`]) give sequence pairs with large
//! menu gap, and [`sequences_to_instance`] converts any suitable pair into a
//! concrete distribution plus a deterministic menu whose buy-k revenue equals
//! the menu gap while bundling earns almost nothing.

use crate::benchmarks::{brev, srev, BenchmarkResult};
use crate::buyer::{best_response, revenue_under_buyk, verify_buyk_ic};
use crate::error::{Error, Result};
use crate::menugap::{menugap, SequencePair};
use crate::model::{
    AllocationVector, DiscreteDistribution, Menu, MenuEntry, ValuationType,
};
use crate::scalar::Scalar;

/// Default ground-set cap for greedy family construction.
pub const DEFAULT_GREEDY_CAP: usize = 12;
/// Default ground-set cap for the exhaustive maximum-family search.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 4;
/// Default tuple budget for brute-force cover-free verification.
pub const DEFAULT_VERIFY_BUDGET: u128 = 10_000_000;

/// A family of subsets of `{1..ground_size}` together with the cover-free
/// parameter `k` it certifies: no member is contained in the union of any `k`
/// other members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverFreeFamily {
    pub ground_size: usize,
    pub sets: Vec<Vec<usize>>,
    pub k: usize,
}

impl CoverFreeFamily {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Indicator vectors of the member sets, in family order.
    pub fn indicator_valuations<T: Scalar>(&self) -> Vec<ValuationType<T>> {
        self.sets
            .iter()
            .map(|s| {
                let mut coords = vec![T::zero(); self.ground_size];
                for &e in s {
                    coords[e - 1] = T::one();
                }
                ValuationType::new(coords)
            })
            .collect()
    }

    fn masks(&self) -> Vec<Mask> {
        self.sets.iter().map(|s| Mask::from_set(self.ground_size, s)).collect()
    }
}

/// Small fixed-width bitset over the ground set.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Mask(Vec<u64>);

impl Mask {
    fn empty(ground: usize) -> Self {
        Mask(vec![0; ground.div_ceil(64)])
    }

    fn from_set(ground: usize, set: &[usize]) -> Self {
        let mut m = Mask::empty(ground);
        for &e in set {
            m.0[(e - 1) / 64] |= 1 << ((e - 1) % 64);
        }
        m
    }

    fn union_with(&mut self, other: &Mask) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    fn is_subset_of(&self, other: &Mask) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn intersection_size(&self, other: &Mask) -> usize {
        self.0.iter().zip(&other.0).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }
}

/// Outcome of a brute-force cover-free check. A counterexample names the
/// covered member and the `k` members whose union contains it (0-based
/// indices into the family).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverFreeCheck {
    pub ok: bool,
    pub counterexample: Option<(usize, Vec<usize>)>,
}

/// Brute-force verification with the default budget.
pub fn verify_coverfree(family: &CoverFreeFamily, k: usize) -> Result<CoverFreeCheck> {
    verify_coverfree_with_budget(family, k, DEFAULT_VERIFY_BUDGET)
}

/// Checks every choice of `k + 1` distinct members. The tuple count is
/// bounded by `|F|^(k+1)` and must fit the budget.
pub fn verify_coverfree_with_budget(
    family: &CoverFreeFamily,
    k: usize,
    budget: u128,
) -> Result<CoverFreeCheck> {
    let size = family.len() as u128;
    let needed = size
        .checked_pow(k as u32 + 1)
        .ok_or(Error::BudgetExceeded { needed: u128::MAX, budget })?;
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }

    let masks = family.masks();
    for covered in 0..family.len() {
        let mut chosen = Vec::with_capacity(k);
        if let Some(covering) =
            find_cover(&masks, &masks[covered], covered, 0, k, &mut chosen, family.len())
        {
            return Ok(CoverFreeCheck { ok: false, counterexample: Some((covered, covering)) });
        }
    }
    Ok(CoverFreeCheck { ok: true, counterexample: None })
}

/// Searches for `k` distinct members (excluding `excluded`), drawn from
/// positions `start..`, whose union together with the already `chosen` ones
/// covers `target`. The union only grows, so as soon as it covers the target
/// the remaining slots can be padded with arbitrary distinct members.
fn find_cover(
    masks: &[Mask],
    target: &Mask,
    excluded: usize,
    start: usize,
    remaining: usize,
    chosen: &mut Vec<usize>,
    family_size: usize,
) -> Option<Vec<usize>> {
    if family_size < remaining + chosen.len() + 1 {
        return None;
    }
    let mut acc = Mask(vec![0; target.0.len()]);
    for &c in chosen.iter() {
        acc.union_with(&masks[c]);
    }
    if target.is_subset_of(&acc) {
        // Pad with the smallest-index unused members.
        let mut padded = chosen.clone();
        for i in 0..masks.len() {
            if padded.len() == chosen.len() + remaining {
                break;
            }
            if i != excluded && !padded.contains(&i) {
                padded.push(i);
            }
        }
        if padded.len() == chosen.len() + remaining {
            return Some(padded);
        }
        return None;
    }
    if remaining == 0 {
        return None;
    }
    for i in start..masks.len() {
        if i == excluded {
            continue;
        }
        chosen.push(i);
        if let Some(found) =
            find_cover(masks, target, excluded, i + 1, remaining - 1, chosen, family_size)
        {
            return Some(found);
        }
        chosen.pop();
    }
    None
}

/// Would adding `candidate` to `family` break the k-cover-free property?
/// Only tuples involving the candidate can be new violations.
fn addition_breaks_coverfree(masks: &[Mask], candidate: &Mask, k: usize) -> bool {
    if masks.len() < k {
        // Fewer than k + 1 distinct sets exist even after the addition.
        return false;
    }
    // Candidate as the covered set.
    let mut chosen = Vec::new();
    if find_cover(masks, candidate, usize::MAX, 0, k, &mut chosen, masks.len() + 1).is_some() {
        return true;
    }
    // Candidate among the covering sets: cover some member with the candidate
    // plus k − 1 other members.
    for covered in 0..masks.len() {
        let mut remainder = masks[covered].clone();
        for (w, c) in remainder.0.iter_mut().zip(&candidate.0) {
            *w &= !c;
        }
        // remainder must be covered by k − 1 members other than `covered`.
        let mut chosen = Vec::new();
        if find_cover(masks, &remainder, covered, 0, k - 1, &mut chosen, masks.len() + 1)
            .is_some()
        {
            return true;
        }
    }
    false
}

fn subsets_in_canonical_order(n: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (1u64..(1 << n))
        .map(|mask| (1..=n).filter(|&e| mask & (1 << (e - 1)) != 0).collect())
        .collect();
    all.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    all
}

/// Greedy maximal k-cover-free family over `{1..n}`: subsets are scanned in
/// canonical order (by size, then lexicographically) and kept whenever the
/// family stays k-cover-free. The result is re-verified before returning.
pub fn greedy_coverfree(n: usize, k: usize) -> Result<CoverFreeFamily> {
    greedy_coverfree_capped(n, k, DEFAULT_GREEDY_CAP)
}

pub fn greedy_coverfree_capped(n: usize, k: usize, cap: usize) -> Result<CoverFreeFamily> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if n == 0 {
        return Err(Error::Invalid("ground set must be nonempty".into()));
    }
    if n > cap {
        return Err(Error::GroundSetTooLarge { n, cap });
    }
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut masks: Vec<Mask> = Vec::new();
    for candidate in subsets_in_canonical_order(n) {
        let mask = Mask::from_set(n, &candidate);
        if !addition_breaks_coverfree(&masks, &mask, k) {
            sets.push(candidate);
            masks.push(mask);
        }
    }
    let family = CoverFreeFamily { ground_size: n, sets, k };
    let check = verify_coverfree(&family, k)?;
    if !check.ok {
        return Err(Error::ConstructionFailed("greedy family failed verification".into()));
    }
    Ok(family)
}

/// Exhaustive maximum k-cover-free family over `{1..n}` (exponential in the
/// number of subsets; gated to tiny ground sets).
pub fn exhaustive_max_coverfree(n: usize, k: usize, cap: usize) -> Result<CoverFreeFamily> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if n == 0 || n > cap {
        return Err(Error::GroundSetTooLarge { n, cap });
    }
    let candidates = subsets_in_canonical_order(n);
    let masks: Vec<Mask> = candidates.iter().map(|s| Mask::from_set(n, s)).collect();
    let mut best: Vec<usize> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut current_masks: Vec<Mask> = Vec::new();
    search_max(&candidates, &masks, k, 0, &mut current, &mut current_masks, &mut best);
    Ok(CoverFreeFamily {
        ground_size: n,
        sets: best.iter().map(|&i| candidates[i].clone()).collect(),
        k,
    })
}

fn search_max(
    candidates: &[Vec<usize>],
    masks: &[Mask],
    k: usize,
    index: usize,
    current: &mut Vec<usize>,
    current_masks: &mut Vec<Mask>,
    best: &mut Vec<usize>,
) {
    if current.len() > best.len() {
        *best = current.clone();
    }
    if index == candidates.len() || current.len() + (candidates.len() - index) <= best.len() {
        return;
    }
    // Take candidates[index] if legal, then skip it.
    if !addition_breaks_coverfree(current_masks, &masks[index], k) {
        current.push(index);
        current_masks.push(masks[index].clone());
        search_max(candidates, masks, k, index + 1, current, current_masks, best);
        current.pop();
        current_masks.pop();
    }
    search_max(candidates, masks, k, index + 1, current, current_masks, best);
}

fn is_prime(q: usize) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Reed–Solomon-style cover-free family: one set per polynomial of degree
/// `< m` over the prime field of size `q`, the set being the polynomial's
/// graph `{(i, poly(i))}` inside a ground set of size `q²`. Distinct
/// polynomials agree on at most `m − 1` points, so the family is
/// k-cover-free whenever `k (m − 1) < q`; the returned `k` is the largest
/// such value (`q^m − 1` for `m = 1`, where the sets are pairwise disjoint).
/// The pairwise-intersection certificate is checked before returning.
pub fn kautz_singleton(q: usize, m: usize) -> Result<CoverFreeFamily> {
    if !is_prime(q) {
        return Err(Error::NotPrime { q });
    }
    if m == 0 || m > q {
        return Err(Error::Invalid(format!("degree bound m = {} must satisfy 1 <= m <= q = {}", m, q)));
    }

    let family_size = q.pow(m as u32);
    let mut sets = Vec::with_capacity(family_size);
    for index in 0..family_size {
        // Coefficients of the polynomial, base-q digits of the index.
        let mut coeffs = Vec::with_capacity(m);
        let mut rest = index;
        for _ in 0..m {
            coeffs.push(rest % q);
            rest /= q;
        }
        let set: Vec<usize> = (0..q)
            .map(|point| {
                let mut value = 0usize;
                for &c in coeffs.iter().rev() {
                    value = (value * point + c) % q;
                }
                point * q + value + 1
            })
            .collect();
        sets.push(set);
    }

    let k = if m == 1 { family_size - 1 } else { q.div_ceil(m - 1) - 1 };
    let family = CoverFreeFamily { ground_size: q * q, sets, k };

    let masks = family.masks();
    for a in 0..masks.len() {
        if masks[a].intersection_size(&masks[a]) != q {
            return Err(Error::ConstructionFailed("polynomial graph has wrong size".into()));
        }
        for b in a + 1..masks.len() {
            if masks[a].intersection_size(&masks[b]) > m - 1 {
                return Err(Error::ConstructionFailed(
                    "polynomial graphs intersect beyond the agreement bound".into(),
                ));
            }
        }
    }
    Ok(family)
}

/// Sub-menu with every entry priced at least `c`, order preserved.
pub fn filter_min_price<T: Scalar>(menu: &Menu<T>, c: &T) -> Menu<T> {
    Menu::new(
        menu.n,
        menu.entries.iter().filter(|e| e.price >= *c).cloned().collect(),
    )
}

/// Band index of a price within left-closed geometric bands
/// `[c·base^b, c·base^(b+1))`. Requires `price ≥ c > 0`.
fn band_index<T: Scalar>(price: &T, c: &T, base: &T) -> Result<usize> {
    if !c.is_positive() {
        return Err(Error::Invalid("band origin c must be positive".into()));
    }
    if *price < *c {
        return Err(Error::Invalid(format!("price {} below band origin {}", price, c)));
    }
    let mut bound = c.clone() * base.clone();
    let mut band = 0usize;
    while bound <= *price {
        bound = bound * base.clone();
        band += 1;
    }
    Ok(band)
}

/// Splits a menu into even-band and odd-band sub-menus over the geometric
/// price bands `[c·base^i, c·base^(i+1))`. Every entry must be priced at
/// least `c`.
pub fn band_split<T: Scalar>(menu: &Menu<T>, c: &T, base: usize) -> Result<(Menu<T>, Menu<T>)> {
    if base < 2 {
        return Err(Error::Invalid("band base must be at least 2".into()));
    }
    let base_t = T::from_int(base as i64);
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for e in &menu.entries {
        if band_index(&e.price, c, &base_t)? % 2 == 0 {
            even.push(e.clone());
        } else {
            odd.push(e.clone());
        }
    }
    Ok((Menu::new(menu.n, even), Menu::new(menu.n, odd)))
}

/// One price band's contribution to the extracted sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinSummary<T> {
    /// Band index relative to `c` (bands of ratio `base`).
    pub band: usize,
    /// Probability mass of support types whose best response buys in the bin.
    pub mass: T,
    /// Minimum entry price inside the bin.
    pub min_price: T,
    /// Minimal-norm choosing type, the bin's representative.
    pub representative: ValuationType<T>,
    /// The allocation the representative buys inside the bin.
    pub allocation: AllocationVector<T>,
}

/// Stage-by-stage record of a pipeline run; every recorded value re-evaluates
/// exactly from the recorded menu (or, for the final stage, the sequences).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineTrace<T> {
    pub stages: Vec<(String, Menu<T>, T)>,
    pub bins: Vec<BinSummary<T>>,
    pub menugap: T,
}

/// Extracts the sequence pair from a filtered, band-split menu: bin `j`
/// holds the entries in price band `j`; every bin bought by at least one
/// support type contributes its minimal-ℓ1-norm choosing type as `x_j` and
/// that type's chosen allocation as `q_j`, in increasing band order.
///
/// `delta >= 0` is the representative slack: the minimal-norm choice
/// satisfies `‖x_j‖₁ <= (1 + delta)‖x‖₁` for every choosing `x` at any
/// `delta >= 0`, and `delta = 0` is exact for finite support.
pub fn extract_sequences<T: Scalar>(
    dist: &DiscreteDistribution<T>,
    menu: &Menu<T>,
    k: usize,
    c: &T,
    base: usize,
    delta: &T,
) -> Result<(SequencePair<T>, PipelineTrace<T>)> {
    if delta.is_negative() {
        return Err(Error::Invalid("delta must be nonnegative".into()));
    }
    if base < 2 {
        return Err(Error::Invalid("band base must be at least 2".into()));
    }
    if dist.n != menu.n {
        return Err(Error::DimensionMismatch { expected: menu.n, got: dist.n });
    }
    let base_t = T::from_int(base as i64);

    // Band of every menu entry (1-based entry index -> band).
    let mut entry_band = Vec::with_capacity(menu.len());
    for e in &menu.entries {
        entry_band.push(band_index(&e.price, c, &base_t)?);
    }

    // Which bins each support type buys from.
    struct BinAccum<T> {
        mass: T,
        choosers: Vec<(ValuationType<T>, MenuEntry<T>)>,
    }
    let mut bins: std::collections::BTreeMap<usize, BinAccum<T>> = Default::default();
    for (v, prob) in &dist.support {
        let response = best_response(v, menu, k)?;
        let mut bands_hit: Vec<usize> = Vec::new();
        for &idx in response.multiset.without_nulls().indices() {
            let band = entry_band[idx - 1];
            let entry = &menu.entries[idx - 1];
            let accum = bins.entry(band).or_insert_with(|| BinAccum {
                mass: T::zero(),
                choosers: Vec::new(),
            });
            if !bands_hit.contains(&band) {
                accum.mass = accum.mass.clone() + prob.clone();
                bands_hit.push(band);
            }
            // One chosen entry per (type, band): the cheapest, then the
            // smallest allocation, for determinism.
            match accum.choosers.iter_mut().find(|(t, _)| t == v) {
                Some((_, chosen)) => {
                    if (&entry.price, &entry.allocation) < (&chosen.price, &chosen.allocation) {
                        *chosen = entry.clone();
                    }
                }
                None => accum.choosers.push((v.clone(), entry.clone())),
            }
        }
    }

    let mut xs = Vec::new();
    let mut qs = vec![AllocationVector::zeros(menu.n)];
    let mut summaries = Vec::new();
    for (&band, accum) in &bins {
        let (rep, chosen) = accum
            .choosers
            .iter()
            .min_by_key(|(t, _)| (t.l1_norm(), t.clone()))
            .expect("bin recorded only when chosen");
        let min_price = menu
            .entries
            .iter()
            .enumerate()
            .filter(|(i, _)| entry_band[*i] == band)
            .map(|(_, e)| e.price.clone())
            .min()
            .expect("chosen bin contains an entry");
        summaries.push(BinSummary {
            band,
            mass: accum.mass.clone(),
            min_price,
            representative: rep.clone(),
            allocation: chosen.allocation.clone(),
        });
        xs.push(rep.clone());
        qs.push(chosen.allocation.clone());
    }

    let pair = SequencePair::new(menu.n, xs, qs)?;
    let gap_total = menugap(&pair, k)?.menugap;
    let trace = PipelineTrace { stages: Vec::new(), bins: summaries, menugap: gap_total };
    Ok((pair, trace))
}

/// Outcome of the full upper-bound pipeline on `(D, M, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineOutcome<T> {
    pub pair: SequencePair<T>,
    pub trace: PipelineTrace<T>,
    /// Price floor used (`BuyKRev / 100` unless overridden).
    pub c: T,
    pub delta: T,
}

/// Runs price filter, band split, and extraction with the default
/// constants `c = BuyKRev(D, M, k)/100` and `delta = 1/100` (both overridable),
/// bands of ratio `k + 1`, keeping the better-revenue band half. A menu with
/// zero buy-k revenue yields empty sequences.
pub fn upper_bound_pipeline<T: Scalar>(
    dist: &DiscreteDistribution<T>,
    menu: &Menu<T>,
    k: usize,
    c_override: Option<T>,
    delta_override: Option<T>,
) -> Result<PipelineOutcome<T>> {
    let revenue = revenue_under_buyk(dist, menu, k)?;
    let delta = delta_override.unwrap_or_else(|| T::one() / T::from_int(100));
    let explicit_c = c_override.is_some();
    let c = match c_override {
        Some(c) => c,
        None => revenue.clone() / T::from_int(100),
    };
    let mut stages = vec![("buy-k revenue".to_string(), menu.clone(), revenue.clone())];

    if !c.is_positive() {
        if explicit_c {
            return Err(Error::Invalid("price floor c must be positive".into()));
        }
        // Zero revenue: nothing to extract.
        let pair = SequencePair::new(menu.n, Vec::new(), vec![AllocationVector::zeros(menu.n)])?;
        return Ok(PipelineOutcome {
            pair,
            trace: PipelineTrace { stages, bins: Vec::new(), menugap: T::zero() },
            c,
            delta,
        });
    }

    let filtered = filter_min_price(menu, &c);
    let filtered_revenue = revenue_under_buyk(dist, &filtered, k)?;
    stages.push(("filtered".to_string(), filtered.clone(), filtered_revenue));

    let base = k + 1;
    let (even, odd) = band_split(&filtered, &c, base)?;
    let even_revenue = revenue_under_buyk(dist, &even, k)?;
    let odd_revenue = revenue_under_buyk(dist, &odd, k)?;
    stages.push(("even bands".to_string(), even.clone(), even_revenue.clone()));
    stages.push(("odd bands".to_string(), odd.clone(), odd_revenue.clone()));

    let (half, half_revenue) = if even_revenue >= odd_revenue {
        (even, even_revenue)
    } else {
        (odd, odd_revenue)
    };
    stages.push(("chosen half".to_string(), half.clone(), half_revenue));

    let (pair, mut trace) = extract_sequences(dist, &half, k, &c, base, &delta)?;
    trace.stages = stages;
    Ok(PipelineOutcome { pair, trace, c, delta })
}

/// Summary numbers attached to a constructed lower-bound instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBoundReport<T> {
    pub buyk_revenue: T,
    pub brev: T,
    pub ratio: T,
    pub menugap: T,
}

/// A distribution, deterministic menu, and sequence pair exhibiting a large
/// buy-k revenue to bundling-revenue ratio. All recorded numbers are verified
/// on construction: the menu passes buy-k incentive compatibility, its buy-k
/// revenue equals the menu gap of the sequences, and `BRev ≤ 2n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBoundInstance<T> {
    pub dist: DiscreteDistribution<T>,
    pub menu: Menu<T>,
    pub pair: SequencePair<T>,
    pub k: usize,
    pub family: Option<CoverFreeFamily>,
    pub report: LowerBoundReport<T>,
}

/// Converts a binary sequence pair with every normalized gap at least `1/n`
/// into a concrete instance: the i-th support type is `C_i · x_i` with
/// probability `1/C_i` for `C_i = (n+1)^{2i}` (rest of the mass on the zero
/// valuation), and the menu offers `q_i` at price `C_i · g_i` where `g_i` is
/// the normalized gap. Steep scaling makes every type buy exactly its own
/// entry, so the revenue telescopes to the menu gap while no bundle price
/// extracts more than `2n`.
pub fn sequences_to_instance<T: Scalar>(
    pair: &SequencePair<T>,
    k: usize,
) -> Result<LowerBoundInstance<T>> {
    if pair.is_empty() {
        return Err(Error::Invalid("sequence pair has no points".into()));
    }
    let n = pair.dim();
    for x in pair.valuations() {
        if !x.values.iter().all(|v| v.is_zero() || v.is_one()) {
            return Err(Error::Invalid("valuation sequence must be 0/1 valued".into()));
        }
    }
    for q in pair.allocations() {
        if !q.coords.iter().all(|v| v.is_zero() || v.is_one()) {
            return Err(Error::Invalid("allocation sequence must be 0/1 valued".into()));
        }
    }

    let report = menugap(pair, k)?;
    let threshold = T::one() / T::from_int(n as i64);
    let mut normalized = Vec::with_capacity(pair.len());
    for (g, x) in report.gaps.iter().zip(pair.valuations()) {
        let norm_gap = g.clone() / x.l1_norm();
        if norm_gap < threshold {
            return Err(Error::Invalid(format!(
                "normalized gap {} below 1/n = {}",
                norm_gap, threshold
            )));
        }
        normalized.push(norm_gap);
    }

    let scale_base = T::from_int(n as i64 + 1);
    let mut support = Vec::with_capacity(pair.len());
    let mut entries = Vec::with_capacity(pair.len());
    for (i, (x, g)) in pair.valuations().iter().zip(&normalized).enumerate() {
        let scale = scale_base.int_pow(2 * (i as u32 + 1));
        let valuation = ValuationType::new(
            x.values.iter().map(|v| v.clone() * scale.clone()).collect(),
        );
        support.push((valuation, T::one() / scale.clone()));
        entries.push(MenuEntry::new(scale * g.clone(), pair.allocations()[i + 1].clone()));
    }
    let dist = DiscreteDistribution::new(n, support);
    let menu = Menu::new(n, entries);

    let verdict = verify_buyk_ic(&menu, &dist.support.iter().map(|(v, _)| v.clone()).collect::<Vec<_>>(), k)?;
    if !verdict.ic {
        return Err(Error::ConstructionFailed(
            "instance menu is not buy-k incentive-compatible".into(),
        ));
    }
    let buyk_revenue = revenue_under_buyk(&dist, &menu, k)?;
    if buyk_revenue != report.menugap {
        return Err(Error::ConstructionFailed(format!(
            "revenue {} differs from menu gap {}",
            buyk_revenue, report.menugap
        )));
    }
    let brev_result = brev(&dist);
    if brev_result.value > T::from_int(2 * n as i64) {
        return Err(Error::ConstructionFailed(format!(
            "bundle revenue {} exceeds 2n",
            brev_result.value
        )));
    }

    let ratio = buyk_revenue.clone() / brev_result.value.clone();
    Ok(LowerBoundInstance {
        dist,
        menu,
        pair: pair.clone(),
        k,
        family: None,
        report: LowerBoundReport {
            buyk_revenue,
            brev: brev_result.value,
            ratio,
            menugap: report.menugap,
        },
    })
}

/// How to build the cover-free family behind a lower-bound instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyMethod {
    Greedy,
    KautzSingleton { q: usize, m: usize },
}

/// Builds a k-cover-free family over `{1..n}`, sets `X = Q =` its indicator
/// vectors, and converts the pair into an instance. The family bounds
/// `menugap ≥ |F|/n` and `ratio ≥ |F|/(2n²)` are verified before returning.
pub fn lowerbound_instance<T: Scalar>(
    n: usize,
    k: usize,
    method: FamilyMethod,
) -> Result<LowerBoundInstance<T>> {
    let family = match method {
        FamilyMethod::Greedy => greedy_coverfree(n, k)?,
        FamilyMethod::KautzSingleton { q, m } => {
            let family = kautz_singleton(q, m)?;
            if family.ground_size != n {
                return Err(Error::Invalid(format!(
                    "construction lives on a ground set of size {}, not {}",
                    family.ground_size, n
                )));
            }
            if family.k < k {
                return Err(Error::Invalid(format!(
                    "family certifies only k = {}, requested {}",
                    family.k, k
                )));
            }
            family
        }
    };

    let pair = SequencePair::from_identical(n, family.indicator_valuations::<T>())?;
    let mut instance = sequences_to_instance(&pair, k)?;

    let size = T::from_int(family.len() as i64);
    let n_t = T::from_int(n as i64);
    let gap_bound = size.clone() / n_t.clone();
    if instance.report.menugap < gap_bound {
        return Err(Error::ConstructionFailed(format!(
            "menu gap {} below |F|/n = {}",
            instance.report.menugap, gap_bound
        )));
    }
    let ratio_bound = size / (T::from_int(2) * n_t.clone() * n_t);
    if instance.report.ratio < ratio_bound {
        return Err(Error::ConstructionFailed(format!(
            "ratio {} below |F|/(2n^2) = {}",
            instance.report.ratio, ratio_bound
        )));
    }

    instance.family = Some(family);
    Ok(instance)
}

/// A distribution with `SRev = n` but `BRev < 2`: item `j` is worth `2^j`
/// with probability `2^{-j}`, independently-looking but supported on the
/// single-item types only. Verified before returning.
pub fn srev_gap_instance<T: Scalar>(n: usize) -> Result<DiscreteDistribution<T>> {
    if n == 0 {
        return Err(Error::Invalid("need at least one item".into()));
    }
    let two = T::from_int(2);
    let support = (1..=n)
        .map(|j| {
            let value = two.int_pow(j as u32);
            let mut coords = vec![T::zero(); n];
            coords[j - 1] = value.clone();
            (ValuationType::new(coords), T::one() / value)
        })
        .collect();
    let dist = DiscreteDistribution::new(n, support);

    let srev_value = srev(&dist).value;
    if srev_value != T::from_int(n as i64) {
        return Err(Error::ConstructionFailed(format!(
            "item pricing earns {} instead of n = {}",
            srev_value, n
        )));
    }
    let brev_value = brev(&dist).value;
    if brev_value >= two {
        return Err(Error::ConstructionFailed(format!(
            "bundle revenue {} not below 2",
            brev_value
        )));
    }
    Ok(dist)
}

/// The two-item shop: three equally likely types (coffee only (2, 0),
/// bagel only (0, 4), both (4, 6)) and the menu pricing coffee at 2, the
/// bagel at 4, and the pair at 8.
pub fn coffee_shop_instance<T: Scalar>() -> (DiscreteDistribution<T>, Menu<T>) {
    let third = T::one() / T::from_int(3);
    let dist = DiscreteDistribution::new(
        2,
        vec![
            (ValuationType::new(vec![T::from_int(2), T::zero()]), third.clone()),
            (ValuationType::new(vec![T::zero(), T::from_int(4)]), third.clone()),
            (ValuationType::new(vec![T::from_int(4), T::from_int(6)]), third),
        ],
    );
    let menu = Menu::new(
        2,
        vec![
            MenuEntry::new(T::from_int(2), AllocationVector::new(vec![T::one(), T::zero()])),
            MenuEntry::new(T::from_int(4), AllocationVector::new(vec![T::zero(), T::one()])),
            MenuEntry::new(T::from_int(8), AllocationVector::new(vec![T::one(), T::one()])),
        ],
    );
    (dist, menu)
}

/// Re-evaluates a benchmark certificate, for consistency checks.
pub fn reevaluate_benchmark<T: Scalar>(
    dist: &DiscreteDistribution<T>,
    result: &BenchmarkResult<T>,
) -> Result<T> {
    use crate::benchmarks::{bundle_revenue_at_price, item_pricing_revenue, Certificate};
    Ok(match &result.certificate {
        Certificate::BundlePrice(p) => bundle_revenue_at_price(dist, p),
        Certificate::ItemPrices(ps) => item_pricing_revenue(dist, ps),
        Certificate::Menu(m) => revenue_under_buyk(dist, m, 1)?,
    })
}
