//! Buyer behavior against a menu.
//!
//! A buyer facing a menu may purchase any multiset of at most `k` entries
//! (repetition allowed; the null entry fills unused slots). [`best_response`]
//! finds the exact optimum by enumeration. [`verify_buyk_ic`] checks that a
//! single entry is always weakly best, [`revenue_under_buyk`] accounts the
//! seller's expected income, and [`adaptive_value`] evaluates the stronger
//! buyer who observes each lottery's outcome before the next purchase.
//!
//! Ties are broken seller-favorably throughout: among utility-maximal
//! purchases the buyer takes the one with the highest total payment, and
//! among those the lexicographically smallest after the menu is put in its
//! canonical (price, allocation, original position) order. This makes every
//! revenue figure a deterministic, permutation-invariant quantity.

use crate::combinatorics::for_each_capped_multiset;
use crate::error::{Error, Result};
use crate::model::{lot, AllocationVector, EntryMultiset, Menu, ValuationType};
use crate::scalar::{sum, Scalar};

/// Default cap on `n` for the adaptive dynamic program (`2^n` item states).
pub const DEFAULT_ADAPTIVE_CAP: usize = 12;

/// An optimal purchase for one buyer type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponse<T> {
    pub multiset: EntryMultiset,
    pub utility: T,
    pub payment: T,
}

/// One recorded violation of buy-`k` incentive compatibility: a type whose
/// best multiset strictly beats its best single entry. For the adaptive
/// verifier the profitable deviation is a strategy rather than a multiset, so
/// `deviation` is absent there and only the utilities record the shortfall.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IcWitness<T> {
    pub valuation: ValuationType<T>,
    pub deviation: Option<EntryMultiset>,
    pub single_utility: T,
    pub multiset_utility: T,
}

/// Outcome of an incentive-compatibility check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IcVerdict<T> {
    pub ic: bool,
    pub witnesses: Vec<IcWitness<T>>,
}

/// Menu entries in canonical order: (price, allocation, original 1-based
/// index). Returned as original indices.
fn canonical_order<T: Scalar>(menu: &Menu<T>) -> Vec<usize> {
    let mut order: Vec<usize> = (1..=menu.len()).collect();
    order.sort_by(|&a, &b| {
        let ea = &menu.entries[a - 1];
        let eb = &menu.entries[b - 1];
        (&ea.price, &ea.allocation, a).cmp(&(&eb.price, &eb.allocation, b))
    });
    order
}

fn check_menu_dims<T: Scalar>(menu: &Menu<T>) -> Result<()> {
    for e in &menu.entries {
        if e.allocation.dim() != menu.n {
            return Err(Error::DimensionMismatch { expected: menu.n, got: e.allocation.dim() });
        }
    }
    Ok(())
}

/// Exact utility-maximizing multiset of at most `k` entries.
///
/// Entries priced above the buyer's full-bundle value are skipped (they carry
/// strictly negative marginal utility, so no optimum contains them), and a
/// sure allocation is never taken twice (a duplicate adds price but nothing
/// to the lottery).
pub fn best_response<T: Scalar>(
    v: &ValuationType<T>,
    menu: &Menu<T>,
    k: usize,
) -> Result<BestResponse<T>> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if v.dim() != menu.n {
        return Err(Error::DimensionMismatch { expected: menu.n, got: v.dim() });
    }
    check_menu_dims(menu)?;

    let bundle_value = v.l1_norm();
    let candidates: Vec<usize> = canonical_order(menu)
        .into_iter()
        .filter(|&i| menu.entries[i - 1].price <= bundle_value)
        .collect();

    // Best (utility, payment, multiset) seen; enumeration is lexicographic on
    // canonical positions, so on full ties the first candidate stands.
    let mut best_utility = T::zero();
    let mut best_payment = T::zero();
    let mut best: Vec<usize> = Vec::new();

    for_each_capped_multiset(
        candidates.len(),
        |pos| {
            if menu.entries[candidates[pos] - 1].allocation.is_deterministic() {
                1
            } else {
                k
            }
        },
        k,
        &mut |positions| {
            let entries = positions.iter().map(|&p| &menu.entries[candidates[p] - 1]);
            let combined = lot(menu.n, entries.clone().map(|e| &e.allocation))
                .expect("dimensions checked above");
            let value = v.dot(&combined).expect("dimensions checked above");
            let payment = sum(entries.map(|e| e.price.clone()));
            let utility = value - payment.clone();
            if utility > best_utility || (utility == best_utility && payment > best_payment) {
                best_utility = utility;
                best_payment = payment;
                best = positions.to_vec();
            }
        },
    );

    let multiset = EntryMultiset::new(best.iter().map(|&p| candidates[p]).collect());
    Ok(BestResponse { multiset, utility: best_utility, payment: best_payment })
}

/// Checks buy-`k` incentive compatibility over the given buyer types: for
/// each type the best single entry must weakly dominate every multiset of at
/// most `k` entries. Strict violations are returned as witnesses.
pub fn verify_buyk_ic<T: Scalar>(
    menu: &Menu<T>,
    types: &[ValuationType<T>],
    k: usize,
) -> Result<IcVerdict<T>> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    let mut witnesses = Vec::new();
    for v in types {
        let single = best_response(v, menu, 1)?;
        let multi = best_response(v, menu, k)?;
        if multi.utility > single.utility {
            witnesses.push(IcWitness {
                valuation: v.clone(),
                deviation: Some(multi.multiset),
                single_utility: single.utility,
                multiset_utility: multi.utility,
            });
        }
    }
    Ok(IcVerdict { ic: witnesses.is_empty(), witnesses })
}

/// Expected revenue when every support type plays its buy-`k` best response.
/// Residual mass on the zero valuation pays nothing.
pub fn revenue_under_buyk<T: Scalar>(
    dist: &crate::model::DiscreteDistribution<T>,
    menu: &Menu<T>,
    k: usize,
) -> Result<T> {
    if dist.n != menu.n {
        return Err(Error::DimensionMismatch { expected: menu.n, got: dist.n });
    }
    let mut revenue = T::zero();
    for (v, prob) in &dist.support {
        let response = best_response(v, menu, k)?;
        revenue = revenue + prob.clone() * response.payment;
    }
    Ok(revenue)
}

/// Value of the optimal adaptive strategy with the default state-space cap.
pub fn adaptive_value<T: Scalar>(v: &ValuationType<T>, menu: &Menu<T>, k: usize) -> Result<T> {
    adaptive_value_capped(v, menu, k, DEFAULT_ADAPTIVE_CAP)
}

/// Value of the optimal adaptive strategy: up to `k` sequential purchases,
/// each chosen after observing which items the previous lotteries delivered.
///
/// Computed by dynamic programming over `(S, t)` where `S` is the set of
/// items already won and `t` the purchases remaining:
/// `V(S, t) = max(0, max_e −p_e + Σ_W Pr[win exactly W | e] (v(W) + V(S∪W, t−1)))`
/// with outcome probabilities from independent per-item draws of the entry's
/// allocation restricted to items outside `S`.
pub fn adaptive_value_capped<T: Scalar>(
    v: &ValuationType<T>,
    menu: &Menu<T>,
    k: usize,
    cap: usize,
) -> Result<T> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if menu.n > cap {
        return Err(Error::StateSpaceTooLarge { n: menu.n, cap });
    }
    if v.dim() != menu.n {
        return Err(Error::DimensionMismatch { expected: menu.n, got: v.dim() });
    }
    check_menu_dims(menu)?;

    let n = menu.n;
    let mut memo: Vec<Vec<Option<T>>> = vec![vec![None; k + 1]; 1usize << n];
    Ok(adaptive_recurse(v, menu, 0, k, &mut memo))
}

fn adaptive_recurse<T: Scalar>(
    v: &ValuationType<T>,
    menu: &Menu<T>,
    owned: usize,
    t: usize,
    memo: &mut Vec<Vec<Option<T>>>,
) -> T {
    if t == 0 {
        return T::zero();
    }
    if let Some(cached) = &memo[owned][t] {
        return cached.clone();
    }
    let mut best = T::zero();
    for entry in &menu.entries {
        // Split the items still in play by how this lottery treats them.
        let mut sure = 0usize;
        let mut fractional: Vec<usize> = Vec::new();
        for j in 0..menu.n {
            if owned & (1 << j) != 0 {
                continue;
            }
            let q = &entry.allocation.coords[j];
            if q.is_one() {
                sure |= 1 << j;
            } else if !q.is_zero() {
                fractional.push(j);
            }
        }
        let mut expected = T::zero() - entry.price.clone();
        // Enumerate which fractional items come through.
        for outcome in 0..(1usize << fractional.len()) {
            let mut prob = T::one();
            let mut won = sure;
            for (pos, &j) in fractional.iter().enumerate() {
                let q = entry.allocation.coords[j].clone();
                if outcome & (1 << pos) != 0 {
                    prob = prob * q;
                    won |= 1 << j;
                } else {
                    prob = prob * (T::one() - q);
                }
            }
            let gain = sum(
                (0..menu.n).filter(|j| won & (1 << j) != 0).map(|j| v.values[j].clone()),
            );
            let cont = adaptive_recurse(v, menu, owned | won, t - 1, memo);
            expected = expected + prob * (gain + cont);
        }
        if expected > best {
            best = expected;
        }
    }
    memo[owned][t] = Some(best.clone());
    best
}

/// Adaptive analogue of [`verify_buyk_ic`]: the best single entry must weakly
/// dominate the optimal adaptive strategy of up to `k` purchases.
pub fn verify_adaptive_buyk_ic<T: Scalar>(
    menu: &Menu<T>,
    types: &[ValuationType<T>],
    k: usize,
) -> Result<IcVerdict<T>> {
    verify_adaptive_buyk_ic_capped(menu, types, k, DEFAULT_ADAPTIVE_CAP)
}

pub fn verify_adaptive_buyk_ic_capped<T: Scalar>(
    menu: &Menu<T>,
    types: &[ValuationType<T>],
    k: usize,
    cap: usize,
) -> Result<IcVerdict<T>> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    let mut witnesses = Vec::new();
    for v in types {
        let single = best_response(v, menu, 1)?;
        let adaptive = adaptive_value_capped(v, menu, k, cap)?;
        if adaptive > single.utility {
            witnesses.push(IcWitness {
                valuation: v.clone(),
                deviation: None,
                single_utility: single.utility,
                multiset_utility: adaptive,
            });
        }
    }
    Ok(IcVerdict { ic: witnesses.is_empty(), witnesses })
}

/// The grand-bundle allocation `1ⁿ`.
pub fn grand_bundle<T: Scalar>(n: usize) -> AllocationVector<T> {
    AllocationVector::new(vec![T::one(); n])
}
