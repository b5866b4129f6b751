//! Domain vocabulary: allocations, valuations, menus, distributions,
//! purchase multisets, and the independent-lottery composition operator.
//!
//! All types are plain immutable data. Constructors accept whatever they are
//! given; [`Menu::validate`] and [`DiscreteDistribution::validate`] report
//! invariant violations as diagnostics instead of refusing to build the
//! value, so malformed inputs can be inspected rather than rejected opaquely.

use crate::error::{Error, Result};
use crate::scalar::{sum, Scalar};

/// A (possibly randomized) allocation: coordinate `j` is the probability of
/// receiving item `j`. Valid coordinates lie in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AllocationVector<T> {
    pub coords: Vec<T>,
}

impl<T: Scalar> AllocationVector<T> {
    pub fn new(coords: Vec<T>) -> Self {
        AllocationVector { coords }
    }

    pub fn zeros(n: usize) -> Self {
        AllocationVector { coords: vec![T::zero(); n] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// True when every coordinate is exactly 0 or 1, i.e. the lottery is a
    /// sure allocation of a fixed item set.
    pub fn is_deterministic(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero() || c.is_one())
    }

    /// Item set allocated with certainty (only meaningful when deterministic).
    pub fn support(&self) -> Vec<usize> {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, _)| j)
            .collect()
    }
}

/// An additive buyer type: nonnegative value per item.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ValuationType<T> {
    pub values: Vec<T>,
}

impl<T: Scalar> ValuationType<T> {
    pub fn new(values: Vec<T>) -> Self {
        ValuationType { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Expected value of a lottery: `v · q`.
    pub fn dot(&self, alloc: &AllocationVector<T>) -> Result<T> {
        if self.values.len() != alloc.coords.len() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                got: alloc.coords.len(),
            });
        }
        Ok(sum(self
            .values
            .iter()
            .zip(&alloc.coords)
            .map(|(v, q)| v.clone() * q.clone())))
    }

    /// Total value for the grand bundle, `‖v‖₁` for nonnegative values.
    pub fn l1_norm(&self) -> T {
        sum(self.values.iter().cloned())
    }
}

/// A priced lottery offered on a menu.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MenuEntry<T> {
    pub price: T,
    pub allocation: AllocationVector<T>,
}

impl<T: Scalar> MenuEntry<T> {
    pub fn new(price: T, allocation: AllocationVector<T>) -> Self {
        MenuEntry { price, allocation }
    }
}

/// A mechanism, given as its menu of priced lotteries.
///
/// The null entry (price 0, empty lottery) is always available at index 0 and
/// is never stored; stored entries are addressed 1-based. Buying fewer than
/// `k` options is expressed by padding a purchase with index 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Menu<T> {
    pub n: usize,
    pub entries: Vec<MenuEntry<T>>,
}

impl<T: Scalar> Menu<T> {
    pub fn new(n: usize, entries: Vec<MenuEntry<T>>) -> Self {
        Menu { n, entries }
    }

    pub fn empty(n: usize) -> Self {
        Menu { n, entries: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry at a 1-based index; index 0 yields the implicit null entry.
    pub fn entry(&self, index: usize) -> Result<MenuEntry<T>> {
        if index == 0 {
            Ok(MenuEntry::new(T::zero(), AllocationVector::zeros(self.n)))
        } else if index <= self.entries.len() {
            Ok(self.entries[index - 1].clone())
        } else {
            Err(Error::InvalidEntryIndex { index, len: self.entries.len() })
        }
    }

    /// True when every stored entry is a sure allocation.
    pub fn is_deterministic(&self) -> bool {
        self.entries.iter().all(|e| e.allocation.is_deterministic())
    }

    /// Invariant diagnostics; an empty list means the menu is well-formed.
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for (i, e) in self.entries.iter().enumerate() {
            if e.allocation.dim() != self.n {
                problems.push(format!(
                    "entry {}: allocation has dimension {}, menu has n = {}",
                    i + 1,
                    e.allocation.dim(),
                    self.n
                ));
            }
            if e.price.is_negative() {
                problems.push(format!("entry {}: negative price {}", i + 1, e.price));
            }
            for (j, c) in e.allocation.coords.iter().enumerate() {
                if c.is_negative() || *c > T::one() {
                    problems.push(format!(
                        "entry {}: coordinate {} out of [0,1]: {}",
                        i + 1,
                        j + 1,
                        c
                    ));
                }
            }
        }
        problems
    }
}

/// A finite distribution over buyer types.
///
/// Probabilities must be strictly positive and sum to at most one; any
/// residual mass `1 − Σ prob` sits on the zero valuation, which buys nothing
/// and pays nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteDistribution<T> {
    pub n: usize,
    pub support: Vec<(ValuationType<T>, T)>,
}

impl<T: Scalar> DiscreteDistribution<T> {
    pub fn new(n: usize, support: Vec<(ValuationType<T>, T)>) -> Self {
        DiscreteDistribution { n, support }
    }

    pub fn total_mass(&self) -> T {
        sum(self.support.iter().map(|(_, p)| p.clone()))
    }

    /// Mass implicitly placed on the zero valuation.
    pub fn residual_mass(&self) -> T {
        T::one() - self.total_mass()
    }

    /// Invariant diagnostics; an empty list means the distribution is valid.
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for (i, (v, p)) in self.support.iter().enumerate() {
            if v.dim() != self.n {
                problems.push(format!(
                    "support type {}: dimension {} differs from n = {}",
                    i + 1,
                    v.dim(),
                    self.n
                ));
            }
            if !p.is_positive() {
                problems.push(format!("support type {}: probability {} not positive", i + 1, p));
            }
            for (j, val) in v.values.iter().enumerate() {
                if val.is_negative() {
                    problems.push(format!(
                        "support type {}: value {} negative at coordinate {}",
                        i + 1,
                        val,
                        j + 1
                    ));
                }
            }
            for (v2, _) in &self.support[i + 1..] {
                if v == v2 {
                    problems.push(format!("support type {} duplicated", i + 1));
                }
            }
        }
        if self.total_mass() > T::one() {
            problems.push(format!("mass exceeds one: total probability {}", self.total_mass()));
        }
        problems
    }
}

/// A multiset of menu entry indices (0 = null entry, repetition allowed),
/// stored in nondecreasing order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct EntryMultiset {
    indices: Vec<usize>,
}

impl EntryMultiset {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        EntryMultiset { indices }
    }

    pub fn empty() -> Self {
        EntryMultiset { indices: Vec::new() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Cardinality counted with multiplicity, null entries included.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// The same multiset with null entries (index 0) dropped.
    pub fn without_nulls(&self) -> Self {
        EntryMultiset { indices: self.indices.iter().copied().filter(|&i| i != 0).collect() }
    }
}

impl std::fmt::Display for EntryMultiset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (pos, i) in self.indices.iter().enumerate() {
            if pos > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", i)?;
        }
        write!(f, "}}")
    }
}

/// Composition of independently drawn lotteries: coordinate `j` of the result
/// is `1 − Π_i (1 − q_{i,j})`, the probability that at least one of the
/// purchased lotteries delivers item `j`. An empty purchase yields nothing.
pub fn lot<'a, T, I>(n: usize, allocs: I) -> Result<AllocationVector<T>>
where
    T: Scalar + 'a,
    I: IntoIterator<Item = &'a AllocationVector<T>>,
{
    let mut miss = vec![T::one(); n];
    for a in allocs {
        if a.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: a.dim() });
        }
        for (m, q) in miss.iter_mut().zip(&a.coords) {
            *m = m.clone() * (T::one() - q.clone());
        }
    }
    Ok(AllocationVector::new(miss.into_iter().map(|m| T::one() - m).collect()))
}

/// Buyer utility from purchasing a multiset of menu entries:
/// `v · Lot(Λ) − Σ_{i ∈ Λ} p_i`, prices counted with multiplicity.
pub fn multiset_utility<T: Scalar>(
    v: &ValuationType<T>,
    lam: &EntryMultiset,
    menu: &Menu<T>,
) -> Result<T> {
    let entries: Vec<MenuEntry<T>> =
        lam.indices().iter().map(|&i| menu.entry(i)).collect::<Result<_>>()?;
    let combined = lot(menu.n, entries.iter().map(|e| &e.allocation))?;
    let value = v.dot(&combined)?;
    let payment = sum(entries.iter().map(|e| e.price.clone()));
    Ok(value - payment)
}

/// Total price of a multiset of menu entries, with multiplicity.
pub fn multiset_payment<T: Scalar>(lam: &EntryMultiset, menu: &Menu<T>) -> Result<T> {
    let mut payment = T::zero();
    for &i in lam.indices() {
        payment = payment + menu.entry(i)?.price;
    }
    Ok(payment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn rq(n: i64, d: i64) -> Rat {
        Rat::from_int(n) / Rat::from_int(d)
    }

    fn alloc(coords: &[(i64, i64)]) -> AllocationVector<Rat> {
        AllocationVector::new(coords.iter().map(|&(n, d)| rq(n, d)).collect())
    }

    #[test]
    fn lot_of_disjoint_sure_allocations_is_their_union() {
        let a = alloc(&[(1, 1), (0, 1)]);
        let b = alloc(&[(0, 1), (1, 1)]);
        assert_eq!(lot(2, [&a, &b]).unwrap(), alloc(&[(1, 1), (1, 1)]));
    }

    #[test]
    fn lot_is_identity_on_singletons() {
        let q = alloc(&[(1, 3), (2, 5)]);
        assert_eq!(lot(2, [&q]).unwrap(), q);
    }

    #[test]
    fn lot_of_two_half_lotteries() {
        let h = alloc(&[(1, 2), (1, 2)]);
        assert_eq!(lot(2, [&h, &h]).unwrap(), alloc(&[(3, 4), (3, 4)]));
    }

    #[test]
    fn lot_of_empty_list_is_zero() {
        assert_eq!(lot(3, []).unwrap(), AllocationVector::<Rat>::zeros(3));
    }

    #[test]
    fn lot_rejects_dimension_mismatch() {
        let a = alloc(&[(1, 2)]);
        assert_eq!(lot(2, [&a]).unwrap_err(), Error::DimensionMismatch { expected: 2, got: 1 });
    }

    #[test]
    fn coffee_pair_utility() {
        // Both items bought separately: value 10, combined price 6.
        let menu = Menu::new(
            2,
            vec![
                MenuEntry::new(r(2), alloc(&[(1, 1), (0, 1)])),
                MenuEntry::new(r(4), alloc(&[(0, 1), (1, 1)])),
            ],
        );
        let v = ValuationType::new(vec![r(4), r(6)]);
        let lam = EntryMultiset::new(vec![1, 2]);
        assert_eq!(multiset_utility(&v, &lam, &menu).unwrap(), r(4));
    }

    #[test]
    fn empty_purchase_has_zero_utility() {
        let menu = Menu::<Rat>::empty(2);
        let v = ValuationType::new(vec![r(7), r(9)]);
        assert_eq!(multiset_utility(&v, &EntryMultiset::empty(), &menu).unwrap(), r(0));
    }

    #[test]
    fn repeated_lottery_utility_counts_price_twice() {
        let menu = Menu::new(2, vec![MenuEntry::new(r(1), alloc(&[(1, 2), (0, 1)]))]);
        let v = ValuationType::new(vec![r(4), r(0)]);
        let lam = EntryMultiset::new(vec![1, 1]);
        // 4 * 3/4 - 2 = 1
        assert_eq!(multiset_utility(&v, &lam, &menu).unwrap(), r(1));
    }

    #[test]
    fn multiset_utility_rejects_bad_index() {
        let menu = Menu::<Rat>::empty(1);
        let v = ValuationType::new(vec![r(1)]);
        let lam = EntryMultiset::new(vec![1]);
        assert_eq!(
            multiset_utility(&v, &lam, &menu).unwrap_err(),
            Error::InvalidEntryIndex { index: 1, len: 0 }
        );
    }

    #[test]
    fn validate_flags_out_of_range_coordinate() {
        let menu = Menu::new(1, vec![MenuEntry::new(r(1), alloc(&[(3, 2)]))]);
        let problems = menu.validate();
        assert_eq!(problems.len(), 1);
        assert!(problems[0].contains("out of [0,1]"));
    }

    #[test]
    fn validate_flags_excess_mass() {
        let d = DiscreteDistribution::new(
            1,
            vec![
                (ValuationType::new(vec![r(1)]), rq(3, 4)),
                (ValuationType::new(vec![r(2)]), rq(1, 2)),
            ],
        );
        let problems = d.validate();
        assert_eq!(problems.len(), 1);
        assert!(problems[0].contains("mass exceeds one"));
    }

    #[test]
    fn validate_flags_duplicate_support_type() {
        let v = ValuationType::new(vec![r(1)]);
        let d = DiscreteDistribution::new(1, vec![(v.clone(), rq(1, 4)), (v, rq(1, 4))]);
        assert!(d.validate().iter().any(|p| p.contains("duplicated")));
    }
}
