//! Shared helpers for the integration suites: seeded random generators and
//! independent brute-force oracles. The oracles deliberately avoid the
//! library's enumeration and lottery code paths: they walk ordered index
//! tuples (no canonicalization, no pruning, no duplicate suppression) and
//! compute the lottery composition inline.

#![allow(dead_code)]

use buyk::scalar::Scalar as _;
use buyk::{
    AllocationVector, DiscreteDistribution, Menu, MenuEntry, Rat, SequencePair, ValuationType,
};
use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::Rng;

pub fn r(n: i64) -> Rat {
    Rat::from_int(n)
}

pub fn rq(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn vt(values: &[i64]) -> ValuationType<Rat> {
    ValuationType::new(values.iter().map(|&x| r(x)).collect())
}

/// Random rational in [0, max_num] with denominator up to max_den.
pub fn random_rat(rng: &mut StdRng, max_num: i64, max_den: i64) -> Rat {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(0..=max_num * den);
    rq(num, den)
}

/// Random rational in [0, 1].
pub fn random_unit(rng: &mut StdRng, max_den: i64) -> Rat {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(0..=den);
    rq(num, den)
}

pub fn random_alloc(rng: &mut StdRng, n: usize) -> AllocationVector<Rat> {
    AllocationVector::new((0..n).map(|_| random_unit(rng, 4)).collect())
}

pub fn random_deterministic_alloc(rng: &mut StdRng, n: usize) -> AllocationVector<Rat> {
    AllocationVector::new((0..n).map(|_| r(rng.gen_range(0..=1))).collect())
}

/// Random valuation with strictly positive total value.
pub fn random_valuation(rng: &mut StdRng, n: usize) -> ValuationType<Rat> {
    loop {
        let v = ValuationType::new((0..n).map(|_| random_rat(rng, 5, 2)).collect());
        if v.l1_norm() > r(0) {
            return v;
        }
    }
}

pub fn random_menu(rng: &mut StdRng, n: usize, max_entries: usize, deterministic: bool) -> Menu<Rat> {
    let count = rng.gen_range(0..=max_entries);
    let entries = (0..count)
        .map(|_| {
            let alloc = if deterministic {
                random_deterministic_alloc(rng, n)
            } else {
                random_alloc(rng, n)
            };
            MenuEntry::new(random_rat(rng, 6, 2), alloc)
        })
        .collect();
    Menu::new(n, entries)
}

/// Random distribution with up to `max_support` pairwise-distinct types and
/// total mass at most one.
pub fn random_distribution(rng: &mut StdRng, n: usize, max_support: usize) -> DiscreteDistribution<Rat> {
    let target = rng.gen_range(1..=max_support);
    let mut types: Vec<ValuationType<Rat>> = Vec::new();
    let mut attempts = 0;
    while types.len() < target && attempts < 50 {
        attempts += 1;
        let v = random_valuation(rng, n);
        if !types.contains(&v) {
            types.push(v);
        }
    }
    let prob = rq(1, (types.len() as i64 + 1).max(2));
    DiscreteDistribution::new(n, types.into_iter().map(|v| (v, prob.clone())).collect())
}

pub fn random_sequence_pair(rng: &mut StdRng, n: usize, max_len: usize) -> SequencePair<Rat> {
    let len = rng.gen_range(1..=max_len);
    let xs = (0..len).map(|_| random_valuation(rng, n)).collect();
    let mut qs = vec![AllocationVector::zeros(n)];
    qs.extend((0..len).map(|_| random_alloc(rng, n)));
    SequencePair::new(n, xs, qs).expect("generator produces valid pairs")
}

/// Oracle: best utility and, among utility-maximal purchases, the largest
/// payment, over all ordered tuples of exactly `k` indices (0 = null entry,
/// arbitrary repetition). Independent of the library's enumeration.
pub fn naive_best(v: &ValuationType<Rat>, menu: &Menu<Rat>, k: usize) -> (Rat, Rat) {
    let m = menu.entries.len();
    let choices = m + 1;
    let mut best_utility = r(0);
    let mut best_payment = r(0);
    let total = choices.pow(k as u32);
    for code in 0..total {
        let mut digits = code;
        let mut miss: Vec<Rat> = vec![r(1); menu.n];
        let mut payment = r(0);
        for _ in 0..k {
            let idx = digits % choices;
            digits /= choices;
            if idx == 0 {
                continue;
            }
            let entry = &menu.entries[idx - 1];
            payment += entry.price.clone();
            for (m, q) in miss.iter_mut().zip(&entry.allocation.coords) {
                *m *= r(1) - q.clone();
            }
        }
        let mut value = r(0);
        for (vj, mj) in v.values.iter().zip(&miss) {
            value += vj.clone() * (r(1) - mj.clone());
        }
        let utility = value - payment.clone();
        if utility > best_utility || (utility == best_utility && payment > best_payment) {
            best_utility = utility;
            best_payment = payment;
        }
    }
    (best_utility, best_payment)
}

/// Oracle: the gap of index `i` via ordered tuples over `{0..i-1}^k`.
pub fn naive_gap(pair: &SequencePair<Rat>, k: usize, i: usize) -> Rat {
    let x = &pair.valuations()[i - 1];
    let own: Rat = x
        .values
        .iter()
        .zip(&pair.allocations()[i].coords)
        .map(|(a, b)| a.clone() * b.clone())
        .sum();
    let mut best: Option<Rat> = None;
    let total = i.pow(k as u32);
    for code in 0..total {
        let mut digits = code;
        let mut miss: Vec<Rat> = vec![r(1); pair.dim()];
        for _ in 0..k {
            let idx = digits % i;
            digits /= i;
            for (m, q) in miss.iter_mut().zip(&pair.allocations()[idx].coords) {
                *m *= r(1) - q.clone();
            }
        }
        let mut composed_value = r(0);
        for (vj, mj) in x.values.iter().zip(&miss) {
            composed_value += vj.clone() * (r(1) - mj.clone());
        }
        let value = own.clone() - composed_value;
        if best.as_ref().is_none_or(|b| value < *b) {
            best = Some(value);
        }
    }
    best.expect("i >= 1 so at least the all-null tuple exists")
}

/// The menu offering every nonempty item subset at the sum of its per-item
/// prices. Buying several entries never beats the union entry, so this menu
/// is buy-k incentive-compatible for every k.
pub fn additive_closure_menu(prices: &[Rat]) -> Menu<Rat> {
    let n = prices.len();
    let mut entries = Vec::new();
    for mask in 1u32..(1 << n) {
        let coords: Vec<Rat> =
            (0..n).map(|j| if mask & (1 << j) != 0 { r(1) } else { r(0) }).collect();
        let price: Rat =
            (0..n).filter(|j| mask & (1 << j) != 0).map(|j| prices[j].clone()).sum();
        entries.push(MenuEntry::new(price, AllocationVector::new(coords)));
    }
    Menu::new(n, entries)
}
