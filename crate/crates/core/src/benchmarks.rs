//! Revenue benchmarks for a finite type distribution.
//!
//! [`brev`] prices the grand bundle, [`srev`] prices items separately,
//! [`optimal_buy_one`] solves the exact linear program for the best buy-one
//! incentive-compatible mechanism, and [`menu_size_revenue_bound`] records
//! the `|M| · BRev ≥ Rev(D, M)` check.
//!
//! Posted-price benchmarks restrict the search to candidate prices drawn from
//! the support: any other price can be raised to the next candidate without
//! losing a single buyer, so the optimum is always attained there.

use crate::buyer::revenue_under_buyk;
use crate::error::{Error, Result};
use crate::model::{AllocationVector, DiscreteDistribution, Menu, MenuEntry};
use crate::scalar::{sum, Scalar};
use crate::simplex::LinearProgram;

/// Default cap on the number of LP variables for [`optimal_buy_one`].
pub const DEFAULT_LP_GUARD: usize = 64;

/// The object achieving a benchmark value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate<T> {
    BundlePrice(T),
    ItemPrices(Vec<T>),
    Menu(Menu<T>),
}

/// A benchmark value together with the price/menu that attains it;
/// re-evaluating the certificate on the distribution reproduces the value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchmarkResult<T> {
    pub value: T,
    pub certificate: Certificate<T>,
}

/// Revenue from selling the grand bundle at price `price`.
pub fn bundle_revenue_at_price<T: Scalar>(dist: &DiscreteDistribution<T>, price: &T) -> T {
    let mass = sum(
        dist.support
            .iter()
            .filter(|(v, _)| v.l1_norm() >= *price)
            .map(|(_, p)| p.clone()),
    );
    price.clone() * mass
}

/// Revenue from posting one price per item; a buyer takes item `j` exactly
/// when `v_j ≥ p_j` (ties buy, favoring the seller).
pub fn item_pricing_revenue<T: Scalar>(dist: &DiscreteDistribution<T>, prices: &[T]) -> T {
    let mut revenue = T::zero();
    for (j, p) in prices.iter().enumerate() {
        let mass = sum(
            dist.support
                .iter()
                .filter(|(v, _)| v.values[j] >= *p)
                .map(|(_, f)| f.clone()),
        );
        revenue = revenue + p.clone() * mass;
    }
    revenue
}

/// Optimal grand-bundle revenue. Candidate prices are the support bundle
/// values; ties resolve to the lowest optimal price.
pub fn brev<T: Scalar>(dist: &DiscreteDistribution<T>) -> BenchmarkResult<T> {
    let mut candidates: Vec<T> = dist.support.iter().map(|(v, _)| v.l1_norm()).collect();
    candidates.sort();
    candidates.dedup();

    let mut best_price = T::zero();
    let mut best_value = T::zero();
    for price in candidates {
        let value = bundle_revenue_at_price(dist, &price);
        if value > best_value {
            best_value = value;
            best_price = price;
        }
    }
    BenchmarkResult { value: best_value, certificate: Certificate::BundlePrice(best_price) }
}

/// Optimal item-pricing revenue. The additive buyer decides per item, so the
/// optimum decomposes into per-item posted prices over per-item candidates.
pub fn srev<T: Scalar>(dist: &DiscreteDistribution<T>) -> BenchmarkResult<T> {
    let mut prices = Vec::with_capacity(dist.n);
    let mut total = T::zero();
    for j in 0..dist.n {
        let mut candidates: Vec<T> = dist
            .support
            .iter()
            .map(|(v, _)| v.values[j].clone())
            .filter(|x| x.is_positive())
            .collect();
        candidates.sort();
        candidates.dedup();

        let mut best_price = T::zero();
        let mut best_value = T::zero();
        for price in candidates {
            let mass = sum(
                dist.support
                    .iter()
                    .filter(|(v, _)| v.values[j] >= price)
                    .map(|(_, f)| f.clone()),
            );
            let value = price.clone() * mass;
            if value > best_value {
                best_value = value;
                best_price = price;
            }
        }
        total = total + best_value;
        prices.push(best_price);
    }
    BenchmarkResult { value: total, certificate: Certificate::ItemPrices(prices) }
}

/// Exact revenue of the optimal buy-one incentive-compatible mechanism,
/// solved with the default size guard.
pub fn optimal_buy_one<T: Scalar>(dist: &DiscreteDistribution<T>) -> Result<BenchmarkResult<T>> {
    optimal_buy_one_guarded(dist, DEFAULT_LP_GUARD)
}

/// Solves the standard buy-one program: per support type an allocation
/// `q(v) ∈ [0,1]ⁿ` and price `p(v) ≥ 0`, maximizing `Σ f(v) p(v)` subject to
/// incentive compatibility between every ordered pair of types and individual
/// rationality. The certificate is the induced menu; its buy-one revenue is
/// re-checked against the LP optimum before returning.
pub fn optimal_buy_one_guarded<T: Scalar>(
    dist: &DiscreteDistribution<T>,
    guard: usize,
) -> Result<BenchmarkResult<T>> {
    let n = dist.n;
    let m = dist.support.len();
    if m == 0 {
        return Ok(BenchmarkResult {
            value: T::zero(),
            certificate: Certificate::Menu(Menu::empty(n)),
        });
    }
    let vars = m * (n + 1);
    if vars > guard {
        return Err(Error::LpTooLarge { vars, guard });
    }

    // Variable layout: type t owns q_{t,0..n-1} at t(n+1)..t(n+1)+n-1 and
    // p_t at t(n+1)+n.
    let q_var = |t: usize, j: usize| t * (n + 1) + j;
    let p_var = |t: usize| t * (n + 1) + n;

    let mut objective = vec![T::zero(); vars];
    for (t, (_, f)) in dist.support.iter().enumerate() {
        objective[p_var(t)] = f.clone();
    }
    let mut lp = LinearProgram::new(vars, objective);

    for (t, (v, _)) in dist.support.iter().enumerate() {
        // IR: -v·q_t + p_t <= 0
        let mut row = vec![T::zero(); vars];
        for j in 0..n {
            row[q_var(t, j)] = T::zero() - v.values[j].clone();
        }
        row[p_var(t)] = T::one();
        lp.add_constraint(row, T::zero());

        // IC against every other type: -v·q_t + p_t + v·q_s - p_s <= 0
        for s in 0..m {
            if s == t {
                continue;
            }
            let mut row = vec![T::zero(); vars];
            for j in 0..n {
                row[q_var(t, j)] = T::zero() - v.values[j].clone();
                row[q_var(s, j)] = v.values[j].clone();
            }
            row[p_var(t)] = T::one();
            row[p_var(s)] = T::zero() - T::one();
            lp.add_constraint(row, T::zero());
        }

        // q_{t,j} <= 1
        for j in 0..n {
            let mut row = vec![T::zero(); vars];
            row[q_var(t, j)] = T::one();
            lp.add_constraint(row, T::one());
        }
    }

    let solution = lp.solve()?;
    if !lp.is_feasible(&solution.values) {
        return Err(Error::ConstructionFailed(
            "buy-one optimum violates its own constraints".into(),
        ));
    }

    let entries = (0..m)
        .map(|t| {
            MenuEntry::new(
                solution.values[p_var(t)].clone(),
                AllocationVector::new((0..n).map(|j| solution.values[q_var(t, j)].clone()).collect()),
            )
        })
        .collect();
    let menu = Menu::new(n, entries);

    let replayed = revenue_under_buyk(dist, &menu, 1)?;
    if replayed != solution.objective {
        return Err(Error::ConstructionFailed(format!(
            "induced menu replays revenue {} instead of the LP optimum {}",
            replayed, solution.objective
        )));
    }

    Ok(BenchmarkResult { value: solution.objective, certificate: Certificate::Menu(menu) })
}

/// Record of the menu-size revenue bound `|M| · BRev ≥ Rev(D, M)` at the
/// given interaction count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MenuSizeBound<T> {
    pub revenue: T,
    pub menu_size: usize,
    pub brev: T,
    pub bound: T,
    pub holds: bool,
}

pub fn menu_size_revenue_bound<T: Scalar>(
    dist: &DiscreteDistribution<T>,
    menu: &Menu<T>,
    k: usize,
) -> Result<MenuSizeBound<T>> {
    let revenue = revenue_under_buyk(dist, menu, k)?;
    let brev_value = brev(dist).value;
    let bound = T::from_int(menu.len() as i64) * brev_value.clone();
    Ok(MenuSizeBound {
        holds: bound >= revenue,
        revenue,
        menu_size: menu.len(),
        brev: brev_value,
        bound,
    })
}
