//! Invariant checks across the library: randomized (proptest and seeded
//! exhaustive loops) and independent-oracle comparisons.

mod common;

use buyk::scalar::Scalar as _;
use buyk::*;
use common::*;
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn unit_strategy() -> impl Strategy<Value = Rat> {
    (1i64..=4).prop_flat_map(|den| {
        (0i64..=den).prop_map(move |num| Rat::new(BigInt::from(num), BigInt::from(den)))
    })
}

fn value_strategy() -> impl Strategy<Value = Rat> {
    (0i64..=10, 1i64..=3).prop_map(|(num, den)| Rat::new(BigInt::from(num), BigInt::from(den)))
}

fn alloc_strategy(n: usize) -> impl Strategy<Value = AllocationVector<Rat>> {
    prop::collection::vec(unit_strategy(), n).prop_map(AllocationVector::new)
}

fn valuation_strategy(n: usize) -> impl Strategy<Value = ValuationType<Rat>> {
    prop::collection::vec(value_strategy(), n)
        .prop_map(ValuationType::new)
        .prop_filter("positive norm", |v| v.l1_norm() > Rat::from_int(0))
}

fn menu_strategy(n: usize, max_entries: usize) -> impl Strategy<Value = Menu<Rat>> {
    prop::collection::vec((value_strategy(), alloc_strategy(n)), 0..=max_entries)
        .prop_map(move |entries| {
            Menu::new(n, entries.into_iter().map(|(p, a)| MenuEntry::new(p, a)).collect())
        })
}

fn pair_strategy(n: usize, max_len: usize) -> impl Strategy<Value = SequencePair<Rat>> {
    (1..=max_len).prop_flat_map(move |len| {
        (
            prop::collection::vec(valuation_strategy(n), len),
            prop::collection::vec(alloc_strategy(n), len),
        )
            .prop_map(move |(xs, tail)| {
                let mut qs = vec![AllocationVector::zeros(n)];
                qs.extend(tail);
                SequencePair::new(n, xs, qs).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn lot_dominates_every_coordinate(allocs in prop::collection::vec(alloc_strategy(3), 0..5)) {
        let combined = lot(3, allocs.iter()).unwrap();
        for a in &allocs {
            for (c, q) in combined.coords.iter().zip(&a.coords) {
                prop_assert!(c >= q);
            }
        }
        for c in &combined.coords {
            prop_assert!(*c >= r(0) && *c <= r(1));
        }
    }

    #[test]
    fn lot_ignores_order_and_null_entries(allocs in prop::collection::vec(alloc_strategy(3), 1..5)) {
        let forward = lot(3, allocs.iter()).unwrap();
        let reversed = lot(3, allocs.iter().rev()).unwrap();
        prop_assert_eq!(&forward, &reversed);

        let zero = AllocationVector::zeros(3);
        let padded = lot(3, allocs.iter().chain([&zero])).unwrap();
        prop_assert_eq!(&forward, &padded);
    }

    #[test]
    fn extra_entry_never_lowers_the_value_term(
        v in valuation_strategy(3),
        allocs in prop::collection::vec(alloc_strategy(3), 1..4),
    ) {
        let prefix = lot(3, allocs[..allocs.len() - 1].iter()).unwrap();
        let full = lot(3, allocs.iter()).unwrap();
        prop_assert!(v.dot(&full).unwrap() >= v.dot(&prefix).unwrap());
    }

    #[test]
    fn best_response_matches_the_ordered_tuple_oracle(
        v in valuation_strategy(3),
        menu in menu_strategy(3, 3),
        k in 1usize..=3,
    ) {
        let br = best_response(&v, &menu, k).unwrap();
        let (oracle_utility, oracle_payment) = naive_best(&v, &menu, k);
        prop_assert_eq!(&br.utility, &oracle_utility);
        prop_assert_eq!(&br.payment, &oracle_payment);
        prop_assert_eq!(multiset_utility(&v, &br.multiset, &menu).unwrap(), br.utility);
    }

    #[test]
    fn best_utility_never_decreases_in_k(
        v in valuation_strategy(3),
        menu in menu_strategy(3, 4),
    ) {
        let mut last = r(0);
        for k in 1..=3 {
            let u = best_response(&v, &menu, k).unwrap().utility;
            prop_assert!(u >= last);
            last = u;
        }
    }

    #[test]
    fn ic_at_k_implies_ic_below(
        menu in menu_strategy(2, 3),
        types in prop::collection::vec(valuation_strategy(2), 1..3),
        k in 2usize..=3,
    ) {
        if verify_buyk_ic(&menu, &types, k).unwrap().ic {
            for lower in 1..k {
                prop_assert!(verify_buyk_ic(&menu, &types, lower).unwrap().ic);
            }
        }
    }

    #[test]
    fn gap_matches_the_ordered_tuple_oracle(
        pair in pair_strategy(2, 4),
        k in 1usize..=3,
    ) {
        for i in 1..=pair.len() {
            let (g, witness) = gap(&pair, k, i).unwrap();
            prop_assert_eq!(&g, &naive_gap(&pair, k, i));
            // The recorded witness re-evaluates to the recorded gap.
            let composed = lot(2, witness.iter().map(|&j| &pair.allocations()[j])).unwrap();
            let x = &pair.valuations()[i - 1];
            let value = x.dot(&pair.allocations()[i]).unwrap() - x.dot(&composed).unwrap();
            prop_assert_eq!(value, g);
        }
    }

    #[test]
    fn gap_never_increases_in_k(pair in pair_strategy(2, 4)) {
        for i in 1..=pair.len() {
            let mut last: Option<Rat> = None;
            for k in 1..=4 {
                let (g, _) = gap(&pair, k, i).unwrap();
                if let Some(prev) = last {
                    prop_assert!(g <= prev);
                }
                last = Some(g);
            }
        }
    }

    #[test]
    fn plane_menugap_is_at_most_two(pair in pair_strategy(2, 5)) {
        prop_assert!(menugap(&pair, 2).unwrap().menugap <= r(2));
    }

    #[test]
    fn menugap_below_certificate_below_dimension(
        pair in pair_strategy(3, 4),
    ) {
        let total = menugap(&pair, 3).unwrap().menugap;
        let certificate = telescoping_certificate(pair.allocations()).unwrap();
        prop_assert!(total <= certificate);
        prop_assert!(certificate <= r(3));
    }

    #[test]
    fn pruning_never_lowers_the_menugap(
        pair in pair_strategy(2, 4),
        k in 1usize..=3,
    ) {
        let before = menugap(&pair, k).unwrap().menugap;
        let pruned = prune_nonpositive(&pair, k).unwrap();
        let after = menugap(&pruned, k).unwrap().menugap;
        prop_assert!(after >= before);
        for g in menugap(&pruned, k).unwrap().gaps {
            prop_assert!(g > r(0));
        }
    }

    #[test]
    fn coordinate_max_witness_upper_bounds_the_gap(pair in pair_strategy(3, 4)) {
        // At k = n the multiset of per-coordinate argmax indices is one
        // feasible witness, so the true minimum can only be smaller.
        let n = 3;
        for i in 1..=pair.len() {
            let (g, _) = gap(&pair, n, i).unwrap();
            let mut witness = Vec::new();
            for d in 0..n {
                let best = (0..i)
                    .max_by(|&a, &b| {
                        pair.allocations()[a].coords[d].cmp(&pair.allocations()[b].coords[d])
                    })
                    .unwrap();
                witness.push(best);
            }
            let composed = lot(n, witness.iter().map(|&j| &pair.allocations()[j])).unwrap();
            let x = &pair.valuations()[i - 1];
            let at_witness = x.dot(&pair.allocations()[i]).unwrap() - x.dot(&composed).unwrap();
            prop_assert!(g <= at_witness);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adaptive_dominates_nonadaptive_and_agrees_when_deterministic(
        v in valuation_strategy(3),
        menu in menu_strategy(3, 3),
        k in 1usize..=3,
    ) {
        let nonadaptive = best_response(&v, &menu, k).unwrap().utility;
        let adaptive = adaptive_value(&v, &menu, k).unwrap();
        prop_assert!(adaptive >= nonadaptive);
        if menu.is_deterministic() {
            prop_assert_eq!(adaptive, nonadaptive);
        }
    }

    #[test]
    fn lp_dominates_posted_price_benchmarks(
        types in prop::collection::vec(valuation_strategy(2), 1..=3),
    ) {
        let mut distinct = Vec::new();
        for t in types {
            if !distinct.contains(&t) {
                distinct.push(t);
            }
        }
        let prob = Rat::new(BigInt::from(1), BigInt::from(distinct.len() as i64 + 1));
        let dist = DiscreteDistribution::new(
            2,
            distinct.into_iter().map(|v| (v, prob.clone())).collect(),
        );
        let lp = optimal_buy_one(&dist).unwrap().value;
        prop_assert!(lp >= brev(&dist).value);
        prop_assert!(lp >= srev(&dist).value);
    }

    #[test]
    fn menu_size_bound_at_k1(
        menu in menu_strategy(2, 4),
        types in prop::collection::vec(valuation_strategy(2), 1..=3),
    ) {
        let mut distinct = Vec::new();
        for t in types {
            if !distinct.contains(&t) {
                distinct.push(t);
            }
        }
        let prob = Rat::new(BigInt::from(1), BigInt::from(distinct.len() as i64 + 1));
        let dist = DiscreteDistribution::new(
            2,
            distinct.into_iter().map(|v| (v, prob.clone())).collect(),
        );
        let record = menu_size_revenue_bound(&dist, &menu, 1).unwrap();
        prop_assert!(record.holds);
    }
}

#[test]
fn revenue_is_invariant_under_menu_permutation() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..200 {
        let n = rng.gen_range(1..=3);
        let dist = random_distribution(&mut rng, n, 3);
        let menu = random_menu(&mut rng, n, 4, false);
        let k = rng.gen_range(1..=3);
        let baseline = revenue_under_buyk(&dist, &menu, k).unwrap();

        let mut entries = menu.entries.clone();
        for i in (1..entries.len()).rev() {
            entries.swap(i, rng.gen_range(0..=i));
        }
        let shuffled = Menu::new(n, entries);
        assert_eq!(revenue_under_buyk(&dist, &shuffled, k).unwrap(), baseline);
    }
}

#[test]
fn brev_dominates_every_single_entry_menu() {
    let mut rng = StdRng::seed_from_u64(29);
    for _ in 0..300 {
        let n = rng.gen_range(1..=3);
        let dist = random_distribution(&mut rng, n, 4);
        let menu = random_menu(&mut rng, n, 4, false);
        let brev_value = brev(&dist).value;
        for entry in &menu.entries {
            let single = Menu::new(n, vec![entry.clone()]);
            let revenue = revenue_under_buyk(&dist, &single, 1).unwrap();
            assert!(brev_value >= revenue, "single entry earned {revenue} above BRev {brev_value}");
        }
    }
}

#[test]
fn brev_price_is_a_support_value_and_beats_a_dense_grid() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..300 {
        let n = rng.gen_range(1..=3);
        let dist = random_distribution(&mut rng, n, 4);
        let result = brev(&dist);
        let bundle_values: Vec<Rat> =
            dist.support.iter().map(|(v, _)| v.l1_norm()).collect();
        let price = match &result.certificate {
            Certificate::BundlePrice(p) => p.clone(),
            _ => unreachable!(),
        };
        assert!(result.value == r(0) || bundle_values.contains(&price));

        // No price on a dense grid (within and beyond the support range)
        // earns more than the candidate optimum.
        let top = bundle_values.iter().max().cloned().unwrap_or_else(|| r(0)) + r(1);
        for step in 0..=60 {
            let grid_price = top.clone() * rq(step, 40);
            let revenue = benchmarks::bundle_revenue_at_price(&dist, &grid_price);
            assert!(revenue <= result.value);
        }
    }
}

#[test]
fn srev_prices_beat_a_dense_grid_per_item() {
    let mut rng = StdRng::seed_from_u64(13);
    for _ in 0..200 {
        let n = rng.gen_range(1..=3);
        let dist = random_distribution(&mut rng, n, 3);
        let result = srev(&dist);
        assert_eq!(
            benchmarks::item_pricing_revenue(
                &dist,
                match &result.certificate {
                    Certificate::ItemPrices(ps) => ps,
                    _ => unreachable!(),
                }
            ),
            result.value
        );
        // A grid of whole and half prices per item never beats it.
        for num in 0..=24 {
            let uniform = vec![rq(num, 2); n];
            assert!(benchmarks::item_pricing_revenue(&dist, &uniform) <= result.value);
        }
    }
}

#[test]
fn optimal_buy_one_dominates_ic_menus_and_replays_exactly() {
    let mut rng = StdRng::seed_from_u64(17);
    let mut checked = 0;
    for _ in 0..400 {
        let n = rng.gen_range(1..=2);
        let dist = random_distribution(&mut rng, n, 3);
        let deterministic = rng.gen_bool(0.5);
        let menu = random_menu(&mut rng, n, 3, deterministic);
        let k = rng.gen_range(1..=2);
        let types: Vec<_> = dist.support.iter().map(|(v, _)| v.clone()).collect();
        if !verify_buyk_ic(&menu, &types, k).unwrap().ic {
            continue;
        }
        checked += 1;
        let result = optimal_buy_one(&dist).unwrap();
        let revenue = revenue_under_buyk(&dist, &menu, k).unwrap();
        assert!(result.value >= revenue);
        assert!(revenue >= r(0));
    }
    assert!(checked >= 100, "only {checked} IC menus sampled");
}

#[test]
fn every_family_constructor_passes_verification() {
    for n in 1..=6 {
        for k in 1..=3 {
            let family = greedy_coverfree(n, k).unwrap();
            assert!(verify_coverfree(&family, k).unwrap().ok, "greedy n={n} k={k}");
            assert!(!family.is_empty());
        }
    }
    for (q, m) in [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1), (5, 2)] {
        let family = kautz_singleton(q, m).unwrap();
        assert_eq!(family.len(), q.pow(m as u32));
        assert!(
            verify_coverfree(&family, family.k).unwrap().ok,
            "kautz q={q} m={m} k={}",
            family.k
        );
    }
}

#[test]
fn lower_bound_instances_verify_across_small_scales() {
    // The constructor itself re-checks incentive compatibility, the
    // revenue/menugap identity, BRev <= 2n, and both family bounds; here we
    // additionally confirm the adaptive and non-adaptive verdicts agree on
    // these deterministic menus.
    for (n, k) in [
        (1, 1),
        (2, 1),
        (3, 1),
        (4, 1),
        (5, 1),
        (7, 1),
        (10, 1),
        (3, 2),
        (4, 2),
        (5, 2),
        (7, 2),
        (10, 2),
    ] {
        let instance = lowerbound_instance::<Rat>(n, k, FamilyMethod::Greedy)
            .unwrap_or_else(|e| panic!("greedy instance n={n} k={k}: {e}"));
        let types: Vec<_> = instance.dist.support.iter().map(|(v, _)| v.clone()).collect();
        assert!(instance.menu.is_deterministic());
        let nonadaptive = verify_buyk_ic(&instance.menu, &types, k).unwrap().ic;
        let adaptive = verify_adaptive_buyk_ic(&instance.menu, &types, k).unwrap().ic;
        assert!(nonadaptive && adaptive);
    }
    let ks = lowerbound_instance::<Rat>(4, 1, FamilyMethod::KautzSingleton { q: 2, m: 2 }).unwrap();
    assert_eq!(ks.family.as_ref().unwrap().len(), 4);

    // The n = 3 deterministic menu with disjoint supports stays adaptive
    // buy-2 incentive-compatible: extra purchases add price but no value.
    let small = lowerbound_instance::<Rat>(3, 1, FamilyMethod::Greedy).unwrap();
    let types: Vec<_> = small.dist.support.iter().map(|(v, _)| v.clone()).collect();
    assert!(verify_adaptive_buyk_ic(&small.menu, &types, 2).unwrap().ic);
    assert!(verify_buyk_ic(&small.menu, &types, 2).unwrap().ic);
}

#[test]
fn price_filter_keeps_revenue_up_to_the_threshold() {
    // Exhaustive tiny scale: deterministic two-item menus over a price grid,
    // restricted to menus that are buy-k incentive-compatible for the
    // support, with thresholds both on and between the grid prices.
    let allocs = [
        AllocationVector::new(vec![r(1), r(0)]),
        AllocationVector::new(vec![r(0), r(1)]),
        AllocationVector::new(vec![r(1), r(1)]),
    ];
    let prices = [r(1), r(2), r(3)];
    let mut pool = Vec::new();
    for a in &allocs {
        for p in &prices {
            pool.push(MenuEntry::new(p.clone(), a.clone()));
        }
    }
    let dist = DiscreteDistribution::new(
        2,
        vec![
            (vt(&[1, 2]), rq(1, 4)),
            (vt(&[2, 1]), rq(1, 4)),
            (vt(&[3, 3]), rq(1, 4)),
        ],
    );
    let types: Vec<_> = dist.support.iter().map(|(v, _)| v.clone()).collect();
    let thresholds: Vec<Rat> =
        (0..=8).map(|num| rq(num, 2)).collect();

    let mut tested = 0;
    for first in 0..pool.len() {
        for second in first..=pool.len() {
            let mut entries = vec![pool[first].clone()];
            if second < pool.len() {
                entries.push(pool[second].clone());
            }
            let menu = Menu::new(2, entries);
            for k in 1..=2 {
                if !verify_buyk_ic(&menu, &types, k).unwrap().ic {
                    continue;
                }
                let base = revenue_under_buyk(&dist, &menu, k).unwrap();
                for c in &thresholds {
                    let filtered = filter_min_price(&menu, c);
                    let kept = revenue_under_buyk(&dist, &filtered, k).unwrap();
                    assert!(
                        kept >= base.clone() - c.clone(),
                        "menu {:?} k={k} c={c}: {kept} < {base} - {c}",
                        menu.entries.iter().map(|e| e.price.to_string()).collect::<Vec<_>>(),
                    );
                    tested += 1;
                }
            }
        }
    }
    assert!(tested > 500, "only {tested} filter cases exercised");
}
