//! Exact verification toolkit for buy-k mechanisms over finite type
//! distributions.
//!
//! A buy-k mechanism is a menu of priced lotteries from which a buyer may
//! purchase any multiset of up to `k` entries. This crate computes, in exact
//! rational arithmetic, everything that model raises at desk scale:
//!
//! - buyer behavior: exact best responses, incentive-compatibility
//!   verdicts, revenue accounting, and the adaptive-buyer dynamic program
//!   ([`buyer`]);
//! - revenue benchmarks: optimal grand bundling, optimal item pricing, and
//!   the optimal buy-one mechanism via an exact rational simplex
//!   ([`benchmarks`], [`simplex`]);
//! - the gap measure over valuation/allocation sequence pairs, with
//!   non-positive-point pruning and the telescoping upper-bound certificate
//!   ([`menugap`]);
//! - constructive pipelines in both directions: menu surgery down to
//!   sequence pairs, and cover-free families up to distributions with
//!   deterministic menus exhibiting large revenue ratios
//!   ([`constructions`]).
//!
//! All core computations are generic over an exact ordered-field scalar (see
//! [`scalar::Scalar`]); the crate-root aliases [`Rat`] (arbitrary precision)
//! and [`Rat64`] (machine-word rationals, for small inputs) are the intended
//! instantiations. Floating point satisfies neither the total-order nor the
//! exactness requirement and cannot be used here.

pub mod benchmarks;
pub mod buyer;
pub mod combinatorics;
pub mod constructions;
pub mod error;
pub mod menugap;
pub mod model;
pub mod scalar;
pub mod simplex;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Arbitrary-precision rational scalar; the default instantiation.
pub type Rat = num_rational::BigRational;

/// Machine-word rational scalar for small inputs (overflow is the caller's
/// risk; prefer [`Rat`] unless profiling says otherwise).
pub type Rat64 = num_rational::Ratio<i64>;

pub use benchmarks::{
    brev, menu_size_revenue_bound, optimal_buy_one, srev, BenchmarkResult, Certificate,
    MenuSizeBound,
};
pub use buyer::{
    adaptive_value, best_response, revenue_under_buyk, verify_adaptive_buyk_ic, verify_buyk_ic,
    BestResponse, IcVerdict, IcWitness,
};
pub use constructions::{
    band_split, coffee_shop_instance, extract_sequences, filter_min_price, greedy_coverfree,
    kautz_singleton, lowerbound_instance, sequences_to_instance, srev_gap_instance,
    upper_bound_pipeline, verify_coverfree, CoverFreeFamily, FamilyMethod, LowerBoundInstance,
    PipelineTrace,
};
pub use menugap::{gap, menugap, prune_nonpositive, telescoping_certificate, GapReport, SequencePair};
pub use model::{
    lot, multiset_utility, AllocationVector, DiscreteDistribution, EntryMultiset, Menu, MenuEntry,
    ValuationType,
};
pub use simplex::{LinearProgram, LpSolution};
