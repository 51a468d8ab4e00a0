//! Fixed-point solver and hypothesis-verification toolkit for
//! shifting-distance-pair contractions on metric spaces.
//!
//! The library checks, numerically and on declared samples, whether a pair
//! of functions (ψ, φ) is a shifting distance pair, whether a self-map T on
//! a metric space satisfies the contraction inequality
//! ψ(d(Tx,Ty)) ≤ φ(d(x,y)), and runs Picard iteration with diagnostics that
//! mirror the existence proof: decreasing step distances, a windowed Cauchy
//! check, the fixed-point residual, and a multi-start uniqueness probe.
//!
//! Checks sample; they do not prove. Verdicts distinguish `violated` (a
//! concrete counterexample was found) from `inconclusive` (a sufficient
//! criterion failed).

pub mod conditions;
pub mod config;
pub mod corpus;
pub mod error;
pub mod metric;
pub mod rng;
pub mod scalar_fn;
pub mod solver;
pub mod verifier;

pub use conditions::{
    check_altering, check_condition_i, check_condition_ii, default_grid, from_altering_pair,
    from_banach, from_khan, ConditionReport, ConditionWitness, ShiftingPair, Verdict,
};
pub use config::{ChecksSpec, Config, PairSpec, SolverSpec, SpaceSpec};
pub use corpus::{banach_instance, instance, list_instances, run_instance, Instance};
pub use error::{Error, Result};
pub use metric::{
    check_metric_axioms, finite_space, hybrid_space, hybrid_space_with, interval_space,
    verify_closure, AxiomReport, ClosureReport, MetricSpace, Point, SelfMap, DEFAULT_N_INT,
};
pub use scalar_fn::{parse_expr, Expr, Interval, Piece, ScalarFn};
pub use solver::{
    cauchy_check, picard, probe_uniqueness, IterationTrace, SolveVerdict, UniquenessReport,
    UniquenessVerdict,
};
pub use verifier::{
    check_contraction, margin_breakdown, search_counterexample, ContractionReport,
    ContractionWitness,
};
