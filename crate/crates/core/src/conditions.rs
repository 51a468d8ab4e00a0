//! Shifting-distance pairs: the two defining conditions, the altering-distance
//! check, and constructors that reduce classical contraction hypotheses to a
//! shifting pair.
//!
//! Condition (i), that ψ(u) ≤ φ(v) forces u ≤ v, is tested directly on sampled
//! (u, v) pairs plus a deterministic grid around every breakpoint.
//!
//! Condition (ii) quantifies over all convergent sequences and is not finitely
//! checkable. The checker substitutes a sufficient criterion valid for the
//! piecewise-continuous function class handled here: at every grid point
//! w > 0, min limit-values of ψ must exceed max limit-values of φ by more
//! than tol. When the criterion fails at some w the verdict is
//! `inconclusive` (the condition itself may still hold), never `violated`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{stream, stream_rng};
use crate::scalar_fn::ScalarFn;
use rand::Rng;

/// Default tolerance for the pair checks: far above double-precision noise
/// for ln/affine expressions, far below the worked examples' margins.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default sampling range: covers every distance the hybrid space sampler can
/// realize at the default integer cap.
pub const DEFAULT_U_MAX: f64 = 2.0 * crate::metric::DEFAULT_N_INT as f64 + 1.0;

/// Sample budget used when a constructor must validate an altering-distance
/// precondition without a caller-provided seed.
pub const ALTERING_SAMPLES: usize = 10_000;

const MAX_WITNESSES: usize = 8;

/// Ordered pair (ψ, φ) intended to satisfy the shifting-pair conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftingPair {
    pub psi: ScalarFn,
    pub phi: ScalarFn,
}

impl ShiftingPair {
    pub fn new(psi: ScalarFn, phi: ScalarFn) -> ShiftingPair {
        ShiftingPair { psi, phi }
    }

    /// Breakpoints of ψ and φ combined, ascending, deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut bs: Vec<f64> = self
            .psi
            .breakpoints()
            .iter()
            .chain(self.phi.breakpoints().iter())
            .copied()
            .collect();
        bs.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        bs.dedup();
        bs
    }
}

/// Outcome of a sampled check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// No violation found (for sufficient criteria: the criterion held).
    Pass,
    /// A concrete counterexample was found.
    Violated,
    /// The sufficient criterion failed; the property may still hold.
    Inconclusive,
}

/// One flagged sample: the inputs that triggered it and the function values
/// at those inputs (recomputable from the inputs alone).
#[derive(Debug, Clone, Serialize)]
pub struct ConditionWitness {
    pub label: String,
    pub inputs: Vec<f64>,
    pub values: Vec<f64>,
}

/// Report of one condition check.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub verdict: Verdict,
    /// Worst-case slack against the decision boundary; `None` when no sample
    /// engaged the hypothesis (vacuous pass). Pass implies margin ≥ 0.
    pub margin: Option<f64>,
    /// Number of flagged samples.
    pub violations: usize,
    pub samples_used: usize,
    /// Up to 8 worst witnesses, most severe first.
    pub witnesses: Vec<ConditionWitness>,
}

impl ConditionReport {
    pub fn pass(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Bounded worst-first witness collector with deterministic ordering.
struct WitnessHeap {
    entries: Vec<(f64, ConditionWitness)>,
}

impl WitnessHeap {
    fn new() -> WitnessHeap {
        WitnessHeap { entries: Vec::new() }
    }

    fn push(&mut self, slack: f64, witness: ConditionWitness) {
        self.entries.push((slack, witness));
        self.entries.sort_by(|a, b| {
            (a.0, &a.1.inputs)
                .partial_cmp(&(b.0, &b.1.inputs))
                .expect("finite slacks")
        });
        self.entries.truncate(MAX_WITNESSES);
    }

    fn into_witnesses(self) -> Vec<ConditionWitness> {
        self.entries.into_iter().map(|(_, w)| w).collect()
    }
}

/// Deterministic (u, v) grid: 0, every breakpoint with ±1e-6 neighbors, and
/// the range top, crossed with itself.
fn condition_i_grid(pair: &ShiftingPair, u_max: f64) -> Vec<f64> {
    let mut grid = vec![0.0, u_max];
    for b in pair.breakpoints() {
        for candidate in [b - 1e-6, b, b + 1e-6] {
            if (0.0..=u_max).contains(&candidate) {
                grid.push(candidate);
            }
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    grid.dedup();
    grid
}

/// Check condition (i): whenever ψ(u) ≤ φ(v) − tol_eq, require u ≤ v + tol_ord.
///
/// Samples n pairs uniformly from [0, u_max)² plus the deterministic
/// breakpoint grid. Evaluation domain errors propagate.
pub fn check_condition_i(
    pair: &ShiftingPair,
    seed: u64,
    n: usize,
    tol_eq: f64,
    tol_ord: f64,
    u_max: f64,
) -> Result<ConditionReport> {
    if n < 1 {
        return Err(Error::Param("check_condition_i needs n >= 1".into()));
    }
    if tol_eq <= 0.0 || tol_ord <= 0.0 {
        return Err(Error::Param("tolerances must be positive".into()));
    }
    if !u_max.is_finite() || u_max <= 0.0 {
        return Err(Error::Param(format!("u_max = {u_max} must be positive and finite")));
    }
    let mut rng = stream_rng(seed, stream::CONDITION_I);
    let grid = condition_i_grid(pair, u_max);

    let mut samples_used = 0;
    let mut violations = 0;
    let mut worst: Option<f64> = None;
    let mut witnesses = WitnessHeap::new();

    let mut consider = |u: f64, v: f64, pair: &ShiftingPair| -> Result<()> {
        let psi_u = pair.psi.eval(u)?;
        let phi_v = pair.phi.eval(v)?;
        if psi_u <= phi_v - tol_eq {
            // Distance to the violation boundary u = v + tol_ord.
            let slack = v + tol_ord - u;
            if worst.is_none_or(|w| slack < w) {
                worst = Some(slack);
            }
            if u > v + tol_ord {
                violations += 1;
                witnesses.push(
                    slack,
                    ConditionWitness {
                        label: "condition-i".into(),
                        inputs: vec![u, v],
                        values: vec![psi_u, phi_v],
                    },
                );
            }
        }
        Ok(())
    };

    for &u in &grid {
        for &v in &grid {
            consider(u, v, pair)?;
            samples_used += 1;
        }
    }
    for _ in 0..n {
        let u = rng.random_range(0.0..u_max);
        let v = rng.random_range(0.0..u_max);
        consider(u, v, pair)?;
        samples_used += 1;
    }

    Ok(ConditionReport {
        verdict: if violations == 0 { Verdict::Pass } else { Verdict::Violated },
        margin: worst,
        violations,
        samples_used,
        witnesses: witnesses.into_witnesses(),
    })
}

/// Default grid for condition (ii): `n_points` uniform points on (0, w_max]
/// plus every breakpoint of the pair with ±1e-6 neighbors.
pub fn default_grid(pair: &ShiftingPair, w_max: f64, n_points: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = (1..=n_points)
        .map(|k| k as f64 * w_max / n_points as f64)
        .collect();
    for b in pair.breakpoints() {
        for candidate in [b - 1e-6, b, b + 1e-6] {
            if candidate > 0.0 && candidate <= w_max {
                grid.push(candidate);
            }
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    grid.dedup();
    grid
}

fn validate_grid(pair: &ShiftingPair, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Grid("grid is empty".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Grid("grid must be strictly ascending".into()));
    }
    if grid[0] <= 0.0 {
        return Err(Error::Grid("grid points must be positive".into()));
    }
    let w_max = *grid.last().expect("nonempty");
    for b in pair.breakpoints() {
        if b <= 0.0 || b > w_max {
            continue;
        }
        if !grid.contains(&b) {
            return Err(Error::Grid(format!("grid must include breakpoint {b}")));
        }
        if b - 1e-6 > 0.0 && !grid.iter().any(|&w| w >= b - 1e-6 && w < b) {
            return Err(Error::Grid(format!(
                "grid needs a point within 1e-6 left of breakpoint {b}"
            )));
        }
        if b < w_max && !grid.iter().any(|&w| w > b && w <= b + 1e-6) {
            return Err(Error::Grid(format!(
                "grid needs a point within 1e-6 right of breakpoint {b}"
            )));
        }
    }
    Ok(())
}

/// Check the sufficient criterion for condition (ii): at every grid w,
/// min limit-values of ψ must exceed max limit-values of φ by more than tol.
///
/// Pass means no sequences u_n → w, v_n → w linked by ψ(u_n) ≤ φ(v_n) can
/// exist for any checked w (valid for piecewise-continuous functions). A
/// failure yields `inconclusive` with the deciding limit values as witness.
pub fn check_condition_ii(pair: &ShiftingPair, grid: &[f64], tol: f64) -> Result<ConditionReport> {
    if tol <= 0.0 {
        return Err(Error::Param("tol must be positive".into()));
    }
    validate_grid(pair, grid)?;

    let mut margin = f64::INFINITY;
    let mut violations = 0;
    let mut witnesses = WitnessHeap::new();

    for &w in grid {
        let psi_limits = pair.psi.limit_values(w)?;
        let phi_limits = pair.phi.limit_values(w)?;
        let min_psi = psi_limits.iter().copied().fold(f64::INFINITY, f64::min);
        let max_phi = phi_limits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gap = min_psi - max_phi;
        if gap < margin {
            margin = gap;
        }
        if gap <= tol {
            violations += 1;
            witnesses.push(
                gap,
                ConditionWitness {
                    label: "condition-ii".into(),
                    inputs: vec![w],
                    values: vec![min_psi, max_phi],
                },
            );
        }
    }

    Ok(ConditionReport {
        verdict: if violations == 0 { Verdict::Pass } else { Verdict::Inconclusive },
        margin: Some(margin),
        violations,
        samples_used: grid.len(),
        witnesses: witnesses.into_witnesses(),
    })
}

/// Worst witness of one altering-definition clause.
struct ClauseSlot {
    violations: usize,
    worst: f64,
    witness: Option<ConditionWitness>,
}

impl ClauseSlot {
    fn new() -> ClauseSlot {
        ClauseSlot {
            violations: 0,
            worst: f64::INFINITY,
            witness: None,
        }
    }

    fn record(&mut self, slack: f64, witness: ConditionWitness) {
        if slack < 0.0 {
            self.violations += 1;
        }
        if slack < self.worst {
            self.worst = slack;
            self.witness = Some(witness);
        }
    }

    fn failing_witness(&self) -> Option<ConditionWitness> {
        if self.violations > 0 {
            self.witness.clone()
        } else {
            None
        }
    }
}

/// Check the altering-distance definition on samples: ψ(0) = 0, ψ(t) > 0 for
/// t > 0, nondecreasing, continuous (limit spread ≤ tol at breakpoints).
///
/// The report carries the worst witness of every failing clause (labels
/// `zero-at-zero`, `continuity` (one per failing breakpoint), `positive`,
/// `nondecreasing`) so a caller can tell which part of the definition broke.
pub fn check_altering(
    psi: &ScalarFn,
    seed: u64,
    n: usize,
    tol: f64,
    u_max: f64,
) -> Result<ConditionReport> {
    if n < 1 {
        return Err(Error::Param("check_altering needs n >= 1".into()));
    }
    if !u_max.is_finite() || u_max <= 0.0 {
        return Err(Error::Param(format!("u_max = {u_max} must be positive and finite")));
    }
    let mut rng = stream_rng(seed, stream::ALTERING);
    let mut samples_used = 0;

    // (a) zero at zero.
    let mut zero = ClauseSlot::new();
    let at_zero = psi.eval(0.0)?;
    zero.record(
        tol - at_zero.abs(),
        ConditionWitness {
            label: "zero-at-zero".into(),
            inputs: vec![0.0],
            values: vec![at_zero],
        },
    );
    samples_used += 1;

    // (d) continuity at breakpoints, one slot per breakpoint.
    let mut continuity: Vec<ClauseSlot> = Vec::new();
    for b in psi.breakpoints().to_vec() {
        let limits = psi.limit_values(b)?;
        let spread = limits.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - limits.iter().copied().fold(f64::INFINITY, f64::min);
        let mut slot = ClauseSlot::new();
        slot.record(
            tol - spread,
            ConditionWitness {
                label: "continuity".into(),
                inputs: vec![b],
                values: limits,
            },
        );
        continuity.push(slot);
        samples_used += 1;
    }

    // (b) positivity away from zero, on samples and breakpoints.
    let mut positive = ClauseSlot::new();
    let mut positive_points: Vec<f64> = psi.breakpoints().to_vec();
    for _ in 0..n {
        positive_points.push(rng.random_range(0.0..u_max));
    }
    for t in positive_points {
        if t > tol {
            let value = psi.eval(t)?;
            positive.record(
                value - tol,
                ConditionWitness {
                    label: "positive".into(),
                    inputs: vec![t],
                    values: vec![value],
                },
            );
            samples_used += 1;
        }
    }

    // (c) nondecreasing on sampled ordered pairs.
    let mut monotone = ClauseSlot::new();
    for _ in 0..n {
        let a = rng.random_range(0.0..u_max);
        let b = rng.random_range(0.0..u_max);
        if a == b {
            continue;
        }
        let (s, t) = if a < b { (a, b) } else { (b, a) };
        let ps = psi.eval(s)?;
        let pt = psi.eval(t)?;
        monotone.record(
            pt - ps + tol,
            ConditionWitness {
                label: "nondecreasing".into(),
                inputs: vec![s, t],
                values: vec![ps, pt],
            },
        );
        samples_used += 1;
    }

    let mut slots: Vec<&ClauseSlot> = vec![&zero];
    slots.extend(continuity.iter());
    slots.push(&positive);
    slots.push(&monotone);

    let violations: usize = slots.iter().map(|s| s.violations).sum();
    let margin = slots.iter().map(|s| s.worst).fold(f64::INFINITY, f64::min);
    let witnesses: Vec<ConditionWitness> =
        slots.iter().filter_map(|s| s.failing_witness()).collect();

    Ok(ConditionReport {
        verdict: if violations == 0 { Verdict::Pass } else { Verdict::Violated },
        margin: Some(margin),
        violations,
        samples_used,
        witnesses,
    })
}

fn require_altering(psi: &ScalarFn, role: &'static str) -> Result<()> {
    let report = check_altering(psi, 0, ALTERING_SAMPLES, DEFAULT_TOL, DEFAULT_U_MAX)?;
    if report.pass() {
        Ok(())
    } else {
        let detail = report
            .witnesses
            .first()
            .map(|w| format!("clause `{}` fails at {:?}", w.label, w.inputs))
            .unwrap_or_else(|| "altering check failed".into());
        Err(Error::NotAltering { role, detail })
    }
}

/// Shifting pair (t, k·t) equivalent to a Banach contraction with factor k.
pub fn from_banach(k: f64) -> Result<ShiftingPair> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Param(format!("banach constant k = {k} must lie in [0, 1)")));
    }
    Ok(ShiftingPair::new(ScalarFn::identity(), ScalarFn::linear(k)))
}

/// Shifting pair (ψ, c·ψ) for an altering distance function ψ and c ∈ [0, 1).
pub fn from_khan(psi: ScalarFn, c: f64) -> Result<ShiftingPair> {
    if !(0.0..1.0).contains(&c) {
        return Err(Error::Param(format!("khan constant c = {c} must lie in [0, 1)")));
    }
    require_altering(&psi, "psi")?;
    let phi = psi.scale(c);
    Ok(ShiftingPair::new(psi, phi))
}

/// Shifting pair (ψ, ψ − φ_alt) for two altering distance functions, formed
/// by expression-level subtraction with pieces aligned on the union of
/// breakpoints.
pub fn from_altering_pair(psi: ScalarFn, varphi: ScalarFn) -> Result<ShiftingPair> {
    require_altering(&psi, "psi")?;
    require_altering(&varphi, "varphi")?;
    let phi = psi.sub(&varphi);
    Ok(ShiftingPair::new(psi, phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn ln_pair() -> ShiftingPair {
        ShiftingPair::new(
            ScalarFn::parse("ln((1+2*t)/2)").unwrap(),
            ScalarFn::parse("ln((1+t)/2)").unwrap(),
        )
    }

    #[test]
    fn ln_pair_satisfies_condition_i() {
        // psi(u) <= phi(v) is equivalent to 2u <= v here, which forces u <= v.
        let report = check_condition_i(&ln_pair(), 42, 100_000, 1e-9, 1e-9, 101.0).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.violations, 0);
        assert!(report.margin.unwrap() >= 0.0);
    }

    #[test]
    fn ln_pair_satisfies_condition_ii() {
        let pair = ln_pair();
        let grid = default_grid(&pair, 101.0, 10_000);
        let report = check_condition_ii(&pair, &grid, 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        // gap(w) = ln((1+2w)/(1+w)) > 0 for w > 0.
        assert!(report.margin.unwrap() > 0.0);
    }

    #[test]
    fn doubling_phi_violates_condition_i() {
        // Brute-force oracle: a coarse grid already contains a witness
        // u <= 2v - tol with u > v + tol, e.g. (1.5, 1).
        let pair = ShiftingPair::new(ScalarFn::identity(), ScalarFn::linear(2.0));
        let mut oracle_found = false;
        for iu in 0..=40 {
            for iv in 0..=40 {
                let (u, v) = (iu as f64 * 0.1, iv as f64 * 0.1);
                if u <= 2.0 * v - 1e-9 && u > v + 1e-9 {
                    oracle_found = true;
                }
            }
        }
        assert!(oracle_found);

        let report = check_condition_i(&pair, 42, 10_000, 1e-9, 1e-9, 101.0).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        assert!(report.violations > 0);
        let w = &report.witnesses[0];
        assert!(w.inputs[0] > w.inputs[1] + 1e-9);
        assert!(w.values[0] <= w.values[1] - 1e-9);
        assert!(report.margin.unwrap() < 0.0);
    }

    #[test]
    fn identity_pair_passes_i_but_not_ii() {
        let pair = ShiftingPair::new(ScalarFn::identity(), ScalarFn::identity());
        let report = check_condition_i(&pair, 42, 10_000, 1e-9, 1e-9, 101.0).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);

        // Constant sequences u_n = v_n = w link psi and phi at every w > 0,
        // so the sufficient criterion fails everywhere.
        let grid = default_grid(&pair, 101.0, 1000);
        let report = check_condition_ii(&pair, &grid, 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::Inconclusive);
        assert_eq!(report.violations, grid.len());
        assert_eq!(report.samples_used, grid.len());
    }

    #[test]
    fn paper_pair_gap_at_breakpoint() {
        let pair = corpus::paper_pair();
        let grid = default_grid(&pair, 101.0, 10_000);
        assert!(grid.contains(&1.0));
        assert!(grid.iter().any(|&w| (1.0 - 1e-6..1.0).contains(&w)));
        assert!(grid.iter().any(|&w| w > 1.0 && w <= 1.0 + 1e-6));
        let report = check_condition_ii(&pair, &grid, 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);

        // At w = 1 the deciding values are min {ln(6/12), ln(5/12)} and
        // max {ln(4/12), ln(3/12)}; the gap is ln(5/12) - ln(4/12) = ln(5/4).
        let min_psi = pair
            .psi
            .limit_values(1.0)
            .unwrap()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let max_phi = pair
            .phi
            .limit_values(1.0)
            .unwrap()
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((min_psi - (-0.8754687373538999)).abs() < 1e-12);
        assert!((max_phi - (-1.0986122886681098)).abs() < 1e-12);
        assert!(((min_psi - max_phi) - 0.22314355131420976).abs() < 1e-9);
    }

    #[test]
    fn paper_pair_passes_condition_i() {
        let report =
            check_condition_i(&corpus::paper_pair(), 42, 100_000, 1e-9, 1e-9, 101.0).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn altering_accepts_identity_and_square() {
        for psi in [ScalarFn::identity(), ScalarFn::parse("t*t").unwrap()] {
            let report = check_altering(&psi, 42, 10_000, 1e-9, 101.0).unwrap();
            assert_eq!(report.verdict, Verdict::Pass, "{psi}");
        }
    }

    #[test]
    fn altering_rejects_paper_psi_with_both_clauses() {
        let psi = corpus::paper_psi();
        let report = check_altering(&psi, 42, 10_000, 1e-9, 101.0).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);

        let zero = report
            .witnesses
            .iter()
            .find(|w| w.label == "zero-at-zero")
            .expect("psi(0) != 0 must be flagged");
        assert!((zero.values[0] - (-2.4849066497880004)).abs() < 1e-12);

        let cont = report
            .witnesses
            .iter()
            .find(|w| w.label == "continuity")
            .expect("discontinuity at 1 must be flagged");
        assert_eq!(cont.inputs, vec![1.0]);
        assert!((cont.values[0] - (-std::f64::consts::LN_2)).abs() < 1e-12);
        assert!((cont.values[1] - (-0.8754687373538999)).abs() < 1e-12);
    }

    #[test]
    fn banach_pair_family() {
        // k = 0: the hypothesis psi(u) <= -tol never fires (vacuous pass).
        let pair = from_banach(0.0).unwrap();
        let report = check_condition_i(&pair, 42, 10_000, 1e-9, 1e-9, 101.0).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.margin, None);

        // k = 1/2: condition-(ii) gap at w = 2 is psi(2) - phi(2) = 2 - 1.
        let pair = from_banach(0.5).unwrap();
        let gap = pair.psi.eval(2.0).unwrap() - pair.phi.eval(2.0).unwrap();
        assert!((gap - 1.0).abs() < 1e-12);

        for k in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9] {
            let pair = from_banach(k).unwrap();
            let ci = check_condition_i(&pair, 42, 100_000, 1e-9, 1e-9, 101.0).unwrap();
            assert_eq!(ci.verdict, Verdict::Pass, "condition i at k = {k}");
            assert_eq!(ci.violations, 0);
            let grid = default_grid(&pair, 101.0, 10_000);
            let cii = check_condition_ii(&pair, &grid, 1e-9).unwrap();
            assert_eq!(cii.verdict, Verdict::Pass, "condition ii at k = {k}");
        }

        assert!(from_banach(1.0).is_err());
        assert!(from_banach(-0.1).is_err());
    }

    #[test]
    fn khan_reduces_to_banach_for_identity_psi() {
        let khan = from_khan(ScalarFn::identity(), 0.5).unwrap();
        let banach = from_banach(0.5).unwrap();
        for i in 0..1000 {
            let t = i as f64 * 0.1;
            assert!(
                (khan.phi.eval(t).unwrap() - banach.phi.eval(t).unwrap()).abs() < 1e-12,
                "t = {t}"
            );
            assert_eq!(khan.psi.eval(t).unwrap(), banach.psi.eval(t).unwrap());
        }
    }

    #[test]
    fn khan_with_square_psi() {
        let pair = from_khan(ScalarFn::parse("t*t").unwrap(), 0.25).unwrap();
        let report = check_condition_i(&pair, 42, 10_000, 1e-9, 1e-9, 101.0).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);

        let degenerate = from_khan(ScalarFn::identity(), 0.0).unwrap();
        assert_eq!(degenerate.phi.eval(5.0).unwrap(), 0.0);

        assert!(from_khan(ScalarFn::identity(), 1.0).is_err());
        assert!(matches!(
            from_khan(corpus::paper_psi(), 0.5),
            Err(Error::NotAltering { .. })
        ));
    }

    #[test]
    fn altering_pair_subtraction() {
        let pair = from_altering_pair(ScalarFn::identity(), ScalarFn::linear(0.5)).unwrap();
        let banach = from_banach(0.5).unwrap();
        for i in 0..=10_000 {
            let t = i as f64 * 0.01;
            assert!(
                (pair.phi.eval(t).unwrap() - banach.phi.eval(t).unwrap()).abs() < 1e-12,
                "t = {t}"
            );
        }

        let collapsed = from_altering_pair(ScalarFn::identity(), ScalarFn::identity()).unwrap();
        assert_eq!(collapsed.phi.eval(3.0).unwrap(), 0.0);

        let doubled = from_altering_pair(ScalarFn::linear(2.0), ScalarFn::identity()).unwrap();
        for w in [0.5, 1.0, 7.0] {
            let gap = doubled.psi.eval(w).unwrap() - doubled.phi.eval(w).unwrap();
            assert!((gap - w).abs() < 1e-12);
        }
    }

    #[test]
    fn altering_pair_aligns_mismatched_breakpoints() {
        // psi has a breakpoint at 1, varphi at 2; the output must equal the
        // pointwise difference everywhere, including across both seams.
        let psi = ScalarFn::new(vec![
            crate::scalar_fn::Piece::new(
                crate::scalar_fn::Interval::bounded(0.0, true, 1.0, true),
                crate::scalar_fn::parse_expr("t").unwrap(),
            ),
            crate::scalar_fn::Piece::new(
                crate::scalar_fn::Interval::unbounded(1.0, false),
                crate::scalar_fn::parse_expr("2*t - 1").unwrap(),
            ),
        ])
        .unwrap();
        let varphi = ScalarFn::new(vec![
            crate::scalar_fn::Piece::new(
                crate::scalar_fn::Interval::bounded(0.0, true, 2.0, true),
                crate::scalar_fn::parse_expr("t/2").unwrap(),
            ),
            crate::scalar_fn::Piece::new(
                crate::scalar_fn::Interval::unbounded(2.0, false),
                crate::scalar_fn::parse_expr("t - 1").unwrap(),
            ),
        ])
        .unwrap();
        let pair = from_altering_pair(psi.clone(), varphi.clone()).unwrap();
        assert_eq!(pair.phi.breakpoints(), &[1.0, 2.0]);
        for i in 0..=4000 {
            let t = i as f64 * 0.0025;
            let expected = psi.eval(t).unwrap() - varphi.eval(t).unwrap();
            let got = pair.phi.eval(t).unwrap();
            assert!((got - expected).abs() <= 1e-12, "t = {t}: {got} vs {expected}");
        }
    }

    #[test]
    fn checker_is_monotone_in_phi() {
        // Pointwise phi <= phi' must flag no more violations under phi.
        let psi = ScalarFn::identity();
        let lower = ShiftingPair::new(psi.clone(), ScalarFn::linear(0.5));
        let upper = ShiftingPair::new(psi, ScalarFn::linear(2.0));
        let a = check_condition_i(&lower, 7, 50_000, 1e-9, 1e-9, 101.0).unwrap();
        let b = check_condition_i(&upper, 7, 50_000, 1e-9, 1e-9, 101.0).unwrap();
        assert!(a.violations <= b.violations);
    }

    #[test]
    fn grid_validation_errors() {
        let pair = corpus::paper_pair();
        assert!(matches!(
            check_condition_ii(&pair, &[], 1e-9),
            Err(Error::Grid(_))
        ));
        // Missing the breakpoint at 1.
        assert!(matches!(
            check_condition_ii(&pair, &[0.5, 2.0], 1e-9),
            Err(Error::Grid(_))
        ));
        // Not ascending.
        assert!(matches!(
            check_condition_ii(&pair, &[2.0, 1.0], 1e-9),
            Err(Error::Grid(_))
        ));
    }
}
