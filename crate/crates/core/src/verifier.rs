//! Numerical verification of the contraction inequality
//! ψ(d(Tx,Ty)) ≤ φ(d(x,y)) over a (space, map, pair) triple, plus an
//! adaptive counterexample search.
//!
//! The margin of a pair is φ(d(x,y)) − ψ(d(Tx,Ty)); the hypothesis holds on
//! a sample iff its margin is ≥ −tol. Both entry points return the worst
//! margin seen and a witness whose fields are recomputable from (x, y) alone.

use serde::Serialize;

use crate::conditions::{ShiftingPair, Verdict};
use crate::error::{Error, Result};
use crate::metric::{verify_closure, MetricSpace, Point, SelfMap};
use crate::rng::{derive, stream, stream_rng};
use rand::Rng;

/// Worst-case sample of the contraction check. Every field after (x, y) is
/// recomputable from (x, y), the space, the map and the pair.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ContractionWitness {
    pub x: f64,
    pub y: f64,
    pub d_xy: f64,
    pub d_txy: f64,
    /// ψ(d(Tx,Ty))
    pub psi_value: f64,
    /// φ(d(x,y))
    pub phi_value: f64,
}

impl ContractionWitness {
    pub fn margin(&self) -> f64 {
        self.phi_value - self.psi_value
    }
}

/// Outcome of a contraction check or counterexample search.
#[derive(Debug, Clone, Serialize)]
pub struct ContractionReport {
    pub verdict: Verdict,
    /// min over the sampled x ≠ y pairs of φ(d(x,y)) − ψ(d(Tx,Ty)).
    pub worst_margin: f64,
    pub witness: Option<ContractionWitness>,
    /// φ(0) − ψ(0): the diagonal case x = y, evaluated once explicitly by
    /// the sampled check and folded into the verdict.
    pub diagonal_margin: Option<f64>,
    pub samples_used: usize,
}

impl ContractionReport {
    pub fn pass(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Evaluate the inequality at one pair, returning all intermediate values.
pub fn margin_breakdown(
    space: &MetricSpace,
    map: &SelfMap,
    pair: &ShiftingPair,
    x: Point,
    y: Point,
) -> Result<ContractionWitness> {
    let tx = map.apply(space, x)?;
    let ty = map.apply(space, y)?;
    let d_xy = space.distance(x, y);
    let d_txy = space.distance(tx, ty);
    Ok(ContractionWitness {
        x: x.value(),
        y: y.value(),
        d_xy,
        d_txy,
        psi_value: pair.psi.eval(d_txy)?,
        phi_value: pair.phi.eval(d_xy)?,
    })
}

struct Tracker {
    worst: f64,
    witness: Option<ContractionWitness>,
    samples_used: usize,
}

impl Tracker {
    fn new() -> Tracker {
        Tracker {
            worst: f64::INFINITY,
            witness: None,
            samples_used: 0,
        }
    }

    fn observe(&mut self, w: ContractionWitness) {
        self.samples_used += 1;
        let margin = w.margin();
        if margin < self.worst || self.witness.is_none() {
            self.worst = margin;
            self.witness = Some(w);
        }
    }

    fn report(self, tol: f64, diagonal_margin: Option<f64>) -> ContractionReport {
        let diagonal_ok = diagonal_margin.is_none_or(|m| m >= -tol);
        ContractionReport {
            verdict: if self.worst >= -tol && diagonal_ok {
                Verdict::Pass
            } else {
                Verdict::Violated
            },
            worst_margin: self.worst,
            witness: self.witness,
            diagonal_margin,
            samples_used: self.samples_used,
        }
    }
}

fn in_unit(p: Point) -> bool {
    (0.0..=1.0).contains(&p.value())
}

/// Check the inequality on n sampled pairs with x ≠ y.
///
/// The budget is stratified a quarter each into: both endpoints in \[0,1\],
/// mixed, both outside \[0,1\], and unstratified sampler pairs, mirroring the
/// hybrid example's case split. Strata that the space cannot fill fall back
/// to sampler pairs. The diagonal case d = 0 (which requires ψ(0) ≤ φ(0)) is
/// evaluated once explicitly rather than sampled.
///
/// The map must already be closed on the space; a closure violation on the
/// same seed is an error, not a report.
pub fn check_contraction(
    space: &MetricSpace,
    map: &SelfMap,
    pair: &ShiftingPair,
    seed: u64,
    n: usize,
    tol: f64,
) -> Result<ContractionReport> {
    if n < 1 {
        return Err(Error::Param("check_contraction needs n >= 1".into()));
    }
    let closure = verify_closure(space, map, seed, n.min(10_000));
    if let Some(&(x, image)) = closure.witnesses.first() {
        return Err(Error::ClosureViolation {
            x,
            image,
            space: space.description().to_string(),
        });
    }

    let pool = space.sample(derive(seed, stream::CONTRACTION), 2 * n + 8);
    let unit: Vec<Point> = pool.iter().copied().filter(|p| in_unit(*p)).collect();
    let outer: Vec<Point> = pool.iter().copied().filter(|p| !in_unit(*p)).collect();

    let mut tracker = Tracker::new();

    // Diagonal: d(x,x) = 0 on both sides, so (2.1) demands ψ(0) ≤ φ(0).
    let diagonal = margin_breakdown(space, map, pair, pool[0], pool[0])?;
    let diagonal_margin = Some(diagonal.margin());

    let mut unit_i = 0;
    let mut outer_i = 0;
    let mut pool_i = 0;
    let next_pool_pair = |pool_i: &mut usize| -> Option<(Point, Point)> {
        if *pool_i + 1 < pool.len() {
            let p = (pool[*pool_i], pool[*pool_i + 1]);
            *pool_i += 2;
            Some(p)
        } else {
            None
        }
    };

    for i in 0..n {
        let candidate = match i % 4 {
            0 => {
                if unit_i + 1 < unit.len() {
                    let p = (unit[unit_i], unit[unit_i + 1]);
                    unit_i += 2;
                    Some(p)
                } else {
                    next_pool_pair(&mut pool_i)
                }
            }
            1 => {
                if unit_i < unit.len() && outer_i < outer.len() {
                    let p = (outer[outer_i], unit[unit_i]);
                    unit_i += 1;
                    outer_i += 1;
                    Some(p)
                } else {
                    next_pool_pair(&mut pool_i)
                }
            }
            2 => {
                if outer_i + 1 < outer.len() {
                    let p = (outer[outer_i], outer[outer_i + 1]);
                    outer_i += 2;
                    Some(p)
                } else {
                    next_pool_pair(&mut pool_i)
                }
            }
            _ => next_pool_pair(&mut pool_i),
        };
        let Some((x, y)) = candidate else { break };
        if x == y {
            continue;
        }
        tracker.observe(margin_breakdown(space, map, pair, x, y)?);
    }

    Ok(tracker.report(tol, diagonal_margin))
}

/// Adaptive counterexample search: deterministic probes at space boundary
/// points and at breakpoint-adjacent distances, then random restarts with
/// member-preserving local perturbation descent on the margin. Returns the
/// minimal-margin pair found within `budget` margin evaluations.
///
/// With nested seeds the evaluation sequence for a smaller budget is a prefix
/// of a larger one's, so the worst margin is non-increasing in budget.
pub fn search_counterexample(
    space: &MetricSpace,
    map: &SelfMap,
    pair: &ShiftingPair,
    seed: u64,
    budget: usize,
    tol: f64,
) -> Result<ContractionReport> {
    if budget < 1 {
        return Err(Error::Param("search budget must be at least 1".into()));
    }
    let mut rng = stream_rng(seed, stream::SEARCH);
    let mut tracker = Tracker::new();

    // Phase 1: forced probes. Boundary pairs first, then pairs realizing
    // breakpoint-adjacent distances from each boundary point.
    let probes = space.probe_points();
    let mut forced: Vec<(Point, Point)> = Vec::new();
    for (i, &a) in probes.iter().enumerate() {
        for &b in probes.iter().skip(i + 1) {
            forced.push((a, b));
        }
    }
    for b in pair.breakpoints() {
        for delta in [-1e-6, 0.0, 1e-6] {
            let target = b + delta;
            if target <= 0.0 {
                continue;
            }
            for &p in &probes {
                for candidate in [p.value() + target, p.value() - target] {
                    let q = space.project(candidate);
                    if q != p {
                        forced.push((p, q));
                    }
                }
            }
        }
    }
    for (x, y) in forced {
        if tracker.samples_used >= budget {
            break;
        }
        tracker.observe(margin_breakdown(space, map, pair, x, y)?);
    }

    // Phase 2: random restarts + local descent. The candidate pool extends
    // lazily so the draw sequence does not depend on the budget.
    let mut pool: Vec<Point> = Vec::new();
    let mut pool_i = 0;
    let mut chunk = 0u64;
    let draw = |pool: &mut Vec<Point>, pool_i: &mut usize, chunk: &mut u64| -> Point {
        if *pool_i >= pool.len() {
            *chunk += 1;
            pool.extend(space.sample(derive(seed, stream::SEARCH) ^ *chunk, 256));
        }
        let p = pool[*pool_i];
        *pool_i += 1;
        p
    };

    let mut current = (
        draw(&mut pool, &mut pool_i, &mut chunk),
        draw(&mut pool, &mut pool_i, &mut chunk),
    );
    let mut current_margin = f64::INFINITY;
    if current.0 != current.1 && tracker.samples_used < budget {
        let w = margin_breakdown(space, map, pair, current.0, current.1)?;
        current_margin = w.margin();
        tracker.observe(w);
    }

    let mut idle_guard = 0usize;
    while tracker.samples_used < budget && idle_guard < 64 * budget {
        idle_guard += 1;
        if rng.random::<f64>() < 0.05 {
            current = (
                draw(&mut pool, &mut pool_i, &mut chunk),
                draw(&mut pool, &mut pool_i, &mut chunk),
            );
            if current.0 == current.1 {
                continue;
            }
            let w = margin_breakdown(space, map, pair, current.0, current.1)?;
            current_margin = w.margin();
            tracker.observe(w);
        } else {
            let scale = [0.001, 0.01, 0.1][rng.random_range(0..3)];
            let mut candidate = current;
            if rng.random::<bool>() {
                candidate.0 = space.perturb(&mut rng, candidate.0, scale);
            } else {
                candidate.1 = space.perturb(&mut rng, candidate.1, scale);
            }
            if candidate.0 == candidate.1 {
                continue;
            }
            let w = margin_breakdown(space, map, pair, candidate.0, candidate.1)?;
            tracker.observe(w);
            if w.margin() < current_margin {
                current = candidate;
                current_margin = w.margin();
            }
        }
    }

    Ok(tracker.report(tol, None))
}
