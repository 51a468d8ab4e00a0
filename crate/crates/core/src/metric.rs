//! Metric spaces over real points, self-maps, and sampled axiom checks.
//!
//! Built-in spaces:
//! * [`interval_space`] - \[lo, hi\] with d(x,y) = |x−y|.
//! * [`hybrid_space`] - \[0,1\] ∪ {2,3,4,…} with the three-branch metric
//!   d(x,y) = |x−y| when both lie in \[0,1\], x+y when either lies outside,
//!   and 0 when x = y. Completeness is asserted by construction.
//! * [`finite_space`] - a finite point set under |x−y|.
//!
//! A space also carries `probe_points` (boundary and seam members used for
//! deterministic probing) and a perturbation rule used by the counterexample
//! search: fractional points take Gaussian steps clipped to the unit
//! interval, integer points take ±1 steps clipped to \[2, N_int\].

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, stream};
use crate::scalar_fn::{validate_partition, Expr, Interval, Piece};

/// A point of a metric space. All built-in spaces embed in the reals.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub f64);

impl Point {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

type MembershipFn = dyn Fn(f64) -> bool + Send + Sync;
type DistanceFn = dyn Fn(f64, f64) -> f64 + Send + Sync;
type SamplerFn = dyn Fn(u64, usize) -> Vec<Point> + Send + Sync;
type ProjectFn = dyn Fn(f64) -> f64 + Send + Sync;
type PerturbFn = dyn Fn(&mut ChaCha8Rng, f64, f64) -> f64 + Send + Sync;

/// Point domain + distance + deterministic sampler.
///
/// Immutable after construction; all operations are pure; the sampler owns no
/// state beyond the explicit seed, so concurrent use needs no coordination.
#[derive(Clone)]
pub struct MetricSpace {
    membership: Arc<MembershipFn>,
    distance: Arc<DistanceFn>,
    sampler: Arc<SamplerFn>,
    project: Arc<ProjectFn>,
    perturb: Arc<PerturbFn>,
    probe_points: Vec<f64>,
    description: String,
}

impl fmt::Debug for MetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricSpace")
            .field("description", &self.description)
            .field("probe_points", &self.probe_points)
            .finish()
    }
}

impl MetricSpace {
    /// Fully custom space. `probe_points` must be members.
    pub fn custom(
        membership: impl Fn(f64) -> bool + Send + Sync + 'static,
        distance: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        sampler: impl Fn(u64, usize) -> Vec<Point> + Send + Sync + 'static,
        project: impl Fn(f64) -> f64 + Send + Sync + 'static,
        perturb: impl Fn(&mut ChaCha8Rng, f64, f64) -> f64 + Send + Sync + 'static,
        probe_points: Vec<f64>,
        description: impl Into<String>,
    ) -> MetricSpace {
        MetricSpace {
            membership: Arc::new(membership),
            distance: Arc::new(distance),
            sampler: Arc::new(sampler),
            project: Arc::new(project),
            perturb: Arc::new(perturb),
            probe_points,
            description: description.into(),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.membership)(x)
    }

    pub fn member(&self, x: f64) -> Result<Point> {
        if self.contains(x) {
            Ok(Point(x))
        } else {
            Err(Error::NotAMember {
                x,
                space: self.description.clone(),
            })
        }
    }

    pub fn distance(&self, x: Point, y: Point) -> f64 {
        (self.distance)(x.0, y.0)
    }

    /// Deterministic: the same seed yields the identical point sequence.
    pub fn sample(&self, seed: u64, count: usize) -> Vec<Point> {
        (self.sampler)(seed, count)
    }

    /// Nearest member to an arbitrary real.
    pub fn project(&self, x: f64) -> Point {
        Point((self.project)(x))
    }

    /// One member-preserving random step of the given scale away from `x`.
    pub fn perturb(&self, rng: &mut ChaCha8Rng, x: Point, scale: f64) -> Point {
        Point((self.perturb)(rng, x.0, scale))
    }

    /// Boundary / seam members worth probing deterministically.
    pub fn probe_points(&self) -> Vec<Point> {
        self.probe_points.iter().copied().map(Point).collect()
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; two uniforms per draw keeps consumption fixed.
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// \[lo, hi\] under |x−y| with a uniform sampler.
pub fn interval_space(lo: f64, hi: f64) -> Result<MetricSpace> {
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::InvalidBounds { lo, hi });
    }
    let sampler = move |seed: u64, count: usize| -> Vec<Point> {
        let mut rng = stream_rng(seed, stream::SAMPLER);
        (0..count)
            .map(|_| Point(rng.random_range(lo..hi)))
            .collect()
    };
    Ok(MetricSpace::custom(
        move |x| (lo..=hi).contains(&x),
        |x, y| (x - y).abs(),
        sampler,
        move |x| x.clamp(lo, hi),
        move |rng, x, scale| (x + gaussian(rng) * scale * (hi - lo)).clamp(lo, hi),
        vec![lo, (lo + hi) / 2.0, hi],
        format!("interval [{lo}, {hi}]"),
    ))
}

/// Default cap for the hybrid space's integer sampler.
pub const DEFAULT_N_INT: u32 = 50;

/// Integer-membership tolerance: floating-point images of exact integers
/// must re-enter the space.
const INT_SNAP_TOL: f64 = 1e-9;

fn hybrid_snap(x: f64) -> f64 {
    let r = x.round();
    if r >= 2.0 && (x - r).abs() <= INT_SNAP_TOL {
        r
    } else {
        x
    }
}

fn hybrid_member(x: f64) -> bool {
    (0.0..=1.0).contains(&x) || {
        let r = x.round();
        r >= 2.0 && (x - r).abs() <= INT_SNAP_TOL
    }
}

fn hybrid_distance(x: f64, y: f64) -> f64 {
    let x = hybrid_snap(x);
    let y = hybrid_snap(y);
    if x == y {
        0.0
    } else if (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y) {
        (x - y).abs()
    } else {
        x + y
    }
}

/// The hybrid example space X = \[0,1\] ∪ {2,3,4,…} with the sampler capped at
/// `n_int`. Membership of integers is uncapped; only sampling is.
pub fn hybrid_space_with(n_int: u32) -> MetricSpace {
    let n_int = n_int.max(2);
    let top = f64::from(n_int);
    let sampler = move |seed: u64, count: usize| -> Vec<Point> {
        let mut rng = stream_rng(seed, stream::SAMPLER);
        (0..count)
            .map(|_| {
                if rng.random::<bool>() {
                    Point(rng.random_range(0.0..1.0))
                } else {
                    Point(f64::from(rng.random_range(2..=n_int)))
                }
            })
            .collect()
    };
    let project = move |x: f64| -> f64 {
        if x <= 1.0 {
            x.clamp(0.0, 1.0)
        } else {
            // Nearest of 1.0 and the clamped integers; ties go down.
            let int = x.round().clamp(2.0, top);
            if (x - 1.0).abs() <= (x - int).abs() {
                1.0
            } else {
                int
            }
        }
    };
    let perturb = move |rng: &mut ChaCha8Rng, x: f64, scale: f64| -> f64 {
        if (0.0..=1.0).contains(&x) {
            (x + gaussian(rng) * scale).clamp(0.0, 1.0)
        } else {
            let step = if rng.random::<bool>() { 1.0 } else { -1.0 };
            (x + step).clamp(2.0, top)
        }
    };
    MetricSpace::custom(
        hybrid_member,
        hybrid_distance,
        sampler,
        project,
        perturb,
        vec![0.0, 0.5, 1.0, 2.0, 3.0, top],
        format!("hybrid space [0,1] ∪ {{2,3,…}} (sampler capped at {n_int})"),
    )
}

/// [`hybrid_space_with`] at the default integer cap.
pub fn hybrid_space() -> MetricSpace {
    hybrid_space_with(DEFAULT_N_INT)
}

/// Finite point set under |x−y|; the sampler draws uniformly from the set.
pub fn finite_space(mut points: Vec<f64>) -> Result<MetricSpace> {
    if points.is_empty() || points.iter().any(|p| !p.is_finite()) {
        return Err(Error::Config("finite space needs finite, nonempty points".into()));
    }
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
    points.dedup();
    let members = Arc::new(points);
    let m1 = Arc::clone(&members);
    let m2 = Arc::clone(&members);
    let m3 = Arc::clone(&members);
    let m4 = Arc::clone(&members);
    let sampler = move |seed: u64, count: usize| -> Vec<Point> {
        let mut rng = stream_rng(seed, stream::SAMPLER);
        (0..count)
            .map(|_| Point(m1[rng.random_range(0..m1.len())]))
            .collect()
    };
    let nearest = move |set: &[f64], x: f64| -> f64 {
        *set.iter()
            .min_by(|a, b| {
                ((*a - x).abs(), **a)
                    .partial_cmp(&((*b - x).abs(), **b))
                    .expect("finite")
            })
            .expect("nonempty")
    };
    let nearest2 = nearest;
    Ok(MetricSpace::custom(
        move |x| m2.contains(&x),
        |x, y| (x - y).abs(),
        sampler,
        move |x| nearest(&m3, x),
        move |rng, x, scale| {
            let _ = scale;
            let jump = if rng.random::<bool>() { 1 } else { -1 };
            let idx = m4.iter().position(|&p| p == nearest2(&m4, x)).expect("member");
            let idx = (idx as i64 + jump).clamp(0, m4.len() as i64 - 1) as usize;
            m4[idx]
        },
        members.to_vec(),
        "finite point set",
    ))
}

// --- self-maps -------------------------------------------------------------

/// Total piecewise map on a space's members.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfMap {
    pieces: Vec<Piece>,
    description: String,
}

impl SelfMap {
    /// Pieces must be declared ascending and contiguous; they need not start
    /// at 0 or reach +inf, but must cover every member of the intended space
    /// (checked dynamically and by [`verify_closure`]).
    pub fn new(pieces: Vec<Piece>, description: impl Into<String>) -> Result<SelfMap> {
        validate_partition(&pieces, None, false)?;
        Ok(SelfMap {
            pieces,
            description: description.into(),
        })
    }

    /// Single-rule map from an expression in `t`.
    pub fn from_expr(expr: Expr, description: impl Into<String>) -> SelfMap {
        SelfMap {
            pieces: vec![Piece::new(
                Interval {
                    lo: f64::MIN,
                    lo_closed: true,
                    hi: None,
                    hi_closed: false,
                },
                expr,
            )],
            description: description.into(),
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// The raw piecewise rule, with no membership checks.
    pub fn apply_raw(&self, x: f64) -> Result<f64> {
        let piece = self
            .pieces
            .iter()
            .find(|p| p.interval.contains(x))
            .ok_or(Error::MapNotTotal(x))?;
        piece.expr.eval(x)
    }

    /// Image of a member under the map, with membership checked on both ends.
    pub fn apply(&self, space: &MetricSpace, x: Point) -> Result<Point> {
        if !space.contains(x.0) {
            return Err(Error::NotAMember {
                x: x.0,
                space: space.description().to_string(),
            });
        }
        let image = self.apply_raw(x.0)?;
        if !space.contains(image) {
            return Err(Error::ClosureViolation {
                x: x.0,
                image,
                space: space.description().to_string(),
            });
        }
        Ok(Point(image))
    }
}

impl fmt::Display for SelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.description)
    }
}

// --- sampled axiom checks ---------------------------------------------------

/// Result of one sampled axiom clause: violation count and the worst case.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomCheck {
    pub violations: usize,
    /// Most negative slack seen (≥ 0 means the clause held on every sample).
    pub worst_slack: f64,
    pub witness: Vec<f64>,
}

impl AxiomCheck {
    fn new() -> AxiomCheck {
        AxiomCheck {
            violations: 0,
            worst_slack: f64::INFINITY,
            witness: Vec::new(),
        }
    }

    fn record(&mut self, slack: f64, witness: &[f64], tol: f64) {
        if slack < -tol {
            self.violations += 1;
        }
        if slack < self.worst_slack {
            self.worst_slack = slack;
            self.witness = witness.to_vec();
        }
    }

    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

/// Sampled metric-axiom report: identity of indiscernibles, symmetry and the
/// triangle inequality, each with the worst witnessing points.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub identity: AxiomCheck,
    pub symmetry: AxiomCheck,
    pub triangle: AxiomCheck,
    pub samples_used: usize,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.identity.pass() && self.symmetry.pass() && self.triangle.pass()
    }
}

/// Sample pairs and triples (plus the deterministic probe points) and report
/// d(x,x) ≤ tol, |d(x,y) − d(y,x)| ≤ tol and d(x,z) ≤ d(x,y) + d(y,z) + tol.
/// Violations are report content, not errors.
pub fn check_metric_axioms(
    space: &MetricSpace,
    seed: u64,
    n_pairs: usize,
    n_triples: usize,
    tol: f64,
) -> AxiomReport {
    let mut identity = AxiomCheck::new();
    let mut symmetry = AxiomCheck::new();
    let mut triangle = AxiomCheck::new();
    let mut samples_used = 0;

    let probes = space.probe_points();
    let pool = space.sample(
        crate::rng::derive(seed, stream::AXIOMS),
        n_pairs.max(n_triples) + 2,
    );

    let mut points: Vec<Point> = probes.clone();
    points.extend(pool.iter().copied());

    for &x in &points {
        identity.record(-space.distance(x, x).abs(), &[x.0], tol);
        samples_used += 1;
    }

    // Deterministic probe pairs/triples first, then the sampled ones.
    let mut pair_list: Vec<(Point, Point)> = Vec::new();
    for (i, &x) in probes.iter().enumerate() {
        for &y in probes.iter().skip(i + 1) {
            pair_list.push((x, y));
        }
    }
    for w in pool.windows(2).take(n_pairs) {
        pair_list.push((w[0], w[1]));
    }
    for (x, y) in pair_list {
        let dxy = space.distance(x, y);
        let dyx = space.distance(y, x);
        symmetry.record(-(dxy - dyx).abs(), &[x.0, y.0], tol);
        samples_used += 1;
    }

    let mut triple_list: Vec<(Point, Point, Point)> = Vec::new();
    for &x in &probes {
        for &y in &probes {
            for &z in &probes {
                triple_list.push((x, y, z));
            }
        }
    }
    for w in pool.windows(3).take(n_triples) {
        triple_list.push((w[0], w[1], w[2]));
    }
    for (x, y, z) in triple_list {
        let slack = space.distance(x, y) + space.distance(y, z) - space.distance(x, z);
        triangle.record(slack, &[x.0, y.0, z.0], tol);
        samples_used += 1;
    }

    AxiomReport {
        identity,
        symmetry,
        triangle,
        samples_used,
    }
}

/// Closure check: membership of the image of n sampled members.
#[derive(Debug, Clone, Serialize)]
pub struct ClosureReport {
    pub violations: usize,
    pub samples_used: usize,
    /// Up to 8 witnessing (x, image) pairs.
    pub witnesses: Vec<(f64, f64)>,
}

impl ClosureReport {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

/// Check membership(T x) for n sampled members plus the probe points.
pub fn verify_closure(space: &MetricSpace, map: &SelfMap, seed: u64, n: usize) -> ClosureReport {
    let mut report = ClosureReport {
        violations: 0,
        samples_used: 0,
        witnesses: Vec::new(),
    };
    let mut points = space.probe_points();
    points.extend(space.sample(crate::rng::derive(seed, stream::CLOSURE), n));
    for x in points {
        report.samples_used += 1;
        let bad = match map.apply_raw(x.0) {
            Ok(image) => {
                if space.contains(image) {
                    None
                } else {
                    Some(image)
                }
            }
            Err(_) => Some(f64::NAN),
        };
        if let Some(image) = bad {
            report.violations += 1;
            if report.witnesses.len() < 8 {
                report.witnesses.push((x.0, image));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_fn::parse_expr;

    pub(crate) fn paper_map() -> SelfMap {
        SelfMap::new(
            vec![
                Piece::new(Interval::bounded(0.0, true, 1.0, false), parse_expr("t/5").unwrap()),
                Piece::new(Interval::unbounded(1.0, true), parse_expr("3/125").unwrap()),
            ],
            "T: x/5 on [0,1), 3/125 on {1,2,3,…}",
        )
        .unwrap()
    }

    #[test]
    fn hybrid_distance_branches() {
        let x = hybrid_space();
        assert!((x.distance(Point(0.2), Point(0.7)) - 0.5).abs() < 1e-12);
        assert!((x.distance(Point(4.0), Point(3.0 / 125.0)) - 4.024).abs() < 1e-12);
        assert_eq!(x.distance(Point(3.0), Point(3.0)), 0.0);
    }

    #[test]
    fn hybrid_snaps_near_integers() {
        let x = hybrid_space();
        assert!(x.contains(3.0000000001));
        assert_eq!(x.distance(Point(3.0000000001), Point(3.0)), 0.0);
        assert!(!x.contains(1.5));
        assert!(!x.contains(3.001));
    }

    #[test]
    fn hybrid_integer_pairs_dominate_absolute_difference() {
        let x = hybrid_space();
        let pts = x.sample(7, 2000);
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a.0 > 1.0 && b.0 > 1.0 && a.0 != b.0 {
                assert!(x.distance(a, b) > (a.0 - b.0).abs());
            }
        }
    }

    #[test]
    fn interval_space_basics() {
        let s = interval_space(0.0, 1.0).unwrap();
        assert_eq!(s.distance(Point(0.0), Point(1.0)), 1.0);
        assert_eq!(s.distance(Point(0.5), Point(0.5)), 0.0);
        let s = interval_space(-2.0, 3.0).unwrap();
        assert!(!s.contains(3.5));
        assert!(interval_space(1.0, 1.0).is_err());
        assert!(interval_space(2.0, 1.0).is_err());
    }

    #[test]
    fn samplers_are_deterministic_and_members() {
        for space in [hybrid_space(), interval_space(-1.0, 4.0).unwrap()] {
            let a = space.sample(99, 500);
            let b = space.sample(99, 500);
            assert_eq!(a, b);
            assert!(a.iter().all(|p| space.contains(p.0)));
            let c = space.sample(100, 500);
            assert_ne!(a, c);
        }
    }

    #[test]
    fn axioms_hold_on_builtin_spaces() {
        for space in [
            hybrid_space(),
            interval_space(0.0, 1.0).unwrap(),
            finite_space(vec![0.0, 0.25, 1.0, 4.0]).unwrap(),
        ] {
            let report = check_metric_axioms(&space, 5, 10_000, 10_000, 1e-12);
            assert!(report.pass(), "violations in {}", space.description());
        }
    }

    #[test]
    fn squared_difference_breaks_triangle_with_canonical_witness() {
        let broken = MetricSpace::custom(
            |x| (0.0..=2.0).contains(&x),
            |x, y| (x - y) * (x - y),
            |seed, count| {
                let mut rng = stream_rng(seed, stream::SAMPLER);
                (0..count).map(|_| Point(rng.random_range(0.0..2.0))).collect()
            },
            |x| x.clamp(0.0, 2.0),
            |rng, x, scale| (x + gaussian(rng) * scale).clamp(0.0, 2.0),
            vec![0.0, 1.0, 2.0],
            "broken: squared difference on [0,2]",
        );
        let report = check_metric_axioms(&broken, 5, 1000, 1000, 1e-12);
        assert!(!report.triangle.pass());
        // The worst violation over the probe grid is the canonical triple.
        assert_eq!(report.triangle.witness, vec![0.0, 1.0, 2.0]);
        assert!((report.triangle.worst_slack - (1.0 + 1.0 - 4.0)).abs() < 1e-9);
    }

    #[test]
    fn paper_map_images() {
        let space = hybrid_space();
        let t = paper_map();
        assert!((t.apply(&space, Point(0.5)).unwrap().0 - 0.1).abs() < 1e-15);
        assert!((t.apply(&space, Point(7.0)).unwrap().0 - 0.024).abs() < 1e-15);
        assert_eq!(t.apply(&space, Point(0.0)).unwrap().0, 0.0);
        // Eq-literal encoding: x = 1 belongs to the integer branch.
        assert!((t.apply(&space, Point(1.0)).unwrap().0 - 0.024).abs() < 1e-15);
    }

    #[test]
    fn apply_rejects_non_members() {
        let space = hybrid_space();
        let t = paper_map();
        assert!(matches!(
            t.apply(&space, Point(1.5)),
            Err(Error::NotAMember { .. })
        ));
    }

    #[test]
    fn closure_of_paper_map_holds() {
        let report = verify_closure(&hybrid_space(), &paper_map(), 2, 10_000);
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn closure_detects_escape() {
        let space = interval_space(0.0, 1.0).unwrap();
        let shift = SelfMap::from_expr(parse_expr("t + 1").unwrap(), "x+1");
        let report = verify_closure(&space, &shift, 2, 1000);
        assert!(report.violations > 0);
        let (x, image) = report.witnesses[0];
        assert!((image - (x + 1.0)).abs() < 1e-15);

        let ident = SelfMap::from_expr(Expr::Var, "identity");
        assert_eq!(verify_closure(&space, &ident, 2, 1000).violations, 0);
    }

    #[test]
    fn finite_space_members_and_projection() {
        let s = finite_space(vec![0.0, 1.0, 2.5]).unwrap();
        assert!(s.contains(2.5));
        assert!(!s.contains(2.0));
        assert_eq!(s.project(2.1).0, 2.5);
        assert_eq!(s.project(-3.0).0, 0.0);
    }
}
