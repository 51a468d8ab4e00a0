//! Built-in named instances binding a space, a map and a pair, with expected
//! outcomes for the full check pipeline.
//!
//! Expected values are data consumed by tests and the `corpus run` command,
//! not assertions. Provenance:
//! * "paper-example" - the hybrid space, the piecewise rule (1/5)x on [0,1[
//!   and 3/125 on {1,2,3,…} encoded branch-literally (so T(1) = 3/125), and
//!   the piecewise ln pair. The expected fixed point 0 is derived: x/5 = x
//!   forces x = 0 on the fractional branch, and the integer branch maps out
//!   of the integer set, so no other fixed point exists.
//! * "ln-pair-banach-half" - halving map on \[0,1\] against the simple ln pair;
//!   ψ(d/2) = φ(d) exactly, so the inequality holds with zero slack.
//! * "banach-k" - affine contraction kx + (1−k) on \[0,2\] (fixed point 1)
//!   against the (t, k·t) pair, at k = 1/2; `banach_instance` for other k.
//! * "dc-reduction" - halving map against the pair built by altering-pair
//!   subtraction from (t, t/2); coincides pointwise with banach-k at 1/2.
//! * "negative-identity" - identity map on \[0,1\] against the ln pair: the
//!   inequality fails for every d > 0, so a witness is expected.

use serde::Serialize;

use crate::conditions::{
    check_condition_i, check_condition_ii, default_grid, ConditionReport, ShiftingPair,
};
use crate::config::{
    build_map, build_pair, build_space, ChecksSpec, Config, IntervalSpec, MapSpec, NumberSpec,
    PairSpec, PieceSpec, ReductionSpec, SolverSpec, SpaceSpec,
};
use crate::error::{Error, Result};
use crate::metric::{verify_closure, ClosureReport, MetricSpace, Point, SelfMap};
use crate::scalar_fn::ScalarFn;
use crate::solver::{picard, probe_uniqueness, SolveVerdict, TraceSummary, UniquenessReport};
use crate::verifier::{check_contraction, ContractionReport};

/// Expected pipeline outcomes for an instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Expected {
    pub fixed_point: Option<f64>,
    pub contraction_holds: bool,
    pub pair_conditions_hold: bool,
}

/// A named (space, map, pair) triple with expectations and a solve start.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub space: MetricSpace,
    pub map: SelfMap,
    pub pair: ShiftingPair,
    pub expected: Expected,
    /// Member used as x0 by the pipeline's solve stage.
    pub start: Point,
    spec: Config,
}

impl Instance {
    /// The instance as a loadable config document. Loading it back builds an
    /// equivalent space, map and pair.
    pub fn to_config(&self) -> Config {
        self.spec.clone()
    }
}

fn ln_pair_pieces() -> (Vec<PieceSpec>, Vec<PieceSpec>) {
    (
        vec![PieceSpec::new(IntervalSpec::unbounded(0.0, true), "ln((1+2*t)/2)")],
        vec![PieceSpec::new(IntervalSpec::unbounded(0.0, true), "ln((1+t)/2)")],
    )
}

fn paper_pair_spec() -> PairSpec {
    PairSpec::Explicit {
        psi: vec![
            PieceSpec::new(IntervalSpec::bounded(0.0, true, 1.0, true), "ln(1/12 + 5/12*t)"),
            PieceSpec::new(IntervalSpec::unbounded(1.0, false), "ln(1/12 + 4/12*t)"),
        ],
        phi: vec![
            PieceSpec::new(IntervalSpec::bounded(0.0, true, 1.0, true), "ln(1/12 + 3/12*t)"),
            PieceSpec::new(IntervalSpec::unbounded(1.0, false), "ln(1/12 + 2/12*t)"),
        ],
    }
}

fn paper_map_spec() -> MapSpec {
    MapSpec {
        pieces: vec![
            PieceSpec::new(IntervalSpec::bounded(0.0, true, 1.0, false), "t/5"),
            PieceSpec::new(IntervalSpec::unbounded(1.0, true), "3/125"),
        ],
        description: Some("x/5 on [0,1[, 3/125 on {1,2,3,…}".into()),
    }
}

fn unit_interval_spec() -> SpaceSpec {
    SpaceSpec::Interval {
        lo: 0.0.into(),
        hi: 1.0.into(),
    }
}

fn single_piece_map(expr: &str, description: &str, lo: f64, hi: f64) -> MapSpec {
    MapSpec {
        pieces: vec![PieceSpec::new(IntervalSpec::bounded(lo, true, hi, true), expr)],
        description: Some(description.into()),
    }
}

/// The worked example's piecewise ψ.
pub fn paper_psi() -> ScalarFn {
    match paper_pair_spec() {
        PairSpec::Explicit { psi, .. } => crate::config::build_scalar_fn(&psi).expect("valid"),
        _ => unreachable!(),
    }
}

/// The worked example's piecewise φ.
pub fn paper_phi() -> ScalarFn {
    match paper_pair_spec() {
        PairSpec::Explicit { phi, .. } => crate::config::build_scalar_fn(&phi).expect("valid"),
        _ => unreachable!(),
    }
}

/// The worked example's pair (ψ, φ).
pub fn paper_pair() -> ShiftingPair {
    build_pair(&paper_pair_spec()).expect("valid")
}

/// The worked example's map with the branch-literal encoding T(1) = 3/125.
pub fn paper_map() -> SelfMap {
    build_map(&paper_map_spec()).expect("valid")
}

fn build_instance(
    name: &str,
    space: SpaceSpec,
    map: MapSpec,
    pair: PairSpec,
    start: f64,
    expected: Expected,
) -> Result<Instance> {
    let spec = Config {
        space: Some(space),
        map: Some(map),
        pair: Some(pair),
        solver: SolverSpec {
            x0: Some(NumberSpec::Num(start)),
            ..SolverSpec::default()
        },
        checks: ChecksSpec::default(),
    };
    Ok(Instance {
        name: name.to_string(),
        space: build_space(spec.space.as_ref().expect("set"))?,
        map: build_map(spec.map.as_ref().expect("set"))?,
        pair: build_pair(spec.pair.as_ref().expect("set"))?,
        expected,
        start: Point(start),
        spec,
    })
}

/// The affine Banach family member: kx + (1−k) on \[0,2\] with fixed point 1,
/// against the (t, k·t) pair.
pub fn banach_instance(k: f64) -> Result<Instance> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Param(format!("banach constant k = {k} must lie in [0, 1)")));
    }
    build_instance(
        "banach-k",
        SpaceSpec::Interval {
            lo: 0.0.into(),
            hi: 2.0.into(),
        },
        single_piece_map(&format!("{k}*t + {}", 1.0 - k), &format!("{k}x + {}", 1.0 - k), 0.0, 2.0),
        PairSpec::Reduction(ReductionSpec::Banach { k: k.into() }),
        0.0,
        Expected {
            fixed_point: Some(1.0),
            contraction_holds: true,
            pair_conditions_hold: true,
        },
    )
}

/// Registered instance names, in registry order.
pub fn list_instances() -> Vec<&'static str> {
    vec![
        "paper-example",
        "ln-pair-banach-half",
        "banach-k",
        "dc-reduction",
        "negative-identity",
    ]
}

/// Construct a registered instance by name.
pub fn instance(name: &str) -> Result<Instance> {
    match name {
        "paper-example" => build_instance(
            name,
            SpaceSpec::Hybrid {
                n_int: crate::metric::DEFAULT_N_INT,
            },
            paper_map_spec(),
            paper_pair_spec(),
            4.0,
            Expected {
                fixed_point: Some(0.0),
                contraction_holds: true,
                pair_conditions_hold: true,
            },
        ),
        "ln-pair-banach-half" => {
            let (psi, phi) = ln_pair_pieces();
            build_instance(
                name,
                unit_interval_spec(),
                single_piece_map("t/2", "x/2", 0.0, 1.0),
                PairSpec::Explicit { psi, phi },
                1.0,
                Expected {
                    fixed_point: Some(0.0),
                    contraction_holds: true,
                    pair_conditions_hold: true,
                },
            )
        }
        "banach-k" => banach_instance(0.5),
        "dc-reduction" => build_instance(
            name,
            unit_interval_spec(),
            single_piece_map("t/2", "x/2", 0.0, 1.0),
            PairSpec::Reduction(ReductionSpec::Altering {
                psi: vec![PieceSpec::new(IntervalSpec::unbounded(0.0, true), "t")],
                phi_alt: vec![PieceSpec::new(IntervalSpec::unbounded(0.0, true), "t/2")],
            }),
            1.0,
            Expected {
                fixed_point: Some(0.0),
                contraction_holds: true,
                pair_conditions_hold: true,
            },
        ),
        "negative-identity" => {
            let (psi, phi) = ln_pair_pieces();
            build_instance(
                name,
                unit_interval_spec(),
                single_piece_map("t", "identity", 0.0, 1.0),
                PairSpec::Explicit { psi, phi },
                0.5,
                Expected {
                    fixed_point: None,
                    contraction_holds: false,
                    pair_conditions_hold: true,
                },
            )
        }
        other => Err(Error::UnknownInstance(other.to_string())),
    }
}

/// Full pipeline outcome for one instance.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceRunReport {
    pub name: String,
    pub expected: Expected,
    pub closure: ClosureReport,
    pub condition_i: ConditionReport,
    pub condition_ii: ConditionReport,
    /// Absent when the closure check already failed.
    pub contraction: Option<ContractionReport>,
    pub solve: TraceSummary,
    pub uniqueness: UniquenessReport,
    pub expectations_met: bool,
    pub mismatches: Vec<String>,
}

/// Run the whole pipeline - closure, both pair conditions, the contraction
/// check, a solve from the instance's start, and the uniqueness probe - and
/// compare the outcomes against the instance's expectations.
pub fn run_instance(
    inst: &Instance,
    checks: &ChecksSpec,
    solver: &SolverSpec,
) -> Result<InstanceRunReport> {
    let seed = checks.seed;
    let u_max = checks.effective_u_max();
    let mut mismatches: Vec<String> = Vec::new();

    let closure = verify_closure(&inst.space, &inst.map, seed, checks.n_closure);
    if !closure.pass() {
        mismatches.push(format!("closure: {} violations", closure.violations));
    }

    let condition_i = check_condition_i(
        &inst.pair,
        seed,
        checks.n_samples,
        checks.tol_eq,
        checks.tol_ord,
        u_max,
    )?;
    let grid = default_grid(&inst.pair, u_max, checks.grid_points);
    let condition_ii = check_condition_ii(&inst.pair, &grid, checks.tol)?;
    let pair_ok = condition_i.pass() && condition_ii.pass();
    if pair_ok != inst.expected.pair_conditions_hold {
        mismatches.push(format!(
            "pair conditions: expected hold = {}, got condition-i {:?} / condition-ii {:?}",
            inst.expected.pair_conditions_hold, condition_i.verdict, condition_ii.verdict
        ));
    }

    let contraction = if closure.pass() {
        let report = check_contraction(
            &inst.space,
            &inst.map,
            &inst.pair,
            seed,
            checks.n_samples,
            checks.tol,
        )?;
        if report.pass() != inst.expected.contraction_holds {
            mismatches.push(format!(
                "contraction: expected hold = {}, got {:?} with worst margin {}",
                inst.expected.contraction_holds, report.verdict, report.worst_margin
            ));
        }
        Some(report)
    } else {
        None
    };

    let trace = picard(&inst.space, &inst.map, inst.start, solver.tol_fix, solver.max_iter)?;
    let uniqueness = probe_uniqueness(
        &inst.space,
        &inst.map,
        seed,
        checks.n_starts,
        solver.tol_fix,
        checks.tol_unique,
        solver.max_iter,
    )?;

    if let Some(fp) = inst.expected.fixed_point {
        let target = Point(fp);
        if trace.verdict != SolveVerdict::Converged {
            mismatches.push(format!("solve: expected convergence, got {:?}", trace.verdict));
        } else {
            let off = inst.space.distance(trace.last(), target);
            if off > checks.tol_unique {
                mismatches.push(format!(
                    "solve: limit {} is {off} away from the expected fixed point {fp}",
                    trace.last()
                ));
            }
        }
        if !uniqueness.pass() {
            mismatches.push("uniqueness: expected a unique limit".into());
        }
        if let Some(stray) = uniqueness
            .limits
            .iter()
            .find(|&&p| inst.space.distance(p, target) > checks.tol_unique)
        {
            mismatches.push(format!(
                "uniqueness: limit {stray} is not within {} of {fp}",
                checks.tol_unique
            ));
        }
    }

    Ok(InstanceRunReport {
        name: inst.name.clone(),
        expected: inst.expected,
        closure,
        condition_i,
        condition_ii,
        contraction,
        solve: trace.summary(),
        uniqueness,
        expectations_met: mismatches.is_empty(),
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_are_stable_and_unique() {
        let names = list_instances();
        assert!(names.contains(&"paper-example"));
        let mut sorted = names.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
        assert_eq!(names, list_instances());
        for name in names {
            assert_eq!(instance(name).unwrap().name, name);
        }
    }

    #[test]
    fn unknown_instance_errors() {
        assert!(matches!(
            instance("no-such-name"),
            Err(Error::UnknownInstance(_))
        ));
    }

    #[test]
    fn expected_values_as_declared() {
        assert_eq!(instance("paper-example").unwrap().expected.fixed_point, Some(0.0));
        assert!(!instance("negative-identity").unwrap().expected.contraction_holds);
        // k = 0 gives the constant map; the fixed point is the constant.
        let degenerate = banach_instance(0.0).unwrap();
        assert_eq!(degenerate.map.apply_raw(1.7).unwrap(), 1.0);
        assert_eq!(degenerate.expected.fixed_point, Some(1.0));
        assert!(banach_instance(1.0).is_err());
    }

    #[test]
    fn dc_reduction_pair_matches_banach_half() {
        let dc = instance("dc-reduction").unwrap();
        let banach = banach_instance(0.5).unwrap();
        for i in 0..=10_000 {
            let t = i as f64 * 0.0101;
            let a = dc.pair.phi.eval(t).unwrap();
            let b = banach.pair.phi.eval(t).unwrap();
            assert!((a - b).abs() < 1e-12, "t = {t}: {a} vs {b}");
            assert_eq!(dc.pair.psi.eval(t).unwrap(), banach.pair.psi.eval(t).unwrap());
        }
    }

    #[test]
    fn export_and_reload_preserves_behavior() {
        for name in list_instances() {
            let inst = instance(name).unwrap();
            let json = inst.to_config().to_json();
            let config = Config::from_json(&json).unwrap();
            let space = config.require_space().unwrap();
            let map = config.require_map().unwrap();
            let pair = config.require_pair().unwrap();
            let points = inst.space.sample(3, 50);
            assert_eq!(space.sample(3, 50), points, "{name}: sampler changed");
            for w in points.windows(2) {
                assert_eq!(
                    space.distance(w[0], w[1]).to_bits(),
                    inst.space.distance(w[0], w[1]).to_bits(),
                    "{name}: distance changed"
                );
                assert_eq!(
                    map.apply_raw(w[0].value()).unwrap().to_bits(),
                    inst.map.apply_raw(w[0].value()).unwrap().to_bits(),
                    "{name}: map changed"
                );
                let d = space.distance(w[0], w[1]);
                assert_eq!(
                    pair.psi.eval(d).unwrap().to_bits(),
                    inst.pair.psi.eval(d).unwrap().to_bits(),
                    "{name}: psi changed"
                );
                assert_eq!(
                    pair.phi.eval(d).unwrap().to_bits(),
                    inst.pair.phi.eval(d).unwrap().to_bits(),
                    "{name}: phi changed"
                );
            }
        }
    }

    #[test]
    fn every_instance_meets_its_expectations() {
        // Smaller budgets than the defaults keep this unit-level; the
        // acceptance suite runs the full sizes.
        let checks = ChecksSpec {
            n_samples: 20_000,
            n_closure: 2_000,
            grid_points: 2_000,
            ..ChecksSpec::default()
        };
        let solver = SolverSpec::default();
        for name in list_instances() {
            let inst = instance(name).unwrap();
            let report = run_instance(&inst, &checks, &solver).unwrap();
            assert!(
                report.expectations_met,
                "{name}: {:?}",
                report.mismatches
            );
        }
    }
}
