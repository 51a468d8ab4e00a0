//! JSON configuration schema shared by the CLI and the instance corpus.
//!
//! Numbers anywhere in a config may be written as JSON numbers or as strings
//! holding constant expressions like `"3/125"`, so the worked examples'
//! rational constants survive without decimal truncation. They evaluate in
//! double precision; exactness is not promised.
//!
//! Intervals carry explicit endpoint openness and `"+inf"` for an unbounded
//! upper end. The loader rejects ambiguous coverage instead of resolving it.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::conditions::{from_altering_pair, from_banach, from_khan, ShiftingPair};
use crate::error::{Error, Result};
use crate::metric::{finite_space, hybrid_space_with, interval_space, MetricSpace, SelfMap};
use crate::scalar_fn::{parse_expr, Interval, Piece, ScalarFn};

/// A number, or a string holding a constant expression ("3/125").
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberSpec {
    Num(f64),
    Text(String),
}

impl NumberSpec {
    pub fn resolve(&self) -> Result<f64> {
        match self {
            NumberSpec::Num(v) => {
                if v.is_finite() {
                    Ok(*v)
                } else {
                    Err(Error::Config(format!("number {v} is not finite")))
                }
            }
            NumberSpec::Text(s) => {
                let expr = parse_expr(s)?;
                if expr.references_var() {
                    return Err(Error::Config(format!(
                        "`{s}`: expected a constant, found the variable t"
                    )));
                }
                expr.eval(0.0)
            }
        }
    }
}

impl From<f64> for NumberSpec {
    fn from(v: f64) -> NumberSpec {
        NumberSpec::Num(v)
    }
}

/// Upper interval endpoint: a number, a constant expression, or `"+inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundSpec {
    Num(f64),
    Text(String),
}

impl BoundSpec {
    /// `None` means +inf.
    pub fn resolve(&self) -> Result<Option<f64>> {
        match self {
            BoundSpec::Num(v) => NumberSpec::Num(*v).resolve().map(Some),
            BoundSpec::Text(s) if s == "+inf" => Ok(None),
            BoundSpec::Text(s) => NumberSpec::Text(s.clone()).resolve().map(Some),
        }
    }

    pub fn inf() -> BoundSpec {
        BoundSpec::Text("+inf".into())
    }
}

/// Interval with explicit openness on both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub lo: NumberSpec,
    pub lo_closed: bool,
    pub hi: BoundSpec,
    pub hi_closed: bool,
}

impl IntervalSpec {
    pub fn build(&self) -> Result<Interval> {
        let lo = self.lo.resolve()?;
        let hi = self.hi.resolve()?;
        if hi.is_none() && self.hi_closed {
            return Err(Error::Config("an interval cannot be closed at +inf".into()));
        }
        Ok(Interval {
            lo,
            lo_closed: self.lo_closed,
            hi,
            hi_closed: self.hi_closed,
        })
    }

    pub fn bounded(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> IntervalSpec {
        IntervalSpec {
            lo: lo.into(),
            lo_closed,
            hi: BoundSpec::Num(hi),
            hi_closed,
        }
    }

    pub fn unbounded(lo: f64, lo_closed: bool) -> IntervalSpec {
        IntervalSpec {
            lo: lo.into(),
            lo_closed,
            hi: BoundSpec::inf(),
            hi_closed: false,
        }
    }
}

/// One (interval, expression) piece of a piecewise declaration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceSpec {
    pub interval: IntervalSpec,
    pub expr: String,
}

impl PieceSpec {
    pub fn new(interval: IntervalSpec, expr: impl Into<String>) -> PieceSpec {
        PieceSpec {
            interval,
            expr: expr.into(),
        }
    }

    pub fn build(&self) -> Result<Piece> {
        Ok(Piece::new(self.interval.build()?, parse_expr(&self.expr)?))
    }
}

/// Build a function on [0, +inf) from declared pieces.
pub fn build_scalar_fn(pieces: &[PieceSpec]) -> Result<ScalarFn> {
    ScalarFn::new(pieces.iter().map(PieceSpec::build).collect::<Result<_>>()?)
}

/// Space declaration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    Interval { lo: NumberSpec, hi: NumberSpec },
    Hybrid {
        #[serde(default = "default_n_int")]
        n_int: u32,
    },
    Finite { points: Vec<NumberSpec> },
}

fn default_n_int() -> u32 {
    crate::metric::DEFAULT_N_INT
}

pub fn build_space(spec: &SpaceSpec) -> Result<MetricSpace> {
    match spec {
        SpaceSpec::Interval { lo, hi } => interval_space(lo.resolve()?, hi.resolve()?),
        SpaceSpec::Hybrid { n_int } => Ok(hybrid_space_with(*n_int)),
        SpaceSpec::Finite { points } => {
            finite_space(points.iter().map(NumberSpec::resolve).collect::<Result<_>>()?)
        }
    }
}

/// Self-map declaration: a piecewise rule over the space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub pieces: Vec<PieceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

pub fn build_map(spec: &MapSpec) -> Result<SelfMap> {
    SelfMap::new(
        spec.pieces.iter().map(PieceSpec::build).collect::<Result<_>>()?,
        spec.description.clone().unwrap_or_else(|| "piecewise map".into()),
    )
}

/// Classical-hypothesis reductions to a shifting pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reduction", rename_all = "snake_case")]
pub enum ReductionSpec {
    Banach { k: NumberSpec },
    Khan { psi: Vec<PieceSpec>, c: NumberSpec },
    Altering { psi: Vec<PieceSpec>, phi_alt: Vec<PieceSpec> },
}

/// Pair declaration: explicit (ψ, φ) pieces or a named reduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairSpec {
    Reduction(ReductionSpec),
    Explicit { psi: Vec<PieceSpec>, phi: Vec<PieceSpec> },
}

pub fn build_pair(spec: &PairSpec) -> Result<ShiftingPair> {
    match spec {
        PairSpec::Explicit { psi, phi } => Ok(ShiftingPair::new(
            build_scalar_fn(psi)?,
            build_scalar_fn(phi)?,
        )),
        PairSpec::Reduction(ReductionSpec::Banach { k }) => from_banach(k.resolve()?),
        PairSpec::Reduction(ReductionSpec::Khan { psi, c }) => {
            from_khan(build_scalar_fn(psi)?, c.resolve()?)
        }
        PairSpec::Reduction(ReductionSpec::Altering { psi, phi_alt }) => {
            from_altering_pair(build_scalar_fn(psi)?, build_scalar_fn(phi_alt)?)
        }
    }
}

fn default_tol_fix() -> f64 {
    1e-12
}

fn default_max_iter() -> usize {
    10_000
}

/// Solver parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<NumberSpec>,
    #[serde(default = "default_tol_fix")]
    pub tol_fix: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

impl Default for SolverSpec {
    fn default() -> SolverSpec {
        SolverSpec {
            x0: None,
            tol_fix: default_tol_fix(),
            max_iter: default_max_iter(),
        }
    }
}

fn default_seed() -> u64 {
    0
}
fn default_n_samples() -> usize {
    100_000
}
fn default_n_closure() -> usize {
    10_000
}
fn default_grid_points() -> usize {
    10_000
}
fn default_tol() -> f64 {
    crate::conditions::DEFAULT_TOL
}
fn default_budget() -> usize {
    100_000
}
fn default_n_starts() -> usize {
    10
}

/// Check parameters. Every randomized check derives its own stream from the
/// single `seed`; a config without one gets the fixed default 0, so there is
/// never implicit entropy. Resolved values are echoed in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChecksSpec {
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Sample count for condition (i) and the contraction check.
    #[serde(default = "default_n_samples")]
    pub n_samples: usize,
    /// Sample count for the closure check.
    #[serde(default = "default_n_closure")]
    pub n_closure: usize,
    /// Uniform point count of the condition-(ii) grid.
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_tol")]
    pub tol_eq: f64,
    #[serde(default = "default_tol")]
    pub tol_ord: f64,
    /// Integer cap assumed when deriving the default sampling range.
    #[serde(default = "default_n_int")]
    pub n_int: u32,
    /// Top of the (u, v) and grid ranges; default 2·n_int + 1 covers every
    /// distance the hybrid sampler can realize.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_max: Option<f64>,
    /// Margin evaluations for the counterexample search.
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_n_starts")]
    pub n_starts: usize,
    #[serde(default = "default_tol")]
    pub tol_unique: f64,
}

impl Default for ChecksSpec {
    fn default() -> ChecksSpec {
        ChecksSpec {
            seed: default_seed(),
            n_samples: default_n_samples(),
            n_closure: default_n_closure(),
            grid_points: default_grid_points(),
            tol: default_tol(),
            tol_eq: default_tol(),
            tol_ord: default_tol(),
            n_int: default_n_int(),
            u_max: None,
            budget: default_budget(),
            n_starts: default_n_starts(),
            tol_unique: default_tol(),
        }
    }
}

impl ChecksSpec {
    pub fn effective_u_max(&self) -> f64 {
        self.u_max.unwrap_or(2.0 * f64::from(self.n_int) + 1.0)
    }
}

/// Top-level config document.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Config {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairSpec>,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub checks: ChecksSpec,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Config> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Config> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Config::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn require_space(&self) -> Result<MetricSpace> {
        let spec = self
            .space
            .as_ref()
            .ok_or_else(|| Error::Config("config needs a `space` section".into()))?;
        build_space(spec)
    }

    pub fn require_map(&self) -> Result<SelfMap> {
        let spec = self
            .map
            .as_ref()
            .ok_or_else(|| Error::Config("config needs a `map` section".into()))?;
        build_map(spec)
    }

    pub fn require_pair(&self) -> Result<ShiftingPair> {
        let spec = self
            .pair
            .as_ref()
            .ok_or_else(|| Error::Config("config needs a `pair` section".into()))?;
        build_pair(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings_resolve() {
        assert_eq!(NumberSpec::Text("3/125".into()).resolve().unwrap(), 0.024);
        assert_eq!(NumberSpec::Num(4.0).resolve().unwrap(), 4.0);
        assert!(NumberSpec::Text("2*t".into()).resolve().is_err());
        assert!(NumberSpec::Num(f64::INFINITY).resolve().is_err());
    }

    #[test]
    fn full_document_round_trips() {
        let text = r#"{
            "space": {"kind": "hybrid", "n_int": 50},
            "map": {"pieces": [
                {"interval": {"lo": 0, "lo_closed": true, "hi": 1, "hi_closed": false}, "expr": "t/5"},
                {"interval": {"lo": 1, "lo_closed": true, "hi": "+inf", "hi_closed": false}, "expr": "3/125"}
            ]},
            "pair": {
                "psi": [
                    {"interval": {"lo": 0, "lo_closed": true, "hi": 1, "hi_closed": true}, "expr": "ln(1/12 + 5/12*t)"},
                    {"interval": {"lo": 1, "lo_closed": false, "hi": "+inf", "hi_closed": false}, "expr": "ln(1/12 + 4/12*t)"}
                ],
                "phi": [
                    {"interval": {"lo": 0, "lo_closed": true, "hi": 1, "hi_closed": true}, "expr": "ln(1/12 + 3/12*t)"},
                    {"interval": {"lo": 1, "lo_closed": false, "hi": "+inf", "hi_closed": false}, "expr": "ln(1/12 + 2/12*t)"}
                ]
            },
            "solver": {"x0": "4", "tol_fix": 1e-12},
            "checks": {"seed": 42}
        }"#;
        let config = Config::from_json(text).unwrap();
        let space = config.require_space().unwrap();
        assert!(space.contains(0.5) && space.contains(7.0) && !space.contains(1.5));
        let map = config.require_map().unwrap();
        assert_eq!(map.apply_raw(7.0).unwrap(), 0.024);
        let pair = config.require_pair().unwrap();
        assert!(pair.psi.breakpoints() == [1.0]);
        assert_eq!(config.solver.x0.as_ref().unwrap().resolve().unwrap(), 4.0);
        assert_eq!(config.checks.seed, 42);
        // Defaults applied where omitted.
        assert_eq!(config.solver.max_iter, 10_000);
        assert_eq!(config.checks.n_samples, 100_000);
        assert_eq!(config.checks.effective_u_max(), 101.0);

        // Export and reload: behavior is preserved.
        let reloaded = Config::from_json(&config.to_json()).unwrap();
        assert_eq!(reloaded, config);
    }

    #[test]
    fn reduction_pairs_parse() {
        let config =
            Config::from_json(r#"{"pair": {"reduction": "banach", "k": 0.5}}"#).unwrap();
        let pair = config.require_pair().unwrap();
        assert_eq!(pair.phi.eval(2.0).unwrap(), 1.0);

        let config = Config::from_json(
            r#"{"pair": {"reduction": "altering",
                 "psi": [{"interval": {"lo": 0, "lo_closed": true, "hi": "+inf", "hi_closed": false}, "expr": "t"}],
                 "phi_alt": [{"interval": {"lo": 0, "lo_closed": true, "hi": "+inf", "hi_closed": false}, "expr": "t/2"}]}}"#,
        )
        .unwrap();
        let pair = config.require_pair().unwrap();
        assert_eq!(pair.phi.eval(2.0).unwrap(), 1.0);
    }

    #[test]
    fn gap_in_pieces_is_rejected() {
        let config = Config::from_json(
            r#"{"pair": {
                "psi": [
                    {"interval": {"lo": 0, "lo_closed": true, "hi": 1, "hi_closed": true}, "expr": "t"},
                    {"interval": {"lo": 2, "lo_closed": true, "hi": "+inf", "hi_closed": false}, "expr": "t"}
                ],
                "phi": [{"interval": {"lo": 0, "lo_closed": true, "hi": "+inf", "hi_closed": false}, "expr": "t"}]
            }}"#,
        )
        .unwrap();
        assert!(matches!(config.require_pair(), Err(Error::Partition(_))));
    }

    #[test]
    fn missing_sections_are_reported() {
        let config = Config::from_json("{}").unwrap();
        assert!(matches!(config.require_pair(), Err(Error::Config(_))));
        assert!(matches!(config.require_space(), Err(Error::Config(_))));
        assert!(matches!(config.require_map(), Err(Error::Config(_))));
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = Config::from_json("{ not json }").unwrap_err();
        match err {
            Error::Config(msg) => assert!(msg.contains("line"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn closed_at_infinity_is_rejected() {
        let spec = IntervalSpec {
            lo: 0.0.into(),
            lo_closed: true,
            hi: BoundSpec::inf(),
            hi_closed: true,
        };
        assert!(spec.build().is_err());
    }
}
