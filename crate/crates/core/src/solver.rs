//! Picard iteration with diagnostics mirroring the fixed-point existence
//! argument: the step distances u_n = d(x_{n+1}, x_n) must decrease when the
//! hypotheses hold, the tail of the trace must be numerically Cauchy, the
//! final residual d(x_N, T x_N) certifies the fixed point, and a multi-start
//! probe checks uniqueness.
//!
//! A monotonicity violation signals bad hypotheses, not solver failure; it is
//! counted, never raised.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{MetricSpace, Point, SelfMap};
use crate::rng::{derive, stream};

/// Slack used by the step-distance monotonicity counter.
pub const STEP_MONOTONE_TOL: f64 = 1e-12;

/// A run is declared diverged once a step exceeds this multiple of the first.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveVerdict {
    Converged,
    MaxIterReached,
    Diverged,
}

/// Full record of one Picard run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    /// x_0 .. x_N; every iterate is a member of the space.
    pub iterates: Vec<Point>,
    /// u_n = d(x_{n+1}, x_n); always one shorter than `iterates`.
    pub step_distances: Vec<f64>,
    /// d(x_N, T x_N) at the final iterate.
    pub residual: f64,
    pub verdict: SolveVerdict,
    /// Count of n with u_n > u_{n-1} + 1e-12.
    pub monotone_violations: usize,
}

/// Compact, serializable view of a trace for reports.
#[derive(Debug, Clone, Serialize)]
pub struct TraceSummary {
    pub x0: f64,
    pub verdict: SolveVerdict,
    pub iterations: usize,
    /// The final iterate; a fixed-point estimate only when converged.
    pub fixed_point: f64,
    pub residual: f64,
    pub monotone_violations: usize,
}

impl IterationTrace {
    pub fn last(&self) -> Point {
        *self.iterates.last().expect("trace has at least x0")
    }

    pub fn iterations(&self) -> usize {
        self.step_distances.len()
    }

    pub fn summary(&self) -> TraceSummary {
        TraceSummary {
            x0: self.iterates[0].value(),
            verdict: self.verdict,
            iterations: self.iterations(),
            fixed_point: self.last().value(),
            residual: self.residual,
            monotone_violations: self.monotone_violations,
        }
    }

    /// Fixed-format CSV: one row per iterate. The step column is empty on the
    /// final row; the residual column equals the step everywhere else by
    /// construction (u_n = d(x_n, T x_n)).
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "n,x_n,u_n,residual_at_n")?;
        for (n, x) in self.iterates.iter().enumerate() {
            match self.step_distances.get(n) {
                Some(u) => writeln!(out, "{n},{x},{u},{u}")?,
                None => writeln!(out, "{n},{x},,{}", self.residual)?,
            }
        }
        Ok(())
    }
}

/// Iterate x_{n+1} = T x_n from `x0` until d(x_n, T x_n) ≤ tol_fix, for at
/// most `max_iter` steps. Convergence makes no rate claim; a run that merely
/// runs out of budget ends with `MaxIterReached`, not an error.
pub fn picard(
    space: &MetricSpace,
    map: &SelfMap,
    x0: Point,
    tol_fix: f64,
    max_iter: usize,
) -> Result<IterationTrace> {
    if tol_fix <= 0.0 {
        return Err(Error::Param("tol_fix must be positive".into()));
    }
    if max_iter < 1 {
        return Err(Error::Param("max_iter must be at least 1".into()));
    }
    if !space.contains(x0.value()) {
        return Err(Error::NotAMember {
            x: x0.value(),
            space: space.description().to_string(),
        });
    }

    let mut iterates = vec![x0];
    let mut steps: Vec<f64> = Vec::new();
    let mut monotone_violations = 0;

    let (verdict, residual) = loop {
        let x = *iterates.last().expect("nonempty");
        let tx = map.apply(space, x)?;
        let r = space.distance(x, tx);
        if r <= tol_fix {
            break (SolveVerdict::Converged, r);
        }
        if steps.len() >= max_iter {
            break (SolveVerdict::MaxIterReached, r);
        }
        if let Some(&prev) = steps.last() {
            if r > prev + STEP_MONOTONE_TOL {
                monotone_violations += 1;
            }
        }
        let diverged = r > DIVERGENCE_FACTOR * steps.first().copied().unwrap_or(r);
        steps.push(r);
        iterates.push(tx);
        if diverged {
            let t2 = map.apply(space, tx)?;
            break (SolveVerdict::Diverged, space.distance(tx, t2));
        }
    };

    Ok(IterationTrace {
        iterates,
        step_distances: steps,
        residual,
        verdict,
        monotone_violations,
    })
}

/// Numerical surrogate for the Cauchy property: true iff the max pairwise
/// distance among the last `window` iterates is at most `tol`.
pub fn cauchy_check(
    space: &MetricSpace,
    trace: &IterationTrace,
    window: usize,
    tol: f64,
) -> Result<bool> {
    if trace.iterates.len() < window + 1 {
        return Err(Error::Window {
            window,
            len: trace.iterates.len(),
        });
    }
    let tail = &trace.iterates[trace.iterates.len() - window..];
    let mut max = 0.0f64;
    for (i, &x) in tail.iter().enumerate() {
        for &y in tail.iter().skip(i + 1) {
            max = max.max(space.distance(x, y));
        }
    }
    Ok(max <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UniquenessVerdict {
    Unique,
    Ambiguous,
}

/// Multi-start probe: limits of independent Picard runs must coincide.
#[derive(Debug, Clone, Serialize)]
pub struct UniquenessReport {
    pub starts: Vec<Point>,
    /// Final iterates of the converged runs, in start order.
    pub limits: Vec<Point>,
    pub run_verdicts: Vec<SolveVerdict>,
    pub max_pairwise_distance: f64,
    pub verdict: UniquenessVerdict,
}

impl UniquenessReport {
    pub fn pass(&self) -> bool {
        self.verdict == UniquenessVerdict::Unique
    }
}

/// Run Picard from `n_starts` sampled starts; unique iff every run converges
/// and the limits agree within `tol_unique`.
pub fn probe_uniqueness(
    space: &MetricSpace,
    map: &SelfMap,
    seed: u64,
    n_starts: usize,
    tol_fix: f64,
    tol_unique: f64,
    max_iter: usize,
) -> Result<UniquenessReport> {
    if n_starts < 2 {
        return Err(Error::Param("probe_uniqueness needs at least 2 starts".into()));
    }
    let starts = space.sample(derive(seed, stream::UNIQUENESS), n_starts);
    let mut limits = Vec::new();
    let mut run_verdicts = Vec::new();
    for &x0 in &starts {
        let trace = picard(space, map, x0, tol_fix, max_iter)?;
        run_verdicts.push(trace.verdict);
        if trace.verdict == SolveVerdict::Converged {
            limits.push(trace.last());
        }
    }
    let mut max_pairwise = 0.0f64;
    for (i, &a) in limits.iter().enumerate() {
        for &b in limits.iter().skip(i + 1) {
            max_pairwise = max_pairwise.max(space.distance(a, b));
        }
    }
    let all_converged = run_verdicts.iter().all(|v| *v == SolveVerdict::Converged);
    let verdict = if all_converged && max_pairwise <= tol_unique {
        UniquenessVerdict::Unique
    } else {
        UniquenessVerdict::Ambiguous
    };
    Ok(UniquenessReport {
        starts,
        limits,
        run_verdicts,
        max_pairwise_distance: max_pairwise,
        verdict,
    })
}
