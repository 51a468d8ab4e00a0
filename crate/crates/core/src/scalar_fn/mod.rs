//! Piecewise real-valued functions on [0, +inf).
//!
//! A [`ScalarFn`] is an ordered list of (interval, expression) pieces whose
//! intervals partition [0, +inf) exactly: no gaps, no overlaps, explicit
//! endpoint openness. One-sided limits at breakpoints come from evaluating
//! the neighboring piece's expression at the breakpoint itself: pieces are
//! elementary expressions, so they extend continuously to the closure of
//! their interval and no numerical approach sequence is needed.

mod expr;

pub use expr::{parse_expr, Expr};

use std::fmt;

use crate::error::{Error, Result};

/// Interval on the real line with explicit endpoint openness.
/// `hi == None` means +inf (necessarily open).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub lo_closed: bool,
    pub hi: Option<f64>,
    pub hi_closed: bool,
}

impl Interval {
    pub fn bounded(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> Interval {
        Interval { lo, lo_closed, hi: Some(hi), hi_closed }
    }

    pub fn unbounded(lo: f64, lo_closed: bool) -> Interval {
        Interval { lo, lo_closed, hi: None, hi_closed: false }
    }

    pub fn contains(&self, t: f64) -> bool {
        let above = t > self.lo || (self.lo_closed && t == self.lo);
        let below = match self.hi {
            None => true,
            Some(hi) => t < hi || (self.hi_closed && t == hi),
        };
        above && below
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}, ", if self.lo_closed { '[' } else { '(' }, self.lo)?;
        match self.hi {
            Some(hi) => write!(f, "{}{}", hi, if self.hi_closed { ']' } else { ')' }),
            None => write!(f, "+inf)"),
        }
    }
}

/// One piece of a piecewise function.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub interval: Interval,
    pub expr: Expr,
}

impl Piece {
    pub fn new(interval: Interval, expr: Expr) -> Piece {
        Piece { interval, expr }
    }
}

/// Check that `pieces` are declared in ascending order and tile a contiguous
/// range exactly once. When `required_lo` is given, the first interval must
/// start there closed; when `require_unbounded`, the last must reach +inf.
pub(crate) fn validate_partition(
    pieces: &[Piece],
    required_lo: Option<f64>,
    require_unbounded: bool,
) -> Result<()> {
    if pieces.is_empty() {
        return Err(Error::Partition("no pieces declared".into()));
    }
    let first = &pieces[0].interval;
    if let Some(lo) = required_lo {
        if first.lo != lo || !first.lo_closed {
            return Err(Error::Partition(format!(
                "first interval must start at [{lo}, ...; got {first}"
            )));
        }
    }
    if !first.lo.is_finite() {
        return Err(Error::Partition("interval start must be finite".into()));
    }
    for (idx, piece) in pieces.iter().enumerate() {
        let iv = &piece.interval;
        if !iv.lo.is_finite() || iv.hi.is_some_and(|hi| !hi.is_finite()) {
            return Err(Error::Partition(format!(
                "interval #{idx} has a non-finite endpoint"
            )));
        }
        if let Some(hi) = iv.hi {
            if iv.lo >= hi {
                return Err(Error::Partition(format!(
                    "interval #{idx} {iv} is empty or reversed"
                )));
            }
        }
        if idx + 1 < pieces.len() {
            let next = &pieces[idx + 1].interval;
            match iv.hi {
                None => {
                    return Err(Error::Partition(format!(
                        "interval #{idx} reaches +inf but is not last"
                    )))
                }
                Some(hi) => {
                    if hi != next.lo {
                        let kind = if hi < next.lo { "gap" } else { "overlap" };
                        return Err(Error::Partition(format!(
                            "{kind} between {iv} and {next}: pieces must meet exactly"
                        )));
                    }
                    if iv.hi_closed == next.lo_closed {
                        let kind = if iv.hi_closed { "overlap" } else { "gap" };
                        return Err(Error::Partition(format!(
                            "{kind} at {hi}: exactly one of the adjacent endpoints must be closed"
                        )));
                    }
                }
            }
        }
    }
    let last = &pieces[pieces.len() - 1].interval;
    if require_unbounded && last.hi.is_some() {
        return Err(Error::Partition(format!(
            "last interval must reach +inf; got {last}"
        )));
    }
    Ok(())
}

/// Piecewise function on [0, +inf).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFn {
    pieces: Vec<Piece>,
    breakpoints: Vec<f64>,
}

impl ScalarFn {
    /// Build from pieces that must partition [0, +inf) exactly.
    pub fn new(pieces: Vec<Piece>) -> Result<ScalarFn> {
        validate_partition(&pieces, Some(0.0), true)?;
        let breakpoints = pieces[1..].iter().map(|p| p.interval.lo).collect();
        Ok(ScalarFn { pieces, breakpoints })
    }

    /// Single-piece function defined by `expr` on all of [0, +inf).
    pub fn from_expr(expr: Expr) -> ScalarFn {
        ScalarFn {
            pieces: vec![Piece::new(Interval::unbounded(0.0, true), expr)],
            breakpoints: Vec::new(),
        }
    }

    /// Parse a single expression as a function on [0, +inf).
    pub fn parse(source: &str) -> Result<ScalarFn> {
        Ok(ScalarFn::from_expr(parse_expr(source)?))
    }

    /// The identity function t ↦ t.
    pub fn identity() -> ScalarFn {
        ScalarFn::from_expr(Expr::Var)
    }

    /// The linear function t ↦ k·t.
    pub fn linear(k: f64) -> ScalarFn {
        ScalarFn::from_expr(Expr::Mul(Box::new(Expr::Num(k)), Box::new(Expr::Var)))
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Ascending interior breakpoints (where adjacent pieces meet).
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    fn piece_index_for(&self, t: f64) -> usize {
        // Partition is validated: exactly one piece contains t >= 0.
        self.pieces
            .iter()
            .position(|p| p.interval.contains(t))
            .expect("validated partition covers [0, +inf)")
    }

    /// Evaluate at `t >= 0`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::NegativeInput(t));
        }
        self.pieces[self.piece_index_for(t)].expr.eval(t)
    }

    /// The value together with the one-sided limits at `w`.
    ///
    /// At a breakpoint the left and right limits are the neighboring pieces'
    /// expressions evaluated at `w`; away from breakpoints (or at w = 0 from
    /// the left) the set is the singleton {f(w)}. Duplicates are removed, the
    /// function's own value first.
    pub fn limit_values(&self, w: f64) -> Result<Vec<f64>> {
        if w < 0.0 || !w.is_finite() {
            return Err(Error::NegativeInput(w));
        }
        let own_idx = self.piece_index_for(w);
        let mut values = vec![self.pieces[own_idx].expr.eval(w)?];
        if self.breakpoints.contains(&w) {
            // Index of the piece starting at w; its predecessor ends at w.
            let right_idx = self
                .pieces
                .iter()
                .position(|p| p.interval.lo == w)
                .expect("breakpoint is an interval start");
            let left = self.pieces[right_idx - 1].expr.eval(w)?;
            let right = self.pieces[right_idx].expr.eval(w)?;
            for v in [left, right] {
                if !values.contains(&v) {
                    values.push(v);
                }
            }
        }
        Ok(values)
    }

    /// Map every piece's expression through `f`, keeping the intervals.
    fn map_exprs(&self, f: impl Fn(&Expr) -> Expr) -> ScalarFn {
        ScalarFn {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece::new(p.interval, f(&p.expr)))
                .collect(),
            breakpoints: self.breakpoints.clone(),
        }
    }

    /// Pointwise k·f, by expression-level multiplication.
    pub fn scale(&self, k: f64) -> ScalarFn {
        self.map_exprs(|e| Expr::Mul(Box::new(Expr::Num(k)), Box::new(e.clone())))
    }

    /// Pointwise f − g, with pieces aligned on the union of breakpoints.
    pub fn sub(&self, other: &ScalarFn) -> ScalarFn {
        let mut cuts: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .copied()
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        cuts.dedup();

        let mut pieces = Vec::new();
        let mut lo = 0.0;
        let mut lo_closed = true;
        for cut in cuts.iter().copied().chain(std::iter::once(f64::INFINITY)) {
            // Probe strictly inside the refined interval to pick the owning
            // operand pieces.
            let probe = if cut.is_finite() { (lo + cut) / 2.0 } else { lo + 1.0 };
            let a = &self.pieces[self.piece_index_for(probe)].expr;
            let b = &other.pieces[other.piece_index_for(probe)].expr;
            let interval = if cut.is_finite() {
                // The refined piece owns the cut iff both operands still use
                // the same piece there as at the probe.
                let owns_cut = self.piece_index_for(cut) == self.piece_index_for(probe)
                    && other.piece_index_for(cut) == other.piece_index_for(probe);
                Interval::bounded(lo, lo_closed, cut, owns_cut)
            } else {
                Interval::unbounded(lo, lo_closed)
            };
            pieces.push(Piece::new(
                interval,
                Expr::Sub(Box::new(a.clone()), Box::new(b.clone())),
            ));
            if cut.is_finite() {
                lo = cut;
                lo_closed = !interval.hi_closed;
            }
        }
        ScalarFn::new(pieces).expect("refinement of two valid partitions is valid")
    }
}

impl fmt::Display for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pieces
            .iter()
            .map(|p| format!("{} on {}", p.expr, p.interval))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}
