//! Arithmetic expressions in the variable `t`.
//!
//! The grammar is the minimal one needed to declare the functions this
//! toolkit works with in config files: nonnegative decimal literals, `t`,
//! `+ - * /`, unary negation, `ln(e)`, `abs(e)` and parentheses. Rationals
//! like `3/125` are ordinary divisions; they evaluate in double precision.
//!
//! Precedence: unary minus binds tighter than `*` `/`, which bind tighter
//! than `+` `-`; binary operators associate to the left. `ln` and `abs` use
//! call syntax.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Expression AST. Two expressions with identical token streams compare
/// equal and evaluate identically.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Ln(Box<Expr>),
    Abs(Box<Expr>),
}

impl Expr {
    /// Evaluate at `t`. Division and logarithm arguments are checked here,
    /// not at parse time.
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Var => t,
            Expr::Neg(e) => -e.eval(t)?,
            Expr::Add(a, b) => a.eval(t)? + b.eval(t)?,
            Expr::Sub(a, b) => a.eval(t)? - b.eval(t)?,
            Expr::Mul(a, b) => a.eval(t)? * b.eval(t)?,
            Expr::Div(a, b) => {
                let d = b.eval(t)?;
                if d == 0.0 {
                    return Err(Error::DivisionByZero { t });
                }
                a.eval(t)? / d
            }
            Expr::Ln(e) => {
                let arg = e.eval(t)?;
                if arg <= 0.0 {
                    return Err(Error::LnDomain { arg, t });
                }
                arg.ln()
            }
            Expr::Abs(e) => e.eval(t)?.abs(),
        })
    }

    /// True iff the expression mentions the variable `t`.
    pub fn references_var(&self) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var => true,
            Expr::Neg(e) | Expr::Ln(e) | Expr::Abs(e) => e.references_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.references_var() || b.references_var()
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            _ => 4,
        }
    }
}

/// Parse expression source text into its unique AST.
pub fn parse_expr(source: &str) -> Result<Expr> {
    let tokens = lex(source)?;
    let mut parser = Parser { tokens, pos: 0 };
    let expr = parser.expression()?;
    match parser.peek() {
        (Token::End, _) => Ok(expr),
        (tok, offset) => Err(Error::Syntax {
            offset,
            expected: vec!["`+`", "`-`", "`*`", "`/`", "end of input"],
            found: tok.describe(),
        }),
    }
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Expr> {
        parse_expr(s)
    }
}

// --- lexer ---------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Var,
    Ln,
    Abs,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Num(v) => format!("number `{v}`"),
            Token::Var => "`t`".into(),
            Token::Ln => "`ln`".into(),
            Token::Abs => "`abs`".into(),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Slash => "`/`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn lex(source: &str) -> Result<Vec<(Token, usize)>> {
    let bytes = source.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                out.push((Token::Plus, i));
                i += 1;
            }
            b'-' => {
                out.push((Token::Minus, i));
                i += 1;
            }
            b'*' => {
                out.push((Token::Star, i));
                i += 1;
            }
            b'/' => {
                out.push((Token::Slash, i));
                i += 1;
            }
            b'(' => {
                out.push((Token::LParen, i));
                i += 1;
            }
            b')' => {
                out.push((Token::RParen, i));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    if i >= bytes.len() || !bytes[i].is_ascii_digit() {
                        return Err(Error::Syntax {
                            offset: i,
                            expected: vec!["digit"],
                            found: found_at(source, i),
                        });
                    }
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let text = &source[start..i];
                let value: f64 = text.parse().map_err(|_| Error::Syntax {
                    offset: start,
                    expected: vec!["number"],
                    found: text.to_string(),
                })?;
                out.push((Token::Num(value), start));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let name = &source[start..i];
                let tok = match name {
                    "t" => Token::Var,
                    "ln" => Token::Ln,
                    "abs" => Token::Abs,
                    _ => {
                        return Err(Error::UnknownIdentifier {
                            offset: start,
                            name: name.to_string(),
                        })
                    }
                };
                out.push((tok, start));
            }
            _ => {
                return Err(Error::Syntax {
                    offset: i,
                    expected: vec!["number", "`t`", "`ln`", "`abs`", "operator", "`(`", "`)`"],
                    found: found_at(source, i),
                })
            }
        }
    }
    out.push((Token::End, source.len()));
    Ok(out)
}

fn found_at(source: &str, offset: usize) -> String {
    source[offset..]
        .chars()
        .next()
        .map(|c| format!("`{c}`"))
        .unwrap_or_else(|| "end of input".into())
}

// --- parser --------------------------------------------------------------

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

const PRIMARY_EXPECTED: &[&str] = &["number", "`t`", "`ln`", "`abs`", "`(`", "`-`"];

impl Parser {
    fn peek(&self) -> (Token, usize) {
        self.tokens[self.pos].clone()
    }

    fn bump(&mut self) -> (Token, usize) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect_rparen(&mut self) -> Result<()> {
        match self.bump() {
            (Token::RParen, _) => Ok(()),
            (tok, offset) => Err(Error::Syntax {
                offset,
                expected: vec!["`)`"],
                found: tok.describe(),
            }),
        }
    }

    fn expression(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().0 {
                Token::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Token::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek().0 {
                Token::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Token::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if let (Token::Minus, _) = self.peek() {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.bump() {
            (Token::Num(v), _) => Ok(Expr::Num(v)),
            (Token::Var, _) => Ok(Expr::Var),
            (Token::Ln, offset) => Ok(Expr::Ln(Box::new(self.call_argument(offset)?))),
            (Token::Abs, offset) => Ok(Expr::Abs(Box::new(self.call_argument(offset)?))),
            (Token::LParen, _) => {
                let inner = self.expression()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            (tok, offset) => Err(Error::Syntax {
                offset,
                expected: PRIMARY_EXPECTED.to_vec(),
                found: tok.describe(),
            }),
        }
    }

    fn call_argument(&mut self, _name_offset: usize) -> Result<Expr> {
        match self.bump() {
            (Token::LParen, _) => {
                let inner = self.expression()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            (tok, offset) => Err(Error::Syntax {
                offset,
                expected: vec!["`(`"],
                found: tok.describe(),
            }),
        }
    }
}

// --- printer -------------------------------------------------------------

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, needs_parens: bool) -> fmt::Result {
            if needs_parens {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var => write!(f, "t"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                child(f, e, e.precedence() <= 2)
            }
            // Right children parenthesize at equal precedence too: floating
            // point is not associative, and the round-trip must evaluate
            // bit-identically.
            Expr::Add(a, b) => {
                child(f, a, a.precedence() < 1)?;
                write!(f, " + ")?;
                child(f, b, b.precedence() <= 1)
            }
            Expr::Sub(a, b) => {
                child(f, a, a.precedence() < 1)?;
                write!(f, " - ")?;
                child(f, b, b.precedence() <= 1)
            }
            Expr::Mul(a, b) => {
                child(f, a, a.precedence() < 2)?;
                write!(f, "*")?;
                child(f, b, b.precedence() <= 2)
            }
            Expr::Div(a, b) => {
                child(f, a, a.precedence() < 2)?;
                write!(f, "/")?;
                child(f, b, b.precedence() <= 2)
            }
            Expr::Ln(e) => write!(f, "ln({e})"),
            Expr::Abs(e) => write!(f, "abs({e})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(v: f64) -> Box<Expr> {
        Box::new(Expr::Num(v))
    }

    #[test]
    fn parses_example_pair_psi() {
        // ln((1+2*t)/2)
        let e = parse_expr("ln((1+2*t)/2)").unwrap();
        let expected = Expr::Ln(Box::new(Expr::Div(
            Box::new(Expr::Add(num(1.0), Box::new(Expr::Mul(num(2.0), Box::new(Expr::Var))))),
            num(2.0),
        )));
        assert_eq!(e, expected);
    }

    #[test]
    fn parses_bare_variable() {
        assert_eq!(parse_expr("t").unwrap(), Expr::Var);
    }

    #[test]
    fn parses_affine_with_rational_coefficients() {
        // 1/12 + 5/12*t
        let e = parse_expr("1/12 + 5/12*t").unwrap();
        let expected = Expr::Add(
            Box::new(Expr::Div(num(1.0), num(12.0))),
            Box::new(Expr::Mul(
                Box::new(Expr::Div(num(5.0), num(12.0))),
                Box::new(Expr::Var),
            )),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn unary_minus_binds_tighter_than_mul() {
        let e = parse_expr("-t*2").unwrap();
        assert_eq!(
            e,
            Expr::Mul(Box::new(Expr::Neg(Box::new(Expr::Var))), num(2.0))
        );
    }

    #[test]
    fn left_associative_subtraction() {
        let e = parse_expr("3 - 2 - 1").unwrap();
        assert_eq!(e.eval(0.0).unwrap(), 0.0);
    }

    #[test]
    fn syntax_error_reports_offset_and_expectations() {
        let err = parse_expr("1 + ").unwrap_err();
        match err {
            Error::Syntax { offset, expected, .. } => {
                assert_eq!(offset, 4);
                assert!(expected.contains(&"number"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_is_rejected() {
        let err = parse_expr("sin(t)").unwrap_err();
        assert_eq!(
            err,
            Error::UnknownIdentifier {
                offset: 0,
                name: "sin".into()
            }
        );
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        assert!(parse_expr("1 2").is_err());
        assert!(parse_expr("(1").is_err());
        assert!(parse_expr("").is_err());
    }

    #[test]
    fn division_by_zero_is_an_eval_error() {
        let e = parse_expr("1/t").unwrap();
        assert_eq!(e.eval(0.0).unwrap_err(), Error::DivisionByZero { t: 0.0 });
        assert_eq!(e.eval(2.0).unwrap(), 0.5);
    }

    #[test]
    fn ln_domain_is_an_eval_error() {
        let e = parse_expr("ln(t - 1)").unwrap();
        assert!(matches!(e.eval(0.5), Err(Error::LnDomain { .. })));
        assert_eq!(e.eval(2.0).unwrap(), 0.0);
    }

    #[test]
    fn print_parse_round_trip_on_examples() {
        for src in [
            "ln((1+2*t)/2)",
            "1/12 + 5/12*t",
            "-t*2 + abs(t - 3)",
            "3/125",
            "-(t + 1)/(t + 2)",
        ] {
            let e = parse_expr(src).unwrap();
            let reparsed = parse_expr(&e.to_string()).unwrap();
            for i in 0..=1000 {
                let t = i as f64 * 0.01;
                let a = e.eval(t);
                let b = reparsed.eval(t);
                assert_eq!(a, b, "mismatch at t={t} for {src}");
            }
        }
    }
}
