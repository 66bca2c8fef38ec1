//! JSON descriptions of spaces and sequences, point tokens, and rational formulas in `n`.
//!
//! ```json
//! {"kind": "standard_from_metric", "metric": "euclid1d", "domain": "integers"}
//! {"kind": "note_space"}
//! {"kind": "table", "points": ["a", "b"], "M": [["1", "1/2"], ["1/2", "1"]], "tnorm": "luk"}
//! {"kind": "explicit", "values": ["1", "1/2", 0.25]}
//! {"kind": "formula", "expr": "1/n + (-1)^n/n^2"}
//! ```

use std::path::Path;

use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gallery;
use crate::rational::{int, parse_rational, Q};
use crate::sequences::SequenceSpec;
use crate::space::{FuzzyMetricSpace, MetricSpace, Point, Universe};
use crate::tnorm::TNorm;

/// Inline JSON when the text starts with `{`, otherwise a path to a JSON file.
pub fn load_json(arg: &str) -> Result<Value> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(Path::new(arg)).map_err(|e| Error::Parse(format!("cannot read {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing field {key:?}")))
}

fn str_field<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    field(v, key)?.as_str().ok_or_else(|| Error::Parse(format!("field {key:?} must be a string")))
}

fn rational(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(Error::Parse(format!("expected a rational, got {other}"))),
    }
}

fn matrix(v: &Value) -> Result<Vec<Vec<Q>>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse("matrix row must be an array".into()))?
                .iter()
                .map(rational)
                .collect()
        })
        .collect()
}

fn labels(v: &Value) -> Result<Vec<String>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("points must be an array".into()))?
        .iter()
        .map(|p| match p {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            other => Err(Error::Parse(format!("bad point label {other}"))),
        })
        .collect()
}

fn domain(v: &Value) -> Result<Universe> {
    match v.get("domain") {
        None => Ok(Universe::Reals),
        Some(Value::String(s)) if s == "reals" => Ok(Universe::Reals),
        Some(Value::String(s)) if s == "integers" => Ok(Universe::Integers),
        Some(Value::Array(ends)) if ends.len() == 2 => {
            let (lo, hi) = (rational(&ends[0])?, rational(&ends[1])?);
            if lo > hi {
                return Err(Error::Parse("interval domain needs lo <= hi".into()));
            }
            Ok(Universe::Interval { lo, hi })
        }
        Some(other) => Err(Error::Parse(format!("unknown domain {other}; use \"reals\", \"integers\" or [lo, hi]"))),
    }
}

fn metric(v: &Value) -> Result<MetricSpace> {
    match str_field(v, "metric")? {
        "euclid1d" => Ok(MetricSpace::line("euclid1d", domain(v)?)),
        "discrete" => {
            let universe = match v.get("points") {
                Some(p) => Universe::finite(labels(p)?.iter().map(|l| Point::named(l))),
                None => domain(v)?,
            };
            Ok(MetricSpace::discrete("discrete", universe))
        }
        "table" => {
            let names = labels(field(v, "points")?)?;
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            MetricSpace::table("table", &refs, matrix(field(v, "d")?)?)
        }
        other => Err(Error::UnknownName {
            kind: "metric",
            name: other.into(),
            valid: vec!["euclid1d".into(), "discrete".into(), "table".into()],
        }),
    }
}

pub fn parse_space(v: &Value) -> Result<FuzzyMetricSpace> {
    match str_field(v, "kind")? {
        "standard_from_metric" => Ok(FuzzyMetricSpace::standard(&metric(v)?)),
        "exponential" => Ok(FuzzyMetricSpace::exponential(&metric(v)?)),
        "note_space" => Ok(gallery::note_space()),
        "named" => gallery::named_space(str_field(v, "name")?),
        "table" => {
            let names = labels(field(v, "points")?)?;
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let tnorm: TNorm = match v.get("tnorm") {
                Some(t) => t.as_str().ok_or_else(|| Error::Parse("tnorm must be a string".into()))?.parse()?,
                None => TNorm::Minimum,
            };
            FuzzyMetricSpace::table("table", &refs, matrix(field(v, "M")?)?, tnorm)
        }
        other => Err(Error::UnknownName {
            kind: "space kind",
            name: other.into(),
            valid: ["standard_from_metric", "exponential", "note_space", "named", "table"].map(String::from).to_vec(),
        }),
    }
}

/// Reads a point token against a space: a rational, an indexed member such as `x3`, or a label.
pub fn parse_point(space: &FuzzyMetricSpace, token: &str) -> Result<Point> {
    let token = token.trim();
    let mut options = Vec::new();
    if let Ok(v) = parse_rational(token) {
        options.push(Point::Real(v));
    }
    let mut chars = token.chars();
    if let (Some(tag), Ok(index)) = (chars.next(), chars.as_str().parse::<u64>()) {
        if tag.is_ascii_alphabetic() {
            options.push(Point::tagged(tag, index));
        }
    }
    options.push(Point::named(token));
    options
        .into_iter()
        .find(|p| space.contains(p))
        .ok_or_else(|| Error::UnknownPoint(token.to_string(), space.name().to_string()))
}

/// Splits comma- or space-separated tokens and expands ranges `x3..x20` and `0..10`.
pub fn expand_tokens<S: AsRef<str>>(args: &[S]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for arg in args {
        for token in arg.as_ref().split([',', ' ']).filter(|t| !t.is_empty()) {
            match token.split_once("..") {
                Some((a, b)) => {
                    let split = |s: &str| {
                        let digits = s.trim_start_matches(|c: char| !c.is_ascii_digit() && c != '-');
                        (s[..s.len() - digits.len()].to_string(), digits.parse::<i64>())
                    };
                    match (split(a), split(b)) {
                        ((pa, Ok(lo)), (pb, Ok(hi))) if pa == pb && lo <= hi => {
                            out.extend((lo..=hi).map(|i| format!("{pa}{i}")))
                        }
                        _ => return Err(Error::Parse(format!("bad range {token:?}"))),
                    }
                }
                None => out.push(token.to_string()),
            }
        }
    }
    Ok(out)
}

pub fn parse_sequence(v: &Value, space: &FuzzyMetricSpace, horizon: usize) -> Result<SequenceSpec> {
    match str_field(v, "kind")? {
        "named" => gallery::named_sequence(str_field(v, "name")?, horizon),
        "explicit" => {
            let values =
                field(v, "values")?.as_array().ok_or_else(|| Error::Parse("values must be an array".into()))?;
            let points = values
                .iter()
                .map(|x| match x {
                    Value::String(s) => parse_point(space, s),
                    Value::Number(n) => parse_point(space, &n.to_string()),
                    other => Err(Error::Parse(format!("bad sequence value {other}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            let name = v.get("name").and_then(Value::as_str).unwrap_or("explicit");
            Ok(SequenceSpec::explicit(name, points))
        }
        "formula" => {
            let expr = str_field(v, "expr")?;
            formula_sequence(expr, horizon)
        }
        other => Err(Error::UnknownName {
            kind: "sequence kind",
            name: other.into(),
            valid: ["named", "explicit", "formula"].map(String::from).to_vec(),
        }),
    }
}

/// The sequence `x_n = expr(n)` for `n = 1..=horizon`, evaluated exactly.
pub fn formula_sequence(expr: &str, horizon: usize) -> Result<SequenceSpec> {
    let f = Formula::parse(expr)?;
    let terms = (1..=horizon).map(|n| f.eval(&int(n as i64)).map(Point::Real)).collect::<Result<Vec<_>>>()?;
    Ok(SequenceSpec::explicit(expr.to_string(), terms))
}

/// Rational expression in one variable `n`.
#[derive(Clone, Debug, PartialEq)]
pub enum Formula {
    Const(Q),
    Var,
    Neg(Box<Formula>),
    Add(Box<Formula>, Box<Formula>),
    Sub(Box<Formula>, Box<Formula>),
    Mul(Box<Formula>, Box<Formula>),
    Div(Box<Formula>, Box<Formula>),
    Rem(Box<Formula>, Box<Formula>),
    Pow(Box<Formula>, Box<Formula>),
    Abs(Box<Formula>),
}

impl Formula {
    pub fn parse(text: &str) -> Result<Formula> {
        let mut p = Parser { src: text.as_bytes(), pos: 0 };
        let f = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(f)
    }

    pub fn eval(&self, n: &Q) -> Result<Q> {
        use Formula::*;
        Ok(match self {
            Const(c) => c.clone(),
            Var => n.clone(),
            Neg(a) => -a.eval(n)?,
            Add(a, b) => a.eval(n)? + b.eval(n)?,
            Sub(a, b) => a.eval(n)? - b.eval(n)?,
            Mul(a, b) => a.eval(n)? * b.eval(n)?,
            Div(a, b) => {
                let d = b.eval(n)?;
                if d.is_zero() {
                    return Err(Error::Domain("division by zero in formula".into()));
                }
                a.eval(n)? / d
            }
            Rem(a, b) => {
                let (x, m) = (a.eval(n)?, b.eval(n)?);
                if !x.is_integer() || !m.is_integer() || m.is_zero() {
                    return Err(Error::Domain("% needs integer operands and a nonzero modulus".into()));
                }
                let r = x.to_integer() % m.to_integer();
                Q::from_integer(if r.is_negative() { r + m.to_integer().abs() } else { r })
            }
            Pow(a, b) => {
                let (base, e) = (a.eval(n)?, b.eval(n)?);
                let e = e
                    .is_integer()
                    .then(|| e.to_integer().to_i32())
                    .flatten()
                    .filter(|e| e.abs() <= 4096)
                    .ok_or_else(|| Error::Domain("exponent must be an integer of modest size".into()))?;
                if e < 0 && base.is_zero() {
                    return Err(Error::Domain("zero to a negative power in formula".into()));
                }
                num_traits::pow::Pow::pow(base, e)
            }
            Abs(a) => a.eval(n)?.abs(),
        })
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("formula: {msg} at byte {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Formula> {
        let mut f = self.term()?;
        loop {
            if self.eat(b'+') {
                f = Formula::Add(Box::new(f), Box::new(self.term()?));
            } else if self.eat(b'-') {
                f = Formula::Sub(Box::new(f), Box::new(self.term()?));
            } else {
                return Ok(f);
            }
        }
    }

    fn term(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        loop {
            if self.eat(b'*') {
                f = Formula::Mul(Box::new(f), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                f = Formula::Div(Box::new(f), Box::new(self.unary()?));
            } else if self.eat(b'%') {
                f = Formula::Rem(Box::new(f), Box::new(self.unary()?));
            } else {
                return Ok(f);
            }
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat(b'-') {
            return Ok(Formula::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            return Ok(Formula::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Formula> {
        self.skip_ws();
        if self.eat(b'(') {
            let f = self.expr()?;
            if !self.eat(b')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(f);
        }
        let start = self.pos;
        let rest = &self.src[start..];
        if rest.starts_with(b"abs") {
            self.pos += 3;
            if !self.eat(b'(') {
                return Err(self.error("expected '(' after abs"));
            }
            let f = self.expr()?;
            if !self.eat(b')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(Formula::Abs(Box::new(f)));
        }
        if rest.first() == Some(&b'n') {
            self.pos += 1;
            return Ok(Formula::Var);
        }
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected a number, n, abs(...) or '('"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(Formula::Const(parse_rational(digits)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use serde_json::json;

    #[test]
    fn formulas_evaluate_exactly() {
        let f = Formula::parse("1/n + (-1)^n/n^2").unwrap();
        assert_eq!(f.eval(&int(2)).unwrap(), q(3, 4));
        assert_eq!(f.eval(&int(3)).unwrap(), q(2, 9));
        assert_eq!(Formula::parse("-2^2").unwrap().eval(&int(1)).unwrap(), int(-4));
        assert_eq!(Formula::parse("2^3^2").unwrap().eval(&int(1)).unwrap(), int(512));
        assert_eq!(Formula::parse("0.1*n").unwrap().eval(&int(3)).unwrap(), q(3, 10));
        assert_eq!(Formula::parse("n % 2").unwrap().eval(&int(7)).unwrap(), int(1));
        assert_eq!(Formula::parse("abs(1 - n)").unwrap().eval(&int(4)).unwrap(), int(3));
        assert_eq!(Formula::parse("n^-1").unwrap().eval(&int(4)).unwrap(), q(1, 4));
    }

    #[test]
    fn formula_errors() {
        assert!(Formula::parse("1 +").is_err());
        assert!(Formula::parse("(n").is_err());
        assert!(Formula::parse("n n").is_err());
        assert!(Formula::parse("1/(n-1)").unwrap().eval(&int(1)).is_err());
        assert!(Formula::parse("2^(1/2)").unwrap().eval(&int(1)).is_err());
    }

    #[test]
    fn spaces_from_json() {
        let s = parse_space(&json!({"kind": "standard_from_metric", "metric": "euclid1d"})).unwrap();
        assert_eq!(s.eval_m(&Point::int(0), &Point::int(1), &int(1)).unwrap(), q(1, 2));
        let ints =
            parse_space(&json!({"kind": "standard_from_metric", "metric": "euclid1d", "domain": "integers"})).unwrap();
        assert!(!ints.contains(&Point::ratio(1, 2)));
        let unit =
            parse_space(&json!({"kind": "standard_from_metric", "metric": "euclid1d", "domain": ["0", "1"]})).unwrap();
        assert!(unit.contains(&Point::ratio(1, 2)) && !unit.contains(&Point::int(2)));
        let table =
            parse_space(&json!({"kind": "table", "points": ["a", "b"], "M": [["1", "1/2"], [0.5, 1]]})).unwrap();
        assert_eq!(table.tnorm().name(), "min");
        assert_eq!(table.eval_m(&Point::named("a"), &Point::named("b"), &int(1)).unwrap(), q(1, 2));
        let note = parse_space(&json!({"kind": "note_space"})).unwrap();
        assert_eq!(parse_point(&note, "x3").unwrap(), Point::tagged('x', 3));
        assert!(parse_point(&note, "x2").is_err());
        let d = parse_space(
            &json!({"kind": "standard_from_metric", "metric": "table", "points": ["p", "q"], "d": [[0, 2], [2, 0]]}),
        )
        .unwrap();
        assert_eq!(d.eval_m(&Point::named("p"), &Point::named("q"), &int(2)).unwrap(), q(1, 2));
        assert!(parse_space(&json!({"kind": "bogus"})).is_err());
        assert!(parse_space(&json!({"kind": "standard_from_metric", "metric": "taxicab"})).is_err());
    }

    #[test]
    fn sequences_from_json() {
        let line = gallery::reals_md();
        let s = parse_sequence(&json!({"kind": "explicit", "values": ["1", "1/2", 0.25]}), &line, 3).unwrap();
        assert_eq!(s.all_terms().unwrap(), vec![Point::int(1), Point::ratio(1, 2), Point::ratio(1, 4)]);
        let f = parse_sequence(&json!({"kind": "formula", "expr": "1/n"}), &line, 4).unwrap();
        assert_eq!(f.horizon(), 4);
        let h = parse_sequence(&json!({"kind": "named", "name": "harmonic"}), &line, 3).unwrap();
        assert_eq!(h.point(3).unwrap(), Point::real(q(11, 6)));
    }

    #[test]
    fn token_expansion() {
        assert_eq!(expand_tokens(&["x3..x5", "y7"]).unwrap(), vec!["x3", "x4", "x5", "y7"]);
        assert_eq!(expand_tokens(&["0..2,1/2"]).unwrap(), vec!["0", "1", "2", "1/2"]);
        assert!(expand_tokens(&["x3..y5"]).is_err());
    }
}
