//! Completion of a rational metric space on the line, represented by Cauchy sequences with
//! explicit moduli, and the standard fuzzy metric lifted to it.
//!
//! Distances between completion points are only known to within an interval whose width
//! shrinks with the requested precision; equality is never decided.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{dyadic, render, Num, Q};

type Representative = dyn Fn(usize) -> Q + Send + Sync;
type Modulus = dyn Fn(u32) -> usize + Send + Sync;

/// A point of the completion: representatives `r(1), r(2), ...` and a modulus `μ` with
/// `|r(a) - r(b)| < 2^-j` whenever `a, b >= μ(j)`.
#[derive(Clone)]
pub struct CompletionPoint {
    label: String,
    rep: Arc<Representative>,
    modulus: Arc<Modulus>,
    /// Set when the point is the image of a base point.
    exact: Option<Q>,
}

/// Precision levels spot-checked when a point is built from user-supplied parts.
const SPOT_CHECK_LEVELS: u32 = 16;

impl CompletionPoint {
    /// The image of a base point: constant representative, modulus 1.
    pub fn embed(x: Q) -> Self {
        let value = x.clone();
        CompletionPoint {
            label: render(&x),
            rep: Arc::new(move |_| value.clone()),
            modulus: Arc::new(|_| 1),
            exact: Some(x),
        }
    }

    /// `√k` by decimal truncations `1, 14/10, 141/100, ...` (for `k = 2`).
    pub fn sqrt(k: u64) -> Self {
        let rep = move |i: usize| {
            let scale = BigInt::from(10u32).pow(i.saturating_sub(1) as u32);
            let root = (BigInt::from(k) * &scale * &scale).sqrt();
            Q::new(root, scale)
        };
        // Truncations past index i differ by less than 10^-(i-1) <= 2^-j once i >= j/3 + 2.
        let root = BigInt::from(k).sqrt();
        let exact = (&root * &root == BigInt::from(k)).then(|| Q::from_integer(root));
        CompletionPoint {
            label: format!("sqrt({k})"),
            rep: Arc::new(rep),
            modulus: Arc::new(|j| j as usize / 3 + 2),
            exact,
        }
    }

    /// A point from an arbitrary representative and modulus, spot-checked for honesty.
    pub fn from_parts(
        label: impl Into<String>,
        rep: impl Fn(usize) -> Q + Send + Sync + 'static,
        modulus: impl Fn(u32) -> usize + Send + Sync + 'static,
    ) -> Result<Self> {
        let point =
            CompletionPoint { label: label.into(), rep: Arc::new(rep), modulus: Arc::new(modulus), exact: None };
        for j in 1..=SPOT_CHECK_LEVELS {
            let k = point.modulus(j).max(1);
            let base = point.rep(k);
            for other in [k + 1, 2 * k, 4 * k + 3] {
                if (point.rep(other) - &base).abs() >= dyadic(j) {
                    return Err(Error::Integrity(format!(
                        "modulus of {} violated at level {j}: indices {k} and {other}",
                        point.label
                    )));
                }
            }
        }
        Ok(point)
    }

    /// `self + c`.
    pub fn offset(&self, c: Q) -> Self {
        let rep = self.rep.clone();
        let shift = c.clone();
        CompletionPoint {
            label: format!("{}+{}", self.label, render(&c)),
            rep: Arc::new(move |i| rep(i) + &shift),
            modulus: self.modulus.clone(),
            exact: self.exact.as_ref().map(|x| x + c),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rep(&self, i: usize) -> Q {
        (self.rep)(i.max(1))
    }

    pub fn modulus(&self, j: u32) -> usize {
        (self.modulus)(j).max(1)
    }

    pub fn exact(&self) -> Option<&Q> {
        self.exact.as_ref()
    }

    /// A representative within `2^-j` of the point.
    pub fn approximation(&self, j: u32) -> Q {
        self.approximation_at(self.modulus(j))
    }

    fn approximation_at(&self, k: usize) -> Q {
        match &self.exact {
            Some(x) => x.clone(),
            None => self.rep(k),
        }
    }
}

impl fmt::Debug for CompletionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CompletionPoint({})", self.label)
    }
}

/// Closed rational interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    #[serde(serialize_with = "ser_q")]
    pub lo: Q,
    #[serde(serialize_with = "ser_q")]
    pub hi: Q,
}

fn ser_q<S: serde::Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    Num(v.clone()).serialize(s)
}

impl Interval {
    pub fn point(x: Q) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

fn check_modulus(p: &CompletionPoint, k: usize, j: u32) -> Result<()> {
    if p.exact.is_some() {
        return Ok(());
    }
    let later = 2 * k + 1;
    if (p.rep(k) - p.rep(later)).abs() >= dyadic(j) {
        return Err(Error::Integrity(format!("modulus of {} violated at level {j}: indices {k} and {later}", p.label)));
    }
    Ok(())
}

/// Interval of width at most `2^(2-j)` containing the completion distance `|p - q|`.
pub fn dist_interval(p: &CompletionPoint, q: &CompletionPoint, j: u32) -> Result<Interval> {
    if j == 0 {
        return Err(Error::Domain("precision must be a positive integer".into()));
    }
    if let (Some(a), Some(b)) = (&p.exact, &q.exact) {
        return Ok(Interval::point((a - b).abs()));
    }
    let k = p.modulus(j).max(q.modulus(j));
    check_modulus(p, k, j)?;
    check_modulus(q, k, j)?;
    let centre = (p.approximation_at(k) - q.approximation_at(k)).abs();
    let inexact = [p, q].iter().filter(|x| x.exact.is_none()).count() as i64;
    let slack = dyadic(j) * Q::from_integer(inexact.into());
    let lo = &centre - &slack;
    Ok(Interval { lo: if lo.is_negative() { Q::zero() } else { lo }, hi: centre + slack })
}

/// Interval containing the lifted standard fuzzy metric `t / (t + |p - q|)`.
pub fn lift_standard_fuzzy(p: &CompletionPoint, q: &CompletionPoint, t: &Q, j: u32) -> Result<Interval> {
    if !t.is_positive() {
        return Err(Error::Domain(format!("t = {} must be positive", render(t))));
    }
    let d = dist_interval(p, q, j)?;
    Ok(Interval { lo: t / (t + &d.hi), hi: t / (t + &d.lo) })
}
