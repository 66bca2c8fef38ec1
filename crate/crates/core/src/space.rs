//! Metric and fuzzy metric spaces over explicit point universes.
//!
//! Universes may be infinite (described by a membership rule); every check in this
//! module runs over the finite sample the caller passes in, and every verdict names
//! the tuple it found.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::{in_unit_interval, int, one, q, render, to_f64, Num, Q};
use crate::tnorm::TNorm;
use crate::verdict::{Axiom, Verdict, Witness};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    /// A point of the rational line.
    Real(Q),
    /// A member of an indexed family, e.g. `x3` or `y17`.
    Indexed { tag: char, index: u64 },
    /// A labelled point of a finite table space.
    Named(Arc<str>),
}

impl Point {
    pub fn real(v: Q) -> Self {
        Point::Real(v)
    }

    pub fn int(n: i64) -> Self {
        Point::Real(int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Point::Real(q(n, d))
    }

    pub fn tagged(tag: char, index: u64) -> Self {
        Point::Indexed { tag, index }
    }

    pub fn named(name: &str) -> Self {
        Point::Named(Arc::from(name))
    }

    pub fn as_real(&self) -> Option<&Q> {
        match self {
            Point::Real(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Real(v) => f.write_str(&render(v)),
            Point::Indexed { tag, index } => write!(f, "{tag}{index}"),
            Point::Named(name) => f.write_str(name),
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

type PointPredicate = dyn Fn(&Point) -> bool + Send + Sync;

/// Subset selector used by [`FuzzyMetricSpace::subspace`].
#[derive(Clone)]
pub enum Subset {
    Finite(Vec<Point>),
    Predicate(Arc<PointPredicate>),
}

impl Subset {
    pub fn predicate(f: impl Fn(&Point) -> bool + Send + Sync + 'static) -> Self {
        Subset::Predicate(Arc::new(f))
    }
}

#[derive(Clone)]
pub enum Universe {
    Reals,
    /// Rationals in the closed interval `[lo, hi]`.
    Interval {
        lo: Q,
        hi: Q,
    },
    Integers,
    /// `{x_n : n >= first} ∪ {y_n : n >= first}`.
    TwoFamilies {
        first: u64,
    },
    Finite(Arc<HashSet<Point>>),
    Predicate(Arc<PointPredicate>),
    Restricted {
        parent: Box<Universe>,
        subset: Arc<RestrictTo>,
    },
}

pub enum RestrictTo {
    Finite(HashSet<Point>),
    Predicate(Arc<PointPredicate>),
}

impl Universe {
    pub fn finite(points: impl IntoIterator<Item = Point>) -> Self {
        Universe::Finite(Arc::new(points.into_iter().collect()))
    }

    pub fn contains(&self, p: &Point) -> bool {
        match self {
            Universe::Reals => matches!(p, Point::Real(_)),
            Universe::Interval { lo, hi } => p.as_real().is_some_and(|v| lo <= v && v <= hi),
            Universe::Integers => p.as_real().is_some_and(|v| v.is_integer()),
            Universe::TwoFamilies { first } => {
                matches!(p, Point::Indexed { tag: 'x' | 'y', index } if index >= first)
            }
            Universe::Finite(set) => set.contains(p),
            Universe::Predicate(f) => f(p),
            Universe::Restricted { parent, subset } => {
                parent.contains(p)
                    && match subset.as_ref() {
                        RestrictTo::Finite(set) => set.contains(p),
                        RestrictTo::Predicate(f) => f(p),
                    }
            }
        }
    }

    fn restrict(&self, subset: Subset) -> Result<Universe> {
        let restrict = match subset {
            Subset::Finite(points) => {
                if points.is_empty() {
                    return Err(Error::Domain("subspace of an empty subset".into()));
                }
                if let Some(p) = points.iter().find(|p| !self.contains(p)) {
                    return Err(Error::Domain(format!("subset point {p} is not in the parent space")));
                }
                RestrictTo::Finite(points.into_iter().collect())
            }
            Subset::Predicate(f) => RestrictTo::Predicate(f),
        };
        Ok(Universe::Restricted { parent: Box::new(self.clone()), subset: Arc::new(restrict) })
    }
}

type DistanceFn = dyn Fn(&Point, &Point) -> Q + Send + Sync;

#[derive(Clone)]
enum Distance {
    /// `|x - y|` on the rational line.
    Line,
    Discrete,
    Table {
        index: Arc<HashMap<Point, usize>>,
        values: Arc<Vec<Vec<Q>>>,
    },
    Custom(Arc<DistanceFn>),
}

/// A classical metric space with rational-valued distance.
#[derive(Clone)]
pub struct MetricSpace {
    name: String,
    universe: Universe,
    distance: Distance,
}

impl MetricSpace {
    /// `(U, |x - y|)` for a universe of rationals.
    pub fn line(name: impl Into<String>, universe: Universe) -> Self {
        MetricSpace { name: name.into(), universe, distance: Distance::Line }
    }

    pub fn reals() -> Self {
        Self::line("reals", Universe::Reals)
    }

    pub fn discrete(name: impl Into<String>, universe: Universe) -> Self {
        MetricSpace { name: name.into(), universe, distance: Distance::Discrete }
    }

    /// Finite metric given by a square distance matrix over labelled points.
    pub fn table(name: impl Into<String>, labels: &[&str], matrix: Vec<Vec<Q>>) -> Result<Self> {
        let points: Vec<Point> = labels.iter().map(|l| Point::named(l)).collect();
        let index = square_index(&points, &matrix)?;
        if matrix.iter().flatten().any(|d| d.is_negative()) {
            return Err(Error::Domain("negative distance in table".into()));
        }
        Ok(MetricSpace {
            name: name.into(),
            universe: Universe::finite(points),
            distance: Distance::Table { index: Arc::new(index), values: Arc::new(matrix) },
        })
    }

    pub fn custom(
        name: impl Into<String>,
        universe: Universe,
        d: impl Fn(&Point, &Point) -> Q + Send + Sync + 'static,
    ) -> Self {
        MetricSpace { name: name.into(), universe, distance: Distance::Custom(Arc::new(d)) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.universe.contains(p)
    }

    /// True when points are rationals and `d(x,y) = |x - y|`.
    pub fn is_line(&self) -> bool {
        matches!(self.distance, Distance::Line)
    }

    pub fn distance(&self, x: &Point, y: &Point) -> Result<Q> {
        for p in [x, y] {
            if !self.contains(p) {
                return Err(Error::UnknownPoint(p.to_string(), self.name.clone()));
            }
        }
        Ok(self.raw_distance(x, y))
    }

    fn raw_distance(&self, x: &Point, y: &Point) -> Q {
        match &self.distance {
            Distance::Line => match (x, y) {
                (Point::Real(a), Point::Real(b)) => (a - b).abs(),
                _ => unreachable!("line metric over non-real points"),
            },
            Distance::Discrete => {
                if x == y {
                    Q::zero()
                } else {
                    one()
                }
            }
            Distance::Table { index, values } => values[index[x]][index[y]].clone(),
            Distance::Custom(d) => d(x, y),
        }
    }

    /// Identity of indiscernibles, symmetry and the triangle inequality over all sample triples.
    pub fn check_axioms(&self, sample: &[Point]) -> Result<Verdict> {
        if sample.is_empty() {
            return Err(Error::Domain("empty sample".into()));
        }
        let n = sample.len();
        let mut d = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                d[i][j] = self.distance(&sample[i], &sample[j])?;
            }
        }
        let names = |ix: &[usize]| ix.iter().map(|&i| sample[i].to_string()).collect::<Vec<_>>();
        for i in 0..n {
            for j in 0..n {
                let same = sample[i] == sample[j];
                if d[i][j].is_negative() || (d[i][j].is_zero() != same) {
                    return Ok(Verdict::refuted(axiom_witness(
                        Axiom::MetricIdentity,
                        names(&[i, j]),
                        vec![],
                        &d[i][j],
                        None,
                    )));
                }
                if d[i][j] != d[j][i] {
                    return Ok(Verdict::refuted(axiom_witness(
                        Axiom::MetricSymmetry,
                        names(&[i, j]),
                        vec![],
                        &d[i][j],
                        Some(&d[j][i]),
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let via = &d[i][j] + &d[j][k];
                    if d[i][k] > via {
                        return Ok(Verdict::refuted(axiom_witness(
                            Axiom::MetricTriangle,
                            names(&[i, j, k]),
                            vec![],
                            &d[i][k],
                            Some(&via),
                        )));
                    }
                }
            }
        }
        Ok(Verdict::satisfied(None))
    }
}

fn square_index(points: &[Point], matrix: &[Vec<Q>]) -> Result<HashMap<Point, usize>> {
    if points.is_empty() {
        return Err(Error::Domain("table space without points".into()));
    }
    if matrix.len() != points.len() || matrix.iter().any(|row| row.len() != points.len()) {
        return Err(Error::Domain(format!("table must be {n}x{n} for {n} points", n = points.len())));
    }
    let index: HashMap<Point, usize> = points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    if index.len() != points.len() {
        return Err(Error::Domain("duplicate point label in table".into()));
    }
    Ok(index)
}

fn axiom_witness(axiom: Axiom, points: Vec<String>, times: Vec<&Q>, lhs: &Q, rhs: Option<&Q>) -> Witness {
    Witness::Axiom {
        axiom,
        points,
        times: times.into_iter().map(Num::from).collect(),
        lhs: lhs.into(),
        rhs: rhs.map(Num::from),
    }
}

/// How membership values are compared.
#[derive(Clone, Debug, PartialEq)]
pub enum ArithmeticMode {
    Exact,
    /// Values come from floating point; comparisons treat differences up to `tolerance` as ties.
    Float {
        tolerance: Q,
    },
}

impl ArithmeticMode {
    pub fn float_default() -> Self {
        ArithmeticMode::Float { tolerance: q(1, 1_000_000_000_000) }
    }

    /// `a > b`, requiring a margin above the tolerance in float mode.
    pub fn gt(&self, a: &Q, b: &Q) -> bool {
        match self {
            ArithmeticMode::Exact => a > b,
            ArithmeticMode::Float { tolerance } => a - b > *tolerance,
        }
    }

    pub fn le(&self, a: &Q, b: &Q) -> bool {
        !self.gt(a, b)
    }

    pub fn eq(&self, a: &Q, b: &Q) -> bool {
        match self {
            ArithmeticMode::Exact => a == b,
            ArithmeticMode::Float { tolerance } => (a - b).abs() <= *tolerance,
        }
    }
}

type MembershipFn = dyn Fn(&Point, &Point, &Q) -> Q + Send + Sync;

#[derive(Clone)]
enum Membership {
    /// `t / (t + d(x,y))`.
    Standard(MetricSpace),
    /// `exp(-d(x,y) / t)`, evaluated in floating point.
    Exponential(MetricSpace),
    /// The two-family Łukasiewicz space with no fuzzy metric completion.
    TwoFamilies,
    /// `t`-independent values from a table.
    Table {
        index: Arc<HashMap<Point, usize>>,
        values: Arc<Vec<Vec<Q>>>,
    },
    Custom(Arc<MembershipFn>),
}

/// A fuzzy metric space `(X, M, *)`.
#[derive(Clone)]
pub struct FuzzyMetricSpace {
    name: String,
    universe: Universe,
    membership: Membership,
    tnorm: TNorm,
    mode: ArithmeticMode,
}

/// `(X, M_d, ·)` with `M_d(x,y,t) = t / (t + d(x,y))`.
pub fn standard_from_metric(m: &MetricSpace) -> FuzzyMetricSpace {
    FuzzyMetricSpace {
        name: format!("standard({})", m.name()),
        universe: m.universe().clone(),
        membership: Membership::Standard(m.clone()),
        tnorm: TNorm::Product,
        mode: ArithmeticMode::Exact,
    }
}

impl FuzzyMetricSpace {
    pub fn standard(m: &MetricSpace) -> Self {
        standard_from_metric(m)
    }

    /// `M(x,y,t) = exp(-d(x,y)/t)` with the product t-norm, compared in float mode.
    pub fn exponential(m: &MetricSpace) -> Self {
        FuzzyMetricSpace {
            name: format!("exponential({})", m.name()),
            universe: m.universe().clone(),
            membership: Membership::Exponential(m.clone()),
            tnorm: TNorm::Product,
            mode: ArithmeticMode::float_default(),
        }
    }

    /// Two disjoint families `x_n`, `y_n` (`n >= 3`) under the Łukasiewicz t-norm, with
    /// `M(x_n,x_m,t) = M(y_n,y_m,t) = 1 - (1/min(m,n) - 1/max(m,n))` and
    /// `M(x_n,y_m,t) = 1/m + 1/n`.
    pub fn two_families() -> Self {
        FuzzyMetricSpace {
            name: "note_space".into(),
            universe: Universe::TwoFamilies { first: 3 },
            membership: Membership::TwoFamilies,
            tnorm: TNorm::Lukasiewicz,
            mode: ArithmeticMode::Exact,
        }
    }

    /// A finite space whose membership values do not depend on `t`.
    pub fn table(name: impl Into<String>, labels: &[&str], matrix: Vec<Vec<Q>>, tnorm: TNorm) -> Result<Self> {
        let points: Vec<Point> = labels.iter().map(|l| Point::named(l)).collect();
        let index = square_index(&points, &matrix)?;
        Ok(FuzzyMetricSpace {
            name: name.into(),
            universe: Universe::finite(points),
            membership: Membership::Table { index: Arc::new(index), values: Arc::new(matrix) },
            tnorm,
            mode: ArithmeticMode::Exact,
        })
    }

    pub fn custom(
        name: impl Into<String>,
        universe: Universe,
        m: impl Fn(&Point, &Point, &Q) -> Q + Send + Sync + 'static,
        tnorm: TNorm,
        mode: ArithmeticMode,
    ) -> Self {
        FuzzyMetricSpace { name: name.into(), universe, membership: Membership::Custom(Arc::new(m)), tnorm, mode }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn tnorm(&self) -> &TNorm {
        &self.tnorm
    }

    pub fn mode(&self) -> &ArithmeticMode {
        &self.mode
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.universe.contains(p)
    }

    /// The underlying metric when this is a standard fuzzy metric.
    pub fn metric(&self) -> Option<&MetricSpace> {
        match &self.membership {
            Membership::Standard(m) => Some(m),
            _ => None,
        }
    }

    /// True when points are rationals and `M(x,y,t)` is a nonincreasing function of `|x - y|`
    /// for each fixed `t`. Pairwise closeness is then decided by the extreme pair of any set.
    pub fn is_line_monotone(&self) -> bool {
        match &self.membership {
            Membership::Standard(m) | Membership::Exponential(m) => m.is_line(),
            _ => false,
        }
    }

    /// True for spaces whose `M(x,y,.)` is given by a closed-form continuous formula.
    pub fn has_formula_membership(&self) -> bool {
        !matches!(self.membership, Membership::Custom(_))
    }

    pub fn eval_m(&self, x: &Point, y: &Point, t: &Q) -> Result<Q> {
        if !t.is_positive() {
            return Err(Error::Domain(format!("time parameter t = {} must be positive", render(t))));
        }
        for p in [x, y] {
            if !self.contains(p) {
                return Err(Error::UnknownPoint(p.to_string(), self.name.clone()));
            }
        }
        Ok(self.raw_m(x, y, t))
    }

    /// Membership without universe checks; callers have validated the points.
    pub(crate) fn raw_m(&self, x: &Point, y: &Point, t: &Q) -> Q {
        match &self.membership {
            Membership::Standard(m) => {
                let d = m.raw_distance(x, y);
                t / (t + d)
            }
            Membership::Exponential(m) => {
                let d = m.raw_distance(x, y);
                if d.is_zero() {
                    one()
                } else {
                    let v = (-to_f64(&d) / to_f64(t)).exp();
                    Q::from_float(v).unwrap_or_else(Q::zero)
                }
            }
            Membership::TwoFamilies => match (x, y) {
                (Point::Indexed { tag: a, index: n }, Point::Indexed { tag: b, index: m }) => {
                    let (n, m) = (*n as i64, *m as i64);
                    if a == b {
                        let (lo, hi) = (n.min(m), n.max(m));
                        one() - (q(1, lo) - q(1, hi))
                    } else {
                        q(1, m) + q(1, n)
                    }
                }
                _ => unreachable!("two-family space over foreign points"),
            },
            Membership::Table { index, values } => values[index[x]][index[y]].clone(),
            Membership::Custom(f) => f(x, y, t),
        }
    }

    /// The fuzzy metric subspace on `subset`: same `M`, same t-norm, smaller universe.
    pub fn subspace(&self, subset: Subset) -> Result<FuzzyMetricSpace> {
        Ok(FuzzyMetricSpace {
            name: format!("{}|sub", self.name),
            universe: self.universe.restrict(subset)?,
            membership: self.membership.clone(),
            tnorm: self.tnorm.clone(),
            mode: self.mode.clone(),
        })
    }

    /// `y ∈ B(center, r, t)`, i.e. `M(center, y, t) > 1 - r`.
    pub fn ball_contains(&self, center: &Point, r: &Q, t: &Q, y: &Point) -> Result<bool> {
        if !r.is_positive() || *r >= one() {
            return Err(Error::Domain(format!("ball radius {} must lie in (0,1)", render(r))));
        }
        let m = self.eval_m(center, y, t)?;
        Ok(self.mode.gt(&m, &(one() - r)))
    }

    /// Range, positivity, identity, symmetry and triangle axioms over every sample triple and every `(t, s)` from
    /// `t_grid`, then monotonicity in `t` across consecutive grid times.
    pub fn check_axioms(&self, sample: &[Point], t_grid: &[Q]) -> Result<Verdict> {
        if sample.is_empty() || t_grid.is_empty() {
            return Err(Error::Domain("check_axioms needs sample points and grid times".into()));
        }
        if let Some(t) = t_grid.iter().find(|t| !t.is_positive()) {
            return Err(Error::Domain(format!("grid time {} must be positive", render(t))));
        }
        if let Some(p) = sample.iter().find(|p| !self.contains(p)) {
            return Err(Error::UnknownPoint(p.to_string(), self.name.clone()));
        }
        let grid: Vec<Q> = t_grid.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let mut times: BTreeSet<Q> = grid.iter().cloned().collect();
        for t in &grid {
            for s in &grid {
                times.insert(t + s);
            }
        }
        let times: Vec<Q> = times.into_iter().collect();
        let slot = |t: &Q| times.binary_search(t).expect("time is tabulated");
        let n = sample.len();
        let table: Vec<Vec<Vec<Q>>> = times
            .par_iter()
            .map(|t| (0..n).map(|i| (0..n).map(|j| self.raw_m(&sample[i], &sample[j], t)).collect()).collect())
            .collect();
        let names = |ix: &[usize]| ix.iter().map(|&i| sample[i].to_string()).collect::<Vec<_>>();
        let unit = one();
        let mut instances: i64 = 0;

        for t in &grid {
            let m = &table[slot(t)];
            for i in 0..n {
                for j in 0..n {
                    instances += 1;
                    let v = &m[i][j];
                    let fail = |axiom, rhs: Option<&Q>| {
                        Ok(Verdict::refuted(axiom_witness(axiom, names(&[i, j]), vec![t], v, rhs)))
                    };
                    if !in_unit_interval(v) {
                        return fail(Axiom::Range, None);
                    }
                    if !v.is_positive() {
                        return fail(Axiom::Positivity, None);
                    }
                    let same = sample[i] == sample[j];
                    if self.mode.eq(v, &unit) != same {
                        return fail(Axiom::Identity, Some(&unit));
                    }
                    if !self.mode.eq(v, &m[j][i]) {
                        return fail(Axiom::Symmetry, Some(&m[j][i]));
                    }
                }
            }
        }

        let pairs: Vec<(&Q, &Q)> = grid.iter().flat_map(|t| grid.iter().map(move |s| (t, s))).collect();
        let triangle = (0..n).into_par_iter().find_map_first(|i| {
            for (t, s) in &pairs {
                let ts = *t + *s;
                let (mt, ms, mts) = (&table[slot(t)], &table[slot(s)], &table[slot(&ts)]);
                for j in 0..n {
                    for k in 0..n {
                        let lhs = self.tnorm.combine(&mt[i][j], &ms[j][k]);
                        if !self.mode.le(&lhs, &mts[i][k]) {
                            return Some(axiom_witness(
                                Axiom::Triangle,
                                names(&[i, j, k]),
                                vec![t, s],
                                &lhs,
                                Some(&mts[i][k]),
                            ));
                        }
                    }
                }
            }
            None
        });
        if let Some(w) = triangle {
            return Ok(Verdict::refuted(w));
        }
        instances += (n * n * n * pairs.len()) as i64;

        let sample_pairs: Vec<(Point, Point)> =
            sample.iter().flat_map(|x| sample.iter().map(move |y| (x.clone(), y.clone()))).collect();
        let monotone = self.monotone_in_t_check(&sample_pairs, &grid)?;
        if monotone.is_refuted() {
            return Ok(monotone);
        }
        Ok(Verdict::satisfied(None).with_certificate("axiom instances checked", int(instances)))
    }

    /// `M(x,y,t_i) <= M(x,y,t_{i+1})` for every pair and consecutive grid times.
    pub fn monotone_in_t_check(&self, pairs: &[(Point, Point)], t_grid: &[Q]) -> Result<Verdict> {
        if t_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("t grid must be strictly increasing".into()));
        }
        for (x, y) in pairs {
            let values = t_grid.iter().map(|t| self.eval_m(x, y, t)).collect::<Result<Vec<_>>>()?;
            for (w, ts) in values.windows(2).zip(t_grid.windows(2)) {
                if self.mode.gt(&w[0], &w[1]) {
                    return Ok(Verdict::refuted(axiom_witness(
                        Axiom::Monotone,
                        vec![x.to_string(), y.to_string()],
                        vec![&ts[0], &ts[1]],
                        &w[0],
                        Some(&w[1]),
                    )));
                }
            }
        }
        Ok(Verdict::satisfied(None))
    }

    /// Sampled oscillation of `M(x,y,.)` on `[t_lo, t_hi]` over dyadically refined grids.
    ///
    /// Formula spaces are reported satisfied when the oscillation shrinks with refinement;
    /// custom spaces are always inconclusive because point samples cannot decide continuity.
    pub fn continuity_in_t_check(&self, pairs: &[(Point, Point)], t_lo: &Q, t_hi: &Q, levels: u32) -> Result<Verdict> {
        if !t_lo.is_positive() || t_lo >= t_hi || levels < 2 {
            return Err(Error::Domain("need 0 < t_lo < t_hi and at least two levels".into()));
        }
        let mut oscillation = Vec::new();
        for level in 0..levels {
            let steps = 8usize << level;
            let width = (t_hi - t_lo) / int(steps as i64);
            let mut worst = Q::zero();
            for (x, y) in pairs {
                let mut prev = self.eval_m(x, y, t_lo)?;
                for i in 1..=steps {
                    let t = t_lo + &width * int(i as i64);
                    let cur = self.eval_m(x, y, &t)?;
                    let jump = (&cur - &prev).abs();
                    if jump > worst {
                        worst = jump;
                    }
                    prev = cur;
                }
            }
            oscillation.push(worst);
        }
        let first = &oscillation[0];
        let last = oscillation.last().expect("levels >= 2");
        let shrinking = oscillation.windows(2).all(|w| w[1] <= w[0]) && (first.is_zero() || last * int(2) <= *first);
        let verdict = if self.has_formula_membership() && shrinking {
            Verdict::satisfied(None)
        } else {
            Verdict::inconclusive(None)
        };
        Ok(verdict.with_certificate("oscillation at finest grid", last.clone()))
    }

    /// Greedy cover of `sample` by `(r, t)`-balls centred at sample points.
    pub fn precompact_at_scale(&self, sample: &[Point], r: &Q, t: &Q, budget: usize) -> Result<Verdict> {
        if sample.is_empty() || budget == 0 {
            return Err(Error::Domain("precompactness check needs a sample and budget >= 1".into()));
        }
        let covers: Vec<Vec<usize>> = sample
            .par_iter()
            .map(|c| {
                let mut hit = Vec::new();
                for (j, y) in sample.iter().enumerate() {
                    if self.ball_contains(c, r, t, y)? {
                        hit.push(j);
                    }
                }
                Ok(hit)
            })
            .collect::<Result<_>>()?;
        let mut covered = vec![false; sample.len()];
        let mut remaining = sample.len();
        let mut centers = Vec::new();
        while remaining > 0 {
            let (best, gain) = covers
                .iter()
                .enumerate()
                .map(|(c, hit)| (c, hit.iter().filter(|&&j| !covered[j]).count()))
                .fold((0, 0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            debug_assert!(gain > 0, "every point covers itself");
            for &j in &covers[best] {
                if !covered[j] {
                    covered[j] = true;
                    remaining -= 1;
                }
            }
            centers.push(best);
        }
        let witness =
            Witness::Cover { size: centers.len(), centers: centers.iter().map(|&c| sample[c].to_string()).collect() };
        if centers.len() <= budget {
            Ok(Verdict::satisfied(Some(witness)))
        } else {
            Ok(Verdict { status: crate::verdict::Status::Refuted, witness: Some(witness), certificate: None }
                .with_certificate("budget exceeded by greedy cover", int(centers.len() as i64)))
        }
    }
}

impl fmt::Debug for FuzzyMetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FuzzyMetricSpace")
            .field("name", &self.name)
            .field("tnorm", &self.tnorm)
            .field("mode", &self.mode)
            .finish()
    }
}

impl fmt::Debug for MetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricSpace").field("name", &self.name).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verdict::Status;

    fn line() -> FuzzyMetricSpace {
        standard_from_metric(&MetricSpace::reals())
    }

    fn reals(values: &[(i64, i64)]) -> Vec<Point> {
        values.iter().map(|&(n, d)| Point::ratio(n, d)).collect()
    }

    #[test]
    fn standard_membership_values() {
        let s = line();
        assert_eq!(s.eval_m(&Point::int(0), &Point::int(1), &q(1, 1)).unwrap(), q(1, 2));
        assert_eq!(s.eval_m(&Point::int(0), &Point::int(3), &q(1, 1)).unwrap(), q(1, 4));
        assert_eq!(s.eval_m(&Point::int(4), &Point::int(5), &q(9, 1)).unwrap(), q(9, 10));
        for t in [q(1, 7), q(1, 1), q(40, 3)] {
            assert_eq!(s.eval_m(&Point::int(2), &Point::int(2), &t).unwrap(), one());
        }
    }

    #[test]
    fn two_family_values() {
        let s = FuzzyMetricSpace::two_families();
        let (x3, y3) = (Point::tagged('x', 3), Point::tagged('y', 3));
        for t in [q(1, 5), q(1, 1), q(17, 2)] {
            assert_eq!(s.eval_m(&x3, &y3, &t).unwrap(), q(2, 3));
            assert_eq!(s.eval_m(&x3, &x3, &t).unwrap(), one());
        }
        let (x4, x6) = (Point::tagged('x', 4), Point::tagged('x', 6));
        assert_eq!(s.eval_m(&x4, &x6, &q(1, 1)).unwrap(), one() - (q(1, 4) - q(1, 6)));
        assert!(s.eval_m(&Point::tagged('x', 2), &x3, &q(1, 1)).is_err());
    }

    #[test]
    fn eval_errors() {
        let s = line();
        assert!(matches!(s.eval_m(&Point::int(0), &Point::int(1), &q(0, 1)), Err(Error::Domain(_))));
        assert!(matches!(s.eval_m(&Point::named("a"), &Point::int(1), &q(1, 1)), Err(Error::UnknownPoint(..))));
    }

    #[test]
    fn balls_on_the_line() {
        let s = line();
        let (c, r, t) = (Point::int(0), q(1, 2), q(1, 1));
        assert!(s.ball_contains(&c, &r, &t, &Point::ratio(1, 2)).unwrap());
        assert!(!s.ball_contains(&c, &r, &t, &Point::int(2)).unwrap());
        for r in [q(1, 100), q(99, 100)] {
            assert!(s.ball_contains(&c, &r, &q(1, 1000), &c).unwrap());
        }
        assert!(s.ball_contains(&c, &q(1, 1), &t, &c).is_err());
    }

    #[test]
    fn two_family_axioms_hold() {
        let s = FuzzyMetricSpace::two_families();
        let sample: Vec<Point> = (3..=20).flat_map(|n| [Point::tagged('x', n), Point::tagged('y', n)]).collect();
        let v = s.check_axioms(&sample, &[q(1, 2), q(1, 1), q(2, 1)]).unwrap();
        assert_eq!(v.status, Status::Satisfied, "{v:?}");
    }

    #[test]
    fn tampered_positivity_is_refuted() {
        let base = line();
        let tampered = FuzzyMetricSpace::custom(
            "tampered",
            Universe::Reals,
            move |x, y, t| {
                let pair = (x.as_real().cloned(), y.as_real().cloned());
                if pair == (Some(int(0)), Some(int(1))) || pair == (Some(int(1)), Some(int(0))) {
                    Q::zero()
                } else {
                    base.raw_m(x, y, t)
                }
            },
            TNorm::Product,
            ArithmeticMode::Exact,
        );
        let v = tampered.check_axioms(&reals(&[(0, 1), (1, 1), (2, 1)]), &[q(1, 1)]).unwrap();
        assert_eq!(v.status, Status::Refuted);
        assert!(matches!(v.witness, Some(Witness::Axiom { axiom: Axiom::Positivity, .. })));
    }

    #[test]
    fn triangle_violation_needs_the_right_tnorm() {
        // A t-independent table that satisfies the triangle axiom under Łukasiewicz but not min.
        let h = q(4, 5);
        let m =
            vec![vec![one(), q(9, 10), h.clone()], vec![q(9, 10), one(), q(9, 10)], vec![h.clone(), q(9, 10), one()]];
        let labels = ["a", "b", "c"];
        let pts: Vec<Point> = labels.iter().map(|l| Point::named(l)).collect();
        let luk = FuzzyMetricSpace::table("t", &labels, m.clone(), TNorm::Lukasiewicz).unwrap();
        assert!(luk.check_axioms(&pts, &[q(1, 1)]).unwrap().is_satisfied());
        let min = FuzzyMetricSpace::table("t", &labels, m, TNorm::Minimum).unwrap();
        let v = min.check_axioms(&pts, &[q(1, 1)]).unwrap();
        assert!(matches!(v.witness, Some(Witness::Axiom { axiom: Axiom::Triangle, .. })));
    }

    #[test]
    fn monotonicity_check() {
        let s = line();
        let pairs = vec![(Point::int(0), Point::int(1))];
        assert!(s.monotone_in_t_check(&pairs, &[q(1, 1), q(2, 1)]).unwrap().is_satisfied());
        let note = FuzzyMetricSpace::two_families();
        let np = vec![(Point::tagged('x', 3), Point::tagged('y', 5))];
        assert!(note.monotone_in_t_check(&np, &[q(1, 3), q(1, 1), q(5, 1)]).unwrap().is_satisfied());
        let decreasing = FuzzyMetricSpace::custom(
            "decreasing",
            Universe::Reals,
            |x, y, t| if x == y { one() } else { one() / (one() + t) },
            TNorm::Product,
            ArithmeticMode::Exact,
        );
        let v = decreasing.monotone_in_t_check(&pairs, &[q(1, 1), q(2, 1)]).unwrap();
        assert_eq!(v.status, Status::Refuted);
        assert!(s.monotone_in_t_check(&pairs, &[q(2, 1), q(1, 1)]).is_err());
    }

    #[test]
    fn subspace_restricts_membership() {
        let s = line();
        let sub = s.subspace(Subset::Finite(reals(&[(0, 1), (1, 1)]))).unwrap();
        assert_eq!(sub.eval_m(&Point::int(0), &Point::int(1), &q(1, 1)).unwrap(), q(1, 2));
        assert!(sub.eval_m(&Point::int(0), &Point::int(2), &q(1, 1)).is_err());
        assert!(s.subspace(Subset::Finite(vec![])).is_err());
        assert!(s.subspace(Subset::Finite(vec![Point::named("z")])).is_err());
        let pos = s.subspace(Subset::predicate(|p| p.as_real().is_some_and(|v| v.is_positive()))).unwrap();
        assert!(pos.contains(&Point::int(3)) && !pos.contains(&Point::int(-3)));
    }

    #[test]
    fn precompactness_examples() {
        let s = line();
        let ints: Vec<Point> = (1..=100).map(Point::int).collect();
        let v = s.precompact_at_scale(&ints, &q(1, 2), &q(1, 1), 10).unwrap();
        assert_eq!(v.status, Status::Refuted);
        assert!(matches!(v.witness, Some(Witness::Cover { size: 100, .. })));
        let unit: Vec<Point> = (0..=100).map(|k| Point::ratio(k, 100)).collect();
        let v = s.precompact_at_scale(&unit, &q(1, 2), &q(1, 1), 1).unwrap();
        assert_eq!(v.status, Status::Satisfied);
        let v = s.precompact_at_scale(&ints[..7], &q(1, 10), &q(1, 1), 7).unwrap();
        assert_eq!(v.status, Status::Satisfied);
    }

    #[test]
    fn continuity_reporting() {
        let s = line();
        let pairs = vec![(Point::int(0), Point::int(1))];
        let v = s.continuity_in_t_check(&pairs, &q(1, 2), &q(2, 1), 4).unwrap();
        assert_eq!(v.status, Status::Satisfied);
        let step = FuzzyMetricSpace::custom(
            "step",
            Universe::Reals,
            |x, y, t| {
                if x == y {
                    one()
                } else if *t > one() {
                    q(1, 2)
                } else {
                    q(1, 4)
                }
            },
            TNorm::Product,
            ArithmeticMode::Exact,
        );
        let v = step.continuity_in_t_check(&pairs, &q(1, 2), &q(2, 1), 4).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
    }

    #[test]
    fn exponential_space_uses_tolerance() {
        let s = FuzzyMetricSpace::exponential(&MetricSpace::reals());
        let sample = reals(&[(0, 1), (1, 3), (1, 1), (5, 2)]);
        assert!(s.check_axioms(&sample, &[q(1, 2), q(1, 1), q(3, 1)]).unwrap().is_satisfied());
        assert!(s.is_line_monotone());
    }

    #[test]
    fn metric_axioms() {
        let m = MetricSpace::table(
            "bad",
            &["a", "b", "c"],
            vec![vec![int(0), int(1), int(5)], vec![int(1), int(0), int(1)], vec![int(5), int(1), int(0)]],
        )
        .unwrap();
        let pts = vec![Point::named("a"), Point::named("b"), Point::named("c")];
        let v = m.check_axioms(&pts).unwrap();
        assert!(matches!(v.witness, Some(Witness::Axiom { axiom: Axiom::MetricTriangle, .. })));
        assert!(MetricSpace::reals().check_axioms(&reals(&[(0, 1), (1, 2), (3, 1)])).unwrap().is_satisfied());
    }
}
