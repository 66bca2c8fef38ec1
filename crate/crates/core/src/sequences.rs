//! Finite-scale classification of sequences: Cauchy, G-Cauchy, pseudo-Cauchy, cofinally Cauchy,
//! and clustering at a candidate point.
//!
//! A [`Scale`] fixes one `(ε, t)` plus the finite bounds standing in for "there exists k" and
//! "infinite subset". Fuzzy and metric versions share one engine that only sees a closeness
//! predicate on index pairs; the fuzzy side evaluates `M(x_p, x_q, t) > 1 - ε`, the metric
//! side `d(x_p, x_q) < δ`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{one, render, to_f64, Num, Q};
use crate::space::{FuzzyMetricSpace, MetricSpace, Point};
use crate::verdict::{Verdict, Witness};

type IndexFn = dyn Fn(usize) -> Point + Send + Sync;
type PrefixFn = dyn Fn(usize) -> Vec<Point> + Send + Sync;

#[derive(Clone)]
enum Generator {
    Indexed(Arc<IndexFn>),
    /// Produces the first `n` terms at once; for recurrences.
    Prefix(Arc<PrefixFn>),
    Explicit(Arc<Vec<Point>>),
}

/// A sequence `(x_n)_{n>=1}` known up to a declared horizon.
#[derive(Clone)]
pub struct SequenceSpec {
    name: String,
    horizon: usize,
    generator: Generator,
}

impl SequenceSpec {
    pub fn from_fn(
        name: impl Into<String>,
        horizon: usize,
        f: impl Fn(usize) -> Point + Send + Sync + 'static,
    ) -> Self {
        SequenceSpec { name: name.into(), horizon, generator: Generator::Indexed(Arc::new(f)) }
    }

    /// A sequence whose first `n` terms are produced together by `f(n)`.
    pub fn from_prefix(
        name: impl Into<String>,
        horizon: usize,
        f: impl Fn(usize) -> Vec<Point> + Send + Sync + 'static,
    ) -> Self {
        SequenceSpec { name: name.into(), horizon, generator: Generator::Prefix(Arc::new(f)) }
    }

    pub fn explicit(name: impl Into<String>, terms: Vec<Point>) -> Self {
        SequenceSpec { name: name.into(), horizon: terms.len(), generator: Generator::Explicit(Arc::new(terms)) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Same generator, different horizon. Explicit sequences cannot grow.
    pub fn with_horizon(&self, horizon: usize) -> Result<Self> {
        if let Generator::Explicit(terms) = &self.generator {
            if horizon > terms.len() {
                return Err(Error::Domain(format!("explicit sequence {} has only {} terms", self.name, terms.len())));
            }
        }
        Ok(SequenceSpec { horizon, ..self.clone() })
    }

    /// Terms `x_1, ..., x_n`.
    pub fn terms(&self, n: usize) -> Result<Vec<Point>> {
        if n > self.horizon {
            return Err(Error::Domain(format!(
                "requested {n} terms of {} beyond its horizon {}",
                self.name, self.horizon
            )));
        }
        Ok(match &self.generator {
            Generator::Indexed(f) => (1..=n).map(|i| f(i)).collect(),
            Generator::Prefix(f) => {
                let mut v = f(n);
                v.truncate(n);
                v
            }
            Generator::Explicit(terms) => terms[..n].to_vec(),
        })
    }

    pub fn all_terms(&self) -> Result<Vec<Point>> {
        self.terms(self.horizon)
    }

    /// `x_i` for a 1-based index.
    pub fn point(&self, i: usize) -> Result<Point> {
        if i == 0 || i > self.horizon {
            return Err(Error::Domain(format!("index {i} outside 1..={}", self.horizon)));
        }
        match &self.generator {
            Generator::Indexed(f) => Ok(f(i)),
            _ => Ok(self.terms(i)?.pop().expect("i >= 1")),
        }
    }

    /// `(x_{n_1}, x_{n_2}, ...)` for 1-based, strictly increasing indices.
    pub fn subsequence(&self, indices: &[usize]) -> Result<SequenceSpec> {
        if indices.windows(2).any(|w| w[0] >= w[1]) || indices.first() == Some(&0) {
            return Err(Error::Domain("subsequence indices must be strictly increasing from 1".into()));
        }
        let last = indices.last().copied().unwrap_or(0);
        let terms = self.terms(last)?;
        Ok(SequenceSpec::explicit(
            format!("{}[sub]", self.name),
            indices.iter().map(|&i| terms[i - 1].clone()).collect(),
        ))
    }

    /// Image sequence `(f(x_n))`.
    pub fn map(&self, name: impl Into<String>, f: impl Fn(&Point) -> Point) -> Result<SequenceSpec> {
        Ok(SequenceSpec::explicit(name, self.all_terms()?.iter().map(f).collect()))
    }
}

impl fmt::Debug for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SequenceSpec({}, horizon {})", self.name, self.horizon)
    }
}

/// Finite verification parameters for one `(ε, t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scale {
    #[serde(serialize_with = "ser_q")]
    pub epsilon: Q,
    #[serde(serialize_with = "ser_q")]
    pub t: Q,
    /// Largest tail start examined.
    pub k_max: usize,
    /// Horizon `N`: terms `1..=N` are examined.
    pub horizon: usize,
    /// Size threshold standing in for an infinite index set.
    pub m: usize,
    /// Depth `R` of the shrinking-ball schedule.
    pub depth: usize,
}

fn ser_q<S: serde::Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    Num(v.clone()).serialize(s)
}

impl Scale {
    /// Defaults: `k_max = max(1, N/10)`, `m = 2`, `R = min(10, N)`.
    pub fn new(epsilon: Q, t: Q, horizon: usize) -> Self {
        Scale { epsilon, t, k_max: (horizon / 10).max(1), horizon, m: 2, depth: horizon.min(10) }
    }

    pub fn with_k_max(mut self, k_max: usize) -> Self {
        self.k_max = k_max;
        self
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScale(msg));
        if !self.epsilon.is_positive() || self.epsilon >= one() {
            return bad(format!("epsilon {} not in (0,1)", render(&self.epsilon)));
        }
        if !self.t.is_positive() {
            return bad(format!("t {} not positive", render(&self.t)));
        }
        if self.k_max == 0 || self.k_max >= self.horizon {
            return bad(format!("need 1 <= k_max < N, got k_max {} N {}", self.k_max, self.horizon));
        }
        if self.m == 0 || self.m > self.horizon {
            return bad(format!("need 1 <= m <= N, got m {}", self.m));
        }
        if self.depth == 0 || self.depth > self.horizon {
            return bad(format!("need 1 <= depth <= N, got {}", self.depth));
        }
        Ok(())
    }

    /// `1 - ε`: membership values must exceed this.
    pub fn membership_threshold(&self) -> Q {
        one() - &self.epsilon
    }

    /// `tε / (1 - ε)`: under `M_d`, `M_d > 1 - ε` iff `d` is below this.
    pub fn metric_threshold(&self) -> Q {
        &self.t * &self.epsilon / (one() - &self.epsilon)
    }

    fn check_for(&self, seq: &SequenceSpec) -> Result<()> {
        self.validate()?;
        if self.horizon > seq.horizon() {
            return Err(Error::InvalidScale(format!(
                "horizon {} exceeds the declared horizon {} of {}",
                self.horizon,
                seq.horizon(),
                seq.name()
            )));
        }
        Ok(())
    }
}

/// Finite parameters for classical metric checks: threshold `δ` in place of `(ε, t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricScale {
    #[serde(serialize_with = "ser_q")]
    pub delta: Q,
    pub k_max: usize,
    pub horizon: usize,
    pub m: usize,
}

impl MetricScale {
    /// The metric scale matched to a fuzzy scale under `M_d`.
    pub fn matching(scale: &Scale) -> Self {
        MetricScale { delta: scale.metric_threshold(), k_max: scale.k_max, horizon: scale.horizon, m: scale.m }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delta.is_positive() {
            return Err(Error::InvalidScale("delta must be positive".into()));
        }
        if self.k_max == 0 || self.k_max >= self.horizon || self.m == 0 || self.m > self.horizon {
            return Err(Error::InvalidScale("need 1 <= k_max < N and 1 <= m <= N".into()));
        }
        Ok(())
    }
}

/// Pairwise closeness over the materialised terms of one sequence (0-based indices).
pub(crate) trait Closeness: Sync {
    fn terms(&self) -> &[Point];
    fn close(&self, p: usize, q: usize) -> bool;
    /// The quantity compared against the threshold (membership or distance).
    fn value(&self, p: usize, q: usize) -> Q;
    /// Coordinates when closeness is decided by `|x_p - x_q|` alone, monotonically.
    fn coordinates(&self) -> Option<&[Q]>;

    fn len(&self) -> usize {
        self.terms().len()
    }
}

pub(crate) struct FuzzyCloseness<'a> {
    space: &'a FuzzyMetricSpace,
    terms: Vec<Point>,
    t: Q,
    threshold: Q,
    coords: Option<Vec<Q>>,
}

impl<'a> FuzzyCloseness<'a> {
    pub(crate) fn new(space: &'a FuzzyMetricSpace, terms: Vec<Point>, epsilon: &Q, t: &Q) -> Result<Self> {
        if let Some(p) = terms.iter().find(|p| !space.contains(p)) {
            return Err(Error::UnknownPoint(p.to_string(), space.name().to_string()));
        }
        let coords = if space.is_line_monotone() {
            terms.iter().map(|p| p.as_real().cloned()).collect::<Option<Vec<_>>>()
        } else {
            None
        };
        Ok(FuzzyCloseness { space, terms, t: t.clone(), threshold: one() - epsilon, coords })
    }

    /// Same comparison with the line shortcut disabled.
    #[cfg(test)]
    pub(crate) fn without_coordinates(mut self) -> Self {
        self.coords = None;
        self
    }
}

impl Closeness for FuzzyCloseness<'_> {
    fn terms(&self) -> &[Point] {
        &self.terms
    }

    fn close(&self, p: usize, q: usize) -> bool {
        let m = self.space.raw_m(&self.terms[p], &self.terms[q], &self.t);
        self.space.mode().gt(&m, &self.threshold)
    }

    fn value(&self, p: usize, q: usize) -> Q {
        self.space.raw_m(&self.terms[p], &self.terms[q], &self.t)
    }

    fn coordinates(&self) -> Option<&[Q]> {
        self.coords.as_deref()
    }
}

pub(crate) struct MetricCloseness<'a> {
    metric: &'a MetricSpace,
    terms: Vec<Point>,
    delta: Q,
    coords: Option<Vec<Q>>,
}

impl<'a> MetricCloseness<'a> {
    pub(crate) fn new(metric: &'a MetricSpace, terms: Vec<Point>, delta: &Q) -> Result<Self> {
        if let Some(p) = terms.iter().find(|p| !metric.contains(p)) {
            return Err(Error::UnknownPoint(p.to_string(), metric.name().to_string()));
        }
        let coords = if metric.is_line() {
            terms.iter().map(|p| p.as_real().cloned()).collect::<Option<Vec<_>>>()
        } else {
            None
        };
        Ok(MetricCloseness { metric, terms, delta: delta.clone(), coords })
    }
}

impl Closeness for MetricCloseness<'_> {
    fn terms(&self) -> &[Point] {
        &self.terms
    }

    fn close(&self, p: usize, q: usize) -> bool {
        self.value(p, q) < self.delta
    }

    fn value(&self, p: usize, q: usize) -> Q {
        self.metric.distance(&self.terms[p], &self.terms[q]).expect("terms validated")
    }

    fn coordinates(&self) -> Option<&[Q]> {
        self.coords.as_deref()
    }
}

fn pair(c: &dyn Closeness, a: usize, b: usize) -> Witness {
    let (p, q) = (a.min(b), a.max(b));
    Witness::Pair { p: p + 1, q: q + 1, value: c.value(p, q).into() }
}

/// Suffix argmin / argmax of the coordinates: `ext[p]` covers indices `p..n`.
fn suffix_extremes(coords: &[Q]) -> Vec<(usize, usize)> {
    let n = coords.len();
    let mut ext = vec![(0, 0); n];
    let (mut lo, mut hi) = (n - 1, n - 1);
    for p in (0..n).rev() {
        if coords[p] < coords[lo] {
            lo = p;
        }
        if coords[p] > coords[hi] {
            hi = p;
        }
        ext[p] = (lo, hi);
    }
    ext
}

/// Largest 0-based `p` such that the tail `p..n` contains a non-close pair.
fn last_bad_tail(c: &dyn Closeness) -> Option<usize> {
    let n = c.len();
    if n < 2 {
        return None;
    }
    if let Some(coords) = c.coordinates() {
        let ext = suffix_extremes(coords);
        return (0..n - 1).rev().find(|&p| !c.close(ext[p].0, ext[p].1));
    }
    (0..n - 1).rev().find(|&p| (p + 1..n).rev().any(|q| !c.close(p, q)))
}

pub(crate) fn cauchy_verdict(c: &dyn Closeness, k_max: usize) -> Verdict {
    let k = last_bad_tail(c).map_or(1, |p| p + 2);
    if k <= k_max {
        return Verdict::satisfied(Some(Witness::TailStart { k }));
    }
    let start = k_max - 1;
    let n = c.len();
    let witness = match c.coordinates() {
        Some(coords) => {
            let (lo, hi) = suffix_extremes(coords)[start];
            pair(c, lo, hi)
        }
        None => (start..n)
            .find_map(|p| (p + 1..n).rev().find(|&q| !c.close(p, q)).map(|q| pair(c, p, q)))
            .expect("the tail from k_max has a violating pair"),
    };
    Verdict::refuted(witness)
}

pub(crate) fn g_cauchy_verdict(c: &dyn Closeness, k_max: usize) -> Verdict {
    let n = c.len();
    match (0..n.saturating_sub(1)).rev().find(|&i| !c.close(i, i + 1)) {
        None => Verdict::satisfied(Some(Witness::TailStart { k: 1 })),
        Some(i) if i + 2 <= k_max => Verdict::satisfied(Some(Witness::TailStart { k: i + 2 })),
        Some(i) => Verdict::refuted(Witness::Step { n: i + 1, value: c.value(i, i + 1).into() }),
    }
}

/// Largest 0-based `p` having a close partner `q > p`, with that partner.
fn last_close_pair(c: &dyn Closeness) -> Option<(usize, usize)> {
    let n = c.len();
    if let Some(coords) = c.coordinates() {
        let mut later: BTreeMap<&Q, usize> = BTreeMap::new();
        for p in (0..n).rev() {
            let x = &coords[p];
            let below = later.range::<&Q, _>(..=x).next_back().map(|(_, &q)| q);
            let above = later.range::<&Q, _>(x..).next().map(|(_, &q)| q);
            for q in [below, above].into_iter().flatten() {
                if c.close(p, q) {
                    return Some((p, q));
                }
            }
            later.insert(x, p);
        }
        return None;
    }
    (0..n).rev().find_map(|p| (p + 1..n).find(|&q| c.close(p, q)).map(|q| (p, q)))
}

pub(crate) fn pseudo_cauchy_verdict(c: &dyn Closeness, k_max: usize) -> Verdict {
    match last_close_pair(c) {
        Some((p, q)) if p + 1 > k_max => Verdict::satisfied(Some(pair(c, p, q))),
        found => {
            let k = found.map_or(1, |(p, _)| (p + 1).max(1));
            Verdict::refuted(Witness::FailingTail { k })
        }
    }
}

/// Largest pairwise-close index set (0-based, ascending) when an exact search is affordable.
pub(crate) fn max_close_subset(c: &dyn Closeness, exhaustive_limit: usize, target: usize) -> Option<Vec<usize>> {
    if let Some(coords) = c.coordinates() {
        return Some(window_sweep(c, coords));
    }
    if c.len() > exhaustive_limit {
        return None;
    }
    Some(weighted_clique(c, target))
}

/// Two-pointer sweep over indices sorted by coordinate; a window is pairwise close iff its
/// extreme pair is.
fn window_sweep(c: &dyn Closeness, coords: &[Q]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..coords.len()).collect();
    order.sort_by(|&a, &b| coords[a].cmp(&coords[b]).then(a.cmp(&b)));
    let (mut best, mut best_lo, mut best_hi) = (0, 0, 0);
    let mut lo = 0;
    for hi in 0..order.len() {
        while lo < hi && !c.close(order[lo], order[hi]) {
            lo += 1;
        }
        if hi - lo + 1 > best {
            (best, best_lo, best_hi) = (hi - lo + 1, lo, hi);
        }
    }
    let mut chosen: Vec<usize> = order.get(best_lo..=best_hi).map(<[usize]>::to_vec).unwrap_or_default();
    chosen.sort_unstable();
    chosen
}

/// Branch-and-bound maximum clique of the closeness graph, with equal terms merged into one
/// weighted vertex. Stops early once a clique of weight `target` is found.
fn weighted_clique(c: &dyn Closeness, target: usize) -> Vec<usize> {
    let terms = c.terms();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut seen: HashMap<&Point, usize> = HashMap::new();
    for (i, p) in terms.iter().enumerate() {
        match seen.get(p) {
            Some(&g) => groups[g].push(i),
            None => {
                seen.insert(p, groups.len());
                groups.push(vec![i]);
            }
        }
    }
    let v = groups.len();
    let words = v.div_ceil(64).max(1);
    let mut adj = vec![vec![0u64; words]; v];
    for a in 0..v {
        for b in a + 1..v {
            if c.close(groups[a][0], groups[b][0]) {
                adj[a][b / 64] |= 1 << (b % 64);
                adj[b][a / 64] |= 1 << (a % 64);
            }
        }
    }
    let weight: Vec<usize> = groups.iter().map(Vec::len).collect();
    let mut all = vec![0u64; words];
    for i in 0..v {
        all[i / 64] |= 1 << (i % 64);
    }
    let mut search = CliqueSearch { adj: &adj, weight: &weight, target, best: 0, best_set: Vec::new() };
    search.expand(&mut Vec::new(), 0, all);
    let mut out: Vec<usize> = search.best_set.iter().flat_map(|&g| groups[g].iter().copied()).collect();
    out.sort_unstable();
    out
}

struct CliqueSearch<'a> {
    adj: &'a [Vec<u64>],
    weight: &'a [usize],
    target: usize,
    best: usize,
    best_set: Vec<usize>,
}

impl CliqueSearch<'_> {
    fn members(bits: &[u64]) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, &word) in bits.iter().enumerate() {
            let mut x = word;
            while x != 0 {
                out.push(w * 64 + x.trailing_zeros() as usize);
                x &= x - 1;
            }
        }
        out
    }

    /// Returns true once the target is reached.
    fn expand(&mut self, current: &mut Vec<usize>, weight: usize, mut candidates: Vec<u64>) -> bool {
        if weight > self.best {
            self.best = weight;
            self.best_set = current.clone();
            if self.best >= self.target {
                return true;
            }
        }
        let mut order = Self::members(&candidates);
        order.sort_by(|&a, &b| self.weight[b].cmp(&self.weight[a]).then(a.cmp(&b)));
        let mut remaining: usize = order.iter().map(|&i| self.weight[i]).sum();
        for v in order {
            if weight + remaining <= self.best {
                break;
            }
            let next: Vec<u64> = candidates.iter().zip(&self.adj[v]).map(|(a, b)| a & b).collect();
            current.push(v);
            if self.expand(current, weight + self.weight[v], next) {
                return true;
            }
            current.pop();
            candidates[v / 64] &= !(1 << (v % 64));
            remaining -= self.weight[v];
        }
        false
    }
}

/// Sequences above this horizon get no exhaustive cofinal search in spaces without a line
/// structure.
pub const EXHAUSTIVE_COFINAL_LIMIT: usize = 200;
/// Upper bound on the number of centres tried by the ball-based cofinal search.
pub const BALL_CENTER_BUDGET: usize = 64;

/// Up to `budget` distinct terms, spread evenly over the index range.
pub(crate) fn ball_centers(terms: &[Point], budget: usize) -> Vec<Point> {
    let mut distinct: Vec<&Point> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for p in terms {
        if seen.insert(p) {
            distinct.push(p);
        }
    }
    if distinct.len() <= budget {
        return distinct.into_iter().cloned().collect();
    }
    (0..budget).map(|i| distinct[i * distinct.len() / budget].clone()).collect()
}

/// On the line the value-window sweep is exact and cheap, so it runs alone; elsewhere the ball
/// construction runs first and the clique search only when it falls short.
fn cofinal_verdict(
    c: &dyn Closeness,
    m: usize,
    ball: impl Fn() -> Result<Option<Vec<usize>>>,
) -> Result<(Verdict, Option<usize>)> {
    let from_ball = if c.coordinates().is_some() { None } else { ball()? };
    if let Some(indices) = &from_ball {
        if indices.len() >= m {
            let size = indices.len();
            let v = Verdict::satisfied(Some(Witness::Subset { indices: indices.clone() }))
                .with_certificate("pairwise closeness by the ball construction", crate::rational::int(size as i64));
            return Ok((v, None));
        }
    }
    match max_close_subset(c, EXHAUSTIVE_COFINAL_LIMIT, m) {
        Some(best) => {
            let size = best.len();
            let indices: Vec<usize> = best.iter().map(|i| i + 1).collect();
            let exact = c.coordinates().is_some().then_some(size);
            if size >= m {
                Ok((Verdict::satisfied(Some(Witness::Subset { indices })), exact))
            } else {
                Ok((Verdict::refuted(Witness::MaxSubset { size, indices }), Some(size)))
            }
        }
        None => {
            let partial = from_ball.unwrap_or_default();
            Ok((Verdict::inconclusive(Some(Witness::MaxSubset { size: partial.len(), indices: partial })), None))
        }
    }
}

fn fuzzy_closeness<'a>(space: &'a FuzzyMetricSpace, seq: &SequenceSpec, scale: &Scale) -> Result<FuzzyCloseness<'a>> {
    scale.check_for(seq)?;
    FuzzyCloseness::new(space, seq.terms(scale.horizon)?, &scale.epsilon, &scale.t)
}

/// Some tail start `k <= k_max` has every pair in `k..=N` close.
pub fn is_cauchy_at_scale(space: &FuzzyMetricSpace, seq: &SequenceSpec, scale: &Scale) -> Result<Verdict> {
    let c = fuzzy_closeness(space, seq, scale)?;
    Ok(cauchy_verdict(&c, scale.k_max))
}

/// Some `k <= k_max` has `M(x_n, x_{n+1}, t) > 1 - ε` for all `k <= n < N`.
pub fn is_g_cauchy_at_scale(space: &FuzzyMetricSpace, seq: &SequenceSpec, scale: &Scale) -> Result<Verdict> {
    let c = fuzzy_closeness(space, seq, scale)?;
    Ok(g_cauchy_verdict(&c, scale.k_max))
}

/// For every `k <= k_max` there are `p != q` in `(k, N]` with `M(x_p, x_q, t) > 1 - ε`.
pub fn is_pseudo_cauchy_at_scale(space: &FuzzyMetricSpace, seq: &SequenceSpec, scale: &Scale) -> Result<Verdict> {
    let c = fuzzy_closeness(space, seq, scale)?;
    Ok(pseudo_cauchy_verdict(&c, scale.k_max))
}

/// A pairwise-close index set of size at least `m` inside `1..=N`.
///
/// On the line an exact value-window sweep decides the question at any horizon. Elsewhere the
/// ball construction runs first; if it falls short, a weighted clique search decides up to
/// [`EXHAUSTIVE_COFINAL_LIMIT`] terms, and beyond that the verdict is inconclusive.
pub fn is_cofinally_cauchy_at_scale(space: &FuzzyMetricSpace, seq: &SequenceSpec, scale: &Scale) -> Result<Verdict> {
    Ok(cofinal_with_size(space, seq, scale)?.0)
}

fn cofinal_with_size(space: &FuzzyMetricSpace, seq: &SequenceSpec, scale: &Scale) -> Result<(Verdict, Option<usize>)> {
    if scale.m < 2 {
        return Err(Error::Domain(format!("cofinal size threshold m = {} must be at least 2", scale.m)));
    }
    let c = fuzzy_closeness(space, seq, scale)?;
    let ball = || {
        let mut best: Vec<usize> = Vec::new();
        for center in ball_centers(c.terms(), BALL_CENTER_BUDGET) {
            match crate::extract::ball_members(space, c.terms(), &center, &scale.epsilon, &scale.t) {
                Ok(found) => {
                    if found.len() >= scale.m {
                        return Ok(Some(found));
                    }
                    if found.len() > best.len() {
                        best = found;
                    }
                }
                Err(Error::DeltaSearchFailed { .. }) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
        Ok(Some(best))
    };
    cofinal_verdict(&c, scale.m, ball)
}

/// Shrinking-ball schedule at `candidate`: earliest indices `n_1 < ... < n_R` with
/// `M(x_{n_r}, candidate, t) > 1 - 1/(r+1)`. Returns the 1-based chain, possibly short.
pub(crate) fn shrinking_ball_chain(
    space: &FuzzyMetricSpace,
    terms: &[Point],
    candidate: &Point,
    t: &Q,
    depth: usize,
) -> Vec<usize> {
    let mut chain = Vec::with_capacity(depth);
    let mut next = 0;
    for r in 1..=depth {
        let threshold = one() - Q::new(1.into(), (r as i64 + 1).into());
        let found = (next..terms.len()).find(|&i| space.mode().gt(&space.raw_m(&terms[i], candidate, t), &threshold));
        match found {
            Some(i) => {
                chain.push(i + 1);
                next = i + 1;
            }
            None => break,
        }
    }
    chain
}

/// Indices `n_1 < ... < n_R <= N` with `M(x_{n_r}, candidate, t) > 1 - 1/(r+1)`.
pub fn clusters_at_scale(
    space: &FuzzyMetricSpace,
    seq: &SequenceSpec,
    candidate: &Point,
    scale: &Scale,
) -> Result<Verdict> {
    scale.check_for(seq)?;
    if !space.contains(candidate) {
        return Err(Error::UnknownPoint(candidate.to_string(), space.name().to_string()));
    }
    let terms = seq.terms(scale.horizon)?;
    if let Some(p) = terms.iter().find(|p| !space.contains(p)) {
        return Err(Error::UnknownPoint(p.to_string(), space.name().to_string()));
    }
    let chain = shrinking_ball_chain(space, &terms, candidate, &scale.t, scale.depth);
    if chain.len() == scale.depth {
        Ok(Verdict::satisfied(Some(Witness::Chain { indices: chain })))
    } else {
        Ok(Verdict::refuted(Witness::Stalled { reached: chain.len(), chain }))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailModulus {
    pub k: usize,
    /// Smallest closeness value over pairs in the tail `k..=N`.
    pub min_membership: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub tail_modulus: Vec<TailModulus>,
    pub max_cofinal_window: Option<usize>,
    /// Smallest `M(x_n, x_{n+1}, t)` over `k_max <= n < N`.
    pub consecutive_tail_min: Option<f64>,
    /// `(n, M(x_n, x_{n+1}, t))` for the last few `n`.
    pub consecutive_last: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub space: String,
    pub sequence: String,
    pub scale: Scale,
    pub cauchy: Verdict,
    pub g_cauchy: Verdict,
    pub pseudo_cauchy: Verdict,
    pub cofinally_cauchy: Verdict,
    pub diagnostics: Diagnostics,
}

impl ClassificationReport {
    pub fn verdicts(&self) -> [(&'static str, &Verdict); 4] {
        [
            ("cauchy", &self.cauchy),
            ("g_cauchy", &self.g_cauchy),
            ("pseudo_cauchy", &self.pseudo_cauchy),
            ("cofinally_cauchy", &self.cofinally_cauchy),
        ]
    }

    pub fn any_refuted(&self) -> bool {
        self.verdicts().iter().any(|(_, v)| v.is_refuted())
    }
}

/// Largest horizon for which the quadratic tail-modulus diagnostic runs off the line.
const QUADRATIC_DIAGNOSTIC_LIMIT: usize = 300;

fn tail_starts(k_max: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = std::iter::successors(Some(1usize), |k| Some(k * 2)).take_while(|&k| k < k_max).collect();
    ks.push(k_max);
    ks
}

fn diagnostics(c: &dyn Closeness, k_max: usize, cofinal_window: Option<usize>) -> Diagnostics {
    let n = c.len();
    let suffix_min: Option<Vec<f64>> = if let Some(coords) = c.coordinates() {
        let ext = suffix_extremes(coords);
        Some((0..n).map(|p| to_f64(&c.value(ext[p].0, ext[p].1))).collect())
    } else if n <= QUADRATIC_DIAGNOSTIC_LIMIT {
        let mut out = vec![1.0f64; n];
        let mut running = f64::INFINITY;
        for p in (0..n).rev() {
            for q in p..n {
                running = running.min(to_f64(&c.value(p, q)));
            }
            out[p] = running;
        }
        Some(out)
    } else {
        None
    };
    let tail_modulus = suffix_min
        .map(|mins| tail_starts(k_max).into_iter().map(|k| TailModulus { k, min_membership: mins[k - 1] }).collect())
        .unwrap_or_default();
    let steps: Vec<(usize, f64)> = (0..n.saturating_sub(1)).map(|i| (i + 1, to_f64(&c.value(i, i + 1)))).collect();
    let consecutive_tail_min = steps.iter().filter(|(i, _)| *i >= k_max).map(|&(_, v)| v).reduce(f64::min);
    let consecutive_last = steps[steps.len().saturating_sub(5)..].to_vec();
    Diagnostics { tail_modulus, max_cofinal_window: cofinal_window, consecutive_tail_min, consecutive_last }
}

/// Runs the four class checks and gathers diagnostics.
pub fn classify(space: &FuzzyMetricSpace, seq: &SequenceSpec, scale: &Scale) -> Result<ClassificationReport> {
    let c = fuzzy_closeness(space, seq, scale)?;
    let cauchy = cauchy_verdict(&c, scale.k_max);
    let g_cauchy = g_cauchy_verdict(&c, scale.k_max);
    let pseudo_cauchy = pseudo_cauchy_verdict(&c, scale.k_max);
    let (cofinally_cauchy, window) = cofinal_with_size(space, seq, scale)?;
    Ok(ClassificationReport {
        space: space.name().to_string(),
        sequence: seq.name().to_string(),
        scale: scale.clone(),
        cauchy,
        g_cauchy,
        pseudo_cauchy,
        cofinally_cauchy,
        diagnostics: diagnostics(&c, scale.k_max, window),
    })
}

/// The same four classes in a classical metric space at threshold `δ`.
pub mod metric {
    use super::*;

    fn closeness<'a>(m: &'a MetricSpace, seq: &SequenceSpec, scale: &MetricScale) -> Result<MetricCloseness<'a>> {
        scale.validate()?;
        if scale.horizon > seq.horizon() {
            return Err(Error::InvalidScale("horizon exceeds the sequence horizon".into()));
        }
        MetricCloseness::new(m, seq.terms(scale.horizon)?, &scale.delta)
    }

    pub fn is_cauchy(m: &MetricSpace, seq: &SequenceSpec, scale: &MetricScale) -> Result<Verdict> {
        Ok(cauchy_verdict(&closeness(m, seq, scale)?, scale.k_max))
    }

    pub fn is_g_cauchy(m: &MetricSpace, seq: &SequenceSpec, scale: &MetricScale) -> Result<Verdict> {
        Ok(g_cauchy_verdict(&closeness(m, seq, scale)?, scale.k_max))
    }

    pub fn is_pseudo_cauchy(m: &MetricSpace, seq: &SequenceSpec, scale: &MetricScale) -> Result<Verdict> {
        Ok(pseudo_cauchy_verdict(&closeness(m, seq, scale)?, scale.k_max))
    }

    /// Ball stage uses radius `δ/2` around sampled terms, so members are pairwise `< δ` apart.
    pub fn is_cofinally_cauchy(m: &MetricSpace, seq: &SequenceSpec, scale: &MetricScale) -> Result<Verdict> {
        if scale.m < 2 {
            return Err(Error::Domain("cofinal size threshold m must be at least 2".into()));
        }
        let c = closeness(m, seq, scale)?;
        let radius = &scale.delta / Q::from_integer(2.into());
        let ball = || {
            let mut best = Vec::new();
            for center in ball_centers(c.terms(), BALL_CENTER_BUDGET) {
                let found: Vec<usize> = c
                    .terms()
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| m.distance(x, &center).expect("validated") < radius)
                    .map(|(i, _)| i + 1)
                    .collect();
                if found.len() >= scale.m {
                    return Ok(Some(found));
                }
                if found.len() > best.len() {
                    best = found;
                }
            }
            Ok(Some(best))
        };
        Ok(cofinal_verdict(&c, scale.m, ball)?.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::verdict::Status;
    use proptest::prelude::*;

    fn line() -> FuzzyMetricSpace {
        crate::space::standard_from_metric(&MetricSpace::reals())
    }

    fn reals(name: &str, values: &[i64]) -> SequenceSpec {
        SequenceSpec::explicit(name, values.iter().map(|&v| Point::int(v)).collect())
    }

    fn harmonic(n: usize) -> SequenceSpec {
        SequenceSpec::from_prefix("harmonic", n, |n| {
            let mut acc = crate::rational::zero();
            (1..=n as i64)
                .map(|i| {
                    acc += q(1, i);
                    Point::Real(acc.clone())
                })
                .collect()
        })
    }

    #[test]
    fn constant_sequence_is_everything() {
        let s = line();
        let seq = reals("const", &[5; 20]);
        let scale = Scale::new(q(1, 10), q(1, 1), 20).with_k_max(5).with_m(3);
        let r = classify(&s, &seq, &scale).unwrap();
        for (name, v) in r.verdicts() {
            assert_eq!(v.status, Status::Satisfied, "{name}");
        }
        assert_eq!(r.cauchy.witness, Some(Witness::TailStart { k: 1 }));
    }

    #[test]
    fn identity_sequence_is_nothing() {
        let s = line();
        let seq = SequenceSpec::from_fn("n", 50, |n| Point::int(n as i64));
        let scale = Scale::new(q(1, 3), q(1, 1), 50).with_k_max(5).with_m(2);
        assert!(scale.metric_threshold() < one());
        let r = classify(&s, &seq, &scale).unwrap();
        for (name, v) in r.verdicts() {
            assert_eq!(v.status, Status::Refuted, "{name}");
        }
    }

    #[test]
    fn harmonic_cauchy_and_g_cauchy() {
        let s = line();
        let seq = harmonic(1000);
        let scale = Scale::new(q(1, 10), q(1, 1), 1000).with_k_max(100);
        let v = is_cauchy_at_scale(&s, &seq, &scale).unwrap();
        assert_eq!(v.status, Status::Refuted);
        match v.witness {
            Some(Witness::Pair { p, q: qq, .. }) => assert_eq!((p, qq), (100, 1000)),
            w => panic!("{w:?}"),
        }
        let g = is_g_cauchy_at_scale(&s, &seq, &scale).unwrap();
        assert_eq!(g, Verdict::satisfied(Some(Witness::TailStart { k: 9 })));
    }

    #[test]
    fn reciprocals_are_cauchy_at_scale() {
        let s = line();
        let seq = SequenceSpec::from_fn("1/n", 1000, |n| Point::ratio(1, n as i64));
        let scale = Scale::new(q(1, 10), q(1, 1), 1000).with_k_max(100);
        let v = is_cauchy_at_scale(&s, &seq, &scale).unwrap();
        // Brute force: the smallest tail start with 1/k - 1/1000 < 1/9 is k = 9.
        assert_eq!(v, Verdict::satisfied(Some(Witness::TailStart { k: 9 })));
    }

    #[test]
    fn alternating_is_not_g_cauchy() {
        let s = line();
        let seq = SequenceSpec::from_fn("alt", 40, |n| Point::int((n as i64 + 1) % 2));
        let scale = Scale::new(q(1, 10), q(1, 1), 40);
        let v = is_g_cauchy_at_scale(&s, &seq, &scale).unwrap();
        assert_eq!(v.status, Status::Refuted);
        assert!(matches!(v.witness, Some(Witness::Step { n: 39, .. })));
    }

    #[test]
    fn pseudo_cauchy_examples() {
        let s = line();
        let pairs = SequenceSpec::from_fn("pairs", 40, |n| Point::int(n.div_ceil(2) as i64));
        let scale = Scale::new(q(1, 3), q(1, 1), 40).with_k_max(10);
        assert!(is_pseudo_cauchy_at_scale(&s, &pairs, &scale).unwrap().is_satisfied());
        let ids = SequenceSpec::from_fn("n", 40, |n| Point::int(n as i64));
        let v = is_pseudo_cauchy_at_scale(&s, &ids, &scale).unwrap();
        assert_eq!(v, Verdict::refuted(Witness::FailingTail { k: 1 }));
    }

    #[test]
    fn cofinal_examples() {
        let s = line();
        let spikes = SequenceSpec::from_fn("spikes", 60, |n| Point::int(if n % 2 == 1 { 0 } else { (n / 2) as i64 }));
        let scale = Scale::new(q(1, 3), q(1, 1), 60).with_k_max(6).with_m(20);
        assert!(is_cofinally_cauchy_at_scale(&s, &spikes, &scale).unwrap().is_satisfied());
        let pairs = SequenceSpec::from_fn("pairs", 60, |n| Point::int(n.div_ceil(2) as i64));
        let v = is_cofinally_cauchy_at_scale(&s, &pairs, &scale.clone().with_m(3)).unwrap();
        assert_eq!(v.status, Status::Refuted);
        assert!(matches!(v.witness, Some(Witness::MaxSubset { size: 2, .. })));
        assert!(is_cofinally_cauchy_at_scale(&s, &pairs, &scale.with_m(1)).is_err());
    }

    #[test]
    fn cluster_examples() {
        let s = line();
        let alt = SequenceSpec::from_fn("alt", 40, |n| Point::int((n as i64 + 1) % 2));
        let scale = Scale::new(q(1, 10), q(1, 1), 40).with_depth(10);
        let v = clusters_at_scale(&s, &alt, &Point::int(0), &scale).unwrap();
        assert_eq!(v, Verdict::satisfied(Some(Witness::Chain { indices: (1..=10).map(|r| 2 * r - 1).collect() })));
        let recip = SequenceSpec::from_fn("1/n", 1000, |n| Point::ratio(1, n as i64));
        let scale = Scale::new(q(1, 10), q(1, 1), 1000).with_depth(10);
        let v = clusters_at_scale(&s, &recip, &Point::int(0), &scale).unwrap();
        // n/(n+1) > r/(r+1) iff n > r, so the earliest chain is 2, 3, ..., 11.
        assert_eq!(v, Verdict::satisfied(Some(Witness::Chain { indices: (2..=11).collect() })));
        let ids = SequenceSpec::from_fn("n", 100, |n| Point::int(n as i64));
        let scale = Scale::new(q(1, 10), q(1, 1), 100).with_depth(5);
        let v = clusters_at_scale(&s, &ids, &Point::int(50), &scale).unwrap();
        assert_eq!(v.status, Status::Refuted);
    }

    #[test]
    fn scale_validation() {
        assert!(Scale::new(q(1, 1), q(1, 1), 10).validate().is_err());
        assert!(Scale::new(q(1, 2), q(0, 1), 10).validate().is_err());
        assert!(Scale::new(q(1, 2), q(1, 1), 10).with_k_max(10).validate().is_err());
        assert!(Scale::new(q(1, 2), q(1, 1), 10).with_m(11).validate().is_err());
        assert!(Scale::new(q(1, 2), q(1, 1), 10).validate().is_ok());
        let seq = reals("short", &[1, 2, 3]);
        assert!(is_cauchy_at_scale(&line(), &seq, &Scale::new(q(1, 2), q(1, 1), 10)).is_err());
    }

    #[test]
    fn general_clique_matches_window_on_small_case() {
        let s = line();
        let seq = reals("mix", &[0, 5, 0, 1, 9, 1, 0, 2, 5, 5, 5]);
        let scale = Scale::new(q(1, 2), q(1, 1), 11).with_k_max(2).with_m(5);
        let fast = FuzzyCloseness::new(&s, seq.all_terms().unwrap(), &scale.epsilon, &scale.t).unwrap();
        let slow =
            FuzzyCloseness::new(&s, seq.all_terms().unwrap(), &scale.epsilon, &scale.t).unwrap().without_coordinates();
        let a = max_close_subset(&fast, 200, usize::MAX).unwrap();
        let b = max_close_subset(&slow, 200, usize::MAX).unwrap();
        // Only equal values are within distance 1; 5 occurs four times.
        assert_eq!(a.len(), b.len());
        assert_eq!(a, vec![1, 8, 9, 10]);
    }

    fn small_seq() -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(-6i64..6, 2..40)
    }

    fn scale_for(len: usize, eps_den: i64) -> Scale {
        Scale::new(q(1, eps_den), q(1, 1), len).with_k_max((len / 3).max(1)).with_m(3.min(len))
    }

    proptest! {
        #[test]
        fn line_shortcuts_agree_with_pairwise_scans(values in small_seq(), eps_den in 2i64..6) {
            let s = line();
            let seq = SequenceSpec::explicit("p", values.iter().map(|&v| Point::ratio(v, 3)).collect());
            let scale = scale_for(values.len(), eps_den);
            let fast = FuzzyCloseness::new(&s, seq.all_terms().unwrap(), &scale.epsilon, &scale.t).unwrap();
            let slow = FuzzyCloseness::new(&s, seq.all_terms().unwrap(), &scale.epsilon, &scale.t).unwrap().without_coordinates();
            prop_assert_eq!(cauchy_verdict(&fast, scale.k_max).status, cauchy_verdict(&slow, scale.k_max).status);
            prop_assert_eq!(
                cauchy_verdict(&fast, scale.k_max).is_satisfied().then(|| cauchy_verdict(&fast, scale.k_max).witness),
                cauchy_verdict(&slow, scale.k_max).is_satisfied().then(|| cauchy_verdict(&slow, scale.k_max).witness)
            );
            prop_assert_eq!(pseudo_cauchy_verdict(&fast, scale.k_max).status, pseudo_cauchy_verdict(&slow, scale.k_max).status);
            let a = max_close_subset(&fast, 200, usize::MAX).unwrap();
            let b = max_close_subset(&slow, 200, usize::MAX).unwrap();
            prop_assert_eq!(a.len(), b.len());
            for (i, &p) in b.iter().enumerate() {
                for &qq in &b[i + 1..] {
                    prop_assert!(slow.close(p, qq));
                }
            }
        }

        #[test]
        fn cauchy_implies_pseudo_cauchy(values in small_seq(), eps_den in 2i64..6) {
            let s = line();
            let seq = SequenceSpec::explicit("p", values.iter().map(|&v| Point::ratio(v, 4)).collect());
            let scale = scale_for(values.len(), eps_den);
            prop_assume!(scale.validate().is_ok());
            if is_cauchy_at_scale(&s, &seq, &scale).unwrap().is_satisfied() && scale.k_max + 2 <= values.len() {
                prop_assert!(is_pseudo_cauchy_at_scale(&s, &seq, &scale).unwrap().is_satisfied());
            }
        }

        #[test]
        fn cofinal_subset_gives_pseudo_cauchy_below_its_second_largest_index(values in small_seq(), eps_den in 2i64..6) {
            let s = line();
            let seq = SequenceSpec::explicit("p", values.iter().map(|&v| Point::ratio(v, 2)).collect());
            let scale = scale_for(values.len(), eps_den);
            prop_assume!(scale.validate().is_ok());
            let v = is_cofinally_cauchy_at_scale(&s, &seq, &scale).unwrap();
            if let (Status::Satisfied, Some(Witness::Subset { indices })) = (v.status, v.witness) {
                let second = indices[indices.len() - 2];
                for k in 1..second {
                    if k < values.len() {
                        let at = scale.clone().with_k_max(k);
                        prop_assert!(is_pseudo_cauchy_at_scale(&s, &seq, &at).unwrap().is_satisfied());
                    }
                }
            }
        }

        #[test]
        fn classification_is_deterministic(values in small_seq()) {
            let s = line();
            let seq = SequenceSpec::explicit("p", values.iter().map(|&v| Point::ratio(v, 5)).collect());
            let scale = scale_for(values.len(), 3);
            prop_assume!(scale.validate().is_ok());
            prop_assert_eq!(classify(&s, &seq, &scale).unwrap(), classify(&s, &seq, &scale).unwrap());
        }

        #[test]
        fn refutations_re_evaluate(values in small_seq(), eps_den in 2i64..6) {
            let s = line();
            let seq = SequenceSpec::explicit("p", values.iter().map(|&v| Point::ratio(v, 3)).collect());
            let scale = scale_for(values.len(), eps_den);
            prop_assume!(scale.validate().is_ok());
            let terms = seq.all_terms().unwrap();
            let th = scale.membership_threshold();
            if let Some(Witness::Pair { p, q: qq, .. }) = is_cauchy_at_scale(&s, &seq, &scale).unwrap().witness.filter(|_| true) {
                let m = s.eval_m(&terms[p - 1], &terms[qq - 1], &scale.t).unwrap();
                prop_assert!(m <= th && p >= scale.k_max);
            }
            if let Some(Witness::Step { n, .. }) = is_g_cauchy_at_scale(&s, &seq, &scale).unwrap().witness {
                let m = s.eval_m(&terms[n - 1], &terms[n], &scale.t).unwrap();
                prop_assert!(m <= th && n >= scale.k_max);
            }
        }
    }
}
