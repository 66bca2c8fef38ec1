//! Constructive procedures: distinct-term subsequences, Cauchy subsequences through nested
//! shrinking balls, cofinal index sets inside a single ball, and approximation of completion
//! points by points of a dense subset.

use std::collections::HashMap;

use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use crate::completion::{dist_interval, CompletionPoint};
use crate::error::{Error, Result};
use crate::rational::{dyadic, int, one, q, render, Q};
use crate::sequences::{shrinking_ball_chain, Scale, SequenceSpec};
use crate::space::{FuzzyMetricSpace, Point};
use crate::tnorm::TNorm;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    DistinctTerms,
    ShrinkingBalls,
}

/// Strictly increasing 1-based indices into a sequence, with how they were produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexChain {
    pub indices: Vec<usize>,
    pub provenance: Provenance,
    /// Centre of the balls, for chains built around a candidate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidate: Option<String>,
    pub horizon: usize,
    pub note: String,
}

impl IndexChain {
    pub fn depth(&self) -> usize {
        self.indices.len()
    }

    pub fn is_valid(&self) -> bool {
        self.indices.windows(2).all(|w| w[0] < w[1])
            && self.indices.first().is_none_or(|&i| i >= 1)
            && self.indices.last().is_none_or(|&i| i <= self.horizon)
    }

    /// The chain as a subsequence of `seq`.
    pub fn apply(&self, seq: &SequenceSpec) -> Result<SequenceSpec> {
        seq.subsequence(&self.indices)
    }
}

fn check_terms(space: &FuzzyMetricSpace, terms: &[Point]) -> Result<()> {
    match terms.iter().find(|p| !space.contains(p)) {
        Some(p) => Err(Error::UnknownPoint(p.to_string(), space.name().to_string())),
        None => Ok(()),
    }
}

/// Last-occurrence recursion: `r_1` is the last occurrence of `x_1` and `r_{n+1}` the last
/// occurrence of `x_{r_n + 1}`, all within the horizon. Chain values are pairwise distinct.
pub fn distinct_subsequence(space: &FuzzyMetricSpace, seq: &SequenceSpec) -> Result<IndexChain> {
    let terms = seq.all_terms()?;
    check_terms(space, &terms)?;
    let n = terms.len();
    let mut last: HashMap<&Point, usize> = HashMap::new();
    let mut count: HashMap<&Point, usize> = HashMap::new();
    for (i, p) in terms.iter().enumerate() {
        last.insert(p, i);
        *count.entry(p).or_default() += 1;
    }
    if let Some((value, &c)) = terms.iter().map(|p| (p, &count[p])).find(|(_, &c)| 2 * c > n) {
        return Err(Error::ConstantSubsequence { value: value.to_string(), count: c, horizon: n });
    }
    let mut indices = Vec::new();
    let mut next = 0;
    while next < n {
        let r = last[&terms[next]];
        indices.push(r + 1);
        next = r + 1;
    }
    Ok(IndexChain {
        indices,
        provenance: Provenance::DistinctTerms,
        candidate: None,
        horizon: n,
        note: format!("last occurrences taken within the horizon {n}; later terms unexamined"),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SubsequenceSearch {
    Found(IndexChain),
    /// No candidate reached the requested depth at this scale.
    NotFound {
        best_depth: usize,
        best_candidate: String,
    },
}

impl SubsequenceSearch {
    pub fn chain(&self) -> Option<&IndexChain> {
        match self {
            SubsequenceSearch::Found(c) => Some(c),
            SubsequenceSearch::NotFound { .. } => None,
        }
    }
}

/// Nested shrinking balls around each candidate in turn; the first candidate (in list order)
/// whose schedule reaches depth `R` wins.
pub fn cauchy_subsequence(
    space: &FuzzyMetricSpace,
    seq: &SequenceSpec,
    candidates: &[Point],
    scale: &Scale,
) -> Result<SubsequenceSearch> {
    scale.validate()?;
    if candidates.is_empty() {
        return Err(Error::Domain("candidate list is empty".into()));
    }
    if let Some(c) = candidates.iter().find(|c| !space.contains(c)) {
        return Err(Error::UnknownPoint(c.to_string(), space.name().to_string()));
    }
    let terms = seq.terms(scale.horizon)?;
    check_terms(space, &terms)?;
    let chains: Vec<Vec<usize>> =
        candidates.par_iter().map(|c| shrinking_ball_chain(space, &terms, c, &scale.t, scale.depth)).collect();
    if let Some(i) = chains.iter().position(|c| c.len() == scale.depth) {
        return Ok(SubsequenceSearch::Found(IndexChain {
            indices: chains[i].clone(),
            provenance: Provenance::ShrinkingBalls,
            candidate: Some(candidates[i].to_string()),
            horizon: scale.horizon,
            note: format!("depth {} reached within horizon {}", scale.depth, scale.horizon),
        }));
    }
    let best = (0..chains.len()).max_by_key(|&i| (chains[i].len(), std::cmp::Reverse(i))).expect("nonempty");
    Ok(SubsequenceSearch::NotFound { best_depth: chains[best].len(), best_candidate: candidates[best].to_string() })
}

/// A scale at which every chain of depth `R >= 2` returned by [`cauchy_subsequence`] at time
/// `t` is Cauchy.
///
/// The last two chain terms lie in the ball of radius `δ = 1/R` at time `t` around the
/// candidate, so the triangle axiom gives `M > T(1-δ, 1-δ)` between them at time `2t`.
/// Epsilon is chosen just above `1 - T(1-δ, 1-δ)`.
pub fn chain_cauchy_scale(tnorm: &TNorm, depth: usize, t: &Q) -> Result<Scale> {
    if depth < 2 {
        return Err(Error::Domain("chain guarantee needs depth at least 2".into()));
    }
    let keep = one() - q(1, depth as i64);
    let floor = tnorm.combine(&keep, &keep);
    if !floor.is_positive() {
        return Err(Error::Domain(format!("{} collapses 1 - 1/{depth} to 0", tnorm.name())));
    }
    let epsilon = one() - floor * q(999, 1000);
    Ok(Scale::new(epsilon, t * int(2), depth).with_k_max(depth - 1).with_m(2).with_depth(depth))
}

/// First `δ = 2^-k`, `k = 1..=40`, with `T(1-δ, 1-δ) > 1 - ε`.
pub fn delta_for(tnorm: &TNorm, epsilon: &Q) -> Result<Q> {
    let target = one() - epsilon;
    (1..=40)
        .map(dyadic)
        .find(|d| {
            let keep = one() - d;
            tnorm.combine(&keep, &keep) > target
        })
        .ok_or_else(|| Error::DeltaSearchFailed { epsilon: render(epsilon) })
}

/// 1-based indices of terms inside `B(center, δ, t/2)` for the δ of [`delta_for`].
pub(crate) fn ball_members(
    space: &FuzzyMetricSpace,
    terms: &[Point],
    center: &Point,
    epsilon: &Q,
    t: &Q,
) -> Result<Vec<usize>> {
    let delta = delta_for(space.tnorm(), epsilon)?;
    let half = t / int(2);
    let floor = one() - delta;
    Ok(terms
        .iter()
        .enumerate()
        .filter(|(_, x)| space.mode().gt(&space.raw_m(x, center, &half), &floor))
        .map(|(i, _)| i + 1)
        .collect())
}

/// All indices `n <= N` with `x_n` in the ball `B(center, δ, t/2)`, if there are at least `m`.
/// Any two of them satisfy `M(x_p, x_q, t) > 1 - ε` by the triangle axiom.
pub fn cofinal_subset_via_ball(
    space: &FuzzyMetricSpace,
    seq: &SequenceSpec,
    center: &Point,
    epsilon: &Q,
    t: &Q,
    m: usize,
) -> Result<Option<Vec<usize>>> {
    if !epsilon.is_positive() || epsilon >= &one() {
        return Err(Error::Domain(format!("epsilon {} not in (0,1)", render(epsilon))));
    }
    if !t.is_positive() {
        return Err(Error::Domain(format!("t {} not positive", render(t))));
    }
    if m < 2 {
        return Err(Error::Domain(format!("size threshold m = {m} must be at least 2")));
    }
    if !space.contains(center) {
        return Err(Error::UnknownPoint(center.to_string(), space.name().to_string()));
    }
    let terms = seq.all_terms()?;
    check_terms(space, &terms)?;
    let found = ball_members(space, &terms, center, epsilon, t)?;
    Ok((found.len() >= m).then_some(found))
}

/// Source of base points near a completion point.
pub trait DenseGenerator: Sync {
    /// Candidate base points, expected within `radius` of `target` when the subset is dense.
    fn candidates(&self, target: &CompletionPoint, radius: &Q) -> Vec<Q>;
}

/// Rationals with denominator a power of `base` (dyadic for 2, decimal for 10).
#[derive(Clone, Copy, Debug)]
pub struct GridRationals {
    pub base: u32,
}

impl DenseGenerator for GridRationals {
    fn candidates(&self, target: &CompletionPoint, radius: &Q) -> Vec<Q> {
        let base = Q::from_integer(self.base.max(2).into());
        let mut step = one();
        while &step * int(4) > *radius {
            step /= &base;
        }
        let approx = target.approximation(precision_for(&step));
        let low = (&approx / &step).floor() * &step;
        vec![low.clone(), low + step]
    }
}

/// A fixed finite set, tried whole.
#[derive(Clone, Debug)]
pub struct FinitePoints(pub Vec<Q>);

impl DenseGenerator for FinitePoints {
    fn candidates(&self, _: &CompletionPoint, _: &Q) -> Vec<Q> {
        self.0.clone()
    }
}

/// Smallest `j` with `2^-j <= x`.
fn precision_for(x: &Q) -> u32 {
    (1..=4096).find(|&j| dyadic(j) <= *x).unwrap_or(4096)
}

/// Approximating base points with their certified distance bounds.
#[derive(Clone, Debug)]
pub struct Approximation {
    pub points: Vec<Q>,
    /// Upper bound on the completion distance `|x_n - y_n|`, strictly below `radii[n]`.
    pub bounds: Vec<Q>,
    pub radii: Vec<Q>,
}

impl Approximation {
    pub fn sequence(&self, name: impl Into<String>) -> SequenceSpec {
        SequenceSpec::explicit(name, self.points.iter().cloned().map(Point::Real).collect())
    }
}

/// Required distance so that the standard fuzzy metric at time `1/(n+1)` exceeds `1 - 1/(n+1)`.
pub fn approximation_radius(n: usize) -> Q {
    q(1, (n * (n + 1)) as i64)
}

/// Base points `x_n` with `M(x_n, y_n, 1/(n+1)) > 1 - 1/(n+1)` under the lifted standard fuzzy
/// metric, i.e. `|x_n - y_n| < 1/(n(n+1))`, each certified by a distance interval.
pub fn approximate_from_dense(target: &[CompletionPoint], dense: &dyn DenseGenerator) -> Result<Approximation> {
    let rows: Vec<Result<(Q, Q, Q)>> = target
        .par_iter()
        .enumerate()
        .map(|(i, y)| {
            let n = i + 1;
            let radius = approximation_radius(n);
            let j = precision_for(&radius) + 3;
            for x in dense.candidates(y, &radius) {
                let d = dist_interval(&CompletionPoint::embed(x.clone()), y, j)?;
                if d.hi < radius {
                    return Ok((x, d.hi, radius));
                }
            }
            Err(Error::DensityExhausted { index: n, radius: render(&radius) })
        })
        .collect();
    let mut out = Approximation { points: Vec::new(), bounds: Vec::new(), radii: Vec::new() };
    for row in rows {
        let (x, b, r) = row?;
        out.points.push(x);
        out.bounds.push(b);
        out.radii.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::is_cauchy_at_scale;
    use crate::space::{standard_from_metric, MetricSpace};
    use proptest::prelude::*;

    fn line() -> FuzzyMetricSpace {
        standard_from_metric(&MetricSpace::reals())
    }

    fn ints(values: &[i64]) -> SequenceSpec {
        SequenceSpec::explicit("s", values.iter().map(|&v| Point::int(v)).collect())
    }

    #[test]
    fn distinct_subsequence_of_doubled_integers() {
        let seq = SequenceSpec::from_fn("pairs", 10, |n| Point::int(n.div_ceil(2) as i64));
        let chain = distinct_subsequence(&line(), &seq).unwrap();
        assert_eq!(chain.indices, vec![2, 4, 6, 8, 10]);
        assert_eq!(chain.provenance, Provenance::DistinctTerms);
        let distinct = SequenceSpec::from_fn("n", 12, |n| Point::int(n as i64));
        assert_eq!(distinct_subsequence(&line(), &distinct).unwrap().indices, (1..=12).collect::<Vec<_>>());
        let constant = ints(&[7; 9]);
        assert!(matches!(distinct_subsequence(&line(), &constant), Err(Error::ConstantSubsequence { count: 9, .. })));
    }

    #[test]
    fn cauchy_subsequence_finds_zero_positions() {
        let seq = SequenceSpec::from_fn("zeros", 40, |n| {
            if n % 2 == 1 {
                Point::int(0)
            } else {
                Point::ratio(1, (n / 2) as i64)
            }
        });
        let scale = Scale::new(q(1, 10), q(1, 1), 40).with_depth(10);
        let found = cauchy_subsequence(&line(), &seq, &[Point::int(0)], &scale).unwrap();
        assert_eq!(found.chain().unwrap().indices, (0..10).map(|r| 2 * r + 1).collect::<Vec<_>>());
    }

    #[test]
    fn cauchy_subsequence_of_integers_fails() {
        let seq = SequenceSpec::from_fn("n", 100, |n| Point::int(n as i64));
        let candidates: Vec<Point> = (0..=10).map(Point::int).collect();
        let scale = Scale::new(q(1, 10), q(1, 1), 100).with_depth(3);
        match cauchy_subsequence(&line(), &seq, &candidates, &scale).unwrap() {
            SubsequenceSearch::NotFound { best_depth, .. } => assert!(best_depth < 3),
            found => panic!("{found:?}"),
        }
    }

    #[test]
    fn chain_scale_certifies_found_chains() {
        let seq = SequenceSpec::from_fn("1/n", 500, |n| Point::ratio(1, n as i64));
        let scale = Scale::new(q(1, 10), q(1, 1), 500).with_depth(10);
        let chain = cauchy_subsequence(&line(), &seq, &[Point::int(0)], &scale).unwrap();
        let sub = chain.chain().unwrap().apply(&seq).unwrap();
        let check = chain_cauchy_scale(&TNorm::Product, 10, &q(1, 1)).unwrap();
        assert!(is_cauchy_at_scale(&line(), &sub, &check).unwrap().is_satisfied());
    }

    #[test]
    fn ball_subset_examples() {
        let spikes = SequenceSpec::from_fn("spikes", 30, |n| Point::int(if n % 2 == 1 { 0 } else { (n / 2) as i64 }));
        let found = cofinal_subset_via_ball(&line(), &spikes, &Point::int(0), &q(1, 4), &q(1, 1), 2).unwrap();
        assert_eq!(found, Some((0..15).map(|i| 2 * i + 1).collect()));
        let ids = SequenceSpec::from_fn("n", 30, |n| Point::int(n as i64));
        let none = cofinal_subset_via_ball(&line(), &ids, &Point::int(5), &q(1, 4), &q(1, 1), 3).unwrap();
        assert_eq!(none, None);
        assert!(cofinal_subset_via_ball(&line(), &ids, &Point::int(5), &q(1, 4), &q(1, 1), 1).is_err());
    }

    #[test]
    fn delta_search() {
        // (1 - 1/8)^2 = 49/64 > 3/4 while (1 - 1/4)^2 = 9/16 is not.
        assert_eq!(delta_for(&TNorm::Product, &q(1, 4)).unwrap(), q(1, 8));
        assert!(matches!(delta_for(&TNorm::Lukasiewicz, &dyadic(45)), Err(Error::DeltaSearchFailed { .. })));
    }

    #[test]
    fn approximations_of_constant_embedded_target() {
        let target = vec![CompletionPoint::embed(q(3, 7)); 20];
        let approx = approximate_from_dense(&target, &FinitePoints(vec![q(5, 1), q(3, 7)])).unwrap();
        assert!(approx.points.iter().all(|x| *x == q(3, 7)));
    }

    #[test]
    fn sqrt_two_needs_a_close_rational() {
        assert_eq!(approximation_radius(3), q(1, 12));
        let target = vec![CompletionPoint::sqrt(2); 30];
        let approx = approximate_from_dense(&target, &GridRationals { base: 10 }).unwrap();
        for (n, x) in approx.points.iter().enumerate() {
            let d = dist_interval(&CompletionPoint::embed(x.clone()), &target[n], 40).unwrap();
            assert!(d.hi < approximation_radius(n + 1));
        }
        // |7/5 - sqrt 2| is about 0.0142, above 1/(n(n+1)) from n = 8 on.
        let sparse = approximate_from_dense(&target, &FinitePoints(vec![q(7, 5), q(3, 2)]));
        assert!(matches!(sparse, Err(Error::DensityExhausted { index: 8, .. })));
    }

    proptest! {
        #[test]
        fn distinct_chain_values_are_distinct(values in prop::collection::vec(0i64..8, 1..60)) {
            let seq = ints(&values);
            match distinct_subsequence(&line(), &seq) {
                Ok(chain) => {
                    prop_assert!(chain.is_valid());
                    let picked: Vec<i64> = chain.indices.iter().map(|&i| values[i - 1]).collect();
                    let mut sorted = picked.clone();
                    sorted.sort_unstable();
                    sorted.dedup();
                    prop_assert_eq!(sorted.len(), picked.len());
                    prop_assert_eq!(chain.indices.last().copied(), Some(values.len()));
                }
                Err(Error::ConstantSubsequence { count, .. }) => prop_assert!(2 * count > values.len()),
                Err(e) => prop_assert!(false, "{e}"),
            }
        }

        #[test]
        fn ball_subsets_are_pairwise_close(values in prop::collection::vec(-20i64..20, 2..50), c in -20i64..20, e in 2i64..20) {
            let s = line();
            let seq = SequenceSpec::explicit("s", values.iter().map(|&v| Point::ratio(v, 16)).collect());
            let (eps, t) = (q(1, e), q(1, 1));
            if let Some(found) = cofinal_subset_via_ball(&s, &seq, &Point::ratio(c, 16), &eps, &t, 2).unwrap() {
                for &a in &found {
                    for &b in &found {
                        let m = s.eval_m(&Point::ratio(values[a - 1], 16), &Point::ratio(values[b - 1], 16), &t).unwrap();
                        prop_assert!(m > one() - &eps);
                    }
                }
            }
        }
    }
}
