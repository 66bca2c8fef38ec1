//! Seeded property suites. Each case draws its inputs from a ChaCha stream keyed by
//! `(seed, case index)`, so reports are identical across runs and thread counts.

use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::completion::{dist_interval, CompletionPoint};
use crate::error::{Error, Result};
use crate::extract::{
    approximate_from_dense, approximation_radius, cauchy_subsequence, chain_cauchy_scale, cofinal_subset_via_ball,
    GridRationals, SubsequenceSearch,
};
use crate::gallery;
use crate::rational::{dyadic, int, one, q, render, zero, Q};
use crate::sequences::{
    clusters_at_scale, is_cauchy_at_scale, is_cofinally_cauchy_at_scale, is_g_cauchy_at_scale,
    is_pseudo_cauchy_at_scale, metric, MetricScale, Scale, SequenceSpec,
};
use crate::space::{standard_from_metric, FuzzyMetricSpace, MetricSpace, Point, Subset};
use crate::tnorm::TNorm;
use crate::verdict::{Law, Status, Verdict, Witness};

pub const DEFAULT_SEED: u64 = 7;

pub const SUITE_IDS: [&str; 12] = [
    "transfer_pcau",
    "transfer_g",
    "transfer_pseudo",
    "transfer_cofinal",
    "closed_subspace",
    "continuous_image",
    "g_has_cauchy_subseq",
    "dense_approx",
    "note_space_axioms",
    "ball_soundness",
    "tnorm_axioms",
    "gallery_facts",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Number of generated cases; `None` uses the suite's default.
    pub cases: Option<usize>,
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        SuiteConfig { seed, cases: None }
    }

    pub fn with_cases(mut self, cases: usize) -> Self {
        self.cases = Some(cases);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseFailure {
    pub case: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    /// Lowest-numbered failing case; replay with the same seed.
    pub first_failure: Option<CaseFailure>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.inconclusive == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Outcome {
    Pass,
    Fail(String),
    Inconclusive,
}

fn outcome(ok: bool, detail: impl FnOnce() -> String) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail(detail())
    }
}

fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

type CaseFn = fn(&mut ChaCha8Rng) -> Result<Outcome>;

fn suite_plan(id: &str) -> Option<(usize, CaseFn)> {
    let plan: (usize, CaseFn) = match id {
        "transfer_pcau" => (100, |r| transfer_case(r, Class::Cauchy)),
        "transfer_g" => (100, |r| transfer_case(r, Class::GCauchy)),
        "transfer_pseudo" => (100, |r| transfer_case(r, Class::Pseudo)),
        "transfer_cofinal" => (100, |r| transfer_case(r, Class::Cofinal)),
        "closed_subspace" => (50, closed_subspace_case),
        "continuous_image" => (50, continuous_image_case),
        "g_has_cauchy_subseq" => (50, g_has_cauchy_subseq_case),
        "dense_approx" => (20, dense_approx_case),
        "note_space_axioms" => (1, |_| note_space_axioms_case()),
        "ball_soundness" => (100, ball_soundness_case),
        "tnorm_axioms" => (1, |_| tnorm_axioms_case()),
        "gallery_facts" => (1, |_| gallery_facts_case()),
        _ => return None,
    };
    Some(plan)
}

pub fn run_suite(id: &str, config: &SuiteConfig) -> Result<SuiteReport> {
    let (default_cases, case) = suite_plan(id).ok_or_else(|| Error::UnknownName {
        kind: "suite",
        name: id.into(),
        valid: SUITE_IDS.iter().map(|s| s.to_string()).collect(),
    })?;
    let cases = config.cases.unwrap_or(default_cases);
    let start = Instant::now();
    let outcomes: Vec<Outcome> = (0..cases)
        .into_par_iter()
        .map(|i| case(&mut case_rng(config.seed, i)).unwrap_or_else(|e| Outcome::Fail(format!("error: {e}"))))
        .collect();
    let mut report = SuiteReport {
        suite: id.into(),
        seed: config.seed,
        cases,
        passed: 0,
        failed: 0,
        inconclusive: 0,
        first_failure: None,
        wall_time: Duration::ZERO,
    };
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Outcome::Pass => report.passed += 1,
            Outcome::Inconclusive => report.inconclusive += 1,
            Outcome::Fail(detail) => {
                report.failed += 1;
                if report.first_failure.is_none() {
                    report.first_failure = Some(CaseFailure { case: i, detail });
                }
            }
        }
    }
    report.wall_time = start.elapsed();
    Ok(report)
}

fn pick<T: Clone>(rng: &mut ChaCha8Rng, items: &[T]) -> T {
    items.choose(rng).expect("nonempty").clone()
}

fn random_rational(rng: &mut ChaCha8Rng, max_den: i64) -> Q {
    let d = rng.gen_range(2..=max_den);
    q(rng.gen_range(1..d), d)
}

/// Reflected walk in `[0, 1]` with dyadic steps of size at most `3/32` shrinking like `1/n`.
fn decaying_walk(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    let mut x = q(rng.gen_range(0..=16), 16);
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        out.push(x.clone());
        let level = 5 + usize::BITS - 1 - i.leading_zeros();
        let step = dyadic(level) * int(rng.gen_range(1..=3));
        if rng.gen_bool(0.5) {
            x += step;
        } else {
            x -= step;
        }
        if x > one() {
            x = int(2) - x;
        } else if x.is_negative() {
            x = -x;
        }
    }
    out
}

/// Sequences from several families, with values on a lattice of `unit` so that distances
/// land exactly on the threshold.
fn lattice_sequence(rng: &mut ChaCha8Rng, n: usize, unit: &Q) -> Vec<Q> {
    let k = |v: i64| unit * int(v);
    match rng.gen_range(0..6) {
        0 => {
            let mut x = 0i64;
            (0..n)
                .map(|_| {
                    x = (x + rng.gen_range(-3..=3)).clamp(-20, 20);
                    k(x)
                })
                .collect()
        }
        1 => decaying_walk(rng, n).into_iter().map(|x| x * unit * int(8)).collect(),
        2 => (1..=n as i64).map(|i| if i % 2 == 1 { k(rng.gen_range(0..=2)) } else { k(3 * i) }).collect(),
        3 => (0..n).map(|_| k(rng.gen_range(-40..=40)) / int(4)).collect(),
        4 => (1..=n as i64).map(|i| k((i + 1) / 2)).collect(),
        _ => {
            // Consecutive gaps of two or three units; two units is exactly the threshold.
            let mut values: Vec<Q> = (0..n as i64).map(|i| k(3 * i - rng.gen_range(0..=1) * (i % 2))).collect();
            if rng.gen_bool(0.5) {
                let later = rng.gen_range(1..n);
                values[later] = values[rng.gen_range(0..later)].clone();
            }
            values
        }
    }
}

/// A finite metric from lattice points in the plane under the `l1` norm.
fn table_metric(coords: &[(i64, i64)], unit: &Q) -> (MetricSpace, Vec<Point>) {
    let labels: Vec<String> = (0..coords.len()).map(|i| format!("p{i}")).collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let matrix = coords
        .iter()
        .enumerate()
        .map(|(i, a)| {
            coords
                .iter()
                .enumerate()
                .map(|(j, b)| {
                    // Coincident coordinates still get distinct points.
                    let d = (a.0 - b.0).abs() + (a.1 - b.1).abs();
                    let d = if i != j && d == 0 { 1 } else { d };
                    unit * int(d)
                })
                .collect()
        })
        .collect();
    let metric = MetricSpace::table("lattice", &refs, matrix).expect("square table");
    let points = labels.iter().map(|l| Point::named(l)).collect();
    (metric, points)
}

/// Terms drawn from a small random table, or distinct points of an even lattice
/// (pairwise at least two units apart) with at most one repeat.
fn table_sequence(rng: &mut ChaCha8Rng, n: usize, unit: &Q) -> (MetricSpace, Vec<Point>) {
    if rng.gen_bool(0.5) {
        let size = rng.gen_range(5..=12);
        let coords: Vec<(i64, i64)> = (0..size).map(|_| (rng.gen_range(0..6), rng.gen_range(0..6))).collect();
        let (m, points) = table_metric(&coords, unit);
        let terms = (0..n).map(|_| pick(rng, &points)).collect();
        (m, terms)
    } else {
        let mut cells: Vec<(i64, i64)> = (0..11).flat_map(|a| (0..11).map(move |b| (2 * a, 2 * b))).collect();
        cells.shuffle(rng);
        let (m, points) = table_metric(&cells[..n], unit);
        let mut terms = points;
        if rng.gen_bool(0.5) {
            let later = rng.gen_range(1..n);
            terms[later] = terms[rng.gen_range(0..later)].clone();
        }
        (m, terms)
    }
}

#[derive(Clone, Copy, Debug)]
enum Class {
    Cauchy,
    GCauchy,
    Pseudo,
    Cofinal,
}

/// Status of one class in `(X, M_d, ·)` and in `(X, d)` at `δ = tε/(1-ε)`, with a description.
fn transfer_statuses(rng: &mut ChaCha8Rng, class: Class) -> Result<(Status, Status, String)> {
    let epsilon = random_rational(rng, 12);
    let t = q(rng.gen_range(1..=8), rng.gen_range(1..=4));
    let n = rng.gen_range(20..=120);
    let mut scale = Scale::new(epsilon, t, n).with_k_max(rng.gen_range(1..=n / 3)).with_m(rng.gen_range(2..=6));
    let delta = scale.metric_threshold();
    // Half-threshold lattice: pairs at exactly delta occur often.
    let unit = &delta / int(2);
    let (space, seq) = if rng.gen_bool(0.5) {
        let values = lattice_sequence(rng, n, &unit);
        (MetricSpace::reals(), SequenceSpec::explicit("lattice", values.into_iter().map(Point::Real).collect()))
    } else {
        let (m, terms) = table_sequence(rng, n, &unit);
        (m, SequenceSpec::explicit("table", terms))
    };
    scale.horizon = seq.horizon();
    let fuzzy = standard_from_metric(&space);
    let ms = MetricScale::matching(&scale);
    let (fv, mv): (Verdict, Verdict) = match class {
        Class::Cauchy => (is_cauchy_at_scale(&fuzzy, &seq, &scale)?, metric::is_cauchy(&space, &seq, &ms)?),
        Class::GCauchy => (is_g_cauchy_at_scale(&fuzzy, &seq, &scale)?, metric::is_g_cauchy(&space, &seq, &ms)?),
        Class::Pseudo => {
            (is_pseudo_cauchy_at_scale(&fuzzy, &seq, &scale)?, metric::is_pseudo_cauchy(&space, &seq, &ms)?)
        }
        Class::Cofinal => {
            (is_cofinally_cauchy_at_scale(&fuzzy, &seq, &scale)?, metric::is_cofinally_cauchy(&space, &seq, &ms)?)
        }
    };
    let detail = format!(
        "{class:?} on {} (eps {}, t {}, delta {}): fuzzy {} vs metric {}",
        seq.name(),
        render(&scale.epsilon),
        render(&scale.t),
        render(&delta),
        fv.status.as_str(),
        mv.status.as_str()
    );
    Ok((fv.status, mv.status, detail))
}

fn transfer_case(rng: &mut ChaCha8Rng, class: Class) -> Result<Outcome> {
    let (fuzzy, classical, detail) = transfer_statuses(rng, class)?;
    if fuzzy == Status::Inconclusive || classical == Status::Inconclusive {
        return Ok(Outcome::Inconclusive);
    }
    Ok(outcome(fuzzy == classical, || detail))
}

/// A finite subset `A` of the unit interval is closed; a candidate in `A` that the sequence
/// clusters at in the whole interval is also a cluster point within the subspace `A`.
fn closed_subspace_case(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let parent = gallery::unit_interval_md();
    let mut grid: Vec<i64> = (0..=20).collect();
    grid.shuffle(rng);
    let a: Vec<Point> = grid[..rng.gen_range(3..=8)].iter().map(|&k| Point::ratio(k, 20)).collect();
    let sub = parent.subspace(Subset::Finite(a.clone()))?;
    let n = 60;
    let seq = SequenceSpec::explicit("in_A", (0..n).map(|_| pick(rng, &a)).collect());
    let scale = Scale::new(q(1, 10), q(rng.gen_range(1..=4), 2), n).with_depth(rng.gen_range(2..=8));
    let mut found = false;
    for c in &a {
        let whole = clusters_at_scale(&parent, &seq, c, &scale)?;
        if whole.is_satisfied() {
            found = true;
            let inside = clusters_at_scale(&sub, &seq, c, &scale)?;
            if inside != whole {
                return Ok(Outcome::Fail(format!("candidate {c}: interval {:?} vs subspace {:?}", whole, inside)));
            }
        }
    }
    Ok(if found { Outcome::Pass } else { Outcome::Fail("no candidate in A clusters despite pigeonhole".into()) })
}

/// Piecewise-linear map on `[0, 1]` with breakpoints on the `1/8` grid.
struct PiecewiseLinear {
    breaks: Vec<Q>,
    values: Vec<Q>,
}

impl PiecewiseLinear {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let pieces = rng.gen_range(1..=4);
        let mut cuts: Vec<i64> = (1..8).collect();
        cuts.shuffle(rng);
        let mut inner: Vec<i64> = cuts[..pieces - 1].to_vec();
        inner.sort_unstable();
        let breaks: Vec<Q> = std::iter::once(0).chain(inner).chain(std::iter::once(8)).map(|k| q(k, 8)).collect();
        let values = breaks.iter().map(|_| q(rng.gen_range(0..=8), 8)).collect();
        PiecewiseLinear { breaks, values }
    }

    fn lipschitz(&self) -> Q {
        (1..self.breaks.len())
            .map(|i| ((&self.values[i] - &self.values[i - 1]) / (&self.breaks[i] - &self.breaks[i - 1])).abs())
            .max()
            .unwrap_or_else(zero)
    }

    fn apply(&self, x: &Q) -> Q {
        let i = (1..self.breaks.len()).find(|&i| *x <= self.breaks[i]).unwrap_or(self.breaks.len() - 1);
        let (x0, x1) = (&self.breaks[i - 1], &self.breaks[i]);
        let (y0, y1) = (&self.values[i - 1], &self.values[i]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// A G-Cauchy walk in `[0, 1]` long enough that `m` terms share a bin narrower than `δ`
/// has an image under an `L`-Lipschitz map that is cofinally Cauchy at threshold `Lδ`.
fn continuous_image_case(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let f = PiecewiseLinear::random(rng);
    let delta = q(1, pick(rng, &[8, 10, 16, 20]));
    let m = rng.gen_range(2..=5);
    let bins = (one() / &delta).to_integer().try_into().unwrap_or(20usize) + 1;
    let n = m * bins;
    let xs = decaying_walk(rng, n);
    let domain = gallery::unit_interval_md();
    let seq = SequenceSpec::explicit("walk", xs.iter().cloned().map(Point::Real).collect());
    let g = Scale::new(q(1, 10), one(), n);
    if !is_g_cauchy_at_scale(&domain, &seq, &g)?.is_satisfied() {
        return Ok(Outcome::Fail("generated walk is not G-Cauchy at eps 1/10, t 1".into()));
    }
    let l = f.lipschitz();
    let image_delta = if l.is_zero() { delta.clone() } else { &l * &delta };
    let image = SequenceSpec::explicit("image", xs.iter().map(|x| Point::Real(f.apply(x))).collect());
    let eps = &image_delta / (one() + &image_delta);
    let scale = Scale::new(eps, one(), n).with_k_max(1).with_m(m);
    let v = is_cofinally_cauchy_at_scale(&gallery::reals_md(), &image, &scale)?;
    Ok(outcome(v.is_satisfied(), || {
        format!("image not cofinally Cauchy: L {}, delta {}, m {m}, verdict {:?}", render(&l), render(&delta), v)
    }))
}

/// G-Cauchy walks in the unit interval have a Cauchy subsequence found around a grid candidate.
fn g_has_cauchy_subseq_case(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let space = gallery::unit_interval_md();
    let n = 500;
    let seq = SequenceSpec::explicit("walk", decaying_walk(rng, n).into_iter().map(Point::Real).collect());
    let scale = Scale::new(q(1, 10), one(), n).with_k_max(50).with_depth(10);
    if !is_g_cauchy_at_scale(&space, &seq, &scale)?.is_satisfied() {
        return Ok(Outcome::Fail("generated walk is not G-Cauchy".into()));
    }
    let candidates: Vec<Point> = (0..=100).map(|k| Point::ratio(k, 100)).collect();
    match cauchy_subsequence(&space, &seq, &candidates, &scale)? {
        SubsequenceSearch::Found(chain) => {
            let check = chain_cauchy_scale(space.tnorm(), scale.depth, &scale.t)?;
            let v = is_cauchy_at_scale(&space, &chain.apply(&seq)?, &check)?;
            Ok(outcome(v.is_satisfied() && chain.is_valid(), || {
                format!("chain {:?} fails its re-check: {:?}", chain.indices, v)
            }))
        }
        SubsequenceSearch::NotFound { best_depth, .. } => {
            Ok(Outcome::Fail(format!("no chain of depth 10; best {best_depth}")))
        }
    }
}

/// Approximations of `√k` (optionally moving as `√k + 1/n`) by grid rationals, re-checked at
/// higher precision.
fn dense_approx_case(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let k = loop {
        let k: u64 = rng.gen_range(2..=60);
        let r = (k as f64).sqrt().round() as u64;
        if r * r != k {
            break k;
        }
    };
    let moving = rng.gen_bool(0.5);
    let n = 40;
    let target: Vec<CompletionPoint> = (1..=n)
        .map(|i| {
            let base = CompletionPoint::sqrt(k);
            if moving {
                base.offset(q(1, i as i64))
            } else {
                base
            }
        })
        .collect();
    let dense = GridRationals { base: pick(rng, &[2, 10]) };
    let approx = approximate_from_dense(&target, &dense)?;
    for (i, x) in approx.points.iter().enumerate() {
        let d = dist_interval(&CompletionPoint::embed(x.clone()), &target[i], 64)?;
        if d.hi >= approximation_radius(i + 1) {
            return Ok(Outcome::Fail(format!("n = {}: distance up to {} for sqrt({k})", i + 1, render(&d.hi))));
        }
    }
    Ok(Outcome::Pass)
}

fn note_space_axioms_case() -> Result<Outcome> {
    let space = gallery::note_space();
    let pts: Vec<Point> = (3..=30).flat_map(|n| [Point::tagged('x', n), Point::tagged('y', n)]).collect();
    let v = space.check_axioms(&pts, &[q(1, 2), one(), int(2)])?;
    Ok(outcome(v.is_satisfied(), || format!("{:?}", v.witness)))
}

/// Ball-construction output re-evaluated pair by pair, over spaces with product,
/// Łukasiewicz and minimum t-norms.
fn ball_soundness_case(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let epsilon = q(rng.gen_range(1..=6), pick(rng, &[10, 12, 16]));
    let t = q(rng.gen_range(1..=6), 2);
    let n = rng.gen_range(20..=80);
    let (space, terms): (FuzzyMetricSpace, Vec<Point>) = match rng.gen_range(0..3) {
        0 => {
            let unit = q(1, pick(rng, &[64, 100, 256]));
            let values = (1..=n as i64)
                .map(|i| if i % 2 == 1 { &unit * int(rng.gen_range(0..=3)) } else { int(i) })
                .map(Point::Real)
                .collect();
            (gallery::reals_md(), values)
        }
        1 => {
            let pool: Vec<Point> = (20..60).map(|i| Point::tagged(if i % 7 == 0 { 'y' } else { 'x' }, i)).collect();
            let pool = &pool[..rng.gen_range(2..=pool.len())];
            (gallery::note_space(), (0..n).map(|_| pick(rng, pool)).collect())
        }
        _ => {
            let labels: Vec<String> = (0..9).map(|i| format!("u{i}")).collect();
            let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
            let (near, far) = (q(rng.gen_range(1..=5), 100), q(rng.gen_range(20..=90), 100));
            let matrix = (0..9)
                .map(|i| {
                    (0..9)
                        .map(|j| match (i == j, i / 3 == j / 3) {
                            (true, _) => one(),
                            (false, true) => one() - &near,
                            (false, false) => one() - &far,
                        })
                        .collect()
                })
                .collect();
            let space = FuzzyMetricSpace::table("clusters", &refs, matrix, TNorm::Minimum)?;
            let points: Vec<Point> = labels.iter().map(|l| Point::named(l)).collect();
            (space, (0..n).map(|_| pick(rng, &points)).collect())
        }
    };
    // The most frequent term as centre guarantees at least two members.
    let mut counts: Vec<(usize, &Point)> = Vec::new();
    for p in &terms {
        match counts.iter_mut().find(|(_, x)| *x == p) {
            Some(entry) => entry.0 += 1,
            None => counts.push((1, p)),
        }
    }
    let center = counts.iter().max_by_key(|(c, _)| *c).map(|(_, p)| (*p).clone()).expect("nonempty");
    let seq = SequenceSpec::explicit("sample", terms.clone());
    let Some(found) = cofinal_subset_via_ball(&space, &seq, &center, &epsilon, &t, 2)? else {
        return Ok(Outcome::Inconclusive);
    };
    let floor = one() - &epsilon;
    for (i, &p) in found.iter().enumerate() {
        for &r in &found[i + 1..] {
            let m = space.eval_m(&terms[p - 1], &terms[r - 1], &t)?;
            if m <= floor {
                return Ok(Outcome::Fail(format!("pair ({p}, {r}) in {} has M = {}", space.name(), render(&m))));
            }
        }
    }
    Ok(Outcome::Pass)
}

fn tnorm_axioms_case() -> Result<Outcome> {
    let step = q(1, 50);
    for t in [TNorm::Minimum, TNorm::Product, TNorm::Lukasiewicz] {
        let v = t.verify_axioms(&step)?;
        if !v.is_satisfied() {
            return Ok(Outcome::Fail(format!("{} violates {:?}", t.name(), v.witness)));
        }
    }
    let broken = halved_product();
    let v = broken.verify_axioms(&q(1, 10))?;
    let expected = Witness::TNorm {
        law: Law::Identity,
        a: one().into(),
        b: one().into(),
        c: None,
        lhs: q(1, 2).into(),
        rhs: one().into(),
    };
    Ok(outcome(v.is_refuted() && v.witness.as_ref() == Some(&expected), || format!("halved product: {:?}", v)))
}

/// `T(a, b) = ab/2`: fails the identity law at `(1, 1)`.
pub fn halved_product() -> TNorm {
    TNorm::custom("halved_product", |a: &Q, b: &Q| a * b / int(2))
}

fn gallery_facts_case() -> Result<Outcome> {
    for name in gallery::ENTRY_NAMES {
        let report = gallery::build_named(name)?.verify()?;
        if let Some(f) = report.facts.iter().find(|f| !f.holds) {
            return Ok(Outcome::Fail(format!("{name}: {}", f.description)));
        }
    }
    Ok(Outcome::Pass)
}
