//! Named example spaces and sequences, each with the classification facts it is expected to
//! exhibit at a fixed scale. Facts are re-checked whenever an entry is verified.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extract::{cauchy_subsequence, SubsequenceSearch};
use crate::rational::{int, one, q, zero};
use crate::sequences::{
    clusters_at_scale, is_cauchy_at_scale, is_cofinally_cauchy_at_scale, is_g_cauchy_at_scale,
    is_pseudo_cauchy_at_scale, Scale, SequenceSpec,
};
use crate::space::{standard_from_metric, FuzzyMetricSpace, MetricSpace, Point, Universe};
use crate::verdict::Status;

pub const ENTRY_NAMES: [&str; 8] = [
    "note_space",
    "harmonic",
    "pseudo_pairs",
    "cofinal_spikes",
    "unit_interval_md",
    "reals_md",
    "integers_md",
    "triangle_wave",
];

pub const SEQUENCE_NAMES: [&str; 9] = [
    "harmonic",
    "pseudo_pairs",
    "cofinal_spikes",
    "triangle_wave",
    "reciprocal",
    "identity",
    "alternating",
    "note_x",
    "note_y",
];

/// How an expected fact is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// Stated in the literature for this example.
    Published,
    /// Immediate from how the example is built.
    ByConstruction,
    /// Established by an exhaustive finite computation.
    Computed,
}

type FactCheck = dyn Fn() -> Result<bool> + Send + Sync;

#[derive(Clone)]
pub struct Fact {
    pub description: String,
    pub basis: Basis,
    check: Arc<FactCheck>,
}

impl Fact {
    fn new(description: &str, basis: Basis, check: impl Fn() -> Result<bool> + Send + Sync + 'static) -> Self {
        Fact { description: description.into(), basis, check: Arc::new(check) }
    }

    pub fn holds(&self) -> Result<bool> {
        (self.check)()
    }
}

impl fmt::Debug for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fact({:?}, {:?})", self.description, self.basis)
    }
}

#[derive(Clone, Debug)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub space: FuzzyMetricSpace,
    pub sequence: Option<SequenceSpec>,
    /// The scale at which the entry's sequence is usually classified.
    pub scale: Option<Scale>,
    pub facts: Vec<Fact>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactReport {
    pub description: String,
    pub basis: Basis,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryReport {
    pub name: String,
    pub summary: String,
    pub space: String,
    pub sequence: Option<String>,
    pub scale: Option<Scale>,
    pub facts: Vec<FactReport>,
}

impl EntryReport {
    pub fn all_hold(&self) -> bool {
        self.facts.iter().all(|f| f.holds)
    }
}

impl GalleryEntry {
    pub fn verify(&self) -> Result<EntryReport> {
        let facts = self
            .facts
            .iter()
            .map(|f| Ok(FactReport { description: f.description.clone(), basis: f.basis, holds: f.holds()? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(EntryReport {
            name: self.name.into(),
            summary: self.summary.into(),
            space: self.space.name().into(),
            sequence: self.sequence.as_ref().map(|s| s.name().to_string()),
            scale: self.scale.clone(),
            facts,
        })
    }
}

pub fn reals_md() -> FuzzyMetricSpace {
    standard_from_metric(&MetricSpace::reals()).renamed("reals_md")
}

pub fn unit_interval_md() -> FuzzyMetricSpace {
    let m = MetricSpace::line("unit_interval", Universe::Interval { lo: zero(), hi: one() });
    standard_from_metric(&m).renamed("unit_interval_md")
}

pub fn integers_md() -> FuzzyMetricSpace {
    standard_from_metric(&MetricSpace::line("integers", Universe::Integers)).renamed("integers_md")
}

pub fn note_space() -> FuzzyMetricSpace {
    FuzzyMetricSpace::two_families()
}

/// Partial sums `1 + 1/2 + ... + 1/n`.
pub fn harmonic(horizon: usize) -> SequenceSpec {
    SequenceSpec::from_prefix("harmonic", horizon, |n| {
        let mut acc = zero();
        (1..=n as i64)
            .map(|i| {
                acc += q(1, i);
                Point::Real(acc.clone())
            })
            .collect()
    })
}

/// `1, 1, 2, 2, 3, 3, ...`
pub fn pseudo_pairs(horizon: usize) -> SequenceSpec {
    SequenceSpec::from_fn("pseudo_pairs", horizon, |n| Point::int(n.div_ceil(2) as i64))
}

/// `0, 1, 0, 2, 0, 3, ...`
pub fn cofinal_spikes(horizon: usize) -> SequenceSpec {
    SequenceSpec::from_fn("cofinal_spikes", horizon, |n| Point::int(if n % 2 == 1 { 0 } else { (n / 2) as i64 }))
}

/// Walk in `[0, 1]` starting at 0 with step `1/n` at step `n`, reflected at both ends.
pub fn triangle_wave(horizon: usize) -> SequenceSpec {
    SequenceSpec::from_prefix("triangle_wave", horizon, |n| {
        let mut out = Vec::with_capacity(n);
        let mut x = zero();
        let mut up = true;
        for i in 1..=n {
            out.push(Point::Real(x.clone()));
            let step = q(1, i as i64);
            if up {
                x += step;
            } else {
                x -= step;
            }
            if x > one() {
                x = int(2) - x;
                up = false;
            } else if x < zero() {
                x = -x;
                up = true;
            }
        }
        out
    })
}

/// `x_3, x_4, ...` (or `y_3, ...`) of the two-family space.
pub fn note_family(tag: char, horizon: usize) -> SequenceSpec {
    let name = if tag == 'x' { "note_x" } else { "note_y" };
    SequenceSpec::from_fn(name, horizon, move |n| Point::tagged(tag, n as u64 + 2))
}

pub fn named_sequence(name: &str, horizon: usize) -> Result<SequenceSpec> {
    Ok(match name {
        "harmonic" => harmonic(horizon),
        "pseudo_pairs" => pseudo_pairs(horizon),
        "cofinal_spikes" => cofinal_spikes(horizon),
        "triangle_wave" => triangle_wave(horizon),
        "reciprocal" => SequenceSpec::from_fn("reciprocal", horizon, |n| Point::ratio(1, n as i64)),
        "identity" => SequenceSpec::from_fn("identity", horizon, |n| Point::int(n as i64)),
        "alternating" => SequenceSpec::from_fn("alternating", horizon, |n| Point::int((n as i64 + 1) % 2)),
        "note_x" => note_family('x', horizon),
        "note_y" => note_family('y', horizon),
        other => {
            return Err(Error::UnknownName {
                kind: "sequence",
                name: other.into(),
                valid: SEQUENCE_NAMES.iter().map(|s| s.to_string()).collect(),
            })
        }
    })
}

/// Scale at which the harmonic sums separate G-Cauchy from cofinally Cauchy.
pub fn harmonic_scale() -> Scale {
    Scale::new(q(1, 100), one(), 1000).with_k_max(100).with_m(50)
}

fn status_is(v: Result<crate::Verdict>, s: Status) -> Result<bool> {
    Ok(v?.status == s)
}

pub fn build_named(name: &str) -> Result<GalleryEntry> {
    use Basis::*;
    use Status::{Refuted, Satisfied};
    let entry = match name {
        "note_space" => {
            let space = note_space();
            let (sp, sp2) = (space.clone(), space.clone());
            GalleryEntry {
                name: "note_space",
                summary:
                    "two families x_n, y_n (n >= 3) under the Lukasiewicz t-norm; both are Cauchy, neither converges",
                space: space.clone(),
                sequence: Some(note_family('x', 198)),
                scale: Some(Scale::new(q(1, 10), one(), 198)),
                facts: vec![
                    Fact::new("fuzzy metric axioms hold on indices 3..20, t in {1/2, 1, 2}", Published, move || {
                        let pts: Vec<Point> =
                            (3..=20).flat_map(|n| [Point::tagged('x', n), Point::tagged('y', n)]).collect();
                        status_is(sp.check_axioms(&pts, &[q(1, 2), one(), int(2)]), Satisfied)
                    }),
                    Fact::new(
                        "(x_n) and (y_n) are Cauchy at epsilon 1/10 for t in {1/2, 1, 2}",
                        Published,
                        move || {
                            for tag in ['x', 'y'] {
                                for t in [q(1, 2), one(), int(2)] {
                                    let scale = Scale::new(q(1, 10), t, 198);
                                    if !is_cauchy_at_scale(&sp2, &note_family(tag, 198), &scale)?.is_satisfied() {
                                        return Ok(false);
                                    }
                                }
                            }
                            Ok(true)
                        },
                    ),
                ],
            }
        }
        "harmonic" => {
            let space = reals_md();
            let (a, b, c) = (space.clone(), space.clone(), space.clone());
            let coarse = Scale::new(q(1, 10), one(), 1000).with_k_max(100);
            let coarse2 = coarse.clone();
            GalleryEntry {
                name: "harmonic",
                summary: "harmonic partial sums on the line: G-Cauchy but not cofinally Cauchy",
                space,
                sequence: Some(harmonic(1000)),
                scale: Some(harmonic_scale()),
                facts: vec![
                    Fact::new("G-Cauchy at epsilon 1/10, t 1, k_max 100, N 1000", Computed, move || {
                        status_is(is_g_cauchy_at_scale(&a, &harmonic(1000), &coarse), Satisfied)
                    }),
                    Fact::new("not Cauchy at epsilon 1/10, t 1, k_max 100, N 1000", Computed, move || {
                        status_is(is_cauchy_at_scale(&b, &harmonic(1000), &coarse2), Refuted)
                    }),
                    Fact::new("not cofinally Cauchy at epsilon 1/100, t 1, m 50, N 1000", Published, move || {
                        status_is(is_cofinally_cauchy_at_scale(&c, &harmonic(1000), &harmonic_scale()), Refuted)
                    }),
                ],
            }
        }
        "pseudo_pairs" => {
            let space = reals_md();
            let (a, b) = (space.clone(), space.clone());
            let scale = Scale::new(q(1, 10), one(), 200).with_m(3);
            let scale2 = scale.clone();
            GalleryEntry {
                name: "pseudo_pairs",
                summary: "1, 1, 2, 2, 3, 3, ...: pseudo-Cauchy but not cofinally Cauchy",
                space,
                sequence: Some(pseudo_pairs(200)),
                scale: Some(scale.clone()),
                facts: vec![
                    Fact::new("pseudo-Cauchy at epsilon 1/10, t 1", ByConstruction, move || {
                        status_is(is_pseudo_cauchy_at_scale(&a, &pseudo_pairs(200), &scale), Satisfied)
                    }),
                    Fact::new("no three pairwise-close terms at epsilon 1/10, t 1", Computed, move || {
                        status_is(is_cofinally_cauchy_at_scale(&b, &pseudo_pairs(200), &scale2), Refuted)
                    }),
                ],
            }
        }
        "cofinal_spikes" => {
            let space = reals_md();
            let (a, b, c) = (space.clone(), space.clone(), space.clone());
            let scale = Scale::new(q(1, 10), one(), 200).with_m(50);
            let (s2, s3) = (scale.clone(), scale.clone());
            GalleryEntry {
                name: "cofinal_spikes",
                summary: "0, 1, 0, 2, 0, 3, ...: cofinally Cauchy through the zeros, neither Cauchy nor G-Cauchy",
                space,
                sequence: Some(cofinal_spikes(200)),
                scale: Some(scale.clone()),
                facts: vec![
                    Fact::new("cofinally Cauchy with m 50 at epsilon 1/10, t 1", ByConstruction, move || {
                        status_is(is_cofinally_cauchy_at_scale(&a, &cofinal_spikes(200), &scale), Satisfied)
                    }),
                    Fact::new("not Cauchy at epsilon 1/10, t 1", ByConstruction, move || {
                        status_is(is_cauchy_at_scale(&b, &cofinal_spikes(200), &s2), Refuted)
                    }),
                    Fact::new("not G-Cauchy at epsilon 1/10, t 1", ByConstruction, move || {
                        status_is(is_g_cauchy_at_scale(&c, &cofinal_spikes(200), &s3), Refuted)
                    }),
                ],
            }
        }
        "unit_interval_md" => {
            let space = unit_interval_md();
            let (a, b) = (space.clone(), space.clone());
            GalleryEntry {
                name: "unit_interval_md",
                summary: "rationals in [0, 1] with the standard fuzzy metric; compact completion, so every G-Cauchy sequence has a Cauchy subsequence",
                space,
                sequence: None,
                scale: None,
                facts: vec![
                    Fact::new("fuzzy metric axioms hold on the grid k/10, t in {1/2, 1, 2}", ByConstruction, move || {
                        let pts: Vec<Point> = (0..=10).map(|k| Point::ratio(k, 10)).collect();
                        status_is(a.check_axioms(&pts, &[q(1, 2), one(), int(2)]), Satisfied)
                    }),
                    Fact::new("the grid k/100 is covered by 11 balls of radius 1/10 at t 1", Computed, move || {
                        let pts: Vec<Point> = (0..=100).map(|k| Point::ratio(k, 100)).collect();
                        status_is(b.precompact_at_scale(&pts, &q(1, 10), &one(), 11), Satisfied)
                    }),
                ],
            }
        }
        "reals_md" => {
            let space = reals_md();
            let (a, b) = (space.clone(), space.clone());
            let scale = Scale::new(q(1, 10), one(), 1000).with_k_max(100);
            GalleryEntry {
                name: "reals_md",
                summary: "the rational line with the standard fuzzy metric",
                space,
                sequence: Some(named_sequence("reciprocal", 1000)?),
                scale: Some(scale.clone()),
                facts: vec![
                    Fact::new("fuzzy metric axioms hold on a sample of rationals", ByConstruction, move || {
                        let pts: Vec<Point> = (-6..=6).map(|k| Point::ratio(k, 3)).collect();
                        status_is(a.check_axioms(&pts, &[q(1, 3), one(), int(3)]), Satisfied)
                    }),
                    Fact::new("1/n is Cauchy at epsilon 1/10, t 1 with tail start 9", Computed, move || {
                        let v = is_cauchy_at_scale(&b, &named_sequence("reciprocal", 1000)?, &scale)?;
                        Ok(v.witness == Some(crate::Witness::TailStart { k: 9 }))
                    }),
                ],
            }
        }
        "integers_md" => {
            let space = integers_md();
            let (a, b, c) = (space.clone(), space.clone(), space.clone());
            let scale = Scale::new(q(1, 3), one(), 100).with_depth(5);
            let s2 = scale.clone();
            GalleryEntry {
                name: "integers_md",
                summary: "the integers with the standard fuzzy metric: uniformly discrete at small epsilon",
                space,
                sequence: Some(named_sequence("identity", 100)?),
                scale: Some(scale.clone()),
                facts: vec![
                    Fact::new("x_n = n is not pseudo-Cauchy at epsilon 1/3, t 1", ByConstruction, move || {
                        status_is(is_pseudo_cauchy_at_scale(&a, &named_sequence("identity", 100)?, &scale), Refuted)
                    }),
                    Fact::new("x_n = n does not cluster at 50 with depth 5", ByConstruction, move || {
                        status_is(
                            clusters_at_scale(&b, &named_sequence("identity", 100)?, &Point::int(50), &s2),
                            Refuted,
                        )
                    }),
                    Fact::new("1..100 needs more than 10 balls of radius 1/3 at t 1", Computed, move || {
                        let pts: Vec<Point> = (1..=100).map(Point::int).collect();
                        status_is(c.precompact_at_scale(&pts, &q(1, 3), &one(), 10), Refuted)
                    }),
                ],
            }
        }
        "triangle_wave" => {
            let space = unit_interval_md();
            let (a, b, c, d) = (space.clone(), space.clone(), space.clone(), space.clone());
            let scale = Scale::new(q(1, 10), one(), 2000).with_k_max(200).with_depth(10);
            let (s2, s3, s4) = (scale.clone(), scale.clone(), scale.clone());
            GalleryEntry {
                name: "triangle_wave",
                summary: "reflected walk in [0, 1] with steps 1/n: G-Cauchy, not Cauchy, clusters at every point",
                space,
                sequence: Some(triangle_wave(2000)),
                scale: Some(scale.clone()),
                facts: vec![
                    Fact::new("G-Cauchy at epsilon 1/10, t 1", ByConstruction, move || {
                        status_is(is_g_cauchy_at_scale(&a, &triangle_wave(2000), &scale), Satisfied)
                    }),
                    Fact::new("not Cauchy at epsilon 1/10, t 1, k_max 200", Computed, move || {
                        status_is(is_cauchy_at_scale(&b, &triangle_wave(2000), &s2), Refuted)
                    }),
                    Fact::new("clusters at 0 with depth 10 within N 2000", Computed, move || {
                        status_is(clusters_at_scale(&c, &triangle_wave(2000), &Point::int(0), &s3), Satisfied)
                    }),
                    Fact::new("a Cauchy subsequence around 0 reaches depth 10", Computed, move || {
                        let found = cauchy_subsequence(&d, &triangle_wave(2000), &[Point::int(0)], &s4)?;
                        Ok(matches!(found, SubsequenceSearch::Found(_)))
                    }),
                ],
            }
        }
        other => {
            return Err(Error::UnknownName {
                kind: "gallery entry",
                name: other.into(),
                valid: ENTRY_NAMES.iter().map(|s| s.to_string()).collect(),
            })
        }
    };
    Ok(entry)
}

/// The named fuzzy metric spaces usable in descriptors.
pub fn named_space(name: &str) -> Result<FuzzyMetricSpace> {
    match name {
        "note_space" => Ok(note_space()),
        "reals_md" => Ok(reals_md()),
        "unit_interval_md" => Ok(unit_interval_md()),
        "integers_md" => Ok(integers_md()),
        other => Err(Error::UnknownName {
            kind: "space",
            name: other.into(),
            valid: ["note_space", "reals_md", "unit_interval_md", "integers_md"].map(String::from).to_vec(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::to_f64;
    use crate::sequences::classify;

    #[test]
    fn every_entry_builds_and_its_facts_hold() {
        for name in ENTRY_NAMES {
            let entry = build_named(name).unwrap();
            let report = entry.verify().unwrap();
            for fact in &report.facts {
                assert!(fact.holds, "{name}: {}", fact.description);
            }
        }
    }

    #[test]
    fn unknown_names_list_the_valid_ones() {
        match build_named("nope") {
            Err(Error::UnknownName { valid, .. }) => assert_eq!(valid.len(), ENTRY_NAMES.len()),
            other => panic!("{other:?}"),
        }
        assert!(named_sequence("nope", 10).is_err());
    }

    #[test]
    fn harmonic_classification_vector() {
        let r = classify(&reals_md(), &harmonic(1000), &harmonic_scale()).unwrap();
        assert_eq!(r.cauchy.status, Status::Refuted);
        assert_eq!(r.g_cauchy.status, Status::Satisfied);
        assert_eq!(r.g_cauchy.witness, Some(crate::Witness::TailStart { k: 99 }));
        assert_eq!(r.pseudo_cauchy.status, Status::Satisfied);
        assert_eq!(r.cofinally_cauchy.status, Status::Refuted);
        // Float oracle: the longest run of partial sums spanning less than 1/99.
        let h: Vec<f64> = (1..=1000)
            .scan(0.0, |acc, i| {
                *acc += 1.0 / i as f64;
                Some(*acc)
            })
            .collect();
        let mut best = 0;
        let mut lo = 0;
        for hi in 0..h.len() {
            while h[hi] - h[lo] >= 1.0 / 99.0 {
                lo += 1;
            }
            best = best.max(hi - lo + 1);
        }
        assert_eq!(r.diagnostics.max_cofinal_window, Some(best));
        assert!(best < 50);
    }

    #[test]
    fn triangle_wave_stays_in_the_unit_interval_and_matches_a_float_walk() {
        let terms = triangle_wave(2000).all_terms().unwrap();
        let mut x = 0.0f64;
        let mut up = true;
        for (i, p) in terms.iter().enumerate() {
            let v = p.as_real().unwrap();
            assert!(*v >= zero() && *v <= one());
            assert!((to_f64(v) - x).abs() < 1e-9, "term {}", i + 1);
            x += if up { 1.0 } else { -1.0 } / (i + 1) as f64;
            if x > 1.0 {
                x = 2.0 - x;
                up = false;
            } else if x < 0.0 {
                x = -x;
                up = true;
            }
        }
    }

    #[test]
    fn triangle_wave_cluster_chain_matches_float_schedule() {
        let scale = Scale::new(q(1, 10), one(), 2000).with_depth(10);
        let v = clusters_at_scale(&unit_interval_md(), &triangle_wave(2000), &Point::int(0), &scale).unwrap();
        let terms: Vec<f64> =
            triangle_wave(2000).all_terms().unwrap().iter().map(|p| to_f64(p.as_real().unwrap())).collect();
        let mut chain = Vec::new();
        let mut next = 0;
        for r in 1..=10 {
            // 1/(1+x) > 1 - 1/(r+1) iff x < 1/r.
            let i = (next..terms.len()).find(|&i| terms[i] < 1.0 / r as f64).unwrap();
            chain.push(i + 1);
            next = i + 1;
        }
        assert_eq!(v.witness, Some(crate::Witness::Chain { indices: chain }));
    }
}
