//! Three-valued results of finite-scale checks, with their evidence.

use serde::Serialize;

use crate::rational::Num;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    #[serde(rename = "SATISFIED_AT_SCALE")]
    Satisfied,
    #[serde(rename = "REFUTED_AT_SCALE")]
    Refuted,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Satisfied => "SATISFIED_AT_SCALE",
            Status::Refuted => "REFUTED_AT_SCALE",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// Which fuzzy metric axiom a violating tuple breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// Value outside `[0, 1]`.
    Range,
    /// `M(x,y,t) > 0`.
    Positivity,
    /// `M(x,y,t) = 1` iff `x = y`.
    Identity,
    Symmetry,
    /// `M(x,y,t) * M(y,z,s) <= M(x,z,t+s)`.
    Triangle,
    /// `M(x,y,.)` nondecreasing.
    Monotone,
    /// Metric axioms.
    MetricIdentity,
    MetricSymmetry,
    MetricTriangle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    Range,
    Identity,
    Commutativity,
    Associativity,
    Monotonicity,
    Lipschitz,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Tail start from which every pair is close.
    TailStart {
        k: usize,
    },
    /// A pair of (1-based) indices and the closeness value between them.
    Pair {
        p: usize,
        q: usize,
        value: Num,
    },
    /// A consecutive pair `(n, n+1)` that is not close.
    Step {
        n: usize,
        value: Num,
    },
    /// A tail start beyond which no two distinct indices are close.
    FailingTail {
        k: usize,
    },
    /// Pairwise-close index set.
    Subset {
        indices: Vec<usize>,
    },
    /// Largest pairwise-close index set found by the exact search.
    MaxSubset {
        size: usize,
        indices: Vec<usize>,
    },
    /// Strictly increasing index chain.
    Chain {
        indices: Vec<usize>,
    },
    /// Shrinking-ball schedule stalled after `reached` steps.
    Stalled {
        reached: usize,
        chain: Vec<usize>,
    },
    Axiom {
        axiom: Axiom,
        points: Vec<String>,
        times: Vec<Num>,
        lhs: Num,
        rhs: Option<Num>,
    },
    TNorm {
        law: Law,
        a: Num,
        b: Num,
        c: Option<Num>,
        lhs: Num,
        rhs: Num,
    },
    Cover {
        size: usize,
        centers: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub detail: String,
    pub margin: Num,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

impl Verdict {
    pub fn satisfied(witness: Option<Witness>) -> Self {
        Verdict { status: Status::Satisfied, witness, certificate: None }
    }

    pub fn refuted(witness: Witness) -> Self {
        Verdict { status: Status::Refuted, witness: Some(witness), certificate: None }
    }

    pub fn inconclusive(witness: Option<Witness>) -> Self {
        Verdict { status: Status::Inconclusive, witness, certificate: None }
    }

    pub fn with_certificate(mut self, detail: impl Into<String>, margin: impl Into<Num>) -> Self {
        self.certificate = Some(Certificate { detail: detail.into(), margin: margin.into() });
        self
    }

    pub fn is_satisfied(&self) -> bool {
        self.status == Status::Satisfied
    }

    pub fn is_refuted(&self) -> bool {
        self.status == Status::Refuted
    }
}
