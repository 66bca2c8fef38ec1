//! Continuous t-norms over exact rationals and an exhaustive grid check of the t-norm laws.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{in_unit_interval, int, one, render, Num, Q};
use crate::verdict::{Law, Verdict, Witness};

type BinaryOp = dyn Fn(&Q, &Q) -> Q + Send + Sync;

/// A user-supplied binary operation on `[0, 1]` with a declared Lipschitz constant.
#[derive(Clone)]
pub struct CustomTNorm {
    name: String,
    op: Arc<BinaryOp>,
    lipschitz: Q,
}

#[derive(Clone)]
pub enum TNorm {
    Minimum,
    Product,
    Lukasiewicz,
    Custom(CustomTNorm),
}

impl TNorm {
    pub fn custom(name: impl Into<String>, op: impl Fn(&Q, &Q) -> Q + Send + Sync + 'static) -> Self {
        Self::custom_with_lipschitz(name, op, one())
    }

    pub fn custom_with_lipschitz(
        name: impl Into<String>,
        op: impl Fn(&Q, &Q) -> Q + Send + Sync + 'static,
        lipschitz: Q,
    ) -> Self {
        TNorm::Custom(CustomTNorm { name: name.into(), op: Arc::new(op), lipschitz })
    }

    pub fn name(&self) -> &str {
        match self {
            TNorm::Minimum => "min",
            TNorm::Product => "prod",
            TNorm::Lukasiewicz => "luk",
            TNorm::Custom(c) => &c.name,
        }
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self, TNorm::Custom(_))
    }

    /// Constant `C` in the sampled continuity bound `|T(a,b) - T(a',b')| <= C (|a-a'| + |b-b'|)`.
    pub fn lipschitz(&self) -> Q {
        match self {
            TNorm::Custom(c) => c.lipschitz.clone(),
            _ => one(),
        }
    }

    /// `a * b` for inputs in `[0, 1]`.
    pub fn apply(&self, a: &Q, b: &Q) -> Result<Q> {
        for v in [a, b] {
            if !in_unit_interval(v) {
                return Err(Error::Domain(format!("t-norm {} applied to {} outside [0,1]", self.name(), render(v))));
            }
        }
        Ok(self.combine(a, b))
    }

    /// Unchecked evaluation; callers guarantee both inputs lie in `[0, 1]`.
    pub(crate) fn combine(&self, a: &Q, b: &Q) -> Q {
        match self {
            TNorm::Minimum => a.min(b).clone(),
            TNorm::Product => a * b,
            TNorm::Lukasiewicz => {
                let s = a + b - Q::one();
                if s.is_negative() {
                    Q::zero()
                } else {
                    s
                }
            }
            TNorm::Custom(c) => (c.op)(a, b),
        }
    }

    /// Exhaustive check of the t-norm laws on `{0, s, 2s, ..., 1}`.
    ///
    /// Checks, in order: range, identity (from `a = 1` downward), commutativity,
    /// monotonicity, associativity, and the sampled Lipschitz bound between grid neighbours.
    /// The first violation becomes the witness.
    pub fn verify_axioms(&self, grid_step: &Q) -> Result<Verdict> {
        if !grid_step.is_positive() || *grid_step > Q::new(1.into(), 2.into()) {
            return Err(Error::Domain(format!("grid step {} must lie in (0, 1/2]", render(grid_step))));
        }
        let grid = unit_grid(grid_step);
        let n = grid.len();
        let table: Vec<Vec<Q>> = grid.iter().map(|a| grid.iter().map(|b| self.combine(a, b)).collect()).collect();
        let witness = |law, a: &Q, b: &Q, c: Option<&Q>, lhs: &Q, rhs: &Q| Witness::TNorm {
            law,
            a: a.into(),
            b: b.into(),
            c: c.map(Num::from),
            lhs: lhs.into(),
            rhs: rhs.into(),
        };
        let mut checks: i64 = 0;

        for i in 0..n {
            for j in 0..n {
                checks += 1;
                if !in_unit_interval(&table[i][j]) {
                    let bound = if table[i][j].is_negative() { Q::zero() } else { one() };
                    return Ok(Verdict::refuted(witness(Law::Range, &grid[i], &grid[j], None, &table[i][j], &bound)));
                }
            }
        }
        let top = n - 1;
        for i in (0..n).rev() {
            checks += 1;
            if table[i][top] != grid[i] {
                return Ok(Verdict::refuted(witness(
                    Law::Identity,
                    &grid[i],
                    &grid[top],
                    None,
                    &table[i][top],
                    &grid[i],
                )));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                checks += 1;
                if table[i][j] != table[j][i] {
                    return Ok(Verdict::refuted(witness(
                        Law::Commutativity,
                        &grid[i],
                        &grid[j],
                        None,
                        &table[i][j],
                        &table[j][i],
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in j + 1..n {
                    checks += 1;
                    if table[i][j] > table[i][k] {
                        return Ok(Verdict::refuted(witness(
                            Law::Monotonicity,
                            &grid[i],
                            &grid[j],
                            Some(&grid[k]),
                            &table[i][j],
                            &table[i][k],
                        )));
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ab = &table[i][j];
                for k in 0..n {
                    checks += 1;
                    let left = self.combine(ab, &grid[k]);
                    let right = self.combine(&grid[i], &table[j][k]);
                    if left != right {
                        return Ok(Verdict::refuted(witness(
                            Law::Associativity,
                            &grid[i],
                            &grid[j],
                            Some(&grid[k]),
                            &left,
                            &right,
                        )));
                    }
                }
            }
        }
        let c = self.lipschitz();
        for i in 0..n {
            for j in 0..n {
                let neighbours = [(i + 1, j), (i, j + 1)];
                for (i2, j2) in neighbours {
                    if i2 >= n || j2 >= n {
                        continue;
                    }
                    checks += 1;
                    let jump = (&table[i][j] - &table[i2][j2]).abs();
                    let bound = &c * ((&grid[i] - &grid[i2]).abs() + (&grid[j] - &grid[j2]).abs());
                    if jump > bound {
                        return Ok(Verdict::refuted(witness(Law::Lipschitz, &grid[i], &grid[j], None, &jump, &bound)));
                    }
                }
            }
        }
        Ok(Verdict::satisfied(None).with_certificate("law instances checked", int(checks)))
    }
}

/// `{0, s, 2s, ...}` up to 1, with 1 appended when `1/s` is not an integer.
pub fn unit_grid(step: &Q) -> Vec<Q> {
    let mut grid = Vec::new();
    let mut x = Q::zero();
    while x <= Q::one() {
        grid.push(x.clone());
        x += step;
    }
    if grid.last().is_none_or(|last| !last.is_one()) {
        grid.push(one());
    }
    grid
}

impl fmt::Debug for TNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TNorm({})", self.name())
    }
}

impl FromStr for TNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(TNorm::Minimum),
            "prod" => Ok(TNorm::Product),
            "luk" => Ok(TNorm::Lukasiewicz),
            other => Err(Error::UnknownName {
                kind: "t-norm",
                name: other.to_string(),
                valid: vec!["min".into(), "prod".into(), "luk".into()],
            }),
        }
    }
}
