//! CDCL SAT solving and projected model enumeration.

mod enumerate;
mod heap;
mod solver;

use alloc::vec::Vec;
use core::fmt;

pub use enumerate::{Enumerator, Interrupted};
pub use solver::{SolveResult, Solver, SolverStats};

/// Literal: variable index shifted left once, low bit set when negated.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: u32, negated: bool) -> Lit {
        Lit(var << 1 | negated as u32)
    }

    pub fn pos(var: u32) -> Lit {
        Lit::new(var, false)
    }

    pub fn neg(var: u32) -> Lit {
        Lit::new(var, true)
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub(crate) fn index(self) -> usize {
        self.0 as usize
    }

    /// DIMACS integer (1-based, sign for polarity).
    pub fn to_dimacs(self) -> i64 {
        let v = self.var() as i64 + 1;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }

    /// Inverse of [`to_dimacs`](Self::to_dimacs); `None` for 0.
    pub fn from_dimacs(x: i64) -> Option<Lit> {
        if x == 0 {
            return None;
        }
        Some(Lit::new((x.unsigned_abs() - 1) as u32, x < 0))
    }

    /// Truth value of the literal under `model`.
    pub fn eval(self, model: &[bool]) -> bool {
        model[self.var() as usize] != self.is_negated()
    }
}

impl core::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A clause set with a distinguished prefix of projection variables.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SatProblem {
    pub num_vars: u32,
    /// Variables `0..projection` are the ones models are projected onto.
    pub projection: u32,
    pub clauses: Vec<Vec<Lit>>,
}

impl SatProblem {
    pub fn new(num_vars: u32, projection: u32, clauses: Vec<Vec<Lit>>) -> Self {
        SatProblem { num_vars, projection, clauses }
    }

    pub fn is_satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.eval(model)))
    }

    /// Problem whose models are those of `self` that also satisfy `clauses`.
    /// Variables beyond `num_vars` are registered.
    pub fn extend(&self, clauses: &[Vec<Lit>]) -> SatProblem {
        let mut p = self.clone();
        for c in clauses {
            for l in c {
                p.num_vars = p.num_vars.max(l.var() + 1);
            }
            p.clauses.push(c.clone());
        }
        p
    }

    pub fn solve(&self) -> SolveResult {
        let mut s = Solver::from_problem(self, 0);
        s.solve(&mut || false)
    }
}
