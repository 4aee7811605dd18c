use alloc::vec::Vec;

use super::{Lit, SatProblem, SolveResult, Solver};

/// Stream of distinct projected models. After each model the negation of its
/// projection is added as a blocking clause.
#[derive(Clone, Debug)]
pub struct Enumerator {
    problem: SatProblem,
    solver: Solver,
    seed: u64,
    done: bool,
    yielded: usize,
}

/// The enumeration was stopped by the caller's stop callback.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interrupted;

impl Enumerator {
    pub fn new(problem: &SatProblem, seed: u64) -> Self {
        Enumerator {
            problem: problem.clone(),
            solver: Solver::from_problem(problem, seed),
            seed,
            done: false,
            yielded: 0,
        }
    }

    pub fn problem(&self) -> &SatProblem {
        &self.problem
    }

    pub fn yielded(&self) -> usize {
        self.yielded
    }

    pub fn solver(&self) -> &Solver {
        &self.solver
    }

    /// Next projected model, `Ok(None)` once exhausted.
    pub fn next_model(&mut self, stop: &mut dyn FnMut() -> bool) -> Result<Option<Vec<bool>>, Interrupted> {
        self.next_model_with(stop, &|proj| {
            proj.iter().enumerate().map(|(v, &b)| Lit::new(v as u32, b)).collect()
        })
    }

    /// Like [`next_model`](Self::next_model) but with a caller-chosen
    /// blocking clause. The clause must be falsified by the projected model;
    /// a shorter clause excludes every model agreeing on its variables.
    pub fn next_model_with(
        &mut self,
        stop: &mut dyn FnMut() -> bool,
        block: &dyn Fn(&[bool]) -> Vec<Lit>,
    ) -> Result<Option<Vec<bool>>, Interrupted> {
        if self.done {
            return Ok(None);
        }
        match self.solver.solve(stop) {
            SolveResult::Sat(model) => {
                let proj: Vec<bool> = model[..self.problem.projection as usize].to_vec();
                let block = block(&proj);
                debug_assert!(block.iter().all(|l| !l.eval(&proj)));
                if block.is_empty() || !self.solver.add_clause(&block) {
                    self.done = true;
                }
                self.yielded += 1;
                Ok(Some(proj))
            }
            SolveResult::Unsat => {
                self.done = true;
                Ok(None)
            }
            SolveResult::Interrupted => Err(Interrupted),
        }
    }

    /// Strengthens the problem with `clauses`. With `keep_blocking` the
    /// already yielded models stay excluded; otherwise enumeration restarts
    /// on the strengthened problem.
    pub fn extend(&mut self, clauses: &[Vec<Lit>], keep_blocking: bool) {
        self.problem = self.problem.extend(clauses);
        if keep_blocking {
            for c in clauses {
                if !self.solver.add_clause(c) {
                    self.done = true;
                }
            }
        } else {
            self.solver = Solver::from_problem(&self.problem, self.seed);
            self.done = false;
            self.yielded = 0;
        }
    }
}

impl Iterator for Enumerator {
    type Item = Vec<bool>;

    fn next(&mut self) -> Option<Vec<bool>> {
        self.next_model(&mut || false).ok().flatten()
    }
}
