use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use super::formula::{Rel, RelFormula, Term};
use crate::lts::{ActionId, Lts, StateId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("proposition `{0}` is not declared in the LTS")]
    UnknownProp(String),
    #[error("action `{0}` is not declared in the LTS")]
    UnknownAction(String),
    #[error("variable `{0}` is not bound")]
    Unbound(String),
    #[error("state constant #{0} is out of range")]
    UnknownState(StateId),
}

/// Variable assignment.
pub type Env = BTreeMap<String, StateId>;

/// Truth value of `f` in `lts` under `env`.
pub fn eval(f: &RelFormula, lts: &Lts, env: &Env) -> Result<bool, EvalError> {
    let (props, actions) = f.symbols();
    for p in props {
        if lts.prop_id(&p).is_none() {
            return Err(EvalError::UnknownProp(p));
        }
    }
    for a in actions {
        if lts.action_id(&a).is_none() {
            return Err(EvalError::UnknownAction(a));
        }
    }
    let mut ev = Evaluator { lts, closures: BTreeMap::new() };
    let mut env = env.clone();
    ev.eval(f, &mut env)
}

/// Truth value of a closed formula.
pub fn holds(f: &RelFormula, lts: &Lts) -> Result<bool, EvalError> {
    eval(f, lts, &Env::new())
}

struct Evaluator<'a> {
    lts: &'a Lts,
    /// Reflexive-transitive closure matrices, computed on first use.
    closures: BTreeMap<Option<ActionId>, Vec<Vec<bool>>>,
}

impl Evaluator<'_> {
    fn state(&self, t: &Term, env: &Env) -> Result<StateId, EvalError> {
        match t {
            Term::Var(v) => env.get(v).copied().ok_or_else(|| EvalError::Unbound(v.clone())),
            Term::State(s) if *s < self.lts.num_states() => Ok(*s),
            Term::State(s) => Err(EvalError::UnknownState(*s)),
        }
    }

    fn rel_id(&self, rel: &Rel) -> Option<ActionId> {
        match rel {
            Rel::Action(a) => Some(self.lts.action_id(a).expect("checked up front")),
            Rel::Post => None,
        }
    }

    fn step(&self, rel: Option<ActionId>, s: StateId, t: StateId) -> bool {
        let succ = self.lts.successors(s).expect("state in range");
        match rel {
            Some(a) => succ.binary_search(&(a, t)).is_ok(),
            None => succ.iter().any(|&(_, u)| u == t),
        }
    }

    fn closure(&mut self, rel: Option<ActionId>) -> &Vec<Vec<bool>> {
        let lts = self.lts;
        self.closures.entry(rel).or_insert_with(|| {
            let n = lts.num_states();
            let mut m = vec![vec![false; n]; n];
            for (s, row) in m.iter_mut().enumerate() {
                let mut stack = vec![s];
                row[s] = true;
                while let Some(u) = stack.pop() {
                    for &(a, t) in lts.successors(u).expect("state in range") {
                        if (rel.is_none() || rel == Some(a)) && !row[t] {
                            row[t] = true;
                            stack.push(t);
                        }
                    }
                }
            }
            m
        })
    }

    fn eval(&mut self, f: &RelFormula, env: &mut Env) -> Result<bool, EvalError> {
        use RelFormula as F;
        Ok(match f {
            F::True => true,
            F::False => false,
            F::Init(t) => self.lts.is_initial(self.state(t, env)?),
            F::Prop(p, t) => {
                let s = self.state(t, env)?;
                self.lts.holds(s, self.lts.prop_id(p).expect("checked up front"))
            }
            F::Edge { rel, from, to } => {
                let (s, t) = (self.state(from, env)?, self.state(to, env)?);
                self.step(self.rel_id(rel), s, t)
            }
            F::Closure { rel, from, to } => {
                let (s, t) = (self.state(from, env)?, self.state(to, env)?);
                let r = self.rel_id(rel);
                self.closure(r)[s][t]
            }
            F::Eq(a, b) => self.state(a, env)? == self.state(b, env)?,
            F::Not(g) => !self.eval(g, env)?,
            F::And(gs) => {
                for g in gs {
                    if !self.eval(g, env)? {
                        return Ok(false);
                    }
                }
                true
            }
            F::Or(gs) => {
                for g in gs {
                    if self.eval(g, env)? {
                        return Ok(true);
                    }
                }
                false
            }
            F::Implies(a, b) => !self.eval(a, env)? || self.eval(b, env)?,
            F::Iff(a, b) => self.eval(a, env)? == self.eval(b, env)?,
            F::Forall(v, g) | F::Exists(v, g) => {
                let universal = matches!(f, F::Forall(..));
                let saved = env.get(v).copied();
                let mut result = universal;
                for s in self.lts.states() {
                    env.insert(v.to_string(), s);
                    let r = self.eval(g, env);
                    match r {
                        Ok(b) if b != universal => {
                            result = !universal;
                            break;
                        }
                        Ok(_) => {}
                        Err(e) => {
                            restore(env, v, saved);
                            return Err(e);
                        }
                    }
                }
                restore(env, v, saved);
                result
            }
        })
    }
}

fn restore(env: &mut Env, v: &str, saved: Option<StateId>) {
    match saved {
        Some(s) => env.insert(v.to_string(), s),
        None => env.remove(v),
    };
}
