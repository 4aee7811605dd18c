//! Process and system specifications: synchronization axioms, saturation
//! axioms, refinement specifications and the path formulas used to keep or
//! exclude counterexamples.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::logic::{holds, EvalError, RelFormula as F, Signature, Term};
use crate::ltl::Ltl;
use crate::lts::{ActionKind, FinitePath, Lts, StateId, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("the LTS does not satisfy formula `{0}`")]
    NotAModel(String),
    #[error("the LTS does not have the specification's vocabulary")]
    VocabularyMismatch,
    #[error("the LTS has {found} states but the refinement pins {expected}")]
    StateCount { expected: usize, found: usize },
    #[error("specification has no refinement block")]
    NotRefined,
    #[error("free variable `{0}` is not a pinned state constant")]
    Unpinned(String),
    #[error("path has fewer than two states")]
    ShortPath,
    #[error("every step of the path stutters")]
    AllStutter,
    #[error("no precondition given for action `{0}`")]
    MissingPrecondition(String),
    #[error("precondition of `{action}` must have exactly the free variable `s`")]
    BadPrecondition { action: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedFormula {
    pub name: String,
    pub formula: F,
}

impl NamedFormula {
    pub fn new(name: impl Into<String>, formula: F) -> Self {
        NamedFormula { name: name.into(), formula }
    }
}

/// Name of the pinned constant for state `j`.
pub fn constant(j: StateId) -> String {
    format!("s_{j}")
}

fn constant_index(name: &str) -> Option<StateId> {
    name.strip_prefix("s_")?.parse().ok()
}

/// The refinement block `exists s_0..s_n . body`. Constants are pinned to
/// the states of the refined LTS, so instances share its state numbering.
#[derive(Clone, Debug, PartialEq)]
pub struct RefBlock {
    pub num_states: usize,
    pub body: F,
}

impl RefBlock {
    /// The body with every constant replaced by its state.
    pub fn pinned(&self) -> F {
        (0..self.num_states).fold(self.body.clone(), |f, j| f.substitute(&constant(j), &Term::State(j)))
    }

    /// The closed form with explicit existential quantifiers and pairwise
    /// distinctness; equivalent to [`pinned`](Self::pinned) up to renaming
    /// of states.
    pub fn existential(&self) -> F {
        let names: Vec<String> = (0..self.num_states).map(constant).collect();
        let mut parts = Vec::new();
        for i in 0..names.len() {
            for j in i + 1..names.len() {
                parts.push(F::neq(names[i].as_str(), names[j].as_str()));
            }
        }
        parts.push(self.body.clone());
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        F::exists_many(&refs, F::and(parts))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProcessSpec {
    pub name: String,
    pub vocab: Vocabulary,
    pub formulas: Vec<NamedFormula>,
    /// Enabling condition per internal action, over the free variable `s`.
    pub preconditions: BTreeMap<String, F>,
    pub refinement: Option<RefBlock>,
}

impl ProcessSpec {
    /// A specification with the synchronization axioms already included.
    pub fn new(name: impl Into<String>, vocab: Vocabulary, formulas: Vec<NamedFormula>) -> Self {
        let mut all = sync_axioms(&vocab);
        all.extend(formulas);
        ProcessSpec { name: name.into(), vocab, formulas: all, preconditions: BTreeMap::new(), refinement: None }
    }

    pub fn signature(&self) -> Signature {
        Signature::of_vocab(&self.vocab)
    }

    /// Closed formulas to hand to the finder, the refinement block pinned.
    pub fn closed_formulas(&self) -> Vec<F> {
        let mut out: Vec<F> = self.formulas.iter().map(|n| n.formula.clone()).collect();
        if let Some(r) = &self.refinement {
            out.push(r.pinned());
        }
        out
    }

    /// Finder bound fixed by the refinement block, if any.
    pub fn pinned_states(&self) -> Option<usize> {
        self.refinement.as_ref().map(|r| r.num_states)
    }

    /// Name of the first formula `lts` violates.
    pub fn first_violation(&self, lts: &Lts) -> Result<Option<String>, EvalError> {
        for n in &self.formulas {
            if !holds(&n.formula, lts)? {
                return Ok(Some(n.name.clone()));
            }
        }
        if let Some(r) = &self.refinement {
            if r.num_states != lts.num_states() || !holds(&r.pinned(), lts)? {
                return Ok(Some("refinement".to_string()));
            }
        }
        Ok(None)
    }

    pub fn is_model(&self, lts: &Lts) -> Result<bool, EvalError> {
        Ok(self.first_violation(lts)?.is_none())
    }

    /// The specification extended with its saturation axioms.
    pub fn saturated(&self) -> Result<ProcessSpec, SpecError> {
        let mut out = self.clone();
        out.formulas.extend(saturation_axioms(self, &self.preconditions)?);
        Ok(out)
    }
}

/// A system: processes sharing variables and locks, and a global property
/// whose process-local atoms are written `p@i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub name: String,
    pub processes: Vec<ProcessSpec>,
    pub property: Ltl,
    /// Suggested state bound.
    pub bound: Option<usize>,
}

/// The lock and shared-variable axioms for `v`, expanded per lock and per
/// shared variable.
pub fn sync_axioms(v: &Vocabulary) -> Vec<NamedFormula> {
    let props = v.props();
    let frame = |keep: &dyn Fn(&str) -> bool| {
        F::and(
            props
                .iter()
                .filter(|p| keep(p))
                .map(|p| F::iff(F::prop(p, "s"), F::prop(p, "t")))
                .collect(),
        )
    };
    let mut out = Vec::new();
    for l in v.locks() {
        let (own, av, ch) = (Vocabulary::own(l), Vocabulary::av(l), Vocabulary::ch(l));
        out.push(NamedFormula::new(
            format!("lock_a_{l}"),
            F::forall("s", F::implies(F::prop(&own, "s"), F::not(F::prop(&av, "s")))),
        ));
        out.push(NamedFormula::new(
            format!("lock_b_{l}"),
            F::forall(
                "s",
                F::iff(F::not(F::prop(&own, "s")), F::exists("t", F::edge(&ch, "s", "t"))),
            ),
        ));
        out.push(NamedFormula::new(
            format!("lock_c_{l}"),
            F::forall_many(
                &["s", "t"],
                F::implies(F::edge(&ch, "s", "t"), F::iff(F::prop(&av, "s"), F::not(F::prop(&av, "t")))),
            ),
        ));
        out.push(NamedFormula::new(
            format!("lock_d_{l}"),
            F::forall_many(
                &["s", "t"],
                F::implies(F::edge(&ch, "s", "t"), frame(&|p| p != own && p != av)),
            ),
        ));
    }
    for g in v.shared() {
        let ch = Vocabulary::ch(g);
        out.push(NamedFormula::new(
            format!("shared_e_{g}"),
            F::forall(
                "s",
                F::and(alloc::vec![
                    F::exists("t", F::and(alloc::vec![F::edge(&ch, "s", "t"), F::prop(g, "t")])),
                    F::exists("t", F::and(alloc::vec![F::edge(&ch, "s", "t"), F::not(F::prop(g, "t"))])),
                ]),
            ),
        ));
    }
    for g in v.shared_props() {
        let ch = v.env_action_for(&g).expect("shared proposition");
        out.push(NamedFormula::new(
            format!("shared_f_{g}"),
            F::forall_many(&["s", "t"], F::implies(F::edge(&ch, "s", "t"), frame(&|p| p != g))),
        ));
    }
    out
}

/// `forall s . Pre(s) -> exists t . act(s, t)` for every internal action.
pub fn saturation_axioms(spec: &ProcessSpec, preconds: &BTreeMap<String, F>) -> Result<Vec<NamedFormula>, SpecError> {
    let mut out = Vec::new();
    for a in spec.vocab.actions() {
        let pre = preconds.get(a).ok_or_else(|| SpecError::MissingPrecondition(a.clone()))?;
        if pre.free_vars().iter().any(|v| v != "s") {
            return Err(SpecError::BadPrecondition { action: a.clone() });
        }
        out.push(NamedFormula::new(
            format!("saturate_{a}"),
            F::forall("s", F::implies(pre.clone(), F::exists("t", F::edge(a, "s", "t")))),
        ));
    }
    Ok(out)
}

/// The refinement specification of `spec` by `t`: instances are the LTSs on
/// `t`'s states with `t`'s initial states, labels and environment
/// transitions, a subset of its internal transitions, still satisfying
/// `spec`.
pub fn ref_spec(spec: &ProcessSpec, t: &Lts) -> Result<ProcessSpec, SpecError> {
    if !spec.vocab.matches(t) {
        return Err(SpecError::VocabularyMismatch);
    }
    if let Some(name) = spec.first_violation(t)? {
        return Err(SpecError::NotAModel(name));
    }
    let n = t.num_states();
    let c = |j: StateId| Term::Var(constant(j));
    let mut parts = Vec::new();
    for j in 0..n {
        parts.push(if t.is_initial(j) { F::init(c(j)) } else { F::not(F::init(c(j))) });
        for (p, name) in t.props().iter().enumerate() {
            let lit = F::prop(name, c(j));
            parts.push(if t.holds(j, p) { lit } else { F::not(lit) });
        }
    }
    for (a, act) in t.actions().iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let lit = F::edge(&act.name, c(i), c(j));
                if !t.has_transition(i, a, j) {
                    parts.push(F::not(lit));
                } else if act.kind == ActionKind::Env {
                    parts.push(lit);
                }
            }
        }
    }
    let mut body = F::and(parts);
    if let Some(old) = &spec.refinement {
        if old.num_states != n {
            return Err(SpecError::StateCount { expected: old.num_states, found: n });
        }
        body = F::and(alloc::vec![old.body.clone(), body]);
    }
    let mut out = spec.clone();
    out.refinement = Some(RefBlock { num_states: n, body });
    Ok(out)
}

/// Conjoins `psi`, whose free variables must be pinned constants, to the
/// refinement block.
pub fn oplus(spec: &ProcessSpec, psi: &F) -> Result<ProcessSpec, SpecError> {
    let r = spec.refinement.as_ref().ok_or(SpecError::NotRefined)?;
    for v in psi.free_vars() {
        if !constant_index(&v).is_some_and(|j| j < r.num_states) {
            return Err(SpecError::Unpinned(v));
        }
    }
    let mut out = spec.clone();
    out.refinement = Some(RefBlock { num_states: r.num_states, body: F::and(alloc::vec![r.body.clone(), psi.clone()]) });
    Ok(out)
}

/// Steps of `path` that move between distinct states.
fn moving_steps(path: &FinitePath) -> impl Iterator<Item = (StateId, StateId)> + '_ {
    path.states().windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| a != b)
}

/// One clause per step: `a_0(s_i, s_j) | ... | a_k(s_i, s_j)`. Steps that
/// stay in the same state give `true`, since a projected run may stutter
/// without a matching self-loop.
pub fn cnf_clauses(path: &FinitePath, actions: &[String]) -> Result<Vec<F>, SpecError> {
    if path.states().len() < 2 {
        return Err(SpecError::ShortPath);
    }
    Ok(path
        .states()
        .windows(2)
        .map(|w| {
            if w[0] == w[1] {
                F::True
            } else {
                F::or(actions.iter().map(|a| F::edge(a, Term::Var(constant(w[0])), Term::Var(constant(w[1])))).collect())
            }
        })
        .collect())
}

/// Conjunction of [`cnf_clauses`]: holds iff every moving step of the path
/// is a transition.
pub fn cnf_of_path(path: &FinitePath, actions: &[String]) -> Result<F, SpecError> {
    Ok(F::and(cnf_clauses(path, actions)?))
}

/// Some moving step of the path is not a transition.
pub fn not_of_path(path: &FinitePath, actions: &[String]) -> Result<F, SpecError> {
    if path.states().len() < 2 {
        return Err(SpecError::ShortPath);
    }
    if path.is_all_stutter() {
        return Err(SpecError::AllStutter);
    }
    let disjuncts = moving_steps(path)
        .map(|(i, j)| {
            let (si, sj) = (Term::Var(constant(i)), Term::Var(constant(j)));
            let mut conj: Vec<F> = actions.iter().map(|a| F::not(F::edge(a, si.clone(), sj.clone()))).collect();
            conj.push(F::neq(si, sj));
            F::and(conj)
        })
        .collect();
    Ok(F::or(disjuncts))
}

/// Evaluation environment binding every pinned constant of an `n`-state
/// LTS to its state.
pub fn pin_env(n: usize) -> crate::logic::Env {
    (0..n).map(|j| (constant(j), j)).collect()
}
