use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::lts::StateId;

/// A state term: a variable or a concrete state constant (`#3`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    State(StateId),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }
}

impl From<&str> for Term {
    fn from(s: &str) -> Term {
        Term::Var(s.to_string())
    }
}

impl From<StateId> for Term {
    fn from(s: StateId) -> Term {
        Term::State(s)
    }
}

/// Binary relation over states: one action, or `Post` (some action).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Action(String),
    Post,
}

/// First-order formula over one state sort with reflexive-transitive closure.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RelFormula {
    True,
    False,
    Init(Term),
    Prop(String, Term),
    Edge { rel: Rel, from: Term, to: Term },
    /// Reflexive-transitive closure of `rel`.
    Closure { rel: Rel, from: Term, to: Term },
    Eq(Term, Term),
    Not(Box<RelFormula>),
    And(Vec<RelFormula>),
    Or(Vec<RelFormula>),
    Implies(Box<RelFormula>, Box<RelFormula>),
    Iff(Box<RelFormula>, Box<RelFormula>),
    Forall(String, Box<RelFormula>),
    Exists(String, Box<RelFormula>),
}

use RelFormula as F;

impl RelFormula {
    pub fn prop(p: &str, t: impl Into<Term>) -> F {
        F::Prop(p.to_string(), t.into())
    }

    pub fn init(t: impl Into<Term>) -> F {
        F::Init(t.into())
    }

    pub fn edge(a: &str, from: impl Into<Term>, to: impl Into<Term>) -> F {
        F::Edge { rel: Rel::Action(a.to_string()), from: from.into(), to: to.into() }
    }

    pub fn post(from: impl Into<Term>, to: impl Into<Term>) -> F {
        F::Edge { rel: Rel::Post, from: from.into(), to: to.into() }
    }

    pub fn star(a: &str, from: impl Into<Term>, to: impl Into<Term>) -> F {
        F::Closure { rel: Rel::Action(a.to_string()), from: from.into(), to: to.into() }
    }

    pub fn reach(from: impl Into<Term>, to: impl Into<Term>) -> F {
        F::Closure { rel: Rel::Post, from: from.into(), to: to.into() }
    }

    pub fn eq(a: impl Into<Term>, b: impl Into<Term>) -> F {
        F::Eq(a.into(), b.into())
    }

    pub fn neq(a: impl Into<Term>, b: impl Into<Term>) -> F {
        F::not(F::eq(a, b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: F) -> F {
        F::Not(Box::new(f))
    }

    pub fn and(fs: Vec<F>) -> F {
        F::And(fs)
    }

    pub fn or(fs: Vec<F>) -> F {
        F::Or(fs)
    }

    pub fn implies(a: F, b: F) -> F {
        F::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: F, b: F) -> F {
        F::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(v: &str, body: F) -> F {
        F::Forall(v.to_string(), Box::new(body))
    }

    pub fn exists(v: &str, body: F) -> F {
        F::Exists(v.to_string(), Box::new(body))
    }

    pub fn forall_many(vs: &[&str], body: F) -> F {
        vs.iter().rev().fold(body, |b, v| F::forall(v, b))
    }

    pub fn exists_many(vs: &[&str], body: F) -> F {
        vs.iter().rev().fold(body, |b, v| F::exists(v, b))
    }

    /// Free variables, sorted.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            F::True | F::False => {}
            F::Init(t) | F::Prop(_, t) => term(t, bound),
            F::Edge { from, to, .. } | F::Closure { from, to, .. } | F::Eq(from, to) => {
                term(from, bound);
                term(to, bound);
            }
            F::Not(f) => f.collect_free(bound, out),
            F::And(fs) | F::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            F::Implies(a, b) | F::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            F::Forall(v, f) | F::Exists(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Replaces free occurrences of `var` by `t`. `t` must not be a variable
    /// captured by an inner quantifier (callers substitute constants).
    pub fn substitute(&self, var: &str, t: &Term) -> F {
        let st = |x: &Term| match x {
            Term::Var(v) if v == var => t.clone(),
            other => other.clone(),
        };
        match self {
            F::True => F::True,
            F::False => F::False,
            F::Init(x) => F::Init(st(x)),
            F::Prop(p, x) => F::Prop(p.clone(), st(x)),
            F::Edge { rel, from, to } => F::Edge { rel: rel.clone(), from: st(from), to: st(to) },
            F::Closure { rel, from, to } => {
                F::Closure { rel: rel.clone(), from: st(from), to: st(to) }
            }
            F::Eq(a, b) => F::Eq(st(a), st(b)),
            F::Not(f) => F::not(f.substitute(var, t)),
            F::And(fs) => F::And(fs.iter().map(|f| f.substitute(var, t)).collect()),
            F::Or(fs) => F::Or(fs.iter().map(|f| f.substitute(var, t)).collect()),
            F::Implies(a, b) => F::implies(a.substitute(var, t), b.substitute(var, t)),
            F::Iff(a, b) => F::iff(a.substitute(var, t), b.substitute(var, t)),
            F::Forall(v, f) if v == var => F::Forall(v.clone(), f.clone()),
            F::Exists(v, f) if v == var => F::Exists(v.clone(), f.clone()),
            F::Forall(v, f) => F::Forall(v.clone(), Box::new(f.substitute(var, t))),
            F::Exists(v, f) => F::Exists(v.clone(), Box::new(f.substitute(var, t))),
        }
    }

    /// Renames propositions and actions through `map`; names without an
    /// entry are kept.
    pub fn rename(&self, map: &dyn Fn(&str) -> Option<String>) -> F {
        let r = |s: &String| map(s).unwrap_or_else(|| s.clone());
        let rr = |rel: &Rel| match rel {
            Rel::Action(a) => Rel::Action(r(a)),
            Rel::Post => Rel::Post,
        };
        match self {
            F::Prop(p, t) => F::Prop(r(p), t.clone()),
            F::Edge { rel, from, to } => F::Edge { rel: rr(rel), from: from.clone(), to: to.clone() },
            F::Closure { rel, from, to } => {
                F::Closure { rel: rr(rel), from: from.clone(), to: to.clone() }
            }
            F::Not(f) => F::not(f.rename(map)),
            F::And(fs) => F::And(fs.iter().map(|f| f.rename(map)).collect()),
            F::Or(fs) => F::Or(fs.iter().map(|f| f.rename(map)).collect()),
            F::Implies(a, b) => F::implies(a.rename(map), b.rename(map)),
            F::Iff(a, b) => F::iff(a.rename(map), b.rename(map)),
            F::Forall(v, f) => F::Forall(v.clone(), Box::new(f.rename(map))),
            F::Exists(v, f) => F::Exists(v.clone(), Box::new(f.rename(map))),
            other => other.clone(),
        }
    }

    /// Proposition names and action names mentioned.
    pub fn symbols(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut props = BTreeSet::new();
        let mut acts = BTreeSet::new();
        self.visit(&mut |f| match f {
            F::Prop(p, _) => {
                props.insert(p.clone());
            }
            F::Edge { rel: Rel::Action(a), .. } | F::Closure { rel: Rel::Action(a), .. } => {
                acts.insert(a.clone());
            }
            _ => {}
        });
        (props, acts)
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut dyn FnMut(&F)) {
        f(self);
        match self {
            F::Not(g) | F::Forall(_, g) | F::Exists(_, g) => g.visit(f),
            F::And(gs) | F::Or(gs) => gs.iter().for_each(|g| g.visit(f)),
            F::Implies(a, b) | F::Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Nesting depth of connectives and quantifiers; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            F::Not(g) | F::Forall(_, g) | F::Exists(_, g) => 1 + g.depth(),
            F::And(gs) | F::Or(gs) => 1 + gs.iter().map(F::depth).max().unwrap_or(0),
            F::Implies(a, b) | F::Iff(a, b) => 1 + a.depth().max(b.depth()),
            _ => 0,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::State(s) => write!(f, "#{s}"),
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, fs: &[F], op: &str, empty: &str) -> fmt::Result {
    match fs {
        [] => f.write_str(empty),
        [one] => write!(f, "{one}"),
        _ => {
            f.write_str("(")?;
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{g}")?;
            }
            f.write_str(")")
        }
    }
}

/// Prints in the concrete syntax accepted by [`super::parse_formula`].
impl fmt::Display for RelFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            F::True => f.write_str("true"),
            F::False => f.write_str("false"),
            F::Init(t) => write!(f, "init({t})"),
            F::Prop(p, t) => write!(f, "{p}({t})"),
            F::Edge { rel: Rel::Action(a), from, to } => write!(f, "{a}({from}, {to})"),
            F::Edge { rel: Rel::Post, from, to } => write!(f, "post({from}, {to})"),
            F::Closure { rel: Rel::Action(a), from, to } => write!(f, "star({a})({from}, {to})"),
            F::Closure { rel: Rel::Post, from, to } => write!(f, "reach({from}, {to})"),
            F::Eq(a, b) => write!(f, "{a} = {b}"),
            F::Not(g) => write!(f, "not {}", Paren(g)),
            F::And(gs) => write_list(f, gs, "and", "true"),
            F::Or(gs) => write_list(f, gs, "or", "false"),
            F::Implies(a, b) => write!(f, "({} implies {})", Paren(a), Paren(b)),
            F::Iff(a, b) => write!(f, "({} iff {})", Paren(a), Paren(b)),
            F::Forall(v, g) => write!(f, "(forall {v} . {g})"),
            F::Exists(v, g) => write!(f, "(exists {v} . {g})"),
        }
    }
}

/// Wraps equalities so that `not a = b` prints unambiguously.
struct Paren<'a>(&'a F);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            F::Eq(..) => write!(f, "({})", self.0),
            other => write!(f, "{other}"),
        }
    }
}
