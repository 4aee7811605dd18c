use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};
use thiserror::Error;

use super::buchi::Buchi;
use super::formula::Ltl;
use super::lasso::eval_lasso;
use crate::lts::TransitionSystem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("atom `{0}` is not a proposition of the system")]
    UnknownAtom(String),
    #[error("model checking interrupted")]
    Interrupted,
}

/// One step of a run. Deadlocked states are completed with a `Deadlock`
/// self-loop so that every finite run extends to an infinite one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step<A> {
    Action(A),
    Deadlock,
}

/// Ultimately periodic run `states[0] .. states[loop_start] (.. states[n])^ω`
/// with `states[n] == states[loop_start]` and `steps[i]` leading from
/// `states[i]` to `states[i + 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso<S, A> {
    pub states: Vec<S>,
    pub steps: Vec<Step<A>>,
    pub loop_start: usize,
}

impl<S: Clone + Eq, A: Clone + PartialEq> Lasso<S, A> {
    /// Stem states up to and including the loop entry.
    pub fn stem(&self) -> &[S] {
        &self.states[..=self.loop_start]
    }

    /// Loop states from the entry back to (and including) the entry.
    pub fn cycle(&self) -> &[S] {
        &self.states[self.loop_start..]
    }

    /// Number of word positions (the repeated final state is not counted).
    pub fn len(&self) -> usize {
        self.states.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.states.len() <= 1
    }

    /// True if the lasso is a run of `ts` (under completed semantics).
    pub fn is_run_of<T>(&self, ts: &T) -> bool
    where
        T: TransitionSystem<State = S, Action = A>,
    {
        let n = self.states.len();
        if n < 2
            || self.steps.len() != n - 1
            || self.loop_start >= n - 1
            || self.states[n - 1] != self.states[self.loop_start]
            || !ts.initial_states().contains(&self.states[0])
        {
            return false;
        }
        self.steps.iter().enumerate().all(|(i, step)| {
            let succ = ts.successors(&self.states[i]);
            match step {
                Step::Action(a) => succ.iter().any(|(b, t)| b == a && *t == self.states[i + 1]),
                Step::Deadlock => succ.is_empty() && self.states[i] == self.states[i + 1],
            }
        })
    }

    /// Truth of `f` on the infinite word of labels along the lasso.
    pub fn satisfies<T>(&self, ts: &T, f: &Ltl) -> bool
    where
        T: TransitionSystem<State = S, Action = A>,
    {
        let names = ts.prop_names();
        let labels: Vec<_> = self.states[..self.len()].iter().map(|s| ts.label(s)).collect();
        eval_lasso(f, self.len(), self.loop_start, &|i, a| {
            names.iter().position(|p| p == a).is_some_and(|p| labels[i].contains(p))
        })
    }

    /// A counterexample to `f` must be a run of `ts` that violates `f`.
    pub fn refutes<T>(&self, ts: &T, f: &Ltl) -> bool
    where
        T: TransitionSystem<State = S, Action = A>,
    {
        self.is_run_of(ts) && !self.satisfies(ts, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<S, A> {
    Holds,
    Violated(Lasso<S, A>),
}

impl<S, A> Verdict<S, A> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

#[derive(Clone, Debug)]
pub struct CheckReport<S, A> {
    pub verdict: Verdict<S, A>,
    pub reachable_states: usize,
    /// Reachable states without successors, in discovery order.
    pub deadlocks: Vec<S>,
    /// Nodes of the system-automaton product visited by the search.
    pub product_states: usize,
}

/// Explicit copy of the reachable part of a transition system.
pub struct Explored<S, A> {
    pub states: Vec<S>,
    pub succ: Vec<Vec<(Step<A>, usize)>>,
    pub initial: Vec<usize>,
    pub deadlocks: Vec<usize>,
}

/// Breadth-first exploration of the reachable states.
pub fn explore<T: TransitionSystem>(
    ts: &T,
    stop: &mut dyn FnMut() -> bool,
) -> Result<Explored<T::State, T::Action>, CheckError> {
    let mut index: HashMap<T::State, usize> = HashMap::new();
    let mut states = Vec::new();
    let mut initial = Vec::new();
    for s in ts.initial_states() {
        let next = states.len();
        let i = *index.entry(s.clone()).or_insert(next);
        if i == next {
            states.push(s);
        }
        if !initial.contains(&i) {
            initial.push(i);
        }
    }
    let mut succ = Vec::new();
    let mut deadlocks = Vec::new();
    let mut head = 0;
    while head < states.len() {
        if head % 1024 == 1023 && stop() {
            return Err(CheckError::Interrupted);
        }
        let out = ts.successors(&states[head]);
        let mut row = Vec::with_capacity(out.len().max(1));
        if out.is_empty() {
            deadlocks.push(head);
            row.push((Step::Deadlock, head));
        }
        for (a, t) in out {
            let next = states.len();
            let j = *index.entry(t.clone()).or_insert(next);
            if j == next {
                states.push(t);
            }
            row.push((Step::Action(a), j));
        }
        succ.push(row);
        head += 1;
    }
    Ok(Explored { states, succ, initial, deadlocks })
}

/// Decides `ts ⊨ f` for every infinite run (deadlocks are completed with
/// stuttering). On violation a lasso counterexample is returned.
pub fn check<T: TransitionSystem>(
    ts: &T,
    f: &Ltl,
    stop: &mut dyn FnMut() -> bool,
) -> Result<CheckReport<T::State, T::Action>, CheckError> {
    let names = ts.prop_names();
    for a in f.atoms() {
        if !names.contains(&a) {
            return Err(CheckError::UnknownAtom(a));
        }
    }
    let ex = explore(ts, stop)?;
    let aut = Buchi::from_ltl(&Ltl::not(f.clone()));
    // atom_of[i] = proposition index of automaton atom i
    let atom_of: Vec<usize> =
        aut.atoms.iter().map(|a| names.iter().position(|p| p == a).expect("checked")).collect();
    let labels: Vec<Vec<bool>> = ex
        .states
        .iter()
        .map(|s| {
            let l = ts.label(s);
            atom_of.iter().map(|&p| l.contains(p)).collect()
        })
        .collect();

    let search = NestedDfs { ex: &ex, aut: &aut, labels: &labels };
    let (found, product_states) = search.run(stop)?;
    let verdict = match found {
        None => Verdict::Holds,
        Some((path, loop_start)) => {
            let states = path.iter().map(|&(s, _)| ex.states[s].clone()).collect();
            let steps = path[1..]
                .iter()
                .enumerate()
                .map(|(i, &(_, k))| ex.succ[path[i].0][k].0.clone())
                .collect();
            Verdict::Violated(Lasso { states, steps, loop_start })
        }
    };
    Ok(CheckReport {
        verdict,
        reachable_states: ex.states.len(),
        deadlocks: ex.deadlocks.iter().map(|&i| ex.states[i].clone()).collect(),
        product_states,
    })
}

/// Product node `(system state, automaton state, acceptance counter)`.
type PNode = (usize, usize, usize);

struct NestedDfs<'a, S, A> {
    ex: &'a Explored<S, A>,
    aut: &'a Buchi,
    labels: &'a [Vec<bool>],
}

struct Frame {
    node: PNode,
    /// Index into the system successor row that led here.
    via: usize,
    succ: Vec<(PNode, usize)>,
    next: usize,
}

impl<S, A> NestedDfs<'_, S, A> {
    fn admits(&self, s: usize, q: usize) -> bool {
        self.aut.states[q].admits(&|a| self.labels[s][a])
    }

    fn accepting(&self, (_, q, c): PNode) -> bool {
        c == 0 && self.aut.accepting(0, q)
    }

    fn successors(&self, (s, q, c): PNode) -> Vec<(PNode, usize)> {
        let m = self.aut.degree();
        let c2 = if self.aut.accepting(c, q) { (c + 1) % m } else { c };
        let mut out = Vec::new();
        for (k, (_, t)) in self.ex.succ[s].iter().enumerate() {
            for &q2 in &self.aut.states[q].succ {
                if self.admits(*t, q2) {
                    out.push(((*t, q2, c2), k));
                }
            }
        }
        out
    }

    fn frame(&self, node: PNode, via: usize) -> Frame {
        Frame { node, via, succ: self.successors(node), next: 0 }
    }

    /// Returns the lasso as `(system state, successor index used to enter)`
    /// pairs plus the loop start, and the number of product nodes visited.
    #[allow(clippy::type_complexity)]
    fn run(&self, stop: &mut dyn FnMut() -> bool) -> Result<(Option<(Vec<(usize, usize)>, usize)>, usize), CheckError> {
        let mut blue: HashSet<PNode> = HashSet::new();
        let mut red: HashSet<PNode> = HashSet::new();
        let mut on_stack: HashMap<PNode, usize> = HashMap::new();
        let mut work = 0usize;
        let roots: Vec<PNode> = self
            .ex
            .initial
            .iter()
            .flat_map(|&s| self.aut.initial.iter().filter(move |&&q| self.admits(s, q)).map(move |&q| (s, q, 0)))
            .collect();
        for root in roots {
            if !blue.insert(root) {
                continue;
            }
            let mut outer = vec![self.frame(root, usize::MAX)];
            on_stack.insert(root, 0);
            while let Some(top) = outer.last_mut() {
                work += 1;
                if work % 4096 == 0 && stop() {
                    return Err(CheckError::Interrupted);
                }
                if top.next < top.succ.len() {
                    let (n, k) = top.succ[top.next];
                    top.next += 1;
                    if blue.insert(n) {
                        on_stack.insert(n, outer.len());
                        let f = self.frame(n, k);
                        outer.push(f);
                    }
                    continue;
                }
                let seed = top.node;
                if self.accepting(seed) {
                    if let Some((red_path, hit)) = self.red_search(seed, &mut red, &on_stack) {
                        let mut path: Vec<(usize, usize)> = outer.iter().map(|f| (f.node.0, f.via)).collect();
                        let loop_start = path.len() - 1;
                        path.extend(red_path);
                        path.extend(outer[hit + 1..].iter().map(|f| (f.node.0, f.via)));
                        return Ok((Some((path, loop_start)), blue.len()));
                    }
                }
                on_stack.remove(&seed);
                outer.pop();
            }
        }
        Ok((None, blue.len()))
    }

    /// Searches from `seed` for a node on the outer stack. Returns the path
    /// (excluding `seed`) and the outer-stack depth of the node reached.
    fn red_search(
        &self,
        seed: PNode,
        red: &mut HashSet<PNode>,
        on_stack: &HashMap<PNode, usize>,
    ) -> Option<(Vec<(usize, usize)>, usize)> {
        let mut stack = vec![self.frame(seed, usize::MAX)];
        while let Some(top) = stack.last_mut() {
            if top.next < top.succ.len() {
                let (n, k) = top.succ[top.next];
                top.next += 1;
                if let Some(&depth) = on_stack.get(&n) {
                    let mut path: Vec<(usize, usize)> = stack[1..].iter().map(|f| (f.node.0, f.via)).collect();
                    path.push((n.0, k));
                    return Some((path, depth));
                }
                if red.insert(n) {
                    let f = self.frame(n, k);
                    stack.push(f);
                }
                continue;
            }
            stack.pop();
        }
        None
    }
}
