//! Asynchronous composition of process LTSs over shared variables and locks,
//! and projection of product runs onto components.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::ltl::{Lasso, Step};
use crate::lts::{ActionId, ActionKind, FinitePath, Lts, LtsError, PropId, PropSet, StateId, TransitionSystem, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductError {
    #[error("no components")]
    Empty,
    #[error("{components} components but {vocabs} vocabularies")]
    Arity { components: usize, vocabs: usize },
    #[error("component {0} does not have its vocabulary's propositions and actions")]
    VocabularyMismatch(usize),
    #[error("no combination of initial states agrees on the shared variables")]
    InconsistentInitial,
    #[error(transparent)]
    Lts(#[from] LtsError),
}

/// A product step: component `mover` takes `action`; `moves[j]` lists the
/// transitions component `j` took. The mover has its one transition, a
/// follower the chain of environment transitions that brings it to the new
/// shared values, and a component that stayed has none.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProductAction {
    pub mover: usize,
    pub action: ActionId,
    pub moves: Vec<Vec<(ActionId, StateId)>>,
}

pub type ProductState = Vec<StateId>;

/// Tag for a process-local proposition in the product: `p@i`.
pub fn tagged(p: &str, i: usize) -> String {
    format!("{p}@{i}")
}

/// The product of components with per-process vocabularies. Shared
/// variables are matched by name; each component only sees the shared
/// variables and locks in its own vocabulary.
#[derive(Clone, Debug)]
pub struct Product {
    components: Vec<Lts>,
    props: Vec<String>,
    num_shared: usize,
    /// `(product shared index, component prop)` pairs per component.
    shared_of: Vec<Vec<(usize, PropId)>>,
    /// Product index of each component prop that is local.
    local_of: Vec<Vec<(PropId, usize)>>,
    /// Lowest component index that sees each shared variable.
    shared_owner: Vec<(usize, PropId)>,
    initial: Vec<ProductState>,
    /// Per component and state: the states reachable by one or more
    /// environment transitions, each with a shortest chain leading there.
    env_reach: Vec<Vec<Vec<(StateId, Vec<(ActionId, StateId)>)>>>,
}

impl fmt::Display for ProductAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.action, self.mover)
    }
}

/// Builds the asynchronous product.
pub fn compose(components: Vec<Lts>, vocabs: &[Vocabulary]) -> Result<Product, ProductError> {
    if components.is_empty() {
        return Err(ProductError::Empty);
    }
    if components.len() != vocabs.len() {
        return Err(ProductError::Arity { components: components.len(), vocabs: vocabs.len() });
    }
    let mut props: Vec<String> = Vec::new();
    for v in vocabs {
        for g in v.shared_props() {
            if !props.contains(&g) {
                props.push(g);
            }
        }
    }
    let num_shared = props.len();
    let mut shared_of = Vec::new();
    let mut local_of = Vec::new();
    for (i, (c, v)) in components.iter().zip(vocabs).enumerate() {
        if !v.matches(c) {
            return Err(ProductError::VocabularyMismatch(i));
        }
        let mut sh = Vec::new();
        let mut lo = Vec::new();
        for (p, name) in c.props().iter().enumerate() {
            if v.is_shared_prop(name) {
                sh.push((props.iter().position(|g| g == name).expect("collected"), p));
            } else {
                props.push(tagged(name, i));
                lo.push((p, props.len() - 1));
            }
        }
        shared_of.push(sh);
        local_of.push(lo);
    }
    let shared_owner = (0..num_shared)
        .map(|g| {
            shared_of
                .iter()
                .enumerate()
                .find_map(|(i, sh)| sh.iter().find(|&&(x, _)| x == g).map(|&(_, p)| (i, p)))
                .expect("every shared variable has an owner")
        })
        .collect();
    let env_reach = components.iter().map(env_chains).collect();
    let mut product =
        Product { components, props, num_shared, shared_of, local_of, shared_owner, initial: Vec::new(), env_reach };
    let inits: Vec<Vec<StateId>> = product.components.iter().map(|c| c.initials().to_vec()).collect();
    product.initial = product.consistent_tuples(&inits);
    if product.initial.is_empty() {
        return Err(ProductError::InconsistentInitial);
    }
    Ok(product)
}

/// Breadth-first environment chains from every state of `c`.
fn env_chains(c: &Lts) -> Vec<Vec<(StateId, Vec<(ActionId, StateId)>)>> {
    c.states()
        .map(|s| {
            let mut chain: Vec<Option<Vec<(ActionId, StateId)>>> = vec![None; c.num_states()];
            let mut queue = VecDeque::from([s]);
            let mut out = Vec::new();
            while let Some(x) = queue.pop_front() {
                let here = if x == s { Vec::new() } else { chain[x].clone().expect("queued") };
                for &(a, u) in c.successors(x).expect("valid state") {
                    if c.actions()[a].kind != ActionKind::Env || chain[u].is_some() {
                        continue;
                    }
                    let mut path = here.clone();
                    path.push((a, u));
                    chain[u] = Some(path.clone());
                    out.push((u, path));
                    queue.push_back(u);
                }
            }
            out.sort_by_key(|(u, _)| *u);
            out
        })
        .collect()
}

impl Product {
    pub fn components(&self) -> &[Lts] {
        &self.components
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn num_shared(&self) -> usize {
        self.num_shared
    }

    /// Shared-variable valuation of component `i` at local state `s`, as
    /// `(product shared index, value)` pairs.
    fn shared_values(&self, i: usize, s: StateId) -> impl Iterator<Item = (usize, bool)> + '_ {
        let c = &self.components[i];
        self.shared_of[i].iter().map(move |&(g, p)| (g, c.holds(s, p)))
    }

    /// True if `s_i` agrees with the partial valuation `vals`.
    fn agrees(&self, i: usize, s: StateId, vals: &[Option<bool>]) -> bool {
        self.shared_values(i, s).all(|(g, b)| vals[g].is_none_or(|v| v == b))
    }

    /// All tuples drawn from `choices` (one list per component) whose
    /// components agree on shared variables, in lexicographic order.
    fn consistent_tuples(&self, choices: &[Vec<StateId>]) -> Vec<ProductState> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(choices.len());
        let mut vals = vec![None; self.num_shared];
        self.extend_tuples(choices, &mut cur, &mut vals, &mut |t| out.push(t.to_vec()));
        out
    }

    fn extend_tuples(
        &self,
        choices: &[Vec<StateId>],
        cur: &mut Vec<StateId>,
        vals: &mut Vec<Option<bool>>,
        emit: &mut dyn FnMut(&[StateId]),
    ) {
        let i = cur.len();
        if i == choices.len() {
            emit(cur);
            return;
        }
        for &s in &choices[i] {
            if !self.agrees(i, s, vals) {
                continue;
            }
            let saved = vals.clone();
            for (g, b) in self.shared_values(i, s) {
                vals[g] = Some(b);
            }
            cur.push(s);
            self.extend_tuples(choices, cur, vals, emit);
            cur.pop();
            *vals = saved;
        }
    }

    /// Number of shared-consistent state tuples (the full product state
    /// space, reachable or not).
    pub fn total_states(&self) -> u64 {
        let all: Vec<Vec<StateId>> = self.components.iter().map(|c| c.states().collect()).collect();
        let mut n = 0u64;
        let mut vals = vec![None; self.num_shared];
        self.extend_tuples(&all, &mut Vec::new(), &mut vals, &mut |_| n += 1);
        n
    }

    /// Successors of `s` in deterministic order.
    pub fn step(&self, s: &[StateId]) -> Vec<(ProductAction, ProductState)> {
        let mut out: Vec<(ProductAction, ProductState)> = Vec::new();
        for (i, c) in self.components.iter().enumerate() {
            for &(a, t) in c.successors(s[i]).expect("valid state") {
                // Shared values after the move: the mover's view where it has
                // one, unchanged elsewhere.
                let mut required: Vec<Option<bool>> = vec![None; self.num_shared];
                for (g, b) in self.shared_values(i, t) {
                    required[g] = Some(b);
                }
                for g in 0..self.num_shared {
                    if required[g].is_none() {
                        let (j, p) = self.shared_owner[g];
                        required[g] = Some(self.components[j].holds(s[j], p));
                    }
                }
                let mut options: Vec<Vec<(Vec<(ActionId, StateId)>, StateId)>> = Vec::with_capacity(s.len());
                let mut dead = false;
                for j in 0..self.components.len() {
                    if j == i {
                        options.push(vec![(vec![(a, t)], t)]);
                        continue;
                    }
                    let mut opts = Vec::new();
                    if self.agrees(j, s[j], &required) {
                        opts.push((Vec::new(), s[j]));
                    }
                    for (u, chain) in &self.env_reach[j][s[j]] {
                        if *u != s[j] && self.agrees(j, *u, &required) {
                            opts.push((chain.clone(), *u));
                        }
                    }
                    if opts.is_empty() {
                        dead = true;
                        break;
                    }
                    options.push(opts);
                }
                if dead {
                    continue;
                }
                let mut idx = vec![0usize; options.len()];
                loop {
                    let moves = idx.iter().enumerate().map(|(j, &k)| options[j][k].0.clone()).collect();
                    let target = idx.iter().enumerate().map(|(j, &k)| options[j][k].1).collect();
                    out.push((ProductAction { mover: i, action: a, moves }, target));
                    let mut j = 0;
                    while j < idx.len() {
                        idx[j] += 1;
                        if idx[j] < options[j].len() {
                            break;
                        }
                        idx[j] = 0;
                        j += 1;
                    }
                    if j == idx.len() {
                        break;
                    }
                }
            }
        }
        out
    }

    pub fn label_of(&self, s: &[StateId]) -> PropSet {
        let mut l = PropSet::with_capacity(self.props.len());
        for (g, &(i, p)) in self.shared_owner.iter().enumerate() {
            if self.components[i].holds(s[i], p) {
                l.insert(g);
            }
        }
        for (i, lo) in self.local_of.iter().enumerate() {
            for &(p, x) in lo {
                if self.components[i].holds(s[i], p) {
                    l.insert(x);
                }
            }
        }
        l
    }

    /// Every reachable state, breadth-first from the initial states.
    pub fn reachable(&self) -> Vec<ProductState> {
        let mut seen: hashbrown::HashSet<ProductState> = self.initial.iter().cloned().collect();
        let mut order = self.initial.clone();
        let mut head = 0;
        while head < order.len() {
            for (_, t) in self.step(&order[head]) {
                if seen.insert(t.clone()) {
                    order.push(t);
                }
            }
            head += 1;
        }
        order
    }
}

impl TransitionSystem for Product {
    type State = ProductState;
    type Action = ProductAction;

    fn initial_states(&self) -> Vec<ProductState> {
        self.initial.clone()
    }

    fn successors(&self, s: &ProductState) -> Vec<(ProductAction, ProductState)> {
        self.step(s)
    }

    fn prop_names(&self) -> &[String] {
        &self.props
    }

    fn label(&self, s: &ProductState) -> PropSet {
        self.label_of(s)
    }
}

/// The run of a lasso as a finite path: stem then loop, the closing state
/// once at the end.
pub fn lasso_to_path(l: &Lasso<StateId, ActionId>) -> FinitePath {
    let actions = l
        .steps
        .iter()
        .map(|s| match s {
            Step::Action(a) => Some(*a),
            Step::Deadlock => None,
        })
        .collect();
    FinitePath::new(l.states.clone(), actions).expect("lasso shape")
}

/// Projection `π↑i` of a product run onto component `i`. Steps where the
/// component neither moved nor followed are stutters (`None`); a chain of
/// environment transitions contributes one step per transition.
pub fn project(states: &[ProductState], steps: &[Step<ProductAction>], i: usize) -> FinitePath {
    let mut ps: Vec<StateId> = vec![states[0][i]];
    let mut actions = Vec::new();
    for (st, next) in steps.iter().zip(&states[1..]) {
        match st {
            Step::Action(a) if !a.moves[i].is_empty() => {
                for &(b, u) in &a.moves[i] {
                    ps.push(u);
                    actions.push(Some(b));
                }
            }
            _ => {
                ps.push(next[i]);
                actions.push(None);
            }
        }
    }
    FinitePath::new(ps, actions).expect("projection keeps the path shape")
}

/// Projection of a product lasso, covering stem and loop once.
pub fn project_lasso(l: &Lasso<ProductState, ProductAction>, i: usize) -> FinitePath {
    project(&l.states, &l.steps, i)
}
