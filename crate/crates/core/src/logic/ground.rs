//! Grounding of relational formulas over a fixed universe of `k` states.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;
use thiserror::Error;

use super::formula::{Rel, RelFormula, Term};
use crate::lts::{Action, ActionId, Lts, LtsBuilder, PropId, StateId, Vocabulary};

/// Proposition and action names that ground atoms are indexed by.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub props: Vec<String>,
    pub actions: Vec<Action>,
}

impl Signature {
    pub fn new(props: Vec<String>, actions: Vec<Action>) -> Self {
        Signature { props, actions }
    }

    pub fn of_lts(lts: &Lts) -> Self {
        Signature { props: lts.props().to_vec(), actions: lts.actions().to_vec() }
    }

    pub fn of_vocab(v: &Vocabulary) -> Self {
        Signature { props: v.props(), actions: v.all_actions() }
    }

    pub fn prop_id(&self, p: &str) -> Option<PropId> {
        self.props.iter().position(|q| q == p)
    }

    pub fn action_id(&self, a: &str) -> Option<ActionId> {
        self.actions.iter().position(|b| b.name == a)
    }

    pub fn builder(&self, k: usize) -> LtsBuilder {
        LtsBuilder::new(k, self.props.clone(), self.actions.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error("the state bound must be at least 1")]
    ZeroBound,
    #[error("variable `{0}` is not bound")]
    Unbound(String),
    #[error("proposition `{0}` is not declared")]
    UnknownProp(String),
    #[error("action `{0}` is not declared")]
    UnknownAction(String),
    #[error("state constant #{0} is outside the bound")]
    StateOutOfRange(StateId),
}

/// Signed reference to a node of a [`PropGraph`]. Node 0 is the constant true.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GLit(u32);

impl GLit {
    pub const TRUE: GLit = GLit(0);
    pub const FALSE: GLit = GLit(1);

    pub fn node(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn positive(self) -> GLit {
        GLit(self.0 & !1)
    }
}

impl core::ops::Not for GLit {
    type Output = GLit;
    fn not(self) -> GLit {
        GLit(self.0 ^ 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    True,
    Var(u32),
    And(Vec<GLit>),
}

/// Hash-consed and-inverter graph with n-ary conjunctions. Structurally
/// equal subformulas share one node.
#[derive(Clone, Debug)]
pub struct PropGraph {
    nodes: Vec<Node>,
    table: HashMap<Node, u32>,
}

impl Default for PropGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl PropGraph {
    pub fn new() -> Self {
        let mut table = HashMap::new();
        table.insert(Node::True, 0);
        PropGraph { nodes: vec![Node::True], table }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, l: GLit) -> &Node {
        &self.nodes[l.node()]
    }

    fn intern(&mut self, n: Node) -> GLit {
        if let Some(&i) = self.table.get(&n) {
            return GLit(i << 1);
        }
        let i = self.nodes.len() as u32;
        self.nodes.push(n.clone());
        self.table.insert(n, i);
        GLit(i << 1)
    }

    pub fn var(&mut self, v: u32) -> GLit {
        self.intern(Node::Var(v))
    }

    pub fn and(&mut self, lits: Vec<GLit>) -> GLit {
        let mut flat = Vec::with_capacity(lits.len());
        for l in lits {
            if l == GLit::TRUE {
                continue;
            }
            if l == GLit::FALSE {
                return GLit::FALSE;
            }
            match &self.nodes[l.node()] {
                Node::And(children) if !l.is_negated() => flat.extend_from_slice(children),
                _ => flat.push(l),
            }
        }
        flat.sort_unstable();
        flat.dedup();
        if flat.windows(2).any(|w| w[0] == !w[1]) {
            return GLit::FALSE;
        }
        match flat.len() {
            0 => GLit::TRUE,
            1 => flat[0],
            _ => self.intern(Node::And(flat)),
        }
    }

    pub fn or(&mut self, lits: Vec<GLit>) -> GLit {
        let negated = lits.into_iter().map(|l| !l).collect();
        !self.and(negated)
    }

    pub fn and2(&mut self, a: GLit, b: GLit) -> GLit {
        self.and(vec![a, b])
    }

    pub fn or2(&mut self, a: GLit, b: GLit) -> GLit {
        self.or(vec![a, b])
    }

    pub fn implies(&mut self, a: GLit, b: GLit) -> GLit {
        self.or(vec![!a, b])
    }

    pub fn iff(&mut self, a: GLit, b: GLit) -> GLit {
        let ab = self.implies(a, b);
        let ba = self.implies(b, a);
        self.and(vec![ab, ba])
    }

    /// Evaluates `l` under an assignment of the variables.
    pub fn eval(&self, l: GLit, assignment: &dyn Fn(u32) -> bool) -> bool {
        let mut memo: HashMap<usize, bool> = HashMap::new();
        self.eval_memo(l, assignment, &mut memo)
    }

    fn eval_memo(&self, l: GLit, a: &dyn Fn(u32) -> bool, memo: &mut HashMap<usize, bool>) -> bool {
        let v = if let Some(&v) = memo.get(&l.node()) {
            v
        } else {
            let v = match &self.nodes[l.node()] {
                Node::True => true,
                Node::Var(x) => a(*x),
                Node::And(cs) => cs.iter().all(|&c| self.eval_memo(c, a, memo)),
            };
            memo.insert(l.node(), v);
            v
        };
        v != l.is_negated()
    }
}

/// A ground atom over a `k`-state universe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroundAtom {
    Init(StateId),
    Prop(PropId, StateId),
    Edge(ActionId, StateId, StateId),
    /// `level`-th squaring of the reflexive closure of an action (or of
    /// `Post` when `rel` is `None`).
    Closure { rel: Option<ActionId>, level: u32, from: StateId, to: StateId },
}

/// Numbering of ground atoms as solver variables. `Init`, `Prop` and `Edge`
/// atoms come first (the projection atoms); closure atoms follow.
#[derive(Clone, Debug)]
pub struct AtomTable {
    k: usize,
    num_props: usize,
    num_actions: usize,
    closures: Vec<GroundAtom>,
    closure_index: HashMap<GroundAtom, u32>,
}

impl AtomTable {
    pub fn new(k: usize, num_props: usize, num_actions: usize) -> Self {
        AtomTable { k, num_props, num_actions, closures: Vec::new(), closure_index: HashMap::new() }
    }

    pub fn bound(&self) -> usize {
        self.k
    }

    /// Number of projection atoms.
    pub fn num_projection(&self) -> u32 {
        (self.k + self.num_props * self.k + self.num_actions * self.k * self.k) as u32
    }

    pub fn num_vars(&self) -> u32 {
        self.num_projection() + self.closures.len() as u32
    }

    pub fn init_var(&self, s: StateId) -> u32 {
        s as u32
    }

    pub fn prop_var(&self, p: PropId, s: StateId) -> u32 {
        (self.k + p * self.k + s) as u32
    }

    pub fn edge_var(&self, a: ActionId, s: StateId, t: StateId) -> u32 {
        (self.k + self.num_props * self.k + a * self.k * self.k + s * self.k + t) as u32
    }

    pub fn var_of(&mut self, atom: GroundAtom) -> u32 {
        match atom {
            GroundAtom::Init(s) => self.init_var(s),
            GroundAtom::Prop(p, s) => self.prop_var(p, s),
            GroundAtom::Edge(a, s, t) => self.edge_var(a, s, t),
            c @ GroundAtom::Closure { .. } => {
                if let Some(&v) = self.closure_index.get(&c) {
                    return v;
                }
                let v = self.num_vars();
                self.closures.push(c);
                self.closure_index.insert(c, v);
                v
            }
        }
    }

    pub fn lookup(&self, atom: GroundAtom) -> Option<u32> {
        match atom {
            GroundAtom::Closure { .. } => self.closure_index.get(&atom).copied(),
            other => Some(match other {
                GroundAtom::Init(s) => self.init_var(s),
                GroundAtom::Prop(p, s) => self.prop_var(p, s),
                GroundAtom::Edge(a, s, t) => self.edge_var(a, s, t),
                GroundAtom::Closure { .. } => unreachable!(),
            }),
        }
    }

    pub fn atom(&self, v: u32) -> Option<GroundAtom> {
        let (k, np) = (self.k as u32, self.num_props as u32);
        if v < k {
            return Some(GroundAtom::Init(v as usize));
        }
        let v2 = v - k;
        if v2 < np * k {
            return Some(GroundAtom::Prop((v2 / k) as usize, (v2 % k) as usize));
        }
        let v3 = v2 - np * k;
        if v3 < self.num_actions as u32 * k * k {
            let a = v3 / (k * k);
            let r = v3 % (k * k);
            return Some(GroundAtom::Edge(a as usize, (r / k) as usize, (r % k) as usize));
        }
        self.closures.get((v - self.num_projection()) as usize).copied()
    }

    /// Reads an LTS off a model (indexed by variable).
    pub fn decode(&self, sig: &Signature, model: &[bool]) -> Lts {
        let mut b = sig.builder(self.k);
        for s in 0..self.k {
            if model[self.init_var(s) as usize] {
                b.initial(s);
            }
            for p in 0..self.num_props {
                if model[self.prop_var(p, s) as usize] {
                    b.label_id(s, p);
                }
            }
            for a in 0..self.num_actions {
                for t in 0..self.k {
                    if model[self.edge_var(a, s, t) as usize] {
                        b.transition_id(s, a, t);
                    }
                }
            }
        }
        b.build().expect("decoded identifiers are in range")
    }

    /// Projection-atom assignment describing `lts` (inverse of [`decode`](Self::decode)).
    pub fn encode(&self, lts: &Lts) -> Vec<bool> {
        let mut m = vec![false; self.num_projection() as usize];
        for &s in lts.initials() {
            m[self.init_var(s) as usize] = true;
        }
        for s in lts.states() {
            for p in lts.label(s).ones() {
                m[self.prop_var(p, s) as usize] = true;
            }
        }
        for &(s, a, t) in lts.transitions() {
            m[self.edge_var(a, s, t) as usize] = true;
        }
        m
    }
}

/// Result of grounding: a graph, its root, and the atom numbering.
#[derive(Clone, Debug)]
pub struct Grounded {
    pub graph: PropGraph,
    pub root: GLit,
    pub atoms: AtomTable,
}

impl Grounded {
    pub fn to_cnf(&self) -> super::cnf::Cnf {
        super::cnf::to_cnf(&self.graph, self.root, self.atoms.num_vars(), self.atoms.num_projection())
    }
}

/// Incremental grounder: several formulas can be grounded into one graph.
pub struct Grounder<'a> {
    sig: &'a Signature,
    k: usize,
    levels: u32,
    graph: PropGraph,
    atoms: AtomTable,
    definitions: Vec<GLit>,
    closure_cache: HashMap<(Option<ActionId>, u32, StateId, StateId), GLit>,
    roots: Vec<GLit>,
}

impl<'a> Grounder<'a> {
    pub fn new(sig: &'a Signature, k: usize) -> Result<Self, GroundError> {
        if k == 0 {
            return Err(GroundError::ZeroBound);
        }
        // L = ceil(log2 k): paths of length up to 2^L >= k - 1 are covered.
        let mut levels = 0;
        while (1usize << levels) < k {
            levels += 1;
        }
        Ok(Grounder {
            sig,
            k,
            levels,
            graph: PropGraph::new(),
            atoms: AtomTable::new(k, sig.props.len(), sig.actions.len()),
            definitions: Vec::new(),
            closure_cache: HashMap::new(),
            roots: Vec::new(),
        })
    }

    pub fn bound(&self) -> usize {
        self.k
    }

    pub fn graph_mut(&mut self) -> &mut PropGraph {
        &mut self.graph
    }

    pub fn atoms(&self) -> &AtomTable {
        &self.atoms
    }

    /// Literal of a projection atom.
    pub fn atom_lit(&mut self, atom: GroundAtom) -> GLit {
        let v = self.atoms.var_of(atom);
        self.graph.var(v)
    }

    /// Grounds `f` with free variables bound by `env`, returning its literal
    /// without asserting it.
    pub fn ground(&mut self, f: &RelFormula, env: &[(String, StateId)]) -> Result<GLit, GroundError> {
        let mut env = env.to_vec();
        self.go(f, &mut env)
    }

    /// Grounds a closed formula and adds it to the asserted roots.
    pub fn assert(&mut self, f: &RelFormula) -> Result<(), GroundError> {
        let l = self.ground(f, &[])?;
        self.roots.push(l);
        Ok(())
    }

    pub fn assert_lit(&mut self, l: GLit) {
        self.roots.push(l);
    }

    pub fn finish(mut self) -> Grounded {
        let mut all = core::mem::take(&mut self.roots);
        all.extend(self.definitions.iter().copied());
        let root = self.graph.and(all);
        Grounded { graph: self.graph, root, atoms: self.atoms }
    }

    fn term(&self, t: &Term, env: &[(String, StateId)]) -> Result<StateId, GroundError> {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|&(_, s)| s)
                .ok_or_else(|| GroundError::Unbound(v.clone())),
            Term::State(s) if *s < self.k => Ok(*s),
            Term::State(s) => Err(GroundError::StateOutOfRange(*s)),
        }
    }

    fn rel(&self, rel: &Rel) -> Result<Option<ActionId>, GroundError> {
        match rel {
            Rel::Action(a) => self
                .sig
                .action_id(a)
                .map(Some)
                .ok_or_else(|| GroundError::UnknownAction(a.clone())),
            Rel::Post => Ok(None),
        }
    }

    fn base(&mut self, rel: Option<ActionId>, s: StateId, t: StateId) -> GLit {
        match rel {
            Some(a) => self.atom_lit(GroundAtom::Edge(a, s, t)),
            None => {
                let lits = (0..self.sig.actions.len())
                    .map(|a| self.atom_lit(GroundAtom::Edge(a, s, t)))
                    .collect();
                self.graph.or(lits)
            }
        }
    }

    /// Literal for "t reachable from s in at most 2^level steps of rel".
    fn closure(&mut self, rel: Option<ActionId>, level: u32, s: StateId, t: StateId) -> GLit {
        if s == t {
            return GLit::TRUE;
        }
        if level == 0 {
            return self.base(rel, s, t);
        }
        if let Some(&l) = self.closure_cache.get(&(rel, level, s, t)) {
            return l;
        }
        let mut terms = Vec::with_capacity(self.k);
        for m in 0..self.k {
            let a = self.closure(rel, level - 1, s, m);
            let b = self.closure(rel, level - 1, m, t);
            terms.push(self.graph.and2(a, b));
        }
        let def = self.graph.or(terms);
        let v = self.atom_lit(GroundAtom::Closure { rel, level, from: s, to: t });
        let eq = self.graph.iff(v, def);
        self.definitions.push(eq);
        self.closure_cache.insert((rel, level, s, t), v);
        v
    }

    fn go(&mut self, f: &RelFormula, env: &mut Vec<(String, StateId)>) -> Result<GLit, GroundError> {
        use RelFormula as F;
        Ok(match f {
            F::True => GLit::TRUE,
            F::False => GLit::FALSE,
            F::Init(t) => {
                let s = self.term(t, env)?;
                self.atom_lit(GroundAtom::Init(s))
            }
            F::Prop(p, t) => {
                let pid = self.sig.prop_id(p).ok_or_else(|| GroundError::UnknownProp(p.clone()))?;
                let s = self.term(t, env)?;
                self.atom_lit(GroundAtom::Prop(pid, s))
            }
            F::Edge { rel, from, to } => {
                let r = self.rel(rel)?;
                let (s, t) = (self.term(from, env)?, self.term(to, env)?);
                self.base(r, s, t)
            }
            F::Closure { rel, from, to } => {
                let r = self.rel(rel)?;
                let (s, t) = (self.term(from, env)?, self.term(to, env)?);
                self.closure(r, self.levels, s, t)
            }
            F::Eq(a, b) => {
                if self.term(a, env)? == self.term(b, env)? {
                    GLit::TRUE
                } else {
                    GLit::FALSE
                }
            }
            F::Not(g) => !self.go(g, env)?,
            F::And(gs) => {
                let mut lits = Vec::with_capacity(gs.len());
                for g in gs {
                    let l = self.go(g, env)?;
                    if l == GLit::FALSE {
                        return Ok(GLit::FALSE);
                    }
                    lits.push(l);
                }
                self.graph.and(lits)
            }
            F::Or(gs) => {
                let mut lits = Vec::with_capacity(gs.len());
                for g in gs {
                    let l = self.go(g, env)?;
                    if l == GLit::TRUE {
                        return Ok(GLit::TRUE);
                    }
                    lits.push(l);
                }
                self.graph.or(lits)
            }
            F::Implies(a, b) => {
                let a = self.go(a, env)?;
                let b = self.go(b, env)?;
                self.graph.implies(a, b)
            }
            F::Iff(a, b) => {
                let a = self.go(a, env)?;
                let b = self.go(b, env)?;
                self.graph.iff(a, b)
            }
            F::Forall(v, g) | F::Exists(v, g) => {
                let mut lits = Vec::with_capacity(self.k);
                for s in 0..self.k {
                    env.push((v.to_string(), s));
                    let l = self.go(g, env);
                    env.pop();
                    lits.push(l?);
                }
                if matches!(f, F::Forall(..)) {
                    self.graph.and(lits)
                } else {
                    self.graph.or(lits)
                }
            }
        })
    }
}

/// Grounds a single closed formula at bound `k`.
pub fn ground(f: &RelFormula, k: usize, sig: &Signature) -> Result<Grounded, GroundError> {
    let mut g = Grounder::new(sig, k)?;
    g.assert(f)?;
    Ok(g.finish())
}
