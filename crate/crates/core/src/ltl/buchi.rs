//! Tableau translation of LTL\X to a state-labelled generalized Büchi
//! automaton.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::formula::Ltl;

type FId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Node {
    True,
    False,
    Lit(usize, bool),
    And(FId, FId),
    Or(FId, FId),
    Until(FId, FId),
    Release(FId, FId),
}

/// Interned subformulas of an NNF formula.
#[derive(Default)]
struct Table {
    nodes: Vec<Node>,
    index: BTreeMap<Node, FId>,
    atoms: Vec<String>,
}

impl Table {
    fn intern(&mut self, n: Node) -> FId {
        if let Some(&i) = self.index.get(&n) {
            return i;
        }
        self.nodes.push(n.clone());
        self.index.insert(n, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn atom(&mut self, name: &str) -> usize {
        match self.atoms.iter().position(|a| a == name) {
            Some(i) => i,
            None => {
                self.atoms.push(name.into());
                self.atoms.len() - 1
            }
        }
    }

    fn add(&mut self, f: &Ltl) -> FId {
        let n = match f {
            Ltl::True => Node::True,
            Ltl::False => Node::False,
            Ltl::Atom(a) => Node::Lit(self.atom(a), true),
            Ltl::Not(g) => match &**g {
                Ltl::Atom(a) => Node::Lit(self.atom(a), false),
                _ => unreachable!("formula is in negation normal form"),
            },
            Ltl::And(a, b) => {
                let (a, b) = (self.add(a), self.add(b));
                Node::And(a, b)
            }
            Ltl::Or(a, b) => {
                let (a, b) = (self.add(a), self.add(b));
                Node::Or(a, b)
            }
            Ltl::Until(a, b) => {
                let (a, b) = (self.add(a), self.add(b));
                Node::Until(a, b)
            }
            Ltl::Release(a, b) => {
                let (a, b) = (self.add(a), self.add(b));
                Node::Release(a, b)
            }
        };
        self.intern(n)
    }
}

/// Generalized Büchi automaton whose states carry literal constraints on the
/// letter read when entering them.
#[derive(Clone, Debug)]
pub struct Buchi {
    /// Atom names referenced by [`BuchiState::pos`] and [`BuchiState::neg`].
    pub atoms: Vec<String>,
    pub states: Vec<BuchiState>,
    pub initial: Vec<usize>,
    /// One set per until subformula; a run is accepting iff it visits every
    /// set infinitely often. Empty means every infinite run is accepting.
    pub acceptance: Vec<Vec<bool>>,
}

#[derive(Clone, Debug)]
pub struct BuchiState {
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
    pub succ: Vec<usize>,
}

impl BuchiState {
    pub fn admits(&self, holds: &dyn Fn(usize) -> bool) -> bool {
        self.pos.iter().all(|&a| holds(a)) && self.neg.iter().all(|&a| !holds(a))
    }
}

const INIT: usize = usize::MAX;

#[derive(Clone)]
struct Pending {
    incoming: BTreeSet<usize>,
    new: BTreeSet<FId>,
    old: BTreeSet<FId>,
    next: BTreeSet<FId>,
}

struct Done {
    incoming: BTreeSet<usize>,
    old: BTreeSet<FId>,
    next: BTreeSet<FId>,
}

impl Buchi {
    /// Automaton accepting exactly the words satisfying `f`.
    pub fn from_ltl(f: &Ltl) -> Buchi {
        let mut table = Table::default();
        let root = table.add(&f.nnf());
        let mut done: Vec<Done> = Vec::new();
        let mut work = vec![Pending {
            incoming: [INIT].into_iter().collect(),
            new: [root].into_iter().collect(),
            old: BTreeSet::new(),
            next: BTreeSet::new(),
        }];
        while let Some(mut node) = work.pop() {
            let Some(&eta) = node.new.iter().next() else {
                if let Some(d) = done.iter_mut().find(|d| d.old == node.old && d.next == node.next) {
                    d.incoming.extend(node.incoming);
                    continue;
                }
                let id = done.len();
                work.push(Pending {
                    incoming: [id].into_iter().collect(),
                    new: node.next.clone(),
                    old: BTreeSet::new(),
                    next: BTreeSet::new(),
                });
                done.push(Done { incoming: node.incoming, old: node.old, next: node.next });
                continue;
            };
            node.new.remove(&eta);
            if node.old.contains(&eta) {
                work.push(node);
                continue;
            }
            match table.nodes[eta].clone() {
                Node::False => {}
                Node::True => {
                    node.old.insert(eta);
                    work.push(node);
                }
                Node::Lit(a, sign) => {
                    let clash = table.index.get(&Node::Lit(a, !sign)).is_some_and(|c| node.old.contains(c));
                    if !clash {
                        node.old.insert(eta);
                        work.push(node);
                    }
                }
                Node::And(a, b) => {
                    for g in [a, b] {
                        if !node.old.contains(&g) {
                            node.new.insert(g);
                        }
                    }
                    node.old.insert(eta);
                    work.push(node);
                }
                Node::Or(a, b) | Node::Until(a, b) | Node::Release(a, b) => {
                    let (now1, later1, now2): (Vec<FId>, Option<FId>, Vec<FId>) = match table.nodes[eta] {
                        Node::Or(..) => (vec![a], None, vec![b]),
                        Node::Until(..) => (vec![a], Some(eta), vec![b]),
                        _ => (vec![b], Some(eta), vec![a, b]),
                    };
                    let mut n1 = node.clone();
                    let mut n2 = node;
                    n1.old.insert(eta);
                    n2.old.insert(eta);
                    for g in now1 {
                        if !n1.old.contains(&g) {
                            n1.new.insert(g);
                        }
                    }
                    if let Some(x) = later1 {
                        n1.next.insert(x);
                    }
                    for g in now2 {
                        if !n2.old.contains(&g) {
                            n2.new.insert(g);
                        }
                    }
                    // Pushed second, expanded first: the "fulfil now" branch.
                    work.push(n1);
                    work.push(n2);
                }
            }
        }

        let mut states: Vec<BuchiState> = done
            .iter()
            .map(|d| {
                let mut s = BuchiState { pos: Vec::new(), neg: Vec::new(), succ: Vec::new() };
                for &g in &d.old {
                    if let Node::Lit(a, sign) = table.nodes[g] {
                        if sign { s.pos.push(a) } else { s.neg.push(a) }
                    }
                }
                s
            })
            .collect();
        let mut initial = Vec::new();
        for (q, d) in done.iter().enumerate() {
            for &p in &d.incoming {
                if p == INIT {
                    initial.push(q);
                } else {
                    states[p].succ.push(q);
                }
            }
        }
        for s in &mut states {
            s.succ.sort_unstable();
        }
        let acceptance = table
            .nodes
            .iter()
            .enumerate()
            .filter_map(|(id, n)| match n {
                Node::Until(_, b) => Some(
                    done.iter().map(|d| !d.old.contains(&id) || d.old.contains(b)).collect(),
                ),
                _ => None,
            })
            .collect();
        Buchi { atoms: table.atoms, states, initial, acceptance }
    }

    /// Number of acceptance sets after degeneralization (at least one).
    pub fn degree(&self) -> usize {
        self.acceptance.len().max(1)
    }

    pub fn accepting(&self, set: usize, q: usize) -> bool {
        self.acceptance.get(set).is_none_or(|f| f[q])
    }
}
