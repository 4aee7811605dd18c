//! Tseitin conversion of a [`PropGraph`] into clauses.

use alloc::vec;
use alloc::vec::Vec;

use super::ground::{GLit, Node, PropGraph};
use crate::sat::{Lit, SatProblem};

/// Clause set produced by [`to_cnf`]. Variables `0..projection` are the
/// ground atoms callers care about; the rest are auxiliaries.
pub type Cnf = SatProblem;

/// Converts `root` into an equisatisfiable clause set. Variable nodes keep
/// their numbers; each conjunction node that needs a name gets a fresh
/// variable from `first_aux` upward, defined by a biconditional, so every
/// assignment of the original variables extends to exactly one model.
pub fn to_cnf(g: &PropGraph, root: GLit, first_aux: u32, projection: u32) -> Cnf {
    let mut conv = Converter { g, names: vec![None; g.nodes().len()], next: first_aux, clauses: Vec::new() };
    let mut todo = vec![root];
    while let Some(l) = todo.pop() {
        match g.node(l) {
            Node::True if l.is_negated() => conv.clauses.push(Vec::new()),
            Node::True => {}
            Node::And(children) if !l.is_negated() => todo.extend(children.iter().copied()),
            Node::And(children) => {
                let clause = children.iter().map(|&c| !conv.lit(c)).collect();
                conv.clauses.push(clause);
            }
            Node::Var(_) => {
                let lit = conv.lit(l);
                conv.clauses.push(vec![lit]);
            }
        }
    }
    SatProblem { num_vars: conv.next, projection, clauses: conv.clauses }
}

struct Converter<'a> {
    g: &'a PropGraph,
    names: Vec<Option<u32>>,
    next: u32,
    clauses: Vec<Vec<Lit>>,
}

impl Converter<'_> {
    /// Solver literal equivalent to `l`, defining auxiliaries as needed.
    fn lit(&mut self, l: GLit) -> Lit {
        let v = self.name(l.node());
        Lit::new(v, l.is_negated())
    }

    fn name(&mut self, root: usize) -> u32 {
        if let Some(v) = self.names[root] {
            return v;
        }
        // Post-order over unnamed conjunction nodes without recursion.
        let mut stack = vec![(root, false)];
        while let Some((n, expanded)) = stack.pop() {
            if self.names[n].is_some() {
                continue;
            }
            match self.g.nodes()[n].clone() {
                Node::True => unreachable!("constants are folded away"),
                Node::Var(v) => self.names[n] = Some(v),
                Node::And(children) => {
                    if !expanded {
                        stack.push((n, true));
                        for c in &children {
                            if self.names[c.node()].is_none() {
                                stack.push((c.node(), false));
                            }
                        }
                        continue;
                    }
                    let g = self.next;
                    self.next += 1;
                    self.names[n] = Some(g);
                    let gl = Lit::new(g, false);
                    let mut long = Vec::with_capacity(children.len() + 1);
                    for c in &children {
                        let cl = Lit::new(self.names[c.node()].expect("child named"), c.is_negated());
                        self.clauses.push(vec![!gl, cl]);
                        long.push(!cl);
                    }
                    long.push(gl);
                    self.clauses.push(long);
                }
            }
        }
        self.names[root].expect("named")
    }
}
