//! Bounded model finding: every LTS with exactly `k` states satisfying a
//! list of closed formulas, as a deterministic stream.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashSet;
use thiserror::Error;

use crate::logic::{holds, AtomTable, EvalError, GroundError, Grounder, RelFormula, Signature};
use crate::lts::{ActionId, Lts, StateId};
use crate::sat::{Enumerator, Lit};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FinderError {
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error("search interrupted")]
    Interrupted,
    #[error("decoded instance violates formula {index}: {formula}")]
    Validation { index: usize, formula: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Which instances count as duplicates of an earlier one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dedup {
    /// Every distinct assignment is a separate instance.
    None,
    /// Instances related by a renaming of states are merged.
    Isomorphism,
    /// Instances whose reachable parts are isomorphic are merged. Models
    /// agreeing on the reachable part are also blocked together.
    Reachable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinderOptions {
    /// Require at least one initial state.
    pub require_initial: bool,
    /// Require every state to have a successor.
    pub require_serial: bool,
    pub dedup: Dedup,
    /// Re-evaluate every formula on each decoded instance.
    pub validate: bool,
    pub seed: u64,
}

impl Default for FinderOptions {
    fn default() -> Self {
        FinderOptions {
            require_initial: true,
            require_serial: true,
            dedup: Dedup::None,
            validate: cfg!(debug_assertions),
            seed: 0,
        }
    }
}

/// Deterministic stream of instances.
pub struct InstanceStream {
    sig: Signature,
    formulas: Vec<RelFormula>,
    atoms: AtomTable,
    enumerator: Enumerator,
    opts: FinderOptions,
    seen: HashSet<Vec<u8>>,
    produced: usize,
    models: usize,
}

impl InstanceStream {
    pub fn new(
        sig: &Signature,
        formulas: &[RelFormula],
        k: usize,
        opts: FinderOptions,
    ) -> Result<Self, FinderError> {
        let mut all = formulas.to_vec();
        if opts.require_initial {
            all.push(RelFormula::exists("s", RelFormula::init("s")));
        }
        if opts.require_serial {
            all.push(RelFormula::forall("s", RelFormula::exists("t", RelFormula::post("s", "t"))));
        }
        let mut g = Grounder::new(sig, k)?;
        for f in &all {
            g.assert(f)?;
        }
        let grounded = g.finish();
        let cnf = grounded.to_cnf();
        Ok(InstanceStream {
            sig: sig.clone(),
            formulas: all,
            atoms: grounded.atoms,
            enumerator: Enumerator::new(&cnf, opts.seed),
            opts,
            seen: HashSet::new(),
            produced: 0,
            models: 0,
        })
    }

    pub fn bound(&self) -> usize {
        self.atoms.bound()
    }

    /// Instances returned so far.
    pub fn produced(&self) -> usize {
        self.produced
    }

    /// Raw SAT models enumerated so far, including skipped duplicates.
    pub fn models(&self) -> usize {
        self.models
    }

    pub fn problem_size(&self) -> (u32, usize) {
        let p = self.enumerator.problem();
        (p.num_vars, p.clauses.len())
    }

    pub fn next_instance(&mut self, stop: &mut dyn FnMut() -> bool) -> Result<Option<Lts>, FinderError> {
        loop {
            let model = match self.opts.dedup {
                Dedup::Reachable => {
                    let atoms = &self.atoms;
                    let sig = &self.sig;
                    self.enumerator.next_model_with(stop, &|proj| reachable_block(atoms, sig, proj))
                }
                _ => self.enumerator.next_model(stop),
            };
            let Some(model) = model.map_err(|_| FinderError::Interrupted)? else {
                return Ok(None);
            };
            self.models += 1;
            let lts = self.atoms.decode(&self.sig, &model);
            if self.opts.validate {
                for (index, f) in self.formulas.iter().enumerate() {
                    if !holds(f, &lts)? {
                        return Err(FinderError::Validation { index, formula: alloc::format!("{f}") });
                    }
                }
            }
            let key = match self.opts.dedup {
                Dedup::None => None,
                Dedup::Isomorphism => Some(canonical_key(&lts)),
                Dedup::Reachable => Some(canonical_key(&lts.restrict_to_reachable())),
            };
            if let Some(key) = key {
                if !self.seen.insert(key) {
                    continue;
                }
            }
            self.produced += 1;
            return Ok(Some(lts));
        }
    }

    /// Drains the stream.
    pub fn collect_all(&mut self) -> Result<Vec<Lts>, FinderError> {
        let mut out = Vec::new();
        while let Some(l) = self.next_instance(&mut || false)? {
            out.push(l);
        }
        Ok(out)
    }
}

/// Blocking clause over the atoms that determine the reachable part: all
/// initial atoms, and labels and outgoing edges of reachable states.
fn reachable_block(atoms: &AtomTable, sig: &Signature, proj: &[bool]) -> Vec<Lit> {
    let k = atoms.bound();
    let lit = |v: u32| Lit::new(v, proj[v as usize]);
    let mut reach = vec![false; k];
    let mut stack: Vec<StateId> = (0..k).filter(|&s| proj[atoms.init_var(s) as usize]).collect();
    for &s in &stack {
        reach[s] = true;
    }
    while let Some(s) = stack.pop() {
        for a in 0..sig.actions.len() {
            for t in 0..k {
                if proj[atoms.edge_var(a, s, t) as usize] && !reach[t] {
                    reach[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    let mut clause: Vec<Lit> = (0..k).map(|s| lit(atoms.init_var(s))).collect();
    for s in (0..k).filter(|&s| reach[s]) {
        for p in 0..sig.props.len() {
            clause.push(lit(atoms.prop_var(p, s)));
        }
        for a in 0..sig.actions.len() {
            for t in 0..k {
                clause.push(lit(atoms.edge_var(a, s, t)));
            }
        }
    }
    clause
}

/// All instances of `formulas` at bound `k`.
pub fn instances(
    sig: &Signature,
    formulas: &[RelFormula],
    k: usize,
    opts: FinderOptions,
) -> Result<Vec<Lts>, FinderError> {
    InstanceStream::new(sig, formulas, k, opts)?.collect_all()
}

/// Reads an LTS off a projected model at bound `k`.
pub fn decode(model: &[bool], sig: &Signature, k: usize) -> Lts {
    AtomTable::new(k, sig.props.len(), sig.actions.len()).decode(sig, model)
}

type Colors = Vec<u32>;

/// Ranks arbitrary ordered signatures into dense colors.
fn rank<T: Ord + Clone>(sigs: &[T]) -> Colors {
    let distinct: BTreeSet<T> = sigs.iter().cloned().collect();
    let order: Vec<T> = distinct.into_iter().collect();
    sigs.iter().map(|s| order.binary_search(s).expect("present") as u32).collect()
}

fn count(colors: &Colors) -> usize {
    colors.iter().collect::<BTreeSet<_>>().len()
}

type EdgeSig = Vec<(ActionId, u32)>;

/// Colour refinement until stable: a state's new color is its old color
/// plus the sorted colors of its successors and predecessors per action.
fn refine(lts: &Lts, mut colors: Colors) -> Colors {
    loop {
        let mut sigs: Vec<(u32, EdgeSig, EdgeSig)> =
            colors.iter().map(|&c| (c, Vec::new(), Vec::new())).collect();
        for &(s, a, t) in lts.transitions() {
            sigs[s].1.push((a, colors[t]));
            sigs[t].2.push((a, colors[s]));
        }
        for sig in &mut sigs {
            sig.1.sort_unstable();
            sig.2.sort_unstable();
        }
        let next = rank(&sigs);
        if count(&next) == count(&colors) {
            return next;
        }
        colors = next;
    }
}

fn encode(lts: &Lts, colors: &Colors) -> Vec<u8> {
    let n = lts.num_states();
    let mut order = vec![0usize; n];
    for (s, &c) in colors.iter().enumerate() {
        order[c as usize] = s;
    }
    let mut out = Vec::new();
    let push16 = |out: &mut Vec<u8>, x: usize| out.extend_from_slice(&(x as u16).to_be_bytes());
    push16(&mut out, n);
    push16(&mut out, lts.props().len());
    push16(&mut out, lts.actions().len());
    for &s in &order {
        out.push(lts.is_initial(s) as u8);
        for p in 0..lts.props().len() {
            out.push(lts.holds(s, p) as u8);
        }
    }
    let mut edges: Vec<(u32, ActionId, u32)> =
        lts.transitions().iter().map(|&(s, a, t)| (colors[s], a, colors[t])).collect();
    edges.sort_unstable();
    for (s, a, t) in edges {
        push16(&mut out, s as usize);
        push16(&mut out, a);
        push16(&mut out, t as usize);
    }
    out
}

fn search(lts: &Lts, colors: Colors, best: &mut Option<Vec<u8>>) {
    let colors = refine(lts, colors);
    let n = lts.num_states();
    if count(&colors) == n {
        let enc = encode(lts, &colors);
        if best.as_ref().map_or(true, |b| enc < *b) {
            *best = Some(enc);
        }
        return;
    }
    // Individualize each member of the first non-singleton cell.
    let mut sizes = vec![0usize; n];
    for &c in &colors {
        sizes[c as usize] += 1;
    }
    let cell = sizes.iter().position(|&s| s > 1).expect("some cell is not a singleton") as u32;
    for v in 0..n {
        if colors[v] != cell {
            continue;
        }
        let split: Colors = colors
            .iter()
            .enumerate()
            .map(|(u, &c)| 2 * c + (c == cell && u != v) as u32)
            .collect();
        search(lts, rank(&split), best);
    }
}

/// Key that is equal for two LTSs exactly when one is a renaming of the
/// other's states (same props and actions, labels, initials and edges).
///
/// Computed as the least encoding over the leaves of a colour-refinement
/// search tree, which is invariant under renaming.
pub fn canonical_key(lts: &Lts) -> Vec<u8> {
    let initial: Vec<(bool, Vec<usize>)> =
        lts.states().map(|s| (!lts.is_initial(s), lts.label(s).ones().collect())).collect();
    let mut best = None;
    search(lts, rank(&initial), &mut best);
    let mut key = best.unwrap_or_default();
    // Names are part of the identity of an LTS.
    for p in lts.props() {
        key.extend_from_slice(p.as_bytes());
        key.push(0);
    }
    for a in lts.actions() {
        key.extend_from_slice(a.name.as_bytes());
        key.push(a.kind as u8);
    }
    key
}
