use alloc::vec;
use alloc::vec::Vec;

use super::heap::VarHeap;
use super::{Lit, SatProblem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    /// Total assignment, indexed by variable.
    Sat(Vec<bool>),
    Unsat,
    Interrupted,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Value {
    True,
    False,
    Unassigned,
}

#[derive(Clone, Debug)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Clone, Copy, Debug)]
struct Watcher {
    clause: u32,
    blocker: Lit,
}

const RESTART_FIRST: u64 = 100;
const RESTART_GROWTH: f64 = 1.5;
const VAR_DECAY: f64 = 0.95;
const CLAUSE_DECAY: f64 = 0.999;

/// Conflict-driven clause-learning solver.
///
/// Clauses may be added between calls to [`solve`](Self::solve); the solver
/// always returns at decision level 0, so learnt clauses stay valid.
#[derive(Clone, Debug)]
pub struct Solver {
    num_vars: u32,
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watcher>>,
    values: Vec<Value>,
    levels: Vec<u32>,
    reasons: Vec<Option<u32>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    num_learnts: usize,
    max_learnts: f64,
    rng: u64,
    stats: SolverStats,
}

impl Solver {
    /// Empty solver. A nonzero `seed` perturbs initial activities; seed 0
    /// gives pure index order.
    pub fn new(seed: u64) -> Self {
        Solver {
            num_vars: 0,
            clauses: Vec::new(),
            watches: Vec::new(),
            values: Vec::new(),
            levels: Vec::new(),
            reasons: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::new(0),
            phase: Vec::new(),
            seen: Vec::new(),
            ok: true,
            num_learnts: 0,
            max_learnts: 0.0,
            rng: seed,
            stats: SolverStats::default(),
        }
    }

    pub fn from_problem(p: &SatProblem, seed: u64) -> Self {
        let mut s = Solver::new(seed);
        s.reserve_vars(p.num_vars);
        for c in &p.clauses {
            s.add_clause(c);
        }
        s
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    /// False once the clause set is known to be unsatisfiable.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    fn next_jitter(&mut self) -> f64 {
        if self.rng == 0 {
            return 0.0;
        }
        // xorshift64*
        let mut x = self.rng;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.rng = x;
        (x.wrapping_mul(0x2545_f491_4f6c_dd1d) >> 11) as f64 / (1u64 << 53) as f64 * 1e-5
    }

    /// Makes variables `0..n` available.
    pub fn reserve_vars(&mut self, n: u32) {
        while self.num_vars < n {
            let v = self.num_vars;
            self.num_vars += 1;
            self.values.push(Value::Unassigned);
            self.levels.push(0);
            self.reasons.push(None);
            let j = self.next_jitter();
            self.activity.push(j);
            self.phase.push(false);
            self.seen.push(false);
            self.watches.push(Vec::new());
            self.watches.push(Vec::new());
            self.heap.grow(self.num_vars as usize);
            self.heap.insert(v, &self.activity);
        }
    }

    fn value(&self, l: Lit) -> Value {
        match self.values[l.var() as usize] {
            Value::Unassigned => Value::Unassigned,
            Value::True if !l.is_negated() => Value::True,
            Value::False if l.is_negated() => Value::True,
            _ => Value::False,
        }
    }

    fn level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds a clause. Must be called at decision level 0 (always the case
    /// outside [`solve`](Self::solve)). Returns false if the solver became
    /// inconsistent.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        debug_assert_eq!(self.level(), 0);
        if !self.ok {
            return false;
        }
        let max_var = lits.iter().map(|l| l.var() + 1).max().unwrap_or(0);
        self.reserve_vars(max_var);
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) {
            return true;
        }
        let mut simplified = Vec::with_capacity(c.len());
        for &l in &c {
            match self.value(l) {
                Value::True => return true,
                Value::False => {}
                Value::Unassigned => simplified.push(l),
            }
        }
        match simplified.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(simplified[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                self.attach(simplified, false);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        let id = self.clauses.len() as u32;
        self.watches[(!lits[0]).index()].push(Watcher { clause: id, blocker: lits[1] });
        self.watches[(!lits[1]).index()].push(Watcher { clause: id, blocker: lits[0] });
        self.clauses.push(Clause { lits, learnt, deleted: false, activity: 0.0 });
        if learnt {
            self.num_learnts += 1;
        }
        id
    }

    fn enqueue(&mut self, l: Lit, reason: Option<u32>) {
        let v = l.var() as usize;
        debug_assert_eq!(self.values[v], Value::Unassigned);
        self.values[v] = if l.is_negated() { Value::False } else { Value::True };
        self.levels[v] = self.level();
        self.reasons[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation; returns a conflicting clause if one arises.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = core::mem::take(&mut self.watches[p.index()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == Value::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cid = w.clause as usize;
                if self.clauses[cid].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cid].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cid].lits[0];
                if first != w.blocker && self.value(first) == Value::True {
                    ws[j] = Watcher { clause: w.clause, blocker: first };
                    j += 1;
                    continue;
                }
                let len = self.clauses[cid].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let l = self.clauses[cid].lits[k];
                    if self.value(l) != Value::False {
                        self.clauses[cid].lits.swap(1, k);
                        self.watches[(!l).index()].push(Watcher { clause: w.clause, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher { clause: w.clause, blocker: first };
                j += 1;
                if self.value(first) == Value::False {
                    conflict = Some(w.clause);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                    self.qhead = self.trail.len();
                } else {
                    self.enqueue(first, Some(w.clause));
                }
            }
            ws.truncate(j);
            debug_assert!(self.watches[p.index()].is_empty());
            self.watches[p.index()] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: u32) {
        self.activity[v as usize] += self.var_inc;
        if self.activity[v as usize] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
            self.heap.rebuild(&self.activity);
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, c: u32) {
        let cl = &mut self.clauses[c as usize];
        if !cl.learnt {
            return;
        }
        cl.activity += self.cla_inc;
        if cl.activity > 1e20 {
            for c in &mut self.clauses {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut conflict: u32) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit::pos(0)];
        let mut pending = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        loop {
            self.bump_clause(conflict);
            let lits = self.clauses[conflict as usize].lits.clone();
            let start = if p.is_some() { 1 } else { 0 };
            for &q in &lits[start..] {
                let v = q.var() as usize;
                if !self.seen[v] && self.levels[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(q.var());
                    if self.levels[v] >= self.level() {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var() as usize] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            self.seen[lit.var() as usize] = false;
            pending -= 1;
            if pending == 0 {
                break;
            }
            conflict = self.reasons[lit.var() as usize].expect("implied literal has a reason");
            // The reason clause has `lit` in position 0 by construction.
            debug_assert_eq!(self.clauses[conflict as usize].lits[0], lit);
        }
        learnt[0] = !p.expect("at least one literal");

        // Drop literals implied by other literals of the clause.
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                if i == 0 {
                    return true;
                }
                match self.reasons[l.var() as usize] {
                    None => true,
                    Some(r) => self.clauses[r as usize].lits[1..].iter().any(|q| {
                        let v = q.var() as usize;
                        !self.seen[v] && self.levels[v] > 0
                    }),
                }
            })
            .collect();
        for l in &learnt {
            self.seen[l.var() as usize] = false;
        }
        let mut learnt: Vec<Lit> =
            learnt.into_iter().zip(keep).filter(|&(_, k)| k).map(|(l, _)| l).collect();

        let back = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.levels[learnt[i].var() as usize] > self.levels[learnt[max_i].var() as usize] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.levels[learnt[1].var() as usize]
        };
        (learnt, back)
    }

    fn cancel_until(&mut self, level: u32) {
        if self.level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var() as usize;
            self.phase[v] = !l.is_negated();
            self.values[v] = Value::Unassigned;
            self.reasons[v] = None;
            self.heap.insert(l.var(), &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.values[v as usize] == Value::Unassigned {
                return Some(Lit::new(v, !self.phase[v as usize]));
            }
        }
        None
    }

    fn is_locked(&self, c: u32) -> bool {
        let first = self.clauses[c as usize].lits[0];
        self.value(first) == Value::True && self.reasons[first.var() as usize] == Some(c)
    }

    fn reduce_db(&mut self) {
        let mut learnts: Vec<u32> = (0..self.clauses.len() as u32)
            .filter(|&c| {
                let cl = &self.clauses[c as usize];
                cl.learnt && !cl.deleted && cl.lits.len() > 2
            })
            .collect();
        learnts.sort_by(|&a, &b| {
            self.clauses[a as usize]
                .activity
                .partial_cmp(&self.clauses[b as usize].activity)
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let remove = learnts.len() / 2;
        for &c in &learnts[..remove] {
            if !self.is_locked(c) {
                let cl = &mut self.clauses[c as usize];
                cl.deleted = true;
                cl.lits = Vec::new();
                self.num_learnts -= 1;
            }
        }
        for ws in &mut self.watches {
            let clauses = &self.clauses;
            ws.retain(|w| !clauses[w.clause as usize].deleted);
        }
    }

    /// Searches for a model. `stop` is polled periodically; returning true
    /// interrupts the search.
    pub fn solve(&mut self, stop: &mut dyn FnMut() -> bool) -> SolveResult {
        if !self.ok {
            return SolveResult::Unsat;
        }
        if self.propagate().is_some() {
            self.ok = false;
            return SolveResult::Unsat;
        }
        self.max_learnts = self.max_learnts.max(self.clauses.len() as f64 / 3.0).max(1000.0);
        let mut restart_limit = RESTART_FIRST as f64;
        let result = loop {
            match self.search(restart_limit as u64, stop) {
                Some(r) => break r,
                None => {
                    self.stats.restarts += 1;
                    restart_limit *= RESTART_GROWTH;
                    self.max_learnts *= 1.05;
                }
            }
        };
        self.cancel_until(0);
        if result == SolveResult::Unsat {
            self.ok = false;
        }
        result
    }

    /// One restart interval. `None` means restart.
    fn search(&mut self, conflict_limit: u64, stop: &mut dyn FnMut() -> bool) -> Option<SolveResult> {
        let mut conflicts = 0u64;
        loop {
            if let Some(conflict) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.level() == 0 {
                    return Some(SolveResult::Unsat);
                }
                let (learnt, back) = self.analyze(conflict);
                self.cancel_until(back);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let first = learnt[0];
                    let c = self.attach(learnt, true);
                    self.bump_clause(c);
                    self.enqueue(first, Some(c));
                }
                self.var_inc /= VAR_DECAY;
                self.cla_inc /= CLAUSE_DECAY;
                if self.stats.conflicts % 256 == 0 && stop() {
                    self.cancel_until(0);
                    return Some(SolveResult::Interrupted);
                }
            } else {
                if conflicts >= conflict_limit {
                    self.cancel_until(0);
                    return None;
                }
                if self.num_learnts as f64 >= self.max_learnts + self.trail.len() as f64 {
                    self.reduce_db();
                }
                match self.pick_branch() {
                    None => {
                        let model = self.values.iter().map(|&v| v == Value::True).collect();
                        return Some(SolveResult::Sat(model));
                    }
                    Some(l) => {
                        self.stats.decisions += 1;
                        if self.stats.decisions % 4096 == 0 && stop() {
                            self.cancel_until(0);
                            return Some(SolveResult::Interrupted);
                        }
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(l, None);
                    }
                }
            }
        }
    }
}
