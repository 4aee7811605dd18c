//! Guarded-command programs from synthesized processes.
//!
//! Environment transitions are abstracted away: every process gets a state
//! variable `st` ranging over the classes of states connected by
//! environment steps, and every internal transition between different
//! classes becomes one command. Locks become shared variables holding the
//! owner's index or `⊥`.

use alloc::collections::BTreeMap;
use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use hashbrown::HashMap;
use thiserror::Error;

use crate::lts::{check_sync_conditions, ActionKind, Lts, StateId, SyncViolation, Vocabulary};
use crate::product::tagged;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodegenError {
    #[error("process {process}: synchronization condition {violation}")]
    Sync { process: usize, violation: SyncViolation },
    #[error("process {0}: vocabulary does not match the LTS")]
    Vocabulary(usize),
    #[error("{components} components but {vocabs} vocabularies")]
    Arity { components: usize, vocabs: usize },
    #[error("simulation stopped after {cap} states (state cap reached; raise the cap or shrink the program)")]
    StateCap { cap: usize },
}

/// Connected components of the environment steps of one LTS.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvClasses {
    class_of: Vec<usize>,
    classes: Vec<Vec<StateId>>,
}

impl EnvClasses {
    pub fn class_of(&self, s: StateId) -> usize {
        self.class_of[s]
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Members of class `c`, ascending.
    pub fn members(&self, c: usize) -> &[StateId] {
        &self.classes[c]
    }

    pub fn classes(&self) -> &[Vec<StateId>] {
        &self.classes
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Classes are numbered by their smallest member.
pub fn env_classes(t: &Lts) -> EnvClasses {
    let mut parent: Vec<usize> = t.states().collect();
    for &(s, a, u) in t.transitions() {
        if t.actions()[a].kind == ActionKind::Env {
            let (rs, ru) = (find(&mut parent, s), find(&mut parent, u));
            if rs != ru {
                parent[rs.max(ru)] = rs.min(ru);
            }
        }
    }
    let mut class_of = vec![usize::MAX; t.num_states()];
    let mut classes: Vec<Vec<StateId>> = Vec::new();
    let mut index_of_root = BTreeMap::new();
    for s in t.states() {
        let r = find(&mut parent, s);
        let c = *index_of_root.entry(r).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        class_of[s] = c;
        classes[c].push(s);
    }
    EnvClasses { class_of, classes }
}

/// `ℓ = i` / `ℓ = ⊥` in guards; `ℓ := i` / `ℓ := ⊥` in updates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LockValue {
    Mine,
    Free,
}

/// A conjunction of tests, or a set of assignments, over one process's view.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation {
    pub st: usize,
    pub vars: Vec<(String, bool)>,
    pub locks: Vec<(String, LockValue)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Command {
    pub action: String,
    pub guard: Valuation,
    pub update: Valuation,
}

/// One allowed initial valuation. A lock absent from `locks` is held by
/// another process.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Initial {
    pub st: usize,
    pub vars: Vec<(String, bool)>,
    pub locks: Vec<(String, LockValue)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessProgram {
    pub name: String,
    /// Shared variables this process reads and writes.
    pub shared: Vec<String>,
    pub locals: Vec<String>,
    pub locks: Vec<String>,
    /// Names of the values of `st`, one per environment class.
    pub states: Vec<String>,
    pub initial: Vec<Initial>,
    pub commands: Vec<Command>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardedProgram {
    pub name: String,
    pub shared: Vec<String>,
    pub locks: Vec<String>,
    pub processes: Vec<ProcessProgram>,
}

fn union_in_order<'a>(lists: impl Iterator<Item = &'a [String]>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for l in lists {
        for x in l {
            if !out.contains(x) {
                out.push(x.clone());
            }
        }
    }
    out
}

/// The program of `components`, process `i` named `names[i]`.
pub fn emit(
    name: &str,
    names: &[String],
    components: &[Lts],
    vocabs: &[Vocabulary],
) -> Result<GuardedProgram, CodegenError> {
    if components.len() != vocabs.len() || names.len() != vocabs.len() {
        return Err(CodegenError::Arity { components: components.len(), vocabs: vocabs.len() });
    }
    let mut processes = Vec::new();
    for (i, (t, v)) in components.iter().zip(vocabs).enumerate() {
        if !v.matches(t) {
            return Err(CodegenError::Vocabulary(i));
        }
        let bad = check_sync_conditions(t, v).map_err(|_| CodegenError::Vocabulary(i))?;
        if let Some(violation) = bad.into_iter().next() {
            return Err(CodegenError::Sync { process: i, violation });
        }
        processes.push(emit_process(&names[i], t, v));
    }
    Ok(GuardedProgram {
        name: name.to_string(),
        shared: union_in_order(vocabs.iter().map(|v| v.shared())),
        locks: union_in_order(vocabs.iter().map(|v| v.locks())),
        processes,
    })
}

fn emit_process(name: &str, t: &Lts, v: &Vocabulary) -> ProcessProgram {
    let classes = env_classes(t);
    let val = |s: StateId, p: &str| t.holds(s, t.prop_id(p).expect("declared proposition"));
    let touches_internal: Vec<bool> = {
        let mut m = vec![false; t.num_states()];
        for &(s, a, u) in t.transitions() {
            if t.actions()[a].kind == ActionKind::Internal {
                m[s] = true;
                m[u] = true;
            }
        }
        m
    };
    // Each class is named after its first member with internal transitions.
    let states: Vec<String> = classes
        .classes()
        .iter()
        .map(|c| {
            let rep = c.iter().copied().find(|&s| touches_internal[s]).unwrap_or(c[0]);
            format!("S{rep}")
        })
        .collect();
    // A local whose value is fixed on a class is implied by the `st` test.
    let constant = |c: usize, x: &str| {
        let m = classes.members(c);
        m.iter().all(|&s| val(s, x) == val(m[0], x))
    };
    let lock_value = |s: StateId, l: &str| {
        if val(s, &Vocabulary::own(l)) {
            Some(LockValue::Mine)
        } else if val(s, &Vocabulary::av(l)) {
            Some(LockValue::Free)
        } else {
            None
        }
    };
    let mut commands = Vec::new();
    for &(s, a, u) in t.transitions() {
        let (cs, cu) = (classes.class_of(s), classes.class_of(u));
        if t.actions()[a].kind != ActionKind::Internal || cs == cu {
            continue;
        }
        let mut gvars: Vec<(String, bool)> = v.shared().iter().map(|g| (g.clone(), val(s, g))).collect();
        gvars.extend(v.locals().iter().filter(|x| !constant(cs, x)).map(|x| (x.clone(), val(s, x))));
        let glocks = v.locks().iter().filter_map(|l| lock_value(s, l).map(|lv| (l.clone(), lv))).collect();
        // Setting a variable that is already false is a no-op and is left out.
        let uvars = v
            .locals()
            .iter()
            .chain(v.shared())
            .filter(|x| val(u, x) || val(s, x))
            .map(|x| (x.clone(), val(u, x)))
            .collect();
        let ulocks = v
            .locks()
            .iter()
            .filter_map(|l| {
                let (own, av) = (Vocabulary::own(l), Vocabulary::av(l));
                if val(u, &own) && !val(s, &own) {
                    Some((l.clone(), LockValue::Mine))
                } else if val(u, &av) && !val(s, &av) {
                    Some((l.clone(), LockValue::Free))
                } else {
                    None
                }
            })
            .collect();
        let cmd = Command {
            action: t.actions()[a].name.clone(),
            guard: Valuation { st: cs, vars: gvars, locks: glocks },
            update: Valuation { st: cu, vars: uvars, locks: ulocks },
        };
        if !commands.contains(&cmd) {
            commands.push(cmd);
        }
    }
    let mut initial: Vec<Initial> = Vec::new();
    for &s in t.initials() {
        let vars = v.locals().iter().chain(v.shared()).map(|x| (x.clone(), val(s, x))).collect();
        let locks = v.locks().iter().filter_map(|l| lock_value(s, l).map(|lv| (l.clone(), lv))).collect();
        let init = Initial { st: classes.class_of(s), vars, locks };
        if !initial.contains(&init) {
            initial.push(init);
        }
    }
    ProcessProgram {
        name: name.to_string(),
        shared: v.shared().to_vec(),
        locals: v.locals().to_vec(),
        locks: v.locks().to_vec(),
        states,
        initial,
        commands,
    }
}

/// Commands that write a lock without holding the right precondition:
/// acquiring needs `ℓ = ⊥` in the guard, releasing needs `ℓ = i`, and
/// writing a shared variable needs some lock held.
pub fn lock_discipline_violations(p: &GuardedProgram) -> Vec<String> {
    let mut out = Vec::new();
    for proc_ in &p.processes {
        for c in &proc_.commands {
            let tests = |l: &str, lv: LockValue| c.guard.locks.iter().any(|(m, x)| m == l && *x == lv);
            for (l, lv) in &c.update.locks {
                let needed = match lv {
                    LockValue::Mine => LockValue::Free,
                    LockValue::Free => LockValue::Mine,
                };
                if !tests(l, needed) {
                    out.push(format!("{}: [{}] writes {l} without testing it", proc_.name, c.action));
                }
            }
            let writes_shared = c.update.vars.iter().any(|(x, b)| {
                proc_.shared.contains(x) && c.guard.vars.iter().any(|(y, a)| y == x && a != b)
            });
            let holds_any = c.guard.locks.iter().any(|(_, lv)| *lv == LockValue::Mine)
                || c.update.locks.iter().any(|(_, lv)| *lv == LockValue::Mine);
            if writes_shared && !holds_any {
                out.push(format!("{}: [{}] writes a shared variable without a lock", proc_.name, c.action));
            }
        }
    }
    out
}

fn write_valuation(out: &mut String, v: &Valuation, states: &[String], i: usize, sep: &str, op: &str) {
    let _ = write!(out, "st{op}{}", states[v.st]);
    for (x, b) in &v.vars {
        let _ = write!(out, "{sep}{x}{op}{}", u8::from(*b));
    }
    for (l, lv) in &v.locks {
        match lv {
            LockValue::Mine => {
                let _ = write!(out, "{sep}{l}{op}{i}");
            }
            LockValue::Free => {
                let _ = write!(out, "{sep}{l}{op}⊥");
            }
        }
    }
}

/// Text form of `p`.
pub fn render(p: &GuardedProgram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Program {}", p.name);
    if !p.shared.is_empty() {
        let _ = writeln!(out, "  var {}: bit;", p.shared.join(", "));
    }
    if !p.locks.is_empty() {
        let _ = writeln!(out, "  var {}: Lock;", p.locks.join(", "));
    }
    for (i, pr) in p.processes.iter().enumerate() {
        let _ = writeln!(out, "  Process {} (i = {i})", pr.name);
        if !pr.locals.is_empty() {
            let _ = writeln!(out, "    var {}: bit", pr.locals.join(", "));
        }
        let _ = writeln!(out, "    var st: {{{}}}", pr.states.join(", "));
        let inits: Vec<String> = pr
            .initial
            .iter()
            .map(|init| {
                let mut s = format!("st={}", pr.states[init.st]);
                for (x, b) in &init.vars {
                    let _ = write!(s, " ∧ {}{x}", if *b { "" } else { "¬" });
                }
                for l in &pr.locks {
                    match init.locks.iter().find(|(m, _)| m == l).map(|(_, lv)| *lv) {
                        Some(LockValue::Mine) => {
                            let _ = write!(s, " ∧ {l}={i}");
                        }
                        Some(LockValue::Free) => {
                            let _ = write!(s, " ∧ {l}=⊥");
                        }
                        None => {
                            let _ = write!(s, " ∧ {l}≠{i} ∧ {l}≠⊥");
                        }
                    }
                }
                s
            })
            .collect();
        let _ = writeln!(out, "    initial: {}", inits.join(" ∨ "));
        out.push_str("    begin\n");
        for c in &pr.commands {
            let _ = write!(out, "      [{}] ", c.action);
            write_valuation(&mut out, &c.guard, &pr.states, i, " ∧ ", "=");
            out.push_str(" → ");
            write_valuation(&mut out, &c.update, &pr.states, i, ", ", ":=");
            out.push('\n');
        }
        out.push_str("    end\n");
    }
    out.push_str("end\n");
    out
}

/// Global state of a running program.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Config {
    st: Vec<usize>,
    locals: Vec<Vec<bool>>,
    shared: Vec<bool>,
    /// `None` is `⊥`.
    locks: Vec<Option<usize>>,
}

#[derive(Clone, Copy)]
enum Source {
    Shared(usize),
    Free(usize),
    Local(usize, usize),
    Mine(usize, usize),
}

impl Source {
    fn read(self, c: &Config) -> bool {
        match self {
            Source::Shared(k) => c.shared[k],
            Source::Free(l) => c.locks[l].is_none(),
            Source::Local(i, k) => c.locals[i][k],
            Source::Mine(i, l) => c.locks[l] == Some(i),
        }
    }
}

struct Layout<'a> {
    p: &'a GuardedProgram,
    /// Per process: variable name to (is_shared, index).
    vars: Vec<HashMap<&'a str, (bool, usize)>>,
    lock_ix: HashMap<&'a str, usize>,
}

impl<'a> Layout<'a> {
    fn new(p: &'a GuardedProgram) -> Self {
        let vars = p
            .processes
            .iter()
            .map(|pr| {
                let mut m = HashMap::new();
                for (k, x) in pr.locals.iter().enumerate() {
                    m.insert(x.as_str(), (false, k));
                }
                for x in &pr.shared {
                    let k = p.shared.iter().position(|y| y == x).expect("declared shared variable");
                    m.insert(x.as_str(), (true, k));
                }
                m
            })
            .collect();
        let lock_ix = p.locks.iter().enumerate().map(|(k, l)| (l.as_str(), k)).collect();
        Layout { p, vars, lock_ix }
    }

    fn read(&self, c: &Config, i: usize, x: &str) -> bool {
        match self.vars[i][x] {
            (true, k) => c.shared[k],
            (false, k) => c.locals[i][k],
        }
    }

    fn enabled(&self, c: &Config, i: usize, g: &Valuation) -> bool {
        c.st[i] == g.st
            && g.vars.iter().all(|(x, b)| self.read(c, i, x) == *b)
            && g.locks.iter().all(|(l, lv)| {
                let cur = c.locks[self.lock_ix[l.as_str()]];
                match lv {
                    LockValue::Mine => cur == Some(i),
                    LockValue::Free => cur.is_none(),
                }
            })
    }

    fn apply(&self, c: &Config, i: usize, u: &Valuation) -> Config {
        let mut n = c.clone();
        n.st[i] = u.st;
        for (x, b) in &u.vars {
            match self.vars[i][x.as_str()] {
                (true, k) => n.shared[k] = *b,
                (false, k) => n.locals[i][k] = *b,
            }
        }
        for (l, lv) in &u.locks {
            n.locks[self.lock_ix[l.as_str()]] = match lv {
                LockValue::Mine => Some(i),
                LockValue::Free => None,
            };
        }
        n
    }

    /// Propositions in the order used by [`crate::product::compose`],
    /// with where their value comes from.
    fn props(&self) -> Vec<(String, Source)> {
        let mut props: Vec<(String, Source)> = Vec::new();
        for pr in &self.p.processes {
            for x in &pr.shared {
                if !props.iter().any(|(n, _)| n == x) {
                    let k = self.p.shared.iter().position(|y| y == x).unwrap();
                    props.push((x.clone(), Source::Shared(k)));
                }
            }
            for l in &pr.locks {
                let av = Vocabulary::av(l);
                if !props.iter().any(|(n, _)| *n == av) {
                    props.push((av, Source::Free(self.lock_ix[l.as_str()])));
                }
            }
        }
        for (i, pr) in self.p.processes.iter().enumerate() {
            for (k, x) in pr.locals.iter().enumerate() {
                props.push((tagged(x, i), Source::Local(i, k)));
            }
            for l in &pr.locks {
                props.push((tagged(&Vocabulary::own(l), i), Source::Mine(i, self.lock_ix[l.as_str()])));
            }
        }
        props
    }

    fn initial_configs(&self) -> Vec<Config> {
        let n = self.p.processes.len();
        let mut out = Vec::new();
        let mut choice = vec![0usize; n];
        if self.p.processes.iter().any(|pr| pr.initial.is_empty()) {
            return out;
        }
        loop {
            self.combine(&choice, &mut out);
            // Next combination, odometer style.
            let mut k = 0;
            loop {
                if k == n {
                    return out;
                }
                choice[k] += 1;
                if choice[k] < self.p.processes[k].initial.len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }

    fn combine(&self, choice: &[usize], out: &mut Vec<Config>) {
        let p = self.p;
        let n = p.processes.len();
        let mut shared: Vec<Option<bool>> = vec![None; p.shared.len()];
        let mut locals = Vec::with_capacity(n);
        let mut st = Vec::with_capacity(n);
        for (i, pr) in p.processes.iter().enumerate() {
            let init = &pr.initial[choice[i]];
            st.push(init.st);
            let mut loc = vec![false; pr.locals.len()];
            for (x, b) in &init.vars {
                match self.vars[i][x.as_str()] {
                    (true, k) => match shared[k] {
                        Some(old) if old != *b => return,
                        _ => shared[k] = Some(*b),
                    },
                    (false, k) => loc[k] = *b,
                }
            }
            locals.push(loc);
        }
        let allowed = |l: &String, value: Option<usize>| {
            p.processes.iter().enumerate().all(|(i, pr)| {
                if !pr.locks.contains(l) {
                    return value != Some(i);
                }
                match pr.initial[choice[i]].locks.iter().find(|(m, _)| m == l).map(|(_, lv)| *lv) {
                    Some(LockValue::Mine) => value == Some(i),
                    Some(LockValue::Free) => value.is_none(),
                    None => value.is_some() && value != Some(i),
                }
            })
        };
        let options: Vec<Vec<Option<usize>>> = p
            .locks
            .iter()
            .map(|l| {
                core::iter::once(None)
                    .chain((0..n).map(Some))
                    .filter(|v| allowed(l, *v))
                    .collect()
            })
            .collect();
        if options.iter().any(|o| o.is_empty()) {
            return;
        }
        let shared: Vec<bool> = shared.into_iter().map(|b| b.unwrap_or(false)).collect();
        let mut pick = vec![0usize; options.len()];
        loop {
            let locks = pick.iter().zip(&options).map(|(&k, o)| o[k]).collect();
            out.push(Config { st: st.clone(), locals: locals.clone(), shared: shared.clone(), locks });
            let mut k = 0;
            loop {
                if k == options.len() {
                    return;
                }
                pick[k] += 1;
                if pick[k] < options[k].len() {
                    break;
                }
                pick[k] = 0;
                k += 1;
            }
        }
    }
}

/// Name of the self-loop action added where no command is enabled.
pub const IDLE: &str = "idle";

/// The reachable state space of `p` as an LTS. Actions are `a@i` for
/// command `a` of process `i`, plus [`IDLE`] on states where every guard is
/// false. Fails once more than `cap` states are found.
pub fn simulate(p: &GuardedProgram, cap: usize) -> Result<Lts, CodegenError> {
    let lay = Layout::new(p);
    let mut action_names: Vec<String> = Vec::new();
    for (i, pr) in p.processes.iter().enumerate() {
        for c in &pr.commands {
            let n = tagged(&c.action, i);
            if !action_names.contains(&n) {
                action_names.push(n);
            }
        }
    }
    action_names.push(IDLE.to_string());
    let idle = action_names.len() - 1;
    let mut index: HashMap<Config, usize> = HashMap::new();
    let mut configs: Vec<Config> = Vec::new();
    let mut queue = VecDeque::new();
    let mut edges = Vec::new();
    let mut initials = Vec::new();
    let mut intern = |c: Config, configs: &mut Vec<Config>, queue: &mut VecDeque<usize>| -> Result<usize, CodegenError> {
        if let Some(&k) = index.get(&c) {
            return Ok(k);
        }
        if configs.len() >= cap {
            return Err(CodegenError::StateCap { cap });
        }
        let k = configs.len();
        index.insert(c.clone(), k);
        configs.push(c);
        queue.push_back(k);
        Ok(k)
    };
    if p.processes.is_empty() {
        let empty = Config { st: vec![], locals: vec![], shared: vec![], locks: vec![] };
        initials.push(intern(empty, &mut configs, &mut queue)?);
    }
    for c in lay.initial_configs() {
        let k = intern(c, &mut configs, &mut queue)?;
        if !initials.contains(&k) {
            initials.push(k);
        }
    }
    while let Some(k) = queue.pop_front() {
        let cur = configs[k].clone();
        let mut any = false;
        for (i, pr) in p.processes.iter().enumerate() {
            for c in &pr.commands {
                if lay.enabled(&cur, i, &c.guard) {
                    any = true;
                    let next = lay.apply(&cur, i, &c.update);
                    let t = intern(next, &mut configs, &mut queue)?;
                    let a = action_names.iter().position(|n| *n == tagged(&c.action, i)).unwrap();
                    edges.push((k, a, t));
                }
            }
        }
        if !any {
            edges.push((k, idle, k));
        }
    }
    let (names, sources): (Vec<String>, Vec<Source>) = lay.props().into_iter().unzip();
    let actions = action_names.into_iter().map(crate::lts::Action::internal).collect();
    let mut b = Lts::builder(configs.len(), names, actions);
    for &s in &initials {
        b.initial(s);
    }
    for (k, c) in configs.iter().enumerate() {
        for (pid, src) in sources.iter().enumerate() {
            if src.read(c) {
                b.label_id(k, pid);
            }
        }
    }
    for (s, a, t) in edges {
        b.transition_id(s, a, t);
    }
    Ok(b.build().expect("well-formed simulation"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::fixtures::{mutex_lts, mutex_vocab};
    use crate::lts::Action;
    use crate::ltl::{check, parse_ltl};
    use crate::product::compose;
    use proptest::prelude::*;

    fn mutex_program() -> GuardedProgram {
        let names = ["P0".to_string(), "P1".to_string()];
        emit("Mutex", &names, &[mutex_lts(), mutex_lts()], &[mutex_vocab(), mutex_vocab()]).unwrap()
    }

    #[test]
    fn mutex_classes() {
        let c = env_classes(&mutex_lts());
        assert_eq!(c.classes(), [vec![0], vec![1], vec![2, 5], vec![3, 4]]);
        let p = mutex_program();
        assert_eq!(p.processes[0].states, ["S0", "S1", "S5", "S3"]);
    }

    #[test]
    fn no_env_steps_give_singletons() {
        let mut b = Lts::builder(3, vec![], vec![Action::internal("a")]);
        b.initial(0).transition(0, "a", 1).transition(1, "a", 2).transition(2, "a", 0);
        let c = env_classes(&b.build().unwrap());
        assert_eq!(c.len(), 3);
        assert!((0..3).all(|s| c.members(c.class_of(s)) == [s]));
    }

    #[test]
    fn mutex_commands() {
        let p = mutex_program();
        let text = render(&p);
        let expected = "\
Program Mutex
  var m: Lock;
  Process P0 (i = 0)
    var ncs, cs, try: bit
    var st: {S0, S1, S5, S3}
    initial: st=S5 ∧ ncs ∧ ¬cs ∧ ¬try ∧ m=⊥
    begin
      [enterNCS] st=S0 ∧ m=0 → st:=S5, ncs:=1, cs:=0, m:=⊥
      [enterCS] st=S1 ∧ m=0 → st:=S0, cs:=1, try:=0
      [getLock] st=S3 ∧ m=⊥ → st:=S1, try:=1, m:=0
      [enterTry] st=S5 ∧ m=⊥ → st:=S3, ncs:=0, try:=1
    end
";
        assert!(text.starts_with(expected), "{text}");
        assert!(text.contains("Process P1 (i = 1)"));
        assert!(text.ends_with("end\nend\n"));
        assert!(lock_discipline_violations(&p).is_empty());
    }

    #[test]
    fn internal_loop_inside_a_class_emits_nothing() {
        let v = Vocabulary::from_strs(&[], &["x"], &[], &["a"]);
        let mut b = v.builder(1);
        b.initial(0).transition(0, "a", 0);
        let p = emit("t", &["P".to_string()], &[b.build().unwrap()], &[v]).unwrap();
        assert!(p.processes[0].commands.is_empty());
        let sim = simulate(&p, 10).unwrap();
        assert_eq!(sim.num_states(), 1);
        assert_eq!(sim.transitions(), [(0, sim.action_id(IDLE).unwrap(), 0)]);
    }

    #[test]
    fn empty_program_idles() {
        let p = GuardedProgram { name: "e".into(), shared: vec![], locks: vec![], processes: vec![] };
        let sim = simulate(&p, 10).unwrap();
        assert_eq!((sim.num_states(), sim.transitions().len()), (1, 1));
    }

    #[test]
    fn sync_violations_are_rejected() {
        let t = mutex_lts().without_transition(5, 4, 2);
        let e = emit("m", &["P".to_string()], &[t], &[mutex_vocab()]).unwrap_err();
        assert!(matches!(e, CodegenError::Sync { process: 0, .. }), "{e}");
    }

    #[test]
    fn state_cap() {
        assert_eq!(simulate(&mutex_program(), 3), Err(CodegenError::StateCap { cap: 3 }));
    }

    #[test]
    fn simulation_agrees_with_product() {
        let p = mutex_program();
        let sim = simulate(&p, 10_000).unwrap();
        let product = compose(vec![mutex_lts(), mutex_lts()], &[mutex_vocab(), mutex_vocab()]).unwrap();
        assert_eq!(sim.props(), product.props());
        for f in [
            "G !(cs@0 & cs@1)",
            "G F cs@0",
            "F cs@1",
            "G (try@0 -> F cs@0)",
            "G (own_m@0 -> !av_m)",
            "ncs@0 U try@0",
            "G !own_m@1",
            "F G ncs@1",
        ] {
            let f = parse_ltl(f).unwrap();
            let a = check(&sim, &f, &mut || false).unwrap().verdict.holds();
            let b = check(&product, &f, &mut || false).unwrap().verdict.holds();
            assert_eq!(a, b, "{f}");
        }
    }

    /// Same-class relation from undirected reachability, one search per state.
    fn oracle(t: &Lts) -> Vec<Vec<bool>> {
        let n = t.num_states();
        let mut same = vec![vec![false; n]; n];
        for s in 0..n {
            let mut stack = vec![s];
            same[s][s] = true;
            while let Some(x) = stack.pop() {
                for &(a, b, c) in t.transitions() {
                    if t.actions()[b].kind != ActionKind::Env {
                        continue;
                    }
                    for (from, to) in [(a, c), (c, a)] {
                        if from == x && !same[s][to] {
                            same[s][to] = true;
                            stack.push(to);
                        }
                    }
                }
            }
        }
        same
    }

    proptest! {
        #[test]
        fn classes_match_reachability(n in 1usize..7, edges in proptest::collection::vec((0usize..7, 0usize..2, 0usize..7), 0..14)) {
            let mut b = Lts::builder(n, vec![], vec![Action::internal("a"), Action::env("e")]);
            b.initial(0);
            for (s, a, t) in edges {
                b.transition_id(s % n, a, t % n);
            }
            let t = b.build().unwrap();
            let c = env_classes(&t);
            let same = oracle(&t);
            for s in 0..n {
                for u in 0..n {
                    prop_assert_eq!(c.class_of(s) == c.class_of(u), same[s][u]);
                }
            }
            let total: usize = c.classes().iter().map(|m| m.len()).sum();
            prop_assert_eq!(total, n);
        }
    }
}
