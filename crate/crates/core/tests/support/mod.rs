//! Oracle suites shared by the property tests and the acceptance report.
#![allow(dead_code)]

use std::collections::BTreeSet;

use locksynth_core::codegen::{emit, simulate};
use locksynth_core::dsl::{parse_spec, MUTEX_DSPEC, RW_DSPEC};
use locksynth_core::finder::{instances, Dedup, FinderOptions, InstanceStream};
use locksynth_core::logic::{eval, holds, Rel, RelFormula as F, Signature, Term};
use locksynth_core::ltl::{check, Ltl, Verdict};
use locksynth_core::lts::{check_sync_conditions, Action, ActionKind, FinitePath, Lts, StateId, TransitionSystem, Vocabulary};
use locksynth_core::product::{compose, tagged, Product, ProductAction, ProductState};
use locksynth_core::spec::{cnf_of_path, not_of_path, oplus, pin_env, ref_spec, NamedFormula, ProcessSpec, SystemSpec};
use locksynth_core::synth::{start_search, BatchSchedule, FrozenClock, SynthOptions, SynthesisResult};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Default)]
pub struct Suite {
    pub cases: usize,
    /// Sub-checks performed across all cases.
    pub checks: usize,
    pub failures: Vec<String>,
}

impl Suite {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, msg: String) {
        if self.failures.len() < 20 {
            self.failures.push(msg);
        }
    }
}

fn quiet() -> FinderOptions {
    FinderOptions { validate: false, ..FinderOptions::default() }
}

/// Order-independent description of an LTS.
pub fn lts_key(t: &Lts) -> (Vec<StateId>, Vec<Vec<usize>>, Vec<(StateId, usize, StateId)>) {
    let mut init = t.initials().to_vec();
    init.sort();
    let labels = t.labels().iter().map(|l| l.ones().collect()).collect();
    let mut trans = t.transitions().to_vec();
    trans.sort();
    (init, labels, trans)
}

// ---------------------------------------------------------------- formulas

/// A random closed formula of depth at most `depth`.
pub fn random_formula(rng: &mut ChaCha8Rng, sig: &Signature, depth: usize) -> F {
    let mut scope = Vec::new();
    gen(rng, sig, depth, &mut scope)
}

fn gen(rng: &mut ChaCha8Rng, sig: &Signature, depth: usize, scope: &mut Vec<String>) -> F {
    if depth == 0 || (!scope.is_empty() && rng.gen_bool(0.25)) {
        return atom(rng, sig, scope);
    }
    let choice = if scope.is_empty() { rng.gen_range(5..7) } else { rng.gen_range(0..7) };
    match choice {
        0 => F::not(gen(rng, sig, depth - 1, scope)),
        1 => F::and(vec![gen(rng, sig, depth - 1, scope), gen(rng, sig, depth - 1, scope)]),
        2 => F::or(vec![gen(rng, sig, depth - 1, scope), gen(rng, sig, depth - 1, scope)]),
        3 => F::implies(gen(rng, sig, depth - 1, scope), gen(rng, sig, depth - 1, scope)),
        4 => F::iff(gen(rng, sig, depth - 1, scope), gen(rng, sig, depth - 1, scope)),
        c => {
            let v = format!("x{}", scope.len());
            scope.push(v.clone());
            let body = gen(rng, sig, depth - 1, scope);
            scope.pop();
            if c == 5 {
                F::forall(&v, body)
            } else {
                F::exists(&v, body)
            }
        }
    }
}

fn atom(rng: &mut ChaCha8Rng, sig: &Signature, scope: &[String]) -> F {
    if scope.is_empty() {
        return if rng.gen_bool(0.5) { F::True } else { F::False };
    }
    let v = |rng: &mut ChaCha8Rng| Term::Var(scope.choose(rng).unwrap().clone());
    let rel = |rng: &mut ChaCha8Rng| {
        if sig.actions.is_empty() || rng.gen_bool(0.3) {
            Rel::Post
        } else {
            Rel::Action(sig.actions.choose(rng).unwrap().name.clone())
        }
    };
    match rng.gen_range(0..6) {
        0 => F::Init(v(rng)),
        1 if !sig.props.is_empty() => F::Prop(sig.props.choose(rng).unwrap().clone(), v(rng)),
        1 | 2 => F::Edge { rel: rel(rng), from: v(rng), to: v(rng) },
        3 => F::Closure { rel: rel(rng), from: v(rng), to: v(rng) },
        4 => F::Eq(v(rng), v(rng)),
        _ => F::Closure { rel: Rel::Post, from: v(rng), to: v(rng) },
    }
}

/// Every LTS over `sig` with `k` states, by counting through all bit
/// patterns of initial flags, labels and edges.
pub fn all_lts(sig: &Signature, k: usize) -> Vec<Lts> {
    let (np, na) = (sig.props.len(), sig.actions.len());
    let bits = k + k * np + na * k * k;
    assert!(bits <= 20, "brute force over {bits} bits");
    let mut out = Vec::with_capacity(1 << bits);
    for code in 0u32..(1 << bits) {
        let bit = |i: usize| code >> i & 1 == 1;
        let mut b = Lts::builder(k, sig.props.clone(), sig.actions.clone());
        let mut i = 0;
        for s in 0..k {
            if bit(i) {
                b.initial(s);
            }
            i += 1;
        }
        for s in 0..k {
            for p in 0..np {
                if bit(i) {
                    b.label_id(s, p);
                }
                i += 1;
            }
        }
        for a in 0..na {
            for s in 0..k {
                for t in 0..k {
                    if bit(i) {
                        b.transition_id(s, a, t);
                    }
                    i += 1;
                }
            }
        }
        out.push(b.build().unwrap());
    }
    out
}

/// SAT-enumerated instance sets against brute-force filtering, for
/// `count` random formulas of depth at most 4 at bounds 1 to 3.
pub fn finder_oracle(count: usize, seed: u64) -> Suite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigs = [
        (1, Signature::new(vec!["p".into(), "q".into()], vec![Action::internal("a"), Action::env("e")])),
        (2, Signature::new(vec!["p".into()], vec![Action::internal("a"), Action::env("e")])),
        (3, Signature::new(vec!["p".into()], vec![Action::internal("a")])),
    ];
    let universes: Vec<Vec<Lts>> = sigs.iter().map(|(k, s)| all_lts(s, *k)).collect();
    let opts = FinderOptions { require_initial: false, require_serial: false, dedup: Dedup::None, validate: false, seed: 0 };
    let mut suite = Suite::default();
    for n in 0..count {
        let which = n % sigs.len();
        let (k, sig) = &sigs[which];
        let f = random_formula(&mut rng, sig, 1 + n % 4);
        assert!(f.depth() <= 4);
        let expected: BTreeSet<_> =
            universes[which].iter().filter(|t| holds(&f, t).unwrap()).map(lts_key).collect();
        let found = instances(sig, std::slice::from_ref(&f), *k, opts.clone()).unwrap();
        let got: BTreeSet<_> = found.iter().map(lts_key).collect();
        suite.cases += 1;
        suite.checks += expected.len();
        if got.len() != found.len() {
            suite.fail(format!("k={k} `{f}`: duplicate instances"));
        }
        if got != expected {
            suite.fail(format!("k={k} `{f}`: finder {} instances, brute force {}", got.len(), expected.len()));
        }
    }
    suite
}

// ---------------------------------------------------------------- LTL

/// The five property shapes, instantiated with atoms `p` and `q`.
pub fn shapes(p: &str, q: &str) -> Vec<(Shape, Ltl)> {
    let (a, b) = (Ltl::atom(p), Ltl::atom(q));
    vec![
        (Shape::Always, Ltl::always(a.clone())),
        (Shape::Eventually, Ltl::eventually(a.clone())),
        (Shape::Until, Ltl::until(a.clone(), b.clone())),
        (Shape::NeverBoth, Ltl::always(Ltl::not(Ltl::and(a.clone(), b)))),
        (Shape::InfinitelyOften, Ltl::always(Ltl::eventually(a))),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Always,
    Eventually,
    Until,
    NeverBoth,
    InfinitelyOften,
}

/// Direct semantics of a shape on the lasso word `labels` whose last
/// position jumps back to `loop_start`.
pub fn shape_holds(shape: Shape, labels: &[(bool, bool)], loop_start: usize) -> bool {
    match shape {
        Shape::Always => labels.iter().all(|l| l.0),
        Shape::Eventually => labels.iter().any(|l| l.0),
        Shape::Until => match labels.iter().position(|l| l.1) {
            Some(i) => labels[..i].iter().all(|l| l.0),
            None => false,
        },
        Shape::NeverBoth => labels.iter().all(|l| !(l.0 && l.1)),
        Shape::InfinitelyOften => labels[loop_start..].iter().any(|l| l.0),
    }
}

fn successors(p: &Product, s: &ProductState) -> Vec<(Option<ProductAction>, ProductState)> {
    let next = p.step(s);
    if next.is_empty() {
        vec![(None, s.clone())]
    } else {
        next.into_iter().map(|(a, t)| (Some(a), t)).collect()
    }
}

/// Every simple lasso from an initial state: a path without repeated states
/// followed by one step back into it. `visit` gets the states and the loop
/// entry.
pub fn simple_lassos(p: &Product, visit: &mut dyn FnMut(&[ProductState], usize)) {
    fn go(p: &Product, path: &mut Vec<ProductState>, visit: &mut dyn FnMut(&[ProductState], usize)) {
        let last = path.last().unwrap().clone();
        for (_, t) in successors(p, &last) {
            if let Some(j) = path.iter().position(|s| *s == t) {
                visit(path, j);
            } else {
                path.push(t);
                go(p, path, visit);
                path.pop();
            }
        }
    }
    for s in p.initial_states() {
        go(p, &mut vec![s], visit);
    }
}

/// The products of the corpus: pairs of instances of the bundled mutex and
/// reader/writer processes with at most `max_states` reachable states.
pub fn corpus(max_states: usize) -> Vec<Product> {
    let mut pools: Vec<(Vec<Lts>, Vec<Lts>, Vec<Vocabulary>)> = Vec::new();
    for src in [MUTEX_DSPEC, RW_DSPEC] {
        let spec = parse_spec(src).unwrap();
        let vocabs: Vec<Vocabulary> = spec.processes.iter().map(|p| p.vocab.clone()).collect();
        let take = |p: &ProcessSpec, k: usize| {
            let opts = FinderOptions { dedup: Dedup::Reachable, ..quiet() };
            let mut s = InstanceStream::new(&p.signature(), &p.closed_formulas(), k, opts).unwrap();
            let mut v = Vec::new();
            while v.len() < 6 {
                match s.next_instance(&mut || false).unwrap() {
                    Some(t) => v.push(t),
                    None => break,
                }
            }
            v
        };
        for k in [3, 4] {
            pools.push((take(&spec.processes[0], k), take(&spec.processes[1], k), vocabs.clone()));
        }
    }
    let mut out = Vec::new();
    for (a, b, vocabs) in pools {
        for x in &a {
            for y in &b {
                let p = compose(vec![x.clone(), y.clone()], &vocabs).unwrap();
                if p.reachable().len() <= max_states {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// Checker verdicts against exhaustive simple-lasso enumeration on the
/// corpus, for all five shapes over consecutive atom pairs.
pub fn ltl_oracle() -> Suite {
    let mut suite = Suite::default();
    for (n, product) in corpus(12).iter().enumerate() {
        let props = product.props().to_vec();
        let mut lassos: Vec<(Vec<ProductState>, usize)> = Vec::new();
        simple_lassos(product, &mut |path, j| lassos.push((path.to_vec(), j)));
        for (i, p) in props.iter().enumerate() {
            let q = &props[(i + 1) % props.len()];
            let (pi, qi) = (i, (i + 1) % props.len());
            let word = |states: &[ProductState]| -> Vec<(bool, bool)> {
                states
                    .iter()
                    .map(|s| {
                        let l = product.label_of(s);
                        (l.contains(pi), l.contains(qi))
                    })
                    .collect()
            };
            for (shape, f) in shapes(p, q) {
                suite.cases += 1;
                suite.checks += lassos.len();
                let expected = lassos.iter().all(|(path, j)| shape_holds(shape, &word(path), *j));
                let report = check(product, &f, &mut || false).unwrap();
                match report.verdict {
                    Verdict::Holds if expected => {}
                    Verdict::Holds => suite.fail(format!("product {n}: `{f}` holds per checker, violated per lassos")),
                    Verdict::Violated(l) => {
                        if expected {
                            suite.fail(format!("product {n}: `{f}` violated per checker, holds per lassos"));
                        }
                        let run = product.initial_states().contains(&l.states[0])
                            && l.states.windows(2).all(|w| successors(product, &w[0]).iter().any(|(_, t)| *t == w[1]))
                            && l.states.last() == l.states.get(l.loop_start);
                        let len = l.states.len() - 1;
                        if !run || shape_holds(shape, &word(&l.states[..len]), l.loop_start) {
                            suite.fail(format!("product {n}: lasso for `{f}` does not re-validate"));
                        }
                    }
                }
            }
        }
    }
    suite
}

// ---------------------------------------------------------------- refinement

/// Process specifications to sample from: the bundled mutex and
/// reader/writer processes, and random specifications over one lock.
pub fn spec_pool(rng: &mut ChaCha8Rng, random: usize) -> Vec<ProcessSpec> {
    let mut pool = Vec::new();
    pool.push(parse_spec(MUTEX_DSPEC).unwrap().processes[0].clone());
    let rw = parse_spec(RW_DSPEC).unwrap();
    pool.extend(rw.processes.iter().cloned());
    let v = Vocabulary::from_strs(&[], &["x"], &["m"], &["a", "b"]);
    let sig = Signature::of_vocab(&v);
    while pool.len() < 3 + random {
        let extra = (0..pool.len() % 3).map(|j| NamedFormula::new(format!("r{j}"), random_formula(rng, &sig, 3))).collect();
        pool.push(ProcessSpec::new("random", v.clone(), extra));
    }
    pool
}

/// The `n` instances of `spec` at bound `k` with the most internal
/// transitions, up to `max_internal`, among the first 200.
pub fn sample_instances(spec: &ProcessSpec, k: usize, n: usize, max_internal: usize) -> Vec<Lts> {
    let opts = FinderOptions { dedup: Dedup::Isomorphism, ..quiet() };
    let Ok(mut s) = InstanceStream::new(&spec.signature(), &spec.closed_formulas(), k, opts) else {
        return Vec::new();
    };
    let internal = |t: &Lts| t.transitions().iter().filter(|(_, a, _)| t.actions()[*a].kind == ActionKind::Internal).count();
    let mut out = Vec::new();
    for _ in 0..200 {
        let Some(t) = s.next_instance(&mut || false).unwrap() else { break };
        if internal(&t) <= max_internal {
            out.push(t);
        }
    }
    // The richest instances leave the most room for refinement.
    out.sort_by_key(|t| core::cmp::Reverse(internal(t)));
    out.truncate(n);
    out
}

fn random_path(rng: &mut ChaCha8Rng, t: &Lts) -> Option<FinitePath> {
    for _ in 0..20 {
        let mut s = rng.gen_range(0..t.num_states());
        let mut states = vec![s];
        let mut actions = Vec::new();
        for _ in 0..rng.gen_range(1..=5) {
            let all = t.successors(s).unwrap();
            let internal: Vec<_> =
                all.iter().copied().filter(|&(a, _)| t.actions()[a].kind == ActionKind::Internal).collect();
            let succ = if internal.is_empty() || rng.gen_bool(0.1) { all.to_vec() } else { internal };
            if rng.gen_bool(0.15) {
                states.push(s);
                actions.push(None);
                continue;
            }
            let Some(&(a, u)) = succ.choose(rng) else { break };
            states.push(u);
            actions.push(Some(a));
            s = u;
        }
        let p = FinitePath::new(states, actions).unwrap();
        if p.len() >= 1 && !p.is_all_stutter() {
            return Some(p);
        }
    }
    None
}

fn action_names(t: &Lts) -> Vec<String> {
    t.actions().iter().map(|a| a.name.clone()).collect()
}

/// For sampled (spec, T, path) at bounds up to 4: no instance of
/// Ref(spec, T) extended with the exclusion of the path contains the path.
pub fn exclusion_suite(samples: usize, seed: u64) -> Suite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = spec_pool(&mut rng, 6);
    let mut suite = Suite::default();
    'outer: for round in 0.. {
        for spec in &pool {
            for k in 2..=4 {
                for t in sample_instances(spec, k, 2, 10) {
                    let Some(path) = random_path(&mut rng, &t) else { continue };
                    let names = action_names(&t);
                    let refined = oplus(&ref_spec(spec, &t).unwrap(), &not_of_path(&path, &names).unwrap()).unwrap();
                    let cnf = cnf_of_path(&path, &names).unwrap();
                    let found = instances(&refined.signature(), &refined.closed_formulas(), k, quiet()).unwrap();
                    suite.cases += 1;
                    suite.checks += found.len();
                    if std::env::var_os("ORACLE_TRACE").is_some() {
                        eprintln!("{} k={k} path={:?} instances={}", spec.name, path.states(), found.len());
                    }
                    for inst in &found {
                        let has_path = path
                            .states()
                            .windows(2)
                            .all(|w| w[0] == w[1] || inst.transitions().iter().any(|&(s, _, u)| s == w[0] && u == w[1]));
                        if eval(&cnf, inst, &pin_env(k)).unwrap() || has_path {
                            suite.fail(format!("{} k={k}: an instance keeps the excluded path {:?}", spec.name, path.states()));
                        }
                    }
                    if suite.cases >= samples {
                        break 'outer;
                    }
                }
            }
        }
        assert!(round < 50, "not enough samples");
    }
    suite
}

/// Reachable states of `t`, by breadth-first search.
pub fn reachable_states(t: &Lts) -> BTreeSet<StateId> {
    let mut seen: BTreeSet<StateId> = t.initials().iter().copied().collect();
    let mut queue: Vec<StateId> = seen.iter().copied().collect();
    while let Some(s) = queue.pop() {
        for &(_, u) in t.successors(s).unwrap() {
            if seen.insert(u) {
                queue.push(u);
            }
        }
    }
    seen
}

/// Candidate invariants: literals and two-literal clauses over the props.
pub fn invariants(t: &Lts) -> Vec<(String, Box<dyn Fn(&Lts, StateId) -> bool>)> {
    let mut out: Vec<(String, Box<dyn Fn(&Lts, StateId) -> bool>)> = Vec::new();
    let n = t.props().len();
    for p in 0..n {
        for pos in [true, false] {
            let name = format!("{}{}", if pos { "" } else { "!" }, t.props()[p]);
            out.push((name, Box::new(move |t: &Lts, s| t.holds(s, p) == pos)));
        }
        for q in p + 1..n {
            for (a, b) in [(true, true), (true, false), (false, true), (false, false)] {
                let name = format!("{}{} | {}{}", if a { "" } else { "!" }, t.props()[p], if b { "" } else { "!" }, t.props()[q]);
                out.push((name, Box::new(move |t: &Lts, s| t.holds(s, p) == a || t.holds(s, q) == b)));
            }
        }
    }
    out
}

pub fn clause_ltl(name: &str) -> Ltl {
    let lit = |s: &str| match s.strip_prefix('!') {
        Some(p) => Ltl::not(Ltl::atom(p)),
        None => Ltl::atom(s),
    };
    let body = match name.split_once(" | ") {
        Some((a, b)) => Ltl::or(lit(a), lit(b)),
        None => lit(name),
    };
    Ltl::always(body)
}

/// For sampled T with an invariant holding on its reachable states, every
/// instance of Ref(spec, T) keeps the invariant.
pub fn invariant_suite(samples: usize, seed: u64) -> Suite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = spec_pool(&mut rng, 6);
    let mut suite = Suite::default();
    'outer: for round in 0.. {
        for spec in &pool {
            for k in 2..=4 {
                for t in sample_instances(spec, k, 2, 10) {
                    let reach = reachable_states(&t);
                    let all = invariants(&t);
                    let holding: Vec<_> = all.iter().filter(|(_, f)| reach.iter().all(|&s| f(&t, s))).collect();
                    // Prefer invariants that only hold because of reachability.
                    let strict: Vec<_> = holding.iter().filter(|(_, f)| !t.states().all(|s| f(&t, s))).collect();
                    let Some((name, inv)) = strict.choose(&mut rng).copied().or(holding.choose(&mut rng)).map(|x| (&x.0, &x.1)) else {
                        continue;
                    };
                    let refined = ref_spec(spec, &t).unwrap();
                    let found = instances(&refined.signature(), &refined.closed_formulas(), k, quiet()).unwrap();
                    let f = clause_ltl(name);
                    suite.cases += 1;
                    suite.checks += found.len();
                    for inst in &found {
                        let ok = reachable_states(inst).iter().all(|&s| inv(inst, s));
                        let checked = check(inst, &f, &mut || false).unwrap().verdict.holds();
                        if !ok || !checked {
                            suite.fail(format!("{} k={k}: refinement breaks invariant `{name}`", spec.name));
                        }
                    }
                    if suite.cases >= samples {
                        break 'outer;
                    }
                }
            }
        }
        assert!(round < 50, "not enough samples");
    }
    suite
}

// ---------------------------------------------------------------- benchmarks

pub fn synthesize(src: &str, bound: usize, schedule: BatchSchedule) -> (SystemSpec, SynthesisResult) {
    let spec = parse_spec(src).unwrap();
    let mut opts = SynthOptions::new(bound);
    opts.schedule = schedule;
    let r = start_search(&spec.processes, &spec.property, &opts, &FrozenClock, &mut ()).unwrap();
    (spec, r)
}

/// Components of a found solution: each a model of its specification with
/// the synchronization conditions intact, and the product meets the property.
pub fn solution_is_valid(spec: &SystemSpec, comps: &[Lts]) -> Result<(), String> {
    for (p, t) in spec.processes.iter().zip(comps) {
        if let Some(axiom) = p.first_violation(t).map_err(|e| e.to_string())? {
            return Err(format!("{} violates {axiom}", p.name));
        }
        let bad = check_sync_conditions(t, &p.vocab).map_err(|e| e.to_string())?;
        if !bad.is_empty() {
            return Err(format!("{}: {:?}", p.name, bad[0]));
        }
    }
    let product = compose(comps.to_vec(), &vocabs(spec)).map_err(|e| e.to_string())?;
    if !check(&product, &spec.property, &mut || false).unwrap().verdict.holds() {
        return Err("product violates the property".into());
    }
    Ok(())
}

pub fn vocabs(spec: &SystemSpec) -> Vec<Vocabulary> {
    spec.processes.iter().map(|p| p.vocab.clone()).collect()
}

/// The simulated guarded-command program against the product: same atoms,
/// and equal verdicts on the property and on `G p`, `F p`, `G F p` for
/// every process-local atom. Shared atoms are left out of the extra
/// formulas: in the product a free lock may change through an environment
/// transition with no process owning it, which the program cannot do.
pub fn program_matches(spec: &SystemSpec, comps: &[Lts]) -> Result<usize, String> {
    let names: Vec<String> = spec.processes.iter().map(|p| p.name.clone()).collect();
    let program = emit(&spec.name, &names, comps, &vocabs(spec)).map_err(|e| e.to_string())?;
    let sim = simulate(&program, 1 << 20).map_err(|e| e.to_string())?;
    let product = compose(comps.to_vec(), &vocabs(spec)).map_err(|e| e.to_string())?;
    if sim.props() != product.props() {
        return Err(format!("atoms differ: {:?} vs {:?}", sim.props(), product.props()));
    }
    let mut formulas = vec![spec.property.clone()];
    for p in product.props().iter().filter(|p| p.contains('@')) {
        let a = Ltl::atom(p);
        formulas.extend([Ltl::always(a.clone()), Ltl::eventually(a.clone()), Ltl::always(Ltl::eventually(a))]);
    }
    for f in &formulas {
        let a = check(&sim, f, &mut || false).unwrap().verdict.holds();
        let b = check(&product, f, &mut || false).unwrap().verdict.holds();
        if a != b {
            return Err(format!("`{f}`: program {a}, product {b}"));
        }
    }
    Ok(formulas.len())
}

/// Checks on the product of a solution: every reachable state is
/// shared-consistent with its components, at most one process owns each
/// lock, and every invariant clause of a component holds on the product
/// once its local atoms are tagged.
pub fn product_invariants(spec: &SystemSpec, comps: &[Lts]) -> Suite {
    let product = compose(comps.to_vec(), &vocabs(spec)).unwrap();
    let props = product.props().to_vec();
    let index = |name: &str| props.iter().position(|p| p == name);
    let mut suite = Suite::default();
    let locks: BTreeSet<&String> = spec.processes.iter().flat_map(|p| p.vocab.locks()).collect();
    for s in &product.reachable() {
        suite.cases += 1;
        let label = product.label_of(s);
        for (i, t) in comps.iter().enumerate() {
            for (p, name) in t.props().iter().enumerate() {
                if let Some(g) = index(name) {
                    suite.checks += 1;
                    if label.contains(g) != t.holds(s[i], p) {
                        suite.fail(format!("{s:?}: `{name}` differs in component {i}"));
                    }
                }
            }
        }
        for lock in &locks {
            let owners = (0..comps.len()).filter(|&i| index(&tagged(&format!("own_{lock}"), i)).is_some_and(|x| label.contains(x)));
            suite.checks += 1;
            if owners.count() > 1 {
                suite.fail(format!("{s:?}: lock {lock} has two owners"));
            }
        }
    }
    for (i, t) in comps.iter().enumerate() {
        for (name, _) in invariants(t) {
            let local = clause_ltl(&name);
            if !check(t, &local, &mut || false).unwrap().verdict.holds() {
                continue;
            }
            let global = local.rename_atoms(&|a| Some(if index(a).is_some() { a.to_string() } else { tagged(a, i) }));
            suite.checks += 1;
            if !check(&product, &global, &mut || false).unwrap().verdict.holds() {
                suite.fail(format!("component {i} keeps `{name}`, the product does not"));
            }
        }
    }
    suite
}
