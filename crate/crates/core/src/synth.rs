//! The synthesis loops: plain backtracking over instance streams, and the
//! batched search that refines initial instances with projected
//! counterexamples.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use core::time::Duration;

use thiserror::Error;

use crate::finder::{Dedup, FinderError, FinderOptions, InstanceStream};
use crate::ltl::{check, CheckError, Lasso, Ltl, Verdict};
use crate::lts::{check_sync_conditions, ActionKind, FinitePath, Lts, Vocabulary};
use crate::product::{compose, project, ProductAction, ProductError, ProductState};
use crate::spec::{not_of_path, oplus, ref_spec, ProcessSpec, SpecError};

/// Monotonic time source. The search never reads the wall clock itself.
pub trait Clock {
    /// Time since an arbitrary fixed origin.
    fn now(&self) -> Duration;
}

/// A clock that never advances; timeouts never fire.
#[derive(Clone, Copy, Debug, Default)]
pub struct FrozenClock;

impl Clock for FrozenClock {
    fn now(&self) -> Duration {
        Duration::ZERO
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error(transparent)]
    Finder(#[from] FinderError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("no processes")]
    NoProcesses,
    #[error("found solution failed re-verification: {0}")]
    Verification(String),
    #[error("unknown batch schedule `{0}`")]
    UnknownSchedule(String),
}

/// Per-batch instance bounds. `None` is unbounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchSchedule {
    pub name: String,
    pub bounds: Vec<Option<usize>>,
    /// Refine with counterexamples between batches.
    pub use_cex: bool,
}

/// Named schedules accepted by [`BatchSchedule::named`].
pub const SCHEDULE_NAMES: [&str; 5] = ["exp2", "exp4", "exp8", "lineal10", "nocex"];

impl BatchSchedule {
    /// `base, base^2, ...` for `len` batches.
    pub fn exponential(base: usize, len: usize) -> Self {
        let bounds = (1..=len as u32).map(|j| Some(base.saturating_pow(j))).collect();
        BatchSchedule { name: alloc::format!("exp{base}"), bounds, use_cex: true }
    }

    /// `step, 2 step, ...` for `len` batches.
    pub fn linear(step: usize, len: usize) -> Self {
        let bounds = (1..=len).map(|j| Some(step * j)).collect();
        BatchSchedule { name: alloc::format!("lineal{step}"), bounds, use_cex: true }
    }

    /// One unbounded batch without counterexamples.
    pub fn nocex() -> Self {
        BatchSchedule { name: "nocex".to_string(), bounds: vec![None], use_cex: false }
    }

    pub fn named(name: &str, len: usize) -> Result<Self, SynthError> {
        match name {
            "exp2" => Ok(Self::exponential(2, len)),
            "exp4" => Ok(Self::exponential(4, len)),
            "exp8" => Ok(Self::exponential(8, len)),
            "lineal10" => Ok(Self::linear(10, len)),
            "nocex" => Ok(Self::nocex()),
            other => Err(SynthError::UnknownSchedule(other.to_string())),
        }
    }
}

impl FromStr for BatchSchedule {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, SynthError> {
        Self::named(s, DEFAULT_BATCHES)
    }
}

/// Number of batches when a schedule is named without a length.
pub const DEFAULT_BATCHES: usize = 10;

#[derive(Clone, Debug)]
pub struct SynthOptions {
    /// Number of states of every process.
    pub bound: usize,
    pub schedule: BatchSchedule,
    pub timeout: Option<Duration>,
    pub dedup: Dedup,
    /// Start from instances of the saturated specifications.
    pub saturate: bool,
    pub seed: u64,
}

impl SynthOptions {
    pub fn new(bound: usize) -> Self {
        SynthOptions {
            bound,
            schedule: BatchSchedule::exponential(2, DEFAULT_BATCHES),
            timeout: Some(Duration::from_secs(1800)),
            dedup: Dedup::Reachable,
            saturate: true,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Found(Vec<Lts>),
    NotFound,
    Unsat,
    Timeout,
}

impl Outcome {
    /// One-letter code: F, N, U or TO.
    pub fn code(&self) -> &'static str {
        match self {
            Outcome::Found(_) => "F",
            Outcome::NotFound => "N",
            Outcome::Unsat => "U",
            Outcome::Timeout => "TO",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SynthStats {
    /// Model-checker invocations.
    pub iterations: usize,
    /// Largest cumulative model-finding time spent on one process.
    pub l_time: Duration,
    /// Total time of the run.
    pub g_time: Duration,
    /// Reachable states of the last checked product.
    pub reachable_states: usize,
    /// Product of the component state counts of the solution.
    pub total_states: u64,
    /// Propositions of the solution's product; `2^product_props` bounds its
    /// distinct labelings.
    pub product_props: usize,
    pub counterexamples: usize,
    /// Combinations rejected because a stored counterexample is still a
    /// run of their product; these need no model-checker call.
    pub replayed: usize,
    pub batches: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisResult {
    pub outcome: Outcome,
    pub stats: SynthStats,
}

/// Progress notifications, in order of occurrence.
#[derive(Clone, Debug)]
pub enum Event<'a> {
    /// Starting instance of process `process` chosen.
    Initial { process: usize, saturated: bool, transitions: usize },
    Batch { index: usize, bound: Option<usize>, counterexamples: usize },
    Check {
        iteration: usize,
        batch: usize,
        instances: &'a [usize],
        holds: bool,
        lasso_len: Option<usize>,
        reachable_states: usize,
        elapsed: Duration,
    },
}

pub trait Observer {
    fn event(&mut self, e: &Event<'_>);
}

impl Observer for () {
    fn event(&mut self, _: &Event<'_>) {}
}

/// A product run kept as a counterexample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub lasso: Lasso<ProductState, ProductAction>,
}

impl Counterexample {
    pub fn project(&self, i: usize) -> FinitePath {
        project(&self.lasso.states, &self.lasso.steps, i)
    }
}

/// Insertion-ordered set of counterexamples.
#[derive(Clone, Debug, Default)]
pub struct CexStore {
    items: Vec<Counterexample>,
}

impl CexStore {
    /// Adds `c` unless already present; true if added.
    pub fn insert(&mut self, c: Counterexample) -> bool {
        if self.items.contains(&c) {
            return false;
        }
        self.items.push(c);
        true
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Counterexample> {
        self.items.iter()
    }
}

/// The exclusion formula for the projection of `c` onto process `i`, or
/// `None` when the projection cannot be excluded by a refinement: it never
/// moves, or moves only along environment transitions, which every
/// refinement keeps.
pub fn project_and_refine(c: &Counterexample, i: usize, t: &Lts) -> Option<crate::logic::RelFormula> {
    let p = c.project(i);
    let internal_move = p
        .states()
        .windows(2)
        .zip(p.actions())
        .any(|(w, a)| w[0] != w[1] && a.is_some_and(|a| t.actions()[a].kind == ActionKind::Internal));
    if !internal_move {
        return None;
    }
    let names: Vec<String> = t.actions().iter().map(|a| a.name.clone()).collect();
    not_of_path(&p, &names).ok()
}

/// Extends `cache` until it holds instance `j` or is exhausted.
fn fill(
    cache: &mut Cache,
    j: usize,
    clock: &dyn Clock,
    stop: &mut dyn FnMut() -> bool,
    spent: &mut Duration,
) -> Result<bool, Halt> {
    while cache.items.len() <= j && !cache.done {
        let t0 = clock.now();
        let next = cache.stream.next_instance(stop);
        *spent += clock.now().saturating_sub(t0);
        match next {
            Ok(Some(l)) => cache.items.push(l),
            Ok(None) => cache.done = true,
            Err(FinderError::Interrupted) => return Err(Halt::Timeout),
            Err(e) => return Err(Halt::Error(e.into())),
        }
    }
    Ok(j < cache.items.len())
}

/// Lazily extended instance list of one specification.
struct Cache {
    stream: InstanceStream,
    items: Vec<Lts>,
    done: bool,
}

impl Cache {
    fn new(spec: &ProcessSpec, k: usize, opts: &SynthOptions) -> Result<Self, SynthError> {
        let fo = FinderOptions { dedup: opts.dedup, validate: false, seed: opts.seed, ..FinderOptions::default() };
        Ok(Cache {
            stream: InstanceStream::new(&spec.signature(), &spec.closed_formulas(), k, fo)?,
            items: Vec::new(),
            done: false,
        })
    }
}

struct Search<'a> {
    specs: &'a [ProcessSpec],
    vocabs: Vec<Vocabulary>,
    property: &'a Ltl,
    opts: &'a SynthOptions,
    clock: &'a dyn Clock,
    obs: &'a mut dyn Observer,
    start: Duration,
    caches: Vec<Cache>,
    /// Cumulative finder time per process across batches.
    find_time: Vec<Duration>,
    chosen: Vec<usize>,
    cexs: CexStore,
    stats: SynthStats,
    batch: usize,
}

enum Halt {
    Timeout,
    Error(SynthError),
}

impl<E: Into<SynthError>> From<E> for Halt {
    fn from(e: E) -> Self {
        Halt::Error(e.into())
    }
}

impl<'a> Search<'a> {
    fn new(
        specs: &'a [ProcessSpec],
        property: &'a Ltl,
        opts: &'a SynthOptions,
        clock: &'a dyn Clock,
        obs: &'a mut dyn Observer,
    ) -> Self {
        Search {
            specs,
            vocabs: specs.iter().map(|s| s.vocab.clone()).collect(),
            property,
            opts,
            clock,
            obs,
            start: clock.now(),
            caches: Vec::new(),
            find_time: vec![Duration::ZERO; specs.len()],
            chosen: vec![0; specs.len()],
            cexs: CexStore::default(),
            stats: SynthStats::default(),
            batch: 0,
        }
    }

    fn expired(&self) -> bool {
        let (clock, start) = (self.clock, self.start);
        self.opts.timeout.is_some_and(|t| clock.now().saturating_sub(start) >= t)
    }

    fn stopper(&self) -> impl FnMut() -> bool + 'a {
        let (clock, start, timeout) = (self.clock, self.start, self.opts.timeout);
        move || timeout.is_some_and(|t| clock.now().saturating_sub(start) >= t)
    }

    /// Makes instance `j` of process `i` available; false if the stream
    /// has fewer instances.
    fn fetch(&mut self, i: usize, j: usize) -> Result<bool, Halt> {
        let mut stop = self.stopper();
        fill(&mut self.caches[i], j, self.clock, &mut stop, &mut self.find_time[i])
    }

    fn batch_synt(&mut self, i: usize, bound: Option<usize>) -> Result<Option<Vec<Lts>>, Halt> {
        let mut j = 0;
        while bound.is_none_or(|b| j < b) {
            if self.expired() {
                return Err(Halt::Timeout);
            }
            if !self.fetch(i, j)? {
                break;
            }
            self.chosen[i] = j;
            let found = if i + 1 == self.specs.len() { self.check()? } else { self.batch_synt(i + 1, bound)? };
            if found.is_some() {
                return Ok(found);
            }
            j += 1;
        }
        Ok(None)
    }

    fn check(&mut self) -> Result<Option<Vec<Lts>>, Halt> {
        let comps: Vec<Lts> = self.chosen.iter().zip(&self.caches).map(|(&j, c)| c.items[j].clone()).collect();
        let product = compose(comps.clone(), &self.vocabs)?;
        if self.opts.schedule.use_cex && self.cexs.iter().any(|c| c.lasso.refutes(&product, self.property)) {
            self.stats.replayed += 1;
            return Ok(None);
        }
        let mut stop = self.stopper();
        let report = match check(&product, self.property, &mut stop) {
            Ok(r) => r,
            Err(CheckError::Interrupted) => return Err(Halt::Timeout),
            Err(e) => return Err(Halt::Error(e.into())),
        };
        self.stats.iterations += 1;
        self.stats.reachable_states = report.reachable_states;
        let lasso_len = match &report.verdict {
            Verdict::Holds => None,
            Verdict::Violated(l) => Some(l.len()),
        };
        self.obs.event(&Event::Check {
            iteration: self.stats.iterations,
            batch: self.batch,
            instances: &self.chosen,
            holds: report.verdict.holds(),
            lasso_len,
            reachable_states: report.reachable_states,
            elapsed: self.clock.now().saturating_sub(self.start),
        });
        match report.verdict {
            Verdict::Holds => {
                self.stats.total_states =
                    product.components().iter().fold(1u64, |n, c| n.saturating_mul(c.num_states() as u64));
                self.stats.product_props = product.props().len();
                Ok(Some(comps))
            }
            Verdict::Violated(l) => {
                debug_assert!(l.refutes(&product, self.property));
                if self.opts.schedule.use_cex {
                    self.cexs.insert(Counterexample { lasso: l });
                    self.stats.counterexamples = self.cexs.len();
                }
                Ok(None)
            }
        }
    }

    fn finish(mut self, outcome: Result<Outcome, Halt>) -> Result<SynthesisResult, SynthError> {
        let outcome = match outcome {
            Ok(o) => o,
            Err(Halt::Timeout) => Outcome::Timeout,
            Err(Halt::Error(e)) => return Err(e),
        };
        if let Outcome::Found(comps) = &outcome {
            verify(self.specs, self.property, comps)?;
        }
        self.stats.g_time = self.clock.now().saturating_sub(self.start);
        self.stats.l_time = self.find_time.iter().copied().max().unwrap_or_default();
        Ok(SynthesisResult { outcome, stats: self.stats })
    }
}

/// Re-checks a solution from scratch: every component satisfies its
/// specification and the synchronization conditions, and the product
/// satisfies the property.
pub fn verify(specs: &[ProcessSpec], property: &Ltl, comps: &[Lts]) -> Result<(), SynthError> {
    for (i, (s, t)) in specs.iter().zip(comps).enumerate() {
        let unrefined = ProcessSpec { refinement: None, ..s.clone() };
        if let Some(name) = unrefined.first_violation(t).map_err(SpecError::from)? {
            return Err(SynthError::Verification(alloc::format!("process {i} violates `{name}`")));
        }
        let bad = check_sync_conditions(t, &s.vocab).map_err(|e| SynthError::Verification(e.to_string()))?;
        if let Some(v) = bad.first() {
            return Err(SynthError::Verification(alloc::format!("process {i}: condition {v}")));
        }
    }
    let vocabs: Vec<Vocabulary> = specs.iter().map(|s| s.vocab.clone()).collect();
    let product = compose(comps.to_vec(), &vocabs)?;
    if !check(&product, property, &mut || false)?.verdict.holds() {
        return Err(SynthError::Verification("product violates the property".to_string()));
    }
    Ok(())
}

/// Depth-first search over the instances of every specification, checking
/// each combination.
pub fn simple_search(
    specs: &[ProcessSpec],
    property: &Ltl,
    opts: &SynthOptions,
    clock: &dyn Clock,
    obs: &mut dyn Observer,
) -> Result<SynthesisResult, SynthError> {
    if specs.is_empty() {
        return Err(SynthError::NoProcesses);
    }
    let mut s = Search::new(specs, property, opts, clock, obs);
    let outcome = (|| {
        for spec in specs {
            s.caches.push(Cache::new(spec, opts.bound, opts)?);
        }
        for i in 0..specs.len() {
            if !s.fetch(i, 0)? {
                return Ok(Outcome::Unsat);
            }
        }
        s.stats.batches = 1;
        Ok(match s.batch_synt(0, None)? {
            Some(c) => Outcome::Found(c),
            None => Outcome::NotFound,
        })
    })();
    s.finish(outcome)
}

/// The batched search: pick a starting instance per process, then for each
/// batch bound search the refinements of the starting instances, excluding
/// the projections of every counterexample collected so far.
pub fn start_search(
    specs: &[ProcessSpec],
    property: &Ltl,
    opts: &SynthOptions,
    clock: &dyn Clock,
    obs: &mut dyn Observer,
) -> Result<SynthesisResult, SynthError> {
    if specs.is_empty() {
        return Err(SynthError::NoProcesses);
    }
    let mut s = Search::new(specs, property, opts, clock, obs);
    let outcome = (|| {
        let mut initial = Vec::new();
        for (i, spec) in specs.iter().enumerate() {
            let Some((m, saturated)) = initial_instance(&mut s, spec, i)? else {
                return Ok(Outcome::Unsat);
            };
            s.obs.event(&Event::Initial { process: i, saturated, transitions: m.transitions().len() });
            initial.push(m);
        }
        for (index, &bound) in opts.schedule.bounds.iter().enumerate() {
            s.batch = index;
            s.stats.batches = index + 1;
            s.obs.event(&Event::Batch { index, bound, counterexamples: s.cexs.len() });
            s.caches.clear();
            for (i, spec) in specs.iter().enumerate() {
                let mut refined = ref_spec(spec, &initial[i])?;
                if opts.schedule.use_cex {
                    for c in s.cexs.iter() {
                        if let Some(psi) = project_and_refine(c, i, &initial[i]) {
                            refined = oplus(&refined, &psi)?;
                        }
                    }
                }
                s.caches.push(Cache::new(&refined, initial[i].num_states(), opts)?);
            }
            if let Some(c) = s.batch_synt(0, bound)? {
                return Ok(Outcome::Found(c));
            }
        }
        Ok(Outcome::NotFound)
    })();
    s.finish(outcome)
}

/// First instance of the saturated specification, falling back to the
/// plain one. `None` if the plain specification has no instance.
fn initial_instance(s: &mut Search<'_>, spec: &ProcessSpec, i: usize) -> Result<Option<(Lts, bool)>, Halt> {
    let complete = spec.preconditions.len() == spec.vocab.actions().len();
    let mut candidates = Vec::new();
    if s.opts.saturate && complete {
        candidates.push((spec.saturated()?, true));
    } else if s.opts.saturate {
        log::warn!("process {i}: preconditions missing, starting from the plain specification");
    }
    candidates.push((spec.clone(), false));
    for (cand, saturated) in candidates {
        let mut cache = Cache::new(&cand, s.opts.bound, s.opts)?;
        let mut stop = s.stopper();
        if fill(&mut cache, 0, s.clock, &mut stop, &mut s.find_time[i])? {
            return Ok(Some((cache.items.swap_remove(0), saturated)));
        }
        if saturated {
            log::info!("process {i}: saturated specification has no instance, using the plain one");
        }
    }
    Ok(None)
}

impl fmt::Display for SynthStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "iterations={} l_time={:.3}s g_time={:.3}s reachable={} total={} props={} cexs={} replayed={} batches={}",
            self.iterations,
            self.l_time.as_secs_f64(),
            self.g_time.as_secs_f64(),
            self.reachable_states,
            self.total_states,
            self.product_props,
            self.counterexamples,
            self.replayed,
            self.batches
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_spec, MUTEX_DSPEC};
    use crate::logic::parse_formula;
    use crate::ltl::parse_ltl;
    use crate::spec::{NamedFormula, SystemSpec};
    use core::cell::Cell;

    struct Log(Vec<String>);

    impl Observer for Log {
        fn event(&mut self, e: &Event<'_>) {
            let tag = match e {
                Event::Initial { .. } => "initial",
                Event::Batch { .. } => "batch",
                Event::Check { .. } => "check",
            };
            self.0.push(tag.to_string());
        }
    }

    /// Advances one second per reading.
    struct Ticking(Cell<u64>);

    impl Clock for Ticking {
        fn now(&self) -> Duration {
            let t = self.0.get();
            self.0.set(t + 1);
            Duration::from_secs(t)
        }
    }

    fn mutex() -> SystemSpec {
        parse_spec(MUTEX_DSPEC).unwrap()
    }

    #[test]
    fn schedules() {
        assert_eq!(BatchSchedule::named("exp2", 3).unwrap().bounds, [Some(2), Some(4), Some(8)]);
        assert_eq!(BatchSchedule::named("exp8", 2).unwrap().bounds, [Some(8), Some(64)]);
        assert_eq!(BatchSchedule::named("lineal10", 3).unwrap().bounds, [Some(10), Some(20), Some(30)]);
        let n: BatchSchedule = "nocex".parse().unwrap();
        assert_eq!((n.bounds, n.use_cex), (vec![None], false));
        assert_eq!("exp4".parse::<BatchSchedule>().unwrap().bounds.len(), DEFAULT_BATCHES);
        assert!(matches!(BatchSchedule::named("exp3", 2), Err(SynthError::UnknownSchedule(_))));
    }

    #[test]
    fn mutex_two_found_with_exp2() {
        let s = mutex();
        let mut log = Log(Vec::new());
        let r = start_search(&s.processes, &s.property, &SynthOptions::new(4), &FrozenClock, &mut log).unwrap();
        let Outcome::Found(comps) = &r.outcome else { panic!("{:?}", r.outcome) };
        verify(&s.processes, &s.property, comps).unwrap();
        let vocabs: Vec<Vocabulary> = s.processes.iter().map(|p| p.vocab.clone()).collect();
        let product = compose(comps.clone(), &vocabs).unwrap();
        let me = parse_ltl("G !(cs@0 & cs@1)").unwrap();
        assert!(check(&product, &me, &mut || false).unwrap().verdict.holds());
        assert!(r.stats.iterations >= 1 && r.stats.reachable_states > 0);
        assert_eq!(log.0[..3], ["initial", "initial", "batch"]);
        assert_eq!(log.0.iter().filter(|t| *t == "check").count(), r.stats.iterations);
    }

    #[test]
    fn mutex_nocex_and_simple_search() {
        let s = mutex();
        let mut opts = SynthOptions::new(4);
        opts.schedule = BatchSchedule::nocex();
        let r = start_search(&s.processes, &s.property, &opts, &FrozenClock, &mut ()).unwrap();
        assert_eq!(r.outcome.code(), "F");
        assert_eq!(r.stats.counterexamples, 0);
        let r = simple_search(&s.processes, &s.property, &opts, &FrozenClock, &mut ()).unwrap();
        assert_eq!(r.outcome.code(), "F");
    }

    #[test]
    fn mutex_bound_one_is_unsat() {
        let s = mutex();
        let r = start_search(&s.processes, &s.property, &SynthOptions::new(1), &FrozenClock, &mut ()).unwrap();
        assert_eq!(r.outcome, Outcome::Unsat);
        let r = simple_search(&s.processes, &s.property, &SynthOptions::new(1), &FrozenClock, &mut ()).unwrap();
        assert_eq!(r.outcome, Outcome::Unsat);
    }

    #[test]
    fn unsatisfiable_property_is_not_found() {
        let s = mutex();
        let never = parse_ltl("G !cs@0").unwrap();
        let mut opts = SynthOptions::new(4);
        opts.schedule = BatchSchedule::exponential(2, 3);
        let r = start_search(&s.processes, &never, &opts, &FrozenClock, &mut ()).unwrap();
        assert_eq!(r.outcome, Outcome::NotFound);
        assert_eq!(r.stats.batches, 3);
        assert!(r.stats.counterexamples >= 1);
    }

    #[test]
    fn contradiction_is_unsat() {
        let mut s = mutex();
        s.processes[1].formulas.push(NamedFormula::new("bad", parse_formula("forall s . false").unwrap()));
        let r = start_search(&s.processes, &s.property, &SynthOptions::new(3), &FrozenClock, &mut ()).unwrap();
        assert_eq!(r.outcome, Outcome::Unsat);
    }

    #[test]
    fn reruns_are_identical() {
        let s = mutex();
        let never = parse_ltl("G !cs@1").unwrap();
        let mut opts = SynthOptions::new(4);
        opts.schedule = BatchSchedule::exponential(2, 3);
        let a = start_search(&s.processes, &never, &opts, &FrozenClock, &mut ()).unwrap();
        let b = start_search(&s.processes, &never, &opts, &FrozenClock, &mut ()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn timeout_is_reported() {
        let s = mutex();
        let mut opts = SynthOptions::new(4);
        opts.timeout = Some(Duration::from_secs(2));
        let r = start_search(&s.processes, &s.property, &opts, &Ticking(Cell::new(0)), &mut ()).unwrap();
        assert_eq!(r.outcome, Outcome::Timeout);
        assert_eq!(r.outcome.code(), "TO");
    }

    #[test]
    fn no_processes() {
        let p = parse_ltl("true").unwrap();
        assert_eq!(start_search(&[], &p, &SynthOptions::new(2), &FrozenClock, &mut ()), Err(SynthError::NoProcesses));
    }

    #[test]
    fn verify_rejects_a_bad_solution() {
        let s = mutex();
        let r = start_search(&s.processes, &s.property, &SynthOptions::new(4), &FrozenClock, &mut ()).unwrap();
        let Outcome::Found(comps) = r.outcome else { panic!() };
        let never = parse_ltl("G !cs@0").unwrap();
        let e = verify(&s.processes, &never, &comps).unwrap_err();
        assert_eq!(e, SynthError::Verification("product violates the property".to_string()));
        let mut other = comps.clone();
        other[0] = Lts::builder(4, other[0].props().to_vec(), other[0].actions().to_vec()).build().unwrap();
        assert!(matches!(verify(&s.processes, &s.property, &other), Err(SynthError::Verification(_))));
    }
}
