//! One synthesis run: load a specification, search, write artifacts and
//! report a row.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::Context;
use locksynth_core::codegen::{emit, render, GuardedProgram};
use locksynth_core::dsl::{bundled, parse_spec, print_spec};
use locksynth_core::logic::{ground, RelFormula as F};
use locksynth_core::lts::Lts;
use locksynth_core::spec::{ProcessSpec, SystemSpec};
use locksynth_core::synth::{start_search, verify, BatchSchedule, Clock, Outcome, SynthOptions, SynthesisResult};

use crate::report::{self, ResultRow};
use crate::runlog::JsonLines;
use crate::{dimacs, lts_json, program_json};

/// Time since construction.
pub struct WallClock(Instant);

impl WallClock {
    pub fn start() -> Self {
        WallClock(Instant::now())
    }
}

impl Clock for WallClock {
    fn now(&self) -> Duration {
        self.0.elapsed()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Emit {
    Gcl,
    Json,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// A `.dspec` path or a bundled name (`mutex`, `phil3`, `rw1_2`, ...).
    pub source: String,
    /// Defaults to the specification's `bound`.
    pub bound: Option<usize>,
    pub schedule: String,
    pub batch_len: usize,
    pub timeout: Option<Duration>,
    pub out: Option<PathBuf>,
    pub emit: Vec<Emit>,
    pub report: Option<PathBuf>,
    pub seed: u64,
    /// Also write each process specification's CNF at the bound.
    pub cnf: bool,
}

impl RunConfig {
    pub fn new(source: impl Into<String>) -> Self {
        RunConfig {
            source: source.into(),
            bound: None,
            schedule: "exp2".into(),
            batch_len: locksynth_core::synth::DEFAULT_BATCHES,
            timeout: Some(Duration::from_secs(1800)),
            out: None,
            emit: vec![Emit::Gcl, Emit::Json],
            report: None,
            seed: 0,
            cnf: false,
        }
    }
}

pub struct RunOutput {
    pub spec: SystemSpec,
    pub example: String,
    pub result: SynthesisResult,
    pub row: ResultRow,
    pub program: Option<GuardedProgram>,
}

/// Errors a user fixes by changing the command line or the input file.
#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{path}: {error}")]
    Parse { path: String, error: locksynth_core::syntax::ParseError },
    #[error("{0}: no such file or bundled specification")]
    Missing(String),
    #[error("{0}: no bound given and the specification has none")]
    NoBound(String),
    #[error(transparent)]
    Schedule(#[from] locksynth_core::synth::SynthError),
}

/// Reads a specification from a file, or from the bundled set when no
/// such file exists.
pub fn load_spec(source: &str) -> Result<SystemSpec, InputError> {
    let text = match std::fs::read_to_string(source) {
        Ok(t) => t,
        Err(_) => bundled(source).ok_or_else(|| InputError::Missing(source.to_string()))?,
    };
    parse_spec(&text).map_err(|e| InputError::Parse { path: source.to_string(), error: e })
}

/// `system(n1,n2,..)` with the number of copies of each process template.
pub fn example_label(spec: &SystemSpec) -> String {
    let mut counts: Vec<(&str, usize)> = Vec::new();
    for p in &spec.processes {
        let base = p.name.split('[').next().unwrap_or(&p.name);
        match counts.iter_mut().find(|(b, _)| *b == base) {
            Some((_, n)) => *n += 1,
            None => counts.push((base, 1)),
        }
    }
    let ns: Vec<String> = counts.iter().map(|(_, n)| n.to_string()).collect();
    format!("{}({})", spec.name, ns.join(","))
}

pub fn exit_code(o: &Outcome) -> i32 {
    match o {
        Outcome::Found(_) => 0,
        Outcome::NotFound => 1,
        Outcome::Unsat => 2,
        Outcome::Timeout => 3,
    }
}

fn file_stem(i: usize, p: &ProcessSpec) -> String {
    let clean: String = p.name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    format!("{i}_{}", clean.trim_end_matches('_'))
}

pub fn lts_path(dir: &Path, i: usize, p: &ProcessSpec) -> PathBuf {
    dir.join(format!("{}.lts.json", file_stem(i, p)))
}

pub const SPEC_FILE: &str = "spec.dspec";
pub const LOG_FILE: &str = "run.jsonl";

/// The CNF the finder solves for `p` at bound `k`: its formulas plus an
/// initial state and a successor for every state.
pub fn process_cnf(p: &ProcessSpec, k: usize) -> anyhow::Result<locksynth_core::sat::SatProblem> {
    let mut fs = p.closed_formulas();
    fs.push(F::exists("s", F::init("s")));
    fs.push(F::forall("s", F::exists("t", F::post("s", "t"))));
    Ok(ground(&F::and(fs), k, &p.signature())?.to_cnf())
}

pub fn run(cfg: &RunConfig) -> anyhow::Result<RunOutput> {
    let spec = load_spec(&cfg.source)?;
    let bound = cfg.bound.or(spec.bound).ok_or_else(|| InputError::NoBound(cfg.source.clone()))?;
    let schedule = BatchSchedule::named(&cfg.schedule, cfg.batch_len).map_err(InputError::from)?;
    let example = example_label(&spec);
    let mut opts = SynthOptions::new(bound);
    opts.schedule = schedule;
    opts.timeout = cfg.timeout;
    opts.seed = cfg.seed;

    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        std::fs::write(dir.join(SPEC_FILE), print_spec(&spec))?;
        for (i, p) in spec.processes.iter().enumerate() {
            let stale = lts_path(dir, i, p);
            if stale.exists() {
                std::fs::remove_file(stale)?;
            }
            if cfg.cnf {
                std::fs::write(dir.join(format!("{}.cnf", file_stem(i, p))), dimacs::write(&process_cnf(p, bound)?))?;
            }
        }
    }
    let mut log = match &cfg.out {
        Some(dir) => Some(JsonLines::new(BufWriter::new(File::create(dir.join(LOG_FILE))?))),
        None => None,
    };
    log::info!("{example}: bound {bound}, schedule {}", cfg.schedule);
    let clock = WallClock::start();
    let result = match log.as_mut() {
        Some(l) => start_search(&spec.processes, &spec.property, &opts, &clock, l)?,
        None => start_search(&spec.processes, &spec.property, &opts, &clock, &mut ())?,
    };
    let code = result.outcome.code();
    log::info!("{example}: {code} {}", result.stats);
    if let Some(mut l) = log {
        l.result(code, &result.stats);
        if let Some(e) = l.error.take() {
            return Err(e).context("writing the run log");
        }
        use std::io::Write;
        l.into_inner().flush()?;
    }

    let mut program = None;
    if let Outcome::Found(comps) = &result.outcome {
        let names: Vec<String> = spec.processes.iter().map(|p| p.name.clone()).collect();
        let vocabs: Vec<_> = spec.processes.iter().map(|p| p.vocab.clone()).collect();
        let prog = emit(&spec.name, &names, comps, &vocabs)?;
        if let Some(dir) = &cfg.out {
            for (i, (p, t)) in spec.processes.iter().zip(comps).enumerate() {
                lts_json::write(&lts_path(dir, i, p), t)?;
            }
            if cfg.emit.contains(&Emit::Gcl) {
                std::fs::write(dir.join(format!("{}.gcl", spec.name)), render(&prog))?;
            }
            if cfg.emit.contains(&Emit::Json) {
                std::fs::write(dir.join(format!("{}.prog.json", spec.name)), program_json::to_string(&prog) + "\n")?;
            }
        }
        program = Some(prog);
    }

    let s = &result.stats;
    let row = ResultRow {
        example: example.clone(),
        scope: bound,
        schedule: cfg.schedule.clone(),
        l_time: report::seconds(s.l_time),
        g_time: report::seconds(s.g_time),
        iterations: s.iterations,
        reachable_states: s.reachable_states,
        total_states: s.total_states,
        result: code.to_string(),
    };
    if let Some(path) = &cfg.report {
        report::append(path, row.clone())?;
    }
    Ok(RunOutput { spec, example, result, row, program })
}

/// Re-checks the solution stored in `dir`: each LTS is a model of its
/// process specification with the synchronization conditions intact, and
/// the product meets the property.
pub fn verify_dir(dir: &Path) -> anyhow::Result<Vec<Lts>> {
    let text = std::fs::read_to_string(dir.join(SPEC_FILE)).context("reading the stored specification")?;
    let spec = parse_spec(&text).map_err(|e| anyhow::anyhow!("{SPEC_FILE}: {e}"))?;
    let mut comps = Vec::new();
    for (i, p) in spec.processes.iter().enumerate() {
        let path = lts_path(dir, i, p);
        comps.push(lts_json::read(&path).with_context(|| format!("reading {}", path.display()))?);
    }
    verify(&spec.processes, &spec.property, &comps)?;
    Ok(comps)
}
