//! Benchmark suites: a list of examples, each run under several schedules.
//!
//! Suites are TOML files with one `[[run]]` table per example:
//!
//! ```toml
//! [[run]]
//! example = "phil3"            # bundled name or .dspec path
//! bound = 14                   # optional, defaults to the spec's bound
//! schedules = ["exp2", "nocex"]
//! ```

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::Deserialize;

use crate::report::{self, ResultRow};
use crate::run::{run, RunConfig};

pub const ALL_SCHEDULES: [&str; 5] = ["exp2", "exp4", "exp8", "lineal10", "nocex"];

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub example: String,
    pub bound: Option<usize>,
    #[serde(default = "all_schedules")]
    pub schedules: Vec<String>,
}

fn all_schedules() -> Vec<String> {
    ALL_SCHEDULES.iter().map(|s| s.to_string()).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    #[serde(default)]
    pub run: Vec<Entry>,
}

impl Suite {
    pub fn parse(text: &str) -> anyhow::Result<Suite> {
        Ok(toml::from_str(text)?)
    }

    /// mutex with 2 and 3 processes, 2 and 3 philosophers, and one reader
    /// with one or two writers, under every schedule.
    pub fn default_suite() -> Suite {
        let e = |example: &str, bound| Entry { example: example.into(), bound: Some(bound), schedules: all_schedules() };
        Suite {
            run: vec![e("mutex2", 4), e("mutex3", 4), e("phil2", 14), e("phil3", 14), e("rw1_1", 4), e("rw1_2", 4)],
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub timeout: Option<Duration>,
    pub batch_len: usize,
    pub seed: u64,
    /// Runs executed at once.
    pub jobs: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            timeout: Some(Duration::from_secs(1800)),
            batch_len: locksynth_core::synth::DEFAULT_BATCHES,
            seed: 0,
            jobs: 1,
        }
    }
}

/// Runs every (example, schedule) pair and returns the sorted rows. Timeouts
/// are rows like any other result; other failures stop the suite.
pub fn bench_all(suite: &Suite, opts: &BenchOptions) -> anyhow::Result<Vec<ResultRow>> {
    let jobs: Vec<RunConfig> = suite
        .run
        .iter()
        .flat_map(|e| {
            e.schedules.iter().map(move |s| RunConfig {
                bound: e.bound,
                schedule: s.clone(),
                batch_len: opts.batch_len,
                timeout: opts.timeout,
                seed: opts.seed,
                ..RunConfig::new(&e.example)
            })
        })
        .collect();
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, anyhow::Result<ResultRow>)>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..opts.jobs.clamp(1, jobs.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cfg) = jobs.get(i) else { break };
                let row = run(cfg).map(|o| o.row);
                if let Ok(r) = &row {
                    log::info!("{} {} {}: {}", r.example, r.scope, r.schedule, r.result);
                }
                results.lock().expect("no panics while holding the lock").push((i, row));
            });
        }
    });
    let mut results = results.into_inner().expect("threads joined");
    results.sort_by_key(|(i, _)| *i);
    let mut rows = results.into_iter().map(|(_, r)| r).collect::<anyhow::Result<Vec<_>>>()?;
    report::sort(&mut rows);
    Ok(rows)
}
