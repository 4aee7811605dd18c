//! One PASS/FAIL line per acceptance criterion. Run with `--nocapture` to see them.
#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use locksynth::report;
use locksynth::run::verify_dir;
use locksynth_core::dsl::{mutex, parse_spec, phil, rw};
use locksynth_core::ltl::{check, parse_ltl};
use locksynth_core::lts::Lts;
use locksynth_core::product::compose;
use locksynth_core::synth::{BatchSchedule, Outcome};

const MUTEX_LIMIT: Duration = Duration::from_secs(120);
const PHIL_LIMIT: Duration = Duration::from_secs(900);
const MIN_SAMPLES: usize = 50;
const MIN_FORMULAS: usize = 200;

struct Report {
    failed: Vec<&'static str>,
}

impl Report {
    fn line(&mut self, name: &'static str, ok: bool, detail: String) {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(name);
        }
    }
}

fn synth(args: &[&str]) -> (Option<i32>, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_synth"))
        .args(args)
        .env_remove("SYNTH_LOG")
        .output()
        .expect("synth runs");
    (out.status.code(), start.elapsed())
}

fn stored(dir: &Path) -> Result<(locksynth_core::spec::SystemSpec, Vec<Lts>), String> {
    let comps = verify_dir(dir).map_err(|e| format!("{e:#}"))?;
    let text = std::fs::read_to_string(dir.join("spec.dspec")).map_err(|e| e.to_string())?;
    let spec = parse_spec(&text).map_err(|e| e.to_string())?;
    support::solution_is_valid(&spec, &comps)?;
    Ok((spec, comps))
}

fn mutex_criterion(r: &mut Report) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let (code, took) = synth(&["mutex", "--bound", "4", "--batches", "exp2", "--out", out.to_str().unwrap()]);
    let checked = stored(&out).and_then(|(spec, comps)| {
        let product = compose(comps, &support::vocabs(&spec)).map_err(|e| e.to_string())?;
        let never = parse_ltl("G !(cs@0 & cs@1)").unwrap();
        match check(&product, &never, &mut || false).unwrap().verdict.holds() {
            true => Ok(()),
            false => Err("both processes reach cs".into()),
        }
    });
    let ok = code == Some(0) && took <= MUTEX_LIMIT && checked.is_ok();
    r.line("mutex(2) found", ok, format!("exit {code:?}, {:.2}s, {checked:?}", took.as_secs_f64()));
}

fn phil_criterion(r: &mut Report) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let csv = dir.path().join("report.csv");
    let (code, took) = synth(&[
        "phil3",
        "--bound",
        "14",
        "--out",
        out.to_str().unwrap(),
        "--report",
        csv.to_str().unwrap(),
    ]);
    let checked = stored(&out).and_then(|(spec, comps)| {
        let rows = report::read(&csv).map_err(|e| e.to_string())?;
        let reported = rows.first().ok_or("empty report")?.reachable_states;
        let product = compose(comps, &support::vocabs(&spec)).map_err(|e| e.to_string())?;
        let reach = product.reachable();
        let bound = (0..product.num_components())
            .map(|i| reach.iter().map(|s| s[i]).collect::<BTreeSet<_>>().len())
            .max()
            .unwrap_or(0);
        match reported == reach.len() && reported >= bound {
            true => Ok((reported, bound)),
            false => Err(format!("reported {reported}, reachable {}, bound {bound}", reach.len())),
        }
    });
    let ok = code == Some(0) && took <= PHIL_LIMIT && checked.is_ok();
    r.line("phil(3) found", ok, format!("exit {code:?}, {:.2}s, (reachable, bound) {checked:?}", took.as_secs_f64()));
}

fn suite_line(r: &mut Report, name: &'static str, s: &support::Suite, min: usize) {
    let ok = s.passed() && s.cases >= min;
    r.line(name, ok, format!("{} cases, {} checks, failures {:?}", s.cases, s.checks, s.failures));
}

fn program_criterion(r: &mut Report) {
    let systems = [(mutex(2), 4), (mutex(3), 4), (phil(2), 14), (phil(3), 14), (rw(1, 1), 4), (rw(1, 2), 4)];
    let mut runs = 0;
    let mut errors = Vec::new();
    for (src, k) in &systems {
        for schedule in [BatchSchedule::exponential(2, 10), BatchSchedule::nocex()] {
            let (spec, res) = support::synthesize(src, *k, schedule);
            let Outcome::Found(comps) = &res.outcome else {
                errors.push(format!("{}: {:?}", spec.name, res.outcome));
                continue;
            };
            runs += 1;
            if let Err(e) = support::program_matches(&spec, comps) {
                errors.push(format!("{}: {e}", spec.name));
            }
        }
    }
    r.line("program agrees with product", errors.is_empty(), format!("{runs} solutions, errors {errors:?}"));
}

fn iterations_criterion(r: &mut Report) {
    let mut ok = true;
    let mut detail = Vec::new();
    for (label, src, k) in [("mutex(2)", mutex(2), 4), ("phil(3)", phil(3), 14)] {
        let count = |schedule| {
            let (_, res) = support::synthesize(&src, k, schedule);
            matches!(res.outcome, Outcome::Found(_)).then_some(res.stats.iterations)
        };
        let (cex, plain) = (count(BatchSchedule::exponential(2, 10)), count(BatchSchedule::nocex()));
        ok &= matches!((cex, plain), (Some(a), Some(b)) if a <= b);
        detail.push(format!("{label} exp2 {cex:?} nocex {plain:?}"));
    }
    r.line("counterexamples save iterations", ok, detail.join(", "));
}

#[test]
fn acceptance() {
    let mut r = Report { failed: Vec::new() };
    mutex_criterion(&mut r);
    phil_criterion(&mut r);
    suite_line(&mut r, "excluded paths stay excluded", &support::exclusion_suite(60, 11), MIN_SAMPLES);
    suite_line(&mut r, "refinement keeps invariants", &support::invariant_suite(60, 13), MIN_SAMPLES);
    program_criterion(&mut r);
    suite_line(&mut r, "finder matches brute force", &support::finder_oracle(240, 7), MIN_FORMULAS);
    suite_line(&mut r, "checker matches lasso enumeration", &support::ltl_oracle(), 1);
    iterations_criterion(&mut r);
    assert!(r.failed.is_empty(), "failed: {:?}", r.failed);
}
