use std::path::Path;
use std::process::{Command, Output};
use std::time::Duration;

use locksynth::lts_json;
use locksynth::report::{self, HEADER};
use locksynth::run::{exit_code, lts_path, run, verify_dir, RunConfig, LOG_FILE};

fn synth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_synth")).args(args).output().unwrap()
}

fn status(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn never_cs() -> String {
    locksynth_core::dsl::mutex(2).replace("property G !(cs@0 & cs@1);", "property G !cs@0;")
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(status(&synth(&["mutex", "--bound", "4", "--batches", "exp2"])), 0);
    assert_eq!(status(&synth(&["mutex", "--bound", "1"])), 2);
    let never = dir.path().join("never.dspec");
    std::fs::write(&never, never_cs()).unwrap();
    assert_eq!(status(&synth(&[never.to_str().unwrap(), "--batch-len", "3"])), 1);
    assert_eq!(status(&synth(&["mutex", "--batches", "exp3"])), 4);
    assert_eq!(status(&synth(&[])), 4);
    assert_eq!(status(&synth(&["--help"])), 0);
    assert_eq!(status(&synth(&["no-such-spec"])), 4);
}

#[test]
fn timeout_exit_code() {
    let cfg = RunConfig { timeout: Some(Duration::from_micros(1)), schedule: "nocex".into(), ..RunConfig::new("phil3") };
    let out = run(&cfg).unwrap();
    assert_eq!(out.row.result, "TO");
    assert_eq!(exit_code(&out.result.outcome), 3);
}

#[test]
fn parse_errors_have_positions() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.dspec");
    std::fs::write(&bad, never_cs().replace("try(s) and cs(t)", "try(s) and crit(t)")).unwrap();
    let o = synth(&[bad.to_str().unwrap()]);
    assert_eq!(status(&o), 4);
    assert!(stderr(&o).contains("bad.dspec: 18:"), "{}", stderr(&o));
    assert!(stderr(&o).contains("crit"), "{}", stderr(&o));
}

#[test]
fn bound_one_is_unsat_and_its_cnf_too() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = synth(&["mutex", "--bound", "1", "--cnf", "--out", out.to_str().unwrap()]);
    assert_eq!(status(&o), 2);
    let cnf = locksynth::dimacs::read(&std::fs::read_to_string(out.join("0_P_0.cnf")).unwrap()).unwrap();
    assert!(matches!(cnf.solve(), locksynth_core::sat::SolveResult::Unsat));
    let o = synth(&["mutex", "--bound", "4", "--cnf", "--out", out.to_str().unwrap()]);
    assert_eq!(status(&o), 0);
    let cnf = locksynth::dimacs::read(&std::fs::read_to_string(out.join("0_P_0.cnf")).unwrap()).unwrap();
    assert!(matches!(cnf.solve(), locksynth_core::sat::SolveResult::Sat(_)));
}

fn strip_times(line: &str) -> String {
    let mut v: serde_json::Value = serde_json::from_str(line).unwrap();
    for k in ["elapsed", "l_time", "g_time"] {
        v.as_object_mut().unwrap().remove(k);
    }
    v.to_string()
}

fn without_times(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').enumerate().filter(|(i, _)| *i != 3 && *i != 4).map(|(_, x)| x.to_string()).collect()).collect()
}

#[test]
fn reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for n in 0..2 {
        let out = dir.path().join(format!("run{n}"));
        let csv = dir.path().join(format!("run{n}.csv"));
        let o = synth(&["phil3", "--bound", "14", "--out", out.to_str().unwrap(), "--report", csv.to_str().unwrap()]);
        assert_eq!(status(&o), 0, "{}", stderr(&o));
        outputs.push((out, std::fs::read_to_string(csv).unwrap()));
    }
    let (a, b) = (&outputs[0], &outputs[1]);
    assert_eq!(without_times(&a.1), without_times(&b.1));
    for f in ["0_Phil_0.lts.json", "1_Phil_1.lts.json", "2_Phil_2.lts.json", "phil.gcl", "phil.prog.json", "spec.dspec"] {
        assert_eq!(std::fs::read(a.0.join(f)).unwrap(), std::fs::read(b.0.join(f)).unwrap(), "{f}");
    }
    let log = |d: &Path| std::fs::read_to_string(d.join(LOG_FILE)).unwrap().lines().map(strip_times).collect::<Vec<_>>();
    assert_eq!(log(&a.0), log(&b.0));
}

#[test]
fn csv_header_is_stable() {
    assert_eq!(HEADER, "example,scope,schedule,l_time,g_time,iterations,reachable_states,total_states,result");
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    for (src, k) in [("rw1_1", "4"), ("mutex", "4"), ("mutex", "1")] {
        synth(&[src, "--bound", k, "--report", csv.to_str().unwrap()]);
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], HEADER);
    let keys: Vec<String> = lines[1..].iter().map(|l| l.rsplitn(8, ',').last().unwrap().to_string()).collect();
    assert_eq!(keys, ["mutex(2),1", "mutex(2),4", "\"rw(1,1)\",4"]);
    for l in &lines[1..] {
        let times: Vec<&str> = l.rsplit(',').skip(4).take(2).collect();
        assert!(times.iter().all(|t| t.split('.').nth(1).map(str::len) == Some(3)), "{l}");
    }
    assert_eq!(report::read(&csv).unwrap().len(), 3);
}

#[test]
fn found_artifacts_reverify_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    for (src, k) in [("mutex", "4"), ("phil3", "14"), ("rw1_2", "4")] {
        let out = dir.path().join(src);
        let o = synth(&[src, "--bound", k, "--out", out.to_str().unwrap()]);
        assert_eq!(status(&o), 0);
        verify_dir(&out).unwrap();
    }
    // A component that no longer satisfies its specification is caught.
    let out = dir.path().join("mutex");
    let spec = locksynth::load_spec("mutex").unwrap();
    let path = lts_path(&out, 0, &spec.processes[0]);
    let mut file: lts_json::LtsFile = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    file.transitions.retain(|(_, a, _)| a != "getLock");
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    assert!(verify_dir(&out).is_err());
}

#[test]
fn log_level_comes_from_the_environment() {
    let quiet = synth(&["mutex", "--bound", "4"]);
    assert!(!stderr(&quiet).contains("INFO"));
    let o = Command::new(env!("CARGO_BIN_EXE_synth")).args(["mutex", "--bound", "4"]).env("SYNTH_LOG", "info").output().unwrap();
    assert!(stderr(&o).contains("INFO"), "{}", stderr(&o));
}

#[test]
fn bench_with_empty_config_writes_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    std::fs::write(&cfg, "").unwrap();
    let csv = dir.path().join("out.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_synth-bench"))
        .args(["--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(csv).unwrap(), format!("{HEADER}\n"));
}

#[test]
fn bench_default_suite_is_complete() {
    let o = Command::new(env!("CARGO_BIN_EXE_synth-bench")).args(["--jobs", "4"]).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 30);
    for ex in ["mutex(2)", "mutex(3)", "phil(2)", "phil(3)", "\"rw(1,1)\"", "\"rw(1,2)\""] {
        assert_eq!(rows.iter().filter(|r| r.starts_with(&format!("{ex},"))).count(), 5, "{ex}");
    }
    assert!(rows.iter().all(|r| r.ends_with(",F")), "{text}");
}
