use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, ValueEnum};
use locksynth::run::{exit_code, run, Emit, RunConfig};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Schedule {
    Exp2,
    Exp4,
    Exp8,
    Lineal10,
    Nocex,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EmitArg {
    Gcl,
    Json,
}

/// Synthesize lock-synchronized implementations of a system specification.
///
/// Exit status: 0 found, 1 not found, 2 unsatisfiable at the bound,
/// 3 timeout, 4 usage or input error.
#[derive(Debug, Parser)]
#[command(name = "synth", version)]
struct Args {
    /// Specification file, or a bundled name: mutex, phil, rw, mutexN, philN, rwR_W.
    file: String,
    /// States per process; defaults to the specification's `bound`.
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long, value_enum, default_value = "exp2")]
    batches: Schedule,
    /// Number of batches of the schedule.
    #[arg(long, default_value_t = 10)]
    batch_len: usize,
    /// Seconds; 0 disables the limit.
    #[arg(long, default_value_t = 1800)]
    timeout: u64,
    /// Directory for the solution, programs and run log.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Program formats to write to --out.
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["gcl", "json"])]
    emit: Vec<EmitArg>,
    /// CSV table to add the result row to.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write each process specification as DIMACS CNF to --out.
    #[arg(long)]
    cnf: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SYNTH_LOG", "warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    let schedule = args.batches.to_possible_value().expect("no skipped variants").get_name().to_string();
    let cfg = RunConfig {
        bound: args.bound,
        schedule,
        batch_len: args.batch_len,
        timeout: (args.timeout > 0).then(|| Duration::from_secs(args.timeout)),
        out: args.out,
        emit: args
            .emit
            .iter()
            .map(|e| match e {
                EmitArg::Gcl => Emit::Gcl,
                EmitArg::Json => Emit::Json,
            })
            .collect(),
        report: args.report,
        seed: args.seed,
        cnf: args.cnf,
        ..RunConfig::new(args.file)
    };
    match run(&cfg) {
        Ok(out) => {
            let r = &out.row;
            println!(
                "{} scope={} schedule={} result={} iterations={} l_time={} g_time={} reachable={} total={}",
                r.example, r.scope, r.schedule, r.result, r.iterations, r.l_time, r.g_time, r.reachable_states, r.total_states
            );
            ExitCode::from(exit_code(&out.result.outcome) as u8)
        }
        Err(e) => {
            eprintln!("synth: {e:#}");
            ExitCode::from(4)
        }
    }
}
