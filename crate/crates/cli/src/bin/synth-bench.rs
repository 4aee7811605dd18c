use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use locksynth::bench::{bench_all, BenchOptions, Suite};
use locksynth::report;

/// Run a benchmark suite and write the result table as CSV.
#[derive(Debug, Parser)]
#[command(name = "synth-bench", version)]
struct Args {
    /// Suite file (TOML); the built-in suite when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seconds per run; 0 disables the limit.
    #[arg(long, default_value_t = 1800)]
    timeout: u64,
    #[arg(long, default_value_t = 10)]
    batch_len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Runs executed at once.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
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
    let result = (|| {
        let suite = match &args.config {
            Some(p) => Suite::parse(&std::fs::read_to_string(p)?)?,
            None => Suite::default_suite(),
        };
        let opts = BenchOptions {
            timeout: (args.timeout > 0).then(|| Duration::from_secs(args.timeout)),
            batch_len: args.batch_len,
            seed: args.seed,
            jobs: args.jobs,
        };
        let rows = bench_all(&suite, &opts)?;
        match &args.out {
            Some(p) => report::write(p, &rows)?,
            None => print!("{}", report::to_string(&rows)),
        }
        anyhow::Ok(())
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("synth-bench: {e:#}");
            ExitCode::from(4)
        }
    }
}
