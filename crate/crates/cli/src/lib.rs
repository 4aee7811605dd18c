//! File formats, the synthesis driver and the benchmark runner behind the
//! `synth` and `synth-bench` commands.

pub mod bench;
pub mod dimacs;
pub mod lts_json;
pub mod program_json;
pub mod report;
pub mod run;
pub mod runlog;

pub use run::{load_spec, run, RunConfig, RunOutput, WallClock};
