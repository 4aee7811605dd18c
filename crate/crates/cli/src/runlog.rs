//! Run log: one JSON object per line, one line per search event and a
//! closing `result` line.

use std::io::Write;

use locksynth_core::synth::{Event, Observer, SynthStats};
use serde_json::json;

pub struct JsonLines<W: Write> {
    out: W,
    /// First write error; later events are dropped.
    pub error: Option<std::io::Error>,
}

impl<W: Write> JsonLines<W> {
    pub fn new(out: W) -> Self {
        JsonLines { out, error: None }
    }

    pub fn line(&mut self, v: &serde_json::Value) {
        if self.error.is_none() {
            if let Err(e) = writeln!(self.out, "{v}") {
                self.error = Some(e);
            }
        }
    }

    pub fn result(&mut self, result: &str, s: &SynthStats) {
        self.line(&json!({
            "event": "result",
            "result": result,
            "iterations": s.iterations,
            "l_time": s.l_time.as_secs_f64(),
            "g_time": s.g_time.as_secs_f64(),
            "reachable_states": s.reachable_states,
            "total_states": s.total_states,
            "product_props": s.product_props,
            "counterexamples": s.counterexamples,
            "replayed": s.replayed,
            "batches": s.batches,
        }));
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

pub fn event_json(e: &Event<'_>) -> serde_json::Value {
    match e {
        Event::Initial { process, saturated, transitions } => json!({
            "event": "initial",
            "process": process,
            "saturated": saturated,
            "transitions": transitions,
        }),
        Event::Batch { index, bound, counterexamples } => json!({
            "event": "batch",
            "index": index,
            "bound": bound,
            "counterexamples": counterexamples,
        }),
        Event::Check { iteration, batch, instances, holds, lasso_len, reachable_states, elapsed } => json!({
            "event": "check",
            "iteration": iteration,
            "batch": batch,
            "instances": instances,
            "holds": holds,
            "lasso_len": lasso_len,
            "reachable_states": reachable_states,
            "elapsed": elapsed.as_secs_f64(),
        }),
    }
}

impl<W: Write> Observer for JsonLines<W> {
    fn event(&mut self, e: &Event<'_>) {
        log::debug!("{}", event_json(e));
        self.line(&event_json(e));
    }
}
