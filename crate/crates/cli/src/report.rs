//! CSV result table: one row per run, sorted by example then scope.

use std::path::Path;

use serde::{Deserialize, Serialize};

pub const HEADER: &str = "example,scope,schedule,l_time,g_time,iterations,reachable_states,total_states,result";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub example: String,
    pub scope: usize,
    pub schedule: String,
    /// Seconds, three decimals.
    pub l_time: String,
    pub g_time: String,
    pub iterations: usize,
    pub reachable_states: usize,
    pub total_states: u64,
    /// F, N, U or TO.
    pub result: String,
}

pub fn seconds(d: std::time::Duration) -> String {
    format!("{:.3}", d.as_secs_f64())
}

/// Stable sort by `(example, scope)`; runs of one example and scope keep
/// their order.
pub fn sort(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| (&a.example, a.scope).cmp(&(&b.example, b.scope)));
}

pub fn to_string(rows: &[ResultRow]) -> String {
    let mut rows = rows.to_vec();
    sort(&mut rows);
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in &rows {
        w.serialize(r).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8");
    format!("{HEADER}\n{body}")
}

pub fn read(path: &Path) -> anyhow::Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.iter().collect::<Vec<_>>().join(",");
    anyhow::ensure!(headers == HEADER, "{}: unexpected header `{headers}`", path.display());
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

pub fn write(path: &Path, rows: &[ResultRow]) -> anyhow::Result<()> {
    std::fs::write(path, to_string(rows))?;
    Ok(())
}

/// Adds `row` to the table at `path`, creating it if needed, and rewrites
/// it in sorted order.
pub fn append(path: &Path, row: ResultRow) -> anyhow::Result<()> {
    let mut rows = if path.exists() && std::fs::metadata(path)?.len() > 0 { read(path)? } else { Vec::new() };
    rows.push(row);
    write(path, &rows)
}
