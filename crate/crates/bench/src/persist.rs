//! Result directory layout: `results.csv`, `run_meta.json`, `summary.csv`
//! and one `traces/cell_NNNNN.csv` per QAOA cell.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use anyhow::Context;

use crate::records::{read_records, write_records};
use crate::runner::RunOutput;
use crate::summary::{summarize, write_summary, SummaryRow};

pub fn persist(dir: &Path, out: &RunOutput) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let results = dir.join("results.csv");
    let f = File::create(&results).with_context(|| format!("cannot write {}", results.display()))?;
    write_records(BufWriter::new(f), &out.records)?;
    let meta = dir.join("run_meta.json");
    fs::write(&meta, serde_json::to_string_pretty(&out.meta)?)
        .with_context(|| format!("cannot write {}", meta.display()))?;
    let summary = dir.join("summary.csv");
    write_summary(BufWriter::new(File::create(&summary)?), &summarize(&out.records))?;
    if !out.traces.is_empty() {
        let traces = dir.join("traces");
        fs::create_dir_all(&traces)?;
        for (cell, trace) in &out.traces {
            fs::write(traces.join(format!("cell_{cell:05}.csv")), qbench_core::qaoa::trace_to_csv(trace))?;
        }
    }
    Ok(())
}

/// Recomputes `summary.csv` from the `results.csv` in `dir`.
pub fn summarize_dir(dir: &Path) -> anyhow::Result<Vec<SummaryRow>> {
    let results = dir.join("results.csv");
    let f = File::open(&results).with_context(|| format!("cannot open {}", results.display()))?;
    let records = read_records(f).with_context(|| format!("malformed {}", results.display()))?;
    let rows = summarize(&records);
    write_summary(BufWriter::new(File::create(dir.join("summary.csv"))?), &rows)?;
    Ok(rows)
}
