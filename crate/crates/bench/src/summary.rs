//! Group statistics over result records, written as plot-ready CSV.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::records::BenchmarkRecord;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub application: String,
    pub problem_size: usize,
    pub mapping: String,
    pub solver: String,
    pub device: String,
    pub n_records: usize,
    pub n_valid: usize,
    pub valid_ratio: f64,
    pub tts_mean_ms: f64,
    pub tts_min_ms: f64,
    pub tts_max_ms: f64,
    /// Over valid records only; empty when none is valid.
    pub quality_mean: Option<f64>,
    pub quality_min: Option<f64>,
    pub quality_max: Option<f64>,
}

fn stats(values: &[f64]) -> Option<(f64, f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some((mean, min, max))
}

/// One row per (application, size, mapping, solver, device), sorted by key.
pub fn summarize(records: &[BenchmarkRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(String, usize, String, String, String), Vec<&BenchmarkRecord>> = BTreeMap::new();
    for r in records {
        let key = (
            r.application.clone(),
            r.problem_size,
            r.mapping.clone(),
            r.solver.clone(),
            r.device.clone(),
        );
        groups.entry(key).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((application, problem_size, mapping, solver, device), rs)| {
            let tts: Vec<f64> = rs.iter().map(|r| r.tts_ms).collect();
            let quality: Vec<f64> = rs.iter().filter(|r| r.validity).filter_map(|r| r.quality).collect();
            let n_valid = rs.iter().filter(|r| r.validity).count();
            let (tts_mean_ms, tts_min_ms, tts_max_ms) = stats(&tts).expect("groups are non-empty");
            let q = stats(&quality);
            SummaryRow {
                application,
                problem_size,
                mapping,
                solver,
                device,
                n_records: rs.len(),
                n_valid,
                valid_ratio: n_valid as f64 / rs.len() as f64,
                tts_mean_ms,
                tts_min_ms,
                tts_max_ms,
                quality_mean: q.map(|q| q.0),
                quality_min: q.map(|q| q.1),
                quality_max: q.map(|q| q.2),
            }
        })
        .collect()
}

pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record([
        "application",
        "problem_size",
        "mapping",
        "solver",
        "device",
        "n_records",
        "n_valid",
        "valid_ratio",
        "tts_mean_ms",
        "tts_min_ms",
        "tts_max_ms",
        "quality_mean",
        "quality_min",
        "quality_max",
    ])?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary<R: Read>(input: R) -> csv::Result<Vec<SummaryRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
