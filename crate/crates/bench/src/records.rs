//! Tidy result rows and their CSV form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

/// One row per executed cell. Column order in `results.csv` follows the
/// field order here.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub run_id: String,
    pub timestamp: String,
    pub application: String,
    pub problem_size: usize,
    pub instance_seed: u64,
    pub mapping: String,
    pub solver: String,
    pub device: String,
    pub repetition: usize,
    pub t_mapping_ms: f64,
    pub t_solver_ms: f64,
    pub t_reverse_map_ms: f64,
    pub t_process_solution_ms: f64,
    pub t_validation_ms: f64,
    pub t_evaluation_ms: f64,
    pub tts_ms: f64,
    pub validity: bool,
    pub quality: Option<f64>,
    /// JSON object with solver-specific details.
    pub solver_metadata: String,
    pub cell_index: usize,
    pub cell_seed: u64,
    /// Empty unless a stage failed.
    pub error: String,
}

impl BenchmarkRecord {
    pub fn component_sum_ms(&self) -> f64 {
        self.t_mapping_ms
            + self.t_solver_ms
            + self.t_reverse_map_ms
            + self.t_process_solution_ms
            + self.t_validation_ms
            + self.t_evaluation_ms
    }

    /// Same record with every timing field zeroed, for reproducibility checks.
    pub fn without_timings(&self) -> Self {
        Self {
            run_id: String::new(),
            timestamp: String::new(),
            t_mapping_ms: 0.0,
            t_solver_ms: 0.0,
            t_reverse_map_ms: 0.0,
            t_process_solution_ms: 0.0,
            t_validation_ms: 0.0,
            t_evaluation_ms: 0.0,
            tts_ms: 0.0,
            solver_metadata: strip_timing_metadata(&self.solver_metadata),
            ..self.clone()
        }
    }
}

fn strip_timing_metadata(json: &str) -> String {
    match serde_json::from_str::<serde_json::Value>(json) {
        Ok(serde_json::Value::Object(mut m)) => {
            m.retain(|k, _| !k.ends_with("_ms"));
            serde_json::Value::Object(m).to_string()
        }
        _ => json.to_string(),
    }
}

pub const COLUMNS: [&str; 22] = [
    "run_id",
    "timestamp",
    "application",
    "problem_size",
    "instance_seed",
    "mapping",
    "solver",
    "device",
    "repetition",
    "t_mapping_ms",
    "t_solver_ms",
    "t_reverse_map_ms",
    "t_process_solution_ms",
    "t_validation_ms",
    "t_evaluation_ms",
    "tts_ms",
    "validity",
    "quality",
    "solver_metadata",
    "cell_index",
    "cell_seed",
    "error",
];

pub fn write_records<W: Write>(out: W, records: &[BenchmarkRecord]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> csv::Result<Vec<BenchmarkRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().ne(COLUMNS) {
        return Err(csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("unexpected results header: {}", headers.iter().collect::<Vec<_>>().join(",")),
        )));
    }
    r.deserialize().collect()
}
