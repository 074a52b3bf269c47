//! Benchmark manager: configuration, experiment plan, timed cell execution
//! and tidy result files.

pub mod config;
pub mod persist;
pub mod plan;
pub mod records;
pub mod runner;
pub mod summary;

pub use config::{parse_config, BenchConfig, ConfigError};
pub use persist::{persist, summarize_dir};
pub use plan::{build_plan, Cell, Plan};
pub use records::BenchmarkRecord;
pub use runner::{run, RunMeta, RunOutput};
pub use summary::{summarize, SummaryRow};
