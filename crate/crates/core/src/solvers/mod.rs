//! Classical solvers.

pub mod anneal;
pub mod heuristics;
pub mod maxsat_exact;

pub use anneal::{simulated_annealing, SaParams, SolverOutcome};
pub use heuristics::{greedy_path, random_path, reverse_greedy_path, PathProblem, PathResult};
pub use maxsat_exact::{exact_maxsat, ExactBudget, ExactResult, MaxSatOptimum};
