//! Application problems and their QUBO encodings.

pub mod maxsat;
pub mod pvc;
pub mod tsp;
