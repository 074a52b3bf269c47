//! QUBO and Ising model, application encodings (robot path planning,
//! travelling salesman, partial MAX-SAT), classical solvers and a dense
//! state-vector QAOA simulator.
//!
//! The model types are generic over [`Scalar`]; the aliases below fix the
//! coefficient type for the common cases.

pub mod error;
pub mod problems;
pub mod qaoa;
pub mod qubo;
pub mod rng;
pub mod scalar;
pub mod solvers;

pub use error::{Error, Result};
pub use qubo::{Assignment, IsingInstance, QuboBuilder, QuboInstance, Sense};
pub use scalar::Scalar;

pub use num_rational::Rational64;

pub type Qubo = QuboInstance<f64>;
pub type QuboF32 = QuboInstance<f32>;
pub type QuboRational = QuboInstance<Rational64>;
pub type Ising = IsingInstance<f64>;
pub type IsingF32 = IsingInstance<f32>;
pub type IsingRational = IsingInstance<Rational64>;
pub type Outcome = solvers::SolverOutcome<f64>;
