//! Numeric abstraction shared by the QUBO model and its solvers.
//!
//! Everything that only adds and multiplies coefficients is generic over
//! [`Scalar`], so the same code runs on `f32`, `f64` and exact rationals.
//! Exact rationals are what the conversion and gadget tests use to check
//! identities without rounding slack.

use std::fmt::{Debug, Display};

use num_rational::Rational64;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Coefficient type of a QUBO or Ising objective.
pub trait Scalar:
    Num
    + Signed
    + Clone
    + PartialOrd
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// `false` for NaN and infinities; exact types are always finite.
    fn is_finite_value(&self) -> bool;

    fn two() -> Self {
        Self::one() + Self::one()
    }

    /// Lossy view used for tolerances and Metropolis acceptance.
    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl Scalar for f64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f32 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Rational64 {
    fn is_finite_value(&self) -> bool {
        true
    }
}
