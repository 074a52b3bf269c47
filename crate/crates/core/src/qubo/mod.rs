//! Sparse QUBO model.
//!
//! A [`QuboInstance`] is the exchange format between the application
//! encodings and every solver. Objectives have the form
//!
//! ```text
//! E(x) = offset + sum_i a_i x_i + sum_{i<j} b_ij x_i x_j,   x in {0,1}^n
//! ```
//!
//! Quadratic keys are strictly upper triangular. A diagonal entry
//! `b_ii x_i x_i` is a linear term in disguise and callers must fold it
//! themselves; the builder rejects it so that encoding bugs surface early.

mod bnb;
mod brute;
mod ising;
mod json;

pub use bnb::{exact_optimum, SearchLimits};
pub use brute::{brute_force_optimum, brute_force_optimum_with_cap, DEFAULT_ENUMERATION_CAP};
pub use ising::{qubo_to_ising, IsingInstance};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Optimization direction of an objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    /// `true` when `a` is strictly preferable to `b`.
    pub fn better<T: PartialOrd>(self, a: &T, b: &T) -> bool {
        match self {
            Sense::Minimize => a < b,
            Sense::Maximize => a > b,
        }
    }
}

/// A binary assignment, one entry per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment {
    bits: Vec<u8>,
}

impl Assignment {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::Parameter(format!(
                "assignment entry {pos} is {}, expected 0 or 1",
                bits[pos]
            )));
        }
        Ok(Self { bits })
    }

    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![0; n] }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self {
            bits: bits.iter().map(|&b| u8::from(b)).collect(),
        }
    }

    /// Basis-state view: bit `i` of `index` becomes entry `i`.
    pub fn from_basis_index(n: usize, index: usize) -> Self {
        Self {
            bits: (0..n).map(|i| ((index >> i) & 1) as u8).collect(),
        }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i] == 1
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.bits
    }
}

/// Sparse quadratic pseudo-Boolean objective over `n_vars` binary variables.
#[derive(Clone, Debug, PartialEq)]
pub struct QuboInstance<T> {
    n_vars: usize,
    linear: Vec<T>,
    quadratic: BTreeMap<(usize, usize), T>,
    offset: T,
    sense: Sense,
}

impl<T: Scalar> QuboInstance<T> {
    /// Builds and validates an instance. Repeated keys are summed.
    pub fn new(
        n_vars: usize,
        sense: Sense,
        offset: T,
        linear: impl IntoIterator<Item = (usize, T)>,
        quadratic: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self> {
        let mut b = QuboBuilder::new(n_vars, sense);
        b.add_offset(offset);
        for (i, c) in linear {
            b.add_linear(i, c)?;
        }
        for (i, j, c) in quadratic {
            b.add_quadratic(i, j, c)?;
        }
        b.build()
    }

    /// Instance with no variables and a constant objective.
    pub fn constant(sense: Sense, offset: T) -> Self {
        Self {
            n_vars: 0,
            linear: Vec::new(),
            quadratic: BTreeMap::new(),
            offset,
            sense,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn offset(&self) -> &T {
        &self.offset
    }

    pub fn linear(&self, i: usize) -> &T {
        &self.linear[i]
    }

    /// Nonzero linear coefficients in index order.
    pub fn linear_terms(&self) -> impl Iterator<Item = (usize, &T)> + '_ {
        self.linear
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
    }

    pub fn quadratic(&self, i: usize, j: usize) -> Option<&T> {
        let key = if i < j { (i, j) } else { (j, i) };
        self.quadratic.get(&key)
    }

    /// Quadratic coefficients as `(i, j, c)` with `i < j`, in key order.
    pub fn quadratic_terms(&self) -> impl Iterator<Item = (usize, usize, &T)> + '_ {
        self.quadratic.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn n_quadratic(&self) -> usize {
        self.quadratic.len()
    }

    /// Number of non-constant terms.
    pub fn n_terms(&self) -> usize {
        self.linear_terms().count() + self.quadratic.len()
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<T> {
        if a.len() != self.n_vars {
            return Err(Error::Dimension {
                expected: self.n_vars,
                got: a.len(),
            });
        }
        Ok(self.evaluate_bits(a.bits()))
    }

    /// Unchecked evaluation; `bits.len()` must equal `n_vars`.
    pub(crate) fn evaluate_bits(&self, bits: &[u8]) -> T {
        let mut e = self.offset.clone();
        for (i, c) in self.linear.iter().enumerate() {
            if bits[i] == 1 {
                e = e + c.clone();
            }
        }
        for (&(i, j), c) in &self.quadratic {
            if bits[i] == 1 && bits[j] == 1 {
                e = e + c.clone();
            }
        }
        e
    }

    /// Every coefficient and the offset multiplied by `alpha`.
    pub fn scaled(&self, alpha: T) -> Self {
        Self {
            n_vars: self.n_vars,
            linear: self.linear.iter().map(|c| c.clone() * alpha.clone()).collect(),
            quadratic: self
                .quadratic
                .iter()
                .map(|(&k, c)| (k, c.clone() * alpha.clone()))
                .collect(),
            offset: self.offset.clone() * alpha,
            sense: self.sense,
        }
    }

    pub fn with_offset_shift(&self, shift: T) -> Self {
        let mut out = self.clone();
        out.offset = out.offset + shift;
        out
    }

    /// The same objective expressed as a minimization: maximize-sense
    /// instances are negated, minimize-sense instances are returned as is.
    pub fn to_minimization(&self) -> Self {
        match self.sense {
            Sense::Minimize => self.clone(),
            Sense::Maximize => {
                let mut out = self.scaled(-T::one());
                out.sense = Sense::Minimize;
                out
            }
        }
    }

    /// Symmetric neighbor lists, one per variable.
    pub fn adjacency(&self) -> Vec<Vec<(usize, T)>> {
        let mut adj: Vec<Vec<(usize, T)>> = vec![Vec::new(); self.n_vars];
        for (&(i, j), c) in &self.quadratic {
            adj[i].push((j, c.clone()));
            adj[j].push((i, c.clone()));
        }
        adj
    }

    /// Largest absolute coefficient (linear or quadratic); zero when empty.
    pub fn max_abs_coefficient(&self) -> T {
        self.linear
            .iter()
            .chain(self.quadratic.values())
            .map(|c| c.abs())
            .fold(T::zero(), |m, c| if c > m { c } else { m })
    }
}

/// Accumulates terms for a [`QuboInstance`].
#[derive(Clone, Debug)]
pub struct QuboBuilder<T> {
    n_vars: usize,
    sense: Sense,
    offset: T,
    linear: Vec<T>,
    quadratic: BTreeMap<(usize, usize), T>,
}

impl<T: Scalar> QuboBuilder<T> {
    pub fn new(n_vars: usize, sense: Sense) -> Self {
        Self {
            n_vars,
            sense,
            offset: T::zero(),
            linear: vec![T::zero(); n_vars],
            quadratic: BTreeMap::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn add_offset(&mut self, c: T) -> &mut Self {
        self.offset = self.offset.clone() + c;
        self
    }

    pub fn add_linear(&mut self, i: usize, c: T) -> Result<&mut Self> {
        self.check_index(i)?;
        self.linear[i] = self.linear[i].clone() + c;
        Ok(self)
    }

    /// Adds `c * x_i * x_j`; argument order does not matter but `i == j` is
    /// rejected.
    pub fn add_quadratic(&mut self, i: usize, j: usize, c: T) -> Result<&mut Self> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(Error::InvalidTerm(format!(
                "diagonal quadratic term on variable {i}; fold it into the linear part"
            )));
        }
        let key = if i < j { (i, j) } else { (j, i) };
        let entry = self.quadratic.entry(key).or_insert_with(T::zero);
        *entry = entry.clone() + c;
        Ok(self)
    }

    /// Folds in `scale * (l_a)(l_b)` style products; see [`AffineLiteral`].
    pub fn add_product(&mut self, a: &AffineLiteral<T>, b: &AffineLiteral<T>, scale: T) -> Result<&mut Self> {
        // (a0 + a1 x)(b0 + b1 y) = a0 b0 + a0 b1 y + b0 a1 x + a1 b1 x y
        self.add_offset(scale.clone() * a.constant.clone() * b.constant.clone());
        self.add_linear(b.var, scale.clone() * a.constant.clone() * b.coefficient.clone())?;
        self.add_linear(a.var, scale.clone() * b.constant.clone() * a.coefficient.clone())?;
        let cross = scale * a.coefficient.clone() * b.coefficient.clone();
        if a.var == b.var {
            self.add_linear(a.var, cross)?;
        } else {
            self.add_quadratic(a.var, b.var, cross)?;
        }
        Ok(self)
    }

    pub fn add_affine(&mut self, a: &AffineLiteral<T>, scale: T) -> Result<&mut Self> {
        self.add_offset(scale.clone() * a.constant.clone());
        self.add_linear(a.var, scale * a.coefficient.clone())?;
        Ok(self)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n_vars {
            return Err(Error::InvalidTerm(format!(
                "variable index {i} out of range for {} variables",
                self.n_vars
            )));
        }
        Ok(())
    }

    /// Validates finiteness and drops coefficients that cancelled to zero.
    pub fn build(self) -> Result<QuboInstance<T>> {
        if !self.offset.is_finite_value() {
            return Err(Error::InvalidTerm("offset is not finite".into()));
        }
        if let Some(i) = self.linear.iter().position(|c| !c.is_finite_value()) {
            return Err(Error::InvalidTerm(format!("linear coefficient {i} is not finite")));
        }
        if let Some(((i, j), _)) = self.quadratic.iter().find(|(_, c)| !c.is_finite_value()) {
            return Err(Error::InvalidTerm(format!(
                "quadratic coefficient ({i}, {j}) is not finite"
            )));
        }
        let quadratic = self
            .quadratic
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Ok(QuboInstance {
            n_vars: self.n_vars,
            linear: self.linear,
            quadratic,
            offset: self.offset,
            sense: self.sense,
        })
    }
}

/// `constant + coefficient * x_var`; a literal `v` is `(0, 1)`, its
/// negation `1 - v` is `(1, -1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineLiteral<T> {
    pub var: usize,
    pub constant: T,
    pub coefficient: T,
}

impl<T: Scalar> AffineLiteral<T> {
    pub fn positive(var: usize) -> Self {
        Self {
            var,
            constant: T::zero(),
            coefficient: T::one(),
        }
    }

    pub fn negative(var: usize) -> Self {
        Self {
            var,
            constant: T::one(),
            coefficient: -T::one(),
        }
    }
}
