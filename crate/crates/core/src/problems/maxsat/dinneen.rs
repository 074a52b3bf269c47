//! Cubic clause polynomial with one ancilla per clause.
//!
//! For literals `l1, l2, l3` (a negated literal is `1 - v`):
//!
//! ```text
//! clause = l1 + l2 + l3 - l1 l2 - l1 l3 - l2 l3 + l1 l2 l3
//! l1 l2 l3 = max_z z (l1 + l2 + l3 - 2)
//! ```
//!
//! so the quadratic `T(v, z)` obtained by substituting the second line into
//! the first satisfies `max_z T = clause(v)`. The full objective is
//! `lambda * sum_hard T + sum_soft w_k T` and is maximized.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{AffineLiteral, QuboBuilder, Sense};
use crate::scalar::Scalar;
use crate::Qubo;

use super::{Clause, Literal, MaxSatInstance, VehicleConfig};

/// Quadratic polynomial over a handful of variables.
#[derive(Clone, Debug, PartialEq)]
pub struct ClauseTerms<T> {
    pub offset: T,
    pub linear: BTreeMap<usize, T>,
    pub quadratic: BTreeMap<(usize, usize), T>,
}

impl<T: Scalar> ClauseTerms<T> {
    fn new() -> Self {
        Self {
            offset: T::zero(),
            linear: BTreeMap::new(),
            quadratic: BTreeMap::new(),
        }
    }

    fn lin(&mut self, i: usize, c: T) {
        let e = self.linear.entry(i).or_insert_with(T::zero);
        *e = e.clone() + c;
    }

    fn affine(&mut self, a: &AffineLiteral<T>, scale: T) {
        self.offset = self.offset.clone() + scale.clone() * a.constant.clone();
        self.lin(a.var, scale * a.coefficient.clone());
    }

    fn product(&mut self, a: &AffineLiteral<T>, b: &AffineLiteral<T>, scale: T) {
        debug_assert_ne!(a.var, b.var);
        self.offset = self.offset.clone() + scale.clone() * a.constant.clone() * b.constant.clone();
        self.lin(b.var, scale.clone() * a.constant.clone() * b.coefficient.clone());
        self.lin(a.var, scale.clone() * b.constant.clone() * a.coefficient.clone());
        let key = if a.var < b.var { (a.var, b.var) } else { (b.var, a.var) };
        let e = self.quadratic.entry(key).or_insert_with(T::zero);
        *e = e.clone() + scale * a.coefficient.clone() * b.coefficient.clone();
    }

    /// Value at an assignment indexed by global variable number.
    pub fn evaluate(&self, bits: &[u8]) -> T {
        let mut e = self.offset.clone();
        for (&i, c) in &self.linear {
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

    /// Adds `scale` times this polynomial to a builder.
    pub fn add_to(&self, b: &mut QuboBuilder<T>, scale: T) -> Result<()> {
        b.add_offset(scale.clone() * self.offset.clone());
        for (&i, c) in &self.linear {
            b.add_linear(i, scale.clone() * c.clone())?;
        }
        for (&(i, j), c) in &self.quadratic {
            b.add_quadratic(i, j, scale.clone() * c.clone())?;
        }
        Ok(())
    }
}

fn affine<T: Scalar>(l: Literal) -> AffineLiteral<T> {
    if l.negated {
        AffineLiteral::negative(l.var)
    } else {
        AffineLiteral::positive(l.var)
    }
}

/// Quadratic gadget of a 3-literal clause with ancilla `ancilla`.
pub fn clause_qubo_terms<T: Scalar>(c: &Clause, ancilla: usize) -> Result<ClauseTerms<T>> {
    let lits = c.literals();
    if lits.len() != 3 {
        return Err(Error::Shape(format!(
            "gadget needs exactly 3 literals, clause has {}",
            lits.len()
        )));
    }
    if lits.iter().any(|l| l.var == ancilla) {
        return Err(Error::Parameter(format!("ancilla {ancilla} collides with a clause variable")));
    }
    let l: Vec<AffineLiteral<T>> = lits.iter().map(|&x| affine(x)).collect();
    let z = AffineLiteral::<T>::positive(ancilla);
    let one = T::one();
    let mut t = ClauseTerms::new();
    for a in &l {
        t.affine(a, one.clone());
        t.product(&z, a, one.clone());
    }
    t.product(&l[0], &l[1], -one.clone());
    t.product(&l[0], &l[2], -one.clone());
    t.product(&l[1], &l[2], -one.clone());
    t.affine(&z, -T::two());
    Ok(t)
}

/// Variable layout: features, then hard-clause ancillas, then soft-clause
/// ancillas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DinneenIndex {
    pub n_features: usize,
    pub n_hard: usize,
    pub n_soft: usize,
}

impl DinneenIndex {
    pub fn len(&self) -> usize {
        self.n_features + self.n_hard + self.n_soft
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn feature(&self, i: usize) -> usize {
        i
    }

    pub fn hard_ancilla(&self, j: usize) -> usize {
        self.n_features + j
    }

    pub fn soft_ancilla(&self, k: usize) -> usize {
        self.n_features + self.n_hard + k
    }

    /// Feature part of a QUBO assignment; ancillas are discarded.
    pub fn decode(&self, bits: &crate::qubo::Assignment) -> Result<VehicleConfig> {
        if bits.len() != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                got: bits.len(),
            });
        }
        VehicleConfig::new(bits.bits()[..self.n_features].to_vec())
    }
}

/// Maximize-sense QUBO over `N_f + N_h + N_s` variables.
pub fn map_to_qubo_dinneen(inst: &MaxSatInstance, lambda: f64) -> Result<(Qubo, DinneenIndex)> {
    map_to_qubo_dinneen_generic(inst, lambda)
}

/// Same encoding with an arbitrary coefficient type; `lambda` and the soft
/// weights are converted with `FromPrimitive`.
pub fn map_to_qubo_dinneen_generic<T: Scalar>(
    inst: &MaxSatInstance,
    lambda: f64,
) -> Result<(crate::qubo::QuboInstance<T>, DinneenIndex)> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Parameter(format!("lambda must be positive, got {lambda}")));
    }
    let idx = DinneenIndex {
        n_features: inst.n_vars(),
        n_hard: inst.n_hard(),
        n_soft: inst.n_soft(),
    };
    let conv = |x: f64| T::from_f64(x).ok_or_else(|| Error::Parameter(format!("{x} not representable")));
    let lam = conv(lambda)?;
    let mut b = QuboBuilder::<T>::new(idx.len(), Sense::Maximize);
    for (j, c) in inst.hard().iter().enumerate() {
        clause_qubo_terms::<T>(c, idx.hard_ancilla(j))?.add_to(&mut b, lam.clone())?;
    }
    for (k, (c, &w)) in inst.soft().iter().zip(inst.weights()).enumerate() {
        clause_qubo_terms::<T>(c, idx.soft_ancilla(k))?.add_to(&mut b, conv(w)?)?;
    }
    Ok((b.build()?, idx))
}
