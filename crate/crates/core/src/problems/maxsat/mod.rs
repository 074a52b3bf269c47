//! Vehicle option planning as partial MAX-SAT.
//!
//! Feature vectors must satisfy every hard (buildability) clause and should
//! satisfy as many soft (test requirement) clauses as possible. Two QUBO
//! encodings are provided: a per-clause cubic gadget with one ancilla for
//! 3-CNF ([`dinneen`]) and an independent-set encoding for clauses of any
//! length ([`choi`]).

pub mod choi;
pub mod dinneen;
mod wcnf;

pub use wcnf::{parse_wcnf, write_wcnf};

use std::fmt;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Self { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Self { var, negated: true }
    }

    /// DIMACS form: 1-based, negative when negated.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.negated {
            -v
        } else {
            v
        }
    }

    pub fn eval(self, bits: &[u8]) -> bool {
        (bits[self.var] == 1) != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "!x{}", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

/// Disjunction of literals over distinct variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clause(Vec<Literal>);

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Result<Self> {
        for (k, a) in literals.iter().enumerate() {
            if literals[k + 1..].iter().any(|b| b.var == a.var) {
                return Err(Error::Parameter(format!("variable x{} repeats in clause", a.var)));
            }
        }
        Ok(Self(literals))
    }

    /// Clause from DIMACS literals (`3` is `x2`, `-1` is `!x0`).
    pub fn from_dimacs(lits: &[i64]) -> Result<Self> {
        let mut out = Vec::with_capacity(lits.len());
        for &l in lits {
            if l == 0 {
                return Err(Error::Parameter("literal 0".into()));
            }
            out.push(Literal {
                var: (l.unsigned_abs() - 1) as usize,
                negated: l < 0,
            });
        }
        Self::new(out)
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn satisfied(&self, bits: &[u8]) -> bool {
        self.0.iter().any(|l| l.eval(bits))
    }
}

/// Hard clauses, soft clauses and positive soft weights over `n_vars` features.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxSatInstance {
    n_vars: usize,
    hard: Vec<Clause>,
    soft: Vec<Clause>,
    weights: Vec<f64>,
}

impl MaxSatInstance {
    /// Unit soft weights.
    pub fn new(n_vars: usize, hard: Vec<Clause>, soft: Vec<Clause>) -> Result<Self> {
        let weights = vec![1.0; soft.len()];
        Self::weighted(n_vars, hard, soft, weights)
    }

    pub fn weighted(n_vars: usize, hard: Vec<Clause>, soft: Vec<Clause>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != soft.len() {
            return Err(Error::Dimension {
                expected: soft.len(),
                got: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::Parameter(format!("soft weight {w} must be positive")));
        }
        for c in hard.iter().chain(&soft) {
            if let Some(l) = c.literals().iter().find(|l| l.var >= n_vars) {
                return Err(Error::Parameter(format!(
                    "literal {l} out of range for {n_vars} variables"
                )));
            }
        }
        Ok(Self {
            n_vars,
            hard,
            soft,
            weights,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn hard(&self) -> &[Clause] {
        &self.hard
    }

    pub fn soft(&self) -> &[Clause] {
        &self.soft
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_hard(&self) -> usize {
        self.hard.len()
    }

    pub fn n_soft(&self) -> usize {
        self.soft.len()
    }

    pub fn total_soft_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_unit_weighted(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    /// Penalty weight for hard clauses: `N_s` with unit weights, the total
    /// soft weight otherwise.
    pub fn default_lambda(&self) -> f64 {
        if self.is_unit_weighted() {
            self.n_soft() as f64
        } else {
            self.total_soft_weight()
        }
    }

    /// Satisfied soft weight, ignoring hard clauses.
    pub fn soft_weight(&self, v: &VehicleConfig) -> Result<f64> {
        self.check_len(v)?;
        Ok(self
            .soft
            .iter()
            .zip(&self.weights)
            .filter(|(c, _)| c.satisfied(v.bits()))
            .map(|(_, w)| w)
            .sum())
    }

    pub fn hard_violations(&self, v: &VehicleConfig) -> Result<usize> {
        self.check_len(v)?;
        Ok(self.hard.iter().filter(|c| !c.satisfied(v.bits())).count())
    }

    fn check_len(&self, v: &VehicleConfig) -> Result<()> {
        if v.len() != self.n_vars {
            return Err(Error::Dimension {
                expected: self.n_vars,
                got: v.len(),
            });
        }
        Ok(())
    }
}

/// Feature vector of one vehicle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VehicleConfig {
    bits: Vec<u8>,
}

impl VehicleConfig {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Parameter("feature bits must be 0 or 1".into()));
        }
        Ok(Self { bits })
    }

    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![0; n] }
    }

    pub fn from_index(n: usize, index: u64) -> Self {
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
}

/// All hard clauses hold.
pub fn validate(inst: &MaxSatInstance, v: &VehicleConfig) -> Result<bool> {
    Ok(inst.hard_violations(v)? == 0)
}

/// Satisfied share of the soft weight, in `[0, 1]`; `1` when there are no
/// soft clauses.
pub fn quality(inst: &MaxSatInstance, v: &VehicleConfig) -> Result<f64> {
    let total = inst.total_soft_weight();
    let got = inst.soft_weight(v)?;
    Ok(if total > 0.0 { got / total } else { 1.0 })
}

/// Provenance of a generated instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorProvenance {
    pub n_f: usize,
    pub seed: u64,
    pub n_h: usize,
    pub n_s: usize,
}

/// Clause counts of the random recipe: `(2 n_f, ceil(4.2 n_f))`.
pub fn recipe_counts(n_f: usize) -> (usize, usize) {
    // ceil(4.2 n) == ceil(21 n / 5) in exact integer arithmetic
    (2 * n_f, (21 * n_f).div_ceil(5))
}

/// Random MAX-3SAT instance: `2 n_f` hard and `ceil(4.2 n_f)` soft clauses,
/// three distinct variables per clause, uniform polarities.
pub fn generate_random(n_f: usize, seed: u64) -> Result<(MaxSatInstance, GeneratorProvenance)> {
    if n_f < 3 {
        return Err(Error::Parameter(format!("need at least 3 features, got {n_f}")));
    }
    let (n_h, n_s) = recipe_counts(n_f);
    let mut rng = seeded_rng(seed);
    let clause = |rng: &mut rand_chacha::ChaCha8Rng| {
        let vars = sample(rng, n_f, 3);
        Clause(
            vars.iter()
                .map(|var| Literal {
                    var,
                    negated: rng.gen_bool(0.5),
                })
                .collect(),
        )
    };
    let hard = (0..n_h).map(|_| clause(&mut rng)).collect();
    let soft = (0..n_s).map(|_| clause(&mut rng)).collect();
    let inst = MaxSatInstance::new(n_f, hard, soft)?;
    Ok((inst, GeneratorProvenance { n_f, seed, n_h, n_s }))
}
