//! Independent-set encoding for clauses of any length.
//!
//! Every literal occurrence becomes a vertex weighted by its clause weight
//! (`lambda` for hard clauses, `w_k` for soft ones). Two vertices are joined
//! when they sit in the same clause or when they are complementary literals
//! of one variable. Each edge carries a penalty larger than the sum of its
//! endpoint weights, so every maximum of
//!
//! ```text
//! sum_i weight_i x_i - sum_{(i,j) in E} penalty_ij x_i x_j
//! ```
//!
//! is an independent set: at most one literal per clause, no contradictions.
//! Its value is the best achievable weighted count of satisfied clauses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{Assignment, QuboBuilder, Sense};
use crate::Qubo;

use super::{Literal, MaxSatInstance, VehicleConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChoiPenalties {
    /// Vertex weight of hard-clause literals; `None` selects
    /// [`MaxSatInstance::default_lambda`].
    pub hard_weight: Option<f64>,
    /// Edge penalty is `w_i + w_j + edge_margin`.
    pub edge_margin: f64,
}

impl Default for ChoiPenalties {
    fn default() -> Self {
        Self {
            hard_weight: None,
            edge_margin: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClauseKind {
    Hard,
    Soft,
}

/// One vertex per literal occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiVertex {
    pub kind: ClauseKind,
    pub clause: usize,
    pub literal: Literal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChoiIndex {
    pub n_features: usize,
    pub vertices: Vec<ChoiVertex>,
}

impl ChoiIndex {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// A feature is set when one of its positive occurrences is selected;
    /// everything else defaults to 0.
    pub fn decode(&self, bits: &Assignment) -> Result<VehicleConfig> {
        if bits.len() != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                got: bits.len(),
            });
        }
        let mut out = vec![0u8; self.n_features];
        for (k, v) in self.vertices.iter().enumerate() {
            if bits.get(k) && !v.literal.negated {
                out[v.literal.var] = 1;
            }
        }
        VehicleConfig::new(out)
    }
}

pub fn map_to_qubo_choi(inst: &MaxSatInstance, penalties: &ChoiPenalties) -> Result<(Qubo, ChoiIndex)> {
    let hard_weight = penalties.hard_weight.unwrap_or_else(|| inst.default_lambda());
    if !(hard_weight.is_finite() && hard_weight > 0.0) {
        return Err(Error::Parameter(format!("hard weight must be positive, got {hard_weight}")));
    }
    if !(penalties.edge_margin.is_finite() && penalties.edge_margin > 0.0) {
        return Err(Error::Parameter("edge margin must be positive".into()));
    }

    let mut vertices = Vec::new();
    let mut weights = Vec::new();
    let clauses = inst
        .hard()
        .iter()
        .enumerate()
        .map(|(j, c)| (ClauseKind::Hard, j, c, hard_weight))
        .chain(
            inst.soft()
                .iter()
                .zip(inst.weights())
                .enumerate()
                .map(|(k, (c, &w))| (ClauseKind::Soft, k, c, w)),
        );
    // Vertices of one clause are contiguous; remember each clause's range.
    let mut ranges = Vec::new();
    for (kind, clause, c, w) in clauses {
        if c.is_empty() {
            return Err(Error::Shape(format!("{kind:?} clause {clause} is empty")));
        }
        let start = vertices.len();
        for &literal in c.literals() {
            vertices.push(ChoiVertex { kind, clause, literal });
            weights.push(w);
        }
        ranges.push(start..vertices.len());
    }

    let n = vertices.len();
    let mut b = QuboBuilder::new(n, Sense::Maximize);
    for (i, &w) in weights.iter().enumerate() {
        b.add_linear(i, w)?;
    }
    let margin = penalties.edge_margin;
    for r in &ranges {
        for i in r.clone() {
            for j in (i + 1)..r.end {
                b.add_quadratic(i, j, -(weights[i] + weights[j] + margin))?;
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, c) = (vertices[i].literal, vertices[j].literal);
            if a.var == c.var && a.negated != c.negated {
                b.add_quadratic(i, j, -(weights[i] + weights[j] + margin))?;
            }
        }
    }
    Ok((
        b.build()?,
        ChoiIndex {
            n_features: inst.n_vars(),
            vertices,
        },
    ))
}
