//! Depth-first branch and bound for QUBOs too large to enumerate.
//!
//! The bound at a node is
//!
//! ```text
//! E_fixed + sum_{free i} min(0, f_i) + sum_{free i<j} min(0, b_ij)
//! ```
//!
//! where `f_i` is the linear coefficient of `x_i` plus its couplings to
//! variables already fixed at one. When every free field is nonnegative and
//! no free pair has a negative coupling, the all-zero completion is optimal
//! and the node closes immediately. One-hot penalty encodings (tours,
//! independent sets) have only nonnegative couplings, which makes this bound
//! tight enough to search them exactly at small sizes.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{Assignment, QuboInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_nodes: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            max_nodes: 50_000_000,
        }
    }
}

/// Exact optimum with respect to the instance's sense. Unlike
/// [`super::brute_force_optimum`] no tie-break among optima is guaranteed.
pub fn exact_optimum<T: Scalar>(q: &QuboInstance<T>, limits: SearchLimits) -> Result<(Assignment, T)> {
    let m = q.to_minimization();
    let n = m.n_vars();
    let adj = m.adjacency();
    let mut neg_pairs = T::zero();
    for (_, _, c) in m.quadratic_terms() {
        if *c < T::zero() {
            neg_pairs = neg_pairs + c.clone();
        }
    }
    let mut s = Search {
        adj,
        state: vec![FREE; n],
        field: (0..n).map(|i| m.linear(i).clone()).collect(),
        e_fixed: m.offset().clone(),
        neg_free_pairs: neg_pairs,
        best: None,
        nodes: 0,
        limits,
    };
    s.run()?;
    let (_, bits) = s.best.expect("search visits at least one leaf");
    let a = Assignment { bits };
    let value = q.evaluate_bits(a.bits());
    Ok((a, value))
}

const FREE: u8 = 2;

struct Search<T> {
    adj: Vec<Vec<(usize, T)>>,
    state: Vec<u8>,
    field: Vec<T>,
    e_fixed: T,
    neg_free_pairs: T,
    best: Option<(T, Vec<u8>)>,
    nodes: u64,
    limits: SearchLimits,
}

impl<T: Scalar> Search<T> {
    fn assign(&mut self, i: usize, val: u8) {
        self.state[i] = val;
        if val == 1 {
            self.e_fixed = self.e_fixed.clone() + self.field[i].clone();
        }
        for (j, c) in &self.adj[i] {
            if self.state[*j] != FREE {
                continue;
            }
            if *c < T::zero() {
                self.neg_free_pairs = self.neg_free_pairs.clone() - c.clone();
            }
            if val == 1 {
                self.field[*j] = self.field[*j].clone() + c.clone();
            }
        }
    }

    fn unassign(&mut self, i: usize) {
        let val = self.state[i];
        for (j, c) in &self.adj[i] {
            if self.state[*j] != FREE {
                continue;
            }
            if *c < T::zero() {
                self.neg_free_pairs = self.neg_free_pairs.clone() + c.clone();
            }
            if val == 1 {
                self.field[*j] = self.field[*j].clone() - c.clone();
            }
        }
        if val == 1 {
            self.e_fixed = self.e_fixed.clone() - self.field[i].clone();
        }
        self.state[i] = FREE;
    }

    fn run(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.limits.max_nodes {
            return Err(Error::Timeout(format!(
                "branch and bound exceeded {} nodes",
                self.limits.max_nodes
            )));
        }

        let mut bound = self.e_fixed.clone() + self.neg_free_pairs.clone();
        let mut branch: Option<usize> = None;
        let mut any_free = false;
        for i in 0..self.state.len() {
            if self.state[i] != FREE {
                continue;
            }
            any_free = true;
            let f = &self.field[i];
            if *f < T::zero() {
                bound = bound + f.clone();
                if branch.map_or(true, |b| *f < self.field[b]) {
                    branch = Some(i);
                }
            }
        }
        if let Some((best, _)) = &self.best {
            if bound >= *best {
                return Ok(());
            }
        }

        let closed = branch.is_none() && self.neg_free_pairs.is_zero();
        if !any_free || closed {
            // All-zero completion attains the bound.
            let bits: Vec<u8> = self.state.iter().map(|&s| u8::from(s == 1)).collect();
            self.best = Some((bound, bits));
            return Ok(());
        }

        let (var, first) = match branch {
            Some(i) => (i, 1),
            None => {
                // Only negative couplings keep the node open; branch on one of them.
                let i = (0..self.state.len())
                    .find(|&i| {
                        self.state[i] == FREE
                            && self.adj[i]
                                .iter()
                                .any(|(j, c)| self.state[*j] == FREE && *c < T::zero())
                    })
                    .expect("open node has a free negative coupling");
                (i, 1)
            }
        };
        for val in [first, 1 - first] {
            self.assign(var, val);
            let r = self.run();
            self.unassign(var);
            r?;
        }
        Ok(())
    }
}
