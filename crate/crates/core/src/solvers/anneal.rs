//! Seeded simulated annealing over QUBO objectives.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{Assignment, QuboInstance, Sense};
use crate::rng::{derive_seed, seeded_rng};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaParams {
    pub n_reads: usize,
    pub n_sweeps: usize,
    pub beta_hot: f64,
    pub beta_cold: f64,
    pub seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            n_reads: 500,
            n_sweeps: 1000,
            beta_hot: 0.1,
            beta_cold: 10.0,
            seed: 0,
        }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_reads == 0 || self.n_sweeps == 0 {
            return Err(Error::Parameter("n_reads and n_sweeps must be at least 1".into()));
        }
        let ok = self.beta_hot.is_finite() && self.beta_cold.is_finite() && self.beta_hot > 0.0;
        if !ok || self.beta_hot >= self.beta_cold {
            return Err(Error::Parameter(format!(
                "need 0 < beta_hot < beta_cold, got {} and {}",
                self.beta_hot, self.beta_cold
            )));
        }
        Ok(())
    }

    /// Inverse temperature of sweep `k`.
    pub fn beta(&self, k: usize) -> f64 {
        if self.n_sweeps == 1 {
            return self.beta_cold;
        }
        let t = k as f64 / (self.n_sweeps - 1) as f64;
        self.beta_hot * (self.beta_cold / self.beta_hot).powf(t)
    }
}

/// Result of a sampling solver. Energies are in the instance's own sense.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOutcome<T> {
    pub best_assignment: Assignment,
    pub best_energy: T,
    pub per_read_energies: Vec<T>,
    pub solver_name: String,
    pub seed: u64,
}

/// Flattened minimization form used inside the sweeps.
struct Problem {
    linear: Vec<f64>,
    start: Vec<usize>,
    neighbors: Vec<(usize, f64)>,
}

impl Problem {
    fn new<T: Scalar>(q: &QuboInstance<T>) -> Self {
        let sign = match q.sense() {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let linear = (0..q.n_vars()).map(|i| sign * q.linear(i).approx()).collect();
        let mut start = vec![0];
        let mut neighbors = Vec::new();
        for list in q.adjacency() {
            neighbors.extend(list.into_iter().map(|(j, c)| (j, sign * c.approx())));
            start.push(neighbors.len());
        }
        Self { linear, start, neighbors }
    }

    fn n(&self) -> usize {
        self.linear.len()
    }

    fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.neighbors[self.start[i]..self.start[i + 1]]
    }

    /// One read; returns the lowest-energy state seen at sweep boundaries,
    /// the random initial state included.
    fn read(&self, p: &SaParams, seed: u64) -> Vec<u8> {
        let n = self.n();
        let mut rng = seeded_rng(seed);
        let mut x: Vec<u8> = (0..n).map(|_| u8::from(rng.gen::<bool>())).collect();
        let mut field = self.linear.clone();
        let mut energy = 0.0;
        for i in 0..n {
            if x[i] == 1 {
                energy += self.linear[i];
                for &(j, c) in self.row(i) {
                    field[j] += c;
                    if j < i && x[j] == 1 {
                        energy += c;
                    }
                }
            }
        }
        let mut best = x.clone();
        let mut best_energy = energy;
        for k in 0..p.n_sweeps {
            let beta = p.beta(k);
            for i in 0..n {
                let delta = if x[i] == 1 { -field[i] } else { field[i] };
                if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
                    let step = if x[i] == 1 { -1.0 } else { 1.0 };
                    x[i] ^= 1;
                    energy += delta;
                    for &(j, c) in self.row(i) {
                        field[j] += step * c;
                    }
                }
            }
            if energy < best_energy {
                best_energy = energy;
                best.copy_from_slice(&x);
            }
        }
        best
    }
}

/// `n_reads` independent restarts; read `r` draws from stream
/// `derive_seed(seed, r)`, so the result does not depend on how reads are
/// scheduled across threads. Reported energies are recomputed exactly in `T`.
pub fn simulated_annealing<T: Scalar>(q: &QuboInstance<T>, p: &SaParams) -> Result<SolverOutcome<T>> {
    p.validate()?;
    let problem = Problem::new(q);
    let reads: Vec<(Assignment, T)> = (0..p.n_reads)
        .into_par_iter()
        .map(|r| {
            let bits = Assignment::new(problem.read(p, derive_seed(p.seed, r as u64)))?;
            let e = q.evaluate(&bits)?;
            Ok((bits, e))
        })
        .collect::<Result<_>>()?;

    let mut best = 0;
    for r in 1..reads.len() {
        if q.sense().better(&reads[r].1, &reads[best].1) {
            best = r;
        }
    }
    let per_read_energies = reads.iter().map(|(_, e)| e.clone()).collect();
    let (best_assignment, best_energy) = reads.into_iter().nth(best).expect("at least one read");
    Ok(SolverOutcome {
        best_assignment,
        best_energy,
        per_read_energies,
        solver_name: "simulated_annealing".into(),
        seed: p.seed,
    })
}
