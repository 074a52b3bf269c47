//! Dense state-vector QAOA for Ising objectives.
//!
//! Basis index bit `i` is spin `i`, with bit 0 meaning spin +1 (so bit `i`
//! equals the QUBO variable `x_i`). One layer applies the phase separator
//! `exp(-i gamma E)` followed by the mixer `exp(-i beta X)` on every qubit,
//! starting from the uniform superposition. With this convention a single
//! spin with field `h = 1` has `<E> = sin(2 beta) sin(2 gamma)` after one
//! layer.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded_rng;
use crate::Ising;

/// Largest simulated register.
pub const MAX_QUBITS: usize = 25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub n_iterations: usize,
    pub stepsize: f64,
    pub momentum: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl QaoaParams {
    /// `p` layers with angles drawn uniformly from `[0, 2 pi)`.
    pub fn seeded(p: usize, seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let mut draw = || (0..p).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect::<Vec<_>>();
        let gammas = draw();
        let betas = draw();
        Self {
            gammas,
            betas,
            n_iterations: 60,
            stepsize: 0.001,
            momentum: 0.9,
            n_samples: 50,
            seed,
        }
    }

    pub fn with_angles(gammas: Vec<f64>, betas: Vec<f64>) -> Self {
        Self {
            gammas,
            betas,
            ..Self::seeded(0, 0)
        }
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.gammas.is_empty() || self.gammas.len() != self.betas.len() {
            return Err(Error::Parameter(format!(
                "need p >= 1 gammas and betas of equal length, got {} and {}",
                self.gammas.len(),
                self.betas.len()
            )));
        }
        if self.gammas.iter().chain(&self.betas).any(|a| !a.is_finite()) {
            return Err(Error::Parameter("angles must be finite".into()));
        }
        if !(self.stepsize > 0.0 && self.stepsize.is_finite()) {
            return Err(Error::Parameter(format!("stepsize {}", self.stepsize)));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Parameter(format!("momentum {} outside [0, 1)", self.momentum)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QaoaState {
    pub amplitudes: Vec<Complex64>,
}

impl QaoaState {
    pub fn uniform(n_qubits: usize) -> Self {
        let size = 1usize << n_qubits;
        let a = Complex64::new(1.0 / (size as f64).sqrt(), 0.0);
        Self { amplitudes: vec![a; size] }
    }

    pub fn n_qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Diagonal of the cost Hamiltonian, computed once per instance.
#[derive(Clone, Debug)]
pub struct Simulator {
    n: usize,
    energies: Vec<f64>,
}

fn apply_phase(psi: &mut [Complex64], energies: &[f64], gamma: f64) {
    for (a, &e) in psi.iter_mut().zip(energies) {
        *a *= Complex64::from_polar(1.0, -gamma * e);
    }
}

fn apply_mixer(psi: &mut [Complex64], n: usize, beta: f64) {
    let (c, s) = (beta.cos(), beta.sin());
    let mis = Complex64::new(0.0, -s);
    for q in 0..n {
        let bit = 1usize << q;
        for x in 0..psi.len() {
            if x & bit == 0 {
                let (a, b) = (psi[x], psi[x | bit]);
                psi[x] = a * c + b * mis;
                psi[x | bit] = b * c + a * mis;
            }
        }
    }
}

/// `sum_q X_q psi`.
fn apply_x_sum(psi: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for q in 0..n {
        let bit = 1usize << q;
        for (x, o) in out.iter_mut().enumerate() {
            *o += psi[x ^ bit];
        }
    }
    out
}

/// `2 Re <lambda| -i A |phi>` for a Hermitian generator already applied to `phi`.
fn derivative(lambda: &[Complex64], a_phi: &[Complex64]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (l, p) in lambda.iter().zip(a_phi) {
        acc += l.conj() * p;
    }
    2.0 * (Complex64::new(0.0, -1.0) * acc).re
}

impl Simulator {
    pub fn new(h: &Ising) -> Result<Self> {
        let n = h.n_spins();
        if n > MAX_QUBITS {
            return Err(Error::Capacity {
                what: "QAOA qubit count",
                got: n,
                limit: MAX_QUBITS,
            });
        }
        Ok(Self {
            n,
            energies: h.energy_table(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    fn check(&self, gammas: &[f64], betas: &[f64]) -> Result<()> {
        if gammas.len() != betas.len() {
            return Err(Error::Dimension {
                expected: gammas.len(),
                got: betas.len(),
            });
        }
        Ok(())
    }

    pub fn run(&self, gammas: &[f64], betas: &[f64]) -> Result<QaoaState> {
        self.check(gammas, betas)?;
        let mut psi = QaoaState::uniform(self.n);
        for (&g, &b) in gammas.iter().zip(betas) {
            apply_phase(&mut psi.amplitudes, &self.energies, g);
            apply_mixer(&mut psi.amplitudes, self.n, b);
        }
        Ok(psi)
    }

    /// Sequential sum in basis order, so the value is bit-stable.
    pub fn expectation(&self, state: &QaoaState) -> Result<f64> {
        if state.amplitudes.len() != self.energies.len() {
            return Err(Error::Dimension {
                expected: self.energies.len(),
                got: state.amplitudes.len(),
            });
        }
        Ok(state
            .amplitudes
            .iter()
            .zip(&self.energies)
            .map(|(a, &e)| a.norm_sqr() * e)
            .sum())
    }

    /// Expectation and its gradient `(d/dgamma, d/dbeta)` by the adjoint
    /// method: one forward pass, then the state and the co-state `H psi`
    /// are un-computed layer by layer.
    pub fn value_and_gradient(&self, gammas: &[f64], betas: &[f64]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
        let state = self.run(gammas, betas)?;
        let value = self.expectation(&state)?;
        let p = gammas.len();
        let mut phi = state.amplitudes;
        let mut lambda: Vec<Complex64> = phi.iter().zip(&self.energies).map(|(a, &e)| a * e).collect();
        let (mut dg, mut db) = (vec![0.0; p], vec![0.0; p]);
        for l in (0..p).rev() {
            db[l] = derivative(&lambda, &apply_x_sum(&phi, self.n));
            apply_mixer(&mut phi, self.n, -betas[l]);
            apply_mixer(&mut lambda, self.n, -betas[l]);
            let e_phi: Vec<Complex64> = phi.iter().zip(&self.energies).map(|(a, &e)| a * e).collect();
            dg[l] = derivative(&lambda, &e_phi);
            apply_phase(&mut phi, &self.energies, -gammas[l]);
            apply_phase(&mut lambda, &self.energies, -gammas[l]);
        }
        Ok((value, dg, db))
    }
}

pub fn run_circuit(h: &Ising, params: &QaoaParams) -> Result<QaoaState> {
    params.validate()?;
    Simulator::new(h)?.run(&params.gammas, &params.betas)
}

pub fn expectation(state: &QaoaState, h: &Ising) -> Result<f64> {
    Simulator::new(h)?.expectation(state)
}

/// Gradient ordered as all gammas, then all betas.
pub fn gradient(h: &Ising, params: &QaoaParams) -> Result<Vec<f64>> {
    params.validate()?;
    let (_, mut dg, db) = Simulator::new(h)?.value_and_gradient(&params.gammas, &params.betas)?;
    dg.extend(db);
    Ok(dg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaRun {
    pub params: QaoaParams,
    /// Expectation before each update; length `n_iterations`.
    pub trace: Vec<f64>,
    pub final_expectation: f64,
}

/// Gradient descent with momentum: `v = m v + eta g`, `theta -= v`.
pub fn optimize(h: &Ising, initial: &QaoaParams) -> Result<QaoaRun> {
    initial.validate()?;
    let sim = Simulator::new(h)?;
    let mut params = initial.clone();
    let p = params.p();
    let mut velocity = vec![0.0; 2 * p];
    let mut trace = Vec::with_capacity(params.n_iterations);
    for _ in 0..params.n_iterations {
        let (value, dg, db) = sim.value_and_gradient(&params.gammas, &params.betas)?;
        trace.push(value);
        for (k, g) in dg.iter().chain(&db).enumerate() {
            velocity[k] = params.momentum * velocity[k] + params.stepsize * g;
        }
        for l in 0..p {
            params.gammas[l] -= velocity[l];
            params.betas[l] -= velocity[p + l];
        }
    }
    let final_expectation = sim.expectation(&sim.run(&params.gammas, &params.betas)?)?;
    Ok(QaoaRun {
        params,
        trace,
        final_expectation,
    })
}

/// Validity is the share of sampled basis states that decode; quality
/// is the cost averaged over valid states weighted by their probability
/// renormalized to the valid subspace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaMetrics {
    pub validity: f64,
    pub quality: Option<f64>,
    pub samples: Vec<usize>,
}

/// Seeded draws of basis indices from a probability vector.
pub fn sample_basis_states(probs: &[f64], n_samples: usize, seed: u64) -> Vec<usize> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in probs {
        acc += p;
        cdf.push(acc);
    }
    let mut rng = seeded_rng(seed);
    (0..n_samples)
        .map(|_| {
            let u = rng.gen::<f64>() * acc;
            cdf.partition_point(|&c| c <= u).min(probs.len() - 1)
        })
        .collect()
}

/// Most frequent entry; ties go to the smallest index.
pub fn mode(samples: &[usize]) -> Option<usize> {
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let mut best: Option<(usize, usize)> = None;
    for chunk in sorted.chunk_by(|a, b| a == b) {
        if best.map_or(true, |(_, n)| chunk.len() > n) {
            best = Some((chunk[0], chunk.len()));
        }
    }
    best.map(|(x, _)| x)
}

/// `cost(x)` is `Some(application cost)` for a valid basis state `x`.
pub fn measure_metrics(
    state: &QaoaState,
    cost: impl Fn(usize) -> Option<f64>,
    n_samples: usize,
    seed: u64,
) -> QaoaMetrics {
    let probs = state.probabilities();
    let costs: Vec<Option<f64>> = (0..probs.len()).map(&cost).collect();
    let (mut mass, mut weighted) = (0.0, 0.0);
    for (p, c) in probs.iter().zip(&costs) {
        if let Some(c) = c {
            mass += p;
            weighted += p * c;
        }
    }
    let samples = sample_basis_states(&probs, n_samples, seed);
    let valid = samples.iter().filter(|&&x| costs[x].is_some()).count();
    QaoaMetrics {
        validity: if n_samples == 0 { 0.0 } else { valid as f64 / n_samples as f64 },
        quality: (mass > 0.0).then(|| weighted / mass),
        samples,
    }
}

pub fn trace_to_csv(trace: &[f64]) -> String {
    let mut out = String::from("iteration,expectation\n");
    for (k, e) in trace.iter().enumerate() {
        writeln!(out, "{k},{e:?}").expect("write to string");
    }
    out
}

pub fn trace_from_csv(text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "iteration,expectation" => {}
        _ => return Err(Error::parse(1, "expected header iteration,expectation")),
    }
    let mut trace = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (k, e) = line
            .split_once(',')
            .ok_or_else(|| Error::parse(i + 1, "expected two fields"))?;
        let k: usize = k.trim().parse().map_err(|_| Error::parse(i + 1, "bad iteration"))?;
        if k != trace.len() {
            return Err(Error::parse(i + 1, format!("iteration {k} out of order")));
        }
        trace.push(e.trim().parse().map_err(|_| Error::parse(i + 1, "bad expectation"))?);
    }
    Ok(trace)
}
