//! Constructive path heuristics: best local move, worst local move and a
//! uniformly random feasible move at every step.
//!
//! A path problem is a set of nodes partitioned into groups. The walk starts
//! at a fixed node, visits one node of every other group, and closes back to
//! the start. For the robot path problem the groups are home and the seams;
//! for TSP every node is its own group.

use rand::Rng;

use crate::error::{Error, Result};
use crate::problems::pvc::{PvcInstance, PvcTour};
use crate::problems::tsp::{TspInstance, TspTour};
use crate::rng::seeded_rng;

pub trait PathProblem {
    type Tour;

    fn n_nodes(&self) -> usize;
    fn n_groups(&self) -> usize;
    fn group(&self, node: usize) -> usize;
    fn start(&self) -> usize;
    /// `None` when the move is not allowed.
    fn cost(&self, from: usize, to: usize) -> Option<f64>;
    fn tour(&self, sequence: &[usize]) -> Self::Tour;
}

impl PathProblem for PvcInstance {
    type Tour = PvcTour;

    fn n_nodes(&self) -> usize {
        PvcInstance::n_nodes(self)
    }

    fn n_groups(&self) -> usize {
        PvcInstance::n_groups(self)
    }

    fn group(&self, node: usize) -> usize {
        self.group_of(node)
    }

    /// Home in config 0 with tool 0.
    fn start(&self) -> usize {
        0
    }

    fn cost(&self, from: usize, to: usize) -> Option<f64> {
        self.distance(from, to)
    }

    fn tour(&self, sequence: &[usize]) -> PvcTour {
        PvcTour {
            steps: sequence.iter().map(|&u| self.node(u)).collect(),
        }
    }
}

impl PathProblem for TspInstance {
    type Tour = TspTour;

    fn n_nodes(&self) -> usize {
        TspInstance::n_nodes(self)
    }

    fn n_groups(&self) -> usize {
        TspInstance::n_nodes(self)
    }

    fn group(&self, node: usize) -> usize {
        node
    }

    fn start(&self) -> usize {
        0
    }

    fn cost(&self, from: usize, to: usize) -> Option<f64> {
        Some(self.distance(from, to))
    }

    fn tour(&self, sequence: &[usize]) -> TspTour {
        TspTour {
            order: sequence.to_vec(),
        }
    }
}

/// Tour plus the sequence of moves taken, closing move included.
#[derive(Clone, Debug, PartialEq)]
pub struct PathResult<Tour> {
    pub tour: Tour,
    pub sequence: Vec<usize>,
    pub moves: Vec<(usize, usize, f64)>,
    pub length: f64,
}

enum Rule<'a, R> {
    Cheapest,
    Costliest,
    Random(&'a mut R),
}

fn walk<P: PathProblem, R: Rng>(p: &P, mut rule: Rule<'_, R>) -> Result<PathResult<P::Tour>> {
    let start = p.start();
    let mut visited = vec![false; p.n_groups()];
    visited[p.group(start)] = true;
    let mut sequence = vec![start];
    let mut moves = Vec::new();
    let mut current = start;
    for _ in 1..p.n_groups() {
        let candidates = (0..p.n_nodes())
            .filter(|&v| !visited[p.group(v)])
            .filter_map(|v| p.cost(current, v).map(|c| (v, c)))
            // a candidate must still be able to close the tour at the end
            .filter(|&(v, _)| visited.iter().filter(|&&s| !s).count() > 1 || p.cost(v, start).is_some());
        let pick = match &mut rule {
            // strict comparison keeps the lowest index on ties
            Rule::Cheapest => candidates.fold(None, |best: Option<(usize, f64)>, c| match best {
                Some(b) if b.1 <= c.1 => Some(b),
                _ => Some(c),
            }),
            Rule::Costliest => candidates.fold(None, |best: Option<(usize, f64)>, c| match best {
                Some(b) if b.1 >= c.1 => Some(b),
                _ => Some(c),
            }),
            Rule::Random(rng) => {
                let all: Vec<_> = candidates.collect();
                (!all.is_empty()).then(|| all[rng.gen_range(0..all.len())])
            }
        };
        let (next, c) = pick.ok_or_else(|| {
            Error::Infeasible(format!("no feasible move from node {current} after {} steps", sequence.len()))
        })?;
        visited[p.group(next)] = true;
        moves.push((current, next, c));
        sequence.push(next);
        current = next;
    }
    let back = p
        .cost(current, start)
        .ok_or_else(|| Error::Infeasible(format!("no edge from node {current} back to the start")))?;
    moves.push((current, start, back));
    let length = moves.iter().map(|m| m.2).sum();
    Ok(PathResult {
        tour: p.tour(&sequence),
        sequence,
        moves,
        length,
    })
}

/// Cheapest feasible move at every step; ties go to the lowest node index.
pub fn greedy_path<P: PathProblem>(p: &P) -> Result<PathResult<P::Tour>> {
    walk::<P, rand_chacha::ChaCha8Rng>(p, Rule::Cheapest)
}

/// Costliest feasible move at every step; ties go to the lowest node index.
pub fn reverse_greedy_path<P: PathProblem>(p: &P) -> Result<PathResult<P::Tour>> {
    walk::<P, rand_chacha::ChaCha8Rng>(p, Rule::Costliest)
}

/// Uniform choice among feasible moves at every step.
pub fn random_path<P: PathProblem>(p: &P, seed: u64) -> Result<PathResult<P::Tour>> {
    let mut rng = seeded_rng(seed);
    walk(p, Rule::Random(&mut rng))
}
