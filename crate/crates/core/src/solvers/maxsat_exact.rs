//! Exact partial MAX-SAT by depth-first branch and bound.
//!
//! Hard clauses are enforced by unit propagation; a node is pruned when the
//! soft weight not yet falsified cannot beat the incumbent.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::maxsat::{Clause, MaxSatInstance, VehicleConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExactBudget {
    pub max_vars: usize,
    #[serde(with = "opt_secs")]
    pub time_limit: Option<Duration>,
    pub max_nodes: Option<u64>,
}

impl Default for ExactBudget {
    fn default() -> Self {
        Self {
            max_vars: 40,
            time_limit: None,
            max_nodes: None,
        }
    }
}

mod opt_secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Option<Duration>, s: S) -> Result<S::Ok, S::Error> {
        match d {
            Some(d) => s.serialize_some(&d.as_secs_f64()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Duration>, D::Error> {
        let secs: Option<f64> = Option::deserialize(d)?;
        secs.map(|s| Duration::try_from_secs_f64(s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum MaxSatOptimum {
    Optimal { config: VehicleConfig, weight: f64 },
    Unsat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    pub optimum: MaxSatOptimum,
    pub nodes: u64,
}

const FREE: u8 = 2;

struct Search<'a> {
    inst: &'a MaxSatInstance,
    budget: &'a ExactBudget,
    started: Instant,
    value: Vec<u8>,
    trail: Vec<usize>,
    order: Vec<usize>,
    prefer_true: Vec<bool>,
    best: Option<(Vec<u8>, f64)>,
    nodes: u64,
}

enum Status {
    Satisfied,
    Falsified,
    Unit(usize, u8),
    Open,
}

impl<'a> Search<'a> {
    fn status(&self, c: &Clause) -> Status {
        let mut free = None;
        let mut n_free = 0;
        for lit in c.literals() {
            match self.value[lit.var] {
                FREE => {
                    n_free += 1;
                    free = Some((lit.var, u8::from(!lit.negated)));
                }
                v if (v == 1) != lit.negated => return Status::Satisfied,
                _ => {}
            }
        }
        match (n_free, free) {
            (0, _) => Status::Falsified,
            (1, Some((v, b))) => Status::Unit(v, b),
            _ => Status::Open,
        }
    }

    fn assign(&mut self, var: usize, b: u8) {
        self.value[var] = b;
        self.trail.push(var);
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().expect("trail above mark");
            self.value[v] = FREE;
        }
    }

    /// `false` on a hard conflict.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for c in self.inst.hard() {
                match self.status(c) {
                    Status::Falsified => return false,
                    Status::Unit(v, b) => {
                        self.assign(v, b);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn falsified_weight(&self) -> f64 {
        self.inst
            .soft()
            .iter()
            .zip(self.inst.weights())
            .filter(|(c, _)| matches!(self.status(c), Status::Falsified))
            .map(|(_, &w)| w)
            .sum()
    }

    fn check_budget(&self) -> Result<()> {
        if let Some(max) = self.budget.max_nodes {
            if self.nodes > max {
                return Err(Error::Timeout(format!("exact MAX-SAT node limit {max} reached")));
            }
        }
        if let Some(limit) = self.budget.time_limit {
            if self.nodes % 1024 == 0 && self.started.elapsed() > limit {
                return Err(Error::Timeout(format!("exact MAX-SAT time limit {limit:?} reached")));
            }
        }
        Ok(())
    }

    fn run(&mut self) -> Result<()> {
        self.nodes += 1;
        self.check_budget()?;
        let mark = self.trail.len();
        if !self.propagate() {
            self.undo(mark);
            return Ok(());
        }
        let bound = self.inst.total_soft_weight() - self.falsified_weight();
        if matches!(&self.best, Some((_, w)) if bound <= *w) {
            self.undo(mark);
            return Ok(());
        }
        let Some(&var) = self.order.iter().find(|&&v| self.value[v] == FREE) else {
            self.best = Some((self.value.clone(), bound));
            self.undo(mark);
            return Ok(());
        };
        let first = u8::from(self.prefer_true[var]);
        for b in [first, 1 - first] {
            let inner = self.trail.len();
            self.assign(var, b);
            let r = self.run();
            self.undo(inner);
            r?;
        }
        self.undo(mark);
        Ok(())
    }
}

/// Maximizes satisfied soft weight subject to every hard clause.
pub fn exact_maxsat(inst: &MaxSatInstance, budget: &ExactBudget) -> Result<ExactResult> {
    let n = inst.n_vars();
    if n > budget.max_vars {
        return Err(Error::Capacity {
            what: "exact MAX-SAT variable count",
            got: n,
            limit: budget.max_vars,
        });
    }
    // Most frequently occurring variables first; polarity by soft weight.
    let mut count = vec![0usize; n];
    let mut lean = vec![0.0f64; n];
    for c in inst.hard().iter().chain(inst.soft()) {
        for lit in c.literals() {
            count[lit.var] += 1;
        }
    }
    for (c, &w) in inst.soft().iter().zip(inst.weights()) {
        for lit in c.literals() {
            lean[lit.var] += if lit.negated { -w } else { w };
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(count[v]), v));

    let mut s = Search {
        inst,
        budget,
        started: Instant::now(),
        value: vec![FREE; n],
        trail: Vec::new(),
        order,
        prefer_true: lean.iter().map(|&l| l >= 0.0).collect(),
        best: None,
        nodes: 0,
    };
    s.run()?;
    let optimum = match s.best {
        Some((bits, weight)) => MaxSatOptimum::Optimal {
            config: VehicleConfig::new(bits)?,
            weight,
        },
        None => MaxSatOptimum::Unsat,
    };
    Ok(ExactResult { optimum, nodes: s.nodes })
}
