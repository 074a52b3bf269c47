//! Robot path planning for seam sealing.
//!
//! A robot must seal every seam of a workpiece. Each seam can be entered from
//! either of its two endpoints, and every endpoint can be approached in any
//! (configuration, tool) setting, so a graph node is the tuple
//! `(seam, endpoint, config, tool)`. A home position exists once per setting.
//! Moves are directed, asymmetric and not all of them exist.
//!
//! The QUBO uses one variable per (time step, node) with `N_seams + 1` time
//! steps. Steps are cyclic: the move out of the last step goes back to the
//! first, so a solution is a closed tour that is rotated to start at home
//! after decoding.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{Assignment, QuboBuilder, Sense};
use crate::rng::seeded_rng;
use crate::Qubo;

/// Where a node sits on the workpiece.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Site {
    Home,
    Seam { seam: usize, endpoint: u8 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PvcNode {
    pub site: Site,
    pub config: usize,
    pub tool: usize,
}

impl PvcNode {
    pub fn home(config: usize, tool: usize) -> Self {
        Self {
            site: Site::Home,
            config,
            tool,
        }
    }

    pub fn seam(seam: usize, endpoint: u8, config: usize, tool: usize) -> Self {
        Self {
            site: Site::Seam { seam, endpoint },
            config,
            tool,
        }
    }

    pub fn is_home(&self) -> bool {
        self.site == Site::Home
    }

    /// Setting this node is visited in.
    pub fn setting(&self) -> (usize, usize) {
        (self.config, self.tool)
    }
}

impl fmt::Display for PvcNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.site {
            Site::Home => write!(f, "home[c{} t{}]", self.config, self.tool),
            Site::Seam { seam, endpoint } => {
                write!(f, "s{seam}.{endpoint}[c{} t{}]", self.config, self.tool)
            }
        }
    }
}

/// Number of QUBO variables for a robot path instance:
/// `(2 N_seams + 1) N_configs N_tools (N_seams + 1)`.
pub fn qubit_count(n_seams: usize, n_configs: usize, n_tools: usize) -> usize {
    (2 * n_seams + 1) * n_configs * n_tools * (n_seams + 1)
}

/// Generator knobs for synthetic instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    /// Probability that a directed pair of seam nodes in different seams is
    /// connected. Home is always connected to every seam node.
    pub edge_fraction: f64,
    /// Inclusive integer range of edge weights.
    pub min_weight: u32,
    pub max_weight: u32,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            edge_fraction: 0.9,
            min_weight: 1,
            max_weight: 100,
        }
    }
}

/// Weighted directed graph over `(seam, endpoint, config, tool)` nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct PvcInstance {
    n_seams: usize,
    n_configs: usize,
    n_tools: usize,
    seed: Option<u64>,
    dist: Vec<Option<f64>>,
}

impl PvcInstance {
    fn empty(n_seams: usize, n_configs: usize, n_tools: usize, seed: Option<u64>) -> Result<Self> {
        if n_seams == 0 || n_configs == 0 || n_tools == 0 {
            return Err(Error::Parameter(format!(
                "robot path dimensions must be positive, got seams={n_seams} configs={n_configs} tools={n_tools}"
            )));
        }
        let n = (2 * n_seams + 1) * n_configs * n_tools;
        Ok(Self {
            n_seams,
            n_configs,
            n_tools,
            seed,
            dist: vec![None; n * n],
        })
    }

    /// Builds an instance from explicit directed edges.
    pub fn from_edges(
        n_seams: usize,
        n_configs: usize,
        n_tools: usize,
        edges: impl IntoIterator<Item = (PvcNode, PvcNode, f64)>,
    ) -> Result<Self> {
        let mut inst = Self::empty(n_seams, n_configs, n_tools, None)?;
        for (u, v, d) in edges {
            let ui = inst
                .index_of(&u)
                .ok_or_else(|| Error::Parameter(format!("node {u} not in instance")))?;
            let vi = inst
                .index_of(&v)
                .ok_or_else(|| Error::Parameter(format!("node {v} not in instance")))?;
            if ui == vi {
                return Err(Error::Parameter(format!("self loop on {u}")));
            }
            if !d.is_finite() || d < 0.0 {
                return Err(Error::Parameter(format!("distance {d} on {u} -> {v}")));
            }
            let n = inst.n_nodes();
            inst.dist[ui * n + vi] = Some(d);
        }
        Ok(inst)
    }

    pub fn n_seams(&self) -> usize {
        self.n_seams
    }

    pub fn n_configs(&self) -> usize {
        self.n_configs
    }

    pub fn n_tools(&self) -> usize {
        self.n_tools
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn n_nodes(&self) -> usize {
        (2 * self.n_seams + 1) * self.n_configs * self.n_tools
    }

    /// Home plus one group per seam.
    pub fn n_groups(&self) -> usize {
        self.n_seams + 1
    }

    pub fn n_steps(&self) -> usize {
        self.n_seams + 1
    }

    pub fn node(&self, index: usize) -> PvcNode {
        let settings = self.n_configs * self.n_tools;
        let slot = index / settings;
        let rem = index % settings;
        let config = rem / self.n_tools;
        let tool = rem % self.n_tools;
        let site = if slot == 0 {
            Site::Home
        } else {
            Site::Seam {
                seam: (slot - 1) / 2,
                endpoint: ((slot - 1) % 2) as u8,
            }
        };
        PvcNode { site, config, tool }
    }

    pub fn index_of(&self, node: &PvcNode) -> Option<usize> {
        if node.config >= self.n_configs || node.tool >= self.n_tools {
            return None;
        }
        let slot = match node.site {
            Site::Home => 0,
            Site::Seam { seam, endpoint } => {
                if seam >= self.n_seams || endpoint > 1 {
                    return None;
                }
                1 + 2 * seam + endpoint as usize
            }
        };
        Some((slot * self.n_configs + node.config) * self.n_tools + node.tool)
    }

    /// Group of a node: 0 for home, `s + 1` for seam `s`.
    pub fn group_of(&self, index: usize) -> usize {
        let slot = index / (self.n_configs * self.n_tools);
        if slot == 0 {
            0
        } else {
            (slot - 1) / 2 + 1
        }
    }

    pub fn distance(&self, from: usize, to: usize) -> Option<f64> {
        self.dist[from * self.n_nodes() + to]
    }

    pub fn edge(&self, from: &PvcNode, to: &PvcNode) -> Option<f64> {
        self.distance(self.index_of(from)?, self.index_of(to)?)
    }

    /// All directed edges in index order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n_nodes();
        self.dist
            .iter()
            .enumerate()
            .filter_map(move |(k, d)| d.map(|d| (k / n, k % n, d)))
    }

    pub fn n_edges(&self) -> usize {
        self.dist.iter().filter(|d| d.is_some()).count()
    }

    pub fn max_edge(&self) -> f64 {
        self.edges().map(|(_, _, d)| d).fold(0.0, f64::max)
    }

    /// Returns a copy with every distance passed through `f`. Used to build
    /// variants of generated instances with a controlled cost structure.
    pub fn map_distances(&self, mut f: impl FnMut(&PvcNode, &PvcNode, f64) -> f64) -> Result<Self> {
        let mut out = self.clone();
        let n = self.n_nodes();
        for u in 0..n {
            for v in 0..n {
                if let Some(d) = self.dist[u * n + v] {
                    let nd = f(&self.node(u), &self.node(v), d);
                    if !nd.is_finite() || nd < 0.0 {
                        return Err(Error::Parameter(format!("mapped distance {nd}")));
                    }
                    out.dist[u * n + v] = Some(nd);
                }
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let edges = self
            .edges()
            .map(|(u, v, d)| {
                let (s, e, c, t) = flat(&self.node(u));
                let (s2, e2, c2, t2) = flat(&self.node(v));
                (s, e, c, t, s2, e2, c2, t2, d)
            })
            .collect();
        let doc = PvcDocument {
            n_seams: self.n_seams,
            n_configs: self.n_configs,
            n_tools: self.n_tools,
            seed: self.seed,
            edges,
        };
        serde_json::to_string(&doc).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PvcDocument =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("robot path JSON: {e}")))?;
        let mut edges = Vec::with_capacity(doc.edges.len());
        for (s, e, c, t, s2, e2, c2, t2, d) in doc.edges {
            edges.push((unflat(s, e, c, t)?, unflat(s2, e2, c2, t2)?, d));
        }
        let mut inst = Self::from_edges(doc.n_seams, doc.n_configs, doc.n_tools, edges)?;
        inst.seed = doc.seed;
        Ok(inst)
    }
}

type EdgeRow = (i64, u8, usize, usize, i64, u8, usize, usize, f64);

/// `{n_seams, n_configs, n_tools, seed, edges: [[s,n,c,t, s',n',c',t', d]..]}`;
/// home is written as seam `-1`, endpoint `0`.
#[derive(Serialize, Deserialize)]
struct PvcDocument {
    n_seams: usize,
    n_configs: usize,
    n_tools: usize,
    seed: Option<u64>,
    edges: Vec<EdgeRow>,
}

fn flat(node: &PvcNode) -> (i64, u8, usize, usize) {
    match node.site {
        Site::Home => (-1, 0, node.config, node.tool),
        Site::Seam { seam, endpoint } => (seam as i64, endpoint, node.config, node.tool),
    }
}

fn unflat(s: i64, e: u8, c: usize, t: usize) -> Result<PvcNode> {
    match s {
        -1 => Ok(PvcNode::home(c, t)),
        s if s >= 0 => Ok(PvcNode::seam(s as usize, e, c, t)),
        s => Err(Error::Format(format!("seam index {s}"))),
    }
}

/// Seeded synthetic instance with default generator parameters.
pub fn generate_instance(n_seams: usize, n_configs: usize, n_tools: usize, seed: u64) -> Result<PvcInstance> {
    generate_instance_with(n_seams, n_configs, n_tools, seed, &GeneratorParams::default())
}

pub fn generate_instance_with(
    n_seams: usize,
    n_configs: usize,
    n_tools: usize,
    seed: u64,
    params: &GeneratorParams,
) -> Result<PvcInstance> {
    if !(0.0..=1.0).contains(&params.edge_fraction) {
        return Err(Error::Parameter(format!("edge fraction {}", params.edge_fraction)));
    }
    if params.min_weight > params.max_weight {
        return Err(Error::Parameter("min_weight exceeds max_weight".into()));
    }
    let mut inst = PvcInstance::empty(n_seams, n_configs, n_tools, Some(seed))?;
    let mut rng = seeded_rng(seed);
    let n = inst.n_nodes();
    for u in 0..n {
        for v in 0..n {
            let (gu, gv) = (inst.group_of(u), inst.group_of(v));
            if gu == gv {
                continue;
            }
            // Draw the coin for every pair so the stream layout does not depend on the fraction.
            let coin: f64 = rng.gen();
            let weight = rng.gen_range(params.min_weight..=params.max_weight);
            if gu == 0 || gv == 0 || coin < params.edge_fraction {
                inst.dist[u * n + v] = Some(f64::from(weight));
            }
        }
    }
    Ok(inst)
}

/// Drops the highest-numbered seams until `target_seams` remain. Home and all
/// edges among surviving nodes are kept.
pub fn reduce_instance(inst: &PvcInstance, target_seams: usize) -> Result<PvcInstance> {
    if target_seams > inst.n_seams {
        return Err(Error::Parameter(format!(
            "cannot reduce {} seams to {target_seams}",
            inst.n_seams
        )));
    }
    let mut out = PvcInstance::empty(target_seams, inst.n_configs, inst.n_tools, inst.seed)?;
    let n = out.n_nodes();
    for u in 0..n {
        for v in 0..n {
            let (nu, nv) = (out.node(u), out.node(v));
            out.dist[u * n + v] = inst.edge(&nu, &nv);
        }
    }
    Ok(out)
}

/// Invertible map between `(time step, node)` and flat variable index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PvcIndex {
    n_steps: usize,
    n_nodes: usize,
}

impl PvcIndex {
    pub fn new(n_seams: usize, n_configs: usize, n_tools: usize) -> Self {
        Self {
            n_steps: n_seams + 1,
            n_nodes: (2 * n_seams + 1) * n_configs * n_tools,
        }
    }

    pub fn for_instance(inst: &PvcInstance) -> Self {
        Self::new(inst.n_seams, inst.n_configs, inst.n_tools)
    }

    pub fn len(&self) -> usize {
        self.n_steps * self.n_nodes
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn var(&self, step: usize, node: usize) -> usize {
        debug_assert!(step < self.n_steps && node < self.n_nodes);
        step * self.n_nodes + node
    }

    pub fn step_node(&self, var: usize) -> (usize, usize) {
        (var / self.n_nodes, var % self.n_nodes)
    }
}

/// Default penalty weight: twice the worst-case tour length bound
/// `n_steps * max_edge`.
pub fn default_lambda(inst: &PvcInstance) -> f64 {
    2.0 * inst.n_steps() as f64 * inst.max_edge().max(1.0)
}

/// Penalty on a move that has no edge, as a multiple of lambda.
pub const MISSING_EDGE_FACTOR: f64 = 10.0;

/// `f_dist + lambda (f_comp + f_time)` with cyclic time steps. Moves without
/// an edge carry `10 lambda` instead of a distance.
pub fn map_to_qubo(inst: &PvcInstance, lambda: f64) -> Result<(Qubo, PvcIndex)> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Parameter(format!("lambda must be positive, got {lambda}")));
    }
    let idx = PvcIndex::for_instance(inst);
    let n_nodes = idx.n_nodes();
    let n_steps = idx.n_steps();
    let missing = MISSING_EDGE_FACTOR * lambda;
    let mut b = QuboBuilder::new(idx.len(), Sense::Minimize);

    for step in 0..n_steps {
        let next = (step + 1) % n_steps;
        for u in 0..n_nodes {
            for v in 0..n_nodes {
                let w = inst.distance(u, v).unwrap_or(missing);
                if w != 0.0 {
                    b.add_quadratic(idx.var(step, u), idx.var(next, v), w)?;
                }
            }
        }
    }

    // f_time: one node per step.
    for step in 0..n_steps {
        let vars: Vec<usize> = (0..n_nodes).map(|u| idx.var(step, u)).collect();
        add_one_hot(&mut b, &vars, lambda)?;
    }
    // f_comp: each group (home or a seam) exactly once over all steps.
    for group in 0..inst.n_groups() {
        let vars: Vec<usize> = (0..n_steps)
            .flat_map(|step| {
                (0..n_nodes)
                    .filter(move |&u| inst.group_of(u) == group)
                    .map(move |u| idx.var(step, u))
            })
            .collect();
        add_one_hot(&mut b, &vars, lambda)?;
    }
    Ok((b.build()?, idx))
}

/// Adds `weight * (sum x - 1)^2 = weight * (1 - sum x + 2 sum_{a<b} x_a x_b)`.
pub(crate) fn add_one_hot(b: &mut QuboBuilder<f64>, vars: &[usize], weight: f64) -> Result<()> {
    b.add_offset(weight);
    for (k, &a) in vars.iter().enumerate() {
        b.add_linear(a, -weight)?;
        for &c in &vars[k + 1..] {
            b.add_quadratic(a, c, 2.0 * weight)?;
        }
    }
    Ok(())
}

/// Closed tour of `N_seams + 1` nodes starting at home.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PvcTour {
    pub steps: Vec<PvcNode>,
}

impl PvcTour {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Active nodes per time step.
pub fn reverse_map(bits: &Assignment, idx: &PvcIndex) -> Result<Vec<Vec<usize>>> {
    if bits.len() != idx.len() {
        return Err(Error::Dimension {
            expected: idx.len(),
            got: bits.len(),
        });
    }
    Ok((0..idx.n_steps())
        .map(|step| {
            (0..idx.n_nodes())
                .filter(|&u| bits.get(idx.var(step, u)))
                .collect()
        })
        .collect())
}

/// Node sequence when every step has exactly one active node.
pub fn one_hot_sequence(active: &[Vec<usize>]) -> Option<Vec<usize>> {
    active
        .iter()
        .map(|nodes| (nodes.len() == 1).then(|| nodes[0]))
        .collect()
}

/// Every group visited exactly once and every cyclic move present.
pub fn is_valid_sequence(inst: &PvcInstance, seq: &[usize]) -> bool {
    if seq.len() != inst.n_steps() || seq.iter().any(|&u| u >= inst.n_nodes()) {
        return false;
    }
    let mut seen = vec![false; inst.n_groups()];
    for &u in seq {
        let g = inst.group_of(u);
        if seen[g] {
            return false;
        }
        seen[g] = true;
    }
    (0..seq.len()).all(|k| inst.distance(seq[k], seq[(k + 1) % seq.len()]).is_some())
}

/// Rotates a closed sequence so that it begins at its home node.
pub fn rotate_to_home(inst: &PvcInstance, seq: &[usize]) -> PvcTour {
    let start = seq.iter().position(|&u| inst.group_of(u) == 0).unwrap_or(0);
    let steps = seq[start..]
        .iter()
        .chain(&seq[..start])
        .map(|&u| inst.node(u))
        .collect();
    PvcTour { steps }
}

/// Full decode: `Ok(None)` for any bitstring that is not a valid tour.
pub fn decode(bits: &Assignment, idx: &PvcIndex, inst: &PvcInstance) -> Result<Option<PvcTour>> {
    let active = reverse_map(bits, idx)?;
    let Some(seq) = one_hot_sequence(&active) else {
        return Ok(None);
    };
    if !is_valid_sequence(inst, &seq) {
        return Ok(None);
    }
    Ok(Some(rotate_to_home(inst, &seq)))
}

/// One-hot encoding of a tour, step `k` holding `tour.steps[k]`.
pub fn encode(tour: &PvcTour, idx: &PvcIndex, inst: &PvcInstance) -> Result<Assignment> {
    if tour.len() != idx.n_steps() {
        return Err(Error::Dimension {
            expected: idx.n_steps(),
            got: tour.len(),
        });
    }
    let mut bits = vec![0u8; idx.len()];
    for (step, node) in tour.steps.iter().enumerate() {
        let u = inst
            .index_of(node)
            .ok_or_else(|| Error::Parameter(format!("node {node} not in instance")))?;
        bits[idx.var(step, u)] = 1;
    }
    Assignment::new(bits)
}

/// Sum of directed distances around the closed tour.
pub fn evaluate_tour(inst: &PvcInstance, tour: &PvcTour) -> Result<f64> {
    let n = tour.len();
    let mut total = 0.0;
    for k in 0..n {
        let (a, b) = (&tour.steps[k], &tour.steps[(k + 1) % n]);
        total += inst
            .edge(a, b)
            .ok_or_else(|| Error::Infeasible(format!("no edge {a} -> {b}")))?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::brute_force_optimum;

    /// Every closed tour of the instance: home first, then each ordering of
    /// seams with every endpoint/setting choice.
    pub(crate) fn all_tours(inst: &PvcInstance) -> Vec<Vec<usize>> {
        let groups: Vec<Vec<usize>> = (0..inst.n_groups())
            .map(|g| (0..inst.n_nodes()).filter(|&u| inst.group_of(u) == g).collect())
            .collect();
        let mut out = Vec::new();
        let mut order: Vec<usize> = (1..inst.n_groups()).collect();
        permute(&mut order, 0, &mut |perm| {
            let mut seqs: Vec<Vec<usize>> = groups[0].iter().map(|&h| vec![h]).collect();
            for &g in perm {
                seqs = seqs
                    .into_iter()
                    .flat_map(|s| {
                        groups[g].iter().map(move |&u| {
                            let mut t = s.clone();
                            t.push(u);
                            t
                        })
                    })
                    .collect();
            }
            out.extend(seqs.into_iter().filter(|s| is_valid_sequence(inst, s)));
        });
        out
    }

    fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, f);
            v.swap(k, i);
        }
    }

    fn seq_cost(inst: &PvcInstance, s: &[usize]) -> f64 {
        (0..s.len()).map(|k| inst.distance(s[k], s[(k + 1) % s.len()]).unwrap()).sum()
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(generate_instance(1, 2, 2, 7).unwrap(), generate_instance(1, 2, 2, 7).unwrap());
        assert_ne!(generate_instance(1, 2, 2, 7).unwrap(), generate_instance(1, 2, 2, 8).unwrap());
    }

    #[test]
    fn node_count_and_indexing() {
        let inst = generate_instance(2, 2, 2, 1).unwrap();
        assert_eq!(inst.n_nodes(), 20);
        let mut seen = std::collections::HashSet::new();
        for u in 0..inst.n_nodes() {
            let node = inst.node(u);
            assert_eq!(inst.index_of(&node), Some(u));
            seen.insert(node);
        }
        assert_eq!(seen.len(), 20);
        assert_eq!(seen.iter().filter(|n| n.is_home()).count(), 4);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(generate_instance(0, 2, 2, 1).is_err());
        assert!(generate_instance(1, 0, 2, 1).is_err());
        assert!(generate_instance(1, 2, 0, 1).is_err());
    }

    #[test]
    fn structure_of_generated_graph() {
        let inst = generate_instance(3, 2, 2, 4).unwrap();
        let n = inst.n_nodes();
        let mut asymmetric = false;
        for u in 0..n {
            for v in 0..n {
                let d = inst.distance(u, v);
                if inst.group_of(u) == inst.group_of(v) {
                    assert!(d.is_none());
                }
                if inst.group_of(u) == 0 && inst.group_of(v) != 0 {
                    assert!(d.is_some() && inst.distance(v, u).is_some());
                }
                if let Some(d) = d {
                    assert!((1.0..=100.0).contains(&d) && d.fract() == 0.0);
                    if inst.distance(v, u).is_some_and(|e| e != d) {
                        asymmetric = true;
                    }
                }
            }
        }
        assert!(asymmetric);
        let params = GeneratorParams {
            edge_fraction: 1.0,
            ..Default::default()
        };
        let full = generate_instance_with(3, 2, 2, 4, &params).unwrap();
        let expected: usize = (0..n)
            .map(|u| (0..n).filter(|&v| full.group_of(u) != full.group_of(v)).count())
            .sum();
        assert_eq!(full.n_edges(), expected);
        assert!(inst.n_edges() < expected);
    }

    #[test]
    fn reduce_keeps_low_seams() {
        let inst = generate_instance(3, 2, 1, 9).unwrap();
        assert_eq!(reduce_instance(&inst, 3).unwrap(), inst);
        let small = reduce_instance(&inst, 2).unwrap();
        assert_eq!(small.n_seams(), 2);
        for (u, v, d) in small.edges() {
            let (a, b) = (small.node(u), small.node(v));
            for node in [a, b] {
                if let Site::Seam { seam, .. } = node.site {
                    assert!(seam < 2);
                }
            }
            assert_eq!(inst.edge(&a, &b), Some(d));
        }
        assert!(reduce_instance(&inst, 4).is_err());
        let (q, _) = map_to_qubo(&small, 1.0).unwrap();
        assert_eq!(q.n_vars(), qubit_count(2, 2, 1));
    }

    #[test]
    fn qubit_counts() {
        assert_eq!(qubit_count(1, 2, 2), 24);
        assert_eq!(qubit_count(2, 2, 2), 60);
        assert_eq!(qubit_count(70, 4, 4), 160_176);
        for (s, c, t) in [(1, 2, 2), (2, 2, 2), (3, 1, 2)] {
            let inst = generate_instance(s, c, t, 0).unwrap();
            let (q, idx) = map_to_qubo(&inst, 5.0).unwrap();
            assert_eq!(q.n_vars(), qubit_count(s, c, t));
            assert_eq!(idx.len(), q.n_vars());
        }
        assert_eq!(PvcIndex::new(70, 4, 4).len(), 160_176);
    }

    #[test]
    fn lambda_must_be_positive() {
        let inst = generate_instance(1, 1, 1, 0).unwrap();
        assert!(map_to_qubo(&inst, 0.0).is_err());
        assert!(map_to_qubo(&inst, -1.0).is_err());
    }

    #[test]
    fn valid_tours_evaluate_to_their_length() {
        for seams in 1..=2 {
            for seed in 0..3 {
                let inst = generate_instance(seams, 2, 2, seed).unwrap();
                let (q, idx) = map_to_qubo(&inst, default_lambda(&inst)).unwrap();
                let tours = all_tours(&inst);
                assert!(!tours.is_empty());
                for s in tours {
                    let tour = rotate_to_home(&inst, &s);
                    let bits = encode(&tour, &idx, &inst).unwrap();
                    let e = q.evaluate(&bits).unwrap();
                    assert_eq!(e, seq_cost(&inst, &s));
                    assert_eq!(evaluate_tour(&inst, &tour).unwrap(), e);
                    assert_eq!(decode(&bits, &idx, &inst).unwrap(), Some(tour));
                }
            }
        }
    }

    #[test]
    fn decode_rejects_broken_encodings() {
        let inst = generate_instance(1, 2, 2, 3).unwrap();
        let idx = PvcIndex::for_instance(&inst);
        assert_eq!(decode(&Assignment::zeros(idx.len()), &idx, &inst).unwrap(), None);
        // two seam nodes, no home
        let mut bits = vec![0u8; idx.len()];
        bits[idx.var(0, 4)] = 1;
        bits[idx.var(1, 5)] = 1;
        assert_eq!(decode(&Assignment::new(bits).unwrap(), &idx, &inst).unwrap(), None);
        assert!(matches!(
            decode(&Assignment::zeros(3), &idx, &inst),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn smallest_tour_by_hand() {
        let home = PvcNode::home(0, 0);
        let a = PvcNode::seam(0, 1, 0, 0);
        let inst = PvcInstance::from_edges(1, 1, 1, [(home, a, 3.0), (a, home, 4.0)]).unwrap();
        let idx = PvcIndex::for_instance(&inst);
        // Steps: seam first, then home; decode rotates home to the front.
        let mut bits = vec![0u8; idx.len()];
        bits[idx.var(0, inst.index_of(&a).unwrap())] = 1;
        bits[idx.var(1, inst.index_of(&home).unwrap())] = 1;
        let tour = decode(&Assignment::new(bits).unwrap(), &idx, &inst).unwrap().unwrap();
        assert_eq!(tour.steps, vec![home, a]);
        assert_eq!(evaluate_tour(&inst, &tour).unwrap(), 7.0);
        let reversed = PvcTour { steps: vec![a, home] };
        assert_eq!(evaluate_tour(&inst, &reversed).unwrap(), 7.0);
    }

    #[test]
    fn asymmetric_weights_change_reverse_cost() {
        let home = PvcNode::home(0, 0);
        let a = PvcNode::seam(0, 0, 0, 0);
        let b = PvcNode::seam(1, 0, 0, 0);
        let inst = PvcInstance::from_edges(
            2,
            1,
            1,
            [(home, a, 3.0), (a, b, 4.0), (b, home, 1.0), (home, b, 10.0), (b, a, 2.0), (a, home, 8.0)],
        )
        .unwrap();
        let fwd = PvcTour { steps: vec![home, a, b] };
        let back = PvcTour { steps: vec![home, b, a] };
        assert_eq!(evaluate_tour(&inst, &fwd).unwrap(), 8.0);
        assert_eq!(evaluate_tour(&inst, &back).unwrap(), 20.0);
        let missing = PvcTour {
            steps: vec![home, PvcNode::seam(0, 1, 0, 0), b],
        };
        assert!(matches!(evaluate_tour(&inst, &missing), Err(Error::Infeasible(_))));
    }

    #[test]
    fn one_hot_violations_cost_at_least_lambda() {
        let inst = generate_instance(1, 2, 1, 5).unwrap();
        let lambda = 7.0;
        let (q, idx) = map_to_qubo(&inst, lambda).unwrap();
        let (dist_only, _) = {
            // distance part alone: lambda -> tiny, then subtract constraint terms explicitly
            let mut b = QuboBuilder::new(idx.len(), Sense::Minimize);
            for step in 0..idx.n_steps() {
                let next = (step + 1) % idx.n_steps();
                for u in 0..idx.n_nodes() {
                    for v in 0..idx.n_nodes() {
                        let w = inst.distance(u, v).unwrap_or(MISSING_EDGE_FACTOR * lambda);
                        b.add_quadratic(idx.var(step, u), idx.var(next, v), w).unwrap();
                    }
                }
            }
            (b.build().unwrap(), ())
        };
        for k in 0..(1usize << idx.len()) {
            let a = Assignment::from_basis_index(idx.len(), k);
            let active = reverse_map(&a, &idx).unwrap();
            let penalty = q.evaluate(&a).unwrap() - dist_only.evaluate(&a).unwrap();
            let groups_ok = (0..inst.n_groups()).all(|g| {
                active.iter().flatten().filter(|&&u| inst.group_of(u) == g).count() == 1
            });
            if one_hot_sequence(&active).is_some() && groups_ok {
                assert_eq!(penalty, 0.0);
            } else {
                assert!(penalty >= lambda);
            }
        }
    }

    #[test]
    fn brute_force_optimum_is_best_tour() {
        for seed in 0..3 {
            let inst = generate_instance(1, 2, 2, seed).unwrap();
            let (q, idx) = map_to_qubo(&inst, 2.0 * inst.max_edge()).unwrap();
            let (bits, e) = brute_force_optimum(&q).unwrap();
            let tour = decode(&bits, &idx, &inst).unwrap().expect("optimum decodes");
            let best = all_tours(&inst)
                .iter()
                .map(|s| seq_cost(&inst, s))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(evaluate_tour(&inst, &tour).unwrap(), best);
            assert_eq!(e, best);
        }
    }

    #[test]
    fn json_round_trip() {
        let inst = generate_instance(2, 2, 1, 12).unwrap();
        let back = PvcInstance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);
        assert!(PvcInstance::from_json("{").is_err());
    }
}
