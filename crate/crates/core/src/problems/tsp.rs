//! Symmetric travelling salesperson instances, TSPLIB I/O and the
//! time-indexed QUBO with `n^2` variables.

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::qubo::{Assignment, QuboBuilder, Sense};
use crate::rng::seeded_rng;
use crate::Qubo;

use super::pvc::add_one_hot;

#[derive(Clone, Debug, PartialEq)]
pub struct TspInstance {
    n_nodes: usize,
    dist: Vec<f64>,
    source_name: String,
    coords: Option<Vec<(f64, f64)>>,
}

/// TSPLIB `nint` of the Euclidean distance.
pub fn euc_2d(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (a.0 - b.0, a.1 - b.1);
    ((dx * dx + dy * dy).sqrt() + 0.5).floor()
}

impl TspInstance {
    pub fn from_matrix(name: impl Into<String>, n_nodes: usize, dist: Vec<f64>) -> Result<Self> {
        if dist.len() != n_nodes * n_nodes {
            return Err(Error::Dimension {
                expected: n_nodes * n_nodes,
                got: dist.len(),
            });
        }
        for i in 0..n_nodes {
            if dist[i * n_nodes + i] != 0.0 {
                return Err(Error::Parameter(format!("nonzero diagonal at node {i}")));
            }
            for j in 0..n_nodes {
                let d = dist[i * n_nodes + j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::Parameter(format!("distance {d} between {i} and {j}")));
                }
                if d != dist[j * n_nodes + i] {
                    return Err(Error::Parameter(format!("asymmetric distance between {i} and {j}")));
                }
            }
        }
        Ok(Self {
            n_nodes,
            dist,
            source_name: name.into(),
            coords: None,
        })
    }

    /// EUC_2D instance from coordinates.
    pub fn from_coords(name: impl Into<String>, coords: Vec<(f64, f64)>) -> Result<Self> {
        if let Some(k) = coords.iter().position(|c| !(c.0.is_finite() && c.1.is_finite())) {
            return Err(Error::Parameter(format!("coordinate {k} is not finite")));
        }
        let n = coords.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    dist[i * n + j] = euc_2d(coords[i], coords[j]);
                }
            }
        }
        Ok(Self {
            n_nodes: n,
            dist,
            source_name: name.into(),
            coords: Some(coords),
        })
    }

    /// Seeded instance with integer coordinates uniform in `[0, 1000)^2`.
    pub fn random_euclidean(n_nodes: usize, seed: u64) -> Result<Self> {
        let mut rng = seeded_rng(seed);
        let coords = (0..n_nodes)
            .map(|_| (f64::from(rng.gen_range(0..1000)), f64::from(rng.gen_range(0..1000))))
            .collect();
        Self::from_coords(format!("random{n_nodes}-{seed}"), coords)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn source_name(&self) -> &str {
        &self.source_name
    }

    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n_nodes + j]
    }

    /// Mean over ordered pairs of distinct nodes.
    pub fn mean_edge_weight(&self) -> f64 {
        let n = self.n_nodes;
        if n < 2 {
            return 0.0;
        }
        self.dist.iter().sum::<f64>() / (n * (n - 1)) as f64
    }
}

/// Parses the EUC_2D and EXPLICIT/FULL_MATRIX subset of TSPLIB.
pub fn parse_tsplib(text: &str) -> Result<TspInstance> {
    let mut name = String::from("unnamed");
    let mut dimension: Option<usize> = None;
    let mut weight_type: Option<String> = None;
    let mut weight_format: Option<String> = None;
    let mut coords: Vec<(f64, f64)> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();

    #[derive(PartialEq)]
    enum Section {
        Header,
        Coords,
        Weights,
        Skip,
    }
    let mut section = Section::Header;

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        if let Some((key, value)) = line.split_once(':') {
            let key = key.trim();
            if key.chars().all(|c| c.is_ascii_uppercase() || c == '_') {
                let value = value.trim();
                section = Section::Header;
                match key {
                    "NAME" => name = value.to_string(),
                    "TYPE" => {
                        if value != "TSP" {
                            return Err(Error::Format(format!("unsupported TYPE {value}")));
                        }
                    }
                    "DIMENSION" => {
                        dimension = Some(
                            value
                                .parse()
                                .map_err(|_| Error::parse(line_no, format!("bad DIMENSION {value}")))?,
                        )
                    }
                    "EDGE_WEIGHT_TYPE" => weight_type = Some(value.to_string()),
                    "EDGE_WEIGHT_FORMAT" => weight_format = Some(value.to_string()),
                    _ => {}
                }
                continue;
            }
        }
        match line {
            "NODE_COORD_SECTION" => {
                section = Section::Coords;
                continue;
            }
            "EDGE_WEIGHT_SECTION" => {
                section = Section::Weights;
                continue;
            }
            l if l.ends_with("_SECTION") => {
                section = Section::Skip;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Coords => {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(Error::parse(line_no, "coordinate line needs id, x, y"));
                }
                let id: usize = parts[0]
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad node id {}", parts[0])))?;
                if id != coords.len() + 1 {
                    return Err(Error::parse(line_no, format!("node id {id} out of order")));
                }
                let x: f64 = parts[1]
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad x {}", parts[1])))?;
                let y: f64 = parts[2]
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad y {}", parts[2])))?;
                if !(x.is_finite() && y.is_finite()) {
                    return Err(Error::parse(line_no, "non-finite coordinate"));
                }
                coords.push((x, y));
            }
            Section::Weights => {
                for tok in line.split_whitespace() {
                    weights.push(
                        tok.parse()
                            .map_err(|_| Error::parse(line_no, format!("bad weight {tok}")))?,
                    );
                }
            }
            Section::Skip => {}
            Section::Header => {
                return Err(Error::parse(line_no, format!("unexpected line '{line}'")));
            }
        }
    }

    let n = dimension.ok_or_else(|| Error::Format("missing DIMENSION".into()))?;
    match weight_type.as_deref() {
        Some("EUC_2D") => {
            if coords.len() != n {
                return Err(Error::Format(format!(
                    "DIMENSION {n} but {} coordinates",
                    coords.len()
                )));
            }
            TspInstance::from_coords(name, coords)
        }
        Some("EXPLICIT") => {
            if weight_format.as_deref() != Some("FULL_MATRIX") {
                return Err(Error::Format(format!(
                    "unsupported EDGE_WEIGHT_FORMAT {:?}",
                    weight_format
                )));
            }
            if weights.len() != n * n {
                return Err(Error::Format(format!(
                    "DIMENSION {n} needs {} weights, found {}",
                    n * n,
                    weights.len()
                )));
            }
            TspInstance::from_matrix(name, n, weights)
        }
        Some(other) => Err(Error::Format(format!("unsupported EDGE_WEIGHT_TYPE {other}"))),
        None => Err(Error::Format("missing EDGE_WEIGHT_TYPE".into())),
    }
}

/// Writes EUC_2D when coordinates are known, otherwise an explicit matrix.
pub fn write_tsplib(inst: &TspInstance) -> String {
    let mut out = String::new();
    let n = inst.n_nodes;
    writeln!(out, "NAME : {}", inst.source_name).unwrap();
    writeln!(out, "TYPE : TSP").unwrap();
    writeln!(out, "DIMENSION : {n}").unwrap();
    match &inst.coords {
        Some(coords) => {
            writeln!(out, "EDGE_WEIGHT_TYPE : EUC_2D").unwrap();
            writeln!(out, "NODE_COORD_SECTION").unwrap();
            for (k, (x, y)) in coords.iter().enumerate() {
                writeln!(out, "{} {x} {y}", k + 1).unwrap();
            }
        }
        None => {
            writeln!(out, "EDGE_WEIGHT_TYPE : EXPLICIT").unwrap();
            writeln!(out, "EDGE_WEIGHT_FORMAT : FULL_MATRIX").unwrap();
            writeln!(out, "EDGE_WEIGHT_SECTION").unwrap();
            for i in 0..n {
                let row: Vec<String> = (0..n).map(|j| inst.distance(i, j).to_string()).collect();
                writeln!(out, "{}", row.join(" ")).unwrap();
            }
        }
    }
    writeln!(out, "EOF").unwrap();
    out
}

/// Keeps the first `target_n` nodes in file order.
pub fn reduce_nodes(inst: &TspInstance, target_n: usize) -> Result<TspInstance> {
    if target_n < 3 {
        return Err(Error::Parameter(format!("TSP needs at least 3 nodes, got {target_n}")));
    }
    if target_n > inst.n_nodes {
        return Err(Error::Parameter(format!(
            "cannot reduce {} nodes to {target_n}",
            inst.n_nodes
        )));
    }
    let mut dist = Vec::with_capacity(target_n * target_n);
    for i in 0..target_n {
        for j in 0..target_n {
            dist.push(inst.distance(i, j));
        }
    }
    Ok(TspInstance {
        n_nodes: target_n,
        dist,
        source_name: inst.source_name.clone(),
        coords: inst.coords.as_ref().map(|c| c[..target_n].to_vec()),
    })
}

/// `x_{v,t}` lives at `v * n + t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TspIndex {
    n: usize,
}

impl TspIndex {
    pub fn new(n_nodes: usize) -> Self {
        Self { n: n_nodes }
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn var(&self, node: usize, step: usize) -> usize {
        node * self.n + step
    }

    pub fn node_step(&self, var: usize) -> (usize, usize) {
        (var / self.n, var % self.n)
    }
}

/// Twice an average-tour-length estimate, `2 n mean_edge`.
pub fn default_lambda(inst: &TspInstance) -> f64 {
    2.0 * inst.n_nodes as f64 * inst.mean_edge_weight()
}

pub fn map_to_qubo(inst: &TspInstance, lambda: f64) -> Result<(Qubo, TspIndex)> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Parameter(format!("lambda must be positive, got {lambda}")));
    }
    let n = inst.n_nodes;
    let idx = TspIndex::new(n);
    let mut b = QuboBuilder::new(idx.len(), Sense::Minimize);
    for t in 0..n {
        let next = (t + 1) % n;
        for u in 0..n {
            for v in 0..n {
                let d = inst.distance(u, v);
                if u != v && d != 0.0 {
                    b.add_quadratic(idx.var(u, t), idx.var(v, next), d)?;
                }
            }
        }
    }
    for t in 0..n {
        let vars: Vec<usize> = (0..n).map(|v| idx.var(v, t)).collect();
        add_one_hot(&mut b, &vars, lambda)?;
    }
    for v in 0..n {
        let vars: Vec<usize> = (0..n).map(|t| idx.var(v, t)).collect();
        add_one_hot(&mut b, &vars, lambda)?;
    }
    Ok((b.build()?, idx))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TspTour {
    pub order: Vec<usize>,
}

impl TspTour {
    pub fn is_permutation_of(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        self.order.len() == n
            && self.order.iter().all(|&v| v < n && !std::mem::replace(&mut seen[v], true))
    }
}

/// Active nodes per time step.
pub fn reverse_map(bits: &Assignment, idx: &TspIndex) -> Result<Vec<Vec<usize>>> {
    if bits.len() != idx.len() {
        return Err(Error::Dimension {
            expected: idx.len(),
            got: bits.len(),
        });
    }
    let n = idx.n_nodes();
    Ok((0..n)
        .map(|t| (0..n).filter(|&v| bits.get(idx.var(v, t))).collect())
        .collect())
}

/// Tour when both one-hot families hold.
pub fn decode(bits: &Assignment, idx: &TspIndex) -> Result<Option<TspTour>> {
    let active = reverse_map(bits, idx)?;
    let order: Option<Vec<usize>> = active
        .iter()
        .map(|nodes| (nodes.len() == 1).then(|| nodes[0]))
        .collect();
    Ok(order
        .map(|order| TspTour { order })
        .filter(|t| t.is_permutation_of(idx.n_nodes())))
}

pub fn encode(tour: &TspTour, idx: &TspIndex) -> Result<Assignment> {
    if !tour.is_permutation_of(idx.n_nodes()) {
        return Err(Error::Parameter("tour is not a permutation".into()));
    }
    let mut bits = vec![0u8; idx.len()];
    for (t, &v) in tour.order.iter().enumerate() {
        bits[idx.var(v, t)] = 1;
    }
    Assignment::new(bits)
}

pub fn evaluate_tour(inst: &TspInstance, tour: &TspTour) -> Result<f64> {
    if !tour.is_permutation_of(inst.n_nodes) {
        return Err(Error::Infeasible("tour is not a permutation of the nodes".into()));
    }
    let n = tour.order.len();
    Ok((0..n)
        .map(|t| inst.distance(tour.order[t], tour.order[(t + 1) % n]))
        .sum())
}
