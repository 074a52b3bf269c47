//! Expansion of a configuration into the ordered list of benchmark cells.

use serde::{Deserialize, Serialize};

use qbench_core::rng::mix64;

use crate::config::{ApplicationKind, BenchConfig, MappingKind, SolverKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub index: usize,
    pub application: usize,
    pub size: usize,
    pub instance_seed: u64,
    pub mapping: usize,
    pub solver: usize,
    pub device: usize,
    pub repetition: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub cells: Vec<Cell>,
    pub warnings: Vec<String>,
}

/// Whether an application can be expressed with a mapping.
pub fn mapping_supports(app: ApplicationKind, mapping: MappingKind) -> bool {
    match mapping {
        MappingKind::Direct => true,
        MappingKind::Qubo => matches!(app, ApplicationKind::Tsp | ApplicationKind::Pvc),
        MappingKind::Dinneen | MappingKind::Choi => app == ApplicationKind::Maxsat,
    }
}

/// Whether a solver can consume the output of a mapping for an application.
pub fn solver_supports(app: ApplicationKind, mapping: MappingKind, solver: SolverKind) -> bool {
    match solver {
        SolverKind::Greedy | SolverKind::ReverseGreedy => {
            mapping == MappingKind::Direct && app != ApplicationKind::Maxsat
        }
        SolverKind::Random => mapping == MappingKind::Direct,
        SolverKind::Exact => mapping == MappingKind::Direct && app == ApplicationKind::Maxsat,
        SolverKind::BruteForce | SolverKind::Sa | SolverKind::Qaoa => mapping != MappingKind::Direct,
    }
}

/// FNV-1a over the cell's coordinates (labels rather than positions, so
/// adding an entry elsewhere in the config does not change existing seeds).
pub fn cell_seed(run_seed: u64, coordinates: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in coordinates {
        for b in part.bytes().chain([0x1f]) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    mix64(h ^ mix64(run_seed))
}

/// Cells in application, size, instance seed, mapping, solver, device and
/// repetition order. Combinations a solver or mapping cannot handle are
/// skipped with a warning.
pub fn build_plan(cfg: &BenchConfig) -> Plan {
    let mut plan = Plan::default();
    if cfg.solvers.is_empty() {
        plan.warnings.push("no solvers configured; plan is empty".into());
    }
    if cfg.applications.is_empty() {
        plan.warnings.push("no applications configured; plan is empty".into());
    }
    if cfg.mappings.is_empty() {
        plan.warnings.push("no mappings configured; plan is empty".into());
    }
    for (ai, app) in cfg.applications.iter().enumerate() {
        for m in &cfg.mappings {
            if !mapping_supports(app.name, m.name) {
                plan.warnings.push(format!(
                    "skipping mapping `{}` for application `{}`: unsupported",
                    m.label(),
                    app.label()
                ));
                continue;
            }
            for s in &cfg.solvers {
                if !solver_supports(app.name, m.name, s.kind()) {
                    plan.warnings.push(format!(
                        "skipping solver `{}` with mapping `{}` for application `{}`: unsupported",
                        s.label(),
                        m.label(),
                        app.label()
                    ));
                }
            }
        }
        for &size in &app.sizes {
            for &instance_seed in &app.seeds {
                for (mi, m) in cfg.mappings.iter().enumerate() {
                    if !mapping_supports(app.name, m.name) {
                        continue;
                    }
                    for (si, s) in cfg.solvers.iter().enumerate() {
                        if !solver_supports(app.name, m.name, s.kind()) {
                            continue;
                        }
                        for (di, d) in cfg.devices.iter().enumerate() {
                            for repetition in 0..cfg.repetitions {
                                let coords = [
                                    app.label(),
                                    size.to_string(),
                                    instance_seed.to_string(),
                                    m.label(),
                                    s.label(),
                                    d.name.clone(),
                                    d.stream.to_string(),
                                    repetition.to_string(),
                                ];
                                let refs: Vec<&str> = coords.iter().map(String::as_str).collect();
                                plan.cells.push(Cell {
                                    index: plan.cells.len(),
                                    application: ai,
                                    size,
                                    instance_seed,
                                    mapping: mi,
                                    solver: si,
                                    device: di,
                                    repetition,
                                    seed: cell_seed(cfg.run_seed, &refs),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    plan
}
