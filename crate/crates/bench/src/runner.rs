//! Execution of benchmark cells: map, solve, reverse-map, post-process,
//! validate and evaluate, each stage timed on a monotonic clock.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use qbench_core::problems::maxsat::choi::{map_to_qubo_choi, ChoiIndex, ChoiPenalties};
use qbench_core::problems::maxsat::dinneen::{map_to_qubo_dinneen, DinneenIndex};
use qbench_core::problems::maxsat::{self, generate_random, parse_wcnf, MaxSatInstance, VehicleConfig};
use qbench_core::problems::pvc::{self, PvcIndex, PvcInstance};
use qbench_core::problems::tsp::{self, TspIndex, TspInstance, TspTour};
use qbench_core::qaoa::{self, QaoaParams, QaoaState, Simulator};
use qbench_core::qubo::{brute_force_optimum, exact_optimum, qubo_to_ising, SearchLimits};
use qbench_core::rng::seeded_rng;
use qbench_core::solvers::{
    exact_maxsat, greedy_path, random_path, reverse_greedy_path, simulated_annealing, ExactBudget, MaxSatOptimum,
    SaParams,
};
use qbench_core::{Assignment, Error, Qubo};

use crate::config::{ApplicationKind, ApplicationSpec, BenchConfig, MappingKind, MappingSpec, SolverKind, SolverSpec};
use crate::plan::{build_plan, Cell};
use crate::records::BenchmarkRecord;

pub const FRAMEWORK: &str = "qbench";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub enum Instance {
    Tsp(TspInstance),
    Pvc(PvcInstance),
    MaxSat(MaxSatInstance),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceInfo {
    pub application: String,
    pub size: usize,
    pub seed: u64,
    pub provenance: Value,
}

pub fn build_instance(app: &ApplicationSpec, size: usize, seed: u64) -> Result<(Instance, Value), String> {
    let read = |path: &std::path::Path| {
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
    };
    let err = |e: Error| e.to_string();
    match app.name {
        ApplicationKind::Tsp => {
            let inst = match &app.file {
                Some(path) => {
                    let full = tsp::parse_tsplib(&read(path)?).map_err(err)?;
                    tsp::reduce_nodes(&full, size).map_err(err)?
                }
                None => TspInstance::random_euclidean(size, seed).map_err(err)?,
            };
            let prov = match &app.file {
                Some(p) => json!({ "file": p, "nodes": size }),
                None => json!({ "generator": "random_euclidean", "nodes": size, "seed": seed }),
            };
            Ok((Instance::Tsp(inst), prov))
        }
        ApplicationKind::Pvc => {
            let (c, t) = (app.configs.unwrap_or(2), app.tools.unwrap_or(2));
            let inst = match &app.file {
                Some(path) => {
                    let full = PvcInstance::from_json(&read(path)?).map_err(err)?;
                    pvc::reduce_instance(&full, size).map_err(err)?
                }
                None => pvc::generate_instance(size, c, t, seed).map_err(err)?,
            };
            let prov = json!({
                "n_seams": inst.n_seams(),
                "n_configs": inst.n_configs(),
                "n_tools": inst.n_tools(),
                "seed": inst.seed(),
                "file": app.file,
            });
            Ok((Instance::Pvc(inst), prov))
        }
        ApplicationKind::Maxsat => match &app.file {
            Some(path) => {
                let inst = parse_wcnf(&read(path)?).map_err(err)?;
                if inst.n_vars() != size {
                    return Err(format!("{} has {} variables, size is {size}", path.display(), inst.n_vars()));
                }
                Ok((Instance::MaxSat(inst), json!({ "file": path })))
            }
            None => {
                let (inst, prov) = generate_random(size, seed).map_err(err)?;
                Ok((Instance::MaxSat(inst), serde_json::to_value(prov).expect("provenance serializes")))
            }
        },
    }
}

enum Mapped {
    Direct,
    Tsp(Qubo, TspIndex),
    Pvc(Qubo, PvcIndex),
    Dinneen(Qubo, DinneenIndex),
    Choi(Qubo, ChoiIndex),
}

impl Mapped {
    fn qubo(&self) -> Option<&Qubo> {
        match self {
            Mapped::Direct => None,
            Mapped::Tsp(q, _) | Mapped::Pvc(q, _) | Mapped::Dinneen(q, _) | Mapped::Choi(q, _) => Some(q),
        }
    }
}

fn map(inst: &Instance, m: &MappingSpec) -> Result<Mapped, Error> {
    Ok(match (inst, m.name) {
        (_, MappingKind::Direct) => Mapped::Direct,
        (Instance::Tsp(t), MappingKind::Qubo) => {
            let (q, idx) = tsp::map_to_qubo(t, m.lambda.unwrap_or_else(|| tsp::default_lambda(t)))?;
            Mapped::Tsp(q, idx)
        }
        (Instance::Pvc(p), MappingKind::Qubo) => {
            let (q, idx) = pvc::map_to_qubo(p, m.lambda.unwrap_or_else(|| pvc::default_lambda(p)))?;
            Mapped::Pvc(q, idx)
        }
        (Instance::MaxSat(s), MappingKind::Dinneen) => {
            let (q, idx) = map_to_qubo_dinneen(s, m.lambda.unwrap_or_else(|| s.default_lambda()))?;
            Mapped::Dinneen(q, idx)
        }
        (Instance::MaxSat(s), MappingKind::Choi) => {
            let pen = ChoiPenalties {
                hard_weight: m.lambda,
                ..Default::default()
            };
            let (q, idx) = map_to_qubo_choi(s, &pen)?;
            Mapped::Choi(q, idx)
        }
        _ => return Err(Error::Parameter(format!("mapping {} does not apply", m.name))),
    })
}

enum Raw {
    Bits(Assignment),
    Sequence(Vec<usize>),
    Config(VehicleConfig),
}

struct Solved {
    raw: Raw,
    meta: Map<String, Value>,
    qaoa: Option<(QaoaState, usize, u64)>,
    trace: Option<Vec<f64>>,
}

/// Application-level solution before post-processing.
enum Decoded {
    Sequence(Option<Vec<usize>>),
    Config(VehicleConfig),
}

fn sa_params(s: &SolverSpec, seed: u64) -> SaParams {
    let d = SaParams::default();
    SaParams {
        n_reads: s.reads.unwrap_or(d.n_reads),
        n_sweeps: s.sweeps.unwrap_or(d.n_sweeps),
        beta_hot: s.beta_hot.unwrap_or(d.beta_hot),
        beta_cold: s.beta_cold.unwrap_or(d.beta_cold),
        seed,
    }
}

fn qaoa_params(s: &SolverSpec, seed: u64) -> QaoaParams {
    let d = QaoaParams::seeded(s.layers.unwrap_or(1), seed);
    QaoaParams {
        n_iterations: s.iterations.unwrap_or(d.n_iterations),
        stepsize: s.stepsize.unwrap_or(d.stepsize),
        momentum: s.momentum.unwrap_or(d.momentum),
        n_samples: s.samples.unwrap_or(d.n_samples),
        ..d
    }
}

fn solve(inst: &Instance, mapped: &Mapped, s: &SolverSpec, seed: u64) -> Result<Solved, Error> {
    let mut meta = Map::new();
    let done = |raw, meta| -> Result<Solved, Error> {
        Ok(Solved {
            raw,
            meta,
            qaoa: None,
            trace: None,
        })
    };
    match (s.kind(), inst, mapped.qubo()) {
        (SolverKind::Greedy | SolverKind::ReverseGreedy | SolverKind::Random, Instance::Tsp(t), None) => {
            let r = match s.kind() {
                SolverKind::Greedy => greedy_path(t)?,
                SolverKind::ReverseGreedy => reverse_greedy_path(t)?,
                _ => random_path(t, seed)?,
            };
            meta.insert("length".into(), json!(r.length));
            done(Raw::Sequence(r.sequence), meta)
        }
        (SolverKind::Greedy | SolverKind::ReverseGreedy | SolverKind::Random, Instance::Pvc(p), None) => {
            let r = match s.kind() {
                SolverKind::Greedy => greedy_path(p)?,
                SolverKind::ReverseGreedy => reverse_greedy_path(p)?,
                _ => random_path(p, seed)?,
            };
            meta.insert("length".into(), json!(r.length));
            done(Raw::Sequence(r.sequence), meta)
        }
        (SolverKind::Random, Instance::MaxSat(m), None) => {
            let mut rng = seeded_rng(seed);
            let bits = (0..m.n_vars()).map(|_| u8::from(rng.gen::<bool>())).collect();
            done(Raw::Config(VehicleConfig::new(bits)?), meta)
        }
        (SolverKind::Exact, Instance::MaxSat(m), None) => {
            let d = ExactBudget::default();
            let budget = ExactBudget {
                max_vars: s.max_vars.unwrap_or(d.max_vars),
                max_nodes: s.max_nodes,
                time_limit: s.time_limit_s.map(Duration::from_secs_f64),
            };
            let r = exact_maxsat(m, &budget)?;
            meta.insert("nodes".into(), json!(r.nodes));
            match r.optimum {
                MaxSatOptimum::Optimal { config, weight } => {
                    meta.insert("soft_weight".into(), json!(weight));
                    done(Raw::Config(config), meta)
                }
                MaxSatOptimum::Unsat => Err(Error::Infeasible("hard clauses are jointly unsatisfiable".into())),
            }
        }
        (SolverKind::BruteForce, _, Some(q)) => {
            let (bits, e, method) = match brute_force_optimum(q) {
                Ok((b, e)) => (b, e, "enumeration"),
                Err(Error::Capacity { .. }) => {
                    let limits = SearchLimits {
                        max_nodes: s.max_nodes.unwrap_or(SearchLimits::default().max_nodes),
                    };
                    let (b, e) = exact_optimum(q, limits)?;
                    (b, e, "branch_and_bound")
                }
                Err(e) => return Err(e),
            };
            meta.insert("method".into(), json!(method));
            meta.insert("energy".into(), json!(e));
            meta.insert("n_vars".into(), json!(q.n_vars()));
            done(Raw::Bits(bits), meta)
        }
        (SolverKind::Sa, _, Some(q)) => {
            let p = sa_params(s, seed);
            let out = simulated_annealing(q, &p)?;
            let mean = out.per_read_energies.iter().sum::<f64>() / out.per_read_energies.len() as f64;
            meta.insert("reads".into(), json!(p.n_reads));
            meta.insert("sweeps".into(), json!(p.n_sweeps));
            meta.insert("best_energy".into(), json!(out.best_energy));
            meta.insert("mean_read_energy".into(), json!(mean));
            meta.insert("n_vars".into(), json!(q.n_vars()));
            done(Raw::Bits(out.best_assignment), meta)
        }
        (SolverKind::Qaoa, _, Some(q)) => {
            let ising = qubo_to_ising(&q.to_minimization());
            let sim = Simulator::new(&ising)?;
            let p = qaoa_params(s, seed);
            let run = qaoa::optimize(&ising, &p)?;
            let state = sim.run(&run.params.gammas, &run.params.betas)?;
            let samples = qaoa::sample_basis_states(&state.probabilities(), p.n_samples, seed);
            let x = qaoa::mode(&samples).ok_or_else(|| Error::Parameter("QAOA needs at least one sample".into()))?;
            meta.insert("layers".into(), json!(p.p()));
            meta.insert("iterations".into(), json!(p.n_iterations));
            meta.insert("final_expectation".into(), json!(run.final_expectation));
            meta.insert("n_qubits".into(), json!(q.n_vars()));
            Ok(Solved {
                raw: Raw::Bits(Assignment::from_basis_index(q.n_vars(), x)),
                meta,
                qaoa: Some((state, p.n_samples, seed)),
                trace: Some(run.trace),
            })
        }
        (kind, _, _) => Err(Error::Parameter(format!("solver {kind} does not apply to this mapping"))),
    }
}

fn reverse_map(mapped: &Mapped, raw: &Raw) -> Result<Decoded, Error> {
    Ok(match (mapped, raw) {
        (Mapped::Direct, Raw::Sequence(s)) => Decoded::Sequence(Some(s.clone())),
        (Mapped::Direct, Raw::Config(v)) => Decoded::Config(v.clone()),
        (Mapped::Tsp(_, idx), Raw::Bits(b)) => {
            Decoded::Sequence(pvc::one_hot_sequence(&tsp::reverse_map(b, idx)?))
        }
        (Mapped::Pvc(_, idx), Raw::Bits(b)) => Decoded::Sequence(pvc::one_hot_sequence(&pvc::reverse_map(b, idx)?)),
        (Mapped::Dinneen(_, idx), Raw::Bits(b)) => Decoded::Config(idx.decode(b)?),
        (Mapped::Choi(_, idx), Raw::Bits(b)) => Decoded::Config(idx.decode(b)?),
        _ => return Err(Error::Parameter("solver output does not match the mapping".into())),
    })
}

/// Rotates tours to begin at the start node (TSP node 0, robot home).
fn process(inst: &Instance, d: Decoded) -> Decoded {
    match (inst, d) {
        (Instance::Tsp(_), Decoded::Sequence(Some(mut s))) => {
            if let Some(k) = s.iter().position(|&v| v == 0) {
                s.rotate_left(k);
            }
            Decoded::Sequence(Some(s))
        }
        (Instance::Pvc(p), Decoded::Sequence(Some(mut s))) => {
            if let Some(k) = s.iter().position(|&u| p.group_of(u) == 0) {
                s.rotate_left(k);
            }
            Decoded::Sequence(Some(s))
        }
        (_, d) => d,
    }
}

fn validate(inst: &Instance, d: &Decoded) -> Result<bool, Error> {
    Ok(match (inst, d) {
        (_, Decoded::Sequence(None)) => false,
        (Instance::Tsp(t), Decoded::Sequence(Some(s))) => {
            TspTour { order: s.clone() }.is_permutation_of(t.n_nodes()) && s[0] == 0
        }
        (Instance::Pvc(p), Decoded::Sequence(Some(s))) => pvc::is_valid_sequence(p, s) && p.group_of(s[0]) == 0,
        (Instance::MaxSat(m), Decoded::Config(v)) => maxsat::validate(m, v)?,
        _ => false,
    })
}

/// Tour length, or satisfied share of soft weight.
fn evaluate(inst: &Instance, d: &Decoded) -> Result<f64, Error> {
    match (inst, d) {
        (Instance::Tsp(t), Decoded::Sequence(Some(s))) => tsp::evaluate_tour(t, &TspTour { order: s.clone() }),
        (Instance::Pvc(p), Decoded::Sequence(Some(s))) => pvc::evaluate_tour(p, &pvc::rotate_to_home(p, s)),
        (Instance::MaxSat(m), Decoded::Config(v)) => maxsat::quality(m, v),
        _ => Err(Error::Infeasible("no solution to evaluate".into())),
    }
}

/// Validity and quality of QAOA's output distribution.
fn qaoa_metrics(inst: &Instance, mapped: &Mapped, state: &QaoaState, n_samples: usize, seed: u64) -> Value {
    let n = state.n_qubits();
    let cost = |x: usize| {
        let raw = Raw::Bits(Assignment::from_basis_index(n, x));
        let d = process(inst, reverse_map(mapped, &raw).ok()?);
        validate(inst, &d).ok()?.then(|| evaluate(inst, &d).ok()).flatten()
    };
    let m = qaoa::measure_metrics(state, cost, n_samples, seed);
    json!({ "validity": m.validity, "quality": m.quality })
}

const STAGES: [&str; 6] = ["mapping", "solver", "reverse_map", "process_solution", "validation", "evaluation"];

struct Clock {
    start: Instant,
    last: Instant,
    laps: [f64; 6],
}

impl Clock {
    fn start() -> Self {
        let now = Instant::now();
        Self {
            start: now,
            last: now,
            laps: [0.0; 6],
        }
    }

    /// Closes stage `k`; consecutive checkpoints make the laps sum to the total.
    fn lap(&mut self, k: usize) {
        let now = Instant::now();
        self.laps[k] = (now - self.last).as_secs_f64() * 1e3;
        self.last = now;
    }

    fn total(&self) -> f64 {
        (self.last - self.start).as_secs_f64() * 1e3
    }
}

struct Pipeline {
    validity: bool,
    quality: Option<f64>,
    meta: Map<String, Value>,
    trace: Option<Vec<f64>>,
    error: String,
}

fn pipeline(inst: &Instance, m: &MappingSpec, s: &SolverSpec, seed: u64, pool: &rayon::ThreadPool, clock: &mut Clock) -> Pipeline {
    let mut out = Pipeline {
        validity: false,
        quality: None,
        meta: Map::new(),
        trace: None,
        error: String::new(),
    };
    let fail = |out: &mut Pipeline, stage: usize, e: Error| {
        out.error = format!("{}: {e}", STAGES[stage]);
    };
    let mapped = match map(inst, m) {
        Ok(x) => x,
        Err(e) => {
            clock.lap(0);
            fail(&mut out, 0, e);
            return out;
        }
    };
    clock.lap(0);
    let solved = pool.install(|| solve(inst, &mapped, s, seed));
    clock.lap(1);
    let solved = match solved {
        Ok(x) => x,
        Err(e) => {
            fail(&mut out, 1, e);
            return out;
        }
    };
    out.meta = solved.meta;
    out.trace = solved.trace;
    let decoded = reverse_map(&mapped, &solved.raw);
    clock.lap(2);
    let decoded = match decoded {
        Ok(x) => x,
        Err(e) => {
            fail(&mut out, 2, e);
            return out;
        }
    };
    let decoded = process(inst, decoded);
    clock.lap(3);
    let valid = validate(inst, &decoded);
    clock.lap(4);
    out.validity = match valid {
        Ok(v) => v,
        Err(e) => {
            fail(&mut out, 4, e);
            return out;
        }
    };
    let quality = if out.validity { Some(evaluate(inst, &decoded)) } else { None };
    if let Some((state, n_samples, seed)) = &solved.qaoa {
        out.meta.insert("distribution".into(), qaoa_metrics(inst, &mapped, state, *n_samples, *seed));
    }
    clock.lap(5);
    match quality {
        Some(Ok(q)) => out.quality = Some(q),
        Some(Err(e)) => {
            out.validity = false;
            fail(&mut out, 5, e);
        }
        None => {}
    }
    out
}

pub struct CellResult {
    pub record: BenchmarkRecord,
    pub trace: Option<Vec<f64>>,
}

pub struct RunContext<'a> {
    pub cfg: &'a BenchConfig,
    pub run_id: String,
    instances: BTreeMap<(usize, usize, u64), Result<Instance, String>>,
    pub instance_info: Vec<InstanceInfo>,
    pools: Vec<rayon::ThreadPool>,
}

impl<'a> RunContext<'a> {
    pub fn new(cfg: &'a BenchConfig, cells: &[Cell], run_id: String) -> anyhow::Result<Self> {
        let mut instances = BTreeMap::new();
        let mut instance_info = Vec::new();
        for c in cells {
            let key = (c.application, c.size, c.instance_seed);
            if instances.contains_key(&key) {
                continue;
            }
            let app = &cfg.applications[c.application];
            let built = build_instance(app, c.size, c.instance_seed);
            let provenance = match &built {
                Ok((_, p)) => p.clone(),
                Err(e) => json!({ "error": e }),
            };
            instance_info.push(InstanceInfo {
                application: app.label(),
                size: c.size,
                seed: c.instance_seed,
                provenance,
            });
            instances.insert(key, built.map(|(i, _)| i));
        }
        let pools = cfg
            .devices
            .iter()
            .map(|d| rayon::ThreadPoolBuilder::new().num_threads(d.threads).build())
            .collect::<Result<_, _>>()?;
        Ok(Self {
            cfg,
            run_id,
            instances,
            instance_info,
            pools,
        })
    }

    pub fn run_cell(&self, cell: &Cell) -> CellResult {
        let cfg = self.cfg;
        let (app, m, s, d) = (
            &cfg.applications[cell.application],
            &cfg.mappings[cell.mapping],
            &cfg.solvers[cell.solver],
            &cfg.devices[cell.device],
        );
        let timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true);
        let mut clock = Clock::start();
        let result = match &self.instances[&(cell.application, cell.size, cell.instance_seed)] {
            Err(e) => Pipeline {
                validity: false,
                quality: None,
                meta: Map::new(),
                trace: None,
                error: format!("instance: {e}"),
            },
            Ok(inst) => catch_unwind(AssertUnwindSafe(|| pipeline(inst, m, s, cell.seed, &self.pools[cell.device], &mut clock)))
                .unwrap_or_else(|panic| {
                    let msg = panic
                        .downcast_ref::<String>()
                        .cloned()
                        .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_default();
                    Pipeline {
                        validity: false,
                        quality: None,
                        meta: Map::new(),
                        trace: None,
                        error: format!("internal: panic {msg}"),
                    }
                }),
        };
        let [t_map, t_solve, t_rev, t_proc, t_val, t_eval] = clock.laps;
        CellResult {
            record: BenchmarkRecord {
                run_id: self.run_id.clone(),
                timestamp,
                application: app.label(),
                problem_size: cell.size,
                instance_seed: cell.instance_seed,
                mapping: m.label(),
                solver: s.label(),
                device: d.name.clone(),
                repetition: cell.repetition,
                t_mapping_ms: t_map,
                t_solver_ms: t_solve,
                t_reverse_map_ms: t_rev,
                t_process_solution_ms: t_proc,
                t_validation_ms: t_val,
                t_evaluation_ms: t_eval,
                tts_ms: clock.total(),
                validity: result.validity,
                quality: result.quality,
                solver_metadata: Value::Object(result.meta).to_string(),
                cell_index: cell.index,
                cell_seed: cell.seed,
                error: result.error,
            },
            trace: result.trace,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub framework: String,
    pub version: String,
    pub run_id: String,
    pub run_seed: u64,
    pub started: String,
    pub finished: String,
    pub workers: usize,
    /// Cells ran concurrently, so timings include contention.
    pub timing_contended: bool,
    pub config: BenchConfig,
    pub warnings: Vec<String>,
    pub cells: Vec<Cell>,
    pub instances: Vec<InstanceInfo>,
}

pub struct RunOutput {
    pub records: Vec<BenchmarkRecord>,
    pub traces: Vec<(usize, Vec<f64>)>,
    pub meta: RunMeta,
}

/// Runs every planned cell; with `workers > 1` cells run concurrently.
/// Records come back in plan order either way.
pub fn run(cfg: &BenchConfig, workers: usize) -> anyhow::Result<RunOutput> {
    let workers = workers.max(1);
    let plan = build_plan(cfg);
    let now = chrono::Utc::now();
    let started = now.to_rfc3339_opts(chrono::SecondsFormat::Millis, true);
    let run_id = format!("{:x}-{:016x}", now.timestamp_millis(), cfg.run_seed);
    let ctx = RunContext::new(cfg, &plan.cells, run_id.clone())?;
    let results: Vec<CellResult> = if workers == 1 {
        plan.cells.iter().map(|c| ctx.run_cell(c)).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()?
            .install(|| plan.cells.par_iter().map(|c| ctx.run_cell(c)).collect())
    };
    let mut records = Vec::with_capacity(results.len());
    let mut traces = Vec::new();
    for r in results {
        if let Some(t) = r.trace {
            traces.push((r.record.cell_index, t));
        }
        records.push(r.record);
    }
    let meta = RunMeta {
        framework: FRAMEWORK.into(),
        version: VERSION.into(),
        run_id,
        run_seed: cfg.run_seed,
        started,
        finished: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        workers,
        timing_contended: workers > 1,
        config: cfg.clone(),
        warnings: plan.warnings,
        cells: plan.cells,
        instances: ctx.instance_info,
    };
    Ok(RunOutput { records, traces, meta })
}
