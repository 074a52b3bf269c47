use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use qbench::{build_plan, parse_config, persist, run, summarize_dir};
use qbench_core::problems::maxsat::dinneen::clause_qubo_terms;
use qbench_core::problems::maxsat::{parse_wcnf, Clause, VehicleConfig};
use qbench_core::problems::pvc::qubit_count;
use qbench_core::problems::tsp::{self, TspTour};
use qbench_core::qubo::{brute_force_optimum, exact_optimum, SearchLimits};
use qbench_core::solvers::{exact_maxsat, ExactBudget, MaxSatOptimum};
use qbench_core::{Error, Qubo, Rational64};

#[derive(Parser)]
#[command(name = "qbench", version, about = "Application-level benchmarks for QUBO solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every cell of a configuration and write results to a directory.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Recompute summary.csv from a results directory.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Parse and validate a configuration, then print the plan size.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
    /// Exhaustive reference checks.
    #[command(subcommand)]
    Oracle(Oracle),
}

#[derive(Subcommand)]
enum Oracle {
    /// Exact optimum of a QUBO JSON document.
    BruteForce {
        #[arg(long)]
        qubo: PathBuf,
    },
    /// Check the 3-literal clause gadget over all polarities and assignments.
    ClauseGadget,
    /// Exact partial MAX-SAT optimum of a WCNF file, cross-checked by enumeration for up to 20 variables.
    Maxsat {
        #[arg(long)]
        wcnf: PathBuf,
    },
    /// Variable count of the robot path encoding.
    QubitCount {
        #[arg(long)]
        seams: usize,
        #[arg(long)]
        configs: usize,
        #[arg(long)]
        tools: usize,
    },
    /// Shortest tour of a TSPLIB file by enumeration (up to 10 nodes).
    Tsp {
        #[arg(long)]
        tsplib: PathBuf,
    },
}

fn read(path: &PathBuf) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn oracle(o: Oracle) -> anyhow::Result<bool> {
    match o {
        Oracle::BruteForce { qubo } => {
            let q = Qubo::from_json(&read(&qubo)?)?;
            let (bits, value, method) = match brute_force_optimum(&q) {
                Ok((b, v)) => (b, v, "enumeration"),
                Err(Error::Capacity { .. }) => {
                    let (b, v) = exact_optimum(&q, SearchLimits::default())?;
                    (b, v, "branch_and_bound")
                }
                Err(e) => return Err(e.into()),
            };
            let doc = serde_json::json!({ "optimum": value, "assignment": bits.bits(), "method": method });
            println!("{doc}");
            Ok(true)
        }
        Oracle::ClauseGadget => {
            let mut failures = 0;
            for pattern in 0..8u8 {
                let lits: Vec<i64> = (0..3)
                    .map(|k| if (pattern >> k) & 1 == 1 { -(k + 1) } else { k + 1 })
                    .collect();
                let clause = Clause::from_dimacs(&lits)?;
                let terms = clause_qubo_terms::<Rational64>(&clause, 3)?;
                for x in 0..8u8 {
                    let xs = [x & 1, (x >> 1) & 1, (x >> 2) & 1];
                    let best = (0..=1u8)
                        .map(|z| terms.evaluate(&[xs[0], xs[1], xs[2], z]))
                        .max()
                        .expect("two ancilla values");
                    if best != Rational64::from(i64::from(clause.satisfied(&xs))) {
                        failures += 1;
                        println!("mismatch: clause {lits:?} x {xs:?} gadget max {best}");
                    }
                }
            }
            println!("clause gadget: {}/64 cases match", 64 - failures);
            Ok(failures == 0)
        }
        Oracle::Maxsat { wcnf } => {
            let inst = parse_wcnf(&read(&wcnf)?)?;
            let r = exact_maxsat(&inst, &ExactBudget::default())?;
            let exact = match &r.optimum {
                MaxSatOptimum::Optimal { weight, .. } => Some(*weight),
                MaxSatOptimum::Unsat => None,
            };
            let mut ok = true;
            if inst.n_vars() <= 20 {
                let brute = (0..1u64 << inst.n_vars())
                    .map(|k| VehicleConfig::from_index(inst.n_vars(), k))
                    .filter(|v| inst.hard_violations(v).map(|n| n == 0).unwrap_or(false))
                    .filter_map(|v| inst.soft_weight(&v).ok())
                    .fold(None, |b: Option<f64>, w| Some(b.map_or(w, |b| b.max(w))));
                ok = brute == exact;
                println!("enumeration optimum: {brute:?}");
            }
            match r.optimum {
                MaxSatOptimum::Optimal { config, weight } => {
                    println!("exact optimum: {weight} (nodes {})", r.nodes);
                    let bits: String = config.bits().iter().map(|b| char::from(b'0' + b)).collect();
                    println!("assignment: {bits}");
                }
                MaxSatOptimum::Unsat => println!("exact optimum: unsat"),
            }
            Ok(ok)
        }
        Oracle::QubitCount { seams, configs, tools } => {
            println!("{}", qubit_count(seams, configs, tools));
            Ok(true)
        }
        Oracle::Tsp { tsplib } => {
            let inst = tsp::parse_tsplib(&read(&tsplib)?)?;
            let n = inst.n_nodes();
            if n > 10 {
                bail!("enumeration supports at most 10 nodes, instance has {n}");
            }
            let mut best: Option<(f64, Vec<usize>)> = None;
            let mut rest: Vec<usize> = (1..n).collect();
            permute(&mut rest, 0, &mut |perm| {
                let order: Vec<usize> = std::iter::once(0).chain(perm.iter().copied()).collect();
                let len = tsp::evaluate_tour(&inst, &TspTour { order: order.clone() }).expect("permutation");
                if best.as_ref().map_or(true, |(b, _)| len < *b) {
                    best = Some((len, order));
                }
            });
            let (len, order) = best.expect("at least one tour");
            println!("optimal tour length: {len}");
            println!("tour: {order:?}");
            Ok(true)
        }
    }
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

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> anyhow::Result<bool> {
    match Cli::parse().command {
        Command::Run { config, workers, out } => {
            let cfg = parse_config(&read(&config)?)?;
            let output = run(&cfg, workers)?;
            for w in &output.meta.warnings {
                eprintln!("warning: {w}");
            }
            if workers > 1 {
                eprintln!("warning: {workers} workers; timings include contention");
            }
            persist(&out, &output)?;
            let valid = output.records.iter().filter(|r| r.validity).count();
            let errors = output.records.iter().filter(|r| !r.error.is_empty()).count();
            println!(
                "{} records ({valid} valid, {errors} with errors) written to {}",
                output.records.len(),
                out.display()
            );
            Ok(true)
        }
        Command::Summarize { input } => {
            let rows = summarize_dir(&input)?;
            println!("{} groups written to {}", rows.len(), input.join("summary.csv").display());
            Ok(true)
        }
        Command::ValidateConfig { config } => {
            let cfg = parse_config(&read(&config)?)?;
            let plan = build_plan(&cfg);
            for w in &plan.warnings {
                eprintln!("warning: {w}");
            }
            println!("config ok: {} cells", plan.cells.len());
            Ok(true)
        }
        Command::Oracle(o) => oracle(o),
    }
}
