//! End-to-end acceptance checks. Each criterion runs in isolation and prints
//! one PASS or FAIL line; the process exits non-zero if any fail.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qbench::{parse_config, run, BenchmarkRecord};
use qbench_core::problems::maxsat::dinneen::{clause_qubo_terms, map_to_qubo_dinneen};
use qbench_core::problems::maxsat::{
    generate_random, parse_wcnf, recipe_counts, write_wcnf, Clause, MaxSatInstance, VehicleConfig,
};
use qbench_core::problems::pvc::{self, PvcIndex, PvcInstance};
use qbench_core::problems::tsp::{self, TspInstance, TspTour};
use qbench_core::qaoa::{self, QaoaParams, QaoaState, Simulator};
use qbench_core::qubo::{brute_force_optimum, exact_optimum, qubo_to_ising, Assignment, SearchLimits};
use qbench_core::rng::{derive_seed, seeded_rng};
use qbench_core::solvers::{
    exact_maxsat, greedy_path, random_path, reverse_greedy_path, simulated_annealing, ExactBudget,
    MaxSatOptimum, SaParams,
};
use qbench_core::{Error, Ising, Qubo, Rational64};
use rand::Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// QUBO optimum, falling back to branch and bound past the enumeration cap.
fn qubo_optimum(q: &Qubo) -> Result<(Assignment, f64), String> {
    match brute_force_optimum(q) {
        Err(Error::Capacity { .. }) => exact_optimum(q, SearchLimits::default()).map_err(fail),
        r => r.map_err(fail),
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    fn rec(rest: &mut Vec<usize>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..rest.len() {
            let v = rest.remove(k);
            prefix.push(v);
            rec(rest, prefix, out);
            prefix.pop();
            rest.insert(k, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut items.to_vec(), &mut Vec::new(), &mut out);
    out
}

fn best_tsp_tour(inst: &TspInstance) -> f64 {
    let n = inst.n_nodes();
    permutations(&(1..n).collect::<Vec<_>>())
        .into_iter()
        .map(|rest| {
            let order = std::iter::once(0).chain(rest).collect();
            tsp::evaluate_tour(inst, &TspTour { order }).expect("permutation")
        })
        .fold(f64::INFINITY, f64::min)
}

/// Every home node, every ordering of the seams, every node choice per seam.
fn best_pvc_tour(inst: &PvcInstance) -> f64 {
    let groups: Vec<Vec<usize>> = (0..inst.n_groups())
        .map(|g| (0..inst.n_nodes()).filter(|&u| inst.group_of(u) == g).collect())
        .collect();
    let mut best = f64::INFINITY;
    for order in permutations(&(1..inst.n_groups()).collect::<Vec<_>>()) {
        let layers: Vec<&Vec<usize>> = std::iter::once(&groups[0]).chain(order.iter().map(|&g| &groups[g])).collect();
        let mut choice = vec![0usize; layers.len()];
        loop {
            let seq: Vec<usize> = layers.iter().zip(&choice).map(|(l, &c)| l[c]).collect();
            if pvc::is_valid_sequence(inst, &seq) {
                let len: f64 = (0..seq.len())
                    .map(|k| inst.distance(seq[k], seq[(k + 1) % seq.len()]).expect("valid"))
                    .sum();
                best = best.min(len);
            }
            let mut k = 0;
            while k < choice.len() {
                choice[k] += 1;
                if choice[k] < layers[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
    }
    best
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        for k in i..=j {
            r[idx[k]] = (i + j) as f64 / 2.0 + 1.0;
        }
        i = j + 1;
    }
    r
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let num: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

fn qubit_counts() -> Check {
    for (dims, want) in [((1, 2, 2), 24), ((2, 2, 2), 60)] {
        let inst = pvc::generate_instance(dims.0, dims.1, dims.2, 7).map_err(fail)?;
        let (q, _) = pvc::map_to_qubo(&inst, pvc::default_lambda(&inst)).map_err(fail)?;
        ensure!(q.n_vars() == want, "{dims:?}: built QUBO has {} variables, want {want}", q.n_vars());
        ensure!(pvc::qubit_count(dims.0, dims.1, dims.2) == want, "{dims:?}: formula disagrees");
    }
    let big = pvc::qubit_count(70, 4, 4);
    let idx = PvcIndex::new(70, 4, 4);
    ensure!(big == 160176 && idx.len() == 160176, "(70,4,4): formula {big}, index {}", idx.len());
    Ok("24, 60, 160176".into())
}

fn dinneen_size() -> Check {
    for n_f in 5..=30 {
        let (inst, prov) = generate_random(n_f, n_f as u64).map_err(fail)?;
        let (q, idx) = map_to_qubo_dinneen(&inst, inst.default_lambda()).map_err(fail)?;
        let want = (36 * n_f).div_ceil(5);
        ensure!(
            q.n_vars() == n_f + prov.n_h + prov.n_s && idx.len() == q.n_vars(),
            "n_f={n_f}: {} variables, n_f + n_h + n_s = {}",
            q.n_vars(),
            n_f + prov.n_h + prov.n_s
        );
        ensure!(q.n_vars() == want, "n_f={n_f}: {} variables, ceil(7.2 n_f) = {want}", q.n_vars());
        ensure!(recipe_counts(n_f) == (prov.n_h, prov.n_s), "n_f={n_f}: recipe counts differ");
    }
    Ok("N_f = 5..30 all match".into())
}

fn clause_gadget() -> Check {
    let mut cases = 0;
    for pattern in 0..8i64 {
        let lits: Vec<i64> = (0..3).map(|k| if (pattern >> k) & 1 == 1 { -(k + 1) } else { k + 1 }).collect();
        let clause = Clause::from_dimacs(&lits).map_err(fail)?;
        let terms = clause_qubo_terms::<Rational64>(&clause, 3).map_err(fail)?;
        for x in 0..8u8 {
            let xs = [x & 1, (x >> 1) & 1, (x >> 2) & 1];
            let best = (0..=1u8).map(|z| terms.evaluate(&[xs[0], xs[1], xs[2], z])).max().expect("two values");
            let truth = Rational64::from(i64::from(clause.satisfied(&xs)));
            ensure!(best == truth, "clause {lits:?} at {xs:?}: gadget max {best}, truth {truth}");
            cases += 1;
        }
    }
    Ok(format!("{cases}/64 exact"))
}

fn hard_dominance() -> Check {
    let (mut checked, mut seed) = (0, 0u64);
    while checked < 50 {
        seed += 1;
        ensure!(seed < 1000, "could not find 50 satisfiable instances");
        let n_f = 3 + (seed as usize % 6);
        let (inst, _) = generate_random(n_f, seed).map_err(fail)?;
        let exact = exact_maxsat(&inst, &ExactBudget::default()).map_err(fail)?;
        let MaxSatOptimum::Optimal { weight, .. } = exact.optimum else {
            continue;
        };
        let lambda = inst.n_soft() as f64;
        let (q, idx) = map_to_qubo_dinneen(&inst, lambda).map_err(fail)?;
        let (bits, _) = qubo_optimum(&q)?;
        let v = idx.decode(&bits).map_err(fail)?;
        let hv = inst.hard_violations(&v).map_err(fail)?;
        let soft = inst.soft_weight(&v).map_err(fail)?;
        ensure!(hv == 0, "seed {seed} (n_f={n_f}): QUBO argmax violates {hv} hard clauses");
        ensure!(soft == weight, "seed {seed} (n_f={n_f}): QUBO soft count {soft}, exact {weight}");
        checked += 1;
    }
    Ok(format!("{checked} satisfiable instances, n_f 3..8"))
}

fn random_baseline() -> Check {
    let mut rng = seeded_rng(5);
    let (mut satisfied, mut total) = (0.0, 0.0);
    for k in 0..100u64 {
        let (inst, _) = generate_random(20, 1000 + k).map_err(fail)?;
        for _ in 0..1000 {
            let bits = (0..inst.n_vars()).map(|_| u8::from(rng.gen::<bool>())).collect();
            let v = VehicleConfig::new(bits).map_err(fail)?;
            satisfied += inst.soft_weight(&v).map_err(fail)?;
            total += inst.total_soft_weight();
        }
    }
    let ratio = satisfied / total;
    ensure!((ratio - 0.875).abs() <= 0.005, "mean ratio {ratio:.5}");
    Ok(format!("mean ratio {ratio:.5} over 1e5 assignments"))
}

fn tour_equivalence() -> Check {
    let mut count = 0;
    for seed in 0..20u64 {
        for n in [3, 4] {
            let inst = TspInstance::random_euclidean(n, seed).map_err(fail)?;
            let (q, idx) = tsp::map_to_qubo(&inst, tsp::default_lambda(&inst)).map_err(fail)?;
            let (bits, _) = qubo_optimum(&q)?;
            let tour = tsp::decode(&bits, &idx).map_err(fail)?.ok_or(format!("tsp n={n} seed {seed}: invalid decode"))?;
            let len = tsp::evaluate_tour(&inst, &tour).map_err(fail)?;
            let best = best_tsp_tour(&inst);
            ensure!(len == best, "tsp n={n} seed {seed}: QUBO tour {len}, enumeration {best}");
            count += 1;
        }
        for dims in [(1, 1, 1), (1, 2, 2), (2, 1, 1), (2, 2, 2)] {
            let inst = pvc::generate_instance(dims.0, dims.1, dims.2, seed).map_err(fail)?;
            let (q, idx) = pvc::map_to_qubo(&inst, pvc::default_lambda(&inst)).map_err(fail)?;
            let (bits, _) = qubo_optimum(&q)?;
            let tour = pvc::decode(&bits, &idx, &inst)
                .map_err(fail)?
                .ok_or(format!("pvc {dims:?} seed {seed}: invalid decode"))?;
            let len = pvc::evaluate_tour(&inst, &tour).map_err(fail)?;
            let best = best_pvc_tour(&inst);
            ensure!(len == best, "pvc {dims:?} seed {seed}: QUBO tour {len}, enumeration {best}");
            count += 1;
        }
    }
    Ok(format!("{count} instances"))
}

fn solver_ordering() -> Check {
    let (mut g, mut r, mut rg, mut sa) = (vec![], vec![], vec![], vec![]);
    for k in 0..100u64 {
        let n = 4 + (k as usize % 5);
        let inst = TspInstance::random_euclidean(n, 500 + k).map_err(fail)?;
        g.push(greedy_path(&inst).map_err(fail)?.length);
        rg.push(reverse_greedy_path(&inst).map_err(fail)?.length);
        r.push(random_path(&inst, derive_seed(77, k)).map_err(fail)?.length);
        let (q, idx) = tsp::map_to_qubo(&inst, tsp::default_lambda(&inst)).map_err(fail)?;
        let out = simulated_annealing(&q, &SaParams { seed: k, ..Default::default() }).map_err(fail)?;
        let tour = tsp::decode(&out.best_assignment, &idx)
            .map_err(fail)?
            .ok_or(format!("instance {k} (n={n}): simulated annealing returned an invalid tour"))?;
        sa.push(tsp::evaluate_tour(&inst, &tour).map_err(fail)?);
    }
    let (mg, mr, mrg, msa) = (mean(&g), mean(&r), mean(&rg), mean(&sa));
    let detail = format!("greedy {mg:.1}, random {mr:.1}, reverse {mrg:.1}, sa {msa:.1}");
    ensure!(mg <= mr && mr <= mrg && msa <= mr, "{detail}");
    Ok(detail)
}

fn random_ising(n: usize, rng: &mut impl Rng) -> Ising {
    let h: Vec<(usize, f64)> = (0..n).map(|i| (i, rng.gen_range(-1.0..1.0))).collect();
    let mut j = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.gen_bool(0.5) {
                j.push((a, b, rng.gen_range(-1.0..1.0)));
            }
        }
    }
    Ising::new(n, rng.gen_range(-1.0..1.0), h, j).expect("valid ising")
}

fn qaoa_suite() -> Check {
    let mut rng = seeded_rng(8);
    let mut drift: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(1..=12);
        let p = rng.gen_range(1..=4);
        let h = random_ising(n, &mut rng);
        let params = QaoaParams::seeded(p, rng.gen());
        let state = qaoa::run_circuit(&h, &params).map_err(fail)?;
        drift = drift.max((state.norm_sqr() - 1.0).abs());
    }
    ensure!(drift < 1e-9, "norm drift {drift:e}");

    let mut worst: f64 = 0.0;
    let eps = 1e-5;
    for _ in 0..50 {
        let n = rng.gen_range(1..=8);
        let p = rng.gen_range(1..=3);
        let h = random_ising(n, &mut rng);
        let sim = Simulator::new(&h).map_err(fail)?;
        let params = QaoaParams::seeded(p, rng.gen());
        let (_, dg, db) = sim.value_and_gradient(&params.gammas, &params.betas).map_err(fail)?;
        let analytic: Vec<f64> = dg.into_iter().chain(db).collect();
        let theta: Vec<f64> = params.gammas.iter().chain(&params.betas).copied().collect();
        let value = |t: &[f64]| {
            let s = sim.run(&t[..p], &t[p..]).expect("run");
            sim.expectation(&s).expect("expectation")
        };
        let fd: Vec<f64> = (0..theta.len())
            .map(|k| {
                let (mut up, mut dn) = (theta.clone(), theta.clone());
                up[k] += eps;
                dn[k] -= eps;
                (value(&up) - value(&dn)) / (2.0 * eps)
            })
            .collect();
        let scale = fd.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-12);
        let err = analytic.iter().zip(&fd).map(|(a, f)| (a - f).abs()).fold(0.0, f64::max) / scale;
        worst = worst.max(err);
    }
    ensure!(worst < 1e-6, "gradient relative error {worst:e}");

    let inst = TspInstance::random_euclidean(3, 1).map_err(fail)?;
    let idx = tsp::TspIndex::new(3);
    let uniform = QaoaState::uniform(idx.len());
    let cost = |x: usize| {
        let bits = Assignment::from_basis_index(idx.len(), x);
        tsp::decode(&bits, &idx)
            .expect("decode")
            .map(|t| tsp::evaluate_tour(&inst, &t).expect("valid tour"))
    };
    let n_valid = (0..1usize << idx.len()).filter(|&x| cost(x).is_some()).count();
    ensure!(n_valid == 6, "{n_valid} valid basis states, want 6");
    let p0 = 6.0 / 512.0;
    let (reps, draws) = (100u64, 50usize);
    let mut in_band = 0;
    let mut pooled = 0.0;
    let band = 1.96 * (p0 * (1.0 - p0) / draws as f64).sqrt();
    for rep in 0..reps {
        let m = qaoa::measure_metrics(&uniform, cost, draws, derive_seed(99, rep)).validity;
        pooled += m / reps as f64;
        if (m - p0).abs() <= band {
            in_band += 1;
        }
    }
    let pooled_band = 1.96 * (p0 * (1.0 - p0) / (reps as usize * draws) as f64).sqrt();
    ensure!(
        (pooled - p0).abs() <= pooled_band,
        "pooled V {pooled:.5} outside {p0:.5} +- {pooled_band:.5}"
    );

    let h = qubo_to_ising(&tsp::map_to_qubo(&inst, tsp::default_lambda(&inst)).map_err(fail)?.0);
    let run = qaoa::optimize(&h, &QaoaParams::seeded(1, 3)).map_err(fail)?;
    ensure!(run.trace.len() == 60, "trace length {}", run.trace.len());

    Ok(format!(
        "drift {drift:.1e}, grad err {worst:.1e}, pooled V {pooled:.4} (p0 {p0:.4}, {in_band}/{reps} runs in per-run band), trace 60"
    ))
}

const PIPELINE_CONFIG: &str = r#"
run_seed = 2024
repetitions = 2

[[application]]
name = "tsp"
sizes = [3, 4]

[[application]]
name = "pvc"
sizes = [1, 2]
seeds = [0, 1]
configs = 1
tools = 1

[[application]]
name = "maxsat"
sizes = [5, 6]
seeds = [3]

[[mapping]]
name = "direct"

[[mapping]]
name = "qubo"

[[mapping]]
name = "dinneen"

[[solver]]
name = "greedy"

[[solver]]
name = "reverse_greedy"

[[solver]]
name = "random"

[[solver]]
name = "exact"

[[solver]]
name = "sa"
reads = 20
sweeps = 200

[[solver]]
name = "qaoa"
layers = 1
iterations = 5
samples = 20

[[solver]]
name = "brute_force"
"#;

fn tts_identity() -> Check {
    let cfg = parse_config(PIPELINE_CONFIG).map_err(fail)?;
    let a = run(&cfg, 1).map_err(fail)?;
    let b = run(&cfg, 1).map_err(fail)?;
    let c = run(&cfg, 4).map_err(fail)?;
    ensure!(!a.records.is_empty(), "no records");
    let mut worst: f64 = 0.0;
    for r in a.records.iter().chain(&b.records).chain(&c.records) {
        let gap = (r.tts_ms - r.component_sum_ms()).abs();
        worst = worst.max(gap);
        ensure!(gap <= 0.1, "cell {}: tts {} vs stages {}", r.cell_index, r.tts_ms, r.component_sum_ms());
    }
    let strip = |v: &[BenchmarkRecord]| v.iter().map(BenchmarkRecord::without_timings).collect::<Vec<_>>();
    let (sa, sb, sc) = (strip(&a.records), strip(&b.records), strip(&c.records));
    for (x, y) in sa.iter().zip(&sb).chain(sa.iter().zip(&sc)) {
        ensure!(
            x.validity == y.validity && x.quality.map(f64::to_bits) == y.quality.map(f64::to_bits),
            "cell {} not reproduced: {:?}/{:?} vs {:?}/{:?}",
            x.cell_index,
            x.validity,
            x.quality,
            y.validity,
            y.quality
        );
    }
    ensure!(sa == sb && sa == sc, "records differ beyond validity and quality");
    let errors = a.records.iter().filter(|r| !r.error.is_empty()).count();
    Ok(format!(
        "{} records x 3 runs, worst gap {worst:.2e} ms, {errors} errored cells",
        a.records.len()
    ))
}

fn exact_scaling() -> Check {
    let sizes: Vec<usize> = (10..=28).step_by(2).collect();
    let cfg = parse_config(&format!(
        "run_seed = 1\nrepetitions = 1\n[[application]]\nname = \"maxsat\"\nsizes = {sizes:?}\nseeds = [0,1,2,3,4,5,6,7,8,9]\n\
         [[mapping]]\nname = \"direct\"\n[[solver]]\nname = \"exact\"\n"
    ))
    .map_err(fail)?;
    let out = run(&cfg, 1).map_err(fail)?;
    let mut medians = Vec::new();
    for &n in &sizes {
        let mut t: Vec<f64> = out.records.iter().filter(|r| r.problem_size == n).map(|r| r.tts_ms).collect();
        ensure!(t.len() == 10, "n_f={n}: {} records", t.len());
        if let Some(r) = out.records.iter().find(|r| r.problem_size == n && !r.error.is_empty()) {
            return Err(format!("n_f={n}: {}", r.error));
        }
        medians.push(median(&mut t));
    }
    let x: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    let rho = pearson(&ranks(&x), &ranks(&medians));
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = medians.iter().map(|v| v.ln()).collect();
    let k = slope(&lx, &ly);
    let detail = format!(
        "spearman {rho:.3}, log-log slope {k:.2}, medians {} ms",
        medians.iter().map(|m| format!("{m:.3}")).collect::<Vec<_>>().join(" ")
    );
    ensure!(rho >= 0.9 && k > 1.0, "{detail}");
    Ok(detail)
}

fn random_clause(rng: &mut impl Rng, n: usize) -> Clause {
    let len = rng.gen_range(1..=4);
    let lits: Vec<i64> = rand::seq::index::sample(rng, n, len.min(n))
        .iter()
        .map(|v| {
            let v = v as i64 + 1;
            if rng.gen_bool(0.5) {
                -v
            } else {
                v
            }
        })
        .collect();
    Clause::from_dimacs(&lits).expect("nonzero literals")
}

fn random_weighted_instance(seed: u64) -> MaxSatInstance {
    let mut rng = seeded_rng(seed);
    let n = rng.gen_range(1..=15);
    let hard = (0..rng.gen_range(0..10)).map(|_| random_clause(&mut rng, n)).collect();
    let soft: Vec<Clause> = (0..rng.gen_range(0..10)).map(|_| random_clause(&mut rng, n)).collect();
    let weights = soft.iter().map(|_| f64::from(rng.gen_range(1..=9u8))).collect();
    MaxSatInstance::weighted(n, hard, soft, weights).expect("valid instance")
}

fn round_trips() -> Check {
    let tri = "NAME : tri345\nTYPE : TSP\nCOMMENT : 3-4-5 right triangle\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\n\
               NODE_COORD_SECTION\n1 0 0\n2 3 0\n3 0 4\nEOF\n";
    let t = tsp::parse_tsplib(tri).map_err(fail)?;
    let back = tsp::parse_tsplib(&tsp::write_tsplib(&t)).map_err(fail)?;
    ensure!(back == t, "triangle did not round-trip");
    ensure!(best_tsp_tour(&t) == 12.0, "triangle tour length is not 12");
    for seed in 0..100u64 {
        let n = 3 + (seed as usize % 20);
        let inst = TspInstance::random_euclidean(n, seed).map_err(fail)?;
        let text = tsp::write_tsplib(&inst);
        let back = tsp::parse_tsplib(&text).map_err(fail)?;
        ensure!(back == inst, "tsp seed {seed} did not round-trip");
        ensure!(tsp::write_tsplib(&back) == text, "tsp seed {seed}: rewritten text differs");

        for inst in [generate_random(3 + (seed as usize % 20), seed).map_err(fail)?.0, random_weighted_instance(seed)] {
            let text = write_wcnf(&inst);
            let back = parse_wcnf(&text).map_err(fail)?;
            ensure!(back == inst, "wcnf seed {seed} did not round-trip");
            ensure!(write_wcnf(&back) == text, "wcnf seed {seed}: rewritten text differs");
        }
    }
    Ok("triangle + 100 TSPLIB + 200 WCNF".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check, Duration); 11] = [
        ("qubit-count identities", qubit_counts, Duration::from_secs(1)),
        ("max-sat encoding size", dinneen_size, Duration::from_secs(10)),
        ("clause gadget exhaustive", clause_gadget, Duration::from_secs(1)),
        ("hard-constraint dominance", hard_dominance, Duration::from_secs(120)),
        ("random-assignment baseline", random_baseline, Duration::from_secs(60)),
        ("qubo and tour equivalence", tour_equivalence, Duration::from_secs(120)),
        ("solver ordering", solver_ordering, Duration::from_secs(300)),
        ("qaoa numerical suite", qaoa_suite, Duration::from_secs(120)),
        ("tts identity and reproducibility", tts_identity, Duration::from_secs(300)),
        ("exact-solver scaling", exact_scaling, Duration::from_secs(600)),
        ("format round-trips", round_trips, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (k, (name, check, budget)) in criteria.into_iter().enumerate() {
        let t0 = Instant::now();
        let outcome = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(r) => r,
            Err(p) => Err(format!(
                "panic: {}",
                p.downcast_ref::<String>().map(String::as_str).or(p.downcast_ref::<&str>().copied()).unwrap_or("?")
            )),
        };
        let elapsed = t0.elapsed();
        let outcome = match outcome {
            Ok(d) if elapsed > budget => Err(format!("{d}; took {elapsed:.2?}, budget {budget:?}")),
            o => o,
        };
        match outcome {
            Ok(d) => println!("criterion {:>2} {name}: PASS ({d}; {elapsed:.2?})", k + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({e}; {elapsed:.2?})", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
