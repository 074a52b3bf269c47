//! DIMACS WCNF with the classic `p wcnf <nvars> <nclauses> <top>` header.
//! Clauses weighted `top` are hard, everything else is soft.

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::{Clause, MaxSatInstance};

pub fn parse_wcnf(text: &str) -> Result<MaxSatInstance> {
    let mut header: Option<(usize, usize, f64)> = None;
    let mut hard = Vec::new();
    let mut soft = Vec::new();
    let mut weights = Vec::new();
    // weight and literals of a clause that has not seen its terminating 0 yet
    let mut pending: Option<(f64, Vec<i64>, usize)> = None;

    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::parse(line_no, "duplicate problem line"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 5 || parts[1] != "wcnf" {
                return Err(Error::parse(line_no, "expected 'p wcnf <nvars> <nclauses> <top>'"));
            }
            let nv = parts[2]
                .parse()
                .map_err(|_| Error::parse(line_no, "bad variable count"))?;
            let nc = parts[3]
                .parse()
                .map_err(|_| Error::parse(line_no, "bad clause count"))?;
            let top: f64 = parts[4]
                .parse()
                .map_err(|_| Error::parse(line_no, "bad top weight"))?;
            if !(top.is_finite() && top > 0.0) {
                return Err(Error::parse(line_no, "top weight must be positive"));
            }
            header = Some((nv, nc, top));
            continue;
        }
        let (n_vars, _, top) = header.ok_or_else(|| Error::parse(line_no, "clause before problem line"))?;
        for tok in line.split_whitespace() {
            match pending.as_mut() {
                None => {
                    let w: f64 = tok
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("bad weight {tok}")))?;
                    if !(w.is_finite() && w > 0.0) {
                        return Err(Error::parse(line_no, format!("weight {tok} must be positive")));
                    }
                    pending = Some((w, Vec::new(), line_no));
                }
                Some((w, lits, start)) => {
                    let l: i64 = tok
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("bad literal {tok}")))?;
                    if l == 0 {
                        let clause = Clause::from_dimacs(lits)
                            .map_err(|e| Error::parse(*start, e.to_string()))?;
                        if *w == top {
                            hard.push(clause);
                        } else if *w > top {
                            return Err(Error::parse(*start, "weight exceeds top"));
                        } else {
                            soft.push(clause);
                            weights.push(*w);
                        }
                        pending = None;
                    } else {
                        if l.unsigned_abs() as usize > n_vars {
                            return Err(Error::parse(line_no, format!("literal {l} out of range")));
                        }
                        lits.push(l);
                    }
                }
            }
        }
    }

    if let Some((_, _, start)) = pending {
        return Err(Error::parse(start, "clause is missing its terminating 0"));
    }
    let (n_vars, n_clauses, _) = header.ok_or_else(|| Error::Format("missing problem line".into()))?;
    if hard.len() + soft.len() != n_clauses {
        return Err(Error::Format(format!(
            "header declares {n_clauses} clauses, found {}",
            hard.len() + soft.len()
        )));
    }
    MaxSatInstance::weighted(n_vars, hard, soft, weights)
}

/// Hard clauses use `top = floor(total soft weight) + 1`, which every soft
/// weight stays below.
pub fn write_wcnf(inst: &MaxSatInstance) -> String {
    let top = inst.total_soft_weight().floor() + 1.0;
    let mut out = String::new();
    writeln!(
        out,
        "p wcnf {} {} {}",
        inst.n_vars(),
        inst.n_hard() + inst.n_soft(),
        top
    )
    .unwrap();
    let mut line = |w: f64, c: &Clause| {
        write!(out, "{w}").unwrap();
        for l in c.literals() {
            write!(out, " {}", l.to_dimacs()).unwrap();
        }
        writeln!(out, " 0").unwrap();
    };
    for c in inst.hard() {
        line(top, c);
    }
    for (c, &w) in inst.soft().iter().zip(inst.weights()) {
        line(w, c);
    }
    out
}
