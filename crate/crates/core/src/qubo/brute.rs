//! Exhaustive optimum search.
//!
//! Variables that share no quadratic term with each other can be optimized
//! in closed form once everything else is fixed: each one simply takes the
//! sign of its local field. The search therefore picks a set of mutually
//! uncoupled "free" variables, walks the remaining ones in Gray-code order
//! with incremental field updates, and resolves the free block per step.
//! The result is the exact global optimum; the enumeration cap applies to
//! the walked block only. For the MAX-3SAT encodings this means only the
//! feature variables are enumerated, the ancillas are resolved directly.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{Assignment, QuboInstance};

/// Default limit on the number of enumerated variables.
pub const DEFAULT_ENUMERATION_CAP: usize = 26;

const RESYNC_INTERVAL: u64 = 1 << 16;

/// Global optimum with respect to the instance's sense. Among optimal
/// assignments the lexicographically smallest bitstring (entry 0 first) is
/// returned.
pub fn brute_force_optimum<T: Scalar>(q: &QuboInstance<T>) -> Result<(Assignment, T)> {
    brute_force_optimum_with_cap(q, DEFAULT_ENUMERATION_CAP)
}

pub fn brute_force_optimum_with_cap<T: Scalar>(
    q: &QuboInstance<T>,
    cap: usize,
) -> Result<(Assignment, T)> {
    let m = q.to_minimization();
    let n = m.n_vars();
    let adj = m.adjacency();

    let mut is_free = vec![false; n];
    for i in (0..n).rev() {
        if adj[i].iter().all(|&(j, _)| !is_free[j]) {
            is_free[i] = true;
        }
    }
    let walked: Vec<usize> = (0..n).filter(|&i| !is_free[i]).collect();
    let free: Vec<usize> = (0..n).filter(|&i| is_free[i]).collect();
    if walked.len() > cap {
        return Err(Error::Capacity {
            what: "enumerated variables",
            got: walked.len(),
            limit: cap,
        });
    }

    let mut x = vec![0u8; n];
    let mut field: Vec<T> = (0..n).map(|i| m.linear(i).clone()).collect();
    let mut base = m.offset().clone();
    let mut best: Option<Incumbent<T>> = None;

    let steps: u64 = 1u64 << walked.len();
    for t in 0..steps {
        if t > 0 {
            let v = walked[t.trailing_zeros() as usize];
            if x[v] == 0 {
                base = base + field[v].clone();
                x[v] = 1;
                for (j, c) in &adj[v] {
                    field[*j] = field[*j].clone() + c.clone();
                }
            } else {
                x[v] = 0;
                for (j, c) in &adj[v] {
                    field[*j] = field[*j].clone() - c.clone();
                }
                base = base - field[v].clone();
            }
            if t % RESYNC_INTERVAL == 0 {
                resync(&m, &adj, &x, &free, &mut field, &mut base);
            }
        }

        let mut value = base.clone();
        for &f in &free {
            if field[f] < T::zero() {
                value = value + field[f].clone();
            }
        }
        let approx = value.approx();

        let compete = match &best {
            None => Some(true),
            Some(b) => {
                let tol = 1e-9 * (1.0 + b.approx.abs());
                if approx < b.approx - tol {
                    Some(true)
                } else if approx <= b.approx + tol {
                    Some(false)
                } else {
                    None
                }
            }
        };
        let Some(strict) = compete else { continue };

        let mut bits = x.clone();
        for &f in &free {
            bits[f] = u8::from(field[f] < T::zero());
        }
        let exact = m.evaluate_bits(&bits);
        let take = match &best {
            None => true,
            Some(_) if strict => true,
            Some(b) => exact < b.exact || (exact == b.exact && bits < b.bits),
        };
        if take {
            best = Some(Incumbent {
                approx: exact.approx(),
                exact,
                bits,
            });
        }
    }

    let best = best.expect("at least one assignment is enumerated");
    let a = Assignment { bits: best.bits };
    let value = q.evaluate_bits(a.bits());
    Ok((a, value))
}

struct Incumbent<T> {
    approx: f64,
    exact: T,
    bits: Vec<u8>,
}

/// Recomputes fields and the walked-block energy from scratch to stop
/// floating-point drift from accumulating over long walks.
fn resync<T: Scalar>(
    m: &QuboInstance<T>,
    adj: &[Vec<(usize, T)>],
    x: &[u8],
    free: &[usize],
    field: &mut [T],
    base: &mut T,
) {
    for (i, f) in field.iter_mut().enumerate() {
        let mut v = m.linear(i).clone();
        for (j, c) in &adj[i] {
            if x[*j] == 1 {
                v = v + c.clone();
            }
        }
        *f = v;
    }
    // Free variables are zero in `x`, so this is the walked-block energy.
    debug_assert!(free.iter().all(|&f| x[f] == 0));
    *base = m.evaluate_bits(x);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::Sense;
    use num_rational::Rational64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Plain enumeration in lexicographic order, no structure exploited.
    fn naive<T: Scalar>(q: &QuboInstance<T>) -> (Vec<u8>, T) {
        let n = q.n_vars();
        let mut best: Option<(Vec<u8>, T)> = None;
        for idx in 0..(1usize << n) {
            // entry 0 is the most significant position so indices ascend lexicographically
            let bits: Vec<u8> = (0..n).map(|i| ((idx >> (n - 1 - i)) & 1) as u8).collect();
            let v = q.evaluate_bits(&bits);
            if best.as_ref().map_or(true, |(_, b)| q.sense().better(&v, b)) {
                best = Some((bits, v));
            }
        }
        best.unwrap()
    }

    fn random_qubo(rng: &mut ChaCha8Rng, n: usize, density: f64, sense: Sense) -> QuboInstance<Rational64> {
        let mut lin = Vec::new();
        let mut quad = Vec::new();
        for i in 0..n {
            if rng.gen_bool(0.7) {
                lin.push((i, Rational64::from(rng.gen_range(-5..=5))));
            }
            for j in (i + 1)..n {
                if rng.gen_bool(density) {
                    quad.push((i, j, Rational64::from(rng.gen_range(-5..=5))));
                }
            }
        }
        QuboInstance::new(n, sense, Rational64::from(0), lin, quad).unwrap()
    }

    #[test]
    fn single_negative_linear() {
        let q = QuboInstance::new(1, Sense::Minimize, 0.0, [(0, -1.0)], []).unwrap();
        let (a, v) = brute_force_optimum(&q).unwrap();
        assert_eq!(a.bits(), &[1]);
        assert_eq!(v, -1.0);
    }

    #[test]
    fn all_zero_ties_to_zero_string() {
        let q = QuboInstance::new(5, Sense::Minimize, 2.5, [], []).unwrap();
        let (a, v) = brute_force_optimum(&q).unwrap();
        assert_eq!(a.bits(), &[0, 0, 0, 0, 0]);
        assert_eq!(v, 2.5);
    }

    #[test]
    fn empty_instance() {
        let q = QuboInstance::<f64>::constant(Sense::Maximize, 1.0);
        let (a, v) = brute_force_optimum(&q).unwrap();
        assert!(a.is_empty());
        assert_eq!(v, 1.0);
    }

    #[test]
    fn capacity_error() {
        let quad: Vec<_> = (0..30).flat_map(|i| ((i + 1)..30).map(move |j| (i, j, 1.0))).collect();
        let q = QuboInstance::new(30, Sense::Minimize, 0.0, [], quad).unwrap();
        assert!(matches!(
            brute_force_optimum(&q),
            Err(Error::Capacity { got: 29, .. })
        ));
    }

    #[test]
    fn matches_naive_enumeration_including_tie_break() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for round in 0..200 {
            let n = rng.gen_range(1..=10);
            let density = [0.1, 0.3, 0.8][round % 3];
            let sense = if round % 2 == 0 { Sense::Minimize } else { Sense::Maximize };
            let q = random_qubo(&mut rng, n, density, sense);
            let (bits, v) = naive(&q);
            let (a, got) = brute_force_optimum(&q).unwrap();
            assert_eq!(got, v, "round {round}");
            assert_eq!(a.bits(), &bits[..], "round {round}");
        }
    }

    #[test]
    fn interleaved_free_variable_tie_break() {
        // x0 is free and x1 walked. Optima (0,1) and (1,0) tie at -1.
        let q = QuboInstance::new(3, Sense::Minimize, 0.0, [(0, -1.0), (1, -1.0)], [(0, 1, 1.0)])
            .unwrap();
        let (a, v) = brute_force_optimum(&q).unwrap();
        assert_eq!(v, -1.0);
        assert_eq!(a.bits(), &[0, 1, 0]);
    }

    #[test]
    fn not_worse_than_random_assignments() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let lin: Vec<_> = (0..18).map(|i| (i, rng.gen_range(-1.0..1.0))).collect();
        let quad: Vec<_> = (0..18)
            .flat_map(|i| ((i + 1)..18).map(move |j| (i, j)))
            .collect::<Vec<_>>()
            .into_iter()
            .filter_map(|(i, j)| rng.gen_bool(0.3).then(|| (i, j, rng.gen_range(-1.0..1.0))))
            .collect::<Vec<_>>();
        let q = QuboInstance::new(18, Sense::Minimize, 0.0, lin, quad).unwrap();
        let (_, best) = brute_force_optimum(&q).unwrap();
        for _ in 0..1000 {
            let bits: Vec<u8> = (0..18).map(|_| rng.gen_range(0..=1)).collect();
            assert!(best <= q.evaluate_bits(&bits) + 1e-12);
        }
    }

    #[test]
    fn argmin_invariant_under_offset_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let q = random_qubo(&mut rng, 8, 0.4, Sense::Minimize);
            let shifted = q.with_offset_shift(Rational64::new(17, 3));
            let (a, v) = brute_force_optimum(&q).unwrap();
            let (b, w) = brute_force_optimum(&shifted).unwrap();
            assert_eq!(a, b);
            assert_eq!(w - v, Rational64::new(17, 3));
        }
    }
}
