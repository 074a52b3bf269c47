use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{Assignment, QuboInstance};

/// Spin-glass form `E(s) = offset + sum_i h_i s_i + sum_{i<j} J_ij s_i s_j`
/// with `s_i in {+1, -1}`.
///
/// Bit `x_i = 0` corresponds to spin `+1` and `x_i = 1` to spin `-1`, i.e.
/// `x = (1 - s) / 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingInstance<T> {
    n_spins: usize,
    h: Vec<T>,
    j: BTreeMap<(usize, usize), T>,
    offset: T,
}

impl<T: Scalar> IsingInstance<T> {
    pub fn new(
        n_spins: usize,
        offset: T,
        h: impl IntoIterator<Item = (usize, T)>,
        couplings: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self> {
        if !offset.is_finite_value() {
            return Err(Error::InvalidTerm("offset is not finite".into()));
        }
        let mut fields = vec![T::zero(); n_spins];
        for (i, c) in h {
            if i >= n_spins || !c.is_finite_value() {
                return Err(Error::InvalidTerm(format!("bad field on spin {i}")));
            }
            fields[i] = fields[i].clone() + c;
        }
        let mut j = BTreeMap::new();
        for (a, b, c) in couplings {
            if a == b || a >= n_spins || b >= n_spins || !c.is_finite_value() {
                return Err(Error::InvalidTerm(format!("bad coupling ({a}, {b})")));
            }
            let key = if a < b { (a, b) } else { (b, a) };
            let e = j.entry(key).or_insert_with(T::zero);
            *e = e.clone() + c;
        }
        j.retain(|_, c: &mut T| !c.is_zero());
        Ok(Self {
            n_spins,
            h: fields,
            j,
            offset,
        })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn offset(&self) -> &T {
        &self.offset
    }

    pub fn field(&self, i: usize) -> &T {
        &self.h[i]
    }

    pub fn fields(&self) -> &[T] {
        &self.h
    }

    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize, &T)> + '_ {
        self.j.iter().map(|(&(a, b), c)| (a, b, c))
    }

    pub fn coupling(&self, a: usize, b: usize) -> Option<&T> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.j.get(&key)
    }

    /// Energy of a spin configuration given as `+1` / `-1` entries.
    pub fn energy(&self, spins: &[i8]) -> Result<T> {
        if spins.len() != self.n_spins {
            return Err(Error::Dimension {
                expected: self.n_spins,
                got: spins.len(),
            });
        }
        let s = |i: usize| -> T {
            if spins[i] >= 0 {
                T::one()
            } else {
                -T::one()
            }
        };
        let mut e = self.offset.clone();
        for (i, c) in self.h.iter().enumerate() {
            e = e + c.clone() * s(i);
        }
        for (&(a, b), c) in &self.j {
            e = e + c.clone() * s(a) * s(b);
        }
        Ok(e)
    }

    /// Energy of the spin image of a bit assignment.
    pub fn energy_of_bits(&self, a: &Assignment) -> Result<T> {
        let spins: Vec<i8> = a.bits().iter().map(|&b| if b == 0 { 1 } else { -1 }).collect();
        self.energy(&spins)
    }

    /// Energies of all `2^n` basis states; bit `i` of the index is spin `i`.
    pub fn energy_table(&self) -> Vec<T> {
        let n = self.n_spins;
        let size = 1usize << n;
        let mut table = Vec::with_capacity(size);
        for x in 0..size {
            let mut e = self.offset.clone();
            for (i, c) in self.h.iter().enumerate() {
                if (x >> i) & 1 == 0 {
                    e = e + c.clone();
                } else {
                    e = e - c.clone();
                }
            }
            for (&(a, b), c) in &self.j {
                if ((x >> a) ^ (x >> b)) & 1 == 0 {
                    e = e + c.clone();
                } else {
                    e = e - c.clone();
                }
            }
            table.push(e);
        }
        table
    }
}

/// Substitutes `x = (1 - s) / 2`. The energy of every spin image equals the
/// QUBO value of the original assignment; the objective sense is dropped and
/// must be handled by the caller (see [`QuboInstance::to_minimization`]).
pub fn qubo_to_ising<T: Scalar>(q: &QuboInstance<T>) -> IsingInstance<T> {
    let two = T::two();
    let four = two.clone() * two.clone();
    let n = q.n_vars();
    let mut h = vec![T::zero(); n];
    let mut offset = q.offset().clone();
    // c x_i = c/2 - c/2 s_i
    for (i, c) in q.linear_terms() {
        offset = offset + c.clone() / two.clone();
        h[i] = h[i].clone() - c.clone() / two.clone();
    }
    // c x_i x_j = c/4 (1 - s_i - s_j + s_i s_j)
    let mut j = BTreeMap::new();
    for (a, b, c) in q.quadratic_terms() {
        let quarter = c.clone() / four.clone();
        offset = offset + quarter.clone();
        h[a] = h[a].clone() - quarter.clone();
        h[b] = h[b].clone() - quarter.clone();
        j.insert((a, b), quarter);
    }
    IsingInstance {
        n_spins: n,
        h,
        j,
        offset,
    }
}
