//! Sparse boundary matrices and linear algebra over prime fields.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::snf::IntMatrix;

/// Dense elimination refuses matrices with more entries than this.
pub const MAX_DENSE_ENTRIES: usize = 50_000_000;

/// Sparse integer matrix stored by columns as `(row, coefficient)` lists.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseColumns {
    pub rows: usize,
    pub columns: Vec<Vec<(usize, i64)>>,
}

impl SparseColumns {
    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn to_dense(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, self.columns.len());
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, c) in col {
                m[(i, j)] += c;
            }
        }
        m
    }

    /// `self ∘ rhs` is zero (`rhs` maps into the domain of `self`).
    pub fn composes_to_zero(&self, rhs: &SparseColumns) -> bool {
        rhs.columns.iter().all(|col| {
            let mut acc: HashMap<usize, i64> = HashMap::new();
            for &(k, c) in col {
                for &(i, d) in &self.columns[k] {
                    *acc.entry(i).or_default() += c * d;
                }
            }
            acc.values().all(|v| *v == 0)
        })
    }

    /// Rank over `F_p` by dense row reduction.
    pub fn rank_mod_p(&self, p: u64) -> Result<usize> {
        let (rows, cols) = (self.rows, self.columns.len());
        if rows == 0 || cols == 0 {
            return Ok(0);
        }
        if rows.saturating_mul(cols) > MAX_DENSE_ENTRIES {
            return Err(Error::ResourceBound { what: "dense matrix entry", count: rows * cols, cap: MAX_DENSE_ENTRIES });
        }
        let mut a = vec![vec![0u64; cols]; rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, c) in col {
                a[i][j] = (a[i][j] + reduce_mod(c, p)) % p;
            }
        }
        let mut rank = 0;
        for j in 0..cols {
            let Some(pivot) = (rank..rows).find(|&i| a[i][j] != 0) else {
                continue;
            };
            a.swap(rank, pivot);
            let inv = inverse_mod(a[rank][j], p);
            for x in a[rank][j..].iter_mut() {
                *x = mul_mod(*x, inv, p);
            }
            for i in 0..rows {
                if i == rank || a[i][j] == 0 {
                    continue;
                }
                let f = a[i][j];
                for c in j..cols {
                    let sub = mul_mod(f, a[rank][c], p);
                    a[i][c] = (a[i][c] + p - sub) % p;
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        Ok(rank)
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NonPrimeCharacteristic(p))
    }
}

#[inline]
pub(crate) fn reduce_mod(c: i64, p: u64) -> u64 {
    (c as i128).rem_euclid(p as i128) as u64
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn inverse_mod(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2)
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}
