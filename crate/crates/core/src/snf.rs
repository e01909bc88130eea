//! Smith normal form over the integers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = IntMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Bareiss determinant of a square matrix.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut prev = BigInt::one();
        let mut negate = false;
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        negate = !negate;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = t / &prev;
                }
            }
            prev = a[(k, k)].clone();
        }
        let d = a[(n - 1, n - 1)].clone();
        if negate {
            -d
        } else {
            d
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] -= q · row[src]
    fn sub_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j];
            if !s.is_zero() {
                let t = s * q;
                self.data[dst * self.cols + j] -= t;
            }
        }
    }

    /// col[dst] -= q · col[src]
    fn sub_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + src];
            if !s.is_zero() {
                let t = s * q;
                self.data[i * self.cols + dst] -= t;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = &mut self.data[r * self.cols + j];
            *v = -std::mem::take(v);
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// `U · M · V = D` with `U`, `V` unimodular and `D` diagonal with
/// non-negative entries `d_1 | d_2 | …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let mut d = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    diagonalize(&mut d, Some((&mut u, &mut v)));
    SmithForm { d, u, v }
}

/// Nonzero diagonal entries of the Smith form, without the transforms.
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    let mut d = m.clone();
    diagonalize(&mut d, None);
    (0..d.rows.min(d.cols)).map(|i| d[(i, i)].clone()).filter(|x| !x.is_zero()).collect()
}

fn min_abs_in(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < a[(bi, bj)].abs()) {
                best = Some((i, j));
                if x.abs().is_one() {
                    return best;
                }
            }
        }
    }
    best
}

fn diagonalize(a: &mut IntMatrix, mut transforms: Option<(&mut IntMatrix, &mut IntMatrix)>) {
    let n = a.rows.min(a.cols);
    for t in 0..n {
        let Some((pi, pj)) = min_abs_in(a, t) else {
            break;
        };
        swap_rows(a, &mut transforms, t, pi);
        swap_cols(a, &mut transforms, t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..a.rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = a[(i, t)].div_floor(&a[(t, t)]);
                row_sub(a, &mut transforms, i, t, &q);
                clean &= a[(i, t)].is_zero();
            }
            for j in t + 1..a.cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = a[(t, j)].div_floor(&a[(t, t)]);
                col_sub(a, &mut transforms, j, t, &q);
                clean &= a[(t, j)].is_zero();
            }
            if !clean {
                // A remainder smaller than the pivot survived; move it to the pivot.
                let row_min = (t + 1..a.rows)
                    .filter(|&i| !a[(i, t)].is_zero())
                    .min_by_key(|&i| a[(i, t)].abs());
                let col_min = (t + 1..a.cols)
                    .filter(|&j| !a[(t, j)].is_zero())
                    .min_by_key(|&j| a[(t, j)].abs());
                match (row_min, col_min) {
                    (Some(i), Some(j)) if a[(t, j)].abs() < a[(i, t)].abs() => swap_cols(a, &mut transforms, t, j),
                    (Some(i), _) => swap_rows(a, &mut transforms, t, i),
                    (None, Some(j)) => swap_cols(a, &mut transforms, t, j),
                    (None, None) => {}
                }
                continue;
            }
            // Row and column are clear; enforce divisibility of the rest.
            let offender = (t + 1..a.rows).find(|&i| {
                (t + 1..a.cols).any(|j| !a[(i, j)].is_multiple_of(&a[(t, t)]))
            });
            match offender {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_sub(a, &mut transforms, t, i, &minus_one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            if let Some((u, _)) = transforms.as_mut() {
                u.negate_row(t);
            }
        }
    }
}

fn swap_rows(a: &mut IntMatrix, tr: &mut Option<(&mut IntMatrix, &mut IntMatrix)>, x: usize, y: usize) {
    a.swap_rows(x, y);
    if let Some((u, _)) = tr.as_mut() {
        u.swap_rows(x, y);
    }
}

fn swap_cols(a: &mut IntMatrix, tr: &mut Option<(&mut IntMatrix, &mut IntMatrix)>, x: usize, y: usize) {
    a.swap_cols(x, y);
    if let Some((_, v)) = tr.as_mut() {
        v.swap_cols(x, y);
    }
}

fn row_sub(a: &mut IntMatrix, tr: &mut Option<(&mut IntMatrix, &mut IntMatrix)>, dst: usize, src: usize, q: &BigInt) {
    a.sub_row(dst, src, q);
    if let Some((u, _)) = tr.as_mut() {
        u.sub_row(dst, src, q);
    }
}

fn col_sub(a: &mut IntMatrix, tr: &mut Option<(&mut IntMatrix, &mut IntMatrix)>, dst: usize, src: usize, q: &BigInt) {
    a.sub_col(dst, src, q);
    if let Some((_, v)) = tr.as_mut() {
        v.sub_col(dst, src, q);
    }
}
