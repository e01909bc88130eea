//! Shared fixtures, random spaces and brute-force oracles for the
//! integration tests. Nothing here calls into the library's algorithms
//! beyond constructing and reading spaces.

#![allow(dead_code)]

use magnipersist::{ExtRational, FiniteMetricSpace};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn one_point() -> FiniteMetricSpace {
    FiniteMetricSpace::from_integers(&[&[0]]).unwrap()
}

pub fn two_points() -> FiniteMetricSpace {
    FiniteMetricSpace::from_integers(&[&[0, 1], &[1, 0]]).unwrap()
}

pub fn t3() -> FiniteMetricSpace {
    FiniteMetricSpace::from_integers(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]).unwrap()
}

pub fn e3() -> FiniteMetricSpace {
    FiniteMetricSpace::from_integers(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]).unwrap()
}

/// Unit square corners under L1.
pub fn square() -> FiniteMetricSpace {
    FiniteMetricSpace::from_integers(&[&[0, 1, 2, 1], &[1, 0, 1, 2], &[2, 1, 0, 1], &[1, 2, 1, 0]]).unwrap()
}

pub fn fixtures() -> Vec<(&'static str, FiniteMetricSpace)> {
    vec![("one", one_point()), ("two", two_points()), ("t3", t3()), ("e3", e3()), ("square", square())]
}

pub fn acceptance_values() -> Vec<BigRational> {
    vec![r(1, 2), r(1, 1), r(3, 2), r(2, 1), r(3, 1)]
}

fn triangle_ok(d: &[Vec<BigRational>]) -> bool {
    let m = d.len();
    (0..m).all(|i| (0..m).all(|j| (0..m).all(|k| &d[i][j] + &d[j][k] >= d[i][k])))
}

fn to_space(d: Vec<Vec<BigRational>>) -> FiniteMetricSpace {
    let matrix: Vec<Vec<ExtRational>> = d.into_iter().map(|row| row.into_iter().map(ExtRational::Finite).collect()).collect();
    magnipersist::metric::validate_space(matrix, &[]).unwrap()
}

/// Separated space on `m` points with off-diagonal distances drawn from
/// `values`, resampled until the triangle inequality holds.
pub fn random_space<R: Rng>(rng: &mut R, m: usize, values: &[BigRational], symmetric: bool) -> FiniteMetricSpace {
    loop {
        let mut d = vec![vec![BigRational::zero(); m]; m];
        for i in 0..m {
            for j in 0..m {
                if i == j || (symmetric && j < i) {
                    continue;
                }
                let v = values.choose(rng).unwrap().clone();
                if symmetric {
                    d[j][i] = v.clone();
                }
                d[i][j] = v;
            }
        }
        if triangle_ok(&d) {
            return to_space(d);
        }
    }
}

/// Shortest-path closure of arbitrary positive weights: always a metric.
pub fn metric_closure(weights: &[Vec<BigRational>]) -> FiniteMetricSpace {
    let m = weights.len();
    let mut d: Vec<Vec<BigRational>> = weights.to_vec();
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = BigRational::zero();
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                let via = &d[i][k] + &d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    to_space(d)
}

/// Distinct integer grid points under L1.
pub fn random_grid_space<R: Rng>(rng: &mut R, m: usize, side: i64) -> FiniteMetricSpace {
    let mut pts: Vec<(i64, i64)> = Vec::new();
    while pts.len() < m {
        let p = (rng.gen_range(0..side), rng.gen_range(0..side));
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    let d: Vec<Vec<BigRational>> = pts
        .iter()
        .map(|a| pts.iter().map(|b| r((a.0 - b.0).abs() + (a.1 - b.1).abs(), 1)).collect())
        .collect();
    to_space(d)
}

pub fn random_permutation<R: Rng>(rng: &mut R, m: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..m).collect();
    p.shuffle(rng);
    p
}

/// Every symmetric space on at most three points with distances in `values`.
pub fn all_small_spaces(values: &[BigRational]) -> Vec<FiniteMetricSpace> {
    let mut out = vec![one_point()];
    for a in values {
        out.push(to_space(vec![vec![r(0, 1), a.clone()], vec![a.clone(), r(0, 1)]]));
    }
    for a in values {
        for b in values {
            for c in values {
                let d = vec![
                    vec![r(0, 1), a.clone(), b.clone()],
                    vec![a.clone(), r(0, 1), c.clone()],
                    vec![b.clone(), c.clone(), r(0, 1)],
                ];
                if triangle_ok(&d) {
                    out.push(to_space(d));
                }
            }
        }
    }
    out
}

fn dist(space: &FiniteMetricSpace, i: usize, j: usize) -> BigRational {
    space.dist(i, j).finite().expect("finite distance").clone()
}

pub fn length(space: &FiniteMetricSpace, t: &[usize]) -> BigRational {
    t.windows(2).map(|w| dist(space, w[0], w[1])).fold(BigRational::zero(), |a, b| a + b)
}

/// All tuples of `n + 1` points, in odometer order.
pub fn all_tuples(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut t = vec![0usize; n + 1];
    if m == 0 {
        return out;
    }
    loop {
        out.push(t.clone());
        let mut i = n + 1;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < m {
                break;
            }
            t[i] = 0;
        }
    }
}

pub fn nondegenerate(t: &[usize]) -> bool {
    t.windows(2).all(|w| w[0] != w[1])
}

/// Rank of a rational matrix by Gaussian elimination.
pub fn rank_q(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(rank, p);
        for i in 0..rows.len() {
            if i != rank && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &rows[rank][c];
                for k in c..cols {
                    let v = &f * &rows[rank][k];
                    rows[i][k] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank over `F_p`.
pub fn rank_mod(rows: &[Vec<i64>], p: i64) -> usize {
    let mut a: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|x| x.rem_euclid(p)).collect()).collect();
    let cols = a.first().map_or(0, Vec::len);
    let inv = |x: i64| (1..p).find(|y| (x * y) % p == 1).unwrap();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, piv);
        let s = inv(a[rank][c]);
        for k in 0..cols {
            a[rank][k] = a[rank][k] * s % p;
        }
        for i in 0..a.len() {
            if i != rank && a[i][c] != 0 {
                let f = a[i][c];
                for k in 0..cols {
                    a[i][k] = (a[i][k] - f * a[rank][k]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Normalized magnitude chains of degree `n` and length exactly `l`.
pub fn mh_chains(space: &FiniteMetricSpace, n: usize, l: &BigRational) -> Vec<Vec<usize>> {
    all_tuples(space.len(), n).into_iter().filter(|t| nondegenerate(t) && &length(space, t) == l).collect()
}

/// Magnitude boundary `C_n -> C_{n-1}` at grade `l`, rows indexed by `target`.
pub fn mh_boundary_matrix(space: &FiniteMetricSpace, source: &[Vec<usize>], target: &[Vec<usize>]) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0i64; source.len()]; target.len()];
    for (j, t) in source.iter().enumerate() {
        let n = t.len() - 1;
        for i in 1..n {
            let direct = dist(space, t[i - 1], t[i + 1]);
            if dist(space, t[i - 1], t[i]) + dist(space, t[i], t[i + 1]) != direct {
                continue;
            }
            let mut face = t.clone();
            face.remove(i);
            if !nondegenerate(&face) {
                continue;
            }
            let row = target.iter().position(|x| *x == face).expect("face in target");
            m[row][j] += if i % 2 == 0 { 1 } else { -1 };
        }
    }
    m
}

fn to_q(m: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    m.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect()
}

/// `(rank over Q, rank over F_2, rank over F_3)` of normalized MH at `(n, l)`.
pub fn mh_ranks_oracle(space: &FiniteMetricSpace, n: usize, l: &BigRational) -> (usize, usize, usize) {
    let c_n = mh_chains(space, n, l);
    let c_up = mh_chains(space, n + 1, l);
    let out = if n == 0 { Vec::new() } else { mh_boundary_matrix(space, &c_n, &mh_chains(space, n - 1, l)) };
    let inc = mh_boundary_matrix(space, &c_up, &c_n);
    let dim = c_n.len();
    let q = dim - rank_q(to_q(&out)) - rank_q(to_q(&inc));
    let f = |p| dim - rank_mod(&out, p) - rank_mod(&inc, p);
    (q, f(2), f(3))
}

/// Signed count of nondegenerate tuples of length exactly `l`.
pub fn signed_tuple_count(space: &FiniteMetricSpace, l: &BigRational) -> BigInt {
    let Some(delta) = space.min_positive_distance() else {
        return if l.is_zero() { BigInt::from(space.len()) } else { BigInt::zero() };
    };
    let max_n = (l / &delta).floor().to_integer().try_into().unwrap_or(0usize);
    (0..=max_n)
        .map(|n| {
            let c = BigInt::from(mh_chains(space, n, l).len());
            if n % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .sum()
}

/// lcm of the distance denominators.
pub fn lattice_denominator(space: &FiniteMetricSpace) -> u64 {
    use num_integer::Integer;
    let mut n = BigInt::one();
    for i in 0..space.len() {
        for j in 0..space.len() {
            n = n.lcm(dist(space, i, j).denom());
        }
    }
    n.try_into().unwrap()
}

/// Magnitude at `q = u^N` by solving `Z w = 1` over the rationals.
pub fn magnitude_at_u(space: &FiniteMetricSpace, u: &BigRational) -> Option<BigRational> {
    let n = lattice_denominator(space);
    let m = space.len();
    let mut a: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..m)
                .map(|j| {
                    let e: u64 = (dist(space, i, j) * BigInt::from(n)).to_integer().try_into().unwrap();
                    num_traits::pow(u.clone(), e as usize)
                })
                .collect();
            row.push(BigRational::one());
            row
        })
        .collect();
    for c in 0..m {
        let p = (c..m).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        for i in 0..m {
            if i != c && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[c][c];
                for k in c..=m {
                    let v = &f * &a[c][k];
                    a[i][k] -= v;
                }
            }
        }
    }
    Some((0..m).map(|i| &a[i][m] / &a[i][i]).fold(BigRational::zero(), |s, x| s + x))
}

/// Coefficients of `num/den` as a power series, by long division.
pub fn series_of(num: &[i64], den: &[i64], terms: usize) -> Vec<BigRational> {
    let mut rem: Vec<BigRational> = num.iter().map(|&c| r(c, 1)).collect();
    rem.resize(terms + den.len(), BigRational::zero());
    let mut out = Vec::with_capacity(terms);
    for k in 0..terms {
        let c = &rem[k] / r(den[0], 1);
        for (j, &d) in den.iter().enumerate() {
            let v = &c * r(d, 1);
            rem[k + j] -= v;
        }
        out.push(c);
    }
    out
}
