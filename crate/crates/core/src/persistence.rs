//! Persistence over a prime field, blurred magnitude homology, and the
//! direct sublevel chain complex used to cross-check it.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_rational::BigRational;

use crate::chain::{check_prime, inverse_mod, mul_mod, reduce_mod, SparseColumns};
use crate::error::{Error, Result};
use crate::filtration::{build_enriched_nerve_with_cap, FilteredComplex, DEFAULT_MAX_CELLS};
use crate::metric::{is_nondegenerate, FiniteMetricSpace, Flag};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Bar {
    pub degree: usize,
    pub birth: BigRational,
    /// `None` when the class survives up to `eps_max`.
    pub death: Option<BigRational>,
}

impl Bar {
    pub fn contains(&self, eps: &BigRational) -> bool {
        &self.birth <= eps && self.death.as_ref().is_none_or(|d| eps < d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Barcode {
    pub prime: u64,
    /// Sorted by degree, birth, then death (infinite last).
    pub bars: Vec<Bar>,
    /// Degrees below this value are exact; higher ones may be truncation artifacts.
    pub complete_below: usize,
    pub eps_max: BigRational,
}

impl Barcode {
    pub fn in_degree(&self, k: usize) -> impl Iterator<Item = &Bar> {
        self.bars.iter().filter(move |b| b.degree == k)
    }

    /// Number of bars in degree `k` with `birth <= eps < death`.
    pub fn alive_at(&self, k: usize, eps: &BigRational) -> usize {
        self.in_degree(k).filter(|b| b.contains(eps)).count()
    }

    pub fn is_complete(&self, k: usize) -> bool {
        k < self.complete_below
    }

    /// Degrees that carry bars but are not guaranteed exact.
    pub fn incomplete_degrees(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.bars.iter().map(|b| b.degree).filter(|&k| !self.is_complete(k)).collect();
        out.dedup();
        out
    }

    /// `k<TAB>birth<TAB>death`, one bar per line, `inf` for infinite death.
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        for b in &self.bars {
            let death = b.death.as_ref().map_or("inf".to_string(), |d| d.to_string());
            let _ = writeln!(s, "{}\t{}\t{}", b.degree, b.birth, death);
        }
        s
    }
}

fn axpy_mod(target: &mut Vec<(usize, u64)>, factor: u64, source: &[(usize, u64)], p: u64) {
    let mut out = Vec::with_capacity(target.len() + source.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < source.len() {
        let ti = target.get(i).map_or(usize::MAX, |e| e.0);
        let sj = source.get(j).map_or(usize::MAX, |e| e.0);
        if ti < sj {
            out.push(target[i]);
            i += 1;
        } else if sj < ti {
            out.push((sj, mul_mod(factor, source[j].1, p)));
            j += 1;
        } else {
            let v = (target[i].1 + mul_mod(factor, source[j].1, p)) % p;
            if v != 0 {
                out.push((ti, v));
            }
            i += 1;
            j += 1;
        }
    }
    *target = out;
}

/// Column reduction of the filtered boundary matrix over `F_p`.
pub fn reduce_persistence(complex: &FilteredComplex, p: u64) -> Result<Barcode> {
    check_prime(p)?;
    complex.check_sorted()?;
    let n = complex.cells.len();
    let mut columns: Vec<Vec<(usize, u64)>> = Vec::with_capacity(n);
    let mut pivot_owner: HashMap<usize, usize> = HashMap::new();
    let mut paired = vec![false; n];
    let mut bars = Vec::new();
    for (j, cell) in complex.cells.iter().enumerate() {
        let mut col: Vec<(usize, u64)> =
            cell.boundary.iter().map(|&(i, c)| (i, reduce_mod(c, p))).filter(|e| e.1 != 0).collect();
        while let Some(&(low, v)) = col.last() {
            let Some(&owner) = pivot_owner.get(&low) else { break };
            let w = columns[owner].last().expect("pivot column non-empty").1;
            let factor = mul_mod(p - v, inverse_mod(w, p), p);
            axpy_mod(&mut col, factor, &columns[owner], p);
        }
        if let Some(&(low, _)) = col.last() {
            pivot_owner.insert(low, j);
            paired[low] = true;
            paired[j] = true;
            let birth = &complex.cells[low].filtration;
            if birth != &cell.filtration {
                bars.push(Bar { degree: cell.dim - 1, birth: birth.clone(), death: Some(cell.filtration.clone()) });
            }
        }
        columns.push(col);
    }
    for (i, cell) in complex.cells.iter().enumerate() {
        if !paired[i] {
            bars.push(Bar { degree: cell.dim, birth: cell.filtration.clone(), death: None });
        }
    }
    bars.sort_by(|a, b| {
        (a.degree, &a.birth)
            .cmp(&(b.degree, &b.birth))
            .then_with(|| match (&a.death, &b.death) {
                (Some(x), Some(y)) => x.cmp(y),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => std::cmp::Ordering::Equal,
            })
    });
    Ok(Barcode { prime: p, bars, complete_below: complex.dim_max, eps_max: complex.eps_max.clone() })
}

/// Blurred magnitude homology: persistence of the enriched nerve.
pub fn blurred_mh(space: &FiniteMetricSpace, dim_max: usize, eps_max: &BigRational, p: u64) -> Result<Barcode> {
    blurred_mh_with_cap(space, dim_max, eps_max, p, DEFAULT_MAX_CELLS)
}

pub fn blurred_mh_with_cap(
    space: &FiniteMetricSpace,
    dim_max: usize,
    eps_max: &BigRational,
    p: u64,
    max_cells: usize,
) -> Result<Barcode> {
    check_prime(p)?;
    let complex = build_enriched_nerve_with_cap(space, dim_max, eps_max, max_cells)?;
    reduce_persistence(&complex, p)
}

/// Chain complex spanned by all tuples of length `<= eps`, in degrees `0..=n_max`,
/// with the alternating simplicial boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SublevelComplex {
    pub eps: BigRational,
    pub n_max: usize,
    pub include_degenerate: bool,
    /// Generators per degree, lexicographic.
    pub generators: Vec<Vec<Vec<usize>>>,
    /// `boundaries[n]` maps degree `n` to degree `n - 1`; `boundaries[0]` is empty.
    pub boundaries: Vec<SparseColumns>,
}

impl SublevelComplex {
    /// Betti numbers over `F_p` in degrees `0..n_max`.
    pub fn betti(&self, p: u64) -> Result<Vec<usize>> {
        check_prime(p)?;
        let ranks = self.boundaries.iter().map(|b| b.rank_mod_p(p)).collect::<Result<Vec<_>>>()?;
        Ok((0..self.n_max)
            .map(|k| self.generators[k].len() - ranks[k] - ranks.get(k + 1).copied().unwrap_or(0))
            .collect())
    }

    pub fn boundary_squares_to_zero(&self) -> bool {
        (2..self.boundaries.len()).all(|n| self.boundaries[n - 1].composes_to_zero(&self.boundaries[n]))
    }
}

/// The sublevel chain complex at `eps`, built directly from tuples.
///
/// With `include_degenerate`, tuples with repeated neighbours are kept and
/// every face is counted, giving the unnormalized complex.
pub fn coend_complex_at(
    space: &FiniteMetricSpace,
    eps: &BigRational,
    n_max: usize,
    include_degenerate: bool,
) -> Result<SublevelComplex> {
    coend_complex_with_cap(space, eps, n_max, include_degenerate, DEFAULT_MAX_CELLS)
}

pub fn coend_complex_with_cap(
    space: &FiniteMetricSpace,
    eps: &BigRational,
    n_max: usize,
    include_degenerate: bool,
    max_cells: usize,
) -> Result<SublevelComplex> {
    if eps < &BigRational::from_integer(0.into()) {
        return Err(Error::Usage(format!("eps must be non-negative, got {eps}")));
    }
    let mut require = vec![Flag::ZeroDiagonal, Flag::TriangleOk];
    if !include_degenerate {
        require.push(Flag::Separated);
    }
    space.require(&require)?;
    let scaled = space.scaled();
    let mut generators: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n_max + 1];
    let mut count = 0usize;
    if let Some(bound) = scaled.floor_bound(eps) {
        scaled.for_each_tuple(n_max, bound, !include_degenerate, &mut |t, _| {
            count += 1;
            if count > max_cells {
                return Err(Error::ResourceBound { what: "cell", count, cap: max_cells });
            }
            generators[t.len() - 1].push(t.to_vec());
            Ok(())
        })?;
    }
    for g in &mut generators {
        g.sort();
    }
    let mut boundaries = vec![SparseColumns { rows: 0, columns: vec![Vec::new(); generators[0].len()] }];
    for n in 1..=n_max {
        let index: HashMap<&[usize], usize> =
            generators[n - 1].iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
        let columns = generators[n]
            .iter()
            .map(|t| {
                let mut acc: HashMap<usize, i64> = HashMap::new();
                for i in 0..t.len() {
                    let mut face = t.clone();
                    face.remove(i);
                    if !include_degenerate && !is_nondegenerate(&face) {
                        continue;
                    }
                    let row = index[face.as_slice()];
                    *acc.entry(row).or_default() += if i % 2 == 0 { 1 } else { -1 };
                }
                let mut col: Vec<(usize, i64)> = acc.into_iter().filter(|e| e.1 != 0).collect();
                col.sort_unstable();
                col
            })
            .collect();
        boundaries.push(SparseColumns { rows: generators[n - 1].len(), columns });
    }
    Ok(SublevelComplex { eps: eps.clone(), n_max, include_degenerate, generators, boundaries })
}
