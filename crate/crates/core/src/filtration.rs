//! Filtered complexes: the enriched nerve and the Vietoris–Rips complex.
//!
//! Cells are sorted by `(filtration, dimension, vertex tuple)` and identified
//! by their position in that order, so every face precedes its cofaces.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;

use crate::chain::SparseColumns;
use crate::error::{Error, Result};
use crate::metric::{is_nondegenerate, FiniteMetricSpace, Flag, ScaledDistances};

pub const DEFAULT_MAX_CELLS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComplexKind {
    Nerve,
    Rips,
}

impl fmt::Display for ComplexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComplexKind::Nerve => "nerve",
            ComplexKind::Rips => "rips",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub vertices: Vec<usize>,
    pub dim: usize,
    pub filtration: BigRational,
    /// `(cell id, coefficient)`, ids ascending.
    pub boundary: Vec<(usize, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredComplex {
    pub kind: ComplexKind,
    pub dim_max: usize,
    pub eps_max: BigRational,
    pub cells: Vec<Cell>,
}

impl FilteredComplex {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn count_by_dim(&self) -> Vec<usize> {
        let mut out = vec![0; self.dim_max + 1];
        for c in &self.cells {
            out[c.dim] += 1;
        }
        out
    }

    /// Distinct filtration values, ascending.
    pub fn critical_values(&self) -> Vec<BigRational> {
        let mut v: Vec<BigRational> = self.cells.iter().map(|c| c.filtration.clone()).collect();
        v.dedup();
        v
    }

    /// Check the order and monotonicity invariants.
    pub fn check_sorted(&self) -> Result<()> {
        for (id, cell) in self.cells.iter().enumerate() {
            if id > 0 && self.cells[id - 1].filtration > cell.filtration {
                return Err(Error::UnsortedComplex(id));
            }
            for &(face, _) in &cell.boundary {
                let ok = face < id
                    && self.cells[face].dim + 1 == cell.dim
                    && self.cells[face].filtration <= cell.filtration;
                if !ok {
                    return Err(Error::UnsortedComplex(id));
                }
            }
        }
        Ok(())
    }

    /// Boundary map `C_k -> C_{k-1}` with cells renumbered within each dimension.
    pub fn boundary_in_dim(&self, k: usize, upto: Option<&BigRational>) -> SparseColumns {
        let mut local = vec![usize::MAX; self.cells.len()];
        let mut counts = vec![0usize; self.dim_max + 2];
        for (id, c) in self.cells.iter().enumerate() {
            if upto.is_some_and(|e| &c.filtration > e) {
                continue;
            }
            local[id] = counts[c.dim];
            counts[c.dim] += 1;
        }
        let rows = if k == 0 { 0 } else { counts[k - 1] };
        let columns = self
            .cells
            .iter()
            .filter(|c| c.dim == k && upto.is_none_or(|e| &c.filtration <= e))
            .map(|c| if k == 0 { Vec::new() } else { c.boundary.iter().map(|&(f, s)| (local[f], s)).collect() })
            .collect();
        SparseColumns { rows, columns }
    }

    /// `id dim filtration boundary_ids signs`, one cell per line; empty lists are `-`.
    pub fn to_text(&self) -> String {
        let list = |xs: Vec<String>| if xs.is_empty() { "-".to_string() } else { xs.join(",") };
        self.cells
            .iter()
            .enumerate()
            .map(|(id, c)| {
                let ids = list(c.boundary.iter().map(|(f, _)| f.to_string()).collect());
                let signs = list(c.boundary.iter().map(|(_, s)| s.to_string()).collect());
                format!("{id} {} {} {ids} {signs}\n", c.dim, c.filtration)
            })
            .collect()
    }
}

fn assemble(
    kind: ComplexKind,
    dim_max: usize,
    eps_max: &BigRational,
    scaled: &ScaledDistances,
    mut raw: Vec<(u64, Vec<usize>)>,
) -> FilteredComplex {
    raw.sort_by(|(fa, va), (fb, vb)| (fa, va.len(), va).cmp(&(fb, vb.len(), vb)));
    let index: HashMap<&[usize], usize> = raw.iter().enumerate().map(|(i, (_, v))| (v.as_slice(), i)).collect();
    let cells = raw
        .iter()
        .map(|(f, v)| {
            let mut boundary: BTreeMap<usize, i64> = BTreeMap::new();
            if v.len() > 1 {
                for i in 0..v.len() {
                    let mut face = v.clone();
                    face.remove(i);
                    if !is_nondegenerate(&face) {
                        continue;
                    }
                    let id = index[face.as_slice()];
                    *boundary.entry(id).or_default() += if i % 2 == 0 { 1 } else { -1 };
                }
            }
            Cell {
                vertices: v.clone(),
                dim: v.len() - 1,
                filtration: scaled.to_grade(*f),
                boundary: boundary.into_iter().filter(|&(_, c)| c != 0).collect(),
            }
        })
        .collect();
    FilteredComplex { kind, dim_max, eps_max: eps_max.clone(), cells }
}

/// One cell per nondegenerate tuple of degree `<= dim_max` and length
/// `<= eps_max`, filtered by length, with the full simplicial boundary.
pub fn build_enriched_nerve(space: &FiniteMetricSpace, dim_max: usize, eps_max: &BigRational) -> Result<FilteredComplex> {
    build_enriched_nerve_with_cap(space, dim_max, eps_max, DEFAULT_MAX_CELLS)
}

pub fn build_enriched_nerve_with_cap(
    space: &FiniteMetricSpace,
    dim_max: usize,
    eps_max: &BigRational,
    max_cells: usize,
) -> Result<FilteredComplex> {
    space.require(&[Flag::ZeroDiagonal, Flag::Separated, Flag::TriangleOk])?;
    let scaled = space.scaled();
    let mut raw = Vec::new();
    if let Some(bound) = scaled.floor_bound(eps_max) {
        scaled.for_each_tuple(dim_max, bound, true, &mut |t, len| {
            if raw.len() == max_cells {
                return Err(Error::ResourceBound { what: "cell", count: max_cells + 1, cap: max_cells });
            }
            raw.push((len, t.to_vec()));
            Ok(())
        })?;
    }
    Ok(assemble(ComplexKind::Nerve, dim_max, eps_max, scaled, raw))
}

/// One cell per strictly increasing vertex tuple of size `<= dim_max + 1`
/// with diameter `<= eps_max`, filtered by diameter.
pub fn build_vietoris_rips(space: &FiniteMetricSpace, dim_max: usize, eps_max: &BigRational) -> Result<FilteredComplex> {
    build_vietoris_rips_with_cap(space, dim_max, eps_max, DEFAULT_MAX_CELLS)
}

pub fn build_vietoris_rips_with_cap(
    space: &FiniteMetricSpace,
    dim_max: usize,
    eps_max: &BigRational,
    max_cells: usize,
) -> Result<FilteredComplex> {
    space.require(&[Flag::Symmetric, Flag::Separated, Flag::ZeroDiagonal])?;
    let scaled = space.scaled();
    let mut raw = Vec::new();
    if let Some(bound) = scaled.floor_bound(eps_max) {
        let mut stack = Vec::with_capacity(dim_max + 1);
        for v in 0..space.len() {
            stack.push(v);
            extend_rips(scaled, &mut stack, 0, dim_max, bound, max_cells, &mut raw)?;
            stack.pop();
        }
    }
    Ok(assemble(ComplexKind::Rips, dim_max, eps_max, scaled, raw))
}

fn extend_rips(
    scaled: &ScaledDistances,
    stack: &mut Vec<usize>,
    diam: u64,
    dim_max: usize,
    bound: u64,
    max_cells: usize,
    out: &mut Vec<(u64, Vec<usize>)>,
) -> Result<()> {
    if out.len() == max_cells {
        return Err(Error::ResourceBound { what: "cell", count: max_cells + 1, cap: max_cells });
    }
    out.push((diam, stack.clone()));
    if stack.len() > dim_max {
        return Ok(());
    }
    let last = *stack.last().expect("non-empty");
    'next: for v in last + 1..scaled.size() {
        let mut d = diam;
        for &u in stack.iter() {
            match scaled.step(u, v) {
                Some(s) if s <= bound => d = d.max(s),
                _ => continue 'next,
            }
        }
        stack.push(v);
        extend_rips(scaled, stack, d, dim_max, bound, max_cells, out)?;
        stack.pop();
    }
    Ok(())
}
