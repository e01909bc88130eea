//! Magnitude homology.
//!
//! For each grade `l` the chain complex is free on tuples of length exactly
//! `l`; the `i`-th face survives only when deleting `x_i` keeps the length
//! (for inner faces: `x_i` lies on a geodesic between its neighbours; for end
//! faces: the end step has length zero). Homology is read off Smith normal
//! forms of the boundary matrices.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::chain::SparseColumns;
use crate::error::{Error, Result};
use crate::magnitude::{magnitude_rational, magnitude_series};
use crate::metric::{is_nondegenerate, FiniteMetricSpace, Flag, ScaledDistances, Tuple};
use crate::snf::{invariant_factors, IntMatrix};

pub const DEFAULT_MAX_GENERATORS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    /// Tuples with consecutive repeats are quotiented out.
    #[default]
    Normalized,
    Unnormalized,
}

impl Mode {
    fn normalized(self) -> bool {
        self == Mode::Normalized
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normalized" => Ok(Mode::Normalized),
            "unnormalized" => Ok(Mode::Unnormalized),
            other => Err(Error::Usage(format!("unknown mode `{other}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Normalized => "normalized",
            Mode::Unnormalized => "unnormalized",
        })
    }
}

/// Generators of bidegree `(n, l)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedChainBlock {
    pub degree: usize,
    pub grade: BigRational,
    pub mode: Mode,
    pub generators: Vec<Tuple>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct HomologyGroup {
    pub rank: usize,
    /// Invariant factors `>= 2`, each dividing the next.
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn free(rank: usize) -> Self {
        HomologyGroup { rank, torsion: Vec::new() }
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.rank > 0 {
            parts.push(format!("Z^{}", self.rank));
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MHTable {
    pub n_max: usize,
    pub l_max: BigRational,
    pub mode: Mode,
    pub spectrum: Vec<BigRational>,
    /// Keyed by `(grade, degree)`.
    pub groups: BTreeMap<(BigRational, usize), HomologyGroup>,
}

impl MHTable {
    /// The group at `(n, l)`; grades outside the spectrum are zero.
    pub fn get(&self, n: usize, l: &BigRational) -> HomologyGroup {
        self.groups.get(&(l.clone(), n)).cloned().unwrap_or_default()
    }

    /// `n  l  rank  torsion` rows ordered by degree then grade.
    pub fn to_tsv(&self) -> String {
        let mut rows: Vec<_> = self.groups.iter().collect();
        rows.sort_by(|((l1, n1), _), ((l2, n2), _)| (n1, l1).cmp(&(n2, l2)));
        rows.into_iter()
            .map(|((l, n), g)| {
                let torsion: Vec<String> = g.torsion.iter().map(ToString::to_string).collect();
                format!("{n}\t{l}\t{}\t{}\n", g.rank, torsion.join(","))
            })
            .collect()
    }
}

fn exact_grade(scaled: &ScaledDistances, l: &BigRational) -> Option<u64> {
    scaled.exact_scaled(l)
}

/// All tuples of degree `n` and length exactly `l`, lexicographic.
pub fn mh_generators(space: &FiniteMetricSpace, n: usize, l: &BigRational, mode: Mode) -> Vec<Tuple> {
    let scaled = space.scaled();
    let Some(target) = exact_grade(scaled, l) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    scaled
        .for_each_tuple(n, target, mode.normalized(), &mut |t, len| {
            if t.len() == n + 1 && len == target {
                out.push(Tuple::from_parts(t.to_vec(), l.clone()));
            }
            Ok(())
        })
        .expect("infallible visitor");
    out
}

pub fn chain_block(space: &FiniteMetricSpace, n: usize, l: &BigRational, mode: Mode) -> GradedChainBlock {
    GradedChainBlock { degree: n, grade: l.clone(), mode, generators: mh_generators(space, n, l, mode) }
}

/// Length-preserving faces of `t` with their signs.
fn magnitude_faces(scaled: &ScaledDistances, t: &[usize], normalized: bool) -> Vec<(Vec<usize>, i64)> {
    let n = t.len() - 1;
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    for i in 0..=n {
        let survives = if i == 0 {
            scaled.step(t[0], t[1]) == Some(0)
        } else if i == n {
            scaled.step(t[n - 1], t[n]) == Some(0)
        } else {
            let direct = scaled.step(t[i - 1], t[i + 1]);
            let via = scaled
                .step(t[i - 1], t[i])
                .zip(scaled.step(t[i], t[i + 1]))
                .map(|(a, b)| a + b);
            direct.is_some() && direct == via
        };
        if !survives {
            continue;
        }
        let mut face = t.to_vec();
        face.remove(i);
        if normalized && !is_nondegenerate(&face) {
            continue;
        }
        out.push((face, if i % 2 == 0 { 1 } else { -1 }));
    }
    out
}

fn sparse_boundary(
    scaled: &ScaledDistances,
    source: &[Vec<usize>],
    target: &[Vec<usize>],
    normalized: bool,
) -> Result<SparseColumns> {
    let index: HashMap<&[usize], usize> = target.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
    let mut columns = Vec::with_capacity(source.len());
    for t in source {
        let mut col: BTreeMap<usize, i64> = BTreeMap::new();
        for (face, sign) in magnitude_faces(scaled, t, normalized) {
            let &row = index.get(face.as_slice()).ok_or_else(|| {
                Error::InternalCheck(format!("face {face:?} of {t:?} is not a generator of the same grade"))
            })?;
            *col.entry(row).or_default() += sign;
        }
        columns.push(col.into_iter().filter(|&(_, c)| c != 0).collect());
    }
    Ok(SparseColumns { rows: target.len(), columns })
}

/// Boundary matrix from `source` (degree n) to `target` (degree n - 1, same grade).
pub fn mh_boundary(
    space: &FiniteMetricSpace,
    source: &GradedChainBlock,
    target: &GradedChainBlock,
) -> Result<IntMatrix> {
    if source.mode != target.mode {
        return Err(Error::ModeMismatch);
    }
    if source.grade != target.grade || source.degree != target.degree + 1 {
        return Err(Error::Usage(format!(
            "blocks ({}, {}) and ({}, {}) are not adjacent",
            source.degree, source.grade, target.degree, target.grade
        )));
    }
    let src: Vec<Vec<usize>> = source.generators.iter().map(|t| t.indices().to_vec()).collect();
    let tgt: Vec<Vec<usize>> = target.generators.iter().map(|t| t.indices().to_vec()).collect();
    Ok(sparse_boundary(space.scaled(), &src, &tgt, source.mode.normalized())?.to_dense())
}

pub fn magnitude_homology(
    space: &FiniteMetricSpace,
    n_max: usize,
    l_max: &BigRational,
    mode: Mode,
) -> Result<MHTable> {
    magnitude_homology_with_cap(space, n_max, l_max, mode, DEFAULT_MAX_GENERATORS)
}

pub fn magnitude_homology_with_cap(
    space: &FiniteMetricSpace,
    n_max: usize,
    l_max: &BigRational,
    mode: Mode,
    max_generators: usize,
) -> Result<MHTable> {
    space.require(&[Flag::ZeroDiagonal, Flag::TriangleOk])?;
    if mode == Mode::Normalized {
        space.require(&[Flag::Separated])?;
    }
    let scaled = space.scaled();
    let mut table = MHTable {
        n_max,
        l_max: l_max.clone(),
        mode,
        spectrum: Vec::new(),
        groups: BTreeMap::new(),
    };
    let Some(bound) = scaled.floor_bound(l_max) else {
        return Ok(table);
    };

    // Bucket generators by grade, then degree 0..=n_max+1.
    let mut buckets: BTreeMap<u64, Vec<Vec<Vec<usize>>>> = BTreeMap::new();
    let mut spectrum = BTreeSet::new();
    let mut count = 0usize;
    scaled.for_each_tuple(n_max + 1, bound, mode.normalized(), &mut |t, len| {
        count += 1;
        if count > max_generators {
            return Err(Error::ResourceBound { what: "generator", count, cap: max_generators });
        }
        let degree = t.len() - 1;
        if degree <= n_max && is_nondegenerate(t) {
            spectrum.insert(len);
        }
        buckets.entry(len).or_insert_with(|| vec![Vec::new(); n_max + 2])[degree].push(t.to_vec());
        Ok(())
    })?;
    if count > max_generators {
        return Err(Error::ResourceBound { what: "generator", count, cap: max_generators });
    }

    let grades: Vec<u64> = spectrum.iter().copied().collect();
    let normalized = mode.normalized();
    let per_grade: Vec<Result<Vec<HomologyGroup>>> = grades
        .par_iter()
        .map(|len| grade_homology(scaled, &buckets[len], n_max, normalized))
        .collect();
    for (len, groups) in grades.iter().zip(per_grade) {
        let grade = scaled.to_grade(*len);
        for (n, g) in groups?.into_iter().enumerate() {
            table.groups.insert((grade.clone(), n), g);
        }
    }
    table.spectrum = grades.iter().map(|&s| scaled.to_grade(s)).collect();
    Ok(table)
}

/// `H_0 .. H_{n_max}` of one grade, from generator lists for degrees `0..=n_max+1`.
fn grade_homology(
    scaled: &ScaledDistances,
    by_degree: &[Vec<Vec<usize>>],
    n_max: usize,
    normalized: bool,
) -> Result<Vec<HomologyGroup>> {
    // boundaries[n] : C_n -> C_{n-1}, for n = 1..=n_max+1
    let mut boundaries: Vec<SparseColumns> = vec![SparseColumns::default()];
    for n in 1..=n_max + 1 {
        boundaries.push(sparse_boundary(scaled, &by_degree[n], &by_degree[n - 1], normalized)?);
    }
    for n in 1..=n_max {
        if !boundaries[n].composes_to_zero(&boundaries[n + 1]) {
            return Err(Error::InternalCheck(format!("boundary squares to nonzero in degree {}", n + 1)));
        }
    }
    let factors: Vec<Vec<BigInt>> = boundaries
        .iter()
        .map(|b| if b.columns.is_empty() || b.rows == 0 { Vec::new() } else { invariant_factors(&b.to_dense()) })
        .collect();
    Ok((0..=n_max)
        .map(|n| {
            let dim = by_degree[n].len();
            let rank_out = factors[n].len();
            let rank_in = factors[n + 1].len();
            HomologyGroup {
                rank: dim - rank_out - rank_in,
                torsion: factors[n + 1].iter().filter(|d| !d.is_one()).cloned().collect(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerRow {
    pub grade: BigRational,
    pub chi: BigInt,
    pub series: BigInt,
    pub expansion: BigRational,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerReport {
    pub n_max: usize,
    pub l_max: BigRational,
    pub delta_min: Option<BigRational>,
    pub rows: Vec<EulerRow>,
}

impl EulerReport {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }

    pub fn to_tsv(&self) -> String {
        self.rows
            .iter()
            .map(|r| format!("{}\t{}\t{}\t{}\t{}\n", r.grade, r.chi, r.series, r.expansion, r.ok))
            .collect()
    }
}

/// Compare, grade by grade, the Euler characteristic of magnitude homology
/// with the signed tuple count and with the power series of the magnitude.
pub fn euler_check(space: &FiniteMetricSpace, n_max: usize, l_max: &BigRational) -> Result<EulerReport> {
    space.require(&[Flag::ZeroDiagonal, Flag::Separated, Flag::TriangleOk, Flag::FiniteDistances])?;
    let delta_min = space.min_positive_distance();
    if let Some(delta) = &delta_min {
        if l_max.is_positive() {
            let needed = (l_max / delta).ceil().to_integer().to_usize().unwrap_or(usize::MAX);
            if n_max < needed {
                return Err(Error::InsufficientDegreeBound { n_max, l_max: l_max.clone(), needed });
            }
        }
    }
    let table = magnitude_homology(space, n_max, l_max, Mode::Normalized)?;
    let series = magnitude_series(space, l_max)?;
    let f = magnitude_rational(space)?;
    let n = BigInt::from(f.exponent_denominator());
    let max_exp = if l_max.is_negative() {
        0
    } else {
        (l_max * &n).floor().to_integer().to_usize().ok_or_else(|| Error::Overflow("expansion length".into()))?
    };
    let expansion = f.power_series(max_exp)?;

    let mut grades: BTreeSet<BigRational> = table.spectrum.iter().cloned().collect();
    grades.extend(series.terms.iter().map(|(g, _)| g.clone()));
    grades.extend(
        expansion
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, _)| BigRational::new(e.into(), n.clone())),
    );
    let rows = grades
        .into_iter()
        .filter(|g| g <= l_max)
        .map(|grade| {
            let chi: BigInt = (0..=n_max)
                .map(|k| {
                    let r = BigInt::from(table.get(k, &grade).rank);
                    if k.is_even() {
                        r
                    } else {
                        -r
                    }
                })
                .sum();
            let series_coeff = series.coefficient(&grade);
            let scaled = &grade * &n;
            let expansion_coeff = if scaled.is_integer() {
                scaled.to_integer().to_usize().and_then(|e| expansion.get(e).cloned()).unwrap_or_default()
            } else {
                BigRational::zero()
            };
            let ok = chi == series_coeff && BigRational::from_integer(chi.clone()) == expansion_coeff;
            EulerRow { grade, chi, series: series_coeff, expansion: expansion_coeff, ok }
        })
        .collect();
    Ok(EulerReport { n_max, l_max: l_max.clone(), delta_min, rows })
}
