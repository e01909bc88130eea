//! Finite quasi-pseudo-metric spaces with exact rational distances.
//!
//! Distances are non-negative rationals or [`ExtRational::Infinite`]. The
//! structural properties of a matrix are computed once at construction and
//! stored as [`SpaceFlags`]; downstream operations ask for the subset they
//! need through [`FiniteMetricSpace::require`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A non-negative rational or infinity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtRational {
    Finite(BigRational),
    Infinite,
}

impl ExtRational {
    pub fn zero() -> Self {
        ExtRational::Finite(BigRational::zero())
    }

    pub fn from_integer(n: i64) -> Self {
        ExtRational::Finite(BigRational::from_integer(n.into()))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRational::Finite(_))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtRational::Finite(r) if r.is_zero())
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            ExtRational::Finite(r) => Some(r),
            ExtRational::Infinite => None,
        }
    }
}

impl From<BigRational> for ExtRational {
    fn from(r: BigRational) -> Self {
        ExtRational::Finite(r)
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => a.cmp(b),
            (ExtRational::Finite(_), ExtRational::Infinite) => Ordering::Less,
            (ExtRational::Infinite, ExtRational::Finite(_)) => Ordering::Greater,
            (ExtRational::Infinite, ExtRational::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for &ExtRational {
    type Output = ExtRational;

    fn add(self, rhs: &ExtRational) -> ExtRational {
        match (self, rhs) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a + b),
            _ => ExtRational::Infinite,
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(r) => write!(f, "{r}"),
            ExtRational::Infinite => f.write_str("inf"),
        }
    }
}

/// One of the checkable axioms of a Lawvere metric space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flag {
    Symmetric,
    ZeroDiagonal,
    Separated,
    FiniteDistances,
    TriangleOk,
}

impl Flag {
    pub const ALL: [Flag; 5] = [
        Flag::Symmetric,
        Flag::ZeroDiagonal,
        Flag::Separated,
        Flag::FiniteDistances,
        Flag::TriangleOk,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Flag::Symmetric => "symmetric",
            Flag::ZeroDiagonal => "zero_diagonal",
            Flag::Separated => "separated",
            Flag::FiniteDistances => "finite_distances",
            Flag::TriangleOk => "triangle_ok",
        }
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Genuine finite metric spaces, possibly non-separated.
pub const DEFAULT_REQUIRED: [Flag; 4] = [
    Flag::ZeroDiagonal,
    Flag::Symmetric,
    Flag::TriangleOk,
    Flag::FiniteDistances,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceFlags {
    pub symmetric: bool,
    pub zero_diagonal: bool,
    pub separated: bool,
    pub finite_distances: bool,
    pub triangle_ok: bool,
}

impl SpaceFlags {
    pub fn get(&self, flag: Flag) -> bool {
        match flag {
            Flag::Symmetric => self.symmetric,
            Flag::ZeroDiagonal => self.zero_diagonal,
            Flag::Separated => self.separated,
            Flag::FiniteDistances => self.finite_distances,
            Flag::TriangleOk => self.triangle_ok,
        }
    }
}

/// Distances rescaled to integers by the lcm `denom` of all finite
/// denominators; `None` marks an infinite distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledDistances {
    size: usize,
    denom: u64,
    steps: Vec<Option<u64>>,
}

impl ScaledDistances {
    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn step(&self, i: usize, j: usize) -> Option<u64> {
        self.steps[i * self.size + j]
    }

    pub fn to_grade(&self, scaled: u64) -> BigRational {
        BigRational::new(BigInt::from(scaled), BigInt::from(self.denom))
    }

    /// Largest scaled length not exceeding `bound`; `None` if `bound < 0`.
    pub fn floor_bound(&self, bound: &BigRational) -> Option<u64> {
        if bound.is_negative() {
            return None;
        }
        let scaled = (bound * BigInt::from(self.denom)).floor().to_integer();
        Some(scaled.to_u64().unwrap_or(u64::MAX))
    }

    /// Exact scaled value of a grade, if it lies on this space's lattice.
    pub fn exact_scaled(&self, grade: &BigRational) -> Option<u64> {
        let scaled = grade * BigInt::from(self.denom);
        if scaled.is_integer() && !scaled.is_negative() {
            scaled.to_integer().to_u64()
        } else {
            None
        }
    }

    /// Scaled length of a tuple; `None` if any step is infinite.
    pub fn tuple_length(&self, t: &[usize]) -> Option<u64> {
        t.windows(2)
            .try_fold(0u64, |acc, w| acc.checked_add(self.step(w[0], w[1])?))
    }

    /// Depth-first enumeration of tuples of degree `<= max_degree` and scaled
    /// length `<= max_len`. Within each degree tuples arrive in
    /// lexicographic order. With `normalized`, consecutive repeats are skipped.
    pub fn for_each_tuple<F>(
        &self,
        max_degree: usize,
        max_len: u64,
        normalized: bool,
        visit: &mut F,
    ) -> Result<()>
    where
        F: FnMut(&[usize], u64) -> Result<()>,
    {
        let mut stack = Vec::with_capacity(max_degree + 1);
        for start in 0..self.size {
            stack.push(start);
            self.extend_tuple(&mut stack, 0, max_degree, max_len, normalized, visit)?;
            stack.pop();
        }
        Ok(())
    }

    fn extend_tuple<F>(
        &self,
        stack: &mut Vec<usize>,
        len: u64,
        max_degree: usize,
        max_len: u64,
        normalized: bool,
        visit: &mut F,
    ) -> Result<()>
    where
        F: FnMut(&[usize], u64) -> Result<()>,
    {
        visit(stack, len)?;
        if stack.len() > max_degree {
            return Ok(());
        }
        let last = *stack.last().expect("non-empty tuple");
        for next in 0..self.size {
            if normalized && next == last {
                continue;
            }
            let Some(step) = self.step(last, next) else {
                continue;
            };
            let Some(total) = len.checked_add(step) else {
                continue;
            };
            if total > max_len {
                continue;
            }
            stack.push(next);
            self.extend_tuple(stack, total, max_degree, max_len, normalized, visit)?;
            stack.pop();
        }
        Ok(())
    }
}

/// A finite quasi-pseudo-metric space. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<ExtRational>>,
    flags: SpaceFlags,
    scaled: ScaledDistances,
}

/// Validate a distance matrix, failing if any flag in `require` does not hold.
pub fn validate_space(matrix: Vec<Vec<ExtRational>>, require: &[Flag]) -> Result<FiniteMetricSpace> {
    let m = matrix.len();
    for (row, entries) in matrix.iter().enumerate() {
        if entries.len() != m {
            return Err(Error::NonSquare { row, len: entries.len(), expected: m });
        }
        for (col, v) in entries.iter().enumerate() {
            if let ExtRational::Finite(r) = v {
                if r.is_negative() {
                    return Err(Error::NegativeEntry { row, col, value: r.clone() });
                }
            }
        }
    }

    let witnesses = FlagWitnesses::compute(&matrix);
    for &flag in require {
        if let Some(w) = witnesses.get(flag) {
            return Err(Error::RequiredFlagViolated { flag, witness: w.clone() });
        }
    }
    let flags = SpaceFlags {
        symmetric: witnesses.symmetric.is_none(),
        zero_diagonal: witnesses.zero_diagonal.is_none(),
        separated: witnesses.separated.is_none(),
        finite_distances: witnesses.finite_distances.is_none(),
        triangle_ok: witnesses.triangle_ok.is_none(),
    };
    let scaled = scale_to_integers(&matrix)?;
    Ok(FiniteMetricSpace { labels: default_labels(m), dist: matrix, flags, scaled })
}

struct FlagWitnesses {
    symmetric: Option<Vec<usize>>,
    zero_diagonal: Option<Vec<usize>>,
    separated: Option<Vec<usize>>,
    finite_distances: Option<Vec<usize>>,
    triangle_ok: Option<Vec<usize>>,
}

impl FlagWitnesses {
    fn compute(d: &[Vec<ExtRational>]) -> Self {
        let m = d.len();
        let pairs = || (0..m).flat_map(move |i| (0..m).map(move |j| (i, j)));
        let symmetric = pairs().find(|&(i, j)| d[i][j] != d[j][i]).map(|(i, j)| vec![i, j]);
        let zero_diagonal = (0..m).find(|&i| !d[i][i].is_zero()).map(|i| vec![i]);
        let separated = pairs().find(|&(i, j)| i != j && d[i][j].is_zero()).map(|(i, j)| vec![i, j]);
        let finite_distances = pairs().find(|&(i, j)| !d[i][j].is_finite()).map(|(i, j)| vec![i, j]);
        let mut triangle_ok = None;
        'outer: for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    if &d[i][j] + &d[j][k] < d[i][k] {
                        triangle_ok = Some(vec![i, j, k]);
                        break 'outer;
                    }
                }
            }
        }
        FlagWitnesses { symmetric, zero_diagonal, separated, finite_distances, triangle_ok }
    }

    fn get(&self, flag: Flag) -> Option<&Vec<usize>> {
        match flag {
            Flag::Symmetric => self.symmetric.as_ref(),
            Flag::ZeroDiagonal => self.zero_diagonal.as_ref(),
            Flag::Separated => self.separated.as_ref(),
            Flag::FiniteDistances => self.finite_distances.as_ref(),
            Flag::TriangleOk => self.triangle_ok.as_ref(),
        }
    }
}

fn scale_to_integers(d: &[Vec<ExtRational>]) -> Result<ScaledDistances> {
    let m = d.len();
    let denom = d
        .iter()
        .flatten()
        .filter_map(ExtRational::finite)
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let overflow = || Error::Overflow("distance lattice does not fit in 64 bits".into());
    let denom_u64 = denom.to_u64().ok_or_else(overflow)?;
    let mut steps = Vec::with_capacity(m * m);
    for v in d.iter().flatten() {
        steps.push(match v {
            ExtRational::Finite(r) => {
                let s = (r * &denom).to_integer();
                Some(s.to_u64().ok_or_else(overflow)?)
            }
            ExtRational::Infinite => None,
        });
    }
    Ok(ScaledDistances { size: m, denom: denom_u64, steps })
}

pub fn default_labels(m: usize) -> Vec<String> {
    if m <= 26 {
        (0..m).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        (0..m).map(|i| format!("x{i}")).collect()
    }
}

impl FiniteMetricSpace {
    /// Build a genuine finite metric space from exact rational distances.
    pub fn from_rationals(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let matrix = rows.into_iter().map(|r| r.into_iter().map(ExtRational::Finite).collect()).collect();
        validate_space(matrix, &DEFAULT_REQUIRED)
    }

    /// Integer distance matrix; convenient for fixtures.
    pub fn from_integers(rows: &[&[i64]]) -> Result<Self> {
        let matrix = rows
            .iter()
            .map(|r| r.iter().map(|&v| ExtRational::from_integer(v)).collect())
            .collect();
        validate_space(matrix, &DEFAULT_REQUIRED)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::Usage(format!(
                "{} labels given for a space with {} points",
                labels.len(),
                self.len()
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn flags(&self) -> SpaceFlags {
        self.flags
    }

    pub fn dist(&self, i: usize, j: usize) -> &ExtRational {
        &self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<ExtRational>] {
        &self.dist
    }

    pub fn scaled(&self) -> &ScaledDistances {
        &self.scaled
    }

    /// Fail with the operation-specific error for the first missing flag.
    pub fn require(&self, flags: &[Flag]) -> Result<()> {
        for &flag in flags {
            if self.flags.get(flag) {
                continue;
            }
            let w = FlagWitnesses::compute(&self.dist);
            let witness = w.get(flag).cloned().unwrap_or_default();
            return Err(match flag {
                Flag::Separated => Error::NotSeparated(witness[0], witness[1]),
                Flag::Symmetric => Error::NotSymmetric(witness[0], witness[1]),
                Flag::FiniteDistances => Error::InfiniteDistance(witness[0], witness[1]),
                _ => Error::RequiredFlagViolated { flag, witness },
            });
        }
        Ok(())
    }

    /// Smallest positive finite distance between distinct points.
    pub fn min_positive_distance(&self) -> Option<BigRational> {
        let m = self.len();
        (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .filter_map(|(i, j)| self.dist[i][j].finite())
            .filter(|r| r.is_positive())
            .min()
            .cloned()
    }

    /// Largest finite distance.
    pub fn diameter(&self) -> BigRational {
        self.dist
            .iter()
            .flatten()
            .filter_map(ExtRational::finite)
            .max()
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// The same space with points reordered: point `i` of the result is
    /// point `perm[i]` of `self`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let m = self.len();
        let mut seen = vec![false; m];
        for &p in perm {
            if p >= m || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Usage(format!("{perm:?} is not a permutation of 0..{m}")));
            }
        }
        if perm.len() != m {
            return Err(Error::Usage(format!("{perm:?} is not a permutation of 0..{m}")));
        }
        let matrix = perm
            .iter()
            .map(|&i| perm.iter().map(|&j| self.dist[i][j].clone()).collect())
            .collect();
        let labels = perm.iter().map(|&i| self.labels[i].clone()).collect();
        validate_space(matrix, &[])?.with_labels(labels)
    }

    fn check_indices(&self, t: &[usize]) -> Result<()> {
        match t.iter().find(|&&i| i >= self.len()) {
            Some(&index) => Err(Error::IndexOutOfRange { index, len: self.len() }),
            None => Ok(()),
        }
    }
}

/// An ordered tuple of points together with its total length.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tuple {
    indices: Vec<usize>,
    grade: BigRational,
}

impl Tuple {
    /// Fails if an index is out of range or a step is infinite.
    pub fn new(space: &FiniteMetricSpace, indices: Vec<usize>) -> Result<Self> {
        match tuple_length(space, &indices)? {
            ExtRational::Finite(grade) => Ok(Tuple { indices, grade }),
            ExtRational::Infinite => {
                let w = indices
                    .windows(2)
                    .find(|w| !space.dist(w[0], w[1]).is_finite())
                    .expect("infinite length has an infinite step");
                Err(Error::InfiniteDistance(w[0], w[1]))
            }
        }
    }

    pub(crate) fn from_parts(indices: Vec<usize>, grade: BigRational) -> Self {
        Tuple { indices, grade }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn degree(&self) -> usize {
        self.indices.len() - 1
    }

    pub fn grade(&self) -> &BigRational {
        &self.grade
    }

    pub fn is_nondegenerate(&self) -> bool {
        is_nondegenerate(&self.indices)
    }
}

pub fn is_nondegenerate(t: &[usize]) -> bool {
    t.windows(2).all(|w| w[0] != w[1])
}

/// Sum of consecutive distances; zero for a single point.
pub fn tuple_length(space: &FiniteMetricSpace, t: &[usize]) -> Result<ExtRational> {
    space.check_indices(t)?;
    Ok(t.windows(2).fold(ExtRational::zero(), |acc, w| &acc + space.dist(w[0], w[1])))
}

/// Multiply every finite distance by `t > 0`.
pub fn scale_space(space: &FiniteMetricSpace, t: &BigRational) -> Result<FiniteMetricSpace> {
    if !t.is_positive() {
        return Err(Error::NonPositiveScale(t.clone()));
    }
    let matrix = space
        .dist
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| match v {
                    ExtRational::Finite(r) => ExtRational::Finite(r * t),
                    ExtRational::Infinite => ExtRational::Infinite,
                })
                .collect()
        })
        .collect();
    validate_space(matrix, &[])?.with_labels(space.labels.clone())
}

/// Distinct lengths of nondegenerate tuples of degree `<= n_max` and length
/// `<= l_max`, ascending. Always contains 0 for a non-empty space.
pub fn length_spectrum(space: &FiniteMetricSpace, n_max: usize, l_max: &BigRational) -> Vec<BigRational> {
    let scaled = space.scaled();
    let Some(bound) = scaled.floor_bound(l_max) else {
        return Vec::new();
    };
    let mut seen = std::collections::BTreeSet::new();
    scaled
        .for_each_tuple(n_max, bound, true, &mut |_, len| {
            seen.insert(len);
            Ok(())
        })
        .expect("infallible visitor");
    seen.into_iter().map(|s| scaled.to_grade(s)).collect()
}
