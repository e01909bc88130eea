//! Magnitude of finite metric spaces as exact rational functions.
//!
//! Distances are cleared to integers by their common denominator `N`, so
//! every zeta entry `q^d` becomes a monomial in `u = q^(1/N)` and the
//! magnitude is a ratio of integer polynomials in `u`.

mod eval;
pub mod poly;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, Flag};
pub use eval::{magnitude_function_eval, magnitude_numeric_inverse, MagnitudeValue};
pub use poly::Poly;

/// `numerator / denominator` in the variable `u = q^(1/N)`, kept reduced
/// with a positive leading denominator coefficient.
#[derive(Debug, Clone)]
pub struct RationalFunctionQ {
    exponent_denominator: u64,
    numerator: Poly,
    denominator: Poly,
}

impl RationalFunctionQ {
    /// Panics if `denominator` is zero or `exponent_denominator` is zero.
    pub fn new(exponent_denominator: u64, numerator: Poly, denominator: Poly) -> Self {
        assert!(exponent_denominator > 0, "exponent denominator must be positive");
        assert!(!denominator.is_zero(), "zero denominator");
        let mut f = RationalFunctionQ { exponent_denominator, numerator, denominator };
        f.reduce();
        f
    }

    fn reduce(&mut self) {
        if self.numerator.is_zero() {
            self.denominator = Poly::one();
            return;
        }
        let g = self.numerator.gcd(&self.denominator);
        self.numerator = self.numerator.div_exact(&g).expect("gcd divides numerator");
        self.denominator = self.denominator.div_exact(&g).expect("gcd divides denominator");
        if self.denominator.leading().is_some_and(Signed::is_negative) {
            self.numerator = -&self.numerator;
            self.denominator = -&self.denominator;
        }
    }

    pub fn exponent_denominator(&self) -> u64 {
        self.exponent_denominator
    }

    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    pub fn denominator(&self) -> &Poly {
        &self.denominator
    }

    /// Same function written over `q^(1/(N·k))`.
    pub fn rescale(&self, k: u64) -> RationalFunctionQ {
        RationalFunctionQ {
            exponent_denominator: self.exponent_denominator * k,
            numerator: self.numerator.stretch(k as usize),
            denominator: self.denominator.stretch(k as usize),
        }
    }

    /// The substitution `q ↦ q^t` for a positive rational `t`.
    pub fn substitute_power(&self, t: &BigRational) -> Result<RationalFunctionQ> {
        if !t.is_positive() {
            return Err(Error::NonPositiveScale(t.clone()));
        }
        let overflow = || Error::Overflow("exponent substitution".into());
        let num = t.numer().to_usize().ok_or_else(overflow)?;
        let den = t.denom().to_u64().ok_or_else(overflow)?;
        Ok(RationalFunctionQ::new(
            self.exponent_denominator.checked_mul(den).ok_or_else(overflow)?,
            self.numerator.stretch(num),
            self.denominator.stretch(num),
        ))
    }

    /// Exact value at `u`; `None` at a pole.
    pub fn eval_at_u(&self, u: &BigRational) -> Option<BigRational> {
        let d = self.denominator.eval_rational(u);
        if d.is_zero() {
            return None;
        }
        Some(self.numerator.eval_rational(u) / d)
    }

    /// Coefficients of the power series in `u` through `u^max_exp`.
    pub fn power_series(&self, max_exp: usize) -> Result<Vec<BigRational>> {
        let d0 = self.denominator.coeff(0);
        if d0.is_zero() {
            return Err(Error::DenominatorConstantTermZero);
        }
        let d0 = BigRational::from_integer(d0);
        let den = self.denominator.coeffs();
        let mut out: Vec<BigRational> = Vec::with_capacity(max_exp + 1);
        for k in 0..=max_exp {
            let mut acc = BigRational::from_integer(self.numerator.coeff(k));
            for j in 1..=k.min(den.len().saturating_sub(1)) {
                if !den[j].is_zero() {
                    acc -= &out[k - j] * BigRational::from_integer(den[j].clone());
                }
            }
            out.push(acc / &d0);
        }
        Ok(out)
    }
}

impl PartialEq for RationalFunctionQ {
    fn eq(&self, other: &Self) -> bool {
        let l = self.exponent_denominator.lcm(&other.exponent_denominator);
        let a = self.rescale(l / self.exponent_denominator);
        let b = other.rescale(l / other.exponent_denominator);
        &a.numerator * &b.denominator == &b.numerator * &a.denominator
    }
}

impl Eq for RationalFunctionQ {}

impl fmt::Display for RationalFunctionQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})/({}) in q^(1/{})",
            self.numerator, self.denominator, self.exponent_denominator
        )
    }
}

/// Zeta matrix with entries `u^(N·d(i, j))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaMatrix {
    exponent_denominator: u64,
    exponents: Vec<Vec<u64>>,
}

impl ZetaMatrix {
    pub fn size(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponent_denominator(&self) -> u64 {
        self.exponent_denominator
    }

    pub fn exponent(&self, i: usize, j: usize) -> u64 {
        self.exponents[i][j]
    }

    pub fn entry(&self, i: usize, j: usize) -> Poly {
        Poly::monomial(BigInt::one(), self.exponents[i][j] as usize)
    }

    fn poly_matrix(&self) -> Vec<Vec<Poly>> {
        let m = self.size();
        (0..m).map(|i| (0..m).map(|j| self.entry(i, j)).collect()).collect()
    }
}

pub fn zeta_matrix(space: &FiniteMetricSpace) -> Result<ZetaMatrix> {
    space.require(&[Flag::FiniteDistances, Flag::ZeroDiagonal])?;
    let scaled = space.scaled();
    let m = space.len();
    let exponents = (0..m)
        .map(|i| (0..m).map(|j| scaled.step(i, j).expect("finite distances")).collect())
        .collect();
    Ok(ZetaMatrix { exponent_denominator: scaled.denom(), exponents })
}

/// Fraction-free (Bareiss) determinant over `Z[u]`.
pub(crate) fn bareiss_determinant(mut a: Vec<Vec<Poly>>) -> Poly {
    let n = a.len();
    if n == 0 {
        return Poly::one();
    }
    let mut negate = false;
    let mut prev = Poly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Poly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = t.div_exact(&prev).expect("Bareiss step divides exactly");
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}

/// Sum of all entries of the inverse zeta matrix, as `Σ adj / det`.
pub fn magnitude_rational(space: &FiniteMetricSpace) -> Result<RationalFunctionQ> {
    let zeta = zeta_matrix(space)?;
    let n = zeta.exponent_denominator();
    let m = zeta.size();
    if m == 0 {
        return Ok(RationalFunctionQ::new(n, Poly::zero(), Poly::one()));
    }
    let base = zeta.poly_matrix();
    let det = bareiss_determinant(base.clone());
    if det.is_zero() {
        return Err(Error::SingularZeta);
    }
    // Cramer: the i-th entry of Z^{-1}·1 is det(Z with column i replaced by ones) / det Z.
    let mut adj_sum = Poly::zero();
    for col in 0..m {
        let mut a = base.clone();
        for row in a.iter_mut() {
            row[col] = Poly::one();
        }
        adj_sum = adj_sum + bareiss_determinant(a);
    }
    Ok(RationalFunctionQ::new(n, adj_sum, det))
}

/// Truncated `Σ c_l q^l` with strictly increasing grades and no zero terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSeries {
    pub terms: Vec<(BigRational, BigInt)>,
    pub l_max: BigRational,
}

impl GradedSeries {
    pub fn coefficient(&self, grade: &BigRational) -> BigInt {
        self.terms
            .binary_search_by(|(g, _)| g.cmp(grade))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_default()
    }

    pub fn to_tsv(&self) -> String {
        self.terms.iter().map(|(g, c)| format!("{g}\t{c}\n")).collect()
    }
}

/// Signed count `Σ_n (-1)^n #{nondegenerate n-tuples of length l}` for
/// every grade `l <= l_max`.
pub fn magnitude_series(space: &FiniteMetricSpace, l_max: &BigRational) -> Result<GradedSeries> {
    space.require(&[Flag::ZeroDiagonal, Flag::Separated])?;
    let scaled = space.scaled();
    let Some(bound) = scaled.floor_bound(l_max) else {
        return Ok(GradedSeries { terms: Vec::new(), l_max: l_max.clone() });
    };
    let min_step = match space.min_positive_distance() {
        Some(delta) => scaled.exact_scaled(&delta).expect("distance on lattice"),
        None if space.len() > 1 && space.flags().finite_distances => {
            return Err(Error::ZeroMinimumDistance)
        }
        None => u64::MAX,
    };
    let max_degree = (bound / min_step) as usize;
    let mut counts: BTreeMap<u64, BigInt> = BTreeMap::new();
    scaled.for_each_tuple(max_degree, bound, true, &mut |t, len| {
        let sign = if (t.len() - 1) % 2 == 0 { 1 } else { -1 };
        *counts.entry(len).or_default() += sign;
        Ok(())
    })?;
    let terms = counts
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(len, c)| (scaled.to_grade(len), c))
        .collect();
    Ok(GradedSeries { terms, l_max: l_max.clone() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesMismatch {
    pub grade: BigRational,
    pub series: BigInt,
    pub expansion: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesComparison {
    pub ok: bool,
    pub first_mismatch: Option<SeriesMismatch>,
}

/// Expand `f` as a power series through grade `l_max` and compare
/// coefficients gradewise with `series`.
pub fn series_matches_rational(
    series: &GradedSeries,
    f: &RationalFunctionQ,
    l_max: &BigRational,
) -> Result<SeriesComparison> {
    let n = BigInt::from(f.exponent_denominator());
    let max_exp = if l_max.is_negative() {
        0
    } else {
        (l_max * &n).floor().to_integer().to_usize().ok_or_else(|| {
            Error::Overflow("expansion length".into())
        })?
    };
    let expansion = f.power_series(max_exp)?;

    let mut mismatches: Vec<SeriesMismatch> = Vec::new();
    let mut on_lattice = BTreeMap::new();
    for (grade, c) in series.terms.iter().filter(|(g, _)| g <= l_max) {
        let scaled = grade * &n;
        match scaled.is_integer().then(|| scaled.to_integer().to_usize()).flatten() {
            Some(e) => {
                on_lattice.insert(e, c.clone());
            }
            None => mismatches.push(SeriesMismatch {
                grade: grade.clone(),
                series: c.clone(),
                expansion: BigRational::zero(),
            }),
        }
    }
    for (e, coeff) in expansion.iter().enumerate() {
        let s = on_lattice.get(&e).cloned().unwrap_or_default();
        if BigRational::from_integer(s.clone()) != *coeff {
            mismatches.push(SeriesMismatch {
                grade: BigRational::new(e.into(), n.clone()),
                series: s,
                expansion: coeff.clone(),
            });
        }
    }
    let first_mismatch = mismatches.into_iter().min_by(|a, b| a.grade.cmp(&b.grade));
    Ok(SeriesComparison { ok: first_mismatch.is_none(), first_mismatch })
}
