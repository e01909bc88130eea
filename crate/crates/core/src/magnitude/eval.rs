//! Numeric evaluation of the magnitude function `t ↦ |tX|`, i.e. the
//! magnitude at `q = e^(-t)`.
//!
//! The exact rational function is evaluated in decimal fixed point with
//! arbitrary-precision integers; `u = e^(-t/N)` is computed by argument
//! halving, a Taylor series and repeated squaring. The working precision is
//! raised until two successive evaluations round to the same decimal.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{magnitude_rational, Poly, RationalFunctionQ};
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, Flag};

const MAX_PRECISION: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeValue {
    pub t: BigRational,
    /// Rounded to `precision` digits after the decimal point.
    pub decimal: String,
    pub value: f64,
    pub precision: usize,
}

pub fn magnitude_function_eval(
    space: &FiniteMetricSpace,
    t: &BigRational,
    precision: usize,
) -> Result<MagnitudeValue> {
    if !t.is_positive() {
        return Err(Error::Usage(format!("magnitude function needs t > 0, got {t}")));
    }
    if precision > MAX_PRECISION {
        return Err(Error::Usage(format!("precision {precision} exceeds {MAX_PRECISION} digits")));
    }
    let f = magnitude_rational(space)?;
    eval_rational_function(&f, t, precision)
}

pub(crate) fn eval_rational_function(
    f: &RationalFunctionQ,
    t: &BigRational,
    precision: usize,
) -> Result<MagnitudeValue> {
    let x = t / BigInt::from(f.exponent_denominator());
    let coeff_digits = [f.numerator(), f.denominator()]
        .iter()
        .map(|p| {
            let total: BigInt = p.coeffs().iter().map(|c| c.abs()).sum();
            total.to_string().len() + p.coeffs().len().to_string().len()
        })
        .max()
        .unwrap_or(1);
    let mut guard = 12 + coeff_digits;
    let mut previous: Option<BigRational> = None;
    for _ in 0..8 {
        let value = eval_fixed(f, &x, precision, precision + guard)?;
        let rounded = round_decimal(&value, precision);
        if let Some(prev) = &previous {
            if round_decimal(prev, precision) == rounded {
                return Ok(MagnitudeValue {
                    t: t.clone(),
                    value: value.to_f64().unwrap_or(f64::NAN),
                    decimal: rounded,
                    precision,
                });
            }
        }
        previous = Some(value);
        guard += 16;
    }
    let value = previous.expect("at least one evaluation");
    Ok(MagnitudeValue {
        t: t.clone(),
        value: value.to_f64().unwrap_or(f64::NAN),
        decimal: round_decimal(&value, precision),
        precision,
    })
}

/// `f` at `u = e^(-x)` using `work` decimal digits.
fn eval_fixed(f: &RationalFunctionQ, x: &BigRational, precision: usize, work: usize) -> Result<BigRational> {
    let one = BigInt::from(10).pow(work as u32);
    let u = exp_neg_fixed(x, work);
    let num = horner_fixed(f.numerator(), &u, &one);
    let den = horner_fixed(f.denominator(), &u, &one);
    let tolerance = BigInt::from(10).pow((work - precision) as u32);
    if den.abs() <= tolerance {
        return Err(Error::PoleAtEvaluationPoint(x * BigInt::from(f.exponent_denominator())));
    }
    Ok(BigRational::new(num, den))
}

fn horner_fixed(p: &Poly, u: &BigInt, one: &BigInt) -> BigInt {
    p.coeffs()
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, c| (acc * u).div_floor(one) + c * one)
}

/// `e^(-x) · 10^work`, truncated, for rational `x >= 0`.
fn exp_neg_fixed(x: &BigRational, work: usize) -> BigInt {
    // Halve until x / 2^k <= 1/2; squaring k times then loses about k·log10(2) digits.
    let mut k = 0u32;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut y = x.clone();
    while y > half {
        y /= BigInt::from(2);
        k += 1;
    }
    let extra = (k as usize * 3) / 10 + 10;
    let w = work + extra;
    let one = BigInt::from(10).pow(w as u32);
    let y_fixed = (y * &one).floor().to_integer();

    let mut sum = one.clone();
    let mut term = one.clone();
    let mut n = 1u64;
    loop {
        term = (&term * &y_fixed).div_floor(&(&one * n));
        if term.is_zero() {
            break;
        }
        if n % 2 == 1 {
            sum -= &term;
        } else {
            sum += &term;
        }
        n += 1;
    }
    for _ in 0..k {
        sum = (&sum * &sum).div_floor(&one);
    }
    sum / BigInt::from(10).pow(extra as u32)
}

/// Round half away from zero to `digits` places after the point.
pub(crate) fn round_decimal(v: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10).pow(digits as u32);
    let scaled = v.abs() * &scale;
    let mut int = scaled.floor().to_integer();
    if scaled.fract() * BigInt::from(2) >= BigRational::one() {
        int += 1;
    }
    let negative = v.is_negative() && !int.is_zero();
    let s = int.to_str_radix(10);
    let s = if s.len() <= digits { format!("{}{}", "0".repeat(digits + 1 - s.len()), s) } else { s };
    let (whole, frac) = s.split_at(s.len() - digits);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{frac}")
    }
}

/// Independent floating-point route: invert the real zeta matrix
/// `exp(-t·d)` directly and sum the entries of the solution of `Z w = 1`.
pub fn magnitude_numeric_inverse(space: &FiniteMetricSpace, t: f64) -> Result<f64> {
    space.require(&[Flag::FiniteDistances, Flag::ZeroDiagonal])?;
    let m = space.len();
    let z = DMatrix::from_fn(m, m, |i, j| {
        let d = space.dist(i, j).finite().expect("finite").to_f64().unwrap_or(f64::INFINITY);
        (-t * d).exp()
    });
    let ones = DVector::from_element(m, 1.0);
    let w = z.lu().solve(&ones).ok_or(Error::SingularZeta)?;
    Ok(w.sum())
}
