//! Exact rational arithmetic: fractions, dense polynomials and linear solves.
//!
//! Every coefficient of the spline bases is derived here, so nothing in this
//! module rounds. Fractions are `num_rational::BigRational`, which keeps values
//! in lowest terms with a positive denominator.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Shorthand for the fraction `num/den`.
///
/// Panics if `den` is zero.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// `k!` as an exact rational.
pub fn factorial(k: usize) -> Rational {
    let mut acc = BigInt::one();
    for j in 2..=k {
        acc *= BigInt::from(j);
    }
    Rational::from_integer(acc)
}

/// `k! / (k - l)!`, the factor picked up by `x^k` under `l` derivatives.
pub fn falling_factorial(k: usize, l: usize) -> Rational {
    if l > k {
        return Rational::zero();
    }
    let mut acc = BigInt::one();
    for j in (k - l + 1)..=k {
        acc *= BigInt::from(j);
    }
    Rational::from_integer(acc)
}

/// Formats a fraction as `num/den`, always including the denominator.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let err = || Error::ParseRational(text.to_string());
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(num, den))
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Dense polynomial `sum_k coeffs[k] x^k` over the rationals.
///
/// Trailing zero coefficients are always trimmed; the zero polynomial has no
/// coefficients at all.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalPolynomial {
    coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        let mut p = Self { coeffs };
        p.normalize();
        p
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Self::monomial(1, Rational::one())
    }

    /// `c x^k`.
    pub fn monomial(k: usize, c: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `a x + b`.
    pub fn linear(a: Rational, b: Rational) -> Self {
        Self::new(vec![b, a])
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    /// Returns a normalized copy. Polynomials are always canonical already,
    /// so this is the identity; it exists so callers can state the property.
    pub fn normalized(&self) -> Self {
        Self::new(self.coeffs.clone())
    }

    /// Coefficients in ascending power order.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn derivative(&self, order: usize) -> Self {
        if order == 0 {
            return self.clone();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(order)
                .map(|(k, c)| c * falling_factorial(k, order))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn pow(&self, exponent: usize) -> Self {
        (0..exponent).fold(Self::one(), |acc, _| &acc * self)
    }

    /// The composition `p(inner(x))`.
    pub fn compose(&self, inner: &Self) -> Self {
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| {
            &(&acc * inner) + &Self::constant(c.clone())
        })
    }

    /// Float coefficients in descending power order, ready for Horner's scheme.
    pub fn horner_f64(&self) -> Vec<f64> {
        self.coeffs.iter().rev().map(to_f64).collect()
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        horner(&self.horner_f64(), x)
    }
}

/// Evaluates a polynomial given in descending coefficient order.
#[inline]
pub fn horner(descending: &[f64], x: f64) -> f64 {
    descending.iter().fold(0.0, |acc, &c| acc * x + c)
}

impl fmt::Debug for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{mag}*x")?,
                (_, true) => write!(f, "x^{k}")?,
                (_, false) => write!(f, "{mag}*x^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn add(self, rhs: Self) -> RationalPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RationalPolynomial::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn sub(self, rhs: Self) -> RationalPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RationalPolynomial::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn mul(self, rhs: Self) -> RationalPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPolynomial::new(out)
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn neg(self) -> RationalPolynomial {
        RationalPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Dense row-major matrix of fractions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, vector has {} entries",
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        &self.entries[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        &mut self.entries[r * self.cols + c]
    }
}

/// Solves `a x = b` exactly.
pub fn solve_linear_system(a: &RationalMatrix, b: &[Rational]) -> Result<Vec<Rational>> {
    let mut sols = solve_linear_systems(a, &[b.to_vec()])?;
    Ok(sols.pop().unwrap_or_default())
}

/// Solves `a x = b` for every right-hand side in `rhs` with a single
/// elimination pass (Gauss-Jordan on the augmented matrix).
pub fn solve_linear_systems(a: &RationalMatrix, rhs: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let n = a.rows;
    if a.cols != n {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    if let Some(bad) = rhs.iter().find(|b| b.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has {} entries, matrix has {n} rows",
            bad.len()
        )));
    }
    let width = n + rhs.len();
    let mut aug: Vec<Vec<Rational>> = (0..n)
        .map(|r| {
            let mut row = a.row(r).to_vec();
            row.extend(rhs.iter().map(|b| b[r].clone()));
            row
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !aug[r][col].is_zero())
            .ok_or(Error::SingularMatrix { column: col })?;
        aug.swap(col, pivot);
        let inv = aug[col][col].recip();
        for v in aug[col][col..width].iter_mut() {
            *v *= &inv;
        }
        let (before, rest) = aug.split_at_mut(col);
        let (pivot_row, after) = rest.split_first_mut().expect("pivot row exists");
        for row in before.iter_mut().chain(after.iter_mut()) {
            let factor = row[col].clone();
            if factor.is_zero() {
                continue;
            }
            for (v, p) in row[col..width].iter_mut().zip(&pivot_row[col..width]) {
                *v -= &factor * p;
            }
        }
    }

    Ok((0..rhs.len())
        .map(|j| aug.iter().map(|row| row[n + j].clone()).collect())
        .collect())
}
