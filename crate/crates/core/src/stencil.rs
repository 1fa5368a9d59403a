//! Centered-difference coefficients from symmetric Lagrange interpolation.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{factorial, int, solve_linear_systems, to_f64, Rational, RationalMatrix};

/// Centered differences of every order `l = 0..=2g` on the nodes `-g..=g`.
///
/// Row `l` holds weights `c[l][k]` with `f^(l)(i) ~ sum_k c[l][k] f(i + k)`,
/// i.e. the `l`-th derivative at 0 of the degree-`2g` interpolant through the
/// `2g + 1` symmetric nodes, in unit grid spacing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StencilTable {
    g: usize,
    coeffs: Vec<Vec<Rational>>,
}

impl StencilTable {
    pub fn derive(g: usize) -> Result<Self> {
        if g == 0 {
            return Err(Error::InvalidHalfWidth(g));
        }
        let size = 2 * g + 1;
        let offsets = (-(g as i64))..=(g as i64);
        // Row v: the interpolant's value at node v, sum_k a_k v^k.
        let vandermonde = RationalMatrix::from_rows(
            offsets
                .map(|v| (0..size).map(|k| int(v.pow(k as u32))).collect())
                .collect(),
        )?;
        let units: Vec<Vec<Rational>> = (0..size)
            .map(|j| (0..size).map(|r| if r == j { int(1) } else { Rational::zero() }).collect())
            .collect();
        // Column j of the inverse: monomial coefficients when f is the unit
        // impulse at node j - g.
        let inverse_columns = solve_linear_systems(&vandermonde, &units)?;
        let coeffs = (0..size)
            .map(|l| {
                let scale = factorial(l);
                inverse_columns.iter().map(|col| &col[l] * &scale).collect()
            })
            .collect();
        Ok(Self { g, coeffs })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    /// Total nodes used by the grid spline built on this stencil, `2g + 2`.
    pub fn q(&self) -> usize {
        2 * self.g + 2
    }

    pub fn max_order(&self) -> usize {
        2 * self.g
    }

    /// Weights for derivative order `l`, indexed by offset `k + g`.
    pub fn row(&self, l: usize) -> &[Rational] {
        &self.coeffs[l]
    }

    /// Weight of node offset `k` (in `-g..=g`) for order `l`; zero outside.
    pub fn coeff(&self, l: usize, k: i64) -> Rational {
        let g = self.g as i64;
        if l > self.max_order() || k < -g || k > g {
            return Rational::zero();
        }
        self.coeffs[l][(k + g) as usize].clone()
    }

    /// Applies row `l` to the `2g + 1` values `f(i - g) ..= f(i + g)`.
    pub fn apply(&self, l: usize, values: &[Rational]) -> Rational {
        self.coeffs[l]
            .iter()
            .zip(values)
            .fold(Rational::zero(), |acc, (c, f)| acc + c * f)
    }

    pub fn apply_f64(&self, l: usize, values: &[f64]) -> f64 {
        self.coeffs[l]
            .iter()
            .zip(values)
            .map(|(c, f)| to_f64(c) * f)
            .sum()
    }
}
