//! Shared test helpers: an independent direct-system oracle and seeded field
//! generators.
#![allow(dead_code)]

use std::f64::consts::TAU;

use gridspline::rational::{factorial, falling_factorial, int, ratio, solve_linear_system, Rational, RationalMatrix};
use gridspline::{Boundary, GridField};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All index tuples in `[lo, hi]^ndim`, last axis fastest.
pub fn tuples(ndim: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..ndim {
        out = out
            .into_iter()
            .flat_map(|t| {
                (lo..=hi).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

fn rpow(x: &Rational, k: i64) -> Rational {
    (0..k).fold(Rational::one(), |acc, _| acc * x)
}

/// Grid spline of order `n` with half-width `g` in `ndim` dimensions, built
/// directly as the unique polynomial of degree `n` per axis whose mixed
/// derivatives up to `m` at every corner of the unit cell equal those of the
/// tensor Lagrange interpolant through the `(2g + 1)^D` nodes around that
/// corner. `f` gives node values relative to the cell's lower corner.
pub fn direct_grid_spline(n: usize, g: usize, ndim: usize, f: impl Fn(&[i64]) -> Rational, point: &[Rational]) -> Rational {
    let m = (n - 1) / 2;
    let gi = g as i64;
    let taylor_idx = tuples(ndim, 0, 2 * gi);
    let taylor_nodes = tuples(ndim, -gi, gi);
    let corners = tuples(ndim, 0, 1);
    let orders = tuples(ndim, 0, m as i64);
    let spline_idx = tuples(ndim, 0, n as i64);

    // Tensor Lagrange interpolant at each corner, monomial coefficients.
    let lagrange = RationalMatrix::from_rows(
        taylor_nodes
            .iter()
            .map(|v| {
                taylor_idx
                    .iter()
                    .map(|k| k.iter().zip(v).fold(Rational::one(), |acc, (&kj, &vj)| acc * rpow(&int(vj), kj)))
                    .collect()
            })
            .collect(),
    )
    .unwrap();

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for c in &corners {
        let values: Vec<Rational> = taylor_nodes
            .iter()
            .map(|v| {
                let node: Vec<i64> = c.iter().zip(v).map(|(a, b)| a + b).collect();
                f(&node)
            })
            .collect();
        let t = solve_linear_system(&lagrange, &values).unwrap();
        for l in &orders {
            let pos = taylor_idx.iter().position(|k| k == l).unwrap();
            let scale = l.iter().fold(Rational::one(), |acc, &lj| acc * factorial(lj as usize));
            rhs.push(&t[pos] * scale);
            rows.push(
                spline_idx
                    .iter()
                    .map(|k| {
                        k.iter().zip(l).zip(c).fold(Rational::one(), |acc, ((&kj, &lj), &cj)| {
                            if kj < lj {
                                return Rational::zero();
                            }
                            let base = falling_factorial(kj as usize, lj as usize);
                            let power = if cj == 1 || kj == lj { Rational::one() } else { Rational::zero() };
                            acc * base * power
                        })
                    })
                    .collect(),
            );
        }
    }
    let system = RationalMatrix::from_rows(rows).unwrap();
    let s = solve_linear_system(&system, &rhs).unwrap();
    spline_idx.iter().zip(&s).fold(Rational::zero(), |acc, (k, sk)| {
        acc + sk * k.iter().zip(point).fold(Rational::one(), |a, (&kj, x)| a * rpow(x, kj))
    })
}

/// Random field whose samples are multiples of 1/64 in [-16, 16], so they
/// convert to rationals exactly.
pub fn dyadic_field(dims: Vec<usize>, seed: u64) -> GridField {
    let mut r = rng(seed);
    let total: usize = dims.iter().product();
    let data = (0..total).map(|_| r.random_range(-1024i32..=1024) as f64 / 64.0).collect();
    let h = vec![1.0; dims.len()];
    GridField::new(dims, h, data, Boundary::Periodic).unwrap()
}

pub fn uniform_field(dims: Vec<usize>, h: Vec<f64>, seed: u64) -> GridField {
    let mut r = rng(seed);
    let total: usize = dims.iter().product();
    let data = (0..total).map(|_| r.random_range(-1.0..1.0)).collect();
    GridField::new(dims, h, data, Boundary::Periodic).unwrap()
}

/// Random smooth periodic function on `[0, 1)^D` from a few low modes.
#[derive(Clone, Debug)]
pub struct FourierFunction {
    modes: Vec<(Vec<f64>, f64, f64)>,
}

impl FourierFunction {
    pub fn random(ndim: usize, seed: u64) -> Self {
        let mut r = rng(seed);
        let modes = (0..6)
            .map(|_| {
                let k = (0..ndim).map(|_| r.random_range(-2i32..=2) as f64).collect();
                (k, r.random_range(-1.0..1.0), r.random_range(0.0..TAU))
            })
            .collect();
        Self { modes }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.modes
            .iter()
            .map(|(k, a, phase)| {
                let arg: f64 = k.iter().zip(x).map(|(kj, xj)| kj * xj).sum();
                a * (TAU * arg + phase).cos()
            })
            .sum()
    }

    pub fn sample(&self, nodes: usize, ndim: usize) -> GridField {
        let h = 1.0 / nodes as f64;
        GridField::from_fn(vec![nodes; ndim], vec![h; ndim], Boundary::Periodic, |x| self.eval(x)).unwrap()
    }
}

/// Dyadic point `k / 1024` both as float and as an exact rational.
pub fn dyadic(k: i64) -> (f64, Rational) {
    (k as f64 / 1024.0, ratio(k, 1024))
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}
