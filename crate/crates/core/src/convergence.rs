//! Empirical order-of-accuracy studies on periodic fields.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::SplineKind;
use crate::error::{Error, Result};
use crate::field::{Boundary, GridField, GridSpline};

/// Built-in smooth periodic test functions on `[0, 1)^D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestFunction {
    /// `1.5` everywhere.
    Constant,
    /// `prod_j sin(2 pi x_j)`.
    Sine,
    /// `prod_j (0.3 + sin(2 pi x_j + 0.4) + 0.5 cos(4 pi x_j) + 0.2 sin(6 pi x_j))`.
    FourierMix,
}

impl TestFunction {
    pub const ALL: [TestFunction; 3] = [Self::Constant, Self::Sine, Self::FourierMix];

    pub fn id(self) -> &'static str {
        match self {
            Self::Constant => "const",
            Self::Sine => "sin",
            Self::FourierMix => "fourier",
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.id() == id)
            .ok_or_else(|| Error::UnknownFunction(id.to_string()))
    }

    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            Self::Constant => 1.5,
            Self::Sine => x.iter().map(|&v| (TAU * v).sin()).product(),
            Self::FourierMix => x
                .iter()
                .map(|&v| 0.3 + (TAU * v + 0.4).sin() + 0.5 * (2.0 * TAU * v).cos() + 0.2 * (3.0 * TAU * v).sin())
                .product(),
        }
    }
}

impl std::str::FromStr for TestFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::from_id(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub kind: SplineKind,
    pub h: f64,
    pub max_error: f64,
    /// `log(err_prev / err) / log(h_prev / h)`; absent for the coarsest grid.
    pub observed_order: Option<f64>,
}

/// Seeded additive-recurrence (Kronecker) points in `[0, 1)^D`.
pub fn quasi_random_points(ndim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    // Generalized golden ratio: the positive root of x^(D+1) = x + 1.
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (ndim as f64 + 1.0));
    }
    let step: Vec<f64> = (1..=ndim).map(|j| phi.powi(-(j as i32)).fract()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..ndim).map(|_| rng.random::<f64>()).collect();
    (0..count)
        .map(|k| {
            (0..ndim)
                .map(|j| (shift[j] + (k as f64 + 1.0) * step[j]).fract())
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ConvergenceStudy {
    pub function: TestFunction,
    pub ndim: usize,
    pub kinds: Vec<SplineKind>,
    /// Grid spacings; each must divide the unit period.
    pub h: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl ConvergenceStudy {
    /// `h = 1/16, 1/32, ..., 1/256` with 1000 samples.
    pub fn halving(function: TestFunction, ndim: usize, kinds: Vec<SplineKind>) -> Self {
        Self {
            function,
            ndim,
            kinds,
            h: (4..=8).map(|p| 1.0 / f64::from(1u32 << p)).collect(),
            samples: 1000,
            seed: 0x5eed,
        }
    }

    pub fn run(&self) -> Result<Vec<ConvergenceRow>> {
        let mut nodes = Vec::with_capacity(self.h.len());
        for &h in &self.h {
            let count = (1.0 / h).round();
            if h.is_nan() || h <= 0.0 || count < 1.0 || ((count * h) - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidField(format!(
                    "grid spacing {h} does not divide the unit period"
                )));
            }
            nodes.push(count as usize);
        }
        let points = quasi_random_points(self.ndim, self.samples, self.seed);
        let mut rows = Vec::new();
        for &kind in &self.kinds {
            let spline = GridSpline::new(kind)?;
            let mut prev: Option<(f64, f64)> = None;
            for &count in &nodes {
                let h = 1.0 / count as f64;
                let field = GridField::from_fn(
                    vec![count; self.ndim],
                    vec![h; self.ndim],
                    Boundary::Periodic,
                    |x| self.function.eval(x),
                )?;
                let mut max_error = 0.0f64;
                for p in &points {
                    let err = (spline.evaluate(&field, p)? - self.function.eval(p)).abs();
                    max_error = max_error.max(err);
                }
                let observed_order = prev.map(|(ph, pe)| (pe / max_error).ln() / (ph / h).ln());
                rows.push(ConvergenceRow {
                    kind,
                    h,
                    max_error,
                    observed_order,
                });
                prev = Some((h, max_error));
            }
        }
        Ok(rows)
    }
}
