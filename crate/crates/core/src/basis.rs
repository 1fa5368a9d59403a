//! Spline polynomials of the first kind (Hermite basis, `alpha`) and of the
//! second kind (grid-spline basis, `beta`).
//!
//! On the unit cell `[0, 1]` a Hermite spline of odd order `n = 2m + 1` is
//!
//! ```text
//! s(x) = sum_{l=0..m} sum_{i in {0,1}} f^(l)(i) alpha[i][l](x)
//! ```
//!
//! and a grid spline replaces the derivatives with centered differences over
//! `2g + 1` nodes, which turns it into a weighted sum of the `q = 2g + 2`
//! node values `f(-g) ..= f(g + 1)`:
//!
//! ```text
//! s(x) = sum_{i=-g..g+1} f(i) beta[i](x)
//! ```
//!
//! Both families are derived exactly over the rationals. For float evaluation
//! they keep Horner tables in the centered variable `t = x - 1/2`, shifted
//! exactly before rounding; the monomial form of the degree-19 bases loses
//! up to 1e-10 to cancellation on `[0, 1]`, the centered form stays at a few
//! ulps.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{
    factorial, falling_factorial, format_rational, horner, int, solve_linear_systems, Rational,
    RationalMatrix, RationalPolynomial,
};
use crate::stencil::StencilTable;

/// Upper bounds on the derivation parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_n: usize,
    pub max_q: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_n: 19, max_q: 12 }
    }
}

/// A validated interpolation scheme: Hermite order `n`, optionally with the
/// grid-spline node count `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SplineKind {
    n: usize,
    q: Option<usize>,
}

fn check_order(n: usize, limits: &Limits) -> Result<()> {
    if n.is_multiple_of(2) {
        return Err(Error::InvalidOrder {
            n,
            reason: "order must be odd".into(),
        });
    }
    if n > limits.max_n {
        return Err(Error::InvalidOrder {
            n,
            reason: format!("order exceeds the supported maximum {}", limits.max_n),
        });
    }
    Ok(())
}

impl SplineKind {
    pub fn hermite(n: usize) -> Result<Self> {
        Self::hermite_with_limits(n, &Limits::default())
    }

    pub fn hermite_with_limits(n: usize, limits: &Limits) -> Result<Self> {
        check_order(n, limits)?;
        Ok(Self { n, q: None })
    }

    pub fn grid(n: usize, q: usize) -> Result<Self> {
        Self::grid_with_limits(n, q, &Limits::default())
    }

    pub fn grid_with_limits(n: usize, q: usize, limits: &Limits) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidKind { n, q, reason };
        check_order(n, limits).map_err(|e| invalid(e.to_string()))?;
        if !q.is_multiple_of(2) || q < 4 {
            return Err(invalid("q must be even and at least 4".into()));
        }
        if q > limits.max_q {
            return Err(invalid(format!("q exceeds the supported maximum {}", limits.max_q)));
        }
        if n + 3 > 2 * q {
            return Err(invalid(format!(
                "n must not exceed 2q - 3 = {} (m <= 2g)",
                2 * q - 3
            )));
        }
        Ok(Self { n, q: Some(q) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Highest matched derivative order, `(n - 1) / 2`.
    pub fn m(&self) -> usize {
        (self.n - 1) / 2
    }

    pub fn q(&self) -> Option<usize> {
        self.q
    }

    pub fn g(&self) -> Option<usize> {
        self.q.map(|q| (q - 2) / 2)
    }

    pub fn is_grid(&self) -> bool {
        self.q.is_some()
    }

    /// Largest `p` such that every polynomial of degree `<= p` is interpolated
    /// exactly.
    pub fn reproduction_degree(&self) -> usize {
        match self.g() {
            Some(g) => self.n.min(2 * g),
            None => self.n,
        }
    }

    /// Every valid grid kind with odd `n <= max_n` and even `4 <= q <= max_q`.
    pub fn all_grid_kinds(max_n: usize, max_q: usize) -> Vec<SplineKind> {
        let limits = Limits { max_n, max_q };
        (4..=max_q)
            .step_by(2)
            .flat_map(|q| (1..=max_n).step_by(2).map(move |n| (n, q)))
            .filter_map(|(n, q)| SplineKind::grid_with_limits(n, q, &limits).ok())
            .collect()
    }
}

impl std::fmt::Display for SplineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.q {
            Some(q) => write!(f, "({},{})", self.n, q),
            None => write!(f, "({})", self.n),
        }
    }
}

/// Matrix of the Hermite conditions on the unit cell. Row `i * (m + 1) + l`
/// is the `l`-th derivative at node `i` of `sum_k s_k x^k`.
pub fn hermite_system(n: usize) -> RationalMatrix {
    let m = (n - 1) / 2;
    let mut a = RationalMatrix::zeros(n + 1, n + 1);
    for node in 0..2usize {
        for l in 0..=m {
            let row = node * (m + 1) + l;
            for k in l..=n {
                // node^(k - l) is 1 at node 1 and vanishes at node 0 unless k == l.
                if node == 1 || k == l {
                    a[(row, k)] = falling_factorial(k, l);
                }
            }
        }
    }
    a
}

/// Float coefficients of `p(t + 1/2)`, descending, for [`eval_centered`].
pub fn centered_horner(p: &RationalPolynomial) -> Vec<f64> {
    p.compose(&RationalPolynomial::linear(Rational::one(), crate::rational::ratio(1, 2)))
        .horner_f64()
}

#[inline]
pub fn eval_centered(descending: &[f64], x: f64) -> f64 {
    horner(descending, x - 0.5)
}

fn unit_vectors(size: usize) -> Vec<Vec<Rational>> {
    (0..size)
        .map(|j| {
            (0..size)
                .map(|r| if r == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

/// Spline polynomials of the first kind for one order `n`.
#[derive(Clone, Debug)]
pub struct AlphaFamily {
    n: usize,
    polys: [Vec<RationalPolynomial>; 2],
    horner: [Vec<Vec<f64>>; 2],
}

impl AlphaFamily {
    /// Solves the Hermite conditions with one unit right-hand side per
    /// `(node, derivative order)` pair.
    pub fn derive(n: usize) -> Result<Self> {
        Self::derive_with_limits(n, &Limits::default())
    }

    pub fn derive_with_limits(n: usize, limits: &Limits) -> Result<Self> {
        check_order(n, limits)?;
        let m = (n - 1) / 2;
        let solutions = solve_linear_systems(&hermite_system(n), &unit_vectors(n + 1))?;
        let mut solutions = solutions.into_iter().map(RationalPolynomial::new);
        let polys: [Vec<RationalPolynomial>; 2] =
            std::array::from_fn(|_| solutions.by_ref().take(m + 1).collect());
        Ok(Self::from_polys(n, polys))
    }

    fn from_polys(n: usize, polys: [Vec<RationalPolynomial>; 2]) -> Self {
        let horner = std::array::from_fn(|i| polys[i].iter().map(centered_horner).collect());
        Self { n, polys, horner }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        (self.n - 1) / 2
    }

    /// `alpha[node][l]`.
    pub fn poly(&self, node: usize, l: usize) -> &RationalPolynomial {
        &self.polys[node][l]
    }

    #[inline]
    pub fn eval(&self, node: usize, l: usize, x: f64) -> f64 {
        eval_centered(&self.horner[node][l], x)
    }

    /// Checks the defining conditions `d^l0/dx^l0 alpha[i][l](j) = [i == j][l == l0]`.
    pub fn satisfies_defining_system(&self) -> bool {
        let m = self.m();
        (0..2).all(|i| {
            (0..=m).all(|l| {
                let p = &self.polys[i][l];
                (0..=m).all(|l0| {
                    let d = p.derivative(l0);
                    (0..2).all(|j| {
                        let want = if i == j && l == l0 { int(1) } else { int(0) };
                        d.eval(&int(j as i64)) == want
                    })
                })
            })
        })
    }

    /// Checks `alpha[1][l](x) = (-1)^l alpha[0][l](1 - x)`.
    pub fn satisfies_reflection(&self) -> bool {
        let one_minus_x = RationalPolynomial::linear(int(-1), int(1));
        (0..=self.m()).all(|l| {
            let reflected = self.polys[0][l].compose(&one_minus_x);
            let reflected = if l % 2 == 1 { -&reflected } else { reflected };
            reflected == self.polys[1][l]
        })
    }
}

/// Expands the closed form
/// `alpha[0][l](x) = x^l / l! (1 - x)^(m+1) sum_{k=0..m-l} C(m + k, k) x^k`,
/// with `alpha[1][l](x) = (-1)^l alpha[0][l](1 - x)`.
pub fn alpha_closed_form(n: usize, l: usize, node: usize) -> Result<RationalPolynomial> {
    if n.is_multiple_of(2) {
        return Err(Error::InvalidOrder {
            n,
            reason: "order must be odd".into(),
        });
    }
    let m = (n - 1) / 2;
    if l > m || node > 1 {
        return Err(Error::InvalidOrder {
            n,
            reason: format!("need l <= m = {m} and node in {{0, 1}}, got l = {l}, node = {node}"),
        });
    }
    let sum = RationalPolynomial::new(
        (0..=m - l)
            .map(|k| factorial(m + k) / (factorial(m) * factorial(k)))
            .collect(),
    );
    let one_minus_x = RationalPolynomial::linear(int(-1), int(1));
    let lead = RationalPolynomial::monomial(l, factorial(l).recip());
    let alpha0 = &(&lead * &one_minus_x.pow(m + 1)) * &sum;
    if node == 0 {
        return Ok(alpha0);
    }
    let reflected = alpha0.compose(&one_minus_x);
    Ok(if l % 2 == 1 { -&reflected } else { reflected })
}

/// Centered Horner coefficients of one derivative order, `q` rows of equal
/// stride stored back to back. `lo` holds the rounding residual of each
/// coefficient, `c = hi + lo` to about 106 bits.
#[derive(Clone, Debug)]
struct HornerTable {
    stride: usize,
    hi: Vec<f64>,
    lo: Vec<f64>,
}

impl HornerTable {
    fn build(polys: &[RationalPolynomial], order: usize) -> Self {
        let shift = RationalPolynomial::linear(Rational::one(), crate::rational::ratio(1, 2));
        let derived: Vec<RationalPolynomial> =
            polys.iter().map(|p| p.derivative(order).compose(&shift)).collect();
        let stride = derived.iter().map(|p| p.coeffs().len()).max().unwrap_or(0).max(1);
        let mut hi = Vec::with_capacity(stride * polys.len());
        let mut lo = Vec::with_capacity(stride * polys.len());
        for p in &derived {
            let pad = stride - p.coeffs().len();
            hi.extend(std::iter::repeat_n(0.0, pad));
            lo.extend(std::iter::repeat_n(0.0, pad));
            for c in p.coeffs().iter().rev() {
                let (h, l) = split_double_double(c);
                hi.push(h);
                lo.push(l);
            }
        }
        Self { stride, hi, lo }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.hi[i * self.stride..(i + 1) * self.stride]
    }

    fn row_lo(&self, i: usize) -> &[f64] {
        &self.lo[i * self.stride..(i + 1) * self.stride]
    }
}

fn split_double_double(c: &Rational) -> (f64, f64) {
    let hi = crate::rational::to_f64(c);
    let residual = Rational::from_float(hi).map(|h| c - h).unwrap_or_else(Rational::zero);
    (hi, crate::rational::to_f64(&residual))
}

/// Compensated Horner scheme on double-double coefficients: error-free
/// transformations carry the rounding error of every step, so the result is
/// close to correctly rounded even when the polynomial cancels heavily.
#[inline]
fn horner_compensated(hi: &[f64], lo: &[f64], t: f64) -> f64 {
    let mut s = hi[0];
    let mut err = lo[0];
    for (&c, &cl) in hi[1..].iter().zip(&lo[1..]) {
        let p = s * t;
        let pe = s.mul_add(t, -p);
        let sum = p + c;
        let bv = sum - p;
        let se = (p - (sum - bv)) + (c - bv);
        err = err.mul_add(t, pe + se + cl);
        s = sum;
    }
    s + err
}

/// Spline polynomials of the second kind for one grid kind `(n, q)`,
/// indexed by node offset `i = -g ..= g + 1`.
#[derive(Clone, Debug)]
pub struct BetaFamily {
    kind: SplineKind,
    g: usize,
    polys: Vec<RationalPolynomial>,
    horner: Vec<HornerTable>,
}

/// One exported basis polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub n: usize,
    pub q: usize,
    pub i: i64,
    /// `num/den` strings, ascending powers, padded to `n + 1` entries.
    pub coeffs_exact: Vec<String>,
    /// Descending powers, `n + 1` entries.
    pub coeffs_horner: Vec<f64>,
}

fn require_grid(kind: SplineKind) -> Result<(usize, usize)> {
    match (kind.q(), kind.g()) {
        (Some(q), Some(g)) => Ok((q, g)),
        _ => Err(Error::InvalidKind {
            n: kind.n(),
            q: 0,
            reason: "a grid spline needs a node count q".into(),
        }),
    }
}

impl BetaFamily {
    /// Derives the basis by composing the centered-difference weights with
    /// the Hermite basis: `beta[j] = sum_l sum_{node} c[l][j - node] alpha[node][l]`.
    pub fn derive(kind: SplineKind) -> Result<Self> {
        let (_, g) = require_grid(kind)?;
        let alpha = AlphaFamily::derive_with_limits(
            kind.n(),
            &Limits {
                max_n: kind.n(),
                max_q: 0,
            },
        )?;
        let stencil = StencilTable::derive(g)?;
        let gi = g as i64;
        let polys = (-gi..=gi + 1)
            .map(|j| {
                let mut acc = RationalPolynomial::zero();
                for node in 0..2usize {
                    for l in 0..=kind.m() {
                        let c = stencil.coeff(l, j - node as i64);
                        if !c.is_zero() {
                            acc = &acc + &alpha.poly(node, l).scale(&c);
                        }
                    }
                }
                acc
            })
            .collect();
        Ok(Self::from_polys(kind, polys))
    }

    /// Derives the basis from one combined linear system: the Taylor data at
    /// nodes 0 and 1 (written `t0 + t1 h + t2 h^2 / 2! + ...`) interpolate
    /// the `2g + 1` surrounding node values, and the spline's derivatives up to
    /// `m` at each node equal that node's Taylor data. Solving with each node
    /// value as a unit right-hand side and reading off the spline coefficients
    /// gives `beta[j]`. Shares no code with [`BetaFamily::derive`] beyond the
    /// exact solver.
    pub fn derive_direct(kind: SplineKind) -> Result<Self> {
        let (q, g) = require_grid(kind)?;
        let n = kind.n();
        let m = kind.m();
        let taylor_len = 2 * g + 1;
        let size = n + 1 + 2 * taylor_len;
        let taylor_col = |node: usize, k: usize| n + 1 + node * taylor_len + k;
        let mut a = RationalMatrix::zeros(size, size);
        let mut rhs_row_of_value: Vec<(usize, i64)> = Vec::new();
        let mut row = 0;
        for node in 0..2usize {
            for v in -(g as i64)..=(g as i64) {
                for k in 0..taylor_len {
                    a[(row, taylor_col(node, k))] = int(v.pow(k as u32)) / factorial(k);
                }
                rhs_row_of_value.push((row, node as i64 + v));
                row += 1;
            }
        }
        for node in 0..2usize {
            for l in 0..=m {
                for k in l..=n {
                    if node == 1 || k == l {
                        a[(row, k)] = falling_factorial(k, l);
                    }
                }
                a[(row, taylor_col(node, l))] = int(-1);
                row += 1;
            }
        }
        debug_assert_eq!(row, size);
        let gi = g as i64;
        let rhs: Vec<Vec<Rational>> = (-gi..=gi + 1)
            .map(|j| {
                let mut b = vec![Rational::zero(); size];
                for &(r, value_node) in &rhs_row_of_value {
                    if value_node == j {
                        b[r] = Rational::one();
                    }
                }
                b
            })
            .collect();
        let solutions = solve_linear_systems(&a, &rhs)?;
        let polys: Vec<RationalPolynomial> = solutions
            .into_iter()
            .map(|mut s| {
                s.truncate(n + 1);
                RationalPolynomial::new(s)
            })
            .collect();
        debug_assert_eq!(polys.len(), q);
        Ok(Self::from_polys(kind, polys))
    }

    /// Wraps arbitrary polynomials; used to check validation against
    /// deliberately broken families.
    pub fn from_polys(kind: SplineKind, polys: Vec<RationalPolynomial>) -> Self {
        let g = kind.g().unwrap_or(0);
        let horner = (0..=kind.m()).map(|d| HornerTable::build(&polys, d)).collect();
        Self {
            kind,
            g,
            polys,
            horner,
        }
    }

    pub fn kind(&self) -> SplineKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.kind.n()
    }

    pub fn m(&self) -> usize {
        self.kind.m()
    }

    pub fn g(&self) -> usize {
        self.g
    }

    /// Number of polynomials (nodes per axis).
    pub fn q(&self) -> usize {
        self.polys.len()
    }

    pub fn polys(&self) -> &[RationalPolynomial] {
        &self.polys
    }

    /// `beta[i]` for `i` in `-g ..= g + 1`; the zero polynomial outside.
    pub fn poly(&self, i: i64) -> RationalPolynomial {
        let idx = i + self.g as i64;
        if idx < 0 || idx as usize >= self.polys.len() {
            return RationalPolynomial::zero();
        }
        self.polys[idx as usize].clone()
    }

    /// Node offsets `-g ..= g + 1` in storage order.
    pub fn offsets(&self) -> impl Iterator<Item = i64> + '_ {
        let g = self.g as i64;
        (-g..).take(self.polys.len())
    }

    /// Writes `(d/dx)^order beta[i](xi)` for every `i` into `out`.
    #[inline]
    pub fn eval_into(&self, order: usize, xi: f64, out: &mut [f64]) -> Result<()> {
        let table = self.horner.get(order).ok_or(Error::DerivativeTooHigh {
            order,
            max: self.m(),
        })?;
        if out.len() != self.polys.len() {
            return Err(Error::DimensionMismatch(format!(
                "output holds {} values, family has {}",
                out.len(),
                self.polys.len()
            )));
        }
        // Values are accurate to a few ulps with plain Horner; derivative
        // rows have large, cancelling coefficients and need compensation.
        if order == 0 {
            for (i, o) in out.iter_mut().enumerate() {
                *o = eval_centered(table.row(i), xi);
            }
        } else {
            let t = xi - 0.5;
            for (i, o) in out.iter_mut().enumerate() {
                *o = horner_compensated(table.row(i), table.row_lo(i), t);
            }
        }
        Ok(())
    }

    pub fn eval(&self, order: usize, xi: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.polys.len()];
        self.eval_into(order, xi, &mut out)?;
        Ok(out)
    }

    /// Centered Horner row (descending powers of `x - 1/2`) for derivative
    /// `order` of `beta[i]`.
    pub fn horner_row(&self, order: usize, i: i64) -> Option<&[f64]> {
        let idx = usize::try_from(i + self.g as i64).ok()?;
        let table = self.horner.get(order)?;
        (idx < self.polys.len()).then(|| table.row(idx))
    }

    pub fn export_records(&self) -> Vec<CoefficientRecord> {
        let n = self.n();
        self.offsets()
            .zip(&self.polys)
            .map(|(i, p)| {
                let len = n.max(p.degree().unwrap_or(0)) + 1;
                let coeffs_exact = (0..len).map(|k| format_rational(&p.coeff(k))).collect();
                let mut coeffs_horner = vec![0.0; len - p.coeffs().len()];
                coeffs_horner.extend(p.horner_f64());
                CoefficientRecord {
                    n,
                    q: self.kind.q().unwrap_or(0),
                    i,
                    coeffs_exact,
                    coeffs_horner,
                }
            })
            .collect()
    }

    pub fn validate(&self) -> ValidationReport {
        validate_family(self)
    }
}

/// Outcome of one exact check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub kind: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn new(kind: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, failures: Vec<String>) {
        let passed = failures.is_empty();
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: failures.join("; "),
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs every structural check on a grid-spline family over the rationals.
pub fn validate_family(beta: &BetaFamily) -> ValidationReport {
    let mut report = ValidationReport::new(beta.kind().to_string());
    let n = beta.n();
    let m = beta.m();
    let g = beta.g() as i64;
    let zero = Rational::zero();
    let one = Rational::one();
    let offsets: Vec<i64> = beta.offsets().collect();

    report.push(
        "degree_bound",
        offsets
            .iter()
            .zip(beta.polys())
            .filter(|(_, p)| p.degree().is_some_and(|d| d > n))
            .map(|(i, p)| format!("beta[{i}] has degree {:?}", p.degree()))
            .collect(),
    );

    let mut failures = Vec::new();
    for (&i, p) in offsets.iter().zip(beta.polys()) {
        for node in 0..2i64 {
            let want = if i == node { &one } else { &zero };
            let got = p.eval(&int(node));
            if &got != want {
                failures.push(format!("beta[{i}]({node}) = {got}"));
            }
        }
    }
    report.push("interpolation", failures);

    let total = beta
        .polys()
        .iter()
        .fold(RationalPolynomial::zero(), |acc, p| &acc + p);
    report.push(
        "partition_of_unity",
        if total == RationalPolynomial::one() {
            vec![]
        } else {
            vec![format!("sum of basis = {total}")]
        },
    );

    let mut failures = Vec::new();
    for l in 0..=m {
        for j in -g..=g + 2 {
            let right = beta.poly(j).derivative(l).eval(&one);
            let left = beta.poly(j - 1).derivative(l).eval(&zero);
            if right != left {
                failures.push(format!("l={l} j={j}: {right} != {left}"));
            }
        }
    }
    report.push("smoothness_chain", failures);

    let one_minus_x = RationalPolynomial::linear(int(-1), int(1));
    report.push(
        "reflection",
        offsets
            .iter()
            .filter(|&&i| beta.poly(i) != beta.poly(1 - i).compose(&one_minus_x))
            .map(|i| format!("beta[{i}](x) != beta[{}](1 - x)", 1 - i))
            .collect(),
    );

    let degree = beta.kind().reproduction_degree();
    let mut failures = Vec::new();
    for p in 0..=degree {
        let assembled = offsets
            .iter()
            .zip(beta.polys())
            .fold(RationalPolynomial::zero(), |acc, (&i, b)| {
                &acc + &b.scale(&int(i.pow(p as u32)))
            });
        if assembled != RationalPolynomial::monomial(p, one.clone()) {
            failures.push(format!("x^{p} reproduced as {assembled}"));
        }
    }
    report.push("reproduction", failures);

    report
}
