//! Acceptance criteria. Runs as a plain binary (`harness = false`) and prints
//! one PASS/FAIL line per criterion; exits nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use gridspline::basis::hermite_system;
use gridspline::convergence::{ConvergenceStudy, TestFunction};
use gridspline::rational::{int, ratio, to_f64, Rational, RationalPolynomial};
use gridspline::{
    alpha_closed_form, AlphaFamily, BetaFamily, Boundary, GridField, GridSpline, HermiteSpline, KernelPath,
    SplineKind,
};
use num_traits::Zero;
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || {
        format!("took {:.2} s, limit {limit_s} s", elapsed.as_secs_f64())
    })
}

fn p(c: &[i64]) -> RationalPolynomial {
    RationalPolynomial::from_ints(c)
}

fn grid_kinds_with_q(qs: &[usize]) -> Vec<SplineKind> {
    SplineKind::all_grid_kinds(19, 12)
        .into_iter()
        .filter(|k| qs.contains(&k.q().unwrap()))
        .collect()
}

fn ac1_beta_5_4() -> Outcome {
    let start = Instant::now();
    let beta = BetaFamily::derive(SplineKind::grid(5, 4).unwrap()).unwrap();
    let elapsed = start.elapsed();
    let half = ratio(1, 2);
    let xm1 = p(&[-1, 1]);
    let x = p(&[0, 1]);
    // Factored forms, offsets -1, 0, 1, 2.
    let printed = [
        (&(&xm1.pow(3) * &x) * &p(&[1, 2])).scale(&half),
        (&xm1 * &p(&[2, 2, 0, -9, 6])).scale(&-&half),
        (&x * &p(&[1, 1, 9, -15, 6])).scale(&half),
        (&(&xm1 * &x.pow(3)) * &p(&[-3, 2])).scale(&-&half),
    ];
    for (i, want) in (-1..=2).zip(&printed) {
        ensure(&beta.poly(i) == want, || format!("beta[{i}] = {} expected {want}", beta.poly(i)))?;
    }
    within(elapsed, 1.0)?;
    Ok(format!("4 polynomials equal exactly, derived in {:.3} s", elapsed.as_secs_f64()))
}

fn ac2_alpha_closed_form() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for n in (1..=19).step_by(2) {
        let alpha = AlphaFamily::derive(n).unwrap();
        for node in 0..2 {
            for l in 0..=alpha.m() {
                let closed = alpha_closed_form(n, l, node).unwrap();
                ensure(&closed == alpha.poly(node, l), || format!("n={n} node={node} l={l} differs"))?;
                count += 1;
            }
        }
        // The solved form satisfies its own conditions.
        let sys = hermite_system(n);
        for node in 0..2 {
            for l in 0..=alpha.m() {
                let coeffs: Vec<Rational> = (0..=n).map(|k| alpha.poly(node, l).coeff(k)).collect();
                let image = sys.mul_vec(&coeffs).unwrap();
                let hit = node * (alpha.m() + 1) + l;
                for (r, v) in image.iter().enumerate() {
                    ensure(*v == if r == hit { int(1) } else { int(0) }, || {
                        format!("n={n}: defining system row {r} violated")
                    })?;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, 10.0)?;
    Ok(format!("{count} polynomials, n = 1..19, in {:.2} s", elapsed.as_secs_f64()))
}

fn ac3_smoothness_chain() -> Outcome {
    let start = Instant::now();
    let kinds = grid_kinds_with_q(&[4, 6, 8, 10]);
    let zero = Rational::zero();
    let one = int(1);
    let mut conditions = 0;
    for &kind in &kinds {
        let beta = BetaFamily::derive(kind).unwrap();
        let g = beta.g() as i64;
        for l in 0..=kind.m() {
            for j in -g..=g + 2 {
                let right = beta.poly(j).derivative(l).eval(&one);
                let left = beta.poly(j - 1).derivative(l).eval(&zero);
                ensure(right == left, || format!("{kind} l={l} j={j}: {right} vs {left}"))?;
                conditions += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, 10.0)?;
    Ok(format!(
        "{} kinds, {conditions} exact conditions in {:.2} s",
        kinds.len(),
        elapsed.as_secs_f64()
    ))
}

fn ac4_unity_and_reflection() -> Outcome {
    let start = Instant::now();
    let kinds = SplineKind::all_grid_kinds(19, 12);
    let one_minus_x = p(&[1, -1]);
    for &kind in &kinds {
        let beta = BetaFamily::derive(kind).unwrap();
        let total = beta.polys().iter().fold(RationalPolynomial::zero(), |a, b| &a + b);
        ensure(total == RationalPolynomial::one(), || format!("{kind}: sum = {total}"))?;
        for i in beta.offsets() {
            ensure(beta.poly(i) == beta.poly(1 - i).compose(&one_minus_x), || {
                format!("{kind}: reflection fails at i={i}")
            })?;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, 5.0)?;
    Ok(format!("{} kinds in {:.2} s", kinds.len(), elapsed.as_secs_f64()))
}

fn ac5_reproduction() -> Outcome {
    let mut identities = 0;
    for kind in SplineKind::all_grid_kinds(19, 12) {
        let beta = BetaFamily::derive(kind).unwrap();
        for deg in 0..=kind.reproduction_degree() {
            let assembled = beta.offsets().fold(RationalPolynomial::zero(), |acc, i| {
                &acc + &beta.poly(i).scale(&int(i.pow(deg as u32)))
            });
            ensure(assembled == RationalPolynomial::monomial(deg, int(1)), || {
                format!("{kind}: x^{deg} assembled as {assembled}")
            })?;
            identities += 1;
        }
    }

    let mut r = rng(55);
    let mut field_checks = 0;
    let mut worst = 0.0f64;
    for (n, q) in [(1, 4), (3, 4), (5, 4), (5, 6), (9, 6), (7, 8), (13, 8), (11, 10), (19, 12)] {
        let kind = SplineKind::grid(n, q).unwrap();
        let spline = GridSpline::new(kind).unwrap();
        let g = kind.g().unwrap();
        let nodes = 40usize;
        let h = 0.05;
        for deg in 0..=kind.reproduction_degree() {
            let f = |x: f64| (1.0 + x).powi(deg as i32);
            let field = GridField::from_fn(vec![nodes], vec![h], Boundary::Strict, |x| f(x[0])).unwrap();
            let lo = g as f64 * h;
            let hi = (nodes - 1 - g) as f64 * h;
            for _ in 0..100 {
                let x = r.random_range(lo..hi);
                let got = spline.evaluate(&field, &[x]).unwrap();
                let want = f(x);
                worst = worst.max((got - want).abs() / want.abs());
                ensure(rel_close(got, want, 1e-11), || format!("{kind} deg {deg} at {x}: {got} vs {want}"))?;
                field_checks += 1;
            }
        }
        // Two-dimensional product of the highest degree.
        let deg = kind.reproduction_degree() as i32;
        let f2 = |x: &[f64]| (1.0 + x[0]).powi(deg) * (2.0 - x[1]).powi(deg.min(2));
        let field = GridField::from_fn(vec![nodes, nodes], vec![h, h], Boundary::Strict, f2).unwrap();
        let lo = g as f64 * h;
        let hi = (nodes - 1 - g) as f64 * h;
        for _ in 0..100 {
            let x = [r.random_range(lo..hi), r.random_range(lo..hi)];
            let got = spline.evaluate(&field, &x).unwrap();
            let want = f2(&x);
            worst = worst.max((got - want).abs() / want.abs());
            ensure(rel_close(got, want, 1e-11), || format!("{kind} 2D at {x:?}: {got} vs {want}"))?;
            field_checks += 1;
        }
    }
    Ok(format!(
        "{identities} exact identities; {field_checks} field points, worst relative error {worst:.2e}"
    ))
}

fn ac6_direct_oracle() -> Outcome {
    let start = Instant::now();
    let kind = SplineKind::grid(3, 4).unwrap();
    let spline = GridSpline::new(kind).unwrap();
    let mut r = rng(66);
    let mut worst = 0.0f64;
    let trials = 24;
    for t in 0..trials {
        let field = dyadic_field(vec![6, 6], 600 + t);
        let (x, xr) = dyadic(r.random_range(0..6 * 1024));
        let (y, yr) = dyadic(r.random_range(0..6 * 1024));
        let got = spline.evaluate(&field, &[x, y]).unwrap();
        let coords = field.grid_coordinates(&[x, y]).unwrap();
        let cell = coords.cell.clone();
        let frac = [
            xr - int(cell[0]),
            yr - int(cell[1]),
        ];
        let exact = direct_grid_spline(
            3,
            1,
            2,
            |node| {
                let i = (cell[0] + node[0]).rem_euclid(6) as usize;
                let j = (cell[1] + node[1]).rem_euclid(6) as usize;
                ratio((field.value(&[i, j]) * 64.0) as i64, 64)
            },
            &frac,
        );
        let want = to_f64(&exact);
        let err = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
        worst = worst.max(err);
        ensure(err <= 1e-10, || format!("trial {t}: {got} vs {want}"))?;
    }
    let elapsed = start.elapsed();
    within(elapsed, 30.0)?;
    Ok(format!(
        "{trials} fields, worst relative error {worst:.2e}, {:.2} s",
        elapsed.as_secs_f64()
    ))
}

fn ac7_input_counts() -> Outcome {
    let mut checked = Vec::new();
    for ndim in 1..=3u32 {
        for n in [3usize, 5] {
            let hermite = HermiteSpline::new(n).unwrap();
            let m = (n - 1) / 2;
            let mut calls = 0usize;
            let point = vec![0.3; ndim as usize];
            hermite.evaluate(
                |_, _| {
                    calls += 1;
                    1.0
                },
                &point,
            );
            let want = 2usize.pow(ndim) * (m + 1).pow(ndim);
            ensure(calls == want, || format!("D={ndim} n={n}: {calls} calls, expected {want}"))?;
        }
        for q in [4usize, 6] {
            let field = uniform_field(vec![8; ndim as usize], vec![1.0; ndim as usize], 7);
            let patch = field.gather_local(&vec![3; ndim as usize], (q - 2) / 2).unwrap();
            let want = q.pow(ndim);
            ensure(patch.len() == want, || format!("D={ndim} q={q}: patch {} expected {want}", patch.len()))?;
            checked.push(want);
        }
    }
    Ok(format!("provider calls 2^D(m+1)^D and patch sizes q^D for D=1..3 (patch sizes {checked:?})"))
}

fn ac8_convergence() -> Outcome {
    let start = Instant::now();
    let kinds: Vec<SplineKind> = [(3, 4), (5, 4), (5, 6), (9, 6)]
        .into_iter()
        .map(|(n, q)| SplineKind::grid(n, q).unwrap())
        .collect();
    let rows = ConvergenceStudy::halving(TestFunction::Sine, 1, kinds.clone()).run().unwrap();
    let mut summary = Vec::new();
    for kind in kinds {
        let required = kind.reproduction_degree() as f64 + 1.0 - 0.2;
        let orders: Vec<f64> = rows
            .iter()
            .filter(|r| r.kind == kind)
            .filter_map(|r| r.observed_order)
            .collect();
        for (step, &o) in orders.iter().enumerate() {
            ensure(o >= required, || {
                format!("{kind}: observed order {o:.3} at refinement {} below {required}", step + 1)
            })?;
        }
        summary.push(format!(
            "{kind} min {:.2}",
            orders.iter().copied().fold(f64::INFINITY, f64::min)
        ));
    }
    let elapsed = start.elapsed();
    within(elapsed, 60.0)?;
    Ok(format!("{} in {:.2} s", summary.join(", "), elapsed.as_secs_f64()))
}

fn ac9_partitioned() -> Outcome {
    let mut r = rng(99);
    let mut cases = 0;
    let mut worst = 0.0f64;
    for (n, q) in [(3, 4), (5, 4)] {
        let spline = GridSpline::new(SplineKind::grid(n, q).unwrap()).unwrap();
        let g = spline.family().g() as i64;
        for t in 0..20 {
            let field = uniform_field(vec![9, 8, 10], vec![0.5, 0.25, 0.1], 900 + t);
            let point = [
                r.random_range(-2.0..6.0),
                r.random_range(-1.0..3.0),
                r.random_range(0.0..1.0),
            ];
            let full = spline.evaluate(&field, &point).unwrap();
            let coords = field.grid_coordinates(&point).unwrap();
            for axis in 0..3 {
                let first = coords.cell[axis] - g;
                // Every split strictly inside the stencil.
                for split in first + 1..first + q as i64 {
                    let (low, high) = spline.partitioned_evaluate(&field, &point, axis, split).unwrap();
                    ensure(low != 0.0 && high != 0.0, || format!("split {split} left a side empty"))?;
                    let err = (low + high - full).abs() / full.abs();
                    worst = worst.max(err);
                    ensure(err <= 1e-12, || {
                        format!("({n},{q}) axis {axis} split {split}: {low} + {high} vs {full}")
                    })?;
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} splits, worst relative error {worst:.2e}"))
}

fn ac10_derivatives() -> Outcome {
    let mut r = rng(1010);
    let mut worst_fd = 0.0f64;
    let mut fd_cases = 0;
    for (n, q) in [(3, 4), (5, 4), (5, 6), (9, 6), (7, 8)] {
        let spline = GridSpline::new(SplineKind::grid(n, q).unwrap()).unwrap();
        for ndim in 1..=3usize {
            for t in 0..5 {
                let func = FourierFunction::random(ndim, 10_000 + t + 31 * ndim as u64);
                let nodes = 16;
                let field = func.sample(nodes, ndim);
                let h = field.h()[0];
                for _ in 0..4 {
                    let point: Vec<f64> = (0..ndim).map(|_| r.random_range(0.0..1.0)).collect();
                    for axis in 0..ndim {
                        let mut orders = vec![0; ndim];
                        orders[axis] = 1;
                        let d = spline.evaluate_derivative(&field, &point, &orders).unwrap();
                        let step = 1e-5 * h;
                        let mut plus = point.clone();
                        let mut minus = point.clone();
                        plus[axis] += step;
                        minus[axis] -= step;
                        let fd = (spline.evaluate(&field, &plus).unwrap() - spline.evaluate(&field, &minus).unwrap())
                            / (2.0 * step);
                        let err = (d - fd).abs() / d.abs().max(fd.abs());
                        worst_fd = worst_fd.max(err);
                        ensure(err <= 1e-5, || format!("({n},{q}) D={ndim}: derivative {d} vs fd {fd}"))?;
                        fd_cases += 1;
                    }
                }
            }
        }
    }

    let mut worst_jump = 0.0f64;
    let mut jumps = 0;
    for kind in SplineKind::all_grid_kinds(19, 12) {
        let spline = GridSpline::new(kind).unwrap();
        for t in 0..3 {
            let func = FourierFunction::random(1, 20_000 + t);
            let field = func.sample(24, 1);
            for k in 0..24i64 {
                for order in 0..=kind.m() {
                    let right = spline.evaluate_in_cell(&field, &[k], &[0.0], &[order]).unwrap();
                    let left = spline.evaluate_in_cell(&field, &[k - 1], &[1.0], &[order]).unwrap();
                    // Derivatives of order l carry a factor h^-l; compare in unit-cell scale.
                    let scale = field.h()[0].powi(order as i32);
                    let jump = (right - left).abs() * scale;
                    worst_jump = worst_jump.max(jump);
                    ensure(jump <= 1e-10, || format!("{kind} node {k} order {order}: {left} vs {right}"))?;
                    jumps += 1;
                }
            }
        }
        // Mixed derivatives across a face in 2D.
        if kind.m() >= 1 && kind.q() == Some(4) {
            let func = FourierFunction::random(2, 30_000);
            let field = func.sample(12, 2);
            for order in 0..=kind.m() {
                let orders = [order, 1.min(kind.m())];
                let right = spline.evaluate_in_cell(&field, &[5, 3], &[0.0, 0.4], &orders).unwrap();
                let left = spline.evaluate_in_cell(&field, &[4, 3], &[1.0, 0.4], &orders).unwrap();
                let scale = field.h()[0].powi((orders[0] + orders[1]) as i32);
                let jump = (right - left).abs() * scale;
                worst_jump = worst_jump.max(jump);
                ensure(jump <= 1e-10, || format!("{kind} 2D order {orders:?}: {left} vs {right}"))?;
                jumps += 1;
            }
        }
    }
    Ok(format!(
        "{fd_cases} finite-difference checks (worst {worst_fd:.2e}); {jumps} continuity checks (worst {worst_jump:.2e})"
    ))
}

fn ac11_kernel_paths() -> Outcome {
    let mut r = rng(1111);
    let mut compared = 0;
    for (n, q) in [(3, 4), (5, 4)] {
        let spline = GridSpline::new(SplineKind::grid(n, q).unwrap()).unwrap();
        for ndim in 1..=3usize {
            let field = uniform_field(vec![10; ndim], vec![0.1; ndim], 1100 + ndim as u64);
            let count = 100_000 / 2;
            for _ in 0..count {
                let point: Vec<f64> = (0..ndim).map(|_| r.random_range(-1.0..2.0)).collect();
                let a = spline.evaluate_with(&field, &point, KernelPath::Auto).unwrap();
                let b = spline.evaluate_with(&field, &point, KernelPath::Generic).unwrap();
                ensure(a.to_bits() == b.to_bits(), || format!("({n},{q}) D={ndim} at {point:?}: {a} vs {b}"))?;
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} points bitwise identical (100000 per dimension)"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("AC1 beta(5,4) reproduction", ac1_beta_5_4),
        ("AC2 closed-form alpha equivalence", ac2_alpha_closed_form),
        ("AC3 smoothness chain", ac3_smoothness_chain),
        ("AC4 partition of unity and reflection", ac4_unity_and_reflection),
        ("AC5 reproduction degree", ac5_reproduction),
        ("AC6 direct-system oracle", ac6_direct_oracle),
        ("AC7 input counts", ac7_input_counts),
        ("AC8 convergence order", ac8_convergence),
        ("AC9 partitioned evaluation", ac9_partitioned),
        ("AC10 derivative consistency", ac10_derivatives),
        ("AC11 specialized vs generic kernel", ac11_kernel_paths),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
