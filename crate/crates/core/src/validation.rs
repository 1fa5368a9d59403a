//! Exact validation suite over a range of spline kinds.

use crate::basis::{alpha_closed_form, AlphaFamily, BetaFamily, Limits, SplineKind, ValidationReport};
use crate::error::Result;
use crate::rational::{ratio, RationalPolynomial};

/// The four `(n, q) = (5, 4)` basis polynomials in factored form, offsets
/// `-1, 0, 1, 2`.
pub fn printed_beta_5_4() -> Vec<RationalPolynomial> {
    let p = RationalPolynomial::from_ints;
    let half = ratio(1, 2);
    let xm1 = p(&[-1, 1]);
    let x = p(&[0, 1]);
    vec![
        (&(&xm1.pow(3) * &x) * &p(&[1, 2])).scale(&half),
        (&xm1 * &p(&[2, 2, 0, -9, 6])).scale(&-&half),
        (&x * &p(&[1, 1, 9, -15, 6])).scale(&half),
        (&(&xm1 * &x.pow(3)) * &p(&[-3, 2])).scale(&-&half),
    ]
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    /// Adds `x` to `beta[0]` of the first grid family before checking it.
    pub inject_defect: bool,
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub reports: Vec<ValidationReport>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(ValidationReport::all_passed)
    }

    pub fn check_count(&self) -> usize {
        self.reports.iter().map(|r| r.checks.len()).sum()
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &crate::basis::Check)> {
        self.reports
            .iter()
            .flat_map(|r| r.checks.iter().filter(|c| !c.passed).map(move |c| (r.kind.as_str(), c)))
    }
}

fn flag(ok: bool, what: impl FnOnce() -> String) -> Vec<String> {
    if ok {
        vec![]
    } else {
        vec![what()]
    }
}

/// Checks the Hermite basis for one order: defining system, reflection and
/// agreement with the closed form for every `(l, node)`.
pub fn validate_alpha(n: usize) -> Result<ValidationReport> {
    let alpha = AlphaFamily::derive_with_limits(n, &Limits { max_n: n, max_q: 0 })?;
    let mut report = ValidationReport::new(format!("alpha({n})"));
    report.push(
        "defining_system",
        flag(alpha.satisfies_defining_system(), || "conditions violated".into()),
    );
    report.push(
        "reflection",
        flag(alpha.satisfies_reflection(), || "alpha[1] is not the reflection of alpha[0]".into()),
    );
    let mut mismatches = Vec::new();
    for node in 0..2 {
        for l in 0..=alpha.m() {
            if &alpha_closed_form(n, l, node)? != alpha.poly(node, l) {
                mismatches.push(format!("node {node}, l {l}"));
            }
        }
    }
    report.push("closed_form", mismatches);
    Ok(report)
}

/// Runs the structural checks on one grid kind, plus agreement between the
/// two derivation routes.
pub fn validate_kind(kind: SplineKind, defect: bool) -> Result<ValidationReport> {
    let mut beta = BetaFamily::derive(kind)?;
    if defect {
        let mut polys = beta.polys().to_vec();
        let g = beta.g();
        polys[g] = &polys[g] + &RationalPolynomial::x();
        beta = BetaFamily::from_polys(kind, polys);
    }
    let mut report = beta.validate();
    let direct = BetaFamily::derive_direct(kind)?;
    report.push(
        "routes_agree",
        flag(direct.polys() == beta.polys(), || {
            "composition and direct solve differ".into()
        }),
    );
    if kind.n() == 5 && kind.q() == Some(4) {
        report.push(
            "printed_beta_5_4",
            flag(beta.polys() == printed_beta_5_4().as_slice(), || {
                "differs from the reference polynomials".into()
            }),
        );
    }
    Ok(report)
}

/// Every odd `n <= max_n` for the Hermite basis and every valid grid kind
/// with `q <= max_q`.
pub fn run_suite(max_n: usize, max_q: usize, options: &SuiteOptions) -> Result<SuiteReport> {
    let mut suite = SuiteReport::default();
    for n in (1..=max_n).step_by(2) {
        suite.reports.push(validate_alpha(n)?);
    }
    for (idx, kind) in SplineKind::all_grid_kinds(max_n, max_q).into_iter().enumerate() {
        suite.reports.push(validate_kind(kind, options.inject_defect && idx == 0)?);
    }
    Ok(suite)
}
