//! Property suite for T on the built-in fixtures: involution, the two
//! isometries, support flip and agreement of the three evaluation routes.

use crate::fixtures::Fixture;
use crate::grid::{weighted_norms, Grid, GridFunction, NormReport};
use crate::parallel::par_map;
use crate::transforms::{op_t, TMethod};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteTolerances {
    pub involution: f64,
    pub isometry: f64,
    pub leakage: f64,
    pub agreement: f64,
    /// Agreement is measured on |ξ| ≤ min(radius, L/2).
    pub agreement_radius: f64,
}

impl Default for SuiteTolerances {
    fn default() -> Self {
        Self {
            involution: 1e-5,
            isometry: 1e-4,
            leakage: 1e-6,
            agreement: 1e-5,
            agreement_radius: 16.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteCheck {
    pub fixture: String,
    pub check: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Norms of θ and of its Hankel-route image, kept so that callers can test
/// other normalizations of the isometries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureNorms {
    pub fixture: String,
    pub theta: NormReport,
    pub image: NormReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub grid: Grid,
    pub tolerances: SuiteTolerances,
    pub checks: Vec<SuiteCheck>,
    pub norms: Vec<FixtureNorms>,
    pub errors: Vec<String>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &SuiteCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Worst value of a check across fixtures.
    pub fn worst(&self, check: &str) -> Option<f64> {
        self.checks
            .iter()
            .filter(|c| c.check == check)
            .map(|c| c.value)
            .reduce(f64::max)
    }
}

fn relative(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// sup of |f| on the half-line where a T-image of a θ supported on the
/// `side` half-line must vanish, relative to sup |f|.
pub fn support_leakage(image: &GridFunction, side: f64) -> f64 {
    let g = image.grid();
    let z = g.zero_index() as f64;
    let leak = image
        .values()
        .iter()
        .enumerate()
        .filter(|(k, _)| (*k as f64 - z) * side > 0.0)
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    relative(leak, image.max_abs())
}

struct FixtureOutcome {
    checks: Vec<SuiteCheck>,
    norms: Option<FixtureNorms>,
    errors: Vec<String>,
}

fn run_fixture(fx: Fixture, grid: Grid, tol: &SuiteTolerances) -> FixtureOutcome {
    let name = fx.name();
    let check = |check: &str, value: f64, tolerance: f64| SuiteCheck {
        fixture: name.clone(),
        check: check.to_string(),
        value,
        tolerance,
        // NaN fails
        pass: value <= tolerance,
    };
    let theta = fx.sample(grid);
    let mut errors = Vec::new();
    let images: Vec<Option<GridFunction>> = TMethod::ALL
        .iter()
        .map(|&m| {
            op_t(&theta, m)
                .map_err(|e| errors.push(format!("{name} ({}): {e}", m.name())))
                .ok()
        })
        .collect();
    let mut checks = Vec::new();
    let mut norms = None;

    if let Some(hankel) = &images[0] {
        let involution = match op_t(hankel, TMethod::Hankel) {
            Ok(back) => relative(
                back.sup_diff_within(&theta, grid.half_length()),
                theta.max_abs(),
            ),
            Err(_) => f64::INFINITY,
        };
        checks.push(check("involution", involution, tol.involution));
        let a = weighted_norms(&theta);
        let b = weighted_norms(hankel);
        checks.push(check(
            "isometry_inv_weight",
            relative((b.l2_inv_weight - a.l2_inv_weight).abs(), a.l2_inv_weight),
            tol.isometry,
        ));
        checks.push(check(
            "isometry_h1",
            relative((b.l2 - a.h1_semi / PI).abs(), b.l2),
            tol.isometry,
        ));
        norms = Some(FixtureNorms {
            fixture: name.clone(),
            theta: a,
            image: b,
        });
    } else {
        for (c, t) in [
            ("involution", tol.involution),
            ("isometry_inv_weight", tol.isometry),
            ("isometry_h1", tol.isometry),
        ] {
            checks.push(check(c, f64::INFINITY, t));
        }
    }

    if let Some(side) = fx.one_sided() {
        for (m, img) in TMethod::ALL.iter().zip(&images) {
            let leak = img
                .as_ref()
                .map_or(f64::INFINITY, |f| support_leakage(f, side));
            checks.push(check(&format!("leakage_{}", m.name()), leak, tol.leakage));
        }
    }

    let radius = tol.agreement_radius.min(grid.half_length() / 2.0);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let diff = match (&images[i], &images[j]) {
            (Some(p), Some(q)) => relative(
                p.sup_diff_within(q, radius),
                p.sup_within(radius).max(q.sup_within(radius)),
            ),
            _ => f64::INFINITY,
        };
        checks.push(check(
            &format!(
                "agreement_{}_{}",
                TMethod::ALL[i].name(),
                TMethod::ALL[j].name()
            ),
            diff,
            tol.agreement,
        ));
    }
    FixtureOutcome {
        checks,
        norms,
        errors,
    }
}

/// Runs every check on every fixture of [`Fixture::all`]. A method that
/// fails to evaluate fails the checks that need it; the error is kept in
/// the report.
pub fn verify_t_suite(grid: Grid, tol: &SuiteTolerances) -> SuiteReport {
    let fixtures = Fixture::all();
    let outcomes = par_map(fixtures.len(), |i| run_fixture(fixtures[i], grid, tol));
    let mut report = SuiteReport {
        grid,
        tolerances: *tol,
        checks: Vec::new(),
        norms: Vec::new(),
        errors: Vec::new(),
        pass: true,
    };
    for o in outcomes {
        report.checks.extend(o.checks);
        report.norms.extend(o.norms);
        report.errors.extend(o.errors);
    }
    report.pass = report.errors.is_empty() && report.checks.iter().all(|c| c.pass);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn leakage_of_one_sided_samples() {
        let g = Grid::new(4.0, 64).unwrap();
        let f = GridFunction::from_real_fn(g, |t| if t < 0.0 { 1.0 } else { 0.0 });
        assert_eq!(support_leakage(&f, 1.0), 0.0);
        assert_eq!(support_leakage(&f, -1.0), 1.0);
        assert_eq!(support_leakage(&GridFunction::zeros(g), 1.0), 0.0);
        let mut v = f.values().to_vec();
        v[40] = Complex64::new(1e-3, 0.0);
        assert!((support_leakage(&GridFunction::new(g, v).unwrap(), 1.0) - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn coarse_grid_fails() {
        let r = verify_t_suite(Grid::new(32.0, 16).unwrap(), &SuiteTolerances::default());
        assert!(!r.pass);
        assert!(r.failures().count() > 0);
    }
}
