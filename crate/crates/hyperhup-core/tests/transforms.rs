use hyperhup_core::fixtures::{bump, Fixture};
use hyperhup_core::grid::weighted_norms;
use hyperhup_core::suite::{verify_t_suite, SuiteTolerances};
use hyperhup_core::transforms::{
    axis_restriction, extension_on_grid, fourier_exp_inv_t_closed, fourier_pi, kg_residual, op_t,
    Direction, Extension, TMethod,
};
use hyperhup_core::{Grid, GridFunction};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn suite_grid() -> Grid {
    Grid::new(32.0, 1 << 14).unwrap()
}

fn suite() -> &'static hyperhup_core::suite::SuiteReport {
    static REPORT: OnceLock<hyperhup_core::suite::SuiteReport> = OnceLock::new();
    REPORT.get_or_init(|| verify_t_suite(suite_grid(), &SuiteTolerances::default()))
}

#[test]
fn suite_passes_on_default_grid() {
    let r = suite();
    for c in r.failures() {
        eprintln!(
            "{} {} {:e} > {:e}",
            c.fixture, c.check, c.value, c.tolerance
        );
    }
    assert!(r.pass, "{:?}", r.errors);
    assert_eq!(r.norms.len(), 8);
}

#[test]
fn suite_covers_every_property() {
    let r = suite();
    for check in [
        "involution",
        "isometry_inv_weight",
        "isometry_h1",
        "agreement_hankel_compose",
    ] {
        assert_eq!(
            r.checks.iter().filter(|c| c.check == check).count(),
            8,
            "{check}"
        );
    }
    assert_eq!(
        r.checks
            .iter()
            .filter(|c| c.check.starts_with("leakage_"))
            .count(),
        6
    );
}

#[test]
fn bump_support_flips() {
    let g = suite_grid();
    let theta = GridFunction::from_real_fn(g, |t| bump(2.0, 1.0, t));
    for m in TMethod::ALL {
        let img = op_t(&theta, m).unwrap();
        let z = g.zero_index();
        let right = img.values()[z + 1..]
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        let leak = right / img.max_abs();
        // compose sees the slowly decaying preimage of the bump truncated at ±L
        let tol = if m == TMethod::Compose { 1e-2 } else { 1e-8 };
        assert!(leak <= tol, "{}: {leak:e}", m.name());
    }
}

#[test]
fn hermite_methods_agree_on_half_window() {
    let g = suite_grid();
    let theta = Fixture::Hermite(1).sample(g);
    let imgs: Vec<GridFunction> = TMethod::ALL
        .iter()
        .map(|&m| op_t(&theta, m).unwrap())
        .collect();
    let r = g.half_length() / 2.0;
    let scale = imgs[0].sup_within(r);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let d = imgs[i].sup_diff_within(&imgs[j], r) / scale;
        assert!(d <= 1e-5, "{i} vs {j}: {d:e}");
    }
}

#[test]
fn poisson_difference_matches_closed_image() {
    let g = suite_grid();
    for fx in Fixture::all()
        .into_iter()
        .filter(|f| f.t_image(1.0).is_some())
    {
        let img = op_t(&fx.sample(g), TMethod::Hankel).unwrap();
        let exact = GridFunction::from_fn(g, |x| fx.t_image(x).unwrap());
        let d = img.sup_diff_within(&exact, 16.0) / exact.max_abs();
        assert!(d <= 1e-6, "{}: {d:e}", fx.name());
    }
}

#[test]
fn zero_maps_to_zero() {
    let z = GridFunction::zeros(suite_grid());
    for m in TMethod::ALL {
        assert_eq!(op_t(&z, m).unwrap().max_abs(), 0.0);
    }
}

#[test]
fn isometry_inverse_weight_directly() {
    let g = suite_grid();
    let theta = Fixture::Hermite(2).sample(g);
    let a = weighted_norms(&theta);
    let b = weighted_norms(&op_t(&theta, TMethod::Compose).unwrap());
    assert!((a.l2_inv_weight - b.l2_inv_weight).abs() <= 1e-4 * a.l2_inv_weight);
}

/// Tθ(ξ) = (1/2)∫θ(y)K(y, ξ)dy with K the closed kernel, integrated with
/// y = ±s² so the integrand is smooth.
#[test]
fn closed_kernel_reproduces_hankel_route() {
    let g = suite_grid();
    let fx = Fixture::ShiftedGaussian { shift: 0.5 };
    let img = op_t(&fx.sample(g), TMethod::Hankel).unwrap();
    let hs = 1e-3;
    for xi in [-7.5, -3.0, -1.25, -0.5, -0.125, 0.25, 0.75, 2.0, 4.5, 9.0] {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=6000 {
            let s = k as f64 * hs;
            for y in [s * s, -s * s] {
                let kern = fourier_exp_inv_t_closed(y, xi).unwrap();
                acc += fx.value(y) * (kern * 2.0 * s * hs);
            }
        }
        let via_kernel = acc * 0.5;
        let direct = img.eval(xi);
        let d = (via_kernel - direct).norm() / img.max_abs();
        assert!(d <= 1e-4, "ξ = {xi}: {via_kernel} vs {direct}");
    }
}

#[test]
fn extension_axes_match_transforms() {
    let g = Grid::new(32.0, 1 << 14).unwrap();
    let psi = GridFunction::from_real_fn(g, |t| t * (-PI * t * t).exp());
    let ext = Extension::new(&psi, false).unwrap();
    let x_axis = axis_restriction(&psi);
    let y_axis = axis_restriction(ext.phi());
    let scale = x_axis.max_abs().max(y_axis.max_abs());
    for k in -20..=20 {
        let p = 0.3 * k as f64;
        assert!(
            (ext.eval(p, 0.0) - x_axis.eval(p)).norm() <= 1e-6 * scale,
            "x = {p}"
        );
        assert!(
            (ext.eval(0.0, p) - y_axis.eval(p)).norm() <= 1e-6 * scale,
            "y = {p}"
        );
    }
    assert!(
        (fourier_pi(&psi, Direction::Forward).max_abs() * 2f64.sqrt() - x_axis.max_abs()).abs()
            < 1e-12
    );
}

#[test]
fn gaussian_kg_second_order() {
    let psi =
        GridFunction::from_real_fn(Grid::new(32.0, 1 << 15).unwrap(), |t| (-PI * t * t).exp());
    let coarse = Grid::new(2.0, 128).unwrap();
    let fine = Grid::new(2.0, 256).unwrap();
    let rc = kg_residual(&extension_on_grid(&psi, coarse, coarse, false).unwrap());
    let rf = kg_residual(&extension_on_grid(&psi, fine, fine, false).unwrap());
    assert!(rf <= 1e-2, "{rf:e}");
    let ratio = rc / rf;
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}
