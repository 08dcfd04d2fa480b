use hyperhup_core::certify::{
    annulus_poincare, critical_structure, hd_sphere_lemma_check, one_sided_probe,
    periodization_check, pw_interval, subcritical_chain, t_beta_iterate, CertifyTolerances,
    Verdict,
};
use hyperhup_core::counterexample::poisson_counterexample;
use hyperhup_core::fixtures::{mean_zero_psi, random_psi};
use hyperhup_core::lattice::{make_cross_window, RealSequence};
use hyperhup_core::{Grid, GridFunction, HupError};
use proptest::prelude::*;
use std::f64::consts::PI;

fn gauss(t: f64) -> f64 {
    (-PI * t * t / 2.0).exp()
}

#[test]
fn plancherel_bridge_on_fixtures() {
    let g = Grid::new(64.0, 1 << 16).unwrap();
    let cross = make_cross_window(0.9, 0.9, 0.0, (-30, 30)).unwrap();
    for (name, psi) in mean_zero_psi(g) {
        let r = subcritical_chain(&psi, &cross, CertifyTolerances::default()).unwrap();
        assert!(r.plancherel_gap <= 1e-5, "{name}: {:e}", r.plancherel_gap);
        assert!(r.identity_gap <= 1e-5, "{name}: {:e}", r.identity_gap);
    }
}

#[test]
fn subcritical_dichotomy_on_random_fixtures() {
    let g = Grid::new(32.0, 1 << 14).unwrap();
    let cross = make_cross_window(0.9, 0.9, 0.0, (-30, 30)).unwrap();
    let mut zeros = 0;
    for seed in 0..20 {
        let (psi, scale) = random_psi(g, seed);
        let r = subcritical_chain(&psi, &cross, CertifyTolerances::default()).unwrap();
        let ok = r.verdict == Verdict::VanishingViolated || r.norms_psi.l2 <= 1e-6 * scale.max(1.0);
        assert!(
            ok,
            "seed {seed}: {:?} with ‖ψ‖₂ = {:e}",
            r.verdict, r.norms_psi.l2
        );
        if r.verdict == Verdict::ConsistentUniqueness {
            zeros += 1;
        }
    }
    assert_eq!(zeros, 5);
}

#[test]
fn poisson_witness_against_crosses() {
    let g = Grid::new(64.0, 1 << 16).unwrap();
    let w = poisson_counterexample(1.2, 1.2, g).unwrap();
    let dense = make_cross_window(0.9, 0.9, 0.0, (-30, 30)).unwrap();
    let r = subcritical_chain(&w.psi, &dense, CertifyTolerances::default()).unwrap();
    assert_eq!(r.verdict, Verdict::VanishingViolated);
    let native = make_cross_window(1.2, 1.2, 0.0, (-25, 25)).unwrap();
    let r = subcritical_chain(&w.psi, &native, CertifyTolerances::default()).unwrap();
    assert!(
        r.vanishing,
        "residuals {:e} {:e}",
        r.residual_a, r.residual_b
    );
    assert_eq!(r.verdict, Verdict::Inconclusive);
    assert!(r.pw_gaps.iter().all(|&s| s >= -1e-6), "{:?}", r.pw_gaps);
    // without αβ < 1 the two chains need not both hold
    assert!(r.chain_gap_forward.min(r.chain_gap_reverse) <= 0.0);
    let json = serde_json::to_string(&r).unwrap();
    assert!(json.contains("\"verdict\":\"inconclusive\""));
}

fn integer_window(lo: i64, hi: i64) -> RealSequence {
    RealSequence::new((lo..=hi).map(|n| n as f64).collect(), lo).unwrap()
}

#[test]
fn critical_windowed_sine() {
    let g = Grid::new(64.0, 1 << 16).unwrap();
    let theta =
        GridFunction::from_real_fn(g, |x| if x.abs() <= 20.0 { (PI * x).sin() } else { 0.0 });
    let r = critical_structure(&theta, &integer_window(-30, 30), None, 1e-9).unwrap();
    assert!(r.min_correlation >= 0.999, "{}", r.min_correlation);
    assert!(
        r.interior_alternation_defect <= 1e-6,
        "{:e}",
        r.interior_alternation_defect
    );
    assert!(
        r.reconstruction_error <= 1e-4,
        "{:e}",
        r.reconstruction_error
    );
    assert!(r.non_critical.is_empty());
    assert!((r.coefficient_l2 - 40f64.sqrt()).abs() < 1e-6);
}

#[test]
fn critical_gaussian_window() {
    let g = Grid::new(64.0, 1 << 16).unwrap();
    let theta = GridFunction::from_real_fn(g, |x| (PI * x).sin() * (-(x / 20.0).powi(2)).exp());
    let a = integer_window(-60, 60);
    let r = critical_structure(&theta, &a, Some((&theta, &a)), 1e-9).unwrap();
    let c = &r.fit.coefficients;
    let mid = c.len() / 2;
    for n in mid - 3..mid + 3 {
        assert!(
            r.alternation_defects[n] < 0.02,
            "{n}: {}",
            r.alternation_defects[n]
        );
    }
    assert!(c[0].norm() < 1e-3 * c[mid].norm());
    assert!(r.tail_amplitude < 5e-3, "{}", r.tail_amplitude);
    assert!(r.dual_weighted_sum.unwrap() > 0.0);
}

#[test]
fn periodization_of_poisson_witness() {
    let alpha = 1.2;
    let w = poisson_counterexample(alpha, 1.2, Grid::new(64.0, 1 << 16).unwrap()).unwrap();
    // ψ₁(u) = ψ(u/α)/α has ψ̂₁(n) = ψ̂(αn) and inverted lattice αβℤ
    let psi = GridFunction::from_real_fn(Grid::new(64.0, 1 << 16).unwrap(), |u| {
        w.psi_value(u / alpha) / alpha
    });
    let r = periodization_check(&psi, 0.0, alpha * 1.2).unwrap();
    assert!(r.res_direct <= 1e-6, "{r:?}");
    assert!(r.res_inverted <= 1e-6, "{r:?}");
}

#[test]
fn t_beta_critical_interior_decay() {
    let g = Grid::new(1.0, 1000).unwrap();
    let one = GridFunction::from_real_fn(g, |_| 1.0);
    let r = t_beta_iterate(&one, 1.0, 5).unwrap();
    assert!(
        r.interior_norms.windows(2).all(|w| w[1] < w[0]),
        "{:?}",
        r.interior_norms
    );
    for beta in [0.5, 0.8, 0.95, 1.0] {
        for f in [
            one.clone(),
            GridFunction::from_real_fn(g, |t| 1.0 + t),
            GridFunction::from_real_fn(g, |t| t * t),
        ] {
            let r = t_beta_iterate(&f, beta, 4).unwrap();
            // at β = 1 the mass is conserved exactly; allow quadrature drift
            assert!(
                r.norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-6)),
                "β={beta}: {:?}",
                r.norms
            );
        }
    }
}

#[test]
fn annulus_full_lattice() {
    for a in [0.5, 1.0, 2.0] {
        for q in [1.1, 2.0, 5.0] {
            for d in 2..=6 {
                let r = annulus_poincare(a, a * q, d).unwrap();
                assert!(r.pass, "{r:?}");
                assert!(r.rayleigh_change <= 1e-10);
            }
        }
    }
}

fn shell_bump(g: Grid, gap: f64, shells: usize) -> GridFunction {
    let half = gap * shells as f64 / 2.0;
    GridFunction::from_real_fn(g, |r| {
        let u = (r - 1.0 - half) / half;
        if r <= 1.0 || u.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - u * u)).exp() * (PI * (r - 1.0) / gap).sin()
        }
    })
}

#[test]
fn sphere_lemma_examples() {
    let (t, d) = (2.0f64, 4u32);
    let g = Grid::new(8.0, 1 << 13).unwrap();
    let gap = (1.0 + 0.5 / t).powf(-((d - 1) as f64) / 2.0) / (2.0 * t);
    let f = shell_bump(g, gap, 6);
    let radii = RealSequence::new((0..=6).map(|k| 1.0 + k as f64 * gap).collect(), 0).unwrap();
    let r = hd_sphere_lemma_check(&f, d, t, &radii, 1e-8).unwrap();
    assert!(r.pass && r.slack > 0.0, "{r:?}");
    assert!(((r.rhs - r.rhs_gradient) / r.rhs).abs() < 1e-4, "{r:?}");

    let zero = hd_sphere_lemma_check(&GridFunction::zeros(g), d, t, &radii, 1e-8).unwrap();
    assert!(zero.pass);

    let sparse_f = shell_bump(g, 2.0 * gap, 3);
    let sparse =
        RealSequence::new((0..=3).map(|k| 1.0 + 2.0 * k as f64 * gap).collect(), 0).unwrap();
    assert!(matches!(
        hd_sphere_lemma_check(&sparse_f, d, t, &sparse, 1e-8),
        Err(HupError::InvalidInput(_))
    ));
}

#[test]
fn one_sided_invariance_and_refinement() {
    let a = RealSequence::new(vec![0.0, 1.0, 2.0], 0).unwrap();
    let b = RealSequence::new(vec![-2.0, -1.0], 0).unwrap();
    let fine = one_sided_probe(
        &GridFunction::from_real_fn(Grid::new(32.0, 1 << 14).unwrap(), |t| t * gauss(t)),
        &a,
        &b,
    )
    .unwrap();
    assert!(
        fine.invariance_residual <= 1e-4,
        "{:e}",
        fine.invariance_residual
    );
    assert!(fine.warnings.is_empty());
    // coarse grids, where discretization error dominates: halving h cuts
    // the residual by at least the second-order factor
    let coarse = |n: usize| {
        let psi = GridFunction::from_real_fn(Grid::new(32.0, n).unwrap(), |t| t * gauss(t));
        one_sided_probe(&psi, &a, &b).unwrap().invariance_residual
    };
    let (r1, r2) = (coarse(128), coarse(256));
    assert!(r1 / r2 >= 3.5, "{r1:e} → {r2:e}");

    let zero = one_sided_probe(
        &GridFunction::zeros(Grid::new(32.0, 1 << 12).unwrap()),
        &a,
        &b,
    )
    .unwrap();
    assert_eq!(zero.invariance_residual, 0.0);
    assert_eq!(zero.quadrant_max, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn pw_ratio_never_exceeds_one(c in proptest::collection::vec(-1.0f64..1.0, 1..6), a in -1.0f64..1.0, w in 0.5f64..3.0) {
        let g = Grid::new(8.0, 1 << 12).unwrap();
        let h = g.step();
        let (a, b) = ((a / h).round() * h, ((a + w) / h).round() * h);
        let f = GridFunction::from_real_fn(g, |x| {
            if x < a || x > b { return 0.0; }
            c.iter().enumerate().map(|(k, ck)| ck * ((k + 1) as f64 * PI * (x - a) / (b - a)).sin()).sum()
        });
        let r = pw_interval(&f, a, b, 1e-9).unwrap();
        prop_assert!(r.ratio <= 1.0 + 1e-6, "{}", r.ratio);
    }
}
