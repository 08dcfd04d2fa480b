//! Admissible test functions θ (θ(0) = 0) used to exercise T, with closed
//! forms where one is known.

use crate::grid::{Grid, GridFunction};
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Compactly supported C^∞ bump on [center − radius, center + radius].
pub fn bump(center: f64, radius: f64, t: f64) -> f64 {
    let u = (t - center) / radius;
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }
}

/// Poisson kernel P_z(t) = y/((x − t)² + y²), z = x + iy.
pub fn poisson_kernel(z: Complex64, t: f64) -> f64 {
    z.im / ((z.re - t).powi(2) + z.im * z.im)
}

/// (1/√2)∫P_z(t)e^{−πitξ}dt = (π/√2)e^{−πixξ − πy|ξ|}.
pub fn poisson_kernel_transform(z: Complex64, xi: f64) -> Complex64 {
    Complex64::from_polar(
        PI * FRAC_1_SQRT_2 * (-PI * z.im * xi.abs()).exp(),
        -PI * z.re * xi,
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Fixture {
    /// t^k·e^{−πt²/2}
    Hermite(u32),
    /// |y|^power·e^{−rate·|y|} on the half-line of sign `side`, zero on the other
    HalfLine { power: u32, rate: f64, side: f64 },
    /// t·e^{−π(t − shift)²}
    ShiftedGaussian { shift: f64 },
    /// transform of P_{z1} − P_{z2}; vanishes at 0 by construction
    PoissonDifference { z1: Complex64, z2: Complex64 },
}

impl Fixture {
    pub fn all() -> Vec<Fixture> {
        vec![
            Fixture::Hermite(1),
            Fixture::Hermite(2),
            Fixture::Hermite(3),
            Fixture::HalfLine {
                power: 1,
                rate: PI,
                side: 1.0,
            },
            Fixture::HalfLine {
                power: 2,
                rate: PI,
                side: -1.0,
            },
            Fixture::ShiftedGaussian { shift: 0.5 },
            Fixture::PoissonDifference {
                z1: Complex64::new(0.0, 1.0),
                z2: Complex64::new(2.0, 1.0),
            },
            Fixture::PoissonDifference {
                z1: Complex64::new(0.5, 0.8),
                z2: Complex64::new(-1.0, 0.8),
            },
        ]
    }

    pub fn name(&self) -> String {
        match self {
            Fixture::Hermite(k) => format!("hermite{k}"),
            Fixture::HalfLine { power, rate, side } => {
                format!(
                    "half_line(y^{power}e^(-{rate:.4}|y|), {})",
                    if *side > 0.0 { "+" } else { "-" }
                )
            }
            Fixture::ShiftedGaussian { shift } => format!("shifted_gaussian({shift})"),
            Fixture::PoissonDifference { z1, z2 } => format!("poisson_diff({z1},{z2})"),
        }
    }

    pub fn value(&self, t: f64) -> Complex64 {
        match *self {
            Fixture::Hermite(k) => {
                Complex64::new(t.powi(k as i32) * (-PI * t * t / 2.0).exp(), 0.0)
            }
            Fixture::HalfLine { power, rate, side } => {
                if t * side > 0.0 {
                    Complex64::new(t.abs().powi(power as i32) * (-rate * t.abs()).exp(), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Fixture::ShiftedGaussian { shift } => {
                Complex64::new(t * (-PI * (t - shift).powi(2)).exp(), 0.0)
            }
            Fixture::PoissonDifference { z1, z2 } => {
                poisson_kernel_transform(z1, t) - poisson_kernel_transform(z2, t)
            }
        }
    }

    pub fn sample(&self, grid: Grid) -> GridFunction {
        GridFunction::from_fn(grid, |t| self.value(t))
    }

    /// Support sign when θ vanishes on one half-line: +1 for supp ⊂ ℝ₊.
    pub fn one_sided(&self) -> Option<f64> {
        match *self {
            Fixture::HalfLine { side, .. } => Some(side.signum()),
            _ => None,
        }
    }

    /// Tθ in closed form, when available.
    ///
    /// For the Poisson difference θ = ψ̂ with ψ = P_{z1} − P_{z2}, the
    /// pullback s⁻²ψ(1/s) is P_{w1} − P_{w2} with w = 1/z̄, so Tθ is again
    /// a Poisson difference transform.
    pub fn t_image(&self, xi: f64) -> Option<Complex64> {
        match *self {
            Fixture::PoissonDifference { z1, z2 } => {
                let w = |z: Complex64| Complex64::new(1.0, 0.0) / z.conj();
                Some(poisson_kernel_transform(w(z1), xi) - poisson_kernel_transform(w(z2), xi))
            }
            _ => None,
        }
    }

    /// The function whose transform is this fixture, where known.
    pub fn preimage(&self, t: f64) -> Option<Complex64> {
        match *self {
            Fixture::PoissonDifference { z1, z2 } => Some(Complex64::new(
                poisson_kernel(z1, t) - poisson_kernel(z2, t),
                0.0,
            )),
            _ => None,
        }
    }
}

fn half_gauss(t: f64) -> f64 {
    (-PI * t * t / 2.0).exp()
}

/// Mean-zero ψ (so ψ̂(0) = 0): odd and even Hermite-Gaussians, a shifted
/// Gaussian derivative and two Poisson differences.
pub fn mean_zero_psi(g: Grid) -> Vec<(String, GridFunction)> {
    let z = Complex64::new;
    let pd = |a: Complex64, b: Complex64| move |t: f64| poisson_kernel(a, t) - poisson_kernel(b, t);
    vec![
        (
            "t·g".into(),
            GridFunction::from_real_fn(g, |t| t * half_gauss(t)),
        ),
        (
            "(t² − 1/π)·g".into(),
            GridFunction::from_real_fn(g, |t| (t * t - 1.0 / PI) * half_gauss(t)),
        ),
        (
            "t³·g".into(),
            GridFunction::from_real_fn(g, |t| t.powi(3) * half_gauss(t)),
        ),
        (
            "shifted".into(),
            GridFunction::from_real_fn(g, |t| (t - 0.5) * (-PI * (t - 0.5).powi(2)).exp()),
        ),
        (
            "poisson".into(),
            GridFunction::from_real_fn(g, pd(z(0.0, 1.0), z(2.0, 1.0))),
        ),
        (
            "poisson2".into(),
            GridFunction::from_real_fn(g, pd(z(0.5, 0.8), z(-1.0, 0.8))),
        ),
    ]
}

/// Seeded random ψ: Hermite-Gaussians, a shifted Gaussian and a Poisson
/// kernel with coefficients in (−1, 1). Every fourth seed gives all-zero
/// coefficients. Returns ψ and the coefficient ℓ¹ norm.
pub fn random_psi(g: Grid, seed: u64) -> (GridFunction, f64) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let zero = seed % 4 == 0;
    let c = |rng: &mut rand_chacha::ChaCha8Rng| if zero { 0.0 } else { rng.gen_range(-1.0..1.0) };
    let herm: Vec<f64> = (0..4).map(|_| c(&mut rng)).collect();
    let shift = rng.gen_range(-2.0..2.0);
    let cs = c(&mut rng);
    let zp = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.5..2.0));
    let cp = c(&mut rng);
    let scale = herm.iter().map(|v| v.abs()).sum::<f64>() + cs.abs() + cp.abs();
    let psi = GridFunction::from_real_fn(g, |t| {
        let h: f64 = herm
            .iter()
            .enumerate()
            .map(|(k, a)| a * t.powi(k as i32))
            .sum::<f64>()
            * half_gauss(t);
        h + cs * (-PI * (t - shift).powi(2)).exp() + cp * poisson_kernel(zp, t)
    });
    (psi, scale)
}
