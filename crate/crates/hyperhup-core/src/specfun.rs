//! Special functions: Bessel J of integer and half-integer order, Gamma,
//! and the order-two elementary factor E₂(z) = (1 − z)·exp(z + z²/2).
//!
//! Integer orders use the power series for small arguments, Miller's
//! backward recurrence in the middle range and the Hankel asymptotic
//! expansion for large arguments. Half-integer orders are built from the
//! trigonometric closed forms by upward recurrence where that is stable.

use crate::error::{invalid, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Order ν = twice_order / 2 of a Bessel function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BesselOrder {
    twice_order: u32,
}

impl BesselOrder {
    /// Largest representable value of 2ν.
    pub const MAX_TWICE_ORDER: u32 = 40;

    pub fn new(twice_order: u32) -> Result<Self> {
        if twice_order == 0 || twice_order > Self::MAX_TWICE_ORDER {
            return invalid(format!(
                "Bessel order 2ν = {twice_order} outside 1..={}",
                Self::MAX_TWICE_ORDER
            ));
        }
        Ok(Self { twice_order })
    }

    /// ν = d/2, the order attached to dimension d.
    pub fn half_dimension(d: u32) -> Result<Self> {
        Self::new(d)
    }

    pub fn twice_order(self) -> u32 {
        self.twice_order
    }

    pub fn nu(self) -> f64 {
        self.twice_order as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.twice_order % 2 == 0
    }
}

/// J_ν(x) for x ≥ 0.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return invalid(format!("bessel_j needs finite x >= 0, got {x}"));
    }
    Ok(bessel_j_unchecked(order, x))
}

pub(crate) fn bessel_j_unchecked(order: BesselOrder, x: f64) -> f64 {
    let nu = order.nu();
    if x == 0.0 {
        return 0.0;
    }
    if order.is_integer() {
        let n = (order.twice_order / 2) as usize;
        if n == 1 {
            return bessel_j1(x);
        }
        if x < 4.0 || x < 0.5 * nu {
            j_series(nu, x)
        } else if x > asymptotic_threshold(nu) {
            j_asymptotic(nu, x)
        } else {
            j_miller(n, x)
        }
    } else if x >= nu {
        j_half_integer_upward(order.twice_order, x)
    } else {
        j_series(nu, x)
    }
}

/// J₁(x) for x ≥ 0, the kernel of the Hankel route for T.
pub fn bessel_j1(x: f64) -> f64 {
    if x < 4.0 {
        j_series(1.0, x)
    } else if x > asymptotic_threshold(1.0) {
        j_asymptotic(1.0, x)
    } else {
        j_miller(1, x)
    }
}

const J1_PIECE: f64 = 0.5;
const J1_PIECES: usize = 48;
const J1_DEGREE: usize = 16;

fn j1_table() -> &'static [[f64; J1_DEGREE]] {
    static TABLE: OnceLock<Vec<[f64; J1_DEGREE]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..J1_PIECES)
            .map(|p| {
                let a = p as f64 * J1_PIECE;
                chebyshev_fit(bessel_j1, a, a + J1_PIECE)
            })
            .collect()
    })
}

fn chebyshev_fit(f: impl Fn(f64) -> f64, a: f64, b: f64) -> [f64; J1_DEGREE] {
    let m = J1_DEGREE;
    let nodes: Vec<f64> = (0..m)
        .map(|k| (PI * (k as f64 + 0.5) / m as f64).cos())
        .collect();
    let vals: Vec<f64> = nodes
        .iter()
        .map(|&u| f(0.5 * (a + b) + 0.5 * (b - a) * u))
        .collect();
    let mut c = [0.0; J1_DEGREE];
    for (j, cj) in c.iter_mut().enumerate() {
        let s: f64 = (0..m)
            .map(|k| vals[k] * (PI * j as f64 * (k as f64 + 0.5) / m as f64).cos())
            .sum();
        *cj = 2.0 * s / m as f64;
    }
    c[0] *= 0.5;
    c
}

/// J₁(x) for x ≥ 0 through piecewise Chebyshev tables below 24 and the
/// asymptotic expansion above. Agrees with [`bessel_j1`] to about 1e-14.
#[inline]
pub fn bessel_j1_fast(x: f64) -> f64 {
    let top = J1_PIECE * J1_PIECES as f64;
    if x >= top {
        return j_asymptotic(1.0, x);
    }
    let p = (x / J1_PIECE) as usize;
    let c = &j1_table()[p];
    let a = p as f64 * J1_PIECE;
    let u = 2.0 * (x - a) / J1_PIECE - 1.0;
    let u2 = 2.0 * u;
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + u2 * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + u * b1 - b2
}

/// J₀(x) for x ≥ 0. Not an exposed order, used by recurrence checks.
pub fn bessel_j0(x: f64) -> f64 {
    if x < 4.0 {
        j_series(0.0, x)
    } else if x > asymptotic_threshold(0.0) {
        j_asymptotic(0.0, x)
    } else {
        j_miller(0, x)
    }
}

fn asymptotic_threshold(nu: f64) -> f64 {
    (20.0f64).max(nu * nu)
}

fn j_series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let mut term = half.powf(nu) / gamma_unchecked(nu + 1.0);
    let mut sum = term;
    for k in 1..400 {
        let kf = k as f64;
        term *= -q / (kf * (kf + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn j_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..80 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * eight_x);
        if term.abs() > prev || term == 0.0 {
            break;
        }
        prev = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn j_miller(n: usize, x: f64) -> f64 {
    let top = (n as f64).max(x);
    let mut m = (top + 20.0 + (40.0 * top).sqrt()) as usize;
    m += m % 2;
    let two_over_x = 2.0 / x;
    let mut next = 0.0f64;
    let mut cur = 1e-30f64;
    let mut norm = 0.0f64;
    let mut ans = 0.0f64;
    for k in (1..=m).rev() {
        let prev = k as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e200 {
            cur *= 1e-200;
            next *= 1e-200;
            norm *= 1e-200;
            ans *= 1e-200;
        }
        // cur now holds J_{k-1} up to scale
        if (k - 1) % 2 == 0 && k > 1 {
            norm += 2.0 * cur;
        }
        if k - 1 == n {
            ans = cur;
        }
    }
    norm += cur;
    ans / norm
}

fn j_half_integer_upward(twice_order: u32, x: f64) -> f64 {
    let pref = (2.0 / (PI * x)).sqrt();
    let (s, c) = x.sin_cos();
    let mut prev = pref * c; // J_{-1/2}
    let mut cur = pref * s; // J_{1/2}
    let mut nu = 0.5;
    let target = twice_order as f64 / 2.0;
    while nu < target - 0.25 {
        let next = 2.0 * nu / x * cur - prev;
        prev = cur;
        cur = next;
        nu += 1.0;
    }
    cur
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for x > 0.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return invalid(format!("gamma_fn needs finite x > 0, got {x}"));
    }
    Ok(gamma_unchecked(x))
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return gamma_unchecked(x + 1.0) / x;
    }
    if x == x.floor() && x <= 21.0 {
        let mut f = 1.0;
        for k in 2..(x as u64) {
            f *= k as f64;
        }
        return f;
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * a
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return ln_gamma(x + 1.0) - x.ln();
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// E₂(z) = (1 − z)·exp(z + z²/2).
pub fn e2_factor(z: Complex64) -> Complex64 {
    (Complex64::new(1.0, 0.0) - z) * (z + 0.5 * z * z).exp()
}

/// ln E₂(z) on the principal branch, accurate for small |z| where the
/// leading terms cancel: ln E₂(z) = −Σ_{k≥3} zᵏ/k.
pub fn ln_e2_factor(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        let mut pw = z * z * z;
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 3..80 {
            let term = pw / k as f64;
            sum -= term;
            if term.norm() < 1e-18 * sum.norm().max(1e-300) {
                break;
            }
            pw *= z;
        }
        sum
    } else {
        (Complex64::new(1.0, 0.0) - z).ln() + z + 0.5 * z * z
    }
}

/// Uniform bound 2^{d/2}Γ(d/2+1)|J_{d/2}(t)|/t^{d/2−1} ≤ √((2d+4)/π).
pub fn bessel_uniform_bound_check(d: u32, t: f64) -> Result<bool> {
    if !(1..=12).contains(&d) {
        return invalid(format!("dimension {d} outside 1..=12"));
    }
    if !(t > 0.0) {
        return invalid(format!("t must be positive, got {t}"));
    }
    Ok(bessel_uniform_bound_lhs(d, t) <= ((2.0 * d as f64 + 4.0) / PI).sqrt() + 1e-12)
}

pub fn bessel_uniform_bound_lhs(d: u32, t: f64) -> f64 {
    let h = d as f64 / 2.0;
    let j = bessel_j_unchecked(BesselOrder { twice_order: d }, t).abs();
    2f64.powf(h) * gamma_unchecked(h + 1.0) * j / t.powf(h - 1.0)
}

/// Gautschi: Γ(x+1) ≤ (x+1)^{1−s}·Γ(x+s), checked with 1e-12 relative slack.
pub fn gautschi_check(x: f64, s: f64) -> Result<bool> {
    if !(s > 0.0 && s < 1.0) {
        return invalid(format!("s must lie in (0,1), got {s}"));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return invalid(format!("x must be finite and >= 0, got {x}"));
    }
    let lhs = ln_gamma(x + 1.0);
    let rhs = (1.0 - s) * (x + 1.0).ln() + ln_gamma(x + s);
    Ok(lhs <= rhs + 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(t: u32) -> BesselOrder {
        BesselOrder::new(t).unwrap()
    }

    #[test]
    fn small_argument_values() {
        assert_eq!(bessel_j(ord(2), 0.0).unwrap(), 0.0);
        let v = bessel_j(ord(1), PI / 2.0).unwrap();
        assert!((v - 2.0 / PI).abs() < 1e-14);
        let root = bessel_j(ord(2), 3.831_705_970_2).unwrap();
        assert!(root.abs() < 1e-8);
    }

    #[test]
    fn branches_agree_at_switch_points() {
        for &x in &[4.0, 20.0, 20.000001] {
            let a = j_series(1.0, x);
            let b = j_miller(1, x);
            let c = j_asymptotic(1.0, x);
            if x < 10.0 {
                assert!((a - b).abs() < 1e-14, "series/miller at {x}: {a} {b}");
            } else {
                assert!((b - c).abs() < 1e-13, "miller/asym at {x}: {b} {c}");
            }
        }
    }

    #[test]
    fn fast_j1_matches_reference() {
        for k in 0..30_000 {
            let x = k as f64 * 0.001_7;
            let a = bessel_j1(x);
            let b = bessel_j1_fast(x);
            assert!((a - b).abs() < 1e-14, "x={x}: {a} {b}");
        }
    }

    #[test]
    fn half_integer_matches_series() {
        for tw in [1u32, 3, 5, 7, 9, 11] {
            for &x in &[6.0, 7.5, 9.0] {
                let a = j_series(tw as f64 / 2.0, x);
                let b = j_half_integer_upward(tw, x);
                assert!((a - b).abs() < 1e-12, "2nu={tw} x={x}");
            }
        }
    }

    #[test]
    fn known_values() {
        // J1(10), J2(30), J0(50) reference values
        assert!((bessel_j1(10.0) - 0.043_472_746_168_861_6).abs() < 1e-14);
        assert!((bessel_j(ord(4), 30.0).unwrap() - 0.078_451_246_073_265_38).abs() < 1e-12);
        assert!((bessel_j0(50.0) - 0.055_812_327_669_251_8).abs() < 1e-12);
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert_eq!(gamma_fn(5.0).unwrap(), 24.0);
        assert!((gamma_fn(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert!((gamma_fn(2.5).unwrap() / (0.75 * PI.sqrt()) - 1.0).abs() < 1e-13);
        assert!(gamma_fn(0.0).is_err());
    }

    #[test]
    fn e2_examples() {
        assert_eq!(
            e2_factor(Complex64::new(0.0, 0.0)),
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(e2_factor(Complex64::new(1.0, 0.0)).norm(), 0.0);
        let i = Complex64::new(0.0, 1.0);
        let want = (Complex64::new(1.0, -1.0)) * Complex64::new(-0.5, 1.0).exp();
        assert!((e2_factor(i) - want).norm() < 1e-15);
        let z = Complex64::new(0.1, -0.2);
        assert!((ln_e2_factor(z).exp() - e2_factor(z)).norm() < 1e-15);
    }

    #[test]
    fn e2_simple_zero() {
        let want = -(1.5f64).exp();
        let h = 1e-7;
        let d = e2_factor(Complex64::new(1.0 + h, 0.0)).re / h;
        assert!((d - want).abs() < 1e-5);
    }

    #[test]
    fn uniform_bound_examples() {
        assert!(bessel_uniform_bound_check(4, 1.0).unwrap());
        assert!(bessel_uniform_bound_check(1, 10.0).unwrap());
        assert!(bessel_uniform_bound_check(2, 0.001).unwrap());
        assert!(bessel_uniform_bound_check(13, 1.0).is_err());
    }

    #[test]
    fn gautschi_examples() {
        assert!(gautschi_check(0.0, 0.5).unwrap());
        assert!(gautschi_check(3.0, 0.25).unwrap());
        assert!(gautschi_check(10.0, 0.9).unwrap());
        assert!(gautschi_check(1.0, 1.0).is_err());
    }
}
