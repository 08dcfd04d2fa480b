//! Witness constructions: Levin-type products with prescribed zeros on the
//! real and imaginary rays, almost-interpolating bases built from them, the
//! contraction iteration that produces a nonzero F with F|_A = 0 and
//! TF|_B = 0, and the Poisson-kernel counterexamples for lattice crosses.

use crate::error::{invalid, HupError, Result};
use crate::fixtures::{poisson_kernel, poisson_kernel_transform};
use crate::grid::{derivative, weighted_norms, Grid, GridFunction};
use crate::lattice::{build_k_regular, expand_to_smooth, gap_stats, RealSequence, ZeroRaySet};
use crate::numerics::{least_squares, Lu};
use crate::parallel::par_map;
use crate::transforms::{fourier_pi, op_t, Direction, HankelPlan, TMethod};
use log::{debug, info};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// k(θ) = πβ|sin 2θ| − γ cos 2θ: even and symmetric about π/2.
pub fn indicator_k(beta: f64, gamma: f64, theta: f64) -> f64 {
    PI * beta * (2.0 * theta).sin().abs() - gamma * (2.0 * theta).cos()
}

/// Samples k(θ) < πω² sin²θ for γ = πs/ω², θ_j = jπ/(2n), j = 1..n.
/// Near θ = 0 the comparison reduces to −γ < 0, which holds for any s > 0;
/// s ≥ 1 is rejected outright since γ then exceeds the admissible range.
pub fn k_bound_check(beta: f64, s: f64, omega: f64, n_samples: usize) -> bool {
    if !(s > 0.0 && s < 1.0) || !(omega > 0.0) || n_samples == 0 {
        return false;
    }
    let gamma = PI * s / (omega * omega);
    (1..=n_samples).all(|j| {
        let theta = j as f64 * FRAC_PI_2 / n_samples as f64;
        indicator_k(beta, gamma, theta) < PI * omega * omega * theta.sin().powi(2)
    })
}

/// S(z) = e^{β̂z²}·∏ E₂(z/λ) over a symmetric [`ZeroRaySet`], with the
/// zeros beyond the last listed one replaced by their density integral.
#[derive(Clone, Debug)]
pub struct LevinProduct {
    zeros: ZeroRaySet,
    r_cutoff: f64,
    quad_coeff: Complex64,
    /// squared moduli of the real-ray zeros
    real_t: Vec<f64>,
    /// squared moduli of the imaginary-ray zeros
    imag_t: Vec<f64>,
    real_tail: (f64, f64),
    imag_tail: (f64, f64),
    /// Σ 1/a − Σ 1/c over the listed zeros: the z² coefficient the
    /// convergence factors add when the two rays are not matched pointwise
    quad_shift: f64,
}

fn tail_start(t: &[f64], density: f64) -> f64 {
    t.last().copied().unwrap_or(0.0) + 0.5 / density
}

impl LevinProduct {
    pub fn new(zeros: ZeroRaySet, quad_coeff: Complex64) -> Result<Self> {
        if zeros.z1_plus != zeros.z1_minus || zeros.z2_plus != zeros.z2_minus {
            return invalid("Levin product needs zeros symmetric under z ↦ −z");
        }
        if zeros.z1_plus.is_empty() || !(zeros.beta > 0.0) || !(zeros.gamma > 0.0) {
            return invalid("Levin product needs real zeros and positive densities");
        }
        let real_t: Vec<f64> = zeros.z1_plus.iter().map(|r| r * r).collect();
        let imag_t: Vec<f64> = zeros.z2_plus.iter().map(|r| r * r).collect();
        let d_real = zeros.beta;
        let d_imag = zeros.gamma / PI;
        let r_cutoff = zeros.radius;
        let quad_shift = real_t.iter().map(|a| 1.0 / a).sum::<f64>()
            - imag_t.iter().map(|c| 1.0 / c).sum::<f64>();
        Ok(Self {
            quad_shift,
            real_tail: (tail_start(&real_t, d_real), d_real),
            imag_tail: (tail_start(&imag_t, d_imag), d_imag),
            zeros,
            r_cutoff,
            quad_coeff,
            real_t,
            imag_t,
        })
    }

    pub fn zeros(&self) -> &ZeroRaySet {
        &self.zeros
    }

    pub fn r_cutoff(&self) -> f64 {
        self.r_cutoff
    }

    pub fn quad_coeff(&self) -> Complex64 {
        self.quad_coeff
    }

    /// Squared moduli of the real-ray zeros (the zeros of t ↦ S(√t) on t > 0).
    pub fn real_zeros_t(&self) -> &[f64] {
        &self.real_t
    }

    /// Density integral of log E₂ pairs beyond the listed zeros, w = z².
    fn tail_log(&self, w: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let (u1, d1) = self.real_tail;
        let (u2, d2) = self.imag_tail;
        let real = -w - (u1 - w) * (one - w / u1).ln();
        let imag = w - (u2 + w) * (one + w / u2).ln();
        real * d1 + imag * d2
    }

    /// log S(z), principal branches summed; only exp of it is meaningful.
    pub fn log_eval(&self, z: Complex64) -> Complex64 {
        let w = z * z;
        let one = Complex64::new(1.0, 0.0);
        let mut acc = self.quad_coeff * w + self.tail_log(w);
        for &a in &self.real_t {
            acc += (one - w / a).ln() + w / a;
        }
        for &c in &self.imag_t {
            acc += (one + w / c).ln() - w / c;
        }
        acc
    }

    /// Net z² coefficient: β̂ plus the shift from unmatched convergence factors.
    pub fn effective_quad_coeff(&self) -> Complex64 {
        self.quad_coeff + self.quad_shift
    }

    /// Growth indicator of the completed product, πD|sin 2θ| + Re(β̂_eff e^{2iθ}).
    pub fn indicator(&self, theta: f64) -> f64 {
        let q = self.effective_quad_coeff() * Complex64::from_polar(1.0, 2.0 * theta);
        indicator_k(self.zeros.beta, 0.0, theta) + q.re
    }

    /// (log|G(t)|, sign G(t)) for G(t) = S(√t), t ≥ 0 below the tail start.
    pub fn real_line(&self, t: f64) -> (f64, f64) {
        self.real_line_without(t, None)
    }

    /// As [`Self::real_line`] with the factor of real zero `skip` removed.
    pub fn real_line_without(&self, t: f64, skip: Option<usize>) -> (f64, f64) {
        let mut log = self.quad_coeff.re * t;
        let mut sign = 1.0;
        for (j, &a) in self.real_t.iter().enumerate() {
            if Some(j) == skip {
                continue;
            }
            let q = 1.0 - t / a;
            if q < 0.0 {
                sign = -sign;
            }
            log += q.abs().ln() + t / a;
        }
        for &c in &self.imag_t {
            log += (t / c).ln_1p() - t / c;
        }
        let (u1, d1) = self.real_tail;
        let (u2, d2) = self.imag_tail;
        log += d1 * (-t - (u1 - t) * (1.0 - t / u1).abs().ln());
        log += d2 * (t - (u2 + t) * (t / u2).ln_1p());
        (log, sign)
    }

    /// Max relative |S(z) − S(−z)| over seeded samples in |z| ≤ R/2.
    pub fn evenness_defect(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let z = Complex64::from_polar(
                rng.gen_range(0.0..0.5 * self.r_cutoff),
                rng.gen_range(-PI..PI),
            );
            let a = self.log_eval(z);
            let b = self.log_eval(-z);
            let rel = ((b - a).exp() - 1.0).norm();
            worst = worst.max(rel);
        }
        worst
    }
}

/// S(z) inside the accuracy disk |z| ≤ R/2.
pub fn levin_product_eval(p: &LevinProduct, z: Complex64) -> Result<Complex64> {
    if z.norm() > 0.5 * p.r_cutoff() {
        return invalid(format!(
            "|z| = {} outside the accuracy disk {}",
            z.norm(),
            0.5 * p.r_cutoff()
        ));
    }
    let v = p.log_eval(z).exp();
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(HupError::Numerical(format!("product overflow at z = {z}")))
    }
}

/// Outcome of the two-sided growth test |S(z)| ≷ C·exp((k(θ) ± ε)|z|²).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevinBounds {
    pub epsilon: f64,
    pub log_upper_const: f64,
    pub log_lower_const: f64,
    pub samples: usize,
    pub upper_violations: usize,
    pub lower_violations: usize,
    /// log|S| at listed zeros minus the local growth, worst case
    pub zero_depth: f64,
}

impl LevinBounds {
    pub fn holds(&self) -> bool {
        self.upper_violations == 0 && self.lower_violations == 0
    }
}

/// Constants are fitted on |z| ≤ R/4 and the inequalities then checked on
/// the whole sample in |z| ≤ R/2; the lower bound skips the exceptional
/// disks |z − λ| < c/(1 + |λ|).
pub fn levin_bounds(p: &LevinProduct, epsilon: f64, samples: usize, seed: u64) -> LevinBounds {
    let r_max = 0.5 * p.r_cutoff();
    let zeros = p.zeros().points();
    let c = p.zeros().disk_c;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(Complex64, f64, bool)> = (0..samples)
        .map(|_| {
            let z = Complex64::from_polar(r_max * rng.gen::<f64>().sqrt(), rng.gen_range(-PI..PI));
            let excluded = zeros.iter().any(|l| (z - l).norm() < c / (1.0 + l.norm()));
            let growth = p.indicator(z.arg()) * z.norm_sqr();
            (z, p.log_eval(z).re - growth, excluded)
        })
        .collect();
    let slack = 1e-9;
    let mut up = f64::NEG_INFINITY;
    let mut low = f64::INFINITY;
    for &(z, excess, excluded) in &pts {
        if z.norm() <= 0.5 * r_max {
            up = up.max(excess - epsilon * z.norm_sqr());
            if !excluded {
                low = low.min(excess + epsilon * z.norm_sqr());
            }
        }
    }
    let upper_violations = pts
        .iter()
        .filter(|(z, e, _)| e - epsilon * z.norm_sqr() > up + slack)
        .count();
    let lower_violations = pts
        .iter()
        .filter(|(z, e, ex)| !ex && e + epsilon * z.norm_sqr() < low - slack)
        .count();
    let zero_depth = zeros
        .iter()
        .filter(|l| l.norm() <= r_max)
        .map(|l| p.log_eval(*l).re - p.indicator(l.arg()) * l.norm_sqr())
        .fold(f64::NEG_INFINITY, f64::max);
    LevinBounds {
        epsilon,
        log_upper_const: up,
        log_lower_const: low,
        samples,
        upper_violations,
        lower_violations,
        zero_depth,
    }
}

/// Real-line basis ρ_n(t) = (t/a_n)e^{t/a_n − 1}G_n(t)/G_n(a_n) on t > 0,
/// where G(t) = S(√t) and G_n drops the factor vanishing at a_n. Then
/// ρ_n(a_j) = δ_nj on the listed nodes and ρ_n(0) = 0.
#[derive(Clone, Debug)]
pub struct HalfLineBasis {
    product: LevinProduct,
    nodes: Vec<f64>,
    /// (log|G_n(a_n)|, sign)
    norms: Vec<(f64, f64)>,
}

impl HalfLineBasis {
    /// Uses the first `count` real zeros (in t) as nodes.
    pub fn new(product: LevinProduct, count: usize) -> Result<Self> {
        let zt = product.real_zeros_t();
        if count > zt.len() {
            return invalid(format!("{count} nodes requested, product has {}", zt.len()));
        }
        let nodes = zt[..count].to_vec();
        let norms = nodes
            .iter()
            .enumerate()
            .map(|(n, &a)| product.real_line_without(a, Some(n)))
            .collect::<Vec<_>>();
        if norms.iter().any(|(l, _)| !l.is_finite()) {
            return Err(HupError::Numerical("basis normalisation underflow".into()));
        }
        Ok(Self {
            product,
            nodes,
            norms,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn product(&self) -> &LevinProduct {
        &self.product
    }

    /// ρ_n(t) given the precomputed `real_line(t)`.
    pub fn eval_with(&self, n: usize, t: f64, g: (f64, f64)) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let a = self.nodes[n];
        if t == a {
            return 1.0;
        }
        if g.0 == f64::NEG_INFINITY {
            return 0.0;
        }
        let q = 1.0 - t / a;
        let own = q.abs().ln() + t / a;
        let (norm_log, norm_sign) = self.norms[n];
        let log = (t / a).ln() + t / a - 1.0 + (g.0 - own) - norm_log;
        g.1 * q.signum() * norm_sign * log.exp()
    }

    pub fn eval(&self, n: usize, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        self.eval_with(n, t, self.product.real_line(t))
    }

    /// Smallest t beyond the last node after which every basis function
    /// stays below `floor` (scanned with step 1/4 up to the tail start).
    pub fn support_extent(&self, floor: f64) -> f64 {
        let end = self.product.real_tail.0.min(self.product.imag_tail.0);
        let last = *self.nodes.last().unwrap_or(&0.0);
        let mut extent = last;
        let mut t = last;
        while t < end {
            let g = self.product.real_line(t);
            if (0..self.len()).any(|n| self.eval_with(n, t, g).abs() > floor) {
                extent = t;
            }
            t += 0.25;
        }
        extent + 1.0
    }

    fn combination_with(&self, coeffs: &[Complex64], t: f64, g: (f64, f64)) -> Complex64 {
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(n, c)| c * self.eval_with(n, t, g))
            .sum()
    }

    /// Σ c_n ρ_n(t).
    pub fn combination(&self, coeffs: &[Complex64], t: f64) -> Complex64 {
        if t <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.combination_with(coeffs, t, self.product.real_line(t))
    }

    /// ρ_n sampled on a grid (zero for t ≤ 0).
    pub fn to_grid(&self, n: usize, grid: Grid) -> GridFunction {
        GridFunction::from_real_fn(grid, |t| self.eval(n, t))
    }

    /// Samples of Σ c_n ρ_n at the Hankel nodes s_k², k ≥ 1, up to `t_max`.
    pub fn hankel_samples(&self, coeffs: &[Complex64], step: f64, t_max: f64) -> Vec<Complex64> {
        let count = (t_max.sqrt() / step).ceil() as usize;
        par_map(count, |k| {
            let s = (k + 1) as f64 * step;
            let t = s * s;
            let g = self.product.real_line(t);
            self.combination_with(coeffs, t, g)
        })
    }

    /// Hankel plan for Σ c_n ρ_n (supported on ℝ₊, so T lands on ℝ₋).
    pub fn hankel_plan(&self, coeffs: &[Complex64], step: f64, t_max: f64) -> HankelPlan {
        HankelPlan::from_samples(step, self.hankel_samples(coeffs, step, t_max), Vec::new())
    }

    /// Per-node Hankel plans, sharing the real-line product evaluations.
    pub fn hankel_plans(&self, step: f64, t_max: f64) -> Vec<HankelPlan> {
        let count = (t_max.sqrt() / step).ceil() as usize;
        let logs: Vec<(f64, f64)> = par_map(count, |k| {
            let s = (k + 1) as f64 * step;
            self.product.real_line(s * s)
        });
        (0..self.len())
            .map(|n| {
                let pos = logs
                    .iter()
                    .enumerate()
                    .map(|(k, &g)| {
                        let s = (k + 1) as f64 * step;
                        Complex64::new(self.eval_with(n, s * s, g), 0.0)
                    })
                    .collect();
                HankelPlan::from_samples(step, pos, Vec::new())
            })
            .collect()
    }
}

/// Build the product and basis for one half-line: the node set is the
/// positive sequence expanded to density `density`, continued regularly up
/// to R = 3·√(max node). The prefactor is chosen so that the net z²
/// coefficient (see [`LevinProduct::effective_quad_coeff`]) equals
/// `net_quad_coeff`, which fixes the real-line decay rate of the basis.
pub fn half_line_basis(
    sequence: &RealSequence,
    density: f64,
    net_quad_coeff: f64,
    disk_c: f64,
) -> Result<(HalfLineBasis, Vec<f64>)> {
    let expansion = expand_to_smooth(sequence, density)?;
    let nodes = expansion.sequence.values().to_vec();
    let last = *nodes
        .last()
        .ok_or_else(|| HupError::InvalidInput("empty node set".into()))?;
    let radius = 3.0 * last.sqrt();
    let tilde = RealSequence::new(nodes.iter().map(|t| t.sqrt()).collect(), 0)?;
    let zeros = build_k_regular(&tilde, PI * density, disk_c, radius)?;
    let bare = LevinProduct::new(zeros, Complex64::new(0.0, 0.0))?;
    let prefactor = net_quad_coeff - bare.quad_shift;
    let product = LevinProduct {
        quad_coeff: Complex64::new(prefactor, 0.0),
        ..bare
    };
    let basis = HalfLineBasis::new(product, nodes.len())?;
    Ok((basis, expansion.inserted))
}

/// Fitted envelope constants: |ρ_n(t)| ≤ C e^{−α″t + α̂a_n} and
/// |Tρ_n(ξ)| ≤ C e^{−α′|ξ| + α̂a_n}.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DecayConstants {
    pub alpha_prime: f64,
    pub alpha_hat: f64,
    pub alpha_dprime: f64,
    pub c: f64,
}

/// Slope of the log envelope: maxima of |f| over bins of width `bin`,
/// regressed against the bin centre, ignoring bins below `floor`.
fn envelope_rate(xs: &[f64], vals: &[f64], bin: f64, floor: f64) -> Option<f64> {
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut lo, mut best, mut at) = (xs.first()?.to_owned(), 0.0f64, 0.0);
    for (&x, &v) in xs.iter().zip(vals) {
        if x >= lo + bin {
            if best > floor {
                bins.push((at, best.ln()));
            }
            lo = x;
            best = 0.0;
        }
        if v.abs() > best {
            best = v.abs();
            at = x;
        }
    }
    if bins.len() < 3 {
        return None;
    }
    let rows: Vec<Vec<f64>> = bins.iter().map(|(x, _)| vec![1.0, *x]).collect();
    let rhs: Vec<f64> = bins.iter().map(|(_, l)| *l).collect();
    let (coef, _) = least_squares(&rows, &rhs).ok()?;
    Some(-coef[1])
}

/// Envelope regression over the basis and its T-images.
///
/// `images[n]` holds Tρ_n sampled at ξ = −xs[k]. α′ is the smallest
/// per-image decay rate and α̂ the slope of the image log-intercepts against
/// a_n (the midpoint of α′ and the basis rate for a single function). The
/// basis decays faster than α̂ on these products, so α″ is capped at α̂/2,
/// which keeps the basis bound valid with a finite C. C covers every sample.
pub fn fit_decay_constants(
    basis: &HalfLineBasis,
    images: &[Vec<f64>],
    xs: &[f64],
) -> Result<DecayConstants> {
    let nodes = basis.nodes();
    if nodes.is_empty() || images.len() != nodes.len() {
        return invalid("decay fit needs one image per basis function");
    }
    let t_end = basis.support_extent(1e-16);
    let ts: Vec<f64> = (0..)
        .map(|k| k as f64 * 0.125)
        .take_while(|&t| t <= t_end)
        .collect();
    let rho: Vec<Vec<f64>> = par_map(nodes.len(), |n| {
        ts.iter().map(|&t| basis.eval(n, t)).collect()
    });
    let peak = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut basis_rate = f64::INFINITY;
    let mut a1 = f64::INFINITY;
    for n in 0..nodes.len() {
        let from = ts
            .iter()
            .position(|&t| t > nodes[n] + 1.0)
            .unwrap_or(ts.len());
        let r = envelope_rate(&ts[from..], &rho[n][from..], 2.0, 1e-14 * peak(&rho[n]))
            .ok_or_else(|| HupError::Construction(format!("basis {n}: too few envelope bins")))?;
        basis_rate = basis_rate.min(r);
        let ri = envelope_rate(xs, &images[n], 2.0, IMAGE_FLOOR * peak(&images[n]))
            .ok_or_else(|| HupError::Construction(format!("image {n}: too few envelope bins")))?;
        a1 = a1.min(ri);
    }
    let intercept = |vals: &[f64], x: &[f64], rate: f64, floor: f64| {
        vals.iter()
            .zip(x)
            .filter(|(v, _)| v.abs() > floor)
            .map(|(v, x)| v.abs().ln() + rate * x.abs())
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let image_logs: Vec<f64> = (0..nodes.len())
        .map(|n| intercept(&images[n], xs, a1, IMAGE_FLOOR * peak(&images[n])))
        .collect();
    let alpha_hat = if nodes.len() == 1 {
        0.5 * (a1 + basis_rate)
    } else {
        let rows: Vec<Vec<f64>> = nodes.iter().map(|&a| vec![1.0, a]).collect();
        least_squares(&rows, &image_logs)?.0[1]
    };
    let a2 = basis_rate.min(0.5 * alpha_hat);
    let log_c = (0..nodes.len())
        .map(|n| {
            let l = image_logs[n].max(intercept(&rho[n], &ts, a2, 0.0));
            l - alpha_hat * nodes[n]
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let fit = DecayConstants {
        alpha_prime: a1,
        alpha_hat,
        alpha_dprime: a2,
        c: log_c.exp(),
    };
    debug!("decay fit {fit:?} (basis rate {basis_rate:.4})");
    if !(a1 > alpha_hat && alpha_hat > a2 && a2 > 0.0) {
        return Err(HupError::Construction(format!(
            "no admissible decay triple: α′ = {a1:.4}, α̂ = {alpha_hat:.4}, α″ = {a2:.4}"
        )));
    }
    Ok(fit)
}

/// Relative level below which sampled T-images are quadrature noise.
const IMAGE_FLOOR: f64 = 1e-9;

/// Coefficients of the exterior basis functions: `s` on the F side (A
/// nodes), `r` on the TF side (B nodes), measured in Σ|c|e^{α̂|node|}.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoeffPair {
    pub s: std::collections::BTreeMap<usize, Complex64>,
    pub r: std::collections::BTreeMap<usize, Complex64>,
    pub weight: f64,
}

impl CoeffPair {
    pub fn norm(&self, a_nodes: &[f64], b_nodes: &[f64]) -> f64 {
        let part = |m: &std::collections::BTreeMap<usize, Complex64>, nodes: &[f64]| {
            m.iter()
                .map(|(&k, c)| {
                    c.norm()
                        * (self.weight * nodes.get(k).copied().unwrap_or(f64::INFINITY).abs()).exp()
                })
                .sum::<f64>()
        };
        part(&self.s, a_nodes) + part(&self.r, b_nodes)
    }
}

/// Starting data for the iteration.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Seed {
    /// unit value at the innermost inserted node beyond the cutoff
    #[default]
    InnermostExterior,
    /// no prescribed values: the iteration stays at zero
    Zero,
    /// explicit prescribed values at inserted nodes of the F₊ half-problem
    Custom(CoeffPair),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessConfig {
    /// node density of the expanded sequences; chosen from the gaps if absent
    pub density: Option<f64>,
    /// net z² coefficient of the products, convergence-factor shift included
    pub quad_coeff: f64,
    pub disk_c: f64,
    /// overrides the δ < 1/(4C) cutoff rule
    pub l_cutoff: Option<f64>,
    pub seed: Seed,
    pub tol: f64,
    pub max_iter: usize,
    pub hankel_step: f64,
    /// Fourier-side grid for F and TF
    pub grid: Grid,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self {
            density: None,
            quad_coeff: -0.45,
            disk_c: 0.5,
            l_cutoff: None,
            seed: Seed::InnermostExterior,
            tol: 1e-12,
            max_iter: 200,
            hankel_step: 0.005,
            grid: Grid::new(64.0, 1 << 16).expect("valid default grid"),
        }
    }
}

/// Node density for a positive sequence with tail gap σ: 0.8 when
/// 1/σ < 0.8, else the midpoint of (1/σ, 1).
pub fn choose_density(s: &RealSequence) -> Result<f64> {
    let stats = gap_stats(s)?;
    let sigma = stats.liminf_tail * (1.0 - 1e-9);
    let lower = 1.0 / sigma;
    if lower >= 1.0 {
        return Err(HupError::Infeasible(format!(
            "tail gap {:.6} ≤ 1: no node density in (1/σ, 1)",
            stats.liminf_tail
        )));
    }
    Ok(if lower < 0.8 {
        0.8
    } else {
        0.5 * (lower + 1.0)
    })
}

/// One half of the construction: F supported on ℝ₊ vanishing on the
/// positive nodes `p` and TF (on ℝ₋) vanishing at −q.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HalfSolution {
    pub p_nodes: Vec<f64>,
    pub q_nodes: Vec<f64>,
    pub p_inserted: Vec<f64>,
    pub q_inserted: Vec<f64>,
    pub density_p: f64,
    pub density_q: f64,
    pub r_cutoff_p: f64,
    pub r_cutoff_q: f64,
    pub decay: DecayConstants,
    pub l_cutoff: f64,
    pub delta: f64,
    pub c_p: Vec<Complex64>,
    pub c_q: Vec<Complex64>,
    pub seed: CoeffPair,
    pub contraction_history: Vec<f64>,
    pub contraction_factor: f64,
    /// weighted ℓ¹ norm of the exterior Schur map
    pub operator_norm: f64,
    pub interior_condition: f64,
    pub iterations: usize,
}

struct HalfMachinery {
    p: HalfLineBasis,
    q: HalfLineBasis,
    extent: f64,
}

fn is_inserted(x: f64, inserted: &[f64]) -> bool {
    inserted
        .iter()
        .any(|&v| (v - x).abs() <= 1e-12 * (1.0 + x.abs()))
}

fn combine_decay(a: DecayConstants, b: DecayConstants) -> DecayConstants {
    DecayConstants {
        alpha_prime: a.alpha_prime.min(b.alpha_prime),
        alpha_hat: a.alpha_hat.max(b.alpha_hat),
        alpha_dprime: a.alpha_dprime.min(b.alpha_dprime),
        c: a.c.max(b.c),
    }
}

fn fit_for(basis: &HalfLineBasis, plans: &[HankelPlan], extent: f64) -> Result<DecayConstants> {
    let xs: Vec<f64> = (1..)
        .map(|k| 0.25 * k as f64)
        .take_while(|&x| x <= extent)
        .collect();
    let images: Vec<Vec<f64>> = par_map(plans.len(), |n| {
        xs.iter().map(|&x| plans[n].eval(-x).re).collect()
    });
    fit_decay_constants(basis, &images, &xs)
}

fn solve_half(
    p_seq: &RealSequence,
    q_seq: &RealSequence,
    cfg: &WitnessConfig,
    seed: &Seed,
) -> Result<(HalfSolution, HalfMachinery)> {
    let density_p = match cfg.density {
        Some(d) => d,
        None => choose_density(p_seq)?,
    };
    let density_q = match cfg.density {
        Some(d) => d,
        None => choose_density(q_seq)?,
    };
    let (p, p_inserted) = half_line_basis(p_seq, density_p, cfg.quad_coeff, cfg.disk_c)?;
    let (q, q_inserted) = half_line_basis(q_seq, density_q, cfg.quad_coeff, cfg.disk_c)?;
    let extent = p.support_extent(1e-17).max(q.support_extent(1e-17));
    let p_plans = p.hankel_plans(cfg.hankel_step, extent);
    let q_plans = q.hankel_plans(cfg.hankel_step, extent);
    let decay = combine_decay(
        fit_for(&p, &p_plans, extent)?,
        fit_for(&q, &q_plans, extent)?,
    );
    info!("decay constants {decay:?}");
    let (pn, qn) = (p.nodes().to_vec(), q.nodes().to_vec());
    let m = pn.len();
    let k = qn.len();

    // coupling: F(p_i) picks up Tρ^Q_j(−p_i), TF(−q_i) picks up Tρ^P_j(−q_i)
    let k_pq: Vec<Vec<f64>> = par_map(m, |i| q_plans.iter().map(|pl| pl.eval(-pn[i]).re).collect());
    let k_qp: Vec<Vec<f64>> = par_map(k, |i| p_plans.iter().map(|pl| pl.eval(-qn[i]).re).collect());

    let delta = 0.9 / (4.0 * decay.c);
    let gap = decay.alpha_hat - decay.alpha_prime;
    let l_cutoff = match cfg.l_cutoff {
        Some(l) => l,
        None => {
            let mut cands: Vec<f64> = pn.iter().chain(&qn).copied().collect();
            cands.insert(0, 0.0);
            cands.sort_by(f64::total_cmp);
            let tail = |l: f64| {
                pn.iter()
                    .chain(&qn)
                    .filter(|&&x| x > l)
                    .map(|x| (gap * x).exp())
                    .sum::<f64>()
            };
            cands
                .into_iter()
                .find(|&l| tail(l) < delta)
                .unwrap_or(f64::INFINITY)
        }
    };

    // unknown layout: 0..m for P, m..m+k for Q
    let nodes: Vec<f64> = pn.iter().chain(&qn).copied().collect();
    let dim = m + k;
    let coupling = |i: usize, j: usize| -> f64 {
        match (i < m, j < m) {
            (true, false) => k_pq[i][j - m],
            (false, true) => k_qp[i - m][j],
            _ => 0.0,
        }
    };
    let mut seed_pair = CoeffPair {
        weight: decay.alpha_hat,
        ..Default::default()
    };
    match seed {
        Seed::Zero => {}
        Seed::Custom(pair) => {
            for (&i, &v) in &pair.s {
                if i >= m || !is_inserted(pn[i], &p_inserted) {
                    return invalid(format!("seed index {i} is not an inserted F-side node"));
                }
                seed_pair.s.insert(i, v);
            }
            for (&i, &v) in &pair.r {
                if i >= k || !is_inserted(qn[i], &q_inserted) {
                    return invalid(format!("seed index {i} is not an inserted TF-side node"));
                }
                seed_pair.r.insert(i, v);
            }
        }
        Seed::InnermostExterior => {
            let mut cand: Vec<(bool, usize, f64)> = pn
                .iter()
                .enumerate()
                .filter(|(_, x)| is_inserted(**x, &p_inserted))
                .map(|(i, &x)| (true, i, x))
                .chain(
                    qn.iter()
                        .enumerate()
                        .filter(|(_, x)| is_inserted(**x, &q_inserted))
                        .map(|(i, &x)| (false, i, x)),
                )
                .collect();
            cand.sort_by(|a, b| a.2.total_cmp(&b.2));
            let &(f_side, i, _) = cand
                .iter()
                .find(|c| c.2 > l_cutoff)
                .or(cand.last())
                .ok_or_else(|| {
                    HupError::Construction("no inserted node to carry the seed".into())
                })?;
            let unit = Complex64::new(1.0, 0.0);
            if f_side {
                seed_pair.s.insert(i, unit);
            } else {
                seed_pair.r.insert(i, unit);
            }
        }
    }
    let mut v_re = vec![0.0; dim];
    let mut v_im = vec![0.0; dim];
    for (&i, c) in &seed_pair.s {
        v_re[i] = c.re;
        v_im[i] = c.im;
    }
    for (&j, c) in &seed_pair.r {
        v_re[m + j] = c.re;
        v_im[m + j] = c.im;
    }

    let interior: Vec<usize> = (0..dim).filter(|&i| nodes[i] <= l_cutoff).collect();
    let exterior: Vec<usize> = (0..dim).filter(|&i| nodes[i] > l_cutoff).collect();
    let weights: Vec<f64> = exterior
        .iter()
        .map(|&i| (decay.alpha_hat * nodes[i]).exp())
        .collect();
    let wnorm = |x: &[f64]| {
        x.iter()
            .zip(&weights)
            .map(|(a, w)| a.abs() * w)
            .sum::<f64>()
    };

    // interior unknowns are scaled by e^{α̂·node}, which balances the coupling entries
    let scale_i: Vec<f64> = interior
        .iter()
        .map(|&i| (decay.alpha_hat * nodes[i]).exp())
        .collect();
    let m_ii: Vec<Vec<f64>> = interior
        .iter()
        .enumerate()
        .map(|(r, &i)| {
            interior
                .iter()
                .enumerate()
                .map(|(c, &j)| {
                    if i == j {
                        1.0
                    } else {
                        scale_i[r] * coupling(i, j) / scale_i[c]
                    }
                })
                .collect()
        })
        .collect();
    let (interior_lu, interior_condition) = if interior.is_empty() {
        (None, 1.0)
    } else {
        let cond = crate::numerics::condition_number_1(&m_ii)?;
        if cond > 1e12 {
            return Err(HupError::Numerical(format!(
                "interior system ill-conditioned (cond₁ = {cond:.3e})"
            )));
        }
        (Some(Lu::new(m_ii)?), cond)
    };
    let solve_interior = |rhs: &[f64]| {
        interior_lu.as_ref().map_or_else(Vec::new, |lu| {
            let scaled: Vec<f64> = rhs.iter().zip(&scale_i).map(|(b, w)| b * w).collect();
            lu.solve(&scaled)
                .iter()
                .zip(&scale_i)
                .map(|(y, w)| y / w)
                .collect()
        })
    };

    // exterior Schur map x_E ↦ M_EE x_E − M_EI (I + M_II)⁻¹ M_IE x_E
    let m_ie: Vec<Vec<f64>> = interior
        .iter()
        .map(|&i| exterior.iter().map(|&j| coupling(i, j)).collect())
        .collect();
    let schur_apply = |x: &[f64]| -> Vec<f64> {
        let rhs: Vec<f64> = m_ie
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect();
        let y = solve_interior(&rhs);
        exterior
            .iter()
            .map(|&i| {
                let direct: f64 = exterior
                    .iter()
                    .zip(x)
                    .map(|(&j, xj)| coupling(i, j) * xj)
                    .sum();
                let through: f64 = interior
                    .iter()
                    .zip(&y)
                    .map(|(&j, yj)| coupling(i, j) * yj)
                    .sum();
                direct - through
            })
            .collect()
    };
    let operator_norm = (0..exterior.len())
        .map(|col| {
            let mut e = vec![0.0; exterior.len()];
            e[col] = 1.0;
            wnorm(&schur_apply(&e)) / weights[col]
        })
        .fold(0.0, f64::max);

    let mut history = Vec::new();
    let mut factor = 0.0f64;
    let mut iterations = 0;
    let mut solve_component = |v: &[f64], record: bool| -> Result<Vec<f64>> {
        let v_i: Vec<f64> = interior.iter().map(|&i| v[i]).collect();
        let y0 = solve_interior(&v_i);
        // constant part of the exterior fixed-point map
        let base: Vec<f64> = exterior
            .iter()
            .map(|&i| {
                v[i] - interior
                    .iter()
                    .zip(&y0)
                    .map(|(&j, yj)| coupling(i, j) * yj)
                    .sum::<f64>()
            })
            .collect();
        let mut x = vec![0.0; exterior.len()];
        let scale = wnorm(&base).max(v.iter().map(|a| a.abs()).sum::<f64>());
        for it in 0..cfg.max_iter {
            let sx = schur_apply(&x);
            let next: Vec<f64> = base.iter().zip(&sx).map(|(b, s)| b - s).collect();
            let diff: Vec<f64> = next.iter().zip(&x).map(|(a, b)| a - b).collect();
            let step = wnorm(&diff);
            x = next;
            if record {
                if let Some(&prev) = history.last() {
                    if prev > 0.0 {
                        factor = factor.max(step / prev);
                    }
                }
                history.push(step);
                iterations = it + 1;
            }
            if step <= cfg.tol * scale || exterior.is_empty() {
                break;
            }
            if it + 1 == cfg.max_iter {
                return Err(HupError::Numerical(format!(
                    "no convergence in {} iterations",
                    cfg.max_iter
                )));
            }
        }
        let rhs: Vec<f64> = interior
            .iter()
            .map(|&i| {
                v[i] - exterior
                    .iter()
                    .zip(&x)
                    .map(|(&j, xj)| coupling(i, j) * xj)
                    .sum::<f64>()
            })
            .collect();
        let y = solve_interior(&rhs);
        let mut full = vec![0.0; dim];
        for (&i, yi) in interior.iter().zip(&y) {
            full[i] = *yi;
        }
        for (&i, xi) in exterior.iter().zip(&x) {
            full[i] = *xi;
        }
        Ok(full)
    };
    let sol_re = solve_component(&v_re, true)?;
    let sol_im = solve_component(&v_im, false)?;
    let sol: Vec<Complex64> = sol_re
        .iter()
        .zip(&sol_im)
        .map(|(&a, &b)| Complex64::new(a, b))
        .collect();
    if factor >= 1.0 {
        return Err(HupError::Numerical(format!(
            "measured contraction factor {factor:.4} ≥ 1"
        )));
    }
    let solution = HalfSolution {
        p_inserted,
        q_inserted,
        density_p,
        density_q,
        r_cutoff_p: p.product().r_cutoff(),
        r_cutoff_q: q.product().r_cutoff(),
        decay,
        l_cutoff,
        delta,
        c_p: sol[..m].to_vec(),
        c_q: sol[m..].to_vec(),
        p_nodes: pn,
        q_nodes: qn,
        seed: seed_pair,
        contraction_history: history,
        contraction_factor: factor,
        operator_norm,
        interior_condition,
        iterations,
    };
    Ok((solution, HalfMachinery { p, q, extent }))
}

/// A nonzero F with F|_A = 0 and TF|_B = 0, its inverse transform and the
/// measured defects.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessResult {
    pub f_plus: GridFunction,
    pub f_minus: GridFunction,
    /// TF on the same grid, assembled from the basis images
    pub tf: GridFunction,
    pub psi: GridFunction,
    pub residual_a: f64,
    pub residual_b: f64,
    /// TF|_B recomputed from the sampled F through the Hankel route
    pub residual_b_resampled: f64,
    /// max over both halves of the measured step ratio
    pub contraction_factor: f64,
    pub contraction_history: Vec<f64>,
    /// L² fraction of T(F₊) on ℝ₊ and of T(F₋) on ℝ₋, composition route
    pub support_leakage: f64,
    pub psi_l2: f64,
    pub psi_l1: f64,
    /// √π(‖F‖₂ + ‖F′‖₂)
    pub l1_bound: f64,
    pub provenance: WitnessProvenance,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessProvenance {
    pub a: RealSequence,
    pub b: RealSequence,
    pub config: WitnessConfig,
    pub plus: HalfSolution,
    pub minus: HalfSolution,
    pub minus_is_reflection: bool,
}

impl WitnessResult {
    pub fn f(&self) -> GridFunction {
        self.f_plus.add(&self.f_minus).expect("same grid")
    }

    /// ψ ≢ 0 with both cross residuals at most `tol`.
    pub fn is_witness(&self, tol: f64) -> bool {
        self.psi_l2 >= 1e-3 * self.f().max_abs() && self.residual_a <= tol && self.residual_b <= tol
    }
}

/// F₊ and TF₊ of one half on `grid` (ℝ₊-supported F, ℝ₋-supported TF).
fn assemble_half(
    sol: &HalfSolution,
    mach: &HalfMachinery,
    grid: Grid,
    step: f64,
) -> (GridFunction, GridFunction) {
    let plan_r = mach.p.hankel_plan(&sol.c_p, step, mach.extent);
    let plan_w = mach.q.hankel_plan(&sol.c_q, step, mach.extent);
    let zero = Complex64::new(0.0, 0.0);
    let f = par_map(grid.len(), |k| {
        let x = grid.point(k);
        if x > 0.0 {
            mach.p.combination(&sol.c_p, x) + plan_w.eval(-x)
        } else {
            zero
        }
    });
    let tf = par_map(grid.len(), |k| {
        let x = grid.point(k);
        if x < 0.0 {
            plan_r.eval(x) + mach.q.combination(&sol.c_q, -x)
        } else {
            zero
        }
    });
    (
        GridFunction::from_vec_unchecked(grid, f),
        GridFunction::from_vec_unchecked(grid, tf),
    )
}

fn reflect(f: &GridFunction) -> GridFunction {
    let g = f.grid();
    GridFunction::from_fn(g, |x| {
        if x == -g.half_length() {
            Complex64::new(0.0, 0.0)
        } else {
            f.eval(-x)
        }
    })
}

fn reflect_exact(f: &GridFunction) -> GridFunction {
    // grid points are symmetric except the left endpoint
    let g = f.grid();
    let n = g.len();
    let v = f.values();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for k in 1..n {
        out[k] = v[n - k];
    }
    GridFunction::from_vec_unchecked(g, out)
}

/// Contraction construction of a witness for the cross (A, B).
///
/// F = F₊ + F₋ where F₊ ⊂ ℝ₊ vanishes on A₊ with TF₊ ⊂ ℝ₋ vanishing on
/// B₋, and F₋ is the reflection of the same construction for (|A₋|, B₊).
/// Each half solves the interior nodes exactly and iterates the exterior
/// fixed-point map in the α̂-weighted norm.
pub fn banach_solve(
    a: &RealSequence,
    b: &RealSequence,
    cfg: &WitnessConfig,
) -> Result<WitnessResult> {
    let a0 = a.without_zero(1e-12);
    let b0 = b.without_zero(1e-12);
    let (ap, am) = (a0.positive_part(), a0.negative_part_reflected());
    let (bp, bm) = (b0.positive_part(), b0.negative_part_reflected());
    if ap.len() < 2 || am.len() < 2 || bp.len() < 2 || bm.len() < 2 {
        return invalid(
            "banach_solve needs at least two nonzero nodes on each half-line of A and B",
        );
    }
    let (plus, mach_plus) = solve_half(&ap, &bm, cfg, &cfg.seed)?;
    let mirrored = am == ap && bp == bm;
    let grid = cfg.grid;
    let (fp, tfp) = assemble_half(&plus, &mach_plus, grid, cfg.hankel_step);
    let (minus, fm, tfm) = if mirrored {
        (plus.clone(), reflect_exact(&fp), reflect_exact(&tfp))
    } else {
        let seed = match &cfg.seed {
            Seed::Custom(_) => Seed::Zero,
            s => s.clone(),
        };
        let (minus, mach_minus) = solve_half(&am, &bp, cfg, &seed)?;
        let (h, th) = assemble_half(&minus, &mach_minus, grid, cfg.hankel_step);
        (minus, reflect(&h), reflect(&th))
    };
    let f = fp.add(&fm)?;
    let tf = tfp.add(&tfm)?;
    let f_max = f.max_abs();
    let rel = |v: f64| if f_max > 0.0 { v / f_max } else { 0.0 };
    let inside = |x: f64| x.abs() < grid.half_length() - 8.0 * grid.step();
    let residual_a = rel(a0
        .values()
        .iter()
        .filter(|x| inside(**x))
        .map(|&x| f.eval(x).norm())
        .fold(0.0, f64::max));
    let tf_max = tf.max_abs().max(f_max);
    let rel_t = |v: f64| if tf_max > 0.0 { v / tf_max } else { 0.0 };
    let residual_b = rel_t(
        b0.values()
            .iter()
            .filter(|x| inside(**x))
            .map(|&x| tf.eval(x).norm())
            .fold(0.0, f64::max),
    );

    let (residual_b_resampled, support_leakage) = if f_max > 0.0 {
        let tf_c = op_t(&f, TMethod::Hankel)?;
        let r = rel_t(
            b0.values()
                .iter()
                .filter(|x| inside(**x))
                .map(|&x| tf_c.eval(x).norm())
                .fold(0.0, f64::max),
        );
        // the Hankel route never mixes half-lines, so leakage is measured by composition
        let tfp_c = op_t(&fp, TMethod::Compose)?;
        let tfm_c = op_t(&fm, TMethod::Compose)?;
        let z = grid.zero_index();
        let energy = |v: &[Complex64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>();
        let wrong = energy(&tfp_c.values()[z + 1..]) + energy(&tfm_c.values()[..z]);
        let total = energy(tfp_c.values()) + energy(tfm_c.values());
        (
            r,
            if total > 0.0 {
                (wrong / total).sqrt()
            } else {
                0.0
            },
        )
    } else {
        (0.0, 0.0)
    };

    let psi = fourier_pi(&f, Direction::Inverse);
    let fnorms = weighted_norms(&f);
    let fprime = weighted_norms(&derivative(&f));
    let pnorms = weighted_norms(&psi);
    let mut history = plus.contraction_history.clone();
    if !mirrored {
        history.extend(minus.contraction_history.iter().copied());
    }
    let result = WitnessResult {
        residual_a,
        residual_b,
        residual_b_resampled,
        contraction_factor: plus.contraction_factor.max(minus.contraction_factor),
        contraction_history: history,
        support_leakage,
        psi_l2: pnorms.l2,
        psi_l1: pnorms.l1,
        l1_bound: PI.sqrt() * (fnorms.l2 + fprime.l2),
        f_plus: fp,
        f_minus: fm,
        tf,
        psi,
        provenance: WitnessProvenance {
            a: a.clone(),
            b: b.clone(),
            config: cfg.clone(),
            plus,
            minus,
            minus_is_reflection: mirrored,
        },
    };
    info!(
        "witness: residual_A {:.3e}, residual_B {:.3e}, factor {:.3}",
        result.residual_a, result.residual_b, result.contraction_factor
    );
    Ok(result)
}

/// ψ = P_{z1} − P_{z2} with parameters and its closed-form transform.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PoissonWitness {
    pub alpha: f64,
    pub beta: f64,
    pub z1: Complex64,
    pub z2: Complex64,
    /// multiple m in (Re w₁ − Re w₂)·β = 2m for w = 1/z̄
    pub multiple: i64,
    pub psi: GridFunction,
}

impl PoissonWitness {
    pub fn psi_value(&self, t: f64) -> f64 {
        poisson_kernel(self.z1, t) - poisson_kernel(self.z2, t)
    }

    pub fn psi_hat(&self, xi: f64) -> Complex64 {
        poisson_kernel_transform(self.z1, xi) - poisson_kernel_transform(self.z2, xi)
    }
}

/// Poisson-kernel witness for the lattice cross (αℤ, βℤ).
///
/// x₁ = −x₂ = 1/α makes ψ̂ vanish on αℤ and gives |z₁| = |z₂|, so the
/// inverted kernels share a height; the remaining condition
/// g(y) = 2αβ/(1 + α²y²) − 2 = 0 is solved by bracketing on a log grid over
/// [1e-3, 1e3] and bisection to 1e-12.
pub fn poisson_counterexample(alpha: f64, beta: f64, grid: Grid) -> Result<PoissonWitness> {
    if !(alpha > 0.0) || !(beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
        return invalid("alpha and beta must be positive");
    }
    if alpha * beta <= 1.0 + 1e-9 {
        return Err(HupError::Infeasible(format!(
            "αβ = {} ≤ 1: the cross is a uniqueness set",
            alpha * beta
        )));
    }
    let x1 = 1.0 / alpha;
    let g = |y: f64| {
        let r2 = x1 * x1 + y * y;
        (2.0 * x1 / r2) * beta - 2.0
    };
    let ys: Vec<f64> = (0..=600)
        .map(|k| 10f64.powf(-3.0 + k as f64 * 0.01))
        .collect();
    let bracket = ys
        .windows(2)
        .find(|w| g(w[0]) > 0.0 && g(w[1]) <= 0.0)
        .ok_or_else(|| {
            HupError::Infeasible("no sign change of the matching condition on [1e-3, 1e3]".into())
        })?;
    let (mut lo, mut hi) = (bracket[0], bracket[1]);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y = 0.5 * (lo + hi);
    let z1 = Complex64::new(x1, y);
    let z2 = Complex64::new(-x1, y);
    let psi = GridFunction::from_real_fn(grid, |t| poisson_kernel(z1, t) - poisson_kernel(z2, t));
    Ok(PoissonWitness {
        alpha,
        beta,
        z1,
        z2,
        multiple: 1,
        psi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn one_and_a_half(window: f64) -> RealSequence {
        let v: Vec<f64> = (1..)
            .map(|k| 1.5 * k as f64)
            .take_while(|&x| x <= window)
            .collect();
        RealSequence::new(v, 1).unwrap()
    }

    fn product() -> LevinProduct {
        half_line_basis(&one_and_a_half(40.0), 0.8, -0.45, 0.5)
            .unwrap()
            .0
            .product()
            .clone()
    }

    #[test]
    fn indicator_examples() {
        let (b, g) = (0.7, 0.3);
        assert!((indicator_k(b, g, 0.0) + g).abs() < 1e-15);
        assert!((indicator_k(b, g, FRAC_PI_4) - PI * b).abs() < 1e-14);
        assert!((indicator_k(b, g, PI) + g).abs() < 1e-14);
        for th in [0.1, 0.4, 1.2] {
            assert!((indicator_k(b, g, -th) - indicator_k(b, g, th)).abs() < 1e-14);
            assert!((indicator_k(b, g, PI - th) - indicator_k(b, g, th)).abs() < 1e-14);
        }
    }

    // Near θ = 0 the comparison is πω²θ² − 2πβθ + γ > 0, which needs s > β²;
    // for β = 1 it fails on θ ∈ [0.00194, 0.00306] and only coarse sampling misses that band.
    #[test]
    fn k_bound_beta_one_example() {
        assert!(k_bound_check(1.0, 0.95, 20.0, 10_000));
    }

    #[test]
    fn k_bound_needs_s_above_beta_squared() {
        assert!(k_bound_check(0.9, 0.95, 20.0, 10_000));
        assert!(!k_bound_check(0.9, 0.8, 20.0, 10_000));
        assert!(!k_bound_check(1.0, 0.95, 20.0, 10_000));
    }

    #[test]
    fn k_bound_examples() {
        assert!(!k_bound_check(1.0, 1.2, 20.0, 10_000));
        for omega in [50.0, 200.0, 1000.0] {
            assert!(k_bound_check(0.9, 0.9, omega, 10_000));
        }
    }

    #[test]
    fn product_normalised_and_vanishing() {
        let p = product();
        let one = levin_product_eval(&p, Complex64::new(0.0, 0.0)).unwrap();
        assert!((one - 1.0).norm() < 1e-15);
        let mut seen = 0;
        for l in p
            .zeros()
            .points()
            .into_iter()
            .filter(|l| l.norm() <= 0.5 * p.r_cutoff())
        {
            let v = levin_product_eval(&p, l).unwrap();
            let scale = (p.indicator(l.arg()) * l.norm_sqr()).exp();
            assert!(v.norm() <= 1e-8 * scale, "{l}: {v}");
            seen += 1;
        }
        assert!(seen >= 8);
        assert!(levin_product_eval(&p, Complex64::new(p.r_cutoff(), 0.0)).is_err());
    }

    #[test]
    fn product_even() {
        assert!(product().evenness_defect(500, 0) <= 1e-10);
    }

    #[test]
    fn product_growth_bounds() {
        let p = product();
        let b = levin_bounds(&p, 0.1, 1000, 0);
        assert!(b.holds(), "{b:?}");
        assert!(b.zero_depth < -20.0);
    }

    #[test]
    fn mid_gap_lower_bound() {
        let p = product();
        let b = levin_bounds(&p, 0.1, 1000, 1);
        let zt = p.real_zeros_t();
        for w in zt.windows(2).filter(|w| w[1].sqrt() <= 0.5 * p.r_cutoff()) {
            let x = 0.5 * (w[0].sqrt() + w[1].sqrt());
            let excess = p.log_eval(Complex64::new(x, 0.0)).re - p.indicator(0.0) * x * x;
            assert!(excess + 0.1 * x * x >= b.log_lower_const - 1e-9, "x = {x}");
        }
    }

    #[test]
    fn basis_interpolates() {
        let (basis, _) = half_line_basis(&one_and_a_half(40.0), 0.8, -0.45, 0.5).unwrap();
        let nodes = basis.nodes().to_vec();
        for n in [0, 3, nodes.len() / 2, nodes.len() - 1] {
            assert!((basis.eval(n, nodes[n]) - 1.0).abs() <= 1e-6);
            let near = nodes[n] * (1.0 + 1e-9);
            assert!((basis.eval(n, near) - 1.0).abs() <= 1e-6);
            for (j, &a) in nodes.iter().enumerate() {
                if j != n {
                    assert!(basis.eval(n, a).abs() <= 1e-8, "rho_{n}({a})");
                }
            }
            assert_eq!(basis.eval(n, -1.0), 0.0);
            assert_eq!(basis.eval(n, 0.0), 0.0);
        }
    }

    #[test]
    fn density_choice() {
        assert_eq!(choose_density(&one_and_a_half(40.0)).unwrap(), 0.8);
        let v: Vec<f64> = (1..=40).map(|k| 1.1 * k as f64).collect();
        let d = choose_density(&RealSequence::new(v, 1).unwrap()).unwrap();
        assert!(d > 1.0 / 1.1 && d < 1.0);
        let z = RealSequence::new((1..=40).map(f64::from).collect(), 1).unwrap();
        assert!(matches!(choose_density(&z), Err(HupError::Infeasible(_))));
    }

    #[test]
    fn coeff_pair_norm() {
        let mut pair = CoeffPair {
            weight: 0.5,
            ..Default::default()
        };
        pair.s.insert(1, Complex64::new(0.0, 2.0));
        pair.r.insert(0, Complex64::new(-1.0, 0.0));
        let n = pair.norm(&[1.0, 2.0], &[4.0]);
        assert!((n - (2.0 * 1f64.exp() + 2f64.exp())).abs() < 1e-12);
    }

    #[test]
    fn poisson_feasibility() {
        let g = Grid::new(32.0, 1 << 12).unwrap();
        let w = poisson_counterexample(1.2, 1.2, g).unwrap();
        assert!(w.psi.max_abs() > 0.1);
        for m in -10..=10 {
            assert!(w.psi_hat(1.2 * m as f64).norm() < 1e-12);
        }
        let inv = |z: Complex64| Complex64::new(1.0, 0.0) / z.conj();
        let (w1, w2) = (inv(w.z1), inv(w.z2));
        assert!((w1.im - w2.im).abs() < 1e-12);
        assert!(((w1.re - w2.re) * 1.2 - 2.0).abs() < 1e-10);
        assert!(matches!(
            poisson_counterexample(1.0, 1.0, g),
            Err(HupError::Infeasible(_))
        ));
        assert!(poisson_counterexample(2.0, 0.6, g).is_ok());
        assert!(matches!(
            poisson_counterexample(0.9, 1.1, g),
            Err(HupError::Infeasible(_))
        ));
    }
}
