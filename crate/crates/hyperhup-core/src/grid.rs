//! Uniform symmetric grids, sampled functions and the operations that live
//! directly on samples: weighted norms, derivatives, the t ↦ 1/t pullback,
//! the Hilbert transform and the Fejér-type test function.

use crate::error::{invalid, HupError, Result};
use crate::fft::fft_in_place;
use crate::numerics::{fd_derivative_range, lagrange_uniform, least_squares};
use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default relative tolerance for the admissibility constraint θ(0) = 0.
pub const TOL_ZERO: f64 = 1e-9;

/// Points t_k = −L + k·h, k = 0..n, h = 2L/n.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    #[serde(rename = "L")]
    half_length: f64,
    n: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            half_length: 32.0,
            n: 1 << 16,
        }
    }
}

impl Grid {
    pub fn new(half_length: f64, n: usize) -> Result<Self> {
        if !(half_length > 0.0) || !half_length.is_finite() {
            return invalid(format!("half length must be positive, got {half_length}"));
        }
        if n < 16 || n % 2 != 0 {
            return invalid(format!("point count must be even and >= 16, got {n}"));
        }
        Ok(Self { half_length, n })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        -self.half_length + k as f64 * self.step()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.point(k)).collect()
    }

    /// Index of t = 0.
    pub fn zero_index(&self) -> usize {
        self.n / 2
    }

    /// Nearest index to t (may fall outside 0..n).
    pub fn nearest_index(&self, t: f64) -> isize {
        ((t + self.half_length) / self.step()).round() as isize
    }
}

/// Complex samples on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct GridFunctionRepr {
    #[serde(rename = "L")]
    half_length: f64,
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for GridFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GridFunctionRepr {
            half_length: self.grid.half_length,
            n: self.grid.n,
            re: self.values.iter().map(|v| v.re).collect(),
            im: self.values.iter().map(|v| v.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GridFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = GridFunctionRepr::deserialize(d)?;
        let grid = Grid::new(r.half_length, r.n).map_err(serde::de::Error::custom)?;
        if r.re.len() != r.n || r.im.len() != r.n {
            return Err(serde::de::Error::custom("re/im length must equal n"));
        }
        let values =
            r.re.iter()
                .zip(&r.im)
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect();
        GridFunction::new(grid, values).map_err(serde::de::Error::custom)
    }
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            ));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(HupError::Numerical("non-finite sample".into()));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_vec_unchecked(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|k| f(grid.point(k))).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |t| Complex64::new(f(t), 0.0))
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn at_zero(&self) -> Complex64 {
        self.values[self.grid.zero_index()]
    }

    /// max(|f(−L)|, |f(L − h)|) relative to max|f|; 0 for the zero function.
    pub fn edge_ratio(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        let k = 4.min(self.values.len());
        let head = self.values[..k].iter().fold(0.0f64, |a, v| a.max(v.norm()));
        let tail = self.values[self.values.len() - k..]
            .iter()
            .fold(0.0f64, |a, v| a.max(v.norm()));
        head.max(tail) / m
    }

    /// Enforces θ(0) = 0 within `tol`·max|θ|.
    pub fn check_admissible(&self, tol: f64) -> Result<()> {
        let m = self.max_abs();
        let z = self.at_zero().norm();
        if z > tol * m {
            return invalid(format!("θ(0) = {z:e} violates θ(0) = 0 (max |θ| = {m:e})"));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| f(self.grid.point(k), v))
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|_, v| v * c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return invalid("grid mismatch");
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    /// sup |f − g| over the grid points with |t| ≤ radius.
    pub fn sup_diff_within(&self, other: &Self, radius: f64) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .filter(|(k, _)| self.grid.point(*k).abs() <= radius)
            .fold(0.0, |m, (_, (a, b))| m.max((a - b).norm()))
    }

    /// sup |f| over the grid points with |t| ≤ radius.
    pub fn sup_within(&self, radius: f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(k, _)| self.grid.point(*k).abs() <= radius)
            .fold(0.0, |m, (_, v)| m.max(v.norm()))
    }

    /// Degree-9 Lagrange interpolation that never mixes samples from both
    /// sides of t = 0, so kinks at the origin do not spoil the stencil.
    pub fn eval_one_sided(&self, t: f64) -> Complex64 {
        let z = self.grid.zero_index();
        let n = self.grid.len();
        let (lo, hi) = if t >= 0.0 { (z, n - 1) } else { (0, z) };
        lagrange_uniform(
            &self.values,
            -self.grid.half_length,
            self.grid.step(),
            t,
            10,
            lo,
            hi,
        )
    }

    /// Degree-9 Lagrange interpolation using all samples.
    pub fn eval(&self, t: f64) -> Complex64 {
        let n = self.grid.len();
        lagrange_uniform(
            &self.values,
            -self.grid.half_length,
            self.grid.step(),
            t,
            10,
            0,
            n - 1,
        )
    }

    /// Sum of h·f_k, the rectangle rule.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.grid.step()
    }
}

/// The weighted norms of the function classes in play.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub l2: f64,
    /// ∫ t²|f|²
    pub l2_weight_t2: f64,
    /// ∫ |f|²/|t|, infinite when f(0) ≠ 0
    pub l2_inv_weight: f64,
    /// ‖f′‖₂
    pub h1_semi: f64,
    pub l1: f64,
}

/// Highest one-sided Taylor order kept at the origin.
pub const JET_ORDER: usize = 4;

/// One-sided limits f(0±) and Taylor coefficients f^{(k)}(0±)/k!,
/// k = 1..=JET_ORDER (index k), extrapolated from the 10 samples on each
/// side that exclude t = 0, so a jump at the origin is seen as such. The
/// left coefficients are taken in the variable u = −t.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OriginJets {
    pub left: [Complex64; JET_ORDER + 1],
    pub right: [Complex64; JET_ORDER + 1],
    /// the sample stored at t = 0
    pub center: Complex64,
}

pub fn origin_jets(f: &GridFunction) -> OriginJets {
    let g = f.grid;
    let h = g.step();
    let z = g.zero_index();
    let zero = Complex64::new(0.0, 0.0);
    let mut out = OriginJets {
        left: [zero; JET_ORDER + 1],
        right: [zero; JET_ORDER + 1],
        center: f.values[z],
    };
    let width = 10usize.min(z).min(g.len() - z - 1);
    if width < JET_ORDER + 2 {
        return out;
    }
    let nodes: Vec<f64> = (1..=width).map(|j| j as f64).collect();
    let mut factorial = 1.0;
    for k in 0..=JET_ORDER {
        if k > 0 {
            factorial *= k as f64;
        }
        let w = crate::numerics::fd_weights(0.0, &nodes, k);
        let scale = 1.0 / (h.powi(k as i32) * factorial);
        let right: Complex64 = w
            .iter()
            .enumerate()
            .map(|(j, c)| f.values[z + 1 + j] * *c)
            .sum();
        let left: Complex64 = w
            .iter()
            .enumerate()
            .map(|(j, c)| f.values[z - 1 - j] * *c)
            .sum();
        out.right[k] = right * scale;
        out.left[k] = left * scale;
    }
    out
}

/// One-sided derivatives f′(0−), f′(0+) from 7-point stencils.
pub fn one_sided_slopes(f: &GridFunction) -> (Complex64, Complex64) {
    let d = piecewise_derivative(f);
    let z = f.grid.zero_index();
    (d.0[z], d.1)
}

/// Derivative by high-order finite differences on each half line; the
/// value at t = 0 is the left derivative, the right one is returned apart.
fn piecewise_derivative(f: &GridFunction) -> (Vec<Complex64>, Complex64) {
    let n = f.grid.len();
    let z = f.grid.zero_index();
    let h = f.grid.step();
    let mut left = vec![Complex64::new(0.0, 0.0); n];
    fd_derivative_range(&f.values, h, 0, z, 7, &mut left);
    let mut right = vec![Complex64::new(0.0, 0.0); n];
    fd_derivative_range(&f.values, h, z, n - 1, 7, &mut right);
    let zero_right = right[z];
    for k in z + 1..n {
        left[k] = right[k];
    }
    (left, zero_right)
}

/// All five norms of the report. The 1/|t| weight uses the local linear
/// model f ≈ f′(0±)·t around the origin, whose exact contribution enters
/// as the endpoint term (h²/12)(|f′(0+)|² + |f′(0−)|²).
pub fn weighted_norms(f: &GridFunction) -> NormReport {
    let g = f.grid;
    let h = g.step();
    let z = g.zero_index();
    let mut l2 = 0.0;
    let mut l1 = 0.0;
    let mut t2 = 0.0;
    let mut inv = 0.0;
    for (k, v) in f.values.iter().enumerate() {
        let t = g.point(k);
        let a2 = v.norm_sqr();
        l2 += a2;
        l1 += v.norm();
        t2 += t * t * a2;
        if k != z {
            inv += a2 / t.abs();
        }
    }
    let max = f.max_abs();
    let (dl, dr) = one_sided_slopes(f);
    let l2_inv_weight = if f.at_zero().norm() > TOL_ZERO * max {
        f64::INFINITY
    } else {
        h * inv + h * h / 12.0 * (dl.norm_sqr() + dr.norm_sqr())
    };
    let (d, dr0) = piecewise_derivative(f);
    let mut h1 = 0.0;
    for (k, v) in d.iter().enumerate() {
        if k == z {
            h1 += 0.5 * (v.norm_sqr() + dr0.norm_sqr());
        } else {
            h1 += v.norm_sqr();
        }
    }
    // trapezoid on each half line: ∫ = T + (h²/12)(g′(0+) − g′(0−)) for
    // g = |f′|², which vanishes unless f′ has a kink or jump at 0
    let jets = origin_jets(f);
    let slope_r = jets.right[1];
    let slope_l = -jets.left[1];
    let g_right = 2.0 * (jets.right[2] * 2.0 * slope_r.conj()).re;
    let g_left = 2.0 * (jets.left[2] * 2.0 * slope_l.conj()).re;
    let h1_total = (h * h1 + h * h / 12.0 * (g_right - g_left)).max(0.0);
    NormReport {
        l2: (h * l2).sqrt(),
        l2_weight_t2: h * t2,
        l2_inv_weight,
        h1_semi: h1_total.sqrt(),
        l1: h * l1,
    }
}

fn signed_frequency(k: usize, n: usize) -> f64 {
    if k < n / 2 {
        k as f64
    } else if k == n / 2 {
        0.0
    } else {
        k as f64 - n as f64
    }
}

/// Applies a Fourier multiplier m(ν) on the periodic grid, ν in cycles per
/// unit length (ν = k/2L), with the Nyquist bin dropped.
fn apply_multiplier(f: &GridFunction, m: impl Fn(f64) -> Complex64) -> GridFunction {
    let n = f.grid.len();
    let period = 2.0 * f.grid.half_length;
    let mut buf = f.values.clone();
    fft_in_place(&mut buf, false);
    for (k, b) in buf.iter_mut().enumerate() {
        if k == n / 2 {
            *b = Complex64::new(0.0, 0.0);
        } else {
            *b *= m(signed_frequency(k, n) / period);
        }
    }
    fft_in_place(&mut buf, true);
    let s = 1.0 / n as f64;
    GridFunction::from_vec_unchecked(f.grid, buf.into_iter().map(|v| v * s).collect())
}

fn warn_decay(f: &GridFunction, what: &str, tol: f64) {
    let r = f.edge_ratio();
    if r > tol {
        warn!("{what}: input does not decay at ±L (edge ratio {r:e})");
    }
}

/// Spectral derivative.
pub fn derivative(f: &GridFunction) -> GridFunction {
    warn_decay(f, "derivative", 1e-8);
    apply_multiplier(f, |nu| Complex64::new(0.0, 2.0 * PI * nu))
}

/// Hilbert transform, multiplier −i·sgn(ν).
pub fn hilbert_transform(f: &GridFunction) -> GridFunction {
    warn_decay(f, "hilbert_transform", 1e-6);
    apply_multiplier(f, |nu| {
        Complex64::new(0.0, -nu.signum() * (nu != 0.0) as i32 as f64)
    })
}

/// ψ̃ = (ψ − i𝐇ψ)/2. Its spectrum under ∫ψ(t)e^{−πitξ}dt lives on ξ ≤ 0,
/// equivalently on ξ ≥ 0 for the conjugate kernel e^{+πitξ}.
pub fn analytic_projection(f: &GridFunction) -> GridFunction {
    let h = hilbert_transform(f);
    let i = Complex64::new(0.0, 1.0);
    f.zip(&h, |a, b| (a - i * b) * 0.5).expect("same grid")
}

/// ‖spectral mass at positive frequencies‖₂ / ‖f‖₂ on the DFT bins (the
/// half removed by [`analytic_projection`]).
pub fn positive_frequency_fraction(f: &GridFunction) -> f64 {
    let n = f.grid.len();
    let mut buf = f.values.clone();
    fft_in_place(&mut buf, false);
    let total: f64 = buf.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let pos: f64 = (1..n / 2).map(|k| buf[k].norm_sqr()).sum();
    (pos / total).sqrt()
}

/// Power-law tail model f(t) ≈ Σ_{p=2}^{6} c_p·|t|^{−p} for t → ±∞, fitted
/// by least squares on the outer quarter of each half line.
#[derive(Clone, Debug, PartialEq)]
pub struct TailFit {
    /// c_p for the right tail, p = 2..=6
    pub right: [Complex64; 5],
    /// c_p for the left tail (in powers of |t|)
    pub left: [Complex64; 5],
    /// Fitted range starts at this |t|
    pub from: f64,
    /// Fitted range ends at this |t|
    pub to: f64,
    /// Worst relative residual of the two fits
    pub rel_residual: f64,
    /// Largest sample magnitude in the fitted ranges relative to max|f|
    pub edge_level: f64,
}

pub const TAIL_POWERS: [i32; 5] = [2, 3, 4, 5, 6];

impl TailFit {
    /// Fits each side separately and also with one expansion Σ a_p t^{−p}
    /// shared by both ends (the form taken by transforms of functions that
    /// are smooth away from the origin). The shared fit is kept unless it is
    /// clearly worse, since it leaves t⁻²f(1/t) continuous at 0.
    pub fn fit(f: &GridFunction) -> Result<Self> {
        let g = f.grid;
        let h = g.step();
        let l = g.half_length;
        let from = 0.75 * l;
        let to = l - h;
        let max = f.max_abs().max(1e-300);
        let sides: Vec<Vec<usize>> = [1.0f64, -1.0]
            .iter()
            .map(|&sign| {
                (0..g.len())
                    .filter(|&k| {
                        let t = g.point(k) * sign;
                        t >= from && t <= to + 1e-12
                    })
                    .collect()
            })
            .collect();
        let row = |k: usize| -> Vec<f64> {
            let u = l / g.point(k).abs();
            TAIL_POWERS.iter().map(|&p| u.powi(p)).collect()
        };
        let solve = |rows: &[Vec<f64>], idx: &[usize]| -> Result<([Complex64; 5], f64)> {
            let re: Vec<f64> = idx.iter().map(|&k| f.values[k].re).collect();
            let im: Vec<f64> = idx.iter().map(|&k| f.values[k].im).collect();
            let (xr, rr) = least_squares(rows, &re)?;
            let (xi, ri) = least_squares(rows, &im)?;
            let mut c = [Complex64::new(0.0, 0.0); 5];
            for j in 0..5 {
                c[j] = Complex64::new(xr[j], xi[j]) * l.powi(TAIL_POWERS[j]);
            }
            Ok((c, (rr * rr + ri * ri).sqrt()))
        };
        let norm = |idx: &[usize]| {
            idx.iter()
                .map(|&k| f.values[k].norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        let mut edge = 0.0f64;
        let mut separate = [[Complex64::new(0.0, 0.0); 5]; 2];
        let mut worst = 0.0f64;
        for (side, idx) in sides.iter().enumerate() {
            let rows: Vec<Vec<f64>> = idx.iter().map(|&k| row(k)).collect();
            let (c, res) = solve(&rows, idx)?;
            separate[side] = c;
            let level = idx.iter().fold(0.0f64, |m, &k| m.max(f.values[k].norm())) / max;
            edge = edge.max(level);
            let dn = norm(idx);
            if dn > 0.0 {
                worst = worst.max(res / dn);
            }
        }
        // shared expansion: left samples see (−1)^p
        let all: Vec<usize> = sides[0].iter().chain(&sides[1]).copied().collect();
        let rows: Vec<Vec<f64>> = all
            .iter()
            .map(|&k| {
                let mut r = row(k);
                if g.point(k) < 0.0 {
                    for (v, &p) in r.iter_mut().zip(&TAIL_POWERS) {
                        if p % 2 == 1 {
                            *v = -*v;
                        }
                    }
                }
                r
            })
            .collect();
        let (shared, res) = solve(&rows, &all)?;
        let dn = norm(&all);
        let joint = if dn > 0.0 { res / dn } else { 0.0 };
        if joint <= (10.0 * worst).max(1e-10) {
            let mut left = shared;
            for (c, &p) in left.iter_mut().zip(&TAIL_POWERS) {
                if p % 2 == 1 {
                    *c = -*c;
                }
            }
            return Ok(Self {
                right: shared,
                left,
                from,
                to,
                rel_residual: joint,
                edge_level: edge,
            });
        }
        Ok(Self {
            right: separate[0],
            left: separate[1],
            from,
            to,
            rel_residual: worst,
            edge_level: edge,
        })
    }

    /// Whether the tail carries enough mass for the model to matter.
    pub fn significant(&self) -> bool {
        self.edge_level > 1e-12
    }

    /// Model value at t (|t| ≥ from).
    pub fn value(&self, t: f64) -> Complex64 {
        let c = if t >= 0.0 { &self.right } else { &self.left };
        let a = t.abs();
        TAIL_POWERS
            .iter()
            .zip(c)
            .map(|(&p, &cp)| cp * a.powi(-p))
            .sum()
    }

    /// t⁻²·f(1/t) near t = 0, i.e. Σ c_p·|t|^{p−2} with the side of 1/t.
    pub fn inverted_value(&self, t: f64) -> Complex64 {
        let c = if t >= 0.0 { &self.right } else { &self.left };
        let a = t.abs();
        TAIL_POWERS
            .iter()
            .zip(c)
            .map(|(&p, &cp)| cp * a.powi(p - 2))
            .sum()
    }
}

/// φ(t) = t⁻²·ψ(1/t) on the same grid. Where 1/t leaves the grid the tail
/// model of ψ supplies the values, including φ(0) = c₂.
pub fn inversion_pullback(psi: &GridFunction) -> Result<GridFunction> {
    let g = psi.grid;
    if g.half_length < 2.0 {
        return invalid(format!(
            "inversion_pullback needs L >= 2, got {}",
            g.half_length
        ));
    }
    let h = g.step();
    let l = g.half_length;
    let tail = TailFit::fit(psi)?;
    if tail.significant() && tail.rel_residual > 0.1 {
        warn!(
            "inversion_pullback: tail fit residual {:.3} exceeds 10%",
            tail.rel_residual
        );
    }
    let use_tail = tail.significant();
    let reach = l - 6.0 * h;
    let z = g.zero_index();
    let n = g.len();
    let values = (0..n)
        .map(|k| {
            if k == z {
                return if use_tail {
                    (tail.right[0] + tail.left[0]) * 0.5
                } else {
                    Complex64::new(0.0, 0.0)
                };
            }
            let t = g.point(k);
            let s = 1.0 / t;
            if s.abs() <= reach {
                psi.eval(s) * (s * s)
            } else if use_tail {
                tail.inverted_value(t)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(GridFunction::from_vec_unchecked(g, values))
}

/// Fourier coefficients of the 2-periodic even function
/// f₀(x) = Σ_{n≤N} n⁻² sin((2^{n³}+1)π|x|): zero for odd k.
pub fn fejer_coefficient(terms: u32, k: i64) -> f64 {
    if k % 2 != 0 {
        return 0.0;
    }
    let kf = k as f64;
    (1..=terms)
        .map(|m| {
            let w = fejer_frequency(m);
            2.0 * w / (PI * (w * w - kf * kf)) / (m as f64 * m as f64)
        })
        .sum()
}

fn fejer_frequency(m: u32) -> f64 {
    2f64.powi((m * m * m) as i32) + 1.0
}

/// f₀ itself, evaluated through its closed form.
pub fn fejer_f0(terms: u32, x: f64) -> f64 {
    let r = (x + 1.0).rem_euclid(2.0) - 1.0;
    (1..=terms)
        .map(|m| (fejer_frequency(m) * PI * r.abs()).sin() / (m as f64 * m as f64))
        .sum()
}

/// Closed form of the normalized transform of [`make_fejer_example`]:
/// √2·f₀(ξ)·sin(π(ξ−1))/(π(ξ−1)).
pub fn fejer_transform(terms: u32, xi: f64) -> f64 {
    let d = xi - 1.0;
    let sinc = if d.abs() < 1e-12 {
        1.0
    } else {
        (PI * d).sin() / (PI * d)
    };
    std::f64::consts::SQRT_2 * fejer_f0(terms, xi) * sinc
}

/// ψ(x) = Σ_{|n|≤L−1} f̂₀(n)·e^{πi(x−n)}·1_{[n−1,n+1]}(x), an L² function
/// outside L¹ whose transform is continuous.
pub fn make_fejer_example(terms: u32, grid: Grid) -> Result<GridFunction> {
    if terms == 0 {
        return Ok(GridFunction::zeros(grid));
    }
    if terms > 3 || PI * fejer_frequency(terms) >= PI / grid.step() {
        return invalid(format!(
            "Fejér example with N = {terms} is not resolved by step {}",
            grid.step()
        ));
    }
    let nmax = (grid.half_length - 1.0).floor() as i64;
    let coeffs: Vec<f64> = (-nmax..=nmax)
        .map(|k| fejer_coefficient(terms, k))
        .collect();
    Ok(GridFunction::from_fn(grid, |x| {
        let mut acc = Complex64::new(0.0, 0.0);
        let lo = (x - 1.0).ceil() as i64;
        let hi = (x + 1.0).floor() as i64;
        for m in lo.max(-nmax)..=hi.min(nmax) {
            let c = coeffs[(m + nmax) as usize];
            if c != 0.0 {
                let ph = PI * (x - m as f64);
                acc += Complex64::new(ph.cos(), ph.sin()) * c;
            }
        }
        acc
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(t: f64) -> f64 {
        (-PI * t * t / 2.0).exp()
    }

    #[test]
    fn grid_basics() {
        let g = Grid::new(16.0, 1 << 14).unwrap();
        assert_eq!(g.point(g.zero_index()), 0.0);
        assert!(Grid::new(1.0, 15).is_err());
        assert!(Grid::new(-1.0, 16).is_err());
    }

    #[test]
    fn norms_of_zero() {
        let f = GridFunction::zeros(Grid::new(8.0, 256).unwrap());
        let r = weighted_norms(&f);
        assert_eq!(
            r,
            NormReport {
                l2: 0.0,
                l2_weight_t2: 0.0,
                l2_inv_weight: 0.0,
                h1_semi: 0.0,
                l1: 0.0
            }
        );
    }

    #[test]
    fn gaussian_norms() {
        let g = Grid::new(16.0, 1 << 14).unwrap();
        let f = GridFunction::from_real_fn(g, gauss);
        let r = weighted_norms(&f);
        // ∫ e^{−πt²} = 1
        assert!((r.l2 - 1.0).abs() < 1e-12);
        // ‖f‖₂ of e^{−πt²} is 2^{−1/4}
        let f2 = GridFunction::from_real_fn(g, |t| (-PI * t * t).exp());
        assert!((weighted_norms(&f2).l2 - 2f64.powf(-0.25)).abs() < 1e-12);
        assert!(r.l2_inv_weight.is_infinite());
        // ∫|f′|² = π²∫t²e^{−πt²} = π/2
        assert!((r.h1_semi - (PI / 2.0).sqrt()).abs() < 1e-8);
    }

    #[test]
    fn inverse_weight_of_odd_gaussian() {
        let g = Grid::new(16.0, 1 << 14).unwrap();
        let f = GridFunction::from_real_fn(g, |t| t * gauss(t));
        let r = weighted_norms(&f);
        assert!((r.l2_inv_weight - 1.0 / PI).abs() < 1e-8);
    }

    #[test]
    fn spectral_derivative() {
        let g = Grid::new(16.0, 1 << 12).unwrap();
        let d = derivative(&GridFunction::from_real_fn(g, gauss));
        let want = GridFunction::from_real_fn(g, |t| -PI * t * gauss(t));
        assert!(d.sup_diff_within(&want, 16.0) < 1e-6);
        assert_eq!(derivative(&GridFunction::zeros(g)).max_abs(), 0.0);
    }

    #[test]
    fn pullback_fixed_point() {
        let g = Grid::new(32.0, 1 << 14).unwrap();
        let psi = GridFunction::from_real_fn(g, |t| 1.0 / (1.0 + t * t));
        let phi = inversion_pullback(&psi).unwrap();
        let e = phi.sub(&psi).unwrap();
        let (k, v) = e.values().iter().enumerate().fold((0, 0.0), |b, (k, v)| {
            if v.norm() > b.1 {
                (k, v.norm())
            } else {
                b
            }
        });
        assert!(v < 5e-8, "err {v:e} at t = {}", g.point(k));
        let zero = inversion_pullback(&GridFunction::zeros(g)).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
        assert!(inversion_pullback(&GridFunction::zeros(Grid::new(1.0, 64).unwrap())).is_err());
    }

    #[test]
    fn hilbert_of_cosine() {
        let g = Grid::new(32.0, 1 << 12).unwrap();
        let w = |t: f64| (-(t / 12.0).powi(8)).exp();
        let f = GridFunction::from_real_fn(g, |t| (PI * t).cos() * w(t));
        let hf = hilbert_transform(&f);
        let want = GridFunction::from_real_fn(g, |t| (PI * t).sin() * w(t));
        assert!(hf.sup_diff_within(&want, 8.0) < 2e-3);
        let p = analytic_projection(&f);
        let want = GridFunction::from_fn(g, |t| Complex64::new(0.0, -PI * t).exp() * (0.5 * w(t)));
        assert!(p.sup_diff_within(&want, 8.0) < 2e-3);
    }

    #[test]
    fn projection_kills_positive_half() {
        let g = Grid::new(16.0, 1 << 12).unwrap();
        let f = GridFunction::from_real_fn(g, gauss);
        let p = analytic_projection(&f);
        assert!(positive_frequency_fraction(&p) <= 1e-6);
        assert!(positive_frequency_fraction(&f) > 0.5);
    }

    #[test]
    fn hilbert_squares_to_minus_identity() {
        let g = Grid::new(16.0, 1 << 12).unwrap();
        let f = GridFunction::from_real_fn(g, |t| t * gauss(t));
        let hh = hilbert_transform(&hilbert_transform(&f));
        assert!(hh.add(&f).unwrap().max_abs() <= 1e-6 * f.max_abs());
    }

    #[test]
    fn fejer_guards() {
        let g = Grid::new(16.0, 1 << 12).unwrap();
        assert_eq!(make_fejer_example(0, g).unwrap().max_abs(), 0.0);
        assert!(make_fejer_example(2, g).is_err());
        assert!(make_fejer_example(1, g).unwrap().max_abs() > 0.0);
    }

    #[test]
    fn json_round_trip() {
        let g = Grid::new(4.0, 16).unwrap();
        let f = GridFunction::from_fn(g, |t| Complex64::new(t, -t * t));
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"L\":4.0"));
        let back: GridFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
