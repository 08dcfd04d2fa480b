//! Positive-direction checks: Poincaré–Wirtinger on intervals, the
//! subcritical contradiction chain, sine-segment structure of the critical
//! case, periodization identities, the T_β transfer operator, annulus
//! Poincaré constants, the sphere-shell inequality in ℝ^d and the one-sided
//! Hilbert-invariance probe.

use crate::error::{invalid, HupError, Result};
use crate::fft::{cis_pi, fft_in_place};
use crate::grid::{
    analytic_projection, inversion_pullback, weighted_norms, Grid, GridFunction, NormReport,
    TailFit,
};
use crate::lattice::{gap_stats, CrossSpec, RealSequence};
use crate::numerics::{fd_derivative_range, lagrange_uniform};
use crate::parallel::par_map;
use crate::specfun::gamma_fn;
use crate::transforms::{fourier_pi, fourier_pi_at, radial_fourier, Direction, Extension};
use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Trapezoid rule with fourth-order Gregory end corrections.
fn gregory(vals: &[f64], h: f64) -> f64 {
    let m = vals.len();
    if m < 2 {
        return 0.0;
    }
    if m < 8 {
        let inner: f64 = vals[1..m - 1].iter().sum();
        return h * (inner + 0.5 * (vals[0] + vals[m - 1]));
    }
    let ends = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0];
    let mut s: f64 = vals[3..m - 3].iter().sum();
    for (j, w) in ends.iter().enumerate() {
        s += w * (vals[j] + vals[m - 1 - j]);
    }
    h * s
}

fn snap(grid: Grid, x: f64) -> Result<usize> {
    let k = grid.nearest_index(x);
    if k < 0 || k as usize >= grid.len() {
        return invalid(format!("point {x} lies outside the grid"));
    }
    Ok(k as usize)
}

// ---------------------------------------------------------------------------
// Poincaré–Wirtinger on an interval

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PwInterval {
    /// ∫ₐᵇ|f|²
    pub lhs: f64,
    /// ((b−a)/π)²·∫ₐᵇ|f′|²
    pub rhs: f64,
    pub ratio: f64,
    /// correlation of f with the half-period sine on [a, b]
    pub correlation: f64,
    pub equality: bool,
    pub note: Option<String>,
}

/// Samples of f on the snapped interval together with one-sided derivatives
/// that never reach outside it.
fn interval_samples(f: &GridFunction, a: f64, b: f64) -> Result<(usize, usize, Vec<Complex64>)> {
    if !(b > a) {
        return invalid(format!("degenerate interval [{a}, {b}]"));
    }
    let g = f.grid();
    let (ia, ib) = (snap(g, a)?, snap(g, b)?);
    if ib < ia + 4 {
        return invalid(format!(
            "interval [{a}, {b}] spans fewer than 5 grid points"
        ));
    }
    let mut d = vec![ZERO; g.len()];
    fd_derivative_range(f.values(), g.step(), ia, ib, 7, &mut d);
    Ok((ia, ib, d[ia..=ib].to_vec()))
}

/// Inner products of f with s(x) = sin(π(x−a)/(b−a)) over [ia, ib]:
/// (⟨f, s⟩, ‖s‖², ‖f‖²).
fn sine_products(f: &GridFunction, ia: usize, ib: usize, a: f64, b: f64) -> (Complex64, f64, f64) {
    let g = f.grid();
    let h = g.step();
    let vals = &f.values()[ia..=ib];
    let s: Vec<f64> = (ia..=ib)
        .map(|k| (PI * (g.point(k) - a) / (b - a)).sin())
        .collect();
    let re: Vec<f64> = vals.iter().zip(&s).map(|(v, w)| v.re * w).collect();
    let im: Vec<f64> = vals.iter().zip(&s).map(|(v, w)| v.im * w).collect();
    let ss: Vec<f64> = s.iter().map(|w| w * w).collect();
    let ff: Vec<f64> = vals.iter().map(|v| v.norm_sqr()).collect();
    (
        Complex64::new(gregory(&re, h), gregory(&im, h)),
        gregory(&ss, h),
        gregory(&ff, h),
    )
}

/// ∫|f|² against ((b−a)/π)²∫|f′|² on [a, b] for f vanishing at both ends
/// (within `tol`·max|f| over the interval).
pub fn pw_interval(f: &GridFunction, a: f64, b: f64, tol: f64) -> Result<PwInterval> {
    let (ia, ib, d) = interval_samples(f, a, b)?;
    let h = f.grid().step();
    let vals = &f.values()[ia..=ib];
    let peak = vals.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if peak == 0.0 {
        return Ok(PwInterval {
            lhs: 0.0,
            rhs: 0.0,
            ratio: 1.0,
            correlation: 1.0,
            equality: true,
            note: Some("f vanishes identically on the interval; ratio set to 1".into()),
        });
    }
    let ends = vals[0].norm().max(vals[vals.len() - 1].norm());
    if ends > tol * peak {
        return invalid(format!(
            "f does not vanish at the endpoints: |f| = {ends:e} against max {peak:e}"
        ));
    }
    let lhs = gregory(&vals.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>(), h);
    let grad = gregory(&d.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>(), h);
    let rhs = ((b - a) / PI).powi(2) * grad;
    let (fs, ss, ff) = sine_products(f, ia, ib, a, b);
    let correlation = fs.norm() / (ss * ff).sqrt();
    let equality = (lhs - rhs).abs() <= 1e-6 * rhs && correlation >= 0.999;
    Ok(PwInterval {
        lhs,
        rhs,
        ratio: lhs / rhs,
        correlation,
        equality,
        note: None,
    })
}

// ---------------------------------------------------------------------------
// Subcritical chain

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ConsistentUniqueness,
    VanishingViolated,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ConsistentUniqueness => "consistent_uniqueness",
            Verdict::VanishingViolated => "vanishing_violated",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyTolerances {
    /// max|θ| on A and max|Tθ| on B relative to their sup norms
    pub vanishing: f64,
    /// ‖ψ‖₂ at or below this counts as ψ ≈ 0
    pub zero_l2: f64,
    /// endpoint tolerance handed to the per-interval PW checks
    pub pw_endpoint: f64,
}

impl Default for CertifyTolerances {
    fn default() -> Self {
        Self {
            vanishing: 1e-6,
            zero_l2: 1e-12,
            pw_endpoint: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub norms_psi: NormReport,
    pub norms_phi: NormReport,
    /// |∫t²|ψ|² − ‖θ′/π‖²| / ∫t²|ψ|²
    pub plancherel_gap: f64,
    /// |∫|ψ|² − ∫t²|φ|²| / ∫|ψ|², the identity linking the two chains
    pub identity_gap: f64,
    /// per-interval PW slack on A, (rhs − lhs)/max rhs
    pub pw_gaps: Vec<f64>,
    pub residual_a: f64,
    pub residual_b: f64,
    pub points_a: usize,
    pub points_b: usize,
    pub vanishing: bool,
    /// ∫t²|ψ|² − ∫|ψ|², positive when the chain through A holds
    pub chain_gap_forward: f64,
    /// ∫t²|φ|² − ∫|φ|², positive when the chain through B holds
    pub chain_gap_reverse: f64,
    pub sup_gap_a: f64,
    pub sup_gap_b: f64,
    pub verdict: Verdict,
    pub tolerances: CertifyTolerances,
    pub notes: String,
}

fn zero_norms() -> NormReport {
    NormReport {
        l2: 0.0,
        l2_weight_t2: 0.0,
        l2_inv_weight: 0.0,
        h1_semi: 0.0,
        l1: 0.0,
    }
}

/// (∫|f|², ∫t²|f|²) beyond ±L from the fitted power-law tail,
/// ∫_L^∞ s^{w−p−q} ds = L^{w+1−p−q}/(p+q−w−1).
fn tail_moments(f: &GridFunction) -> (f64, f64) {
    let Some(tail) = TailFit::fit(f).ok().filter(|t| t.significant()) else {
        return (0.0, 0.0);
    };
    let l = f.grid().half_length();
    let mut out = [0.0; 2];
    for c in [&tail.right, &tail.left] {
        for (i, cp) in c.iter().enumerate() {
            for (j, cq) in c.iter().enumerate() {
                let e = (i + j + 4) as i32;
                let prod = (cp * cq.conj()).re;
                out[0] += prod * l.powi(1 - e) / (e - 1) as f64;
                out[1] += prod * l.powi(3 - e) / (e - 3) as f64;
            }
        }
    }
    (out[0], out[1])
}

fn in_grid(seq: &RealSequence, grid: Grid, margin: f64) -> Vec<f64> {
    let l = grid.half_length() - margin;
    seq.values()
        .iter()
        .copied()
        .filter(|x| x.abs() <= l)
        .collect()
}

/// Runs the two-sided contradiction chain for ψ against the cross.
pub fn subcritical_chain(
    psi: &GridFunction,
    cross: &CrossSpec,
    tol: CertifyTolerances,
) -> Result<CertificateReport> {
    let sup_a = gap_stats(&cross.a)?.sup;
    let sup_b = gap_stats(&cross.b)?.sup;
    let mut notes = Vec::new();
    let norms_psi = weighted_norms(psi);
    if norms_psi.l2 <= tol.zero_l2 {
        return Ok(CertificateReport {
            norms_psi,
            norms_phi: zero_norms(),
            plancherel_gap: 0.0,
            identity_gap: 0.0,
            pw_gaps: Vec::new(),
            residual_a: 0.0,
            residual_b: 0.0,
            points_a: 0,
            points_b: 0,
            vanishing: true,
            chain_gap_forward: 0.0,
            chain_gap_reverse: 0.0,
            sup_gap_a: sup_a,
            sup_gap_b: sup_b,
            verdict: Verdict::ConsistentUniqueness,
            tolerances: tol,
            notes: "ψ ≈ 0: nothing to certify".into(),
        });
    }
    let g = psi.grid();
    let theta = fourier_pi(psi, Direction::Forward);
    let phi = inversion_pullback(psi)?;
    let t_theta = fourier_pi(&phi, Direction::Forward);
    let norms_phi = weighted_norms(&phi);
    let norms_theta = weighted_norms(&theta);

    let margin = 8.0 * g.step();
    let pa = in_grid(&cross.a, g, margin);
    let pb = in_grid(&cross.b, g, margin);
    if pa.len() < cross.a.len() || pb.len() < cross.b.len() {
        notes.push(format!(
            "{} of {} A points and {} of {} B points lie inside the grid",
            pa.len(),
            cross.a.len(),
            pb.len(),
            cross.b.len()
        ));
    }
    let sup_rel = |vals: Vec<Complex64>, scale: f64| {
        let m = vals.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        if scale > 0.0 {
            m / scale
        } else {
            0.0
        }
    };
    let residual_a = sup_rel(fourier_pi_at(psi, Direction::Forward, &pa), theta.max_abs());
    let residual_b = sup_rel(
        fourier_pi_at(&phi, Direction::Forward, &pb),
        t_theta.max_abs(),
    );
    let vanishing = residual_a <= tol.vanishing && residual_b <= tol.vanishing;

    // moments with the mass beyond ±L restored
    let (psi_l2_tail, psi_t2_tail) = tail_moments(psi);
    let (phi_l2_tail, phi_t2_tail) = tail_moments(&phi);
    let t2 = norms_psi.l2_weight_t2 + psi_t2_tail;
    let l2sq = norms_psi.l2.powi(2) + psi_l2_tail;
    let phi_t2 = norms_phi.l2_weight_t2 + phi_t2_tail;
    let phi_l2sq = norms_phi.l2.powi(2) + phi_l2_tail;
    let bridge = (norms_theta.h1_semi / PI).powi(2);
    let plancherel_gap = if t2 > 0.0 {
        (t2 - bridge).abs() / t2
    } else {
        bridge
    };
    let identity_gap = (l2sq - phi_t2).abs() / l2sq;
    let chain_gap_forward = t2 - l2sq;
    let chain_gap_reverse = phi_t2 - phi_l2sq;

    let mut pw_gaps = Vec::new();
    if vanishing {
        let mut slack = Vec::new();
        for w in pa.windows(2) {
            match pw_interval(&theta, w[0], w[1], tol.pw_endpoint.max(tol.vanishing)) {
                Ok(r) => slack.push(r.rhs - r.lhs),
                Err(e) => notes.push(format!("PW check on [{}, {}] skipped: {e}", w[0], w[1])),
            }
        }
        let top = slack.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        pw_gaps = slack
            .iter()
            .map(|s| if top > 0.0 { s / top } else { 0.0 })
            .collect();
    }

    let quadrature_error = (plancherel_gap + identity_gap) * t2.max(l2sq);
    let verdict = if !vanishing {
        Verdict::VanishingViolated
    } else {
        if sup_a * sup_b < 1.0 {
            notes.push(
                "a nonzero ψ passes vanishing on a subcritical cross; both chains cannot hold, so grid error dominates"
                    .into(),
            );
        } else {
            notes.push(format!(
                "vanishing holds with sup gaps product {:.6} ≥ 1; the chain does not apply and no contradiction arises",
                sup_a * sup_b
            ));
        }
        if chain_gap_forward.abs().min(chain_gap_reverse.abs()) < quadrature_error {
            warn!("subcritical_chain: grid-induced error {quadrature_error:e} exceeds the reported gaps");
        }
        Verdict::Inconclusive
    };
    Ok(CertificateReport {
        norms_psi,
        norms_phi,
        plancherel_gap,
        identity_gap,
        pw_gaps,
        residual_a,
        residual_b,
        points_a: pa.len(),
        points_b: pb.len(),
        vanishing,
        chain_gap_forward,
        chain_gap_reverse,
        sup_gap_a: sup_a,
        sup_gap_b: sup_b,
        verdict,
        tolerances: tol,
        notes: notes.join("; "),
    })
}

// ---------------------------------------------------------------------------
// Critical case

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SineSegmentFit {
    pub breakpoints: RealSequence,
    /// t_n on [a_n, a_{n+1}]
    pub coefficients: Vec<Complex64>,
    /// ‖θ − t_n s_n‖/‖θ‖ on each interval
    pub fit_residuals: Vec<f64>,
    pub correlations: Vec<f64>,
}

impl SineSegmentFit {
    pub fn gaps(&self) -> Vec<f64> {
        self.breakpoints.gaps()
    }

    /// Σ|t_n|²
    pub fn l2_sq(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub fit: SineSegmentFit,
    /// |t_{n+1}/g_{n+1} + t_n/g_n| relative to max|t_m|/g_m, per adjacent pair
    pub alternation_defects: Vec<f64>,
    /// worst defect over pairs where both coefficients are nonzero
    pub interior_alternation_defect: f64,
    /// intervals whose sine correlation is below 0.99
    pub non_critical: Vec<usize>,
    pub min_correlation: f64,
    /// sup |ψ_closed − ψ_numeric| / sup|ψ_numeric| over |t| ≤ L/2
    pub reconstruction_error: f64,
    /// (Σ|t_n|²)^{1/2}
    pub coefficient_l2: f64,
    /// max|t_n| over the outer tenth of intervals relative to max|t_n|
    pub tail_amplitude: f64,
    /// Σ|r_n|·|b_n|^{1/4} for the dual fit on B, when supplied
    pub dual_weighted_sum: Option<f64>,
}

/// Least-squares t_n·sin(π(x − a_n)/(a_{n+1} − a_n)) on each interval of
/// consecutive points of `seq` inside the grid.
pub fn sine_segment_fit(theta: &GridFunction, seq: &RealSequence) -> Result<SineSegmentFit> {
    let g = theta.grid();
    let pts = in_grid(seq, g, 2.0 * g.step());
    if pts.len() < 2 {
        return invalid("fewer than two breakpoints inside the grid");
    }
    let fits = par_map(pts.len() - 1, |n| -> Result<(Complex64, f64, f64)> {
        let (a, b) = (pts[n], pts[n + 1]);
        let (ia, ib) = (snap(g, a)?, snap(g, b)?);
        if ib < ia + 4 {
            return invalid(format!("interval [{a}, {b}] is under-resolved"));
        }
        let (fs, ss, ff) = sine_products(theta, ia, ib, a, b);
        if ff == 0.0 {
            return Ok((ZERO, 0.0, 1.0));
        }
        let coeff = fs / ss;
        let resid = ((ff - fs.norm_sqr() / ss).max(0.0) / ff).sqrt();
        Ok((coeff, resid, fs.norm() / (ss * ff).sqrt()))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SineSegmentFit {
        breakpoints: RealSequence::new(pts, 0)?,
        coefficients: fits.iter().map(|f| f.0).collect(),
        fit_residuals: fits.iter().map(|f| f.1).collect(),
        correlations: fits.iter().map(|f| f.2).collect(),
    })
}

/// (1/√2)∫_a^{a+g} sin(π(x−a)/g)e^{πitx}dx.
fn sine_segment_inverse(a: f64, gap: f64, t: f64) -> Complex64 {
    let k = PI / gap;
    let w = PI * t;
    let den = k * k - w * w;
    let core = if den.abs() < 1e-10 * k * k {
        Complex64::new(0.0, w.signum() * gap / 2.0)
    } else {
        (cis_pi(t * gap) + 1.0) * (k / den)
    };
    cis_pi(t * a) * core / SQRT_2
}

/// ψ(t) = (1/√2)Σ t_n∫ sin(π(x−a_n)/g_n)e^{πitx}dx, the inverse transform
/// of the fitted piecewise sine; for unit gaps it reduces to
/// −(1/(√2π(t²−1)))Σ t_n(e^{πita_{n+1}} + e^{πita_n}).
pub fn sine_fit_inverse(fit: &SineSegmentFit, t: f64) -> Complex64 {
    let a = fit.breakpoints.values();
    fit.coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(n, &c)| c * sine_segment_inverse(a[n], a[n + 1] - a[n], t))
        .sum()
}

/// Sine-segment structure of θ on the intervals of A; θ must vanish on A
/// within `tol`·max|θ|. `dual` supplies (Tθ, B) for the weighted sum.
pub fn critical_structure(
    theta: &GridFunction,
    a: &RealSequence,
    dual: Option<(&GridFunction, &RealSequence)>,
    tol: f64,
) -> Result<CriticalReport> {
    let g = theta.grid();
    let scale = theta.max_abs();
    let pts = in_grid(a, g, 2.0 * g.step());
    let worst = pts.iter().fold(0.0f64, |m, &x| m.max(theta.eval(x).norm()));
    if worst > tol * scale {
        return invalid(format!(
            "θ does not vanish on A: max |θ(a)| = {worst:e} against max |θ| = {scale:e}"
        ));
    }
    let fit = sine_segment_fit(theta, a)?;
    let gaps = fit.gaps();
    let slopes: Vec<Complex64> = fit
        .coefficients
        .iter()
        .zip(&gaps)
        .map(|(c, g)| c / g)
        .collect();
    let top = slopes.iter().fold(0.0f64, |m, s| m.max(s.norm()));
    let tmax = fit.coefficients.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let alternation_defects: Vec<f64> = slopes
        .windows(2)
        .map(|w| {
            if top > 0.0 {
                (w[0] + w[1]).norm() / top
            } else {
                0.0
            }
        })
        .collect();
    let live = |c: &Complex64| c.norm() > 1e-8 * tmax;
    let interior_alternation_defect = alternation_defects
        .iter()
        .enumerate()
        .filter(|(n, _)| live(&fit.coefficients[*n]) && live(&fit.coefficients[n + 1]))
        .fold(0.0f64, |m, (_, d)| m.max(*d));
    let non_critical: Vec<usize> = fit
        .correlations
        .iter()
        .enumerate()
        .filter(|(n, &c)| c < 0.99 && live(&fit.coefficients[*n]))
        .map(|(n, _)| n)
        .collect();
    if !non_critical.is_empty() {
        warn!(
            "critical_structure: {} intervals fit a pure sine with correlation < 0.99",
            non_critical.len()
        );
    }
    let min_correlation = fit
        .correlations
        .iter()
        .enumerate()
        .filter(|(n, _)| live(&fit.coefficients[*n]))
        .fold(1.0f64, |m, (_, &c)| m.min(c));

    let numeric = fourier_pi(theta, Direction::Inverse);
    let radius = g.half_length() / 2.0;
    let idx: Vec<usize> = (0..g.len())
        .filter(|&k| g.point(k).abs() <= radius)
        .collect();
    let closed = par_map(idx.len(), |j| sine_fit_inverse(&fit, g.point(idx[j])));
    let diff = idx
        .iter()
        .zip(&closed)
        .fold(0.0f64, |m, (&k, c)| m.max((c - numeric.values()[k]).norm()));
    let reconstruction_error = if numeric.max_abs() > 0.0 {
        diff / numeric.max_abs()
    } else {
        diff
    };

    let nint = fit.coefficients.len();
    let outer = (nint / 10).max(1);
    let tail_max = fit.coefficients[..outer]
        .iter()
        .chain(&fit.coefficients[nint - outer..])
        .fold(0.0f64, |m, c| m.max(c.norm()));
    let tail_amplitude = if tmax > 0.0 { tail_max / tmax } else { 0.0 };

    let dual_weighted_sum = match dual {
        Some((t_theta, b)) => {
            let dual_fit = sine_segment_fit(t_theta, b)?;
            let bs = dual_fit.breakpoints.values();
            Some(
                dual_fit
                    .coefficients
                    .iter()
                    .enumerate()
                    .map(|(n, r)| r.norm() * bs[n].abs().powf(0.25))
                    .sum(),
            )
        }
        None => None,
    };
    Ok(CriticalReport {
        coefficient_l2: fit.l2_sq().sqrt(),
        fit,
        alternation_defects,
        interior_alternation_defect,
        non_critical,
        min_correlation,
        reconstruction_error,
        tail_amplitude,
        dual_weighted_sum,
    })
}

// ---------------------------------------------------------------------------
// Periodization

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodizationReport {
    /// sup_t |Σ_j e^{−πiθ(2j+t)}ψ(2j+t)| / (‖ψ‖₁/2)
    pub res_direct: f64,
    /// sup_t |Σ_j (t+2j)⁻²ψ(β/(t+2j))| / (‖ψ‖₁/2)
    pub res_inverted: f64,
    /// contribution of |j| > J in each sum, same normalization
    pub tail_direct: f64,
    pub tail_inverted: f64,
    /// J = ⌊L/2⌋ − 1
    pub truncation: usize,
    pub warnings: Vec<String>,
}

/// Terms beyond |j| = J of the direct sum are taken from the power-law tail
/// model of ψ up to |j| = FAR_TERMS, plus the integral remainder when the
/// phase is 2-periodic.
const FAR_TERMS: usize = 4096;

/// ∫_lo^hi f by Simpson's rule on 32 panels.
fn simpson(f: impl Fn(f64) -> Complex64, lo: f64, hi: f64) -> Complex64 {
    let m = 32;
    let h = (hi - lo) / m as f64;
    let mut s = f(lo) + f(hi);
    for k in 1..m {
        s += f(lo + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * (h / 3.0)
}

/// Both periodized vanishing identities for ψ, with the θ-shift of the
/// modulation M_θψ(τ) = e^{−πiθτ}ψ(τ) on the direct side.
pub fn periodization_check(
    psi: &GridFunction,
    theta_shift: f64,
    beta: f64,
) -> Result<PeriodizationReport> {
    if !(beta > 0.0) || !beta.is_finite() || !theta_shift.is_finite() {
        return invalid(format!(
            "need β > 0 and finite θ, got β={beta}, θ={theta_shift}"
        ));
    }
    let g = psi.grid();
    let l = g.half_length();
    if l < 4.0 {
        return invalid(format!("periodization needs L >= 4, got {l}"));
    }
    let truncation = (l / 2.0).floor() as usize - 1;
    let norms = weighted_norms(psi);
    if norms.l1 == 0.0 {
        return Ok(PeriodizationReport {
            res_direct: 0.0,
            res_inverted: 0.0,
            tail_direct: 0.0,
            tail_inverted: 0.0,
            truncation,
            warnings: Vec::new(),
        });
    }
    let tail = TailFit::fit(psi).ok().filter(|t| t.significant());
    let reach = l - 6.0 * g.step();
    let psi_at = |x: f64| -> Complex64 {
        if x.abs() <= reach {
            psi.eval(x)
        } else {
            tail.as_ref().map_or(ZERO, |t| t.value(x))
        }
    };
    let jt = truncation as i64;
    let periodic_phase = (theta_shift - theta_shift.round()).abs() < 1e-12;
    let ts: Vec<f64> = (0..g.len())
        .map(|k| g.point(k))
        .filter(|t| (-1.0..1.0).contains(t))
        .collect();
    let rows = par_map(ts.len(), |i| {
        let t = ts[i];
        let m = |x: f64| psi_at(x) * cis_pi(-theta_shift * x);
        let near: Complex64 = (-jt..=jt).map(|j| m(2.0 * j as f64 + t)).sum();
        let mut far = ZERO;
        if let Some(tl) = &tail {
            for j in jt + 1..=FAR_TERMS as i64 {
                for x in [2.0 * j as f64 + t, -2.0 * j as f64 + t] {
                    far += tl.value(x) * cis_pi(-theta_shift * x);
                }
            }
            if periodic_phase {
                // Σ_{j>M}(2j ± t)^{−p} ≈ (2M + 1 ± t)^{1−p}/(2(p − 1))
                let edge = (2 * FAR_TERMS + 1) as f64;
                let phase = cis_pi(-theta_shift * t);
                for (p, (cr, cl)) in tl
                    .right
                    .iter()
                    .zip(&tl.left)
                    .enumerate()
                    .map(|(k, c)| (k as i32 + 2, c))
                {
                    let w = |e: f64| e.powi(1 - p) / (2.0 * (p - 1) as f64);
                    far += (cr * w(edge + t) + cl * w(edge - t)) * phase;
                }
            }
        }
        // inverted side: terms s = t + 2j, |j| ≤ J, then the substitution
        // u = β/s turns the rest into (1/2β)∫ψ over two short intervals
        let inv_term = |s: f64| -> Complex64 {
            if s == 0.0 {
                return tail
                    .as_ref()
                    .map_or(ZERO, |tl| (tl.right[0] + tl.left[0]) * 0.5)
                    / (beta * beta);
            }
            psi_at(beta / s) / (s * s)
        };
        let inv_near: Complex64 = (-jt..=jt).map(|j| inv_term(t + 2.0 * j as f64)).sum();
        let up = beta / (t + 2.0 * jt as f64 + 1.0);
        let down = beta / (t - 2.0 * jt as f64 - 1.0);
        let inv_far = (simpson(&psi_at, 0.0, up) + simpson(&psi_at, down, 0.0)) / (2.0 * beta);
        (near + far, far, inv_near + inv_far, inv_far)
    });
    let norm = norms.l1 / 2.0;
    let sup = |f: fn(&(Complex64, Complex64, Complex64, Complex64)) -> Complex64| {
        rows.iter().fold(0.0f64, |m, r| m.max(f(r).norm())) / norm
    };
    let res_direct = sup(|r| r.0);
    let tail_direct = sup(|r| r.1);
    let res_inverted = sup(|r| r.2);
    let tail_inverted = sup(|r| r.3);
    let mut warnings = Vec::new();
    for (name, res, tl) in [
        ("direct", res_direct, tail_direct),
        ("inverted", res_inverted, tail_inverted),
    ] {
        if tl > 0.1 * res {
            let msg =
                format!("{name} sum: truncation tail {tl:e} exceeds 10% of the residual {res:e}");
            warn!("periodization_check: {msg}");
            warnings.push(msg);
        }
    }
    Ok(PeriodizationReport {
        res_direct,
        res_inverted,
        tail_direct,
        tail_inverted,
        truncation,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// T_β

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TBetaReport {
    pub beta: f64,
    /// ‖T_β^{2m}f‖_{L¹[−1,1]}, m = 1..=l
    pub norms: Vec<f64>,
    /// the same over [−1 + δ, 1 − δ]
    pub interior_norms: Vec<f64>,
    pub delta: f64,
    /// consecutive ratios of `norms`
    pub ratios: Vec<f64>,
    pub truncation: usize,
    /// max relative change of the norms between J and 2J
    pub refinement_change: f64,
}

pub const T_BETA_TRUNCATION: usize = 64;
pub const T_BETA_DELTA: f64 = 0.1;

/// Samples on the closed interval [−1, 1], nodes −1 + k·h, k = 0..=n.
struct ClosedSamples {
    h: f64,
    v: Vec<f64>,
}

impl ClosedSamples {
    /// Gregory rule when lo and hi are nodes, else the exact integral of
    /// the piecewise-linear interpolant.
    fn integral(&self, lo: f64, hi: f64) -> f64 {
        let n = self.v.len() - 1;
        let (kl, kh) = ((lo + 1.0) / self.h, (hi + 1.0) / self.h);
        if (kl - kl.round()).abs() < 1e-9 && (kh - kh.round()).abs() < 1e-9 && kl.round() >= 0.0 {
            let (a, b) = (kl.round() as usize, (kh.round() as usize).min(n));
            return gregory(&self.v[a..=b], self.h);
        }
        let mut s = 0.0;
        for k in 0..n {
            let (x0, x1) = (-1.0 + k as f64 * self.h, -1.0 + (k + 1) as f64 * self.h);
            let (a, b) = (x0.max(lo), x1.min(hi));
            if b <= a {
                continue;
            }
            let lin = |x: f64| self.v[k] + (self.v[k + 1] - self.v[k]) * (x - x0) / self.h;
            s += 0.5 * (b - a) * (lin(a) + lin(b));
        }
        s
    }
}

fn t_beta_step(f: &ClosedSamples, beta: f64, j_max: usize) -> ClosedSamples {
    let n = f.v.len();
    let c: Vec<Complex64> = f.v.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    let at = |u: f64| lagrange_uniform(&c, -1.0, f.h, u, 6, 0, n - 1).re;
    let f0 = at(0.0);
    let v = par_map(n, |k| {
        let t = -1.0 + k as f64 * f.h;
        let mut s = 0.0;
        for j in 1..=j_max as i64 {
            for x in [t + 2.0 * j as f64, t - 2.0 * j as f64] {
                s += beta / (x * x) * at(beta / x);
            }
        }
        // Σ_{j>J} ≈ (1/2)∫ f over [0, β/(t+2J+1)] and [β/(t−2J−1), 0],
        // plus the g′/24 midpoint correction with g ≈ βf(0)/(t ± 2x)²
        let (ep, em) = (2.0 * j_max as f64 + 1.0 + t, 2.0 * j_max as f64 + 1.0 - t);
        let (up, down) = (beta / ep, -beta / em);
        let midpoint = -beta * f0 / 6.0 * (ep.powi(-3) + em.powi(-3));
        s + 0.25 * (up * (f0 + at(up)) - down * (f0 + at(down))) + midpoint
    });
    ClosedSamples { h: f.h, v }
}

fn t_beta_norms(
    f0: &ClosedSamples,
    beta: f64,
    l: usize,
    j_max: usize,
    delta: f64,
) -> (Vec<f64>, Vec<f64>) {
    let mut f = ClosedSamples {
        h: f0.h,
        v: f0.v.clone(),
    };
    let mut norms = Vec::with_capacity(l);
    let mut interior = Vec::with_capacity(l);
    for _ in 0..l {
        f = t_beta_step(&f, beta, j_max);
        f = t_beta_step(&f, beta, j_max);
        norms.push(f.integral(-1.0, 1.0));
        interior.push(f.integral(-1.0 + delta, 1.0 - delta));
    }
    (norms, interior)
}

/// Iterates T_βf(t) = Σ_{j≠0} β/(t+2j)²·f(β/(t+2j)) on |f|, where f is
/// sampled on a grid of [−1, 1] (half length 1; the missing right endpoint
/// is extrapolated linearly).
pub fn t_beta_iterate(f: &GridFunction, beta: f64, l: usize) -> Result<TBetaReport> {
    let g = f.grid();
    if (g.half_length() - 1.0).abs() > 1e-12 {
        return invalid(format!(
            "T_β acts on [−1, 1]; grid half length is {}",
            g.half_length()
        ));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return invalid(format!("β must lie in (0, 1], got {beta}"));
    }
    if l == 0 {
        return invalid("need at least one iteration");
    }
    let mut v: Vec<f64> = f.values().iter().map(|c| c.norm()).collect();
    let n = v.len();
    v.push((2.0 * v[n - 1] - v[n - 2]).max(0.0));
    let start = ClosedSamples { h: g.step(), v };
    let (norms, interior_norms) = t_beta_norms(&start, beta, l, T_BETA_TRUNCATION, T_BETA_DELTA);
    let (fine, _) = t_beta_norms(&start, beta, l, 2 * T_BETA_TRUNCATION, T_BETA_DELTA);
    let refinement_change = norms
        .iter()
        .zip(&fine)
        .map(|(a, b)| {
            if *b != 0.0 {
                (a - b).abs() / b.abs()
            } else {
                a.abs()
            }
        })
        .fold(0.0, f64::max);
    if refinement_change > 1e-6 {
        warn!("t_beta_iterate: J-refinement changes the norms by {refinement_change:e}");
    }
    let ratios = norms
        .windows(2)
        .map(|w| if w[0] != 0.0 { w[1] / w[0] } else { 0.0 })
        .collect();
    Ok(TBetaReport {
        beta,
        norms,
        interior_norms,
        delta: T_BETA_DELTA,
        ratios,
        truncation: T_BETA_TRUNCATION,
        refinement_change,
    })
}

// ---------------------------------------------------------------------------
// Annulus

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusReport {
    pub a: f64,
    pub b: f64,
    pub d: u32,
    pub lambda1: f64,
    pub c_computed: f64,
    pub c_bound: f64,
    pub pass: bool,
    pub iterations: usize,
    /// last relative change of the Rayleigh quotient
    pub rayleigh_change: f64,
}

pub const ANNULUS_POINTS: usize = 4096;
pub const RAYLEIGH_TOL: f64 = 1e-10;

/// Solves a symmetric tridiagonal system (diag, off) x = rhs.
fn thomas(diag: &[f64], off: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = if n > 1 { off[0] / diag[0] } else { 0.0 };
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - off[i - 1] * c[i - 1];
        if i + 1 < n {
            c[i] = off[i] / m;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    d
}

/// First Dirichlet eigenvalue of −u″ − ((d−1)/r)u′ on (a, b) by
/// conservative second-order differences, symmetrized with the weight
/// r^{d−1}, and inverse iteration.
pub fn annulus_poincare(a: f64, b: f64, d: u32) -> Result<AnnulusReport> {
    if !(2..=6).contains(&d) {
        return invalid(format!("dimension {d} outside 2..=6"));
    }
    if !(a > 0.0) || !(b > a) || !b.is_finite() {
        return invalid(format!("need 0 < a < b, got a={a}, b={b}"));
    }
    if b / a > 100.0 {
        return invalid(format!("b/a = {} exceeds 100", b / a));
    }
    let n = ANNULUS_POINTS;
    let h = (b - a) / (n + 1) as f64;
    let p = (d - 1) as i32;
    let r = |i: f64| a + i * h;
    let w: Vec<f64> = (1..=n).map(|i| r(i as f64).powi(p)).collect();
    let diag: Vec<f64> = (1..=n)
        .map(|i| (r(i as f64 + 0.5).powi(p) + r(i as f64 - 0.5).powi(p)) / (h * h * w[i - 1]))
        .collect();
    let off: Vec<f64> = (1..n)
        .map(|i| -r(i as f64 + 0.5).powi(p) / (h * h * (w[i - 1] * w[i]).sqrt()))
        .collect();
    let apply = |x: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| {
                let mut s = diag[i] * x[i];
                if i > 0 {
                    s += off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += off[i] * x[i + 1];
                }
                s
            })
            .collect()
    };
    let normalize = |x: &mut Vec<f64>| {
        let s = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= s);
    };
    let mut x: Vec<f64> = (1..=n)
        .map(|i| (PI * i as f64 / (n + 1) as f64).sin() * w[i - 1].sqrt())
        .collect();
    normalize(&mut x);
    let mut rho = x.iter().zip(apply(&x)).map(|(u, v)| u * v).sum::<f64>();
    let mut change = f64::INFINITY;
    let mut iterations = 0;
    while change > RAYLEIGH_TOL && iterations < 200 {
        x = thomas(&diag, &off, &x);
        normalize(&mut x);
        let next = x.iter().zip(apply(&x)).map(|(u, v)| u * v).sum::<f64>();
        change = (next - rho).abs() / next;
        rho = next;
        iterations += 1;
    }
    if change > RAYLEIGH_TOL {
        return Err(HupError::Numerical(format!(
            "inverse iteration stalled at relative change {change:e}"
        )));
    }
    let c_computed = rho.sqrt().recip();
    let c_bound = (b / a).powf((d - 1) as f64 / 2.0) * (b - a) / PI;
    Ok(AnnulusReport {
        a,
        b,
        d,
        lambda1: rho,
        c_computed,
        c_bound,
        pass: c_computed <= c_bound + 1e-6,
        iterations,
        rayleigh_change: change,
    })
}

// ---------------------------------------------------------------------------
// Sphere-shell inequality in ℝ^d

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereLemmaReport {
    /// t²∫|f|² over ℝ^d
    pub lhs: f64,
    /// ∫|ξ|²|𝓕_d f|² from radial transforms
    pub rhs: f64,
    /// ∫|∇f|²/(4π²), the same quantity by Plancherel
    pub rhs_gradient: f64,
    /// (rhs − lhs)/rhs
    pub slack: f64,
    pub epsilon: f64,
    /// (1 − ε)/(2t)
    pub required_gap: f64,
    pub max_gap: f64,
    pub pass: bool,
}

fn sphere_area(d: u32) -> Result<f64> {
    Ok(2.0 * PI.powf(d as f64 / 2.0) / gamma_fn(d as f64 / 2.0)?)
}

/// Checks t²∫|f|² ≤ ∫|ξ|²|𝓕_d f(ξ)|² for a radial f supported outside the
/// unit ball and vanishing on spheres whose radii are (1−ε)/(2t)-dense,
/// ε = 1 − (1 + 1/(2t))^{−(d−1)/2}. `profile` holds f(r) on the
/// nonnegative half of its grid.
pub fn hd_sphere_lemma_check(
    profile: &GridFunction,
    d: u32,
    t: f64,
    radii: &RealSequence,
    tol: f64,
) -> Result<SphereLemmaReport> {
    if !(1..=12).contains(&d) {
        return invalid(format!("dimension {d} outside 1..=12"));
    }
    if !(t > 0.0) || !t.is_finite() {
        return invalid(format!("t must be positive, got {t}"));
    }
    let epsilon = 1.0 - (1.0 + 0.5 / t).powf(-((d - 1) as f64) / 2.0);
    let required_gap = (1.0 - epsilon) / (2.0 * t);
    let g = profile.grid();
    let h = g.step();
    let z = g.zero_index();
    let peak = profile.values()[z..]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.norm()));
    if peak == 0.0 {
        return Ok(SphereLemmaReport {
            lhs: 0.0,
            rhs: 0.0,
            rhs_gradient: 0.0,
            slack: 0.0,
            epsilon,
            required_gap,
            max_gap: 0.0,
            pass: true,
        });
    }
    let thresh = tol * peak;
    let rs: Vec<f64> = (z..g.len()).map(|k| g.point(k)).collect();
    let vals = &profile.values()[z..];
    if let Some((r, _)) = rs
        .iter()
        .zip(vals)
        .find(|(r, v)| **r < 1.0 - 1e-12 && v.norm() > thresh)
    {
        return invalid(format!("f does not vanish inside the unit ball (r = {r})"));
    }
    let outer = rs
        .iter()
        .zip(vals)
        .filter(|(_, v)| v.norm() > thresh)
        .map(|(r, _)| *r)
        .fold(1.0, f64::max);
    for &r in radii.values() {
        let v = profile.eval(r).norm();
        if v > thresh {
            return invalid(format!("f does not vanish at radius {r}: |f| = {v:e}"));
        }
    }
    let mut shells: Vec<f64> = std::iter::once(1.0)
        .chain(radii.values().iter().copied().filter(|&r| r > 1.0))
        .collect();
    shells.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    let covered = shells.last().copied().unwrap_or(1.0);
    if covered < outer - h {
        return invalid(format!(
            "radii stop at {covered} but f is supported up to {outer}"
        ));
    }
    let max_gap = shells
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&gp| gp > 0.0)
        .fold(0.0, f64::max);
    if max_gap > required_gap * (1.0 + 1e-9) {
        return invalid(format!(
            "radii gap {max_gap} exceeds the density requirement (1−ε)/(2t) = {required_gap}"
        ));
    }

    let area = sphere_area(d)?;
    let p = (d - 1) as i32;
    let mass: Vec<f64> = rs
        .iter()
        .zip(vals)
        .map(|(r, v)| v.norm_sqr() * r.powi(p))
        .collect();
    let lhs = t * t * area * gregory(&mass, h);
    let mut deriv = vec![ZERO; g.len()];
    fd_derivative_range(profile.values(), h, z, g.len() - 1, 7, &mut deriv);
    let grad: Vec<f64> = rs
        .iter()
        .zip(&deriv[z..])
        .map(|(r, v)| v.norm_sqr() * r.powi(p))
        .collect();
    let rhs_gradient = area * gregory(&grad, h) / (4.0 * PI * PI);

    // 𝓕_d f is smooth with bandwidth ~ outer radius; sample finely enough
    // and stop once the weighted integrand has decayed
    let drho = 1.0 / (8.0 * outer);
    let rho_max = 0.5 / h;
    let block = 64;
    let mut dens: Vec<f64> = Vec::new();
    let mut start = 0usize;
    let mut peak_dens = 0.0f64;
    loop {
        let chunk = par_map(block, |j| -> Result<f64> {
            let rho = (start + j) as f64 * drho;
            Ok(radial_fourier(profile, d, rho)?.norm_sqr() * rho.powi(p + 2))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let chunk_max = chunk.iter().fold(0.0f64, |m, v| m.max(*v));
        peak_dens = peak_dens.max(chunk_max);
        dens.extend(chunk);
        start += block;
        if (chunk_max <= 1e-14 * peak_dens && start > 4 * block) || start as f64 * drho > rho_max {
            break;
        }
    }
    let rhs = area * gregory(&dens, drho);
    let slack = (rhs - lhs) / rhs;
    if ((rhs - rhs_gradient) / rhs).abs() > 1e-4 {
        warn!("hd_sphere_lemma_check: transform-side {rhs:e} and gradient-side {rhs_gradient:e} disagree");
    }
    Ok(SphereLemmaReport {
        lhs,
        rhs,
        rhs_gradient,
        slack,
        epsilon,
        required_gap,
        max_gap,
        pass: lhs <= rhs,
    })
}

// ---------------------------------------------------------------------------
// One-sided probe

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneSidedReport {
    /// |∫ψ| / ‖ψ‖₁
    pub mean_ratio: f64,
    /// ‖𝐇ψ(1/t) + t²𝐇φ(t)‖_∞/‖𝐇ψ‖_∞ over 1/4 ≤ |t| ≤ 4
    pub invariance_residual: f64,
    /// max |Eψ̃| on A × {0} and {0} × B relative to the quadrant maximum
    pub vanishing_a: f64,
    pub vanishing_b: f64,
    /// sample abscissae in ℝ≥0 and ordinates in ℝ≤0
    pub quadrant_x: Vec<f64>,
    pub quadrant_y: Vec<f64>,
    /// Eψ̃(x_i, y_j) as quadrant[j][i]
    pub quadrant: Vec<Vec<Complex64>>,
    pub quadrant_max: f64,
    pub warnings: Vec<String>,
}

pub const QUADRANT_SIDE: usize = 16;
pub const QUADRANT_EXTENT: f64 = 4.0;
const INVARIANCE_RADIUS: f64 = 4.0;

/// Hilbert transform on the line of the band-limited interpolant of the
/// samples, by zero-padded convolution with the kernel 2/(πm), m odd.
pub fn line_hilbert(f: &GridFunction) -> GridFunction {
    let n = f.grid().len();
    let m = 2 * n;
    let mut a = vec![ZERO; m];
    a[..n].copy_from_slice(f.values());
    let mut k: Vec<Complex64> = (0..m)
        .map(|j| {
            let d = if j < n { j as i64 } else { j as i64 - m as i64 };
            if d % 2 != 0 {
                Complex64::new(2.0 / (PI * d as f64), 0.0)
            } else {
                ZERO
            }
        })
        .collect();
    fft_in_place(&mut a, false);
    fft_in_place(&mut k, false);
    for (x, y) in a.iter_mut().zip(&k) {
        *x *= y;
    }
    fft_in_place(&mut a, true);
    let s = 1.0 / m as f64;
    GridFunction::new(f.grid(), a[..n].iter().map(|v| v * s).collect()).expect("same length")
}

/// (1/π)∫_{|s|>L} tail(s)/(x − s) ds for the power-law tail model, via
/// s = ±1/u.
fn hilbert_tail(tail: &TailFit, l: f64, x: f64) -> Complex64 {
    let right = |u: f64| -> Complex64 {
        tail.right
            .iter()
            .enumerate()
            .map(|(k, c)| c * u.powi(k as i32 + 1))
            .sum::<Complex64>()
            / (x * u - 1.0)
    };
    let left = |u: f64| -> Complex64 {
        tail.left
            .iter()
            .enumerate()
            .map(|(k, c)| c * u.powi(k as i32 + 1))
            .sum::<Complex64>()
            / (x * u + 1.0)
    };
    (simpson(right, 0.0, 1.0 / l) + simpson(left, 0.0, 1.0 / l)) / PI
}

/// 𝐇f(x) for |x| well inside the grid, including the tail beyond ±L.
struct LineHilbert {
    values: GridFunction,
    tail: Option<TailFit>,
}

impl LineHilbert {
    fn new(f: &GridFunction) -> Self {
        Self {
            values: line_hilbert(f),
            tail: TailFit::fit(f).ok().filter(|t| t.significant()),
        }
    }

    fn at(&self, x: f64) -> Complex64 {
        let l = self.values.grid().half_length();
        self.values.eval(x) + self.tail.as_ref().map_or(ZERO, |t| hilbert_tail(t, l, x))
    }
}

/// Hilbert invariance of the pullback and the extension of the analytic
/// projection ψ̃ = (ψ − i𝐇ψ)/2, with the conjugate kernel e^{+πi(tξ₁+ξ₂/t)}.
pub fn one_sided_probe(
    psi: &GridFunction,
    a: &RealSequence,
    b: &RealSequence,
) -> Result<OneSidedReport> {
    if a.values().iter().any(|&x| x < 0.0) || b.values().iter().any(|&y| y > 0.0) {
        return invalid("A must lie in [0, ∞) and B in (−∞, 0]");
    }
    let g = psi.grid();
    let quadrant_x: Vec<f64> = (0..QUADRANT_SIDE)
        .map(|i| QUADRANT_EXTENT * i as f64 / (QUADRANT_SIDE - 1) as f64)
        .collect();
    let quadrant_y: Vec<f64> = quadrant_x.iter().map(|x| -x).collect();
    let norms = weighted_norms(psi);
    if norms.l1 == 0.0 {
        return Ok(OneSidedReport {
            mean_ratio: 0.0,
            invariance_residual: 0.0,
            vanishing_a: 0.0,
            vanishing_b: 0.0,
            quadrant: vec![vec![ZERO; QUADRANT_SIDE]; QUADRANT_SIDE],
            quadrant_x,
            quadrant_y,
            quadrant_max: 0.0,
            warnings: Vec::new(),
        });
    }
    if g.half_length() <= INVARIANCE_RADIUS * 2.0 {
        return invalid(format!(
            "one_sided_probe needs L > {}",
            2.0 * INVARIANCE_RADIUS
        ));
    }
    let mut warnings = Vec::new();
    let mean_ratio = psi.integral().norm() / norms.l1;
    if mean_ratio > 1e-6 {
        let msg = format!("∫ψ = {mean_ratio:e}·‖ψ‖₁; the invariance identity assumes mean zero");
        warn!("one_sided_probe: {msg}");
        warnings.push(msg);
    }

    let h_psi = LineHilbert::new(psi);
    let h_phi = LineHilbert::new(&inversion_pullback(psi)?);
    let ts: Vec<f64> = (0..g.len())
        .map(|k| g.point(k))
        .filter(|t| (1.0 / INVARIANCE_RADIUS..=INVARIANCE_RADIUS).contains(&t.abs()))
        .collect();
    let defects = par_map(ts.len(), |i| {
        let t = ts[i];
        (h_psi.at(1.0 / t) + h_phi.at(t) * (t * t)).norm()
    });
    let h_sup = h_psi.values.max_abs();
    let invariance_residual = defects.iter().fold(0.0f64, |m, v| m.max(*v)) / h_sup;

    let projected = analytic_projection(psi);
    let ext = Extension::new(&projected, true)?;
    let points: Vec<(f64, f64)> = quadrant_y
        .iter()
        .flat_map(|&y| quadrant_x.iter().map(move |&x| (x, y)))
        .collect();
    let flat = par_map(points.len(), |i| ext.eval(points[i].0, points[i].1));
    let quadrant: Vec<Vec<Complex64>> = flat.chunks(QUADRANT_SIDE).map(|r| r.to_vec()).collect();
    let quadrant_max = flat.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let scale = quadrant_max.max(f64::MIN_POSITIVE);
    let reach = g.half_length() - 8.0 * g.step();
    let on_axis = |pts: Vec<(f64, f64)>| {
        let v = par_map(pts.len(), |i| ext.eval(pts[i].0, pts[i].1).norm());
        v.into_iter().fold(0.0f64, f64::max) / scale
    };
    let vanishing_a = on_axis(
        a.values()
            .iter()
            .filter(|x| x.abs() <= reach)
            .map(|&x| (x, 0.0))
            .collect(),
    );
    let vanishing_b = on_axis(
        b.values()
            .iter()
            .filter(|y| y.abs() <= reach)
            .map(|&y| (0.0, y))
            .collect(),
    );
    Ok(OneSidedReport {
        mean_ratio,
        invariance_residual,
        vanishing_a,
        vanishing_b,
        quadrant_x,
        quadrant_y,
        quadrant,
        quadrant_max,
        warnings,
    })
}
