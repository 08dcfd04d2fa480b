//! FFT plumbing: cached planners and a chirp-z evaluator for Fourier sums
//! between two arbitrary uniform grids.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::f64::consts::PI;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place unnormalized DFT, X_k = Σ x_j e^{∓2πijk/N}.
pub fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        let plan = if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        };
        plan.process(buf);
    });
}

/// e^{iπx}, reducing x modulo 2 first to keep large phases accurate.
#[inline]
pub fn cis_pi(x: f64) -> Complex64 {
    let r = x.rem_euclid(2.0);
    let (s, c) = (PI * r).sin_cos();
    Complex64::new(c, s)
}

/// X_m = Σ_k u_k·exp(sign·πi·t_k·ξ_m) with t_k = t0 + k·ht and ξ_m = x0 + m·hx,
/// m = 0..m_out, through Bluestein's chirp factorisation.
pub fn chirp_z(
    u: &[Complex64],
    t0: f64,
    ht: f64,
    x0: f64,
    hx: f64,
    m_out: usize,
    sign: f64,
) -> Vec<Complex64> {
    let n = u.len();
    if n == 0 || m_out == 0 {
        return vec![Complex64::new(0.0, 0.0); m_out];
    }
    let beta = 0.5 * ht * hx;
    let size = (n + m_out - 1).next_power_of_two();
    let mut a = vec![Complex64::new(0.0, 0.0); size];
    for (k, (ak, &uk)) in a.iter_mut().zip(u).enumerate() {
        let kf = k as f64;
        *ak = uk * cis_pi(sign * (beta * kf * kf + x0 * ht * kf));
    }
    let mut c = vec![Complex64::new(0.0, 0.0); size];
    for j in 0..m_out.max(n) {
        let jf = j as f64;
        let v = cis_pi(-sign * beta * jf * jf);
        if j < m_out {
            c[j] = v;
        }
        if j > 0 && j < n {
            c[size - j] = v;
        }
    }
    fft_in_place(&mut a, false);
    fft_in_place(&mut c, false);
    for (x, y) in a.iter_mut().zip(&c) {
        *x *= y;
    }
    fft_in_place(&mut a, true);
    let scale = 1.0 / size as f64;
    (0..m_out)
        .map(|m| {
            let mf = m as f64;
            a[m] * scale * cis_pi(sign * (t0 * x0 + t0 * hx * mf + beta * mf * mf))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chirp_matches_direct_sum() {
        let n = 37;
        let u: Vec<Complex64> = (0..n)
            .map(|k| Complex64::new((k as f64 * 0.3).sin(), (k as f64 * 0.7).cos()))
            .collect();
        let (t0, ht, x0, hx) = (-2.1, 0.13, -3.3, 0.21);
        for sign in [-1.0, 1.0] {
            let got = chirp_z(&u, t0, ht, x0, hx, 29, sign);
            for (m, g) in got.iter().enumerate() {
                let xi = x0 + m as f64 * hx;
                let want: Complex64 = u
                    .iter()
                    .enumerate()
                    .map(|(k, &uk)| uk * cis_pi(sign * (t0 + k as f64 * ht) * xi))
                    .sum();
                assert!((g - want).norm() < 1e-12);
            }
        }
    }
}
