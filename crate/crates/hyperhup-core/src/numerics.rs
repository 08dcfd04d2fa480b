//! Small numerical kernels shared across modules: barycentric Lagrange
//! interpolation on uniform samples, finite-difference weights, the
//! generalized exponential integral, endpoint corrections for odd
//! integrands and dense real linear algebra.

use crate::error::{HupError, Result};
use num_complex::Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Interpolates uniform samples `f[j]` taken at `x0 + j·h` at the point `x`,
/// using `order` consecutive nodes drawn only from `lo..=hi`.
pub fn lagrange_uniform(
    f: &[Complex64],
    x0: f64,
    h: f64,
    x: f64,
    order: usize,
    lo: usize,
    hi: usize,
) -> Complex64 {
    let m = order.min(hi + 1 - lo).max(1);
    let pos = (x - x0) / h;
    let mut start = (pos.floor() as isize) - (m as isize - 1) / 2;
    start = start.clamp(lo as isize, (hi + 1 - m) as isize);
    let start = start as usize;
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    let mut w = 1.0f64;
    // w_j = (-1)^j C(m-1, j)
    for j in 0..m {
        let d = pos - (start + j) as f64;
        if d.abs() < 1e-14 {
            return f[start + j];
        }
        let c = w / d;
        num += f[start + j] * c;
        den += c;
        w *= -((m - 1 - j) as f64) / (j as f64 + 1.0);
    }
    num / den
}

/// Fornberg weights for the `deriv`-th derivative at `z` from nodes `x`.
pub fn fd_weights(z: f64, x: &[f64], deriv: usize) -> Vec<f64> {
    let n = x.len();
    let m = deriv;
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// First derivative of uniform samples restricted to `lo..=hi`, using a
/// `width`-point stencil that never leaves the range.
pub fn fd_derivative_range(
    f: &[Complex64],
    h: f64,
    lo: usize,
    hi: usize,
    width: usize,
    out: &mut [Complex64],
) {
    let len = hi + 1 - lo;
    let m = width.min(len);
    for i in lo..=hi {
        let mut start = i as isize - (m as isize - 1) / 2;
        start = start.clamp(lo as isize, (hi + 1 - m) as isize);
        let start = start as usize;
        let nodes: Vec<f64> = (0..m).map(|j| (start + j) as f64).collect();
        let w = fd_weights(i as f64, &nodes, 1);
        let mut d = Complex64::new(0.0, 0.0);
        for j in 0..m {
            d += f[start + j] * w[j];
        }
        out[i] = d / h;
    }
}

/// Generalized exponential integral E_p(z) = ∫₁^∞ e^{−zu} u^{−p} du for
/// integer p ≥ 1 and Re z ≥ 0, z ≠ 0 when p = 1.
pub fn expint_p(p: u32, z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if z.norm() == 0.0 {
        return if p > 1 {
            one / (p as f64 - 1.0)
        } else {
            Complex64::new(f64::INFINITY, 0.0)
        };
    }
    let nm1 = p as i64 - 1;
    if z.norm() > 2.0 {
        // modified Lentz on the continued fraction
        let tiny = 1e-300;
        let mut b = z + p as f64;
        let mut c = Complex64::new(1.0 / tiny, 0.0);
        let mut d = one / b;
        let mut h = d;
        for i in 1..20_000 {
            let an = -(i as f64) * (nm1 as f64 + i as f64);
            b += 2.0;
            d = one / (d * an + b);
            c = b + c.inv() * an;
            let del = c * d;
            h *= del;
            if (del - one).norm() < 1e-16 {
                break;
            }
        }
        h * (-z).exp()
    } else {
        let mut ans = if nm1 != 0 {
            one / nm1 as f64
        } else {
            -z.ln() - EULER_GAMMA
        };
        let mut fact = one;
        for i in 1..200i64 {
            fact *= -z / i as f64;
            let del = if i != nm1 {
                -fact / (i - nm1) as f64
            } else {
                let psi = -EULER_GAMMA + (1..=nm1).map(|k| 1.0 / k as f64).sum::<f64>();
                fact * (-z.ln() + psi)
            };
            ans += del;
            if del.norm() < ans.norm() * 1e-17 {
                break;
            }
        }
        ans
    }
}

/// Euler–Maclaurin correction at a left endpoint 0 for an odd integrand g
/// (g(0) = 0) sampled at s = h, 2h, 3h, 4h. Adding it to h·Σ_{k≥1} g(kh)
/// removes the h², h⁴, h⁶ and h⁸ error terms.
pub fn odd_endpoint_correction(h: f64, g: [Complex64; 4]) -> Complex64 {
    // y_k = g(kh)/(kh) = d0 + d1·u + d2·u² + d3·u³ with u = k²
    let y: Vec<Complex64> = (1..=4).map(|k| g[k - 1] / (k as f64 * h)).collect();
    let u = [1.0, 4.0, 9.0, 16.0];
    // Newton divided differences
    let mut dd = y.clone();
    for level in 1..4 {
        for i in (level..4).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (u[i] - u[i - level]);
        }
    }
    // expand the Newton form to monomial coefficients
    let mut coef = [Complex64::new(0.0, 0.0); 4];
    for i in (0..4).rev() {
        for j in (1..4).rev() {
            coef[j] = coef[j - 1] - coef[j] * u[i];
        }
        coef[0] = dd[i] - coef[0] * u[i];
    }
    (coef[0] / 12.0 - coef[1] / 120.0 + coef[2] / 252.0 - coef[3] / 240.0) * (h * h)
}

/// Least squares min ‖Ax − b‖ by Householder QR. `a` is row-major m×k.
/// Returns the solution and the residual norm.
pub fn least_squares(a: &[Vec<f64>], b: &[f64]) -> Result<(Vec<f64>, f64)> {
    let m = a.len();
    let k = a.first().map_or(0, |r| r.len());
    if m < k || k == 0 {
        return Err(HupError::Numerical(format!(
            "least squares needs m >= k > 0, got {m}x{k}"
        )));
    }
    let mut q: Vec<Vec<f64>> = a.to_vec();
    let mut rhs = b.to_vec();
    for j in 0..k {
        let norm: f64 = (j..m).map(|i| q[i][j] * q[i][j]).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(HupError::Numerical("rank-deficient least squares".into()));
        }
        let alpha = if q[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..m).map(|i| q[i][j]).collect();
        v[0] -= alpha;
        let vn: f64 = v.iter().map(|x| x * x).sum();
        if vn == 0.0 {
            continue;
        }
        for col in j..k {
            let s: f64 = (j..m).map(|i| v[i - j] * q[i][col]).sum::<f64>() * 2.0 / vn;
            for i in j..m {
                q[i][col] -= s * v[i - j];
            }
        }
        let s: f64 = (j..m).map(|i| v[i - j] * rhs[i]).sum::<f64>() * 2.0 / vn;
        for i in j..m {
            rhs[i] -= s * v[i - j];
        }
    }
    let mut x = vec![0.0; k];
    for j in (0..k).rev() {
        let mut s = rhs[j];
        for c in j + 1..k {
            s -= q[j][c] * x[c];
        }
        if q[j][j].abs() < 1e-300 {
            return Err(HupError::Numerical("singular triangular factor".into()));
        }
        x[j] = s / q[j][j];
    }
    let res: f64 = rhs[k..].iter().map(|r| r * r).sum::<f64>().sqrt();
    Ok((x, res))
}

/// LU factorisation with partial pivoting of a dense real matrix.
pub struct Lu {
    lu: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(mut a: Vec<Vec<f64>>) -> Result<Self> {
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        for col in 0..n {
            let (piv, pv) =
                (col..n)
                    .map(|r| (r, a[r][col].abs()))
                    .fold(
                        (col, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pv <= 1e-14 * scale.max(1e-300) {
                return Err(HupError::Numerical(format!(
                    "singular matrix at column {col}"
                )));
            }
            a.swap(col, piv);
            perm.swap(col, piv);
            for r in col + 1..n {
                let f = a[r][col] / a[col][col];
                a[r][col] = f;
                for c in col + 1..n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.len();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.lu[i][j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.lu[i][j] * x[j];
            }
            x[i] /= self.lu[i][i];
        }
        x
    }
}

/// 1-norm condition estimate through explicit inversion (matrices here are
/// at most a few hundred wide).
pub fn condition_number_1(a: &[Vec<f64>]) -> Result<f64> {
    let n = a.len();
    let lu = Lu::new(a.to_vec())?;
    let norm_a = (0..n)
        .map(|c| a.iter().map(|r| r[c].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut norm_inv = 0.0f64;
    for c in 0..n {
        let mut e = vec![0.0; n];
        e[c] = 1.0;
        let col = lu.solve(&e);
        norm_inv = norm_inv.max(col.iter().map(|v| v.abs()).sum());
    }
    Ok(norm_a * norm_inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lagrange_reproduces_polynomials() {
        let f: Vec<Complex64> = (0..20)
            .map(|j| {
                let x = 0.5 + j as f64 * 0.1;
                Complex64::new(x * x * x - 2.0 * x, x)
            })
            .collect();
        let x = 1.234;
        let v = lagrange_uniform(&f, 0.5, 0.1, x, 6, 0, 19);
        assert!((v.re - (x * x * x - 2.0 * x)).abs() < 1e-12);
        let v = lagrange_uniform(&f, 0.5, 0.1, 0.51, 6, 3, 19);
        assert!((v.im - 0.51).abs() < 1e-12);
    }

    #[test]
    fn fornberg_central_weights() {
        let w = fd_weights(0.0, &[-1.0, 0.0, 1.0], 1);
        assert!((w[0] + 0.5).abs() < 1e-15 && w[1].abs() < 1e-15 && (w[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn expint_known_values() {
        // E_2(1) and E_3(0.5 i) from 30-digit references
        let e = expint_p(2, Complex64::new(1.0, 0.0));
        assert!((e.re - 0.148_495_506_775_922_05).abs() < 1e-14);
        let e = expint_p(1, Complex64::new(3.0, 0.0));
        assert!((e.re - 0.013_048_381_094_197_04).abs() < 1e-15);
        // continuity across the series/continued-fraction switch
        let a = expint_p(3, Complex64::new(0.0, 1.999_999_9));
        let b = expint_p(3, Complex64::new(0.0, 2.000_000_1));
        assert!((a - b).norm() < 1e-6);
    }

    #[test]
    fn odd_correction_fixes_trapezoid() {
        // ∫₀^∞ s·e^{−s²} ds = 1/2
        let h = 0.05;
        let g = |s: f64| Complex64::new(s * (-s * s).exp(), 0.0);
        let t: Complex64 = (1..2000).map(|k| g(k as f64 * h)).sum::<Complex64>() * h;
        let c = odd_endpoint_correction(h, [g(h), g(2.0 * h), g(3.0 * h), g(4.0 * h)]);
        assert!((t.re - 0.5).abs() > 1e-4);
        assert!((t.re + c.re - 0.5).abs() < 1e-11);
    }

    #[test]
    fn least_squares_exact_fit() {
        let a: Vec<Vec<f64>> = (0..6).map(|i| vec![1.0, i as f64]).collect();
        let b: Vec<f64> = (0..6).map(|i| 2.0 + 3.0 * i as f64).collect();
        let (x, r) = least_squares(&a, &b).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 3.0).abs() < 1e-12 && r < 1e-12);
    }

    #[test]
    fn lu_solves() {
        let a = vec![vec![0.0, 2.0], vec![3.0, 1.0]];
        let x = Lu::new(a).unwrap().solve(&[4.0, 5.0]);
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
    }
}
