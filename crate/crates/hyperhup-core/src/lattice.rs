//! Sequences, lattice crosses, densities and smoothness, and the
//! preprocessing that turns a separated sequence into the zero set of an
//! entire function of controlled growth.

use crate::error::{invalid, HupError, Result};
use log::warn;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::str::FromStr;

/// Strictly increasing finite sequence indexed from `offset`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealSequence {
    offset: i64,
    values: Vec<f64>,
    #[serde(skip)]
    separation: f64,
}

#[derive(Deserialize)]
struct RawSequence {
    offset: i64,
    values: Vec<f64>,
}

impl<'de> Deserialize<'de> for RealSequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSequence::deserialize(d)?;
        RealSequence::new(raw.values, raw.offset).map_err(serde::de::Error::custom)
    }
}

impl RealSequence {
    pub fn new(values: Vec<f64>, offset: i64) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return invalid(format!("non-finite sequence value {v}"));
        }
        let mut separation = f64::INFINITY;
        for w in values.windows(2) {
            let gap = w[1] - w[0];
            if gap <= 0.0 {
                return invalid(format!(
                    "sequence not strictly increasing (separation violated at {} -> {})",
                    w[0], w[1]
                ));
            }
            separation = separation.min(gap);
        }
        Ok(Self {
            offset,
            values,
            separation,
        })
    }

    /// Sorts and validates.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(f64::total_cmp);
        Self::new(values, 0)
    }

    pub fn empty() -> Self {
        Self {
            offset: 0,
            values: Vec::new(),
            separation: f64::INFINITY,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Smallest gap (∞ below two points).
    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn max(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Positive elements.
    pub fn positive_part(&self) -> RealSequence {
        let v: Vec<f64> = self.values.iter().copied().filter(|&x| x > 0.0).collect();
        Self::new(v, 0).expect("subsequence of a valid sequence")
    }

    /// Absolute values of the negative elements, increasing.
    pub fn negative_part_reflected(&self) -> RealSequence {
        let v: Vec<f64> = self
            .values
            .iter()
            .rev()
            .copied()
            .filter(|&x| x < 0.0)
            .map(|x| -x)
            .collect();
        Self::new(v, 0).expect("subsequence of a valid sequence")
    }

    /// Elements with |x| > tol.
    pub fn without_zero(&self, tol: f64) -> RealSequence {
        let v: Vec<f64> = self
            .values
            .iter()
            .copied()
            .filter(|x| x.abs() > tol)
            .collect();
        Self::new(v, self.offset).expect("subsequence of a valid sequence")
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// #{x ∈ s : 0 ≤ x ≤ r}
    pub fn count_up_to(&self, r: f64) -> usize {
        self.values.iter().filter(|&&x| x >= 0.0 && x <= r).count()
    }
}

/// Λ_{A,B} = (A × {0}) ∪ ({0} × B).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossSpec {
    #[serde(rename = "A")]
    pub a: RealSequence,
    #[serde(rename = "B")]
    pub b: RealSequence,
}

impl CrossSpec {
    pub fn new(a: RealSequence, b: RealSequence) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return invalid("cross sequences must be nonempty");
        }
        Ok(Self { a, b })
    }

    /// Points of the cross as (ξ₁, ξ₂) pairs.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.a
            .values()
            .iter()
            .map(|&x| (x, 0.0))
            .chain(self.b.values().iter().map(|&y| (0.0, y)))
            .collect()
    }
}

/// Index window for lattice crosses.
pub const DEFAULT_WINDOW: (i64, i64) = (-64, 64);

/// A = {αn + shift}, B = {βn} for n in the window.
pub fn make_cross(alpha: f64, beta: f64, shift: f64) -> Result<CrossSpec> {
    make_cross_window(alpha, beta, shift, DEFAULT_WINDOW)
}

pub fn make_cross_window(
    alpha: f64,
    beta: f64,
    shift: f64,
    window: (i64, i64),
) -> Result<CrossSpec> {
    if !(alpha > 0.0) || !(beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
        return invalid(format!(
            "lattice steps must be positive, got α={alpha}, β={beta}"
        ));
    }
    if !shift.is_finite() || window.0 > window.1 {
        return invalid("bad shift or window");
    }
    let idx = window.0..=window.1;
    let a = RealSequence::new(
        idx.clone().map(|n| alpha * n as f64 + shift).collect(),
        window.0,
    )?;
    let b = RealSequence::new(idx.map(|n| beta * n as f64).collect(), window.0)?;
    CrossSpec::new(a, b)
}

/// Inline "alpha:beta:shift" (shift optional).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSpec {
    pub alpha: f64,
    pub beta: f64,
    pub shift: f64,
}

impl FromStr for LatticeSpec {
    type Err = HupError;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(2..=3).contains(&parts.len()) {
            return invalid(format!("expected alpha:beta[:shift], got {s:?}"));
        }
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| HupError::InvalidInput(format!("bad number {p:?}")))
        };
        Ok(Self {
            alpha: num(parts[0])?,
            beta: num(parts[1])?,
            shift: if parts.len() == 3 {
                num(parts[2])?
            } else {
                0.0
            },
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapStats {
    pub inf: f64,
    pub sup: f64,
    pub liminf_tail: f64,
    pub limsup_tail: f64,
    /// Tail statistics drift between the outer and inner halves of the tail.
    pub non_stationary: bool,
}

/// Gap extremes overall and over the outer 25% of gaps at each end.
pub fn gap_stats(s: &RealSequence) -> Result<GapStats> {
    if s.len() < 3 {
        return invalid("gap_stats needs at least 3 points");
    }
    let gaps = s.gaps();
    let m = gaps.len();
    let q = (m / 4).max(1);
    let tail: Vec<f64> = gaps[..q].iter().chain(&gaps[m - q..]).copied().collect();
    let fold = |v: &[f64]| {
        v.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &g| {
                (lo.min(g), hi.max(g))
            })
    };
    let (inf, sup) = fold(&gaps);
    let (liminf_tail, limsup_tail) = fold(&tail);
    let e = (q / 2).max(1);
    let outer: Vec<f64> = gaps[..e].iter().chain(&gaps[m - e..]).copied().collect();
    let inner: Vec<f64> = gaps[e.min(q - 1)..q]
        .iter()
        .chain(&gaps[m - q..m - e.min(q - 1)])
        .copied()
        .collect();
    let (olo, ohi) = fold(&outer);
    let (ilo, ihi) = fold(&inner);
    let drift = |a: f64, b: f64| (a - b).abs() > 0.05 * a.abs().max(b.abs());
    let non_stationary = drift(ohi, ihi) || drift(olo, ilo);
    if non_stationary {
        warn!("gap_stats: tail gaps drift across the window (outer [{olo}, {ohi}] vs inner [{ilo}, {ihi}])");
    }
    Ok(GapStats {
        inf,
        sup,
        liminf_tail,
        limsup_tail,
        non_stationary,
    })
}

/// A superset sequence with a list of the inserted points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothExpansion {
    pub sequence: RealSequence,
    pub inserted: Vec<f64>,
    pub density: f64,
    pub min_gap: f64,
}

impl SmoothExpansion {
    pub fn inserted_fraction(&self) -> f64 {
        self.inserted.len() as f64 / self.sequence.len().max(1) as f64
    }
}

/// Greedy 1-smooth superset of a positive sequence with counting function
/// close to D·r: scanning upward, a point is inserted at the leftmost
/// admissible slot whenever the running count falls below ⌊D·r⌋.
pub fn expand_to_smooth(s: &RealSequence, density: f64) -> Result<SmoothExpansion> {
    if s.is_empty() {
        return invalid("expand_to_smooth needs a nonempty sequence");
    }
    if s.values()[0] <= 0.0 {
        return invalid("expand_to_smooth expects a sequence in (0, ∞)");
    }
    if !(density > 0.0) {
        return invalid("density must be positive");
    }
    let sigma = if s.len() >= 3 {
        gap_stats(s)?.liminf_tail
    } else {
        s.separation()
    };
    if density * sigma < 1.0 - 1e-12 {
        return Err(HupError::Infeasible(format!(
            "density {density} is below 1/σ = {} for tail gap σ = {sigma}",
            1.0 / sigma
        )));
    }
    let c = s.values();
    let max = c[c.len() - 1];
    if density * max < c.len() as f64 {
        return Err(HupError::Infeasible(format!(
            "density {density} too small for {} points up to {max}",
            c.len()
        )));
    }
    let min_gap = (0.5 / density).min(0.5 * s.separation());
    let mut out: Vec<f64> = Vec::with_capacity(2 * c.len());
    let mut inserted = Vec::new();
    let mut ci = 0;
    while ci < c.len() {
        let required = (out.len() + 1) as f64 / density;
        let next = c[ci];
        if next <= required {
            out.push(next);
            ci += 1;
            continue;
        }
        let last = out.last().copied().unwrap_or(0.0);
        let x = required.max(last + min_gap);
        if x <= next - min_gap {
            out.push(x);
            inserted.push(x);
        } else {
            out.push(next);
            ci += 1;
        }
    }
    if inserted.is_empty() {
        let x = out[out.len() - 1] + 1.0 / density;
        out.push(x);
        inserted.push(x);
    }
    Ok(SmoothExpansion {
        sequence: RealSequence::new(out, 0)?,
        inserted,
        density,
        min_gap,
    })
}

/// Continues a positive sequence beyond its last point with regular
/// spacing 1/density up to `until`.
pub fn continue_regularly(s: &RealSequence, density: f64, until: f64) -> Result<RealSequence> {
    let mut v = s.values().to_vec();
    let mut x = v.last().copied().unwrap_or(0.0);
    loop {
        x += 1.0 / density;
        if x > until {
            break;
        }
        v.push(x);
    }
    RealSequence::new(v, s.offset())
}

/// (√a for a > 0, √(−a) for a < 0), each sorted.
pub fn sqrt_lift(a: &RealSequence) -> Result<(RealSequence, RealSequence)> {
    if a.values().iter().any(|&x| x == 0.0) {
        return invalid("sqrt_lift: sequence contains 0");
    }
    let pos = a
        .values()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|x| x.sqrt())
        .collect();
    let neg = a
        .values()
        .iter()
        .filter(|&&x| x < 0.0)
        .map(|x| (-x).sqrt())
        .collect();
    Ok((
        RealSequence::from_unsorted(pos)?,
        RealSequence::from_unsorted(neg)?,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SmoothnessReport {
    /// largest d with r_{j+1} − r_j ≥ d(1 + r_j)^{1−p}
    pub d: f64,
    /// sup |#(s ∩ [0, r]) − density·r^p| over the window
    pub discrepancy: f64,
    pub smooth: bool,
}

/// Counting discrepancy threshold for the finite-window smoothness verdict.
pub const DISCREPANCY_THRESHOLD: f64 = 3.0;

pub fn is_p_smooth(s: &RealSequence, p: f64, density: f64) -> SmoothnessReport {
    let v = s.values();
    let mut d = f64::INFINITY;
    for w in v.windows(2) {
        d = d.min((w[1] - w[0]) / (1.0 + w[0]).powf(1.0 - p));
    }
    let mut discrepancy = 0.0f64;
    for (j, &x) in v.iter().enumerate() {
        let expected = density * x.max(0.0).powf(p);
        discrepancy = discrepancy
            .max((j as f64 - expected).abs())
            .max((j as f64 + 1.0 - expected).abs());
    }
    let d = if d.is_finite() { d } else { 0.0 };
    SmoothnessReport {
        d,
        discrepancy,
        smooth: d > 0.0 && discrepancy <= DISCREPANCY_THRESHOLD,
    }
}

/// #(s ∩ [0, r_max]) / r_max^p.
pub fn density_order_p(s: &RealSequence, p: f64, r_max: f64) -> Result<f64> {
    if !(r_max > 0.0) {
        return invalid("r_max must be positive");
    }
    Ok(s.count_up_to(r_max) as f64 / r_max.powf(p))
}

/// Zeros on the four rays arg z = 0, π (moduli z1) and ±π/2 (moduli z2),
/// mirrored through the origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroRaySet {
    pub z1_plus: Vec<f64>,
    pub z1_minus: Vec<f64>,
    pub z2_plus: Vec<f64>,
    pub z2_minus: Vec<f64>,
    /// quadratic counting density of each real ray
    pub beta: f64,
    /// imaginary-ray moduli are √(2πk/m₂) with m₂ = 2γ
    pub gamma: f64,
    pub disk_c: f64,
    /// radius up to which the rays are filled
    pub radius: f64,
}

impl ZeroRaySet {
    /// All zeros as complex numbers.
    pub fn points(&self) -> Vec<num_complex::Complex64> {
        use num_complex::Complex64 as C;
        let mut v = Vec::new();
        v.extend(self.z1_plus.iter().map(|&r| C::new(r, 0.0)));
        v.extend(self.z1_minus.iter().map(|&r| C::new(-r, 0.0)));
        v.extend(self.z2_plus.iter().map(|&r| C::new(0.0, r)));
        v.extend(self.z2_minus.iter().map(|&r| C::new(0.0, -r)));
        v
    }

    /// Disks B(z, c/(1 + |z|)) pairwise disjoint.
    pub fn disks_disjoint(&self, c: f64) -> bool {
        let pts = self.points();
        let radius = |z: num_complex::Complex64| c / (1.0 + z.norm());
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if (pts[i] - pts[j]).norm() <= radius(pts[i]) + radius(pts[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// max over the rays of |#(Z ∩ [0, r]) − density·r²| on the filled range.
    pub fn counting_discrepancy(&self) -> (f64, f64) {
        let disc = |v: &[f64], dens: f64| {
            v.iter().enumerate().fold(0.0f64, |m, (j, &r)| {
                let e = dens * r * r;
                m.max((j as f64 - e).abs()).max((j as f64 + 1.0 - e).abs())
            })
        };
        (
            disc(&self.z1_plus, self.beta),
            disc(&self.z2_plus, self.gamma / PI),
        )
    }
}

/// Real rays from Ã (filled to `radius` at the measured quadratic density),
/// imaginary rays at √(πk/γ), disk constant halved until disks separate.
pub fn build_k_regular(
    tilde: &RealSequence,
    gamma: f64,
    disk_c: f64,
    radius: f64,
) -> Result<ZeroRaySet> {
    if tilde.is_empty() {
        return invalid("build_k_regular: empty sequence");
    }
    if !(gamma > 0.0) || !(disk_c > 0.0) {
        return invalid("gamma and disk_c must be positive");
    }
    let v = tilde.values();
    if v[0] <= 0.0 {
        return invalid("build_k_regular expects positive moduli");
    }
    let last = v[v.len() - 1];
    let density = if v.len() >= 2 {
        density_order_p(tilde, 2.0, last)?
    } else {
        1.0 / (last * last)
    };
    let report = is_p_smooth(tilde, 2.0, density);
    if !report.smooth {
        return Err(HupError::Construction(format!(
            "sequence is not 2-smooth (d = {:.3e}, discrepancy = {:.3})",
            report.d, report.discrepancy
        )));
    }
    // infill beyond the window: t = r² continues with spacing 1/density
    let mut z1 = v.to_vec();
    let mut t = last * last;
    loop {
        t += 1.0 / density;
        if t.sqrt() > radius {
            break;
        }
        z1.push(t.sqrt());
    }
    let step = PI / gamma;
    let z2: Vec<f64> = (1..)
        .map(|k| (k as f64 * step).sqrt())
        .take_while(|&r| r <= radius.max(last))
        .collect();
    let mut set = ZeroRaySet {
        z1_minus: z1.clone(),
        z1_plus: z1,
        z2_minus: z2.clone(),
        z2_plus: z2,
        beta: density,
        gamma,
        disk_c,
        radius,
    };
    let mut c = disk_c;
    for _ in 0..=20 {
        if set.disks_disjoint(c) {
            set.disk_c = c;
            return Ok(set);
        }
        c *= 0.5;
    }
    Err(HupError::Construction(
        "zero disks overlap after 20 halvings".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: Vec<f64>) -> RealSequence {
        RealSequence::new(v, 0).unwrap()
    }

    #[test]
    fn cross_examples() {
        let c = make_cross(1.0, 1.5, 0.3).unwrap();
        assert!((c.a.values()[63] - -0.7).abs() < 1e-12);
        assert!((c.a.values()[64] - 0.3).abs() < 1e-12);
        assert!((c.b.values()[63] + 1.5).abs() < 1e-12);
        let z = make_cross(1.0, 1.0, 0.0).unwrap();
        assert!(z.a.values().iter().all(|x| x.fract() == 0.0));
        let s = gap_stats(&make_cross(0.5, 2.0, 0.0).unwrap().a).unwrap();
        assert_eq!(
            (s.inf, s.sup, s.liminf_tail, s.limsup_tail),
            (0.5, 0.5, 0.5, 0.5)
        );
        assert!(make_cross(0.0, 1.0, 0.0).is_err());
        assert!(make_cross(1.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn gap_examples() {
        let s = gap_stats(&seq((-10..=10).map(|n| n as f64).collect())).unwrap();
        assert_eq!(
            (s.inf, s.sup, s.liminf_tail, s.limsup_tail),
            (1.0, 1.0, 1.0, 1.0)
        );
        let w = gap_stats(&seq((-100..=100)
            .map(|n| n as f64 + 0.1 * (n as f64).sin())
            .collect()))
        .unwrap();
        assert!(w.inf < 1.0 && w.sup > 1.0);
        assert!(w.liminf_tail >= 0.9 && w.limsup_tail <= 1.1);
        let p = |m: i64| {
            seq((-m..=m)
                .map(|n| (n as f64).signum() * (n.abs() as f64).powf(1.2))
                .collect())
        };
        let (s1, s2) = (gap_stats(&p(50)).unwrap(), gap_stats(&p(200)).unwrap());
        assert!(s2.limsup_tail > s1.limsup_tail);
        assert!(s1.non_stationary && s2.non_stationary);
        assert!(gap_stats(&seq(vec![1.0, 2.0])).is_err());
    }

    #[test]
    fn duplicate_rejected() {
        assert!(RealSequence::new(vec![1.0, 1.0, 2.0], 0).is_err());
    }

    #[test]
    fn expansion_examples() {
        let c = seq((1..=48).map(|n| 1.5 * n as f64).collect());
        let e = expand_to_smooth(&c, 0.8).unwrap();
        let r = is_p_smooth(&e.sequence, 1.0, 0.8);
        assert!(r.discrepancy <= 2.0, "{r:?}");
        assert!(e.sequence.separation() >= 0.625 - 1e-12);
        assert!(c.values().iter().all(|x| e.sequence.values().contains(x)));
        assert!(!e.inserted.is_empty());

        let dense = seq((1..=40).map(|n| n as f64 / 0.8).collect());
        let e = expand_to_smooth(&dense, 0.8).unwrap();
        assert_eq!(e.inserted.len(), 1);
        assert!(e.inserted[0] > 50.0);

        let sq = seq((1..=12).map(|n| (n * n) as f64).collect());
        let e = expand_to_smooth(&sq, 0.9).unwrap();
        assert!(e.inserted.len() > 8 * 12);
        assert!(is_p_smooth(&e.sequence, 1.0, 0.9).smooth);

        let z = seq((1..=40).map(|n| n as f64).collect());
        assert!(matches!(
            expand_to_smooth(&z, 0.9),
            Err(HupError::Infeasible(_))
        ));
        assert!(e.inserted_fraction() > 0.5);
    }

    #[test]
    fn sqrt_lift_examples() {
        let (p, n) = sqrt_lift(&seq(vec![1.0, 4.0, 9.0])).unwrap();
        assert_eq!(p.values(), &[1.0, 2.0, 3.0]);
        assert!(n.is_empty());
        let (p, n) = sqrt_lift(&seq(vec![-4.0, -1.0, 1.0, 4.0])).unwrap();
        assert_eq!(p.values(), &[1.0, 2.0]);
        assert_eq!(n.values(), &[1.0, 2.0]);
        assert!(sqrt_lift(&seq(vec![-1.0, 0.0, 1.0])).is_err());
        let a = seq((1..=40).map(|n| 1.5 * n as f64).collect());
        let (p, _) = sqrt_lift(&a).unwrap();
        for (k, g) in p.gaps().iter().enumerate() {
            let x = 1.5 * (k + 1) as f64;
            assert!((g - ((x + 1.5).sqrt() - x.sqrt())).abs() < 1e-14);
        }
        assert!(is_p_smooth(&p, 2.0, 1.0 / 1.5).d > 0.0);
    }

    #[test]
    fn smoothness_examples() {
        let r = is_p_smooth(
            &seq((1..=400).map(|n| (n as f64).sqrt()).collect()),
            2.0,
            1.0,
        );
        assert!(r.smooth && r.discrepancy <= 1.0 + 1e-9, "{r:?}");
        let r = is_p_smooth(&seq((1..=100).map(|n| n as f64).collect()), 1.0, 1.0);
        assert!(r.smooth && (r.d - 1.0).abs() < 1e-12);
        for dens in [1e-6, 0.01, 1.0] {
            assert!(!is_p_smooth(&seq((1..=20).map(|n| 2f64.powi(n)).collect()), 1.0, dens).smooth);
        }
    }

    #[test]
    fn density_examples() {
        let s = seq((1..=100).map(|n| n as f64).collect());
        assert_eq!(density_order_p(&s, 1.0, 100.0).unwrap(), 1.0);
        let s = seq((1..=500).map(|n| (n as f64).sqrt()).collect());
        assert!((density_order_p(&s, 2.0, 20.0).unwrap() - 1.0).abs() < 0.01);
        let s = seq((1..=100).map(|n| 1.5 * n as f64).collect());
        assert!((density_order_p(&s, 1.0, 60.0).unwrap() - 2.0 / 3.0).abs() < 0.02);
    }

    #[test]
    fn k_regular_examples() {
        let (tilde, _) =
            sqrt_lift(&make_cross(1.5, 1.5, 0.0).unwrap().a.without_zero(0.0)).unwrap();
        let z = build_k_regular(&tilde, PI / 1.5, 0.5, 3.0 * tilde.max().unwrap()).unwrap();
        assert!(z.disks_disjoint(z.disk_c));
        let (d1, d2) = z.counting_discrepancy();
        assert!(
            d1 <= DISCREPANCY_THRESHOLD && d2 <= DISCREPANCY_THRESHOLD,
            "{d1} {d2}"
        );

        let n = seq((1..=30).map(|n| n as f64).collect());
        let z = build_k_regular(&n, PI / 2.0, 0.5, 5.0);
        // {n} has linear, not quadratic, counting: rejected as not 2-smooth
        assert!(z.is_err());
        let sq = seq((1..=30).map(|n| (n as f64).sqrt()).collect());
        let z = build_k_regular(&sq, PI / 2.0, 0.5, 5.0).unwrap();
        for (k, r) in z.z2_plus.iter().enumerate() {
            assert!((r - (2.0 * (k + 1) as f64).sqrt()).abs() < 1e-14);
        }
        assert!(build_k_regular(&RealSequence::empty(), 1.0, 0.5, 5.0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = make_cross_window(1.0, 1.5, 0.3, (-3, 3)).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"A\"") && s.contains("\"offset\":-3"));
        let back: CrossSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert!(
            serde_json::from_str::<RealSequence>(r#"{"offset":0,"values":[2.0,1.0]}"#).is_err()
        );
        let l: LatticeSpec = "1.2:0.8:0.25".parse().unwrap();
        assert_eq!((l.alpha, l.beta, l.shift), (1.2, 0.8, 0.25));
        assert!("1.2".parse::<LatticeSpec>().is_err());
    }
}
