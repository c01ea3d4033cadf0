//! Grunert's quartic in `v = s3/s1` and its real roots.
//!
//! Roots are isolated on `[-1, 1]` for the polynomial itself and for its
//! reversal (`w = 1/v`), so every bracketing interval is bounded and large
//! roots near the toroid pair `T_∠A ∪ T_{π−∠A}` keep full relative accuracy.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{ControlTriangle, ViewAngles};

/// `|A4| <= DEGREE_DROP_REL * max|Ai|` is treated as a vanished leading term.
pub const DEGREE_DROP_REL: f64 = 1e-14;

/// Default relative clustering tolerance for repeated roots.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

/// A critical point whose value is this small relative to the magnitude of
/// the polynomial's terms is a touching (even multiplicity) root.
const TANGENT_REL: f64 = 1e-14;

/// Roots with `|v| <= SPLIT` come from the direct search, the rest from the
/// reversed one.
const SPLIT: f64 = 1.005;
const DIRECT_REACH: f64 = 1.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuarticError {
    #[error("leading coefficient {a4:e} vanishes relative to max coefficient {max:e}")]
    DegreeDrop { a4: f64, max: f64 },
    #[error("clustering tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("non-finite coefficient")]
    NonFinite,
}

/// `A4 v^4 + A3 v^3 + A2 v^2 + A1 v + A0` together with the data it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrunertQuartic {
    /// `[A4, A3, A2, A1, A0]`.
    pub coeffs: [f64; 5],
    pub source_triangle: ControlTriangle,
    pub source_angles: ViewAngles,
}

impl GrunertQuartic {
    pub fn a4(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn a0(&self) -> f64 {
        self.coeffs[4]
    }

    pub fn max_coeff(&self) -> f64 {
        max_abs(&self.coeffs)
    }

    pub fn eval(&self, v: f64) -> f64 {
        horner(&self.coeffs, v)
    }

    pub fn real_roots(&self, tol_cluster: f64) -> Result<RootSet, QuarticError> {
        grunert_real_roots(self, tol_cluster)
    }
}

/// Coefficients of Grunert's quartic (Haralick et al.'s arrangement).
pub fn grunert_coefficients(tri: &ControlTriangle, ang: &ViewAngles) -> GrunertQuartic {
    let (a2, b2, c2) = (tri.a * tri.a, tri.b * tri.b, tri.c * tri.c);
    let (ca, cb, cg) = (ang.alpha.cos(), ang.beta.cos(), ang.gamma.cos());
    let a_minus_c = (a2 - c2) / b2;
    let a_plus_c = (a2 + c2) / b2;
    let b_minus_c = (b2 - c2) / b2;
    let b_minus_a = (b2 - a2) / b2;

    // A4 and A0 in their factored forms: these carry the sign law exactly.
    let cos_angle_a = tri.angle_a.cos();
    let cos_angle_c = tri.angle_c.cos();
    let a4 = 4.0 * c2 / b2 * (cos_angle_a - ca) * (cos_angle_a + ca);
    let a0 = 4.0 * a2 / b2 * (cos_angle_c - cg) * (cos_angle_c + cg);

    let a3 = 4.0
        * (a_minus_c * (1.0 - a_minus_c) * cb - (1.0 - a_plus_c) * ca * cg + 2.0 * c2 / b2 * ca * ca * cb);
    let a2c = 2.0
        * (a_minus_c * a_minus_c - 1.0 + 2.0 * a_minus_c * a_minus_c * cb * cb + 2.0 * b_minus_c * ca * ca
            - 4.0 * a_plus_c * ca * cb * cg
            + 2.0 * b_minus_a * cg * cg);
    let a1 = 4.0
        * (-a_minus_c * (1.0 + a_minus_c) * cb + 2.0 * a2 / b2 * cg * cg * cb - (1.0 - a_plus_c) * ca * cg);

    GrunertQuartic {
        coeffs: [a4, a3, a2c, a1, a0],
        source_triangle: *tri,
        source_angles: *ang,
    }
}

/// Taylor coefficients of Grunert's quartic at `v = 1`, `[B4, B3, B2, B1, B0]`
/// in `w = v - 1`.
///
/// They are built from `h = sin^2(θ/2)` rather than from cosines, so they keep
/// their relative accuracy when the viewing angles are small. In that regime
/// the roots cluster around `v = 1`, `B2` and `B3` are of order `h`, and `B1`
/// and `B0` of order `h^2`.
pub fn shifted_grunert_coefficients(tri: &ControlTriangle, ang: &ViewAngles) -> [f64; 5] {
    shifted_with_magnitudes(tri, ang).0
}

/// Sum and absolute sum of a coefficient's terms.
fn sum_terms(terms: &[f64]) -> (f64, f64) {
    (terms.iter().sum(), terms.iter().map(|t| t.abs()).sum())
}

/// Shifted coefficients and, for each, the absolute sum of the terms it was
/// computed from; rounding noise in a coefficient scales with the latter.
fn shifted_with_magnitudes(tri: &ControlTriangle, ang: &ViewAngles) -> ([f64; 5], [f64; 5]) {
    let b2 = tri.b * tri.b;
    let ra = tri.a * tri.a / b2;
    let rc = tri.c * tri.c / b2;
    let half_sin_sq = |t: f64| {
        let s = (0.5 * t).sin();
        s * s
    };
    let (ha, hb, hg) = (half_sin_sq(ang.alpha), half_sin_sq(ang.beta), half_sin_sq(ang.gamma));
    let d = ra - rc;
    let e = ra + rc;

    let cos_angle_a = tri.angle_a.cos();
    let ca = ang.alpha.cos();
    let b4 = 4.0 * rc * (cos_angle_a - ca) * (cos_angle_a + ca);

    let (b3, m3) = sum_terms(&[
        -8.0 * (e - 1.0) * hg,
        8.0 * (d * d - e) * hb,
        -8.0 * (ra - 3.0 * rc - 1.0) * ha,
        16.0 * (e - 1.0) * ha * hg,
        64.0 * rc * ha * hb,
        -32.0 * rc * ha * ha,
        -64.0 * rc * ha * ha * hb,
    ]);
    let (b2c, m2) = sum_terms(&[
        8.0 * (d + 1.0) * hg,
        -16.0 * (ra - 1.0) * hg * hg,
        8.0 * (d * d - e) * hb,
        -32.0 * e * hb * hg,
        16.0 * d * d * hb * hb,
        -8.0 * (d - 1.0) * ha,
        16.0 * (e - 3.0) * ha * hg,
        -32.0 * (ra - 5.0 * rc) * ha * hb,
        64.0 * e * ha * hb * hg,
        -16.0 * (rc - 1.0) * ha * ha,
        -192.0 * rc * ha * ha * hb,
    ]);
    let (b1, m1) = sum_terms(&[
        32.0 * hg * hg,
        -64.0 * rc * hb * hg,
        -64.0 * ra * hb * hg * hg,
        32.0 * d * d * hb * hb,
        -64.0 * ha * hg,
        -64.0 * (ra - 2.0 * rc) * ha * hb,
        128.0 * e * ha * hb * hg,
        32.0 * ha * ha,
        -192.0 * rc * ha * ha * hb,
    ]);
    let (b0, m0) = sum_terms(&[
        16.0 * hg * hg,
        32.0 * d * hb * hg,
        -64.0 * ra * hb * hg * hg,
        16.0 * d * d * hb * hb,
        -32.0 * ha * hg,
        -32.0 * d * ha * hb,
        64.0 * e * ha * hb * hg,
        16.0 * ha * ha,
        -64.0 * rc * ha * ha * hb,
    ]);

    ([b4, b3, b2c, b1, b0], [b4.abs(), m3, m2, m1, m0])
}

/// Real roots of Grunert's quartic.
///
/// When every root lies within one unit of `v = 1` they are found in the
/// shifted variable `w = v - 1`, rescaled so that the root bound becomes
/// one; clustered roots then stay apart at the working tolerance. Otherwise
/// the unshifted coefficients are used. The leading coefficient is checked on
/// the unshifted quartic.
pub fn grunert_real_roots(q: &GrunertQuartic, tol_cluster: f64) -> Result<RootSet, QuarticError> {
    let max = q.max_coeff();
    if q.coeffs.iter().all(|c| c.is_finite()) && q.a4().abs() <= DEGREE_DROP_REL * max {
        return Err(QuarticError::DegreeDrop { a4: q.a4(), max });
    }
    let (b, mags) = shifted_with_magnitudes(&q.source_triangle, &q.source_angles);
    let scale = root_bound(&b);
    if scale >= 1.0 {
        // roots spread out: the unshifted coefficients carry less cancellation
        return quartic_real_roots(&q.coeffs, tol_cluster);
    }
    let powers = [scale.powi(4), scale.powi(3), scale * scale, scale, 1.0];
    let scaled: [f64; 5] = std::array::from_fn(|i| b[i] * powers[i]);
    let scaled_mags: [f64; 5] = std::array::from_fn(|i| mags[i] * powers[i]);
    let mut rs = real_roots_impl(&scaled, &scaled_mags, tol_cluster)?;
    for r in &mut rs.roots {
        r.value = 1.0 + scale * r.value;
    }
    Ok(rs)
}

/// Fujiwara's bound on the root moduli, rounded up to a power of two.
fn root_bound(c: &[f64; 5]) -> f64 {
    let lead = c[0].abs();
    let bound = 2.0
        * (c[1].abs() / lead)
            .max((c[2].abs() / lead).sqrt())
            .max((c[3].abs() / lead).cbrt())
            .max((c[4].abs() / (2.0 * lead)).powf(0.25));
    if bound > 0.0 && bound.is_finite() {
        2f64.powi(bound.log2().ceil() as i32)
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: u32,
}

/// Real roots in ascending order plus the number of complex-conjugate pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct RootSet {
    pub roots: Vec<RealRoot>,
    pub complex_pair_count: u32,
}

impl RootSet {
    /// Real roots counted with multiplicity.
    pub fn real_count(&self) -> u32 {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn positive_count(&self) -> u32 {
        self.roots.iter().filter(|r| r.value > 0.0).map(|r| r.multiplicity).sum()
    }
}

/// Real roots of `c[0] v^4 + ... + c[4]`.
pub fn quartic_real_roots(coeffs: &[f64; 5], tol_cluster: f64) -> Result<RootSet, QuarticError> {
    real_roots_impl(coeffs, &coeffs.map(f64::abs), tol_cluster)
}

/// `mags[i]` bounds the magnitude of the terms behind `coeffs[i]` and sets
/// the noise level of the tangency test.
fn real_roots_impl(coeffs: &[f64; 5], mags: &[f64; 5], tol_cluster: f64) -> Result<RootSet, QuarticError> {
    if !(tol_cluster > 0.0) {
        return Err(QuarticError::InvalidTolerance(tol_cluster));
    }
    if !coeffs.iter().all(|c| c.is_finite()) {
        return Err(QuarticError::NonFinite);
    }
    let max = max_abs(coeffs);
    if coeffs[0].abs() <= DEGREE_DROP_REL * max {
        return Err(QuarticError::DegreeDrop { a4: coeffs[0], max });
    }

    let mut reversed = *coeffs;
    reversed.reverse();
    let mut reversed_mags = *mags;
    reversed_mags.reverse();

    // The direct search reaches a little past |v| = 1 so that touching roots
    // at |v| = 1 are interior to one of the two searches.
    let mut cands: Vec<Candidate> = isolate(coeffs, mags, -DIRECT_REACH, DIRECT_REACH)
        .into_iter()
        .filter(|&(x, _)| x.abs() <= SPLIT)
        .map(|(x, mult)| Candidate {
            v: x,
            mult,
            reversed: false,
        })
        .collect();
    let direct_count = cands.len();
    for (w, mult) in isolate(&reversed, &reversed_mags, -1.0, 1.0) {
        if w == 0.0 || (1.0 / w).abs() <= SPLIT {
            continue;
        }
        let v = 1.0 / w;
        let dup = cands[..direct_count]
            .iter()
            .any(|c| (c.v - v).abs() <= tol_cluster * v.abs());
        if !dup {
            cands.push(Candidate { v, mult, reversed: true });
        }
    }
    cands.sort_by(|a, b| a.v.total_cmp(&b.v));

    let mut roots: Vec<RealRoot> = Vec::new();
    let mut group: Vec<Candidate> = Vec::new();
    let flush = |group: &mut Vec<Candidate>, roots: &mut Vec<RealRoot>| {
        if group.is_empty() {
            return;
        }
        let mult: u32 = group.iter().map(|c| c.mult).sum();
        let value = if group.len() == 1 {
            polish(coeffs, &reversed, group[0])
        } else {
            let w: f64 = group.iter().map(|c| c.mult as f64).sum();
            group.iter().map(|c| c.v * c.mult as f64).sum::<f64>() / w
        };
        roots.push(RealRoot {
            value,
            multiplicity: mult,
        });
        group.clear();
    };
    for cand in cands {
        if let Some(last) = group.last() {
            if (cand.v - last.v).abs() > tol_cluster * last.v.abs().max(cand.v.abs()).max(1.0) {
                flush(&mut group, &mut roots);
            }
        }
        group.push(cand);
    }
    flush(&mut group, &mut roots);

    let total: u32 = roots.iter().map(|r| r.multiplicity).sum();
    Ok(RootSet {
        roots,
        complex_pair_count: 4u32.saturating_sub(total) / 2,
    })
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    v: f64,
    mult: u32,
    reversed: bool,
}

fn max_abs(c: &[f64]) -> f64 {
    c.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Horner evaluation, coefficients in descending degree.
pub(crate) fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().fold(0.0, |acc, &k| acc * x + k)
}

/// `sum m_i |x|^i`, the scale against which a computed value is noise.
fn magnitude(mags: &[f64], x: f64) -> f64 {
    let ax = x.abs();
    mags.iter().fold(0.0, |acc, &k| acc * ax + k)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    let d = c.len() - 1;
    c[..d].iter().enumerate().map(|(i, &k)| k * (d - i) as f64).collect()
}

/// Real roots of `c` on `[lo, hi]` with multiplicity estimates.
///
/// The roots of the derivative split the interval into monotone pieces; each
/// piece holds at most one simple root, located by bisection. A critical point
/// where the polynomial vanishes to working precision is a touching root.
fn isolate(c: &[f64], mags: &[f64], lo: f64, hi: f64) -> Vec<(f64, u32)> {
    let start = c.iter().position(|&k| k != 0.0);
    let Some(start) = start else {
        return Vec::new();
    };
    let c = &c[start..];
    let mags = &mags[start..];
    match c.len() {
        1 => return Vec::new(),
        2 => {
            let x = -c[1] / c[0];
            return if (lo..=hi).contains(&x) { vec![(x, 1)] } else { Vec::new() };
        }
        _ => {}
    }

    let mut crit: Vec<f64> = isolate(&derivative(c), &derivative(mags), lo, hi).into_iter().map(|(x, _)| x).collect();
    crit.sort_by(f64::total_cmp);
    crit.dedup();

    // knots: lo, critical points, hi; a critical endpoint stays critical
    let mut knots: Vec<(f64, bool)> = Vec::with_capacity(crit.len() + 2);
    if crit.first() != Some(&lo) {
        knots.push((lo, false));
    }
    knots.extend(crit.iter().map(|&x| (x, true)));
    if crit.last() != Some(&hi) {
        knots.push((hi, false));
    }
    let values: Vec<f64> = knots
        .iter()
        .map(|&(x, is_crit)| {
            let f = horner(c, x);
            if is_crit && f.abs() <= TANGENT_REL * magnitude(mags, x) {
                0.0
            } else {
                f
            }
        })
        .collect();

    let mut out = Vec::new();
    for i in 0..knots.len() {
        let (x, is_crit) = knots[i];
        if values[i] == 0.0 {
            let mult = if is_crit {
                let left = values[..i].iter().rev().find(|f| **f != 0.0);
                let right = values[i + 1..].iter().find(|f| **f != 0.0);
                match (left, right) {
                    (Some(l), Some(r)) if l.signum() != r.signum() => 3,
                    _ => 2,
                }
            } else {
                1
            };
            out.push((x, mult));
        }
        if i + 1 < knots.len() {
            let (f0, f1) = (values[i], values[i + 1]);
            if f0 != 0.0 && f1 != 0.0 && f0.signum() != f1.signum() {
                out.push((bisect(c, x, knots[i + 1].0, f0), 1));
            }
        }
    }
    out
}

/// Bisection on a bracket where `c` is monotone, to floating-point resolution.
fn bisect(c: &[f64], mut x0: f64, mut x1: f64, f0: f64) -> f64 {
    let s0 = f0.signum();
    for _ in 0..200 {
        let mid = 0.5 * (x0 + x1);
        if mid <= x0 || mid >= x1 {
            break;
        }
        let fm = horner(c, mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == s0 {
            x0 = mid;
        } else {
            x1 = mid;
        }
    }
    let (f_lo, f_hi) = (horner(c, x0).abs(), horner(c, x1).abs());
    if f_lo <= f_hi {
        x0
    } else {
        x1
    }
}

/// Guarded Newton steps on a simple root, in whichever variable it was found.
fn polish(direct: &[f64; 5], reversed: &[f64; 5], cand: Candidate) -> f64 {
    if cand.mult != 1 {
        return cand.v;
    }
    let (poly, mut x) = if cand.reversed {
        (reversed, 1.0 / cand.v)
    } else {
        (direct, cand.v)
    };
    let dp = derivative(poly);
    let mut fx = horner(poly, x).abs();
    for _ in 0..3 {
        let d = horner(&dp, x);
        if d == 0.0 || fx == 0.0 {
            break;
        }
        let next = x - horner(poly, x) / d;
        let fn_ = horner(poly, next).abs();
        if !(fn_ < fx) {
            break;
        }
        x = next;
        fx = fn_;
    }
    if cand.reversed {
        1.0 / x
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{subtended_angles, triangle_from_sides, ControlTriangle, Vec3};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn from_roots(r: [f64; 4]) -> [f64; 5] {
        let mut c = vec![1.0];
        for root in r {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &k) in c.iter().enumerate() {
                next[i] += k;
                next[i + 1] -= k * root;
            }
            c = next;
        }
        [c[0], c[1], c[2], c[3], c[4]]
    }

    #[test]
    fn double_root_with_complex_pair() {
        let rs = quartic_real_roots(&[1.0, -2.0, 2.0, -2.0, 1.0], DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert_relative_eq!(rs.roots[0].value, 1.0, epsilon = 1e-7);
        assert_eq!(rs.roots[0].multiplicity, 2);
        assert_eq!(rs.complex_pair_count, 1);
    }

    #[test]
    fn four_simple_roots() {
        let rs = quartic_real_roots(&from_roots([1.0, 2.0, 3.0, 4.0]), DEFAULT_CLUSTER_TOL).unwrap();
        let vals: Vec<f64> = rs.roots.iter().map(|r| r.value).collect();
        assert_eq!(vals.len(), 4);
        for (v, e) in vals.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert_relative_eq!(*v, e, epsilon = 1e-12);
        }
        assert!(rs.roots.iter().all(|r| r.multiplicity == 1));
        assert_eq!(rs.complex_pair_count, 0);
    }

    #[test]
    fn wide_dynamic_range() {
        let rs = quartic_real_roots(&from_roots([-3e7, -1e-9, 0.5, 2e5]), DEFAULT_CLUSTER_TOL).unwrap();
        let vals: Vec<f64> = rs.roots.iter().map(|r| r.value).collect();
        assert_eq!(vals.len(), 4, "{vals:?}");
        for (v, e) in vals.iter().zip([-3e7, -1e-9, 0.5, 2e5]) {
            assert_relative_eq!(*v, e, max_relative = 1e-9);
        }
    }

    #[test]
    fn no_real_roots() {
        // (v^2 + 1)(v^2 + 4)
        let rs = quartic_real_roots(&[1.0, 0.0, 5.0, 0.0, 4.0], DEFAULT_CLUSTER_TOL).unwrap();
        assert!(rs.roots.is_empty());
        assert_eq!(rs.complex_pair_count, 2);
    }

    #[test]
    fn roots_at_unit_magnitude_not_duplicated() {
        let rs = quartic_real_roots(&from_roots([-1.0, 1.0, 3.0, -0.25]), DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(rs.real_count(), 4, "{rs:?}");
        assert_eq!(rs.roots.len(), 4);
    }

    #[test]
    fn degree_drop_and_bad_tolerance() {
        assert!(matches!(
            quartic_real_roots(&[1e-20, 1.0, 0.0, 0.0, -1.0], 1e-6),
            Err(QuarticError::DegreeDrop { .. })
        ));
        assert!(matches!(
            quartic_real_roots(&[1.0, 0.0, 0.0, 0.0, -1.0], 0.0),
            Err(QuarticError::InvalidTolerance(_))
        ));
    }

    #[test]
    fn equilateral_extreme_coefficients() {
        let tri = ControlTriangle::equilateral(1.0);
        let t = 0.625f64.acos();
        let q = grunert_coefficients(&tri, &ViewAngles::new(t, t, t).unwrap());
        assert_relative_eq!(q.a4(), -0.5625, epsilon = 1e-14);
        assert_relative_eq!(q.a0(), -0.5625, epsilon = 1e-14);
        assert!(q.eval(1.0).abs() < 1e-12);
    }

    #[test]
    fn leading_term_vanishes_on_toroid_pair() {
        let tri = triangle_from_sides(2.0, 3.0, 4.0).unwrap();
        let q = grunert_coefficients(&tri, &ViewAngles::new(tri.angle_a, 1.0, 1.2).unwrap());
        assert!(q.a4().abs() < 1e-15);
        let q = grunert_coefficients(&tri, &ViewAngles::new(PI - tri.angle_a, 1.0, 1.2).unwrap());
        assert!(q.a4().abs() < 1e-15);
    }

    /// Sylvester resultant in `u` of the two quadratics obtained by dividing
    /// out `s1`; it must be proportional to the quartic (factor `b^8`).
    fn resultant_oracle(tri: &ControlTriangle, ang: &ViewAngles, v: f64) -> f64 {
        let (a2, b2, c2) = (tri.a * tri.a, tri.b * tri.b, tri.c * tri.c);
        let (ca, cb, cg) = (ang.alpha.cos(), ang.beta.cos(), ang.gamma.cos());
        let k = 1.0 + v * v - 2.0 * v * cb;
        // b^2 (u^2 - 2 u cg + 1) - c^2 k
        let p = [b2, -2.0 * b2 * cg, b2 - c2 * k];
        // b^2 (u^2 - 2 u v ca + v^2) - a^2 k
        let q = [b2, -2.0 * b2 * v * ca, b2 * v * v - a2 * k];
        let m = nalgebra::Matrix4::new(
            p[0], p[1], p[2], 0.0, //
            0.0, p[0], p[1], p[2], //
            q[0], q[1], q[2], 0.0, //
            0.0, q[0], q[1], q[2],
        );
        m.determinant()
    }

    #[test]
    fn coefficients_match_resultant() {
        let tri = triangle_from_sides(2.3, 3.1, 1.7).unwrap();
        let ang = subtended_angles(&Vec3::new(0.4, 0.9, 1.3), &tri).unwrap();
        let q = grunert_coefficients(&tri, &ang);
        let b8 = tri.b.powi(8);
        for v in [-2.0, -0.7, 0.0, 0.3, 1.1, 2.5, 4.0] {
            let r = resultant_oracle(&tri, &ang, v);
            assert_relative_eq!(r, b8 * q.eval(v), max_relative = 1e-9, epsilon = 1e-9);
        }
    }

    #[test]
    fn ground_truth_ratio_is_a_root() {
        let tri = triangle_from_sides(1.0, 1.3, 0.8).unwrap();
        let o = Vec3::new(0.2, -0.4, 0.9);
        let ang = subtended_angles(&o, &tri).unwrap();
        let q = grunert_coefficients(&tri, &ang);
        let v = (o - tri.vertex_c()).norm() / o.norm();
        assert!(q.eval(v).abs() <= 1e-8 * q.max_coeff());
        let rs = q.real_roots(DEFAULT_CLUSTER_TOL).unwrap();
        assert!(rs.roots.iter().any(|r| (r.value - v).abs() < 1e-9));
    }

    #[test]
    fn near_degree_drop_keeps_large_root() {
        // Leading term far below the others: one root is about -A3/A4.
        let c = [1e-11, 1.0, -3.0, 0.5, 0.25];
        let rs = quartic_real_roots(&c, DEFAULT_CLUSTER_TOL).unwrap();
        let big = rs.roots.iter().map(|r| r.value).fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        assert_relative_eq!(big, -1e11, max_relative = 1e-6);
        for r in &rs.roots {
            assert!(horner(&c, r.value).abs() <= 1e-10 * r.value.abs().max(1.0).powi(4));
        }
    }
    #[test]
    fn shifted_coefficients_match_taylor_shift() {
        let tri = triangle_from_sides(2.3, 3.1, 1.7).unwrap();
        for o in [Vec3::new(0.4, 0.9, 1.3), Vec3::new(-2.0, 1.0, 0.4), Vec3::new(0.1, 0.2, 6.0)] {
            let ang = subtended_angles(&o, &tri).unwrap();
            let q = grunert_coefficients(&tri, &ang);
            let b = shifted_grunert_coefficients(&tri, &ang);
            let [a4, a3, a2, a1, a0] = q.coeffs;
            let taylor = [
                a4,
                4.0 * a4 + a3,
                6.0 * a4 + 3.0 * a3 + a2,
                4.0 * a4 + 3.0 * a3 + 2.0 * a2 + a1,
                a4 + a3 + a2 + a1 + a0,
            ];
            for (x, y) in b.iter().zip(taylor) {
                assert_relative_eq!(*x, y, epsilon = 1e-12 * q.max_coeff());
            }
        }
    }

    #[test]
    fn far_center_roots_stay_separated() {
        let tri = ControlTriangle::equilateral(1.0);
        let o = Vec3::new(20.0, -25.0, 18.0);
        let ang = subtended_angles(&o, &tri).unwrap();
        let rs = grunert_coefficients(&tri, &ang).real_roots(DEFAULT_CLUSTER_TOL).unwrap();
        let v = (o - tri.vertex_c()).norm() / o.norm();
        let near = rs.roots.iter().map(|r| (r.value - v).abs()).fold(f64::INFINITY, f64::min);
        assert!(near < 1e-10, "{rs:?} against {v}");
    }
    #[test]
    fn symmetric_view_keeps_double_root_at_one() {
        let tri = ControlTriangle::equilateral(1.0);
        for t in [0.3, 0.05, 0.9] {
            let q = grunert_coefficients(&tri, &ViewAngles::new(t, t, t).unwrap());
            let rs = q.real_roots(DEFAULT_CLUSTER_TOL).unwrap();
            assert_eq!(rs.real_count(), 4, "{t}: {rs:?}");
            let one = rs.roots.iter().find(|r| (r.value - 1.0).abs() < 1e-9).unwrap();
            assert_eq!(one.multiplicity, 2);
        }
    }
}
