//! Full P3P pipeline: quartic roots to depth triplets, solution/S-solution
//! classification, supplementary problems and optical-center recovery.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{
    classify_region, subtended_angles, ControlTriangle, GeomError, RegionReport, Vec3, Vertex, ViewAngles,
    DEFAULT_EPS_ANGLE,
};
use crate::quartic::{grunert_coefficients, GrunertQuartic, QuarticError, RootSet, DEFAULT_CLUSTER_TOL};

/// Below this `|v cos(alpha) - cos(gamma)|` the linear recovery of `u` is singular.
const BACKSUB_SINGULAR: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("optical center lies on the toroid pair over the side opposite {0}")]
    OnToroidPair(Vertex),
    #[error("the quartic has no real roots")]
    NoRealRoots,
    #[error("1 - 2 v cos(beta) + v^2 is not positive for v = {0}")]
    BackSubSingular(f64),
    #[error("no real triplet for root v = {0}")]
    NoRealTriplet(f64),
    #[error("best triplet has residual {0:e}, above tolerance")]
    ResidualTooLarge(f64),
    #[error("spheres around the control points do not meet")]
    NoIntersection,
    #[error("triplet is not a positive solution")]
    NotASolution,
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Quartic(#[from] QuarticError),
}

/// Which two angles a supplementary problem replaces by their supplements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SupplementedPair {
    /// `s3 < 0`.
    AlphaBeta,
    /// `s2 < 0`.
    AlphaGamma,
    /// `s1 < 0`.
    BetaGamma,
}

impl SupplementedPair {
    /// Index (0-based) of the triplet element that is negative for this pair.
    pub fn negative_index(self) -> usize {
        match self {
            SupplementedPair::BetaGamma => 0,
            SupplementedPair::AlphaGamma => 1,
            SupplementedPair::AlphaBeta => 2,
        }
    }

    pub fn from_negative_index(i: usize) -> Self {
        match i {
            0 => SupplementedPair::BetaGamma,
            1 => SupplementedPair::AlphaGamma,
            _ => SupplementedPair::AlphaBeta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TripletClass {
    Solution,
    SSolution(SupplementedPair),
    /// 1-based index of the element that vanished.
    DegenerateZero(u8),
}

impl TripletClass {
    pub fn name(&self) -> String {
        match self {
            TripletClass::Solution => "Solution".into(),
            TripletClass::SSolution(p) => format!("SSolution({p:?})"),
            TripletClass::DegenerateZero(i) => format!("DegenerateZero({i})"),
        }
    }
}

/// Signed depths `(s1, s2, s3) = (|OA|, |OB|, |OC|)` recovered from one root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthTriplet {
    pub s: [f64; 3],
    pub v: f64,
    pub u: f64,
    pub class: TripletClass,
    pub residual: f64,
    pub root_multiplicity: u32,
}

impl DepthTriplet {
    pub fn min_abs_element(&self) -> f64 {
        self.s.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()))
    }

    pub fn is_solution(&self) -> bool {
        self.class == TripletClass::Solution
    }

    pub fn is_s_solution(&self) -> bool {
        matches!(self.class, TripletClass::SSolution(_))
    }
}

/// Flip all signs when two or three elements are negative.
pub fn canonicalize_triplet(s: [f64; 3]) -> [f64; 3] {
    let negatives = s.iter().filter(|x| **x < 0.0).count();
    if negatives >= 2 {
        s.map(|x| -x)
    } else {
        s
    }
}

/// Class of a canonical triplet; `zero_tol` is an absolute length.
pub fn classify_triplet(s: &[f64; 3], zero_tol: f64) -> TripletClass {
    if let Some(i) = s.iter().position(|x| x.abs() <= zero_tol) {
        return TripletClass::DegenerateZero(i as u8 + 1);
    }
    match s.iter().position(|x| *x < 0.0) {
        None => TripletClass::Solution,
        Some(i) => TripletClass::SSolution(SupplementedPair::from_negative_index(i)),
    }
}

/// Zero tolerance tied to the triangle's mean side.
pub fn default_zero_tol(tri: &ControlTriangle) -> f64 {
    1e-9 * (tri.a + tri.b + tri.c) / 3.0
}

/// Largest normalized violation of the three law-of-cosines constraints.
pub fn triplet_residual(s: &[f64; 3], tri: &ControlTriangle, ang: &ViewAngles) -> f64 {
    constraint_values(s, tri, ang)
        .iter()
        .zip([tri.c, tri.b, tri.a])
        .map(|(f, d)| f.abs() / (1.0 + d * d))
        .fold(0.0, f64::max)
}

/// `s_i^2 + s_j^2 - 2 cos(θ) s_i s_j - d^2` for the gamma, beta and alpha
/// constraints, written as `(s_i - s_j)^2 + 4 sin^2(θ/2) s_i s_j - d^2` so
/// that small view angles keep their precision.
fn constraint_values(s: &[f64; 3], tri: &ControlTriangle, ang: &ViewAngles) -> [f64; 3] {
    let [s1, s2, s3] = *s;
    let f = |x: f64, y: f64, theta: f64, d: f64| {
        let h = (0.5 * theta).sin();
        (x - y) * (x - y) + 4.0 * h * h * x * y - d * d
    };
    [
        f(s1, s2, ang.gamma, tri.c),
        f(s1, s3, ang.beta, tri.b),
        f(s2, s3, ang.alpha, tri.a),
    ]
}

/// Newton steps on the three constraints, starting from a back-substituted
/// triplet. Steps that do not lower the residual, or that move the triplet
/// by more than `REFINE_MAX_MOVE` relative, are rejected so that a triplet
/// cannot drift to a different solution.
fn refine_triplet(s: [f64; 3], tri: &ControlTriangle, ang: &ViewAngles) -> [f64; 3] {
    let (cg, cb, ca) = (ang.gamma.cos(), ang.beta.cos(), ang.alpha.cos());
    let scale = s.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut cur = s;
    let mut res = triplet_residual(&cur, tri, ang);
    for _ in 0..4 {
        if res <= 1e-15 {
            break;
        }
        let [s1, s2, s3] = cur;
        let jac = Matrix3::new(
            2.0 * (s1 - cg * s2),
            2.0 * (s2 - cg * s1),
            0.0,
            2.0 * (s1 - cb * s3),
            0.0,
            2.0 * (s3 - cb * s1),
            0.0,
            2.0 * (s2 - ca * s3),
            2.0 * (s3 - ca * s2),
        );
        let Some(step) = jac.lu().solve(&Vector3::from(constraint_values(&cur, tri, ang))) else {
            break;
        };
        let next = [cur[0] - step[0], cur[1] - step[1], cur[2] - step[2]];
        let moved = next.iter().zip(&s).map(|(x, y)| (x - y).abs()).fold(0.0f64, f64::max);
        let next_res = triplet_residual(&next, tri, ang);
        if !(next_res < res) || moved > REFINE_MAX_MOVE * scale {
            break;
        }
        cur = next;
        res = next_res;
    }
    cur
}

/// Largest relative move accepted while refining a triplet.
const REFINE_MAX_MOVE: f64 = 1e-6;

/// Same angles with the two named ones replaced by their supplements.
pub fn supplementary_angles(ang: &ViewAngles, pair: SupplementedPair) -> ViewAngles {
    let mut out = *ang;
    match pair {
        SupplementedPair::AlphaBeta => {
            out.alpha = PI - ang.alpha;
            out.beta = PI - ang.beta;
        }
        SupplementedPair::AlphaGamma => {
            out.alpha = PI - ang.alpha;
            out.gamma = PI - ang.gamma;
        }
        SupplementedPair::BetaGamma => {
            out.beta = PI - ang.beta;
            out.gamma = PI - ang.gamma;
        }
    }
    out
}

/// Depth triplet for the root `v` with the positive-`s1` convention.
///
/// Where `v cos(alpha) = cos(gamma)` the ratio `u` is not determined by the
/// linear relation; the branch of the gamma constraint that best satisfies
/// the alpha constraint is returned, the larger `s2` on ties.
pub fn back_substitute(v: f64, tri: &ControlTriangle, ang: &ViewAngles) -> Result<DepthTriplet, SolveError> {
    let cands = branches(v, tri, ang, default_zero_tol(tri))?;
    let mut best = cands[0];
    for t in &cands[1..] {
        if t.residual < best.residual && best.residual > TIE_RESIDUAL {
            best = *t;
        }
    }
    Ok(best)
}

/// Every distinct triplet for the root `v` whose residual is at most `tol`.
///
/// Usually there is exactly one. A root where the linear relation for `u`
/// degenerates can carry two genuine triplets that differ only in `s2`.
pub fn back_substitute_all(
    v: f64,
    tri: &ControlTriangle,
    ang: &ViewAngles,
    zero_tol: f64,
    tol: f64,
) -> Result<Vec<DepthTriplet>, SolveError> {
    let mut cands = branches(v, tri, ang, zero_tol)?;
    // the linear branch coincides with one quadratic branch up to its
    // conditioning; keep the better of the two
    cands.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    let mut out: Vec<DepthTriplet> = Vec::new();
    for t in cands.into_iter().filter(|t| t.residual <= tol) {
        let scale = t.s.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let dup = out
            .iter()
            .any(|o| o.s.iter().zip(&t.s).all(|(x, y)| (x - y).abs() <= BRANCH_MERGE_REL * scale));
        if !dup {
            out.push(t);
        }
    }
    if out.is_empty() {
        let best = branches(v, tri, ang, zero_tol)?
            .into_iter()
            .fold(None::<DepthTriplet>, |b, t| match b {
                Some(b) if b.residual <= t.residual => Some(b),
                _ => Some(t),
            })
            .expect("at least one branch");
        return Err(SolveError::ResidualTooLarge(best.residual));
    }
    Ok(out)
}

const TIE_RESIDUAL: f64 = 1e-14;
/// Branch triplets closer than this (relative) are the same triplet.
const BRANCH_MERGE_REL: f64 = 1e-6;

/// Candidate triplets for `v`: the linear `u` when well conditioned, then both
/// roots of the gamma constraint in `s2`, larger first.
fn branches(v: f64, tri: &ControlTriangle, ang: &ViewAngles, zero_tol: f64) -> Result<Vec<DepthTriplet>, SolveError> {
    let (ca, cb, cg) = (ang.alpha.cos(), ang.beta.cos(), ang.gamma.cos());
    let k = 1.0 - 2.0 * v * cb + v * v;
    if !(k > 0.0) || !v.is_finite() {
        return Err(SolveError::BackSubSingular(v));
    }
    let s1 = tri.b / k.sqrt();
    let s3 = v * s1;
    let s1_sq = s1 * s1;
    let (a2, c2) = (tri.a * tri.a, tri.c * tri.c);
    let denom = v * ca - cg;

    let mut s2s = Vec::with_capacity(3);
    if denom.abs() > BACKSUB_SINGULAR {
        let u = (c2 - a2 - s1_sq * (1.0 - v * v)) / (2.0 * s1_sq * denom);
        s2s.push(u * s1);
    }
    // s2^2 - 2 cos(gamma) s1 s2 + s1^2 - c^2 = 0
    let disc = cg * cg * s1_sq - (s1_sq - c2);
    if disc >= 0.0 {
        let r = disc.sqrt();
        s2s.push(cg * s1 + r);
        s2s.push(cg * s1 - r);
    }
    if s2s.is_empty() {
        return Err(SolveError::NoRealTriplet(v));
    }

    Ok(s2s
        .into_iter()
        .map(|s2| {
            let raw = refine_triplet([s1, s2, s3], tri, ang);
            let s = canonicalize_triplet(raw);
            DepthTriplet {
                s,
                v,
                u: raw[1] / raw[0],
                class: classify_triplet(&s, zero_tol),
                residual: triplet_residual(&s, tri, ang),
                root_multiplicity: 1,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Relative root clustering tolerance.
    pub cluster_tol: f64,
    /// Accepted triplets satisfy the constraints to this normalized residual.
    pub residual_tol: f64,
    /// Zero tolerance for triplet elements, relative to the mean side.
    pub zero_tol_factor: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            cluster_tol: DEFAULT_CLUSTER_TOL,
            residual_tol: 1e-8,
            zero_tol_factor: 1e-9,
        }
    }
}

/// A root that did not yield an accepted triplet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootFailure {
    pub v: f64,
    pub multiplicity: u32,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub quartic: GrunertQuartic,
    pub root_set: RootSet,
    /// One entry per distinct real root, ascending in `v`.
    pub triplets: Vec<DepthTriplet>,
    pub failures: Vec<RootFailure>,
    pub region: Option<RegionReport>,
    /// The angle triple violates the trihedral inequalities.
    pub non_realizable: bool,
}

impl SolveReport {
    pub fn solutions(&self) -> impl Iterator<Item = &DepthTriplet> {
        self.triplets.iter().filter(|t| t.is_solution())
    }

    pub fn s_solutions(&self) -> impl Iterator<Item = &DepthTriplet> {
        self.triplets.iter().filter(|t| t.is_s_solution())
    }

    /// Distinct solutions (a repeated root counts once).
    pub fn solution_count(&self) -> usize {
        self.solutions().count()
    }

    /// Solutions weighted by root multiplicity.
    pub fn solution_count_weighted(&self) -> u32 {
        self.solutions().map(|t| t.root_multiplicity).sum()
    }

    pub fn s_solution_count(&self) -> usize {
        self.s_solutions().count()
    }

    pub fn degenerate_count(&self) -> usize {
        self.triplets
            .iter()
            .filter(|t| matches!(t.class, TripletClass::DegenerateZero(_)))
            .count()
    }

    pub fn min_abs_element(&self) -> f64 {
        self.triplets
            .iter()
            .map(|t| t.min_abs_element())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Solves the P3P problem for `tri` seen under `ang`.
pub fn solve_p3p(tri: &ControlTriangle, ang: &ViewAngles, opts: &SolveOptions) -> Result<SolveReport, SolveError> {
    let quartic = grunert_coefficients(tri, ang);
    let root_set = match quartic.real_roots(opts.cluster_tol) {
        Ok(r) => r,
        Err(QuarticError::DegreeDrop { .. }) => return Err(SolveError::OnToroidPair(Vertex::A)),
        Err(e) => return Err(e.into()),
    };
    if root_set.roots.is_empty() {
        return Err(SolveError::NoRealRoots);
    }
    let zero_tol = opts.zero_tol_factor * (tri.a + tri.b + tri.c) / 3.0;
    let mut triplets = Vec::with_capacity(root_set.roots.len());
    let mut failures = Vec::new();
    for root in &root_set.roots {
        match back_substitute_all(root.value, tri, ang, zero_tol, opts.residual_tol) {
            Ok(found) => {
                // split the multiplicity across coincident triplets
                let k = found.len() as u32;
                let share = (root.multiplicity / k).max(1);
                let extra = root.multiplicity.saturating_sub(share * k);
                for (i, mut t) in found.into_iter().enumerate() {
                    t.root_multiplicity = share + if i == 0 { extra } else { 0 };
                    triplets.push(t);
                }
            }
            Err(e) => failures.push(RootFailure {
                v: root.value,
                multiplicity: root.multiplicity,
                reason: e.to_string(),
            }),
        }
    }
    Ok(SolveReport {
        quartic,
        root_set,
        triplets,
        failures,
        region: None,
        non_realizable: !ang.is_realizable(),
    })
}

/// Solves for the angles seen from a known optical center and attaches its
/// region report.
pub fn solve_from_center(tri: &ControlTriangle, center: &Vec3, opts: &SolveOptions) -> Result<SolveReport, SolveError> {
    let ang = subtended_angles(center, tri)?;
    let mut report = solve_p3p(tri, &ang, opts)?;
    report.region = Some(classify_region(center, tri, DEFAULT_EPS_ANGLE)?);
    Ok(report)
}

/// Points at distances `s` from `A`, `B`, `C` (canonical frame), mirror pair
/// across the control plane first the `z >= 0` one.
pub fn positions_from_triplet(s: &[f64; 3], tri: &ControlTriangle) -> Result<Vec<Vec3>, SolveError> {
    if s.iter().any(|x| !(*x > 0.0)) {
        return Err(SolveError::NotASolution);
    }
    let [s1, s2, s3] = *s;
    let c = tri.vertex_c();
    let x = (s1 * s1 - s2 * s2 + tri.c * tri.c) / (2.0 * tri.c);
    let y = (s1 * s1 - s3 * s3 + c.x * c.x + c.y * c.y - 2.0 * c.x * x) / (2.0 * c.y);
    let z_sq = s1 * s1 - x * x - y * y;
    let scale = tri.diameter().max(s1).powi(2);
    if z_sq < -1e-9 * scale {
        return Err(SolveError::NoIntersection);
    }
    if z_sq <= 1e-15 * scale {
        return Ok(vec![Vec3::new(x, y, 0.0)]);
    }
    let z = z_sq.sqrt();
    Ok(vec![Vec3::new(x, y, z), Vec3::new(x, y, -z)])
}

/// Distances from `o` to `A`, `B`, `C`.
pub fn true_depths(o: &Vec3, tri: &ControlTriangle) -> [f64; 3] {
    Vertex::ALL.map(|v| (o - tri.vertex(v)).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::triangle_from_sides;
    use approx::assert_relative_eq;

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    fn axis_angles() -> ViewAngles {
        let t = 0.625f64.acos();
        ViewAngles::new(t, t, t).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(canonicalize_triplet([-1.0, -2.0, 3.0]), [1.0, 2.0, -3.0]);
        assert_eq!(canonicalize_triplet([-1.0, -2.0, -3.0]), [1.0, 2.0, 3.0]);
        assert_eq!(canonicalize_triplet([1.0, 2.0, 3.0]), [1.0, 2.0, 3.0]);
        assert_eq!(canonicalize_triplet([1.0, -2.0, 3.0]), [1.0, -2.0, 3.0]);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify_triplet(&[1.0, 2.0, -3.0], 1e-9),
            TripletClass::SSolution(SupplementedPair::AlphaBeta)
        );
        assert_eq!(
            classify_triplet(&[1.0, -2.0, 3.0], 1e-9),
            TripletClass::SSolution(SupplementedPair::AlphaGamma)
        );
        assert_eq!(
            classify_triplet(&[-1.0, 2.0, 3.0], 1e-9),
            TripletClass::SSolution(SupplementedPair::BetaGamma)
        );
        assert_eq!(classify_triplet(&[1.0, 1.0, 1.0], 1e-9), TripletClass::Solution);
        assert_eq!(classify_triplet(&[1.0, 1e-15, 2.0], 1e-9), TripletClass::DegenerateZero(2));
    }

    #[test]
    fn supplementary_examples() {
        let ang = ViewAngles::new(0.3, 1.1, 2.0).unwrap();
        let s = supplementary_angles(&ang, SupplementedPair::AlphaBeta);
        assert_relative_eq!(s.alpha, PI - 0.3);
        assert_relative_eq!(s.beta, PI - 1.1);
        assert_eq!(s.gamma, 2.0);
        for p in [SupplementedPair::AlphaBeta, SupplementedPair::AlphaGamma, SupplementedPair::BetaGamma] {
            let back = supplementary_angles(&supplementary_angles(&ang, p), p);
            assert_relative_eq!(back.alpha, ang.alpha, epsilon = 1e-15);
            assert_relative_eq!(back.beta, ang.beta, epsilon = 1e-15);
            assert_relative_eq!(back.gamma, ang.gamma, epsilon = 1e-15);
        }
        let right = ViewAngles::new(PI / 2.0, PI / 2.0, 0.7).unwrap();
        assert_eq!(supplementary_angles(&right, SupplementedPair::AlphaBeta), right);
    }

    #[test]
    fn equilateral_back_substitution() {
        let tri = ControlTriangle::equilateral(1.0);
        let t = back_substitute(1.0, &tri, &axis_angles()).unwrap();
        let d = 2.0 / SQRT3;
        for s in t.s {
            assert_relative_eq!(s, d, epsilon = 1e-14);
        }
        assert_relative_eq!(t.s[0], 1.0 / 0.75f64.sqrt(), epsilon = 1e-14);
        assert_eq!(t.class, TripletClass::Solution);
        assert!(t.residual < 1e-15);
    }

    #[test]
    fn unit_ratio_always_well_defined() {
        let tri = triangle_from_sides(2.0, 3.0, 4.0).unwrap();
        for beta in [1e-3, 0.5, 1.5, 3.0] {
            let ang = ViewAngles::new(0.7, beta, 0.9).unwrap();
            assert!(back_substitute(1.0, &tri, &ang).is_ok());
        }
    }

    #[test]
    fn singular_denominator_falls_back() {
        let tri = triangle_from_sides(1.0, 1.2, 0.9).unwrap();
        let ang = ViewAngles::new(1.0, 0.8, 1.1).unwrap();
        // v with v cos(alpha) = cos(gamma)
        let v = ang.gamma.cos() / ang.alpha.cos();
        match back_substitute(v, &tri, &ang) {
            Ok(t) => assert!(t.s[1].is_finite()),
            Err(e) => assert!(matches!(e, SolveError::NoRealTriplet(_))),
        }
    }

    #[test]
    fn ground_truth_round_trip() {
        let tri = triangle_from_sides(1.4, 1.1, 0.9).unwrap();
        let o = Vec3::new(0.35, -0.2, 1.7);
        let ang = subtended_angles(&o, &tri).unwrap();
        let truth = true_depths(&o, &tri);
        let t = back_substitute(truth[2] / truth[0], &tri, &ang).unwrap();
        for (x, e) in t.s.iter().zip(truth) {
            assert_relative_eq!(*x, e, max_relative = 1e-7);
        }
        let report = solve_p3p(&tri, &ang, &SolveOptions::default()).unwrap();
        assert!(report
            .solutions()
            .any(|t| t.s.iter().zip(truth).all(|(x, e)| (x - e).abs() <= 1e-9 * e)));
    }

    #[test]
    fn equilateral_axis_solve() {
        let tri = ControlTriangle::equilateral(1.0);
        let o = Vec3::new(0.5, SQRT3 / 6.0, 1.0);
        let report = solve_from_center(&tri, &o, &SolveOptions::default()).unwrap();
        let d = 2.0 / SQRT3;
        assert!(report.solutions().any(|t| t.s.iter().all(|s| (s - d).abs() < 1e-9)));
        assert!([2, 4].contains(&report.solution_count_weighted()));
        assert_eq!(report.s_solution_count(), 0);
        assert!(report.region.unwrap().outside_union);
    }

    #[test]
    fn on_toroid_pair_rejected() {
        let tri = triangle_from_sides(2.0, 3.0, 4.0).unwrap();
        let ang = ViewAngles::new(tri.angle_a, 1.0, 1.2).unwrap();
        assert_eq!(
            solve_p3p(&tri, &ang, &SolveOptions::default()).unwrap_err(),
            SolveError::OnToroidPair(Vertex::A)
        );
    }

    #[test]
    fn positions_examples() {
        let tri = ControlTriangle::equilateral(1.0);
        let d = 2.0 / SQRT3;
        let p = positions_from_triplet(&[d, d, d], &tri).unwrap();
        assert_eq!(p.len(), 2);
        assert_relative_eq!(p[0], Vec3::new(0.5, SQRT3 / 6.0, 1.0), epsilon = 1e-12);
        assert_relative_eq!(p[1], Vec3::new(0.5, SQRT3 / 6.0, -1.0), epsilon = 1e-12);

        let o = Vec3::new(-0.3, 0.8, -0.45);
        let p = positions_from_triplet(&true_depths(&o, &tri), &tri).unwrap();
        assert!(p.iter().any(|q| (q - o).norm() < 1e-9));

        assert_eq!(positions_from_triplet(&[1.0, 1.0, 100.0], &tri), Err(SolveError::NoIntersection));
        assert_eq!(positions_from_triplet(&[1.0, -1.0, 1.0], &tri), Err(SolveError::NotASolution));
    }

    #[test]
    fn s_solution_is_solution_of_supplementary_problem() {
        // Optical center inside the toroid lemons near the circumcenter.
        let tri = triangle_from_sides(1.0, 1.1, 0.95).unwrap();
        let center = crate::geom::circumsphere(&tri).center + Vec3::new(0.01, 0.02, 0.05);
        let report = solve_from_center(&tri, &center, &SolveOptions::default()).unwrap();
        let ang = subtended_angles(&center, &tri).unwrap();
        let mut seen = 0;
        for t in report.s_solutions() {
            let TripletClass::SSolution(pair) = t.class else { unreachable!() };
            let mut flipped = t.s;
            flipped[pair.negative_index()] = -flipped[pair.negative_index()];
            let sup = supplementary_angles(&ang, pair);
            assert!(triplet_residual(&flipped, &tri, &sup) < 1e-8);
            let sup_report = solve_p3p(&tri, &sup, &SolveOptions::default()).unwrap();
            assert!(sup_report
                .solutions()
                .any(|x| x.s.iter().zip(flipped).all(|(a, b)| (a - b).abs() < 1e-8 * b.max(1.0))));
            seen += 1;
        }
        assert!(seen > 0, "{report:?}");
    }
}
