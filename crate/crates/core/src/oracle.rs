//! Geometric brute-force P3P solver.
//!
//! Optical centers are the common points of the three toroids `T_α`, `T_β`,
//! `T_γ`. The toroid of the largest view angle is sampled on a `(phi, psi)`
//! grid; cells where both remaining angle residuals change sign seed a damped
//! Newton refinement constrained to that toroid. Nothing here touches the
//! quartic.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{angle_at, ControlTriangle, GeomError, ToroidSpec, Vec3, Vertex, ViewAngles};
use crate::solver::{positions_from_triplet, true_depths, SolveReport};

pub const MIN_GRID: usize = 64;

const NEWTON_MAX_ITER: usize = 50;
const NEWTON_ACCEPT: f64 = 1e-10;
const DEDUP_REL: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("grid resolution {0} below the minimum of {MIN_GRID}")]
    GridTooSmall(usize),
    #[error("{name} = {value} outside its parameter range")]
    DomainError { name: &'static str, value: f64 },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Point of the toroid `t`.
///
/// `phi ∈ (0, π)` runs along the generating arc from the chord start to the
/// chord end (`π/2` is the apex); `psi ∈ [0, 2π)` rotates the arc about the
/// chord, `psi = 0` being the reference half-plane.
pub fn toroid_point(t: &ToroidSpec, phi: f64, psi: f64) -> Result<Vec3, OracleError> {
    if !(phi > 0.0 && phi < PI) {
        return Err(OracleError::DomainError { name: "phi", value: phi });
    }
    if !(0.0..2.0 * PI).contains(&psi) {
        return Err(OracleError::DomainError { name: "psi", value: psi });
    }
    Ok(toroid_point_unchecked(t, phi, psi))
}

fn toroid_point_unchecked(t: &ToroidSpec, phi: f64, psi: f64) -> Vec3 {
    let theta = t.inscribed_angle;
    // angle of the arc point seen from the chord start, measured off the chord
    let at_start = phi * (PI - theta) / PI;
    let at_end = PI - theta - at_start;
    let dist = t.chord_length() * at_end.sin() / theta.sin();
    let axis = t.axis();
    let n1 = t.half_plane;
    let n2 = axis.cross(&n1);
    let radial = n1 * psi.cos() + n2 * psi.sin();
    t.chord_start + dist * (axis * at_start.cos() + radial * at_start.sin())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Optical centers in the canonical frame, both sides of the control plane.
    pub centers: Vec<[f64; 3]>,
    /// `(|PA|, |PB|, |PC|)` for each center.
    pub triplets: Vec<[f64; 3]>,
    pub grid_resolution: (usize, usize),
    /// Two accepted centers sit within three grid cells of each other.
    pub grid_too_coarse: bool,
}

impl OracleResult {
    pub fn center(&self, i: usize) -> Vec3 {
        Vec3::from(self.centers[i])
    }

    /// Distinct solutions: centers above the control plane.
    pub fn solution_count(&self) -> usize {
        self.centers.iter().filter(|c| c[2] > 0.0).count()
    }
}

struct Setup {
    surface: ToroidSpec,
    /// (chord start, chord end, target angle) for the two other view angles.
    checks: [(Vec3, Vec3, f64); 2],
}

impl Setup {
    fn new(tri: &ControlTriangle, ang: &ViewAngles) -> Self {
        let largest = Vertex::ALL
            .into_iter()
            .max_by(|a, b| ang.get(*a).total_cmp(&ang.get(*b)))
            .unwrap();
        let surface = tri.chord_toroid(largest, ang.get(largest));
        let others: Vec<Vertex> = Vertex::ALL.into_iter().filter(|v| *v != largest).collect();
        let check = |v: Vertex| {
            let (p, q) = v.opposite();
            (tri.vertex(p), tri.vertex(q), ang.get(v))
        };
        Setup {
            surface,
            checks: [check(others[0]), check(others[1])],
        }
    }

    fn residual(&self, phi: f64, psi: f64) -> [f64; 2] {
        let p = toroid_point_unchecked(&self.surface, phi, psi);
        self.checks.map(|(x, y, target)| angle_at(&p, &x, &y).unwrap_or(f64::NAN) - target)
    }
}

/// Denser near the chord endpoints, where solutions close to a vertex live.
fn grid_phi(i: usize, n: usize) -> f64 {
    0.5 * PI * (1.0 - (PI * (i as f64 + 0.5) / n as f64).cos())
}

/// Continuous grid index of `phi`, inverse of [`grid_phi`].
fn phi_index(phi: f64, n: usize) -> f64 {
    (1.0 - 2.0 * phi / PI).clamp(-1.0, 1.0).acos() / PI * n as f64 - 0.5
}

fn wrap_psi(psi: f64) -> f64 {
    let w = psi.rem_euclid(2.0 * PI);
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

/// Damped Newton on the two residuals over `(phi, psi)`.
fn refine(setup: &Setup, mut phi: f64, mut psi: f64) -> Option<(f64, f64)> {
    let norm = |r: [f64; 2]| (r[0] * r[0] + r[1] * r[1]).sqrt();
    let mut r = setup.residual(phi, psi);
    let mut rn = norm(r);
    if !rn.is_finite() {
        return None;
    }
    for _ in 0..NEWTON_MAX_ITER {
        if rn < 1e-14 {
            break;
        }
        let h: f64 = 1e-7;
        let hp = h.min(0.5 * phi).min(0.5 * (PI - phi));
        let rp = setup.residual(phi + hp, psi);
        let rm = setup.residual(phi - hp, psi);
        let sp = setup.residual(phi, psi + h);
        let sm = setup.residual(phi, psi - h);
        let j = [
            [(rp[0] - rm[0]) / (2.0 * hp), (sp[0] - sm[0]) / (2.0 * h)],
            [(rp[1] - rm[1]) / (2.0 * hp), (sp[1] - sm[1]) / (2.0 * h)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if !(det.abs() > 0.0) || !det.is_finite() {
            return None;
        }
        let dphi = -(j[1][1] * r[0] - j[0][1] * r[1]) / det;
        let dpsi = -(-j[1][0] * r[0] + j[0][0] * r[1]) / det;
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let np = phi + lambda * dphi;
            if np > 0.0 && np < PI {
                let nq = psi + lambda * dpsi;
                let nr = setup.residual(np, nq);
                let nn = norm(nr);
                if nn < rn {
                    phi = np;
                    psi = nq;
                    r = nr;
                    rn = nn;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (rn <= NEWTON_ACCEPT).then(|| (phi, wrap_psi(psi)))
}

/// All optical centers reproducing `ang`, found without the quartic.
pub fn brute_force_solve(
    tri: &ControlTriangle,
    ang: &ViewAngles,
    n_phi: usize,
    n_psi: usize,
) -> Result<OracleResult, OracleError> {
    for n in [n_phi, n_psi] {
        if n < MIN_GRID {
            return Err(OracleError::GridTooSmall(n));
        }
    }
    let setup = Setup::new(tri, ang);
    let dpsi = 2.0 * PI / n_psi as f64;
    let grid: Vec<Vec<[f64; 2]>> = (0..n_phi)
        .into_par_iter()
        .map(|i| {
            let phi = grid_phi(i, n_phi);
            (0..n_psi).map(|j| setup.residual(phi, j as f64 * dpsi)).collect()
        })
        .collect();

    let mixed = |vals: [f64; 4]| {
        vals.iter().all(|x| x.is_finite()) && vals.iter().any(|x| *x > 0.0) && vals.iter().any(|x| *x <= 0.0)
    };
    let seeds: Vec<(f64, f64)> = (0..n_phi - 1)
        .flat_map(|i| (0..n_psi).map(move |j| (i, j)))
        .filter(|&(i, j)| {
            let jn = (j + 1) % n_psi;
            let corners = [grid[i][j], grid[i][jn], grid[i + 1][j], grid[i + 1][jn]];
            mixed(corners.map(|c| c[0])) && mixed(corners.map(|c| c[1]))
        })
        .map(|(i, j)| {
            (
                0.5 * (grid_phi(i, n_phi) + grid_phi(i + 1, n_phi)),
                (j as f64 + 0.5) * dpsi,
            )
        })
        .collect();

    let refined: Vec<Option<(f64, f64)>> = seeds.par_iter().map(|&(p, q)| refine(&setup, p, q)).collect();

    let radius = DEDUP_REL * tri.diameter();
    let mut accepted: Vec<(Vec3, f64, f64)> = Vec::new();
    for (phi, psi) in refined.into_iter().flatten() {
        let p = toroid_point_unchecked(&setup.surface, phi, psi);
        if accepted.iter().all(|(q, _, _)| (p - q).norm() > radius) {
            accepted.push((p, phi, psi));
        }
    }
    accepted.sort_by(|a, b| {
        b.0.z
            .total_cmp(&a.0.z)
            .then(a.0.x.total_cmp(&b.0.x))
            .then(a.0.y.total_cmp(&b.0.y))
    });

    let mut grid_too_coarse = false;
    for (k, (_, p1, q1)) in accepted.iter().enumerate() {
        for (_, p2, q2) in &accepted[k + 1..] {
            let di = (phi_index(*p1, n_phi) - phi_index(*p2, n_phi)).abs();
            let dq = (q1 - q2).abs();
            let dj = dq.min(2.0 * PI - dq) / dpsi;
            if di <= 3.0 && dj <= 3.0 {
                grid_too_coarse = true;
            }
        }
    }

    Ok(OracleResult {
        centers: accepted.iter().map(|(p, _, _)| [p.x, p.y, p.z]).collect(),
        triplets: accepted.iter().map(|(p, _, _)| true_depths(p, tri)).collect(),
        grid_resolution: (n_phi, n_psi),
        grid_too_coarse,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionMatch {
    pub solver_index: usize,
    pub oracle_index: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    /// Solver solutions that place an optical center in space.
    pub solver_count: usize,
    /// Positive triplets satisfying the constraints with no point in space
    /// behind them (the view angles violate the trihedral inequalities).
    pub unrealizable_solutions: usize,
    pub oracle_count: usize,
    /// Optical centers implied by the solver's solutions (mirror pairs included).
    pub solver_positions: Vec<[f64; 3]>,
    pub matches: Vec<PositionMatch>,
    pub unmatched_solver: Vec<usize>,
    pub unmatched_oracle: Vec<usize>,
    pub max_distance: f64,
    pub grid_too_coarse: bool,
}

impl OracleComparison {
    pub fn counts_equal(&self) -> bool {
        self.solver_count == self.oracle_count
    }

    pub fn is_bijection(&self) -> bool {
        self.unmatched_solver.is_empty() && self.unmatched_oracle.is_empty()
    }
}

/// Nearest-neighbor pairing of solver positions with oracle centers.
pub fn compare(report: &SolveReport, oracle: &OracleResult, tol: f64) -> OracleComparison {
    let tri = &report.quartic.source_triangle;
    let placed: Vec<Vec<Vec3>> = report
        .solutions()
        .filter_map(|t| positions_from_triplet(&t.s, tri).ok())
        .collect();
    let solver_count = placed.len();
    let solver_positions: Vec<Vec3> = placed.into_iter().flatten().collect();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, p) in solver_positions.iter().enumerate() {
        for j in 0..oracle.centers.len() {
            let d = (p - oracle.center(j)).norm();
            if d <= tol {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_s = vec![false; solver_positions.len()];
    let mut used_o = vec![false; oracle.centers.len()];
    let mut matches = Vec::new();
    for (d, i, j) in pairs {
        if !used_s[i] && !used_o[j] {
            used_s[i] = true;
            used_o[j] = true;
            matches.push(PositionMatch {
                solver_index: i,
                oracle_index: j,
                distance: d,
            });
        }
    }
    matches.sort_by_key(|m| m.solver_index);
    OracleComparison {
        solver_count,
        unrealizable_solutions: report.solution_count() - solver_count,
        oracle_count: oracle.solution_count(),
        solver_positions: solver_positions.iter().map(|p| [p.x, p.y, p.z]).collect(),
        max_distance: matches.iter().map(|m| m.distance).fold(0.0, f64::max),
        unmatched_solver: (0..used_s.len()).filter(|&i| !used_s[i]).collect(),
        unmatched_oracle: (0..used_o.len()).filter(|&j| !used_o[j]).collect(),
        matches,
        grid_too_coarse: oracle.grid_too_coarse,
    }
}
