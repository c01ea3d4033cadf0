use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::geom::{circumsphere, classify_region, triangle_from_sides, ControlTriangle, ToroidLabel, Vec3, DEFAULT_EPS_ANGLE};
use crate::oracle::toroid_point;

/// Below one acceptance per this many draws the sampler gives up.
const MAX_ATTEMPTS_PER_POINT: usize = 1000;

/// Outside-union samples come from this many circumradii around the
/// circumcenter, plus a sparse far field.
const BALL_RADII: f64 = 8.0;
const FAR_RADII: f64 = 100.0;
const FAR_FRACTION: f64 = 0.1;

/// Smallest angle of a random triangle.
const MIN_TRIANGLE_ANGLE: f64 = 15.0 * PI / 180.0;
/// Random acute/obtuse triangles keep their largest angle this far from π/2.
const RIGHT_ANGLE_MARGIN: f64 = 3.0 * PI / 180.0;

pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriangleKind {
    Acute,
    Obtuse,
    Any,
}

/// Random triangle with all angles at least 15°, circumradius in `[0.5, 2]`.
pub fn random_triangle<R: Rng>(rng: &mut R, kind: TriangleKind) -> ControlTriangle {
    loop {
        let ang_a = rng.gen_range(MIN_TRIANGLE_ANGLE..PI);
        let ang_b = rng.gen_range(MIN_TRIANGLE_ANGLE..PI);
        let ang_c = PI - ang_a - ang_b;
        if ang_c < MIN_TRIANGLE_ANGLE {
            continue;
        }
        let largest = ang_a.max(ang_b).max(ang_c);
        let ok = match kind {
            TriangleKind::Acute => largest < PI / 2.0 - RIGHT_ANGLE_MARGIN,
            TriangleKind::Obtuse => largest > PI / 2.0 + RIGHT_ANGLE_MARGIN,
            TriangleKind::Any => true,
        };
        if !ok {
            continue;
        }
        let r = rng.gen_range(0.5..2.0);
        let sides = [ang_a, ang_b, ang_c].map(|x| 2.0 * r * x.sin());
        if let Ok(tri) = triangle_from_sides(sides[0], sides[1], sides[2]) {
            return tri;
        }
    }
}

fn unit_vector<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

fn in_ball<R: Rng>(rng: &mut R, center: &Vec3, radius: f64) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if v.norm_squared() <= 1.0 {
            return center + radius * v;
        }
    }
}

fn off_plane(p: &Vec3, tri: &ControlTriangle) -> bool {
    p.z.abs() > 1e-6 * tri.diameter()
}

/// `n` optical centers outside all six toroids, off the control plane.
pub fn sample_outside_union(tri: &ControlTriangle, n: usize, seed: u64) -> Result<Vec<Vec3>, ExperimentError> {
    if n == 0 {
        return Err(ExperimentError::InvalidConfig("n must be at least 1".into()));
    }
    let sphere = circumsphere(tri);
    let points: Vec<Option<Vec3>> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            for _ in 0..MAX_ATTEMPTS_PER_POINT {
                let p = if rng.gen_bool(FAR_FRACTION) {
                    // log-uniform radius across the far shell
                    let lr = rng.gen_range((BALL_RADII.ln())..FAR_RADII.ln());
                    sphere.center + lr.exp() * sphere.radius * unit_vector(&mut rng)
                } else {
                    in_ball(&mut rng, &sphere.center, BALL_RADII * sphere.radius)
                };
                if !off_plane(&p, tri) {
                    continue;
                }
                if let Ok(r) = classify_region(&p, tri, DEFAULT_EPS_ANGLE) {
                    if r.outside_union {
                        return Some(p);
                    }
                }
            }
            None
        })
        .collect();
    let accepted = points.iter().filter(|p| p.is_some()).count();
    if accepted < n {
        return Err(ExperimentError::SamplingStarved {
            accepted,
            attempts: n * MAX_ATTEMPTS_PER_POINT,
        });
    }
    Ok(points.into_iter().flatten().collect())
}

/// `n` off-plane points uniform in the ball of `radius_factor` circumradii
/// around the circumcenter, regardless of region.
pub fn sample_ball(tri: &ControlTriangle, n: usize, radius_factor: f64, seed: u64) -> Vec<Vec3> {
    let sphere = circumsphere(tri);
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            loop {
                let p = in_ball(&mut rng, &sphere.center, radius_factor * sphere.radius);
                if off_plane(&p, tri) {
                    return p;
                }
            }
        })
        .collect()
}

/// Uniform point on the circumscribed sphere.
pub fn sample_circumsphere<R: Rng>(rng: &mut R, tri: &ControlTriangle) -> Vec3 {
    let s = circumsphere(tri);
    s.center + s.radius * unit_vector(rng)
}

/// Point on one of the six triangle toroids, uniform in its arc and rotation
/// parameters.
pub fn sample_toroid<R: Rng>(rng: &mut R, tri: &ControlTriangle, label: ToroidLabel) -> Option<Vec3> {
    let t = tri.toroid(label)?;
    let phi = rng.gen_range(1e-6..PI - 1e-6);
    let psi = rng.gen_range(0.0..2.0 * PI);
    toroid_point(&t, phi, psi).ok()
}

/// Random optical center within three diameters of the circumcenter, at least
/// `0.05` diameters off the control plane and away from the vertices.
pub fn synthesize_pose<R: Rng>(rng: &mut R, tri: &ControlTriangle) -> Vec3 {
    let d = tri.diameter();
    let center = circumsphere(tri).center;
    loop {
        let p = in_ball(rng, &center, 3.0 * d);
        if p.z.abs() < 0.05 * d {
            continue;
        }
        if crate::geom::Vertex::ALL
            .iter()
            .all(|&v| (p - tri.vertex(v)).norm() > 0.05 * d)
        {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{subtended_angles, toroid_signed_excess};

    #[test]
    fn outside_union_postconditions() {
        let tri = ControlTriangle::equilateral(1.0);
        let pts = sample_outside_union(&tri, 100, 42).unwrap();
        assert_eq!(pts.len(), 100);
        for p in &pts {
            assert!(classify_region(p, &tri, DEFAULT_EPS_ANGLE).unwrap().outside_union);
            assert!(p.z.abs() > 1e-6);
            let ang = subtended_angles(p, &tri).unwrap();
            for (x, y) in ang.as_array().into_iter().zip(tri.angles()) {
                assert!(x < y.min(PI - y));
            }
        }
        assert_eq!(pts, sample_outside_union(&tri, 100, 42).unwrap());
        assert_ne!(pts, sample_outside_union(&tri, 100, 43).unwrap());
    }

    #[test]
    fn random_triangles_respect_kind() {
        let mut rng = trial_rng(5, 0);
        for _ in 0..200 {
            let t = random_triangle(&mut rng, TriangleKind::Acute);
            assert!(t.is_acute());
            let t = random_triangle(&mut rng, TriangleKind::Obtuse);
            assert!(t.angles().iter().any(|&x| x > PI / 2.0));
            assert!(t.angles().iter().all(|&x| x >= MIN_TRIANGLE_ANGLE - 1e-12));
        }
    }

    #[test]
    fn toroid_samples_lie_on_surface() {
        let tri = triangle_from_sides(1.0, 1.3, 0.8).unwrap();
        let mut rng = trial_rng(9, 1);
        for label in ToroidLabel::TRIANGLE {
            let spec = tri.toroid(label).unwrap();
            for _ in 0..50 {
                let p = sample_toroid(&mut rng, &tri, label).unwrap();
                if let Ok(e) = toroid_signed_excess(&p, &spec) {
                    assert!(e.abs() < 1e-9, "{label}: {e}");
                }
            }
        }
    }
}
