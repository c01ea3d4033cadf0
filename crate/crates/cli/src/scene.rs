//! Scene files: a control triangle, a view and an optional path.
//!
//! ```json
//! {
//!   "triangle": {"mode": "sides", "a": 1.0, "b": 1.0, "c": 1.0},
//!   "view": {"mode": "center", "O": [0.5, 0.3, 0.8]},
//!   "path": {"start": [3.0, 0.0, 1.0], "end": [0.5, 0.3, 1.0]}
//! }
//! ```
//!
//! Vertex-mode triangles and all positions are in a world frame; everything
//! is mapped into the canonical triangle frame on load.

use p3p_core::geom::Placement;
use p3p_core::{triangle_from_sides, ControlTriangle, Vec3, ViewAngles};
use serde::Deserialize;

use crate::error::CliError;

/// Optical centers this close to the control plane, relative to the
/// diameter, are rejected.
pub const PLANAR_REL: f64 = 1e-9;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    triangle: RawTriangle,
    view: Option<RawView>,
    path: Option<RawPath>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTriangle {
    mode: String,
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    #[serde(rename = "A")]
    va: Option<[f64; 3]>,
    #[serde(rename = "B")]
    vb: Option<[f64; 3]>,
    #[serde(rename = "C")]
    vc: Option<[f64; 3]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawView {
    mode: String,
    #[serde(rename = "O")]
    center: Option<[f64; 3]>,
    alpha_rad: Option<f64>,
    beta_rad: Option<f64>,
    gamma_rad: Option<f64>,
    alpha_deg: Option<f64>,
    beta_deg: Option<f64>,
    gamma_deg: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPath {
    start: [f64; 3],
    end: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum View {
    /// Optical center in the canonical frame.
    Center(Vec3),
    Angles(ViewAngles),
}

#[derive(Debug, Clone, Copy)]
pub struct Scene {
    pub triangle: ControlTriangle,
    pub placement: Placement,
    pub view: Option<View>,
    /// Path endpoints in the canonical frame.
    pub path: Option<(Vec3, Vec3)>,
}

impl Scene {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawScene =
            serde_json::from_str(text).map_err(|e| CliError::validation(format!("malformed scene: {e}")))?;
        let (triangle, placement) = raw.triangle.build()?;
        let view = match raw.view {
            Some(v) => Some(v.build(&placement)?),
            None => None,
        };
        let path = match raw.path {
            Some(p) => Some((
                placement.to_canonical(&world(p.start, "path.start")?),
                placement.to_canonical(&world(p.end, "path.end")?),
            )),
            None => None,
        };
        Ok(Scene {
            triangle,
            placement,
            view,
            path,
        })
    }

    pub fn view(&self) -> Result<View, CliError> {
        self.view.ok_or_else(|| CliError::validation("scene has no view"))
    }

    /// The optical center, rejected when it lies on the control plane.
    pub fn center(&self) -> Result<Vec3, CliError> {
        match self.view()? {
            View::Center(o) => {
                check_off_plane(&o, &self.triangle)?;
                Ok(o)
            }
            View::Angles(_) => Err(CliError::validation(
                "view mode \"angles\" has no optical center to classify",
            )),
        }
    }

    pub fn to_world(&self, p: &Vec3) -> [f64; 3] {
        let w = self.placement.to_world(p);
        [w.x, w.y, w.z]
    }
}

pub fn check_off_plane(o: &Vec3, tri: &ControlTriangle) -> Result<(), CliError> {
    if o.z.abs() <= PLANAR_REL * tri.diameter() {
        return Err(CliError::validation(format!(
            "PlanarCenter: optical center lies on the control plane (height {:e})",
            o.z
        )));
    }
    Ok(())
}

fn finite(x: f64, name: &str) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::validation(format!("{name} is not finite")))
    }
}

fn world(p: [f64; 3], name: &str) -> Result<Vec3, CliError> {
    for x in p {
        finite(x, name)?;
    }
    Ok(Vec3::from(p))
}

fn required<T>(x: Option<T>, name: &str) -> Result<T, CliError> {
    x.ok_or_else(|| CliError::validation(format!("missing field {name}")))
}

impl RawTriangle {
    fn build(self) -> Result<(ControlTriangle, Placement), CliError> {
        match self.mode.as_str() {
            "sides" => {
                if self.va.is_some() || self.vb.is_some() || self.vc.is_some() {
                    return Err(CliError::validation("triangle mode \"sides\" takes only a, b, c"));
                }
                let a = finite(required(self.a, "triangle.a")?, "triangle.a")?;
                let b = finite(required(self.b, "triangle.b")?, "triangle.b")?;
                let c = finite(required(self.c, "triangle.c")?, "triangle.c")?;
                Ok((triangle_from_sides(a, b, c)?, Placement::identity()))
            }
            "vertices" => {
                if self.a.is_some() || self.b.is_some() || self.c.is_some() {
                    return Err(CliError::validation("triangle mode \"vertices\" takes only A, B, C"));
                }
                let a = world(required(self.va, "triangle.A")?, "triangle.A")?;
                let b = world(required(self.vb, "triangle.B")?, "triangle.B")?;
                let c = world(required(self.vc, "triangle.C")?, "triangle.C")?;
                Ok(ControlTriangle::from_vertices(a, b, c)?)
            }
            other => Err(CliError::validation(format!(
                "triangle.mode must be \"sides\" or \"vertices\", got {other:?}"
            ))),
        }
    }
}

impl RawView {
    fn build(self, placement: &Placement) -> Result<View, CliError> {
        let rad = [self.alpha_rad, self.beta_rad, self.gamma_rad];
        let deg = [self.alpha_deg, self.beta_deg, self.gamma_deg];
        let any_angle = rad.iter().chain(deg.iter()).any(Option::is_some);
        match self.mode.as_str() {
            "center" => {
                if any_angle {
                    return Err(CliError::validation("view mode \"center\" takes only O"));
                }
                let o = world(required(self.center, "view.O")?, "view.O")?;
                Ok(View::Center(placement.to_canonical(&o)))
            }
            "angles" => {
                if self.center.is_some() {
                    return Err(CliError::validation("view mode \"angles\" does not take O"));
                }
                let has_rad = rad.iter().any(Option::is_some);
                let has_deg = deg.iter().any(Option::is_some);
                let (values, names, factor) = match (has_rad, has_deg) {
                    (true, false) => (rad, ["view.alpha_rad", "view.beta_rad", "view.gamma_rad"], 1.0),
                    (false, true) => (
                        deg,
                        ["view.alpha_deg", "view.beta_deg", "view.gamma_deg"],
                        std::f64::consts::PI / 180.0,
                    ),
                    _ => {
                        return Err(CliError::validation(
                            "view angles need exactly one unit system, all in _rad or all in _deg",
                        ))
                    }
                };
                let mut out = [0.0; 3];
                for ((o, v), name) in out.iter_mut().zip(values).zip(names) {
                    *o = finite(required(v, name)?, name)? * factor;
                }
                Ok(View::Angles(ViewAngles::new(out[0], out[1], out[2])?))
            }
            other => Err(CliError::validation(format!(
                "view.mode must be \"center\" or \"angles\", got {other:?}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sides_and_center() {
        let s = Scene::parse(
            r#"{"triangle": {"mode": "sides", "a": 3, "b": 4, "c": 5},
                "view": {"mode": "center", "O": [0.5, 0.5, 2.0]}}"#,
        )
        .unwrap();
        assert_eq!(s.triangle.sides(), [3.0, 4.0, 5.0]);
        assert_eq!(s.view, Some(View::Center(Vec3::new(0.5, 0.5, 2.0))));
        assert!(s.path.is_none());
    }

    #[test]
    fn degree_angles_convert() {
        let s = Scene::parse(
            r#"{"triangle": {"mode": "sides", "a": 1, "b": 1, "c": 1},
                "view": {"mode": "angles", "alpha_deg": 60, "beta_deg": 60, "gamma_deg": 60}}"#,
        )
        .unwrap();
        let View::Angles(a) = s.view.unwrap() else { panic!() };
        assert!((a.alpha - std::f64::consts::FRAC_PI_3).abs() < 1e-15);
    }

    #[test]
    fn mixed_units_rejected() {
        let e = Scene::parse(
            r#"{"triangle": {"mode": "sides", "a": 1, "b": 1, "c": 1},
                "view": {"mode": "angles", "alpha_deg": 60, "beta_rad": 1, "gamma_deg": 60}}"#,
        )
        .unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn vertices_map_to_canonical_frame() {
        let s = Scene::parse(
            r#"{"triangle": {"mode": "vertices", "A": [1, 2, 3], "B": [1, 2, 4], "C": [2, 2, 3]},
                "view": {"mode": "center", "O": [1.2, 5.0, 3.3]}}"#,
        )
        .unwrap();
        let View::Center(o) = s.view.unwrap() else { panic!() };
        let back = s.to_world(&o);
        for (x, y) in back.iter().zip([1.2, 5.0, 3.3]) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((o.z.abs() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn malformed_json_reports_position() {
        let e = Scene::parse("{\n  \"triangle\": {\"mode\": \"sides\", \"a\": 1,,}\n}").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }
}
