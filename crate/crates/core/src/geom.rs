//! Control-triangle geometry, subtended angles and inscribed-angle toroids.
//!
//! A toroid `T_θ` over a chord `XY` is the locus of points that see the chord
//! under the angle `θ`. Points seeing the chord under a larger angle are
//! inside it. The control triangle defines six such surfaces: `T_∠A` and
//! `T_{π−∠A}` over `BC`, and cyclically over `AC` and `AB`.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vec3 = Vector3<f64>;

/// Default angular tolerance for "on the boundary" decisions.
pub const DEFAULT_EPS_ANGLE: f64 = 1e-9;

/// Relative tolerance for vertex coincidence and on-axis rejection.
const COINCIDENCE_REL: f64 = 1e-12;

/// Slack accepted on cone-intersection tangency.
const CONE_TANGENCY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("degenerate triangle with sides ({0}, {1}, {2})")]
    DegenerateTriangle(f64, f64, f64),
    #[error("point coincides with vertex {0}")]
    VertexCoincidence(Vertex),
    #[error("point lies on the chord line of toroid {0}")]
    OnChordLine(ToroidLabel),
    #[error("{name} = {value} is outside the open interval (0, pi)")]
    DomainError { name: &'static str, value: f64 },
    #[error("non-finite input")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Vertex {
    A,
    B,
    C,
}

impl Vertex {
    pub const ALL: [Vertex; 3] = [Vertex::A, Vertex::B, Vertex::C];

    pub fn index(self) -> usize {
        match self {
            Vertex::A => 0,
            Vertex::B => 1,
            Vertex::C => 2,
        }
    }

    /// The two other vertices, in alphabetical order (the opposite side).
    pub fn opposite(self) -> (Vertex, Vertex) {
        match self {
            Vertex::A => (Vertex::B, Vertex::C),
            Vertex::B => (Vertex::A, Vertex::C),
            Vertex::C => (Vertex::A, Vertex::B),
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Vertex::A => "A",
            Vertex::B => "B",
            Vertex::C => "C",
        };
        f.write_str(s)
    }
}

/// Names of the six triangle toroids plus a free-form label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ToroidLabel {
    #[serde(rename = "TA")]
    AngleA,
    #[serde(rename = "TpiA")]
    SuppA,
    #[serde(rename = "TB")]
    AngleB,
    #[serde(rename = "TpiB")]
    SuppB,
    #[serde(rename = "TC")]
    AngleC,
    #[serde(rename = "TpiC")]
    SuppC,
    #[serde(rename = "Tcustom")]
    Custom,
}

impl ToroidLabel {
    /// The six triangle toroids in report order.
    pub const TRIANGLE: [ToroidLabel; 6] = [
        ToroidLabel::AngleA,
        ToroidLabel::SuppA,
        ToroidLabel::AngleB,
        ToroidLabel::SuppB,
        ToroidLabel::AngleC,
        ToroidLabel::SuppC,
    ];

    pub fn angle(v: Vertex) -> Self {
        match v {
            Vertex::A => ToroidLabel::AngleA,
            Vertex::B => ToroidLabel::AngleB,
            Vertex::C => ToroidLabel::AngleC,
        }
    }

    pub fn supplement(v: Vertex) -> Self {
        match v {
            Vertex::A => ToroidLabel::SuppA,
            Vertex::B => ToroidLabel::SuppB,
            Vertex::C => ToroidLabel::SuppC,
        }
    }

    /// Vertex whose opposite side is the chord of this toroid.
    pub fn vertex(self) -> Option<Vertex> {
        match self {
            ToroidLabel::AngleA | ToroidLabel::SuppA => Some(Vertex::A),
            ToroidLabel::AngleB | ToroidLabel::SuppB => Some(Vertex::B),
            ToroidLabel::AngleC | ToroidLabel::SuppC => Some(Vertex::C),
            ToroidLabel::Custom => None,
        }
    }

    /// True for `T_{π−∠·}`.
    pub fn is_supplement(self) -> bool {
        matches!(self, ToroidLabel::SuppA | ToroidLabel::SuppB | ToroidLabel::SuppC)
    }

    pub fn index(self) -> Option<usize> {
        ToroidLabel::TRIANGLE.iter().position(|&l| l == self)
    }

    pub fn short_name(self) -> &'static str {
        match self {
            ToroidLabel::AngleA => "TA",
            ToroidLabel::SuppA => "TpiA",
            ToroidLabel::AngleB => "TB",
            ToroidLabel::SuppB => "TpiB",
            ToroidLabel::AngleC => "TC",
            ToroidLabel::SuppC => "TpiC",
            ToroidLabel::Custom => "Tcustom",
        }
    }
}

impl fmt::Display for ToroidLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// Three control points with side lengths `a = |BC|`, `b = |AC|`, `c = |AB|`.
///
/// Vertices live in a canonical frame: `A` at the origin, `B` on `+x`, `C` in
/// the `z = 0` plane with positive `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlTriangle {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub angle_a: f64,
    pub angle_b: f64,
    pub angle_c: f64,
    vertices: [[f64; 3]; 3],
}

/// Builds a control triangle from its side lengths.
pub fn triangle_from_sides(a: f64, b: f64, c: f64) -> Result<ControlTriangle, GeomError> {
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(GeomError::NonFinite);
    }
    if a <= 0.0 || b <= 0.0 || c <= 0.0 || a >= b + c || b >= a + c || c >= a + b {
        return Err(GeomError::DegenerateTriangle(a, b, c));
    }
    let area = heron_area(a, b, c);
    if !(area > 0.0) {
        return Err(GeomError::DegenerateTriangle(a, b, c));
    }
    // atan2 form keeps small and near-straight angles accurate.
    let angle_a = (4.0 * area).atan2(b * b + c * c - a * a);
    let angle_b = (4.0 * area).atan2(a * a + c * c - b * b);
    let angle_c = (4.0 * area).atan2(a * a + b * b - c * c);
    let (sin_a, cos_a) = angle_a.sin_cos();
    let vertices = [
        [0.0, 0.0, 0.0],
        [c, 0.0, 0.0],
        [b * cos_a, b * sin_a, 0.0],
    ];
    Ok(ControlTriangle {
        a,
        b,
        c,
        angle_a,
        angle_b,
        angle_c,
        vertices,
    })
}

/// Kahan's numerically stable Heron formula.
fn heron_area(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let [x, y, z] = s;
    let p = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
    if p <= 0.0 {
        0.0
    } else {
        0.25 * p.sqrt()
    }
}

impl ControlTriangle {
    pub fn equilateral(side: f64) -> Self {
        triangle_from_sides(side, side, side).expect("positive side")
    }

    /// Triangle with arbitrary 3D vertices, plus the rigid map into the
    /// canonical frame.
    pub fn from_vertices(a: Vec3, b: Vec3, c: Vec3) -> Result<(Self, Placement), GeomError> {
        if !(a.iter().chain(b.iter()).chain(c.iter()).all(|x| x.is_finite())) {
            return Err(GeomError::NonFinite);
        }
        let tri = triangle_from_sides((b - c).norm(), (a - c).norm(), (a - b).norm())?;
        let ex = (b - a).normalize();
        let ez_raw = (b - a).cross(&(c - a));
        if ez_raw.norm() == 0.0 {
            return Err(GeomError::DegenerateTriangle(tri.a, tri.b, tri.c));
        }
        let ez = ez_raw.normalize();
        let ey = ez.cross(&ex);
        let rotation = Matrix3::from_rows(&[ex.transpose(), ey.transpose(), ez.transpose()]);
        Ok((tri, Placement { origin: a, rotation }))
    }

    pub fn sides(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn angles(&self) -> [f64; 3] {
        [self.angle_a, self.angle_b, self.angle_c]
    }

    pub fn angle(&self, v: Vertex) -> f64 {
        self.angles()[v.index()]
    }

    /// Length of the side opposite `v`.
    pub fn side(&self, v: Vertex) -> f64 {
        self.sides()[v.index()]
    }

    pub fn vertex(&self, v: Vertex) -> Vec3 {
        Vec3::from(self.vertices[v.index()])
    }

    pub fn vertex_a(&self) -> Vec3 {
        self.vertex(Vertex::A)
    }

    pub fn vertex_b(&self) -> Vec3 {
        self.vertex(Vertex::B)
    }

    pub fn vertex_c(&self) -> Vec3 {
        self.vertex(Vertex::C)
    }

    /// Longest side.
    pub fn diameter(&self) -> f64 {
        self.a.max(self.b).max(self.c)
    }

    pub fn area(&self) -> f64 {
        heron_area(self.a, self.b, self.c)
    }

    pub fn circumradius(&self) -> f64 {
        self.a * self.b * self.c / (4.0 * self.area())
    }

    pub fn is_acute(&self) -> bool {
        self.angles().iter().all(|&t| t < PI / 2.0)
    }

    pub fn scaled(&self, k: f64) -> Result<Self, GeomError> {
        triangle_from_sides(k * self.a, k * self.b, k * self.c)
    }

    /// Toroid named by `label`; `Custom` is not a triangle toroid and yields `None`.
    pub fn toroid(&self, label: ToroidLabel) -> Option<ToroidSpec> {
        let v = label.vertex()?;
        let angle = if label.is_supplement() {
            PI - self.angle(v)
        } else {
            self.angle(v)
        };
        let mut spec = self.chord_toroid(v, angle);
        spec.label = label;
        Some(spec)
    }

    pub fn toroids(&self) -> [ToroidSpec; 6] {
        ToroidLabel::TRIANGLE.map(|l| self.toroid(l).expect("triangle label"))
    }

    /// Toroid over the side opposite `v` with an arbitrary inscribed angle,
    /// its `psi = 0` half-plane containing `v`.
    pub fn chord_toroid(&self, v: Vertex, inscribed_angle: f64) -> ToroidSpec {
        let (p, q) = v.opposite();
        let start = self.vertex(p);
        let end = self.vertex(q);
        let apex = self.vertex(v);
        let axis = (end - start).normalize();
        let rel = apex - start;
        let half_plane = (rel - axis * rel.dot(&axis)).normalize();
        ToroidSpec {
            chord_start: start,
            chord_end: end,
            inscribed_angle,
            label: ToroidLabel::Custom,
            half_plane,
        }
    }
}

/// Rigid transform between a world frame and the canonical triangle frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub origin: Vec3,
    /// Rows are the canonical axes expressed in world coordinates.
    pub rotation: Matrix3<f64>,
}

impl Placement {
    pub fn identity() -> Self {
        Placement {
            origin: Vec3::zeros(),
            rotation: Matrix3::identity(),
        }
    }

    pub fn to_canonical(&self, world: &Vec3) -> Vec3 {
        self.rotation * (world - self.origin)
    }

    pub fn to_world(&self, canonical: &Vec3) -> Vec3 {
        self.rotation.transpose() * canonical + self.origin
    }
}

/// Angles subtended at the optical center: `alpha` over `BC`, `beta` over
/// `AC`, `gamma` over `AB`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl ViewAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self, GeomError> {
        for (name, value) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            check_open_angle(name, value)?;
        }
        Ok(ViewAngles { alpha, beta, gamma })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    pub fn get(&self, v: Vertex) -> f64 {
        self.as_array()[v.index()]
    }

    /// Trihedral inequalities: the three rays can exist around a real point.
    pub fn is_realizable(&self) -> bool {
        let ViewAngles { alpha, beta, gamma } = *self;
        alpha < beta + gamma && beta < alpha + gamma && gamma < alpha + beta && alpha + beta + gamma < 2.0 * PI
    }
}

fn check_open_angle(name: &'static str, value: f64) -> Result<(), GeomError> {
    if !(value > 0.0 && value < PI) {
        return Err(GeomError::DomainError { name, value });
    }
    Ok(())
}

/// Angle at `p` between the rays towards `x` and `y`, or `None` when `p`
/// coincides with either endpoint.
pub fn angle_at(p: &Vec3, x: &Vec3, y: &Vec3) -> Option<f64> {
    let u = x - p;
    let w = y - p;
    if u.norm_squared() == 0.0 || w.norm_squared() == 0.0 {
        return None;
    }
    Some(u.cross(&w).norm().atan2(u.dot(&w)))
}

/// Angles subtended by the three sides at `o`.
pub fn subtended_angles(o: &Vec3, tri: &ControlTriangle) -> Result<ViewAngles, GeomError> {
    if !o.iter().all(|x| x.is_finite()) {
        return Err(GeomError::NonFinite);
    }
    let limit = COINCIDENCE_REL * tri.diameter();
    for v in Vertex::ALL {
        if (o - tri.vertex(v)).norm() < limit {
            return Err(GeomError::VertexCoincidence(v));
        }
    }
    let (pa, pb, pc) = (tri.vertex_a(), tri.vertex_b(), tri.vertex_c());
    let alpha = angle_at(o, &pb, &pc).expect("checked");
    let beta = angle_at(o, &pa, &pc).expect("checked");
    let gamma = angle_at(o, &pa, &pb).expect("checked");
    Ok(ViewAngles { alpha, beta, gamma })
}

/// Spindle-torus surface `T_θ` over a chord.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToroidSpec {
    pub chord_start: Vec3,
    pub chord_end: Vec3,
    pub inscribed_angle: f64,
    pub label: ToroidLabel,
    /// Unit vector orthogonal to the chord selecting the `psi = 0` half-plane.
    pub half_plane: Vec3,
}

impl ToroidSpec {
    /// Custom toroid; the reference half-plane is an arbitrary perpendicular.
    pub fn new(chord_start: Vec3, chord_end: Vec3, inscribed_angle: f64) -> Result<Self, GeomError> {
        check_open_angle("inscribed_angle", inscribed_angle)?;
        let d = chord_end - chord_start;
        if d.norm() == 0.0 {
            return Err(GeomError::DegenerateTriangle(0.0, 0.0, 0.0));
        }
        let axis = d.normalize();
        let trial = if axis.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let half_plane = (trial - axis * trial.dot(&axis)).normalize();
        Ok(ToroidSpec {
            chord_start,
            chord_end,
            inscribed_angle,
            label: ToroidLabel::Custom,
            half_plane,
        })
    }

    pub fn chord_length(&self) -> f64 {
        (self.chord_end - self.chord_start).norm()
    }

    pub fn axis(&self) -> Vec3 {
        (self.chord_end - self.chord_start).normalize()
    }

    /// Distance from `p` to the infinite line through the chord.
    pub fn distance_to_axis(&self, p: &Vec3) -> f64 {
        let rel = p - self.chord_start;
        rel.cross(&self.axis()).norm()
    }
}

/// Subtended angle of `p` over the chord minus the inscribed angle.
///
/// Positive inside the toroid, negative outside.
pub fn toroid_signed_excess(p: &Vec3, t: &ToroidSpec) -> Result<f64, GeomError> {
    if !p.iter().all(|x| x.is_finite()) {
        return Err(GeomError::NonFinite);
    }
    if t.distance_to_axis(p) < COINCIDENCE_REL * t.chord_length() {
        return Err(GeomError::OnChordLine(t.label));
    }
    let angle = angle_at(p, &t.chord_start, &t.chord_end).expect("off the axis");
    Ok(angle - t.inscribed_angle)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionStatus {
    Inside,
    OnBoundary,
    Outside,
}

impl RegionStatus {
    pub fn from_excess(excess: f64, eps_angle: f64) -> Self {
        if excess.abs() <= eps_angle {
            RegionStatus::OnBoundary
        } else if excess > 0.0 {
            RegionStatus::Inside
        } else {
            RegionStatus::Outside
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RegionStatus::Inside => "Inside",
            RegionStatus::OnBoundary => "OnBoundary",
            RegionStatus::Outside => "Outside",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToroidStatus {
    pub label: ToroidLabel,
    pub status: RegionStatus,
    pub excess_rad: f64,
}

/// Membership of a point with respect to the six triangle toroids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub per_toroid: [ToroidStatus; 6],
    pub outside_union: bool,
    pub on_outer_surface: bool,
    /// Inside both the `T_∠A ∪ T_{π−∠A}` and the `T_∠C ∪ T_{π−∠C}` unions.
    pub inside_intersection_of_ac: bool,
}

impl RegionReport {
    pub fn status(&self, label: ToroidLabel) -> Option<ToroidStatus> {
        self.per_toroid.iter().copied().find(|s| s.label == label)
    }

    /// Inside at least one toroid of the pair over the side opposite `v`.
    pub fn inside_pair(&self, v: Vertex) -> bool {
        [ToroidLabel::angle(v), ToroidLabel::supplement(v)]
            .iter()
            .any(|&l| self.status(l).map(|s| s.status) == Some(RegionStatus::Inside))
    }

    /// Outside both toroids of the pair over the side opposite `v`.
    pub fn outside_pair(&self, v: Vertex) -> bool {
        [ToroidLabel::angle(v), ToroidLabel::supplement(v)]
            .iter()
            .all(|&l| self.status(l).map(|s| s.status) == Some(RegionStatus::Outside))
    }
}

/// Classifies `o` against the six toroids of `tri` with boundary band `eps_angle`.
pub fn classify_region(o: &Vec3, tri: &ControlTriangle, eps_angle: f64) -> Result<RegionReport, GeomError> {
    subtended_angles(o, tri)?;
    let mut per_toroid = [ToroidStatus {
        label: ToroidLabel::AngleA,
        status: RegionStatus::Outside,
        excess_rad: 0.0,
    }; 6];
    for (slot, spec) in per_toroid.iter_mut().zip(tri.toroids().iter()) {
        let excess = toroid_signed_excess(o, spec)?;
        *slot = ToroidStatus {
            label: spec.label,
            status: RegionStatus::from_excess(excess, eps_angle),
            excess_rad: excess,
        };
    }
    let outside_union = per_toroid.iter().all(|s| s.status == RegionStatus::Outside);
    let any_inside = per_toroid.iter().any(|s| s.status == RegionStatus::Inside);
    let any_boundary = per_toroid.iter().any(|s| s.status == RegionStatus::OnBoundary);
    let mut report = RegionReport {
        per_toroid,
        outside_union,
        on_outer_surface: any_boundary && !any_inside,
        inside_intersection_of_ac: false,
    };
    report.inside_intersection_of_ac = report.inside_pair(Vertex::A) && report.inside_pair(Vertex::C);
    Ok(report)
}

/// Sphere having the circumcircle of the triangle as a great circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircumsphereSpec {
    pub center: Vec3,
    pub radius: f64,
}

pub fn circumsphere(tri: &ControlTriangle) -> CircumsphereSpec {
    // A at the origin, B = (c, 0, 0): the center has x = c/2.
    let c = tri.vertex_c();
    let x = 0.5 * tri.c;
    let y = (c.x * c.x + c.y * c.y - 2.0 * x * c.x) / (2.0 * c.y);
    CircumsphereSpec {
        center: Vec3::new(x, y, 0.0),
        radius: tri.circumradius(),
    }
}

/// Whether the cones at a common apex with half-angles `beta0`, `gamma0` around
/// axes separated by `angle_a` meet along a ray.
///
/// Tangent cones count as intersecting.
pub fn cones_intersect(beta0: f64, gamma0: f64, angle_a: f64) -> Result<bool, GeomError> {
    check_open_angle("beta0", beta0)?;
    check_open_angle("gamma0", gamma0)?;
    check_open_angle("angle_a", angle_a)?;
    let ca = angle_a.cos();
    Ok((beta0 + gamma0).cos() <= ca + CONE_TANGENCY_TOL && ca <= (beta0 - gamma0).cos() + CONE_TANGENCY_TOL)
}
