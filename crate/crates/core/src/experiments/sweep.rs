use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::geom::{
    subtended_angles, toroid_signed_excess, ControlTriangle, RegionStatus, ToroidLabel, ToroidSpec, Vec3, Vertex,
    DEFAULT_EPS_ANGLE,
};
use crate::solver::{solve_p3p, SolveError, SolveOptions};

pub const MIN_STEPS: usize = 100;
pub const DEFAULT_DELTA: f64 = 1e-4;

/// Crossing parameters are refined to this width in `t`.
const CROSS_TOL_T: f64 = 1e-12;
/// A sampled excess this close to zero without a sign change is a tangency.
const TANGENT_EXCESS: f64 = 1e-12;
/// Paths closer than this fraction of the diameter to a vertex are rejected.
const VERTEX_CLEARANCE: f64 = 1e-3;
/// A triplet element below this fraction of the diameter counts as vanishing.
const ZERO_ELEMENT_REL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub tri: ControlTriangle,
    pub start: Vec3,
    pub end: Vec3,
    pub steps: usize,
    /// Before/after offset from a crossing, as a fraction of the segment.
    pub delta: f64,
    pub seed: u64,
    pub opts: SolveOptions,
}

impl SweepConfig {
    pub fn new(tri: ControlTriangle, start: Vec3, end: Vec3) -> Self {
        SweepConfig {
            tri,
            start,
            end,
            steps: MIN_STEPS,
            delta: DEFAULT_DELTA,
            seed: 0,
            opts: SolveOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.steps < MIN_STEPS {
            return Err(ExperimentError::InvalidConfig(format!(
                "steps = {} is below the minimum of {MIN_STEPS}",
                self.steps
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0 / self.steps as f64) {
            return Err(ExperimentError::InvalidConfig(format!(
                "delta = {} must lie in (0, 1/steps)",
                self.delta
            )));
        }
        if !self.start.iter().chain(self.end.iter()).all(|x| x.is_finite()) {
            return Err(ExperimentError::InvalidConfig("non-finite path endpoint".into()));
        }
        if (self.end - self.start).norm() == 0.0 {
            return Err(ExperimentError::InvalidConfig("path has zero length".into()));
        }
        Ok(())
    }

    pub fn point(&self, t: f64) -> Vec3 {
        self.start + t * (self.end - self.start)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    OutsideToInside,
    InsideToOutside,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::OutsideToInside => "OutsideToInside",
            Direction::InsideToOutside => "InsideToOutside",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    ConsistentThm3,
    ConsistentThm4,
    ConsistentThm5,
    Exceptional,
    Violation,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ConsistentThm3 => "ConsistentThm3",
            Verdict::ConsistentThm4 => "ConsistentThm4",
            Verdict::ConsistentThm5 => "ConsistentThm5",
            Verdict::Exceptional => "Exceptional",
            Verdict::Violation => "Violation",
        }
    }
}

/// Solution structure at one optical center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCounts {
    /// Distinct solutions.
    pub n_solutions: usize,
    pub n_ssolutions: usize,
    /// Solutions weighted by root multiplicity.
    pub n_solutions_weighted: u32,
    /// Smallest `|s_i|` over all triplets (infinite when there are none).
    pub min_abs_element: f64,
    /// Class names of the S-solutions, in root order.
    pub s_classes: Vec<String>,
}

/// Solves at `p`. A quartic without real roots gives empty counts.
pub fn counts_at(tri: &ControlTriangle, p: &Vec3, opts: &SolveOptions) -> Result<PointCounts, SolveError> {
    let ang = subtended_angles(p, tri)?;
    match solve_p3p(tri, &ang, opts) {
        Ok(r) => Ok(PointCounts {
            n_solutions: r.solution_count(),
            n_ssolutions: r.s_solution_count(),
            n_solutions_weighted: r.solution_count_weighted(),
            min_abs_element: r.min_abs_element(),
            s_classes: r.s_solutions().map(|t| t.class.name()).collect(),
        }),
        Err(SolveError::NoRealRoots) => Ok(PointCounts {
            n_solutions: 0,
            n_ssolutions: 0,
            n_solutions_weighted: 0,
            min_abs_element: f64::INFINITY,
            s_classes: Vec::new(),
        }),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub angles: [f64; 3],
    pub statuses: [RegionStatus; 6],
    pub n_solutions: usize,
    pub n_ssolutions: usize,
    pub min_abs_element: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingEvent {
    pub toroid: ToroidLabel,
    pub t_cross: f64,
    pub direction: Direction,
    pub count_before: usize,
    pub count_after: usize,
    pub s_count_before: usize,
    pub s_count_after: usize,
    pub min_abs_element_at_cross: f64,
    /// No other triangle toroid contains the crossing point.
    pub on_outer_surface: bool,
    pub verdict: Verdict,
    pub s_classes_before: Vec<String>,
    pub s_classes_after: Vec<String>,
    pub note: String,
}

impl CrossingEvent {
    pub fn delta_count(&self) -> i64 {
        self.count_after as i64 - self.count_before as i64
    }
}

/// A change of the solution count between two samples with no toroid
/// crossing in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountJump {
    pub t_before: f64,
    pub t_after: f64,
    pub count_before: usize,
    pub count_after: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub events: Vec<CrossingEvent>,
    pub unexplained: Vec<CountJump>,
}

fn excesses(p: &Vec3, toroids: &[ToroidSpec; 6]) -> Result<[f64; 6], ExperimentError> {
    let mut out = [0.0; 6];
    for (o, t) in out.iter_mut().zip(toroids) {
        *o = toroid_signed_excess(p, t).map_err(|e| ExperimentError::PathDegenerate(e.to_string()))?;
    }
    Ok(out)
}

fn segment_distance(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (a + t * ab - p).norm()
}

/// Counts at `t`, stepping off an exactly degenerate sample if needed.
fn counts_near(cfg: &SweepConfig, t: f64) -> Result<PointCounts, SolveError> {
    let mut last = None;
    for nudge in [0.0, 1e-12, -1e-12, 1e-10, -1e-10] {
        let tt = (t + nudge).clamp(0.0, 1.0);
        match counts_at(&cfg.tri, &cfg.point(tt), &cfg.opts) {
            Ok(c) => return Ok(c),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn inside(e: f64) -> bool {
    e > 0.0
}

fn refine(cfg: &SweepConfig, spec: &ToroidSpec, mut t0: f64, mut t1: f64) -> Result<f64, ExperimentError> {
    let side0 = inside(toroid_signed_excess(&cfg.point(t0), spec).map_err(|e| ExperimentError::PathDegenerate(e.to_string()))?);
    while t1 - t0 > CROSS_TOL_T {
        let mid = 0.5 * (t0 + t1);
        if mid <= t0 || mid >= t1 {
            break;
        }
        let e = toroid_signed_excess(&cfg.point(mid), spec).map_err(|e| ExperimentError::PathDegenerate(e.to_string()))?;
        if inside(e) == side0 {
            t0 = mid;
        } else {
            t1 = mid;
        }
    }
    Ok(0.5 * (t0 + t1))
}

struct Candidate {
    index: usize,
    bracket: usize,
    t: f64,
    direction: Direction,
    tangent: bool,
}

/// Walks the segment, records the per-step solution structure and judges
/// every toroid crossing.
pub fn sweep_path(cfg: &SweepConfig) -> Result<SweepResult, ExperimentError> {
    cfg.validate()?;
    let tri = &cfg.tri;
    let diameter = tri.diameter();
    for v in Vertex::ALL {
        if segment_distance(&tri.vertex(v), &cfg.start, &cfg.end) < VERTEX_CLEARANCE * diameter {
            return Err(ExperimentError::PathDegenerate(format!("path passes within {VERTEX_CLEARANCE} diameters of vertex {v}")));
        }
    }
    let toroids = tri.toroids();

    let mut rows = Vec::with_capacity(cfg.steps + 1);
    let mut ex = Vec::with_capacity(cfg.steps + 1);
    for k in 0..=cfg.steps {
        let t = k as f64 / cfg.steps as f64;
        let p = cfg.point(t);
        let e = excesses(&p, &toroids)?;
        let ang = subtended_angles(&p, tri).map_err(|e| ExperimentError::PathDegenerate(e.to_string()))?;
        let counts = counts_near(cfg, t).map_err(|e| ExperimentError::PathDegenerate(format!("solve failed at t = {t}: {e}")))?;
        rows.push(SweepRow {
            t,
            angles: ang.as_array(),
            statuses: e.map(|x| RegionStatus::from_excess(x, DEFAULT_EPS_ANGLE)),
            n_solutions: counts.n_solutions,
            n_ssolutions: counts.n_ssolutions,
            min_abs_element: counts.min_abs_element,
        });
        ex.push(e);
    }

    let mut cands = Vec::new();
    for k in 0..cfg.steps {
        for i in 0..6 {
            let (e0, e1) = (ex[k][i], ex[k + 1][i]);
            if inside(e0) != inside(e1) {
                let t = refine(cfg, &toroids[i], rows[k].t, rows[k + 1].t)?;
                let direction = if inside(e1) {
                    Direction::OutsideToInside
                } else {
                    Direction::InsideToOutside
                };
                cands.push(Candidate {
                    index: i,
                    bracket: k,
                    t,
                    direction,
                    tangent: false,
                });
            }
        }
    }
    // a sample on the surface with both neighbours on the same side
    for k in 1..cfg.steps {
        for i in 0..6 {
            if ex[k][i].abs() <= TANGENT_EXCESS && inside(ex[k - 1][i]) == inside(ex[k + 1][i]) {
                let direction = if inside(ex[k - 1][i]) {
                    Direction::InsideToOutside
                } else {
                    Direction::OutsideToInside
                };
                cands.push(Candidate {
                    index: i,
                    bracket: k,
                    t: rows[k].t,
                    direction,
                    tangent: true,
                });
            }
        }
    }
    cands.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.index.cmp(&b.index)));

    let mut events = Vec::with_capacity(cands.len());
    for c in &cands {
        let simultaneous = cands
            .iter()
            .any(|o| o.index != c.index && o.bracket == c.bracket && (o.t - c.t).abs() <= 2.0 * cfg.delta);
        events.push(judge(cfg, &toroids, c, simultaneous)?);
    }

    let mut unexplained = Vec::new();
    for k in 0..cfg.steps {
        if cands.iter().any(|c| c.bracket == k) {
            continue;
        }
        if rows[k].n_solutions != rows[k + 1].n_solutions {
            unexplained.push(CountJump {
                t_before: rows[k].t,
                t_after: rows[k + 1].t,
                count_before: rows[k].n_solutions,
                count_after: rows[k + 1].n_solutions,
            });
        }
    }

    Ok(SweepResult {
        rows,
        events,
        unexplained,
    })
}

fn judge(
    cfg: &SweepConfig,
    toroids: &[ToroidSpec; 6],
    c: &Candidate,
    simultaneous: bool,
) -> Result<CrossingEvent, ExperimentError> {
    let label = ToroidLabel::TRIANGLE[c.index];
    let tri = &cfg.tri;
    let before = counts_near(cfg, c.t - cfg.delta);
    let after = counts_near(cfg, c.t + cfg.delta);
    let at = counts_near(cfg, c.t);
    let e = excesses(&cfg.point(c.t), toroids)?;
    let on_outer_surface = e
        .iter()
        .enumerate()
        .all(|(j, &x)| j == c.index || x < -DEFAULT_EPS_ANGLE);

    let mut event = CrossingEvent {
        toroid: label,
        t_cross: c.t,
        direction: c.direction,
        count_before: 0,
        count_after: 0,
        s_count_before: 0,
        s_count_after: 0,
        min_abs_element_at_cross: f64::NAN,
        on_outer_surface,
        verdict: Verdict::Exceptional,
        s_classes_before: Vec::new(),
        s_classes_after: Vec::new(),
        note: String::new(),
    };
    let (before, after) = match (before, after) {
        (Ok(b), Ok(a)) => (b, a),
        (Err(e), _) | (_, Err(e)) => {
            event.note = format!("solve failed next to the crossing: {e}");
            return Ok(event);
        }
    };
    event.count_before = before.n_solutions;
    event.count_after = after.n_solutions;
    event.s_count_before = before.n_ssolutions;
    event.s_count_after = after.n_ssolutions;
    event.s_classes_before = before.s_classes;
    event.s_classes_after = after.s_classes;
    if let Ok(at) = &at {
        event.min_abs_element_at_cross = at.min_abs_element;
    }

    if c.tangent {
        event.note = "path tangent to the toroid".into();
        return Ok(event);
    }
    if simultaneous {
        event.note = "another toroid is crossed within the same window".into();
        return Ok(event);
    }

    let d = event.delta_count();
    let (verdict, note) = if label.is_supplement() {
        if on_outer_surface {
            (Verdict::Exceptional, "outer surface formed by a supplementary toroid".to_string())
        } else {
            let zero_elem = event.min_abs_element_at_cross < ZERO_ELEMENT_REL * tri.diameter();
            let ds = event.s_count_after as i64 - event.s_count_before as i64;
            if d == 0 && zero_elem && ds % 2 == 0 {
                // a pair of S-solutions can appear or vanish through a double
                // root right next to the surface; the crossing triplet itself
                // stays an S-solution
                let note = if ds != 0 {
                    format!("S-solution count {} -> {}", event.s_count_before, event.s_count_after)
                } else {
                    String::new()
                };
                (Verdict::ConsistentThm5, note)
            } else {
                (
                    Verdict::Violation,
                    format!(
                        "expected unchanged count and a vanishing element, got delta {d}, s-counts {} -> {}, min |s| {:e}",
                        event.s_count_before, event.s_count_after, event.min_abs_element_at_cross
                    ),
                )
            }
        }
    } else if on_outer_surface {
        let expected = match c.direction {
            Direction::OutsideToInside => -1,
            Direction::InsideToOutside => 1,
        };
        if d == expected {
            (Verdict::ConsistentThm4, String::new())
        } else {
            (Verdict::Violation, format!("outer surface crossing changed the count by {d}, expected {expected}"))
        }
    } else if d.abs() == 1 {
        (Verdict::ConsistentThm3, String::new())
    } else {
        (Verdict::Violation, format!("count changed by {d}, expected +-1"))
    };

    if verdict == Verdict::Violation && !tri.is_acute() {
        event.verdict = Verdict::Exceptional;
        event.note = format!("non-acute triangle: {note}");
    } else {
        event.verdict = verdict;
        event.note = note;
    }
    Ok(event)
}
