use std::path::{Path, PathBuf};

use p3p_core::experiments::{
    random_triangle, sweep_path, trial_rng, verify_crossing_theorems, verify_ground_truth, verify_lemma_suite,
    verify_sign_law, verify_theorem1, verify_theorem2, CrossingKind, SweepConfig, SweepResult, TheoremReport,
    TriangleKind, Verdict,
};
use p3p_core::oracle::{brute_force_solve, compare, PositionMatch};
use p3p_core::quartic::grunert_coefficients;
use p3p_core::solver::RootFailure;
use p3p_core::{
    classify_region, positions_from_triplet, solve_p3p, subtended_angles, triangle_from_sides, ControlTriangle,
    RealRoot, RegionReport, RootSet, SolveError, SolveOptions, SolveReport, Vec3, ViewAngles,
};
use serde::Serialize;

use crate::error::CliError;
use crate::scene::{check_off_plane, Scene, View};

/// Matched oracle positions must agree to this fraction of the diameter.
const ORACLE_MATCH_REL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every command.
#[derive(Debug, Clone)]
pub struct Common {
    pub scene: Option<PathBuf>,
    pub tol: f64,
    pub seed: u64,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl Common {
    fn scene(&self) -> Result<Scene, CliError> {
        let path = self.scene.as_ref().ok_or_else(|| CliError::validation("--scene is required"))?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
        Scene::parse(&text)
    }

    fn options(&self) -> Result<SolveOptions, CliError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::validation(format!("--tol must be positive, got {}", self.tol)));
        }
        Ok(SolveOptions {
            residual_tol: self.tol,
            ..SolveOptions::default()
        })
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Seventeen significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

#[derive(Debug, Serialize)]
struct AnglesOut {
    alpha_rad: f64,
    beta_rad: f64,
    gamma_rad: f64,
}

impl From<&ViewAngles> for AnglesOut {
    fn from(a: &ViewAngles) -> Self {
        AnglesOut {
            alpha_rad: a.alpha,
            beta_rad: a.beta,
            gamma_rad: a.gamma,
        }
    }
}

#[derive(Debug, Serialize)]
struct TripletOut {
    s1: f64,
    s2: f64,
    s3: f64,
    u: f64,
    v: f64,
    class: String,
    residual: f64,
    root_multiplicity: u32,
    /// World-frame optical centers, for solutions only.
    #[serde(skip_serializing_if = "Option::is_none")]
    positions: Option<Vec<[f64; 3]>>,
}

#[derive(Debug, Serialize)]
struct SolveOut {
    triangle_sides: [f64; 3],
    angles: AnglesOut,
    non_realizable: bool,
    /// `[A4, A3, A2, A1, A0]`.
    quartic_coeffs: [f64; 5],
    roots: Vec<RealRoot>,
    complex_pair_count: u32,
    solution_count: usize,
    s_solution_count: usize,
    triplets: Vec<TripletOut>,
    failures: Vec<RootFailure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    region: Option<RegionReport>,
}

/// Angles and optional region report for the scene's view.
fn view_angles(scene: &Scene) -> Result<(ViewAngles, Option<Vec3>), CliError> {
    match scene.view()? {
        View::Center(o) => {
            check_off_plane(&o, &scene.triangle)?;
            Ok((subtended_angles(&o, &scene.triangle)?, Some(o)))
        }
        View::Angles(a) => Ok((a, None)),
    }
}

/// Solves, treating a quartic without real roots as an empty result.
fn solve_or_empty(tri: &ControlTriangle, ang: &ViewAngles, opts: &SolveOptions) -> Result<SolveReport, CliError> {
    match solve_p3p(tri, ang, opts) {
        Ok(r) => Ok(r),
        Err(SolveError::NoRealRoots) => Ok(SolveReport {
            quartic: grunert_coefficients(tri, ang),
            root_set: RootSet {
                roots: Vec::new(),
                complex_pair_count: 2,
            },
            triplets: Vec::new(),
            failures: Vec::new(),
            region: None,
            non_realizable: !ang.is_realizable(),
        }),
        Err(e) => Err(e.into()),
    }
}

pub fn solve(common: &Common) -> Result<(), CliError> {
    let scene = common.scene()?;
    let opts = common.options()?;
    let tri = &scene.triangle;
    let (ang, center) = view_angles(&scene)?;
    let mut report = solve_or_empty(tri, &ang, &opts)?;
    if let Some(o) = center {
        report.region = Some(classify_region(&o, tri, p3p_core::geom::DEFAULT_EPS_ANGLE)?);
    }
    let triplets: Vec<TripletOut> = report
        .triplets
        .iter()
        .map(|t| TripletOut {
            s1: t.s[0],
            s2: t.s[1],
            s3: t.s[2],
            u: t.u,
            v: t.v,
            class: t.class.name(),
            residual: t.residual,
            root_multiplicity: t.root_multiplicity,
            positions: t
                .is_solution()
                .then(|| positions_from_triplet(&t.s, tri).ok())
                .flatten()
                .map(|ps| ps.iter().map(|p| scene.to_world(p)).collect()),
        })
        .collect();

    let text = match common.format(Format::Json) {
        Format::Json => json(&SolveOut {
            triangle_sides: tri.sides(),
            angles: AnglesOut::from(&ang),
            non_realizable: report.non_realizable,
            quartic_coeffs: report.quartic.coeffs,
            roots: report.root_set.roots.clone(),
            complex_pair_count: report.root_set.complex_pair_count,
            solution_count: report.solution_count(),
            s_solution_count: report.s_solution_count(),
            triplets,
            failures: report.failures.clone(),
            region: report.region,
        })?,
        Format::Csv => csv_text(
            &["s1", "s2", "s3", "u", "v", "class", "residual", "root_multiplicity"],
            triplets
                .iter()
                .map(|t| {
                    vec![
                        num(t.s1),
                        num(t.s2),
                        num(t.s3),
                        num(t.u),
                        num(t.v),
                        t.class.clone(),
                        num(t.residual),
                        t.root_multiplicity.to_string(),
                    ]
                })
                .collect(),
        )?,
    };
    emit(common.out.as_deref(), &text)
}

#[derive(Debug, Serialize)]
struct RegionOut {
    center: [f64; 3],
    region: RegionReport,
}

pub fn region(common: &Common) -> Result<(), CliError> {
    let scene = common.scene()?;
    let o = scene.center()?;
    let report = classify_region(&o, &scene.triangle, p3p_core::geom::DEFAULT_EPS_ANGLE)?;
    let text = match common.format(Format::Json) {
        Format::Json => json(&RegionOut {
            center: scene.to_world(&o),
            region: report,
        })?,
        Format::Csv => csv_text(
            &["toroid", "status", "excess_rad"],
            report
                .per_toroid
                .iter()
                .map(|s| vec![s.label.short_name().to_string(), s.status.as_str().to_string(), num(s.excess_rad)])
                .collect(),
        )?,
    };
    emit(common.out.as_deref(), &text)
}

pub const SWEEP_COLUMNS: [&str; 13] = [
    "t",
    "alpha_rad",
    "beta_rad",
    "gamma_rad",
    "status_TA",
    "status_TpiA",
    "status_TB",
    "status_TpiB",
    "status_TC",
    "status_TpiC",
    "n_solutions",
    "n_ssolutions",
    "min_abs_element",
];

pub const EVENT_COLUMNS: [&str; 6] = ["toroid", "t_cross", "direction", "count_before", "count_after", "verdict"];

fn sweep_csv(result: &SweepResult) -> Result<(String, String), CliError> {
    let rows = result
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![num(r.t)];
            row.extend(r.angles.iter().map(|a| num(*a)));
            row.extend(r.statuses.iter().map(|s| s.as_str().to_string()));
            row.push(r.n_solutions.to_string());
            row.push(r.n_ssolutions.to_string());
            row.push(num(r.min_abs_element));
            row
        })
        .collect();
    let events = result
        .events
        .iter()
        .map(|e| {
            vec![
                e.toroid.short_name().to_string(),
                num(e.t_cross),
                e.direction.as_str().to_string(),
                e.count_before.to_string(),
                e.count_after.to_string(),
                e.verdict.as_str().to_string(),
            ]
        })
        .collect();
    Ok((csv_text(&SWEEP_COLUMNS, rows)?, csv_text(&EVENT_COLUMNS, events)?))
}

/// `<dir>/<stem>_events.csv` next to `out`.
fn events_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_events.csv"))
}

pub fn sweep(common: &Common, steps: usize, delta: f64, events: Option<&Path>) -> Result<(), CliError> {
    let scene = common.scene()?;
    let (start, end) = scene
        .path
        .ok_or_else(|| CliError::validation("sweep needs a scene with a path {start, end}"))?;
    let cfg = SweepConfig {
        steps,
        delta,
        seed: common.seed,
        opts: common.options()?,
        ..SweepConfig::new(scene.triangle, start, end)
    };
    let result = sweep_path(&cfg)?;

    match common.format(Format::Csv) {
        Format::Csv => {
            let (rows, evs) = sweep_csv(&result)?;
            emit(common.out.as_deref(), &rows)?;
            let target = events.map(Path::to_path_buf).or_else(|| common.out.as_deref().map(events_path));
            if let Some(path) = target {
                std::fs::write(path, evs)?;
            }
        }
        Format::Json => emit(common.out.as_deref(), &json(&result)?)?,
    }

    let violations = result.events.iter().filter(|e| e.verdict == Verdict::Violation).count();
    if violations > 0 {
        return Err(CliError::Violation(format!("{violations} crossing(s) contradict the expected count change")));
    }
    Ok(())
}

/// `equilateral`, `acute`, `obtuse` (random, from the seed) or `a,b,c`.
fn parse_triangle(spec: &str, seed: u64) -> Result<ControlTriangle, CliError> {
    // a generator stream no campaign trial uses
    let mut rng = trial_rng(seed, u64::MAX);
    match spec {
        "equilateral" => Ok(ControlTriangle::equilateral(1.0)),
        "acute" => Ok(random_triangle(&mut rng, TriangleKind::Acute)),
        "obtuse" => Ok(random_triangle(&mut rng, TriangleKind::Obtuse)),
        _ => {
            let sides: Result<Vec<f64>, _> = spec.split(',').map(|s| s.trim().parse::<f64>()).collect();
            match sides.as_deref() {
                Ok([a, b, c]) => Ok(triangle_from_sides(*a, *b, *c)?),
                _ => Err(CliError::validation(format!(
                    "--triangle must be equilateral, acute, obtuse or a,b,c; got {spec:?}"
                ))),
            }
        }
    }
}

pub fn verify(common: &Common, theorem: &str, trials: usize, triangle: Option<&str>) -> Result<(), CliError> {
    let tri = match (triangle, &common.scene) {
        (Some(spec), _) => parse_triangle(spec, common.seed)?,
        (None, Some(_)) => common.scene()?.triangle,
        (None, None) => ControlTriangle::equilateral(1.0),
    };
    let seed = common.seed;
    let report: TheoremReport = match theorem {
        "1" => verify_theorem1(&tri, trials, seed)?,
        "2" => verify_theorem2(&tri, trials, seed)?,
        "3" => verify_crossing_theorems(&tri, CrossingKind::Theorem3, trials, seed)?,
        "4" => verify_crossing_theorems(&tri, CrossingKind::Theorem4, trials, seed)?,
        "5" => verify_crossing_theorems(&tri, CrossingKind::Theorem5, trials, seed)?,
        "lemmas" => verify_lemma_suite(&tri, trials, seed)?,
        "sign-law" => verify_sign_law(&tri, trials, seed)?,
        "ground-truth" => verify_ground_truth(trials, seed)?,
        other => {
            return Err(CliError::validation(format!(
                "unknown theorem {other:?}; expected 1, 2, 3, 4, 5, lemmas, sign-law or ground-truth"
            )))
        }
    };
    let text = match common.format(Format::Json) {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut rows = vec![
                vec!["trials".to_string(), report.trials.to_string()],
                vec!["consistent".to_string(), report.consistent.to_string()],
                vec!["violations".to_string(), report.violations.to_string()],
                vec!["exceptional".to_string(), report.exceptional.to_string()],
            ];
            rows.extend(report.tallies.iter().map(|(k, v)| vec![k.clone(), v.to_string()]));
            csv_text(&["field", "value"], rows)?
        }
    };
    emit(common.out.as_deref(), &text)?;
    eprintln!("{}", report.summary());
    if report.violations > 0 {
        return Err(CliError::Violation(format!("{} violation(s)", report.violations)));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct OracleOut {
    grid: usize,
    solver_count: usize,
    unrealizable_solutions: usize,
    oracle_count: usize,
    counts_equal: bool,
    bijection: bool,
    match_tolerance: f64,
    max_distance: f64,
    grid_too_coarse: bool,
    matches: Vec<PositionMatch>,
    solver_positions: Vec<[f64; 3]>,
    oracle_centers: Vec<[f64; 3]>,
    unmatched_solver: Vec<usize>,
    unmatched_oracle: Vec<usize>,
}

pub fn oracle(common: &Common, grid: usize) -> Result<(), CliError> {
    let scene = common.scene()?;
    let opts = common.options()?;
    let tri = &scene.triangle;
    let (ang, _) = view_angles(&scene)?;
    let found = brute_force_solve(tri, &ang, grid, grid)?;
    let report = solve_or_empty(tri, &ang, &opts)?;
    let tol = ORACLE_MATCH_REL * tri.diameter();
    let cmp = compare(&report, &found, tol);
    let world = |ps: &[[f64; 3]]| ps.iter().map(|p| scene.to_world(&Vec3::from(*p))).collect::<Vec<_>>();
    let out = OracleOut {
        grid,
        solver_count: cmp.solver_count,
        unrealizable_solutions: cmp.unrealizable_solutions,
        oracle_count: cmp.oracle_count,
        counts_equal: cmp.counts_equal(),
        bijection: cmp.is_bijection(),
        match_tolerance: tol,
        max_distance: cmp.max_distance,
        grid_too_coarse: cmp.grid_too_coarse,
        matches: cmp.matches.clone(),
        solver_positions: world(&cmp.solver_positions),
        oracle_centers: world(&found.centers),
        unmatched_solver: cmp.unmatched_solver.clone(),
        unmatched_oracle: cmp.unmatched_oracle.clone(),
    };
    let text = match common.format(Format::Json) {
        Format::Json => json(&out)?,
        Format::Csv => csv_text(
            &["solver_index", "oracle_index", "distance"],
            out.matches
                .iter()
                .map(|m| vec![m.solver_index.to_string(), m.oracle_index.to_string(), num(m.distance)])
                .collect(),
        )?,
    };
    emit(common.out.as_deref(), &text)
}
