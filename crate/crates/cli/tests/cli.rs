use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use p3p_core::triangle_from_sides;
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_p3p"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn scene(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

const EQUILATERAL: &str = r#""triangle": {"mode": "sides", "a": 1, "b": 1, "c": 1}"#;
/// Circumcenter of the unit equilateral triangle in the canonical frame.
const CC: (f64, f64) = (0.5, 0.288_675_134_594_812_9);

#[test]
fn solve_equilateral_axis() {
    let dir = TempDir::new().unwrap();
    let s = scene(
        &dir,
        "axis.json",
        &format!(r#"{{{EQUILATERAL}, "view": {{"mode": "center", "O": [{}, {}, 1.0]}}}}"#, CC.0, CC.1),
    );
    let out = run(&["solve", "--scene", arg(&s)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    let expected = 2.0 / 3f64.sqrt();
    let found = v["triplets"].as_array().unwrap().iter().any(|t| {
        ["s1", "s2", "s3"]
            .iter()
            .all(|k| (t[*k].as_f64().unwrap() - expected).abs() < 1e-9)
            && t["class"] == "Solution"
    });
    assert!(found, "{v:#}");
    assert!(v["region"]["per_toroid"].is_array());
    assert_eq!(v["quartic_coeffs"].as_array().unwrap().len(), 5);
}

#[test]
fn solve_on_toroid_pair_exits_3() {
    let dir = TempDir::new().unwrap();
    let tri = triangle_from_sides(2.0, 3.0, 4.0).unwrap();
    let s = scene(
        &dir,
        "pair.json",
        &format!(
            r#"{{"triangle": {{"mode": "sides", "a": 2, "b": 3, "c": 4}},
                "view": {{"mode": "angles", "alpha_rad": {:?}, "beta_rad": 1.0, "gamma_rad": 1.2}}}}"#,
            tri.angle_a
        ),
    );
    let out = run(&["solve", "--scene", arg(&s)]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("toroid pair") && stderr(&out).contains('A'), "{}", stderr(&out));
}

#[test]
fn degenerate_triangle_exits_2() {
    let dir = TempDir::new().unwrap();
    let s = scene(
        &dir,
        "flat.json",
        r#"{"triangle": {"mode": "sides", "a": 1, "b": 1, "c": 2}, "view": {"mode": "center", "O": [0, 0, 1]}}"#,
    );
    let out = run(&["solve", "--scene", arg(&s)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("degenerate"), "{}", stderr(&out));
}

#[test]
fn malformed_json_names_the_line() {
    let dir = TempDir::new().unwrap();
    let s = scene(&dir, "bad.json", "{\n  \"triangle\": {\"mode\": \"sides\", \"a\": 1,,\n}");
    let out = run(&["solve", "--scene", arg(&s)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let s = scene(
        &dir,
        "missing.json",
        r#"{"triangle": {"mode": "sides", "a": 1, "b": 1}, "view": {"mode": "center", "O": [0, 0, 1]}}"#,
    );
    let out = run(&["solve", "--scene", arg(&s)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("triangle.c"), "{}", stderr(&out));
}

#[test]
fn vertex_scenes_report_world_positions() {
    let dir = TempDir::new().unwrap();
    let s = scene(
        &dir,
        "world.json",
        r#"{"triangle": {"mode": "vertices", "A": [1, 2, 3], "B": [1, 2, 4], "C": [2, 2, 3]},
            "view": {"mode": "center", "O": [1.2, 5.0, 3.3]}}"#,
    );
    let out = run(&["solve", "--scene", arg(&s)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    let truth = [1.2, 5.0, 3.3];
    let hit = v["triplets"]
        .as_array()
        .unwrap()
        .iter()
        .filter_map(|t| t["positions"].as_array())
        .flatten()
        .any(|p| (0..3).all(|i| (p[i].as_f64().unwrap() - truth[i]).abs() < 1e-9));
    assert!(hit, "{v:#}");
}

#[test]
fn region_far_field_and_near_circumcenter() {
    let dir = TempDir::new().unwrap();
    let far = scene(&dir, "far.json", &format!(r#"{{{EQUILATERAL}, "view": {{"mode": "center", "O": [20, 30, 40]}}}}"#));
    let out = run(&["region", "--scene", arg(&far)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout_json(&out)["region"]["outside_union"], true);

    let near = scene(
        &dir,
        "near.json",
        &format!(r#"{{{EQUILATERAL}, "view": {{"mode": "center", "O": [{}, {}, 1e-3]}}}}"#, CC.0, CC.1),
    );
    let out = run(&["region", "--scene", arg(&near)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    for t in v["region"]["per_toroid"].as_array().unwrap() {
        if ["TA", "TB", "TC"].contains(&t["label"].as_str().unwrap()) {
            assert_eq!(t["status"], "Inside", "{t}");
        }
    }
}

#[test]
fn region_rejects_planar_centers_and_angle_views() {
    let dir = TempDir::new().unwrap();
    let planar = scene(
        &dir,
        "planar.json",
        &format!(r#"{{{EQUILATERAL}, "view": {{"mode": "center", "O": [{}, {}, 0]}}}}"#, CC.0, CC.1),
    );
    let out = run(&["region", "--scene", arg(&planar)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("PlanarCenter"), "{}", stderr(&out));

    let angles = scene(
        &dir,
        "angles.json",
        &format!(r#"{{{EQUILATERAL}, "view": {{"mode": "angles", "alpha_deg": 40, "beta_deg": 40, "gamma_deg": 40}}}}"#),
    );
    assert_eq!(code(&run(&["region", "--scene", arg(&angles)])), 2);
}

fn read_csv(p: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(p)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn sweep_outer_surface_crossing() {
    let dir = TempDir::new().unwrap();
    let s = scene(
        &dir,
        "in.json",
        &format!(r#"{{{EQUILATERAL}, "path": {{"start": [3.0, 0.3, 0.6], "end": [1.125, 0.3, 0.6]}}}}"#),
    );
    let rows_path = dir.path().join("rows.csv");
    let out = run(&["sweep", "--scene", arg(&s), "--steps", "150", "--out", arg(&rows_path)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = read_csv(&rows_path);
    assert_eq!(
        rows[0].join(","),
        "t,alpha_rad,beta_rad,gamma_rad,status_TA,status_TpiA,status_TB,status_TpiB,status_TC,status_TpiC,n_solutions,n_ssolutions,min_abs_element"
    );
    assert_eq!(rows.len(), 152);
    let events = read_csv(&dir.path().join("rows_events.csv"));
    assert_eq!(events[0].join(","), "toroid,t_cross,direction,count_before,count_after,verdict");
    assert_eq!(events.len(), 2, "{events:?}");
    let e = &events[1];
    assert_eq!(e[0], "TA");
    assert_eq!(e[2], "OutsideToInside");
    assert_eq!(e[5], "ConsistentThm4");
    let before: i64 = e[3].parse().unwrap();
    let after: i64 = e[4].parse().unwrap();
    assert_eq!(after, before - 1);
}

#[test]
fn sweep_without_crossings_keeps_the_count() {
    let dir = TempDir::new().unwrap();
    let s = scene(
        &dir,
        "far.json",
        &format!(r#"{{{EQUILATERAL}, "path": {{"start": [-4, -4, 2], "end": [4, -4, 3]}}}}"#),
    );
    let rows_path = dir.path().join("far.csv");
    let events_path = dir.path().join("ev.csv");
    let out = run(&["sweep", "--scene", arg(&s), "--out", arg(&rows_path), "--events", arg(&events_path)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(read_csv(&events_path).len(), 1);
    let rows = read_csv(&rows_path);
    let n: Vec<&str> = rows[1..].iter().map(|r| r[10].as_str()).collect();
    assert!(n.iter().all(|x| *x == n[0]));
}

#[test]
fn sweep_rejections() {
    let dir = TempDir::new().unwrap();
    let s = scene(
        &dir,
        "p.json",
        &format!(r#"{{{EQUILATERAL}, "path": {{"start": [-4, -4, 2], "end": [4, -4, 3]}}}}"#),
    );
    assert_eq!(code(&run(&["sweep", "--scene", arg(&s), "--steps", "50"])), 2);

    let v = scene(
        &dir,
        "v.json",
        &format!(r#"{{{EQUILATERAL}, "path": {{"start": [-1, 0, 0], "end": [0.5, 0, 0]}}}}"#),
    );
    let out = run(&["sweep", "--scene", arg(&v)]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn verify_theorem1_equilateral() {
    let out = run(&["verify", "--theorem", "1", "--trials", "10000", "--seed", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["violations"], 0);
    assert_eq!(v["trials"], 10000);
}

#[test]
fn verify_theorem3_acute_and_obtuse() {
    let out = run(&["verify", "--theorem", "3", "--trials", "1000", "--triangle", "equilateral"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout_json(&out)["violations"], 0);

    let out = run(&["verify", "--theorem", "3", "--trials", "200", "--triangle", "obtuse", "--seed", "4"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout_json(&out)["exceptional"].as_u64().is_some());
}

#[test]
fn verify_rejects_unknown_theorem() {
    let out = run(&["verify", "--theorem", "7"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("unknown theorem"));
}

#[test]
fn verify_is_byte_stable() {
    let args = ["verify", "--theorem", "lemmas", "--trials", "500", "--seed", "9", "--triangle", "3,4,5"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn oracle_matches_solver() {
    let dir = TempDir::new().unwrap();
    let s = scene(
        &dir,
        "o.json",
        r#"{"triangle": {"mode": "sides", "a": 1.0, "b": 1.3, "c": 0.8}, "view": {"mode": "center", "O": [0.2, -0.4, 0.9]}}"#,
    );
    let out = run(&["oracle", "--scene", arg(&s), "--grid", "512"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["solver_count"], v["oracle_count"]);
    assert!(v["solver_count"].as_u64().unwrap() >= 1);
    let diameter = 1.3;
    assert!(v["max_distance"].as_f64().unwrap() < 1e-4 * diameter);
}

#[test]
fn oracle_grid_and_empty_cases() {
    let dir = TempDir::new().unwrap();
    let s = scene(
        &dir,
        "o.json",
        &format!(r#"{{{EQUILATERAL}, "view": {{"mode": "center", "O": [0.2, -0.4, 0.9]}}}}"#),
    );
    assert_eq!(code(&run(&["oracle", "--scene", arg(&s), "--grid", "32"])), 2);

    // no three rays meet at these angles; one positive triplet still
    // satisfies the constraints algebraically
    let e = scene(
        &dir,
        "e.json",
        &format!(r#"{{{EQUILATERAL}, "view": {{"mode": "angles", "alpha_rad": 0.1, "beta_rad": 0.1, "gamma_rad": 2.5}}}}"#),
    );
    let out = run(&["oracle", "--scene", arg(&e), "--grid", "128"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["solver_count"], 0);
    assert_eq!(v["oracle_count"], 0);
    assert_eq!(v["unrealizable_solutions"], 1);
}

#[test]
fn oracle_symmetric_view_counts_four() {
    let dir = TempDir::new().unwrap();
    let s = scene(
        &dir,
        "sym.json",
        &format!(r#"{{{EQUILATERAL}, "view": {{"mode": "angles", "alpha_rad": 0.3, "beta_rad": 0.3, "gamma_rad": 0.3}}}}"#),
    );
    let out = run(&["oracle", "--scene", arg(&s), "--grid", "256"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["solver_count"], 4, "{v:#}");
    assert_eq!(v["oracle_count"], 4);
    assert_eq!(v["bijection"], true);
}

#[test]
fn csv_solve_output() {
    let dir = TempDir::new().unwrap();
    let s = scene(
        &dir,
        "c.json",
        &format!(r#"{{{EQUILATERAL}, "view": {{"mode": "center", "O": [{}, {}, 1.0]}}}}"#, CC.0, CC.1),
    );
    let out_path = dir.path().join("s.csv");
    let out = run(&["solve", "--scene", arg(&s), "--format", "csv", "--out", arg(&out_path)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = read_csv(&out_path);
    assert_eq!(rows[0].join(","), "s1,s2,s3,u,v,class,residual,root_multiplicity");
    assert!(rows.len() >= 2);
    // seventeen significant digits
    assert_eq!(rows[1][0].split('e').next().unwrap().len(), 18);
}
