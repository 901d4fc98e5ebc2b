use std::path::Path;
use std::process::Command;

use membrane_eig::fem::obj::{format_obj, quad_split_square, read_obj};
use membrane_eig::fem::scene::run_scene;
use membrane_eig::Error;

const BIN: &str = env!("CARGO_BIN_EXE_membrane-eig");

fn write_scene(dir: &Path, extra: &str) -> std::path::PathBuf {
    let mesh = quad_split_square(4, 1.0);
    std::fs::write(dir.join("sheet.obj"), format_obj(&mesh.positions, &mesh.triangles)).unwrap();
    let pins: Vec<String> = (0..=4)
        .flat_map(|j| {
            let y = j as f64 / 4.0;
            [
                format!(r#"{{"vertex": {}, "target": [0.0, {y}, 0.0]}}"#, j * 5),
                format!(r#"{{"vertex": {}, "target": [1.4, {y}, 0.0]}}"#, j * 5 + 4),
            ]
        })
        .collect();
    let scene = format!(
        r#"{{"mesh": "sheet.obj", "model": {{"type": "neo_hookean_sheet", "mu": 1.0}}, "pins": [{}], "output_dir": "run"{extra}}}"#,
        pins.join(", ")
    );
    let path = dir.join("scene.json");
    std::fs::write(&path, scene).unwrap();
    path
}

#[test]
fn obj_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = quad_split_square(3, 2.0);
    let path = dir.path().join("m.obj");
    std::fs::write(&path, format_obj(&mesh.positions, &mesh.triangles)).unwrap();
    assert_eq!(read_obj(&path).unwrap(), mesh);
    assert!(matches!(read_obj(&dir.path().join("missing.obj")), Err(Error::Io(_))));
}

#[test]
fn scene_run_writes_frames_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(dir.path(), "");
    let outcome = run_scene(&scene).unwrap();
    let out = dir.path().join("run");
    assert_eq!(outcome.output_dir, out);
    assert_eq!(outcome.frames, outcome.report.iterations + 1);
    for k in 0..outcome.frames {
        let frame = read_obj(&out.join(format!("frame_{k:04}.obj"))).unwrap();
        assert_eq!(frame.triangles.len(), 32);
    }
    let csv = std::fs::read_to_string(out.join("convergence.csv")).unwrap();
    assert!(csv.starts_with("iter,energy,grad_norm,step\n"));
    assert_eq!(csv.lines().count(), outcome.report.history.len() + 1);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["termination"], "converged");
}

#[test]
fn scene_rejects_unknown_fields_and_bad_pins() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(dir.path(), r#", "damping": 0.1"#);
    assert!(matches!(run_scene(&scene), Err(Error::Json(_))));
    std::fs::write(
        &scene,
        r#"{"mesh": "sheet.obj", "model": {"type": "neo_hookean_sheet", "mu": 1.0}, "pins": [{"vertex": 99, "target": [0,0,0]}]}"#,
    )
    .unwrap();
    assert!(matches!(run_scene(&scene), Err(Error::InvalidInput(_))));
}

#[test]
fn cli_eigs_prints_the_known_spectrum() {
    let out = Command::new(BIN)
        .args(["eigs", "--f", "2,0,0,1,0,0", "--json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let mut lambdas: Vec<f64> = v["pairs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["lambda"].as_f64().unwrap())
        .collect();
    lambdas.sort_by(f64::total_cmp);
    let expect = [0.75, 0.875, 0.9375, 1.092_450_169_412_741, 1.125, 1.845_049_830_587_259];
    for (a, b) in lambdas.iter().zip(expect) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    let out = Command::new(BIN)
        .args(["eigs", "--f", "2,0,0,1,0,0", "--invariant", "I1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("lambda[2] = 0.666666666666667"));
}

#[test]
fn cli_eigs_rejects_bad_input() {
    let out = Command::new(BIN).args(["eigs", "--f", "1,2,3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(BIN)
        .args(["eigs", "--f", "1,0,0,0,0,0", "--invariant", "I3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cli_check_is_deterministic_and_passes() {
    let run = || {
        Command::new(BIN)
            .args(["check", "--seed", "7", "--trials", "50", "--json"])
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let zero = Command::new(BIN).args(["check", "--trials", "0"]).output().unwrap();
    assert_eq!(zero.status.code(), Some(2));
}

#[test]
fn cli_solve_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(dir.path(), "");
    let out = Command::new(BIN)
        .args(["solve", "--scene"])
        .arg(&scene)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("Converged"));

    let out = Command::new(BIN).args(["bench", "--trials", "200"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("samples,analytic_ns,numerical_ns,speedup\n200,"));
}
