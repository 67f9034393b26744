use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tropinit(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropinit")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SQUARE: &str = r#"{"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]}"#;

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = tropinit(&["--help"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("experiment"));
}

#[test]
fn unknown_flag_is_flag_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = tropinit(&["compile", "convex", "--nonsense"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("ERROR E_FLAG:"), "{}", stderr(&o));
}

#[test]
fn missing_input_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = tropinit(&["compile", "convex", "--in", "absent.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("ERROR E_IO:"));
}

#[test]
fn malformed_region_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.json"), r#"{"vertices": [[0, 0], [1, 0]]}"#).unwrap();
    let o = tropinit(&["compile", "convex", "--in", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("ERROR E_INPUT:"), "{}", stderr(&o));
}

#[test]
fn missing_output_directory_fails_before_work() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("sq.json"), SQUARE).unwrap();
    let o = tropinit(&["compile", "convex", "--in", "sq.json", "--out", "nowhere/spec.json"], dir.path());
    assert!(stderr(&o).starts_with("ERROR E_IO:"));
    assert!(!dir.path().join("nowhere").exists());
}

#[test]
fn compile_then_eval_separates_the_square() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("sq.json"), SQUARE).unwrap();
    fs::write(p.join("pts.csv"), "x1,x2,y\n0.5,0.5,1\n0.2,0.8,1\n1.5,0.5,0\n-0.3,-0.3,0\n").unwrap();
    let o = tropinit(&["compile", "convex", "--in", "sq.json", "--kappa", "30", "--out", "spec.json"], p);
    assert!(o.status.success(), "{}", stderr(&o));
    let spec: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("spec.json")).unwrap()).unwrap();
    assert_eq!(spec["format_version"], 1);

    let o = tropinit(&["eval", "--spec", "spec.json", "--data", "pts.csv", "--metrics", "m.json"], p);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = String::from_utf8(o.stdout).unwrap();
    let decisions: Vec<&str> = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(csv.lines().next(), Some("score,logit,prob,decision"));
    assert_eq!(decisions, ["1", "1", "0", "0"]);
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("m.json")).unwrap()).unwrap();
    assert_eq!(m["auc"], 1.0);
    assert_eq!(m["iou"], 1.0);
}

#[test]
fn union_train_and_render_write_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(
        p.join("u.json"),
        r#"{"components": [{"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]},
                           {"vertices": [[2, 0], [3, 0], [3, 1], [2, 1]]}]}"#,
    )
    .unwrap();
    fs::write(p.join("d.csv"), "x1,x2,y\n0.5,0.5,1\n2.5,0.5,1\n1.5,0.5,0\n-1,-1,0\n").unwrap();
    assert!(tropinit(&["compile", "union", "--in", "u.json", "--kappa", "40", "--out", "u_spec.json"], p)
        .status
        .success());
    let o = tropinit(
        &["train", "--spec", "u_spec.json", "--data", "d.csv", "--epochs", "4", "--curve", "c.csv", "--out", "t.json"],
        p,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(p.join("c.csv")).unwrap().lines().count(), 5);
    let o = tropinit(
        &[
            "render",
            "--spec",
            "t.json",
            "--window",
            "-1,4,-1,2",
            "--grid",
            "40",
            "--ppm",
            "m.ppm",
            "--contour",
            "k.csv",
        ],
        p,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let ppm = fs::read(p.join("m.ppm")).unwrap();
    assert!(ppm.starts_with(b"P6\n40 40\n255\n"));
    assert_eq!(ppm.len(), "P6\n40 40\n255\n".len() + 40 * 40 * 3);
    assert!(fs::read_to_string(p.join("k.csv")).unwrap().starts_with("polyline,x,y\n"));
}

#[test]
fn ls1d_fits_rectangle() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let mut csv = String::from("x,y\n");
    for i in 0..=80 {
        let x = -2.0 + 0.05 * i as f64;
        csv.push_str(&format!("{x},{}\n", u8::from(x.abs() < 1.0)));
    }
    fs::write(p.join("xy.csv"), csv).unwrap();
    let o = tropinit(&["compile", "ls1d", "--data", "xy.csv", "--centers", "-1,1", "--k", "20", "--out", "s.json"], p);
    assert!(o.status.success(), "{}", stderr(&o));
    let spec: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("s.json")).unwrap()).unwrap();
    assert_eq!(spec["layers"][0]["w"].as_array().unwrap().len(), 2);
}

#[test]
fn duality_check_reports_match() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(
        p.join("p.json"),
        r#"{"dim": 2, "monomials": [{"u": [0, 0], "c": 0}, {"u": [1, 0], "c": 0}, {"u": [0, 1], "c": 0},
                                     {"u": [1, 1], "c": -0.5}]}"#,
    )
    .unwrap();
    let o = tropinit(&["trop", "duality-check", "--poly", "p.json"], p);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["counts_match"], true);
}

#[test]
fn print_config_resolves_experiment_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o =
        tropinit(&["--print-config", "experiment", "--case", "double", "--seed", "9", "--outdir", "out"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["experiment"]["seed"], 9);
    assert_eq!(v["experiment"]["train_n"], 12000);
    assert!(!dir.path().join("out").exists());
}
