use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use riesz_cex::io::{write_field, FieldData};
use riesz_cex::{Field1D, Field2D, UniformGrid1D};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riesz-cex"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cex_run_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let svg = dir.path().join("a.svg");
    for out in [&a, &b] {
        let o = run(&["cex", "run", "--j0", "13", "--nmax", "18", "--a", "4", "--out", path_str(out), "--svg", path_str(&svg)]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("n,S_lower,L2sq_y0,N2,N3,margin_min,ratio\n"));
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 1 + 5);
    assert!(fs::read_to_string(&svg).unwrap().contains("<polyline"));
}

#[test]
fn cex_run_reads_config_and_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"j0": 13, "nmax": 15, "A": 4.0, "window_points": 257}"#).unwrap();
    let o = run(&["cex", "run", "--config", path_str(&cfg)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3, "{text}");
    assert!(text.lines().nth(1).unwrap().starts_with("14,"));
}

#[test]
fn cex_run_refuses_small_j0() {
    let o = run(&["cex", "run", "--j0", "3", "--nmax", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("increase j0"));
}

#[test]
fn validate_exit_codes() {
    let empty = run(&["cex", "validate", "--jmin", "5", "--jmax", "4"]);
    assert_eq!(empty.status.code(), Some(0));
    assert!(stdout(&empty).is_empty());
    let strict = run(&["cex", "validate", "--jmin", "5", "--jmax", "5", "--nx", "1024", "--tol", "1e-6"]);
    assert_eq!(strict.status.code(), Some(1));
    assert!(stdout(&strict).starts_with("FAIL j=5"));
    let coarse = run(&["cex", "validate", "--nx", "64"]);
    assert_eq!(coarse.status.code(), Some(2));
}

#[test]
fn interp_and_weak11_small() {
    let o = run(&["interp", "check", "--corpus", "2", "--n", "64", "--levels", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
    let bad = run(&["interp", "check", "--p0", "2", "--p", "1.5", "--p1", "3"]);
    assert_eq!(bad.status.code(), Some(2));
    let w = run(&["weak11", "--corpus", "3", "--n", "64", "--alphas", "0.01:1:log:5"]);
    assert_eq!(w.status.code(), Some(0));
    assert_eq!(stdout(&w).lines().count(), 4);
    let bad_sweep = run(&["weak11", "--alphas", "1:2:cubic:3"]);
    assert_eq!(bad_sweep.status.code(), Some(2));
}

#[test]
fn norms_of_field_files() {
    let dir = tempfile::tempdir().unwrap();
    let g = UniformGrid1D::new(0.0, 0.25, 5).unwrap();
    // |f(x, y)| = 2 everywhere on [0, 1]²
    let f = Field2D::from_real_fn(g, g, |_, _| 2.0).unwrap();
    let p2 = dir.path().join("f2.json");
    write_field(&p2, &FieldData::Two(f)).unwrap();
    let o = run(&["norms", "--input", path_str(&p2), "--inner-axis", "y", "--inner", "inf", "--outer", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "2");
    let h = Field1D::from_real_fn(g, |x| x).unwrap();
    let p1 = dir.path().join("f1.json");
    write_field(&p1, &FieldData::One(h)).unwrap();
    let o = run(&["norms", "--input", path_str(&p1), "--inner", "inf"]);
    assert_eq!(stdout(&o).trim(), "1");
    let o = run(&["norms", "--input", path_str(&p1), "--inner", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    fs::write(&p1, "{\"grid\": 3}").unwrap();
    assert_eq!(run(&["norms", "--input", path_str(&p1)]).status.code(), Some(2));
}

#[test]
fn czd_writes_decomposition_and_lifts() {
    let dir = tempfile::tempdir().unwrap();
    let gx = UniformGrid1D::new(0.0, 0.25, 16).unwrap();
    let gy = UniformGrid1D::new(0.0, 0.5, 3).unwrap();
    let f = Field2D::from_real_fn(gx, gy, |x, y| if x < 1.0 { 1.0 + y } else { 0.0 }).unwrap();
    let input = dir.path().join("f.json");
    write_field(&input, &FieldData::Two(f)).unwrap();
    let out = dir.path().join("dec.json");
    let o = run(&["czd", "--input", path_str(&input), "--alpha", "0.5", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dec: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(dec["alpha"], 0.5);
    let intervals = dec["intervals"].as_array().unwrap();
    assert!(!intervals.is_empty());
    for q in intervals {
        let avg = q["average"].as_f64().unwrap();
        assert!(avg > 0.5 && avg <= 1.0);
    }
    assert!(dir.path().join("dec.good.json").exists());
    assert!(dir.path().join("dec.bad.json").exists());
    let neg = run(&["czd", "--input", path_str(&input), "--alpha", "-1", "--out", path_str(&out)]);
    assert_eq!(neg.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}
