use std::path::{Path, PathBuf};
use std::process::Command;

use hypspec::cli::run;
use serde_json::Value;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn json(args: &[&str]) -> Value {
    let out = run(std::iter::once("hypspec").chain(args.iter().copied())).unwrap();
    serde_json::from_str(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hypspec-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn homology_of_rp2() {
    let v = json(&["complex", "homology", &fixture("rp2.json")]);
    let text = v.to_string();
    assert!(text.contains("\"2\""), "{text}");
}

#[test]
fn spectrum_of_triangle_graph() {
    let v = json(&["spectrum", &fixture("c3.json"), "--degree", "0"]);
    assert!((v["lambda1"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert_eq!(v["kernel_dim"], 1);
}

#[test]
fn comb_fill_of_disc_cycle() {
    let v = json(&["scl", "fill", &fixture("torus.json"), "--cycle", &fixture("torus_disc_cycle.json")]);
    assert_eq!(v["m"], "7");
    assert_eq!(v["boundary_exact"], true);
    let whitney = run([
        "hypspec",
        "scl",
        "fill",
        &fixture("torus.json"),
        "--cycle",
        &fixture("torus_disc_cycle.json"),
        "--inner",
        "whitney",
    ]);
    assert!(matches!(whitney, Err(hypspec::Error::MissingParameter(_))));
}

#[test]
fn constants_command() {
    let v = json(&["constants", "--n", "3", "--q", "1", "--L", "1", "--lambda", "1"]);
    assert!((v["moser"]["value"].as_f64().unwrap() - 3.778321867089760874).abs() < 1e-9);
}

#[test]
fn bounds_all_writes_artifacts() {
    let dir = scratch("bounds");
    let out = run([
        "hypspec",
        "bounds",
        "all",
        "--params",
        &fixture("torus_params.json"),
        "--attach",
        &format!("{},{}", fixture("torus.json"), fixture("unit_geometry.json")),
    ])
    .unwrap();
    hypspec::cli::write_outputs(&dir, &out).unwrap();
    let csv = std::fs::read_to_string(dir.join("bounds.csv")).unwrap();
    assert_eq!(csv.lines().count(), hypspec::bounds::catalogue().len() + 1);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("bounds.json")).unwrap()).unwrap();
    assert_eq!(v["reports"].as_array().unwrap().len(), hypspec::bounds::catalogue().len());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_hypspec");
    let dir = scratch("missing");
    let st = Command::new(bin)
        .args(["--out", dir.to_str().unwrap(), "complex", "homology", "/no/such/file.json"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&st.stderr).starts_with("error:"));
    assert!(!dir.exists(), "no artifacts after a failure");

    let st = Command::new(bin).args(["bounds", "eval", "--id", "nope"]).output().unwrap();
    assert_ne!(st.status.code(), Some(0));

    let st = Command::new(bin).args(["frobnicate"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));

    let st = Command::new(bin).args(["complex", "validate", &fixture("torus.json")]).output().unwrap();
    assert_eq!(st.status.code(), Some(0));
}
