use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str], tag: &str) -> (Output, PathBuf) {
    let out = std::env::temp_dir().join(format!("bubblelab-cli-{tag}-{}", std::process::id()));
    let o = Command::new(env!("CARGO_BIN_EXE_bubblelab")).args(args).arg("--out").arg(&out).output().unwrap();
    (o, out)
}

fn json(path: PathBuf) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn reduce_slope_at_n7_beta4() {
    let (o, out) = run(&["reduce", "--N", "7", "--beta", "4"], "reduce");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(out.join("reduce.json"));
    assert!((v["fit"]["slope"].as_f64().unwrap() - 5.0).abs() < 0.1);
    let csv = std::fs::read_to_string(out.join("reduce.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn reduce_rejects_outside_window() {
    let (o, out) = run(&["reduce", "--N", "7", "--beta", "2"], "reject");
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("REJECT"));
    assert_eq!(json(out.join("reduce.json"))["verdict"], "REJECT");
}

#[test]
fn nonexist_contradiction() {
    let (o, out) = run(&["nonexist", "--q0", "1"], "nonexist");
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("CONTRADICTION"));
    assert_eq!(json(out.join("nonexist.json"))["verdict"], "CONTRADICTION");
    let (o, _) = run(&["nonexist", "--q0", "0"], "noobstruction");
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("NOOBSTRUCTION"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = std::env::temp_dir().join(format!("bubblelab-cli-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("sweep.toml");
    std::fs::write(&f, "cases = [[5, 2.0], [7, 4.0], [7, 5.0]]\nspacings = [8.0, 16.0, 32.0, 64.0]\nm = 2\n").unwrap();
    let (o, out) = run(&["sweep", "--config", f.to_str().unwrap(), "--m", "1"], "sweep");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    // two accepted cases with four spacings, one rejected row
    assert_eq!(csv.lines().count(), 1 + 4 + 4 + 1);
    assert_eq!(json(out.join("params.json"))["m"], 1);
}

#[test]
fn low_dimension_warns_before_running() {
    let (o, _) = run(&["diagnose", "--N", "6", "--beta", "1"], "warn");
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("warning: N = 6"), "{err}");
    assert!(err.contains("REJECT"));
    assert!(!o.status.success());
}

#[test]
fn correct_writes_field() {
    let (o, out) = run(&["correct", "--mu", "8", "--L", "8", "--m", "1"], "correct");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let phi = bubblelab::Field::load(&out.join("phi.field")).unwrap();
    let v = json(out.join("correct.json"));
    assert!(phi.max_abs() > 0.0);
    assert!(v["correction"]["max_ratio_after_first"].as_f64().unwrap() <= 0.5);
}
