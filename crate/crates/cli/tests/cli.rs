use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contcrystal")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

const PATH: &str = r#"{"times":[0,1,2],"points":[[0,0],[-1,0.5],[0.3,1]]}"#;

#[test]
fn pitman_and_string_coords() {
    let v = json(&run(&["pitman", "--group", "A2", "--path", PATH]));
    assert_eq!(v["schema"], 1);
    assert_eq!(v["word"], serde_json::json!([1, 2, 1]));
    let v = json(&run(&["string-coords", "--group", "A2", "--path", PATH]));
    assert_eq!(v["coords"].as_array().unwrap().len(), 3);
}

#[test]
fn ghost_is_reported() {
    let v = json(&run(&["littelmann", "--root", "1", "--x", "5", "--path", PATH]));
    assert_eq!(v["ghost"], true);
    let v = json(&run(&["littelmann", "--root", "1", "--x", "-0.2", "--path", PATH]));
    assert_eq!(v["ghost"], false);
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        &["pitman", "--group", "Q7", "--path", PATH][..],
        &["pitman", "--path", r#"{"times":[0,1],"points":[[0],[1]]}"#],
        &["pitman", "--path", PATH, "--word", "1,1"],
        &["littelmann", "--root", "3", "--x", "0", "--path", PATH],
        &["inverse-string", "--lambda", "1,1", "--x", "9,9,9"],
        &["tropicalize", "t1 - t2"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let err = String::from_utf8_lossy(&out.stderr);
        assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    }
}

#[test]
fn csv_and_atomic_output() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("w.csv");
    let out = run(&["dh-sample", "--lambda", "1,1", "--pairings", "-n", "5", "--format", "csv", "--out", file.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&file).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.starts_with("v1,v2"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    // csv is refused for non-tabular output
    assert_eq!(run(&["pitman", "--path", PATH, "--format", "csv"]).status.code(), Some(2));
}

#[test]
fn tropicalize_prints_max_plus() {
    let v = json(&run(&["tropicalize", "t1 + 2*t2/t3", "--at", "t1=0.3,t2=1,t3=-0.4"]));
    assert_eq!(v["max_plus"], "t1 ∨ (t2 − t3)");
    assert_eq!(v["value"], 1.4);
}

#[test]
fn selftest_quick_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for f in [&a, &b] {
        let out = run(&["selftest", "--quick", "--seed", "7", "--out", f.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!x.is_empty());
    assert_eq!(x, y);
}
