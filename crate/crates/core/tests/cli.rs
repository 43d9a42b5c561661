use std::path::Path;
use std::process::Command;

const PARAMS: &str = r#"{"d":1,"gamma":0.5,"beta":1.0,"delta":2.0,"p":0.5,"A":1.0,"lambda":1.0,"kernel":"pa","profile":{"kind":"polynomial","x0":0.25}}"#;

fn wdrcm(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_wdrcm")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, json).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn theta_run_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "theta.json",
        &format!(r#"{{"kind":"theta","params":{PARAMS},"domain":{{"L":10}},"replications":10,"seed":1}}"#),
    );
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let out_c = dir.path().join("c");
    let a = wdrcm(&["theta", "--config", &cfg, "--out", out_a.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let b = wdrcm(&["theta", "--config", &cfg, "--out", out_b.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(b.status.code(), Some(0));
    let c = wdrcm(&["theta", "--config", &cfg, "--out", out_c.to_str().unwrap(), "--seed", "2"]);
    assert_eq!(c.status.code(), Some(0));
    let read = |d: &Path| std::fs::read(d.join("theta.csv")).unwrap();
    assert_eq!(read(&out_a), read(&out_b));
    assert_ne!(read(&out_a), read(&out_c));
    let text = String::from_utf8(read(&out_a)).unwrap();
    assert_eq!(text.lines().count(), 11);
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_c.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["master_seed"], 2);
    assert_eq!(manifest["config"]["seed"], 2);
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep.json",
        &format!(r#"{{"kind":"sweep","params":{PARAMS},"p_grid":[],"l_grid":[10],"replications":2,"seed":1}}"#),
    );
    let out = dir.path().join("o");
    let r = wdrcm(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("p_grid"));
    assert!(!out.exists() || std::fs::read_dir(&out).unwrap().count() == 0);

    let r = wdrcm(&["theta", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("kind"));

    let bad = write_config(dir.path(), "bad.json", r#"{"kind":"theta","colour":1}"#);
    let r = wdrcm(&["theta", "--config", &bad, "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("colour"));
}

#[test]
fn paths_selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "p.json",
        r#"{"kind":"paths-selftest","seed":4,"random_sequences":1000,"bijection_max_k":5}"#,
    );
    let out = dir.path().join("o");
    let r = wdrcm(&["paths-selftest", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0));
    let text = std::fs::read_to_string(out.join("paths_selftest.csv")).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
    assert!(text.contains("catalan,8,40320,1430,1430,true"));
}

#[test]
fn trace_prints_construction() {
    let r = wdrcm(&["trace", "--marks", "0.3,0.8,0.5,0.9,0.2"]);
    assert_eq!(r.status.code(), Some(0));
    let s = String::from_utf8(r.stdout).unwrap();
    assert!(s.contains("skeleton indices=0,4"));
    assert!(s.contains("ok=true"));
    let r = wdrcm(&["trace", "--marks", "0.3,0.3"]);
    assert_eq!(r.status.code(), Some(2));
}
