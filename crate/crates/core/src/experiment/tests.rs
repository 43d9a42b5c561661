use super::*;
use crate::experiment::schema::lookup;

fn params_json(p: f64) -> String {
    format!(
        r#"{{"d":1,"gamma":0.5,"beta":1.0,"delta":2.0,"p":{p},"A":1.0,"lambda":1.0,"kernel":"pa","profile":{{"kind":"polynomial","x0":0.25}}}}"#
    )
}

fn theta_config() -> ExperimentConfig {
    ExperimentConfig::from_json(&format!(
        r#"{{"kind":"theta","params":{},"domain":{{"shape":"torus","L":10}},"replications":10,"seed":5}}"#,
        params_json(0.5)
    ))
    .unwrap()
}

/// Every file in the manifest exists, has the registered header and a
/// leading schema tag on every row.
fn check_outputs(dir: &Path, m: &Manifest) {
    for o in &m.outputs {
        let schema = lookup(&o.schema).expect("registered");
        let mut r = csv::Reader::from_path(dir.join(&o.file)).unwrap();
        let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
        assert_eq!(header, schema.columns, "{}", o.file);
        let mut n = 0;
        for rec in r.records() {
            let rec = rec.unwrap();
            assert_eq!(&rec[0], schema.tag);
            n += 1;
        }
        assert_eq!(n, o.rows, "{}", o.file);
    }
}

#[test]
fn minimal_theta_run() {
    let dir = tempfile::tempdir().unwrap();
    let s = run(&theta_config(), Some(dir.path())).unwrap();
    assert_eq!(s.exit_code(), EXIT_SUCCESS);
    assert_eq!(s.manifest.outputs[0].file, "theta.csv");
    assert_eq!(s.manifest.outputs[0].rows, 10);
    assert_eq!(s.manifest.outputs[1].rows, 1);
    check_outputs(dir.path(), &s.manifest);
    let text = std::fs::read_to_string(dir.path().join(output::MANIFEST_FILE)).unwrap();
    let back: Manifest = serde_json::from_str(&text).unwrap();
    assert_eq!(back.config.seed, Some(5));
    assert_eq!(back.config.output.as_deref(), Some(dir.path()));
    assert!(back.wall_time_seconds >= 0.0);
}

#[test]
fn rerun_is_byte_identical_and_seed_matters() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = theta_config();
    run(&cfg, Some(a.path())).unwrap();
    run(&cfg, Some(b.path())).unwrap();
    for f in ["theta.csv", "theta_summary.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap()
        );
    }
    let mut other = cfg.clone();
    other.seed = Some(6);
    let c = tempfile::tempdir().unwrap();
    run(&other, Some(c.path())).unwrap();
    assert_ne!(
        std::fs::read(a.path().join("theta.csv")).unwrap(),
        std::fs::read(c.path().join("theta.csv")).unwrap()
    );
}

#[test]
fn validation_names_fields() {
    let p = params_json(0.5);
    let cases = [
        (format!(r#"{{"kind":"sweep","params":{p},"p_grid":[],"l_grid":[10],"replications":2,"seed":1}}"#), "p_grid"),
        (format!(r#"{{"kind":"sweep","params":{p},"p_grid":[0.5],"replications":2,"seed":1}}"#), "l_grid"),
        (format!(r#"{{"kind":"sweep","params":{p},"p_grid":[0.5],"l_grid":[10],"replications":2}}"#), "seed"),
        (format!(r#"{{"kind":"sweep","params":{p},"p_grid":[1.5],"l_grid":[10],"replications":2,"seed":1}}"#), "p_grid"),
        (format!(r#"{{"kind":"aba","params":{p},"t_grid":[],"replications":2,"seed":1}}"#), "t_grid"),
        (format!(r#"{{"kind":"construct","params":{p},"s0_grid":[0.1],"steps":3,"seed":1}}"#), "replications"),
        (format!(r#"{{"kind":"theta","params":{p},"domain":{{"L":10,"R":6}},"replications":2,"seed":1}}"#), "domain.R"),
        (format!(r#"{{"kind":"verify","params":{p},"checks":["i_rho"],"seed":1}}"#), "params.profile"),
        (r#"{"kind":"theta","replications":2,"seed":1}"#.to_string(), "params"),
    ];
    for (json, field) in cases {
        let cfg = ExperimentConfig::from_json(&json).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let err = run(&cfg, Some(dir.path())).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_VALIDATION, "{json}");
        match err {
            RunError::Config(e) => assert_eq!(e.field, field, "{json}"),
            other => panic!("{other}"),
        }
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }
}

#[test]
fn parse_errors_name_fields() {
    let e = ExperimentConfig::from_json(r#"{"kind":"theta","bogus":1}"#).unwrap_err();
    assert_eq!(e.field, "bogus");
    let e = ExperimentConfig::from_json(r#"{"seed":1}"#).unwrap_err();
    assert_eq!(e.field, "kind");
    let e = ExperimentConfig::from_json(r#"{"kind":"nope"}"#).unwrap_err();
    assert!(e.reason.contains("nope"));
    let e = ExperimentConfig::from_json(&format!(
        r#"{{"kind":"theta","params":{}}}"#,
        params_json(0.5).replace("\"A\"", "\"Z\"")
    ))
    .unwrap_err();
    assert_eq!(e.field, "Z");
}

#[test]
fn invalid_params_are_named() {
    let mut cfg = theta_config();
    cfg.params.as_mut().unwrap().gamma = 1.5;
    let err = cfg.validate().unwrap_err();
    assert_eq!(err.field, "params.gamma");
}

#[test]
fn config_json_round_trip() {
    let cfg = theta_config();
    assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
}

#[test]
fn missing_output_dir_is_a_validation_error() {
    let err = run(&theta_config(), None).unwrap_err();
    assert!(matches!(err, RunError::Config(ref e) if e.field == "output"));
}

#[test]
fn unwritable_output_leaves_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("out");
    std::fs::write(&blocker, b"x").unwrap();
    let err = run(&theta_config(), Some(&blocker)).unwrap_err();
    assert_eq!(err.exit_code(), EXIT_RUNTIME);
    assert_eq!(std::fs::read(&blocker).unwrap(), b"x");
}

#[test]
fn failed_write_removes_earlier_files() {
    let dir = tempfile::tempdir().unwrap();
    // a directory where the manifest should go makes the last write fail
    std::fs::create_dir(dir.path().join(output::MANIFEST_FILE)).unwrap();
    std::fs::write(dir.path().join(output::MANIFEST_FILE).join("keep"), b"k").unwrap();
    let err = run(&theta_config(), Some(dir.path())).unwrap_err();
    assert!(matches!(err, RunError::Io(_)));
    assert!(!dir.path().join("theta.csv").exists());
    assert!(!dir.path().join("theta_summary.csv").exists());
}

#[test]
fn sweep_over_gamma_delta_grid() {
    let cfg = ExperimentConfig::from_json(&format!(
        r#"{{"kind":"sweep","params":{},"p_grid":[0.2,0.8],"l_grid":[6,12],"gamma_grid":[0.3,0.7],"delta_grid":[2.0,3.0],"replications":3,"seed":2}}"#,
        params_json(1.0)
    ))
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let s = run(&cfg, Some(dir.path())).unwrap();
    assert_eq!(s.manifest.outputs[0].rows, 4 * 2 * 2 * 3);
    assert_eq!(s.manifest.outputs[1].rows, 4 * 2 * 2);
    check_outputs(dir.path(), &s.manifest);
    let mut r = csv::Reader::from_path(dir.path().join("sweep_summary.csv")).unwrap();
    let deltas: Vec<String> = r.records().map(|x| x.unwrap()[2].to_string()).collect();
    assert!(deltas.contains(&"3.0".to_string()));
}

#[test]
fn small_runs_of_every_kind() {
    let p = params_json(0.5);
    let surgery = p.replace(r#"{"kind":"polynomial","x0":0.25}"#, r#"{"kind":"surgery"}"#);
    let mut hier = params_json(0.5).replace("\"gamma\":0.5", "\"gamma\":0.8");
    hier = hier.replace("\"kernel\":\"pa\"", "\"kernel\":\"min\"");
    let configs = [
        r#"{"kind":"paths-selftest","seed":1,"catalan_max_k":5,"permutation_max_len":5,"random_sequences":200,"random_max_len":10,"bijection_max_k":4}"#.to_string(),
        format!(r#"{{"kind":"verify","params":{surgery},"checks":["lemmas","i_rho","two_connection"],"lemma_points":[{{"lemma":"A1b","point":{{"gamma":0.5,"t0":0.25,"k":1}}}}],"configurations":2,"replications":2000,"seed":1}}"#),
        format!(r#"{{"kind":"construct","params":{hier},"s0_grid":[0.1,0.05],"steps":2,"replications":3,"seed":1}}"#),
        format!(r#"{{"kind":"aba","params":{p},"t_grid":[10,40],"replications":2,"seed":1}}"#),
        format!(r#"{{"kind":"sweep","params":{p},"p_grid":[0.3,0.9],"l_grid":[8],"replications":2,"seed":1,"domain":{{"shape":"box"}}}}"#),
    ];
    for json in configs {
        let cfg = ExperimentConfig::from_json(&json).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let s = run(&cfg, Some(dir.path())).unwrap_or_else(|e| panic!("{json}: {e}"));
        assert_eq!(s.exit_code(), EXIT_SUCCESS, "{json}");
        assert!(s.manifest.outputs[0].rows > 0, "{json}");
        check_outputs(dir.path(), &s.manifest);
    }
}

#[test]
fn verification_failures_set_exit_code() {
    let s = RunSummary {
        out_dir: PathBuf::new(),
        manifest: Manifest {
            tool: String::new(),
            version: String::new(),
            kind: "verify".into(),
            master_seed: 0,
            config: theta_config(),
            outputs: vec![],
            verification_failures: 1,
            wall_time_seconds: 0.0,
        },
        verification_failures: 1,
    };
    assert_eq!(s.exit_code(), EXIT_VERIFICATION);
}
