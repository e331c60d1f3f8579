//! End-to-end tests of the `povmlab` binary: exit codes, report shapes, and
//! file round trips.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn povmlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_povmlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).expect("stdout is one JSON document")
}

fn write(path: &Path, contents: &str) -> String {
    fs::write(path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

fn sz_povm_json(with_measure: bool) -> String {
    let measure = if with_measure {
        r#","measure":[0.5,0.5]"#
    } else {
        ""
    };
    format!(
        r#"{{"hilbert_dim":2,"atoms":["+","-"],"effects":[
            {{"dim":2,"entries":[[1,0],[0,0],[0,0],[0,0]]}},
            {{"dim":2,"entries":[[0,0],[0,0],[0,0],[1,0]]}}]{measure}}}"#
    )
}

#[test]
fn validate_accepts_a_pvm() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir.path().join("sz.json"), &sz_povm_json(true));
    let out = povmlab(&["validate", &path]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = stdout_json(&out);
    assert_eq!(report["is_pvm"], Value::Bool(true));
    assert_eq!(report["mu_continuous"], Value::Bool(true));
    assert_eq!(report["valid"], Value::Bool(true));
}

#[test]
fn validate_rejects_bad_normalization() {
    let dir = tempfile::tempdir().unwrap();
    let bad = r#"{"hilbert_dim":2,"atoms":["a","b"],"effects":[
        {"dim":2,"entries":[[0.45,0],[0,0],[0,0],[0.45,0]]},
        {"dim":2,"entries":[[0.45,0],[0,0],[0,0],[0.45,0]]}]}"#;
    let path = write(&dir.path().join("bad.json"), bad);
    let out = povmlab(&["validate", &path]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    let report = stdout_json(&out);
    assert_eq!(report["valid"], Value::Bool(false));
    // Residual is reported: the sum is 0.9 id, so the residual is 0.1.
    let residual = report["normalization_residual"].as_f64().unwrap();
    assert!((residual - 0.1).abs() < 1e-9);
}

#[test]
fn validate_exit_2_on_malformed_document() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir.path().join("broken.json"), "{ not json");
    let out = povmlab(&["validate", &path]);
    assert_eq!(out.status.code(), Some(2));

    // Entry count mismatch is also a document problem.
    let short = r#"{"hilbert_dim":2,"atoms":["a"],"effects":[{"dim":2,"entries":[[1,0]]}]}"#;
    let path = write(&dir.path().join("short.json"), short);
    let out = povmlab(&["validate", &path]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn convert_statistical_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let povm = write(&dir.path().join("sz.json"), &sz_povm_json(false));
    let state = write(
        &dir.path().join("rho.json"),
        r#"{"dim":2,"entries":[[1,0],[0,0],[0,0],[0,0]]}"#,
    );
    let out = povmlab(&["convert", &povm, "--to", "statistical", "--state", &state]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = stdout_json(&out);
    let probs = report["distributions"][0]["prob"].as_array().unwrap();
    assert!((probs[0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(probs[1].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn convert_predual_kernels() {
    let dir = tempfile::tempdir().unwrap();
    let povm = write(&dir.path().join("sz.json"), &sz_povm_json(true));
    let out = povmlab(&["convert", &povm, "--to", "predual"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = stdout_json(&out);
    // Kernels are 2 diag(1,0) and 2 diag(0,1) for the uniform half masses.
    let k0 = report["kernels"][0]["entries"].as_array().unwrap();
    assert!((k0[0][0].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let residual = report["trace_compatibility_residual"].as_f64().unwrap();
    assert!(residual < 1e-12);
}

#[test]
fn convert_vn_rejects_discontinuous_povm() {
    let dir = tempfile::tempdir().unwrap();
    // Mass 0 on an atom carrying a nonzero effect.
    let doc = r#"{"hilbert_dim":2,"atoms":["a","b"],"effects":[
        {"dim":2,"entries":[[0.5,0],[0,0],[0,0],[0.5,0]]},
        {"dim":2,"entries":[[0.5,0],[0,0],[0,0],[0.5,0]]}],
        "measure":[0.0,1.0]}"#;
    let path = write(&dir.path().join("disc.json"), doc);
    let out = povmlab(&["convert", &path, "--to", "vn"]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
}

#[test]
fn compose_trivial_first_stage() {
    let dir = tempfile::tempdir().unwrap();
    let first = write(
        &dir.path().join("first.json"),
        r#"{"hilbert_dim":2,"atoms":["x"],"effects":[
            {"dim":2,"entries":[[1,0],[0,0],[0,0],[1,0]]}]}"#,
    );
    let measure = write(
        &dir.path().join("mu.json"),
        r#"{"atoms":["x"],"mass":[1.0]}"#,
    );
    let family = write(
        &dir.path().join("family.json"),
        &format!(r#"{{"index_atoms":["x"],"povms":[{}]}}"#, sz_povm_json(false)),
    );
    let out_path = dir.path().join("composite.json");
    let out = povmlab(&[
        "compose",
        &first,
        &measure,
        &family,
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = stdout_json(&out);
    assert!(report["normalization_residual"].as_f64().unwrap() < 1e-10);
    assert!(report["marginal_recovery_residual"].as_f64().unwrap() < 1e-10);

    // The composite equals the single family member, relabeled.
    let composite: Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(composite["atoms"][0], "x/+");
    let e0 = composite["effects"][0]["entries"].as_array().unwrap();
    assert!((e0[0][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn compose_rejects_dimension_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let first = write(
        &dir.path().join("first.json"),
        r#"{"hilbert_dim":2,"atoms":["x"],"effects":[
            {"dim":2,"entries":[[1,0],[0,0],[0,0],[1,0]]}]}"#,
    );
    let measure = write(
        &dir.path().join("mu.json"),
        r#"{"atoms":["x"],"mass":[1.0]}"#,
    );
    // Family member acts on C^3.
    let family = write(
        &dir.path().join("family.json"),
        r#"{"index_atoms":["x"],"povms":[{"hilbert_dim":3,"atoms":["y"],"effects":[
            {"dim":3,"entries":[[1,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[1,0]]}]}]}"#,
    );
    let out = povmlab(&[
        "compose",
        &first,
        &measure,
        &family,
        "--out",
        dir.path().join("c.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
}

#[test]
fn variation_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir.path().join("sz.json"), &sz_povm_json(false));
    let out = povmlab(&["variation", &path, "--mode", "both"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = stdout_json(&out);
    assert!((report["closed_form"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!((report["brute_force"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!(report["difference"].as_f64().unwrap() < 1e-12);
}

#[test]
fn spin_demo_small_exact_grid() {
    let out = povmlab(&[
        "spin-demo",
        "--points",
        "6",
        "--scheme",
        "octahedral-symmetrized",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = stdout_json(&out);
    assert!(report["minus_branch_norm"].as_f64().unwrap() <= 1e-10);
    assert!(report["plus_branch_deviation"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn spin_demo_rejects_odd_symmetrized_count() {
    let out = povmlab(&[
        "spin-demo",
        "--points",
        "3",
        "--scheme",
        "octahedral-symmetrized",
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn spin_demo_region_by_indices() {
    let out = povmlab(&["spin-demo", "--points", "6", "--region", "indices:0,2"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = stdout_json(&out);
    assert_eq!(report["region_size"].as_u64(), Some(2));
}

#[test]
fn axioms_deterministic_given_seed() {
    let a = povmlab(&["axioms", "--samples", "100", "--seed", "5"]);
    let b = povmlab(&["axioms", "--samples", "100", "--seed", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report = stdout_json(&a);
    assert_eq!(report["passed"], Value::Bool(true));
}

#[test]
fn roundtrip_is_exact_to_the_last_digit() {
    let dir = tempfile::tempdir().unwrap();
    // Awkward values: thirds and tiny magnitudes.
    let third = 1.0 / 3.0;
    let doc = format!(
        r#"{{"atoms":["a","b","c"],"mass":[{third:.17e},1e-300,2.5]}}"#
    );
    let path = write(&dir.path().join("mu.json"), &doc);
    let out = povmlab(&["roundtrip", &path, "--kind", "measure"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = stdout_json(&out);
    assert_eq!(report["matches"], Value::Bool(true));
}

#[test]
fn unknown_flags_are_errors() {
    let out = povmlab(&["axioms", "--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tolerance_env_override_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    // Sum deviates from the identity by 1e-6: invalid at the default
    // tolerance, valid when the knob is loosened.
    let doc = r#"{"hilbert_dim":2,"atoms":["a","b"],"effects":[
        {"dim":2,"entries":[[0.5000005,0],[0,0],[0,0],[0.5,0]]},
        {"dim":2,"entries":[[0.5,0],[0,0],[0,0],[0.5,0]]}]}"#;
    let path = write(&dir.path().join("near.json"), doc);

    let strict = povmlab(&["validate", &path]);
    assert_eq!(strict.status.code(), Some(1));

    let loose = Command::new(env!("CARGO_BIN_EXE_povmlab"))
        .args(["validate", &path])
        .env("POVMLAB_TOLERANCE", "1e-4")
        .output()
        .unwrap();
    assert_eq!(loose.status.code(), Some(0), "{loose:?}");
}
