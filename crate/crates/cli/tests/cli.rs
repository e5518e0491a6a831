use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn iwahori(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iwahori"))
        .args(args)
        .env_remove("IWAHORI_GROUP")
        .env_remove("IWAHORI_P")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn verify_all_sp4_passes_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = iwahori(&["--group", "sp4", "--p", "7", "--n-samples", "40", "--json", d, "verify-all"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["schema"], "iwahori.verify-all/1");
    assert_eq!(r["passed"], true);
    for suite in ["padic", "pvaluation-axioms", "pvaluation-oracle", "rigid", "verma"] {
        assert_eq!(r["suites"][suite]["passed"], true, "{suite}");
    }
    assert!(dir.path().join("verify-all.json").exists());
    let t: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("timings.json")).unwrap()).unwrap();
    assert_eq!(t["schema"], "iwahori.timings/1");
}

#[test]
fn gate_violation_exits_with_config_code() {
    let out = iwahori(&["--group", "sp4", "--p", "5", "verify-all"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("parameter gate violated: p-1 = 4 <= eh = 4"), "{err}");
}

#[test]
fn non_prime_is_a_config_error() {
    assert_eq!(iwahori(&["--p", "9", "rootdata"]).status.code(), Some(2));
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap()
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let d = dir.path().to_str().unwrap();
        let out = iwahori(&["--group", "sl3", "--n-samples", "25", "--seed", "9", "--json", d, "verify-all"]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(read(a.path(), "verify-all.json"), read(b.path(), "verify-all.json"));
}

#[test]
fn env_overrides_flags() {
    let out = Command::new(env!("CARGO_BIN_EXE_iwahori"))
        .args(["rootdata"])
        .env("IWAHORI_GROUP", "sl3")
        .output()
        .unwrap();
    assert_eq!(report(&out)["cartan_type"], "A2");
}

#[test]
fn omega_routes_agree_on_a_lower_unipotent() {
    let out = iwahori(&["omega", "--matrix", "1,0;7,1"]);
    let r = report(&out);
    assert_eq!(r["omega_formula"], "3/2");
    assert_eq!(r["omega_oracle"], "3/2");
}

#[test]
fn matrix_outside_iwahori_is_rejected() {
    assert_eq!(iwahori(&["omega", "--matrix", "2,0;0,1"]).status.code(), Some(2));
}

#[test]
fn factorize_round_trips() {
    let r = report(&iwahori(&["factorize", "--matrix", "8,7;7,50", "--w", "s1"]));
    assert_eq!(r["round_trip"], true);
    assert_eq!(r["omega"], "1/2");
}

#[test]
fn bgg_sp4_negative_character() {
    let r = report(&iwahori(&["--group", "sp4", "bgg", "--c", "-1,-1"]));
    let vals: Vec<&str> = r["values"].as_array().unwrap().iter().map(|v| v["value"].as_str().unwrap()).collect();
    assert_eq!(vals, ["1", "0", "1", "1"]);
    assert_eq!(r["simple"], false);
}

#[test]
fn bgg_generic_character_is_simple() {
    let r = report(&iwahori(&["--group", "sp4", "bgg", "--c", "1/2,1/3"]));
    assert_eq!(r["simple"], true);
}

#[test]
fn sp4_golden_passes() {
    let out = iwahori(&["sp4-golden"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out)["erratum"].is_object() || report(&out)["erratum"].is_array());
}

#[test]
fn slope_split_reads_series_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    std::fs::write(&path, r#"[{"index":[0],"coeff":"1"},{"index":[1],"coeff":"3"},{"index":[4],"coeff":"1/2"},{"index":[7],"coeff":"5"}]"#).unwrap();
    let out = iwahori(&["slope", "split", "--s", "1", "--series", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    // SL2, w = 1: lambda_i = 2i, so only i = 7 has v_7(lambda_i) >= 1
    let ge: Vec<u64> = r["at_least"].as_array().unwrap().iter().map(|t| t["index"][0].as_u64().unwrap()).collect();
    assert_eq!(ge, [0, 7]);
}

#[test]
fn haar_has_only_zero_solution() {
    let r = report(&iwahori(&["--degree", "12", "haar"]));
    assert_eq!(r["only_zero"], true);
}

#[test]
fn summands_witness_every_pair() {
    let r = report(&iwahori(&["--group", "sl3", "summands"]));
    assert_eq!(r["all_pairs_witnessed"], true);
    assert_eq!(r["summands"].as_array().unwrap().len(), 6);
}

/// Minimal conformance: required keys, `const`, `enum` and primitive `type` at the top level.
fn conforms(report: &Value, schema_file: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(schema_file);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    for key in schema["required"].as_array().unwrap() {
        let key = key.as_str().unwrap();
        let v = report.get(key).unwrap_or_else(|| panic!("{schema_file}: missing {key}"));
        let prop = &schema["properties"][key];
        if let Some(c) = prop.get("const") {
            assert_eq!(v, c, "{schema_file}: {key}");
        }
        if let Some(e) = prop.get("enum") {
            assert!(e.as_array().unwrap().contains(v), "{schema_file}: {key}");
        }
        let ok = match prop.get("type").and_then(Value::as_str) {
            Some("string") => v.is_string(),
            Some("boolean") => v.is_boolean(),
            Some("integer") => v.is_u64() || v.is_i64(),
            Some("array") => v.is_array(),
            Some("object") => v.is_object(),
            _ => true,
        };
        assert!(ok, "{schema_file}: {key} has the wrong type");
    }
}

#[test]
fn reports_conform_to_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("f.json");
    std::fs::write(&series, r#"[{"index":[0,1,2],"coeff":"1"},{"index":[7,0,0],"coeff":"14"}]"#).unwrap();
    let series = series.to_str().unwrap();
    let cases: &[(&[&str], &str)] = &[
        (&["--group", "sp4", "rootdata", "info"], "rootdata.schema.json"),
        (&["omega", "--element", "[[1,0],[7,1]]"], "omega.schema.json"),
        (&["factorize", "--matrix", "8,7;7,50", "--w", "s1"], "factorize.schema.json"),
        (&["--group", "sl3", "basis", "--w", "s1s2"], "basis.schema.json"),
        (&["--n-samples", "10", "verify", "axioms"], "axioms.schema.json"),
        (&["--group", "sl3", "--n-samples", "10", "verify", "compat"], "axioms.schema.json"),
        (&["verify", "et"], "axioms.schema.json"),
        (&["--group", "sp4", "bgg", "--c", "1/3,1/5"], "bgg.schema.json"),
        (&["--group", "sp4", "verma-mult", "--chi", "0,0", "--lambda", "-3,-1"], "verma-mult.schema.json"),
        (&["--group", "sp4", "summands"], "summands.schema.json"),
        (&["--degree", "8", "haar"], "haar.schema.json"),
        (&["sp4-golden"], "sp4-golden.schema.json"),
        (&["--group", "sl3", "slope", "split", "--series", series], "slope.schema.json"),
        (&["--group", "sl3", "slope", "project", "--series", series], "slope.schema.json"),
        (&["--n-samples", "10", "verify-all"], "verify-all.schema.json"),
    ];
    for (args, schema) in cases {
        let out = iwahori(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        conforms(&report(&out), schema);
    }
}

#[test]
fn verify_all_with_short_precision_flag() {
    let out = iwahori(&["verify-all", "--group", "sp4", "--p", "7", "--n", "12", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&out)["config"]["precision"], 12);
}
