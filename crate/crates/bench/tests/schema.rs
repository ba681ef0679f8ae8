//! Structural agreement between the shipped schemas and the serialized types.

use std::collections::BTreeSet;
use std::path::Path;

use ancf14_bench::{BenchmarkConfig, BenchmarkName, Check, Outcome, ResultSeries};
use serde_json::Value;

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn keys(v: &Value) -> BTreeSet<String> {
    v.as_object().unwrap().keys().cloned().collect()
}

fn strings(v: &Value) -> BTreeSet<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_owned()).collect()
}

#[test]
fn summary_matches_its_schema() {
    let s = schema("summary.schema.json");
    let outcome = Outcome {
        series: vec![ResultSeries::new("probe", &["t_s"])],
        checks: vec![Check::below("custom.constraints", "residual", 1e-12, 1e-10), Check::flag("custom.flag", "flag", false)],
    };
    let dir = tempfile::tempdir().unwrap();
    let summary = ancf14_bench::emit_results("custom", &outcome, 0.5, dir.path()).unwrap();
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(keys(&doc), keys(&s["properties"]));
    assert_eq!(keys(&doc), strings(&s["required"]));
    assert_eq!(doc["schema_version"], s["properties"]["schema_version"]["const"]);
    let check = &s["properties"]["checks"]["items"];
    for c in doc["checks"].as_array().unwrap() {
        assert_eq!(keys(c), strings(&check["required"]));
    }
    assert!(doc["checks"][1]["measured"].is_null());
    assert_eq!(serde_json::from_value::<ancf14_bench::Summary>(doc).unwrap(), summary);
}

#[test]
fn benchmark_names_match_the_schemas() {
    let names: BTreeSet<String> =
        BenchmarkName::PRESETS.iter().chain([&BenchmarkName::Custom]).map(|n| n.as_str().to_owned()).collect();
    assert_eq!(strings(&schema("config.schema.json")["properties"]["name"]["enum"]), names);
    assert_eq!(strings(&schema("summary.schema.json")["properties"]["benchmark"]["enum"]), names);
}

#[test]
fn config_keys_match_the_schema() {
    let s = schema("config.schema.json");
    let mut cfg = BenchmarkConfig::from_file(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/cantilever.json")).unwrap();
    cfg.n_elements = Some(2);
    cfg.dt_s = Some(1e-3);
    cfg.load_steps = Some(3);
    cfg.output_dir = Some("out".into());
    let doc = serde_json::to_value(&cfg).unwrap();
    assert_eq!(keys(&doc), keys(&s["properties"]));
    let model = &s["$defs"]["model"]["properties"];
    assert!(keys(&doc["model"]).is_subset(&keys(model)));
}

#[test]
fn shipped_configs_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        BenchmarkConfig::from_file(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 3);
}
