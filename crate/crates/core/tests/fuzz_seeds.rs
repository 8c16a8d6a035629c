//! The checked-in fuzz seeds must stay valid inputs.

use std::path::{Path, PathBuf};

use wavepax::config::ExperimentConfig;
use wavepax::io::{decode_field, mixture_from_json};

fn seeds(target: &str) -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn config_seeds_parse() {
    for p in seeds("fuzz_config") {
        let text = std::fs::read_to_string(&p).unwrap();
        ExperimentConfig::from_json_str(&text, Path::new(".")).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}

#[test]
fn mixture_seeds_parse() {
    for p in seeds("fuzz_mixture_json") {
        mixture_from_json(&std::fs::read_to_string(&p).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}

#[test]
fn field_seeds_decode() {
    for p in seeds("fuzz_field_dump") {
        decode_field(&std::fs::read(&p).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}
