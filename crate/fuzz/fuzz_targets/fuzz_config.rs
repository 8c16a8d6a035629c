#![no_main]

use libfuzzer_sys::fuzz_target;
use wavepax::config::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = ExperimentConfig::from_json_str(s, std::path::Path::new("."));
    }
});
