#![no_main]

use libfuzzer_sys::fuzz_target;
use noon_lab::build_config;

// Line 1 is the scenario, line 2 the format (empty for none), line 3 a config
// document (empty for none), the rest `--param` values.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let mut lines = text.split('\n');
    let scenario = lines.next().unwrap_or_default();
    let format = lines.next().filter(|s| !s.is_empty());
    let config = lines.next().filter(|s| !s.is_empty());
    let params: Vec<String> = lines.map(str::to_string).collect();
    let _ = build_config(scenario, config, &params, format);
});
