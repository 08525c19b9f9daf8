#![no_main]

use libfuzzer_sys::fuzz_target;
use noon_lab::{parse_param, ConfigFile, Scalar};

fuzz_target!(|data: &[u8]| {
    let Ok(pair) = std::str::from_utf8(data) else {
        return;
    };
    let Ok((key, value)) = parse_param(pair) else {
        return;
    };
    assert!(!key.is_empty());
    if let Scalar::Number(x) = value {
        assert!(x.is_finite());
    }
    let _ = ConfigFile::default().apply_param(key, value);
});
