#![no_main]

use hill_libration::io::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = parse_config(text) {
            if let Some(t) = cfg.integration_tol {
                assert!((1e-14..=1e-6).contains(&t));
            }
        }
    }
});
