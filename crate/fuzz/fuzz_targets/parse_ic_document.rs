#![no_main]

use hill_libration::io::{parse_ic_argument, parse_ic_document};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(ic) = parse_ic_document(text) {
        assert!(ic.state.is_finite());
        assert!(ic.period.map_or(true, |t| t > 0.0 && t.is_finite()));
    }
    let _ = parse_ic_argument(text);
});
