#![no_main]

use hill_libration::io::parse_family_kind;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(kind) = parse_family_kind(text) {
        assert_eq!(parse_family_kind(kind.as_str()).unwrap(), kind);
    }
});
