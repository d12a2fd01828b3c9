#![no_main]

use hill_libration::io::parse_orbit_record;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rec) = parse_orbit_record(text) {
        assert!(rec.period > 0.0);
        let _ = rec.to_periodic();
    }
});
