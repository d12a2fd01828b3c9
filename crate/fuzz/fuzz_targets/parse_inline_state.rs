#![no_main]

use hill_libration::io::parse_inline_state;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = parse_inline_state(text) {
        // accepted states are finite and survive a print/parse cycle
        assert!(s.is_finite());
        let a = s.to_array();
        let again = a.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(",");
        assert_eq!(parse_inline_state(&again).unwrap().to_array(), a);
    }
});
