#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = ambitab::semantics::parse_model(text) {
        let again = ambitab::semantics::parse_model(&m.to_string()).expect("printed model parses");
        assert_eq!(again, m);
    }
});
