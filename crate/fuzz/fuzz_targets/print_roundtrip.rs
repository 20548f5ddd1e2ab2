#![no_main]

use libfuzzer_sys::fuzz_target;

use ambitab::syntax::parse_sequent;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(s) = parse_sequent(text) else { return };
    for f in s.premises.iter().chain([&s.conclusion]) {
        let printed = f.to_string();
        let back = ambitab::syntax::parse_uformula(&printed).expect("printed formula parses");
        assert_eq!(back.to_string(), printed);
        if f.is_ur_free() {
            assert_eq!(&back, f);
        }
    }
});
