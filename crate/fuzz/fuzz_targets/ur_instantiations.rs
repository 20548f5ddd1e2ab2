#![no_main]

use std::collections::BTreeSet;

use libfuzzer_sys::fuzz_target;

use ambitab::oracle::delta::readings;
use ambitab::syntax::parse_uformula;

// Enumeration is factorial in the label count.
const MAX_LABELS: usize = 6;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(f) = parse_uformula(text) else { return };
    for u in f.urs() {
        if u.labels().len() > MAX_LABELS {
            continue;
        }
        let mut plugged = BTreeSet::new();
        for inst in u.instantiations() {
            let d = u.plug(&inst);
            assert!(d.is_hole_free(), "{inst} leaves a hole in {d}");
            plugged.insert(d.to_string());
        }
        let ours: BTreeSet<String> = u.readings().iter().map(|d| d.to_string()).collect();
        assert_eq!(ours, plugged);
        let brute: BTreeSet<String> = readings(u).iter().map(|d| d.to_string()).collect();
        assert_eq!(ours, brute, "disambiguators disagree on {u}");
    }
});
