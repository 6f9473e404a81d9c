#![no_main]

use libfuzzer_sys::fuzz_target;
use nongauss_core::config::parse_measure_spec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    for dim in [1, 2] {
        if let Ok(m) = parse_measure_spec(text, dim) {
            assert_eq!(m.dim(), dim);
            assert!(m.total_mass() > 0.0 && m.total_mass().is_finite());
        }
    }
});
