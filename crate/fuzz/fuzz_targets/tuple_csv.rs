#![no_main]

use libfuzzer_sys::fuzz_target;
use nongauss_core::config::parse_tuples;
use nongauss_core::regimes::{below_critical, blowup_condition, global_window};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_tuples(text) {
        for p in rows {
            p.validate().expect("parsed tuples are valid");
            assert_eq!(below_critical(&p), blowup_condition(&p));
            let _ = global_window(&p);
        }
    }
});
