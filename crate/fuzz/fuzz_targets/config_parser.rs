#![no_main]

use libfuzzer_sys::fuzz_target;
use nongauss_core::config::RunConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = RunConfig::parse(text) else { return };
    // whatever parses must survive a round trip and typed access
    let again = RunConfig::parse(&cfg.resolved()).expect("resolved config reparses");
    assert_eq!(again.entries(), cfg.entries());
    if let Ok(d) = cfg.dim() {
        let _ = cfg.measure(d);
        let _ = cfg.grid(d);
        let _ = cfg.initial_data(d);
    }
    let _ = cfg.params();
    let _ = cfg.mesh();
    let _ = cfg.nonlinearity();
});
