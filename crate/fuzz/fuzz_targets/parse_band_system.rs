#![no_main]

use freeexp::bands::MarkedBandSystem;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(system) = text.parse::<MarkedBandSystem>() {
        let again: MarkedBandSystem = system.to_string().parse().expect("printed system reparses");
        assert_eq!(again, system);
        if system.system().length() <= 128 {
            let (bundle, _) = system.maximal_bundle();
            assert!(bundle.is_maximal());
        }
    }
});
