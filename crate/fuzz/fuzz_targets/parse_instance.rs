#![no_main]

use freeexp::expsolve::EquationInstance;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(instance) = EquationInstance::from_json(text) {
        let again = EquationInstance::from_json(&instance.to_json()).expect("printed instance reparses");
        assert_eq!(again, instance);
    }
});
