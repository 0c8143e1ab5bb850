#![no_main]

use freeexp::twist::ExtensionInstance;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(instance) = ExtensionInstance::from_json(text) {
        let again = ExtensionInstance::from_json(&instance.to_json()).expect("printed instance reparses");
        assert_eq!(again, instance);
    }
});
