#![no_main]

use freeexp::lattice::SolutionSet;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(set) = SolutionSet::from_json(text) {
        let again = SolutionSet::from_json(&set.to_json()).expect("printed set reparses");
        assert_eq!(again, set);
    }
});
