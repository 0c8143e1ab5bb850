#![no_main]

use freeexp::lattice::parse_point;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(point) = parse_point(text) {
        let printed: Vec<String> = point.iter().map(ToString::to_string).collect();
        assert_eq!(parse_point(&printed.join(",")).unwrap(), point);
    }
});
