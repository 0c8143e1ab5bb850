//! Replays the checked-in fuzz seeds through the same round-trip checks the
//! fuzz targets make, so the seeds keep working on a stable toolchain.

use std::fs;
use std::path::PathBuf;

use freeexp::bands::MarkedBandSystem;
use freeexp::expsolve::EquationInstance;
use freeexp::lattice::{parse_point, SolutionSet};
use freeexp::twist::ExtensionInstance;
use freeexp::word::Word;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            (path.display().to_string(), fs::read(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

/// Seeds are text; the count of those that parse is returned.
fn replay(target: &str, check: impl Fn(&str) -> bool) -> usize {
    seeds(target)
        .iter()
        .filter(|(name, bytes)| {
            let text = std::str::from_utf8(bytes).unwrap_or_else(|_| panic!("{name} is not UTF-8"));
            check(text)
        })
        .count()
}

#[test]
fn word_seeds() {
    let mut parsed = 0;
    for (_, bytes) in seeds("parse_word") {
        let Some((&rank, rest)) = bytes.split_first() else { continue };
        let rank = u32::from(rank % 8) + 1;
        if let Ok(word) = Word::parse(rank, std::str::from_utf8(rest).unwrap()) {
            assert_eq!(Word::parse(rank, &word.to_string()).unwrap(), word);
            assert!(word.concat(&word.inverse()).unwrap().reduce().is_empty());
            parsed += 1;
        }
    }
    assert!(parsed > 0);
}

#[test]
fn band_system_seeds() {
    let parsed = replay("parse_band_system", |text| match text.parse::<MarkedBandSystem>() {
        Ok(system) => {
            assert_eq!(system.to_string().parse::<MarkedBandSystem>().unwrap(), system);
            assert!(system.maximal_bundle().0.is_maximal());
            true
        }
        Err(_) => false,
    });
    assert!(parsed > 0);
}

#[test]
fn instance_seeds() {
    let parsed = replay("parse_instance", |text| match EquationInstance::from_json(text) {
        Ok(instance) => {
            assert_eq!(EquationInstance::from_json(&instance.to_json()).unwrap(), instance);
            true
        }
        Err(_) => false,
    });
    assert!(parsed > 0);
}

#[test]
fn solution_set_seeds() {
    let parsed = replay("parse_solution_set", |text| match SolutionSet::from_json(text) {
        Ok(set) => {
            assert_eq!(SolutionSet::from_json(&set.to_json()).unwrap(), set);
            true
        }
        Err(_) => false,
    });
    assert!(parsed > 0);
}

#[test]
fn extension_seeds() {
    let parsed = replay("parse_extension", |text| match ExtensionInstance::from_json(text) {
        Ok(instance) => {
            assert_eq!(ExtensionInstance::from_json(&instance.to_json()).unwrap(), instance);
            true
        }
        Err(_) => false,
    });
    assert!(parsed > 0);
}

#[test]
fn point_seeds() {
    let parsed = replay("parse_point", |text| match parse_point(text) {
        Ok(point) => {
            let printed: Vec<String> = point.iter().map(ToString::to_string).collect();
            assert_eq!(parse_point(&printed.join(",")).unwrap(), point);
            true
        }
        Err(_) => false,
    });
    assert!(parsed > 0);
}
