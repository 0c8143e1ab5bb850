#![no_main]

use freeexp::word::Word;
use libfuzzer_sys::fuzz_target;

// first byte picks the rank, the rest is word text
fuzz_target!(|data: &[u8]| {
    let Some((&rank, rest)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    let rank = u32::from(rank % 8) + 1;
    if let Ok(word) = Word::parse(rank, text) {
        let again = Word::parse(rank, &word.to_string()).expect("printed word reparses");
        assert_eq!(again, word);
        assert_eq!(word.concat(&word.inverse()).unwrap().reduce().len(), 0);
    }
});
