#![no_main]

use libfuzzer_sys::fuzz_target;
use sumavoid::io::{format_set_file, parse_set_file};

fuzz_target!(|text: &str| {
    if let Ok(set) = parse_set_file(text) {
        let again = parse_set_file(&format_set_file(&set)).expect("formatted set parses");
        assert_eq!(again, set);
    }
});
