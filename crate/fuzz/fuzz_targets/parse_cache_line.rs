#![no_main]

use libfuzzer_sys::fuzz_target;
use sumavoid::runner::cache::parse_cache_line;

fuzz_target!(|line: &str| {
    if let Ok(entry) = parse_cache_line(line) {
        assert_eq!(entry.hash.len(), 64);
    }
});
