#![no_main]

use libfuzzer_sys::fuzz_target;
use sumavoid::runner::parse_record;

fuzz_target!(|line: &str| {
    if let Ok(r) = parse_record(line) {
        let back = parse_record(&r.to_line()).expect("serialized record parses");
        assert_eq!(back.payload(), r.payload());
    }
});
