#![no_main]

use libfuzzer_sys::fuzz_target;
use sumavoid::io::parse_group_spec;

// Display output ("Z/7 x Z/3") is itself an accepted spelling.
fuzz_target!(|text: &str| {
    if let Ok(g) = parse_group_spec(text) {
        let back = parse_group_spec(&g.to_string()).expect("display form parses");
        assert_eq!(back, g);
        assert_eq!(g.order(), g.factors().iter().map(|&n| n as usize).product::<usize>());
    }
});
