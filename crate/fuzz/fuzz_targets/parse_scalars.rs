#![no_main]

use libfuzzer_sys::fuzz_target;
use sumavoid::io::{parse_elem, parse_elem_list, parse_range, parse_ratio};
use sumavoid::GroupSpec;

fuzz_target!(|text: &str| {
    let cyclic = GroupSpec::cyclic(16).unwrap();
    let product = GroupSpec::new(&[4, 4, 3]).unwrap();
    for g in [&cyclic, &product] {
        if let Ok(e) = parse_elem(g, text) {
            assert!(e.index() < g.order());
        }
        let _ = parse_elem_list(g, text);
    }
    if let Ok(r) = parse_ratio(text) {
        assert!(*r.denom() > 0);
    }
    if let Ok(r) = parse_range(text) {
        assert!(r.start() <= r.end());
    }
});
