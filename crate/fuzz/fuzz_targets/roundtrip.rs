#![no_main]

use libfuzzer_sys::fuzz_target;
use tw2knot::{parse_pd, serialize_pd};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(d) = parse_pd(text) {
        let back = parse_pd(&serialize_pd(&d)).expect("serialized diagram reparses");
        assert!(back.is_isomorphic(&d));
    }
});
