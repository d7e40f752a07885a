#![no_main]

use libfuzzer_sys::fuzz_target;
use tw2knot::{classify_with, parse_pd, ReduceOptions};

// Any diagram that parses must reduce without an internal error; small
// ones are re-validated and oracle-checked after every rule.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(d) = parse_pd(text) else {
        return;
    };
    if d.crossing_count() > 200 {
        return;
    }
    let opts = ReduceOptions {
        shuffle_seed: None,
        debug_validate: true,
    };
    let c = classify_with(&d, &opts).expect("reduction succeeds on a valid diagram");
    if c.verdict.is_unlink() {
        assert!(c.trace.counted_total <= d.crossing_count());
    }
});
