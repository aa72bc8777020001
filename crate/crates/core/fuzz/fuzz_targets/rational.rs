#![no_main]

use hfree::ensemble::PSpec;
use hfree::ExactRational;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = text.parse::<ExactRational>() {
        assert_eq!(r.to_string().parse::<ExactRational>().unwrap(), r);
    }
    if let Ok(p) = text.parse::<PSpec>() {
        for n in [1usize, 2, 50, 10_000] {
            let _ = p.resolve(n);
        }
    }
});
