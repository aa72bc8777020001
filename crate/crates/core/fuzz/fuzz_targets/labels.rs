#![no_main]

use hfree::graph::{read_labels, write_labels};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let n = n as usize;
    if let Ok(labels) = read_labels(text, n) {
        assert_eq!(labels.len(), n);
        assert_eq!(read_labels(&write_labels(&labels), n).unwrap(), labels);
    }
});
