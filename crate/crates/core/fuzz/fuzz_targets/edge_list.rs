#![no_main]

use hfree::graph::{read_edge_list, write_edge_list};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = read_edge_list(text) {
        // Accepted input re-serializes to a canonical form that parses back identically.
        let canonical = write_edge_list(&g);
        assert_eq!(read_edge_list(&canonical).unwrap(), g);
    }
});
