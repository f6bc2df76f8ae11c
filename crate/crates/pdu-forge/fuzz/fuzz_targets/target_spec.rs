//! The two small CLI string parsers must never panic on arbitrary input.

#![no_main]

use libfuzzer_sys::fuzz_target;
use pdu_forge::cli::{parse_encoding, parse_target_spec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = parse_target_spec(text);
    let _ = parse_encoding(text);
});
