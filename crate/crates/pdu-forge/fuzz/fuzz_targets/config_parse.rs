//! Config parser must never panic; accepted configs must satisfy their own
//! validation invariants.

#![no_main]

use libfuzzer_sys::fuzz_target;
use pdu_forge::config_text::parse_device_config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok((config, _warnings)) = parse_device_config(text) {
        config.validate().expect("accepted config must validate");
    }
});
