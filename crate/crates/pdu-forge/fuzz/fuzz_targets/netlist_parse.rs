//! Netlist parser must never panic, and accepted input must round-trip:
//! writing a parsed netlist and parsing that again has to reproduce the
//! written text byte for byte.

#![no_main]

use libfuzzer_sys::fuzz_target;
use pdu_forge::netlist_text::{parse_netlist, write_netlist};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok((netlist, lines)) = parse_netlist(text) else {
        return;
    };
    assert_eq!(lines.len(), netlist.components().len());

    let written = write_netlist(&netlist);
    let (reparsed, _) = parse_netlist(&written).expect("writer output must parse");
    assert_eq!(write_netlist(&reparsed), written);
});
