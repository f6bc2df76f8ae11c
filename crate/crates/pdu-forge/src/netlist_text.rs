//! Plain-text netlist serialization.
//!
//! The format is line-oriented. `#` starts a comment, blank lines are
//! ignored, and fields are whitespace-separated:
//!
//! ```text
//! mode  <index> <label> <band>                          # band: pump|signal|idler|residual
//! source <m>
//! bs    <m1> <m2> <theta>
//! phase <m> <phi>
//! cross <m1> <m2>
//! pdu   <in> <out_s> <out_i> <eta_pdc> <eta_puc_s> <eta_puc_i>
//! ```
//!
//! Mode declarations come first and must carry their own index (the k-th
//! `mode` line must say `k`), which keeps hand-edited files honest. PDU
//! residual ports are never written: they are re-allocated on parse, after
//! all declared modes, in `pdu` line order — the same rule the builder API
//! uses, so indices agree.
//!
//! [`write_netlist`] is a pure function of the netlist and emits floats in
//! shortest round-trip form; write → parse → write is byte-identical.

use crate::circuit::Netlist;
use crate::error::{Error, Result};
use crate::fock::Band;
use crate::optics::{BeamSplitterSpec, PduParams};

fn parse_band(token: &str, line: usize) -> Result<Band> {
    match token {
        "pump" => Ok(Band::Pump),
        "signal" => Ok(Band::Signal),
        "idler" => Ok(Band::Idler),
        "residual" => Ok(Band::Residual),
        other => Err(Error::NetlistParse {
            line,
            message: format!("unknown band `{other}` (expected pump, signal, idler or residual)"),
        }),
    }
}

fn parse_index(token: &str, line: usize) -> Result<usize> {
    token.parse::<usize>().map_err(|_| Error::NetlistParse {
        line,
        message: format!("`{token}` is not a mode index"),
    })
}

fn parse_float(token: &str, line: usize) -> Result<f64> {
    let value: f64 = token.parse().map_err(|_| Error::NetlistParse {
        line,
        message: format!("`{token}` is not a number"),
    })?;
    if !value.is_finite() {
        return Err(Error::NetlistParse {
            line,
            message: format!("`{token}` is not finite"),
        });
    }
    Ok(value)
}

fn expect_args(fields: &[&str], expected: usize, line: usize) -> Result<()> {
    if fields.len() - 1 != expected {
        return Err(Error::NetlistParse {
            line,
            message: format!(
                "`{}` takes {expected} field(s), found {}",
                fields[0],
                fields.len() - 1
            ),
        });
    }
    Ok(())
}

/// Parse the plain-text format.
///
/// Returns the netlist plus, for each component, the 1-based line it was
/// parsed from — handy for mapping [`crate::circuit::Diagnostic`] component
/// indices back onto the source file.
pub fn parse_netlist(text: &str) -> Result<(Netlist, Vec<usize>)> {
    let mut netlist = Netlist::new("parsed");
    let mut component_lines = Vec::new();
    let mut seen_component = false;

    for (offset, raw) in text.lines().enumerate() {
        let line = offset + 1;
        let content = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        match fields[0] {
            "mode" => {
                expect_args(&fields, 3, line)?;
                if seen_component {
                    return Err(Error::NetlistParse {
                        line,
                        message: "mode declarations must precede components".to_owned(),
                    });
                }
                let index = parse_index(fields[1], line)?;
                if index != netlist.declared_mode_count() {
                    return Err(Error::NetlistParse {
                        line,
                        message: format!(
                            "mode index {index} out of order (expected {})",
                            netlist.declared_mode_count()
                        ),
                    });
                }
                let band = parse_band(fields[3], line)?;
                netlist.add_mode(fields[2], band)?;
            }
            "source" => {
                expect_args(&fields, 1, line)?;
                seen_component = true;
                component_lines.push(line);
                let mode = parse_index(fields[1], line)?;
                netlist.add_source(mode);
            }
            "bs" => {
                expect_args(&fields, 3, line)?;
                seen_component = true;
                component_lines.push(line);
                let m1 = parse_index(fields[1], line)?;
                let m2 = parse_index(fields[2], line)?;
                let theta = parse_float(fields[3], line)?;
                let spec = BeamSplitterSpec::new(theta).map_err(|e| Error::NetlistParse {
                    line,
                    message: e.to_string(),
                })?;
                netlist.add_beamsplitter(m1, m2, spec);
            }
            "phase" => {
                expect_args(&fields, 2, line)?;
                seen_component = true;
                component_lines.push(line);
                let mode = parse_index(fields[1], line)?;
                let phi = parse_float(fields[2], line)?;
                netlist.add_phase(mode, phi);
            }
            "cross" => {
                expect_args(&fields, 2, line)?;
                seen_component = true;
                component_lines.push(line);
                let m1 = parse_index(fields[1], line)?;
                let m2 = parse_index(fields[2], line)?;
                netlist.add_crosser(m1, m2);
            }
            "pdu" => {
                expect_args(&fields, 6, line)?;
                seen_component = true;
                component_lines.push(line);
                let input = parse_index(fields[1], line)?;
                let out_s = parse_index(fields[2], line)?;
                let out_i = parse_index(fields[3], line)?;
                let eta_pdc = parse_float(fields[4], line)?;
                let eta_puc_s = parse_float(fields[5], line)?;
                let eta_puc_i = parse_float(fields[6], line)?;
                let params = PduParams::new(eta_pdc, eta_puc_s, eta_puc_i).map_err(|e| {
                    Error::NetlistParse {
                        line,
                        message: e.to_string(),
                    }
                })?;
                netlist.add_pdu(input, out_s, out_i, params);
            }
            other => {
                return Err(Error::NetlistParse {
                    line,
                    message: format!("unknown directive `{other}`"),
                });
            }
        }
    }
    Ok((netlist, component_lines))
}

/// Emit the plain-text format: declared modes first, then components in
/// application order. Residual modes are omitted by construction.
pub fn write_netlist(netlist: &Netlist) -> String {
    let mut out = String::new();
    for descriptor in &netlist.registry().modes()[..netlist.declared_mode_count()] {
        out.push_str(&format!(
            "mode {} {} {}\n",
            descriptor.index, descriptor.path_label, descriptor.band
        ));
    }
    for component in netlist.components() {
        out.push_str(&component.to_string());
        out.push('\n');
    }
    out
}
