//! Simulator and design calculator for deterministic N-photon sources built
//! from cascaded photon-number doubling units (PDUs) on thin-film lithium
//! niobate (LNOI).
//!
//! A PDU combines one deterministic parametric down-conversion stage (DPDC, a
//! high-Q microring driven so a single pump photon splits into a signal/idler
//! pair with unit probability) with two deterministic up-conversion stages
//! (DPUC, laser-assisted sum-frequency generation that returns each parametric
//! photon to the pump band). Cascading M stages of PDUs doubles a single
//! photon into 2^M photons; interferometers wrapped around the cascade turn
//! those photons into GHZ and cluster states in dual-rail encoding.
//!
//! The crate is split along that physics:
//!
//! * [`fock`] — sparse multimode Fock-state vectors,
//! * [`optics`] — beam splitters, phase shifters, crossers, and the PDU map,
//! * [`circuit`] — netlists, circuit families, and the simulator,
//! * [`netlist_text`] — the plain-text netlist format,
//! * [`device`] — microring/waveguide design formulas (ξ, η_PDC, κ, η_PUC)
//!   and parameter sweeps,
//! * [`config_text`] — the `key = value` device-config format,
//! * [`analysis`] — dual-rail qubit extraction, fidelities, target states,
//! * [`cli`] — the `pdu-forge` command-line front end.
//!
//! All state-vector operations are pure: they take a state by reference and
//! return a fresh one, so states can be shared freely across threads.

pub mod analysis;
pub mod circuit;
pub mod cli;
pub mod config_text;
pub mod constants;
pub mod device;
pub mod error;
pub mod fock;
pub mod netlist_text;
pub mod optics;

pub use error::{Error, Result};
