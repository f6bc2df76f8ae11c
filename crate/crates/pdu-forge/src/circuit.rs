//! Netlists, structural validation, the simulator, and circuit families.
//!
//! A [`Netlist`] is an ordered mode registry plus an ordered component list.
//! Modes are declared first; every PDU then appends its three failure-port
//! modes ("residuals") to the end of the registry, in component order. That
//! convention keeps the plain-text format free of residual bookkeeping: a
//! `pdu` line names only its input and outputs, and parsing regenerates the
//! residual modes at exactly the indices the builder used.
//!
//! Simulation applies components in order to the vacuum, so a [`Netlist`] is
//! also an execution trace: sources first, then the interferometer and the
//! PDU cascade in physical order.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{Band, ModeRegistry, Occupation, StateVector};
use crate::optics::{self, BeamSplitterSpec, PduParams, PduResiduals};

/// Deepest supported doubling cascade; 2^6 = 64 output photons.
pub const MAX_STAGES: u32 = 6;

/// Default phase settings for [`build_cluster4`]; calibrated so the circuit
/// hits the box-cluster target exactly under this crate's beam-splitter
/// convention.
pub const CLUSTER4_DEFAULT_PHASES: [f64; 4] =
    [0.0, std::f64::consts::PI, 0.0, std::f64::consts::PI];

/// One circuit element.
#[derive(Clone, Debug, PartialEq)]
pub enum Component {
    /// Inject a single photon into `mode`.
    Source { mode: usize },
    /// Two-mode coupler on (`m1`, `m2`).
    BeamSplitter {
        m1: usize,
        m2: usize,
        spec: BeamSplitterSpec,
    },
    /// Phase shifter on `mode`.
    Phase { mode: usize, phi: f64 },
    /// Occupation swap between `m1` and `m2`.
    Crosser { m1: usize, m2: usize },
    /// Photon-number doubling unit.
    Pdu {
        input: usize,
        out_s: usize,
        out_i: usize,
        residuals: PduResiduals,
        params: PduParams,
    },
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Source { mode } => write!(f, "source {mode}"),
            Component::BeamSplitter { m1, m2, spec } => {
                write!(f, "bs {m1} {m2} {}", spec.theta())
            }
            Component::Phase { mode, phi } => write!(f, "phase {mode} {phi}"),
            Component::Crosser { m1, m2 } => write!(f, "cross {m1} {m2}"),
            Component::Pdu {
                input,
                out_s,
                out_i,
                params,
                ..
            } => write!(
                f,
                "pdu {input} {out_s} {out_i} {} {} {}",
                params.eta_pdc, params.eta_puc_s, params.eta_puc_i
            ),
        }
    }
}

/// What a structural check found, and at which component.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    /// Index into [`Netlist::components`].
    pub component: usize,
    pub kind: DiagnosticKind,
}

/// Structural problems [`Netlist::validate`] can report.
#[derive(Clone, Debug, PartialEq)]
pub enum DiagnosticKind {
    /// A referenced mode index is not in the registry.
    UnknownMode { mode: usize },
    /// A multi-mode element referenced the same mode twice.
    RepeatedMode { mode: usize },
    /// A PDU port sits in the wrong spectral band.
    BandMismatch {
        mode: usize,
        expected: Band,
        found: Band,
    },
    /// A mode already consumed by a PDU input is referenced downstream.
    TopologyViolation { mode: usize, consumed_by: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DiagnosticKind::UnknownMode { mode } => {
                write!(f, "UnknownMode@{}: mode {mode} is not declared", self.component)
            }
            DiagnosticKind::RepeatedMode { mode } => write!(
                f,
                "RepeatedMode@{}: mode {mode} appears more than once",
                self.component
            ),
            DiagnosticKind::BandMismatch {
                mode,
                expected,
                found,
            } => write!(
                f,
                "BandMismatch@{}: mode {mode} is {found}, expected {expected}",
                self.component
            ),
            DiagnosticKind::TopologyViolation { mode, consumed_by } => write!(
                f,
                "TopologyViolation@{}: mode {mode} was consumed by the pdu at component {consumed_by}",
                self.component
            ),
        }
    }
}

/// A photonic circuit: modes plus an ordered component list.
#[derive(Clone, Debug, PartialEq)]
pub struct Netlist {
    /// Human-readable circuit name (not serialized).
    pub name: String,
    registry: ModeRegistry,
    components: Vec<Component>,
    declared_modes: usize,
}

impl Netlist {
    /// Empty netlist with the default occupancy cap.
    pub fn new(name: &str) -> Self {
        Netlist {
            name: name.to_owned(),
            registry: ModeRegistry::new(),
            components: Vec::new(),
            declared_modes: 0,
        }
    }

    /// Declare a mode. All declarations must precede the first component so
    /// that PDU residual modes land at stable indices.
    pub fn add_mode(&mut self, path_label: &str, band: Band) -> Result<usize> {
        if !self.components.is_empty() {
            return Err(Error::ModeAfterComponent);
        }
        let index = self.registry.add_mode(path_label, band);
        self.declared_modes = index + 1;
        Ok(index)
    }

    /// Full registry, including auto-allocated residual modes.
    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    /// Change the per-mode occupancy cap.
    pub fn set_n_max(&mut self, n_max: u32) -> Result<()> {
        self.registry.set_n_max(n_max)
    }

    /// Number of explicitly declared (non-residual) modes.
    pub fn declared_mode_count(&self) -> usize {
        self.declared_modes
    }

    /// Components in application order.
    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Number of PDUs.
    pub fn pdu_count(&self) -> usize {
        self.components
            .iter()
            .filter(|c| matches!(c, Component::Pdu { .. }))
            .count()
    }

    /// Append a single-photon source on `mode`.
    pub fn add_source(&mut self, mode: usize) {
        self.components.push(Component::Source { mode });
    }

    /// Append a beam splitter.
    pub fn add_beamsplitter(&mut self, m1: usize, m2: usize, spec: BeamSplitterSpec) {
        self.components.push(Component::BeamSplitter { m1, m2, spec });
    }

    /// Append a phase shifter.
    pub fn add_phase(&mut self, mode: usize, phi: f64) {
        self.components.push(Component::Phase { mode, phi });
    }

    /// Append a crosser.
    pub fn add_crosser(&mut self, m1: usize, m2: usize) {
        self.components.push(Component::Crosser { m1, m2 });
    }

    /// Append a PDU, auto-allocating its three residual modes at the end of
    /// the registry. Returns the residual indices.
    pub fn add_pdu(
        &mut self,
        input: usize,
        out_s: usize,
        out_i: usize,
        params: PduParams,
    ) -> PduResiduals {
        let ordinal = self.pdu_count();
        let pdc_fail = self
            .registry
            .add_mode(&format!("pdu{ordinal}_pdc"), Band::Pump);
        let puc_s_fail = self
            .registry
            .add_mode(&format!("pdu{ordinal}_pucs"), Band::Signal);
        let puc_i_fail = self
            .registry
            .add_mode(&format!("pdu{ordinal}_puci"), Band::Idler);
        let residuals = PduResiduals {
            pdc_fail,
            puc_s_fail,
            puc_i_fail,
        };
        self.components.push(Component::Pdu {
            input,
            out_s,
            out_i,
            residuals,
            params,
        });
        residuals
    }

    fn modes_of(component: &Component) -> Vec<usize> {
        match component {
            Component::Source { mode } => vec![*mode],
            Component::BeamSplitter { m1, m2, .. } => vec![*m1, *m2],
            Component::Phase { mode, .. } => vec![*mode],
            Component::Crosser { m1, m2 } => vec![*m1, *m2],
            Component::Pdu {
                input,
                out_s,
                out_i,
                residuals,
                ..
            } => vec![
                *input,
                *out_s,
                *out_i,
                residuals.pdc_fail,
                residuals.puc_s_fail,
                residuals.puc_i_fail,
            ],
        }
    }

    /// Structural checks. An empty list means the netlist is well-formed.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let count = self.registry.mode_count();
        // mode -> component that consumed it as a PDU input
        let mut consumed: BTreeMap<usize, usize> = BTreeMap::new();

        for (index, component) in self.components.iter().enumerate() {
            let modes = Self::modes_of(component);
            let mut all_known = true;
            for &mode in &modes {
                if mode >= count {
                    diags.push(Diagnostic {
                        component: index,
                        kind: DiagnosticKind::UnknownMode { mode },
                    });
                    all_known = false;
                }
            }
            for (k, &mode) in modes.iter().enumerate() {
                if modes[..k].contains(&mode) {
                    diags.push(Diagnostic {
                        component: index,
                        kind: DiagnosticKind::RepeatedMode { mode },
                    });
                }
            }
            for &mode in &modes {
                if let Some(&at) = consumed.get(&mode) {
                    diags.push(Diagnostic {
                        component: index,
                        kind: DiagnosticKind::TopologyViolation {
                            mode,
                            consumed_by: at,
                        },
                    });
                }
            }
            if let Component::Pdu {
                input,
                out_s,
                out_i,
                residuals,
                ..
            } = component
            {
                if all_known {
                    let expectations = [
                        (*input, Band::Pump),
                        (*out_s, Band::Pump),
                        (*out_i, Band::Pump),
                        (residuals.pdc_fail, Band::Pump),
                        (residuals.puc_s_fail, Band::Signal),
                        (residuals.puc_i_fail, Band::Idler),
                    ];
                    for (mode, expected) in expectations {
                        if let Some(found) = self.registry.band(mode) {
                            if found != expected {
                                diags.push(Diagnostic {
                                    component: index,
                                    kind: DiagnosticKind::BandMismatch {
                                        mode,
                                        expected,
                                        found,
                                    },
                                });
                            }
                        }
                    }
                }
                consumed.insert(*input, index);
            }
        }
        diags
    }

    /// Declared pump-band modes never consumed by a PDU, in index order.
    ///
    /// For the built-in circuit families these are exactly the photon output
    /// ports, already arranged so consecutive modes form dual-rail pairs.
    pub fn output_pump_modes(&self) -> Vec<usize> {
        let consumed: Vec<usize> = self
            .components
            .iter()
            .filter_map(|c| match c {
                Component::Pdu { input, .. } => Some(*input),
                _ => None,
            })
            .collect();
        (0..self.declared_modes)
            .filter(|m| self.registry.band(*m) == Some(Band::Pump) && !consumed.contains(m))
            .collect()
    }

    /// Pair up [`Netlist::output_pump_modes`] as (rail0, rail1) qubits.
    pub fn infer_qubit_pairs(&self) -> Result<Vec<(usize, usize)>> {
        let outputs = self.output_pump_modes();
        if outputs.len() % 2 != 0 {
            return Err(Error::InvalidEncoding {
                message: format!(
                    "cannot pair {} output modes into dual-rail qubits",
                    outputs.len()
                ),
            });
        }
        Ok(outputs.chunks(2).map(|c| (c[0], c[1])).collect())
    }
}

/// What a simulation produced.
#[derive(Clone, Debug)]
pub struct SimulationReport {
    /// State after the last component.
    pub final_state: StateVector,
    /// Probability mass satisfying the postselection predicate (1 when no
    /// predicate was supplied).
    pub success_probability: f64,
    /// Renormalized restriction to the predicate's subspace; `None` without a
    /// predicate or when the subspace carries no mass.
    pub postselected_state: Option<StateVector>,
}

/// Run a netlist from the vacuum with no postselection.
pub fn simulate(netlist: &Netlist) -> Result<SimulationReport> {
    simulate_with(netlist, None)
}

/// Run a netlist and postselect on `predicate`.
pub fn simulate_postselected(
    netlist: &Netlist,
    predicate: &dyn Fn(&Occupation) -> bool,
) -> Result<SimulationReport> {
    simulate_with(netlist, Some(predicate))
}

fn simulate_with(
    netlist: &Netlist,
    predicate: Option<&dyn Fn(&Occupation) -> bool>,
) -> Result<SimulationReport> {
    let diagnostics = netlist.validate();
    if !diagnostics.is_empty() {
        return Err(Error::InvalidNetlist(diagnostics));
    }
    let registry = Arc::new(netlist.registry().clone());
    let mut state = StateVector::vacuum(registry)?;
    for (index, component) in netlist.components().iter().enumerate() {
        state = apply_component(&state, component).map_err(|e| Error::AtComponent {
            index,
            component: component.to_string(),
            source: Box::new(e),
        })?;
    }

    let (success_probability, postselected_state) = match predicate {
        None => (1.0, None),
        Some(pred) => {
            let kept: Vec<(Occupation, Complex64)> = state
                .terms()
                .filter(|(occ, _)| pred(occ))
                .map(|(occ, amp)| (occ.clone(), amp))
                .collect();
            let mass: f64 = kept.iter().map(|(_, a)| a.norm_sqr()).sum();
            if mass > 0.0 {
                let restricted =
                    StateVector::from_terms(state.registry().clone(), kept)?.renormalized();
                (mass, Some(restricted))
            } else {
                (0.0, None)
            }
        }
    };

    Ok(SimulationReport {
        final_state: state,
        success_probability,
        postselected_state,
    })
}

fn apply_component(state: &StateVector, component: &Component) -> Result<StateVector> {
    match component {
        Component::Source { mode } => state.create_photon(*mode),
        Component::BeamSplitter { m1, m2, spec } => {
            optics::apply_beamsplitter(state, *m1, *m2, spec)
        }
        Component::Phase { mode, phi } => optics::apply_phase(state, *mode, *phi),
        Component::Crosser { m1, m2 } => optics::apply_crosser(state, *m1, *m2),
        Component::Pdu {
            input,
            out_s,
            out_i,
            residuals,
            params,
        } => optics::apply_pdu(state, *input, *out_s, *out_i, residuals, params),
    }
}

fn check_stages(stages: u32) -> Result<()> {
    if stages == 0 || stages > MAX_STAGES {
        return Err(Error::StageCountOutOfRange {
            stages,
            max: MAX_STAGES,
        });
    }
    Ok(())
}

/// Binary doubling cascade: one source photon through M stages of PDUs,
/// producing 2^M photons in the leaf modes. Uses 2^M − 1 PDUs.
///
/// Tree nodes are laid out in heap order (node t has children 2t+1 and 2t+2),
/// so the leaves occupy the last 2^M mode indices contiguously.
pub fn build_fock_chain(stages: u32) -> Result<Netlist> {
    build_fock_chain_with(stages, PduParams::unit())
}

/// [`build_fock_chain`] with explicit efficiencies applied to every PDU.
pub fn build_fock_chain_with(stages: u32, params: PduParams) -> Result<Netlist> {
    check_stages(stages)?;
    let nodes = (1usize << (stages + 1)) - 1;
    let internal = (1usize << stages) - 1;
    let mut netlist = Netlist::new(&format!("fock_chain_m{stages}"));
    for t in 0..nodes {
        netlist.add_mode(&format!("n{t}"), Band::Pump)?;
    }
    netlist.add_source(0);
    for t in 0..internal {
        netlist.add_pdu(t, 2 * t + 1, 2 * t + 2, params);
    }
    Ok(netlist)
}

/// Path-entangled GHZ circuit: a 50:50 splitter puts the seed photon across
/// two independent depth-M doubling cascades, yielding the dual-rail state
/// (∣0̃⟩^⊗N + e^{iφ}∣1̃⟩^⊗N)/√2 with N = 2^M.
///
/// Rail 0 of qubit j is branch A's j-th leaf, rail 1 is branch B's; leaf
/// modes are interleaved so pair (2j, 2j+1) of the output block is qubit j.
/// The branch phase shifter is set to φ − π/2 to absorb the splitter's i.
pub fn build_ghz(stages: u32, phi: f64) -> Result<Netlist> {
    check_stages(stages)?;
    let nodes = (1usize << (stages + 1)) - 1;
    let internal = (1usize << stages) - 1;
    let leaves = 1usize << stages;
    let first_leaf = internal; // heap order: leaves are nodes internal..nodes

    let mut netlist = Netlist::new(&format!("ghz_m{stages}"));
    let root_a = netlist.add_mode("a0", Band::Pump)?;
    let root_b = netlist.add_mode("b0", Band::Pump)?;

    // heap node -> mode index, per branch
    let mut node_a = vec![0usize; nodes];
    let mut node_b = vec![0usize; nodes];
    node_a[0] = root_a;
    node_b[0] = root_b;
    for t in 1..internal {
        node_a[t] = netlist.add_mode(&format!("a{t}"), Band::Pump)?;
    }
    for t in 1..internal {
        node_b[t] = netlist.add_mode(&format!("b{t}"), Band::Pump)?;
    }
    for j in 0..leaves {
        node_a[first_leaf + j] = netlist.add_mode(&format!("q{j}r0"), Band::Pump)?;
        node_b[first_leaf + j] = netlist.add_mode(&format!("q{j}r1"), Band::Pump)?;
    }

    netlist.add_source(root_a);
    netlist.add_beamsplitter(root_a, root_b, BeamSplitterSpec::balanced());
    netlist.add_phase(root_b, phi - std::f64::consts::FRAC_PI_2);
    for t in 0..internal {
        netlist.add_pdu(node_a[t], node_a[2 * t + 1], node_a[2 * t + 2], PduParams::unit());
    }
    for t in 0..internal {
        netlist.add_pdu(node_b[t], node_b[2 * t + 1], node_b[2 * t + 2], PduParams::unit());
    }
    Ok(netlist)
}

/// Four-qubit box-cluster circuit: two doubling stages wrapped in an
/// interferometer, producing
/// (∣0̃0̃0̃0̃⟩ + ∣0̃0̃1̃1̃⟩ + ∣1̃1̃0̃0̃⟩ − ∣1̃1̃1̃1̃⟩)/2
/// at the default phases ([`CLUSTER4_DEFAULT_PHASES`]).
///
/// `phases[0]` sits on the lower branch between the input splitter and the
/// first doubling stage; `phases[1..4]` sit on three of the four mid-circuit
/// rails after the second splitter layer. The defaults are calibrated to this
/// crate's i-on-reflection splitter convention; other conventions need other
/// settings, which is why all four are exposed.
pub fn build_cluster4(phases: [f64; 4]) -> Netlist {
    let mut netlist = Netlist::new("cluster4");
    let u = netlist.add_mode("u", Band::Pump).expect("fresh netlist");
    let v = netlist.add_mode("v", Band::Pump).expect("fresh netlist");
    let us = netlist.add_mode("us", Band::Pump).expect("fresh netlist");
    let ui = netlist.add_mode("ui", Band::Pump).expect("fresh netlist");
    let vs = netlist.add_mode("vs", Band::Pump).expect("fresh netlist");
    let vi = netlist.add_mode("vi", Band::Pump).expect("fresh netlist");
    let mut rails = [0usize; 8];
    for q in 0..4 {
        rails[2 * q] = netlist
            .add_mode(&format!("q{q}r0"), Band::Pump)
            .expect("fresh netlist");
        rails[2 * q + 1] = netlist
            .add_mode(&format!("q{q}r1"), Band::Pump)
            .expect("fresh netlist");
    }

    netlist.add_source(u);
    netlist.add_beamsplitter(u, v, BeamSplitterSpec::balanced());
    netlist.add_phase(v, phases[0]);
    // first doubling stage
    netlist.add_pdu(u, us, ui, PduParams::unit());
    netlist.add_pdu(v, vs, vi, PduParams::unit());
    // bring the two signal rails together, then interfere signals with
    // signals and idlers with idlers
    netlist.add_crosser(ui, vs);
    netlist.add_beamsplitter(us, ui, BeamSplitterSpec::balanced());
    netlist.add_beamsplitter(vs, vi, BeamSplitterSpec::balanced());
    netlist.add_phase(ui, phases[1]);
    netlist.add_phase(vs, phases[2]);
    netlist.add_phase(vi, phases[3]);
    // second doubling stage; which PDU fires decides both qubits of its pair
    netlist.add_pdu(us, rails[0], rails[2], PduParams::unit()); // q0r0, q1r0
    netlist.add_pdu(ui, rails[1], rails[3], PduParams::unit()); // q0r1, q1r1
    netlist.add_pdu(vs, rails[4], rails[6], PduParams::unit()); // q2r0, q3r0
    netlist.add_pdu(vi, rails[5], rails[7], PduParams::unit()); // q2r1, q3r1
    netlist
}

/// [`build_cluster4`] at the calibrated default phases.
pub fn build_cluster4_default() -> Netlist {
    build_cluster4(CLUSTER4_DEFAULT_PHASES)
}
