//! Crate-wide error type.

use thiserror::Error;

use crate::circuit::Diagnostic;

/// Everything that can go wrong across the crate.
///
/// The CLI sorts these into two buckets: [`Error::AtComponent`] marks a
/// failure raised *during* simulation (exit code 3); everything else is an
/// input or configuration problem (exit code 2).
#[derive(Debug, Error)]
pub enum Error {
    /// A mode's photon count would exceed the configured occupancy cap.
    #[error("mode {mode}: occupation {occupancy} exceeds the cap of {n_max}")]
    OccupancyOverflow {
        mode: usize,
        occupancy: u32,
        n_max: u32,
    },

    /// Two states built over different mode registries were combined.
    #[error("states belong to different mode registries")]
    RegistryMismatch,

    /// A state needs at least one mode.
    #[error("mode registry is empty")]
    EmptyRegistry,

    /// Occupancy caps above this break the factorial tables used by the
    /// beam-splitter expansion.
    #[error("occupancy cap {n_max} exceeds the supported maximum of {max}")]
    NMaxUnsupported { n_max: u32, max: u32 },

    /// Prune threshold outside [0, 1).
    #[error("prune epsilon {epsilon} is outside [0, 1)")]
    PruneEpsilonOutOfRange { epsilon: f64 },

    /// An operation referenced a mode index the registry does not contain.
    #[error("mode {mode} is not declared (registry holds {count} modes)")]
    UnknownMode { mode: usize, count: usize },

    /// A two-mode element was given the same mode twice.
    #[error("two-mode element needs distinct modes, got {mode} twice")]
    RepeatedMode { mode: usize },

    /// Beam-splitter mixing angle outside [0, π/2].
    #[error("beam splitter angle {theta} is outside [0, pi/2]")]
    ThetaOutOfRange { theta: f64 },

    /// A conversion efficiency outside [0, 1].
    #[error("efficiency {value} is outside [0, 1]")]
    EfficiencyOutOfRange { value: f64 },

    /// The PDU model is defined for pump occupations 0 and 1 only.
    #[error("mode {mode}: pump occupation {occupancy} is unsupported (PDU acts on 0 or 1 photons)")]
    PumpOccupancyUnsupported { mode: usize, occupancy: u32 },

    /// Mode declarations must all precede components.
    #[error("modes must be declared before any component is added")]
    ModeAfterComponent,

    /// Cascade depth outside the supported range.
    #[error("stage count {stages} is outside 1..={max}")]
    StageCountOutOfRange { stages: u32, max: u32 },

    /// A netlist failed structural validation.
    #[error("invalid netlist: {}", format_diagnostics(.0))]
    InvalidNetlist(Vec<Diagnostic>),

    /// A component failed while the simulator was applying it.
    #[error("component {index} ({component}): {source}")]
    AtComponent {
        index: usize,
        component: String,
        #[source]
        source: Box<Error>,
    },

    /// Netlist text that does not parse.
    #[error("netlist line {line}: {message}")]
    NetlistParse { line: usize, message: String },

    /// Device-config text that does not parse.
    #[error("config line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    /// Device-config text missing required keys.
    #[error("config is missing required keys: {}", .keys.join(", "))]
    ConfigMissingKeys { keys: Vec<String> },

    /// A config value failed physical validation.
    #[error("config: {message}")]
    ConfigInvalid { message: String },

    /// Sellmeier evaluation outside the fitted wavelength range.
    #[error("wavelength {lambda} m is outside the Sellmeier validity range [{min}, {max}] m")]
    SellmeierOutOfRange { lambda: f64, min: f64, max: f64 },

    /// Signal and idler indices coincide, so the SLM bound diverges.
    #[error("signal and idler indices are degenerate; the single-longitudinal-mode bound diverges")]
    DegenerateIndices,

    /// Division by a quantity that must be positive.
    #[error("{quantity} must be positive")]
    NonPositive { quantity: &'static str },

    /// Sweep ranges must be nonempty, positive, and ordered.
    #[error("invalid sweep range: {message}")]
    InvalidRange { message: String },

    /// Logical states of different qubit counts cannot be compared.
    #[error("qubit count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A qubit encoding referenced unusable modes.
    #[error("invalid qubit encoding: {message}")]
    InvalidEncoding { message: String },

    /// A `--target` specification that does not parse.
    #[error("invalid target spec: {message}")]
    TargetSpecParse { message: String },

    /// A command-line argument with an invalid value.
    #[error("{message}")]
    InvalidArgument { message: String },

    /// Refusing to overwrite an existing output without `--force`.
    #[error("output path {path} exists; pass --force to overwrite")]
    OutputExists { path: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    let parts: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
    parts.join("; ")
}

impl Error {
    /// True for errors raised while applying a component during simulation.
    pub fn is_simulation_failure(&self) -> bool {
        matches!(self, Error::AtComponent { .. })
    }
}
