//! Command-line front end: `design`, `generate`, `simulate`.
//!
//! Exit codes are a stable contract: 0 success, 2 input error (bad flags,
//! unparseable config/netlist, refused overwrite), 3 simulation error (a
//! structurally valid netlist whose physics the engine rejects, e.g. two
//! photons entering one PDU).
//!
//! Every command is deterministic — no randomness, no wall clock — so
//! identical invocations produce byte-identical output. The only
//! environment hook is `PDU_FORGE_NMAX`, which overrides the per-mode
//! occupancy cap for `simulate`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    extract_logical, fidelity_logical, target_cluster4, target_ghz, LogicalState, QubitEncoding,
};
use crate::circuit::{
    build_cluster4, build_fock_chain_with, build_ghz, simulate, simulate_postselected, Netlist,
    SimulationReport, CLUSTER4_DEFAULT_PHASES,
};
use crate::config_text::parse_device_config;
use crate::constants::omega_from_wavelength;
use crate::device::{
    kappa, kappa_from_calibration, p_required_dpuc, q_required_dpdc, q_slm_min, sweep_eta_pdc,
    sweep_eta_puc, sweep_q_required_vs_radius, xi, DeviceConfig, LinearRange, SfgProcess,
};
use crate::error::{Error, Result};
use crate::fock::{Occupation, StateVector};
use crate::netlist_text::{parse_netlist, write_netlist};
use crate::optics::PduParams;

/// Environment variable overriding the per-mode occupancy cap.
pub const NMAX_ENV: &str = "PDU_FORGE_NMAX";

#[derive(Parser)]
#[command(
    name = "pdu-forge",
    version,
    about = "Design calculator and Fock-space simulator for photon-number doubling cascades"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate device formulas from a config file: requirement summary
    /// and efficiency sweeps as CSV.
    Design(DesignArgs),
    /// Emit a circuit-family netlist in the plain-text format.
    Generate(GenerateArgs),
    /// Simulate a netlist file and report on the final state.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct DesignArgs {
    /// Device config file (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Print the design-requirement summary (default when no sweep asked).
    #[arg(long)]
    summary: bool,
    /// Full-precision numbers instead of 3 significant figures.
    #[arg(long)]
    raw: bool,
    /// Tabulate one of the efficiency/requirement curves.
    #[arg(long, value_enum)]
    sweep: Option<SweepKind>,
    /// Lower quality factor (sweep eta_pdc).
    #[arg(long)]
    qmin: Option<f64>,
    /// Upper quality factor (sweep eta_pdc).
    #[arg(long)]
    qmax: Option<f64>,
    /// Lower ring radius in m (sweep q_required).
    #[arg(long)]
    rmin: Option<f64>,
    /// Upper ring radius in m (sweep q_required).
    #[arg(long)]
    rmax: Option<f64>,
    /// Lower SFG power in W (sweep eta_puc).
    #[arg(long)]
    pmin: Option<f64>,
    /// Upper SFG power in W (sweep eta_puc).
    #[arg(long)]
    pmax: Option<f64>,
    /// Lower waveguide length in m (sweep eta_puc).
    #[arg(long)]
    lmin: Option<f64>,
    /// Upper waveguide length in m (sweep eta_puc).
    #[arg(long)]
    lmax: Option<f64>,
    /// Grid points along the first sweep axis.
    #[arg(long, default_value_t = 500)]
    points: usize,
    /// Grid points along the length axis (sweep eta_puc); defaults to
    /// --points.
    #[arg(long)]
    lpoints: Option<usize>,
    /// Write sweep CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overwrite an existing output file.
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    /// η_PDC versus quality factor.
    #[value(name = "eta_pdc")]
    EtaPdc,
    /// Q required for unit η_PDC versus ring radius.
    #[value(name = "q_required")]
    QRequired,
    /// η_PUC over an SFG-power × length grid.
    #[value(name = "eta_puc")]
    EtaPuc,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(subcommand)]
    family: Family,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the netlist here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overwrite an existing output file.
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum Family {
    /// Binary doubling cascade producing the 2^M-photon Fock state.
    Fock {
        /// Doubling stages M (1..=6).
        #[arg(long)]
        stages: u32,
        /// Down-conversion efficiency of every PDU.
        #[arg(long, default_value_t = 1.0)]
        eta_pdc: f64,
        /// Signal up-conversion efficiency of every PDU.
        #[arg(long, default_value_t = 1.0)]
        eta_puc_s: f64,
        /// Idler up-conversion efficiency of every PDU.
        #[arg(long, default_value_t = 1.0)]
        eta_puc_i: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Dual-rail GHZ state on N = 2^M qubits.
    Ghz {
        /// Doubling stages M per branch (1..=6).
        #[arg(long)]
        stages: u32,
        /// Relative phase φ of the ∣1̃⟩^⊗N branch.
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Four-qubit box-cluster state.
    Cluster4 {
        /// Four phase-shifter settings "a,b,c,d" in rad; defaults to the
        /// calibrated values.
        #[arg(long)]
        phases: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct SimulateArgs {
    /// Netlist file in the plain-text format.
    netlist: PathBuf,
    /// Postselect on the dual-rail logical subspace (one photon per pair,
    /// vacuum elsewhere).
    #[arg(long)]
    postselect: bool,
    /// Explicit dual-rail pairs, e.g. "0:1,2:3"; inferred from the netlist
    /// when omitted.
    #[arg(long)]
    encoding: Option<String>,
    /// Fidelity target: "ghz:<N>:<phi>" or "cluster4".
    #[arg(long)]
    target: Option<String>,
    /// Write the final basis terms as CSV here.
    #[arg(long)]
    terms_out: Option<PathBuf>,
    /// Overwrite an existing output file.
    #[arg(long)]
    force: bool,
    /// Full-precision numbers instead of fixed 6 decimals.
    #[arg(long)]
    raw: bool,
}

/// What a command run touched; the paths are checked before any work
/// happens. Outputs are never overwritten without `force`. Runs carry no
/// seed because nothing in the pipeline is randomized.
#[derive(Clone, Debug)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub force: bool,
    pub postselect: bool,
}

impl RunManifest {
    /// "inputs exist, outputs don't collide" — the filesystem side of the
    /// exit-code-2 contract.
    pub fn check(&self) -> Result<()> {
        for input in &self.inputs {
            if !input.exists() {
                return Err(Error::InvalidArgument {
                    message: format!("input path {} does not exist", input.display()),
                });
            }
        }
        for output in &self.outputs {
            if output.exists() && !self.force {
                return Err(Error::OutputExists {
                    path: output.display().to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Parse "r0:r1,r0:r1,..." into dual-rail pairs.
pub fn parse_encoding(text: &str) -> Result<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    for chunk in text.split(',') {
        let Some((r0, r1)) = chunk.split_once(':') else {
            return Err(Error::InvalidEncoding {
                message: format!("`{chunk}` is not a rail pair (expected `r0:r1`)"),
            });
        };
        let parse = |token: &str| -> Result<usize> {
            token.trim().parse().map_err(|_| Error::InvalidEncoding {
                message: format!("`{token}` is not a mode index"),
            })
        };
        pairs.push((parse(r0)?, parse(r1)?));
    }
    Ok(pairs)
}

/// A `--target` value.
#[derive(Clone, Debug, PartialEq)]
pub enum TargetSpec {
    Ghz { qubits: usize, phi: f64 },
    Cluster4,
}

/// Parse "ghz:<N>:<phi>" or "cluster4".
pub fn parse_target_spec(text: &str) -> Result<TargetSpec> {
    if text == "cluster4" {
        return Ok(TargetSpec::Cluster4);
    }
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        ["ghz", qubits, phi] => {
            let qubits: usize = qubits.parse().map_err(|_| Error::TargetSpecParse {
                message: format!("`{qubits}` is not a qubit count"),
            })?;
            let phi: f64 = phi.parse().map_err(|_| Error::TargetSpecParse {
                message: format!("`{phi}` is not a phase"),
            })?;
            if !phi.is_finite() {
                return Err(Error::TargetSpecParse {
                    message: "phase must be finite".to_owned(),
                });
            }
            Ok(TargetSpec::Ghz { qubits, phi })
        }
        _ => Err(Error::TargetSpecParse {
            message: format!("`{text}` (expected `ghz:<N>:<phi>` or `cluster4`)"),
        }),
    }
}

impl TargetSpec {
    fn logical_state(&self) -> Result<LogicalState> {
        match self {
            TargetSpec::Ghz { qubits, phi } => target_ghz(*qubits, *phi),
            TargetSpec::Cluster4 => Ok(target_cluster4()),
        }
    }
}

/// Entry point: parse argv, run, map errors onto the exit-code contract.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(error) => {
            eprintln!("error: {error}");
            if error.is_simulation_failure() {
                3
            } else {
                2
            }
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Design(args) => cmd_design(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Simulate(args) => cmd_simulate(args),
    }
}

fn write_or_print(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(path) => {
            std::fs::write(path, contents)?;
            Ok(())
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn fmt_summary(value: f64, raw: bool) -> String {
    if raw {
        format!("{value}")
    } else {
        format!("{value:.2e}")
    }
}

fn fmt_probability(value: f64, raw: bool) -> String {
    if raw {
        format!("{value}")
    } else {
        format!("{value:.6}")
    }
}

/// κ plus the length η_PUC = 1 is quoted at. An empirical calibration point
/// in the config wins over the literal κ formula; without one, the SFG1
/// process and a 1 cm reference length are used.
fn resolve_kappa(config: &DeviceConfig) -> Result<(f64, f64)> {
    match &config.puc_calibration {
        Some(cal) => Ok((kappa_from_calibration(cal.power, cal.length)?, cal.length)),
        None => Ok((kappa(config, SfgProcess::Sfg1), 1e-2)),
    }
}

fn load_config(path: &Path) -> Result<DeviceConfig> {
    let text = std::fs::read_to_string(path)?;
    let (config, warnings) = parse_device_config(&text)?;
    for warning in warnings {
        eprintln!("warning: {}", warning.message);
    }
    Ok(config)
}

fn require_flag(value: Option<f64>, flag: &str, sweep: &str) -> Result<f64> {
    value.ok_or_else(|| Error::InvalidArgument {
        message: format!("--sweep {sweep} requires {flag}"),
    })
}

fn cmd_design(args: DesignArgs) -> Result<()> {
    let manifest = RunManifest {
        subcommand: "design",
        inputs: vec![args.config.clone()],
        outputs: args.out.clone().into_iter().collect(),
        force: args.force,
        postselect: false,
    };
    manifest.check()?;
    let config = load_config(&args.config)?;

    if let Some(kind) = args.sweep {
        let table = match kind {
            SweepKind::EtaPdc => {
                let qmin = require_flag(args.qmin, "--qmin", "eta_pdc")?;
                let qmax = require_flag(args.qmax, "--qmax", "eta_pdc")?;
                let omega = omega_from_wavelength(config.lambda_i);
                sweep_eta_pdc(&config, omega, &LinearRange::new(qmin, qmax, args.points)?)
            }
            SweepKind::QRequired => {
                let rmin = require_flag(args.rmin, "--rmin", "q_required")?;
                let rmax = require_flag(args.rmax, "--rmax", "q_required")?;
                let omega = omega_from_wavelength(config.lambda_i);
                sweep_q_required_vs_radius(
                    &config,
                    omega,
                    &LinearRange::new(rmin, rmax, args.points)?,
                )?
            }
            SweepKind::EtaPuc => {
                let pmin = require_flag(args.pmin, "--pmin", "eta_puc")?;
                let pmax = require_flag(args.pmax, "--pmax", "eta_puc")?;
                let lmin = require_flag(args.lmin, "--lmin", "eta_puc")?;
                let lmax = require_flag(args.lmax, "--lmax", "eta_puc")?;
                let (kappa, _) = resolve_kappa(&config)?;
                sweep_eta_puc(
                    kappa,
                    &LinearRange::new(pmin, pmax, args.points)?,
                    &LinearRange::new(lmin, lmax, args.lpoints.unwrap_or(args.points))?,
                )
            }
        };
        write_or_print(args.out.as_deref(), &table.to_csv())?;
    }

    if args.summary || args.sweep.is_none() {
        let omega_slm = omega_from_wavelength(0.5 * (config.lambda_s + config.lambda_i));
        let q_slm = q_slm_min(&config, omega_slm)?;
        let omega_i = omega_from_wavelength(config.lambda_i);
        let q_dpdc = q_required_dpdc(xi(&config), omega_i)?;
        let (kappa, length) = resolve_kappa(&config)?;
        let p_dpuc = p_required_dpuc(kappa, length)?;
        let mut summary = String::new();
        let _ = writeln!(summary, "q_slm_min {}", fmt_summary(q_slm, args.raw));
        let _ = writeln!(summary, "q_required_dpdc {}", fmt_summary(q_dpdc, args.raw));
        let _ = writeln!(summary, "p_required_dpuc {}", fmt_summary(p_dpuc, args.raw));
        print!("{summary}");
    }
    Ok(())
}

fn parse_phases(text: &str) -> Result<[f64; 4]> {
    let values: Vec<f64> = text
        .split(',')
        .map(|token| {
            token.trim().parse::<f64>().map_err(|_| Error::InvalidArgument {
                message: format!("`{token}` is not a phase in --phases"),
            })
        })
        .collect::<Result<_>>()?;
    let values: [f64; 4] = values.try_into().map_err(|values: Vec<f64>| {
        Error::InvalidArgument {
            message: format!("--phases needs exactly 4 values, got {}", values.len()),
        }
    })?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument {
            message: "--phases values must be finite".to_owned(),
        });
    }
    Ok(values)
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let (netlist, output) = match args.family {
        Family::Fock {
            stages,
            eta_pdc,
            eta_puc_s,
            eta_puc_i,
            output,
        } => {
            let params = PduParams::new(eta_pdc, eta_puc_s, eta_puc_i)?;
            (build_fock_chain_with(stages, params)?, output)
        }
        Family::Ghz { stages, phi, output } => (build_ghz(stages, phi)?, output),
        Family::Cluster4 { phases, output } => {
            let phases = match phases {
                Some(text) => parse_phases(&text)?,
                None => CLUSTER4_DEFAULT_PHASES,
            };
            (build_cluster4(phases), output)
        }
    };
    let manifest = RunManifest {
        subcommand: "generate",
        inputs: Vec::new(),
        outputs: output.out.clone().into_iter().collect(),
        force: output.force,
        postselect: false,
    };
    manifest.check()?;
    write_or_print(output.out.as_deref(), &write_netlist(&netlist))
}

fn apply_nmax_env(netlist: &mut Netlist) -> Result<()> {
    let Ok(raw) = std::env::var(NMAX_ENV) else {
        return Ok(());
    };
    let n_max: u32 = raw.parse().map_err(|_| Error::InvalidArgument {
        message: format!("{NMAX_ENV}=`{raw}` is not an occupancy cap"),
    })?;
    netlist.set_n_max(n_max)
}

fn round12(value: f64) -> f64 {
    (value * 1e12).round() / 1e12
}

fn terms_csv(state: &StateVector) -> String {
    let mut out = String::from("occupation,re,im,probability\n");
    for (occ, amp) in state.terms() {
        let _ = writeln!(out, "{occ},{},{},{}", amp.re, amp.im, amp.norm_sqr());
    }
    out
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let manifest = RunManifest {
        subcommand: "simulate",
        inputs: vec![args.netlist.clone()],
        outputs: args.terms_out.clone().into_iter().collect(),
        force: args.force,
        postselect: args.postselect,
    };
    manifest.check()?;

    let text = std::fs::read_to_string(&args.netlist)?;
    let (mut netlist, component_lines) = parse_netlist(&text)?;
    apply_nmax_env(&mut netlist)?;

    // the logical-readout block (leakage, fidelity, postselection) is opt-in:
    // it needs a dual-rail pairing, explicit or inferred
    let want_logical = args.postselect || args.target.is_some() || args.encoding.is_some();
    let encoding = if want_logical {
        let pairs = match &args.encoding {
            Some(spec) => Some(parse_encoding(spec)?),
            None => netlist
                .infer_qubit_pairs()
                .ok()
                .filter(|pairs| !pairs.is_empty()),
        };
        let encoding = pairs
            .map(|pairs| QubitEncoding::new(pairs, netlist.registry()))
            .transpose()?;
        if encoding.is_none() {
            return Err(Error::InvalidEncoding {
                message: "no dual-rail pairing could be inferred; pass --encoding".to_owned(),
            });
        }
        encoding
    } else {
        None
    };
    let target = args
        .target
        .as_deref()
        .map(parse_target_spec)
        .transpose()?
        .map(|spec| spec.logical_state())
        .transpose()?;

    let report: SimulationReport = if args.postselect {
        let encoding = encoding.as_ref().expect("checked above");
        let predicate = logical_subspace_predicate(encoding, netlist.registry().mode_count());
        simulate_postselected(&netlist, &predicate).map_err(|e| at_line(e, &component_lines))?
    } else {
        simulate(&netlist).map_err(|e| at_line(e, &component_lines))?
    };

    let reported: &StateVector = report
        .postselected_state
        .as_ref()
        .unwrap_or(&report.final_state);

    let mut out = String::new();
    let _ = writeln!(out, "modes: {}", netlist.registry().mode_count());
    let _ = writeln!(out, "components: {}", netlist.components().len());
    let _ = writeln!(
        out,
        "success_probability: {}",
        fmt_probability(report.success_probability, args.raw)
    );
    if let Some(encoding) = &encoding {
        let logical = extract_logical(reported, encoding)?;
        let _ = writeln!(out, "leakage: {}", fmt_probability(logical.leakage, args.raw));
        if let Some(target) = &target {
            let fidelity = fidelity_logical(&logical, target)?;
            let _ = writeln!(out, "fidelity: {}", fmt_probability(fidelity, args.raw));
        }
    }
    let mut photons = crate::analysis::photon_number_distribution(reported);
    if !args.raw {
        for probability in photons.values_mut() {
            *probability = round12(*probability);
        }
    }
    let _ = writeln!(out, "photons: {photons:?}");
    let _ = writeln!(out, "terms: {}", reported.term_count());
    print!("{out}");

    if let Some(path) = &args.terms_out {
        std::fs::write(path, terms_csv(reported))?;
    }
    Ok(())
}

/// Tag a simulation failure with the netlist line its component came from.
fn at_line(error: Error, component_lines: &[usize]) -> Error {
    match error {
        Error::AtComponent {
            index,
            component,
            source,
        } => {
            let component = match component_lines.get(index) {
                Some(line) => format!("{component}, netlist line {line}"),
                None => component,
            };
            Error::AtComponent {
                index,
                component,
                source,
            }
        }
        other => other,
    }
}

/// Acceptance predicate for dual-rail postselection: one photon per pair,
/// vacuum in every other mode.
pub fn logical_subspace_predicate(
    encoding: &QubitEncoding,
    mode_count: usize,
) -> impl Fn(&Occupation) -> bool {
    let pairs = encoding.pairs().to_vec();
    let mut in_pair = vec![false; mode_count];
    for &(r0, r1) in &pairs {
        if r0 < mode_count {
            in_pair[r0] = true;
        }
        if r1 < mode_count {
            in_pair[r1] = true;
        }
    }
    move |occ: &Occupation| {
        pairs
            .iter()
            .all(|&(r0, r1)| occ.get(r0) + occ.get(r1) == 1)
            && in_pair
                .iter()
                .enumerate()
                .all(|(mode, flagged)| *flagged || occ.get(mode) == 0)
    }
}
