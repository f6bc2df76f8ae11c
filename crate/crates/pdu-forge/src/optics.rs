//! Linear elements and the photon-number doubling unit (PDU).
//!
//! Conventions, fixed once for the whole crate:
//!
//! * Beam splitter (symmetric, i-on-reflection):
//!   a† → cos θ·a† + i sin θ·b†,  b† → i sin θ·a† + cos θ·b†.
//!   θ = π/4 is the balanced 50:50 splitter.
//! * Phase shifter on mode m: ∣n_m⟩ picks up e^{i n_m φ}.
//! * Crosser: occupation swap between two modes (no phase).
//! * DPDC carries −i on the converted pair (∣1⟩_p → −i∣1,1⟩_{s,i} at unit
//!   efficiency); DPUC carries +1 on conversion. These phases follow from the
//!   −iξ(…) interaction Hamiltonians evaluated at the π/2 working points.
//!
//! Every element is linear, preserves the norm, and returns a fresh state.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{Occupation, StateVector};

/// Mixing angle of a two-mode coupler, restricted to [0, π/2].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamSplitterSpec {
    theta: f64,
}

impl BeamSplitterSpec {
    /// Coupler with mixing angle `theta` ∈ [0, π/2].
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::ThetaOutOfRange { theta });
        }
        Ok(BeamSplitterSpec { theta })
    }

    /// Balanced 50:50 splitter (θ = π/4).
    pub fn balanced() -> Self {
        BeamSplitterSpec { theta: FRAC_PI_4 }
    }

    /// Mixing angle in radians.
    pub fn theta(&self) -> f64 {
        self.theta
    }
}

impl Default for BeamSplitterSpec {
    fn default() -> Self {
        Self::balanced()
    }
}

/// Conversion efficiencies of one PDU.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PduParams {
    /// DPDC pair-creation probability η_PDC ∈ [0, 1].
    pub eta_pdc: f64,
    /// DPUC conversion probability for the signal arm, η_PUC,s ∈ [0, 1].
    pub eta_puc_s: f64,
    /// DPUC conversion probability for the idler arm, η_PUC,i ∈ [0, 1].
    pub eta_puc_i: f64,
}

impl PduParams {
    /// Validated parameter set.
    pub fn new(eta_pdc: f64, eta_puc_s: f64, eta_puc_i: f64) -> Result<Self> {
        for value in [eta_pdc, eta_puc_s, eta_puc_i] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::EfficiencyOutOfRange { value });
            }
        }
        Ok(PduParams {
            eta_pdc,
            eta_puc_s,
            eta_puc_i,
        })
    }

    /// The lossless unit: every efficiency 1.
    pub fn unit() -> Self {
        PduParams {
            eta_pdc: 1.0,
            eta_puc_s: 1.0,
            eta_puc_i: 1.0,
        }
    }
}

/// Failure-port modes of one PDU.
///
/// `pdc_fail` catches the unconverted pump photon (pump band); `puc_s_fail`
/// and `puc_i_fail` catch parametric photons the up-converters missed
/// (signal and idler bands).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PduResiduals {
    pub pdc_fail: usize,
    pub puc_s_fail: usize,
    pub puc_i_fail: usize,
}

fn check_distinct(modes: &[usize]) -> Result<()> {
    for (k, &m) in modes.iter().enumerate() {
        if modes[..k].contains(&m) {
            return Err(Error::RepeatedMode { mode: m });
        }
    }
    Ok(())
}

/// Factorials 0! … 170! as f64 (171! overflows).
fn factorial(n: u32) -> f64 {
    debug_assert!(n <= 170);
    let mut acc = 1.0;
    for k in 2..=n as u64 {
        acc *= k as f64;
    }
    acc
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Apply a beam splitter to modes (`m1`, `m2`).
pub fn apply_beamsplitter(
    state: &StateVector,
    m1: usize,
    m2: usize,
    spec: &BeamSplitterSpec,
) -> Result<StateVector> {
    apply_bs_convention(state, m1, m2, spec, Complex64::new(0.0, 1.0))
}

/// Apply the adjoint (inverse) beam splitter: reflection carries −i.
pub fn apply_beamsplitter_adjoint(
    state: &StateVector,
    m1: usize,
    m2: usize,
    spec: &BeamSplitterSpec,
) -> Result<StateVector> {
    apply_bs_convention(state, m1, m2, spec, Complex64::new(0.0, -1.0))
}

fn apply_bs_convention(
    state: &StateVector,
    m1: usize,
    m2: usize,
    spec: &BeamSplitterSpec,
    reflection_unit: Complex64,
) -> Result<StateVector> {
    let registry = state.registry().clone();
    if m1.max(m2) >= registry.mode_count() {
        return Err(Error::UnknownMode {
            mode: m1.max(m2),
            count: registry.mode_count(),
        });
    }
    check_distinct(&[m1, m2])?;

    let n_max = registry.n_max();
    let cos = spec.theta.cos();
    let sin = spec.theta.sin();
    let refl = reflection_unit * sin;

    let mut map: BTreeMap<Occupation, Complex64> = BTreeMap::new();
    for (occ, amp) in state.terms() {
        let n1 = occ.get(m1);
        let n2 = occ.get(m2);
        if n1 + n2 == 0 {
            *map.entry(occ.clone()).or_insert(Complex64::new(0.0, 0.0)) += amp;
            continue;
        }
        // Expand (cos·a† + i sin·b†)^{n1} (i sin·a† + cos·b†)^{n2} term by
        // term; j photons from the first factor and k from the second land in
        // mode m1.
        let base = amp / (factorial(n1) * factorial(n2)).sqrt();
        for j in 0..=n1 {
            for k in 0..=n2 {
                let out1 = j + k;
                let out2 = (n1 - j) + (n2 - k);
                if out1 > n_max {
                    return Err(Error::OccupancyOverflow {
                        mode: m1,
                        occupancy: out1,
                        n_max,
                    });
                }
                if out2 > n_max {
                    return Err(Error::OccupancyOverflow {
                        mode: m2,
                        occupancy: out2,
                        n_max,
                    });
                }
                let coeff = binomial(n1, j)
                    * binomial(n2, k)
                    * cos.powi((j + (n2 - k)) as i32);
                let refl_power = refl.powu((n1 - j) + k);
                let weight =
                    base * coeff * refl_power * (factorial(out1) * factorial(out2)).sqrt();
                let mut next = occ.clone();
                next.set(m1, out1);
                next.set(m2, out2);
                *map.entry(next).or_insert(Complex64::new(0.0, 0.0)) += weight;
            }
        }
    }
    let out = StateVector::from_accumulated(registry, map, state.prune_epsilon());
    debug_assert!((out.norm() - state.norm()).abs() < 1e-10);
    Ok(out)
}

/// Apply a phase shifter: each term picks up e^{i n_m φ}.
pub fn apply_phase(state: &StateVector, mode: usize, phi: f64) -> Result<StateVector> {
    let registry = state.registry().clone();
    if mode >= registry.mode_count() {
        return Err(Error::UnknownMode {
            mode,
            count: registry.mode_count(),
        });
    }
    let mut map = BTreeMap::new();
    for (occ, amp) in state.terms() {
        let n = occ.get(mode);
        let rot = Complex64::from_polar(1.0, n as f64 * phi);
        map.insert(occ.clone(), amp * rot);
    }
    Ok(StateVector::from_accumulated(
        registry,
        map,
        state.prune_epsilon(),
    ))
}

/// Apply a waveguide crosser: swap the occupations of two modes.
pub fn apply_crosser(state: &StateVector, m1: usize, m2: usize) -> Result<StateVector> {
    let registry = state.registry().clone();
    if m1.max(m2) >= registry.mode_count() {
        return Err(Error::UnknownMode {
            mode: m1.max(m2),
            count: registry.mode_count(),
        });
    }
    check_distinct(&[m1, m2])?;
    let mut map = BTreeMap::new();
    for (occ, amp) in state.terms() {
        let mut next = occ.clone();
        let (a, b) = (occ.get(m1), occ.get(m2));
        next.set(m1, b);
        next.set(m2, a);
        map.insert(next, amp);
    }
    Ok(StateVector::from_accumulated(
        registry,
        map,
        state.prune_epsilon(),
    ))
}

/// Apply one PDU.
///
/// A pump photon in `input` either fails to down-convert (amplitude
/// √(1−η_PDC), photon moves to `residuals.pdc_fail`) or splits into a
/// signal/idler pair with amplitude −i√η_PDC. Each parametric photon is then
/// up-converted into its output (amplitude √η_PUC) or left behind in the
/// matching `puc_*_fail` port (amplitude √(1−η_PUC)). Empty inputs pass
/// through; occupations ≥ 2 are outside the model and raise
/// [`Error::PumpOccupancyUnsupported`].
pub fn apply_pdu(
    state: &StateVector,
    input: usize,
    out_s: usize,
    out_i: usize,
    residuals: &PduResiduals,
    params: &PduParams,
) -> Result<StateVector> {
    let registry = state.registry().clone();
    let all = [
        input,
        out_s,
        out_i,
        residuals.pdc_fail,
        residuals.puc_s_fail,
        residuals.puc_i_fail,
    ];
    for &m in &all {
        if m >= registry.mode_count() {
            return Err(Error::UnknownMode {
                mode: m,
                count: registry.mode_count(),
            });
        }
    }
    check_distinct(&all)?;

    let n_max = registry.n_max();
    let amp_pdc_fail = (1.0 - params.eta_pdc).sqrt();
    // -i on the converted pair.
    let amp_pair = Complex64::new(0.0, -1.0) * params.eta_pdc.sqrt();
    let s_arm = [
        (out_s, params.eta_puc_s.sqrt()),
        (residuals.puc_s_fail, (1.0 - params.eta_puc_s).sqrt()),
    ];
    let i_arm = [
        (out_i, params.eta_puc_i.sqrt()),
        (residuals.puc_i_fail, (1.0 - params.eta_puc_i).sqrt()),
    ];

    let mut map: BTreeMap<Occupation, Complex64> = BTreeMap::new();
    let mut add = |occ: Occupation, amp: Complex64| {
        *map.entry(occ).or_insert(Complex64::new(0.0, 0.0)) += amp;
    };

    for (occ, amp) in state.terms() {
        match occ.get(input) {
            0 => add(occ.clone(), amp),
            1 => {
                let mut vacated = occ.clone();
                vacated.set(input, 0);
                if amp_pdc_fail != 0.0 {
                    let n = vacated.get(residuals.pdc_fail) + 1;
                    if n > n_max {
                        return Err(Error::OccupancyOverflow {
                            mode: residuals.pdc_fail,
                            occupancy: n,
                            n_max,
                        });
                    }
                    let mut next = vacated.clone();
                    next.set(residuals.pdc_fail, n);
                    add(next, amp * amp_pdc_fail);
                }
                if params.eta_pdc > 0.0 {
                    for (s_mode, s_amp) in s_arm {
                        if s_amp == 0.0 {
                            continue;
                        }
                        for (i_mode, i_amp) in i_arm {
                            if i_amp == 0.0 {
                                continue;
                            }
                            let ns = vacated.get(s_mode) + 1;
                            if ns > n_max {
                                return Err(Error::OccupancyOverflow {
                                    mode: s_mode,
                                    occupancy: ns,
                                    n_max,
                                });
                            }
                            let mut next = vacated.clone();
                            next.set(s_mode, ns);
                            let ni = next.get(i_mode) + 1;
                            if ni > n_max {
                                return Err(Error::OccupancyOverflow {
                                    mode: i_mode,
                                    occupancy: ni,
                                    n_max,
                                });
                            }
                            next.set(i_mode, ni);
                            add(next, amp * amp_pair * s_amp * i_amp);
                        }
                    }
                }
            }
            n => {
                return Err(Error::PumpOccupancyUnsupported {
                    mode: input,
                    occupancy: n,
                })
            }
        }
    }
    let out = StateVector::from_accumulated(registry, map, state.prune_epsilon());
    debug_assert!((out.norm() - state.norm()).abs() < 1e-10);
    Ok(out)
}
