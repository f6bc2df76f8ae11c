//! Sparse multimode Fock-state vectors.
//!
//! A state is a map from occupation vectors ∣n₀ n₁ … n_{M−1}⟩ to complex
//! amplitudes, stored in a `BTreeMap` so iteration order (and therefore any
//! serialized output) is canonical. Only nonzero terms are stored; the
//! circuits of interest keep a handful of photons spread over hundreds of
//! modes, where a dense vector would be astronomically large.
//!
//! Per-mode occupation is capped at [`ModeRegistry::n_max`] (default 4).
//! Exceeding the cap is a hard [`Error::OccupancyOverflow`] rather than a
//! silent truncation, so unitarity can never leak away unnoticed.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default per-mode occupancy cap.
pub const DEFAULT_N_MAX: u32 = 4;

/// Largest supported occupancy cap; 2·n_max! must stay inside f64 range for
/// the beam-splitter combinatorics.
pub const MAX_SUPPORTED_N_MAX: u32 = 85;

/// Amplitudes below this are dropped after each element application.
pub const DEFAULT_PRUNE_EPSILON: f64 = 1e-14;

/// Spectral band a waveguide mode lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Band {
    /// Pump band (the band photons are counted in at the output).
    Pump,
    /// Signal band of the parametric pair.
    Signal,
    /// Idler band of the parametric pair.
    Idler,
    /// Reject/monitor ports outside the three working bands.
    Residual,
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Band::Pump => "pump",
            Band::Signal => "signal",
            Band::Idler => "idler",
            Band::Residual => "residual",
        };
        f.write_str(s)
    }
}

/// One waveguide mode: an index into occupation vectors plus bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeDescriptor {
    /// Position of this mode in every occupation vector.
    pub index: usize,
    /// Free-form label naming the physical path ("q0r1", "pdu3_pdc", ...).
    pub path_label: String,
    /// Spectral band.
    pub band: Band,
}

/// Ordered set of modes a state vector is defined over.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeRegistry {
    modes: Vec<ModeDescriptor>,
    n_max: u32,
}

impl Default for ModeRegistry {
    fn default() -> Self {
        Self::new()
    }
}

impl ModeRegistry {
    /// Empty registry with the default occupancy cap.
    pub fn new() -> Self {
        ModeRegistry {
            modes: Vec::new(),
            n_max: DEFAULT_N_MAX,
        }
    }

    /// Empty registry with an explicit occupancy cap.
    pub fn with_n_max(n_max: u32) -> Result<Self> {
        let mut reg = Self::new();
        reg.set_n_max(n_max)?;
        Ok(reg)
    }

    /// Append a mode; indices are assigned contiguously from 0.
    pub fn add_mode(&mut self, path_label: &str, band: Band) -> usize {
        let index = self.modes.len();
        self.modes.push(ModeDescriptor {
            index,
            path_label: path_label.to_owned(),
            band,
        });
        index
    }

    /// Number of declared modes.
    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    /// All descriptors in index order.
    pub fn modes(&self) -> &[ModeDescriptor] {
        &self.modes
    }

    /// Descriptor for `index`, if declared.
    pub fn mode(&self, index: usize) -> Option<&ModeDescriptor> {
        self.modes.get(index)
    }

    /// Band of `index`, if declared.
    pub fn band(&self, index: usize) -> Option<Band> {
        self.modes.get(index).map(|m| m.band)
    }

    /// Per-mode occupancy cap.
    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// Change the occupancy cap (1..=[`MAX_SUPPORTED_N_MAX`]).
    pub fn set_n_max(&mut self, n_max: u32) -> Result<()> {
        if n_max == 0 || n_max > MAX_SUPPORTED_N_MAX {
            return Err(Error::NMaxUnsupported {
                n_max,
                max: MAX_SUPPORTED_N_MAX,
            });
        }
        self.n_max = n_max;
        Ok(())
    }

    fn check_mode(&self, index: usize) -> Result<()> {
        if index < self.modes.len() {
            Ok(())
        } else {
            Err(Error::UnknownMode {
                mode: index,
                count: self.modes.len(),
            })
        }
    }
}

/// Photon counts per mode, in registry order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occupation(Vec<u32>);

impl Occupation {
    /// All-vacuum occupation over `modes` modes.
    pub fn zeros(modes: usize) -> Self {
        Occupation(vec![0; modes])
    }

    /// Occupation from explicit counts.
    pub fn from_counts(counts: Vec<u32>) -> Self {
        Occupation(counts)
    }

    /// Counts in mode order.
    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    /// Count in `mode` (0 if out of range).
    pub fn get(&self, mode: usize) -> u32 {
        self.0.get(mode).copied().unwrap_or(0)
    }

    /// Total photon number of this basis term.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of modes.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// True when there are no modes at all.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn set(&mut self, mode: usize, count: u32) {
        self.0[mode] = count;
    }

    pub(crate) fn extended(&self, extra: usize) -> Occupation {
        let mut counts = self.0.clone();
        counts.extend(std::iter::repeat(0).take(extra));
        Occupation(counts)
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
            first = false;
        }
        Ok(())
    }
}

/// Sparse state vector over a [`ModeRegistry`].
///
/// Operations never mutate in place; they return fresh states. The invariant
/// Σ∣aₙ∣² = 1 holds after every constructor and unitary element (checked to
/// 1e-10 in debug builds); [`StateVector::from_terms`] is the one escape
/// hatch that accepts unnormalized data for callers that renormalize
/// themselves.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    registry: Arc<ModeRegistry>,
    terms: BTreeMap<Occupation, Complex64>,
    prune_epsilon: f64,
}

impl StateVector {
    /// The vacuum ∣0 … 0⟩.
    pub fn vacuum(registry: Arc<ModeRegistry>) -> Result<Self> {
        Self::vacuum_with_epsilon(registry, DEFAULT_PRUNE_EPSILON)
    }

    /// Vacuum with an explicit prune threshold (useful for ε = 0 reference runs).
    pub fn vacuum_with_epsilon(registry: Arc<ModeRegistry>, prune_epsilon: f64) -> Result<Self> {
        if registry.mode_count() == 0 {
            return Err(Error::EmptyRegistry);
        }
        if !(0.0..1.0).contains(&prune_epsilon) {
            return Err(Error::PruneEpsilonOutOfRange {
                epsilon: prune_epsilon,
            });
        }
        let mut terms = BTreeMap::new();
        terms.insert(
            Occupation::zeros(registry.mode_count()),
            Complex64::new(1.0, 0.0),
        );
        Ok(StateVector {
            registry,
            terms,
            prune_epsilon,
        })
    }

    /// Build a state from explicit terms without renormalizing.
    ///
    /// Amplitudes below the default prune threshold are dropped. The caller
    /// owns the normalization invariant.
    pub fn from_terms(
        registry: Arc<ModeRegistry>,
        terms: Vec<(Occupation, Complex64)>,
    ) -> Result<Self> {
        if registry.mode_count() == 0 {
            return Err(Error::EmptyRegistry);
        }
        let mut map = BTreeMap::new();
        for (occ, amp) in terms {
            if occ.len() != registry.mode_count() {
                return Err(Error::RegistryMismatch);
            }
            for (mode, &count) in occ.counts().iter().enumerate() {
                if count > registry.n_max() {
                    return Err(Error::OccupancyOverflow {
                        mode,
                        occupancy: count,
                        n_max: registry.n_max(),
                    });
                }
            }
            debug_assert!(amp.re.is_finite() && amp.im.is_finite());
            if amp.norm_sqr() >= DEFAULT_PRUNE_EPSILON * DEFAULT_PRUNE_EPSILON {
                *map.entry(occ).or_insert(Complex64::new(0.0, 0.0)) += amp;
            }
        }
        Ok(StateVector {
            registry,
            terms: map,
            prune_epsilon: DEFAULT_PRUNE_EPSILON,
        })
    }

    pub(crate) fn from_accumulated(
        registry: Arc<ModeRegistry>,
        map: BTreeMap<Occupation, Complex64>,
        prune_epsilon: f64,
    ) -> Self {
        let floor = prune_epsilon * prune_epsilon;
        let terms = map
            .into_iter()
            .filter(|(_, a)| a.norm_sqr() > floor)
            .collect();
        StateVector {
            registry,
            terms,
            prune_epsilon,
        }
    }

    /// Registry this state is defined over.
    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    /// Prune threshold applied after each element.
    pub fn prune_epsilon(&self) -> f64 {
        self.prune_epsilon
    }

    /// Number of stored (nonzero) basis terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Iterate stored terms in canonical (lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, Complex64)> {
        self.terms.iter().map(|(occ, amp)| (occ, *amp))
    }

    /// Amplitude of `occ` (zero when absent).
    pub fn amplitude(&self, occ: &Occupation) -> Complex64 {
        self.terms
            .get(occ)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// √(Σ∣aₙ∣²).
    pub fn norm(&self) -> f64 {
        self.terms
            .values()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// ⟨self∣other⟩ = Σₙ self(n)* · other(n).
    ///
    /// Both states must share a registry (same modes, same cap).
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        if !self.same_registry(other) {
            return Err(Error::RegistryMismatch);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        // Walk the smaller map, probe the larger.
        if self.terms.len() <= other.terms.len() {
            for (occ, bra) in &self.terms {
                if let Some(ket) = other.terms.get(occ) {
                    acc += bra.conj() * ket;
                }
            }
        } else {
            for (occ, ket) in &other.terms {
                if let Some(bra) = self.terms.get(occ) {
                    acc += bra.conj() * ket;
                }
            }
        }
        Ok(acc)
    }

    /// Add one photon to `mode`: each term picks up √(n+1), then the state is
    /// renormalized.
    pub fn create_photon(&self, mode: usize) -> Result<StateVector> {
        self.registry.check_mode(mode)?;
        let n_max = self.registry.n_max();
        let mut map = BTreeMap::new();
        for (occ, amp) in &self.terms {
            let n = occ.get(mode);
            if n + 1 > n_max {
                return Err(Error::OccupancyOverflow {
                    mode,
                    occupancy: n + 1,
                    n_max,
                });
            }
            let mut next = occ.clone();
            next.set(mode, n + 1);
            map.insert(next, amp * ((n + 1) as f64).sqrt());
        }
        let state = StateVector::from_accumulated(self.registry.clone(), map, self.prune_epsilon);
        Ok(state.renormalized())
    }

    /// Drop terms with ∣a∣ < ε, then renormalize. ε must lie in [0, 1).
    pub fn prune(&self, epsilon: f64) -> Result<StateVector> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::PruneEpsilonOutOfRange { epsilon });
        }
        let terms: BTreeMap<Occupation, Complex64> = self
            .terms
            .iter()
            .filter(|(_, a)| a.norm() >= epsilon)
            .map(|(o, a)| (o.clone(), *a))
            .collect();
        let pruned = StateVector {
            registry: self.registry.clone(),
            terms,
            prune_epsilon: self.prune_epsilon,
        };
        Ok(pruned.renormalized())
    }

    /// Append vacuum modes, producing a state over an extended registry.
    pub fn extend_registry(&self, new_modes: &[(String, Band)]) -> StateVector {
        let mut registry = (*self.registry).clone();
        for (label, band) in new_modes {
            registry.add_mode(label, *band);
        }
        let extra = new_modes.len();
        let terms = self
            .terms
            .iter()
            .map(|(occ, amp)| (occ.extended(extra), *amp))
            .collect();
        StateVector {
            registry: Arc::new(registry),
            terms,
            prune_epsilon: self.prune_epsilon,
        }
    }

    /// Scale all amplitudes so the norm is exactly 1 (no-op on the zero state).
    pub fn renormalized(&self) -> StateVector {
        let norm = self.norm();
        if norm == 0.0 || norm == 1.0 {
            return self.clone();
        }
        let terms = self
            .terms
            .iter()
            .map(|(o, a)| (o.clone(), a / norm))
            .collect();
        StateVector {
            registry: self.registry.clone(),
            terms,
            prune_epsilon: self.prune_epsilon,
        }
    }

    /// True when both states share the same registry content.
    pub fn same_registry(&self, other: &StateVector) -> bool {
        Arc::ptr_eq(&self.registry, &other.registry) || self.registry == other.registry
    }
}
