//! Logical readout: dual-rail qubit extraction, fidelities, photon counts.
//!
//! A dual-rail qubit stores ∣0̃⟩ as a photon in its first rail and ∣1̃⟩ as a
//! photon in its second. [`extract_logical`] projects a simulated state onto
//! that encoding: basis terms with exactly one photon per pair and vacuum
//! everywhere else become bit-string amplitudes, all other terms pool into a
//! single `leakage` probability. Fidelities are plain pure-state overlaps —
//! the simulator is unitary plus postselection, so density matrices never
//! arise.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{Band, ModeRegistry, StateVector};

/// Ordered dual-rail pairs defining the logical register.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitEncoding {
    pairs: Vec<(usize, usize)>,
}

impl QubitEncoding {
    /// Validate pairs against a registry: modes must exist, sit in the pump
    /// band, and appear at most once across all pairs.
    pub fn new(pairs: Vec<(usize, usize)>, registry: &ModeRegistry) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidEncoding {
                message: "encoding needs at least one qubit pair".to_owned(),
            });
        }
        let mut seen = Vec::with_capacity(pairs.len() * 2);
        for &(r0, r1) in &pairs {
            for mode in [r0, r1] {
                match registry.band(mode) {
                    None => {
                        return Err(Error::UnknownMode {
                            mode,
                            count: registry.mode_count(),
                        });
                    }
                    Some(Band::Pump) => {}
                    Some(band) => {
                        return Err(Error::InvalidEncoding {
                            message: format!(
                                "mode {mode} is in the {band} band; qubit rails must be pump-band"
                            ),
                        });
                    }
                }
                if seen.contains(&mode) {
                    return Err(Error::RepeatedMode { mode });
                }
                seen.push(mode);
            }
        }
        Ok(QubitEncoding { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn qubit_count(&self) -> usize {
        self.pairs.len()
    }
}

/// Amplitudes over bit strings plus the probability mass that escaped the
/// encoding. Bit order follows pair order: the first pair is the leftmost
/// character of every key.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalState {
    pub amplitudes: BTreeMap<String, Complex64>,
    pub leakage: f64,
    pub qubit_count: usize,
}

impl LogicalState {
    /// Σ|a|² over the logical amplitudes; with `leakage` this sums to the
    /// squared norm of the state it was extracted from.
    pub fn logical_mass(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }
}

/// Project `state` onto a dual-rail register.
///
/// A basis term contributes a logical amplitude when every pair holds
/// exactly one photon and every non-pair mode is empty; otherwise its
/// probability joins `leakage`. The bit string plus the vacuum condition
/// pins the occupation completely, so no two terms merge.
pub fn extract_logical(state: &StateVector, encoding: &QubitEncoding) -> Result<LogicalState> {
    let mode_count = state.registry().mode_count();
    let mut in_pair = vec![false; mode_count];
    for &(r0, r1) in encoding.pairs() {
        for mode in [r0, r1] {
            if mode >= mode_count {
                return Err(Error::UnknownMode {
                    mode,
                    count: mode_count,
                });
            }
            in_pair[mode] = true;
        }
    }

    let mut amplitudes = BTreeMap::new();
    let mut leakage = 0.0;
    'terms: for (occ, amp) in state.terms() {
        let mut bits = String::with_capacity(encoding.qubit_count());
        for &(r0, r1) in encoding.pairs() {
            match (occ.get(r0), occ.get(r1)) {
                (1, 0) => bits.push('0'),
                (0, 1) => bits.push('1'),
                _ => {
                    leakage += amp.norm_sqr();
                    continue 'terms;
                }
            }
        }
        for (mode, flagged) in in_pair.iter().enumerate() {
            if !flagged && occ.get(mode) != 0 {
                leakage += amp.norm_sqr();
                continue 'terms;
            }
        }
        let previous = amplitudes.insert(bits, amp);
        debug_assert!(previous.is_none());
    }

    Ok(LogicalState {
        amplitudes,
        leakage,
        qubit_count: encoding.qubit_count(),
    })
}

/// ∣⟨b∣a⟩∣² over bit strings. Sub-normalized inputs (leaky extractions)
/// yield proportionally smaller fidelities.
pub fn fidelity_logical(a: &LogicalState, b: &LogicalState) -> Result<f64> {
    if a.qubit_count != b.qubit_count {
        return Err(Error::DimensionMismatch {
            left: a.qubit_count,
            right: b.qubit_count,
        });
    }
    let overlap: Complex64 = a
        .amplitudes
        .iter()
        .filter_map(|(bits, amp)| b.amplitudes.get(bits).map(|other| other.conj() * amp))
        .sum();
    Ok(overlap.norm_sqr())
}

/// ∣⟨b∣a⟩∣² between full Fock-space states over the same registry.
pub fn fidelity_states(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(b.inner_product(a)?.norm_sqr())
}

/// GHZ target (∣0̃⟩^⊗N + e^{iφ}∣1̃⟩^⊗N)/√2.
pub fn target_ghz(qubits: usize, phi: f64) -> Result<LogicalState> {
    if qubits < 2 {
        return Err(Error::InvalidArgument {
            message: format!("a GHZ state needs at least 2 qubits, got {qubits}"),
        });
    }
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut amplitudes = BTreeMap::new();
    amplitudes.insert("0".repeat(qubits), amp);
    amplitudes.insert("1".repeat(qubits), amp * Complex64::from_polar(1.0, phi));
    Ok(LogicalState {
        amplitudes,
        leakage: 0.0,
        qubit_count: qubits,
    })
}

/// Four-qubit box-cluster target
/// (∣0̃0̃0̃0̃⟩ + ∣0̃0̃1̃1̃⟩ + ∣1̃1̃0̃0̃⟩ − ∣1̃1̃1̃1̃⟩)/2.
pub fn target_cluster4() -> LogicalState {
    let mut amplitudes = BTreeMap::new();
    for (bits, sign) in [("0000", 0.5), ("0011", 0.5), ("1100", 0.5), ("1111", -0.5)] {
        amplitudes.insert(bits.to_owned(), Complex64::new(sign, 0.0));
    }
    LogicalState {
        amplitudes,
        leakage: 0.0,
        qubit_count: 4,
    }
}

/// Probability of each total photon number in `state`.
pub fn photon_number_distribution(state: &StateVector) -> BTreeMap<u32, f64> {
    let mut distribution = BTreeMap::new();
    for (occ, amp) in state.terms() {
        *distribution.entry(occ.total()).or_insert(0.0) += amp.norm_sqr();
    }
    distribution
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{
        build_cluster4_default, build_fock_chain, build_fock_chain_with, build_ghz, simulate,
    };
    use crate::fock::Occupation;
    use crate::optics::PduParams;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn pump_registry(modes: usize) -> Arc<ModeRegistry> {
        let mut registry = ModeRegistry::new();
        for k in 0..modes {
            registry.add_mode(&format!("m{k}"), Band::Pump);
        }
        Arc::new(registry)
    }

    fn two_qubit_encoding(registry: &ModeRegistry) -> QubitEncoding {
        QubitEncoding::new(vec![(0, 1), (2, 3)], registry).unwrap()
    }

    #[test]
    fn direct_mapping_example() {
        let registry = pump_registry(4);
        let state = StateVector::from_terms(
            registry.clone(),
            vec![(
                Occupation::from_counts(vec![1, 0, 1, 0]),
                Complex64::new(0.0, -1.0),
            )],
        )
        .unwrap();
        let logical = extract_logical(&state, &two_qubit_encoding(&registry)).unwrap();
        assert_eq!(logical.amplitudes.len(), 1);
        assert_eq!(logical.amplitudes["00"], Complex64::new(0.0, -1.0));
        assert_eq!(logical.leakage, 0.0);
    }

    #[test]
    fn vacuum_is_pure_leakage() {
        let registry = pump_registry(4);
        let state = StateVector::vacuum(registry.clone()).unwrap();
        let logical = extract_logical(&state, &two_qubit_encoding(&registry)).unwrap();
        assert!(logical.amplitudes.is_empty());
        assert_abs_diff_eq!(logical.leakage, 1.0);
    }

    #[test]
    fn stray_photon_outside_pairs_leaks() {
        let registry = pump_registry(5);
        let state = StateVector::from_terms(
            registry.clone(),
            vec![(
                Occupation::from_counts(vec![1, 0, 1, 0, 1]),
                Complex64::new(1.0, 0.0),
            )],
        )
        .unwrap();
        let logical = extract_logical(&state, &two_qubit_encoding(&registry)).unwrap();
        assert!(logical.amplitudes.is_empty());
        assert_abs_diff_eq!(logical.leakage, 1.0);
    }

    #[test]
    fn lossy_chain_leaks_the_failure_mass() {
        // one doubling stage at η_PDC = 0.81: the 19% no-conversion branch
        // falls outside the one-photon-per-pair subspace
        let netlist =
            build_fock_chain_with(1, PduParams::new(0.81, 1.0, 1.0).unwrap()).unwrap();
        let report = simulate(&netlist).unwrap();
        // pair each leaf with a fresh vacuum rail so the Fock output reads
        // as the logical string "00"
        let state = report.final_state.extend_registry(&[
            ("v1".to_owned(), Band::Pump),
            ("v2".to_owned(), Band::Pump),
        ]);
        let leaves = netlist.output_pump_modes();
        let vacuum_base = report.final_state.registry().mode_count();
        let encoding = QubitEncoding::new(
            vec![(leaves[0], vacuum_base), (leaves[1], vacuum_base + 1)],
            state.registry(),
        )
        .unwrap();
        let logical = extract_logical(&state, &encoding).unwrap();
        assert_abs_diff_eq!(logical.leakage, 0.19, epsilon = 1e-12);
        assert_abs_diff_eq!(logical.amplitudes["00"].norm_sqr(), 0.81, epsilon = 1e-12);
        assert_abs_diff_eq!(
            logical.logical_mass() + logical.leakage,
            1.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn encoding_rejects_bad_pairs() {
        let registry = pump_registry(4);
        assert!(matches!(
            QubitEncoding::new(vec![(0, 9)], &registry),
            Err(Error::UnknownMode { mode: 9, .. })
        ));
        assert!(matches!(
            QubitEncoding::new(vec![(0, 1), (1, 2)], &registry),
            Err(Error::RepeatedMode { mode: 1 })
        ));
        assert!(matches!(
            QubitEncoding::new(vec![], &registry),
            Err(Error::InvalidEncoding { .. })
        ));
        let mut mixed = ModeRegistry::new();
        mixed.add_mode("p", Band::Pump);
        mixed.add_mode("s", Band::Signal);
        assert!(matches!(
            QubitEncoding::new(vec![(0, 1)], &mixed),
            Err(Error::InvalidEncoding { .. })
        ));
    }

    #[test]
    fn fidelity_examples() {
        let zero2 = {
            let mut amplitudes = BTreeMap::new();
            amplitudes.insert("00".to_owned(), Complex64::new(1.0, 0.0));
            LogicalState {
                amplitudes,
                leakage: 0.0,
                qubit_count: 2,
            }
        };
        let bell = target_ghz(2, 0.0).unwrap();
        assert_abs_diff_eq!(fidelity_logical(&zero2, &zero2).unwrap(), 1.0);
        assert_abs_diff_eq!(fidelity_logical(&zero2, &bell).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(
            fidelity_logical(&bell, &zero2).unwrap(),
            0.5,
            epsilon = 1e-15
        );

        // global phase drops out
        let mut rotated = bell.clone();
        for amp in rotated.amplitudes.values_mut() {
            *amp *= Complex64::from_polar(1.0, 1.234);
        }
        assert_abs_diff_eq!(fidelity_logical(&rotated, &bell).unwrap(), 1.0, epsilon = 1e-12);

        let ghz3 = target_ghz(3, 0.0).unwrap();
        assert!(matches!(
            fidelity_logical(&bell, &ghz3),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn ghz_targets_match_closed_forms() {
        let bell = target_ghz(2, 0.0).unwrap();
        assert_abs_diff_eq!(
            bell.amplitudes["00"].re,
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
        assert_eq!(bell.amplitudes["00"], bell.amplitudes["11"]);

        let ghz4 = target_ghz(4, std::f64::consts::PI).unwrap();
        assert_abs_diff_eq!(
            ghz4.amplitudes["1111"].re,
            -std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
        assert!(target_ghz(1, 0.0).is_err());
    }

    #[test]
    fn cluster_target_signs() {
        let target = target_cluster4();
        assert_eq!(target.amplitudes.len(), 4);
        assert_eq!(target.amplitudes["1100"], Complex64::new(0.5, 0.0));
        assert_eq!(target.amplitudes["1111"], Complex64::new(-0.5, 0.0));
        assert_abs_diff_eq!(target.logical_mass(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ghz_circuit_hits_its_target() {
        for (stages, phi) in [(1u32, 0.0), (1, 1.9), (2, std::f64::consts::PI)] {
            let netlist = build_ghz(stages, phi).unwrap();
            let report = simulate(&netlist).unwrap();
            let pairs = netlist.infer_qubit_pairs().unwrap();
            let encoding = QubitEncoding::new(pairs, report.final_state.registry()).unwrap();
            let logical = extract_logical(&report.final_state, &encoding).unwrap();
            assert_abs_diff_eq!(logical.leakage, 0.0, epsilon = 1e-12);
            let target = target_ghz(1 << stages, phi).unwrap();
            let fidelity = fidelity_logical(&logical, &target).unwrap();
            assert_abs_diff_eq!(fidelity, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn cluster_circuit_hits_its_target() {
        let netlist = build_cluster4_default();
        let report = simulate(&netlist).unwrap();
        let pairs = netlist.infer_qubit_pairs().unwrap();
        let encoding = QubitEncoding::new(pairs, report.final_state.registry()).unwrap();
        let logical = extract_logical(&report.final_state, &encoding).unwrap();
        assert_abs_diff_eq!(logical.leakage, 0.0, epsilon = 1e-12);
        let fidelity = fidelity_logical(&logical, &target_cluster4()).unwrap();
        assert_abs_diff_eq!(fidelity, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn photon_distribution_examples() {
        let registry = pump_registry(2);
        let vacuum = StateVector::vacuum(registry).unwrap();
        assert_eq!(photon_number_distribution(&vacuum), BTreeMap::from([(0, 1.0)]));

        let chain = build_fock_chain(2).unwrap();
        let report = simulate(&chain).unwrap();
        let distribution = photon_number_distribution(&report.final_state);
        assert_eq!(distribution.len(), 1);
        assert_abs_diff_eq!(distribution[&4], 1.0, epsilon = 1e-12);

        let lossy =
            build_fock_chain_with(1, PduParams::new(0.5, 1.0, 1.0).unwrap()).unwrap();
        let report = simulate(&lossy).unwrap();
        let distribution = photon_number_distribution(&report.final_state);
        assert_abs_diff_eq!(distribution[&1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(distribution[&2], 0.5, epsilon = 1e-12);
        let total: f64 = distribution.values().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
    }

    proptest! {
        #[test]
        fn extraction_conserves_probability(parts in proptest::collection::vec((0u32..3, 0u32..3, -1.0f64..1.0, -1.0f64..1.0), 1..6)) {
            let registry = pump_registry(4);
            let mut terms = Vec::new();
            for (n1, n2, re, im) in parts {
                terms.push((
                    Occupation::from_counts(vec![n1, n2, 0, 1]),
                    Complex64::new(re, im),
                ));
            }
            let state = StateVector::from_terms(registry.clone(), terms).unwrap();
            prop_assume!(state.norm() > 1e-3);
            let state = state.renormalized();
            let encoding = two_qubit_encoding(&registry);
            let logical = extract_logical(&state, &encoding).unwrap();
            prop_assert!((logical.logical_mass() + logical.leakage - 1.0).abs() < 1e-10);
        }

        #[test]
        fn logical_fidelity_is_symmetric_and_bounded(
            res in proptest::collection::vec(-1.0f64..1.0, 8),
        ) {
            let keys = ["00", "01", "10", "11"];
            let mut a = BTreeMap::new();
            let mut b = BTreeMap::new();
            for (k, key) in keys.iter().enumerate() {
                a.insert(key.to_string(), Complex64::new(res[k], res[k + 4]));
                b.insert(key.to_string(), Complex64::new(res[7 - k], res[(k + 2) % 8]));
            }
            let norm = |m: &BTreeMap<String, Complex64>| {
                m.values().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
            };
            prop_assume!(norm(&a) > 1e-3 && norm(&b) > 1e-3);
            let (na, nb) = (norm(&a), norm(&b));
            for v in a.values_mut() { *v /= na; }
            for v in b.values_mut() { *v /= nb; }
            let la = LogicalState { amplitudes: a, leakage: 0.0, qubit_count: 2 };
            let lb = LogicalState { amplitudes: b, leakage: 0.0, qubit_count: 2 };
            let fab = fidelity_logical(&la, &lb).unwrap();
            let fba = fidelity_logical(&lb, &la).unwrap();
            prop_assert!((fab - fba).abs() < 1e-12);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&fab));
            prop_assert!((fidelity_logical(&la, &la).unwrap() - 1.0).abs() < 1e-10);
        }
    }
}
