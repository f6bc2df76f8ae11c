//! Shared helpers for integration tests: an independent dense-matrix Fock
//! oracle and random-circuit generators.
//!
//! The dense oracle stores the full truncated product space as a flat vector
//! and applies beam splitters by series-expanding exp(iθ(a†b + ab†)) with
//! explicit ladder-operator matrix elements. It shares no code with the
//! sparse engine's multinomial expansion, so agreement between the two is a
//! real cross-check rather than a tautology.

#![allow(dead_code)]

use num_complex::Complex64;
use pdu_forge::fock::{Occupation, StateVector};
use rand::Rng;

/// Dense state over `modes` modes, each truncated at occupation `n_max`.
pub struct DenseState {
    modes: usize,
    n_max: u32,
    /// Index = Σ occ[m]·(n_max+1)^m.
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn vacuum(modes: usize, n_max: u32) -> Self {
        let dim = (n_max as usize + 1).pow(modes as u32);
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[0] = Complex64::new(1.0, 0.0);
        DenseState { modes, n_max, amps }
    }

    fn base(&self) -> usize {
        self.n_max as usize + 1
    }

    fn occupancy(&self, index: usize, mode: usize) -> u32 {
        (index / self.base().pow(mode as u32) % self.base()) as u32
    }

    fn index_of(&self, occ: &[u32]) -> usize {
        occ.iter()
            .enumerate()
            .map(|(mode, &n)| n as usize * self.base().pow(mode as u32))
            .sum()
    }

    pub fn amplitude(&self, occ: &[u32]) -> Complex64 {
        self.amps[self.index_of(occ)]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm();
        for amp in &mut self.amps {
            *amp /= norm;
        }
    }

    /// a†: |n⟩ → √(n+1)|n+1⟩. Panics if the cap would be exceeded by a
    /// nonzero amplitude — oracle circuits are sized to never truncate.
    pub fn create(&mut self, mode: usize) {
        let stride = self.base().pow(mode as u32);
        let mut next = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (index, amp) in self.amps.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let n = self.occupancy(index, mode);
            assert!(n < self.n_max, "oracle truncation: raise past n_max");
            next[index + stride] = amp * ((n + 1) as f64).sqrt();
        }
        self.amps = next;
    }

    pub fn phase(&mut self, mode: usize, phi: f64) {
        for index in 0..self.amps.len() {
            let n = self.occupancy(index, mode);
            self.amps[index] *= Complex64::from_polar(1.0, n as f64 * phi);
        }
    }

    pub fn cross(&mut self, m1: usize, m2: usize) {
        let mut next = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (index, amp) in self.amps.iter().enumerate() {
            let mut occ: Vec<u32> = (0..self.modes).map(|m| self.occupancy(index, m)).collect();
            occ.swap(m1, m2);
            next[self.index_of(&occ)] = *amp;
        }
        self.amps = next;
    }

    /// K = a†b + ab† applied once.
    fn hop(&self, input: &[Complex64], m1: usize, m2: usize) -> Vec<Complex64> {
        let s1 = self.base().pow(m1 as u32);
        let s2 = self.base().pow(m2 as u32);
        let mut out = vec![Complex64::new(0.0, 0.0); input.len()];
        for (index, amp) in input.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let n1 = self.occupancy(index, m1);
            let n2 = self.occupancy(index, m2);
            // a†b: photon m2 → m1
            if n2 > 0 {
                assert!(n1 < self.n_max, "oracle truncation in hop");
                let weight = ((n1 + 1) as f64 * n2 as f64).sqrt();
                out[index + s1 - s2] += amp * weight;
            }
            // ab†: photon m1 → m2
            if n1 > 0 {
                assert!(n2 < self.n_max, "oracle truncation in hop");
                let weight = (n1 as f64 * (n2 + 1) as f64).sqrt();
                out[index - s1 + s2] += amp * weight;
            }
        }
        out
    }

    /// exp(iθ(a†b + ab†)) by plain series summation.
    pub fn beamsplitter(&mut self, m1: usize, m2: usize, theta: f64) {
        let mut result = self.amps.clone();
        let mut power = self.amps.clone();
        let itheta = Complex64::new(0.0, theta);
        let mut coeff = Complex64::new(1.0, 0.0);
        for k in 1..=60u32 {
            power = self.hop(&power, m1, m2);
            coeff *= itheta / k as f64;
            for (slot, term) in result.iter_mut().zip(&power) {
                *slot += coeff * term;
            }
        }
        self.amps = result;
    }
}

/// L∞ distance between the sparse state and the oracle over every basis
/// vector of the dense space.
pub fn max_amplitude_distance(sparse: &StateVector, dense: &DenseState) -> f64 {
    let modes = sparse.registry().mode_count();
    let mut worst: f64 = 0.0;
    let dim = dense.amps.len();
    for index in 0..dim {
        let occ: Vec<u32> = (0..modes).map(|m| dense.occupancy(index, m)).collect();
        let sparse_amp = sparse.amplitude(&Occupation::from_counts(occ));
        let diff = (sparse_amp - dense.amps[index]).norm();
        worst = worst.max(diff);
    }
    worst
}

/// One linear-optics element of a random test circuit.
#[derive(Clone, Copy, Debug)]
pub enum LinearOp {
    Bs(usize, usize, f64),
    Phase(usize, f64),
    Cross(usize, usize),
}

/// Random linear circuit: photon placements plus an element sequence.
pub struct RandomCircuit {
    pub modes: usize,
    pub photons: Vec<usize>,
    pub ops: Vec<LinearOp>,
}

/// Draw a circuit with ≤ `max_photons` photons so that no per-mode cap of
/// the same size can truncate (total is an upper bound on any single mode).
pub fn random_linear_circuit<R: Rng>(
    rng: &mut R,
    max_modes: usize,
    max_photons: u32,
    ops: usize,
) -> RandomCircuit {
    let modes = rng.gen_range(2..=max_modes);
    let photon_count = rng.gen_range(1..=max_photons);
    let photons: Vec<usize> = (0..photon_count).map(|_| rng.gen_range(0..modes)).collect();
    let ops = (0..ops)
        .map(|_| {
            let m1 = rng.gen_range(0..modes);
            let mut m2 = rng.gen_range(0..modes - 1);
            if m2 >= m1 {
                m2 += 1;
            }
            match rng.gen_range(0..4u8) {
                0 => LinearOp::Phase(m1, rng.gen_range(0.0..std::f64::consts::TAU)),
                1 => LinearOp::Cross(m1, m2),
                _ => LinearOp::Bs(m1, m2, rng.gen_range(0.0..=std::f64::consts::FRAC_PI_2)),
            }
        })
        .collect();
    RandomCircuit {
        modes,
        photons,
        ops,
    }
}
