//! Full 2^n statevector engine.
//!
//! Both search Hamiltonians are identity minus a rank-one projector, so every
//! evolution used by the search algorithms reduces to one inner product and
//! one axpy over the amplitude vector: O(N) per step, no matrices.
//!
//! Operations mutate the state they are given in place; callers that need the
//! previous state clone first. States own their storage and can be moved
//! freely between threads.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::tolerance;
use crate::C64;

/// Pure state over the 2^n computational basis, amplitude of basis state x
/// stored at index x.
#[derive(Debug, Clone)]
pub struct PureState {
    n_qubits: u32,
    amplitudes: Vec<C64>,
}

/// The search oracle: a single marked basis index m with f(m) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleSpec {
    n_qubits: u32,
    marked: usize,
}

/// Counts oracle queries; incremented exactly once per evaluation of f on a
/// register. One counter belongs to one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OracleCounter {
    calls: u64,
}

impl OracleCounter {
    pub fn new() -> Self {
        Self { calls: 0 }
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }

    pub fn record(&mut self, queries: u64) {
        self.calls += queries;
    }
}

impl OracleSpec {
    pub fn new(n_qubits: u32, marked: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        if marked >> n_qubits != 0 {
            return Err(Error::MarkedOutOfRange {
                marked,
                n: n_qubits,
            });
        }
        Ok(Self { n_qubits, marked })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn marked(&self) -> usize {
        self.marked
    }

    pub fn n_states(&self) -> usize {
        1usize << self.n_qubits
    }
}

fn check_qubit_count(n: u32) -> Result<()> {
    if (1..=tolerance::MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::QubitCountOutOfRange {
            n,
            min: 1,
            max: tolerance::MAX_QUBITS,
        })
    }
}

impl PureState {
    /// Uniform superposition |s> of all 2^n basis states.
    pub fn uniform(n_qubits: u32) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        let amp = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self {
            n_qubits,
            amplitudes: vec![amp; dim],
        })
    }

    /// Computational basis state |x>.
    pub fn basis(n_qubits: u32, x: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if x >= dim {
            return Err(Error::MarkedOutOfRange {
                marked: x,
                n: n_qubits,
            });
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[x] = C64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Builds a state from raw amplitudes, which must be normalized.
    pub fn from_amplitudes(n_qubits: u32, amplitudes: Vec<C64>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        if amplitudes.len() != 1usize << n_qubits {
            return Err(Error::DimMismatch {
                left: 1usize << n_qubits,
                right: amplitudes.len(),
            });
        }
        let state = Self {
            n_qubits,
            amplitudes,
        };
        let norm = state.norm();
        if !norm.is_finite() {
            return Err(Error::NonFinite {
                context: "state amplitudes",
            });
        }
        if (norm - 1.0).abs() > tolerance::INPUT_NORM {
            return Err(Error::NotNormalized { norm });
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn n_states(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Inner product <other|self>.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_compatible_dim(other.n_qubits)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| b.conj() * a)
            .sum())
    }

    /// <s|self> in O(N) without materializing |s>.
    pub fn start_overlap(&self) -> C64 {
        let sum: C64 = self.amplitudes.iter().sum();
        sum / C64::new((self.n_states() as f64).sqrt(), 0.0)
    }

    fn check_compatible_dim(&self, n_qubits: u32) -> Result<()> {
        if self.n_qubits == n_qubits {
            Ok(())
        } else {
            Err(Error::DimMismatch {
                left: self.n_states(),
                right: 1usize << n_qubits,
            })
        }
    }

    /// Phase oracle U_f = I - 2|m><m|: one query.
    pub fn apply_oracle_phase(&mut self, oracle: &OracleSpec, counter: &mut OracleCounter) -> Result<()> {
        self.check_compatible_dim(oracle.n_qubits)?;
        self.amplitudes[oracle.marked] = -self.amplitudes[oracle.marked];
        counter.record(1);
        Ok(())
    }

    /// Reflection about the uniform state, U_0 = I - 2|s><s|.
    pub fn apply_diffusion(&mut self) {
        let overlap = self.start_overlap();
        let shift = C64::new(2.0, 0.0) * overlap / C64::new((self.n_states() as f64).sqrt(), 0.0);
        for a in &mut self.amplitudes {
            *a -= shift;
        }
    }

    /// One Grover iteration G = -U_0 U_f: one query.
    pub fn grover_iteration(&mut self, oracle: &OracleSpec, counter: &mut OracleCounter) -> Result<()> {
        self.apply_oracle_phase(oracle, counter)?;
        self.apply_diffusion();
        for a in &mut self.amplitudes {
            *a = -*a;
        }
        Ok(())
    }

    /// e^{-i H_f t} with H_f = I - |m><m|: every amplitude picks up e^{-it}
    /// except the marked one, which is untouched. Priced at two oracle
    /// queries, the cost of the ancilla circuit realizing it.
    pub fn evolve_marked_hamiltonian(
        &mut self,
        oracle: &OracleSpec,
        t: f64,
        counter: &mut OracleCounter,
    ) -> Result<()> {
        self.check_compatible_dim(oracle.n_qubits)?;
        if !t.is_finite() {
            return Err(Error::NonFinite { context: "time t" });
        }
        let phase = (-C64::i() * t).exp();
        let marked_amp = self.amplitudes[oracle.marked];
        for a in &mut self.amplitudes {
            *a *= phase;
        }
        self.amplitudes[oracle.marked] = marked_amp;
        counter.record(2);
        Ok(())
    }

    /// e^{-i H_0 t} with H_0 = I - |s><s|: oracle-free.
    pub fn evolve_mixing_hamiltonian(&mut self, t: f64) -> Result<()> {
        if !t.is_finite() {
            return Err(Error::NonFinite { context: "time t" });
        }
        let phase = (-C64::i() * t).exp();
        let overlap = self.start_overlap();
        let correction =
            (C64::new(1.0, 0.0) - phase) * overlap / C64::new((self.n_states() as f64).sqrt(), 0.0);
        for a in &mut self.amplitudes {
            *a = phase * *a + correction;
        }
        Ok(())
    }

    /// |<m|psi>|^2.
    pub fn success_probability(&self, oracle: &OracleSpec) -> Result<f64> {
        self.check_compatible_dim(oracle.n_qubits)?;
        Ok(self.amplitudes[oracle.marked].norm_sqr())
    }

    /// <m|psi>.
    pub fn marked_overlap(&self, oracle: &OracleSpec) -> Result<C64> {
        self.check_compatible_dim(oracle.n_qubits)?;
        Ok(self.amplitudes[oracle.marked])
    }

    /// Samples `shots` outcomes from |a_x|^2 with a seeded generator.
    pub fn measure_counts(&self, shots: u64, seed: u64) -> Result<BTreeMap<usize, u64>> {
        if shots == 0 {
            return Err(Error::ParameterOutOfRange {
                name: "shots",
                value: 0.0,
                range: ">= 1",
            });
        }
        let weights: Vec<f64> = self.amplitudes.iter().map(|a| a.norm_sqr()).collect();
        let dist = WeightedIndex::new(&weights).map_err(|e| Error::InvalidInput {
            what: "measurement distribution",
            detail: e.to_string(),
        })?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            *counts.entry(dist.sample(&mut rng)).or_insert(0) += 1;
        }
        Ok(counts)
    }
}

/// Global-phase-invariant distance min_phi ||psi - e^{i phi} phi|| =
/// sqrt(2 - 2 |<phi|psi>|). Both inputs must be normalized.
///
/// Evaluated as the direct difference after aligning phi's global phase,
/// which is the same quantity but stays accurate near zero where the
/// overlap form loses half the significant digits.
pub fn phase_distance(psi: &PureState, phi: &PureState) -> Result<f64> {
    for state in [psi, phi] {
        let norm = state.norm();
        if (norm - 1.0).abs() > tolerance::INPUT_NORM {
            return Err(Error::NotNormalized { norm });
        }
    }
    let overlap = psi.inner(phi)?;
    let rotation = if overlap.norm() == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        overlap / overlap.norm()
    };
    let dist2: f64 = psi
        .amplitudes
        .iter()
        .zip(&phi.amplitudes)
        .map(|(a, b)| (a - rotation * b).norm_sqr())
        .sum();
    Ok(dist2.sqrt())
}

/// Same distance, applied directly to an overlap magnitude.
pub fn phase_distance_from_overlap(overlap_magnitude: f64) -> f64 {
    (2.0 - 2.0 * overlap_magnitude.min(1.0)).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn oracle(n: u32, m: usize) -> OracleSpec {
        OracleSpec::new(n, m).unwrap()
    }

    #[test]
    fn uniform_state_amplitudes() {
        let s = PureState::uniform(1).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(s.amplitudes()[0].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[1].re, r, epsilon = 1e-15);

        let s = PureState::uniform(2).unwrap();
        for a in s.amplitudes() {
            assert_abs_diff_eq!(a.re, 0.5, epsilon = 1e-15);
            assert_eq!(a.im, 0.0);
        }
    }

    #[test]
    fn uniform_overlap_with_marked_state() {
        let s = PureState::uniform(10).unwrap();
        let m = PureState::basis(10, 123).unwrap();
        let overlap = s.inner(&m).unwrap();
        assert_abs_diff_eq!(overlap.re, 1.0 / 32.0, epsilon = 1e-15);
        assert_eq!(overlap.im, 0.0);
    }

    #[test]
    fn qubit_range_enforced() {
        assert!(PureState::uniform(0).is_err());
        assert!(PureState::uniform(25).is_err());
        assert!(PureState::uniform(24).is_ok());
    }

    #[test]
    fn oracle_phase_flips_only_marked() {
        let o = oracle(3, 5);
        let mut c = OracleCounter::new();

        let mut m = PureState::basis(3, 5).unwrap();
        m.apply_oracle_phase(&o, &mut c).unwrap();
        assert_abs_diff_eq!(m.amplitudes()[5].re, -1.0, epsilon = 1e-15);

        let mut x = PureState::basis(3, 2).unwrap();
        x.apply_oracle_phase(&o, &mut c).unwrap();
        assert_abs_diff_eq!(x.amplitudes()[2].re, 1.0, epsilon = 1e-15);
        assert_eq!(c.calls(), 2);
    }

    #[test]
    fn oracle_phase_is_involution() {
        let o = oracle(4, 9);
        let mut c = OracleCounter::new();
        let mut psi = PureState::uniform(4).unwrap();
        let before = psi.clone();
        psi.apply_oracle_phase(&o, &mut c).unwrap();
        psi.apply_oracle_phase(&o, &mut c).unwrap();
        assert!(phase_distance(&psi, &before).unwrap() < 1e-12);
        assert_eq!(c.calls(), 2);
        // and exactly, not only up to phase
        for (a, b) in psi.amplitudes().iter().zip(before.amplitudes()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn diffusion_fixes_uniform_up_to_sign() {
        let mut s = PureState::uniform(5).unwrap();
        s.apply_diffusion();
        for a in s.amplitudes() {
            assert_abs_diff_eq!(a.re, -1.0 / 32.0_f64.sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn diffusion_identity_on_orthogonal_complement_and_involution() {
        // <s|psi> = 0: equal magnitudes, alternating sign.
        let n = 3;
        let dim = 1 << n;
        let amp = 1.0 / (dim as f64).sqrt();
        let amps: Vec<C64> = (0..dim)
            .map(|x| C64::new(if x % 2 == 0 { amp } else { -amp }, 0.0))
            .collect();
        let mut psi = PureState::from_amplitudes(n, amps).unwrap();
        let before = psi.clone();
        psi.apply_diffusion();
        for (a, b) in psi.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }

        psi.apply_diffusion();
        psi.apply_diffusion();
        for (a, b) in psi.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn grover_n4_exact_after_one_iteration() {
        // sin(theta) = 1/2 when N = 4, so one iteration lands exactly on |m>.
        let o = oracle(2, 3);
        let mut c = OracleCounter::new();
        let mut psi = PureState::uniform(2).unwrap();
        psi.grover_iteration(&o, &mut c).unwrap();
        let m = PureState::basis(2, 3).unwrap();
        assert!(phase_distance(&psi, &m).unwrap() < 1e-12);
        assert_abs_diff_eq!(psi.success_probability(&o).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(c.calls(), 1);
    }

    #[test]
    fn grover_overlap_follows_exact_recursion() {
        // <m|G^j|s> = sin((2j+1) theta), sin(theta) = 1/sqrt(N).
        let n = 10;
        let nf = f64::from(1u32 << n);
        let theta = (1.0 / nf.sqrt()).asin();
        let o = oracle(n, 777);
        let mut c = OracleCounter::new();
        let mut psi = PureState::uniform(n).unwrap();
        for j in 1..=25u32 {
            psi.grover_iteration(&o, &mut c).unwrap();
            let overlap = psi.marked_overlap(&o).unwrap();
            let expected = ((2.0 * f64::from(j) + 1.0) * theta).sin();
            assert_abs_diff_eq!(overlap.re, expected, epsilon = 1e-10);
            assert!(overlap.im.abs() < 1e-12);
        }
    }

    #[test]
    fn grover_rounding_error_bound_n10() {
        let n = 10;
        let nf = f64::from(1u32 << n);
        let r = (std::f64::consts::FRAC_PI_4 * nf.sqrt()).floor() as u32;
        assert_eq!(r, 25);
        let o = oracle(n, 31);
        let mut c = OracleCounter::new();
        let mut psi = PureState::uniform(n).unwrap();
        for _ in 0..r {
            psi.grover_iteration(&o, &mut c).unwrap();
        }
        let m = PureState::basis(n, 31).unwrap();
        let dist = phase_distance(&psi, &m).unwrap();
        assert!(dist < 2.0 / nf.sqrt(), "dist = {dist}");
        assert_eq!(c.calls(), 25);
    }

    #[test]
    fn marked_evolution_at_pi_is_negated_oracle() {
        let n = 4;
        let o = oracle(n, 11);
        let mut c = OracleCounter::new();
        let mut psi = random_state(n, 5);
        let mut reference = psi.clone();

        psi.evolve_marked_hamiltonian(&o, std::f64::consts::PI, &mut c)
            .unwrap();
        reference.apply_oracle_phase(&o, &mut c).unwrap();
        for (a, b) in psi.amplitudes().iter().zip(reference.amplitudes()) {
            assert!((a + b).norm() < 1e-12, "e^(-i H_f pi) must equal -U_f");
        }
        assert_eq!(c.calls(), 3); // 2 for the evolution, 1 for the flip
    }

    #[test]
    fn marked_evolution_identity_and_fixed_point() {
        let n = 3;
        let o = oracle(n, 2);
        let mut c = OracleCounter::new();

        let mut psi = random_state(n, 8);
        let before = psi.clone();
        psi.evolve_marked_hamiltonian(&o, 0.0, &mut c).unwrap();
        for (a, b) in psi.amplitudes().iter().zip(before.amplitudes()) {
            assert_eq!(a, b);
        }

        let mut m = PureState::basis(n, 2).unwrap();
        m.evolve_marked_hamiltonian(&o, 1.2345, &mut c).unwrap();
        assert_eq!(m.amplitudes()[2], C64::new(1.0, 0.0));
    }

    #[test]
    fn mixing_evolution_at_pi_is_negated_diffusion() {
        let n = 3;
        let mut psi = random_state(n, 21);
        let mut reference = psi.clone();
        psi.evolve_mixing_hamiltonian(std::f64::consts::PI).unwrap();
        reference.apply_diffusion();
        for (a, b) in psi.amplitudes().iter().zip(reference.amplitudes()) {
            assert!((a + b).norm() < 1e-12);
        }
    }

    #[test]
    fn mixing_evolution_fixes_uniform() {
        let mut s = PureState::uniform(6).unwrap();
        s.evolve_mixing_hamiltonian(2.7).unwrap();
        let reference = PureState::uniform(6).unwrap();
        for (a, b) in s.amplitudes().iter().zip(reference.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn success_probability_examples() {
        let o = oracle(4, 7);
        let m = PureState::basis(4, 7).unwrap();
        assert_abs_diff_eq!(m.success_probability(&o).unwrap(), 1.0, epsilon = 1e-15);
        let s = PureState::uniform(4).unwrap();
        assert_abs_diff_eq!(
            s.success_probability(&o).unwrap(),
            1.0 / 16.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn phase_distance_examples() {
        let m = PureState::basis(3, 4).unwrap();
        assert_eq!(phase_distance(&m, &m).unwrap(), 0.0);

        let mut im = m.clone();
        let amps: Vec<C64> = im.amplitudes().iter().map(|a| a * C64::i()).collect();
        im = PureState::from_amplitudes(3, amps).unwrap();
        assert!(phase_distance(&im, &m).unwrap() < 1e-12);

        let other = PureState::basis(3, 5).unwrap();
        assert_abs_diff_eq!(
            phase_distance(&other, &m).unwrap(),
            2.0_f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn phase_distance_rejects_unnormalized() {
        let m = PureState::basis(2, 0).unwrap();
        let mut bad = m.clone();
        bad.amplitudes[0] = C64::new(0.9, 0.0);
        assert!(matches!(
            phase_distance(&bad, &m),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn measurement_is_deterministic_and_complete() {
        let mut psi = PureState::uniform(4).unwrap();
        let o = oracle(4, 3);
        let mut c = OracleCounter::new();
        psi.grover_iteration(&o, &mut c).unwrap();
        let h1 = psi.measure_counts(10_000, 99).unwrap();
        let h2 = psi.measure_counts(10_000, 99).unwrap();
        assert_eq!(h1, h2);
        assert_eq!(h1.values().sum::<u64>(), 10_000);
    }

    #[test]
    fn measurement_of_basis_state_is_concentrated() {
        let m = PureState::basis(5, 17).unwrap();
        let h = m.measure_counts(1000, 1).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h[&17], 1000);
    }

    #[test]
    fn measurement_statistics_uniform() {
        // n=2, 10^6 shots: each outcome within 4 sigma of 250000.
        let s = PureState::uniform(2).unwrap();
        let h = s.measure_counts(1_000_000, 2024).unwrap();
        let sigma = (1_000_000.0_f64 * 0.25 * 0.75).sqrt();
        for x in 0..4 {
            let count = *h.get(&x).unwrap_or(&0) as f64;
            assert!(
                (count - 250_000.0).abs() < 4.0 * sigma,
                "outcome {x}: {count}"
            );
        }
    }

    #[test]
    fn rejects_zero_shots() {
        let s = PureState::uniform(2).unwrap();
        assert!(s.measure_counts(0, 7).is_err());
    }

    pub(crate) fn random_state(n_qubits: u32, seed: u64) -> PureState {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = 1usize << n_qubits;
        let mut amps: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        PureState::from_amplitudes(n_qubits, amps).unwrap()
    }
}
