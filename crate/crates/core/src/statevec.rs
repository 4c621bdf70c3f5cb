// Copyright 2026 The ghz-anon developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Dense statevector engine for small n-qubit pure states.
//!
//! Supports exactly what the protocols need: GHZ-state preparation,
//! single-qubit diagonal phase gates, single-qubit Pauli measurements with
//! collapse, exact expectation values of Pauli words, and the all-X
//! discrimination of the two orthogonal GHZ states.
//!
//! # Basis convention
//!
//! Basis state `b` has qubit `i` in the bit at position `n − 1 − i`, so
//! qubit 0 is the leftmost tensor factor and `|10…0⟩` is index `2^(n−1)`.
//!
//! Global phase is not observable; state equality is asserted through
//! [`StateVector::fidelity`].

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::{PauliAxis, PauliString};
use crate::Scalar;

/// Hard cap on register size; 2^24 amplitudes is far beyond protocol needs.
pub const MAX_QUBITS: usize = 24;

/// A ±1 measurement outcome (or announced value).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn value(self) -> i32 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Outcome::Plus),
            -1 => Ok(Outcome::Minus),
            other => Err(Error::InvalidConfig(format!(
                "outcome must be +1 or -1, got {other}"
            ))),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }

    /// Product (parity) of a sequence of outcomes; empty product is +1.
    pub fn product<I: IntoIterator<Item = Outcome>>(outcomes: I) -> Outcome {
        outcomes
            .into_iter()
            .fold(Outcome::Plus, |acc, o| if o == Outcome::Minus {
                acc.flipped()
            } else {
                acc
            })
    }
}

impl std::ops::Mul for Outcome {
    type Output = Outcome;

    fn mul(self, rhs: Outcome) -> Outcome {
        if self == rhs {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }
}

/// Which of the two orthogonal GHZ states: `Minus` is
/// (|0…0⟩ − |1…1⟩)/√2, `Plus` is (|0…0⟩ + |1…1⟩)/√2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GhzKind {
    Minus,
    Plus,
}

impl GhzKind {
    /// Label inferred from the parity of an all-X measurement: the minus
    /// state is the −1 eigenstate of X⊗…⊗X, the plus state the +1.
    pub fn from_x_parity(product: Outcome) -> Self {
        match product {
            Outcome::Minus => GhzKind::Minus,
            Outcome::Plus => GhzKind::Plus,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            GhzKind::Minus => GhzKind::Plus,
            GhzKind::Plus => GhzKind::Minus,
        }
    }
}

/// The diagonal single-qubit gate diag(1, e^{iπ/2^level}).
///
/// Level 0 is exactly the Pauli Z used to encode decisions; level k ≥ 1 is
/// the fractional phase used by the veto protocol's round-k refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseGate {
    level: u32,
}

impl PhaseGate {
    pub fn new(level: u32) -> Self {
        Self { level }
    }

    /// The decision-encoding gate, diag(1, −1).
    pub fn pauli_z() -> Self {
        Self { level: 0 }
    }

    pub fn level(self) -> u32 {
        self.level
    }

    /// Phase applied to the |1⟩ component. Level 0 yields exactly −1.
    pub fn phase<T: Scalar>(self) -> Complex<T> {
        if self.level == 0 {
            return Complex::new(-T::one(), T::zero());
        }
        let angle = T::PI() / (T::one() + T::one()).powi(self.level as i32);
        Complex::from_polar(T::one(), angle)
    }
}

/// Dense pure state on `n_qubits` qubits.
#[derive(Debug, Clone)]
pub struct StateVector<T> {
    n_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Scalar> StateVector<T> {
    /// |0…0⟩ on `n` qubits.
    pub fn zero_state(n: usize) -> Result<Self> {
        Self::computational_basis(n, 0)
    }

    /// The basis state with the given index (see the module-level
    /// convention for bit ordering).
    pub fn computational_basis(n: usize, index: usize) -> Result<Self> {
        check_qubit_count(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::InvalidConfig(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(Self { n_qubits: n, amps })
    }

    /// (|0…0⟩ ∓ |1…1⟩)/√2 depending on `kind`.
    pub fn ghz(n: usize, kind: GhzKind) -> Result<Self> {
        check_qubit_count(n)?;
        let dim = 1usize << n;
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        let half = T::one() / (T::one() + T::one()).sqrt();
        amps[0] = Complex::new(half, T::zero());
        amps[dim - 1] = match kind {
            GhzKind::Minus => Complex::new(-half, T::zero()),
            GhzKind::Plus => Complex::new(half, T::zero()),
        };
        Ok(Self { n_qubits: n, amps })
    }

    /// State from raw amplitudes (length must be a power of two within the
    /// qubit cap). The vector is normalized on entry.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "amplitude vector length {dim} is not a power of two ≥ 2"
            )));
        }
        let n = dim.trailing_zeros() as usize;
        check_qubit_count(n)?;
        let mut state = Self { n_qubits: n, amps };
        let norm = state.norm_sqr();
        if norm <= T::zero() {
            return Err(Error::InvalidConfig("zero amplitude vector".into()));
        }
        state.scale(T::one() / norm.sqrt());
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitude(&self, basis: usize) -> Complex<T> {
        self.amps[basis]
    }

    /// Σ |amp|²; 1 within 1e-12 after every operation.
    pub fn norm_sqr(&self) -> T {
        self.amps
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// Inner product ⟨self|other⟩.
    pub fn overlap(&self, other: &Self) -> Result<Complex<T>> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            }))
    }

    /// |⟨self|other⟩|² — the global-phase-insensitive equality measure.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    fn mask(&self, qubit: usize) -> usize {
        1usize << (self.n_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                n: self.n_qubits,
            });
        }
        Ok(())
    }

    fn scale(&mut self, factor: T) {
        for a in &mut self.amps {
            *a = a.scale(factor);
        }
    }

    /// Multiply the |1⟩ component of `qubit` by the gate's phase.
    pub fn apply_phase(&mut self, qubit: usize, gate: PhaseGate) -> Result<()> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        let phase = gate.phase::<T>();
        for (b, amp) in self.amps.iter_mut().enumerate() {
            if b & mask != 0 {
                *amp = *amp * phase;
            }
        }
        Ok(())
    }

    /// Apply an arbitrary 2×2 unitary to one qubit.
    pub fn apply_single_qubit(&mut self, qubit: usize, m: [[Complex<T>; 2]; 2]) -> Result<()> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        for b in 0..self.amps.len() {
            if b & mask == 0 {
                let paired = b | mask;
                let a0 = self.amps[b];
                let a1 = self.amps[paired];
                self.amps[b] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[paired] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }

    /// Rotation taking the +1 eigenvector of `axis` to |0⟩.
    fn basis_change(axis: PauliAxis) -> Option<[[Complex<T>; 2]; 2]> {
        let h = T::one() / (T::one() + T::one()).sqrt();
        let r = Complex::new(h, T::zero());
        let i = Complex::new(T::zero(), h);
        match axis {
            PauliAxis::Z => None,
            // Hadamard, self-inverse.
            PauliAxis::X => Some([[r, r], [r, -r]]),
            // H·S†: maps (|0⟩ + i|1⟩)/√2 to |0⟩.
            PauliAxis::Y => Some([[r, -i], [r, i]]),
        }
    }

    /// Inverse of [`Self::basis_change`].
    fn basis_change_back(axis: PauliAxis) -> Option<[[Complex<T>; 2]; 2]> {
        let h = T::one() / (T::one() + T::one()).sqrt();
        let r = Complex::new(h, T::zero());
        let i = Complex::new(T::zero(), h);
        match axis {
            PauliAxis::Z => None,
            PauliAxis::X => Some([[r, r], [r, -r]]),
            // S·H.
            PauliAxis::Y => Some([[r, r], [i, -i]]),
        }
    }

    /// Measure one qubit along a Pauli axis, collapsing the state.
    ///
    /// The outcome is sampled per the Born rule from the ±1 eigenspaces;
    /// the state is replaced by the normalized projection, so re-measuring
    /// the same qubit and axis repeats the outcome.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        qubit: usize,
        axis: PauliAxis,
        rng: &mut R,
    ) -> Result<Outcome> {
        self.check_qubit(qubit)?;
        if let Some(m) = Self::basis_change(axis) {
            self.apply_single_qubit(qubit, m)?;
        }
        let mask = self.mask(qubit);
        let mut p_minus = T::zero();
        for (b, amp) in self.amps.iter().enumerate() {
            if b & mask != 0 {
                p_minus = p_minus + amp.norm_sqr();
            }
        }
        let outcome = if rng.random::<f64>() < p_minus.to_f64().unwrap_or(0.0) {
            Outcome::Minus
        } else {
            Outcome::Plus
        };
        let keep_set = outcome == Outcome::Minus;
        let mut kept = T::zero();
        for (b, amp) in self.amps.iter_mut().enumerate() {
            if (b & mask != 0) == keep_set {
                kept = kept + amp.norm_sqr();
            } else {
                *amp = Complex::new(T::zero(), T::zero());
            }
        }
        self.scale(T::one() / kept.sqrt());
        if let Some(m) = Self::basis_change_back(axis) {
            self.apply_single_qubit(qubit, m)?;
        }
        Ok(outcome)
    }

    /// Exact ⟨state|op|state⟩ for a Hermitian Pauli word.
    pub fn expectation(&self, op: &PauliString) -> Result<T> {
        if op.len() != self.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                got: op.len(),
            });
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for (b, amp) in self.amps.iter().enumerate() {
            let (target, phase) = op.action_on_basis::<T>(b);
            acc = acc + self.amps[target].conj() * phase * *amp;
        }
        Ok(acc.re)
    }

    /// Measure every qubit in X and classify by outcome parity: product −1
    /// labels the minus-sign GHZ state, +1 its orthogonal partner.
    ///
    /// Also returns the individual outcomes (the values parties announce).
    /// On a state that is neither GHZ form the label is just the sampled
    /// parity; callers detect forgeries only through cross-run
    /// inconsistency.
    pub fn discriminate_ghz<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (GhzKind, Vec<Outcome>) {
        let outcomes: Vec<Outcome> = (0..self.n_qubits)
            .map(|q| {
                self.measure(q, PauliAxis::X, rng)
                    .expect("qubit index in range")
            })
            .collect();
        let product = Outcome::product(outcomes.iter().copied());
        (GhzKind::from_x_parity(product), outcomes)
    }

    /// Exact joint outcome distribution for measuring every qubit along
    /// the given axes.
    ///
    /// Entry `k` is the probability of the outcome tuple whose qubit-i
    /// outcome is −1 iff bit `n − 1 − i` of `k` is set (same bit layout as
    /// basis indices, with −1 playing the role of the set bit).
    pub fn measurement_distribution(&self, bases: &[PauliAxis]) -> Result<Vec<T>> {
        if bases.len() != self.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                got: bases.len(),
            });
        }
        let mut rotated = self.clone();
        for (q, axis) in bases.iter().enumerate() {
            if let Some(m) = Self::basis_change(*axis) {
                rotated.apply_single_qubit(q, m)?;
            }
        }
        Ok(rotated.amps.iter().map(|a| a.norm_sqr()).collect())
    }
}

fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCountOutOfRange { n, max: MAX_QUBITS });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, StreamRole};
    use proptest::prelude::*;

    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn ghz64(n: usize, kind: GhzKind) -> StateVector<f64> {
        StateVector::ghz(n, kind).unwrap()
    }

    fn test_rng(salt: u64) -> rand_chacha::ChaCha8Rng {
        stream(salt, StreamRole::Measurement, 0)
    }

    #[test]
    fn ghz_three_qubit_amplitudes() {
        let s = ghz64(3, GhzKind::Minus);
        assert!((s.amplitude(0).re - SQRT_HALF).abs() < 1e-15);
        assert!((s.amplitude(7).re + SQRT_HALF).abs() < 1e-15);
        for b in 1..7 {
            assert_eq!(s.amplitude(b), num_complex::Complex::new(0.0, 0.0));
        }
    }

    #[test]
    fn ghz_one_qubit_is_plus_superposition() {
        let s = ghz64(1, GhzKind::Plus);
        assert!((s.amplitude(0).re - SQRT_HALF).abs() < 1e-15);
        assert!((s.amplitude(1).re - SQRT_HALF).abs() < 1e-15);
    }

    #[test]
    fn ghz_five_qubit_amplitudes() {
        let s = ghz64(5, GhzKind::Minus);
        assert!((s.amplitude(0).re - SQRT_HALF).abs() < 1e-15);
        assert!((s.amplitude(31).re + SQRT_HALF).abs() < 1e-15);
    }

    #[test]
    fn ghz_rejects_out_of_range_sizes() {
        assert!(matches!(
            StateVector::<f64>::ghz(0, GhzKind::Minus),
            Err(Error::QubitCountOutOfRange { .. })
        ));
        assert!(matches!(
            StateVector::<f64>::ghz(MAX_QUBITS + 1, GhzKind::Minus),
            Err(Error::QubitCountOutOfRange { .. })
        ));
    }

    #[test]
    fn phase_gate_level_zero_is_exact_sign_flip() {
        let phase = PhaseGate::pauli_z().phase::<f64>();
        assert_eq!(phase, num_complex::Complex::new(-1.0, 0.0));
    }

    #[test]
    fn two_sign_flips_leave_ghz_fixed() {
        let mut s = ghz64(3, GhzKind::Minus);
        s.apply_phase(0, PhaseGate::pauli_z()).unwrap();
        s.apply_phase(1, PhaseGate::pauli_z()).unwrap();
        let f = s.fidelity(&ghz64(3, GhzKind::Minus)).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_sign_flip_switches_ghz_branch() {
        let mut s = ghz64(3, GhzKind::Minus);
        s.apply_phase(1, PhaseGate::pauli_z()).unwrap();
        let f = s.fidelity(&ghz64(3, GhzKind::Plus)).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    /// Oracle: build the composed state for "σ_z then level-1 by two of
    /// five parties" directly from its amplitudes and compare.
    #[test]
    fn level_one_after_sign_flip_by_two_parties() {
        let mut s = ghz64(5, GhzKind::Minus);
        for q in [1, 3] {
            s.apply_phase(q, PhaseGate::pauli_z()).unwrap();
        }
        for q in [1, 3] {
            s.apply_phase(q, PhaseGate::new(1)).unwrap();
        }
        // phase on |1…1⟩: (−1)² · e^{iπ·2/2} = −1, so the minus sign flips
        let mut amps = vec![num_complex::Complex::new(0.0, 0.0); 32];
        amps[0] = num_complex::Complex::new(SQRT_HALF, 0.0);
        amps[31] = num_complex::Complex::new(SQRT_HALF, 0.0);
        let expected = StateVector::from_amplitudes(amps).unwrap();
        assert!((s.fidelity(&expected).unwrap() - 1.0).abs() < 1e-12);
        assert!((s.fidelity(&ghz64(5, GhzKind::Plus)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn apply_phase_rejects_bad_qubit() {
        let mut s = ghz64(2, GhzKind::Minus);
        assert!(matches!(
            s.apply_phase(2, PhaseGate::pauli_z()),
            Err(Error::QubitOutOfRange { .. })
        ));
    }

    #[test]
    fn all_x_product_on_ghz_minus_is_always_minus_one() {
        let mut rng = test_rng(11);
        let orders = [[0usize, 1, 2], [2, 0, 1], [1, 2, 0], [2, 1, 0]];
        for trial in 0..200 {
            let mut s = ghz64(3, GhzKind::Minus);
            let outcomes: Vec<Outcome> = orders[trial % orders.len()]
                .iter()
                .map(|&q| s.measure(q, PauliAxis::X, &mut rng).unwrap())
                .collect();
            assert_eq!(Outcome::product(outcomes), Outcome::Minus);
        }
    }

    #[test]
    fn z_measurement_of_zero_state_is_deterministic() {
        let mut rng = test_rng(12);
        let mut s = StateVector::<f64>::zero_state(3).unwrap();
        let before = s.clone();
        let outcome = s.measure(0, PauliAxis::Z, &mut rng).unwrap();
        assert_eq!(outcome, Outcome::Plus);
        assert!((s.fidelity(&before).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn x_marginal_on_ghz_is_unbiased() {
        // Born oracle: P(+1) for X on one qubit of the GHZ state is 1/2.
        let expected = 0.5;
        let trials = 10_000;
        let mut rng = test_rng(13);
        let mut plus = 0usize;
        for _ in 0..trials {
            let mut s = ghz64(3, GhzKind::Minus);
            if s.measure(0, PauliAxis::X, &mut rng).unwrap() == Outcome::Plus {
                plus += 1;
            }
        }
        let freq = plus as f64 / trials as f64;
        let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
        assert!(
            (freq - expected).abs() < 3.0 * sigma,
            "freq {freq} outside 3σ of {expected}"
        );
    }

    #[test]
    fn repeated_measurement_repeats_outcome() {
        let mut rng = test_rng(14);
        for _ in 0..50 {
            let mut s = ghz64(4, GhzKind::Minus);
            let first = s.measure(2, PauliAxis::Y, &mut rng).unwrap();
            for _ in 0..3 {
                assert_eq!(s.measure(2, PauliAxis::Y, &mut rng).unwrap(), first);
            }
        }
    }

    #[test]
    fn expectation_matches_ghz_eigenvalues() {
        use PauliAxis::{X, Y};
        let psi = ghz64(3, GhzKind::Minus);
        let op = PauliString::new(vec![Some(X), Some(Y), Some(Y)]);
        assert!((psi.expectation(&op).unwrap() - 1.0).abs() < 1e-12);

        let perp = ghz64(3, GhzKind::Plus);
        let xxx = PauliString::uniform(X, 3);
        assert!((perp.expectation(&xxx).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expectation_of_identity_is_one() {
        let s = StateVector::<f64>::zero_state(3).unwrap();
        let id = PauliString::identity(3);
        assert!((s.expectation(&id).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expectation_rejects_length_mismatch() {
        let s = ghz64(3, GhzKind::Minus);
        let op = PauliString::uniform(PauliAxis::X, 2);
        assert!(matches!(
            s.expectation(&op),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn discrimination_is_deterministic_on_ghz_states() {
        let mut rng = test_rng(15);
        for _ in 0..100 {
            let (kind, outcomes) = ghz64(3, GhzKind::Minus).discriminate_ghz(&mut rng);
            assert_eq!(kind, GhzKind::Minus);
            assert_eq!(outcomes.len(), 3);
        }
        // oracle for the plus branch: the all-X word has it as +1 eigenstate
        let all_x = PauliString::uniform(PauliAxis::X, 5);
        let plus = ghz64(5, GhzKind::Plus);
        assert!((plus.expectation(&all_x).unwrap() - 1.0).abs() < 1e-12);
        for _ in 0..100 {
            let (kind, _) = ghz64(5, GhzKind::Plus).discriminate_ghz(&mut rng);
            assert_eq!(kind, GhzKind::Plus);
        }
    }

    #[test]
    fn discrimination_of_forged_all_zero_state_is_a_coin_flip() {
        // Born oracle: all-X outcomes on |0…0⟩ are independent fair coins,
        // so the parity is uniform.
        let expected = 0.5;
        let trials = 10_000;
        let mut rng = test_rng(16);
        let mut minus = 0usize;
        for _ in 0..trials {
            let mut s = StateVector::<f64>::zero_state(5).unwrap();
            if s.discriminate_ghz(&mut rng).0 == GhzKind::Minus {
                minus += 1;
            }
        }
        let freq = minus as f64 / trials as f64;
        let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
        assert!((freq - expected).abs() < 3.0 * sigma);
    }

    /// Composed-phase law behind the veto protocol's round-k refinement:
    /// after the sign-flip encoding by t parties, a round-k gate by the
    /// same t parties leaves the state on the minus branch iff
    /// t ≡ 0 (mod 2^{k+1}) and moves it to the plus branch iff
    /// t ≡ 2^k (mod 2^{k+1}). Round 0 applies no extra gate.
    #[test]
    fn phase_composition_law() {
        for n in 1..=9usize {
            for k in 0..=4u32 {
                for t in 0..=n {
                    let mut s = ghz64(n, GhzKind::Minus);
                    for q in 0..t {
                        s.apply_phase(q, PhaseGate::pauli_z()).unwrap();
                    }
                    if k >= 1 {
                        for q in 0..t {
                            s.apply_phase(q, PhaseGate::new(k)).unwrap();
                        }
                    }
                    let on_minus = s.overlap(&ghz64(n, GhzKind::Minus)).unwrap().norm();
                    let on_plus = s.overlap(&ghz64(n, GhzKind::Plus)).unwrap().norm();
                    let modulus = 1usize << (k + 1);
                    let half = 1usize << k;
                    if t % modulus == 0 {
                        assert!((on_minus - 1.0).abs() < 1e-9, "n={n} k={k} t={t}");
                    } else if t % modulus == half {
                        assert!((on_plus - 1.0).abs() < 1e-9, "n={n} k={k} t={t}");
                    } else {
                        assert!(on_minus < 1.0 - 1e-3, "n={n} k={k} t={t}");
                        assert!(on_plus < 1.0 - 1e-3, "n={n} k={k} t={t}");
                    }
                }
            }
        }
    }

    /// Any proper subset of all-X outcomes on a GHZ state is exactly
    /// uniform — the Born-level fact behind the anonymity argument.
    #[test]
    fn proper_subsets_of_x_outcomes_are_uniform() {
        for n in 2..=5usize {
            let s = ghz64(n, GhzKind::Minus);
            let dist = s
                .measurement_distribution(&vec![PauliAxis::X; n])
                .unwrap();
            // every non-empty strict subset of qubits
            for subset in 1..(1usize << n) - 1 {
                let k = subset.count_ones() as usize;
                if k == n {
                    continue;
                }
                let cells = 1usize << k;
                let mut marginal = vec![0.0f64; cells];
                for (idx, p) in dist.iter().enumerate() {
                    let mut cell = 0usize;
                    let mut slot = 0usize;
                    for q in 0..n {
                        let mask = 1usize << (n - 1 - q);
                        if subset & mask != 0 {
                            if idx & mask != 0 {
                                cell |= 1 << slot;
                            }
                            slot += 1;
                        }
                    }
                    marginal[cell] += p;
                }
                let expected = 1.0 / cells as f64;
                for (cell, p) in marginal.iter().enumerate() {
                    assert!(
                        (p - expected).abs() < 1e-12,
                        "n={n} subset={subset:#b} cell={cell}: {p}"
                    );
                }
            }
        }
    }

    #[test]
    fn measurement_distribution_matches_sampling_frame() {
        // X⊗X⊗X on the minus GHZ state: only odd-parity tuples occur.
        let s = ghz64(3, GhzKind::Minus);
        let dist = s.measurement_distribution(&[PauliAxis::X; 3]).unwrap();
        for (idx, p) in dist.iter().enumerate() {
            if idx.count_ones() % 2 == 1 {
                assert!((p - 0.25).abs() < 1e-12);
            } else {
                assert!(p.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn works_in_single_precision() {
        let s = StateVector::<f32>::ghz(3, GhzKind::Minus).unwrap();
        let op = PauliString::uniform(PauliAxis::X, 3);
        assert!((s.expectation(&op).unwrap() + 1.0).abs() < 1e-5);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn norm_preserved_by_random_operations(
            n in 1usize..=6,
            seed in 0u64..1_000,
            ops in proptest::collection::vec((0usize..6, 0u32..4, 0usize..3), 1..20),
        ) {
            let mut rng = test_rng(seed);
            let mut s = StateVector::<f64>::ghz(n, GhzKind::Minus).unwrap();
            for (q, level, what) in ops {
                let q = q % n;
                match what {
                    0 => s.apply_phase(q, PhaseGate::new(level)).unwrap(),
                    1 => { s.measure(q, PauliAxis::X, &mut rng).unwrap(); }
                    _ => { s.measure(q, PauliAxis::Y, &mut rng).unwrap(); }
                }
                prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn collapse_is_idempotent(
            n in 1usize..=5,
            qubit in 0usize..5,
            axis_pick in 0u8..3,
            seed in 0u64..1_000,
        ) {
            let qubit = qubit % n;
            let axis = match axis_pick { 0 => PauliAxis::X, 1 => PauliAxis::Y, _ => PauliAxis::Z };
            let mut rng = test_rng(seed);
            let mut s = StateVector::<f64>::ghz(n, GhzKind::Minus).unwrap();
            let first = s.measure(qubit, axis, &mut rng).unwrap();
            let collapsed = s.clone();
            let second = s.measure(qubit, axis, &mut rng).unwrap();
            prop_assert_eq!(first, second);
            prop_assert!((s.fidelity(&collapsed).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
