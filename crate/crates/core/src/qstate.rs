// Copyright 2026 The ecp Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! Dense pure-state register.
//!
//! Basis convention: qubit 0 is the most significant bit of the basis index, bit value 0 is
//! spin-up `|↑⟩` and bit value 1 is spin-down `|↓⟩`. Every module in the crate shares it.
//!
//! Gates act in place on `&mut PureState`; measurements collapse in place and return the
//! selected outcome with its exact Born probability.

use num_complex::Complex64;
use thiserror::Error;

/// Complex amplitude of one basis component.
pub type Amplitude = Complex64;

/// Single-qubit ket `[⟨↑|ψ⟩, ⟨↓|ψ⟩]`.
pub type Ket = [Amplitude; 2];

/// Tolerance on normalization and on probability sums.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Branches below this probability cannot be selected.
pub const ZERO_BRANCH_PROBABILITY: f64 = 1e-15;

/// Hard cap on register size.
pub const MAX_QUBITS: usize = 24;

/// Spin-up `|↑⟩`.
pub const UP: Ket = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
/// Spin-down `|↓⟩`.
pub const DOWN: Ket = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
/// `(|↑⟩ + |↓⟩)/√2`.
pub const PLUS: Ket = [
    Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
    Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("register size {0} is outside 1..={MAX_QUBITS}")]
    InvalidQubitCount(usize),
    #[error("basis index {index} out of range for a {num_qubits}-qubit register")]
    BasisIndexOutOfRange { index: usize, num_qubits: usize },
    #[error("amplitude vector has length {len}, expected {expected}")]
    LengthMismatch { len: usize, expected: usize },
    #[error("state has no nonzero amplitude")]
    ZeroNorm,
    #[error("amplitude is not finite")]
    NonFinite,
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("qubit {0} given twice; the operation needs distinct qubits")]
    RepeatedQubit(usize),
    #[error("selected branch has probability {probability:e}")]
    ZeroProbabilityBranch { probability: f64 },
    #[error("register sizes differ: {0} vs {1} qubits")]
    SizeMismatch(usize, usize),
    #[error("qubit {qubit} is not in the expected product state (weight {weight})")]
    NotFactorized { qubit: usize, weight: f64 },
}

pub type Result<T> = std::result::Result<T, StateError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

/// What the charge detector shows. Occupations 0 and 2 give the same reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChargeReading {
    /// Occupation number one.
    C1,
    /// Occupation number zero or two.
    C0,
}

impl Parity {
    pub fn charge_reading(self) -> ChargeReading {
        match self {
            Parity::Even => ChargeReading::C1,
            Parity::Odd => ChargeReading::C0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityOutcome {
    pub parity: Parity,
    pub charge_reading: ChargeReading,
    pub probability: f64,
}

impl ParityOutcome {
    pub fn new(parity: Parity, probability: f64) -> Self {
        Self {
            parity,
            charge_reading: parity.charge_reading(),
            probability,
        }
    }
}

/// Branch of a projection onto the rotated basis `{|φ⟩, |φ⊥⟩}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Projection {
    Phi,
    PhiPerp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionOutcome {
    pub branch: Projection,
    pub probability: f64,
}

/// Outcome selector for a two-branch measurement.
///
/// `Draw(u)` takes a uniform number in `[0, 1)` and selects the first branch (`Even`, `Phi`)
/// when `u` is below its probability. It never lands on a branch below
/// [`ZERO_BRANCH_PROBABILITY`] while the other branch is available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pick<B> {
    Force(B),
    Draw(f64),
}

impl<B: Copy> Pick<B> {
    fn select(self, first: B, second: B, p_first: f64, p_second: f64) -> B {
        match self {
            Pick::Force(b) => b,
            Pick::Draw(u) => {
                let take_first = if u < p_first {
                    p_first >= ZERO_BRANCH_PROBABILITY || p_second < ZERO_BRANCH_PROBABILITY
                } else {
                    p_second < ZERO_BRANCH_PROBABILITY && p_first >= ZERO_BRANCH_PROBABILITY
                };
                if take_first {
                    first
                } else {
                    second
                }
            }
        }
    }
}

/// The rotated basis `|φ⟩ = cosθ|↑⟩ + sinθ|↓⟩`, `|φ⊥⟩ = −sinθ|↑⟩ + cosθ|↓⟩`.
pub fn rotated_basis(theta: f64) -> (Ket, Ket) {
    let (s, c) = theta.sin_cos();
    (
        [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
        [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)],
    )
}

fn clamp_probability(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Vec<Amplitude>,
}

impl PureState {
    /// Builds a normalized state from `(basis index, amplitude)` pairs. Unlisted components are
    /// zero; repeated indices accumulate.
    pub fn new(num_qubits: usize, assignments: &[(usize, Amplitude)]) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let dim = 1usize << num_qubits;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        for &(index, amp) in assignments {
            if index >= dim {
                return Err(StateError::BasisIndexOutOfRange { index, num_qubits });
            }
            amplitudes[index] += amp;
        }
        Self::from_amplitudes(num_qubits, amplitudes)
    }

    /// Normalizes a full amplitude vector.
    pub fn from_amplitudes(num_qubits: usize, mut amplitudes: Vec<Amplitude>) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let expected = 1usize << num_qubits;
        if amplitudes.len() != expected {
            return Err(StateError::LengthMismatch {
                len: amplitudes.len(),
                expected,
            });
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(StateError::NonFinite);
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(StateError::ZeroNorm);
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        Self::new(num_qubits, &[(index, Complex64::new(1.0, 0.0))])
    }

    pub fn from_ket(ket: Ket) -> Result<Self> {
        Self::from_amplitudes(1, ket.to_vec())
    }

    /// `(|↑…↑⟩ + |↓…↓⟩)/√2` on `num_qubits` qubits.
    pub fn ghz(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let one = Complex64::new(1.0, 0.0);
        Self::new(num_qubits, &[(0, one), ((1 << num_qubits) - 1, one)])
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Amplitude {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `self ⊗ other`; the qubits of `other` follow those of `self`.
    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let num_qubits = self.num_qubits + other.num_qubits;
        check_qubit_count(num_qubits)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    fn mask(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.num_qubits {
            return Err(StateError::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(1 << (self.num_qubits - 1 - qubit))
    }

    fn masks(&self, q1: usize, q2: usize) -> Result<(usize, usize)> {
        let m1 = self.mask(q1)?;
        let m2 = self.mask(q2)?;
        if q1 == q2 {
            return Err(StateError::RepeatedQubit(q1));
        }
        Ok((m1, m2))
    }

    /// Bit flip `σx`.
    pub fn apply_x(&mut self, qubit: usize) -> Result<()> {
        let m = self.mask(qubit)?;
        for i in 0..self.amplitudes.len() {
            if i & m == 0 {
                self.amplitudes.swap(i, i | m);
            }
        }
        Ok(())
    }

    /// Phase flip `σz`: negates components where the qubit is `|↓⟩`.
    pub fn apply_z(&mut self, qubit: usize) -> Result<()> {
        let m = self.mask(qubit)?;
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & m != 0 {
                *a = -*a;
            }
        }
        Ok(())
    }

    /// Flips `target` on the components where `control` is `|↓⟩`.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        let (mc, mt) = self.masks(control, target)?;
        for i in 0..self.amplitudes.len() {
            if i & mc != 0 && i & mt == 0 {
                self.amplitudes.swap(i, i | mt);
            }
        }
        Ok(())
    }

    /// Real rotation `|↑⟩ → cosθ|↑⟩ + sinθ|↓⟩`, `|↓⟩ → −sinθ|↑⟩ + cosθ|↓⟩`.
    ///
    /// `apply_rotation(q, θ)` maps `|↑⟩` to the `|φ⟩` of [`rotated_basis`]; `−θ` undoes it.
    pub fn apply_rotation(&mut self, qubit: usize, theta: f64) -> Result<()> {
        let m = self.mask(qubit)?;
        let (s, c) = theta.sin_cos();
        for i in 0..self.amplitudes.len() {
            if i & m == 0 {
                let up = self.amplitudes[i];
                let down = self.amplitudes[i | m];
                self.amplitudes[i] = up * c - down * s;
                self.amplitudes[i | m] = up * s + down * c;
            }
        }
        Ok(())
    }

    /// Born probabilities `(p_even, p_odd)` of a parity check on two qubits.
    pub fn parity_probabilities(&self, q1: usize, q2: usize) -> Result<(f64, f64)> {
        let (m1, m2) = self.masks(q1, q2)?;
        let (mut even, mut odd) = (0.0, 0.0);
        for (i, a) in self.amplitudes.iter().enumerate() {
            if (i & m1 != 0) != (i & m2 != 0) {
                odd += a.norm_sqr();
            } else {
                even += a.norm_sqr();
            }
        }
        Ok((clamp_probability(even), clamp_probability(odd)))
    }

    /// Nondestructive parity check. Collapses onto span{|↑↑⟩,|↓↓⟩} (even) or
    /// span{|↑↓⟩,|↓↑⟩} (odd) of the two qubits and renormalizes.
    pub fn measure_parity(
        &mut self,
        q1: usize,
        q2: usize,
        pick: Pick<Parity>,
    ) -> Result<ParityOutcome> {
        let (m1, m2) = self.masks(q1, q2)?;
        let (p_even, p_odd) = self.parity_probabilities(q1, q2)?;
        let parity = pick.select(Parity::Even, Parity::Odd, p_even, p_odd);
        let probability = match parity {
            Parity::Even => p_even,
            Parity::Odd => p_odd,
        };
        if probability < ZERO_BRANCH_PROBABILITY {
            return Err(StateError::ZeroProbabilityBranch { probability });
        }
        let keep_odd = parity == Parity::Odd;
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            let odd = (i & m1 != 0) != (i & m2 != 0);
            if odd != keep_odd {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        self.renormalize();
        Ok(ParityOutcome::new(parity, probability))
    }

    /// Rescales by the actual norm; collapse does not divide by the reported probability, which
    /// carries more relative error on small branches.
    fn renormalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        for a in &mut self.amplitudes {
            *a /= norm;
        }
    }

    /// Probability that `qubit` is found in `ket`.
    pub fn overlap_probability(&self, qubit: usize, ket: Ket) -> Result<f64> {
        let m = self.mask(qubit)?;
        let p = (0..self.amplitudes.len())
            .filter(|i| i & m == 0)
            .map(|i| (ket[0].conj() * self.amplitudes[i] + ket[1].conj() * self.amplitudes[i | m]).norm_sqr())
            .sum();
        Ok(clamp_probability(p))
    }

    /// `(p_phi, p_phi_perp)` for a projection of `qubit` onto the basis rotated by `theta`.
    pub fn rotated_probabilities(&self, qubit: usize, theta: f64) -> Result<(f64, f64)> {
        let (phi, perp) = rotated_basis(theta);
        Ok((self.overlap_probability(qubit, phi)?, self.overlap_probability(qubit, perp)?))
    }

    /// Projects `qubit` onto `|φ⟩` or `|φ⊥⟩` of [`rotated_basis`]`(theta)`.
    pub fn measure_rotated(
        &mut self,
        qubit: usize,
        theta: f64,
        pick: Pick<Projection>,
    ) -> Result<ProjectionOutcome> {
        let m = self.mask(qubit)?;
        let (p_phi, p_perp) = self.rotated_probabilities(qubit, theta)?;
        let branch = pick.select(Projection::Phi, Projection::PhiPerp, p_phi, p_perp);
        let (phi, perp) = rotated_basis(theta);
        let (ket, probability) = match branch {
            Projection::Phi => (phi, p_phi),
            Projection::PhiPerp => (perp, p_perp),
        };
        if probability < ZERO_BRANCH_PROBABILITY {
            return Err(StateError::ZeroProbabilityBranch { probability });
        }
        for i in 0..self.amplitudes.len() {
            if i & m == 0 {
                let c = ket[0].conj() * self.amplitudes[i] + ket[1].conj() * self.amplitudes[i | m];
                self.amplitudes[i] = ket[0] * c;
                self.amplitudes[i | m] = ket[1] * c;
            }
        }
        self.renormalize();
        Ok(ProjectionOutcome {
            branch,
            probability,
        })
    }

    /// Removes a qubit known to be the product factor `ket`, returning the state of the rest.
    ///
    /// Fails with [`StateError::NotFactorized`] when the qubit carries less than `1 − 1e-10` of
    /// its weight in `ket`.
    pub fn detach_qubit(&self, qubit: usize, ket: Ket) -> Result<PureState> {
        let m = self.mask(qubit)?;
        if self.num_qubits == 1 {
            return Err(StateError::InvalidQubitCount(0));
        }
        let weight = self.overlap_probability(qubit, ket)?;
        if weight < 1.0 - 1e-10 {
            return Err(StateError::NotFactorized { qubit, weight });
        }
        let low = m - 1;
        let rest = (0..self.amplitudes.len() / 2)
            .map(|j| {
                // Insert a zero bit at the removed position.
                let i = ((j & !low) << 1) | (j & low);
                ket[0].conj() * self.amplitudes[i] + ket[1].conj() * self.amplitudes[i | m]
            })
            .collect();
        PureState::from_amplitudes(self.num_qubits - 1, rest)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        if self.num_qubits != other.num_qubits {
            return Err(StateError::SizeMismatch(self.num_qubits, other.num_qubits));
        }
        let inner: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(clamp_probability(inner.norm_sqr()))
    }
}

/// `|⟨a|b⟩|²` for equally sized registers.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    a.fidelity(b)
}

fn check_qubit_count(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(StateError::InvalidQubitCount(num_qubits));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn re(x: f64) -> Amplitude {
        Complex64::new(x, 0.0)
    }

    fn bell() -> PureState {
        PureState::new(2, &[(0, re(FRAC_1_SQRT_2)), (3, re(FRAC_1_SQRT_2))]).unwrap()
    }

    fn assert_state(state: &PureState, expected: &[f64]) {
        assert_eq!(state.amplitudes().len(), expected.len());
        for (a, e) in state.amplitudes().iter().zip(expected) {
            assert!((a.re - e).abs() < 1e-12 && a.im.abs() < 1e-12, "{state:?} vs {expected:?}");
        }
    }

    /// α|↑↑⟩ + β|↓↓⟩ on (A, B) followed by the ancilla `ket`.
    fn pair_with_ancilla(alpha: f64, beta: f64, ket: Ket) -> PureState {
        let pair = PureState::new(2, &[(0, re(alpha)), (3, re(beta))]).unwrap();
        pair.tensor(&PureState::from_ket(ket).unwrap()).unwrap()
    }

    #[test]
    fn make_state_examples() {
        assert_state(&PureState::new(1, &[(0, re(1.0))]).unwrap(), &[1.0, 0.0]);
        assert_state(&bell(), &[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]);
        let forced = PureState::new(2, &[(0, re(2.0)), (3, re(2.0))]).unwrap();
        assert_state(&forced, &[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]);
    }

    #[test]
    fn make_state_errors() {
        assert_eq!(PureState::new(2, &[]), Err(StateError::ZeroNorm));
        assert_eq!(PureState::new(2, &[(1, re(0.0))]), Err(StateError::ZeroNorm));
        assert_eq!(
            PureState::new(2, &[(4, re(1.0))]),
            Err(StateError::BasisIndexOutOfRange { index: 4, num_qubits: 2 })
        );
        assert_eq!(PureState::new(0, &[(0, re(1.0))]), Err(StateError::InvalidQubitCount(0)));
        assert_eq!(PureState::new(25, &[(0, re(1.0))]), Err(StateError::InvalidQubitCount(25)));
        assert_eq!(PureState::new(1, &[(0, re(f64::NAN))]), Err(StateError::NonFinite));
    }

    #[test]
    fn pauli_examples() {
        let mut s = PureState::from_ket(UP).unwrap();
        s.apply_z(0).unwrap();
        assert_state(&s, &[1.0, 0.0]);
        s.apply_x(0).unwrap();
        assert_state(&s, &[0.0, 1.0]);
        s.apply_z(0).unwrap();
        assert_state(&s, &[0.0, -1.0]);
        assert!(matches!(s.apply_x(1), Err(StateError::QubitOutOfRange { .. })));
        assert!(matches!(s.apply_z(3), Err(StateError::QubitOutOfRange { .. })));

        // σz on A of (α²|↑↑⟩ − β²|↓↓⟩)/√(α⁴+β⁴)
        let (a2, b2): (f64, f64) = (0.2, 0.8);
        let n = (a2 * a2 + b2 * b2).sqrt();
        let mut s = PureState::new(2, &[(0, re(a2)), (3, re(-b2))]).unwrap();
        s.apply_z(0).unwrap();
        assert_state(&s, &[a2 / n, 0.0, 0.0, b2 / n]);
    }

    #[test]
    fn x_on_ancilla_maps_odd_to_even() {
        let (alpha, beta) = (0.2f64.sqrt(), 0.8f64.sqrt());
        // Ψ_o = α|↑↑↓⟩ + β|↓↓↑⟩, Ψ_e = α|↑↑↑⟩ + β|↓↓↓⟩
        let mut odd = PureState::new(3, &[(0b001, re(alpha)), (0b110, re(beta))]).unwrap();
        let even = PureState::new(3, &[(0b000, re(alpha)), (0b111, re(beta))]).unwrap();
        odd.apply_x(2).unwrap();
        assert!((odd.fidelity(&even).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cnot_examples() {
        let mut s = PureState::basis(2, 0b00).unwrap();
        s.apply_cnot(0, 1).unwrap();
        assert_state(&s, &[1.0, 0.0, 0.0, 0.0]);
        let mut s = PureState::basis(2, 0b10).unwrap();
        s.apply_cnot(0, 1).unwrap();
        assert_state(&s, &[0.0, 0.0, 0.0, 1.0]);

        let (alpha, beta) = (0.2f64.sqrt(), 0.8f64.sqrt());
        let mut s = pair_with_ancilla(alpha, beta, UP);
        s.apply_cnot(0, 2).unwrap();
        let psi_e = PureState::new(3, &[(0b000, re(alpha)), (0b111, re(beta))]).unwrap();
        assert!((s.fidelity(&psi_e).unwrap() - 1.0).abs() < 1e-12);

        assert_eq!(s.apply_cnot(1, 1), Err(StateError::RepeatedQubit(1)));
        assert!(matches!(s.apply_cnot(0, 3), Err(StateError::QubitOutOfRange { .. })));
    }

    #[test]
    fn parity_trivial_cases() {
        let mut s = PureState::basis(2, 0b00).unwrap();
        for pick in [Pick::Draw(0.0), Pick::Draw(0.999)] {
            let out = s.measure_parity(0, 1, pick).unwrap();
            assert_eq!(out.parity, Parity::Even);
            assert_eq!(out.charge_reading, ChargeReading::C1);
            assert!((out.probability - 1.0).abs() < 1e-15);
            assert_state(&s, &[1.0, 0.0, 0.0, 0.0]);
        }
        let mut s = PureState::basis(2, 0b01).unwrap();
        let out = s.measure_parity(0, 1, Pick::Draw(0.0)).unwrap();
        assert_eq!(out.parity, Parity::Odd);
        assert_eq!(out.charge_reading, ChargeReading::C0);
        assert!((out.probability - 1.0).abs() < 1e-15);
        assert_state(&s, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(
            s.measure_parity(0, 1, Pick::Force(Parity::Even)),
            Err(StateError::ZeroProbabilityBranch { probability: 0.0 })
        );
        assert_eq!(s.measure_parity(1, 1, Pick::Draw(0.0)), Err(StateError::RepeatedQubit(1)));
    }

    #[test]
    fn parity_on_pair_and_plus_ancilla() {
        let (alpha, beta) = (0.2f64.sqrt(), 0.8f64.sqrt());
        let start = pair_with_ancilla(alpha, beta, PLUS);
        // Hand expansion: α/√2 on |↑↑↑⟩,|↑↑↓⟩ and β/√2 on |↓↓↑⟩,|↓↓↓⟩. Even parity of (A, a)
        // keeps |↑↑↑⟩ and |↓↓↓⟩ with weight (α² + β²)/2.
        let psi_e = PureState::new(3, &[(0b000, re(alpha)), (0b111, re(beta))]).unwrap();
        let psi_o = PureState::new(3, &[(0b001, re(alpha)), (0b110, re(beta))]).unwrap();

        let mut even = start.clone();
        let out = even.measure_parity(0, 2, Pick::Force(Parity::Even)).unwrap();
        assert!((out.probability - 0.5).abs() < 1e-12);
        assert!((even.fidelity(&psi_e).unwrap() - 1.0).abs() < 1e-12);

        let mut odd = start;
        let out = odd.measure_parity(0, 2, Pick::Force(Parity::Odd)).unwrap();
        assert!((out.probability - 0.5).abs() < 1e-12);
        assert!((odd.fidelity(&psi_o).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotated_projection_splits_ghz_ancilla() {
        let (alpha, beta) = (0.2f64.sqrt(), 0.8f64.sqrt());
        let psi_e = PureState::new(3, &[(0b000, re(alpha)), (0b111, re(beta))]).unwrap();
        let theta = (-beta).atan2(alpha);
        let (phi, perp) = rotated_basis(theta);
        assert!((phi[0].re - alpha).abs() < 1e-15 && (phi[1].re + beta).abs() < 1e-15);
        assert!((perp[0].re - beta).abs() < 1e-15 && (perp[1].re - alpha).abs() < 1e-15);

        let mut success = psi_e.clone();
        let out = success.measure_rotated(2, theta, Pick::Force(Projection::PhiPerp)).unwrap();
        assert!((out.probability - 2.0 * 0.2 * 0.8).abs() < 1e-12);
        let pair = success.detach_qubit(2, perp).unwrap();
        assert!((pair.fidelity(&bell()).unwrap() - 1.0).abs() < 1e-12);

        let mut retry = psi_e;
        let out = retry.measure_rotated(2, theta, Pick::Force(Projection::Phi)).unwrap();
        assert!((out.probability - (0.04 + 0.64)).abs() < 1e-12);
        let pair = retry.detach_qubit(2, phi).unwrap();
        let n = 0.68f64.sqrt();
        assert_state(&pair, &[0.2 / n, 0.0, 0.0, -0.8 / n]);
    }

    #[test]
    fn rotated_zero_angle_on_up() {
        let mut s = PureState::from_ket(UP).unwrap();
        let out = s.measure_rotated(0, 0.0, Pick::Draw(0.5)).unwrap();
        assert_eq!(out.branch, Projection::Phi);
        assert!((out.probability - 1.0).abs() < 1e-15);
        assert!(matches!(
            s.measure_rotated(0, 0.0, Pick::Force(Projection::PhiPerp)),
            Err(StateError::ZeroProbabilityBranch { .. })
        ));
    }

    #[test]
    fn fidelity_examples() {
        let up = PureState::from_ket(UP).unwrap();
        let down = PureState::from_ket(DOWN).unwrap();
        let minus_bell =
            PureState::new(2, &[(0, re(FRAC_1_SQRT_2)), (3, re(-FRAC_1_SQRT_2))]).unwrap();
        assert!((bell().fidelity(&bell()).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(up.fidelity(&down).unwrap(), 0.0);
        assert!(bell().fidelity(&minus_bell).unwrap() < 1e-30);
        assert_eq!(fidelity(&up, &bell()), Err(StateError::SizeMismatch(1, 2)));
    }

    #[test]
    fn rotation_maps_up_to_phi_and_back() {
        let theta = 0.7;
        let (phi, _) = rotated_basis(theta);
        let mut s = PureState::from_ket(UP).unwrap();
        s.apply_rotation(0, theta).unwrap();
        assert!((s.fidelity(&PureState::from_ket(phi).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        s.apply_rotation(0, -theta).unwrap();
        assert_state(&s, &[1.0, 0.0]);
    }

    #[test]
    fn detach_rejects_entangled_qubit() {
        assert!(matches!(bell().detach_qubit(1, UP), Err(StateError::NotFactorized { .. })));
        let s = PureState::basis(3, 0b010).unwrap();
        let rest = s.detach_qubit(1, DOWN).unwrap();
        assert_state(&rest, &[1.0, 0.0, 0.0, 0.0]);
        let rest = s.detach_qubit(0, UP).unwrap();
        assert_state(&rest, &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn draw_skips_negligible_branch() {
        let mut s = PureState::basis(2, 0b00).unwrap();
        // u ≥ p_even would select Odd, which has zero weight.
        let out = s.measure_parity(0, 1, Pick::Draw(1.0)).unwrap();
        assert_eq!(out.parity, Parity::Even);
    }

    fn arb_state(max_qubits: usize) -> impl Strategy<Value = PureState> {
        (1..=max_qubits).prop_flat_map(|n| {
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map(
                "zero vector",
                move |v| {
                    let amps = v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect();
                    PureState::from_amplitudes(n, amps).ok()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn gates_preserve_norm_and_are_involutions(s in arb_state(5), a in 0usize..5, b in 0usize..5) {
            let n = s.num_qubits();
            let (a, b) = (a % n, b % n);
            let mut t = s.clone();
            t.apply_x(a).unwrap();
            prop_assert!((t.norm_sqr() - 1.0).abs() < NORM_TOLERANCE);
            t.apply_x(a).unwrap();
            prop_assert!((t.fidelity(&s).unwrap() - 1.0).abs() < 1e-12);
            t.apply_z(a).unwrap();
            prop_assert!((t.norm_sqr() - 1.0).abs() < NORM_TOLERANCE);
            t.apply_z(a).unwrap();
            prop_assert!((t.fidelity(&s).unwrap() - 1.0).abs() < 1e-12);
            if a != b {
                t.apply_cnot(a, b).unwrap();
                prop_assert!((t.norm_sqr() - 1.0).abs() < NORM_TOLERANCE);
                t.apply_cnot(a, b).unwrap();
                prop_assert!((t.fidelity(&s).unwrap() - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn parity_is_complete_and_nondemolition(
            s in arb_state(5), a in 0usize..5, b in 0usize..5, u in 0.0f64..1.0,
        ) {
            let n = s.num_qubits();
            prop_assume!(n >= 2);
            let (a, b) = (a % n, b % n);
            prop_assume!(a != b);
            let (pe, po) = s.parity_probabilities(a, b).unwrap();
            prop_assert!((pe + po - 1.0).abs() < NORM_TOLERANCE);
            let mut t = s.clone();
            let first = t.measure_parity(a, b, Pick::Draw(u)).unwrap();
            prop_assert!((t.norm_sqr() - 1.0).abs() < NORM_TOLERANCE);
            let after = t.clone();
            let second = t.measure_parity(a, b, Pick::Force(first.parity)).unwrap();
            prop_assert_eq!(second.parity, first.parity);
            prop_assert!((second.probability - 1.0).abs() < 1e-12);
            prop_assert!((t.fidelity(&after).unwrap() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn rotated_is_complete_and_normalized(
            s in arb_state(4), q in 0usize..4, theta in -3.2f64..3.2, u in 0.0f64..1.0,
        ) {
            let q = q % s.num_qubits();
            let (pp, pq) = s.rotated_probabilities(q, theta).unwrap();
            prop_assert!((pp + pq - 1.0).abs() < NORM_TOLERANCE);
            let (phi, perp) = rotated_basis(theta);
            let direct = s.overlap_probability(q, phi).unwrap() + s.overlap_probability(q, perp).unwrap();
            prop_assert!((direct - 1.0).abs() < NORM_TOLERANCE);
            let mut t = s.clone();
            t.measure_rotated(q, theta, Pick::Draw(u)).unwrap();
            prop_assert!((t.norm_sqr() - 1.0).abs() < NORM_TOLERANCE);
        }

        #[test]
        fn zero_angle_matches_computational_basis(s in arb_state(4), q in 0usize..4) {
            let q = q % s.num_qubits();
            let (p_phi, _) = s.rotated_probabilities(q, 0.0).unwrap();
            prop_assert!((p_phi - s.overlap_probability(q, UP).unwrap()).abs() < 1e-15);
            let mask = 1 << (s.num_qubits() - 1 - q);
            let p_up: f64 = s.amplitudes().iter().enumerate()
                .filter(|(i, _)| i & mask == 0).map(|(_, a)| a.norm_sqr()).sum();
            prop_assert!((p_phi - p_up).abs() < 1e-12);
        }
    }
}
