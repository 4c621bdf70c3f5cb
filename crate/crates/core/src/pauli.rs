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

//! Pauli axes and tensor-product Pauli words.

use std::fmt;

use num_complex::Complex;

use crate::Scalar;

/// One of the three measurement axes / non-identity Pauli operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PauliAxis::X => write!(f, "X"),
            PauliAxis::Y => write!(f, "Y"),
            PauliAxis::Z => write!(f, "Z"),
        }
    }
}

/// An n-slot word over {I, X, Y, Z}; `None` is the identity slot.
///
/// Every such word is Hermitian with eigenvalues ±1 in each non-identity
/// factor, so expectation values of a `PauliString` are real.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString {
    slots: Vec<Option<PauliAxis>>,
}

impl PauliString {
    /// Word from explicit slots, identity where `None`.
    pub fn new(slots: Vec<Option<PauliAxis>>) -> Self {
        Self { slots }
    }

    /// The same axis in all `n` slots.
    pub fn uniform(axis: PauliAxis, n: usize) -> Self {
        Self {
            slots: vec![Some(axis); n],
        }
    }

    /// The all-identity word on `n` slots.
    pub fn identity(n: usize) -> Self {
        Self {
            slots: vec![None; n],
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slots(&self) -> &[Option<PauliAxis>] {
        &self.slots
    }

    pub fn slot(&self, qubit: usize) -> Option<PauliAxis> {
        self.slots[qubit]
    }

    /// Action on a computational basis state.
    ///
    /// Basis indices place qubit 0 in the most significant bit. Applying
    /// the word to |b⟩ yields `phase`·|b'⟩; this returns `(b', phase)`.
    /// X flips the bit; Y flips it with phase i·(−1)^bit; Z keeps it with
    /// phase (−1)^bit.
    pub(crate) fn action_on_basis<T: Scalar>(&self, basis: usize) -> (usize, Complex<T>) {
        let n = self.slots.len();
        let mut target = basis;
        let mut phase = Complex::new(T::one(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        for (qubit, slot) in self.slots.iter().enumerate() {
            let mask = 1usize << (n - 1 - qubit);
            let bit_set = basis & mask != 0;
            match slot {
                None => {}
                Some(PauliAxis::X) => target ^= mask,
                Some(PauliAxis::Y) => {
                    target ^= mask;
                    phase = if bit_set { phase * (-i) } else { phase * i };
                }
                Some(PauliAxis::Z) => {
                    if bit_set {
                        phase = -phase;
                    }
                }
            }
        }
        (target, phase)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, slot) in self.slots.iter().enumerate() {
            if k > 0 {
                write!(f, "⊗")?;
            }
            match slot {
                None => write!(f, "I")?,
                Some(axis) => write!(f, "{axis}")?,
            }
        }
        Ok(())
    }
}
