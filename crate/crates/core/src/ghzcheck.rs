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

//! Genuineness verification of shared GHZ states.
//!
//! For odd n the family of n+1 check operators — index 0 is X on every
//! qubit, index i (1 ≤ i ≤ n) puts Y on qubits i and i+1 (cyclically,
//! n+1 ≡ 1) and X elsewhere — has the minus-sign GHZ state as a joint
//! eigenstate: eigenvalue −1 for index 0 and +1 otherwise. A verification
//! round measures every qubit in the axis the sampled operator dictates
//! and checks the outcome product against that eigenvalue.
//!
//! The same family yields a local-realism inequality: over deterministic
//! ±1 assignments the expression |⟨Σ_{i≥1} O_i − O_0⟩| is bounded by
//! n − 1 (verified here by brute force), while the GHZ states reach the
//! extreme eigenvalues ±(n+1).

use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::{PauliAxis, PauliString};
use crate::simnet::transcript::{CopyId, PartyId};
use crate::simnet::StateSource;
use crate::statevec::{Outcome, StateVector};
use crate::{Scalar, StateVec64};

/// Build check operator `index` for an odd number of qubits.
pub fn check_operator(index: usize, n: usize) -> Result<PauliString> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::OddPartyCountRequired { n });
    }
    if index > n {
        return Err(Error::OperatorIndexOutOfRange { index, max: n });
    }
    if index == 0 {
        return Ok(PauliString::uniform(PauliAxis::X, n));
    }
    // slots are 1-based in the operator convention; qubit = slot − 1
    let first = index - 1;
    let second = index % n;
    let slots = (0..n)
        .map(|q| {
            if q == first || q == second {
                Some(PauliAxis::Y)
            } else {
                Some(PauliAxis::X)
            }
        })
        .collect();
    Ok(PauliString::new(slots))
}

/// Eigenvalue of operator `index` on the minus-sign GHZ state.
pub fn expected_eigenvalue(index: usize) -> Outcome {
    if index == 0 {
        Outcome::Minus
    } else {
        Outcome::Plus
    }
}

/// Measured data of a single verification round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundResult {
    pub op_index: usize,
    pub outcomes: Vec<Outcome>,
    pub product: Outcome,
    pub expected: Outcome,
    pub pass: bool,
}

/// A round plus the bookkeeping of who ran it on which copy.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub run: CopyId,
    pub verifier: PartyId,
    pub result: RoundResult,
}

/// Measure every qubit in the axis dictated by the chosen check operator
/// and compare the outcome product with the expected eigenvalue.
pub fn verify_round<R: Rng + ?Sized>(
    state: &mut StateVec64,
    op_index: usize,
    rng: &mut R,
) -> Result<RoundResult> {
    let n = state.n_qubits();
    let op = check_operator(op_index, n)?;
    let outcomes: Vec<Outcome> = (0..n)
        .map(|q| {
            let axis = op.slot(q).expect("check operators have no identity slots");
            state.measure(q, axis, rng)
        })
        .collect::<Result<_>>()?;
    let product = Outcome::product(outcomes.iter().copied());
    let expected = expected_eigenvalue(op_index);
    Ok(RoundResult {
        op_index,
        outcomes,
        product,
        expected,
        pass: product == expected,
    })
}

/// Whether the sampled rounds certify the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckVerdict {
    Genuine,
    Rejected,
}

/// Plug-in estimate of ⟨Σ_{i≥1} O_i − O_0⟩ from uniformly sampled
/// operator indices, with its standard error (absent below two samples).
#[derive(Debug, Clone, PartialEq)]
pub struct BellEstimate {
    pub value: f64,
    pub std_error: Option<f64>,
    pub samples: usize,
}

/// Aggregated verification outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct GenuinenessReport {
    pub n_qubits: usize,
    pub rounds: Vec<RoundRecord>,
    pub pass_rate: f64,
    pub verdict: CheckVerdict,
    pub bell_estimate: BellEstimate,
}

impl GenuinenessReport {
    /// Fold round records into the report; the verdict is genuine iff
    /// every round passed.
    pub fn from_rounds(n_qubits: usize, rounds: Vec<RoundRecord>) -> Result<Self> {
        if rounds.is_empty() {
            return Err(Error::NoRounds);
        }
        let passes = rounds.iter().filter(|r| r.result.pass).count();
        let pass_rate = passes as f64 / rounds.len() as f64;
        let verdict = if passes == rounds.len() {
            CheckVerdict::Genuine
        } else {
            CheckVerdict::Rejected
        };

        // Each sample is (n+1)·s·product with s = −1 for operator 0 and +1
        // otherwise, an unbiased estimator of the Bell expression under the
        // uniform operator draw.
        let scale = (n_qubits + 1) as f64;
        let samples: Vec<f64> = rounds
            .iter()
            .map(|r| {
                let sign = if r.result.op_index == 0 { -1.0 } else { 1.0 };
                scale * sign * r.result.product.value() as f64
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let std_error = if samples.len() >= 2 {
            let var = samples.iter().map(|z| (z - mean).powi(2)).sum::<f64>()
                / (samples.len() - 1) as f64;
            Some((var / samples.len() as f64).sqrt())
        } else {
            None
        };

        Ok(GenuinenessReport {
            n_qubits,
            rounds,
            pass_rate,
            verdict,
            bell_estimate: BellEstimate {
                value: mean,
                std_error,
                samples: samples.len(),
            },
        })
    }
}

/// Run `rounds` verification rounds against fresh draws from a source.
///
/// Per round the verifier identity and the operator index are sampled
/// uniformly; every party's check stream is modeled as this single
/// uniformly sampled stream.
pub fn run_verification<R: Rng + ?Sized>(
    source: &mut dyn StateSource,
    rounds: usize,
    rng: &mut R,
) -> Result<GenuinenessReport> {
    let n = source.n_qubits();
    if n < 3 || n % 2 == 0 {
        return Err(Error::OddPartyCountRequired { n });
    }
    if rounds == 0 {
        return Err(Error::NoRounds);
    }
    let mut records = Vec::with_capacity(rounds);
    for run in 0..rounds {
        let mut state = source.draw()?;
        let op_index = rng.random_range(0..=n);
        let verifier = PartyId(rng.random_range(1..=n));
        let result = verify_round(&mut state, op_index, rng)?;
        records.push(RoundRecord {
            run: CopyId(run as u32),
            verifier,
            result,
        });
    }
    GenuinenessReport::from_rounds(n, records)
}

/// Exact ⟨Σ_{i=1..n} O_i − O_0⟩ on the given state (odd n only).
pub fn bell_value_exact<T: Scalar>(state: &StateVector<T>) -> Result<T> {
    let n = state.n_qubits();
    if n < 3 || n % 2 == 0 {
        return Err(Error::OddPartyCountRequired { n });
    }
    let mut total = -state.expectation(&check_operator(0, n)?)?;
    for index in 1..=n {
        total = total + state.expectation(&check_operator(index, n)?)?;
    }
    Ok(total)
}

/// Maximum of |Σ_{i=1..n} O_i − O_0| over all deterministic local
/// assignments x_p, y_p = ±1, by full enumeration (odd n in 3..=7).
pub fn lr_bound_bruteforce(n: usize) -> Result<u32> {
    if !(3..=7).contains(&n) || n % 2 == 0 {
        return Err(Error::EnumerationOutOfRange { n });
    }
    let assignments = 1u32 << (2 * n);
    let sign = |bits: u32, pos: usize| -> i64 {
        if bits & (1 << pos) != 0 {
            -1
        } else {
            1
        }
    };
    let mut best: i64 = 0;
    for bits in 0..assignments {
        // x_p in bit p, y_p in bit n+p (p zero-based)
        let x_all: i64 = (0..n).map(|p| sign(bits, p)).product();
        let mut value = -x_all;
        for i in 1..=n {
            let first = i - 1;
            let second = i % n;
            let mut term = sign(bits, n + first) * sign(bits, n + second);
            for p in 0..n {
                if p != first && p != second {
                    term *= sign(bits, p);
                }
            }
            value += term;
        }
        best = best.max(value.abs());
    }
    Ok(best as u32)
}
