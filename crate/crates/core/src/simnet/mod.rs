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

//! Deterministic simulated broadcast environment.
//!
//! [`SimNet`] owns the copy registry, the transcript, and the seeded
//! random streams: the orchestrator stream drives run selection and
//! announcement ordering, the measurement stream drives Born sampling.
//! Announcement ordering is chosen by the orchestrator; a distributed
//! fair-ordering protocol is out of scope.

pub mod transcript;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{AdversarySpec, Policy};
use crate::error::{Error, Result};
use crate::ghzcheck::{
    check_operator, expected_eigenvalue, GenuinenessReport, RoundRecord, RoundResult,
};
use crate::pauli::PauliAxis;
use crate::rng::{stream, StreamRole};
use crate::statevec::{GhzKind, Outcome, PhaseGate};
use crate::StateVec64;
use transcript::{CopyId, PartyId, StepId, Transcript, VERIFICATION_STEP};

/// Supplier of fresh state copies.
pub trait StateSource {
    fn n_qubits(&self) -> usize;
    fn draw(&mut self) -> Result<StateVec64>;
}

/// Produces true minus-sign GHZ copies.
#[derive(Debug, Clone)]
pub struct GenuineSource {
    n: usize,
}

impl GenuineSource {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl StateSource for GenuineSource {
    fn n_qubits(&self) -> usize {
        self.n
    }

    fn draw(&mut self) -> Result<StateVec64> {
        StateVec64::ghz(self.n, GhzKind::Minus)
    }
}

/// Caps another source at a fixed number of draws.
#[derive(Debug, Clone)]
pub struct FiniteSource<S> {
    inner: S,
    remaining: usize,
}

impl<S: StateSource> FiniteSource<S> {
    pub fn new(inner: S, limit: usize) -> Self {
        Self {
            inner,
            remaining: limit,
        }
    }
}

impl<S: StateSource> StateSource for FiniteSource<S> {
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    fn draw(&mut self) -> Result<StateVec64> {
        if self.remaining == 0 {
            return Err(Error::SourceExhausted);
        }
        self.remaining -= 1;
        self.inner.draw()
    }
}

/// Run parameters shared by all protocol entry points.
///
/// `total_copies` defaults to the exact number the protocol consumes
/// (verification rounds plus steps × runs_per_step).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct ProtocolConfig {
    pub n: usize,
    pub runs_per_step: usize,
    pub verification_rounds: usize,
    pub total_copies: Option<usize>,
    pub seed: u64,
    pub adversary: AdversarySpec,
    pub s3_enabled: bool,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            n: 3,
            runs_per_step: 2,
            verification_rounds: 0,
            total_copies: None,
            seed: 0,
            adversary: AdversarySpec::Honest,
            s3_enabled: true,
        }
    }
}

impl ProtocolConfig {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Copies a run needs for `steps` protocol steps.
    pub fn required_copies(&self, steps: usize) -> usize {
        self.verification_rounds + steps * self.runs_per_step
    }

    /// Copies actually dealt out for `steps` protocol steps.
    pub fn copies_for(&self, steps: usize) -> usize {
        self.total_copies
            .unwrap_or_else(|| self.required_copies(steps))
    }

    pub fn validate(&self, steps: usize) -> Result<()> {
        if self.runs_per_step == 0 {
            return Err(Error::InvalidConfig("runs_per_step must be ≥ 1".into()));
        }
        let needed = self.required_copies(steps);
        let dealt = self.copies_for(steps);
        if dealt < needed {
            return Err(Error::InvalidConfig(format!(
                "total_copies {dealt} below the {needed} the run consumes"
            )));
        }
        Ok(())
    }
}

/// One qubit of one shared copy, as held by a party.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitHandle {
    pub copy: CopyId,
    pub qubit: usize,
}

#[derive(Debug, Clone)]
struct CopyEntry {
    state: StateVec64,
    consumed: bool,
}

/// The broadcast environment for one protocol run.
#[derive(Debug)]
pub struct SimNet {
    n_parties: usize,
    n_qubits: usize,
    party_qubits: Vec<Vec<usize>>,
    registry: Vec<CopyEntry>,
    transcript: Transcript,
    orchestrator: ChaCha8Rng,
    measurement: ChaCha8Rng,
}

impl SimNet {
    /// Deal `total_copies` copies from the source; each party holds the
    /// qubits listed in its `party_qubits` entry (one for most parties,
    /// two for party 1 in the even-group adapter).
    pub fn distribute(
        party_qubits: Vec<Vec<usize>>,
        total_copies: usize,
        source: &mut dyn StateSource,
        master_seed: u64,
    ) -> Result<Self> {
        let n_parties = party_qubits.len();
        let n_qubits = source.n_qubits();
        if total_copies == 0 {
            return Err(Error::InvalidConfig("at least one copy required".into()));
        }
        let mut seen = vec![false; n_qubits];
        for qubits in &party_qubits {
            for &q in qubits {
                if q >= n_qubits || seen[q] {
                    return Err(Error::InvalidConfig(format!(
                        "qubit {q} not assigned to exactly one party"
                    )));
                }
                seen[q] = true;
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::InvalidConfig("unassigned qubit in seating".into()));
        }

        let mut transcript = Transcript::new();
        let mut registry = Vec::with_capacity(total_copies);
        for copy in 0..total_copies {
            let state = source.draw()?;
            transcript.share(CopyId(copy as u32));
            registry.push(CopyEntry {
                state,
                consumed: false,
            });
        }
        Ok(Self {
            n_parties,
            n_qubits,
            party_qubits,
            registry,
            transcript,
            orchestrator: stream(master_seed, StreamRole::Orchestrator, 0),
            measurement: stream(master_seed, StreamRole::Measurement, 0),
        })
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn transcript_mut(&mut self) -> &mut Transcript {
        &mut self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }

    /// All qubit handles a party holds, across every dealt copy.
    pub fn handles(&self, party: PartyId) -> Vec<QubitHandle> {
        let qubits = &self.party_qubits[party.index()];
        (0..self.registry.len())
            .flat_map(|c| {
                qubits.iter().map(move |&q| QubitHandle {
                    copy: CopyId(c as u32),
                    qubit: q,
                })
            })
            .collect()
    }

    pub fn free_copies(&self) -> usize {
        self.registry.iter().filter(|c| !c.consumed).count()
    }

    /// Uniformly sample `count` unconsumed copies without replacement and
    /// mark them consumed. Appends one select record per copy; shortage
    /// aborts the run.
    pub fn select_runs(&mut self, step: StepId, count: usize) -> Result<Vec<CopyId>> {
        let mut free: Vec<u32> = self
            .registry
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.consumed)
            .map(|(i, _)| i as u32)
            .collect();
        if free.len() < count {
            self.transcript.abort(step, "insufficient copies");
            return Err(Error::InsufficientCopies {
                requested: count,
                available: free.len(),
            });
        }
        let (chosen, _) = free.partial_shuffle(&mut self.orchestrator, count);
        let ids: Vec<CopyId> = chosen.iter().map(|&i| CopyId(i)).collect();
        for id in &ids {
            self.registry[id.0 as usize].consumed = true;
            self.transcript.select(step, *id);
        }
        Ok(ids)
    }

    /// Apply a phase gate to the given qubits of every unconsumed copy
    /// (the up-front decision encoding).
    pub fn apply_phase_all(&mut self, active_qubits: &[bool], gate: PhaseGate) -> Result<()> {
        for entry in self.registry.iter_mut().filter(|c| !c.consumed) {
            for (q, active) in active_qubits.iter().enumerate() {
                if *active {
                    entry.state.apply_phase(q, gate)?;
                }
            }
        }
        Ok(())
    }

    /// Apply a phase gate to the given qubits of specific copies (the
    /// per-round refinement gates).
    pub fn apply_phase_to(
        &mut self,
        ids: &[CopyId],
        active_qubits: &[bool],
        gate: PhaseGate,
    ) -> Result<()> {
        for id in ids {
            let entry = &mut self.registry[id.0 as usize];
            for (q, active) in active_qubits.iter().enumerate() {
                if *active {
                    entry.state.apply_phase(q, gate)?;
                }
            }
        }
        Ok(())
    }

    /// Measure every qubit of a copy along per-qubit axes, collapsing it.
    pub fn measure_copy(&mut self, copy: CopyId, bases: &[PauliAxis]) -> Result<Vec<Outcome>> {
        let entry = &mut self.registry[copy.0 as usize];
        (0..bases.len())
            .map(|q| entry.state.measure(q, bases[q], &mut self.measurement))
            .collect()
    }

    /// Collapse per-qubit outcomes to one announced value per party (the
    /// product over the qubits that party holds).
    pub fn party_values(&self, qubit_outcomes: &[Outcome]) -> Vec<(PartyId, Outcome)> {
        self.party_qubits
            .iter()
            .enumerate()
            .map(|(index, qubits)| {
                let value = Outcome::product(qubits.iter().map(|&q| qubit_outcomes[q]));
                (PartyId::from_index(index), value)
            })
            .collect()
    }

    /// Run one announcement round: a uniformly random permutation fixes
    /// the order, then each party's policy maps its measured value and
    /// what it has heard so far to the announced value.
    pub fn broadcast(
        &mut self,
        step: StepId,
        copy: CopyId,
        values: &[(PartyId, Outcome)],
        policies: &[Policy],
    ) -> Vec<(PartyId, Outcome)> {
        debug_assert_eq!(values.len(), self.n_parties);
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.shuffle(&mut self.orchestrator);
        let total = values.len();
        let mut heard: Vec<Outcome> = Vec::with_capacity(total);
        let mut announced: Vec<Option<Outcome>> = vec![None; total];
        for (position, &slot) in order.iter().enumerate() {
            let (party, measured) = values[slot];
            let said = policies[party.index()].announce(measured, &heard, position, total);
            self.transcript.announce(step, copy, position, party, said);
            heard.push(said);
            announced[slot] = Some(said);
        }
        values
            .iter()
            .zip(announced)
            .map(|(&(party, _), said)| (party, said.expect("every slot announced")))
            .collect()
    }

    /// Sampled genuineness check over `rounds` fresh copies (step 0).
    /// Verification announcements are honest; the adversary models target
    /// the protocol steps.
    pub fn verify(&mut self, rounds: usize) -> Result<GenuinenessReport> {
        if rounds == 0 {
            return Err(Error::NoRounds);
        }
        let honest = vec![Policy::Honest; self.n_parties];
        let mut records = Vec::with_capacity(rounds);
        for _ in 0..rounds {
            let copy = self.select_runs(VERIFICATION_STEP, 1)?[0];
            let op_index = self.orchestrator.random_range(0..=self.n_qubits);
            let verifier = PartyId(self.orchestrator.random_range(1..=self.n_parties));
            let op = check_operator(op_index, self.n_qubits)?;
            let bases: Vec<PauliAxis> = (0..self.n_qubits)
                .map(|q| op.slot(q).expect("no identity slots"))
                .collect();
            let outcomes = self.measure_copy(copy, &bases)?;
            let values = self.party_values(&outcomes);
            let announced = self.broadcast(VERIFICATION_STEP, copy, &values, &honest);
            let product = Outcome::product(announced.iter().map(|&(_, o)| o));
            let expected = expected_eigenvalue(op_index);
            let pass = product == expected;
            self.transcript
                .verify(copy, verifier, op_index, product, expected, pass);
            records.push(RoundRecord {
                run: copy,
                verifier,
                result: RoundResult {
                    op_index,
                    outcomes,
                    product,
                    expected,
                    pass,
                },
            });
        }
        GenuinenessReport::from_rounds(self.n_qubits, records)
    }
}

/// Product agreement across the repeated copies of one step; `None`
/// signals the inconsistency that forces an abort.
pub fn consistent_product(products: &[Outcome]) -> Option<Outcome> {
    let first = *products.first()?;
    products.iter().all(|&p| p == first).then_some(first)
}
