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

//! Dishonest-party and forged-source models, plus exact collusion
//! inference.
//!
//! Dishonest parties never lie about measurement bases — bases are
//! private and never announced — they only flip announced outcomes.
//! Source attacks are modeled separately through [`ForgedSource`].
//! Colluders are honest-but-curious: they pool their own decisions and
//! everything public, and [`colluder_infer`] computes the exact Bayesian
//! posterior that knowledge supports.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pauli::PauliAxis;
use crate::protocols::{dc3_bases, DecisionVector, Parity, ProtocolKind};
use crate::rng::{stream, StreamRole};
use crate::simnet::transcript::{PartyId, StepId, Transcript};
use crate::simnet::StateSource;
use crate::statevec::{GhzKind, Outcome, PhaseGate};
use crate::StateVec64;

/// What kind of forged state a dishonest source deals out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceKind {
    /// Every copy is |0…0⟩.
    AllZero,
    /// (|0…0⟩ − e^{iφ}|1…1⟩)/√2: the phase error φ is relative to the
    /// genuine state, so φ = 0 is genuine and φ = π is the orthogonal
    /// plus state.
    WrongPhase { phase: f64 },
    /// An independent Haar-uniform single-qubit state per qubit per copy.
    SeparableRandom,
}

/// Adversary model for a run.
#[derive(Debug, Clone, PartialEq)]
pub enum AdversarySpec {
    Honest,
    /// Announces the negated outcome whenever the random order makes it
    /// the last announcer of a copy.
    LastFlipper { party: PartyId },
    /// The dealer substitutes forged copies.
    ForgedSource { kind: SourceKind },
    /// Honest-but-curious subset that pools information afterwards.
    Colluders { parties: BTreeSet<PartyId> },
}

impl fmt::Display for AdversarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdversarySpec::Honest => write!(f, "honest"),
            AdversarySpec::LastFlipper { party } => write!(f, "last_flipper:{party}"),
            AdversarySpec::ForgedSource { kind } => match kind {
                SourceKind::AllZero => write!(f, "forged_source:all_zero"),
                SourceKind::WrongPhase { phase } => write!(f, "forged_source:wrong_phase:{phase}"),
                SourceKind::SeparableRandom => write!(f, "forged_source:separable_random"),
            },
            AdversarySpec::Colluders { parties } => {
                write!(f, "colluders:")?;
                for (i, p) in parties.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for AdversarySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidConfig(format!("adversary spec '{s}': {msg}"));
        if s == "honest" {
            return Ok(AdversarySpec::Honest);
        }
        if let Some(rest) = s.strip_prefix("last_flipper:") {
            let id: usize = rest.parse().map_err(|_| bad("bad party id"))?;
            if id == 0 {
                return Err(bad("party ids start at 1"));
            }
            return Ok(AdversarySpec::LastFlipper { party: PartyId(id) });
        }
        if let Some(rest) = s.strip_prefix("forged_source:") {
            let kind = if rest == "all_zero" {
                SourceKind::AllZero
            } else if rest == "separable_random" {
                SourceKind::SeparableRandom
            } else if let Some(phase) = rest.strip_prefix("wrong_phase:") {
                SourceKind::WrongPhase {
                    phase: phase.parse().map_err(|_| bad("bad phase"))?,
                }
            } else {
                return Err(bad("unknown source kind"));
            };
            return Ok(AdversarySpec::ForgedSource { kind });
        }
        if let Some(rest) = s.strip_prefix("colluders:") {
            let mut parties = BTreeSet::new();
            for part in rest.split(',').filter(|p| !p.is_empty()) {
                let id: usize = part.trim().parse().map_err(|_| bad("bad party id"))?;
                if id == 0 {
                    return Err(bad("party ids start at 1"));
                }
                parties.insert(PartyId(id));
            }
            return Ok(AdversarySpec::Colluders { parties });
        }
        Err(bad("unknown adversary kind"))
    }
}

impl Serialize for AdversarySpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AdversarySpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(|e| D::Error::custom(format!("{e}")))
    }
}

/// Announcement policy of one party.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    Honest,
    LastFlipper,
}

impl Policy {
    /// Map the measured value to the announced one, given announcements
    /// heard so far and the position in the announcement order.
    pub fn announce(
        &self,
        measured: Outcome,
        _heard: &[Outcome],
        position: usize,
        total: usize,
    ) -> Outcome {
        match self {
            Policy::Honest => measured,
            Policy::LastFlipper => {
                if position + 1 == total {
                    measured.flipped()
                } else {
                    measured
                }
            }
        }
    }
}

/// Per-party policy table implied by an adversary spec.
pub fn policies_for(spec: &AdversarySpec, n_parties: usize) -> Result<Vec<Policy>> {
    let mut policies = vec![Policy::Honest; n_parties];
    match spec {
        AdversarySpec::Honest | AdversarySpec::ForgedSource { .. } => {}
        AdversarySpec::LastFlipper { party } => {
            if party.0 == 0 || party.0 > n_parties {
                return Err(Error::InvalidParty(format!(
                    "{party} (group size {n_parties})"
                )));
            }
            policies[party.index()] = Policy::LastFlipper;
        }
        AdversarySpec::Colluders { parties } => {
            // colluders follow the protocol; a colluding set covering
            // everyone has nothing left to infer about
            if parties.len() >= n_parties {
                return Err(Error::InvalidConfig(
                    "colluder set must be a strict subset of the parties".into(),
                ));
            }
            for party in parties {
                if party.0 == 0 || party.0 > n_parties {
                    return Err(Error::InvalidParty(format!(
                        "{party} (group size {n_parties})"
                    )));
                }
            }
        }
    }
    Ok(policies)
}

/// A dealer that substitutes forged copies for GHZ states.
#[derive(Debug, Clone)]
pub struct ForgedSource {
    kind: SourceKind,
    n: usize,
    rng: ChaCha8Rng,
}

impl ForgedSource {
    pub fn new(kind: SourceKind, n: usize, master_seed: u64) -> Self {
        Self {
            kind,
            n,
            rng: stream(master_seed, StreamRole::Source, 0),
        }
    }
}

impl StateSource for ForgedSource {
    fn n_qubits(&self) -> usize {
        self.n
    }

    fn draw(&mut self) -> Result<StateVec64> {
        match self.kind {
            SourceKind::AllZero => StateVec64::zero_state(self.n),
            SourceKind::WrongPhase { phase } => {
                let dim = 1usize << self.n;
                let mut amps = vec![Complex::new(0.0, 0.0); dim];
                let half = std::f64::consts::FRAC_1_SQRT_2;
                amps[0] = Complex::new(half, 0.0);
                amps[dim - 1] = -Complex::from_polar(half, phase);
                StateVec64::from_amplitudes(amps)
            }
            SourceKind::SeparableRandom => {
                let singles: Vec<[Complex<f64>; 2]> = (0..self.n)
                    .map(|_| {
                        let u: f64 = self.rng.random_range(-1.0..=1.0);
                        let azimuth: f64 =
                            self.rng.random_range(0.0..(2.0 * std::f64::consts::PI));
                        let a0 = ((1.0 + u) / 2.0).sqrt();
                        let a1 = ((1.0 - u) / 2.0).sqrt();
                        [
                            Complex::new(a0, 0.0),
                            Complex::from_polar(a1, azimuth),
                        ]
                    })
                    .collect();
                let dim = 1usize << self.n;
                let amps = (0..dim)
                    .map(|b| {
                        (0..self.n).fold(Complex::new(1.0, 0.0), |acc, q| {
                            let bit = (b >> (self.n - 1 - q)) & 1;
                            acc * singles[q][bit]
                        })
                    })
                    .collect();
                StateVec64::from_amplitudes(amps)
            }
        }
    }
}

/// One candidate assignment of decisions to the non-colluders, with its
/// posterior weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    /// Aligned with [`Posterior::parties`].
    pub assignment: Vec<bool>,
    pub weight: f64,
}

/// Exact posterior over non-colluder decisions given a transcript.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    /// Non-colluding parties, ascending.
    pub parties: Vec<PartyId>,
    /// All 2^k assignments; weights sum to 1.
    pub hypotheses: Vec<Hypothesis>,
}

impl Posterior {
    pub fn weight_of(&self, assignment: &[bool]) -> Option<f64> {
        self.hypotheses
            .iter()
            .find(|h| h.assignment == assignment)
            .map(|h| h.weight)
    }

    /// Hypotheses with weight above the threshold.
    pub fn support(&self, threshold: f64) -> Vec<&Hypothesis> {
        self.hypotheses
            .iter()
            .filter(|h| h.weight > threshold)
            .collect()
    }
}

const HYPOTHESIS_LIMIT_BITS: usize = 16;

/// Exact Bayesian posterior over the decisions of the non-colluders.
///
/// The colluders know their own decisions (read from their private
/// transcript records) plus all public announcements. Every assignment of
/// decisions to the remaining parties is scored by the Born probability
/// of the announced outcome tuples it implies, and the weights are
/// normalized. The announcement ordering is decision-independent and
/// cancels.
pub fn colluder_infer(
    colluders: &BTreeSet<PartyId>,
    transcript: &Transcript,
    protocol: ProtocolKind,
) -> Result<Posterior> {
    if matches!(protocol, ProtocolKind::AvEven) {
        return Err(Error::InvalidConfig(
            "inference over even-adapter transcripts is not supported".into(),
        ));
    }
    if transcript.abort_info().is_some() {
        return Err(Error::InvalidConfig(
            "cannot infer from an aborted transcript".into(),
        ));
    }

    // public announcements per protocol step, in selection order
    let mut steps: Vec<(StepId, Vec<&std::collections::BTreeMap<PartyId, Outcome>>)> = Vec::new();
    let announcements = transcript.announcements();
    for ((step, _copy), group) in &announcements {
        if step.0 == 0 {
            continue;
        }
        match steps.last_mut() {
            Some((s, groups)) if *s == *step => groups.push(group),
            _ => steps.push((*step, vec![group])),
        }
    }
    if steps.is_empty() {
        return Err(Error::InvalidConfig(
            "transcript contains no protocol steps".into(),
        ));
    }

    let parties: BTreeSet<PartyId> = steps
        .iter()
        .flat_map(|(_, groups)| groups.iter().flat_map(|g| g.keys().copied()))
        .collect();
    let n = parties.len();
    if parties.iter().map(|p| p.0).ne(1..=n) {
        return Err(Error::InvalidConfig(
            "announcements do not cover parties 1..=n".into(),
        ));
    }
    for colluder in colluders {
        if !parties.contains(colluder) {
            return Err(Error::InvalidParty(format!("{colluder} not in transcript")));
        }
    }
    if colluders.len() >= n {
        return Err(Error::InvalidConfig(
            "colluder set must be a strict subset of the parties".into(),
        ));
    }

    let colluder_list: Vec<PartyId> = colluders.iter().copied().collect();
    let known = transcript.decisions_visible_to(&colluder_list);
    for colluder in colluders {
        if !known.contains_key(colluder) {
            return Err(Error::InvalidConfig(format!(
                "transcript lacks the private decision record of {colluder}"
            )));
        }
    }
    for party in known.keys() {
        if party.0 == 0 || party.0 > n {
            return Err(Error::InvalidParty(format!("{party} in a decision record")));
        }
    }

    let free: Vec<PartyId> = (1..=n)
        .map(PartyId)
        .filter(|p| !colluders.contains(p))
        .collect();
    if free.len() > HYPOTHESIS_LIMIT_BITS {
        return Err(Error::HypothesisSpaceTooLarge {
            free_parties: free.len(),
            limit: 1 << HYPOTHESIS_LIMIT_BITS,
        });
    }

    // observed parity fixes the subcase-step bases in the three-party
    // protocol
    let step1_parity = {
        let (_, groups) = &steps[0];
        let product = Outcome::product(groups[0].values().copied());
        Parity::from_label(GhzKind::from_x_parity(product))
    };

    let mut hypotheses = Vec::with_capacity(1 << free.len());
    let mut total = 0.0f64;
    for bits in 0..(1usize << free.len()) {
        let assignment: Vec<bool> = (0..free.len()).map(|i| bits & (1 << i) != 0).collect();
        let mut flags = vec![false; n];
        for (party, active) in &known {
            flags[party.index()] = *active;
        }
        for (i, party) in free.iter().enumerate() {
            flags[party.index()] = assignment[i];
        }
        let decisions = DecisionVector::new(flags);

        let mut likelihood = 1.0f64;
        for (step, groups) in &steps {
            let state = hypothetical_state(protocol, *step, &decisions)?;
            let bases = hypothetical_bases(protocol, *step, step1_parity, &decisions);
            let dist = state.measurement_distribution(&bases)?;
            for group in groups {
                let mut index = 0usize;
                for (party, outcome) in group.iter() {
                    if *outcome == Outcome::Minus {
                        index |= 1 << (n - party.0);
                    }
                }
                likelihood *= dist[index];
            }
            if likelihood == 0.0 {
                break;
            }
        }
        total += likelihood;
        hypotheses.push(Hypothesis {
            assignment,
            weight: likelihood,
        });
    }

    if total <= 0.0 {
        return Err(Error::NoConsistentHypothesis);
    }
    for h in &mut hypotheses {
        h.weight /= total;
    }
    Ok(Posterior {
        parties: free,
        hypotheses,
    })
}

/// State of a step's copies under a hypothetical decision vector: the
/// encoded GHZ copy, plus the round gate for veto rounds ≥ 1.
fn hypothetical_state(
    protocol: ProtocolKind,
    step: StepId,
    decisions: &DecisionVector,
) -> Result<StateVec64> {
    let n = decisions.n();
    let mut state = StateVec64::ghz(n, GhzKind::Minus)?;
    for party in decisions.active_parties() {
        state.apply_phase(party.index(), PhaseGate::pauli_z())?;
    }
    if matches!(protocol, ProtocolKind::Av) && step.0 >= 2 {
        let gate = PhaseGate::new(step.0 - 1);
        for party in decisions.active_parties() {
            state.apply_phase(party.index(), gate)?;
        }
    }
    Ok(state)
}

fn hypothetical_bases(
    protocol: ProtocolKind,
    step: StepId,
    step1_parity: Parity,
    decisions: &DecisionVector,
) -> Vec<PauliAxis> {
    match protocol {
        ProtocolKind::Dc3 if step.0 == 2 => dc3_bases(step1_parity, decisions),
        _ => vec![PauliAxis::X; decisions.n()],
    }
}
