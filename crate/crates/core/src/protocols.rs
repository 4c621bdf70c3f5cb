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

//! Protocol state machines.
//!
//! All four entry points follow the same skeleton: deal copies, optionally
//! verify a sample of them, log decisions privately, encode decisions as
//! sign flips on every remaining copy, then consume `runs_per_step` copies
//! per step. A step measures each copy, broadcasts per-party values in a
//! random order, and requires the announced products of the repeated
//! copies to agree — disagreement aborts the run (the harness decides
//! whether to restart with fresh copies).
//!
//! * [`run_dc3`] — three-party dining cryptographers with the subcase step
//!   that detects multiple payments (can be disabled in the config).
//! * [`run_dcn`] — n-party generalization (odd n), parity step only; it
//!   assumes at most one payment and silently misclassifies even payment
//!   counts as "nobody paid".
//! * [`run_av`] — anonymous veto for odd n: round 0 reads the sign of the
//!   encoded state; round k ≥ 1 applies the level-k phase gate to a fresh
//!   copy batch so a flipped label certifies t ≡ 2^k (mod 2^{k+1}) vetoes.
//!   The run stops at the first flipped round.
//! * [`run_av_even`] — even groups vote over (n+1)-qubit copies; party 1
//!   holds two qubits and drives the extra one as a permanent "in favor".
//!
//! The verdict is a deterministic function of the public announcements,
//! so every party computes it identically ([`reconstruct_verdict`]).

use std::fmt;

use crate::adversary::{policies_for, AdversarySpec, ForgedSource, Policy};
use crate::error::{Error, Result};
use crate::ghzcheck::{CheckVerdict, GenuinenessReport};
use crate::pauli::PauliAxis;
use crate::simnet::transcript::{PartyId, StepId, Transcript};
use crate::simnet::{consistent_product, GenuineSource, ProtocolConfig, SimNet, StateSource};
use crate::statevec::{GhzKind, Outcome, PhaseGate};

/// Which protocol a transcript or inference run refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    Dc3,
    Dcn,
    Av,
    AvEven,
}

impl ProtocolKind {
    /// Number of protocol steps a run executes when it completes.
    pub fn steps(self, cfg: &ProtocolConfig) -> usize {
        match self {
            ProtocolKind::Dc3 => {
                if cfg.s3_enabled {
                    2
                } else {
                    1
                }
            }
            ProtocolKind::Dcn => 1,
            ProtocolKind::Av => av_rounds(cfg.n),
            ProtocolKind::AvEven => av_rounds(cfg.n + 1),
        }
    }

    fn n_qubits(self, n_parties: usize) -> usize {
        match self {
            ProtocolKind::AvEven => n_parties + 1,
            _ => n_parties,
        }
    }
}

/// Veto rounds needed for an n-qubit group: ⌈log2(n+1)⌉, so that after
/// every unflipped round the only count ≡ 0 (mod 2^rounds) with t ≤ n is
/// t = 0.
pub fn av_rounds(n_qubits: usize) -> usize {
    (n_qubits + 1).next_power_of_two().trailing_zeros() as usize
}

/// Per-party binary choices (pay / veto = active).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionVector {
    flags: Vec<bool>,
}

impl DecisionVector {
    pub fn new(flags: Vec<bool>) -> Self {
        Self { flags }
    }

    /// Everybody inactive.
    pub fn none(n: usize) -> Self {
        Self {
            flags: vec![false; n],
        }
    }

    pub fn from_active_parties(n: usize, active: &[PartyId]) -> Result<Self> {
        let mut flags = vec![false; n];
        for party in active {
            if party.0 == 0 || party.0 > n {
                return Err(Error::InvalidParty(format!("{party} (group size {n})")));
            }
            if flags[party.index()] {
                return Err(Error::InvalidParty(format!("{party} listed twice")));
            }
            flags[party.index()] = true;
        }
        Ok(Self { flags })
    }

    /// Party `i+1` active iff bit `i` of `mask` is set; for exhaustive
    /// sweeps.
    pub fn from_bitmask(n: usize, mask: usize) -> Self {
        Self {
            flags: (0..n).map(|i| mask & (1 << i) != 0).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.flags.len()
    }

    /// The count of active parties, the protocols' t.
    pub fn active_count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn is_active(&self, party: PartyId) -> bool {
        self.flags[party.index()]
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn active_parties(&self) -> Vec<PartyId> {
        self.flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| PartyId::from_index(i))
            .collect()
    }
}

/// Parity of the active-party count as read from a discrimination step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// The minus-branch label means the state kept its sign: even count.
    pub fn from_label(label: GhzKind) -> Self {
        match label {
            GhzKind::Minus => Parity::Even,
            GhzKind::Plus => Parity::Odd,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// Three-party subcases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcSubcase {
    ZeroPay,
    DoublePay,
    SinglePay,
    TriplePay,
}

impl DcSubcase {
    pub fn code(self) -> &'static str {
        match self {
            DcSubcase::ZeroPay => "zero_pay",
            DcSubcase::DoublePay => "double_pay",
            DcSubcase::SinglePay => "single_pay",
            DcSubcase::TriplePay => "triple_pay",
        }
    }
}

/// Who ends up paying (or not).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Settlement {
    NsaPays,
    PaymentAccepted,
    PaymentCancelled,
}

/// Outcome of a three-party dining-cryptographers run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DcOutcome {
    pub parity: Parity,
    pub subcase: DcSubcase,
    pub settlement: Settlement,
}

impl DcOutcome {
    pub fn from_subcase(subcase: DcSubcase) -> Self {
        let (parity, settlement) = match subcase {
            DcSubcase::ZeroPay => (Parity::Even, Settlement::NsaPays),
            DcSubcase::DoublePay => (Parity::Even, Settlement::PaymentCancelled),
            DcSubcase::SinglePay => (Parity::Odd, Settlement::PaymentAccepted),
            DcSubcase::TriplePay => (Parity::Odd, Settlement::PaymentCancelled),
        };
        Self {
            parity,
            subcase,
            settlement,
        }
    }
}

/// Outcome of an n-party parity-only run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DcnOutcome {
    pub parity: Parity,
    pub settlement: Settlement,
}

impl DcnOutcome {
    pub fn from_parity(parity: Parity) -> Self {
        let settlement = match parity {
            Parity::Even => Settlement::NsaPays,
            Parity::Odd => Settlement::PaymentAccepted,
        };
        Self { parity, settlement }
    }
}

/// Outcome of a veto run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AvOutcome {
    pub result: AvResult,
    pub rounds_run: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AvResult {
    UnanimityInFavor,
    VetoDetected { round: usize },
}

impl AvOutcome {
    /// The certified congruence `t ≡ r (mod m)` when a veto was detected
    /// at round k: r = 2^k, m = 2^{k+1}.
    pub fn residue(&self) -> Option<(u64, u64)> {
        match self.result {
            AvResult::VetoDetected { round } => Some((1 << round, 1 << (round + 1))),
            AvResult::UnanimityInFavor => None,
        }
    }
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum RunVerdict<T> {
    Completed(T),
    /// Announced products disagreed across a step's repeated copies (or a
    /// step ran out of copies); the transcript keeps the full log.
    Aborted { step: StepId, reason: String },
    /// The verification sample failed the genuineness check.
    SourceRejected,
}

impl<T> RunVerdict<T> {
    pub fn completed(&self) -> Option<&T> {
        match self {
            RunVerdict::Completed(outcome) => Some(outcome),
            _ => None,
        }
    }
}

/// A finished (or stopped) run: verdict, full transcript, and the
/// verification report when verification rounds were configured.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRun<T> {
    pub verdict: RunVerdict<T>,
    pub transcript: Transcript,
    pub report: Option<GenuinenessReport>,
}

/// Verdict text plus its stable transcript code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub code: String,
    pub message: String,
}

/// Any completed outcome, for settlement.
#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolOutcome {
    Dc3(DcOutcome),
    Dcn(DcnOutcome),
    Av(AvOutcome),
}

/// Deterministic mapping from outcomes to verdict strings.
pub fn settle(outcome: &ProtocolOutcome) -> Verdict {
    match outcome {
        ProtocolOutcome::Dc3(dc) => {
            let message = match dc.subcase {
                DcSubcase::ZeroPay => "NSA pays".to_string(),
                DcSubcase::SinglePay => "payment accepted".to_string(),
                DcSubcase::DoublePay => "payment cancelled (double pay)".to_string(),
                DcSubcase::TriplePay => "payment cancelled (triple pay)".to_string(),
            };
            Verdict {
                code: dc.subcase.code().to_string(),
                message,
            }
        }
        ProtocolOutcome::Dcn(dcn) => match dcn.parity {
            Parity::Even => Verdict {
                code: "parity_even".to_string(),
                message: "NSA pays".to_string(),
            },
            Parity::Odd => Verdict {
                code: "parity_odd".to_string(),
                message: "payment accepted".to_string(),
            },
        },
        ProtocolOutcome::Av(av) => match av.result {
            AvResult::UnanimityInFavor => Verdict {
                code: "in_favor".to_string(),
                message: "decision carried unanimously".to_string(),
            },
            AvResult::VetoDetected { round } => {
                let (residue, modulus) = (1u64 << round, 1u64 << (round + 1));
                Verdict {
                    code: format!("veto_round_{round}"),
                    message: format!("vetoed; count ≡ {residue} (mod {modulus})"),
                }
            }
        },
    }
}

/// Basis each of the three parties measures in the subcase step, given
/// the public parity: payers take the conjugate axis of non-payers, and
/// the roles swap between the even and odd branches.
pub(crate) fn dc3_bases(parity: Parity, decisions: &DecisionVector) -> Vec<PauliAxis> {
    decisions
        .flags()
        .iter()
        .map(|&active| match (parity, active) {
            (Parity::Even, true) => PauliAxis::Y,
            (Parity::Even, false) => PauliAxis::X,
            (Parity::Odd, true) => PauliAxis::X,
            (Parity::Odd, false) => PauliAxis::Y,
        })
        .collect()
}

struct Engine {
    net: SimNet,
    policies: Vec<Policy>,
    qubit_active: Vec<bool>,
    runs_per_step: usize,
    report: Option<GenuinenessReport>,
}

enum Setup {
    Ready(Engine),
    Rejected {
        transcript: Transcript,
        report: GenuinenessReport,
    },
}

fn setup(kind: ProtocolKind, decisions: &DecisionVector, cfg: &ProtocolConfig) -> Result<Setup> {
    match kind {
        ProtocolKind::Dc3 => {
            if cfg.n != 3 {
                return Err(Error::InvalidConfig(format!(
                    "the three-party protocol needs n = 3, got {}",
                    cfg.n
                )));
            }
        }
        ProtocolKind::Dcn | ProtocolKind::Av => {
            if cfg.n < 3 || cfg.n % 2 == 0 {
                return Err(Error::OddPartyCountRequired { n: cfg.n });
            }
        }
        ProtocolKind::AvEven => {
            if cfg.n < 4 || cfg.n % 2 != 0 {
                return Err(Error::EvenPartyCountRequired { n: cfg.n });
            }
        }
    }
    if decisions.n() != cfg.n {
        return Err(Error::InvalidConfig(format!(
            "decision vector covers {} parties, config says {}",
            decisions.n(),
            cfg.n
        )));
    }
    let steps = kind.steps(cfg);
    cfg.validate(steps)?;

    let n_qubits = kind.n_qubits(cfg.n);
    let (seating, qubit_active): (Vec<Vec<usize>>, Vec<bool>) = match kind {
        ProtocolKind::AvEven => {
            // party 1 holds qubits 0 (its decision) and 1 (always in
            // favor); party j ≥ 2 holds qubit j
            let mut seating = vec![vec![0usize, 1]];
            seating.extend((2..=cfg.n).map(|q| vec![q]));
            let mut active = vec![decisions.is_active(PartyId(1)), false];
            active.extend((2..=cfg.n).map(|p| decisions.is_active(PartyId(p))));
            (seating, active)
        }
        _ => (
            (0..cfg.n).map(|q| vec![q]).collect(),
            decisions.flags().to_vec(),
        ),
    };

    let mut source: Box<dyn StateSource> = match &cfg.adversary {
        AdversarySpec::ForgedSource { kind: source_kind } => {
            Box::new(ForgedSource::new(*source_kind, n_qubits, cfg.seed))
        }
        _ => Box::new(GenuineSource::new(n_qubits)),
    };
    let mut net = SimNet::distribute(seating, cfg.copies_for(steps), source.as_mut(), cfg.seed)?;

    let report = if cfg.verification_rounds > 0 {
        Some(net.verify(cfg.verification_rounds)?)
    } else {
        None
    };
    if let Some(r) = &report {
        if r.verdict == CheckVerdict::Rejected {
            return Ok(Setup::Rejected {
                transcript: net.into_transcript(),
                report: r.clone(),
            });
        }
    }

    for p in 1..=cfg.n {
        let party = PartyId(p);
        net.transcript_mut().decide(party, decisions.is_active(party));
    }
    // decision encoding: a sign flip on every remaining copy
    net.apply_phase_all(&qubit_active, PhaseGate::pauli_z())?;

    Ok(Setup::Ready(Engine {
        net,
        policies: policies_for(&cfg.adversary, cfg.n)?,
        qubit_active,
        runs_per_step: cfg.runs_per_step,
        report,
    }))
}

enum StepResult {
    Product(Outcome),
    Aborted { step: StepId, reason: String },
}

/// One protocol step over `runs_per_step` fresh copies: optional phase
/// gate, per-qubit measurement, randomized broadcast, consistency check.
fn run_step(engine: &mut Engine, step: StepId, gate: Option<PhaseGate>, bases: &[PauliAxis]) -> Result<StepResult> {
    let ids = match engine.net.select_runs(step, engine.runs_per_step) {
        Ok(ids) => ids,
        Err(Error::InsufficientCopies { .. }) => {
            return Ok(StepResult::Aborted {
                step,
                reason: "insufficient copies".to_string(),
            })
        }
        Err(e) => return Err(e),
    };
    if let Some(gate) = gate {
        engine.net.apply_phase_to(&ids, &engine.qubit_active, gate)?;
    }
    let mut products = Vec::with_capacity(ids.len());
    for id in &ids {
        let outcomes = engine.net.measure_copy(*id, bases)?;
        let values = engine.net.party_values(&outcomes);
        let announced = engine.net.broadcast(step, *id, &values, &engine.policies);
        products.push(Outcome::product(announced.iter().map(|&(_, o)| o)));
    }
    match consistent_product(&products) {
        Some(product) => Ok(StepResult::Product(product)),
        None => {
            let reason = "inconsistent announced products".to_string();
            engine.net.transcript_mut().abort(step, &reason);
            Ok(StepResult::Aborted { step, reason })
        }
    }
}

fn finish<T>(engine: Engine, verdict: RunVerdict<T>) -> ProtocolRun<T> {
    let Engine { net, report, .. } = engine;
    ProtocolRun {
        verdict,
        transcript: net.into_transcript(),
        report,
    }
}

macro_rules! step_product {
    ($engine:expr, $result:expr) => {
        match $result {
            StepResult::Product(p) => p,
            StepResult::Aborted { step, reason } => {
                return Ok(finish($engine, RunVerdict::Aborted { step, reason }));
            }
        }
    };
}

/// Three-party dining cryptographers.
///
/// Step 1 reads the payment parity from an all-X discrimination; step 2
/// (unless disabled) separates "nobody paid" from "two paid" in the even
/// branch and "one paid" from "all three paid" in the odd branch via
/// decision-dependent bases. With step 2 disabled the run assumes at most
/// one payment and settles on the parity alone.
pub fn run_dc3(decisions: &DecisionVector, cfg: &ProtocolConfig) -> Result<ProtocolRun<DcOutcome>> {
    let mut engine = match setup(ProtocolKind::Dc3, decisions, cfg)? {
        Setup::Ready(engine) => engine,
        Setup::Rejected { transcript, report } => {
            return Ok(ProtocolRun {
                verdict: RunVerdict::SourceRejected,
                transcript,
                report: Some(report),
            })
        }
    };

    let all_x = vec![PauliAxis::X; 3];
    let product = step_product!(engine, run_step(&mut engine, StepId(1), None, &all_x)?);
    let parity = Parity::from_label(GhzKind::from_x_parity(product));

    let subcase = if cfg.s3_enabled {
        let bases = dc3_bases(parity, decisions);
        let product = step_product!(engine, run_step(&mut engine, StepId(2), None, &bases)?);
        match (parity, product) {
            (Parity::Even, Outcome::Minus) => DcSubcase::ZeroPay,
            (Parity::Even, Outcome::Plus) => DcSubcase::DoublePay,
            (Parity::Odd, Outcome::Plus) => DcSubcase::TriplePay,
            (Parity::Odd, Outcome::Minus) => DcSubcase::SinglePay,
        }
    } else {
        // single-payment assumption
        match parity {
            Parity::Even => DcSubcase::ZeroPay,
            Parity::Odd => DcSubcase::SinglePay,
        }
    };

    let outcome = DcOutcome::from_subcase(subcase);
    let verdict = settle(&ProtocolOutcome::Dc3(outcome));
    engine.net.transcript_mut().verdict(&verdict.code);
    Ok(finish(engine, RunVerdict::Completed(outcome)))
}

/// n-party dining cryptographers (odd n), parity step only.
///
/// Assumes at most one payment; the assumption is not enforceable without
/// breaking anonymity, so an even number of payments reads as "nobody
/// paid" and an odd number as "one payment".
pub fn run_dcn(decisions: &DecisionVector, cfg: &ProtocolConfig) -> Result<ProtocolRun<DcnOutcome>> {
    let mut engine = match setup(ProtocolKind::Dcn, decisions, cfg)? {
        Setup::Ready(engine) => engine,
        Setup::Rejected { transcript, report } => {
            return Ok(ProtocolRun {
                verdict: RunVerdict::SourceRejected,
                transcript,
                report: Some(report),
            })
        }
    };

    let all_x = vec![PauliAxis::X; cfg.n];
    let product = step_product!(engine, run_step(&mut engine, StepId(1), None, &all_x)?);
    let parity = Parity::from_label(GhzKind::from_x_parity(product));

    let outcome = DcnOutcome::from_parity(parity);
    let verdict = settle(&ProtocolOutcome::Dcn(outcome));
    engine.net.transcript_mut().verdict(&verdict.code);
    Ok(finish(engine, RunVerdict::Completed(outcome)))
}

fn run_av_engine(
    kind: ProtocolKind,
    decisions: &DecisionVector,
    cfg: &ProtocolConfig,
) -> Result<ProtocolRun<AvOutcome>> {
    let mut engine = match setup(kind, decisions, cfg)? {
        Setup::Ready(engine) => engine,
        Setup::Rejected { transcript, report } => {
            return Ok(ProtocolRun {
                verdict: RunVerdict::SourceRejected,
                transcript,
                report: Some(report),
            })
        }
    };

    let n_qubits = kind.n_qubits(cfg.n);
    let rounds = av_rounds(n_qubits);
    let all_x = vec![PauliAxis::X; n_qubits];
    for round in 0..rounds {
        let step = StepId(round as u32 + 1);
        let gate = (round >= 1).then(|| PhaseGate::new(round as u32));
        let product = step_product!(engine, run_step(&mut engine, step, gate, &all_x)?);
        if GhzKind::from_x_parity(product) == GhzKind::Plus {
            // flipped label: t ≡ 2^round (mod 2^{round+1})
            let outcome = AvOutcome {
                result: AvResult::VetoDetected { round },
                rounds_run: round + 1,
            };
            let verdict = settle(&ProtocolOutcome::Av(outcome));
            engine.net.transcript_mut().verdict(&verdict.code);
            return Ok(finish(engine, RunVerdict::Completed(outcome)));
        }
    }

    let outcome = AvOutcome {
        result: AvResult::UnanimityInFavor,
        rounds_run: rounds,
    };
    let verdict = settle(&ProtocolOutcome::Av(outcome));
    engine.net.transcript_mut().verdict(&verdict.code);
    Ok(finish(engine, RunVerdict::Completed(outcome)))
}

/// Anonymous veto for an odd group.
///
/// Unanimity in favor is declared only after all ⌈log2(n+1)⌉ rounds keep
/// the minus label, which pins the veto count to zero; the first flipped
/// round stops the run with the residue certificate t ≡ 2^k (mod 2^{k+1}).
pub fn run_av(decisions: &DecisionVector, cfg: &ProtocolConfig) -> Result<ProtocolRun<AvOutcome>> {
    run_av_engine(ProtocolKind::Av, decisions, cfg)
}

/// Anonymous veto for an even group over (n+1)-qubit copies.
///
/// Party 1 holds two qubits: the first follows its real decision, the
/// second always acts "in favor", which gives party 1 no advantage and
/// keeps the effective veto count equal to the true one.
pub fn run_av_even(
    decisions: &DecisionVector,
    cfg: &ProtocolConfig,
) -> Result<ProtocolRun<AvOutcome>> {
    run_av_engine(ProtocolKind::AvEven, decisions, cfg)
}

/// Recompute the verdict code from the public records alone.
///
/// Returns exactly what the run recorded: the completed verdict code, the
/// abort, or the source rejection. Used to check that the public view of
/// a transcript determines the verdict.
pub fn reconstruct_verdict(kind: ProtocolKind, transcript: &Transcript) -> Result<RunVerdict<String>> {
    if let Some((step, reason)) = transcript.abort_info() {
        return Ok(RunVerdict::Aborted {
            step,
            reason: reason.to_string(),
        });
    }

    let announcements = transcript.announcements();
    // per protocol step (skipping verification), the agreed product
    let mut step_products: std::collections::BTreeMap<StepId, Vec<Outcome>> =
        std::collections::BTreeMap::new();
    let mut parties = std::collections::BTreeSet::new();
    for ((step, _copy), group) in &announcements {
        if step.0 == 0 {
            continue;
        }
        for party in group.keys() {
            parties.insert(*party);
        }
        step_products
            .entry(*step)
            .or_default()
            .push(Outcome::product(group.values().copied()));
    }

    if step_products.is_empty() {
        let any_failed_verify = transcript.events().iter().any(|e| {
            matches!(
                e.record,
                crate::simnet::transcript::Record::Verify { pass: false, .. }
            )
        });
        if any_failed_verify {
            return Ok(RunVerdict::SourceRejected);
        }
        return Err(Error::InvalidConfig(
            "transcript contains no protocol steps".into(),
        ));
    }

    let mut products = Vec::new();
    for (step, per_copy) in &step_products {
        let product = consistent_product(per_copy).ok_or_else(|| {
            Error::InvalidConfig(format!("step {} inconsistent but not aborted", step.0))
        })?;
        products.push((*step, product));
    }

    let n_parties = parties.len();
    let code = match kind {
        ProtocolKind::Dc3 => {
            let parity = Parity::from_label(GhzKind::from_x_parity(products[0].1));
            let subcase = if let Some((_, product)) = products.get(1) {
                match (parity, *product) {
                    (Parity::Even, Outcome::Minus) => DcSubcase::ZeroPay,
                    (Parity::Even, Outcome::Plus) => DcSubcase::DoublePay,
                    (Parity::Odd, Outcome::Plus) => DcSubcase::TriplePay,
                    (Parity::Odd, Outcome::Minus) => DcSubcase::SinglePay,
                }
            } else {
                match parity {
                    Parity::Even => DcSubcase::ZeroPay,
                    Parity::Odd => DcSubcase::SinglePay,
                }
            };
            subcase.code().to_string()
        }
        ProtocolKind::Dcn => match Parity::from_label(GhzKind::from_x_parity(products[0].1)) {
            Parity::Even => "parity_even".to_string(),
            Parity::Odd => "parity_odd".to_string(),
        },
        ProtocolKind::Av | ProtocolKind::AvEven => {
            let n_qubits = kind.n_qubits(n_parties);
            let expected_rounds = av_rounds(n_qubits);
            let mut verdict = None;
            for (step, product) in &products {
                if GhzKind::from_x_parity(*product) == GhzKind::Plus {
                    verdict = Some(format!("veto_round_{}", step.0 - 1));
                    break;
                }
            }
            match verdict {
                Some(code) => code,
                None if products.len() == expected_rounds => "in_favor".to_string(),
                None => {
                    return Err(Error::InvalidConfig(
                        "transcript ends before the final round".into(),
                    ))
                }
            }
        }
    };
    Ok(RunVerdict::Completed(code))
}
