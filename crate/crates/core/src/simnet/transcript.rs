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

//! Append-only protocol transcript and its newline-delimited wire format.
//!
//! Each record serializes to one flat JSON object with stable field names
//! (`type`, `step`, `copy`, `party`, `order`, `outcome`, `op`, `expected`,
//! `pass`, `decision`, `verdict`, `reason`, `visibility`); ids are
//! integers and outcomes are +1/−1. Step 0 is reserved for genuineness
//! verification; protocol steps count from 1.
//!
//! Decisions are recorded only as private records, so the public view of a
//! transcript never contains a decision or a basis choice.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::Outcome;

/// 1-based party identifier, matching the ids users see.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartyId(pub usize);

impl PartyId {
    /// Zero-based position, for indexing per-party vectors.
    pub fn index(self) -> usize {
        self.0 - 1
    }

    pub fn from_index(index: usize) -> Self {
        PartyId(index + 1)
    }
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Identifier of one shared state copy (one protocol run).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CopyId(pub u32);

/// Protocol step; 0 is the verification phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StepId(pub u32);

pub const VERIFICATION_STEP: StepId = StepId(0);

/// Who may read a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Visibility {
    Public,
    Private(PartyId),
}

/// One transcript entry.
#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    /// A state copy was dealt out to the parties.
    Share { copy: CopyId },
    /// Summary of one genuineness-check round.
    Verify {
        copy: CopyId,
        verifier: PartyId,
        op_index: usize,
        product: Outcome,
        expected: Outcome,
        pass: bool,
    },
    /// A copy was consumed by a step.
    Select { step: StepId, copy: CopyId },
    /// One party's public announcement for a (step, copy), with its
    /// position in the randomized announcement order.
    Announce {
        step: StepId,
        copy: CopyId,
        order: usize,
        party: PartyId,
        outcome: Outcome,
    },
    /// A party's decision; always private to that party.
    Decide { party: PartyId, active: bool },
    /// Final verdict code for the run.
    Verdict { code: String },
    /// The run was aborted.
    Abort { step: StepId, reason: String },
}

/// A record plus who may read it.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub record: Record,
    pub visibility: Visibility,
}

/// Ordered, append-only event log of a protocol run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Transcript {
    events: Vec<Event>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn public_events(&self) -> impl Iterator<Item = &Event> {
        self.events
            .iter()
            .filter(|e| e.visibility == Visibility::Public)
    }

    pub fn share(&mut self, copy: CopyId) {
        self.push_public(Record::Share { copy });
    }

    pub fn verify(
        &mut self,
        copy: CopyId,
        verifier: PartyId,
        op_index: usize,
        product: Outcome,
        expected: Outcome,
        pass: bool,
    ) {
        self.push_public(Record::Verify {
            copy,
            verifier,
            op_index,
            product,
            expected,
            pass,
        });
    }

    pub fn select(&mut self, step: StepId, copy: CopyId) {
        self.push_public(Record::Select { step, copy });
    }

    pub fn announce(
        &mut self,
        step: StepId,
        copy: CopyId,
        order: usize,
        party: PartyId,
        outcome: Outcome,
    ) {
        self.push_public(Record::Announce {
            step,
            copy,
            order,
            party,
            outcome,
        });
    }

    /// Decisions never enter the public view.
    pub fn decide(&mut self, party: PartyId, active: bool) {
        self.events.push(Event {
            record: Record::Decide { party, active },
            visibility: Visibility::Private(party),
        });
    }

    pub fn verdict(&mut self, code: impl Into<String>) {
        self.push_public(Record::Verdict { code: code.into() });
    }

    pub fn abort(&mut self, step: StepId, reason: impl Into<String>) {
        self.push_public(Record::Abort {
            step,
            reason: reason.into(),
        });
    }

    fn push_public(&mut self, record: Record) {
        self.events.push(Event {
            record,
            visibility: Visibility::Public,
        });
    }

    /// Public announcements grouped by (step, copy), as party → outcome.
    pub fn announcements(&self) -> BTreeMap<(StepId, CopyId), BTreeMap<PartyId, Outcome>> {
        let mut map: BTreeMap<(StepId, CopyId), BTreeMap<PartyId, Outcome>> = BTreeMap::new();
        for event in self.public_events() {
            if let Record::Announce {
                step,
                copy,
                party,
                outcome,
                ..
            } = event.record
            {
                map.entry((step, copy)).or_default().insert(party, outcome);
            }
        }
        map
    }

    /// Copies consumed per step, in selection order.
    pub fn selections(&self) -> BTreeMap<StepId, Vec<CopyId>> {
        let mut map: BTreeMap<StepId, Vec<CopyId>> = BTreeMap::new();
        for event in self.public_events() {
            if let Record::Select { step, copy } = event.record {
                map.entry(step).or_default().push(copy);
            }
        }
        map
    }

    /// Private decision records readable by the given parties.
    pub fn decisions_visible_to(&self, readers: &[PartyId]) -> BTreeMap<PartyId, bool> {
        let mut map = BTreeMap::new();
        for event in &self.events {
            if let (Record::Decide { party, active }, Visibility::Private(owner)) =
                (&event.record, event.visibility)
            {
                if readers.contains(&owner) {
                    map.insert(*party, *active);
                }
            }
        }
        map
    }

    pub fn verdict_code(&self) -> Option<&str> {
        self.events.iter().rev().find_map(|e| match &e.record {
            Record::Verdict { code } => Some(code.as_str()),
            _ => None,
        })
    }

    pub fn abort_info(&self) -> Option<(StepId, &str)> {
        self.events.iter().find_map(|e| match &e.record {
            Record::Abort { step, reason } => Some((*step, reason.as_str())),
            _ => None,
        })
    }

    /// Serialize to the newline-delimited interchange format.
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for event in &self.events {
            out.push_str(&serde_json::to_string(&Line::from_event(event)).expect("serializable"));
            out.push('\n');
        }
        out
    }

    /// Parse a transcript back from its NDJSON form.
    pub fn parse_ndjson(text: &str) -> Result<Self> {
        let mut transcript = Transcript::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parsed: Line = serde_json::from_str(line).map_err(|e| Error::TranscriptParse {
                line: idx + 1,
                message: e.to_string(),
            })?;
            transcript.events.push(parsed.into_event(idx + 1)?);
        }
        Ok(transcript)
    }
}

/// Flat wire form of one event.
#[derive(Debug, Serialize, Deserialize)]
struct Line {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    step: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    copy: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    party: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outcome: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    op: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expected: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pass: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    decision: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    verdict: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    visibility: String,
}

impl Line {
    fn empty(kind: &str, visibility: &Visibility) -> Self {
        Line {
            kind: kind.to_string(),
            step: None,
            copy: None,
            party: None,
            order: None,
            outcome: None,
            op: None,
            expected: None,
            pass: None,
            decision: None,
            verdict: None,
            reason: None,
            visibility: match visibility {
                Visibility::Public => "public".to_string(),
                Visibility::Private(p) => format!("private:{p}"),
            },
        }
    }

    fn from_event(event: &Event) -> Self {
        match &event.record {
            Record::Share { copy } => {
                let mut l = Line::empty("share", &event.visibility);
                l.copy = Some(copy.0);
                l
            }
            Record::Verify {
                copy,
                verifier,
                op_index,
                product,
                expected,
                pass,
            } => {
                let mut l = Line::empty("verify", &event.visibility);
                l.copy = Some(copy.0);
                l.party = Some(verifier.0);
                l.op = Some(*op_index);
                l.outcome = Some(product.value() as i64);
                l.expected = Some(expected.value() as i64);
                l.pass = Some(*pass);
                l
            }
            Record::Select { step, copy } => {
                let mut l = Line::empty("select", &event.visibility);
                l.step = Some(step.0);
                l.copy = Some(copy.0);
                l
            }
            Record::Announce {
                step,
                copy,
                order,
                party,
                outcome,
            } => {
                let mut l = Line::empty("announce", &event.visibility);
                l.step = Some(step.0);
                l.copy = Some(copy.0);
                l.order = Some(*order);
                l.party = Some(party.0);
                l.outcome = Some(outcome.value() as i64);
                l
            }
            Record::Decide { party, active } => {
                let mut l = Line::empty("decide", &event.visibility);
                l.party = Some(party.0);
                l.decision = Some(u8::from(*active));
                l
            }
            Record::Verdict { code } => {
                let mut l = Line::empty("verdict", &event.visibility);
                l.verdict = Some(code.clone());
                l
            }
            Record::Abort { step, reason } => {
                let mut l = Line::empty("abort", &event.visibility);
                l.step = Some(step.0);
                l.reason = Some(reason.clone());
                l
            }
        }
    }

    fn into_event(self, line_no: usize) -> Result<Event> {
        let parse_err = |message: &str| Error::TranscriptParse {
            line: line_no,
            message: message.to_string(),
        };
        let visibility = if self.visibility == "public" {
            Visibility::Public
        } else if let Some(id) = self.visibility.strip_prefix("private:") {
            let id: usize = id
                .parse()
                .map_err(|_| parse_err("bad private visibility party id"))?;
            Visibility::Private(PartyId(id))
        } else {
            return Err(parse_err("bad visibility"));
        };
        let step = self.step.map(StepId);
        let copy = self.copy.map(CopyId);
        let party = self.party.map(PartyId);
        let outcome = match self.outcome {
            Some(v) => Some(Outcome::from_value(v).map_err(|_| parse_err("bad outcome"))?),
            None => None,
        };
        let record = match self.kind.as_str() {
            "share" => Record::Share {
                copy: copy.ok_or_else(|| parse_err("share needs copy"))?,
            },
            "verify" => Record::Verify {
                copy: copy.ok_or_else(|| parse_err("verify needs copy"))?,
                verifier: party.ok_or_else(|| parse_err("verify needs party"))?,
                op_index: self.op.ok_or_else(|| parse_err("verify needs op"))?,
                product: outcome.ok_or_else(|| parse_err("verify needs outcome"))?,
                expected: Outcome::from_value(
                    self.expected.ok_or_else(|| parse_err("verify needs expected"))?,
                )
                .map_err(|_| parse_err("bad expected"))?,
                pass: self.pass.ok_or_else(|| parse_err("verify needs pass"))?,
            },
            "select" => Record::Select {
                step: step.ok_or_else(|| parse_err("select needs step"))?,
                copy: copy.ok_or_else(|| parse_err("select needs copy"))?,
            },
            "announce" => Record::Announce {
                step: step.ok_or_else(|| parse_err("announce needs step"))?,
                copy: copy.ok_or_else(|| parse_err("announce needs copy"))?,
                order: self.order.ok_or_else(|| parse_err("announce needs order"))?,
                party: party.ok_or_else(|| parse_err("announce needs party"))?,
                outcome: outcome.ok_or_else(|| parse_err("announce needs outcome"))?,
            },
            "decide" => Record::Decide {
                party: party.ok_or_else(|| parse_err("decide needs party"))?,
                active: self.decision.ok_or_else(|| parse_err("decide needs decision"))? != 0,
            },
            "verdict" => Record::Verdict {
                code: self.verdict.ok_or_else(|| parse_err("verdict needs verdict"))?,
            },
            "abort" => Record::Abort {
                step: step.ok_or_else(|| parse_err("abort needs step"))?,
                reason: self.reason.ok_or_else(|| parse_err("abort needs reason"))?,
            },
            other => return Err(parse_err(&format!("unknown record type {other}"))),
        };
        Ok(Event { record, visibility })
    }
}
