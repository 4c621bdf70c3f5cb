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

//! Error type shared across the crate.
//!
//! Protocol aborts are ordinary return values (see
//! [`crate::protocols::RunVerdict`]), not errors; `Error` covers
//! precondition violations, capacity limits and malformed input.

use thiserror::Error;

/// Errors reported by the simulator library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Requested qubit count outside the supported 1..=24 range.
    #[error("qubit count {n} outside supported range 1..={max}")]
    QubitCountOutOfRange { n: usize, max: usize },

    /// Qubit index past the end of the register.
    #[error("qubit index {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },

    /// Pauli string length does not match the register size.
    #[error("operator acts on {got} qubits but the state has {expected}")]
    LengthMismatch { expected: usize, got: usize },

    /// An odd party count is required (even groups go through the adapter).
    #[error("party count {n} must be odd")]
    OddPartyCountRequired { n: usize },

    /// An even party count is required (adapter entry point).
    #[error("party count {n} must be even")]
    EvenPartyCountRequired { n: usize },

    /// Check-operator index outside 0..=n.
    #[error("check operator index {index} out of range 0..={max}")]
    OperatorIndexOutOfRange { index: usize, max: usize },

    /// Local-realism enumeration is capped at small odd sizes.
    #[error("local-realism enumeration supports odd n in 3..=7, got {n}")]
    EnumerationOutOfRange { n: usize },

    /// A step asked for more unconsumed copies than remain.
    #[error("requested {requested} copies but only {available} are available")]
    InsufficientCopies { requested: usize, available: usize },

    /// A finite state source ran dry.
    #[error("state source exhausted")]
    SourceExhausted,

    /// Verification was asked for zero rounds.
    #[error("verification requires at least one round")]
    NoRounds,

    /// Collusion inference would enumerate too many assignments.
    #[error("hypothesis space of 2^{free_parties} assignments exceeds limit {limit}")]
    HypothesisSpaceTooLarge { free_parties: usize, limit: u64 },

    /// No decision assignment explains the observed transcript.
    #[error("transcript is inconsistent with every hypothesis")]
    NoConsistentHypothesis,

    /// Malformed or out-of-range configuration value.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Party id could not be parsed or is out of range.
    #[error("invalid party id: {0}")]
    InvalidParty(String),

    /// A transcript line failed to parse.
    #[error("transcript parse error at line {line}: {message}")]
    TranscriptParse { line: usize, message: String },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
