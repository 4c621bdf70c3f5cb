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

//! Deterministic, seedable simulator for anonymous-communication protocols
//! built on GHZ correlations.
//!
//! The crate provides:
//!
//! * [`statevec`] — a dense n-qubit statevector engine with single-qubit
//!   phase gates, Pauli measurements with collapse, and exact expectation
//!   values;
//! * [`ghzcheck`] — the GHZ genuineness check (sampled eigenvalue tests of
//!   the cyclic X/Y check-operator family), the exact Bell value of the
//!   associated local-realism inequality, and a brute-force bound over
//!   deterministic local assignments;
//! * [`protocols`] — state machines for the three-party dining
//!   cryptographers protocol, its n-party generalization, and the iterative
//!   anonymous-veto protocol (odd party counts directly, even via an
//!   adapter);
//! * [`adversary`] — dishonest-announcer and forged-source models plus an
//!   exact Bayesian collusion-inference engine;
//! * [`simnet`] — the simulated broadcast environment: copy distribution,
//!   run selection, randomized announcement ordering and the append-only
//!   transcript log.
//!
//! All randomness flows through seeded streams derived from a single master
//! seed ([`rng`]), so identical configurations reproduce byte-identical
//! transcripts.
//!
//! The statevector core is generic over the floating-point scalar; the
//! protocol stack pins `f64` through the [`StateVec64`] alias.

pub mod adversary;
pub mod error;
pub mod ghzcheck;
pub mod pauli;
pub mod protocols;
pub mod rng;
pub mod simnet;
pub mod statevec;

use std::fmt;

use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive, ToPrimitive};

pub use error::{Error, Result};
pub use pauli::{PauliAxis, PauliString};
pub use statevec::{GhzKind, Outcome, PhaseGate, StateVector};

/// Floating-point scalar the statevector engine is generic over: f32 or f64.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + fmt::Debug
        + fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// Double-precision statevector used throughout the protocol stack.
pub type StateVec64 = StateVector<f64>;

/// Single-precision statevector, for callers that trade accuracy for size.
pub type StateVec32 = StateVector<f32>;
