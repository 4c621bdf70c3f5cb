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

//! Seeded random streams.
//!
//! One master seed derives independent sub-streams, one per role, so that
//! no component can bias the randomness another component consumes and so
//! that parallel trials with distinct streams stay reproducible.
//!
//! The split function is fixed: the master seed is xored with a per-role
//! salt and passed through the SplitMix64 finalizer, then xored with the
//! stream index and finalized again. The result keys a ChaCha8 stream.
//! Streams are independent in the PRNG sense (distinct ChaCha keys), not
//! cryptographically.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Role a derived stream serves. Each role gets its own salt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRole {
    /// Run selection and announcement ordering.
    Orchestrator,
    /// Born-rule sampling inside measurements.
    Measurement,
    /// State generation (random forged sources).
    Source,
    /// Per-party randomness; the index identifies the party.
    Party,
    /// Per-repetition master seeds for repeated runs.
    Run,
}

impl StreamRole {
    fn salt(self) -> u64 {
        match self {
            StreamRole::Orchestrator => 0x6f72_6368_0000_0001,
            StreamRole::Measurement => 0x6d65_6173_0000_0002,
            StreamRole::Source => 0x736f_7572_0000_0003,
            StreamRole::Party => 0x7061_7274_0000_0004,
            StreamRole::Run => 0x7275_6e73_0000_0005,
        }
    }
}

/// SplitMix64 finalizer.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the sub-seed for `(role, index)` from a master seed.
pub fn derive_seed(master: u64, role: StreamRole, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ role.salt()) ^ index)
}

/// Seeded ChaCha8 stream for `(role, index)`.
pub fn stream(master: u64, role: StreamRole, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, role, index))
}
