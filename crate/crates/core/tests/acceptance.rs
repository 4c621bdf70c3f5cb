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

//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (run with `--nocapture` to see them).

use std::collections::BTreeSet;
use std::time::Instant;

use ghz_anon::adversary::{colluder_infer, AdversarySpec, ForgedSource, SourceKind};
use ghz_anon::ghzcheck::{bell_value_exact, lr_bound_bruteforce, run_verification, CheckVerdict};
use ghz_anon::protocols::{
    run_av, run_av_even, run_dc3, run_dcn, AvResult, DcSubcase, DecisionVector, Parity,
    ProtocolKind, RunVerdict, Settlement,
};
use ghz_anon::rng::{stream, StreamRole};
use ghz_anon::simnet::transcript::PartyId;
use ghz_anon::simnet::{GenuineSource, ProtocolConfig};
use ghz_anon::{GhzKind, PauliAxis, PauliString, PhaseGate, StateVec64};

fn pass(criterion: u32, what: &str) {
    println!("acceptance criterion {criterion}: PASS — {what}");
}

#[test]
fn criterion_01_stabilizer_identities() {
    let started = Instant::now();
    use PauliAxis::{X, Y};
    let words = [
        [X, X, X],
        [X, Y, Y],
        [Y, X, Y],
        [Y, Y, X],
    ];
    let minus_signs = [-1.0, 1.0, 1.0, 1.0];

    let psi = StateVec64::ghz(3, GhzKind::Minus).unwrap();
    let perp = StateVec64::ghz(3, GhzKind::Plus).unwrap();
    for (axes, sign) in words.iter().zip(minus_signs) {
        let op = PauliString::new(axes.iter().map(|&a| Some(a)).collect());
        let on_minus = psi.expectation(&op).unwrap();
        assert!(
            (on_minus - sign).abs() < 1e-9,
            "⟨{op}⟩ on minus state: {on_minus}, want {sign}"
        );
        // the orthogonal partner carries the opposite sign on all four
        let on_plus = perp.expectation(&op).unwrap();
        assert!(
            (on_plus + sign).abs() < 1e-9,
            "⟨{op}⟩ on plus state: {on_plus}, want {}",
            -sign
        );
    }
    assert!(started.elapsed().as_secs_f64() < 1.0, "runtime budget");
    pass(1, "all eight GHZ eigenvalue identities exact to 1e-9");
}

#[test]
fn criterion_02_dc3_truth_table() {
    let started = Instant::now();
    for mask in 0..8usize {
        let decisions = DecisionVector::from_bitmask(3, mask);
        let t = decisions.active_count();
        let expected_subcase = match t {
            0 => DcSubcase::ZeroPay,
            1 => DcSubcase::SinglePay,
            2 => DcSubcase::DoublePay,
            _ => DcSubcase::TriplePay,
        };
        let expected_parity = if t % 2 == 0 { Parity::Even } else { Parity::Odd };
        let expected_settlement = match expected_subcase {
            DcSubcase::ZeroPay => Settlement::NsaPays,
            DcSubcase::SinglePay => Settlement::PaymentAccepted,
            _ => Settlement::PaymentCancelled,
        };
        for seed in 0..100u64 {
            let cfg = ProtocolConfig::new(3).with_seed(seed);
            let run = run_dc3(&decisions, &cfg).unwrap();
            let outcome = run
                .verdict
                .completed()
                .unwrap_or_else(|| panic!("honest run aborted: mask {mask} seed {seed}"));
            assert_eq!(outcome.parity, expected_parity, "mask {mask} seed {seed}");
            assert_eq!(outcome.subcase, expected_subcase, "mask {mask} seed {seed}");
            assert_eq!(
                outcome.settlement, expected_settlement,
                "mask {mask} seed {seed}"
            );
        }
    }
    assert!(started.elapsed().as_secs_f64() < 10.0, "runtime budget");
    pass(2, "all 8 payer subsets × 100 seeds classified correctly");
}

#[test]
fn criterion_03_generalized_dc_parity() {
    for n in [3usize, 5, 7, 9] {
        for t in [0usize, 1] {
            for seed in 0..100u64 {
                let decisions = if t == 0 {
                    DecisionVector::none(n)
                } else {
                    let payer = PartyId((seed as usize % n) + 1);
                    DecisionVector::from_active_parties(n, &[payer]).unwrap()
                };
                let cfg = ProtocolConfig::new(n).with_seed(seed);
                let run = run_dcn(&decisions, &cfg).unwrap();
                let outcome = run.verdict.completed().expect("honest run completes");
                let expected = if t == 0 { Parity::Even } else { Parity::Odd };
                assert_eq!(outcome.parity, expected, "n={n} t={t} seed={seed}");
            }
        }
    }
    pass(3, "n ∈ {3,5,7,9}, t ∈ {0,1}: parity deterministic over 100 seeds each");
}

#[test]
fn criterion_04_av_exhaustive() {
    let started = Instant::now();
    let check = |n: usize, mask: usize, result: AvResult, t: usize| match result {
        AvResult::UnanimityInFavor => {
            assert_eq!(t, 0, "n={n} mask={mask:b}: unanimity with {t} vetoes")
        }
        AvResult::VetoDetected { round } => {
            let modulus = 1usize << (round + 1);
            let residue = 1usize << round;
            assert!(t > 0, "n={n} mask={mask:b}: veto with t=0");
            assert_eq!(
                t % modulus,
                residue,
                "n={n} mask={mask:b}: residue certificate broken at round {round}"
            );
        }
    };

    for n in [3usize, 5, 7, 9] {
        for mask in 0..(1usize << n) {
            let decisions = DecisionVector::from_bitmask(n, mask);
            let cfg = ProtocolConfig::new(n).with_seed(mask as u64);
            let run = run_av(&decisions, &cfg).unwrap();
            let outcome = run.verdict.completed().expect("honest run completes");
            check(n, mask, outcome.result, decisions.active_count());
        }
    }
    for n in [4usize, 6, 8] {
        for mask in 0..(1usize << n) {
            let decisions = DecisionVector::from_bitmask(n, mask);
            let cfg = ProtocolConfig::new(n).with_seed(mask as u64);
            let run = run_av_even(&decisions, &cfg).unwrap();
            let outcome = run.verdict.completed().expect("honest run completes");
            check(n, mask, outcome.result, decisions.active_count());
        }
    }
    assert!(started.elapsed().as_secs_f64() < 120.0, "runtime budget");
    pass(4, "veto outcomes exhaustive for odd n ≤ 9 and even n ≤ 8");
}

#[test]
fn criterion_05_bell_and_lr_values() {
    for n in [3usize, 5, 7] {
        let psi = StateVec64::ghz(n, GhzKind::Minus).unwrap();
        let value = bell_value_exact(&psi).unwrap();
        assert!(
            (value - (n as f64 + 1.0)).abs() < 1e-9,
            "exact Bell value at n={n}: {value}"
        );
        assert_eq!(lr_bound_bruteforce(n).unwrap(), n as u32 - 1, "bound at n={n}");
    }

    let mut rng = stream(505, StreamRole::Measurement, 0);
    let mut source = GenuineSource::new(3);
    let report = run_verification(&mut source, 10_000, &mut rng).unwrap();
    let estimate = report.bell_estimate.value;
    let se = report.bell_estimate.std_error.expect("two or more samples");
    assert!(
        (estimate - 4.0).abs() <= 3.0 * se + 1e-9,
        "sampled {estimate} ± {se} vs exact 4"
    );
    pass(5, "Bell values n+1, LR bounds n−1, sampled estimate within 3σ of 4");
}

#[test]
fn criterion_06_genuineness_detection() {
    // genuine source: no failures in 10^4 rounds
    let mut rng = stream(606, StreamRole::Measurement, 0);
    let mut source = GenuineSource::new(5);
    let report = run_verification(&mut source, 10_000, &mut rng).unwrap();
    assert_eq!(report.verdict, CheckVerdict::Genuine);
    assert_eq!(report.pass_rate, 1.0);

    // all-zero forgery: rejected in 1000 of 1000 seeded experiments
    for seed in 0..1000u64 {
        let mut rng = stream(seed, StreamRole::Measurement, 7);
        let mut source = ForgedSource::new(SourceKind::AllZero, 5, seed);
        let report = run_verification(&mut source, 100, &mut rng).unwrap();
        assert_eq!(
            report.verdict,
            CheckVerdict::Rejected,
            "all-zero source slipped through at seed {seed}"
        );
    }

    // phase-π forgery: every round fails
    let mut rng = stream(707, StreamRole::Measurement, 0);
    let mut source = ForgedSource::new(
        SourceKind::WrongPhase {
            phase: std::f64::consts::PI,
        },
        3,
        1,
    );
    let report = run_verification(&mut source, 200, &mut rng).unwrap();
    assert_eq!(report.pass_rate, 0.0, "a phase-π round passed");
    pass(6, "genuine 10^4 rounds clean; forgeries rejected as required");
}

/// Exact public-announcement distribution of one three-party subcase
/// step, for a given decision vector: the encoded state measured in the
/// parity-dependent bases.
fn dc3_subcase_distribution(decisions: &DecisionVector) -> Vec<f64> {
    let mut state = StateVec64::ghz(3, GhzKind::Minus).unwrap();
    for party in decisions.active_parties() {
        state.apply_phase(party.index(), PhaseGate::pauli_z()).unwrap();
    }
    let parity = if decisions.active_count() % 2 == 0 {
        Parity::Even
    } else {
        Parity::Odd
    };
    let bases: Vec<PauliAxis> = decisions
        .flags()
        .iter()
        .map(|&active| match (parity, active) {
            (Parity::Even, true) => PauliAxis::Y,
            (Parity::Even, false) => PauliAxis::X,
            (Parity::Odd, true) => PauliAxis::X,
            (Parity::Odd, false) => PauliAxis::Y,
        })
        .collect();
    state.measurement_distribution(&bases).unwrap()
}

fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p
        .iter()
        .zip(q.iter())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
}

#[test]
fn criterion_07_anonymity_distributions() {
    // three-party, one payer: parity step and subcase step
    let singles: Vec<DecisionVector> = (1..=3)
        .map(|p| DecisionVector::from_active_parties(3, &[PartyId(p)]).unwrap())
        .collect();
    let parity_dists: Vec<Vec<f64>> = singles
        .iter()
        .map(|d| {
            let mut state = StateVec64::ghz(3, GhzKind::Minus).unwrap();
            for party in d.active_parties() {
                state.apply_phase(party.index(), PhaseGate::pauli_z()).unwrap();
            }
            state.measurement_distribution(&[PauliAxis::X; 3]).unwrap()
        })
        .collect();
    let subcase_dists: Vec<Vec<f64>> = singles.iter().map(dc3_subcase_distribution).collect();
    for i in 0..singles.len() {
        for j in i + 1..singles.len() {
            let tv_parity = total_variation(&parity_dists[i], &parity_dists[j]);
            let tv_subcase = total_variation(&subcase_dists[i], &subcase_dists[j]);
            assert!(tv_parity < 1e-9, "parity-step TV({i},{j}) = {tv_parity}");
            assert!(tv_subcase < 1e-9, "subcase-step TV({i},{j}) = {tv_subcase}");
        }
    }

    // five parties, two vetoes: round-0 and round-1 announcement tuples
    let mut pairs = Vec::new();
    for a in 1..=5usize {
        for b in a + 1..=5 {
            pairs.push(DecisionVector::from_active_parties(5, &[PartyId(a), PartyId(b)]).unwrap());
        }
    }
    assert_eq!(pairs.len(), 10);
    let round_dist = |d: &DecisionVector, round: u32| -> Vec<f64> {
        let mut state = StateVec64::ghz(5, GhzKind::Minus).unwrap();
        for party in d.active_parties() {
            state.apply_phase(party.index(), PhaseGate::pauli_z()).unwrap();
        }
        if round >= 1 {
            for party in d.active_parties() {
                state.apply_phase(party.index(), PhaseGate::new(round)).unwrap();
            }
        }
        state.measurement_distribution(&[PauliAxis::X; 5]).unwrap()
    };
    for round in 0..=1u32 {
        let dists: Vec<Vec<f64>> = pairs.iter().map(|d| round_dist(d, round)).collect();
        for i in 0..dists.len() {
            for j in i + 1..dists.len() {
                let tv = total_variation(&dists[i], &dists[j]);
                assert!(tv < 1e-9, "round {round} TV({i},{j}) = {tv}");
            }
        }
    }
    pass(7, "equal-count decision vectors give identical announcement distributions");
}

#[test]
fn criterion_08_flip_attack_rate() {
    let n = 3usize;
    let trials = 10_000u64;
    for k in [2usize, 3] {
        let expected = (1.0f64 / n as f64).powi(k as i32);
        let mut undetected_effective = 0usize;
        for seed in 0..trials {
            let mut cfg = ProtocolConfig::new(n).with_seed(seed);
            cfg.runs_per_step = k;
            cfg.adversary = AdversarySpec::LastFlipper { party: PartyId(2) };
            let run = run_dcn(&DecisionVector::none(n), &cfg).unwrap();
            if let RunVerdict::Completed(outcome) = run.verdict {
                // honest parity is even; odd means the flip stuck
                if outcome.parity == Parity::Odd {
                    undetected_effective += 1;
                }
            }
        }
        let freq = undetected_effective as f64 / trials as f64;
        let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
        assert!(
            (freq - expected).abs() < 3.0 * sigma,
            "k={k}: rate {freq} vs expected {expected} (3σ = {})",
            3.0 * sigma
        );
    }
    pass(8, "undetected-and-effective flip rate matches (1/n)^k for k ∈ {2,3}");
}

#[test]
fn criterion_09_collusion_boundary() {
    // n−1 colluders pin the lone honest party's decision, payer or not
    for (payers, expected_flag) in [(vec![PartyId(1)], true), (vec![], false)] {
        let decisions = DecisionVector::from_active_parties(3, &payers).unwrap();
        let cfg = ProtocolConfig::new(3).with_seed(909);
        let run = run_dc3(&decisions, &cfg).unwrap();
        let colluders: BTreeSet<PartyId> = [PartyId(2), PartyId(3)].into_iter().collect();
        let posterior = colluder_infer(&colluders, &run.transcript, ProtocolKind::Dc3).unwrap();
        assert_eq!(posterior.parties, vec![PartyId(1)]);
        let weight = posterior.weight_of(&[expected_flag]).unwrap();
        assert!(
            (weight - 1.0).abs() < 1e-9,
            "degenerate posterior expected, got weight {weight}"
        );
    }

    // four of five colluders still pin the fifth
    let vetoes = DecisionVector::from_active_parties(5, &[PartyId(1)]).unwrap();
    let cfg = ProtocolConfig::new(5).with_seed(910);
    let run = run_av(&vetoes, &cfg).unwrap();
    let colluders: BTreeSet<PartyId> =
        [PartyId(2), PartyId(3), PartyId(4), PartyId(5)].into_iter().collect();
    let posterior = colluder_infer(&colluders, &run.transcript, ProtocolKind::Av).unwrap();
    assert!((posterior.weight_of(&[true]).unwrap() - 1.0).abs() < 1e-9);

    // a lone colluder sees the uniform equal-count posterior
    let vetoes = DecisionVector::from_active_parties(5, &[PartyId(3), PartyId(5)]).unwrap();
    let cfg = ProtocolConfig::new(5).with_seed(911);
    let run = run_av(&vetoes, &cfg).unwrap();
    let colluders: BTreeSet<PartyId> = [PartyId(1)].into_iter().collect();
    let posterior = colluder_infer(&colluders, &run.transcript, ProtocolKind::Av).unwrap();
    let support = posterior.support(1e-12);
    assert_eq!(support.len(), 6);
    for h in &support {
        assert!((h.weight - 1.0 / 6.0).abs() < 1e-9);
    }

    // no colluders at all: uniform over the single payers
    let payer = DecisionVector::from_active_parties(3, &[PartyId(2)]).unwrap();
    let cfg = ProtocolConfig::new(3).with_seed(912);
    let run = run_dc3(&payer, &cfg).unwrap();
    let posterior = colluder_infer(&BTreeSet::new(), &run.transcript, ProtocolKind::Dc3).unwrap();
    let support = posterior.support(1e-12);
    assert_eq!(support.len(), 3);
    for h in &support {
        assert_eq!(h.assignment.iter().filter(|&&f| f).count(), 1);
        assert!((h.weight - 1.0 / 3.0).abs() < 1e-9);
    }
    pass(9, "posterior degenerate at n−1 colluders, uniform below");
}

#[test]
fn criterion_10_deterministic_transcripts() {
    let vetoes = DecisionVector::from_active_parties(5, &[PartyId(2), PartyId(4)]).unwrap();
    let mut cfg = ProtocolConfig::new(5).with_seed(4242);
    cfg.verification_rounds = 10;
    cfg.total_copies = Some(20);
    let first = run_av(&vetoes, &cfg).unwrap();
    let second = run_av(&vetoes, &cfg).unwrap();
    assert_eq!(first.transcript.to_ndjson(), second.transcript.to_ndjson());
    assert!(!first.transcript.to_ndjson().is_empty());

    let payers = DecisionVector::from_active_parties(3, &[PartyId(1), PartyId(3)]).unwrap();
    let cfg3 = ProtocolConfig::new(3).with_seed(777);
    let a = run_dc3(&payers, &cfg3).unwrap();
    let b = run_dc3(&payers, &cfg3).unwrap();
    assert_eq!(a.transcript.to_ndjson(), b.transcript.to_ndjson());
    pass(10, "identical config + seed reproduces byte-identical transcripts");
}

/// Checked here rather than in a criterion: every completed verdict can be
/// recomputed from the public records alone.
#[test]
fn public_records_determine_the_verdict() {
    use ghz_anon::protocols::reconstruct_verdict;
    let cases: Vec<(ProtocolKind, ghz_anon::simnet::transcript::Transcript)> = vec![
        {
            let d = DecisionVector::from_active_parties(3, &[PartyId(2)]).unwrap();
            let run = run_dc3(&d, &ProtocolConfig::new(3).with_seed(5)).unwrap();
            (ProtocolKind::Dc3, run.transcript)
        },
        {
            let d = DecisionVector::none(7);
            let run = run_dcn(&d, &ProtocolConfig::new(7).with_seed(6)).unwrap();
            (ProtocolKind::Dcn, run.transcript)
        },
        {
            let d = DecisionVector::from_bitmask(5, 0b01111);
            let run = run_av(&d, &ProtocolConfig::new(5).with_seed(7)).unwrap();
            (ProtocolKind::Av, run.transcript)
        },
        {
            let d = DecisionVector::from_bitmask(6, 0b000110);
            let run = run_av_even(&d, &ProtocolConfig::new(6).with_seed(8)).unwrap();
            (ProtocolKind::AvEven, run.transcript)
        },
    ];
    for (kind, transcript) in cases {
        let rebuilt = reconstruct_verdict(kind, &transcript).unwrap();
        let recorded = transcript.verdict_code().expect("completed run").to_string();
        assert_eq!(rebuilt, RunVerdict::Completed(recorded));
    }
}
