mod common;

use std::sync::Arc;

use hgtp_core::engine::BruteForceOracle;
use hgtp_core::hypergraph::{pair_count, triple_count};
use hgtp_core::observables::codegree_y_scan;
use hgtp_core::{enumerate_obstructions, ProcessState, StepOutcome, TripleCode};
use proptest::prelude::*;

fn incremental_set(s: &ProcessState) -> Vec<[u32; 3]> {
    let mut v: Vec<TripleCode> = s.available().to_vec();
    v.sort_unstable();
    v.into_iter().map(|c| c.decode()).collect()
}

#[test]
fn incremental_availability_matches_oracle_at_every_step() {
    for (n, ell) in [(12, 4), (14, 5), (16, 6), (15, 7), (13, 8)] {
        for seed in 0..2 {
            let mut s = ProcessState::new(n, ell, seed).unwrap();
            loop {
                assert_eq!(
                    incremental_set(&s),
                    BruteForceOracle::new(&s).available_set(),
                    "n = {n}, ell = {ell}, seed = {seed}, i = {}",
                    s.step_index()
                );
                if let StepOutcome::Terminated { .. } = s.step() {
                    break;
                }
            }
        }
    }
}

#[test]
fn counts_and_codegrees_every_step() {
    let cat = Arc::new(enumerate_obstructions(7).unwrap());
    for n in [20usize, 41, 60] {
        let mut s = ProcessState::with_catalog(n, Arc::clone(&cat), n as u64, 1 << 30).unwrap();
        let mut i = 0;
        s.run_with(|s| {
            assert_eq!(s.alive_pair_count() as u64, pair_count(n) - 3 * i as u64);
            if i % 40 == 0 {
                let mut sum = 0u64;
                for (u, v) in s.alive_pairs() {
                    let y = codegree_y_scan(s, u, v);
                    assert_eq!(y, s.codegree(u, v).unwrap());
                    sum += y as u64;
                }
                assert_eq!(sum, 3 * s.available_len() as u64);
                s.check_invariants().unwrap();
            }
            i += 1;
        });
    }
}

#[test]
fn triangle_removal_first_step() {
    // one triple kills itself and the 3 (n - 3) triples through its pairs
    for n in [5usize, 9, 30] {
        let mut s = ProcessState::new(n, 4, 1).unwrap();
        s.step();
        assert_eq!(s.available_len() as u64, triple_count(n) - 1 - 3 * (n as u64 - 3));
    }
}

#[test]
fn final_state_is_maximal() {
    for ell in [4, 6, 7] {
        let mut s = ProcessState::new(25, ell, 8).unwrap();
        s.run_to_end();
        assert!(BruteForceOracle::new(&s).available_set().is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn forced_choices_keep_oracle_agreement(n in 8usize..14, ell in 4usize..8, picks in proptest::collection::vec(any::<u32>(), 1..30)) {
        let mut s = ProcessState::new(n, ell, 0).unwrap();
        for p in picks {
            if s.available_len() == 0 {
                break;
            }
            let code = s.available()[p as usize % s.available_len()];
            s.force_step(code.decode()).unwrap();
            prop_assert_eq!(incremental_set(&s), BruteForceOracle::new(&s).available_set());
        }
        prop_assert!(s.check_invariants().is_ok());
    }

    #[test]
    fn same_seed_same_run(seed in any::<u64>()) {
        let mut a = ProcessState::new(30, 6, seed).unwrap();
        let mut b = ProcessState::new(30, 6, seed).unwrap();
        a.run_to_end();
        b.run_to_end();
        prop_assert_eq!(a.chosen(), b.chosen());
    }
}
