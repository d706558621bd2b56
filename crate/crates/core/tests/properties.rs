use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sst_shuffle::choice::Sampler;
use sst_shuffle::harness::io::{parse_csv, write_csv};
use sst_shuffle::harness::{simulate, ExperimentConfig, Scheme};
use sst_shuffle::marking::{MarkingState, TieBreak};
use sst_shuffle::merge::{merge_distribution, sample_merge};
use sst_shuffle::walk::step_lazy;
use sst_shuffle::{IntPartition, Permutation, Transposition};

fn partition(max_parts: usize, max_part: u32) -> impl Strategy<Value = IntPartition> {
    prop::collection::vec(1..=max_part, 1..=max_parts).prop_map(IntPartition::new)
}

fn permutation(max_n: usize) -> impl Strategy<Value = Permutation> {
    (1..=max_n)
        .prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|images| Permutation::from_images(&images).unwrap())
}

proptest! {
    #[test]
    fn inverse_composes_to_identity(p in permutation(12)) {
        prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
        prop_assert_eq!(p.cycle_type().size() as usize, p.n());
    }

    #[test]
    fn transposition_changes_cycle_count_by_one(p in permutation(12), a in 1u32..=12, b in 1u32..=12) {
        let n = p.n() as u32;
        let (a, b) = ((a - 1) % n + 1, (b - 1) % n + 1);
        prop_assume!(a != b);
        let q = p.apply_transposition(Transposition::new(a, b).unwrap()).unwrap();
        let diff = q.cycle_count() as i64 - p.cycle_count() as i64;
        prop_assert_eq!(diff.abs(), 1);
        // Same cycle splits, different cycles join.
        let same = p.cycle_containing(a).unwrap().contains(&b);
        prop_assert_eq!(diff == 1, same);
    }

    #[test]
    fn merge_law_is_a_distribution(lambda in partition(3, 4), mu in partition(3, 4)) {
        prop_assume!(lambda.size() >= mu.size());
        let d = merge_distribution(&lambda, &mu).unwrap();
        prop_assert!(d.total().is_one());
        let total = lambda.size() + mu.size();
        for (key, _) in d.iter() {
            prop_assert_eq!(key.nu.size() + key.xi.size(), total);
            prop_assert!(key.nu.size() > lambda.size());
        }
    }

    #[test]
    fn sampled_merges_are_in_support(lambda in partition(3, 5), mu in partition(3, 3), seed: u64) {
        prop_assume!(lambda.size() >= mu.size());
        let d = merge_distribution(&lambda, &mu).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let o = sample_merge(&lambda, &mu, &mut rng).unwrap();
            prop_assert!(!d.prob(&o.key()).is_zero());
            prop_assert_eq!(o.k, o.nu.size() - lambda.size());
        }
    }

    #[test]
    fn blocks_stay_unions_of_cycles(n in 2usize..16, seed: u64, coin: bool) {
        let tie = if coin { TieBreak::Coin } else { TieBreak::SmallestEntry };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = Sampler::new(&mut rng);
        let mut s = MarkingState::with_tie_break(&sst_shuffle::SetPartition::singletons(n), tie);
        let mut pi = Permutation::identity(n);
        let mut largest = 1;
        while !s.is_absorbed() {
            let st = step_lazy(n, &mut c).unwrap();
            s.merge_scheme_step(&pi, st, &mut c).unwrap();
            if st.alpha {
                pi.transpose_in_place(st.tau).unwrap();
            }
            prop_assert!(s.check_union_of_cycles(&pi));
            prop_assert!(s.largest_block_size() >= largest);
            largest = s.largest_block_size();
        }
        prop_assert_eq!(s.largest_block_size(), n);
        prop_assert!(s.t_third().unwrap() <= s.t());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn csv_round_trip(n in 2usize..10, trials in 1u64..20, seed: u64, broder: bool) {
        let scheme = if broder { Scheme::Broder } else { Scheme::Merge };
        let recs = simulate(&ExperimentConfig::new(n, trials, seed, scheme)).unwrap();
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        prop_assert_eq!(parse_csv(buf.as_slice()).unwrap(), recs);
    }
}
