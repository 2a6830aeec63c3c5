use polar_wiretap::channel::Bec;
use polar_wiretap::oracle::{
    exact_block_error, exact_leakage, exact_leakage_with_frozen, leakage_report, rank_leakage,
};
use polar_wiretap::transforms::{polar_transform, rl_transform, CodeConstruction};
use polar_wiretap::wiretap::WiretapDesign;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bec(p: f64) -> Bec {
    Bec::new(p).unwrap()
}

fn random_design(n: usize, rng: &mut ChaCha8Rng) -> WiretapDesign {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let k = rng.gen_range(0..=n);
    let r = rng.gen_range(0..=n - k);
    WiretapDesign::from_partition(n, &idx[..k], &idx[k..k + r], &idx[k + r..]).unwrap()
}

fn codes() -> Vec<CodeConstruction> {
    vec![polar_transform(3).unwrap(), rl_transform(8, 4).unwrap()]
}

#[test]
fn bound_chain_on_random_partitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for code in codes() {
        for c in 0..50 {
            let p_e = [0.3, 0.5, 0.8][c % 3];
            let d = random_design(8, &mut rng);
            let r = leakage_report(&code, &d, bec(0.05), bec(p_e)).unwrap();
            assert!(r.violations().is_empty(), "{:?}: {r:?}", r.violations());
        }
    }
}

#[test]
fn leakage_decreases_as_eve_degrades() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for code in codes() {
        for _ in 0..20 {
            let d = random_design(8, &mut rng);
            let mut prev = f64::INFINITY;
            for k in 0..=20 {
                let s = exact_leakage(&code, &d, bec(k as f64 / 20.0)).unwrap();
                assert!(s <= prev + 1e-12);
                prev = s;
            }
            assert_eq!(prev, 0.0);
        }
    }
}

#[test]
fn block_error_sits_under_the_union_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let code = polar_transform(4).unwrap();
    for _ in 0..20 {
        let d = random_design(16, &mut rng);
        for p in [0.05, 0.2, 0.5] {
            let full = exact_block_error(&code, &d, bec(p), false).unwrap();
            let short = exact_block_error(&code, &d, bec(p), true).unwrap();
            assert!(short <= full + 1e-12);
            assert!((0.0..=1.0 + 1e-12).contains(&full));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn enumeration_and_rank_identity_agree(seed in any::<u64>(), p in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = rl_transform(7, seed).unwrap();
        let d = random_design(7, &mut rng);
        let a = exact_leakage(&code, &d, bec(p)).unwrap();
        let b = rank_leakage(&code, &d, bec(p)).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn frozen_values_are_irrelevant(seed in any::<u64>(), p in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = polar_transform(3).unwrap();
        let d = random_design(8, &mut rng);
        let frozen: Vec<u8> = (0..d.set_b.len()).map(|_| rng.gen_range(0..2)).collect();
        let zero = exact_leakage(&code, &d, bec(p)).unwrap();
        let other = exact_leakage_with_frozen(&code, &d, bec(p), &frozen).unwrap();
        prop_assert!((zero - other).abs() < 1e-12);
    }
}
