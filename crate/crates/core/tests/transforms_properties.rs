use polar_wiretap::bitchannel::{exhaustive_profile, kernel_recursion};
use polar_wiretap::channel::Bec;
use polar_wiretap::gf2::{suffix_decodable_profile, BinMatrix, ErasurePattern};
use polar_wiretap::transforms::{
    abs_transform, mk_transform, polar_transform, rl_transform, rm_transform, AbsBudget,
    CodeConstruction, Kernel,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bec(p: f64) -> Bec {
    Bec::new(p).unwrap()
}

fn k16() -> Kernel {
    Kernel::new(BinMatrix::random_invertible(16, 2024)).unwrap()
}

fn all_families(m: usize) -> Vec<CodeConstruction> {
    let n = 1 << m;
    vec![
        polar_transform(m).unwrap(),
        rm_transform(m).unwrap(),
        mk_transform(&vec![Kernel::g2(); m]).unwrap(),
        abs_transform(m, bec(0.05), bec(0.3), AbsBudget::default()).unwrap(),
        rl_transform(n, 17).unwrap(),
    ]
}

#[test]
fn every_family_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for m in [1, 3, 5] {
        for code in all_families(m) {
            assert!(code.transform().is_invertible().unwrap());
            for _ in 0..100 {
                let u: Vec<u8> = (0..code.n()).map(|_| rng.gen_range(0..2)).collect();
                let x = code.encode(&u);
                assert_eq!(code.decode_clean(&x).unwrap(), u, "{}", code.family());
            }
        }
    }
}

#[test]
fn rm_and_polar_share_a_row_space() {
    for m in 1..=6 {
        let p = polar_transform(m).unwrap();
        let r = rm_transform(m).unwrap();
        let n = 1 << m;
        // stacking both generators keeps the rank at n
        let stacked = BinMatrix::from_fn(2 * n, n, |i, j| {
            if i < n {
                p.transform().get(i, j)
            } else {
                r.transform().get(i - n, j)
            }
        });
        assert_eq!(stacked.rank(), n);
        let order = r.provenance().column_order.clone().unwrap();
        for (j, &src) in order.iter().enumerate() {
            for i in 0..n {
                assert_eq!(r.transform().get(i, j), p.transform().get(i, src));
            }
        }
    }
}

#[test]
fn rm_profile_differs_from_polar_at_n8() {
    let mut a = exhaustive_profile(&polar_transform(3).unwrap(), bec(0.5))
        .unwrap()
        .erasure()
        .to_vec();
    let mut b = exhaustive_profile(&rm_transform(3).unwrap(), bec(0.5))
        .unwrap()
        .erasure()
        .to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    assert!(a.iter().zip(&b).any(|(x, y)| (x - y).abs() > 1e-9));
}

#[test]
fn kernel_order_matters() {
    let a = kernel_recursion(&[Kernel::g2(), k16()], bec(0.3)).unwrap();
    let b = kernel_recursion(&[k16(), Kernel::g2()], bec(0.3)).unwrap();
    assert!(a
        .erasure()
        .iter()
        .zip(b.erasure())
        .any(|(x, y)| (x - y).abs() > 1e-9));
}

#[test]
fn large_multi_kernel_transform_is_invertible() {
    let mut kernels = vec![k16()];
    kernels.extend(vec![Kernel::g2(); 6]);
    let code = mk_transform(&kernels).unwrap();
    assert_eq!(code.n(), 1024);
    assert_eq!(code.transform().rank(), 1024);
    assert_eq!(code.provenance().kernels, vec![16, 2, 2, 2, 2, 2, 2]);
}

#[test]
fn kernel_table_matches_the_suffix_engine() {
    let k = k16();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let mask: u32 = rng.gen_range(0..1 << 16);
        let pattern = ErasurePattern::from_mask(16, mask as u64);
        let ok = suffix_decodable_profile(k.matrix(), &pattern).unwrap();
        for (i, &d) in ok.iter().enumerate() {
            assert_eq!(k.is_decodable(i, mask), d);
        }
    }
}

#[test]
fn large_kernel_polynomials_hit_the_endpoints() {
    let k = k16();
    for i in 0..16 {
        let c = k.polynomial(i);
        assert_eq!(c[0], 0);
        assert_eq!(c.iter().sum::<i64>(), 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn rl_is_reproducible(n in 1usize..100, seed in any::<u64>()) {
        let a = rl_transform(n, seed).unwrap();
        let b = rl_transform(n, seed).unwrap();
        prop_assert_eq!(a.transform(), b.transform());
        prop_assert!(a.transform().is_invertible().unwrap());
    }

    #[test]
    fn abs_is_deterministic(m in 1usize..6, pb in 0.01f64..0.2, gap in 0.05f64..0.6) {
        let a = abs_transform(m, bec(pb), bec(pb + gap), AbsBudget::default()).unwrap();
        let b = abs_transform(m, bec(pb), bec(pb + gap), AbsBudget::default()).unwrap();
        prop_assert_eq!(a.transform(), b.transform());
        prop_assert_eq!(&a.provenance().swaps, &b.provenance().swaps);
        prop_assert!(a.transform().is_invertible().unwrap());
    }
}
