use polar_wiretap::channel::{
    bhattacharyya, capacity_uniform, degrade, t_information, tvd_of_channel, Dmc, TvdMode,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid(points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |i| i as f64 / (points - 1) as f64)
}

fn bec_bsc_grid() -> Vec<Dmc> {
    let mut out = Vec::new();
    for p in grid(41) {
        out.push(Dmc::bec(p).unwrap());
        out.push(Dmc::bsc(p).unwrap());
    }
    out
}

#[test]
fn capacity_tvd_bhattacharyya_sandwich() {
    for w in bec_bsc_grid() {
        let c = capacity_uniform(&w);
        let t = tvd_of_channel(&w, TvdMode::Symmetric);
        let z = bhattacharyya(&w).unwrap();
        assert!(c <= t + 1e-12, "capacity {c} above tvd {t}");
        assert!(
            t <= (1.0 - z * z).sqrt() + 1e-12,
            "tvd {t} above sqrt(1 - {z}^2)"
        );
    }
}

#[test]
fn sandwich_is_tight_on_the_right_for_bsc() {
    for q in grid(41) {
        let w = Dmc::bsc(q).unwrap();
        let t = tvd_of_channel(&w, TvdMode::Symmetric);
        let z = bhattacharyya(&w).unwrap();
        assert!((t - (1.0 - z * z).sqrt()).abs() < 1e-12);
        assert!((t - (1.0 - 2.0 * q).abs()).abs() < 1e-12);
    }
}

#[test]
fn uniform_input_maximizes_tvd() {
    for w in bec_bsc_grid() {
        let uniform = t_information(&w, &[0.5, 0.5]).unwrap();
        for a in grid(101) {
            let t = t_information(&w, &[a, 1.0 - a]).unwrap();
            assert!(t <= uniform + 1e-9, "input bias {a}: {t} > {uniform}");
        }
        let searched = tvd_of_channel(&w, TvdMode::Grid { points: 101 });
        assert!((searched - uniform).abs() < 1e-9);
    }
}

#[test]
fn degraded_erasure_channels_carry_less_tvd() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p_b in grid(11) {
        for p_0 in grid(11) {
            let w = Dmc::bec(p_b).unwrap();
            let q = degrade(&w, &Dmc::erasure_postprocessor(p_0).unwrap()).unwrap();
            for _ in 0..50 {
                let a: f64 = rng.gen();
                let px = [a, 1.0 - a];
                let tq = t_information(&q, &px).unwrap();
                let tw = t_information(&w, &px).unwrap();
                assert!(tq <= tw + 1e-12);
            }
        }
    }
}

#[test]
fn erasure_composition_is_an_erasure_channel() {
    for p_b in grid(11) {
        for p_0 in grid(11) {
            let q = degrade(
                &Dmc::bec(p_b).unwrap(),
                &Dmc::erasure_postprocessor(p_0).unwrap(),
            )
            .unwrap();
            let expected = Dmc::bec(p_b + (1.0 - p_b) * p_0).unwrap();
            for x in 0..2 {
                for y in 0..3 {
                    assert!((q.prob(x, y) - expected.prob(x, y)).abs() < 1e-12);
                }
            }
        }
    }
}

fn stochastic_rows(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| {
            let raw: Vec<f64> = (0..cols).map(|_| rng.gen::<f64>() + 1e-3).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / s).collect()
        })
        .collect()
}

proptest! {
    #[test]
    fn processing_never_increases_capacity(seed in any::<u64>(), outs in 2usize..5, outs2 in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = Dmc::from_rows(&stochastic_rows(&mut rng, 2, outs)).unwrap();
        let p = Dmc::from_rows(&stochastic_rows(&mut rng, outs, outs2)).unwrap();
        let q = degrade(&w, &p).unwrap();
        prop_assert!(capacity_uniform(&q) <= capacity_uniform(&w) + 1e-12);
        let px = [0.5, 0.5];
        prop_assert!(t_information(&q, &px).unwrap() <= t_information(&w, &px).unwrap() + 1e-12);
    }

    #[test]
    fn bsc_cascade(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let q = degrade(&Dmc::bsc(a).unwrap(), &Dmc::bsc(b).unwrap()).unwrap();
        let c = a + b - 2.0 * a * b;
        prop_assert!((q.prob(0, 1) - c).abs() < 1e-12);
        prop_assert!((q.prob(1, 0) - c).abs() < 1e-12);
    }

    #[test]
    fn tvd_information_stays_in_range(seed in any::<u64>(), outs in 2usize..6, a in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = Dmc::from_rows(&stochastic_rows(&mut rng, 2, outs)).unwrap();
        let t = t_information(&w, &[a, 1.0 - a]).unwrap();
        prop_assert!((0.0..=2.0 + 1e-12).contains(&t));
    }
}
