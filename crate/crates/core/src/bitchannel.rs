//! Erasure parameters of the synthesized bit-channels of a transform over a BEC.
//!
//! Over a BEC every bit-channel is itself a BEC, so a profile is just the
//! vector of per-index erasure probabilities `eps_i`, with
//! `T_i = C_i = 1 - eps_i` and `Z_i = eps_i`.
//!
//! Three routes are provided:
//!
//! - exact recursion for Kronecker-structured transforms ([`arikan_recursion`],
//!   [`kernel_recursion`]);
//! - full enumeration of the `2^n` erasure patterns ([`exhaustive_profile`]);
//! - Monte-Carlo rank estimation ([`mc_profile`], [`permuted_profile`]).
//!
//! Monte-Carlo sample `j` draws its erasure pattern from ChaCha stream `j` of
//! the seed, and per-index loss counts are summed as integers, so results do
//! not depend on how rayon splits the work.

use rand::distributions::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::Bec;
use crate::gf2::{self, BinMatrix, ErasurePattern, SuffixEngine};
use crate::transforms::{bernstein_eval, CodeConstruction, Family, Kernel};
use crate::{Error, Result};

/// Largest blocklength handled by full pattern enumeration.
pub const EXHAUSTIVE_MAX_N: usize = 20;

/// Default Monte-Carlo sample count (per-index standard error <= 1.6e-3).
pub const DEFAULT_SAMPLES: u64 = 100_000;

const CHUNK: u64 = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Recursion,
    Exhaustive,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BitChannelProfile {
    erasure: Vec<f64>,
    method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    std_err: Option<Vec<f64>>,
    channel: Bec,
}

impl BitChannelProfile {
    /// Profile from known erasure probabilities (exact methods only).
    pub fn from_erasures(erasure: Vec<f64>, channel: Bec, method: Method) -> Result<Self> {
        if let Some(e) = erasure.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(Error::InvalidParameter(format!(
                "erasure probability {e} outside [0, 1]"
            )));
        }
        Ok(Self {
            erasure,
            method,
            samples: None,
            seed: None,
            std_err: None,
            channel,
        })
    }

    pub fn n(&self) -> usize {
        self.erasure.len()
    }

    pub fn erasure(&self) -> &[f64] {
        &self.erasure
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn samples(&self) -> Option<u64> {
        self.samples
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn std_err(&self) -> Option<&[f64]> {
        self.std_err.as_deref()
    }

    pub fn channel(&self) -> Bec {
        self.channel
    }

    /// TVD of bit-channel `i`.
    pub fn tvd(&self, i: usize) -> f64 {
        1.0 - self.erasure[i]
    }

    pub fn bhattacharyya(&self, i: usize) -> f64 {
        self.erasure[i]
    }

    pub fn capacity(&self, i: usize) -> f64 {
        1.0 - self.erasure[i]
    }

    pub fn tvds(&self) -> Vec<f64> {
        self.erasure.iter().map(|e| 1.0 - e).collect()
    }

    pub fn capacity_sum(&self) -> f64 {
        self.erasure.iter().map(|e| 1.0 - e).sum()
    }

    /// Shifts every estimate by `z` standard errors toward a less reliable
    /// channel (larger erasure). No-op for exact profiles or `z = 0`.
    pub fn pessimistic_for_reliability(&self, z: f64) -> Self {
        self.shifted(z)
    }

    /// Shifts every estimate by `z` standard errors toward a more
    /// informative channel for the eavesdropper (smaller erasure).
    pub fn pessimistic_for_secrecy(&self, z: f64) -> Self {
        self.shifted(-z)
    }

    fn shifted(&self, z: f64) -> Self {
        let mut out = self.clone();
        if let Some(se) = &self.std_err {
            if z != 0.0 {
                for (e, s) in out.erasure.iter_mut().zip(se) {
                    *e = (*e + z * s).clamp(0.0, 1.0);
                }
            }
        }
        out
    }
}

/// Exact polar profile: `m` rounds of `eps -> (2 eps - eps^2, eps^2)`, each
/// parameter replaced in place by its (minus, plus) pair.
pub fn arikan_recursion(eps: Bec, m: usize) -> BitChannelProfile {
    let mut cur = vec![eps.erasure_prob()];
    for _ in 0..m {
        cur = cur
            .into_iter()
            .flat_map(|e| [2.0 * e - e * e, e * e])
            .collect();
    }
    BitChannelProfile::from_erasures(cur, eps, Method::Recursion)
        .expect("recursion stays in [0, 1]")
}

/// Exact profile of a Kronecker product of kernels (first kernel outermost).
pub fn kernel_recursion(kernels: &[Kernel], eps: Bec) -> Result<BitChannelProfile> {
    if kernels.is_empty() {
        return Err(Error::InvalidParameter("kernel list is empty".into()));
    }
    let mut cur = vec![eps.erasure_prob()];
    for k in kernels {
        cur = cur.into_iter().flat_map(|q| k.split(q)).collect();
    }
    for e in &mut cur {
        *e = e.clamp(0.0, 1.0);
    }
    BitChannelProfile::from_erasures(cur, eps, Method::Recursion)
}

/// Exact profile of a structured construction, when one exists.
pub fn structured_profile(code: &CodeConstruction, eps: Bec) -> Option<BitChannelProfile> {
    match code.family() {
        Family::Polar | Family::Mk if !code.kernels().is_empty() => {
            kernel_recursion(code.kernels(), eps).ok()
        }
        _ => None,
    }
}

/// Per-index counts of erasure patterns, by pattern weight, under which each
/// input bit is lost. Evaluating at `eps` gives the exact erasure profile.
#[derive(Clone, Debug, PartialEq)]
pub struct ErasureSpectrum {
    n: usize,
    counts: Vec<u64>,
}

impl ErasureSpectrum {
    /// Enumerates all `2^n` patterns of the invertible transform `g` (`n <= 20`).
    pub fn of(g: &BinMatrix) -> Result<Self> {
        let n = g.rows();
        if n > EXHAUSTIVE_MAX_N {
            return Err(Error::TooLarge {
                n,
                limit: EXHAUSTIVE_MAX_N,
            });
        }
        let engine = SuffixEngine::new(g)?;
        let mut scratch = engine.scratch();
        let mut out = [0u64; 1];
        let mut counts = vec![0u64; n * (n + 1)];
        for mask in 0..(1u64 << n) {
            engine.undecodable_into(&ErasurePattern::from_mask(n, mask), &mut scratch, &mut out);
            let w = mask.count_ones() as usize;
            for i in gf2::ones(&out) {
                counts[i * (n + 1) + w] += 1;
            }
        }
        Ok(Self { n, counts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self, i: usize) -> &[u64] {
        &self.counts[i * (self.n + 1)..(i + 1) * (self.n + 1)]
    }

    pub fn evaluate(&self, eps: f64) -> Vec<f64> {
        (0..self.n)
            .map(|i| bernstein_eval(self.counts(i), eps).clamp(0.0, 1.0))
            .collect()
    }

    pub fn profile(&self, eps: Bec) -> BitChannelProfile {
        BitChannelProfile::from_erasures(self.evaluate(eps.erasure_prob()), eps, Method::Exhaustive)
            .expect("clamped to [0, 1]")
    }
}

pub fn exhaustive_profile(code: &CodeConstruction, eps: Bec) -> Result<BitChannelProfile> {
    exhaustive_profile_of(code.transform(), eps)
}

pub fn exhaustive_profile_of(g: &BinMatrix, eps: Bec) -> Result<BitChannelProfile> {
    Ok(ErasureSpectrum::of(g)?.profile(eps))
}

/// Exhaustive profile of the column-permuted transform (decode position `j`
/// carries bit `order[j]`).
pub fn exhaustive_permuted_profile(
    code: &CodeConstruction,
    order: &[usize],
    eps: Bec,
) -> Result<BitChannelProfile> {
    exhaustive_profile_of(&code.permuted(order)?, eps)
}

pub fn mc_profile(
    code: &CodeConstruction,
    eps: Bec,
    samples: u64,
    seed: u64,
) -> Result<BitChannelProfile> {
    mc_profile_of(code.transform(), eps, samples, seed)
}

pub fn mc_profile_of(
    g: &BinMatrix,
    eps: Bec,
    samples: u64,
    seed: u64,
) -> Result<BitChannelProfile> {
    mc_profile_engine(&SuffixEngine::new(g)?, eps, samples, seed)
}

/// Monte-Carlo profile of the column-permuted transform.
pub fn permuted_profile(
    code: &CodeConstruction,
    order: &[usize],
    eps: Bec,
    samples: u64,
    seed: u64,
) -> Result<BitChannelProfile> {
    mc_profile_of(&code.permuted(order)?, eps, samples, seed)
}

pub fn mc_profile_engine(
    engine: &SuffixEngine,
    eps: Bec,
    samples: u64,
    seed: u64,
) -> Result<BitChannelProfile> {
    if samples == 0 {
        return Err(Error::InvalidParameter(
            "at least one sample is required".into(),
        ));
    }
    let n = engine.n();
    let counts = mc_loss_counts(engine, eps.erasure_prob(), samples, seed);
    let total = samples as f64;
    let erasure: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
    let std_err = erasure
        .iter()
        .map(|&e| (e * (1.0 - e) / total).sqrt())
        .collect();
    debug_assert_eq!(erasure.len(), n);
    Ok(BitChannelProfile {
        erasure,
        method: Method::MonteCarlo,
        samples: Some(samples),
        seed: Some(seed),
        std_err: Some(std_err),
        channel: eps,
    })
}

/// Draws the erasure pattern of sample `index`.
pub fn sample_pattern(n: usize, eps: f64, seed: u64, index: u64, out: &mut ErasurePattern) {
    let dist = Bernoulli::new(eps).expect("probability validated by Bec");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let words = out.words_mut();
    words.fill(0);
    for i in 0..n {
        if dist.sample(&mut rng) {
            words[i / 64] |= 1 << (i % 64);
        }
    }
}

fn mc_loss_counts(engine: &SuffixEngine, eps: f64, samples: u64, seed: u64) -> Vec<u64> {
    let n = engine.n();
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut counts = vec![0u64; n];
            let mut scratch = engine.scratch();
            let mut pattern = ErasurePattern::none(n);
            let mut out = vec![0u64; n.div_ceil(64)];
            for j in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                sample_pattern(n, eps, seed, j, &mut pattern);
                engine.undecodable_into(&pattern, &mut scratch, &mut out);
                for i in gf2::ones(&out) {
                    counts[i] += 1;
                }
            }
            counts
        })
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::transforms::{polar_transform, rl_transform};

    fn bec(p: f64) -> Bec {
        Bec::new(p).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (i, (x, y)) in a.iter().zip(b).enumerate() {
            assert!((x - y).abs() <= tol, "index {i}: {x} vs {y}");
        }
    }

    #[test]
    fn recursion_examples() {
        assert_eq!(arikan_recursion(bec(0.5), 1).erasure(), &[0.75, 0.25]);
        assert_eq!(
            arikan_recursion(bec(0.5), 2).erasure(),
            &[0.9375, 0.5625, 0.4375, 0.0625]
        );
        assert!(arikan_recursion(bec(0.0), 5)
            .erasure()
            .iter()
            .all(|&e| e == 0.0));
        assert!(arikan_recursion(bec(1.0), 5)
            .erasure()
            .iter()
            .all(|&e| e == 1.0));
    }

    #[test]
    fn kernel_recursion_matches_polar() {
        let g2 = Kernel::g2();
        let q: f64 = 0.37;
        assert_close(&g2.split(q), &[2.0 * q - q * q, q * q], 1e-15);
        let two = kernel_recursion(&[g2.clone(), g2.clone()], bec(0.5)).unwrap();
        assert_close(
            two.erasure(),
            arikan_recursion(bec(0.5), 2).erasure(),
            1e-15,
        );
        let k = Kernel::new(BinMatrix::random_invertible(6, 2)).unwrap();
        assert!(kernel_recursion(&[k], bec(0.0))
            .unwrap()
            .erasure()
            .iter()
            .all(|&e| e == 0.0));
        assert!(kernel_recursion(&[], bec(0.3)).is_err());
    }

    #[test]
    fn exhaustive_examples() {
        let id = CodeConstruction::custom(Family::Rl, BinMatrix::identity(5)).unwrap();
        assert_close(
            exhaustive_profile(&id, bec(0.3)).unwrap().erasure(),
            &[0.3; 5],
            1e-15,
        );
        let polar = polar_transform(2).unwrap();
        let p = exhaustive_profile(&polar, bec(0.5)).unwrap();
        assert_close(p.erasure(), &[0.9375, 0.5625, 0.4375, 0.0625], 1e-15);
        for seed in 0..5 {
            let rl = rl_transform(4, seed).unwrap();
            let p = exhaustive_profile(&rl, bec(0.5)).unwrap();
            assert!((p.capacity_sum() - 2.0).abs() < 1e-12);
        }
        let big = CodeConstruction::custom(Family::Rl, BinMatrix::identity(21)).unwrap();
        assert_eq!(
            exhaustive_profile(&big, bec(0.1)),
            Err(Error::TooLarge { n: 21, limit: 20 })
        );
    }

    #[test]
    fn mc_zero_erasure_is_exact() {
        let rl = rl_transform(50, 1).unwrap();
        let p = mc_profile(&rl, bec(0.0), 1000, 3).unwrap();
        assert!(p.erasure().iter().all(|&e| e == 0.0));
        assert_eq!(p.samples(), Some(1000));
        assert!(mc_profile(&rl, bec(0.2), 0, 3).is_err());
    }

    #[test]
    fn mc_identity_transform_is_bernoulli_mean() {
        let id = CodeConstruction::custom(Family::Rl, BinMatrix::identity(40)).unwrap();
        let p = mc_profile(&id, bec(0.3), 100_000, 9).unwrap();
        assert!(p.erasure().iter().all(|&e| (e - 0.3).abs() <= 0.01));
    }

    #[test]
    fn permuted_identity_order_equals_mc() {
        let rl = rl_transform(24, 5).unwrap();
        let order: Vec<usize> = (0..24).collect();
        assert_eq!(
            permuted_profile(&rl, &order, bec(0.4), 3000, 11).unwrap(),
            mc_profile(&rl, bec(0.4), 3000, 11).unwrap()
        );
        let id = CodeConstruction::custom(Family::Rl, BinMatrix::identity(16)).unwrap();
        let rev: Vec<usize> = (0..16).rev().collect();
        let p = permuted_profile(&id, &rev, bec(0.25), 40_000, 2).unwrap();
        assert!(p.erasure().iter().all(|&e| (e - 0.25).abs() <= 0.015));
        assert!(permuted_profile(&id, &[0, 1], bec(0.2), 10, 0).is_err());
    }

    #[test]
    fn structured_profile_dispatch() {
        let polar = polar_transform(3).unwrap();
        let exact = structured_profile(&polar, bec(0.2)).unwrap();
        assert_close(
            exact.erasure(),
            arikan_recursion(bec(0.2), 3).erasure(),
            1e-15,
        );
        assert!(structured_profile(&rl_transform(8, 0).unwrap(), bec(0.2)).is_none());
    }

    #[test]
    fn pessimistic_shifts_follow_std_err() {
        let rl = rl_transform(16, 2).unwrap();
        let p = mc_profile(&rl, bec(0.4), 2000, 1).unwrap();
        let se = p.std_err().unwrap().to_vec();
        let worse = p.pessimistic_for_reliability(2.0);
        let leakier = p.pessimistic_for_secrecy(2.0);
        for i in 0..16 {
            assert!((worse.erasure()[i] - (p.erasure()[i] + 2.0 * se[i]).min(1.0)).abs() < 1e-15);
            assert!((leakier.erasure()[i] - (p.erasure()[i] - 2.0 * se[i]).max(0.0)).abs() < 1e-15);
        }
        assert_eq!(p.pessimistic_for_reliability(0.0), p);
    }
}
