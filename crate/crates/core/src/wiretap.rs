//! Wiretap code design over a degraded erasure wiretap channel.
//!
//! The index set is split into `A` (confidential message bits), `R` (uniform
//! random bits) and `B` (frozen to zero). Bob's block error is bounded by the
//! sum of Bhattacharyya parameters over `G = A u R`; the leakage to Eve in
//! total variation is bounded either by half the sum of marginal bit-channel
//! TVDs over `A u B` ("bound 2") or by half the sum of sequentially
//! conditioned TVDs over `A u B` ("bound 1").

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::bitchannel::{self, BitChannelProfile};
use crate::transforms::CodeConstruction;
use crate::{Error, Result};

/// One design problem: Bob's and Eve's erasure probabilities, blocklength,
/// error budget `eps` and leakage budget `delta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecrecyOperatingPoint {
    pub p_b: f64,
    pub p_e: f64,
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
}

impl SecrecyOperatingPoint {
    pub fn new(p_b: f64, p_e: f64, n: usize, eps: f64, delta: f64) -> Result<Self> {
        let op = Self {
            p_b,
            p_e,
            n,
            eps,
            delta,
        };
        op.validate()?;
        Ok(op)
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} = {v} outside [0, 1]"
                )))
            }
        };
        prob("p_b", self.p_b)?;
        prob("p_e", self.p_e)?;
        if self.p_b > self.p_e {
            return Err(Error::InvalidParameter(format!(
                "Eve's channel must be degraded: p_b = {} > p_e = {}",
                self.p_b, self.p_e
            )));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eps = {} outside (0, 1)",
                self.eps
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta = {} outside (0, 1)",
                self.delta
            )));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter(
                "blocklength must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Bound1,
    Bound2,
    Asymptotic,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Bound1 => "bound1",
            Variant::Bound2 => "bound2",
            Variant::Asymptotic => "asymptotic",
        }
    }
}

/// Partition `(A, R, B)` with its rate and bound values. Index sets are
/// sorted ascending.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WiretapDesign {
    pub n: usize,
    pub set_a: Vec<usize>,
    pub set_r: Vec<usize>,
    pub set_b: Vec<usize>,
    pub k_b: usize,
    pub k_e: usize,
    pub secrecy_rate: f64,
    pub delta0: f64,
    pub leakage_bound: f64,
    pub pe_bound: f64,
    /// Error bound restricted to `A` and the random bits Bob actually decodes.
    pub pe_bound_msg: f64,
    pub variant: Variant,
    /// Decode order used for bound 1: `B` ascending, then `G` by increasing marginal TVD.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<usize>>,
    /// False when no confidential bit fits the budgets (`k_e = 0`).
    pub feasible: bool,
}

impl WiretapDesign {
    /// The set `G = A u R`, ascending.
    pub fn good_set(&self) -> Vec<usize> {
        let mut g: Vec<usize> = self.set_a.iter().chain(&self.set_r).copied().collect();
        g.sort_unstable();
        g
    }

    /// Builds a design from an explicit partition (no selection); bound
    /// values are left at zero.
    pub fn from_partition(n: usize, a: &[usize], r: &[usize], b: &[usize]) -> Result<Self> {
        check_partition(n, a, r, b)?;
        let sorted = |s: &[usize]| {
            let mut v = s.to_vec();
            v.sort_unstable();
            v
        };
        Ok(Self {
            n,
            set_a: sorted(a),
            set_r: sorted(r),
            set_b: sorted(b),
            k_b: a.len() + r.len(),
            k_e: a.len(),
            secrecy_rate: a.len() as f64 / n as f64,
            delta0: 0.0,
            leakage_bound: 0.0,
            pe_bound: 0.0,
            pe_bound_msg: 0.0,
            variant: Variant::Bound2,
            order: None,
            feasible: !a.is_empty(),
        })
    }
}

fn check_partition(n: usize, a: &[usize], r: &[usize], b: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &i in a.iter().chain(r).chain(b) {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidParameter(format!(
                "index {i} out of range or in two sets"
            )));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidParameter(
            "sets do not cover every index".into(),
        ));
    }
    Ok(())
}

fn check_profiles(bob: &BitChannelProfile, eve: &BitChannelProfile, n: usize) -> Result<()> {
    if bob.n() != n || eve.n() != n {
        return Err(Error::Shape(format!(
            "profiles of length {} and {} for blocklength {n}",
            bob.n(),
            eve.n()
        )));
    }
    Ok(())
}

/// Indices sorted by increasing `key`, ties in natural order.
fn sort_by_value(
    indices: impl IntoIterator<Item = usize>,
    key: impl Fn(usize) -> f64,
) -> Vec<usize> {
    let mut v: Vec<usize> = indices.into_iter().collect();
    v.sort_by(|&x, &y| {
        key(x)
            .partial_cmp(&key(y))
            .unwrap_or(Ordering::Equal)
            .then(x.cmp(&y))
    });
    v
}

/// Longest prefix of `values` whose running sum, started at `start`, stays
/// strictly below `limit`. Returns the prefix length and the sum reached.
fn greedy_prefix(start: f64, values: impl IntoIterator<Item = f64>, limit: f64) -> (usize, f64) {
    let mut acc = start;
    let mut k = 0;
    for v in values {
        let next = acc + v;
        if next < limit {
            acc = next;
            k += 1;
        } else {
            break;
        }
    }
    (k, acc)
}

struct Reliable {
    /// `G` in increasing Bhattacharyya order
    good: Vec<usize>,
    bad: Vec<usize>,
    pe_bound: f64,
}

fn select_reliable(bob: &BitChannelProfile, eps: f64) -> Reliable {
    let n = bob.n();
    let by_z = sort_by_value(0..n, |i| bob.bhattacharyya(i));
    let (k_b, pe_bound) = greedy_prefix(0.0, by_z.iter().map(|&i| bob.bhattacharyya(i)), eps);
    Reliable {
        good: by_z[..k_b].to_vec(),
        bad: by_z[k_b..].to_vec(),
        pe_bound,
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// Set selection driven by marginal bit-channel TVDs (bound 2).
///
/// `G` is the largest set of smallest Bhattacharyya parameters with sum
/// `< eps`; `B` is the rest; `delta0 = 1/2 sum_B T_i`. If `delta0 > delta`
/// no confidential bit is placed, otherwise `A` is the longest run of
/// smallest-TVD indices of `G` keeping `delta0 + 1/2 sum_A T_i < delta`.
pub fn design_bound2(
    bob: &BitChannelProfile,
    eve: &BitChannelProfile,
    op: &SecrecyOperatingPoint,
) -> Result<WiretapDesign> {
    check_profiles(bob, eve, op.n)?;
    let rel = select_reliable(bob, op.eps);
    let by_t = sort_by_value(rel.good.iter().copied(), |i| eve.tvd(i));
    let delta0 = 0.5 * rel.bad.iter().map(|&i| eve.tvd(i)).sum::<f64>();
    let (k_e, leakage) = if delta0 > op.delta {
        (0, delta0)
    } else {
        greedy_prefix(delta0, by_t.iter().map(|&i| 0.5 * eve.tvd(i)), op.delta)
    };
    Ok(finish(
        op.n,
        by_t[..k_e].to_vec(),
        by_t[k_e..].to_vec(),
        rel.bad,
        delta0,
        leakage,
        rel.pe_bound,
        bob,
        Variant::Bound2,
        None,
    ))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    n: usize,
    a: Vec<usize>,
    r: Vec<usize>,
    b: Vec<usize>,
    delta0: f64,
    leakage_bound: f64,
    pe_bound: f64,
    bob: &BitChannelProfile,
    variant: Variant,
    order: Option<Vec<usize>>,
) -> WiretapDesign {
    let (a, r, b) = (sorted(a), sorted(r), sorted(b));
    let g = sorted(a.iter().chain(&r).copied().collect());
    let pe_msg = pe_bound_msg(&g, bob, &a);
    let k_e = a.len();
    WiretapDesign {
        n,
        k_b: a.len() + r.len(),
        k_e,
        secrecy_rate: k_e as f64 / n as f64,
        set_a: a,
        set_r: r,
        set_b: b,
        delta0,
        leakage_bound,
        pe_bound,
        pe_bound_msg: pe_msg,
        variant,
        order,
        feasible: k_e > 0,
    }
}

/// How the sequentially conditioned TVDs of bound 1 are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionalEvaluator {
    /// Full pattern enumeration (`n <= 20`).
    Exhaustive,
    MonteCarlo {
        samples: u64,
        seed: u64,
    },
}

impl ConditionalEvaluator {
    /// Profile of the transform with columns taken in `order`, over Eve's channel.
    pub fn evaluate(
        &self,
        code: &CodeConstruction,
        order: &[usize],
        eve: &BitChannelProfile,
    ) -> Result<BitChannelProfile> {
        match *self {
            ConditionalEvaluator::Exhaustive => {
                bitchannel::exhaustive_permuted_profile(code, order, eve.channel())
            }
            ConditionalEvaluator::MonteCarlo { samples, seed } => {
                bitchannel::permuted_profile(code, order, eve.channel(), samples, seed)
            }
        }
    }
}

/// Set selection driven by sequentially conditioned TVDs (bound 1).
///
/// `G` and `B` are fixed as in [`design_bound2`]. Bits are then decoded in
/// the order `B` (ascending), followed by `G` sorted by increasing marginal
/// TVD, and the TVD at each position is conditioned only on the bits before
/// it in that order. `A` is the longest prefix of the `G` part that keeps
/// half the running sum below `delta`.
pub fn design_bound1(
    code: &CodeConstruction,
    bob: &BitChannelProfile,
    eve: &BitChannelProfile,
    op: &SecrecyOperatingPoint,
    evaluator: ConditionalEvaluator,
) -> Result<WiretapDesign> {
    check_profiles(bob, eve, op.n)?;
    if code.n() != op.n {
        return Err(Error::Shape(format!(
            "transform of length {} for blocklength {}",
            code.n(),
            op.n
        )));
    }
    let rel = select_reliable(bob, op.eps);
    let by_t = sort_by_value(rel.good.iter().copied(), |i| eve.tvd(i));
    let mut order = sorted(rel.bad.clone());
    let split = order.len();
    order.extend(&by_t);
    let cond = evaluator.evaluate(code, &order, eve)?;
    let delta0 = 0.5 * (0..split).map(|j| cond.tvd(j)).sum::<f64>();
    let (k_e, leakage) = if delta0 > op.delta {
        (0, delta0)
    } else {
        greedy_prefix(delta0, (split..op.n).map(|j| 0.5 * cond.tvd(j)), op.delta)
    };
    Ok(finish(
        op.n,
        by_t[..k_e].to_vec(),
        by_t[k_e..].to_vec(),
        rel.bad,
        delta0,
        leakage,
        rel.pe_bound,
        bob,
        Variant::Bound1,
        Some(order),
    ))
}

/// Threshold rule for vanishing leakage:
/// `G_n = {i : Z_b,i < 2^(-n^beta) / n}`, `P_n = {i : T_e,i <= delta_n}`,
/// `A = G_n n P_n`, `R = complement of P_n`, `B = P_n \ G_n`.
/// The reported leakage bound is `sum_{P_n} T_e,i`.
pub fn design_asymptotic(
    bob: &BitChannelProfile,
    eve: &BitChannelProfile,
    beta: f64,
    delta_n: f64,
) -> Result<WiretapDesign> {
    let n = bob.n();
    check_profiles(bob, eve, n)?;
    if !(beta > 0.0 && beta < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "beta = {beta} outside (0, 1/2)"
        )));
    }
    let z_threshold = (-(n as f64).powf(beta)).exp2() / n as f64;
    let good: Vec<bool> = (0..n).map(|i| bob.bhattacharyya(i) < z_threshold).collect();
    let secure: Vec<bool> = (0..n).map(|i| eve.tvd(i) <= delta_n).collect();
    let a: Vec<usize> = (0..n).filter(|&i| good[i] && secure[i]).collect();
    let r: Vec<usize> = (0..n).filter(|&i| !secure[i]).collect();
    let b: Vec<usize> = (0..n).filter(|&i| secure[i] && !good[i]).collect();
    let leakage = (0..n).filter(|&i| secure[i]).map(|i| eve.tvd(i)).sum();
    let delta0 = 0.5 * b.iter().map(|&i| eve.tvd(i)).sum::<f64>();
    let pe = a.iter().chain(&r).map(|&i| bob.bhattacharyya(i)).sum();
    Ok(finish(
        n,
        a,
        r,
        b,
        delta0,
        leakage,
        pe,
        bob,
        Variant::Asymptotic,
        None,
    ))
}

/// `1/2 sum_{A u B} T_e,i`.
pub fn bound2_value(a: &[usize], b: &[usize], eve: &BitChannelProfile) -> Result<f64> {
    let n = eve.n();
    let mut seen = vec![false; n];
    for &i in a.iter().chain(b) {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidParameter(format!(
                "index {i} out of range or in both sets"
            )));
        }
    }
    Ok(0.5 * a.iter().chain(b).map(|&i| eve.tvd(i)).sum::<f64>())
}

/// Union bound `sum_{i in G} Z_b,i` on Bob's block error. With
/// `info_set = Some(A)`, only `A` and the indices of `G` not above `max(A)`
/// are counted, since Bob stops decoding after the last message bit.
pub fn pe_bound(g: &[usize], bob: &BitChannelProfile, info_set: Option<&[usize]>) -> f64 {
    match info_set {
        None => g.iter().map(|&i| bob.bhattacharyya(i)).sum(),
        Some(a) => pe_bound_msg(g, bob, a),
    }
}

fn pe_bound_msg(g: &[usize], bob: &BitChannelProfile, a: &[usize]) -> f64 {
    match a.iter().max() {
        None => 0.0,
        Some(&last) => g
            .iter()
            .filter(|&&i| i <= last || a.contains(&i))
            .map(|&i| bob.bhattacharyya(i))
            .sum(),
    }
}

/// Arrangement of `A u B` used to evaluate bound 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound1Order {
    /// `A u B` ascending.
    Natural,
    /// `B` ascending, then `A` by increasing marginal TVD.
    Permuted,
}

/// Decode order whose first `|A| + |B|` positions enumerate `A u B` in the
/// requested arrangement; the remaining positions hold `R`.
pub fn bound1_order(
    design: &WiretapDesign,
    eve: &BitChannelProfile,
    arrangement: Bound1Order,
) -> Vec<usize> {
    let mut order = match arrangement {
        Bound1Order::Natural => sorted(design.set_a.iter().chain(&design.set_b).copied().collect()),
        Bound1Order::Permuted => {
            let mut o = design.set_b.clone();
            o.extend(sort_by_value(design.set_a.iter().copied(), |i| eve.tvd(i)));
            o
        }
    };
    order.extend(sort_by_value(design.set_r.iter().copied(), |i| eve.tvd(i)));
    order
}

/// `1/2 sum_j T~_j` over the first `|A| + |B|` positions of a conditional profile.
pub fn bound1_value(design: &WiretapDesign, conditional: &BitChannelProfile) -> f64 {
    let m = design.set_a.len() + design.set_b.len();
    0.5 * (0..m).map(|j| conditional.tvd(j)).sum::<f64>()
}

pub fn secrecy_capacity(op: &SecrecyOperatingPoint) -> f64 {
    op.p_e - op.p_b
}

/// Gaussian tail `Q(x) = P(N(0,1) > x)`.
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of [`gaussian_q`] by bisection on `[-10, 10]`.
pub fn q_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Q^-1 argument {p} outside (0, 1)"
        )));
    }
    let (mut lo, mut hi) = (-10.0f64, 10.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if gaussian_q(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Normal-approximation benchmarks for the maximal secrecy rate over the
/// erasure wiretap channel (the `O(log n / n)` terms are dropped).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SecondOrderBounds {
    pub capacity: f64,
    pub v_c: f64,
    pub v_b: f64,
    pub v_e: f64,
    pub upper: f64,
    pub lower: f64,
    /// Set when `eps + delta > 1/2`, where `Q^-1` turns negative and the
    /// upper benchmark exceeds the secrecy capacity.
    pub upper_above_capacity: bool,
}

pub fn second_order_bounds(op: &SecrecyOperatingPoint) -> Result<SecondOrderBounds> {
    if op.eps + op.delta >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "eps + delta = {} must be below 1",
            op.eps + op.delta
        )));
    }
    let cs = secrecy_capacity(op);
    let v_c = cs * (1.0 - cs);
    let v_b = op.p_b * (1.0 - op.p_b);
    let v_e = op.p_e * (1.0 - op.p_e);
    let n = op.n as f64;
    let q_sum = q_inverse(op.eps + op.delta)?;
    let upper = cs - (v_c / n).sqrt() * q_sum;
    let lower =
        cs - (v_b / n).sqrt() * q_inverse(op.eps)? - (v_e / n).sqrt() * q_inverse(op.delta)?;
    Ok(SecondOrderBounds {
        capacity: cs,
        v_c,
        v_b,
        v_e,
        upper,
        lower,
        upper_above_capacity: q_sum < 0.0,
    })
}
