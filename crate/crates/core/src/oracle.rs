//! Exact small-blocklength ground truth: leakage in total variation, SC
//! block error over the erasure channel and sequentially conditioned TVDs.

use std::collections::HashMap;

use serde::Serialize;

use crate::bitchannel::{self, BitChannelProfile};
use crate::channel::Bec;
use crate::gf2::{rank_increase_profile, BinMatrix, ErasurePattern};
use crate::transforms::CodeConstruction;
use crate::wiretap::{self, Bound1Order, WiretapDesign};
use crate::{Error, Result};

pub const LEAKAGE_MAX_N: usize = 12;
pub const LEAKAGE_MAX_FREE_BITS: usize = 16;
pub const BLOCK_ERROR_MAX_N: usize = 20;

/// Exact and bounded quantities for one (code, design, p_b, p_e).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeakageReport {
    pub n: usize,
    pub p_b: f64,
    pub p_e: f64,
    pub set_a: Vec<usize>,
    pub set_r: Vec<usize>,
    pub set_b: Vec<usize>,
    pub exact_leakage: f64,
    pub bound1_natural: f64,
    pub bound1_permuted: f64,
    pub bound2: f64,
    pub exact_pe: f64,
    pub pe_bound: f64,
    pub exact_pe_msg: f64,
    pub pe_bound_msg: f64,
}

/// Slack used when comparing exact values with their bounds.
pub const CHAIN_TOLERANCE: f64 = 1e-9;

impl LeakageReport {
    /// Names of the inequalities that fail, empty when the whole chain holds.
    pub fn violations(&self) -> Vec<&'static str> {
        let t = CHAIN_TOLERANCE;
        let checks = [
            (
                "exact_leakage <= bound1_natural",
                self.exact_leakage <= self.bound1_natural + t,
            ),
            (
                "bound1_natural <= bound2",
                self.bound1_natural <= self.bound2 + t,
            ),
            (
                "exact_leakage <= bound1_permuted",
                self.exact_leakage <= self.bound1_permuted + t,
            ),
            ("exact_pe <= pe_bound", self.exact_pe <= self.pe_bound + t),
            (
                "exact_pe_msg <= exact_pe",
                self.exact_pe_msg <= self.exact_pe + t,
            ),
            (
                "pe_bound_msg <= pe_bound",
                self.pe_bound_msg <= self.pe_bound + t,
            ),
            (
                "leakage within [0, 1]",
                (-t..=1.0 + t).contains(&self.exact_leakage),
            ),
            (
                "exact_pe within [0, 1]",
                (-t..=1.0 + t).contains(&self.exact_pe),
            ),
        ];
        checks
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(name, _)| name)
            .collect()
    }
}

/// Runs every oracle on one design.
pub fn leakage_report(
    code: &CodeConstruction,
    design: &WiretapDesign,
    p_b: Bec,
    p_e: Bec,
) -> Result<LeakageReport> {
    let eve = bitchannel::exhaustive_profile(code, p_e)?;
    let bob = bitchannel::exhaustive_profile(code, p_b)?;
    let bound1 = |arrangement| -> Result<f64> {
        let order = wiretap::bound1_order(design, &eve, arrangement);
        let tilde = exact_permuted_tvds(code, &order, p_e)?;
        let m = design.set_a.len() + design.set_b.len();
        Ok(0.5 * tilde[..m].iter().sum::<f64>())
    };
    let g = design.good_set();
    Ok(LeakageReport {
        n: code.n(),
        p_b: p_b.erasure_prob(),
        p_e: p_e.erasure_prob(),
        set_a: design.set_a.clone(),
        set_r: design.set_r.clone(),
        set_b: design.set_b.clone(),
        exact_leakage: exact_leakage(code, design, p_e)?,
        bound1_natural: bound1(Bound1Order::Natural)?,
        bound1_permuted: bound1(Bound1Order::Permuted)?,
        bound2: wiretap::bound2_value(&design.set_a, &design.set_b, &eve)?,
        exact_pe: exact_block_error(code, design, p_b, false)?,
        pe_bound: wiretap::pe_bound(&g, &bob, None),
        exact_pe_msg: exact_block_error(code, design, p_b, true)?,
        pe_bound_msg: wiretap::pe_bound(&g, &bob, Some(&design.set_a)),
    })
}

fn check_design(code: &CodeConstruction, design: &WiretapDesign) -> Result<()> {
    let n = code.n();
    let mut seen = vec![false; n];
    for &i in design
        .set_a
        .iter()
        .chain(&design.set_r)
        .chain(&design.set_b)
    {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidParameter(format!(
                "design index {i} out of range or repeated"
            )));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidParameter(
            "design sets do not cover every index".into(),
        ));
    }
    Ok(())
}

/// Columns of `g` as bit masks over rows (`n <= 64`).
fn column_masks(g: &BinMatrix) -> Vec<u64> {
    (0..g.cols())
        .map(|j| (0..g.rows()).fold(0u64, |acc, i| acc | ((g.get(i, j) as u64) << i)))
        .collect()
}

fn pattern_weight(erased: u64, n: usize, p: f64) -> f64 {
    let e = erased.count_ones() as i32;
    p.powi(e) * (1.0 - p).powi(n as i32 - e)
}

/// Erasure masks with nonzero probability.
fn patterns(n: usize, p: f64) -> impl Iterator<Item = (u64, f64)> {
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let only = if p == 0.0 {
        Some(0)
    } else if p == 1.0 {
        Some(full)
    } else {
        None
    };
    let range: Box<dyn Iterator<Item = u64>> = match only {
        Some(mask) => Box::new(std::iter::once(mask)),
        None => Box::new(0..=full),
    };
    range.map(move |e| (e, pattern_weight(e, n, p)))
}

/// Exact `S(M^k | Z^n)`: total variation between the joint law of message
/// and Eve's observation and the product of the marginals, with frozen bits
/// set to zero.
pub fn exact_leakage(code: &CodeConstruction, design: &WiretapDesign, p_e: Bec) -> Result<f64> {
    exact_leakage_with_frozen(code, design, p_e, &vec![0; design.set_b.len()])
}

/// [`exact_leakage`] with `U_B` fixed to `frozen` (listed in the order of
/// `design.set_b`).
pub fn exact_leakage_with_frozen(
    code: &CodeConstruction,
    design: &WiretapDesign,
    p_e: Bec,
    frozen: &[u8],
) -> Result<f64> {
    let n = code.n();
    if n > LEAKAGE_MAX_N {
        return Err(Error::TooLarge {
            n,
            limit: LEAKAGE_MAX_N,
        });
    }
    check_design(code, design)?;
    let (k, r) = (design.set_a.len(), design.set_r.len());
    if k + r > LEAKAGE_MAX_FREE_BITS {
        return Err(Error::TooLarge {
            n: k + r,
            limit: LEAKAGE_MAX_FREE_BITS,
        });
    }
    if frozen.len() != design.set_b.len() {
        return Err(Error::Shape(format!(
            "{} frozen values for {} frozen indices",
            frozen.len(),
            design.set_b.len()
        )));
    }
    if k == 0 {
        return Ok(0.0);
    }
    let cols = column_masks(code.transform());
    let base = design
        .set_b
        .iter()
        .zip(frozen)
        .filter(|(_, &v)| v & 1 == 1)
        .fold(0u64, |acc, (&i, _)| acc ^ cols[i]);
    let span = |set: &[usize], bits: u64| {
        set.iter()
            .enumerate()
            .filter(|(t, _)| bits >> t & 1 == 1)
            .fold(0u64, |acc, (_, &i)| acc ^ cols[i])
    };
    let msg_words: Vec<u64> = (0..1u64 << k).map(|m| span(&design.set_a, m)).collect();
    let rand_words: Vec<u64> = (0..1u64 << r).map(|v| span(&design.set_r, v)).collect();

    let p_m = 1.0 / (1u64 << k) as f64;
    let p_v = 1.0 / (1u64 << r) as f64;
    let mut joint: HashMap<(u64, u64), f64> = HashMap::new();
    let mut marginal: HashMap<u64, (f64, u64)> = HashMap::new();
    let mut total = 0.0;
    for (erased, weight) in patterns(n, p_e.erasure_prob()) {
        let keep = !erased;
        joint.clear();
        marginal.clear();
        for (m, &xm) in msg_words.iter().enumerate() {
            for &xv in &rand_words {
                let z = (base ^ xm ^ xv) & keep;
                *joint.entry((m as u64, z)).or_insert(0.0) += p_m * p_v;
            }
        }
        for (&(_, z), &p) in &joint {
            let e = marginal.entry(z).or_insert((0.0, 0));
            e.0 += p;
            e.1 += 1;
        }
        // pairs (m, z) that never occur contribute p(m) p(z) each
        let mut tvd = 0.0;
        for (&(_, z), &p) in &joint {
            tvd += (p - p_m * marginal[&z].0).abs();
        }
        for &(pz, seen) in marginal.values() {
            tvd += ((1u64 << k) - seen) as f64 * p_m * pz;
        }
        total += weight * 0.5 * tvd;
    }
    Ok(total)
}

/// Leakage through the rank identity: for each erasure pattern the
/// contribution is `1 - 2^(rank(R cols) - rank(A u R cols))` restricted to
/// the unerased rows. Agrees with [`exact_leakage`] and scales to larger `n`.
pub fn rank_leakage(code: &CodeConstruction, design: &WiretapDesign, p_e: Bec) -> Result<f64> {
    let n = code.n();
    if n > BLOCK_ERROR_MAX_N {
        return Err(Error::TooLarge {
            n,
            limit: BLOCK_ERROR_MAX_N,
        });
    }
    check_design(code, design)?;
    if design.set_a.is_empty() {
        return Ok(0.0);
    }
    let g = code.transform();
    let mut order: Vec<usize> = design.set_a.clone();
    order.extend(&design.set_r);
    // columns of A u R with A first; the rank increase of the A columns
    // measured against later (R) columns splits the two ranks
    let sub = BinMatrix::from_fn(n, order.len(), |i, j| g.get(i, order[j]));
    let k = design.set_a.len();
    let mut total = 0.0;
    for (erased, weight) in patterns(n, p_e.erasure_prob()) {
        let pattern = ErasurePattern::from_mask(n, erased);
        let raises = rank_increase_profile(&sub, &pattern);
        let gap = raises[..k].iter().filter(|&&b| b).count() as i32;
        total += weight * (1.0 - (-gap as f64).exp2());
    }
    Ok(total)
}

/// Exact probability that SC decoding over `BEC(p_b)` loses some bit of
/// `G = A u R`. With `msg_prefix`, only `A` and the bits of `R` below `max(A)`
/// are required. Frozen bits are known to the decoder.
pub fn exact_block_error(
    code: &CodeConstruction,
    design: &WiretapDesign,
    p_b: Bec,
    msg_prefix: bool,
) -> Result<f64> {
    let n = code.n();
    if n > BLOCK_ERROR_MAX_N {
        return Err(Error::TooLarge {
            n,
            limit: BLOCK_ERROR_MAX_N,
        });
    }
    check_design(code, design)?;
    let checked: Vec<usize> = if msg_prefix {
        match design.set_a.iter().max() {
            None => Vec::new(),
            Some(&last) => design
                .good_set()
                .into_iter()
                .filter(|&i| i <= last)
                .collect(),
        }
    } else {
        design.good_set()
    };
    if checked.is_empty() {
        return Ok(0.0);
    }
    let g = code.transform();
    let mut frozen = vec![false; n];
    for &i in &design.set_b {
        frozen[i] = true;
    }
    // known frozen bits can be subtracted from the observation
    let reduced = BinMatrix::from_fn(n, n, |i, j| !frozen[j] && g.get(i, j));
    let mut total = 0.0;
    for (erased, weight) in patterns(n, p_b.erasure_prob()) {
        let ok = rank_increase_profile(&reduced, &ErasurePattern::from_mask(n, erased));
        if checked.iter().any(|&i| !ok[i]) {
            total += weight;
        }
    }
    Ok(total)
}

/// Exact sequentially conditioned TVDs `T~_j = 1 - p~_j` of the transform
/// with columns taken in `order`.
pub fn exact_permuted_tvds(code: &CodeConstruction, order: &[usize], p_e: Bec) -> Result<Vec<f64>> {
    let profile: BitChannelProfile = bitchannel::exhaustive_permuted_profile(code, order, p_e)?;
    Ok(profile.tvds())
}
