//! Polarizing transforms: polar, Reed-Muller ordered, multi-kernel, adjacent-bit
//! swapped (ABS) and random linear.
//!
//! Orientation: the encoder is `x = G u` and bits are decoded in increasing
//! index order. The binary kernel is `[[1, 1], [0, 1]]` (the transpose of the
//! textbook `G_2`), under which bit 0 of a two-bit block is the degraded
//! channel: over BEC(p) the two bit-channels have erasure probabilities
//! `2p - p^2` and `p^2`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bitchannel::{self, BitChannelProfile, Method};
use crate::channel::Bec;
use crate::gf2::{BinMatrix, ErasurePattern, SuffixEngine};
use crate::{derive_seed, Error, Result};

/// Largest kernel for which the full erasure table is tabulated.
pub const MAX_KERNEL_SIZE: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Polar,
    Rm,
    Mk,
    Abs,
    Rl,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Polar,
        Family::Rm,
        Family::Mk,
        Family::Abs,
        Family::Rl,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Polar => "polar",
            Family::Rm => "rm",
            Family::Mk => "mk",
            Family::Abs => "abs",
            Family::Rl => "rl",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "polar" => Ok(Family::Polar),
            "rm" => Ok(Family::Rm),
            "mk" => Ok(Family::Mk),
            "abs" => Ok(Family::Abs),
            "rl" => Ok(Family::Rl),
            other => Err(Error::InvalidParameter(format!(
                "unknown code family '{other}'"
            ))),
        }
    }
}

/// An invertible `l x l` kernel with its tabulated erasure behaviour.
///
/// `undecodable[mask]` holds, for the erasure pattern `mask` on the kernel
/// outputs, the set of kernel inputs that successive decoding cannot recover.
#[derive(Clone, Debug)]
pub struct Kernel {
    matrix: BinMatrix,
    undecodable: Vec<u32>,
    // counts[i * (l + 1) + w]: weight-w patterns under which input i is lost
    counts: Vec<u64>,
}

impl PartialEq for Kernel {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl Kernel {
    pub fn new(matrix: BinMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let l = matrix.rows();
        if l == 0 {
            return Err(Error::InvalidParameter("empty kernel".into()));
        }
        if l > MAX_KERNEL_SIZE {
            return Err(Error::TooLarge {
                n: l,
                limit: MAX_KERNEL_SIZE,
            });
        }
        let engine = SuffixEngine::new(&matrix)?;
        let mut scratch = engine.scratch();
        let mut out = [0u64; 1];
        let mut undecodable = Vec::with_capacity(1 << l);
        let mut counts = vec![0u64; l * (l + 1)];
        for mask in 0..(1u64 << l) {
            engine.undecodable_into(&ErasurePattern::from_mask(l, mask), &mut scratch, &mut out);
            let w = mask.count_ones() as usize;
            for i in crate::gf2::ones(&out) {
                counts[i * (l + 1) + w] += 1;
            }
            undecodable.push(out[0] as u32);
        }
        Ok(Self {
            matrix,
            undecodable,
            counts,
        })
    }

    /// The binary kernel `[[1, 1], [0, 1]]`.
    pub fn g2() -> Self {
        Self::new(BinMatrix::from_rows(&[[1u8, 1], [0, 1]])).expect("G2 is invertible")
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &BinMatrix {
        &self.matrix
    }

    /// True iff kernel input `i` is recoverable under the output erasure pattern `mask`.
    pub fn is_decodable(&self, i: usize, mask: u32) -> bool {
        (self.undecodable[mask as usize] >> i) & 1 == 0
    }

    /// Number of weight-`w` erasure patterns under which input `i` is lost, for `w = 0..=l`.
    pub fn erasure_counts(&self, i: usize) -> &[u64] {
        let l = self.size();
        &self.counts[i * (l + 1)..(i + 1) * (l + 1)]
    }

    /// `f_i(q)`: erasure probability of kernel bit-channel `i` over BEC(q).
    pub fn erasure_prob(&self, i: usize, q: f64) -> f64 {
        bernstein_eval(self.erasure_counts(i), q)
    }

    /// `(f_0(q), ..., f_{l-1}(q))`.
    pub fn split(&self, q: f64) -> Vec<f64> {
        (0..self.size()).map(|i| self.erasure_prob(i, q)).collect()
    }

    /// Coefficients `c_k` of `f_i(q) = sum_k c_k q^k`, lowest degree first.
    pub fn polynomial(&self, i: usize) -> Vec<i64> {
        let l = self.size();
        let mut coeffs = vec![0i64; l + 1];
        for (w, &c) in self.erasure_counts(i).iter().enumerate() {
            if c == 0 {
                continue;
            }
            // q^w (1 - q)^(l - w)
            let mut binom: i64 = 1;
            for k in 0..=(l - w) {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                coeffs[w + k] += sign * c as i64 * binom;
                binom = binom * (l - w - k) as i64 / (k + 1) as i64;
            }
        }
        coeffs
    }

    /// Parses the text format: first line `l`, then `l` lines of `l` characters in `{0,1}`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let size: usize = lines
            .next()
            .ok_or_else(|| Error::KernelFormat("empty file".into()))?
            .parse()
            .map_err(|e| Error::KernelFormat(format!("bad size line: {e}")))?;
        let mut rows = Vec::with_capacity(size);
        for (r, line) in lines.by_ref().take(size).enumerate() {
            let row: Vec<u8> = line
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    other => Err(Error::KernelFormat(format!(
                        "row {r}: unexpected character '{other}'"
                    ))),
                })
                .collect::<Result<_>>()?;
            if row.len() != size {
                return Err(Error::KernelFormat(format!(
                    "row {r} has {} entries, expected {size}",
                    row.len()
                )));
            }
            rows.push(row);
        }
        if rows.len() != size {
            return Err(Error::KernelFormat(format!(
                "expected {size} rows, found {}",
                rows.len()
            )));
        }
        if lines.next().is_some() {
            return Err(Error::KernelFormat(
                "trailing content after matrix rows".into(),
            ));
        }
        Self::new(BinMatrix::from_rows(&rows))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::KernelFormat(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        format!("{}\n{}", self.size(), self.matrix)
    }
}

/// `sum_w counts[w] q^w (1 - q)^(len - 1 - w)`.
pub(crate) fn bernstein_eval(counts: &[u64], q: f64) -> f64 {
    let l = counts.len() - 1;
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(w, &c)| c as f64 * q.powi(w as i32) * (1.0 - q).powi((l - w) as i32))
        .sum()
}

/// Adjacent transposition `(position, position + 1)` of inputs applied at `depth`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Swap {
    pub depth: usize,
    pub position: usize,
}

/// Channel evaluation used while building an ABS transform.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsBudget {
    /// Partial transforms up to this size are evaluated by full enumeration.
    pub exhaustive_max_n: usize,
    /// Monte-Carlo samples per channel for larger partial transforms.
    pub samples: u64,
    pub seed: u64,
}

impl Default for AbsBudget {
    fn default() -> Self {
        Self {
            exhaustive_max_n: 16,
            samples: 20_000,
            seed: 0,
        }
    }
}

/// Channel parameters seen when deciding the swaps at one depth.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbsDepthRecord {
    pub depth: usize,
    pub method: Method,
    pub bob: Vec<f64>,
    pub eve: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Provenance {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Kernel sizes in Kronecker order (outermost first).
    pub kernels: Vec<usize>,
    pub swaps: Vec<Swap>,
    pub weight_ordered: bool,
    /// For weight-ordered transforms: new column `j` is polar column `column_order[j]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column_order: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_budget: Option<AbsBudget>,
    #[serde(skip)]
    pub abs_records: Vec<AbsDepthRecord>,
}

/// A code family instance: the invertible transform plus how it was built.
#[derive(Clone, Debug)]
pub struct CodeConstruction {
    family: Family,
    transform: BinMatrix,
    kernels: Vec<Kernel>,
    provenance: Provenance,
}

impl CodeConstruction {
    /// Wraps an arbitrary invertible transform (decoded in natural order).
    pub fn custom(family: Family, transform: BinMatrix) -> Result<Self> {
        if !transform.is_invertible()? {
            return Err(Error::Singular);
        }
        Ok(Self {
            family,
            transform,
            kernels: Vec::new(),
            provenance: Provenance::default(),
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.transform.rows()
    }

    pub fn transform(&self) -> &BinMatrix {
        &self.transform
    }

    /// Kernel sequence for Kronecker-structured families (polar, MK).
    pub fn kernels(&self) -> &[Kernel] {
        &self.kernels
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `x = G u`.
    pub fn encode(&self, u: &[u8]) -> Vec<u8> {
        self.transform.mul_vec(u)
    }

    /// Recovers `u` from an unerased codeword.
    pub fn decode_clean(&self, x: &[u8]) -> Result<Vec<u8>> {
        Ok(self.transform.inverse()?.mul_vec(x))
    }

    /// Transform with columns taken in `order`: decode position `j` carries bit `order[j]`.
    pub fn permuted(&self, order: &[usize]) -> Result<BinMatrix> {
        self.transform.permute_columns(order)
    }
}

fn check_depth(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "number of layers must be at least 1".into(),
        ));
    }
    if m > 16 {
        return Err(Error::TooLarge {
            n: 1 << m.min(63),
            limit: 1 << 16,
        });
    }
    Ok(())
}

fn kron_power(kernel: &Kernel, m: usize) -> BinMatrix {
    (0..m).fold(BinMatrix::identity(1), |acc, _| acc.kron(kernel.matrix()))
}

/// Polar transform of length `2^m`, no bit-reversal.
pub fn polar_transform(m: usize) -> Result<CodeConstruction> {
    check_depth(m)?;
    let g2 = Kernel::g2();
    Ok(CodeConstruction {
        family: Family::Polar,
        transform: kron_power(&g2, m),
        kernels: vec![g2; m],
        provenance: Provenance {
            kernels: vec![2; m],
            ..Provenance::default()
        },
    })
}

/// Polar transform with inputs reordered by increasing generator weight
/// (the Hamming weight of each input's column); ties keep natural order.
pub fn rm_transform(m: usize) -> Result<CodeConstruction> {
    let polar = polar_transform(m)?;
    let n = polar.n();
    let weights: Vec<usize> = (0..n).map(|j| polar.transform.column_weight(j)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| weights[j]);
    let transform = polar.transform.permute_columns(&order)?;
    Ok(CodeConstruction {
        family: Family::Rm,
        transform,
        kernels: Vec::new(),
        provenance: Provenance {
            kernels: vec![2; m],
            weight_ordered: true,
            column_order: Some(order),
            ..Provenance::default()
        },
    })
}

/// Kronecker product of the kernels in the given order (first is outermost,
/// i.e. closest to the channel).
pub fn mk_transform(kernels: &[Kernel]) -> Result<CodeConstruction> {
    if kernels.is_empty() {
        return Err(Error::InvalidParameter("kernel list is empty".into()));
    }
    let n: usize = kernels.iter().map(Kernel::size).product();
    if n > 1 << 16 {
        return Err(Error::TooLarge { n, limit: 1 << 16 });
    }
    let transform = kernels
        .iter()
        .fold(BinMatrix::identity(1), |acc, k| acc.kron(k.matrix()));
    Ok(CodeConstruction {
        family: Family::Mk,
        transform,
        kernels: kernels.to_vec(),
        provenance: Provenance {
            kernels: kernels.iter().map(Kernel::size).collect(),
            ..Provenance::default()
        },
    })
}

/// ABS-style transform adapted to the wiretap pair (Bob, Eve).
///
/// Built one binary layer at a time: at depth `t` the partial transform is
/// `G_t = G_{t-1} (x) K`, so `G_{t-1}` sits on the channel side and the new
/// layer splits each of its bit-channels into a (minus, plus) pair at
/// positions `(2j, 2j+1)`. The pairs crossing those boundaries,
/// `(2j+1, 2j+2)`, are candidates; a candidate is swapped when its first
/// bit is at least as good as the second for both channels, i.e.
/// `p_b[i] <= p_b[i+1]` and `p_e[i] <= p_e[i+1]`. Swapping the columns makes
/// the better bit be decoded last. With no swaps the result equals
/// [`polar_transform`].
pub fn abs_transform(m: usize, p_b: Bec, p_e: Bec, budget: AbsBudget) -> Result<CodeConstruction> {
    build_abs(m, p_b, p_e, budget, |_| true)
}

fn build_abs(
    m: usize,
    p_b: Bec,
    p_e: Bec,
    budget: AbsBudget,
    allow: impl Fn(Swap) -> bool,
) -> Result<CodeConstruction> {
    check_depth(m)?;
    let g2 = Kernel::g2();
    let mut g = BinMatrix::identity(1);
    let mut swaps = Vec::new();
    let mut records = Vec::with_capacity(m);
    for depth in 1..=m {
        g = g.kron(g2.matrix());
        let size = g.rows();
        let (bob, eve) = abs_evaluate(&g, depth, p_b, p_e, &budget)?;
        let mut used = vec![false; size];
        let mut i = 1;
        while i + 1 < size {
            if !used[i]
                && !used[i + 1]
                && allow(Swap { depth, position: i })
                && bob.erasure()[i] <= bob.erasure()[i + 1]
                && eve.erasure()[i] <= eve.erasure()[i + 1]
            {
                g.swap_columns(i, i + 1);
                used[i] = true;
                used[i + 1] = true;
                swaps.push(Swap { depth, position: i });
            }
            i += 2;
        }
        records.push(AbsDepthRecord {
            depth,
            method: bob.method(),
            bob: bob.erasure().to_vec(),
            eve: eve.erasure().to_vec(),
        });
    }
    Ok(CodeConstruction {
        family: Family::Abs,
        transform: g,
        kernels: Vec::new(),
        provenance: Provenance {
            seed: Some(budget.seed),
            kernels: vec![2; m],
            swaps,
            abs_budget: Some(budget),
            abs_records: records,
            ..Provenance::default()
        },
    })
}

fn abs_evaluate(
    g: &BinMatrix,
    depth: usize,
    p_b: Bec,
    p_e: Bec,
    budget: &AbsBudget,
) -> Result<(BitChannelProfile, BitChannelProfile)> {
    if g.rows() <= budget.exhaustive_max_n.min(bitchannel::EXHAUSTIVE_MAX_N) {
        let spectrum = bitchannel::ErasureSpectrum::of(g)?;
        Ok((spectrum.profile(p_b), spectrum.profile(p_e)))
    } else {
        let seed = |who: u64| derive_seed(budget.seed, &[depth as u64, who]);
        let engine = SuffixEngine::new(g)?;
        Ok((
            bitchannel::mc_profile_engine(&engine, p_b, budget.samples, seed(0))?,
            bitchannel::mc_profile_engine(&engine, p_e, budget.samples, seed(1))?,
        ))
    }
}

/// Uniformly random invertible transform.
pub fn rl_transform(n: usize, seed: u64) -> Result<CodeConstruction> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "blocklength must be positive".into(),
        ));
    }
    Ok(CodeConstruction {
        family: Family::Rl,
        transform: BinMatrix::random_invertible(n, seed),
        kernels: Vec::new(),
        provenance: Provenance {
            seed: Some(seed),
            ..Provenance::default()
        },
    })
}
