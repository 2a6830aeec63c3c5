//! Dense GF(2) matrices packed into machine words, and the suffix-rank engine
//! that decides which input bits of an invertible transform survive an erasure
//! pattern under successive decoding.

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

const WORD_BITS: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
fn tail_mask(bits: usize) -> u64 {
    match bits % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Dense binary matrix, row-major, one bit per entry.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl BinMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            bits: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from rows of 0/1 entries. Any nonzero entry counts as 1.
    ///
    /// # Panics
    ///
    /// Panics if the rows have different lengths.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        (self.bits[i * self.stride + j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let w = &mut self.bits[i * self.stride + j / WORD_BITS];
        let bit = 1u64 << (j % WORD_BITS);
        if value {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    /// Packed words of row `i`; bit `j % 64` of word `j / 64` is entry `(i, j)`.
    #[inline]
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.stride..(i + 1) * self.stride]
    }

    pub(crate) fn stride(&self) -> usize {
        self.stride
    }

    pub(crate) fn raw(&self) -> &[u64] {
        &self.bits
    }

    pub fn row(&self, i: usize) -> Vec<u8> {
        (0..self.cols).map(|j| self.get(i, j) as u8).collect()
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.row_words(i)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn column_weight(&self, j: usize) -> usize {
        (0..self.rows).filter(|&i| self.get(i, j)).count()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in ones(self.row_words(i)) {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Matrix product over GF(2).
    ///
    /// # Panics
    ///
    /// Panics if `self.cols() != other.rows()`.
    pub fn mul(&self, other: &BinMatrix) -> BinMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        let stride = out.stride;
        for i in 0..self.rows {
            let dst = &mut out.bits[i * stride..(i + 1) * stride];
            for k in ones(&self.bits[i * self.stride..(i + 1) * self.stride]) {
                xor_into(dst, other.row_words(k));
            }
        }
        out
    }

    /// Computes `self * v` for a column vector of 0/1 entries.
    pub fn mul_vec(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(
            v.len(),
            self.cols,
            "vector length differs from column count"
        );
        let packed = pack(v);
        (0..self.rows)
            .map(|i| {
                let parity: u32 = self
                    .row_words(i)
                    .iter()
                    .zip(&packed)
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                (parity & 1) as u8
            })
            .collect()
    }

    /// Kronecker product; block `(i, j)` of the result is `self[i][j] * other`.
    pub fn kron(&self, other: &BinMatrix) -> BinMatrix {
        let (r, c) = (other.rows, other.cols);
        let mut out = Self::zeros(self.rows * r, self.cols * c);
        for i in 0..self.rows {
            for j in ones(self.row_words(i)) {
                for bi in 0..r {
                    for bj in ones(other.row_words(bi)) {
                        out.set(i * r + bi, j * c + bj, true);
                    }
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut basis = EchelonBasis::new(self.cols, PivotKey::Highest);
        let mut buf = vec![0u64; self.stride];
        (0..self.rows)
            .filter(|&i| {
                buf.copy_from_slice(self.row_words(i));
                basis.insert(&mut buf).is_some()
            })
            .count()
    }

    pub fn is_invertible(&self) -> Result<bool> {
        self.ensure_square()?;
        Ok(self.rank() == self.rows)
    }

    /// Inverse over GF(2) by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<BinMatrix> {
        self.ensure_square()?;
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let stride = self.stride;
        for col in 0..n {
            let word = col / WORD_BITS;
            let bit = 1u64 << (col % WORD_BITS);
            let pivot = (col..n)
                .find(|&r| a.bits[r * stride + word] & bit != 0)
                .ok_or(Error::Singular)?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let src_a = a.row_words(col).to_vec();
            let src_i = inv.row_words(col).to_vec();
            for r in 0..n {
                if r != col && a.bits[r * stride + word] & bit != 0 {
                    xor_into(&mut a.bits[r * stride..(r + 1) * stride], &src_a);
                    xor_into(&mut inv.bits[r * stride..(r + 1) * stride], &src_i);
                }
            }
        }
        Ok(inv)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.stride {
            self.bits.swap(a * self.stride + k, b * self.stride + k);
        }
    }

    pub fn swap_columns(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            let (va, vb) = (self.get(i, a), self.get(i, b));
            if va != vb {
                self.set(i, a, vb);
                self.set(i, b, va);
            }
        }
    }

    /// Returns the matrix whose column `j` is column `order[j]` of `self`.
    pub fn permute_columns(&self, order: &[usize]) -> Result<BinMatrix> {
        check_permutation(order, self.cols)?;
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for (j, &src) in order.iter().enumerate() {
                if self.get(i, src) {
                    out.set(i, j, true);
                }
            }
        }
        Ok(out)
    }

    /// Uniform Bernoulli(1/2) matrix, resampled until invertible.
    ///
    /// Attempt `t` draws from the ChaCha stream `t` of `seed`, so the result
    /// depends only on `(n, seed)`.
    pub fn random_invertible(n: usize, seed: u64) -> BinMatrix {
        assert!(n >= 1, "n must be positive");
        let mut attempt = 0u64;
        loop {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(attempt);
            let mut m = Self::zeros(n, n);
            let mask = tail_mask(n);
            for i in 0..n {
                let row = &mut m.bits[i * m.stride..(i + 1) * m.stride];
                for w in row.iter_mut() {
                    *w = rng.next_u64();
                }
                row[m.stride - 1] &= mask;
            }
            if m.rank() == n {
                return m;
            }
            attempt += 1;
        }
    }

    fn ensure_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

impl fmt::Debug for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinMatrix {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub fn kron(a: &BinMatrix, b: &BinMatrix) -> BinMatrix {
    a.kron(b)
}

pub fn rank(a: &BinMatrix) -> usize {
    a.rank()
}

pub fn is_invertible(a: &BinMatrix) -> Result<bool> {
    a.is_invertible()
}

pub fn random_invertible(n: usize, seed: u64) -> BinMatrix {
    BinMatrix::random_invertible(n, seed)
}

pub(crate) fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "length {} differs from {n}",
            order.len()
        )));
    }
    let mut seen = vec![false; n];
    for &o in order {
        if o >= n || std::mem::replace(&mut seen[o], true) {
            return Err(Error::InvalidPermutation(format!(
                "entry {o} is out of range or repeated"
            )));
        }
    }
    Ok(())
}

#[inline]
fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn pack(v: &[u8]) -> Vec<u64> {
    let mut out = vec![0u64; words_for(v.len())];
    for (i, &b) in v.iter().enumerate() {
        if b != 0 {
            out[i / WORD_BITS] |= 1 << (i % WORD_BITS);
        }
    }
    out
}

/// Iterates the positions of set bits in a packed bit vector, ascending.
pub(crate) fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(k, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * WORD_BITS + t)
            }
        })
    })
}

/// Erasure pattern over `len` output positions; a set bit means erased.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ErasurePattern {
    len: usize,
    words: Vec<u64>,
}

impl ErasurePattern {
    pub fn none(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn all(len: usize) -> Self {
        let mut p = Self::none(len);
        for i in 0..len {
            p.set_erased(i, true);
        }
        p
    }

    pub fn from_erased(len: usize, erased: &[usize]) -> Self {
        let mut p = Self::none(len);
        for &i in erased {
            p.set_erased(i, true);
        }
        p
    }

    pub fn from_unerased(len: usize, unerased: &[usize]) -> Self {
        let mut p = Self::all(len);
        for &i in unerased {
            p.set_erased(i, false);
        }
        p
    }

    /// Pattern from the low `len` bits of `mask` (`len <= 64`).
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= WORD_BITS);
        let mut p = Self::none(len);
        if len > 0 {
            p.words[0] = mask & tail_mask(len);
        }
        p
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn is_erased(&self, i: usize) -> bool {
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set_erased(&mut self, i: usize, erased: bool) {
        assert!(i < self.len, "position {i} out of range");
        let bit = 1u64 << (i % WORD_BITS);
        if erased {
            self.words[i / WORD_BITS] |= bit;
        } else {
            self.words[i / WORD_BITS] &= !bit;
        }
    }

    pub fn erased_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn erased(&self) -> impl Iterator<Item = usize> + '_ {
        ones(&self.words)
    }

    pub fn unerased(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| !self.is_erased(i))
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum PivotKey {
    Highest,
    Lowest,
}

const NO_SLOT: u32 = u32::MAX;

/// Incremental echelon basis over packed vectors; every stored vector has a
/// distinct pivot (its highest or lowest set bit).
pub(crate) struct EchelonBasis {
    bits: usize,
    stride: usize,
    key: PivotKey,
    slot: Vec<u32>,
    pivots: Vec<usize>,
    store: Vec<u64>,
}

impl EchelonBasis {
    pub(crate) fn new(bits: usize, key: PivotKey) -> Self {
        Self {
            bits,
            stride: words_for(bits),
            key,
            slot: vec![NO_SLOT; bits],
            pivots: Vec::new(),
            store: Vec::new(),
        }
    }

    pub(crate) fn clear(&mut self) {
        for &p in &self.pivots {
            self.slot[p] = NO_SLOT;
        }
        self.pivots.clear();
        self.store.clear();
    }

    pub(crate) fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` against the basis; if a nonzero remainder is left it is
    /// stored and its pivot returned. `v` is clobbered.
    pub(crate) fn insert(&mut self, v: &mut [u64]) -> Option<usize> {
        debug_assert_eq!(v.len(), self.stride);
        let stride = self.stride;
        match self.key {
            PivotKey::Highest => {
                let mut top = stride;
                loop {
                    while top > 0 && v[top - 1] == 0 {
                        top -= 1;
                    }
                    if top == 0 {
                        return None;
                    }
                    let w = top - 1;
                    let p = w * WORD_BITS + (WORD_BITS - 1 - v[w].leading_zeros() as usize);
                    let s = self.slot[p];
                    if s == NO_SLOT {
                        return Some(self.push(v, p));
                    }
                    let base = s as usize * stride;
                    xor_into(&mut v[..=w], &self.store[base..=base + w]);
                }
            }
            PivotKey::Lowest => {
                let mut bottom = 0;
                loop {
                    while bottom < stride && v[bottom] == 0 {
                        bottom += 1;
                    }
                    if bottom == stride {
                        return None;
                    }
                    let p = bottom * WORD_BITS + v[bottom].trailing_zeros() as usize;
                    let s = self.slot[p];
                    if s == NO_SLOT {
                        return Some(self.push(v, p));
                    }
                    let base = s as usize * stride;
                    xor_into(&mut v[bottom..], &self.store[base + bottom..base + stride]);
                }
            }
        }
    }

    fn push(&mut self, v: &[u64], pivot: usize) -> usize {
        debug_assert!(pivot < self.bits);
        self.slot[pivot] = self.pivots.len() as u32;
        self.pivots.push(pivot);
        self.store.extend_from_slice(v);
        pivot
    }
}

/// Decides, for every erasure pattern, which input bits of an invertible
/// transform `G` are recoverable by successive decoding.
///
/// Input bit `i` is recoverable iff column `i` of `G` restricted to the
/// unerased rows is independent of columns `i+1..n` on the same rows.
/// Two equivalent row-space routes are used, whichever is cheaper:
///
/// - unerased rows of `G`, reduced on their highest bit: the pivot set is the
///   recoverable set;
/// - columns of `G^{-1}` indexed by erased positions, reduced on their lowest
///   bit: the pivot set is the unrecoverable set.
pub struct SuffixEngine {
    n: usize,
    stride: usize,
    rows: Vec<u64>,
    dual_rows: Vec<u64>,
}

/// Reusable buffers for [`SuffixEngine`] queries.
pub struct SuffixScratch {
    high: EchelonBasis,
    low: EchelonBasis,
    buf: Vec<u64>,
}

impl SuffixEngine {
    pub fn new(g: &BinMatrix) -> Result<Self> {
        let inv = g.inverse()?;
        let dual = inv.transpose();
        Ok(Self {
            n: g.rows(),
            stride: g.stride(),
            rows: g.raw().to_vec(),
            dual_rows: dual.raw().to_vec(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scratch(&self) -> SuffixScratch {
        SuffixScratch {
            high: EchelonBasis::new(self.n, PivotKey::Highest),
            low: EchelonBasis::new(self.n, PivotKey::Lowest),
            buf: vec![0; self.stride],
        }
    }

    /// Writes the set of unrecoverable input bits into `out` as a packed mask.
    pub fn undecodable_into(
        &self,
        pattern: &ErasurePattern,
        scratch: &mut SuffixScratch,
        out: &mut [u64],
    ) {
        assert_eq!(
            pattern.len(),
            self.n,
            "pattern length differs from blocklength"
        );
        assert_eq!(out.len(), self.stride);
        out.fill(0);
        let erased = pattern.erased_count();
        if 2 * erased <= self.n {
            let basis = &mut scratch.low;
            basis.clear();
            for j in pattern.erased() {
                scratch
                    .buf
                    .copy_from_slice(&self.dual_rows[j * self.stride..(j + 1) * self.stride]);
                basis.insert(&mut scratch.buf);
            }
            for &p in basis.pivots() {
                out[p / WORD_BITS] |= 1 << (p % WORD_BITS);
            }
        } else {
            let basis = &mut scratch.high;
            basis.clear();
            for i in pattern.unerased() {
                scratch
                    .buf
                    .copy_from_slice(&self.rows[i * self.stride..(i + 1) * self.stride]);
                basis.insert(&mut scratch.buf);
            }
            for w in out.iter_mut() {
                *w = u64::MAX;
            }
            out[self.stride - 1] &= tail_mask(self.n);
            for &p in basis.pivots() {
                out[p / WORD_BITS] &= !(1 << (p % WORD_BITS));
            }
        }
    }

    /// Entry `i` is true iff input bit `i` is recoverable under `pattern`.
    pub fn decodable_profile(&self, pattern: &ErasurePattern) -> Vec<bool> {
        let mut scratch = self.scratch();
        let mut out = vec![0u64; self.stride];
        self.undecodable_into(pattern, &mut scratch, &mut out);
        (0..self.n)
            .map(|i| (out[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 0)
            .collect()
    }
}

/// Recoverability of each input bit of the invertible transform `g` under the
/// erasure pattern `pattern`, assuming earlier bits are known and later bits
/// are unknown.
pub fn suffix_decodable_profile(g: &BinMatrix, pattern: &ErasurePattern) -> Result<Vec<bool>> {
    if !g.is_square() {
        return Err(Error::NotSquare {
            rows: g.rows(),
            cols: g.cols(),
        });
    }
    if pattern.len() != g.rows() {
        return Err(Error::Shape(format!(
            "pattern length {} differs from blocklength {}",
            pattern.len(),
            g.rows()
        )));
    }
    Ok(SuffixEngine::new(g)?.decodable_profile(pattern))
}

/// Like [`suffix_decodable_profile`] but for any matrix (no invertibility
/// requirement): entry `i` is true iff column `i` restricted to the unerased
/// rows raises the rank of columns `i+1..` on those rows.
pub fn rank_increase_profile(m: &BinMatrix, pattern: &ErasurePattern) -> Vec<bool> {
    assert_eq!(
        pattern.len(),
        m.rows(),
        "pattern length differs from row count"
    );
    let mut basis = EchelonBasis::new(m.cols(), PivotKey::Highest);
    let mut buf = vec![0u64; m.stride()];
    for i in pattern.unerased() {
        buf.copy_from_slice(m.row_words(i));
        basis.insert(&mut buf);
    }
    let mut out = vec![false; m.cols()];
    for &p in basis.pivots() {
        out[p] = true;
    }
    out
}
