//! Gaussian elimination for one-block band systems over GF(2).
//!
//! Row `i` of a system holds an `L`-bit pattern starting at column `s_i`
//! (1-based, `1 <= s_i <= n`) and zeros elsewhere; the system has `n + L - 1`
//! columns. Sorting rows by start and eliminating left to right never creates
//! nonzeros outside a row's original window, so every row can be kept as an
//! `L`-bit pattern relative to its own start for the whole run.

use rand::Rng;
use thiserror::Error;

use crate::bitkit::{dot_window_in, first_one_in, low_mask, words_for, BitVec, Block, WORD_BITS};

/// Largest value width supported; right-hand sides are held in one word.
pub const MAX_VALUE_BITS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    /// A row was reduced to zero: the rows are linearly dependent.
    #[error("row {row} (input order) became zero: rows are linearly dependent")]
    Dependent { row: usize },
    #[error("system dimensions do not match: {0}")]
    DimensionMismatch(String),
    #[error("invalid row {row}: {reason}")]
    InvalidRow { row: usize, reason: String },
    #[error("dense oracle supports at most 64 columns, system has {0}")]
    OracleTooLarge(usize),
}

/// One equation: `pattern` placed at columns `start..start + L`, equal to `rhs`.
///
/// Bit `t` of `rhs` is the right-hand side for value plane `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandRow {
    pub start: usize,
    pub pattern: Block,
    pub rhs: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandSystem {
    n: usize,
    block_len: usize,
    value_bits: usize,
    rows: Vec<BandRow>,
}

impl BandSystem {
    pub fn new(n: usize, block_len: usize, value_bits: usize) -> Result<Self, SolverError> {
        if n == 0 || block_len == 0 {
            return Err(SolverError::DimensionMismatch(format!(
                "need n >= 1 and L >= 1, got n = {n}, L = {block_len}"
            )));
        }
        if value_bits == 0 || value_bits > MAX_VALUE_BITS {
            return Err(SolverError::DimensionMismatch(format!(
                "value width must be in 1..=64, got {value_bits}"
            )));
        }
        Ok(Self {
            n,
            block_len,
            value_bits,
            rows: Vec::new(),
        })
    }

    pub fn with_rows(
        n: usize,
        block_len: usize,
        value_bits: usize,
        rows: Vec<BandRow>,
    ) -> Result<Self, SolverError> {
        let mut sys = Self::new(n, block_len, value_bits)?;
        sys.rows.reserve(rows.len());
        for row in rows {
            sys.push(row)?;
        }
        Ok(sys)
    }

    pub fn push(&mut self, row: BandRow) -> Result<(), SolverError> {
        let idx = self.rows.len();
        if !(1..=self.n).contains(&row.start) {
            return Err(SolverError::InvalidRow {
                row: idx,
                reason: format!("start {} outside [1, {}]", row.start, self.n),
            });
        }
        if row.pattern.len() != self.block_len {
            return Err(SolverError::InvalidRow {
                row: idx,
                reason: format!(
                    "pattern has {} bits, system L = {}",
                    row.pattern.len(),
                    self.block_len
                ),
            });
        }
        if row.rhs & !low_mask(self.value_bits) != 0 {
            return Err(SolverError::InvalidRow {
                row: idx,
                reason: format!("rhs wider than {} bits", self.value_bits),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    /// Uniformly random system: starts in `[1, n]`, fully random patterns and
    /// right-hand sides. With `force_leading_one`, pattern bit 0 is always set.
    pub fn random<R: Rng + ?Sized>(
        n: usize,
        m: usize,
        block_len: usize,
        value_bits: usize,
        force_leading_one: bool,
        rng: &mut R,
    ) -> Self {
        let mut sys = Self::new(n, block_len, value_bits).expect("valid dimensions");
        let nwords = words_for(block_len);
        let mut words = vec![0u64; nwords];
        for _ in 0..m {
            let start = rng.gen_range(1..=n);
            words.iter_mut().for_each(|w| *w = rng.gen());
            let mut pattern = Block::from_words(&words, block_len).expect("L >= 1");
            if force_leading_one {
                pattern.set(0, true);
            }
            let rhs = rng.gen::<u64>() & low_mask(value_bits);
            sys.rows.push(BandRow {
                start,
                pattern,
                rhs,
            });
        }
        sys
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    #[inline]
    pub fn value_bits(&self) -> usize {
        self.value_bits
    }

    /// Number of columns, `n + L - 1`.
    #[inline]
    pub fn num_columns(&self) -> usize {
        self.n + self.block_len - 1
    }

    #[inline]
    pub fn rows(&self) -> &[BandRow] {
        &self.rows
    }

    #[inline]
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }
}

/// Stable counting sort of row indices by start; keys lie in `[1, n]`.
pub(crate) fn counting_sort_order(
    starts: impl Iterator<Item = usize> + Clone,
    n: usize,
) -> Vec<usize> {
    let mut counts = vec![0usize; n + 2];
    let mut len = 0;
    for s in starts.clone() {
        counts[s + 1] += 1;
        len += 1;
    }
    for k in 1..counts.len() {
        counts[k] += counts[k - 1];
    }
    let mut order = vec![0usize; len];
    for (i, s) in starts.enumerate() {
        order[counts[s]] = i;
        counts[s] += 1;
    }
    order
}

/// Returns the system with rows in nondecreasing start order (stable).
pub fn sort_rows(sys: &BandSystem) -> BandSystem {
    let order = counting_sort_order(sys.rows.iter().map(|r| r.start), sys.n);
    BandSystem {
        n: sys.n,
        block_len: sys.block_len,
        value_bits: sys.value_bits,
        rows: order.iter().map(|&i| sys.rows[i].clone()).collect(),
    }
}

/// Result of the forward phase.
///
/// Rows are stored in sorted order. Patterns are relative to each row's start.
#[derive(Debug, Clone)]
pub struct EliminationOutcome {
    n: usize,
    block_len: usize,
    value_bits: usize,
    words_per_row: usize,
    order: Vec<usize>,
    starts: Vec<usize>,
    patterns: Vec<u64>,
    rhs: Vec<u64>,
    pivots: Vec<usize>,
    additions: u64,
    coin_transcripts: Option<Vec<Vec<bool>>>,
}

impl EliminationOutcome {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn value_bits(&self) -> usize {
        self.value_bits
    }

    pub fn num_rows(&self) -> usize {
        self.starts.len()
    }

    /// Sorted position -> index in the input system.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Starts in sorted order.
    pub fn starts(&self) -> &[usize] {
        &self.starts
    }

    /// Pivot column of each row, in sorted order (1-based columns).
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Number of row additions performed.
    pub fn additions(&self) -> u64 {
        self.additions
    }

    /// Per sorted row: the bits seen at non-pivot window columns, left to
    /// right, through the first one. Present only when requested.
    pub fn coin_transcripts(&self) -> Option<&[Vec<bool>]> {
        self.coin_transcripts.as_deref()
    }

    fn pattern_words(&self, i: usize) -> &[u64] {
        &self.patterns[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    /// Transformed row `i` (sorted order).
    pub fn row(&self, i: usize) -> BandRow {
        BandRow {
            start: self.starts[i],
            pattern: Block::from_words(self.pattern_words(i), self.block_len).expect("L >= 1"),
            rhs: self.rhs[i],
        }
    }
}

/// `dst ^= src >> shift` on equal-length word slices.
#[inline]
fn xor_shifted_right(dst: &mut [u64], src: &[u64], shift: usize) {
    let wq = shift / WORD_BITS;
    let sh = shift % WORD_BITS;
    let len = src.len();
    if sh == 0 {
        for k in 0..len - wq {
            dst[k] ^= src[k + wq];
        }
    } else {
        for k in 0..len - wq {
            let lo = src[k + wq] >> sh;
            let hi = if k + wq + 1 < len {
                src[k + wq + 1] << (WORD_BITS - sh)
            } else {
                0
            };
            dst[k] ^= lo | hi;
        }
    }
}

/// Forward phase: sorts rows by start, then for each row takes its leftmost
/// one as pivot and clears that column from every later row whose start does
/// not exceed the pivot.
pub fn eliminate(sys: &BandSystem, record_coins: bool) -> Result<EliminationOutcome, SolverError> {
    let m = sys.rows.len();
    let len = sys.block_len;
    let wpr = words_for(len);
    let order = counting_sort_order(sys.rows.iter().map(|r| r.start), sys.n);

    let mut starts = Vec::with_capacity(m);
    let mut patterns = Vec::with_capacity(m * wpr);
    let mut rhs = Vec::with_capacity(m);
    for &i in &order {
        let row = &sys.rows[i];
        starts.push(row.start);
        patterns.extend_from_slice(row.pattern.words());
        rhs.push(row.rhs);
    }

    let mut pivots = vec![0usize; m];
    let mut additions = 0u64;
    let mut transcripts = record_coins.then(|| Vec::with_capacity(m));
    let mut pivot_cols = record_coins.then(|| BitVec::zeros(sys.num_columns() + 1));

    for i in 0..m {
        let s = starts[i];
        let rel = {
            let row = &patterns[i * wpr..(i + 1) * wpr];
            first_one_in(row, 0, len)
        };
        let Some(rel) = rel else {
            return Err(SolverError::Dependent { row: order[i] });
        };
        let piv = s + rel;
        pivots[i] = piv;

        if let (Some(t), Some(cols)) = (transcripts.as_mut(), pivot_cols.as_mut()) {
            // Columns before the pivot hold zeros; earlier pivots are skipped.
            let zeros = (s..piv).filter(|&c| !cols.get(c)).count();
            let mut coins = vec![false; zeros];
            coins.push(true);
            t.push(coins);
            cols.set(piv, true);
        }

        let (head, tail) = patterns.split_at_mut((i + 1) * wpr);
        let src = &head[i * wpr..];
        let b = rhs[i];
        for (k, &s2) in starts[i + 1..].iter().enumerate() {
            if s2 > piv {
                break;
            }
            let r2 = piv - s2;
            let dst = &mut tail[k * wpr..(k + 1) * wpr];
            if dst[r2 / WORD_BITS] >> (r2 % WORD_BITS) & 1 == 1 {
                if wpr == 1 {
                    dst[0] ^= src[0] >> (s2 - s);
                } else {
                    xor_shifted_right(dst, src, s2 - s);
                }
                rhs[i + 1 + k] ^= b;
                additions += 1;
            }
        }
    }

    Ok(EliminationOutcome {
        n: sys.n,
        block_len: len,
        value_bits: sys.value_bits,
        words_per_row: wpr,
        order,
        starts,
        patterns,
        rhs,
        pivots,
        additions,
        coin_transcripts: transcripts,
    })
}

/// Solution of a band system: one bit vector of `n + L - 1` bits per value plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionTable {
    pub planes: Vec<BitVec>,
    /// Pivot column per input row (1-based), empty for tables not produced by a solve.
    pub pivots: Vec<usize>,
    /// Free slot for the layer that owns the table (the retry seed, for retrieval).
    pub seed_hint: Option<u64>,
}

impl SolutionTable {
    pub fn num_columns(&self) -> usize {
        self.planes.first().map_or(0, BitVec::len)
    }
}

/// Back substitution. Rows are handled last to first; each pivot variable is
/// set so that its row's equation holds given the variables to its right.
/// Non-pivot variables stay zero.
pub fn back_substitute(out: &EliminationOutcome) -> SolutionTable {
    let cols = out.n + out.block_len - 1;
    let r = out.value_bits;
    let mut planes = vec![BitVec::zeros(cols); r];
    let mut raw: Vec<Vec<u64>> = planes.iter().map(|p| p.words().to_vec()).collect();
    for i in (0..out.num_rows()).rev() {
        let pat = out.pattern_words(i);
        let off = out.starts[i] - 1;
        let piv = out.pivots[i] - 1;
        for (t, words) in raw.iter_mut().enumerate() {
            let bit = dot_window_in(words.as_slice(), off, pat, out.block_len)
                ^ (out.rhs[i] >> t & 1 == 1);
            if bit {
                words[piv / WORD_BITS] |= 1 << (piv % WORD_BITS);
            }
        }
    }
    for (plane, words) in planes.iter_mut().zip(raw) {
        *plane = BitVec::from_words(words, cols).expect("pivots lie inside the table");
    }
    let mut pivots = vec![0usize; out.num_rows()];
    for (i, &src) in out.order.iter().enumerate() {
        pivots[src] = out.pivots[i];
    }
    SolutionTable {
        planes,
        pivots,
        seed_hint: None,
    }
}

/// Sort, eliminate and back-substitute.
pub fn solve(sys: &BandSystem) -> Result<SolutionTable, SolverError> {
    let out = eliminate(sys, false)?;
    Ok(back_substitute(&out))
}

/// True iff every row's equation holds in every value plane.
pub fn verify(original: &BandSystem, table: &SolutionTable) -> Result<bool, SolverError> {
    if table.planes.len() != original.value_bits {
        return Err(SolverError::DimensionMismatch(format!(
            "table has {} planes, system has {} value bits",
            table.planes.len(),
            original.value_bits
        )));
    }
    if table
        .planes
        .iter()
        .any(|p| p.len() != original.num_columns())
    {
        return Err(SolverError::DimensionMismatch(format!(
            "table planes must have {} bits",
            original.num_columns()
        )));
    }
    for row in &original.rows {
        for (t, plane) in table.planes.iter().enumerate() {
            let got = plane
                .dot_window(row.start - 1, &row.pattern)
                .map_err(|e| SolverError::DimensionMismatch(e.to_string()))?;
            if got != (row.rhs >> t & 1 == 1) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Rank over GF(2) by textbook Gaussian elimination on the densified matrix.
///
/// Independent of the band machinery; used to cross-check [`solve`].
pub fn dense_rank_oracle(sys: &BandSystem) -> Result<usize, SolverError> {
    let cols = sys.num_columns();
    if cols > 64 {
        return Err(SolverError::OracleTooLarge(cols));
    }
    let mut rows: Vec<u64> = sys
        .rows
        .iter()
        .map(|r| {
            let mut dense = 0u64;
            for j in 0..r.pattern.len() {
                if r.pattern.get(j) {
                    dense |= 1 << (r.start - 1 + j);
                }
            }
            dense
        })
        .collect();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i] >> col & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && *row >> col & 1 == 1 {
                *row ^= pivot;
            }
        }
        rank += 1;
    }
    Ok(rank)
}
