//! Word-packed bit vectors and fixed-length blocks.
//!
//! Bit `j` of a vector lives in bit `j % 64` of word `j / 64` (LSB-first).
//! Every window operation touches only the words that overlap the window,
//! so a window of `L` bits costs at most `ceil(L / 64) + 1` word accesses.

use std::cell::RefCell;

use smallvec::SmallVec;
use thiserror::Error;

/// Width of a storage word in bits.
pub const WORD_BITS: usize = u64::BITS as usize;

/// Number of words needed to hold `bits` bits.
#[inline]
pub const fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// Mask with the low `bits` bits set (`bits <= 64`).
#[inline]
pub const fn low_mask(bits: usize) -> u64 {
    if bits >= WORD_BITS {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BitError {
    #[error("window [{offset}, {offset}+{len}) exceeds vector of {capacity} bits")]
    OutOfRange {
        offset: usize,
        len: usize,
        capacity: usize,
    },
    #[error("block length must be at least 1")]
    EmptyBlock,
    #[error("storage has nonzero bits past the logical length")]
    DirtyPadding,
    #[error("expected {expected} words for {bits} bits, got {actual}")]
    WordCount {
        bits: usize,
        expected: usize,
        actual: usize,
    },
}

/// Read access to a sequence of words.
///
/// Window operations are written against this trait so that tests can
/// substitute [`CountingWords`] and observe exactly which words a query reads.
pub trait WordSource {
    fn word(&self, index: usize) -> u64;
}

impl WordSource for [u64] {
    #[inline]
    fn word(&self, index: usize) -> u64 {
        self[index]
    }
}

impl WordSource for Vec<u64> {
    #[inline]
    fn word(&self, index: usize) -> u64 {
        self[index]
    }
}

impl WordSource for BitVec {
    #[inline]
    fn word(&self, index: usize) -> u64 {
        self.words[index]
    }
}

impl<W: WordSource + ?Sized> WordSource for &W {
    #[inline]
    fn word(&self, index: usize) -> u64 {
        (**self).word(index)
    }
}

/// A [`WordSource`] that logs the index of every word read.
#[derive(Debug)]
pub struct CountingWords<'a> {
    words: &'a [u64],
    log: RefCell<Vec<usize>>,
}

impl<'a> CountingWords<'a> {
    pub fn new(words: &'a [u64]) -> Self {
        Self {
            words,
            log: RefCell::new(Vec::new()),
        }
    }

    /// Total number of reads, repeats included.
    pub fn reads(&self) -> usize {
        self.log.borrow().len()
    }

    /// Indices read so far, in order.
    pub fn indices(&self) -> Vec<usize> {
        self.log.borrow().clone()
    }

    /// True when the set of indices read forms one contiguous run.
    pub fn is_contiguous(&self) -> bool {
        let mut idx = self.indices();
        idx.sort_unstable();
        idx.dedup();
        idx.windows(2).all(|w| w[1] == w[0] + 1)
    }

    pub fn reset(&self) {
        self.log.borrow_mut().clear();
    }
}

impl WordSource for CountingWords<'_> {
    #[inline]
    fn word(&self, index: usize) -> u64 {
        self.log.borrow_mut().push(index);
        self.words[index]
    }
}

/// Exactly `len` bits, word-packed with zero padding.
///
/// Used for row patterns. Blocks up to 128 bits are stored inline.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Block {
    len: usize,
    words: SmallVec<[u64; 2]>,
}

impl std::fmt::Debug for Block {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Block(")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, ")")
    }
}

impl Block {
    pub fn zeros(len: usize) -> Result<Self, BitError> {
        if len == 0 {
            return Err(BitError::EmptyBlock);
        }
        Ok(Self {
            len,
            words: SmallVec::from_elem(0, words_for(len)),
        })
    }

    /// Low `len` bits of `bits`; `len` must be in `1..=64`.
    pub fn from_u64(bits: u64, len: usize) -> Result<Self, BitError> {
        if len == 0 {
            return Err(BitError::EmptyBlock);
        }
        assert!(len <= WORD_BITS, "from_u64 holds at most 64 bits");
        let mut words = SmallVec::new();
        words.push(bits & low_mask(len));
        Ok(Self { len, words })
    }

    /// Builds a block from words, masking off anything past `len`.
    pub fn from_words(words: &[u64], len: usize) -> Result<Self, BitError> {
        if len == 0 {
            return Err(BitError::EmptyBlock);
        }
        let need = words_for(len);
        if words.len() != need {
            return Err(BitError::WordCount {
                bits: len,
                expected: need,
                actual: words.len(),
            });
        }
        let mut words: SmallVec<[u64; 2]> = SmallVec::from_slice(words);
        words[need - 1] &= low_mask(len - (need - 1) * WORD_BITS);
        Ok(Self { len, words })
    }

    /// Parses a string of `0`/`1` characters, index 0 first.
    pub fn from_bit_str(s: &str) -> Result<Self, BitError> {
        let mut b = Self::zeros(s.len())?;
        for (i, c) in s.bytes().enumerate() {
            b.set(i, c == b'1');
        }
        Ok(b)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len);
        let bit = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= bit;
        } else {
            self.words[i / WORD_BITS] &= !bit;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Least index `>= from` holding a one.
    pub fn first_one(&self, from: usize) -> Option<usize> {
        first_one_in(&self.words, from, self.len)
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }
}

/// Growable-at-construction bit vector with canonical zero padding.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for BitVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitVec[{}](", self.len)?;
        for i in 0..self.len.min(256) {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        if self.len > 256 {
            write!(f, "...")?;
        }
        write!(f, ")")
    }
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % WORD_BITS == 0 {
                words.push(0);
            }
            if b {
                *words.last_mut().unwrap() |= 1 << (len % WORD_BITS);
            }
            len += 1;
        }
        Self { len, words }
    }

    pub fn from_bit_str(s: &str) -> Self {
        Self::from_bits(s.bytes().map(|c| c == b'1'))
    }

    /// Wraps raw words; fails if padding bits are set or the word count is off.
    pub fn from_words(words: Vec<u64>, len: usize) -> Result<Self, BitError> {
        let expected = words_for(len);
        if words.len() != expected {
            return Err(BitError::WordCount {
                bits: len,
                expected,
                actual: words.len(),
            });
        }
        if !len.is_multiple_of(WORD_BITS) {
            if let Some(&last) = words.last() {
                if last & !low_mask(len % WORD_BITS) != 0 {
                    return Err(BitError::DirtyPadding);
                }
            }
        }
        Ok(Self { len, words })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn into_words(self) -> Vec<u64> {
        self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let bit = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= bit;
        } else {
            self.words[i / WORD_BITS] &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD_BITS] ^= 1 << (i % WORD_BITS);
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Appends `other`, keeping padding canonical.
    pub fn extend_from(&mut self, other: &BitVec) {
        if self.len.is_multiple_of(WORD_BITS) {
            self.words.extend_from_slice(&other.words);
            self.len += other.len;
            return;
        }
        let mut pos = self.len;
        self.words.resize(words_for(self.len + other.len), 0);
        self.len += other.len;
        for (k, &w) in other.words.iter().enumerate() {
            let bits = (other.len - k * WORD_BITS).min(WORD_BITS);
            xor_bits_at(&mut self.words, pos, w, bits);
            pos += bits;
        }
    }

    fn check_window(&self, offset: usize, len: usize) -> Result<(), BitError> {
        if offset.checked_add(len).is_none_or(|end| end > self.len) {
            return Err(BitError::OutOfRange {
                offset,
                len,
                capacity: self.len,
            });
        }
        Ok(())
    }

    /// XORs `src` into bits `[offset, offset + src.len())`.
    pub fn xor_window(&mut self, offset: usize, src: &Block) -> Result<(), BitError> {
        self.check_window(offset, src.len())?;
        xor_window_words(&mut self.words, offset, src.words(), src.len());
        Ok(())
    }

    /// Parity of `self[offset..offset + pattern.len()] & pattern`.
    pub fn dot_window(&self, offset: usize, pattern: &Block) -> Result<bool, BitError> {
        self.check_window(offset, pattern.len())?;
        Ok(dot_window_in(
            self.words.as_slice(),
            offset,
            pattern.words(),
            pattern.len(),
        ))
    }

    /// Copies `len` bits starting at `offset` into a block.
    pub fn read_window(&self, offset: usize, len: usize) -> Result<Block, BitError> {
        self.check_window(offset, len)?;
        let mut out = Block::zeros(len)?;
        for k in 0..out.words.len() {
            let bits = (len - k * WORD_BITS).min(WORD_BITS);
            out.words[k] = read_bits_at(&self.words, offset + k * WORD_BITS, bits);
        }
        Ok(out)
    }
}

/// Reads `bits <= 64` bits starting at bit `pos`.
#[inline]
pub(crate) fn read_bits_at(words: &[u64], pos: usize, bits: usize) -> u64 {
    let q = pos / WORD_BITS;
    let sh = pos % WORD_BITS;
    let mut v = words[q] >> sh;
    if sh != 0 && sh + bits > WORD_BITS {
        v |= words[q + 1] << (WORD_BITS - sh);
    }
    v & low_mask(bits)
}

/// XORs the low `bits` bits of `value` in at bit `pos`.
#[inline]
pub(crate) fn xor_bits_at(words: &mut [u64], pos: usize, value: u64, bits: usize) {
    let value = value & low_mask(bits);
    let q = pos / WORD_BITS;
    let sh = pos % WORD_BITS;
    words[q] ^= value << sh;
    if sh != 0 && sh + bits > WORD_BITS {
        words[q + 1] ^= value >> (WORD_BITS - sh);
    }
}

/// XORs a packed `len`-bit block into `dst` at bit `offset`. Caller checks bounds.
#[inline]
pub(crate) fn xor_window_words(dst: &mut [u64], offset: usize, src: &[u64], len: usize) {
    let first = offset / WORD_BITS;
    let last = (offset + len - 1) / WORD_BITS;
    let sh = offset % WORD_BITS;
    if sh == 0 {
        for (d, s) in dst[first..=last].iter_mut().zip(src) {
            *d ^= s;
        }
        return;
    }
    for (k, &s) in src.iter().enumerate() {
        dst[first + k] ^= s << sh;
        let hi = first + k + 1;
        if hi <= last {
            dst[hi] ^= s >> (WORD_BITS - sh);
        }
    }
}

/// Windowed inner product over GF(2), reading each overlapped word exactly once.
#[inline]
pub fn dot_window_in<W: WordSource + ?Sized>(
    words: &W,
    offset: usize,
    pattern: &[u64],
    len: usize,
) -> bool {
    let first = offset / WORD_BITS;
    let last = (offset + len - 1) / WORD_BITS;
    let sh = offset % WORD_BITS;
    let mut acc = 0u64;
    if sh == 0 {
        for (k, &p) in pattern.iter().enumerate() {
            acc ^= words.word(first + k) & p;
        }
    } else {
        let mut cur = words.word(first);
        for (k, &p) in pattern.iter().enumerate() {
            let idx = first + k + 1;
            let next = if idx <= last { words.word(idx) } else { 0 };
            acc ^= ((cur >> sh) | (next << (WORD_BITS - sh))) & p;
            cur = next;
        }
    }
    acc.count_ones() & 1 == 1
}

/// First set bit at index `>= from` and `< len` in packed words.
#[inline]
pub(crate) fn first_one_in(words: &[u64], from: usize, len: usize) -> Option<usize> {
    if from >= len {
        return None;
    }
    let mut q = from / WORD_BITS;
    let mut w = words[q] & (u64::MAX << (from % WORD_BITS));
    loop {
        if w != 0 {
            let i = q * WORD_BITS + w.trailing_zeros() as usize;
            return (i < len).then_some(i);
        }
        q += 1;
        if q >= words.len() {
            return None;
        }
        w = words[q];
    }
}
