//! Seeded hashing of keys to band rows and to chunks.
//!
//! The hash is MurmurHash3 x64/128 with its two 64-bit lanes initialised
//! from the seed instead of a single replicated 32-bit value. With both
//! lanes equal to a 32-bit seed it is bit-identical to the reference
//! `MurmurHash3_x64_128`.

use crate::bitkit::{Block, WORD_BITS};

const C1: u64 = 0x87c3_7b91_1142_53d5;
const C2: u64 = 0x4cf5_ad43_2745_937f;

#[inline]
fn fmix64(mut k: u64) -> u64 {
    k ^= k >> 33;
    k = k.wrapping_mul(0xff51_afd7_ed55_8ccd);
    k ^= k >> 33;
    k = k.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    k ^ (k >> 33)
}

/// MurmurHash3 x64/128 with explicit initial lanes. Returns `(h1, h2)`.
pub fn murmur3_x64_128(key: &[u8], seed1: u64, seed2: u64) -> (u64, u64) {
    let mut h1 = seed1;
    let mut h2 = seed2;
    let mut blocks = key.chunks_exact(16);
    for b in &mut blocks {
        let mut k1 = u64::from_le_bytes(b[..8].try_into().unwrap());
        let mut k2 = u64::from_le_bytes(b[8..].try_into().unwrap());

        k1 = k1.wrapping_mul(C1).rotate_left(31).wrapping_mul(C2);
        h1 ^= k1;
        h1 = h1
            .rotate_left(27)
            .wrapping_add(h2)
            .wrapping_mul(5)
            .wrapping_add(0x52dc_e729);

        k2 = k2.wrapping_mul(C2).rotate_left(33).wrapping_mul(C1);
        h2 ^= k2;
        h2 = h2
            .rotate_left(31)
            .wrapping_add(h1)
            .wrapping_mul(5)
            .wrapping_add(0x3849_5ab5);
    }

    let tail = blocks.remainder();
    if !tail.is_empty() {
        let mut k1 = 0u64;
        let mut k2 = 0u64;
        for (i, &byte) in tail.iter().enumerate() {
            if i < 8 {
                k1 |= u64::from(byte) << (8 * i);
            } else {
                k2 |= u64::from(byte) << (8 * (i - 8));
            }
        }
        if tail.len() > 8 {
            h2 ^= k2.wrapping_mul(C2).rotate_left(33).wrapping_mul(C1);
        }
        h1 ^= k1.wrapping_mul(C1).rotate_left(31).wrapping_mul(C2);
    }

    let len = key.len() as u64;
    h1 ^= len;
    h2 ^= len;
    h1 = h1.wrapping_add(h2);
    h2 = h2.wrapping_add(h1);
    h1 = fmix64(h1);
    h2 = fmix64(h2);
    h1 = h1.wrapping_add(h2);
    h2 = h2.wrapping_add(h1);
    (h1, h2)
}

/// A 128-bit hash value split into its two halves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hash128 {
    pub high: u64,
    pub low: u64,
}

impl Hash128 {
    pub fn as_u128(self) -> u128 {
        (u128::from(self.high) << 64) | u128::from(self.low)
    }
}

// Domain tags keep the streams for rows, chunk assignment and wide-pattern
// extension words disjoint even when base seed and retry coincide.
const DOMAIN_ROW: u64 = 0;
const DOMAIN_CHUNK: u64 = 1;
const DOMAIN_PATTERN_EXT: u64 = 2;

/// Base seed plus the retry counter that selects one hash function out of a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct HashSeed {
    pub base_seed: u64,
    pub retry: u16,
}

impl HashSeed {
    pub const fn new(base_seed: u64, retry: u16) -> Self {
        Self { base_seed, retry }
    }

    pub const fn with_retry(self, retry: u16) -> Self {
        Self { retry, ..self }
    }

    fn lanes(self, domain: u64, extra: u64) -> (u64, u64) {
        let tag = (domain << 56) ^ (extra << 16) ^ u64::from(self.retry);
        (self.base_seed, fmix64(tag ^ 0x9e37_79b9_7f4a_7c15))
    }
}

/// Seeded 128-bit hash of `key`.
pub fn hash128(key: &[u8], seed: HashSeed) -> Hash128 {
    hash_in_domain(key, seed, DOMAIN_ROW, 0)
}

fn hash_in_domain(key: &[u8], seed: HashSeed, domain: u64, extra: u64) -> Hash128 {
    let (s1, s2) = seed.lanes(domain, extra);
    let (h1, h2) = murmur3_x64_128(key, s1, s2);
    Hash128 { high: h2, low: h1 }
}

/// `floor(h * n / 2^64)`: maps a uniform 64-bit value onto `[0, n)`.
#[inline]
pub fn map_to_range(h: u64, n: u64) -> u64 {
    debug_assert!(n >= 1);
    ((u128::from(h) * u128::from(n)) >> 64) as u64
}

/// Geometry of the rows a key is hashed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowParams {
    /// Number of admissible start positions.
    pub n: usize,
    /// Block length in bits.
    pub block_len: usize,
}

impl RowParams {
    pub fn new(n: usize, block_len: usize) -> Self {
        assert!(n >= 1, "row params need n >= 1");
        assert!(block_len >= 1, "row params need L >= 1");
        Self { n, block_len }
    }
}

/// Start position (1-based, in `[1, n]`) and pattern for `key`.
///
/// The high half of the hash picks the start, the low half supplies the
/// first 64 pattern bits. Longer blocks draw further words from derived seeds.
pub fn row_for_key(
    key: &[u8],
    seed: HashSeed,
    params: RowParams,
    force_leading_one: bool,
) -> (usize, Block) {
    let h = hash128(key, seed);
    row_from_hash(key, h, seed, params, force_leading_one)
}

pub(crate) fn row_from_hash(
    key: &[u8],
    h: Hash128,
    seed: HashSeed,
    params: RowParams,
    force_leading_one: bool,
) -> (usize, Block) {
    let start = 1 + map_to_range(h.high, params.n as u64) as usize;
    let mut pattern = if params.block_len <= WORD_BITS {
        Block::from_u64(h.low, params.block_len).expect("L >= 1")
    } else {
        let nwords = params.block_len.div_ceil(WORD_BITS);
        let mut words = Vec::with_capacity(nwords);
        words.push(h.low);
        for k in 1..nwords {
            let ext = hash_in_domain(key, seed, DOMAIN_PATTERN_EXT, k as u64);
            words.push(ext.low);
        }
        Block::from_words(&words, params.block_len).expect("L >= 1")
    };
    if force_leading_one {
        pattern.set(0, true);
    }
    (start, pattern)
}

/// Chunk index in `[0, num_chunks)` from a hash stream disjoint from the row hashes.
///
/// Only the base seed matters: a chunk keeps its keys when it is rebuilt
/// under a new retry.
pub fn chunk_for_key(key: &[u8], seed: HashSeed, num_chunks: usize) -> usize {
    chunk_and_fingerprint(key, seed, num_chunks).0
}

/// Chunk index and the full 128-bit chunk-domain hash, used as a sort key.
pub(crate) fn chunk_and_fingerprint(
    key: &[u8],
    seed: HashSeed,
    num_chunks: usize,
) -> (usize, Hash128) {
    assert!(num_chunks >= 1, "need at least one chunk");
    let h = hash_in_domain(key, seed.with_retry(0), DOMAIN_CHUNK, 0);
    (map_to_range(h.high, num_chunks as u64) as usize, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn matches_reference_murmur_with_replicated_seed() {
        let keys: [&[u8]; 6] = [
            b"",
            b"a",
            b"hello world",
            b"0123456789abcdef",
            b"0123456789abcdef0",
            b"https://example.org/some/path/that/is/a/bit/longer/than/usual?q=1",
        ];
        for key in keys {
            for seed in [0u32, 1, 42, 0xdead_beef] {
                let (h1, h2) = murmur3_x64_128(key, u64::from(seed), u64::from(seed));
                let reference = murmur3::murmur3_x64_128(&mut Cursor::new(key), seed).unwrap();
                assert_eq!((u128::from(h2) << 64) | u128::from(h1), reference);
            }
        }
    }

    #[test]
    fn hash_is_deterministic_and_total() {
        let s = HashSeed::new(7, 0);
        assert_eq!(hash128(b"key", s), hash128(b"key", s));
        assert_eq!(hash128(b"", s), hash128(b"", s));
        assert_ne!(hash128(b"", s), hash128(b"", s.with_retry(1)));
    }

    #[test]
    fn retry_changes_output() {
        let s = HashSeed::new(99, 0);
        let differing = (0..10)
            .map(|i| format!("key-{i}"))
            .filter(|k| hash128(k.as_bytes(), s) != hash128(k.as_bytes(), s.with_retry(1)))
            .count();
        assert!(differing >= 1);
        assert_eq!(differing, 10);
    }

    #[test]
    fn map_to_range_examples() {
        assert_eq!(map_to_range(0, 10), 0);
        assert_eq!(map_to_range(u64::MAX, 10), 9);
        for h in [0, 1, 12345, u64::MAX / 3, u64::MAX] {
            assert_eq!(map_to_range(h, 1), 0);
        }
        let mut prev = 0;
        for i in 0..1000u64 {
            let h = i * (u64::MAX / 1000);
            let v = map_to_range(h, 77);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn singleton_range_gives_start_one() {
        let p = RowParams::new(1, 64);
        for i in 0..100 {
            let (s, _) = row_for_key(format!("{i}").as_bytes(), HashSeed::new(3, 0), p, false);
            assert_eq!(s, 1);
        }
    }

    #[test]
    fn forced_leading_one_never_zero() {
        for len in [1, 3, 64, 100] {
            let p = RowParams::new(50, len);
            for i in 0..500 {
                let (_, b) = row_for_key(format!("{i}").as_bytes(), HashSeed::new(5, 2), p, true);
                assert!(b.get(0));
                assert!(!b.is_zero());
                assert_eq!(b.len(), len);
            }
        }
    }

    #[test]
    fn wide_patterns_use_extra_words() {
        let p = RowParams::new(10, 130);
        let (_, b) = row_for_key(b"wide", HashSeed::new(1, 0), p, false);
        assert_eq!(b.words().len(), 3);
        assert_eq!(b.words()[0], hash128(b"wide", HashSeed::new(1, 0)).low);
        assert!(b.words()[1] != 0 || b.words()[2] != 0);
        assert_eq!(b.words()[2] >> 2, 0);
    }

    #[test]
    fn start_histogram_is_uniform() {
        // Chi-squared goodness of fit, 255 degrees of freedom. The 0.999
        // quantile is about 330.5; pinned seed keeps this reproducible.
        let n = 256;
        let p = RowParams::new(n, 64);
        let seed = HashSeed::new(0x5eed, 0);
        let trials = 100_000;
        let mut hist = vec![0u64; n];
        let mut ones = 0u64;
        for i in 0..trials {
            let (s, b) = row_for_key(format!("k{i}").as_bytes(), seed, p, false);
            assert!((1..=n).contains(&s));
            hist[s - 1] += 1;
            ones += u64::from(b.count_ones());
        }
        let expect = trials as f64 / n as f64;
        let chi2: f64 = hist
            .iter()
            .map(|&c| (c as f64 - expect).powi(2) / expect)
            .sum();
        assert!(chi2 < 330.5, "chi2 = {chi2}");
        // Pattern bit balance: 6.4M fair bits, 5 sigma = 6325.
        let total = trials as f64 * 64.0;
        assert!((ones as f64 - total / 2.0).abs() < 5.0 * (total / 4.0).sqrt());
    }

    #[test]
    fn chunk_assignment() {
        let seed = HashSeed::new(11, 0);
        for i in 0..100 {
            assert_eq!(chunk_for_key(format!("{i}").as_bytes(), seed, 1), 0);
        }
        assert_eq!(
            chunk_for_key(b"abc", seed, 17),
            chunk_for_key(b"abc", seed, 17)
        );
        assert_eq!(
            chunk_for_key(b"abc", seed, 17),
            chunk_for_key(b"abc", seed.with_retry(5), 17)
        );
    }

    #[test]
    fn chunk_loads_are_binomial() {
        let seed = HashSeed::new(2024, 0);
        let chunks = 100;
        let keys = 1_000_000;
        let mut load = vec![0u64; chunks];
        for i in 0..keys {
            load[chunk_for_key(format!("url-{i}").as_bytes(), seed, chunks)] += 1;
        }
        let mean = keys as f64 / chunks as f64;
        let sigma = (keys as f64 * (1.0 / chunks as f64) * (1.0 - 1.0 / chunks as f64)).sqrt();
        let max = *load.iter().max().unwrap() as f64;
        assert!(
            max <= mean + 3.0 * sigma,
            "max load {max}, mean {mean}, sigma {sigma}"
        );
    }

    #[test]
    fn chunk_and_row_streams_differ() {
        let seed = HashSeed::new(0, 0);
        let (_, fp) = chunk_and_fingerprint(b"x", seed, 4);
        assert_ne!(fp, hash128(b"x", seed));
    }
}
