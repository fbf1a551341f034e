//! Unpartitioned retrieval: one band system over the whole key set.
//!
//! Construction hashes every key to a row `(start, pattern)` with the value
//! as right-hand side and solves the system. The structure is just the
//! solution vector (one per value bit) plus the seed that made the solve
//! succeed. A query recomputes the key's row and returns the inner product
//! of the pattern with the solution window at `start`.

use thiserror::Error;

use crate::band_solver::{solve, BandRow, BandSystem, SolverError, MAX_VALUE_BITS};
use crate::bitkit::{dot_window_in, low_mask, BitVec, WordSource};
use crate::row_gen::{chunk_and_fingerprint, row_for_key, Hash128, HashSeed, RowParams};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("chunk {chunk}: no solvable system after {attempts} seeds")]
    RetriesExhausted { chunk: usize, attempts: u32 },
    #[error("key {key:?} appears twice with different values")]
    DuplicateKey { key: Vec<u8> },
    #[error("value {value:#x} does not fit in {bits} bits")]
    ValueTooWide { value: u64, bits: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatParams {
    /// Slack: the table has `m / (1 - epsilon)` start positions.
    pub epsilon: f64,
    pub block_len: usize,
    pub value_bits: usize,
    pub max_retries: u32,
    pub base_seed: u64,
    /// Set pattern bit 0 of every row.
    pub force_leading_one: bool,
}

impl Default for FlatParams {
    fn default() -> Self {
        Self {
            epsilon: 0.05,
            block_len: 64,
            value_bits: 1,
            max_retries: 64,
            base_seed: 0,
            force_leading_one: false,
        }
    }
}

pub(crate) fn check_common(
    epsilon: f64,
    block_len: usize,
    value_bits: usize,
    max_retries: u32,
) -> Result<(), ConstructError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(ConstructError::InvalidParams(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if block_len == 0 || block_len > u16::MAX as usize {
        return Err(ConstructError::InvalidParams(format!(
            "block length must be in 1..=65535, got {block_len}"
        )));
    }
    if value_bits == 0 || value_bits > MAX_VALUE_BITS {
        return Err(ConstructError::InvalidParams(format!(
            "value bits must be in 1..=64, got {value_bits}"
        )));
    }
    if max_retries == 0 || max_retries > 1 << 16 {
        return Err(ConstructError::InvalidParams(format!(
            "max retries must be in 1..=65536, got {max_retries}"
        )));
    }
    Ok(())
}

/// Start positions for `m` keys: `ceil(m / (1 - epsilon))`, at least 1.
///
/// A relative slack of 1e-12 absorbs floating-point error when the quotient
/// is an integer.
pub fn positions_for(m: usize, epsilon: f64) -> usize {
    let exact = m as f64 / (1.0 - epsilon);
    ((exact * (1.0 - 1e-12)).ceil() as usize).max(1)
}

/// One normalized input record.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Entry<'a> {
    pub fp: Hash128,
    pub key: &'a [u8],
    pub value: u64,
}

/// Sorts pairs by chunk-domain hash (ties by key bytes), drops exact
/// duplicates and rejects conflicting ones. The result does not depend on
/// input order.
pub(crate) fn normalize<'a, K: AsRef<[u8]>>(
    pairs: &'a [(K, u64)],
    base_seed: u64,
    value_bits: usize,
) -> Result<Vec<Entry<'a>>, ConstructError> {
    let seed = HashSeed::new(base_seed, 0);
    let mask = low_mask(value_bits);
    let mut entries = Vec::with_capacity(pairs.len());
    for (k, v) in pairs {
        if v & !mask != 0 {
            return Err(ConstructError::ValueTooWide {
                value: *v,
                bits: value_bits,
            });
        }
        let key = k.as_ref();
        let (_, fp) = chunk_and_fingerprint(key, seed, 1);
        entries.push(Entry { fp, key, value: *v });
    }
    entries.sort_unstable_by(|a, b| a.fp.cmp(&b.fp).then_with(|| a.key.cmp(b.key)));
    let mut out: Vec<Entry<'a>> = Vec::with_capacity(entries.len());
    for e in entries {
        if let Some(last) = out.last() {
            if last.fp == e.fp && last.key == e.key {
                if last.value != e.value {
                    return Err(ConstructError::DuplicateKey {
                        key: e.key.to_vec(),
                    });
                }
                continue;
            }
        }
        out.push(e);
    }
    Ok(out)
}

/// Shape shared by every chunk of one structure.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ChunkSpec {
    pub epsilon: f64,
    pub block_len: usize,
    pub value_bits: usize,
    pub max_retries: u32,
    pub base_seed: u64,
    pub force_leading_one: bool,
}

/// A solved chunk: winning retry and its solution planes (`n + L - 1` bits each).
#[derive(Debug, Clone)]
pub(crate) struct BuiltChunk {
    pub retry: u16,
    pub n: usize,
    pub planes: Vec<BitVec>,
}

/// Tries seeds `0, 1, ...` until the chunk's band system is solvable.
pub(crate) fn build_chunk(
    entries: &[Entry<'_>],
    spec: &ChunkSpec,
    chunk: usize,
) -> Result<BuiltChunk, ConstructError> {
    let n = positions_for(entries.len(), spec.epsilon);
    let params = RowParams::new(n, spec.block_len);
    for retry in 0..spec.max_retries {
        let retry = retry as u16;
        let seed = HashSeed::new(spec.base_seed, retry);
        let rows = entries
            .iter()
            .map(|e| {
                let (start, pattern) = row_for_key(e.key, seed, params, spec.force_leading_one);
                BandRow {
                    start,
                    pattern,
                    rhs: e.value,
                }
            })
            .collect();
        let sys = BandSystem::with_rows(n, spec.block_len, spec.value_bits, rows)
            .expect("rows come from row_for_key");
        match solve(&sys) {
            Ok(table) => {
                return Ok(BuiltChunk {
                    retry,
                    n,
                    planes: table.planes,
                })
            }
            Err(SolverError::Dependent { .. }) => continue,
            Err(e) => unreachable!("solver rejected a well-formed system: {e}"),
        }
    }
    Err(ConstructError::RetriesExhausted {
        chunk,
        attempts: spec.max_retries,
    })
}

/// Evaluates a key against solution planes stored from bit `base` on.
#[inline]
pub(crate) fn eval_planes<W: WordSource>(
    planes: &[W],
    base: usize,
    key: &[u8],
    seed: HashSeed,
    params: RowParams,
    force_leading_one: bool,
) -> u64 {
    let (start, pattern) = row_for_key(key, seed, params, force_leading_one);
    let offset = base + start - 1;
    let mut value = 0u64;
    for (t, plane) in planes.iter().enumerate() {
        if dot_window_in(plane, offset, pattern.words(), params.block_len) {
            value |= 1 << t;
        }
    }
    value
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatRetrieval {
    params: FlatParams,
    m: usize,
    n: usize,
    seed: HashSeed,
    planes: Vec<BitVec>,
}

impl FlatRetrieval {
    /// Builds the structure, retrying with new seeds until the system is solvable.
    pub fn construct<K: AsRef<[u8]>>(
        pairs: &[(K, u64)],
        params: FlatParams,
    ) -> Result<Self, ConstructError> {
        check_common(
            params.epsilon,
            params.block_len,
            params.value_bits,
            params.max_retries,
        )?;
        let entries = normalize(pairs, params.base_seed, params.value_bits)?;
        let spec = ChunkSpec {
            epsilon: params.epsilon,
            block_len: params.block_len,
            value_bits: params.value_bits,
            max_retries: params.max_retries,
            base_seed: params.base_seed,
            force_leading_one: params.force_leading_one,
        };
        let built = build_chunk(&entries, &spec, 0)?;
        Ok(Self {
            params,
            m: entries.len(),
            n: built.n,
            seed: HashSeed::new(params.base_seed, built.retry),
            planes: built.planes,
        })
    }

    /// Value stored for `key`; arbitrary for keys that were not in the input.
    pub fn query(&self, key: &[u8]) -> u64 {
        eval_planes(
            &self.planes,
            0,
            key,
            self.seed,
            self.row_params(),
            self.params.force_leading_one,
        )
    }

    /// Query against caller-supplied plane storage, e.g. counting wrappers.
    pub fn query_with<W: WordSource>(&self, planes: &[W], key: &[u8]) -> u64 {
        eval_planes(
            planes,
            0,
            key,
            self.seed,
            self.row_params(),
            self.params.force_leading_one,
        )
    }

    fn row_params(&self) -> RowParams {
        RowParams::new(self.n, self.params.block_len)
    }

    pub fn params(&self) -> &FlatParams {
        &self.params
    }

    /// Number of distinct keys stored.
    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Start positions, `ceil(m / (1 - epsilon))`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Seed that produced the stored solution (its retry is the winning attempt).
    pub fn seed(&self) -> HashSeed {
        self.seed
    }

    pub fn planes(&self) -> &[BitVec] {
        &self.planes
    }

    /// Table length per plane in bits, `n + L - 1`.
    pub fn table_bits(&self) -> usize {
        self.n + self.params.block_len - 1
    }

    /// `N / (m r) - 1` where `N` counts table bits only.
    pub fn overhead(&self) -> Option<f64> {
        (self.m > 0).then(|| self.table_bits() as f64 / self.m as f64 - 1.0)
    }
}
