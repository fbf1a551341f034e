//! Partitioned retrieval.
//!
//! A first-level hash splits the keys into `ceil(m / C)` chunks. Each chunk
//! is solved on its own (in parallel when the `parallel` feature is on) with
//! its own retry seed, and the per-chunk tables are concatenated. A small
//! directory records where each chunk's table starts and which seed built it.
//!
//! In memory the directory is one word per chunk, `offset << 16 | seed`,
//! plus a terminal entry. A query reads entries `k` and `k + 1`, which give
//! the chunk's offset, seed and table length, then one window per plane.

use crate::bitkit::{words_for, xor_bits_at, BitVec, WordSource, WORD_BITS};
use crate::flat::{
    build_chunk, check_common, eval_planes, normalize, BuiltChunk, ChunkSpec, ConstructError, Entry,
};
use crate::row_gen::{map_to_range, HashSeed, RowParams};

/// Largest total table length the packed directory can address.
pub const MAX_TABLE_BITS: u64 = 1 << 48;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChunkedParams {
    pub epsilon: f64,
    pub block_len: usize,
    pub value_bits: usize,
    /// Target number of keys per chunk.
    pub chunk_size: usize,
    pub max_retries: u32,
    pub base_seed: u64,
    pub force_leading_one: bool,
}

impl Default for ChunkedParams {
    fn default() -> Self {
        Self {
            epsilon: 0.05,
            block_len: 64,
            value_bits: 1,
            chunk_size: 10_000,
            max_retries: 64,
            base_seed: 0,
            force_leading_one: false,
        }
    }
}

/// Per-chunk table offsets (in bits, with a terminal entry) and retry seeds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkDirectory {
    entries: Vec<u64>,
}

impl ChunkDirectory {
    /// Packs offsets and seeds; `offsets.len()` must be `seeds.len() + 1`.
    pub(crate) fn from_parts(offsets: &[u64], seeds: &[u16]) -> Self {
        debug_assert_eq!(offsets.len(), seeds.len() + 1);
        let entries = offsets
            .iter()
            .enumerate()
            .map(|(k, &off)| off << 16 | u64::from(seeds.get(k).copied().unwrap_or(0)))
            .collect();
        Self { entries }
    }

    pub fn num_chunks(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn offset(&self, chunk: usize) -> u64 {
        self.entries[chunk] >> 16
    }

    pub fn seed(&self, chunk: usize) -> u16 {
        self.entries[chunk] as u16
    }

    pub fn offsets(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e >> 16).collect()
    }

    pub fn seeds(&self) -> Vec<u16> {
        self.entries[..self.num_chunks()]
            .iter()
            .map(|&e| e as u16)
            .collect()
    }

    /// Table length of `chunk` in bits.
    pub fn table_len(&self, chunk: usize) -> u64 {
        self.offset(chunk + 1) - self.offset(chunk)
    }

    /// Raw packed words, as read by queries.
    pub fn words(&self) -> &[u64] {
        &self.entries
    }

    /// Bits the serialized directory occupies: 16-bit seeds, 64-bit offsets.
    pub fn stored_bits(&self) -> u64 {
        16 * self.num_chunks() as u64 + 64 * self.entries.len() as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChunkedRetrieval {
    params: ChunkedParams,
    m: u64,
    directory: ChunkDirectory,
    planes: Vec<BitVec>,
}

/// Number of chunks for `m` keys: `ceil(m / C)`, at least one.
pub fn chunk_count(m: usize, chunk_size: usize) -> usize {
    m.div_ceil(chunk_size).max(1)
}

impl ChunkedRetrieval {
    pub fn construct<K: AsRef<[u8]>>(
        pairs: &[(K, u64)],
        params: ChunkedParams,
    ) -> Result<Self, ConstructError> {
        check_common(
            params.epsilon,
            params.block_len,
            params.value_bits,
            params.max_retries,
        )?;
        if params.chunk_size == 0 {
            return Err(ConstructError::InvalidParams(
                "chunk size must be at least 1".into(),
            ));
        }
        let entries = normalize(pairs, params.base_seed, params.value_bits)?;
        let num_chunks = chunk_count(entries.len(), params.chunk_size);

        // Entries are sorted by fingerprint and the chunk index is a monotone
        // function of its high half, so chunks are contiguous runs.
        let mut bounds = Vec::with_capacity(num_chunks + 1);
        bounds.push(0);
        let mut pos = 0;
        for k in 0..num_chunks {
            while pos < entries.len()
                && map_to_range(entries[pos].fp.high, num_chunks as u64) as usize == k
            {
                pos += 1;
            }
            bounds.push(pos);
        }
        debug_assert_eq!(pos, entries.len());

        let spec = ChunkSpec {
            epsilon: params.epsilon,
            block_len: params.block_len,
            value_bits: params.value_bits,
            max_retries: params.max_retries,
            base_seed: params.base_seed,
            force_leading_one: params.force_leading_one,
        };
        let built = build_all(&entries, &bounds, &spec)?;

        let mut offsets = Vec::with_capacity(num_chunks + 1);
        let mut total = 0u64;
        offsets.push(0);
        for c in &built {
            total += (c.n + params.block_len - 1) as u64;
            offsets.push(total);
        }
        if total >= MAX_TABLE_BITS {
            return Err(ConstructError::InvalidParams(format!(
                "total table of {total} bits exceeds the directory's 48-bit offsets"
            )));
        }
        let seeds: Vec<u16> = built.iter().map(|c| c.retry).collect();

        let total = total as usize;
        let mut planes = Vec::with_capacity(params.value_bits);
        for t in 0..params.value_bits {
            let mut words = vec![0u64; words_for(total)];
            for (c, &off) in built.iter().zip(&offsets) {
                append_plane(&mut words, off as usize, &c.planes[t]);
            }
            planes.push(BitVec::from_words(words, total).expect("sized to the total"));
        }

        Ok(Self {
            params,
            m: entries.len() as u64,
            directory: ChunkDirectory::from_parts(&offsets, &seeds),
            planes,
        })
    }

    pub(crate) fn from_parts(
        params: ChunkedParams,
        m: u64,
        directory: ChunkDirectory,
        planes: Vec<BitVec>,
    ) -> Self {
        Self {
            params,
            m,
            directory,
            planes,
        }
    }

    /// Value stored for `key`; arbitrary for keys outside the input set.
    #[inline]
    pub fn query(&self, key: &[u8]) -> u64 {
        self.query_with(self.directory.words(), &self.planes, key)
    }

    /// Query against caller-supplied directory and plane storage.
    pub fn query_with<D: WordSource + ?Sized, W: WordSource>(
        &self,
        directory: &D,
        planes: &[W],
        key: &[u8],
    ) -> u64 {
        let num_chunks = self.directory.num_chunks();
        let base = HashSeed::new(self.params.base_seed, 0);
        let chunk = crate::row_gen::chunk_for_key(key, base, num_chunks);
        let here = directory.word(chunk);
        let next = directory.word(chunk + 1);
        let offset = (here >> 16) as usize;
        let len = (next >> 16) as usize - offset;
        let n = len + 1 - self.params.block_len;
        eval_planes(
            planes,
            offset,
            key,
            base.with_retry(here as u16),
            RowParams::new(n, self.params.block_len),
            self.params.force_leading_one,
        )
    }

    pub fn params(&self) -> &ChunkedParams {
        &self.params
    }

    pub fn directory(&self) -> &ChunkDirectory {
        &self.directory
    }

    pub fn planes(&self) -> &[BitVec] {
        &self.planes
    }

    /// Number of distinct keys stored.
    pub fn len(&self) -> u64 {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Table bits per plane, summed over chunks.
    pub fn table_bits(&self) -> u64 {
        self.directory.offset(self.directory.num_chunks())
    }

    /// All stored bits: `r` table planes plus the directory. The fixed header is excluded.
    pub fn total_bits(&self) -> u64 {
        self.table_bits() * self.params.value_bits as u64 + self.directory.stored_bits()
    }

    /// `N / (m r) - 1`, or `None` for an empty structure.
    pub fn overhead(&self) -> Option<f64> {
        (self.m > 0).then(|| {
            self.total_bits() as f64 / (self.m as f64 * self.params.value_bits as f64) - 1.0
        })
    }

    /// How many chunks needed each retry count, indexed by retry.
    pub fn retry_histogram(&self) -> Vec<u64> {
        let seeds = self.directory.seeds();
        let max = seeds.iter().copied().max().unwrap_or(0) as usize;
        let mut hist = vec![0u64; max + 1];
        for s in seeds {
            hist[s as usize] += 1;
        }
        hist
    }
}

fn append_plane(dst: &mut [u64], offset: usize, plane: &BitVec) {
    let mut pos = offset;
    for (k, &w) in plane.words().iter().enumerate() {
        let bits = (plane.len() - k * WORD_BITS).min(WORD_BITS);
        xor_bits_at(dst, pos, w, bits);
        pos += bits;
    }
}

#[cfg(feature = "parallel")]
fn build_all(
    entries: &[Entry<'_>],
    bounds: &[usize],
    spec: &ChunkSpec,
) -> Result<Vec<BuiltChunk>, ConstructError> {
    use rayon::prelude::*;
    (0..bounds.len() - 1)
        .into_par_iter()
        .map(|k| build_chunk(&entries[bounds[k]..bounds[k + 1]], spec, k))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn build_all(
    entries: &[Entry<'_>],
    bounds: &[usize],
    spec: &ChunkSpec,
) -> Result<Vec<BuiltChunk>, ConstructError> {
    (0..bounds.len() - 1)
        .map(|k| build_chunk(&entries[bounds[k]..bounds[k + 1]], spec, k))
        .collect()
}
