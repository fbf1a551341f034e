//! Binary serialization of [`ChunkedRetrieval`].
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "BSET"
//!      4     2  version (1)
//!      6     2  flags (bit 0: force_leading_one)
//!      8     2  value bits r
//!     10     2  block length L
//!     12     8  epsilon, IEEE-754 f64
//!     20     8  chunk size C
//!     28     8  key count m
//!     36     8  chunk count k
//!     44     8  base seed
//!     52  2k    per-chunk retry seeds, u16
//!      .  8k+8  per-chunk bit offsets plus terminal offset, u64
//!      .        r bit planes, each ceil(offsets[k] / 64) words, LSB-first
//! ```

use thiserror::Error;

use crate::band_solver::MAX_VALUE_BITS;
use crate::bitkit::{words_for, BitVec};
use crate::chunked::{ChunkDirectory, ChunkedParams, ChunkedRetrieval, MAX_TABLE_BITS};

pub const MAGIC: [u8; 4] = *b"BSET";
pub const VERSION: u16 = 1;
pub const HEADER_BYTES: usize = 52;

const FLAG_FORCE_LEADING_ONE: u16 = 1;

/// Retry budget recorded for deserialized structures; not part of the format.
const DEFAULT_MAX_RETRIES: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic bytes {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),
    #[error("unknown flag bits {0:#06x}")]
    UnknownFlags(u16),
    #[error("input truncated: needed {needed} bytes, have {have}")]
    Truncated { needed: usize, have: usize },
    #[error("{0} trailing bytes after the last bit plane")]
    TrailingBytes(usize),
    #[error("invalid structure: {0}")]
    Invalid(String),
}

pub fn serialize(ds: &ChunkedRetrieval) -> Vec<u8> {
    let p = ds.params();
    let dir = ds.directory();
    let k = dir.num_chunks();
    let plane_words = words_for(ds.table_bits() as usize);
    let mut out =
        Vec::with_capacity(HEADER_BYTES + 2 * k + 8 * (k + 1) + 8 * plane_words * p.value_bits);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    let flags = if p.force_leading_one {
        FLAG_FORCE_LEADING_ONE
    } else {
        0
    };
    out.extend_from_slice(&flags.to_le_bytes());
    out.extend_from_slice(&(p.value_bits as u16).to_le_bytes());
    out.extend_from_slice(&(p.block_len as u16).to_le_bytes());
    out.extend_from_slice(&p.epsilon.to_le_bytes());
    out.extend_from_slice(&(p.chunk_size as u64).to_le_bytes());
    out.extend_from_slice(&ds.len().to_le_bytes());
    out.extend_from_slice(&(k as u64).to_le_bytes());
    out.extend_from_slice(&p.base_seed.to_le_bytes());
    for s in dir.seeds() {
        out.extend_from_slice(&s.to_le_bytes());
    }
    for o in dir.offsets() {
        out.extend_from_slice(&o.to_le_bytes());
    }
    for plane in ds.planes() {
        for w in plane.words() {
            out.extend_from_slice(&w.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or(FormatError::Truncated {
                needed: self.pos.saturating_add(n),
                have: self.buf.len(),
            })?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16, FormatError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, FormatError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

fn invalid(msg: impl Into<String>) -> FormatError {
    FormatError::Invalid(msg.into())
}

pub fn deserialize(bytes: &[u8]) -> Result<ChunkedRetrieval, FormatError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let magic: [u8; 4] = r.take(4)?.try_into().unwrap();
    if magic != MAGIC {
        return Err(FormatError::BadMagic(magic));
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let flags = r.u16()?;
    if flags & !FLAG_FORCE_LEADING_ONE != 0 {
        return Err(FormatError::UnknownFlags(flags));
    }
    let value_bits = r.u16()? as usize;
    let block_len = r.u16()? as usize;
    let epsilon = r.f64()?;
    let chunk_size = r.u64()?;
    let m = r.u64()?;
    let num_chunks = r.u64()?;
    let base_seed = r.u64()?;

    if !(1..=MAX_VALUE_BITS).contains(&value_bits) {
        return Err(invalid(format!("value bits {value_bits} outside 1..=64")));
    }
    if block_len == 0 {
        return Err(invalid("block length 0"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!("epsilon {epsilon} outside (0, 1)")));
    }
    if chunk_size == 0 || chunk_size > usize::MAX as u64 {
        return Err(invalid(format!("chunk size {chunk_size}")));
    }
    let expected_chunks = m.div_ceil(chunk_size).max(1);
    if num_chunks != expected_chunks {
        return Err(invalid(format!(
            "{num_chunks} chunks recorded, {m} keys at chunk size {chunk_size} need {expected_chunks}"
        )));
    }
    // The seeds and offsets alone need 10 bytes per chunk.
    if num_chunks > (bytes.len() / 10) as u64 {
        return Err(FormatError::Truncated {
            needed: HEADER_BYTES.saturating_add((num_chunks as usize).saturating_mul(10)),
            have: bytes.len(),
        });
    }
    let k = num_chunks as usize;

    let mut seeds = Vec::with_capacity(k);
    for _ in 0..k {
        seeds.push(r.u16()?);
    }
    let mut offsets = Vec::with_capacity(k + 1);
    for _ in 0..=k {
        offsets.push(r.u64()?);
    }
    if offsets[0] != 0 {
        return Err(invalid("first offset must be 0"));
    }
    for (i, w) in offsets.windows(2).enumerate() {
        if w[1] < w[0] || w[1] - w[0] < block_len as u64 {
            return Err(invalid(format!(
                "chunk {i} table is shorter than one block ({} -> {})",
                w[0], w[1]
            )));
        }
    }
    let total = offsets[k];
    if total >= MAX_TABLE_BITS {
        return Err(invalid(format!("table of {total} bits is too large")));
    }
    let total = total as usize;
    let plane_words = words_for(total);
    let plane_bytes = plane_words
        .checked_mul(8 * value_bits)
        .ok_or_else(|| invalid("plane size overflow"))?;
    let remaining = bytes.len() - r.pos;
    if remaining < plane_bytes {
        return Err(FormatError::Truncated {
            needed: r.pos + plane_bytes,
            have: bytes.len(),
        });
    }
    if remaining > plane_bytes {
        return Err(FormatError::TrailingBytes(remaining - plane_bytes));
    }
    let mut planes = Vec::with_capacity(value_bits);
    for _ in 0..value_bits {
        let words = r
            .take(plane_words * 8)?
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        planes.push(BitVec::from_words(words, total).map_err(|e| invalid(e.to_string()))?);
    }

    let params = ChunkedParams {
        epsilon,
        block_len,
        value_bits,
        chunk_size: chunk_size as usize,
        max_retries: DEFAULT_MAX_RETRIES,
        base_seed,
        force_leading_one: flags & FLAG_FORCE_LEADING_ONE != 0,
    };
    Ok(ChunkedRetrieval::from_parts(
        params,
        m,
        ChunkDirectory::from_parts(&offsets, &seeds),
        planes,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(m: usize, r: usize, flag: bool) -> ChunkedRetrieval {
        let pairs: Vec<_> = (0..m)
            .map(|i| (format!("s{i}"), (i as u64 * 2_654_435_761) & ((1 << r) - 1)))
            .collect();
        ChunkedRetrieval::construct(
            &pairs,
            ChunkedParams {
                value_bits: r,
                chunk_size: 700,
                force_leading_one: flag,
                base_seed: 9,
                ..ChunkedParams::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn header_layout() {
        let ds = sample(1_500, 2, true);
        let bytes = serialize(&ds);
        assert_eq!(&bytes[..4], b"BSET");
        assert_eq!(u16::from_le_bytes([bytes[4], bytes[5]]), 1);
        assert_eq!(u16::from_le_bytes([bytes[6], bytes[7]]), 1);
        assert_eq!(u16::from_le_bytes([bytes[8], bytes[9]]), 2);
        assert_eq!(u16::from_le_bytes([bytes[10], bytes[11]]), 64);
        assert_eq!(f64::from_le_bytes(bytes[12..20].try_into().unwrap()), 0.05);
        assert_eq!(u64::from_le_bytes(bytes[20..28].try_into().unwrap()), 700);
        assert_eq!(u64::from_le_bytes(bytes[28..36].try_into().unwrap()), 1_500);
        assert_eq!(u64::from_le_bytes(bytes[36..44].try_into().unwrap()), 3);
        assert_eq!(u64::from_le_bytes(bytes[44..52].try_into().unwrap()), 9);
        let words = words_for(ds.table_bits() as usize);
        assert_eq!(bytes.len(), HEADER_BYTES + 3 * 2 + 4 * 8 + 2 * words * 8);
    }

    #[test]
    fn round_trip() {
        let ds = sample(2_000, 3, false);
        let bytes = serialize(&ds);
        let back = deserialize(&bytes).unwrap();
        assert_eq!(serialize(&back), bytes);
        for i in 0..3_000 {
            let key = format!("s{i}");
            assert_eq!(back.query(key.as_bytes()), ds.query(key.as_bytes()));
        }
    }

    #[test]
    fn rejects_corruption() {
        let bytes = serialize(&sample(800, 1, false));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(deserialize(&bad), Err(FormatError::BadMagic(_))));

        let mut bad = bytes.clone();
        bad[4] = 2;
        assert_eq!(
            deserialize(&bad).unwrap_err(),
            FormatError::UnsupportedVersion(2)
        );

        let mut bad = bytes.clone();
        bad[6] = 0x80;
        assert!(matches!(
            deserialize(&bad),
            Err(FormatError::UnknownFlags(_))
        ));

        assert!(matches!(
            deserialize(&bytes[..bytes.len() - 1]),
            Err(FormatError::Truncated { .. })
        ));
        assert!(matches!(
            deserialize(&bytes[..30]),
            Err(FormatError::Truncated { .. })
        ));

        let mut long = bytes.clone();
        long.push(0);
        assert_eq!(
            deserialize(&long).unwrap_err(),
            FormatError::TrailingBytes(1)
        );

        // Chunk count inconsistent with m and C.
        let mut bad = bytes.clone();
        bad[36] = 7;
        assert!(matches!(deserialize(&bad), Err(FormatError::Invalid(_))));

        // Epsilon out of range.
        let mut bad = bytes.clone();
        bad[12..20].copy_from_slice(&1.5f64.to_le_bytes());
        assert!(matches!(deserialize(&bad), Err(FormatError::Invalid(_))));

        // Dirty padding in the last plane word.
        let ds = sample(800, 1, false);
        if !ds.table_bits().is_multiple_of(64) {
            let mut bad = serialize(&ds);
            let last = bad.len() - 1;
            bad[last] |= 0x80;
            assert!(matches!(deserialize(&bad), Err(FormatError::Invalid(_))));
        }

        // Non-monotone offsets.
        let mut bad = bytes.clone();
        let off1 = HEADER_BYTES + 2 * 2 + 8;
        bad[off1..off1 + 8].copy_from_slice(&1u64.to_le_bytes());
        assert!(matches!(deserialize(&bad), Err(FormatError::Invalid(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..300)) {
            let _ = deserialize(&bytes);
        }

        #[test]
        fn mutated_files_never_panic(pos in 0usize..2_000, byte in any::<u8>()) {
            let mut bytes = serialize(&sample(300, 1, false));
            let p = pos % bytes.len();
            bytes[p] = byte;
            if let Ok(ds) = deserialize(&bytes) {
                let _ = ds.query(b"probe");
            }
        }
    }
}
