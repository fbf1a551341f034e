//! JSON report printed by `build`, `bench` and `info`.

use std::hint::black_box;
use std::time::Instant;

use bandset::ChunkedRetrieval;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct ParamsReport {
    pub epsilon: f64,
    pub block_len: usize,
    pub chunk_size: usize,
    pub value_bits: usize,
    pub base_seed: u64,
    pub force_leading_one: bool,
}

#[derive(Debug, Serialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub m: u64,
    pub params: ParamsReport,
    pub num_chunks: usize,
    pub total_bits: u64,
    /// `total_bits / (m r) - 1`; null for an empty structure.
    pub overhead: Option<f64>,
    pub construct_ns_per_key: Option<f64>,
    pub query_ns_per_key: Option<f64>,
    /// Entry `i` counts chunks that needed `i` retries.
    pub retries_histogram: Vec<u64>,
}

impl BenchReport {
    pub fn describe(ds: &ChunkedRetrieval) -> Self {
        let p = ds.params();
        Self {
            schema_version: SCHEMA_VERSION,
            m: ds.len(),
            params: ParamsReport {
                epsilon: p.epsilon,
                block_len: p.block_len,
                chunk_size: p.chunk_size,
                value_bits: p.value_bits,
                base_seed: p.base_seed,
                force_leading_one: p.force_leading_one,
            },
            num_chunks: ds.directory().num_chunks(),
            total_bits: ds.total_bits(),
            overhead: ds.overhead(),
            construct_ns_per_key: None,
            query_ns_per_key: None,
            retries_histogram: ds.retry_histogram(),
        }
    }
}

/// Queries every key once. Returns mean ns per query and the number of
/// keys whose stored value differs from the expected one.
pub fn query_pass(ds: &ChunkedRetrieval, pairs: &[(Vec<u8>, u64)]) -> (Option<f64>, usize) {
    if pairs.is_empty() {
        return (None, 0);
    }
    let t = Instant::now();
    let mut wrong = 0usize;
    for (k, v) in pairs {
        wrong += usize::from(ds.query(black_box(k)) != *v);
    }
    let ns = t.elapsed().as_nanos() as f64 / pairs.len() as f64;
    (Some(ns), wrong)
}
