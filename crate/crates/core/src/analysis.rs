//! Empirical checks of the solver's probabilistic behaviour.
//!
//! * Coin-flipping Robin Hood placement (CFRH): keys are inserted in order of
//!   hash value into an unbounded table by linear probing, but an empty cell
//!   is taken only if a fair coin says so. Feeding it the bits the solver
//!   reads at non-pivot columns reproduces the solver's pivots exactly.
//! * Heights `H_j = #{i : h_i <= j < pos_i}`: keys that probe cell `j`
//!   without landing there. Their sum bounds the solver's row additions.
//! * Poissonised arrivals, the chain `X_j = max(0, X_{j-1} + d_j - 1)` and
//!   the discretised M/D/1 queue `Z_j`, whose stationary mean is
//!   `rho + rho^2 / (2 (1 - rho))`.
//!
//! Cells and hash values are 1-based throughout; `heights[j - 1]` is `H_j`.

use rand::Rng;
use thiserror::Error;

use crate::band_solver::{eliminate, BandSystem, SolverError};
use crate::sim_rng::{self, streams, CoinStream, SimRng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("hash values must be nondecreasing (index {0})")]
    Unsorted(usize),
    #[error("hash values must lie in [1, n] (index {0})")]
    OutOfRange(usize),
    #[error("transcript for key {key} ran out before the key was placed")]
    TranscriptExhausted { key: usize },
    #[error("expected {expected} transcripts or key ids, got {got}")]
    CoinCount { expected: usize, got: usize },
    #[error("queue is unstable for rho = {0}")]
    Unstable(f64),
    #[error("parameter out of range: {0}")]
    BadParameter(String),
}

/// Where CFRH gets its coin flips.
#[derive(Debug, Clone)]
pub enum CoinSource {
    /// One shared pseudorandom stream, consumed in probing order.
    Stream(Box<CoinStream>),
    /// Explicit per-key sequences (indexed like the sorted hash values).
    Transcripts(Vec<Vec<bool>>),
    /// Coin for (key, cell) is a fixed function of both, so two runs that
    /// share a key also share its coin at every cell.
    PerCell { seed: u64, key_ids: Vec<u64> },
}

impl CoinSource {
    pub fn seeded(seed: u64) -> Self {
        CoinSource::Stream(Box::new(CoinStream::new(sim_rng::stream(
            seed,
            streams::COINS,
        ))))
    }
}

#[inline]
fn mix64(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

#[inline]
fn cell_coin(seed: u64, key_id: u64, cell: usize) -> bool {
    mix64(seed ^ mix64(key_id ^ mix64(cell as u64 ^ 0x632b_e59b_d9b4_e019))) & 1 == 1
}

/// Placements and heights from one CFRH run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfrhTrace {
    pub hash_values: Vec<usize>,
    pub positions: Vec<usize>,
    /// `heights[j - 1] = H_j` for `j` in `1..=heights.len()`.
    pub heights: Vec<u32>,
    /// Some displacement `pos_i - h_i` reached `L`.
    pub failed: bool,
}

impl CfrhTrace {
    pub fn sum_heights(&self) -> u64 {
        self.heights.iter().map(|&h| u64::from(h)).sum()
    }

    pub fn max_height(&self) -> u32 {
        self.heights.iter().copied().max().unwrap_or(0)
    }

    /// Mean of `H_j` over cells `1..=cells`.
    pub fn mean_height(&self, cells: usize) -> f64 {
        if cells == 0 {
            return 0.0;
        }
        let s: u64 = self.heights[..cells.min(self.heights.len())]
            .iter()
            .map(|&h| u64::from(h))
            .sum();
        s as f64 / cells as f64
    }

    pub fn max_displacement(&self) -> usize {
        self.positions
            .iter()
            .zip(&self.hash_values)
            .map(|(p, h)| p - h)
            .max()
            .unwrap_or(0)
    }
}

/// Coin-flipping Robin Hood hashing on an unbounded table.
///
/// `hash_values` must be sorted and lie in `[1, n]`. Heights are reported
/// for cells `1..=max(n + L - 1, max position)`.
pub fn run_cfrh(
    hash_values: &[usize],
    n: usize,
    mut coins: CoinSource,
    block_len: usize,
) -> Result<CfrhTrace, AnalysisError> {
    let m = hash_values.len();
    for (i, &h) in hash_values.iter().enumerate() {
        if !(1..=n).contains(&h) {
            return Err(AnalysisError::OutOfRange(i));
        }
        if i > 0 && hash_values[i - 1] > h {
            return Err(AnalysisError::Unsorted(i));
        }
    }
    match &coins {
        CoinSource::Transcripts(t) if t.len() != m => {
            return Err(AnalysisError::CoinCount {
                expected: m,
                got: t.len(),
            })
        }
        CoinSource::PerCell { key_ids, .. } if key_ids.len() != m => {
            return Err(AnalysisError::CoinCount {
                expected: m,
                got: key_ids.len(),
            })
        }
        _ => {}
    }

    let mut occupied = vec![false; n + block_len + 1];
    let mut positions = Vec::with_capacity(m);
    for (i, &h) in hash_values.iter().enumerate() {
        let mut used = 0usize;
        let mut j = h;
        loop {
            if j >= occupied.len() {
                occupied.resize(occupied.len() * 2, false);
            }
            if !occupied[j] {
                let heads = match &mut coins {
                    CoinSource::Stream(s) => s.flip(),
                    CoinSource::Transcripts(t) => {
                        let bit = *t[i]
                            .get(used)
                            .ok_or(AnalysisError::TranscriptExhausted { key: i })?;
                        used += 1;
                        bit
                    }
                    CoinSource::PerCell { seed, key_ids } => cell_coin(*seed, key_ids[i], j),
                };
                if heads {
                    occupied[j] = true;
                    positions.push(j);
                    break;
                }
            }
            j += 1;
        }
    }

    let failed = positions
        .iter()
        .zip(hash_values)
        .any(|(p, h)| p - h >= block_len);
    let table_len = positions
        .iter()
        .copied()
        .max()
        .unwrap_or(0)
        .max(n + block_len - 1);
    let heights = heights_from_pivots(hash_values, &positions, table_len);
    Ok(CfrhTrace {
        hash_values: hash_values.to_vec(),
        positions,
        heights,
        failed,
    })
}

/// `H_j = #{i : start_i <= j < pivot_i}` for `j` in `1..=table_len`.
pub fn heights_from_pivots(starts: &[usize], pivots: &[usize], table_len: usize) -> Vec<u32> {
    assert_eq!(starts.len(), pivots.len(), "one pivot per start");
    let mut diff = vec![0i64; table_len + 2];
    for (&s, &p) in starts.iter().zip(pivots) {
        assert!(p >= s, "pivot {p} before start {s}");
        if p > s {
            diff[s] += 1;
            diff[p.min(table_len + 1)] -= 1;
        }
    }
    let mut out = Vec::with_capacity(table_len);
    let mut acc = 0i64;
    for d in &diff[1..=table_len] {
        acc += d;
        out.push(acc as u32);
    }
    out
}

/// Solver run and the CFRH run driven by the solver's own bits.
#[derive(Debug, Clone)]
pub struct CoupledRun {
    pub pivots: Vec<usize>,
    pub additions: u64,
    pub trace: CfrhTrace,
}

impl CoupledRun {
    /// `pos_i == piv_i` for every row.
    pub fn positions_match(&self) -> bool {
        self.pivots == self.trace.positions
    }

    /// Row additions never exceed the total height.
    pub fn additions_bounded(&self) -> bool {
        self.additions <= self.trace.sum_heights()
    }
}

/// Eliminates `sys` while recording coin transcripts, then replays CFRH with
/// hash values = sorted starts and those transcripts as coins.
pub fn coupled_replay(sys: &BandSystem) -> Result<CoupledRun, SolverError> {
    let out = eliminate(sys, true)?;
    let transcripts = out
        .coin_transcripts()
        .expect("transcripts were requested")
        .to_vec();
    let trace = run_cfrh(
        out.starts(),
        sys.n(),
        CoinSource::Transcripts(transcripts),
        sys.block_len(),
    )
    .expect("solver transcripts always end in a placement");
    Ok(CoupledRun {
        pivots: out.pivots().to_vec(),
        additions: out.additions(),
        trace,
    })
}

/// Poisson variate by sequential inversion. Exact; intended for small `lambda`.
pub fn sample_poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u32 {
    if lambda <= 0.0 {
        return 0;
    }
    let u = sim_rng::uniform(rng);
    let mut k = 0u32;
    let mut p = (-lambda).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= lambda / f64::from(k);
        cdf += p;
        if p == 0.0 && cdf < u {
            // Rounding left the CDF short of 1; u is in the far tail.
            break;
        }
    }
    k
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueueKind {
    /// `X_j = max(0, X_{j-1} + d_j - 1)`.
    X,
    /// `Z_j = d_j` if `Z_{j-1} = 0`, else `Z_{j-1} + d_j - 1`.
    Z,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueueTrace {
    pub kind: QueueKind,
    /// Mean arrivals per step.
    pub rho: f64,
    /// `arrivals[j - 1] = d_j`.
    pub arrivals: Vec<u32>,
    /// `states[j]` for `j` in `0..=steps`; `states[0] = 0`.
    pub states: Vec<u32>,
}

impl QueueTrace {
    pub fn steps(&self) -> usize {
        self.arrivals.len()
    }

    /// Mean of the states after time 0.
    pub fn time_average(&self) -> f64 {
        if self.states.len() <= 1 {
            return 0.0;
        }
        let s: u64 = self.states[1..].iter().map(|&z| u64::from(z)).sum();
        s as f64 / (self.states.len() - 1) as f64
    }

    pub fn max_state(&self) -> u32 {
        self.states.iter().copied().max().unwrap_or(0)
    }
}

/// `steps` independent Poisson(`rho`) arrival counts.
pub fn draw_arrivals<R: Rng + ?Sized>(rho: f64, steps: usize, rng: &mut R) -> Vec<u32> {
    (0..steps).map(|_| sample_poisson(rho, rng)).collect()
}

pub fn x_chain(arrivals: &[u32]) -> Vec<u32> {
    let mut states = Vec::with_capacity(arrivals.len() + 1);
    let mut x = 0u32;
    states.push(x);
    for &d in arrivals {
        x = (x + d).saturating_sub(1);
        states.push(x);
    }
    states
}

pub fn z_chain(arrivals: &[u32]) -> Vec<u32> {
    let mut states = Vec::with_capacity(arrivals.len() + 1);
    let mut z = 0u32;
    states.push(z);
    for &d in arrivals {
        z = if z == 0 { d } else { z + d - 1 };
        states.push(z);
    }
    states
}

/// X-chain with arrivals `Poisson(1 - epsilon' / 2)`.
pub fn simulate_x<R: Rng + ?Sized>(
    epsilon_prime: f64,
    steps: usize,
    rng: &mut R,
) -> Result<QueueTrace, AnalysisError> {
    if !(epsilon_prime > 0.0 && epsilon_prime < 1.0) {
        return Err(AnalysisError::BadParameter(format!(
            "epsilon' = {epsilon_prime} outside (0, 1)"
        )));
    }
    let rho = 1.0 - epsilon_prime / 2.0;
    let arrivals = draw_arrivals(rho, steps, rng);
    Ok(QueueTrace {
        kind: QueueKind::X,
        rho,
        states: x_chain(&arrivals),
        arrivals,
    })
}

/// Discretised M/D/1 queue. With `shared_arrivals` the given `d_j` are
/// reused (coupling with an X-chain) and `rng` is not touched.
pub fn simulate_z<R: Rng + ?Sized>(
    rho: f64,
    steps: usize,
    rng: &mut R,
    shared_arrivals: Option<&[u32]>,
) -> Result<QueueTrace, AnalysisError> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(AnalysisError::BadParameter(format!(
            "rho = {rho} outside (0, 1)"
        )));
    }
    let arrivals = match shared_arrivals {
        Some(d) => d.to_vec(),
        None => draw_arrivals(rho, steps, rng),
    };
    Ok(QueueTrace {
        kind: QueueKind::Z,
        rho,
        states: z_chain(&arrivals),
        arrivals,
    })
}

/// Stationary mean number of customers in an M/D/1 queue.
pub fn mdone_mean(rho: f64) -> Result<f64, AnalysisError> {
    if !(0.0..1.0).contains(&rho) {
        return Err(AnalysisError::Unstable(rho));
    }
    Ok(rho + 0.5 * rho * rho / (1.0 - rho))
}

/// Fraction of states strictly greater than `k`.
pub fn tail_estimate(trace: &QueueTrace, k: i64) -> f64 {
    if trace.states.is_empty() {
        return 0.0;
    }
    let above = trace.states.iter().filter(|&&z| i64::from(z) > k).count();
    above as f64 / trace.states.len() as f64
}

/// Least-squares decay rate `c` in `Pr[Z > k] ~ exp(-c k)` over `ks`,
/// using only points with a nonzero empirical tail.
pub fn tail_decay_rate(trace: &QueueTrace, ks: std::ops::RangeInclusive<i64>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ks
        .map(|k| (k as f64, tail_estimate(trace, k)))
        .filter(|&(_, t)| t > 0.0)
        .map(|(k, t)| (k, t.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(-sxy / sxx)
}

/// Per-cell Poisson arrival counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoissonisedInput {
    /// `counts[j - 1] = k_j`.
    pub counts: Vec<u32>,
    pub m_prime: usize,
}

impl PoissonisedInput {
    pub fn draw<R: Rng + ?Sized>(n: usize, lambda: f64, rng: &mut R) -> Self {
        let counts: Vec<u32> = (0..n).map(|_| sample_poisson(lambda, rng)).collect();
        let m_prime = counts.iter().map(|&k| k as usize).sum();
        Self { counts, m_prime }
    }

    /// Sorted hash multiset: cell `j` repeated `k_j` times.
    pub fn hash_values(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.m_prime);
        for (j, &k) in self.counts.iter().enumerate() {
            out.extend(std::iter::repeat_n(j + 1, k as usize));
        }
        out
    }
}

fn check_eps(name: &str, e: f64) -> Result<(), AnalysisError> {
    if e > 0.0 && e < 1.0 {
        Ok(())
    } else {
        Err(AnalysisError::BadParameter(format!(
            "{name} = {e} outside (0, 1)"
        )))
    }
}

/// CFRH on Poissonised input: `k_j ~ Poisson(1 - epsilon')` keys hash to
/// each cell `j` of `[1, n]`, with pseudorandom coins.
pub fn poissonised_cfrh(
    n: usize,
    epsilon_prime: f64,
    block_len: usize,
    seed: u64,
) -> Result<CfrhTrace, AnalysisError> {
    check_eps("epsilon'", epsilon_prime)?;
    let mut rng = sim_rng::stream(seed, streams::ARRIVALS);
    let input = PoissonisedInput::draw(n, 1.0 - epsilon_prime, &mut rng);
    run_cfrh(&input.hash_values(), n, CoinSource::seeded(seed), block_len)
}

/// CFRH on `floor((1 - epsilon) n)` keys with uniform hash values in `[1, n]`.
pub fn ordinary_cfrh(
    n: usize,
    epsilon: f64,
    block_len: usize,
    seed: u64,
) -> Result<CfrhTrace, AnalysisError> {
    check_eps("epsilon", epsilon)?;
    let m = ((1.0 - epsilon) * n as f64).floor() as usize;
    let mut rng = sim_rng::stream(seed, streams::HASHES);
    let mut h: Vec<usize> = (0..m).map(|_| rng.gen_range(1..=n)).collect();
    h.sort_unstable();
    run_cfrh(&h, n, CoinSource::seeded(seed), block_len)
}

/// Ordinary and Poissonised CFRH runs sharing keys and per-(key, cell) coins.
#[derive(Debug, Clone)]
pub struct PoissonCoupling {
    pub m: usize,
    pub m_prime: usize,
    /// Draws of `m'` rejected because `m' < m`.
    pub rejections: u32,
    pub ordinary: CfrhTrace,
    pub poissonised: CfrhTrace,
}

impl PoissonCoupling {
    /// `H'_j >= H_j` for every cell `j` of the ordinary table.
    pub fn dominates(&self) -> bool {
        self.ordinary
            .heights
            .iter()
            .enumerate()
            .all(|(j, &h)| self.poissonised.heights.get(j).copied().unwrap_or(0) >= h)
    }
}

/// Builds the coupling between an ordinary run with `m = floor((1 - eps) n)`
/// keys and a Poissonised run with `m' ~ Poisson((1 - eps/2) n)` keys,
/// conditioned on `m' >= m` by rejection. Given `m'`, the Poissonised key
/// set is the ordinary keys plus `m' - m` extra uniform keys. Ordinary keys
/// flip the same coin at the same cell in both runs.
pub fn coupled_poissonisation(
    n: usize,
    epsilon: f64,
    block_len: usize,
    seed: u64,
) -> Result<PoissonCoupling, AnalysisError> {
    check_eps("epsilon", epsilon)?;
    let m = ((1.0 - epsilon) * n as f64).floor() as usize;
    let lambda = 1.0 - epsilon / 2.0;
    let mut count_rng = sim_rng::stream(seed, streams::ARRIVALS);
    let mut rejections = 0;
    let m_prime = loop {
        let total: usize = (0..n)
            .map(|_| sample_poisson(lambda, &mut count_rng) as usize)
            .sum();
        if total >= m {
            break total;
        }
        rejections += 1;
    };

    let mut rng = sim_rng::stream(seed, streams::HASHES);
    // (hash value, tie-break, key id); key ids below m are the ordinary keys.
    let mut keys: Vec<(usize, u64, u64)> = (0..m_prime as u64)
        .map(|id| (rng.gen_range(1..=n), rng.gen(), id))
        .collect();
    keys.sort_unstable();

    let coin_seed = mix64(seed ^ streams::COINS);
    let run = |subset: Vec<&(usize, u64, u64)>| {
        let h: Vec<usize> = subset.iter().map(|k| k.0).collect();
        let ids: Vec<u64> = subset.iter().map(|k| k.2).collect();
        run_cfrh(
            &h,
            n,
            CoinSource::PerCell {
                seed: coin_seed,
                key_ids: ids,
            },
            block_len,
        )
    };
    let ordinary = run(keys.iter().filter(|k| k.2 < m as u64).collect())?;
    let poissonised = run(keys.iter().collect())?;
    Ok(PoissonCoupling {
        m,
        m_prime,
        rejections,
        ordinary,
        poissonised,
    })
}

/// `ceil(log2(4 / epsilon'))`, the additive slack between Poissonised
/// heights and the X-chain.
pub fn queue_shift(epsilon_prime: f64) -> u32 {
    (4.0 / epsilon_prime).log2().ceil() as u32
}

/// One trial of the max-height versus max-queue comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxComparison {
    pub max_height: u32,
    pub max_queue: u32,
    pub shift: u32,
}

impl MaxComparison {
    pub fn holds(&self) -> bool {
        self.max_height <= self.max_queue + self.shift
    }
}

/// Compares `max_j H'_j` of a Poissonised CFRH run (`epsilon' = epsilon / 2`)
/// with `max_j Z_j` of an independent M/D/1 run of the same length at
/// `rho = 1 - epsilon' / 2`.
pub fn max_height_vs_queue(
    n: usize,
    epsilon: f64,
    block_len: usize,
    seed: u64,
) -> Result<MaxComparison, AnalysisError> {
    check_eps("epsilon", epsilon)?;
    let eps_prime = epsilon / 2.0;
    let trace = poissonised_cfrh(n, eps_prime, block_len, seed)?;
    let cells = n + block_len - 1;
    let max_height = trace.heights[..cells].iter().copied().max().unwrap_or(0);
    let mut rng: SimRng = sim_rng::stream(seed, 100 + streams::ARRIVALS);
    let z = simulate_z(1.0 - eps_prime / 2.0, cells, &mut rng, None)?;
    Ok(MaxComparison {
        max_height,
        max_queue: z.max_state(),
        shift: queue_shift(eps_prime),
    })
}
