//! WebAssembly bindings for the browser demo in `www/`.

use bandset::analysis::{mdone_mean, ordinary_cfrh, poissonised_cfrh, simulate_z, x_chain};
use bandset::sim_rng::{self, streams};
use bandset::{synth, ChunkedParams, ChunkedRetrieval};
use wasm_bindgen::prelude::*;

const MAX_STEPS: usize = 5_000_000;
const MAX_CELLS: usize = 2_000_000;
const MAX_KEYS: usize = 2_000_000;

/// Coupled X and Z queue runs over the same Poisson arrivals.
#[wasm_bindgen]
pub struct QueueView {
    arrivals: Vec<u32>,
    x: Vec<u32>,
    z: Vec<u32>,
    z_mean: f64,
    expected_mean: f64,
}

#[wasm_bindgen]
impl QueueView {
    pub fn arrivals(&self) -> Vec<u32> {
        self.arrivals.clone()
    }

    pub fn x(&self) -> Vec<u32> {
        self.x.clone()
    }

    pub fn z(&self) -> Vec<u32> {
        self.z.clone()
    }

    /// Time average of Z.
    #[wasm_bindgen(getter)]
    pub fn z_mean(&self) -> f64 {
        self.z_mean
    }

    /// Stationary M/D/1 mean at this arrival rate.
    #[wasm_bindgen(getter)]
    pub fn expected_mean(&self) -> f64 {
        self.expected_mean
    }
}

pub fn queue(rho: f64, steps: usize, seed: u32) -> Result<QueueView, String> {
    if steps == 0 || steps > MAX_STEPS {
        return Err(format!("steps must lie in 1..={MAX_STEPS}"));
    }
    let mut rng = sim_rng::stream(u64::from(seed), streams::ARRIVALS);
    let z = simulate_z(rho, steps, &mut rng, None).map_err(|e| e.to_string())?;
    Ok(QueueView {
        x: x_chain(&z.arrivals),
        z_mean: z.time_average(),
        expected_mean: mdone_mean(rho).map_err(|e| e.to_string())?,
        arrivals: z.arrivals,
        z: z.states,
    })
}

#[wasm_bindgen]
pub fn queue_trace(rho: f64, steps: usize, seed: u32) -> Result<QueueView, JsError> {
    queue(rho, steps, seed).map_err(|e| JsError::new(&e))
}

/// Per-cell heights of one coin-flipping placement run.
#[wasm_bindgen]
pub struct HeightView {
    heights: Vec<u32>,
    mean: f64,
    max_displacement: usize,
    failed: bool,
}

#[wasm_bindgen]
impl HeightView {
    pub fn heights(&self) -> Vec<u32> {
        self.heights.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn mean(&self) -> f64 {
        self.mean
    }

    #[wasm_bindgen(getter)]
    pub fn max_displacement(&self) -> usize {
        self.max_displacement
    }

    /// Some key landed `block_len` or more cells past its hash value.
    #[wasm_bindgen(getter)]
    pub fn failed(&self) -> bool {
        self.failed
    }
}

pub fn heights(
    n: usize,
    epsilon: f64,
    block_len: usize,
    seed: u32,
    poissonised: bool,
) -> Result<HeightView, String> {
    if n == 0 || n > MAX_CELLS || block_len == 0 {
        return Err(format!(
            "n must lie in 1..={MAX_CELLS} and block_len must be positive"
        ));
    }
    let run = if poissonised {
        poissonised_cfrh(n, epsilon, block_len, u64::from(seed))
    } else {
        ordinary_cfrh(n, epsilon, block_len, u64::from(seed))
    };
    let t = run.map_err(|e| e.to_string())?;
    Ok(HeightView {
        mean: t.mean_height(n),
        max_displacement: t.max_displacement(),
        failed: t.failed,
        heights: t.heights,
    })
}

#[wasm_bindgen]
pub fn height_profile(
    n: usize,
    epsilon: f64,
    block_len: usize,
    seed: u32,
    poissonised: bool,
) -> Result<HeightView, JsError> {
    heights(n, epsilon, block_len, seed, poissonised).map_err(|e| JsError::new(&e))
}

/// Size accounting of a structure built from synthetic keys.
#[wasm_bindgen]
pub struct BuildView {
    m: usize,
    overhead: f64,
    table_bits: f64,
    directory_bits: f64,
    retries: Vec<u32>,
    wrong: usize,
}

#[wasm_bindgen]
impl BuildView {
    #[wasm_bindgen(getter)]
    pub fn m(&self) -> usize {
        self.m
    }

    #[wasm_bindgen(getter)]
    pub fn overhead(&self) -> f64 {
        self.overhead
    }

    #[wasm_bindgen(getter)]
    pub fn table_bits(&self) -> f64 {
        self.table_bits
    }

    #[wasm_bindgen(getter)]
    pub fn directory_bits(&self) -> f64 {
        self.directory_bits
    }

    /// Entry `i` counts chunks that needed `i` retries.
    pub fn retries(&self) -> Vec<u32> {
        self.retries.clone()
    }

    /// Keys whose query disagreed with the stored value (always 0).
    #[wasm_bindgen(getter)]
    pub fn wrong(&self) -> usize {
        self.wrong
    }
}

pub fn build(
    m: usize,
    epsilon: f64,
    block_len: usize,
    chunk_size: usize,
    value_bits: usize,
    seed: u32,
) -> Result<BuildView, String> {
    if m == 0 || m > MAX_KEYS {
        return Err(format!("m must lie in 1..={MAX_KEYS}"));
    }
    let pairs = synth::pairs(m, value_bits.clamp(1, 64), u64::from(seed));
    let params = ChunkedParams {
        epsilon,
        block_len,
        value_bits,
        chunk_size,
        max_retries: 1_000,
        base_seed: u64::from(seed),
        force_leading_one: false,
    };
    let ds = ChunkedRetrieval::construct(&pairs, params).map_err(|e| e.to_string())?;
    let wrong = pairs.iter().filter(|(k, v)| ds.query(k) != *v).count();
    Ok(BuildView {
        m,
        overhead: ds.overhead().unwrap_or(0.0),
        table_bits: (ds.table_bits() * value_bits as u64) as f64,
        directory_bits: ds.directory().stored_bits() as f64,
        retries: ds.retry_histogram().into_iter().map(|c| c as u32).collect(),
        wrong,
    })
}

#[wasm_bindgen]
pub fn build_summary(
    m: usize,
    epsilon: f64,
    block_len: usize,
    chunk_size: usize,
    value_bits: usize,
    seed: u32,
) -> Result<BuildView, JsError> {
    build(m, epsilon, block_len, chunk_size, value_bits, seed).map_err(|e| JsError::new(&e))
}
