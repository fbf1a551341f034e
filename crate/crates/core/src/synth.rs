//! Synthetic data sets: fixed-length pseudo-URL keys and random values.

use rand::Rng;

use crate::bitkit::low_mask;
use crate::sim_rng;

/// Length of every generated key in bytes.
pub const KEY_BYTES: usize = 80;

const ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789";

/// Key `i` of the set selected by `seed`: an 80-byte URL-like string that
/// embeds `i`, so keys within one set are distinct.
pub fn pseudo_url(seed: u64, i: u64) -> Vec<u8> {
    let mut rng = sim_rng::stream(seed, 1 << 32 | (i & 0xffff_ffff));
    let mut key = format!("https://www.{:08x}.example/", i >> 32).into_bytes();
    let id = format!("/{i:016x}");
    while key.len() < KEY_BYTES - id.len() {
        key.push(ALPHABET[rng.gen_range(0..ALPHABET.len())]);
    }
    key.extend_from_slice(id.as_bytes());
    key
}

/// `m` distinct keys paired with uniform `value_bits`-bit values.
pub fn pairs(m: usize, value_bits: usize, seed: u64) -> Vec<(Vec<u8>, u64)> {
    let mut rng = sim_rng::stream(seed, sim_rng::streams::EXTRA_KEYS);
    (0..m as u64)
        .map(|i| (pseudo_url(seed, i), rng.gen::<u64>() & low_mask(value_bits)))
        .collect()
}
