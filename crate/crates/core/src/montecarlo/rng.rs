//! Counter-based normal variate streams.
//!
//! A stream is keyed by `(seed, trial_index)`:
//!
//! ```text
//! key  = mix64(mix64(seed) ^ mix64(trial_index + STREAM_SALT))
//! u_j  = mix64(key + (j + 1) * GOLDEN_GAMMA)        j = 0, 1, 2, …
//! ```
//!
//! `mix64` is the SplitMix64 finalizer, so each stream is a SplitMix64
//! sequence started at `key`. Uniforms take the top 53 bits, shifted by half
//! an ulp into the open interval `(0, 1)`. Normals come in pairs from the
//! Box–Muller transform, two uniforms per pair.

use std::f64::consts::TAU;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_SALT: u64 = 0xD1B5_4A32_D192_ED03;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic stream of uniforms and standard normals.
#[derive(Debug, Clone)]
pub struct NormalStream {
    key: u64,
    counter: u64,
    spare: Option<f64>,
}

/// The stream for one trial of a run seeded with `seed`.
pub fn rng_substream(seed: u64, trial_index: u64) -> NormalStream {
    NormalStream {
        key: mix64(mix64(seed) ^ mix64(trial_index.wrapping_add(STREAM_SALT))),
        counter: 0,
        spare: None,
    }
}

impl NormalStream {
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)))
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn next_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal variate.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}
