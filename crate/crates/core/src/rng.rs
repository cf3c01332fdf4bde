//! Portable counter-based random streams.
//!
//! Every stream is identified by a 64-bit key. The `i`-th word of the stream
//! (counting from zero) is
//!
//! ```text
//! z = key + (i + 1) * 0x9E37_79B9_7F4A_7C15          (wrapping)
//! z = (z ^ (z >> 30)) * 0xBF58_476D_1CE4_E5B9        (wrapping)
//! z = (z ^ (z >> 27)) * 0x94D0_49BB_1331_11EB        (wrapping)
//! word = z ^ (z >> 31)
//! ```
//!
//! which is the SplitMix64 finalizer applied to a Weyl counter, so any word
//! can be computed without replaying the stream.
//!
//! Gaussian deviates use the Box–Muller transform on consecutive word pairs
//! `(a, b)`:
//!
//! ```text
//! u1 = ((a >> 11) + 1) * 2^-53        in (0, 1]
//! u2 = (b >> 11) * 2^-53              in [0, 1)
//! r  = sqrt(-2 ln u1)
//! z0 = r cos(2π u2),  z1 = r sin(2π u2)
//! ```
//!
//! `z0` is returned first, then `z1`.
//!
//! Sub-streams are derived from a root seed and a purpose tag:
//! `key = seed ^ fnv1a64(tag) ^ (index * 0xD1B5_4A32_D192_ED03)`.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const INDEX_MIX: u64 = 0xD1B5_4A32_D192_ED03;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a hash of a purpose tag.
pub fn fnv1a64(tag: &str) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in tag.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Key of the sub-stream `(tag, index)` under a root seed.
pub fn substream(seed: u64, tag: &str, index: u64) -> u64 {
    seed ^ fnv1a64(tag) ^ index.wrapping_mul(INDEX_MIX)
}

#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
    spare: Option<f64>,
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        Self {
            key,
            counter: 0,
            spare: None,
        }
    }

    pub fn from_tag(seed: u64, tag: &str, index: u64) -> Self {
        Self::new(substream(seed, tag, index))
    }

    /// Word `i` of the stream with this key, independent of the cursor.
    pub fn word_at(&self, i: u64) -> u64 {
        splitmix64(self.key.wrapping_add(i.wrapping_add(1).wrapping_mul(GOLDEN)))
    }

    pub fn next_u64(&mut self) -> u64 {
        let w = self.word_at(self.counter);
        self.counter = self.counter.wrapping_add(1);
        w
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`. `n` must be non-zero.
    pub fn next_below(&mut self, n: u64) -> u64 {
        ((u128::from(self.next_u64()) * u128::from(n)) >> 64) as u64
    }

    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let a = self.next_u64();
        let b = self.next_u64();
        let u1 = ((a >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = (b >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}
