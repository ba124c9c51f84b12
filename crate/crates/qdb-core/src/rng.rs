//! Splittable counter-based pseudo-random generator.
//!
//! Every sampling site in the crate owns its own stream, derived from the
//! session seed via [`SplitRng::split`]. A stream is a pure function of
//! `(key, counter)`, so experiments are bit-reproducible regardless of thread
//! count or evaluation order. Each public sampling method documents exactly
//! how many draws it consumes.

/// Weyl increment of the SplitMix64 sequence.
const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
/// Domain separator for child-stream derivation.
const SPLIT_TAG: u64 = 0xA5A5_5A5A_C3C3_3C3C;

/// 64-bit avalanche finalizer (SplitMix64 / Stafford mix13).
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based generator: output `i` is `mix64(key + (i+1)*GOLDEN)`.
///
/// `split` derives an independent child stream without consuming any draws
/// from the parent; splitting the same parent with the same label always
/// yields the same child, so labels must be unique per purpose.
#[derive(Debug, Clone)]
pub struct SplitRng {
    key: u64,
    counter: u64,
}

impl SplitRng {
    pub fn new(seed: u64) -> Self {
        Self {
            key: mix64(seed ^ GOLDEN),
            counter: 0,
        }
    }

    /// Derive an independent child stream. Consumes no draws.
    pub fn split(&self, label: u64) -> SplitRng {
        SplitRng {
            key: mix64(self.key ^ SPLIT_TAG ^ mix64(label.wrapping_mul(GOLDEN))),
            counter: 0,
        }
    }

    /// One draw.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform in `[0, 1)` with 53 bits of precision. One draw.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Fair coin. One draw.
    #[inline]
    pub fn next_bool(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    /// `true` with probability `p`. One draw.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Number of draws consumed so far.
    pub fn draws(&self) -> u64 {
        self.counter
    }
}
