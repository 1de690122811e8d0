//! Counter-based random number generation (Philox 2x64, 10 rounds).
//!
//! Every stream is identified by `(seed, stream_id)`; the generator is a
//! pure function of `(key(seed), stream_id, block counter)`, so streams can
//! be split across workers, replayed from the start, or resumed from a saved
//! position without any state beyond three integers. Distinct stream ids
//! occupy disjoint counter blocks under the same key and are therefore
//! statistically independent.

const PHILOX_M: u64 = 0xD2B7_4407_B1CE_6E93;
const PHILOX_W: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn philox2x64(mut c0: u64, c1: u64, mut key: u64) -> (u64, u64) {
    let mut x0 = c0;
    let mut x1 = c1;
    for _ in 0..10 {
        let prod = u128::from(x0).wrapping_mul(u128::from(PHILOX_M));
        let hi = (prod >> 64) as u64;
        let lo = prod as u64;
        x0 = hi ^ key ^ x1;
        x1 = lo;
        key = key.wrapping_add(PHILOX_W);
    }
    c0 = x0;
    (c0, x1)
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One replayable random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    key: u64,
    stream_id: u64,
    block: u64,
    pending: Option<u64>,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { key: mix64(seed), stream_id, block: 0, pending: None }
    }

    /// Number of 64-bit words consumed so far; feeding it to
    /// [`RngStream::seek`] on a fresh stream reproduces this exact state.
    pub fn position(&self) -> u128 {
        2 * u128::from(self.block) - u128::from(self.pending.is_some())
    }

    pub fn seek(&mut self, position: u128) {
        self.block = (position / 2) as u64;
        self.pending = None;
        if position % 2 == 1 {
            let (_, second) = philox2x64(self.block, self.stream_id, self.key);
            self.block += 1;
            self.pending = Some(second);
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        if let Some(w) = self.pending.take() {
            return w;
        }
        let (first, second) = philox2x64(self.block, self.stream_id, self.key);
        self.block += 1;
        self.pending = Some(second);
        first
    }

    /// Uniform draw strictly inside (0, 1).
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal draw (Box–Muller; consumes two uniforms).
    #[inline]
    pub fn next_normal(&mut self) -> f64 {
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
