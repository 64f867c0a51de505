//! Counter-based pseudo-random values: `value(seed, counter)` is a pure
//! function, so any draw can be reproduced (or parallelized) from its index
//! alone. Uses the splitmix64 finalizer, which passes the usual statistical
//! batteries and is more than enough for test-jet generation.

/// 64-bit mix of a seed and a draw counter.
pub fn value(seed: u64, counter: u64) -> u64 {
    // Golden-ratio stride decorrelates consecutive counters before mixing.
    let mut z = seed ^ counter.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform draw in [0, 1) with 53-bit resolution.
pub fn uniform(seed: u64, counter: u64) -> f64 {
    (value(seed, counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in [-1, 1).
pub fn symmetric(seed: u64, counter: u64) -> f64 {
    2.0 * uniform(seed, counter) - 1.0
}

/// Convenience stream that tracks its own counter.
#[derive(Clone, Debug)]
pub struct Stream {
    seed: u64,
    counter: u64,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream { seed, counter: 0 }
    }

    /// Stream starting at an arbitrary counter; lets callers carve one seed
    /// into disjoint per-item substreams.
    pub fn at(seed: u64, counter: u64) -> Self {
        Stream { seed, counter }
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = value(self.seed, self.counter);
        self.counter += 1;
        v
    }

    pub fn next_uniform(&mut self) -> f64 {
        let v = uniform(self.seed, self.counter);
        self.counter += 1;
        v
    }

    pub fn next_symmetric(&mut self) -> f64 {
        let v = symmetric(self.seed, self.counter);
        self.counter += 1;
        v
    }
}
