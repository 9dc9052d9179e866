//! Deterministic random number generation.
//!
//! Every stochastic operation in this crate draws from [`SeededRng`], a
//! counter-based stream generator (ChaCha12). Reproducibility contract:
//!
//! * `SeededRng::new(seed)` always yields the same sequence for the same seed.
//! * `SeededRng::substream(seed, k)` selects the k-th of 2^64 independent
//!   streams of the same seed (the ChaCha stream id is set to `k`).
//!
//! Batch samplers derive one substream per *sample index*, so their output is
//! byte-identical no matter how many worker threads split the index range.
//! Uniform doubles take the top 53 bits of a `u64`; normal deviates come from
//! the Box-Muller transform applied to one uniform pair.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha12Rng,
    spare_normal: Option<f64>,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha12Rng::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    /// Independent stream `index` of the generator seeded with `seed`.
    pub fn substream(seed: u64, index: u64) -> Self {
        let mut inner = ChaCha12Rng::seed_from_u64(seed);
        inner.set_stream(index);
        Self {
            inner,
            spare_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `[0, n)` without modulo bias.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0) is meaningless");
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let r = self.next_u64();
            if r < zone {
                return r % n;
            }
        }
    }

    /// Uniform in `[0, 1)` with 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`; safe as a logarithm argument.
    fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One pair of independent standard normal deviates (Box-Muller).
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.uniform_open();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = std::f64::consts::TAU * u2;
        (r * t.cos(), r * t.sin())
    }

    /// One standard normal deviate; the spare half of each pair is cached.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let (a, b) = self.normal_pair();
        self.spare_normal = Some(b);
        a
    }

    /// Uniformly random unit vector in R^m (normalized Gaussian).
    pub fn unit_direction(&mut self, m: usize) -> Vec<f64> {
        assert!(m > 0);
        loop {
            let v: Vec<f64> = (0..m).map(|_| self.normal()).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-140 {
                return v.into_iter().map(|x| x / norm).collect();
            }
        }
    }
}

/// Evaluates `f(0), …, f(count-1)` on `workers` threads and returns the
/// results in index order. The split affects scheduling only; results are
/// identical for every worker count.
pub fn parallel_map_indexed<T, F>(count: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = workers.max(1).min(count.max(1));
    if workers <= 1 || count < 2 {
        return (0..count).map(f).collect();
    }
    let mut slots: Vec<Option<T>> = (0..count).map(|_| None).collect();
    let chunk = count.div_ceil(workers);
    std::thread::scope(|scope| {
        for (w, slice) in slots.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (off, slot) in slice.iter_mut().enumerate() {
                    *slot = Some(f(w * chunk + off));
                }
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("worker filled slot"))
        .collect()
}
