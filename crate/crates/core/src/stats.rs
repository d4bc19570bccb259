//! Running moments and the deterministic chunked-parallel driver shared by
//! the Monte Carlo engines.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;

/// Random generator used by every stochastic engine.
pub type SimRng = ChaCha8Rng;

/// Recorded in reports so experiments can be rerun bit for bit.
pub const GENERATOR_ID: &str = "rand_chacha-0.9/ChaCha8Rng seed_from_u64(seed), stream=chunk index";

pub const DEFAULT_CHUNK_SIZE: u64 = 16_384;

/// Generator for one chunk: the master seed selects the key, the chunk index
/// selects one of ChaCha's 2^64 independent streams.
pub fn chunk_rng(seed: u64, chunk: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Mean and second central moment of a stream (Welford), mergeable with
/// Chan's pairwise update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / n;
        self.mean += delta * w;
        self.m2 += other.m2 + delta * delta * self.count as f64 * w;
        self.count += other.count;
    }

    /// Sample variance (n - 1 denominator).
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.std_dev() / (self.count as f64).sqrt()
        }
    }
}

/// Splits `total` draws into fixed-size chunks, runs `work(chunk_index,
/// first_item, len, rng)` for each (in parallel on `workers` threads, or the
/// global pool when `None`), and returns the chunk results in chunk order.
///
/// Results depend only on `(seed, chunk_size)`: the worker count changes the
/// schedule, never the streams or the merge order.
pub fn run_chunked<T, F>(
    total: u64,
    chunk_size: u64,
    seed: u64,
    workers: Option<usize>,
    work: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, u64, u64, &mut SimRng) -> Result<T> + Sync,
{
    let chunk_size = chunk_size.max(1);
    let chunks = total.div_ceil(chunk_size);
    let job = || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * chunk_size;
                let len = chunk_size.min(total - start);
                let mut rng = chunk_rng(seed, c);
                work(c, start, len, &mut rng)
            })
            .collect::<Result<Vec<T>>>()
    };
    match workers {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build() {
            Ok(pool) => pool.install(job),
            Err(_) => job(),
        },
        None => job(),
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}
