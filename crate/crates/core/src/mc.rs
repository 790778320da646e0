//! Monte Carlo plumbing: reproducible per-replica seeds, replica-parallel
//! maps with ordered collection, and compensated reductions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;

/// Independent sub-streams drawn from one replica seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Increments = 0,
    Weight = 1,
    Brownian = 2,
    Auxiliary = 3,
}

/// Replica seed. The stream seed is
/// `splitmix64(master + splitmix64(replica))`, a bijection in the replica
/// index for a fixed master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub replica_index: u64,
}

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedSpec {
    pub fn new(master_seed: u64, replica_index: u64) -> Self {
        Self {
            master_seed,
            replica_index,
        }
    }

    pub fn stream_seed(&self) -> u64 {
        splitmix64(self.master_seed.wrapping_add(splitmix64(self.replica_index)))
    }

    /// ChaCha8 generator for one sub-stream of this replica.
    pub fn rng(&self, stream: Stream) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.stream_seed());
        rng.set_stream(stream as u64);
        rng
    }
}

/// Runs `f` for replicas `0..replicas` and returns results in replica order.
///
/// Output never depends on how rayon schedules the work.
pub fn replicate<T, F>(master_seed: u64, replicas: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(SeedSpec) -> T + Sync + Send,
{
    (0..replicas as u64)
        .into_par_iter()
        .map(|r| f(SeedSpec::new(master_seed, r)))
        .collect()
}

/// Fallible [`replicate`]; the first error in replica order wins.
pub fn try_replicate<T, F>(master_seed: u64, replicas: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(SeedSpec) -> Result<T> + Sync + Send,
{
    replicate(master_seed, replicas, f).into_iter().collect()
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    compensated_sum(xs.iter().copied()) / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let mu = mean(xs);
    compensated_sum(xs.iter().map(|x| (x - mu) * (x - mu))) / (xs.len() - 1) as f64
}

/// Standard error of the sample mean.
pub fn std_error(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
