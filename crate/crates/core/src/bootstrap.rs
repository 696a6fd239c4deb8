//! Deterministic parallel resampling.
//!
//! Resample `r` draws from its own ChaCha8 stream `(seed, r)`, so the output
//! does not depend on how rayon schedules the work. Results are collected in
//! resample order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Redraws allowed for a single resample before the run is declared unstable.
pub const MAX_ATTEMPTS: usize = 100;

/// Generator for substream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// n indices drawn uniformly with replacement from `0..n`.
pub fn resample_indices<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

/// Raw output of [`run`]: one value per resample, in resample order.
#[derive(Debug, Clone)]
pub struct BootstrapRun<T> {
    pub values: Vec<T>,
    pub rejected: usize,
}

/// Evaluates `f` for `b` resamples. `f` returns `Ok(None)` to reject a draw,
/// which is then redrawn from the same stream.
///
/// Fails with [`Error::BootstrapUnstable`] when any resample needs more than
/// [`MAX_ATTEMPTS`] draws or when rejections outnumber accepted resamples.
pub fn run<T, F>(b: usize, seed: u64, f: F) -> Result<BootstrapRun<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<Option<T>> + Sync,
{
    if b == 0 {
        return Err(Error::Argument("bootstrap needs B >= 1 resamples".into()));
    }
    let outcomes: Vec<Result<(Option<T>, usize)>> = (0..b)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, r as u64);
            for attempt in 0..MAX_ATTEMPTS {
                if let Some(v) = f(&mut rng)? {
                    return Ok((Some(v), attempt));
                }
            }
            Ok((None, MAX_ATTEMPTS))
        })
        .collect();

    let mut values = Vec::with_capacity(b);
    let mut rejected = 0;
    let mut exhausted = false;
    for o in outcomes {
        let (v, rej) = o?;
        rejected += rej;
        match v {
            Some(v) => values.push(v),
            None => exhausted = true,
        }
    }
    if exhausted || rejected > b {
        return Err(Error::BootstrapUnstable { rejected, accepted: values.len() });
    }
    Ok(BootstrapRun { values, rejected })
}

/// Element at level `p` of an ascending slice: `sorted[ceil(p·B) − 1]`, with
/// the index clamped to the slice.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let b = sorted.len();
    let idx = ((p * b as f64).ceil() as isize - 1).clamp(0, b as isize - 1) as usize;
    sorted[idx]
}

/// Sorted bootstrap distribution of a scalar statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapDistribution {
    pub values: Vec<f64>,
    pub rejected: usize,
    pub seed: u64,
}

impl BootstrapDistribution {
    pub fn from_run(run: BootstrapRun<f64>, seed: u64) -> Self {
        let mut values = run.values;
        values.sort_by(f64::total_cmp);
        Self { values, rejected: run.rejected, seed }
    }

    pub fn b(&self) -> usize {
        self.values.len()
    }

    /// Upper `level` quantile of a nonnegative statistic. Level 0 is the
    /// trivial threshold 0.
    pub fn quantile(&self, level: f64) -> f64 {
        if level <= 0.0 {
            return 0.0;
        }
        quantile_sorted(&self.values, level)
    }

    /// Fraction of resampled values at or above `x`.
    pub fn tail_probability(&self, x: f64) -> f64 {
        let below = self.values.partition_point(|&v| v < x);
        (self.values.len() - below) as f64 / self.values.len() as f64
    }
}
