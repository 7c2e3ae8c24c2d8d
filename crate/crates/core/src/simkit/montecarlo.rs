use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Link, Scenario};
use crate::split::{ftl, random_split_with};

pub const HISTOGRAM_BINS: usize = 50;

/// Draws per independently seeded partition. Fixed so results do not depend
/// on the worker count.
pub const PARTITION_DRAWS: u64 = 4096;

/// Equal-width bins over `[lo, hi]`; the last bin is closed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    fn from_samples(samples: &[f64]) -> Self {
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut counts = vec![0u64; HISTOGRAM_BINS];
        let width = (hi - lo) / HISTOGRAM_BINS as f64;
        for &x in samples {
            let bin = if width > 0.0 {
                (((x - lo) / width) as usize).min(HISTOGRAM_BINS - 1)
            } else {
                0
            };
            counts[bin] += 1;
        }
        Self { lo, hi, counts }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub draws: u64,
    pub mean_ftl_s: f64,
    /// Absent for a single draw.
    pub std_err_s: Option<f64>,
    pub histogram: Histogram,
}

/// Latency statistics of `draws` random splits of the scenario's file over
/// `links`.
///
/// Draws are cut into partitions of [`PARTITION_DRAWS`]; partition `i` uses
/// ChaCha stream `i` under `seed`. Partitions run in parallel and are merged
/// in index order, so output is bit-identical for any thread count.
pub fn run_monte_carlo(
    scenario: &Scenario,
    links: &[Link],
    draws: u64,
    seed: u64,
) -> Result<MonteCarloSummary> {
    if draws == 0 {
        return Err(Error::NoDraws);
    }
    if links.is_empty() {
        return Err(Error::NoLinks);
    }
    let file = scenario.file;
    let partitions = draws.div_ceil(PARTITION_DRAWS);
    let chunks: Vec<Vec<f64>> = (0..partitions)
        .into_par_iter()
        .map(|p| -> Result<Vec<f64>> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(p);
            let n = PARTITION_DRAWS.min(draws - p * PARTITION_DRAWS);
            (0..n)
                .map(|_| random_split_with(links, file, &mut rng).map(|plan| ftl(&plan).ftl_s))
                .collect()
        })
        .collect::<Result<_>>()?;
    let samples: Vec<f64> = chunks.into_iter().flatten().collect();

    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let std_err_s = (samples.len() > 1).then(|| {
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    });

    Ok(MonteCarloSummary {
        draws,
        mean_ftl_s: mean,
        std_err_s,
        histogram: Histogram::from_samples(&samples),
    })
}
