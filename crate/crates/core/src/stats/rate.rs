//! Log-log fit of the block remainder against the number of blocks.

use crate::blocks::{decompose, remainder_sup, BlockScheme};
use crate::error::{LabError, Result};
use crate::generators::{IncrementGenerator, PreparedWeight, WeightKind};
use crate::mc::{mean, median, try_replicate, SeedSpec};
use crate::paths::UniformGrid;

/// The fit needs `m >= RATE_SEPARATION * max(n)`.
pub const RATE_SEPARATION: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub n_values: Vec<usize>,
    /// Monte Carlo `E[sup_t |R_{n,m}(t)|]` per `n`.
    pub mean_sup: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// No fit is defined (some mean is zero).
    pub degenerate: bool,
}

impl RateFit {
    /// Least-squares fit of `log(mean_sup)` on `log(n)`.
    pub fn fit(n_values: Vec<usize>, mean_sup: Vec<f64>) -> Result<Self> {
        if n_values.len() < 2 || n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LabError::domain(
                "rate fit needs at least 2 strictly increasing n values",
            ));
        }
        if n_values.len() != mean_sup.len() {
            return Err(LabError::domain("rate fit with mismatched lengths"));
        }
        if mean_sup.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Ok(Self {
                n_values,
                mean_sup,
                slope: f64::NAN,
                intercept: f64::NAN,
                r_squared: f64::NAN,
                degenerate: true,
            });
        }
        let xs: Vec<f64> = n_values.iter().map(|&n| (n as f64).ln()).collect();
        let ys: Vec<f64> = mean_sup.iter().map(|v| v.ln()).collect();
        let (mx, my) = (mean(&xs), mean(&ys));
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
        Ok(Self {
            n_values,
            mean_sup,
            slope,
            intercept,
            r_squared,
            degenerate: false,
        })
    }

    /// Number of `i` with `mean_sup[i+1] > mean_sup[i]`.
    pub fn inversions(&self) -> usize {
        self.mean_sup.windows(2).filter(|w| w[1] > w[0]).count()
    }
}

/// Raw output of [`rate_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct RateExperiment {
    pub m: usize,
    pub fit: RateFit,
    /// `sup_t |R_{n,m}|` per replica (outer) and `n` (inner).
    pub sups: Vec<Vec<f64>>,
    /// Hölder-norm estimate `G` of each replica's weight.
    pub holder: Vec<f64>,
    /// Truncation level `K = 2 median(G)`.
    pub truncation: f64,
    /// `E[sup_t |R_{n,m}| 1{G <= K}]` per `n`.
    pub truncated_mean_sup: Vec<f64>,
}

/// Monte Carlo scan of `sup_t |R_{n,m}(t)|` over `n` on `[0, 1]`.
pub fn rate_experiment(
    weight: &WeightKind,
    generator: &dyn IncrementGenerator,
    m: usize,
    n_values: &[usize],
    replicas: usize,
    master_seed: u64,
) -> Result<RateExperiment> {
    let max_n = n_values.iter().copied().max().unwrap_or(0);
    if m < RATE_SEPARATION * max_n {
        return Err(LabError::domain(format!(
            "rate experiment needs m >> n: m = {m} but max n = {max_n} requires m >= {}; \
             the bound is for m -> infinity at fixed n",
            RATE_SEPARATION * max_n
        )));
    }
    if replicas == 0 {
        return Err(LabError::domain("rate experiment needs at least one replica"));
    }
    let grid = UniformGrid::unit(m)?;
    let schemes = n_values
        .iter()
        .map(|&n| BlockScheme::new(grid, n))
        .collect::<Result<Vec<_>>>()?;
    let prepared = PreparedWeight::new(weight.clone(), grid)?;
    let sampler = generator.prepare(&grid)?;
    let rows = try_replicate(master_seed, replicas, |seed: SeedSpec| {
        let f = prepared.sample(seed)?;
        let g = sampler.sample(seed)?;
        let sups = schemes
            .iter()
            .map(|s| Ok(remainder_sup(&decompose(&f, &g, s)?)))
            .collect::<Result<Vec<f64>>>()?;
        Ok((sups, f.holder_norm()))
    })?;
    let (sups, holder): (Vec<Vec<f64>>, Vec<f64>) = rows.into_iter().unzip();
    let truncation = 2.0 * median(&holder);
    let column = |idx: usize, keep: &dyn Fn(usize) -> bool| -> f64 {
        let xs: Vec<f64> = (0..replicas)
            .map(|r| if keep(r) { sups[r][idx] } else { 0.0 })
            .collect();
        mean(&xs)
    };
    let mean_sup: Vec<f64> = (0..n_values.len()).map(|i| column(i, &|_| true)).collect();
    let truncated_mean_sup: Vec<f64> = (0..n_values.len())
        .map(|i| column(i, &|r| holder[r] <= truncation))
        .collect();
    Ok(RateExperiment {
        m,
        fit: RateFit::fit(n_values.to_vec(), mean_sup)?,
        sups,
        holder,
        truncation,
        truncated_mean_sup,
    })
}
