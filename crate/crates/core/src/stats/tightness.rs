//! Empirical fourth-moment constant of the tightness condition.

use crate::error::{LabError, Result};
use crate::generators::IncrementGenerator;
use crate::mc::{mean, std_error, try_replicate, SeedSpec};
use crate::paths::UniformGrid;

/// Minimum replica count for [`tightness_constant`].
pub const TIGHTNESS_MIN_REPLICAS: usize = 1000;

/// One `(j, k)` lattice entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TightnessCell {
    pub j: usize,
    pub k: usize,
    /// `Ê|sum_{j<i<=k} xi|^4 / ((k-j)/m)^2`.
    pub ratio: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TightnessEstimate {
    pub m: usize,
    pub replicas: usize,
    /// Largest ratio over the lattice.
    pub constant: f64,
    /// MC error of the maximizing cell.
    pub std_err: f64,
    pub cells: Vec<TightnessCell>,
}

impl TightnessEstimate {
    pub fn argmax(&self) -> Option<&TightnessCell> {
        self.cells.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio))
    }
}

/// Lattice of pairs with `k - j` in `{1, 2, 4, ..., m/2}` and `j` in `{0, m/4, m/2}`.
pub fn tightness_lattice(m: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for j in [0, m / 4, m / 2] {
        let mut r = 1;
        while r <= m / 2 {
            if j + r <= m {
                pairs.push((j, j + r));
            }
            r *= 2;
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

/// `(j, k)` pairs in lattice order.
pub type Lattice = Vec<(usize, usize)>;

/// Per-replica fourth powers `|sum_{j<i<=k} xi|^4`, one row per replica in lattice order.
pub fn tightness_samples(
    generator: &dyn IncrementGenerator,
    m: usize,
    replicas: usize,
    master_seed: u64,
) -> Result<(Lattice, Vec<Vec<f64>>)> {
    if replicas < TIGHTNESS_MIN_REPLICAS {
        return Err(LabError::domain(format!(
            "tightness estimate needs at least {TIGHTNESS_MIN_REPLICAS} replicas, got {replicas}"
        )));
    }
    if m < 2 {
        return Err(LabError::domain("tightness estimate needs m >= 2"));
    }
    let grid = UniformGrid::unit(m)?;
    let sampler = generator.prepare(&grid)?;
    let lattice = tightness_lattice(m);
    let fourth = try_replicate(master_seed, replicas, |seed: SeedSpec| {
        let g = sampler.sample(seed)?;
        let c = g.cumulative();
        Ok(lattice
            .iter()
            .map(|&(j, k)| (c[k] - c[j]).powi(4))
            .collect::<Vec<f64>>())
    })?;
    Ok((lattice, fourth))
}

/// Reduces [`tightness_samples`] output to per-cell ratios and their maximum.
pub fn tightness_from_samples(
    m: usize,
    lattice: &[(usize, usize)],
    fourth: &[Vec<f64>],
) -> Result<TightnessEstimate> {
    if lattice.is_empty() || fourth.iter().any(|row| row.len() != lattice.len()) {
        return Err(LabError::domain("tightness samples do not match the lattice"));
    }
    let mut column = vec![0.0; fourth.len()];
    let cells: Vec<TightnessCell> = lattice
        .iter()
        .enumerate()
        .map(|(idx, &(j, k))| {
            for (slot, row) in column.iter_mut().zip(fourth) {
                *slot = row[idx];
            }
            let scale = ((k - j) as f64 / m as f64).powi(2);
            TightnessCell {
                j,
                k,
                ratio: mean(&column) / scale,
                std_err: std_error(&column) / scale,
            }
        })
        .collect();
    let best = cells
        .iter()
        .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
        .copied()
        .expect("lattice is nonempty");
    Ok(TightnessEstimate {
        m,
        replicas: fourth.len(),
        constant: best.ratio,
        std_err: best.std_err,
        cells,
    })
}

/// Estimates the constant `C` in `E|sum_{i=j+1}^k xi|^4 <= C ((k-j)/m)^2` on `[0, 1]`.
pub fn tightness_constant(
    generator: &dyn IncrementGenerator,
    m: usize,
    replicas: usize,
    master_seed: u64,
) -> Result<TightnessEstimate> {
    let (lattice, fourth) = tightness_samples(generator, m, replicas, master_seed)?;
    tightness_from_samples(m, &lattice, &fourth)
}
