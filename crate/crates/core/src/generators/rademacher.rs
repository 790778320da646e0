use rand::Rng;

use crate::error::Result;
use crate::mc::{SeedSpec, Stream};
use crate::paths::{StepProcess, UniformGrid};

/// `xi_{i,m} = X_i / sqrt(m)` with i.i.d. fair signs `X_i`.
pub fn gen_rademacher(grid: &UniformGrid, seed: SeedSpec) -> Result<StepProcess> {
    let step = 1.0 / (grid.m() as f64).sqrt();
    let mut rng = seed.rng(Stream::Increments);
    let increments = (0..grid.count())
        .map(|_| if rng.random::<bool>() { step } else { -step })
        .collect();
    StepProcess::from_increments(*grid, increments)
}
