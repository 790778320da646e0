use std::sync::Arc;

use crate::error::{LabError, Result};
use crate::mc::{SeedSpec, Stream};
use crate::paths::{HolderMode, UniformGrid, WeightPath};

use super::fgn::{CirculantEmbedding, FgnPlan, FgnSynthesizer};

/// Offset between the Hurst index and the declared Hölder exponent of an fBm weight.
pub const FBM_ALPHA_OFFSET: f64 = 0.01;

/// Weight processes `f` used in the experiments.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    /// `f(t) = c`.
    Constant(f64),
    /// `f(t) = t`.
    Linear,
    /// `f(t) = sum_k coeffs[k] t^k`.
    Polynomial(Vec<f64>),
    /// `f = B^H` with `H > 1/2`, independent of the increments.
    FbmSample { hurst: f64 },
}

impl WeightKind {
    /// Declared Hölder exponent.
    pub fn alpha(&self) -> f64 {
        match self {
            WeightKind::FbmSample { hurst } => hurst - FBM_ALPHA_OFFSET,
            _ => 1.0,
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, WeightKind::FbmSample { .. })
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            WeightKind::FbmSample { hurst } if !(*hurst > 0.5 && *hurst < 1.0) => Err(LabError::domain(
                format!("fBm weight needs 1/2 < H < 1, got H = {hurst}"),
            )),
            WeightKind::Polynomial(c) if c.is_empty() => Err(LabError::domain(
                "polynomial weight needs at least one coefficient",
            )),
            _ => Ok(()),
        }
    }
}

/// Weight kind bound to a grid; for fBm the circulant plan is built once.
pub struct PreparedWeight {
    kind: WeightKind,
    grid: UniformGrid,
    fixed: Option<WeightPath>,
    fbm: Option<Arc<dyn FgnPlan>>,
    holder: Option<HolderMode>,
}

impl PreparedWeight {
    pub fn new(kind: WeightKind, grid: UniformGrid) -> Result<Self> {
        kind.validate()?;
        let times = grid.times();
        let deterministic = match &kind {
            WeightKind::Constant(c) => Some(WeightPath::constant(grid, *c)),
            WeightKind::Linear => Some(WeightPath::new(grid, times, 1.0)?),
            WeightKind::Polynomial(coeffs) => {
                let values = times
                    .iter()
                    .map(|t| coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c))
                    .collect();
                Some(WeightPath::new(grid, values, 1.0)?)
            }
            WeightKind::FbmSample { .. } => None,
        };
        let fbm = match &kind {
            WeightKind::FbmSample { hurst } => {
                Some(CirculantEmbedding::default().prepare(*hurst, grid.count())?)
            }
            _ => None,
        };
        Ok(Self {
            kind,
            grid,
            fixed: deterministic,
            fbm,
            holder: None,
        })
    }

    /// Overrides how sampled paths estimate their Hölder norm.
    pub fn with_holder_mode(mut self, mode: HolderMode) -> Self {
        self.holder = Some(mode);
        self
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn sample(&self, seed: SeedSpec) -> Result<WeightPath> {
        if let Some(path) = &self.fixed {
            return Ok(path.clone());
        }
        let (WeightKind::FbmSample { hurst }, Some(plan)) = (&self.kind, &self.fbm) else {
            unreachable!("random weight without a plan")
        };
        let mut rng = seed.rng(Stream::Weight);
        let scale = (self.grid.m() as f64).powf(-hurst);
        let mut values = Vec::with_capacity(self.grid.count() + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for z in plan.sample(&mut rng) {
            acc += z * scale;
            values.push(acc);
        }
        let mode = self.holder.unwrap_or_else(|| HolderMode::auto(&self.grid));
        WeightPath::with_mode(self.grid, values, self.kind.alpha(), mode)
    }
}

/// Samples one weight path of the given kind.
pub fn gen_weight(kind: &WeightKind, grid: &UniformGrid, seed: SeedSpec) -> Result<WeightPath> {
    PreparedWeight::new(kind.clone(), *grid)?.sample(seed)
}
