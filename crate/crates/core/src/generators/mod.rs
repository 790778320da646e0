//! Seeded generators for the triangular arrays and weight paths.
//!
//! Increment generators and weight samplers are strategy objects looked up
//! by name in [`generator_registry`] and [`weight_registry`]. A strategy is
//! first bound to a grid with `prepare`, which does per-grid work once (for
//! example the circulant eigen-decomposition). The prepared sampler is then
//! an immutable function of the replica seed.

mod fgn;
mod qv;
mod rademacher;
mod weight;

use std::sync::Arc;

pub use fgn::{
    fgn_autocovariance, gen_fgn, synthesizer_registry, CholeskySynthesis, CirculantEmbedding, FbmSpec,
    FgnPlan, FgnSynthesizer, CHOLESKY_LIMIT,
};
pub use qv::{check_qv_hurst, sigma_H, squared_autocovariance_sum};
pub use rademacher::gen_rademacher;
pub use weight::{gen_weight, PreparedWeight, WeightKind, FBM_ALPHA_OFFSET};

use crate::error::{LabError, Result};
use crate::mc::{SeedSpec, Stream};
use crate::paths::{StepProcess, UniformGrid};
use crate::registry::Registry;

/// Parameters of an increment generator as they appear in a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub kind: String,
    pub hurst: Option<f64>,
    pub normalize: bool,
    pub synthesis: String,
}

impl GeneratorSpec {
    pub fn rademacher() -> Self {
        Self::named("rademacher")
    }

    pub fn qv(hurst: f64, normalize: bool) -> Self {
        Self {
            hurst: Some(hurst),
            normalize,
            ..Self::named("qv")
        }
    }

    pub fn named(kind: &str) -> Self {
        Self {
            kind: kind.to_string(),
            hurst: None,
            normalize: true,
            synthesis: "circulant".to_string(),
        }
    }

    pub fn build(&self) -> Result<Box<dyn IncrementGenerator>> {
        generator_registry().build(&self.kind, self)
    }
}

/// A family of triangular arrays `xi_{i,m}`.
pub trait IncrementGenerator: Send + Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> String;
    /// Binds the generator to a grid.
    fn prepare(&self, grid: &UniformGrid) -> Result<Box<dyn IncrementSampler>>;
    /// True when the increments are a martingale difference sequence.
    fn is_martingale(&self) -> bool {
        false
    }
}

/// A generator bound to a grid.
pub trait IncrementSampler: Send + Sync {
    fn sample(&self, seed: SeedSpec) -> Result<StepProcess>;
}

pub struct Rademacher;

struct RademacherSampler(UniformGrid);

impl IncrementGenerator for Rademacher {
    fn name(&self) -> &'static str {
        "rademacher"
    }
    fn describe(&self) -> String {
        "rademacher: xi = ±1/sqrt(m)".to_string()
    }
    fn prepare(&self, grid: &UniformGrid) -> Result<Box<dyn IncrementSampler>> {
        Ok(Box::new(RademacherSampler(*grid)))
    }
    fn is_martingale(&self) -> bool {
        true
    }
}

impl IncrementSampler for RademacherSampler {
    fn sample(&self, seed: SeedSpec) -> Result<StepProcess> {
        gen_rademacher(&self.0, seed)
    }
}

/// `xi ≡ 0`.
pub struct ZeroIncrements;

struct ZeroSampler(UniformGrid);

impl IncrementGenerator for ZeroIncrements {
    fn name(&self) -> &'static str {
        "zero"
    }
    fn describe(&self) -> String {
        "zero: xi = 0".to_string()
    }
    fn prepare(&self, grid: &UniformGrid) -> Result<Box<dyn IncrementSampler>> {
        Ok(Box::new(ZeroSampler(*grid)))
    }
    fn is_martingale(&self) -> bool {
        true
    }
}

impl IncrementSampler for ZeroSampler {
    fn sample(&self, _seed: SeedSpec) -> Result<StepProcess> {
        Ok(StepProcess::zero(self.0))
    }
}

/// Centred, optionally normalized quadratic variation of fBm.
pub struct QuadraticVariation {
    hurst: f64,
    normalize: bool,
    synthesizer: Box<dyn FgnSynthesizer>,
}

impl QuadraticVariation {
    pub fn new(hurst: f64, normalize: bool, synthesizer: Box<dyn FgnSynthesizer>) -> Result<Self> {
        qv::check_qv_hurst(hurst)?;
        Ok(Self {
            hurst,
            normalize,
            synthesizer,
        })
    }
}

struct QvSampler {
    grid: UniformGrid,
    plan: Arc<dyn FgnPlan>,
    scale: f64,
}

impl IncrementGenerator for QuadraticVariation {
    fn name(&self) -> &'static str {
        "qv"
    }
    fn describe(&self) -> String {
        format!(
            "qv: H={}, normalize={}, synthesis={}",
            self.hurst,
            self.normalize,
            self.synthesizer.name()
        )
    }
    fn prepare(&self, grid: &UniformGrid) -> Result<Box<dyn IncrementSampler>> {
        let plan = self.synthesizer.prepare(self.hurst, grid.count())?;
        let sigma = if self.normalize { sigma_H(self.hurst)? } else { 1.0 };
        Ok(Box::new(QvSampler {
            grid: *grid,
            plan,
            scale: 1.0 / ((grid.m() as f64).sqrt() * sigma),
        }))
    }
}

impl IncrementSampler for QvSampler {
    fn sample(&self, seed: SeedSpec) -> Result<StepProcess> {
        let mut rng = seed.rng(Stream::Increments);
        // Unit-grid fGn z_i has the law of m^H Delta B^H_i.
        let increments = self
            .plan
            .sample(&mut rng)
            .into_iter()
            .map(|z| (z * z - 1.0) * self.scale)
            .collect();
        StepProcess::from_increments(self.grid, increments)
    }
}

/// Increment generators by name: `rademacher`, `qv`, `zero`.
pub fn generator_registry() -> Registry<GeneratorSpec, dyn IncrementGenerator> {
    Registry::<GeneratorSpec, dyn IncrementGenerator>::new("generator")
        .with("rademacher", |_| Ok(Box::new(Rademacher)))
        .with("zero", |_| Ok(Box::new(ZeroIncrements)))
        .with("qv", |spec| {
            let hurst = spec
                .hurst
                .ok_or_else(|| LabError::domain("generator `qv` needs `hurst`"))?;
            let synth = synthesizer_registry().build(&spec.synthesis, &())?;
            Ok(Box::new(QuadraticVariation::new(hurst, spec.normalize, synth)?))
        })
}

/// Parameters of a weight kind as they appear in a config file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightSpec {
    pub kind: String,
    pub hurst: Option<f64>,
    pub coeffs: Vec<f64>,
    pub value: Option<f64>,
}

impl WeightSpec {
    pub fn named(kind: &str) -> Self {
        Self {
            kind: kind.to_string(),
            ..Self::default()
        }
    }

    pub fn fbm(hurst: f64) -> Self {
        Self {
            hurst: Some(hurst),
            ..Self::named("fbm")
        }
    }

    pub fn build(&self) -> Result<Box<WeightKind>> {
        weight_registry().build(&self.kind, self)
    }
}

/// Weight kinds by name: `constant`, `linear`, `polynomial`, `fbm`.
pub fn weight_registry() -> Registry<WeightSpec, WeightKind> {
    Registry::<WeightSpec, WeightKind>::new("weight")
        .with("linear", |_| Ok(Box::new(WeightKind::Linear)))
        .with("constant", |spec| {
            Ok(Box::new(WeightKind::Constant(spec.value.unwrap_or(1.0))))
        })
        .with("polynomial", |spec| {
            if spec.coeffs.is_empty() {
                return Err(LabError::domain("weight `polynomial` needs `coeffs`"));
            }
            Ok(Box::new(WeightKind::Polynomial(spec.coeffs.clone())))
        })
        .with("fbm", |spec| {
            let hurst = spec
                .hurst
                .ok_or_else(|| LabError::domain("weight `fbm` needs `hurst`"))?;
            let kind = WeightKind::FbmSample { hurst };
            kind.validate()?;
            Ok(Box::new(kind))
        })
}

/// `g_m` built from the normalized (or raw) fBm quadratic-variation statistic.
pub fn gen_qv_step(spec: &FbmSpec, seed: SeedSpec, normalize: bool) -> Result<StepProcess> {
    QuadraticVariation::new(spec.hurst, normalize, Box::new(CirculantEmbedding::default()))?
        .prepare(&spec.grid)?
        .sample(seed)
}
