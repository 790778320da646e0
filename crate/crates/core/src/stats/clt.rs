//! Mixed-normal and characteristic-function checks of the stable limit.

use num_complex::Complex64;

use crate::blocks::weighted_sum;
use crate::error::{LabError, Result};
use crate::mc::{compensated_sum, mean, variance};
use crate::paths::{StepProcess, WeightPath};
use crate::registry::Registry;

/// Discrete conditional variance `sum_{i=1}^{[mT]} f(t_i)^2 / m`.
pub fn conditional_variance(f: &WeightPath) -> f64 {
    let m = f.grid().m() as f64;
    compensated_sum(f.values()[1..].iter().map(|v| v * v)) / m
}

/// `X_m(T) / sqrt(sum f(t_i)^2 / m)`, standard normal in the limit even for random `f`.
pub fn mixed_normal_stat(f: &WeightPath, g: &StepProcess) -> Result<f64> {
    let v = conditional_variance(f);
    if !(v > 0.0) {
        return Err(LabError::domain(
            "mixed-normal statistic with zero conditional variance",
        ));
    }
    let grid = g.grid();
    Ok(weighted_sum(f, g, grid.t(grid.count()))? / v.sqrt())
}

/// A bounded functional `h` of the weight path, standing in for an
/// F-measurable test variable `Z = h(f)`.
pub trait TestFunctional: Send + Sync {
    fn name(&self) -> &'static str;
    fn eval(&self, f: &WeightPath) -> f64;
    /// `sup |h|`.
    fn bound(&self) -> f64 {
        1.0
    }
}

/// `h ≡ 1`.
pub struct Unit;

/// `min(sup_t |f(t)|, clip) / clip`.
pub struct ClippedSup {
    pub clip: f64,
}

/// `clamp(f(T/2), -clip, clip) / clip`.
pub struct ClippedMid {
    pub clip: f64,
}

/// Default clipping level of the bounded functionals.
pub const DEFAULT_CLIP: f64 = 2.0;

impl TestFunctional for Unit {
    fn name(&self) -> &'static str {
        "one"
    }
    fn eval(&self, _f: &WeightPath) -> f64 {
        1.0
    }
}

impl TestFunctional for ClippedSup {
    fn name(&self) -> &'static str {
        "clipped-sup"
    }
    fn eval(&self, f: &WeightPath) -> f64 {
        let sup = f.values().iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        sup.min(self.clip) / self.clip
    }
}

impl TestFunctional for ClippedMid {
    fn name(&self) -> &'static str {
        "clipped-mid"
    }
    fn eval(&self, f: &WeightPath) -> f64 {
        let mid = f.value_at(0.5 * f.grid().horizon());
        mid.clamp(-self.clip, self.clip) / self.clip
    }
}

/// Test functionals by name: `one`, `clipped-sup`, `clipped-mid`.
pub fn functional_registry() -> Registry<f64, dyn TestFunctional> {
    Registry::<f64, dyn TestFunctional>::new("test functional")
        .with("one", |_| Ok(Box::new(Unit)))
        .with("clipped-sup", |clip| Ok(Box::new(ClippedSup { clip: *clip })))
        .with("clipped-mid", |clip| Ok(Box::new(ClippedMid { clip: *clip })))
}

/// Per-replica ingredients of the characteristic-function check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableSample {
    /// `X_m(T)`.
    pub x: f64,
    /// `sum f(t_i)^2 / m`.
    pub v: f64,
    /// `h(f)`.
    pub h: f64,
}

impl StableSample {
    pub fn new(f: &WeightPath, g: &StepProcess, h: &dyn TestFunctional) -> Result<Self> {
        let grid = g.grid();
        Ok(Self {
            x: weighted_sum(f, g, grid.t(grid.count()))?,
            v: conditional_variance(f),
            h: h.eval(f),
        })
    }
}

/// Monte Carlo estimates of `E[e^{iuX} h(Z)]` and `E[e^{-u^2 V/2} h(Z)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StableCheckReport {
    pub u_grid: Vec<f64>,
    pub lhs: Vec<Complex64>,
    pub rhs: Vec<Complex64>,
    /// `|lhs - rhs|` per `u`.
    pub gap: Vec<f64>,
    /// Standard error of the paired difference per `u`.
    pub std_err: Vec<f64>,
    pub max_abs_gap: f64,
}

impl StableCheckReport {
    /// Largest `gap / std_err` over `u` with a nonzero standard error.
    pub fn max_gap_in_std_errs(&self) -> f64 {
        self.gap
            .iter()
            .zip(&self.std_err)
            .filter(|(_, s)| **s > 0.0)
            .map(|(g, s)| g / s)
            .fold(0.0, f64::max)
    }
}

/// Minimum ensemble size for [`stable_cf_check`].
pub const STABLE_MIN_REPLICAS: usize = 100;

/// Characteristic-function check from per-replica samples.
pub fn stable_cf_from_samples(samples: &[StableSample], u_grid: &[f64]) -> Result<StableCheckReport> {
    if samples.len() < STABLE_MIN_REPLICAS {
        return Err(LabError::domain(format!(
            "stable CF check needs at least {STABLE_MIN_REPLICAS} replicas, got {}",
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let mut report = StableCheckReport {
        u_grid: u_grid.to_vec(),
        lhs: Vec::new(),
        rhs: Vec::new(),
        gap: Vec::new(),
        std_err: Vec::new(),
        max_abs_gap: 0.0,
    };
    for &u in u_grid {
        let lhs_re: Vec<f64> = samples.iter().map(|s| (u * s.x).cos() * s.h).collect();
        let lhs_im: Vec<f64> = samples.iter().map(|s| (u * s.x).sin() * s.h).collect();
        let rhs_re: Vec<f64> = samples.iter().map(|s| (-0.5 * u * u * s.v).exp() * s.h).collect();
        let lhs = Complex64::new(mean(&lhs_re), mean(&lhs_im));
        let rhs = Complex64::new(mean(&rhs_re), 0.0);
        let d_re: Vec<f64> = lhs_re.iter().zip(&rhs_re).map(|(a, b)| a - b).collect();
        let se = ((variance(&d_re) + variance(&lhs_im)) / n).sqrt();
        let gap = (lhs - rhs).norm();
        report.max_abs_gap = report.max_abs_gap.max(gap);
        report.lhs.push(lhs);
        report.rhs.push(rhs);
        report.gap.push(gap);
        report.std_err.push(se);
    }
    Ok(report)
}

/// Characteristic-function check over paired ensembles `(f_r, g_r)`.
pub fn stable_cf_check(
    weights: &[WeightPath],
    steps: &[StepProcess],
    h: &dyn TestFunctional,
    u_grid: &[f64],
) -> Result<StableCheckReport> {
    if weights.len() != steps.len() {
        return Err(LabError::domain("weight and step ensembles differ in size"));
    }
    let samples = weights
        .iter()
        .zip(steps)
        .map(|(f, g)| StableSample::new(f, g, h))
        .collect::<Result<Vec<_>>>()?;
    stable_cf_from_samples(&samples, u_grid)
}
