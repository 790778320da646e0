//! Fractional Gaussian noise synthesis.
//!
//! Unit-grid fGn has autocovariance
//! `rho_H(r) = (|r+1|^{2H} + |r-1|^{2H} - 2|r|^{2H}) / 2`.
//! The default synthesizer embeds the Toeplitz covariance in a circulant of
//! size `2 * next_pow2(n)` and diagonalizes it with an FFT. The Cholesky
//! factorization is kept as an O(n^3) cross-check and as the fallback for
//! small grids.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};

use crate::error::{LabError, Result};
use crate::mc::{SeedSpec, Stream};
use crate::paths::UniformGrid;
use crate::registry::Registry;

/// Largest size the Cholesky route accepts.
pub const CHOLESKY_LIMIT: usize = 1 << 10;

/// Relative size below which a negative circulant eigenvalue counts as rounding noise.
const EIGEN_ROUNDOFF: f64 = 1e-10;

/// Hurst parameter together with the grid the increments live on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FbmSpec {
    pub hurst: f64,
    pub grid: UniformGrid,
}

impl FbmSpec {
    pub fn new(hurst: f64, grid: UniformGrid) -> Result<Self> {
        check_hurst(hurst)?;
        Ok(Self { hurst, grid })
    }
}

pub(crate) fn check_hurst(hurst: f64) -> Result<()> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(LabError::domain(format!(
            "Hurst parameter {hurst} outside (0, 1)"
        )));
    }
    Ok(())
}

/// Unit-grid fGn autocovariance at integer lag `r`.
pub fn fgn_autocovariance(hurst: f64, r: u64) -> f64 {
    let two_h = 2.0 * hurst;
    match r {
        0 => 1.0,
        _ if two_h == 1.0 => 0.0,
        1 => 0.5 * (2.0_f64.powf(two_h) - 2.0),
        _ => {
            // r^{2H} ((1 + 1/r)^{2H} + (1 - 1/r)^{2H} - 2) / 2 without the cancellation.
            let rf = r as f64;
            let x = 1.0 / rf;
            let up = (two_h * x.ln_1p()).exp_m1();
            let down = (two_h * (-x).ln_1p()).exp_m1();
            0.5 * rf.powf(two_h) * (up + down)
        }
    }
}

/// Prepared sampler of unit-variance fGn of a fixed length.
pub trait FgnPlan: Send + Sync {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// One unit-grid fGn vector.
    fn sample(&self, rng: &mut dyn rand::RngCore) -> Vec<f64>;
}

/// Strategy that prepares [`FgnPlan`]s.
pub trait FgnSynthesizer: Send + Sync {
    fn name(&self) -> &'static str;
    fn prepare(&self, hurst: f64, len: usize) -> Result<Arc<dyn FgnPlan>>;
}

/// Circulant embedding, optionally falling back to Cholesky.
#[derive(Debug, Clone, Copy)]
pub struct CirculantEmbedding {
    pub cholesky_fallback: bool,
}

/// Direct Cholesky factor of the Toeplitz covariance.
#[derive(Debug, Clone, Copy)]
pub struct CholeskySynthesis;

struct CirculantPlan {
    len: usize,
    sqrt_eigen: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl FgnPlan for CirculantPlan {
    fn len(&self) -> usize {
        self.len
    }

    fn sample(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        let mut buf: Vec<Complex<f64>> = self
            .sqrt_eigen
            .iter()
            .map(|&s| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(s * re, s * im)
            })
            .collect();
        self.fft.process(&mut buf);
        buf.truncate(self.len);
        buf.into_iter().map(|c| c.re).collect()
    }
}

struct CholeskyPlan {
    factor: DMatrix<f64>,
}

impl FgnPlan for CholeskyPlan {
    fn len(&self) -> usize {
        self.factor.nrows()
    }

    fn sample(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        let n = self.factor.nrows();
        let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        (0..n)
            .map(|i| (0..=i).map(|j| self.factor[(i, j)] * z[j]).sum())
            .collect()
    }
}

/// Diagonalizes the circulant embedding; returns `None` on a genuinely
/// negative eigenvalue.
fn circulant_plan(hurst: f64, len: usize) -> Option<CirculantPlan> {
    let half = len.next_power_of_two();
    let size = 2 * half;
    let mut row: Vec<Complex<f64>> = Vec::with_capacity(size);
    for r in 0..=half {
        row.push(Complex::new(fgn_autocovariance(hurst, r as u64), 0.0));
    }
    for r in (1..half).rev() {
        row.push(Complex::new(fgn_autocovariance(hurst, r as u64), 0.0));
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(size);
    fft.process(&mut row);
    let max = row.iter().fold(0.0_f64, |a, c| a.max(c.re));
    let mut sqrt_eigen = Vec::with_capacity(size);
    for c in &row {
        let lambda = c.re;
        if lambda < -EIGEN_ROUNDOFF * max {
            return None;
        }
        // Real embedding: X = F diag(sqrt(lambda / size)) (Z1 + i Z2) has Re X ~ N(0, C).
        sqrt_eigen.push((lambda.max(0.0) / size as f64).sqrt());
    }
    Some(CirculantPlan { len, sqrt_eigen, fft })
}

fn cholesky_plan(hurst: f64, len: usize) -> Result<CholeskyPlan> {
    if len > CHOLESKY_LIMIT {
        return Err(LabError::Synthesis(format!(
            "Cholesky synthesis limited to {CHOLESKY_LIMIT} points, asked for {len}"
        )));
    }
    let acov: Vec<f64> = (0..len).map(|r| fgn_autocovariance(hurst, r as u64)).collect();
    let cov = DMatrix::from_fn(len, len, |i, j| acov[i.abs_diff(j)]);
    let chol = cov.cholesky().ok_or_else(|| {
        LabError::Synthesis(format!(
            "fGn covariance (H={hurst}, n={len}) not positive definite"
        ))
    })?;
    Ok(CholeskyPlan { factor: chol.l() })
}

impl FgnSynthesizer for CirculantEmbedding {
    fn name(&self) -> &'static str {
        "circulant"
    }

    fn prepare(&self, hurst: f64, len: usize) -> Result<Arc<dyn FgnPlan>> {
        check_hurst(hurst)?;
        if let Some(plan) = circulant_plan(hurst, len) {
            return Ok(Arc::new(plan));
        }
        if self.cholesky_fallback && len <= CHOLESKY_LIMIT {
            return Ok(Arc::new(cholesky_plan(hurst, len)?));
        }
        Err(LabError::Synthesis(format!(
            "circulant embedding of fGn (H={hurst}, n={len}) has a negative eigenvalue \
             and the grid is too large for the Cholesky fallback"
        )))
    }
}

impl FgnSynthesizer for CholeskySynthesis {
    fn name(&self) -> &'static str {
        "cholesky"
    }

    fn prepare(&self, hurst: f64, len: usize) -> Result<Arc<dyn FgnPlan>> {
        check_hurst(hurst)?;
        Ok(Arc::new(cholesky_plan(hurst, len)?))
    }
}

impl Default for CirculantEmbedding {
    fn default() -> Self {
        Self {
            cholesky_fallback: true,
        }
    }
}

/// fGn synthesizers by name.
pub fn synthesizer_registry() -> Registry<(), dyn FgnSynthesizer> {
    Registry::<(), dyn FgnSynthesizer>::new("fGn synthesizer")
        .with("circulant", |_| Ok(Box::new(CirculantEmbedding::default())))
        .with("cholesky", |_| Ok(Box::new(CholeskySynthesis)))
}

/// fGn increments `B^H(t_i) - B^H(t_{i-1})` on `spec.grid`, each with
/// variance `(1/m)^{2H}`.
pub fn gen_fgn(spec: &FbmSpec, seed: SeedSpec) -> Result<Vec<f64>> {
    let plan = CirculantEmbedding::default().prepare(spec.hurst, spec.grid.count())?;
    let scale = (spec.grid.m() as f64).powf(-spec.hurst);
    let mut rng = seed.rng(Stream::Increments);
    Ok(plan.sample(&mut rng).into_iter().map(|z| z * scale).collect())
}
