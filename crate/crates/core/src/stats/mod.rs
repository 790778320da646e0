//! Distributional checks: KS, mixed-normal statistics, CF checks, tightness and rate fits.

mod clt;
mod ks;
mod rate;
pub mod thresholds;
mod tightness;

pub use clt::{
    conditional_variance, functional_registry, mixed_normal_stat, stable_cf_check, stable_cf_from_samples,
    ClippedMid, ClippedSup, StableCheckReport, StableSample, TestFunctional, Unit, DEFAULT_CLIP,
    STABLE_MIN_REPLICAS,
};
pub use ks::{ks_critical_value, ks_statistic, KsReference, KS_MIN_SAMPLES};
pub use rate::{rate_experiment, RateExperiment, RateFit, RATE_SEPARATION};
pub use tightness::{
    tightness_constant, tightness_from_samples, tightness_lattice, tightness_samples, Lattice, TightnessCell,
    TightnessEstimate, TIGHTNESS_MIN_REPLICAS,
};
