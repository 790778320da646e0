//! Numerical laboratory for weighted random sums
//! `X_m(t) = sum_{i <= [mt]} f(t_i) xi_{i,m}` with an alpha-Hölder weight
//! (alpha > 1/2) and a triangular array whose partial sums converge stably
//! to Brownian motion.
//!
//! * [`paths`]: grids, step processes, Hölder weight paths.
//! * [`generators`]: seeded Rademacher, fGn, quadratic-variation and weight generators.
//! * [`blocks`]: weighted sums and the big-block/small-block decomposition.
//! * [`fraccalc`]: one-sided fractional derivatives and the integration-by-parts identity.
//! * [`pvariation`]: exact strong p-variation and Love-Young / Lépingle diagnostics.
//! * [`stats`]: KS tests, mixed-normal and characteristic-function checks, rate fits.

// `!(x > 0.0)` guards reject NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blocks;
pub mod error;
pub mod fraccalc;
pub mod generators;
pub mod mc;
pub mod paths;
pub mod pvariation;
pub mod registry;
pub mod special;
pub mod stats;

pub use error::{LabError, Result};
pub use mc::SeedSpec;
pub use paths::{StepProcess, UniformGrid, WeightPath};

/// Leading comment line of every CSV the crate writes.
pub const CSV_VERSION_LINE: &str = "# wrs-lab csv v1";
