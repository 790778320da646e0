//! Fixed acceptance thresholds shared by the CLI summaries and the acceptance suite.

/// Decomposition recombination, relative.
pub const RECOMBINATION_REL: f64 = 1e-10;
/// Integration-by-parts identity at 512 quadrature points, relative.
pub const IBP_REL: f64 = 1e-3;
pub const IBP_QUAD_POINTS: usize = 512;
/// Power rule and closed-form right derivative, relative.
pub const FRAC_ORACLE_REL: f64 = 1e-4;
/// DP against brute force p-variation.
pub const PVAR_EXACT: f64 = 1e-12;
/// KS distance to N(0, 1): the 5% critical value 0.030 at 2000 replicas plus finite-m slack.
pub const CLT_KS: f64 = 0.05;
/// Stable CF gap in Monte Carlo standard errors.
pub const STABLE_CF_STD_ERRS: f64 = 3.0;
/// Slack added to the theoretical slope `-(alpha - 1/2)`.
pub const RATE_SLOPE_SLACK: f64 = 0.1;
/// Rademacher tightness constant window.
pub const TIGHTNESS_RADEMACHER: (f64, f64) = (2.5, 3.3);
/// Allowed relative change of the QV tightness constant between grid sizes.
pub const TIGHTNESS_STABILITY: f64 = 0.2;
/// sigma_H against the direct-sum reference.
pub const SIGMA_H_ABS: f64 = 1e-8;
/// Upper bound on `E[v_p(g_m)] / E[sup |g_m|]`.
pub const LEPINGLE_BOUND: f64 = 10.0;
/// Level of the KS critical value quoted next to [`CLT_KS`].
pub const KS_LEVEL: f64 = 0.05;
