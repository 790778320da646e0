//! Strong p-variation of grid paths.
//!
//! `v_p(h) = (sup_pi sum |h(s_i) - h(s_{i-1})|^p)^{1/p}`, with the supremum
//! over partitions of the interval. For a path fixed by its values at grid
//! points (a step path with jumps on the grid, or the polygonal skeleton of a
//! sampled path), the supremum is reached on a subsequence of those values.
//! For `p >= 1` it can further be restricted to the turning points, because
//! dropping an interior point of a monotone run never lowers the sum.

use crate::blocks::BlockScheme;
use crate::error::{LabError, Result};
use crate::generators::IncrementGenerator;
use crate::mc::{try_replicate, SeedSpec};
use crate::paths::{StepProcess, UniformGrid, WeightPath};
use crate::special::zeta;

/// Largest path `pvar_brute` will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 14;

/// Exponent and grid-aligned interval `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvarQuery {
    pub p: f64,
    pub a: f64,
    pub b: f64,
}

impl PvarQuery {
    pub fn new(p: f64, a: f64, b: f64) -> Result<Self> {
        check_p(p)?;
        if !(a < b) {
            return Err(LabError::domain(format!("empty interval [{a}, {b}]")));
        }
        Ok(Self { p, a, b })
    }

    fn indices(&self, grid: &UniformGrid) -> Result<(usize, usize)> {
        if !grid.is_grid_point(self.a) || !grid.is_grid_point(self.b) {
            return Err(LabError::domain("p-variation interval must be grid-aligned"));
        }
        if self.a < 0.0 || self.b > grid.horizon() + 1e-12 {
            return Err(LabError::domain("p-variation interval outside [0, T]"));
        }
        Ok((grid.index_of(self.a), grid.index_of(self.b)))
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(LabError::domain(format!("p-variation needs p >= 1, got {p}")));
    }
    Ok(())
}

fn power_fn(p: f64) -> impl Fn(f64) -> f64 {
    let int = p.fract() == 0.0 && p <= 8.0;
    let ip = p as i32;
    move |x: f64| if int { x.powi(ip) } else { x.powf(p) }
}

/// Endpoints plus every strict turning point, with flat stretches collapsed.
fn turning_points(values: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(values.len());
    for &v in values {
        if out.last() == Some(&v) {
            continue;
        }
        if out.len() >= 2 {
            let n = out.len();
            let (prev, cur) = (out[n - 2], out[n - 1]);
            if (cur - prev) * (v - cur) > 0.0 {
                out[n - 1] = v;
                continue;
            }
        }
        out.push(v);
    }
    if out.is_empty() {
        out.extend(values.first());
    }
    out
}

/// Exact `v_p` of the path through `values` by dynamic programming,
/// `best[i] = max_{j<i} best[j] + |v_i - v_j|^p`, after reduction to turning points.
pub fn pvar(values: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    if values.is_empty() {
        return Err(LabError::domain("p-variation of an empty path"));
    }
    if p == 1.0 {
        return Ok(values.windows(2).map(|w| (w[1] - w[0]).abs()).sum());
    }
    let v = turning_points(values);
    let pow = power_fn(p);
    let mut best = vec![0.0_f64; v.len()];
    for i in 1..v.len() {
        let vi = v[i];
        let mut top = 0.0_f64;
        for j in 0..i {
            let cand = best[j] + pow((vi - v[j]).abs());
            if cand > top {
                top = cand;
            }
        }
        best[i] = top;
    }
    Ok(best[v.len() - 1].powf(1.0 / p))
}

/// Exhaustive enumeration of every partition; reference for [`pvar`].
pub fn pvar_brute(values: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    let n = values.len();
    if n == 0 {
        return Err(LabError::domain("p-variation of an empty path"));
    }
    if n > BRUTE_FORCE_LIMIT {
        return Err(LabError::domain(format!(
            "brute-force p-variation refuses {n} > {BRUTE_FORCE_LIMIT} points"
        )));
    }
    if n == 1 {
        return Ok(0.0);
    }
    let interior = n - 2;
    let mut best = 0.0_f64;
    for mask in 0u32..(1u32 << interior) {
        let mut prev = values[0];
        let mut sum = 0.0;
        for (k, &v) in values[1..n - 1].iter().enumerate() {
            if mask & (1 << k) != 0 {
                sum += (v - prev).abs().powf(p);
                prev = v;
            }
        }
        sum += (values[n - 1] - prev).abs().powf(p);
        best = best.max(sum);
    }
    Ok(best.powf(1.0 / p))
}

/// `v_p` of a step path on `[a, b]`.
pub fn pvar_step(g: &StepProcess, query: &PvarQuery) -> Result<f64> {
    let (lo, hi) = query.indices(g.grid())?;
    pvar(&g.cumulative()[lo..=hi], query.p)
}

/// `v_p` of the polygonal skeleton of a sampled path on `[a, b]`.
pub fn pvar_sampled(f: &WeightPath, query: &PvarQuery) -> Result<f64> {
    let (lo, hi) = query.indices(f.grid())?;
    pvar(&f.values()[lo..=hi], query.p)
}

/// Path values seen on block `j`: the weight on the closed block, the
/// step path on `[u_{j-1}, u_j)` together with its left limit at `u_j`.
fn block_skeletons(
    f: &WeightPath,
    g: &StepProcess,
    scheme: &BlockScheme,
    j: usize,
) -> (Vec<f64>, Vec<f64>, f64) {
    let grid = g.grid();
    let lo_t = scheme.u(j - 1);
    let hi_t = scheme.u(j).min(grid.t(grid.count()));
    let start = grid.index_of(lo_t);
    let inside: Vec<usize> = scheme.block(j).filter(|&i| grid.t(i) > lo_t).collect();
    let mut fv = vec![f.value_at(lo_t)];
    fv.extend(inside.iter().map(|&i| f.values()[i]));
    if hi_t > lo_t && !inside.last().is_some_and(|&i| grid.t(i) >= hi_t) {
        fv.push(f.value_at(hi_t));
    }
    let mut gv = vec![g.cumulative()[start]];
    gv.extend(inside.iter().map(|&i| g.cumulative()[i]));
    let frozen = f.value_at(lo_t);
    let stieltjes = scheme.block(j).map(|i| (f.values()[i] - frozen) * g.xi(i)).sum();
    (fv, gv, stieltjes)
}

/// Per-block `|∫ (f - f(u_{j-1})) dg| / (v_{1/alpha}(f) v_{1/beta}(g))`, with `0/0` read as 0.
pub fn love_young_ratio(
    f: &WeightPath,
    g: &StepProcess,
    scheme: &BlockScheme,
    beta: f64,
) -> Result<Vec<f64>> {
    let alpha = f.alpha();
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(LabError::domain(format!("beta = {beta} outside (0, 1]")));
    }
    if alpha + beta <= 1.0 {
        return Err(LabError::domain(format!(
            "Young condition alpha + beta > 1 fails (alpha = {alpha}, beta = {beta})"
        )));
    }
    f.same_grid(g)?;
    (1..=scheme.block_count())
        .map(|j| {
            let (fv, gv, s) = block_skeletons(f, g, scheme, j);
            if s == 0.0 {
                return Ok(0.0);
            }
            let denom = pvar(&fv, 1.0 / alpha)? * pvar(&gv, 1.0 / beta)?;
            Ok(s.abs() / denom)
        })
        .collect()
}

/// Classical Love-Young constant `1 + zeta(alpha + beta)`.
pub fn love_young_constant(alpha: f64, beta: f64) -> f64 {
    1.0 + zeta(alpha + beta)
}

/// Per-block `v_{1/alpha}` of the weight, for the bound `<= ||f||_alpha n^{-alpha}`.
pub fn block_weight_variation(f: &WeightPath, scheme: &BlockScheme) -> Result<Vec<f64>> {
    let zero = StepProcess::zero(*f.grid());
    (1..=scheme.block_count())
        .map(|j| pvar(&block_skeletons(f, &zero, scheme, j).0, 1.0 / f.alpha()))
        .collect()
}

/// `v_p(g_m)` and `sup |g_m|` samples on `[0, 1]` for one grid density.
#[derive(Debug, Clone, PartialEq)]
pub struct PvarScan {
    pub m: usize,
    pub pvar: Vec<f64>,
    pub supnorm: Vec<f64>,
}

impl PvarScan {
    /// `E[v_p(g_m)] / E[sup |g_m|]`.
    pub fn lepingle_ratio(&self) -> f64 {
        crate::mc::mean(&self.pvar) / crate::mc::mean(&self.supnorm)
    }
}

/// Monte Carlo samples of `v_p(g_m)` on `[0, 1]` for each `m`.
pub fn pvar_distribution_scan(
    generator: &dyn IncrementGenerator,
    p: f64,
    m_values: &[usize],
    replicas: usize,
    master_seed: u64,
) -> Result<Vec<PvarScan>> {
    if !(p > 2.0) {
        return Err(LabError::domain(format!(
            "p-variation scan needs p > 2 (both the iid invariance principle in W_p and \
             the martingale p-variation bound require it), got {p}"
        )));
    }
    m_values
        .iter()
        .map(|&m| {
            let grid = UniformGrid::unit(m)?;
            let sampler = generator.prepare(&grid)?;
            let pairs = try_replicate(master_seed, replicas, |seed: SeedSpec| {
                let path = sampler.sample(seed)?;
                let c = path.cumulative();
                let sup = c.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
                Ok((pvar(c, p)?, sup))
            })?;
            let (pvar, supnorm) = pairs.into_iter().unzip();
            Ok(PvarScan { m, pvar, supnorm })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Rademacher;

    #[test]
    fn examples() {
        assert!((pvar(&[0.0, 1.0, 2.0], 2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((pvar(&[0.0, 1.0, 0.0, 1.0], 2.0).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        assert!((pvar_brute(&[0.0, 1.0, 0.0, 1.0], 2.0).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        let v = [0.0, 0.5, -0.25, 1.0, 1.0, 0.75];
        assert_eq!(pvar(&v, 1.0).unwrap(), 0.5 + 0.75 + 1.25 + 0.0 + 0.25);
        assert_eq!(pvar_brute(&[3.0, 1.5], 2.5).unwrap(), 1.5);
        assert_eq!(pvar(&[2.0; 6], 3.0).unwrap(), 0.0);
        assert_eq!(pvar_brute(&[2.0; 6], 3.0).unwrap(), 0.0);
        assert_eq!(pvar(&[4.0], 2.0).unwrap(), 0.0);
    }

    #[test]
    fn errors() {
        assert!(pvar(&[0.0, 1.0], 0.5).is_err());
        assert!(pvar(&[], 2.0).is_err());
        assert!(pvar_brute(&[0.0; 15], 2.0).is_err());
        assert!(PvarQuery::new(2.0, 0.5, 0.5).is_err());
        let r = pvar_distribution_scan(&Rademacher, 2.0, &[16], 4, 0);
        assert!(r.unwrap_err().to_string().contains("p > 2"));
    }

    #[test]
    fn turning_points_keep_extremes() {
        assert_eq!(
            turning_points(&[0.0, 1.0, 2.0, 2.0, 1.0, 3.0]),
            vec![0.0, 2.0, 1.0, 3.0]
        );
        assert_eq!(turning_points(&[1.0, 1.0]), vec![1.0]);
    }

    #[test]
    fn step_query() {
        let grid = UniformGrid::unit(4).unwrap();
        let g = StepProcess::from_increments(grid, vec![1.0, -1.0, 1.0, 1.0]).unwrap();
        let q = PvarQuery::new(2.0, 0.0, 0.5).unwrap();
        assert!((pvar_step(&g, &q).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(pvar_step(&g, &PvarQuery::new(2.0, 0.1, 0.5).unwrap()).is_err());
    }

    #[test]
    fn love_young_single_jump() {
        let grid = UniformGrid::unit(16).unwrap();
        let f = WeightPath::new(grid, grid.times(), 1.0).unwrap();
        let mut xi = vec![0.0; 16];
        xi[6] = -0.3;
        let g = StepProcess::from_increments(grid, xi).unwrap();
        let scheme = BlockScheme::new(grid, 4).unwrap();
        let r = love_young_ratio(&f, &g, &scheme, 0.45).unwrap();
        assert!(r.iter().all(|x| *x <= 1.0));
        assert!(r[1] > 0.0);
        let c = WeightPath::constant(grid, 2.0);
        assert!(love_young_ratio(&c, &g, &scheme, 0.45)
            .unwrap()
            .iter()
            .all(|x| *x == 0.0));
        let rough = WeightPath::new(grid, grid.times(), 0.55).unwrap();
        assert!(love_young_ratio(&rough, &g, &scheme, 0.4).is_err());
    }
}
