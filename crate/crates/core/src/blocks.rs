//! Weighted Riemann sums and the big-block/small-block decomposition.
//!
//! With `u_j = j/n` and `beta_j = ceil(m u_j)`, block `j` collects the fine
//! indices `I_n(j) = {i : 1 <= i <= [mT], u_{j-1} <= i/m < u_j}`, that is
//! `beta_{j-1} <= i < beta_j`. Freezing the weight at the left end of each block
//! splits `X_m(t)` exactly into
//!
//! ```text
//! X_m(t) = main(t) + remainder(t) + edge(t) + partial(t)
//! main(t)      = sum_{j <= [nt]} f(u_{j-1}) sum_{i in I_n(j)} xi_i
//! remainder(t) = sum_{j <= [nt]} sum_{i in I_n(j)} (f(t_i) - f(u_{j-1})) xi_i
//! edge(t)      = sum_{i in I_n([nt]+1), i <= [mt]} (f(t_i) - f(u_[nt])) xi_i
//! partial(t)   = f(u_[nt]) sum_{i in I_n([nt]+1), i <= [mt]} xi_i
//! ```
//!
//! `f(u_j)` off the fine grid comes from linear interpolation.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{LabError, Result};
use crate::mc::{SeedSpec, Stream};
use crate::paths::{StepProcess, UniformGrid, WeightPath};

/// Bernstein partition of the fine grid into `n` blocks per unit time.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockScheme {
    grid: UniformGrid,
    n: usize,
    /// `beta[j] = ceil(m j / n)` for `j = 0..=blocks`.
    beta: Vec<usize>,
}

impl BlockScheme {
    pub fn new(grid: UniformGrid, n: usize) -> Result<Self> {
        if n == 0 || n > grid.m() {
            return Err(LabError::domain(format!(
                "block count n = {n} must satisfy 1 <= n <= m = {}",
                grid.m()
            )));
        }
        let m = grid.m() as u128;
        let nn = n as u128;
        let beta_of = |j: u128| ((m * j).div_ceil(nn)) as usize;
        let mut beta = vec![0];
        let mut j = 0u128;
        while *beta.last().unwrap() <= grid.count() {
            j += 1;
            beta.push(beta_of(j));
        }
        Ok(Self { grid, n, beta })
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of blocks needed to cover `1..=[mT]`.
    pub fn block_count(&self) -> usize {
        self.beta.len() - 1
    }

    pub fn beta(&self) -> &[usize] {
        &self.beta
    }

    /// `u_j = j/n`.
    pub fn u(&self, j: usize) -> f64 {
        j as f64 / self.n as f64
    }

    /// Fine indices of block `j` (one-based), clipped to `1..=[mT]`.
    pub fn block(&self, j: usize) -> std::ops::Range<usize> {
        let lo = self.beta[j - 1].max(1);
        let hi = self.beta[j].min(self.grid.count() + 1);
        lo..hi.max(lo)
    }

    /// Block containing fine index `i`: `floor(n i / m) + 1`.
    pub fn block_of(&self, i: usize) -> usize {
        (self.n as u128 * i as u128 / self.grid.m() as u128) as usize + 1
    }

    /// `[nt]` for `t = t_k`.
    pub fn completed_blocks(&self, k: usize) -> usize {
        self.block_of(k) - 1
    }

    fn check(&self, f: &WeightPath, g: &StepProcess) -> Result<()> {
        f.same_grid(g)?;
        if self.grid != *g.grid() {
            return Err(LabError::GridMismatch(
                "block scheme built on a different grid".to_string(),
            ));
        }
        Ok(())
    }
}

/// Components of the decomposition on the fine grid `t_0, ..., t_[mT]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    pub times: Vec<f64>,
    pub total: Vec<f64>,
    pub main_term: Vec<f64>,
    pub remainder: Vec<f64>,
    pub edge_term: Vec<f64>,
    /// `f(u_[nt])` times the partial-block increment.
    pub partial_main: Vec<f64>,
}

impl DecompositionResult {
    /// Largest relative violation of the recombination identity.
    pub fn recombination_error(&self) -> f64 {
        (0..self.total.len())
            .map(|k| {
                let parts = [
                    self.main_term[k],
                    self.remainder[k],
                    self.edge_term[k],
                    self.partial_main[k],
                ];
                let sum: f64 = parts.iter().sum();
                let scale = parts
                    .iter()
                    .map(|x| x.abs())
                    .sum::<f64>()
                    .max(self.total[k].abs());
                if scale == 0.0 {
                    0.0
                } else {
                    (self.total[k] - sum).abs() / scale
                }
            })
            .fold(0.0, f64::max)
    }

    /// Writes `(t, total, main, remainder, edge, partial)` rows.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        use crate::paths::fmt_full;
        writeln!(out, "{}", crate::CSV_VERSION_LINE)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "total", "main", "remainder", "edge", "partial"])?;
        for k in 0..self.times.len() {
            w.write_record([
                fmt_full(self.times[k]),
                fmt_full(self.total[k]),
                fmt_full(self.main_term[k]),
                fmt_full(self.remainder[k]),
                fmt_full(self.edge_term[k]),
                fmt_full(self.partial_main[k]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `X_m(t) = sum_{i <= [mt]} f(t_i) xi_{i,m}`.
pub fn weighted_sum(f: &WeightPath, g: &StepProcess, t: f64) -> Result<f64> {
    f.same_grid(g)?;
    g.grid().check_time(t)?;
    let k = g.grid().index_of(t);
    Ok((1..=k).map(|i| f.values()[i] * g.xi(i)).sum())
}

/// Forward sums `sum_{i <= [mt]} f(t_{i-1}) xi_{i,m}`.
pub fn weighted_sum_forward(f: &WeightPath, g: &StepProcess, t: f64) -> Result<f64> {
    f.same_grid(g)?;
    g.grid().check_time(t)?;
    let k = g.grid().index_of(t);
    Ok((1..=k).map(|i| f.values()[i - 1] * g.xi(i)).sum())
}

/// Splits `X_m` into main, remainder, edge and partial-block parts at every grid time.
pub fn decompose(f: &WeightPath, g: &StepProcess, scheme: &BlockScheme) -> Result<DecompositionResult> {
    scheme.check(f, g)?;
    let grid = g.grid();
    let len = grid.count() + 1;
    let mut out = DecompositionResult {
        times: grid.times(),
        total: vec![0.0; len],
        main_term: vec![0.0; len],
        remainder: vec![0.0; len],
        edge_term: vec![0.0; len],
        partial_main: vec![0.0; len],
    };
    let fv = f.values();
    let (mut total, mut main_full, mut rem_full) = (0.0, 0.0, 0.0);
    let (mut partial, mut edge) = (0.0, 0.0);
    let mut current = 1;
    let mut frozen = f.value_at(scheme.u(0));
    #[allow(clippy::needless_range_loop)]
    for k in 1..len {
        let block = scheme.block_of(k);
        while current < block {
            // Block `current` is complete.
            main_full += frozen * partial;
            rem_full += edge;
            partial = 0.0;
            edge = 0.0;
            current += 1;
            frozen = f.value_at(scheme.u(current - 1));
        }
        let xi = g.xi(k);
        total += fv[k] * xi;
        partial += xi;
        edge += (fv[k] - frozen) * xi;
        out.total[k] = total;
        out.main_term[k] = main_full;
        out.remainder[k] = rem_full;
        out.edge_term[k] = edge;
        out.partial_main[k] = frozen * partial;
    }
    Ok(out)
}

/// `sup_t |R_{n,m}(t)|` over the grid; `R` is a grid step function, so this is the true sup.
pub fn remainder_sup(result: &DecompositionResult) -> f64 {
    result.remainder.iter().fold(0.0, |acc, r| acc.max(r.abs()))
}

/// Pointwise edge bound `||f||_alpha n^{-alpha} sum_{i in I_n([nt]+1)} |xi_i|`.
pub fn edge_term_bound(f: &WeightPath, g: &StepProcess, scheme: &BlockScheme) -> Result<Vec<f64>> {
    scheme.check(f, g)?;
    let factor = f.holder_norm() * (scheme.n() as f64).powf(-f.alpha());
    let abs_block: Vec<f64> = (1..=scheme.block_count())
        .map(|j| scheme.block(j).map(|i| g.xi(i).abs()).sum())
        .collect();
    Ok((0..=g.grid().count())
        .map(|k| factor * abs_block.get(scheme.block_of(k) - 1).copied().unwrap_or(0.0))
        .collect())
}

/// Default refinement of the Brownian reference grid.
pub const ITO_FINE_FACTOR: usize = 16;

/// Forward Euler-Itô sum `sum f(s_{r-1}) (w(s_r) - w(s_{r-1}))` on a grid
/// refined `fine_factor` times, with `w` drawn from its own seed stream and
/// `f` linearly interpolated. Integrates over `[0, t_[mT]]`.
pub fn ito_reference(f: &WeightPath, seed: SeedSpec, fine_factor: usize) -> Result<f64> {
    if fine_factor == 0 {
        return Err(LabError::domain("fine_factor must be positive"));
    }
    let fine_m = f.grid().m() * fine_factor;
    let steps = f.grid().count() * fine_factor;
    let sd = (1.0 / fine_m as f64).sqrt();
    let mut rng = seed.rng(Stream::Brownian);
    let mut acc = 0.0;
    for r in 0..steps {
        let dw: f64 = rng.sample::<f64, _>(StandardNormal) * sd;
        acc += f.value_at(r as f64 / fine_m as f64) * dw;
    }
    Ok(acc)
}
