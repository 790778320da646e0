//! Grid and path types shared by every other module.
//!
//! A [`UniformGrid`] carries the points `t_i = i/m` for `0 <= i <= floor(m T)`.
//! A [`StepProcess`] is the triangular-array row `xi_{i,m}` together with its
//! cumulative path `g_m`, which jumps by `xi_{i,m}` *at* `t_i` (càdlàg).
//! A [`WeightPath`] holds grid samples of the Hölder weight `f`; off-grid
//! values come from linear interpolation, which keeps the grid Hölder
//! constant unchanged for exponents in `(0, 1]`.

use std::io::{Read, Write};

use crate::error::{LabError, Result};

/// Above this many cells the automatic Hölder estimate switches to a lag window.
pub const HOLDER_EXACT_LIMIT: usize = 1 << 12;

/// Uniform grid `t_i = i/m` on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    m: usize,
    horizon: f64,
    count: usize,
}

impl UniformGrid {
    pub fn new(m: usize, horizon: f64) -> Result<Self> {
        if m == 0 {
            return Err(LabError::domain("grid density m must be positive"));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(LabError::domain(format!(
                "horizon T must be positive, got {horizon}"
            )));
        }
        let scaled = m as f64 * horizon;
        let nearest = scaled.round();
        let count = if (scaled - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            nearest as usize
        } else {
            scaled.floor() as usize
        };
        if count == 0 {
            return Err(LabError::domain(format!(
                "grid m={m}, T={horizon} has no cell (floor(mT) = 0)"
            )));
        }
        Ok(Self { m, horizon, count })
    }

    /// Grid with `T = 1`.
    pub fn unit(m: usize) -> Result<Self> {
        Self::new(m, 1.0)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `floor(m T)`, the index of the last grid point.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.m as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        i as f64 / self.m as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.count).map(|i| self.t(i)).collect()
    }

    /// `floor(m t)`, snapping to the nearest integer when `m t` is within
    /// rounding distance of it so that `index_of(t(k)) == k` for every `k`.
    pub fn index_of(&self, t: f64) -> usize {
        let scaled = t * self.m as f64;
        let nearest = scaled.round();
        let k = if (scaled - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
            nearest
        } else {
            scaled.floor()
        };
        (k.max(0.0) as usize).min(self.count)
    }

    /// Whether `t` coincides with a grid point up to rounding.
    pub fn is_grid_point(&self, t: f64) -> bool {
        let scaled = t * self.m as f64;
        (scaled - scaled.round()).abs() <= 1e-9 * scaled.abs().max(1.0)
    }

    pub(crate) fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(LabError::domain(format!(
                "time {t} outside [0, {}]",
                self.horizon
            )));
        }
        Ok(())
    }
}

/// Row of a triangular array and its càdlàg cumulative path.
#[derive(Debug, Clone, PartialEq)]
pub struct StepProcess {
    grid: UniformGrid,
    increments: Vec<f64>,
    cumulative: Vec<f64>,
}

impl StepProcess {
    /// Builds the step path from `xi_{1,m}, ..., xi_{count,m}`.
    ///
    /// The stored increments are re-read from the running sum, so
    /// `cumulative[k] - cumulative[k-1] == increments[k-1]` holds bit for bit.
    /// They differ from the input only where the running sum rounds.
    pub fn from_increments(grid: UniformGrid, increments: Vec<f64>) -> Result<Self> {
        if increments.len() != grid.count() {
            return Err(LabError::GridMismatch(format!(
                "{} increments for a grid with {} cells",
                increments.len(),
                grid.count()
            )));
        }
        if let Some(bad) = increments.iter().find(|x| !x.is_finite()) {
            return Err(LabError::domain(format!("non-finite increment {bad}")));
        }
        let mut cumulative = Vec::with_capacity(increments.len() + 1);
        cumulative.push(0.0);
        let mut stored = Vec::with_capacity(increments.len());
        let mut acc = 0.0_f64;
        for &x in &increments {
            let next = acc + x;
            let d = next - acc;
            if acc + d == next {
                stored.push(d);
            } else {
                stored.push(x);
            }
            cumulative.push(next);
            acc = next;
        }
        Ok(Self {
            grid,
            increments: stored,
            cumulative,
        })
    }

    pub fn zero(grid: UniformGrid) -> Self {
        Self {
            grid,
            increments: vec![0.0; grid.count()],
            cumulative: vec![0.0; grid.count() + 1],
        }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    /// `xi_{i,m}` for `i = 1..=count`, stored at offset `i - 1`.
    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    /// `g_m(t_k)` for `k = 0..=count`.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// `xi_{i,m}` with the one-based index used throughout.
    pub fn xi(&self, i: usize) -> f64 {
        self.increments[i - 1]
    }

    /// `g_m(t) = cumulative[floor(m t)]`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        self.grid.check_time(t)?;
        Ok(self.cumulative[self.grid.index_of(t)])
    }
}

/// `g_m(t)`; see [`StepProcess::eval`].
pub fn eval_step(g: &StepProcess, t: f64) -> Result<f64> {
    g.eval(t)
}

/// How [`holder_norm_estimate_with`] scans grid pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HolderMode {
    /// Every pair `i < j`.
    Exact,
    /// Pairs with `j - i <= lags`; a lower bound of the exact value.
    Windowed { lags: usize },
}

impl HolderMode {
    /// Exact up to [`HOLDER_EXACT_LIMIT`] cells, otherwise a window of
    /// `max(m/4, HOLDER_EXACT_LIMIT)` lags.
    pub fn auto(grid: &UniformGrid) -> Self {
        if grid.count() <= HOLDER_EXACT_LIMIT {
            HolderMode::Exact
        } else {
            HolderMode::Windowed {
                lags: (grid.m() / 4).max(HOLDER_EXACT_LIMIT),
            }
        }
    }
}

/// Grid Hölder seminorm `max_{i<j} |v_j - v_i| / (t_j - t_i)^alpha`.
pub fn holder_norm_estimate(values: &[f64], grid: &UniformGrid, alpha: f64) -> Result<f64> {
    holder_norm_estimate_with(values, grid, alpha, HolderMode::auto(grid))
}

pub fn holder_norm_estimate_with(
    values: &[f64],
    grid: &UniformGrid,
    alpha: f64,
    mode: HolderMode,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(LabError::domain(format!(
            "Hölder exponent {alpha} outside (0, 1]"
        )));
    }
    if values.len() < 2 {
        return Err(LabError::domain("Hölder estimate needs at least 2 grid points"));
    }
    if values.len() > grid.count() + 1 {
        return Err(LabError::GridMismatch(format!(
            "{} values for a grid with {} points",
            values.len(),
            grid.count() + 1
        )));
    }
    let max_lag = match mode {
        HolderMode::Exact => values.len() - 1,
        HolderMode::Windowed { lags } => lags.clamp(1, values.len() - 1),
    };
    let m = grid.m() as f64;
    let mut best = 0.0_f64;
    // The distance only depends on the lag, so scan lag by lag.
    for lag in 1..=max_lag {
        let oscillation = max_abs_lag_difference(values, lag);
        if oscillation > 0.0 {
            let ratio = oscillation / (lag as f64 / m).powf(alpha);
            best = best.max(ratio);
        }
    }
    Ok(best)
}

/// `max_i |v[i + lag] - v[i]|`, with independent lanes so the loop vectorizes.
fn max_abs_lag_difference(values: &[f64], lag: usize) -> f64 {
    const LANES: usize = 8;
    let (head, tail) = (&values[..values.len() - lag], &values[lag..]);
    let mut acc = [0.0_f64; LANES];
    let mut a = head.chunks_exact(LANES);
    let mut b = tail.chunks_exact(LANES);
    for (x, y) in a.by_ref().zip(b.by_ref()) {
        for k in 0..LANES {
            let d = (y[k] - x[k]).abs();
            acc[k] = if d > acc[k] { d } else { acc[k] };
        }
    }
    let mut best = acc.iter().fold(0.0_f64, |m, &v| m.max(v));
    for (x, y) in a.remainder().iter().zip(b.remainder()) {
        best = best.max((y - x).abs());
    }
    best
}

/// Grid samples of an alpha-Hölder weight process.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightPath {
    grid: UniformGrid,
    values: Vec<f64>,
    alpha: f64,
    holder_norm: f64,
}

impl WeightPath {
    /// Builds the path and fills `holder_norm` with the automatic estimate.
    pub fn new(grid: UniformGrid, values: Vec<f64>, alpha: f64) -> Result<Self> {
        Self::with_mode(grid, values, alpha, HolderMode::auto(&grid))
    }

    pub fn with_mode(grid: UniformGrid, values: Vec<f64>, alpha: f64, mode: HolderMode) -> Result<Self> {
        if !(alpha > 0.5 && alpha <= 1.0) {
            return Err(LabError::domain(format!(
                "weight exponent alpha = {alpha} must lie in (1/2, 1]"
            )));
        }
        if values.len() != grid.count() + 1 {
            return Err(LabError::GridMismatch(format!(
                "{} weight samples for a grid with {} points",
                values.len(),
                grid.count() + 1
            )));
        }
        if let Some(bad) = values.iter().find(|x| !x.is_finite()) {
            return Err(LabError::domain(format!("non-finite weight sample {bad}")));
        }
        let holder_norm = holder_norm_estimate_with(&values, &grid, alpha, mode)?;
        Ok(Self {
            grid,
            values,
            alpha,
            holder_norm,
        })
    }

    /// Constant weight `c`, declared Lipschitz.
    pub fn constant(grid: UniformGrid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.count() + 1],
            alpha: 1.0,
            holder_norm: 0.0,
        }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    /// `f(t_i)` for `i = 0..=count`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn holder_norm(&self) -> f64 {
        self.holder_norm
    }

    /// Multiplies every sample by `c`; the Hölder norm scales by `|c|`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
            alpha: self.alpha,
            holder_norm: self.holder_norm * c.abs(),
        }
    }

    /// Adds `c` to every sample.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v + c).collect(),
            alpha: self.alpha,
            holder_norm: self.holder_norm,
        }
    }

    /// Piecewise-linear interpolation of the samples; `t` is clamped to the grid span.
    pub fn value_at(&self, t: f64) -> f64 {
        let last = self.grid.count();
        let x = (t * self.grid.m() as f64).clamp(0.0, last as f64);
        let k = (x.floor() as usize).min(last);
        if k == last {
            return self.values[last];
        }
        let w = x - k as f64;
        if w == 0.0 {
            self.values[k]
        } else {
            self.values[k] + w * (self.values[k + 1] - self.values[k])
        }
    }

    pub(crate) fn same_grid(&self, g: &StepProcess) -> Result<()> {
        if self.grid != *g.grid() {
            return Err(LabError::GridMismatch(format!(
                "weight on (m={}, T={}) but step process on (m={}, T={})",
                self.grid.m(),
                self.grid.horizon(),
                g.grid().m(),
                g.grid().horizon()
            )));
        }
        Ok(())
    }
}

/// Formats with 17 significant digits.
pub fn fmt_full(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `(index, t, value)` rows with a versioned header comment.
pub fn write_path_csv<W: Write>(mut out: W, grid: &UniformGrid, values: &[f64]) -> Result<()> {
    writeln!(out, "{}", crate::CSV_VERSION_LINE)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "t", "value"])?;
    for (i, v) in values.iter().enumerate() {
        w.write_record([i.to_string(), fmt_full(grid.t(i)), fmt_full(*v)])?;
    }
    w.flush()?;
    Ok(())
}

/// One row of a path CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathRow {
    pub index: usize,
    pub t: f64,
    pub value: f64,
}

/// Reads `(index, t, value)` rows; `#` lines are skipped.
pub fn read_path_csv<R: Read>(input: R) -> Result<Vec<PathRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let field = |k: usize, name: &str| -> Result<&str> {
            record
                .get(k)
                .ok_or_else(|| LabError::Io(format!("row {}: missing column `{name}`", line + 1)))
        };
        let parse_err = |name: &str| LabError::Io(format!("row {}: bad `{name}`", line + 1));
        let index = field(0, "index")?.parse().map_err(|_| parse_err("index"))?;
        let t = field(1, "t")?.parse().map_err(|_| parse_err("t"))?;
        let value = field(2, "value")?.parse().map_err(|_| parse_err("value"))?;
        rows.push(PathRow { index, t, value });
    }
    Ok(rows)
}
