//! One-sided fractional derivatives and the fractional integration-by-parts
//! identity for step integrators.
//!
//! For `a < s < b`:
//!
//! ```text
//! D^g_{a+} f_a(s)       = [ (f(s)-f(a))/(s-a)^g + g ∫_a^s (f(s)-f(y))/(s-y)^{g+1} dy ] / Γ(1-g)
//! D^{1-g}_{b-} h_{b-}(s) = [ (h(s)-h(b-))/(b-s)^{1-g} + (1-g) ∫_s^b (h(s)-h(y))/(y-s)^{2-g} dy ] / Γ(g)
//! ```
//!
//! The left operator is evaluated by graded quadrature. The right operator,
//! applied to a step path, has an exact jump-sum form. With the operators
//! written without the `(-1)^g` and `(-1)^{1-g}` factors, the Stieltjes
//! integral is
//!
//! ```text
//! ∫_[a,b) (f(s)-f(a)) dg(s) = - ∫_a^b D^g_{a+} f_a(s) D^{1-g}_{b-} g_{b-}(s) ds
//! ```
//!
//! and [`ibp_identity_check`] compares the two sides.

use crate::error::{LabError, Result};
use crate::paths::{StepProcess, WeightPath};
use crate::special::gamma as gamma_fn;

/// Graded panels per decade used when no refinement is given.
pub const DEFAULT_REFINEMENT: usize = 8;

/// Decades of geometric grading toward the singular endpoint.
const GRADED_DECADES: i32 = 6;

// 4-point Gauss-Legendre on [-1, 1].
const GL_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Order `gamma` and interval `[a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracSpec {
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
}

impl FracSpec {
    /// Any order in `(0, 1)`; the identity check further requires `gamma > 1/2`.
    pub fn new(gamma: f64, a: f64, b: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(LabError::domain(format!("order gamma = {gamma} outside (0, 1)")));
        }
        if !(a >= 0.0 && a < b) {
            return Err(LabError::domain(format!("need 0 <= a < b, got a = {a}, b = {b}")));
        }
        Ok(Self { gamma, a, b })
    }

    fn check_weight(&self, f: &WeightPath) -> Result<()> {
        if self.gamma >= f.alpha() {
            return Err(LabError::domain(format!(
                "order gamma = {} must be below the weight's Hölder exponent {}",
                self.gamma,
                f.alpha()
            )));
        }
        if self.b > f.grid().t(f.grid().count()) + 1e-12 {
            return Err(LabError::domain(format!(
                "b = {} beyond the weight's grid",
                self.b
            )));
        }
        Ok(())
    }
}

fn gauss_legendre<F: Fn(f64) -> f64>(lo: f64, hi: f64, f: &F) -> f64 {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    GL_NODES
        .iter()
        .zip(GL_WEIGHTS)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Integrates over `[lo, hi]` (with `0 < lo`) on geometric panels of ratio at most `ratio`.
fn graded<F: Fn(f64) -> f64>(lo: f64, hi: f64, ratio: f64, f: &F) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let panels = ((hi / lo).ln() / ratio.ln()).ceil().max(1.0) as usize;
    let q = (hi / lo).powf(1.0 / panels as f64);
    let mut acc = 0.0;
    let mut x0 = lo;
    for p in 0..panels {
        let x1 = if p + 1 == panels { hi } else { x0 * q };
        acc += gauss_legendre(x0, x1, f);
        x0 = x1;
    }
    acc
}

/// `D^gamma_{a+} f_a(s)` by graded quadrature.
///
/// With `u = s - y`, the integral runs over `(0, s - a]`. Kinks of the
/// interpolated weight split it into linear pieces. Each piece is covered by
/// geometric panels of ratio `10^{1/refinement}` and 4-point Gauss-Legendre.
/// The innermost linear piece is graded over six decades toward `u = 0`, and
/// the remaining sliver `(0, eps]` is integrated in closed form.
pub fn frac_deriv_left(f: &WeightPath, spec: &FracSpec, s: f64, refinement: usize) -> Result<f64> {
    spec.check_weight(f)?;
    if !(spec.a < s && s < spec.b) {
        return Err(LabError::domain(format!(
            "s = {s} outside ({}, {})",
            spec.a, spec.b
        )));
    }
    if refinement == 0 {
        return Err(LabError::domain("refinement must be positive"));
    }
    let g = spec.gamma;
    let a = spec.a;
    let d = s - a;
    let fs = f.value_at(s);
    let integrand = |u: f64| (fs - f.value_at(s - u)) * u.powf(-g - 1.0);
    let ratio = 10f64.powf(1.0 / refinement as f64);

    // Kinks y = t_i in (a, s), as distances u = s - t_i in increasing order.
    let grid = f.grid();
    let m = grid.m() as f64;
    let mut kinks = Vec::new();
    let mut i = (s * m).ceil() as i64 - 1;
    while i >= 0 {
        let t = i as f64 / m;
        if t <= a {
            break;
        }
        if t < s {
            kinks.push(s - t);
        }
        i -= 1;
    }
    let inner = kinks.first().copied().unwrap_or(d);

    // (0, inner]: f(s) - f(s - u) = slope * u.
    let slope = (fs - f.value_at(s - inner)) / inner;
    let eps = inner * 10f64.powi(-GRADED_DECADES);
    let mut integral = slope * eps.powf(1.0 - g) / (1.0 - g);
    // Written via the slope: f(s) - f(s - u) cancels badly for tiny u.
    integral += graded(eps, inner, ratio, &|u: f64| slope * u.powf(-g));
    let mut lo = inner;
    for &hi in kinks.iter().skip(1).chain(std::iter::once(&d)) {
        integral += graded(lo, hi, ratio, &integrand);
        lo = hi;
    }

    let fa = fs - f.value_at(a);
    Ok((fa / d.powf(g) + g * integral) / gamma_fn(1.0 - g))
}

/// `D^{1-gamma}_{b-} (g_m)_{b-}(s)` in closed form for `t_{k-1} < s < t_k`:
///
/// ```text
/// [ (g(t_{k-1}) - g(b-)) (b-s)^{g-1}
///   - sum_{l=k+1}^{mb} (g(t_{k-1}) - g(t_{l-1})) ((t_l-s)^{g-1} - (t_{l-1}-s)^{g-1}) ] / Γ(g)
/// ```
///
/// with `g(b-) = g(t_{mb-1})`.
pub fn frac_deriv_right_step(g: &StepProcess, spec: &FracSpec, s: f64) -> Result<f64> {
    let grid = g.grid();
    if !grid.is_grid_point(spec.b) {
        return Err(LabError::domain(format!("b = {} is not a grid point", spec.b)));
    }
    if spec.b > grid.horizon() + 1e-12 {
        return Err(LabError::domain(format!("b = {} beyond the horizon", spec.b)));
    }
    if !(spec.a < s && s < spec.b) {
        return Err(LabError::domain(format!(
            "s = {s} outside ({}, {})",
            spec.a, spec.b
        )));
    }
    if grid.is_grid_point(s) {
        return Err(LabError::domain(format!("s = {s} lies on a grid point")));
    }
    let x = s * grid.m() as f64;
    let k = x.floor() as usize + 1;
    Ok(right_step_at(
        g,
        spec.gamma,
        grid.index_of(spec.b),
        k,
        k as f64 - x,
    ))
}

/// Right derivative at `s = t_k - gap * h`, `0 < gap < 1`, for jumps up to `t_top`.
/// Taking the distance to `t_k` directly keeps it exact near the singularity.
fn right_step_at(g: &StepProcess, gamma: f64, top: usize, k: usize, gap: f64) -> f64 {
    let m = g.grid().m() as f64;
    let c = g.cumulative();
    let e = gamma - 1.0;
    let base = c[k - 1];
    // (t_l - s)^{gamma-1} for l = k..=top.
    let pw = |l: usize| (((l - k) as f64 + gap) / m).powf(e);
    let mut prev = pw(k);
    let mut sum = 0.0;
    for l in (k + 1)..=top {
        let cur = pw(l);
        sum += (base - c[l - 1]) * (cur - prev);
        prev = cur;
    }
    let head = (base - c[top - 1]) * pw(top);
    (head - sum) / gamma_fn(gamma)
}

/// Both sides of the integration-by-parts identity on one interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IbpCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
}

impl IbpCheck {
    /// `abs_err / |lhs|`, or `abs_err` when `lhs = 0`.
    pub fn rel_err(&self) -> f64 {
        if self.lhs == 0.0 {
            self.abs_err
        } else {
            self.abs_err / self.lhs.abs()
        }
    }
}

/// Exact Stieltjes sum `sum_{a <= t_i < b} (f(t_i) - f(a)) xi_i`.
pub fn stieltjes_lhs(f: &WeightPath, g: &StepProcess, a: f64, b: f64) -> Result<f64> {
    f.same_grid(g)?;
    let grid = g.grid();
    let lo = grid.index_of(a).max(1);
    let hi = grid.index_of(b);
    let fa = f.value_at(a);
    Ok((lo..hi)
        .filter(|&i| grid.t(i) >= a)
        .map(|i| (f.values()[i] - fa) * g.xi(i))
        .sum())
}

/// One quadrature node of the identity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IbpNode {
    pub s: f64,
    pub weight: f64,
    /// `s` lies in `(t_{cell-1}, t_cell)`.
    pub cell: usize,
    /// `(t_cell - s) / h`.
    pub gap: f64,
    /// `D^gamma_{a+} f(s)`, filled by [`left_derivative_table`].
    pub left: f64,
}

/// Quadrature nodes and weights for `∫_a^b · ds` avoiding grid points.
///
/// Each grid cell `(t_{k-1}, t_k)` gets `quad_points` midpoint panels, graded
/// toward both ends. The left half uses `s = t_{k-1} + (h/2) v^2`, which
/// smooths the `(s - t_{k-1})^{1-gamma}` behavior of the left derivative past
/// a kink. The right half uses `s = t_k - (h/2) w^kappa` with `kappa = 2/gamma`,
/// which removes the `(t_k - s)^{gamma-1}` singularity of the right derivative
/// at each jump.
pub fn ibp_nodes(spec: &FracSpec, m: usize, quad_points: usize) -> Vec<IbpNode> {
    const LEFT_GRADING: f64 = 2.0;
    let h = 1.0 / m as f64;
    let first = (spec.a * m as f64).round() as usize;
    let last = (spec.b * m as f64).round() as usize;
    let kappa = 2.0 / spec.gamma;
    let left_count = quad_points / 2;
    let right_count = quad_points - left_count;
    let mut nodes = Vec::with_capacity((last - first) * quad_points);
    for cell in first..last {
        let t0 = cell as f64 * h;
        let q = left_count as f64;
        for p in 0..left_count {
            let v = (p as f64 + 0.5) / q;
            let offset = 0.5 * v.powf(LEFT_GRADING);
            nodes.push(IbpNode {
                s: t0 + h * offset,
                weight: 0.5 * h * LEFT_GRADING * v.powf(LEFT_GRADING - 1.0) / q,
                cell: cell + 1,
                gap: 1.0 - offset,
                left: 0.0,
            });
        }
        let q = right_count as f64;
        for p in 0..right_count {
            let w = (p as f64 + 0.5) / q;
            let gap = 0.5 * w.powf(kappa);
            nodes.push(IbpNode {
                s: t0 + h * (1.0 - gap),
                weight: 0.5 * h * kappa * w.powf(kappa - 1.0) / q,
                cell: cell + 1,
                gap,
                left: 0.0,
            });
        }
    }
    nodes
}

/// Left derivatives at the [`ibp_nodes`]; independent of the integrator, so
/// callers checking many step paths against one weight can reuse them.
pub fn left_derivative_table(
    f: &WeightPath,
    spec: &FracSpec,
    quad_points: usize,
    refinement: usize,
) -> Result<Vec<IbpNode>> {
    ibp_nodes(spec, f.grid().m(), quad_points)
        .into_iter()
        .map(|node| {
            Ok(IbpNode {
                left: frac_deriv_left(f, spec, node.s, refinement)?,
                ..node
            })
        })
        .collect()
}

fn check_ibp(f: &WeightPath, g: &StepProcess, spec: &FracSpec, quad_points: usize) -> Result<()> {
    f.same_grid(g)?;
    if spec.gamma <= 0.5 {
        return Err(LabError::domain(format!(
            "identity check needs 1/2 < gamma, got {}",
            spec.gamma
        )));
    }
    spec.check_weight(f)?;
    let grid = g.grid();
    if !grid.is_grid_point(spec.a) || !grid.is_grid_point(spec.b) {
        return Err(LabError::domain("identity check needs grid-aligned a and b"));
    }
    if quad_points == 0 {
        return Err(LabError::domain("quad_points must be positive"));
    }
    Ok(())
}

/// Right-hand side from a precomputed [`left_derivative_table`].
pub fn ibp_with_table(
    f: &WeightPath,
    g: &StepProcess,
    spec: &FracSpec,
    table: &[IbpNode],
) -> Result<IbpCheck> {
    let lhs = stieltjes_lhs(f, g, spec.a, spec.b)?;
    let top = g.grid().index_of(spec.b);
    let mut rhs = 0.0;
    for node in table {
        if node.left != 0.0 {
            rhs -= node.weight * node.left * right_step_at(g, spec.gamma, top, node.cell, node.gap);
        }
    }
    Ok(IbpCheck {
        lhs,
        rhs,
        abs_err: (lhs - rhs).abs(),
    })
}

/// Compares the exact Stieltjes sum with the quadrature of the product of
/// the two fractional derivatives.
pub fn ibp_identity_check(
    f: &WeightPath,
    g: &StepProcess,
    spec: &FracSpec,
    quad_points: usize,
) -> Result<IbpCheck> {
    check_ibp(f, g, spec, quad_points)?;
    let table = left_derivative_table(f, spec, quad_points, DEFAULT_REFINEMENT)?;
    ibp_with_table(f, g, spec, &table)
}

/// Explicit constant in `|D^gamma_{a+} f_a(s)| <= C ||f||_alpha (s-a)^{alpha-gamma}`:
/// `C = (1 + gamma / (alpha - gamma)) / Γ(1 - gamma)`.
pub fn left_derivative_constant(alpha: f64, gamma: f64) -> f64 {
    (1.0 + gamma / (alpha - gamma)) / gamma_fn(1.0 - gamma)
}
