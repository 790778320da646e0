//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use wrs_core::paths::StepProcess;
use wrs_core::special::gamma;

/// `(1/Γ(g)) [ h(s)/(b-s)^{1-g} + (1-g) ∫_s^b (h(s) - h(y)) / (y-s)^{2-g} dy ]`,
/// `h = g - g(b-)`, by composite Simpson on a sub-grid of about `points`
/// nodes whose breaks include every jump.
pub fn brute_right(g: &StepProcess, gam: f64, b: f64, s: f64, points: usize) -> f64 {
    let grid = g.grid();
    let gb = g.cumulative()[grid.index_of(b) - 1];
    let gs = g.eval(s).unwrap();
    let mut breaks = vec![s];
    breaks.extend((0..=grid.count()).map(|i| grid.t(i)).filter(|&t| t > s && t < b));
    breaks.push(b);
    let per = (points / (breaks.len() - 1)).max(2) & !1;
    let mut integral = 0.0;
    for w in breaks.windows(2) {
        let h = (w[1] - w[0]) / per as f64;
        // g is constant on [w0, w1), so use the value from the left of the piece
        let numer = gs - g.eval(w[0]).unwrap();
        if numer == 0.0 {
            continue;
        }
        let kernel = |y: f64| (y - s).powf(gam - 2.0);
        let mut acc = kernel(w[0]) + kernel(w[1]);
        for p in 1..per {
            acc += if p % 2 == 1 { 4.0 } else { 2.0 } * kernel(w[0] + p as f64 * h);
        }
        integral += numer * acc * h / 3.0;
    }
    ((gs - gb) / (b - s).powf(1.0 - gam) + (1.0 - gam) * integral) / gamma(gam)
}
