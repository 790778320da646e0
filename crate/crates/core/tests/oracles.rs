//! Independent reference computations checked against the library.

use wrs_core::blocks::{ito_reference, weighted_sum, ITO_FINE_FACTOR};
use wrs_core::fraccalc::{frac_deriv_left, frac_deriv_right_step, FracSpec, DEFAULT_REFINEMENT};
use wrs_core::generators::{fgn_autocovariance, gen_fgn, gen_rademacher, sigma_H, FbmSpec, Rademacher};
use wrs_core::mc::{mean, std_error, variance};
use wrs_core::paths::{UniformGrid, WeightPath};
use wrs_core::special::gamma;
use wrs_core::stats::tightness_constant;
use wrs_core::SeedSpec;

mod common;
use common::brute_right;

/// Left Riemann-Liouville derivative of a piecewise-linear path, integrated
/// exactly piece by piece in `u = s - y`.
fn exact_left_piecewise_linear(f: &WeightPath, g: f64, a: f64, s: f64) -> f64 {
    let grid = f.grid();
    let fs = f.value_at(s);
    let mut knots = vec![a];
    knots.extend((0..=grid.count()).map(|i| grid.t(i)).filter(|&t| t > a && t < s));
    knots.push(s);
    let mut integral = 0.0;
    for w in knots.windows(2) {
        let (y0, y1) = (w[0], w[1]);
        let slope = (f.value_at(y1) - f.value_at(y0)) / (y1 - y0);
        // f(s) - f(y) = b + slope * u on this piece, u = s - y
        let b = fs - f.value_at(y0) - slope * (s - y0);
        let (u0, u1) = (s - y0, s - y1);
        let kernel = if u1 > 0.0 {
            (u1.powf(-g) - u0.powf(-g)) / g
        } else {
            0.0
        };
        integral += b * kernel + slope * (u0.powf(1.0 - g) - u1.powf(1.0 - g)) / (1.0 - g);
    }
    ((fs - f.value_at(a)) / (s - a).powf(g) + g * integral) / gamma(1.0 - g)
}

fn fbm_like(grid: UniformGrid, seed: u64) -> WeightPath {
    let f = gen_fgn(&FbmSpec::new(0.8, grid).unwrap(), SeedSpec::new(seed, 0)).unwrap();
    let mut v = vec![0.0];
    for z in f {
        v.push(v.last().unwrap() + z);
    }
    WeightPath::new(grid, v, 0.75).unwrap()
}

#[test]
fn left_derivative_matches_exact_piecewise_linear() {
    let grid = UniformGrid::new(16, 2.0).unwrap();
    for seed in 0..4 {
        let f = fbm_like(grid, seed);
        for &g in &[0.3, 0.55, 0.7] {
            let spec = FracSpec::new(g, 0.25, 1.75).unwrap();
            for &s in &[0.3, 0.5, 0.8125 + 1e-7, 1.3, 1.7] {
                let want = exact_left_piecewise_linear(&f, g, 0.25, s);
                let got = frac_deriv_left(&f, &spec, s, DEFAULT_REFINEMENT).unwrap();
                assert!(
                    (got - want).abs() <= 1e-8 * want.abs().max(1.0),
                    "seed {seed} gamma {g} s {s}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn left_derivative_converges_in_refinement() {
    let grid = UniformGrid::unit(32).unwrap();
    let f = fbm_like(grid, 9);
    let spec = FracSpec::new(0.6, 0.0, 1.0).unwrap();
    let s = 0.61;
    let want = exact_left_piecewise_linear(&f, 0.6, 0.0, s);
    let errs: Vec<f64> = [1, 2, 4, 8]
        .iter()
        .map(|&r| (frac_deriv_left(&f, &spec, s, r).unwrap() - want).abs())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] <= w[0]), "{errs:?}");
    assert!(errs[3] < 1e-9, "{errs:?}");
}

#[test]
fn right_derivative_matches_brute_force() {
    for (m, b) in [(8usize, 1.0), (16, 1.0), (12, 0.75)] {
        let grid = UniformGrid::unit(m).unwrap();
        for seed in 0..5 {
            let g = gen_rademacher(&grid, SeedSpec::new(seed, 3)).unwrap();
            for &gam in &[0.55, 0.7, 0.9] {
                let spec = FracSpec::new(gam, 0.0, b).unwrap();
                for cell in [1, m / 2, (b * m as f64) as usize - 1] {
                    let s = (cell as f64 - 0.37) / m as f64;
                    let exact = frac_deriv_right_step(&g, &spec, s).unwrap();
                    let brute = brute_right(&g, gam, b, s, 10_000);
                    let scale = exact.abs().max(1e-3);
                    assert!(
                        (exact - brute).abs() <= 1e-4 * scale,
                        "m {m} seed {seed} gamma {gam} s {s}: {exact} vs {brute}"
                    );
                }
            }
        }
    }
}

#[test]
fn rademacher_fourth_moment() {
    let m = 256;
    let est = tightness_constant(&Rademacher, m, 20_000, 17).unwrap();
    for cell in &est.cells {
        let r = (cell.k - cell.j) as f64;
        let exact = (3.0 * r * r - 2.0 * r) / (r * r);
        assert!(
            (cell.ratio - exact).abs() <= 5.0 * cell.std_err + 1e-12,
            "r = {r}: {} vs {exact} (se {})",
            cell.ratio,
            cell.std_err
        );
    }
}

#[test]
fn ito_and_weighted_sum_variance() {
    let grid = UniformGrid::unit(256).unwrap();
    let f = WeightPath::new(grid, grid.times(), 1.0).unwrap();
    let ito: Vec<f64> = (0..4000)
        .map(|r| ito_reference(&f, SeedSpec::new(5, r), ITO_FINE_FACTOR).unwrap())
        .collect();
    let sums: Vec<f64> = (0..4000)
        .map(|r| weighted_sum(&f, &gen_rademacher(&grid, SeedSpec::new(6, r)).unwrap(), 1.0).unwrap())
        .collect();
    // Var of a sample variance is about 2 sigma^4 / n for a Gaussian
    let tol = 5.0 * (2.0_f64 / 4000.0).sqrt() / 3.0;
    assert!((variance(&ito) - 1.0 / 3.0).abs() < tol, "{}", variance(&ito));
    let discrete: f64 = (1..=256).map(|i| (i as f64 / 256.0).powi(2)).sum::<f64>() / 256.0;
    assert!((variance(&sums) - discrete).abs() < tol, "{}", variance(&sums));
    assert!(mean(&ito).abs() < 5.0 * std_error(&ito));
}

#[test]
fn fgn_covariance_lags() {
    let hurst = 0.7;
    let n = 128;
    let grid = UniformGrid::new(n, 1.0).unwrap();
    let spec = FbmSpec::new(hurst, grid).unwrap();
    let samples = 3000;
    let scale = (n as f64).powf(2.0 * hurst);
    for lag in 0..=5usize {
        let naive = 0.5
            * ((lag as f64 + 1.0).powf(2.0 * hurst) - 2.0 * (lag as f64).powf(2.0 * hurst)
                + (lag as f64 - 1.0).abs().powf(2.0 * hurst));
        assert!((fgn_autocovariance(hurst, lag as u64) - naive).abs() < 1e-14);
        let per_sample: Vec<f64> = (0..samples)
            .map(|r| {
                let z = gen_fgn(&spec, SeedSpec::new(21, r)).unwrap();
                let s: f64 = (0..n - lag).map(|i| z[i] * z[i + lag]).sum();
                s * scale / (n - lag) as f64
            })
            .collect();
        let est = mean(&per_sample);
        assert!(
            (est - naive).abs() <= 5.0 * std_error(&per_sample),
            "lag {lag}: {est} vs {naive}"
        );
    }
}

#[test]
fn sigma_h_brute_series() {
    let h = 0.6;
    let rho = |r: f64| 0.5 * ((r + 1.0).powf(2.0 * h) - 2.0 * r.powf(2.0 * h) + (r - 1.0).powf(2.0 * h));
    let big_r = 200_000u64;
    let sum: f64 = (1..=big_r).rev().map(|r| rho(r as f64).powi(2)).sum();
    let c = h * (2.0 * h - 1.0);
    let tail = c * c * (big_r as f64 + 0.5).powf(4.0 * h - 3.0) / (3.0 - 4.0 * h);
    let oracle = (2.0 + 4.0 * (sum + tail)).sqrt();
    let got = sigma_H(h).unwrap();
    assert!((got - oracle).abs() < 1e-9, "{got} vs {oracle}");
    assert_eq!(sigma_H(0.5).unwrap(), std::f64::consts::SQRT_2);
}
