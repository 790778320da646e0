use proptest::prelude::*;

use wrs_core::blocks::{decompose, edge_term_bound, remainder_sup, BlockScheme};
use wrs_core::fraccalc::{
    frac_deriv_left, frac_deriv_right_step, left_derivative_constant, FracSpec, DEFAULT_REFINEMENT,
};
use wrs_core::generators::{gen_qv_step, gen_rademacher, FbmSpec};
use wrs_core::paths::{holder_norm_estimate, HolderMode, StepProcess, UniformGrid, WeightPath};
use wrs_core::pvariation::{block_weight_variation, pvar, pvar_brute};
use wrs_core::stats::mixed_normal_stat;
use wrs_core::SeedSpec;

fn path(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, len)
}

/// A random Lipschitz-ish weight path on the grid: a scaled random walk.
fn weight_on(grid: UniformGrid, steps: &[f64], alpha: f64) -> WeightPath {
    let mut v = vec![0.0];
    for i in 0..grid.count() {
        let d = steps[i % steps.len()] / grid.m() as f64;
        v.push(v[i] + d);
    }
    WeightPath::with_mode(grid, v, alpha, HolderMode::Exact).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reconstruction_is_bit_exact(incs in path(1..200)) {
        let grid = UniformGrid::unit(incs.len()).unwrap();
        let g = StepProcess::from_increments(grid, incs).unwrap();
        let c = g.cumulative();
        for k in 1..c.len() {
            prop_assert_eq!(c[k] - c[k - 1], g.increments()[k - 1]);
            prop_assert_eq!(g.eval(grid.t(k)).unwrap(), c[k]);
        }
    }

    #[test]
    fn holder_scale_equivariant(values in path(2..60), c in -5.0..5.0f64, alpha in 0.55..1.0f64) {
        let grid = UniformGrid::unit(values.len() - 1).unwrap();
        let base = holder_norm_estimate(&values, &grid, alpha).unwrap();
        let scaled: Vec<f64> = values.iter().map(|v| c * v).collect();
        let got = holder_norm_estimate(&scaled, &grid, alpha).unwrap();
        prop_assert!((got - c.abs() * base).abs() <= 1e-12 * base.max(1.0));
    }

    #[test]
    fn holder_monotone_in_alpha_by_distance(values in path(2..60), a1 in 0.1..1.0f64, a2 in 0.1..1.0f64) {
        let grid = UniformGrid::unit(values.len() - 1).unwrap();
        let (lo, hi) = if a1 < a2 { (a1, a2) } else { (a2, a1) };
        // pair distances are <= 1 on the unit grid, so d^-alpha grows with alpha
        let at_lo = holder_norm_estimate(&values, &grid, lo).unwrap();
        let at_hi = holder_norm_estimate(&values, &grid, hi).unwrap();
        prop_assert!(at_lo <= at_hi * (1.0 + 1e-12));
        // on a grid with unit spacing every distance is >= 1 and the order flips
        let wide = UniformGrid::new(1, (values.len() - 1) as f64).unwrap();
        let wide_lo = holder_norm_estimate(&values, &wide, lo).unwrap();
        let wide_hi = holder_norm_estimate(&values, &wide, hi).unwrap();
        prop_assert!(wide_hi <= wide_lo * (1.0 + 1e-12));
    }

    #[test]
    fn pvar_dp_equals_brute(values in path(1..13), p in 1.0..6.0f64) {
        let dp = pvar(&values, p).unwrap();
        let brute = pvar_brute(&values, p).unwrap();
        prop_assert!((dp - brute).abs() <= 1e-12 * brute.max(1.0));
    }

    #[test]
    fn pvar_structure(values in path(1..80), p1 in 1.0..5.0f64, p2 in 1.0..5.0f64, shift in -3.0..3.0f64) {
        let tv: f64 = values.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        prop_assert_eq!(pvar(&values, 1.0).unwrap(), tv);
        let (lo, hi) = if p1 < p2 { (p1, p2) } else { (p2, p1) };
        prop_assert!(pvar(&values, hi).unwrap() <= pvar(&values, lo).unwrap() * (1.0 + 1e-12));
        let flipped: Vec<f64> = values.iter().map(|v| -v).collect();
        let moved: Vec<f64> = values.iter().map(|v| v + shift).collect();
        let base = pvar(&values, p1).unwrap();
        prop_assert!((pvar(&flipped, p1).unwrap() - base).abs() <= 1e-12 * base.max(1.0));
        prop_assert!((pvar(&moved, p1).unwrap() - base).abs() <= 1e-9 * base.max(1.0));
    }

    #[test]
    fn decomposition_recombines(log_m in 4u32..11, n_frac in 0.0..1.0f64, seed in any::<u64>(), qv in any::<bool>(), steps in path(1..9)) {
        let m = 1usize << log_m;
        let n = 2 + ((m - 2) as f64 * n_frac) as usize;
        let grid = UniformGrid::new(m, 1.0 + (seed % 3) as f64 / 4.0).unwrap();
        let g = if qv {
            gen_qv_step(&FbmSpec::new(0.6, grid).unwrap(), SeedSpec::new(seed, 0), true).unwrap()
        } else {
            gen_rademacher(&grid, SeedSpec::new(seed, 0)).unwrap()
        };
        let f = weight_on(grid, &steps, 1.0);
        let scheme = BlockScheme::new(grid, n).unwrap();
        let d = decompose(&f, &g, &scheme).unwrap();
        prop_assert!(d.recombination_error() <= 1e-10);
        let bound = edge_term_bound(&f, &g, &scheme).unwrap();
        for (e, b) in d.edge_term.iter().zip(&bound) {
            prop_assert!(e.abs() <= b * (1.0 + 1e-9) + 1e-12);
        }
        let moved = decompose(&f.shifted(2.5), &g, &scheme).unwrap();
        prop_assert!((remainder_sup(&moved) - remainder_sup(&d)).abs() <= 1e-9 * remainder_sup(&d).max(1.0));
    }

    #[test]
    fn block_variation_bound(log_m in 4u32..10, n in 2usize..16, steps in path(1..9), alpha in 0.55..1.0f64) {
        let grid = UniformGrid::unit(1 << log_m).unwrap();
        let n = n.min(grid.m());
        let f = weight_on(grid, &steps, alpha);
        let scheme = BlockScheme::new(grid, n).unwrap();
        let bound = f.holder_norm() * (n as f64).powf(-alpha);
        for v in block_weight_variation(&f, &scheme).unwrap() {
            prop_assert!(v <= bound * (1.0 + 1e-9) + 1e-15, "{} > {}", v, bound);
        }
    }

    #[test]
    fn frac_left_bound_and_linearity(steps in path(1..9), alpha in 0.7..1.0f64, gamma in 0.5..0.68f64, j in 1usize..4, x in 0.01..0.99f64, c in -3.0..3.0f64) {
        let grid = UniformGrid::unit(64).unwrap();
        let f = weight_on(grid, &steps, alpha);
        let n = 4;
        let a = (j - 1) as f64 / n as f64;
        let s = a + x / n as f64;
        let spec = FracSpec::new(gamma, a, 1.0).unwrap();
        let d = frac_deriv_left(&f, &spec, s, DEFAULT_REFINEMENT).unwrap();
        let bound = left_derivative_constant(alpha, gamma) * f.holder_norm() * (s - a).powf(alpha - gamma);
        prop_assert!(d.abs() <= bound * (1.0 + 1e-9) + 1e-14);
        prop_assert!(bound <= left_derivative_constant(alpha, gamma) * f.holder_norm() * (n as f64).powf(gamma - alpha) + 1e-14);
        let dc = frac_deriv_left(&f.scaled(c), &spec, s, DEFAULT_REFINEMENT).unwrap();
        prop_assert!((dc - c * d).abs() <= 1e-10 * d.abs().max(1.0));
    }

    #[test]
    fn frac_right_linear(seed in any::<u64>(), c in -3.0..3.0f64, gamma in 0.5..0.95f64, x in 0.01..0.99f64) {
        let grid = UniformGrid::unit(16).unwrap();
        let g1 = gen_rademacher(&grid, SeedSpec::new(seed, 1)).unwrap();
        let g2 = gen_rademacher(&grid, SeedSpec::new(seed, 2)).unwrap();
        let combo: Vec<f64> = g1.increments().iter().zip(g2.increments()).map(|(a, b)| a + c * b).collect();
        let g3 = StepProcess::from_increments(grid, combo).unwrap();
        let spec = FracSpec::new(gamma, 0.0, 1.0).unwrap();
        let s = (7.0 + x) / 16.0;
        let lhs = frac_deriv_right_step(&g3, &spec, s).unwrap();
        let rhs = frac_deriv_right_step(&g1, &spec, s).unwrap() + c * frac_deriv_right_step(&g2, &spec, s).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn mixed_normal_scale_invariant(seed in any::<u64>(), c in 0.01..100.0f64, steps in path(1..9)) {
        let grid = UniformGrid::unit(128).unwrap();
        let g = gen_rademacher(&grid, SeedSpec::new(seed, 0)).unwrap();
        let f = weight_on(grid, &steps, 1.0).shifted(1.0);
        let (a, b) = (mixed_normal_stat(&f, &g), mixed_normal_stat(&f.scaled(c), &g));
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn seeding_is_deterministic(seed in any::<u64>(), replica in 0u64..1000) {
        let grid = UniformGrid::unit(64).unwrap();
        let a = gen_rademacher(&grid, SeedSpec::new(seed, replica)).unwrap();
        let b = gen_rademacher(&grid, SeedSpec::new(seed, replica)).unwrap();
        prop_assert_eq!(a, b);
        let spec = FbmSpec::new(0.6, grid).unwrap();
        let q1 = gen_qv_step(&spec, SeedSpec::new(seed, replica), true).unwrap();
        let q2 = gen_qv_step(&spec, SeedSpec::new(seed, replica), true).unwrap();
        prop_assert_eq!(q1, q2);
    }
}

#[test]
fn replicate_independent_of_thread_count() {
    use wrs_core::mc::replicate;
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let grid = UniformGrid::unit(32).unwrap();
                replicate(99, 64, |seed| {
                    gen_rademacher(&grid, seed).unwrap().cumulative()[32]
                })
            })
    };
    assert_eq!(run(1), run(3));
}
