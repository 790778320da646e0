//! Fast cross-checks of the core modules, run by `wrs-lab selftest`.
//!
//! Output is deterministic: no timings, fixed seeds, checks in a fixed order.

use wrs_core::blocks::{decompose, weighted_sum, BlockScheme};
use wrs_core::fraccalc::{frac_deriv_left, ibp_identity_check, FracSpec, DEFAULT_REFINEMENT};
use wrs_core::generators::{gen_rademacher, sigma_H, GeneratorSpec, Rademacher, ZeroIncrements};
use wrs_core::mc::{splitmix64, SeedSpec};
use wrs_core::paths::{UniformGrid, WeightPath};
use wrs_core::pvariation::{pvar, pvar_brute};
use wrs_core::stats::thresholds::{FRAC_ORACLE_REL, PVAR_EXACT, RECOMBINATION_REL};
use wrs_core::stats::{
    ks_statistic, stable_cf_from_samples, tightness_constant, KsReference, StableSample, Unit,
};

const SELFTEST_SEED: u64 = 0x5e1f_7e57;
const PVAR_INSTANCES: u64 = 1000;
const PVAR_MAX_POINTS: u64 = 12;

/// Faults that can be injected to exercise failure reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Perturbs one DP result in the p-variation cross-check.
    Pvar,
}

type Check = Result<String, String>;
type NamedCheck = (&'static str, fn() -> Check);

fn uniform(state: &mut u64) -> f64 {
    *state = splitmix64(*state);
    (*state >> 11) as f64 / (1u64 << 53) as f64
}

/// Path and exponent of one p-variation instance, rebuilt from its seed alone.
pub fn pvar_instance(seed: u64) -> (Vec<f64>, f64) {
    let mut state = seed;
    let n = 1 + (splitmix64(seed) % PVAR_MAX_POINTS) as usize;
    let p = 1.0 + 3.0 * uniform(&mut state);
    let values = (0..n).map(|_| 4.0 * uniform(&mut state) - 2.0).collect();
    (values, p)
}

fn pvar_dp_vs_brute(fault: Option<Fault>) -> Check {
    let faulty = SELFTEST_SEED ^ 7;
    for i in 0..PVAR_INSTANCES {
        let seed = splitmix64(SELFTEST_SEED ^ i);
        let (values, p) = pvar_instance(seed);
        let mut dp = pvar(&values, p).map_err(|e| e.to_string())?;
        if fault == Some(Fault::Pvar) && i == faulty % PVAR_INSTANCES {
            dp *= 1.0 + 1e-6;
        }
        let brute = pvar_brute(&values, p).map_err(|e| e.to_string())?;
        if (dp - brute).abs() > PVAR_EXACT * brute.max(1.0) {
            return Err(format!(
                "instance seed {seed:#018x} (N = {}, p = {p}): dp {dp:e} vs brute {brute:e}",
                values.len()
            ));
        }
    }
    Ok(format!("{PVAR_INSTANCES} instances with N <= {PVAR_MAX_POINTS}"))
}

fn pvar_trivial() -> Check {
    let tv = pvar(&[0.0, 1.0, -0.5, 2.0], 1.0).map_err(|e| e.to_string())?;
    let mono = pvar(&[0.0, 1.0, 2.0], 2.0).map_err(|e| e.to_string())?;
    let alt = pvar(&[0.0, 1.0, 0.0, 1.0], 2.0).map_err(|e| e.to_string())?;
    let konst = pvar(&[0.3; 6], 3.0).map_err(|e| e.to_string())?;
    if tv != 5.0 || mono != 2.0 || (alt - 3f64.sqrt()).abs() > 1e-15 || konst != 0.0 {
        return Err(format!(
            "tv {tv}, monotone {mono}, alternating {alt}, constant {konst}"
        ));
    }
    Ok("total variation, monotone, alternating, constant".to_string())
}

fn decomposition() -> Check {
    let mut worst = 0.0_f64;
    let qv = GeneratorSpec::qv(0.6, true).build().map_err(|e| e.to_string())?;
    for (r, (m, n)) in [(16, 2), (64, 7), (100, 100), (256, 16), (257, 3)]
        .into_iter()
        .enumerate()
    {
        let grid = UniformGrid::unit(m).map_err(|e| e.to_string())?;
        let f = WeightPath::new(grid, grid.times().iter().map(|t| t * t).collect(), 1.0)
            .map_err(|e| e.to_string())?;
        let scheme = BlockScheme::new(grid, n).map_err(|e| e.to_string())?;
        let seed = SeedSpec::new(SELFTEST_SEED, r as u64);
        let rad = gen_rademacher(&grid, seed).map_err(|e| e.to_string())?;
        let q = qv
            .prepare(&grid)
            .and_then(|s| s.sample(seed))
            .map_err(|e| e.to_string())?;
        for g in [rad, q] {
            let d = decompose(&f, &g, &scheme).map_err(|e| e.to_string())?;
            worst = worst.max(d.recombination_error());
        }
    }
    if worst > RECOMBINATION_REL {
        return Err(format!("recombination error {worst:e} > {RECOMBINATION_REL:e}"));
    }
    Ok("recombination on 10 instances".to_string())
}

fn frac_trivial() -> Check {
    let grid = UniformGrid::new(8, 2.0).map_err(|e| e.to_string())?;
    let a = 0.25;
    let f = WeightPath::new(grid, grid.times().iter().map(|t| t - a).collect(), 1.0)
        .map_err(|e| e.to_string())?;
    let spec = FracSpec::new(0.5, a, 1.5).map_err(|e| e.to_string())?;
    let power = frac_deriv_left(&f, &spec, a + 1.0, DEFAULT_REFINEMENT).map_err(|e| e.to_string())?;
    let want = 2.0 / std::f64::consts::PI.sqrt();
    if (power - want).abs() > FRAC_ORACLE_REL * want {
        return Err(format!("power rule {power} vs {want}"));
    }
    let grid = UniformGrid::unit(16).map_err(|e| e.to_string())?;
    let g = gen_rademacher(&grid, SeedSpec::new(SELFTEST_SEED, 0)).map_err(|e| e.to_string())?;
    let konst = WeightPath::constant(grid, 1.5);
    let spec = FracSpec::new(0.6, 0.0, 1.0).map_err(|e| e.to_string())?;
    let check = ibp_identity_check(&konst, &g, &spec, 32).map_err(|e| e.to_string())?;
    if check.lhs != 0.0 || check.rhs != 0.0 {
        return Err(format!("constant weight: lhs {}, rhs {}", check.lhs, check.rhs));
    }
    Ok("power rule, constant-weight identity".to_string())
}

fn weighted_sum_trivial() -> Check {
    let grid = UniformGrid::unit(64).map_err(|e| e.to_string())?;
    let g = gen_rademacher(&grid, SeedSpec::new(SELFTEST_SEED, 1)).map_err(|e| e.to_string())?;
    let one = WeightPath::constant(grid, 1.0);
    let x = weighted_sum(&one, &g, 1.0).map_err(|e| e.to_string())?;
    let want = g.cumulative()[64];
    if (x - want).abs() > 1e-14 {
        return Err(format!("f = 1 gives {x}, g(T) = {want}"));
    }
    Ok("f = 1 reduces to g(T)".to_string())
}

fn sigma_half() -> Check {
    let s = sigma_H(0.5).map_err(|e| e.to_string())?;
    if s != 2f64.sqrt() {
        return Err(format!("sigma_H(1/2) = {s:e}"));
    }
    Ok("sigma_H(1/2) = sqrt 2".to_string())
}

fn ks_trivial() -> Check {
    let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
    let same = ks_statistic(&xs, KsReference::Sample(&xs)).map_err(|e| e.to_string())?;
    let zeros = ks_statistic(&[0.0; 20], KsReference::StandardNormal).map_err(|e| e.to_string())?;
    if same != 0.0 || (zeros - 0.5).abs() > 1e-10 {
        return Err(format!("identical sets {same}, zeros {zeros}"));
    }
    Ok("identical sets, point mass at 0".to_string())
}

fn cf_at_zero() -> Check {
    let grid = UniformGrid::unit(32).map_err(|e| e.to_string())?;
    let f = WeightPath::new(grid, grid.times(), 1.0).map_err(|e| e.to_string())?;
    let samples = (0..100)
        .map(|r| {
            let g = gen_rademacher(&grid, SeedSpec::new(SELFTEST_SEED, r))?;
            StableSample::new(&f, &g, &Unit)
        })
        .collect::<wrs_core::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    let rep = stable_cf_from_samples(&samples, &[0.0]).map_err(|e| e.to_string())?;
    if rep.lhs[0] != rep.rhs[0] {
        return Err(format!("lhs {} vs rhs {}", rep.lhs[0], rep.rhs[0]));
    }
    Ok("lhs = rhs at u = 0".to_string())
}

fn tightness_trivial() -> Check {
    let zero = tightness_constant(&ZeroIncrements, 16, 1000, SELFTEST_SEED).map_err(|e| e.to_string())?;
    let rad = tightness_constant(&Rademacher, 16, 1000, SELFTEST_SEED).map_err(|e| e.to_string())?;
    let unit = rad
        .cells
        .iter()
        .filter(|c| c.k - c.j == 1)
        .all(|c| c.ratio == 1.0);
    if zero.constant != 0.0 || !unit {
        return Err(format!(
            "zero increments {}, single-step ratios exact: {unit}",
            zero.constant
        ));
    }
    Ok("zero increments, single-step Rademacher ratio 1".to_string())
}

/// Runs every check and prints one line each. Returns true when all pass.
pub fn run(fault: Option<Fault>) -> bool {
    let checks: [NamedCheck; 8] = [
        ("pvar-trivial", pvar_trivial),
        ("decomposition", decomposition),
        ("frac-trivial", frac_trivial),
        ("weighted-sum", weighted_sum_trivial),
        ("sigma-half", sigma_half),
        ("ks-trivial", ks_trivial),
        ("cf-at-zero", cf_at_zero),
        ("tightness-trivial", tightness_trivial),
    ];
    let mut ok = true;
    let mut report = |name: &str, result: Check| match result {
        Ok(detail) => println!("ok   {name}: {detail}"),
        Err(detail) => {
            ok = false;
            println!("FAIL {name}: {detail}");
        }
    };
    report("pvar-dp-vs-brute", pvar_dp_vs_brute(fault));
    for (name, check) in checks {
        report(name, check());
    }
    println!("selftest: {}", if ok { "PASS" } else { "FAIL" });
    ok
}
