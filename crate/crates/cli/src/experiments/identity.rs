use wrs_core::fraccalc::{ibp_with_table, left_derivative_table, FracSpec, IbpNode, DEFAULT_REFINEMENT};
use wrs_core::generators::PreparedWeight;
use wrs_core::mc::try_replicate;
use wrs_core::paths::UniformGrid;
use wrs_core::stats::thresholds::IBP_REL;

use super::{verdict, Experiment};
use crate::config::{
    check_generator, check_weight, need_increasing, need_list, need_m, need_min_replicas, ExperimentConfig,
    GeneratorSection, WeightSection,
};
use crate::error::CliError;
use crate::output::{Artifacts, Table};
use crate::row;

/// Fractional integration by parts on `[0, 1]`: exact Stieltjes sum
/// against the quadrature of the two one-sided derivatives.
pub struct Identity;

impl Experiment for Identity {
    fn name(&self) -> &'static str {
        "identity"
    }

    fn keys(&self) -> &'static [&'static str] {
        &["m", "gamma", "quad_points", "generator", "weight"]
    }

    fn default_replicas(&self) -> usize {
        20
    }

    fn fill_defaults(&self, cfg: &mut ExperimentConfig) {
        cfg.m.get_or_insert(64);
        cfg.gamma.get_or_insert_with(|| vec![0.55, 0.6, 0.7]);
        cfg.quad_points.get_or_insert_with(|| vec![256, 512]);
        cfg.generator
            .get_or_insert_with(|| GeneratorSection::named("rademacher"));
        cfg.weight.get_or_insert_with(|| WeightSection::named("linear"));
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<(), CliError> {
        need_min_replicas(cfg, 1)?;
        need_m(cfg.m, 1)?;
        check_generator(cfg.generator.as_ref().expect("filled"))?;
        let alpha = check_weight(cfg.weight.as_ref().expect("filled"))?.alpha();
        for (i, &g) in need_list("gamma", &cfg.gamma)?.iter().enumerate() {
            if !(g > 0.5 && g < alpha) {
                return Err(CliError::Config(format!(
                    "gamma[{i}]: need 1/2 < gamma < alpha = {alpha}, got {g}"
                )));
            }
        }
        need_increasing("quad_points", need_list("quad_points", &cfg.quad_points)?, 1)?;
        Ok(())
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
        let m = cfg.m.expect("filled");
        let gammas = cfg.gamma.clone().expect("filled");
        let qs = cfg.quad_points.clone().expect("filled");
        let grid = UniformGrid::unit(m)?;
        let weight = PreparedWeight::new(check_weight(cfg.weight.as_ref().expect("filled"))?, grid)?;
        let sampler = cfg
            .generator
            .as_ref()
            .expect("filled")
            .spec()
            .build()?
            .prepare(&grid)?;
        let specs = gammas
            .iter()
            .map(|&g| FracSpec::new(g, 0.0, 1.0))
            .collect::<Result<Vec<_>, _>>()?;

        // A deterministic weight shares its left-derivative tables across replicas.
        let shared: Option<Vec<Vec<Vec<IbpNode>>>> = if weight.kind().is_random() {
            None
        } else {
            let f = weight.sample(wrs_core::SeedSpec::new(cfg.seed(), 0))?;
            Some(
                specs
                    .iter()
                    .map(|spec| {
                        qs.iter()
                            .map(|&q| left_derivative_table(&f, spec, q, DEFAULT_REFINEMENT))
                            .collect()
                    })
                    .collect::<Result<_, _>>()?,
            )
        };

        // (lhs, rhs, abs_err, rel_err) per gamma (outer) and quad_points (inner).
        let rows = try_replicate(cfg.seed(), cfg.replicas, |seed| {
            let f = weight.sample(seed)?;
            let g = sampler.sample(seed)?;
            specs
                .iter()
                .enumerate()
                .map(|(gi, spec)| {
                    qs.iter()
                        .enumerate()
                        .map(|(qi, &q)| {
                            let check = match &shared {
                                Some(t) => ibp_with_table(&f, &g, spec, &t[gi][qi])?,
                                None => ibp_with_table(
                                    &f,
                                    &g,
                                    spec,
                                    &left_derivative_table(&f, spec, q, DEFAULT_REFINEMENT)?,
                                )?,
                            };
                            Ok((check.lhs, check.rhs, check.abs_err, check.rel_err()))
                        })
                        .collect::<wrs_core::Result<Vec<_>>>()
                })
                .collect::<wrs_core::Result<Vec<_>>>()
        })?;

        let mut per = Table::new(&[
            "replica",
            "gamma",
            "quad_points",
            "lhs",
            "rhs",
            "abs_err",
            "rel_err",
        ]);
        let mut agg = Table::new(&[
            "gamma",
            "quad_points",
            "max_abs_err",
            "max_rel_err",
            "not_decreasing",
        ]);
        let top = qs.len() - 1;
        let mut worst_abs = 0.0_f64;
        let mut worst_rel = 0.0_f64;
        let mut not_decreasing_total = 0usize;
        for (gi, &gamma) in gammas.iter().enumerate() {
            for (qi, &q) in qs.iter().enumerate() {
                let mut max_abs = 0.0_f64;
                let mut max_rel = 0.0_f64;
                let mut not_decreasing = 0usize;
                for (r, rep) in rows.iter().enumerate() {
                    let (lhs, rhs, abs, rel) = rep[gi][qi];
                    per.push(row![r, gamma, q, lhs, rhs, abs, rel]);
                    max_abs = max_abs.max(abs);
                    max_rel = max_rel.max(rel);
                    if qi > 0 && rel >= rep[gi][qi - 1].3 && rel != 0.0 {
                        not_decreasing += 1;
                    }
                }
                agg.push(row![gamma, q, max_abs, max_rel, not_decreasing]);
                not_decreasing_total += not_decreasing;
                if qi == top {
                    worst_abs = worst_abs.max(max_abs);
                    worst_rel = worst_rel.max(max_rel);
                }
            }
        }
        let accurate = worst_rel <= IBP_REL;
        let decreasing = not_decreasing_total == 0;
        let pass = accurate && decreasing;
        Ok(Artifacts {
            per_replica: per,
            aggregate: agg,
            summary: vec![
                format!(
                    "experiment: identity (m = {m}, gamma = {gammas:?}, quad_points = {qs:?}, replicas = {})",
                    cfg.replicas
                ),
                format!(
                    "max abs_err {worst_abs:.6e}, max relative error {worst_rel:.6e} at {} points (threshold {IBP_REL:e}): {}",
                    qs[top],
                    verdict(accurate)
                ),
                format!(
                    "error decreasing under refinement: {not_decreasing_total} exceptions: {}",
                    verdict(decreasing)
                ),
            ],
            pass,
        })
    }
}
