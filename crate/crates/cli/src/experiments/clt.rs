use wrs_core::blocks::weighted_sum;
use wrs_core::generators::PreparedWeight;
use wrs_core::mc::{mean, try_replicate, variance};
use wrs_core::paths::UniformGrid;
use wrs_core::stats::thresholds::{CLT_KS, KS_LEVEL};
use wrs_core::stats::{
    conditional_variance, ks_critical_value, ks_statistic, mixed_normal_stat, KsReference, KS_MIN_SAMPLES,
};

use super::{verdict, Experiment};
use crate::config::{
    check_generator, check_weight, need_m, need_min_replicas, ExperimentConfig, GeneratorSection,
    WeightSection,
};
use crate::error::CliError;
use crate::output::{Artifacts, Table};
use crate::row;

/// Mixed-normal statistic `X_m(T) / sqrt(sum f(t_i)^2 / m)` against N(0, 1).
pub struct Clt;

impl Experiment for Clt {
    fn name(&self) -> &'static str {
        "clt"
    }

    fn keys(&self) -> &'static [&'static str] {
        &["m", "generator", "weight"]
    }

    fn default_replicas(&self) -> usize {
        2000
    }

    fn fill_defaults(&self, cfg: &mut ExperimentConfig) {
        cfg.m.get_or_insert(1 << 14);
        cfg.generator
            .get_or_insert_with(|| GeneratorSection::named("rademacher"));
        cfg.weight.get_or_insert_with(|| WeightSection::named("linear"));
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<(), CliError> {
        need_min_replicas(cfg, KS_MIN_SAMPLES)?;
        need_m(cfg.m, 1)?;
        check_generator(cfg.generator.as_ref().expect("filled"))?;
        check_weight(cfg.weight.as_ref().expect("filled"))?;
        Ok(())
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
        let m = cfg.m.expect("filled");
        let grid = UniformGrid::unit(m)?;
        let weight = PreparedWeight::new(check_weight(cfg.weight.as_ref().expect("filled"))?, grid)?;
        let sampler = cfg
            .generator
            .as_ref()
            .expect("filled")
            .spec()
            .build()?
            .prepare(&grid)?;
        let rows = try_replicate(cfg.seed(), cfg.replicas, |seed| {
            let f = weight.sample(seed)?;
            let g = sampler.sample(seed)?;
            let stat = mixed_normal_stat(&f, &g)?;
            Ok((weighted_sum(&f, &g, 1.0)?, conditional_variance(&f), stat))
        })?;
        let mut per = Table::new(&["replica", "x", "v", "stat"]);
        for (r, (x, v, s)) in rows.iter().enumerate() {
            per.push(row![r, *x, *v, *s]);
        }
        let stats: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let ks = ks_statistic(&stats, KsReference::StandardNormal)?;
        let critical = ks_critical_value(stats.len(), KS_LEVEL);
        let mut agg = Table::new(&[
            "m",
            "replicas",
            "mean_stat",
            "var_stat",
            "ks",
            "ks_critical_5pct",
            "threshold",
        ]);
        agg.push(row![
            m,
            cfg.replicas,
            mean(&stats),
            variance(&stats),
            ks,
            critical,
            CLT_KS
        ]);
        let pass = ks <= CLT_KS;
        Ok(Artifacts {
            per_replica: per,
            aggregate: agg,
            summary: vec![
                format!("experiment: clt (m = {m}, replicas = {})", cfg.replicas),
                format!("mean {:.6}, variance {:.6}", mean(&stats), variance(&stats)),
                format!(
                    "KS vs N(0,1): {ks:.6} (asymptotic 5% critical value {critical:.6}, threshold {CLT_KS}): {}",
                    verdict(pass)
                ),
            ],
            pass,
        })
    }
}
