use wrs_core::generators::FBM_ALPHA_OFFSET;
use wrs_core::stats::thresholds::RATE_SLOPE_SLACK;
use wrs_core::stats::{rate_experiment, RateFit, RATE_SEPARATION};

use super::{verdict, Experiment};
use crate::config::{
    check_generator, check_weight, need_increasing, need_list, need_m, need_min_replicas, ExperimentConfig,
    GeneratorSection, WeightSection,
};
use crate::error::CliError;
use crate::output::{Artifacts, Table};
use crate::row;

/// Log-log slope of `E sup_t |R_{n,m}(t)|` against `n`.
pub struct Rate;

impl Experiment for Rate {
    fn name(&self) -> &'static str {
        "rate"
    }

    fn keys(&self) -> &'static [&'static str] {
        &["m", "n", "generator", "weight"]
    }

    fn default_replicas(&self) -> usize {
        500
    }

    fn fill_defaults(&self, cfg: &mut ExperimentConfig) {
        cfg.m.get_or_insert(1 << 14);
        cfg.n.get_or_insert_with(|| vec![4, 8, 16, 32, 64]);
        cfg.generator
            .get_or_insert_with(|| GeneratorSection::named("rademacher"));
        cfg.weight.get_or_insert_with(|| WeightSection::named("linear"));
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<(), CliError> {
        need_min_replicas(cfg, 1)?;
        let n = need_list("n", &cfg.n)?;
        need_increasing("n", n, 2)?;
        let max_n = *n.last().expect("nonempty");
        need_m(cfg.m, RATE_SEPARATION * max_n).map_err(|_| {
            CliError::Config(format!(
                "m: must be at least {RATE_SEPARATION} * max(n) = {} (the rate holds for m -> infinity at fixed n)",
                RATE_SEPARATION * max_n
            ))
        })?;
        check_generator(cfg.generator.as_ref().expect("filled"))?;
        check_weight(cfg.weight.as_ref().expect("filled"))?;
        Ok(())
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
        let m = cfg.m.expect("filled");
        let n_values = cfg.n.clone().expect("filled");
        let kind = check_weight(cfg.weight.as_ref().expect("filled"))?;
        let generator = cfg.generator.as_ref().expect("filled").spec().build()?;
        let exp = rate_experiment(&kind, generator.as_ref(), m, &n_values, cfg.replicas, cfg.seed())?;

        let mut per = Table::new(&["replica", "n", "holder", "sup"]);
        for (r, sups) in exp.sups.iter().enumerate() {
            for (&n, &s) in n_values.iter().zip(sups) {
                per.push(row![r, n, exp.holder[r], s]);
            }
        }
        let truncated_fit = RateFit::fit(n_values.clone(), exp.truncated_mean_sup.clone())?;
        let mut agg = Table::new(&["n", "mean_sup", "truncated_mean_sup", "truncation_k"]);
        for (i, &n) in n_values.iter().enumerate() {
            agg.push(row![
                n,
                exp.fit.mean_sup[i],
                exp.truncated_mean_sup[i],
                exp.truncation
            ]);
        }

        let alpha = kind.alpha();
        let limit = -(alpha - 0.5) + RATE_SLOPE_SLACK;
        let fit = &exp.fit;
        let mut summary = vec![
            format!(
                "experiment: rate (m = {m}, n = {n_values:?}, replicas = {}, alpha = {alpha})",
                cfg.replicas
            ),
            format!("truncation K = 2 median(G) = {:.6}", exp.truncation),
        ];
        if matches!(kind, wrs_core::generators::WeightKind::FbmSample { .. }) {
            summary.push(format!("fBm weight: alpha = H - {FBM_ALPHA_OFFSET}"));
        }
        let pass = if fit.degenerate {
            summary.push("mean sup is zero for some n: fit degenerate (no rate to check)".to_string());
            true
        } else {
            let pass = fit.slope <= limit;
            summary.push(format!(
                "slope {:.6} (intercept {:.6}, r^2 {:.6}); truncated-mean slope {:.6}",
                fit.slope, fit.intercept, fit.r_squared, truncated_fit.slope
            ));
            summary.push(format!(
                "inversions in n: {} (one allowed for MC noise)",
                fit.inversions()
            ));
            summary.push(format!(
                "slope <= -(alpha - 1/2) + {RATE_SLOPE_SLACK} = {limit:.6}: {}",
                verdict(pass)
            ));
            pass
        };
        Ok(Artifacts {
            per_replica: per,
            aggregate: agg,
            summary,
            pass,
        })
    }
}
