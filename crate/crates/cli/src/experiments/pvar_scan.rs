use wrs_core::pvariation::pvar_distribution_scan;
use wrs_core::stats::thresholds::LEPINGLE_BOUND;
use wrs_core::stats::{ks_statistic, KsReference, KS_MIN_SAMPLES};

use super::{verdict, Experiment};
use crate::config::{
    check_generator, need_increasing, need_list, need_min_replicas, ExperimentConfig, GeneratorSection,
};
use crate::error::CliError;
use crate::output::{Artifacts, Table};
use crate::row;

/// Samples of `v_p(g_m)` on `[0, 1]` across grid densities, with the
/// Lépingle ratio `E v_p(g_m) / E sup |g_m|`.
pub struct PvarScanExperiment;

impl Experiment for PvarScanExperiment {
    fn name(&self) -> &'static str {
        "pvar-scan"
    }

    fn keys(&self) -> &'static [&'static str] {
        &["p", "m_values", "generator"]
    }

    fn default_replicas(&self) -> usize {
        200
    }

    fn fill_defaults(&self, cfg: &mut ExperimentConfig) {
        cfg.p.get_or_insert(2.5);
        cfg.m_values.get_or_insert_with(|| vec![1 << 8, 1 << 10, 1 << 12]);
        cfg.generator
            .get_or_insert_with(|| GeneratorSection::named("rademacher"));
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<(), CliError> {
        need_min_replicas(cfg, KS_MIN_SAMPLES)?;
        let p = cfg.p.expect("filled");
        if !(p > 2.0 && p.is_finite()) {
            return Err(CliError::Config(format!(
                "p: the scan needs p > 2 (the iid invariance principle and the martingale bound both assume it), got {p}"
            )));
        }
        need_increasing("m_values", need_list("m_values", &cfg.m_values)?, 1)?;
        check_generator(cfg.generator.as_ref().expect("filled"))?;
        Ok(())
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
        let p = cfg.p.expect("filled");
        let m_values = cfg.m_values.clone().expect("filled");
        let generator = cfg.generator.as_ref().expect("filled").spec().build()?;
        let scans = pvar_distribution_scan(generator.as_ref(), p, &m_values, cfg.replicas, cfg.seed())?;

        let mut per = Table::new(&["m", "replica", "pvar", "supnorm"]);
        let mut agg = Table::new(&[
            "m",
            "mean_pvar",
            "mean_supnorm",
            "lepingle_ratio",
            "ks_vs_previous_m",
        ]);
        let mut summary = vec![format!(
            "experiment: pvar-scan (p = {p}, m = {m_values:?}, replicas = {})",
            cfg.replicas
        )];
        let mut pass = true;
        for (i, scan) in scans.iter().enumerate() {
            for (r, (v, s)) in scan.pvar.iter().zip(&scan.supnorm).enumerate() {
                per.push(row![scan.m, r, *v, *s]);
            }
            let ratio = scan.lepingle_ratio();
            let ks = if i == 0 {
                f64::NAN
            } else {
                ks_statistic(&scan.pvar, KsReference::Sample(&scans[i - 1].pvar))?
            };
            agg.push(row![
                scan.m,
                wrs_core::mc::mean(&scan.pvar),
                wrs_core::mc::mean(&scan.supnorm),
                ratio,
                ks
            ]);
            let ok = ratio.is_finite() && ratio <= LEPINGLE_BOUND;
            pass &= ok;
            let mut line = format!("m = {}: Lepingle ratio {ratio:.6}", scan.m);
            if i > 0 {
                line.push_str(&format!(" (two-sample KS vs m = {}: {ks:.6})", scans[i - 1].m));
            }
            summary.push(line);
        }
        summary.push(format!(
            "all Lepingle ratios <= {LEPINGLE_BOUND}: {}",
            verdict(pass)
        ));
        Ok(Artifacts {
            per_replica: per,
            aggregate: agg,
            summary,
            pass,
        })
    }
}
