use wrs_core::stats::thresholds::{TIGHTNESS_RADEMACHER, TIGHTNESS_STABILITY};
use wrs_core::stats::{tightness_from_samples, tightness_samples, TIGHTNESS_MIN_REPLICAS};

use super::{verdict, Experiment};
use crate::config::{
    check_generator, need_increasing, need_list, need_min_replicas, ExperimentConfig, GeneratorSection,
};
use crate::error::CliError;
use crate::output::{Artifacts, Table};
use crate::row;

/// Empirical constant in `E|sum_{j<i<=k} xi|^4 <= C ((k-j)/m)^2`.
pub struct Tightness;

impl Experiment for Tightness {
    fn name(&self) -> &'static str {
        "tightness"
    }

    fn keys(&self) -> &'static [&'static str] {
        &["m_values", "generator"]
    }

    fn default_replicas(&self) -> usize {
        10_000
    }

    fn fill_defaults(&self, cfg: &mut ExperimentConfig) {
        cfg.m_values.get_or_insert_with(|| vec![1 << 10]);
        cfg.generator
            .get_or_insert_with(|| GeneratorSection::named("rademacher"));
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<(), CliError> {
        need_min_replicas(cfg, TIGHTNESS_MIN_REPLICAS)?;
        let ms = need_list("m_values", &cfg.m_values)?;
        need_increasing("m_values", ms, 1)?;
        if ms[0] < 2 {
            return Err(CliError::Config("m_values[0]: must be at least 2".to_string()));
        }
        check_generator(cfg.generator.as_ref().expect("filled"))?;
        Ok(())
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
        let section = cfg.generator.as_ref().expect("filled");
        let generator = section.spec().build()?;
        let m_values = cfg.m_values.clone().expect("filled");
        let mut per = Table::new(&["m", "replica", "j", "k", "fourth"]);
        let mut agg = Table::new(&["m", "j", "k", "ratio", "std_err"]);
        let mut constants = Vec::new();
        let mut summary = vec![format!(
            "experiment: tightness (generator = {}, m = {m_values:?}, replicas = {})",
            generator.describe(),
            cfg.replicas
        )];
        for &m in &m_values {
            let (lattice, fourth) = tightness_samples(generator.as_ref(), m, cfg.replicas, cfg.seed())?;
            for (r, row) in fourth.iter().enumerate() {
                for (&(j, k), &v) in lattice.iter().zip(row) {
                    per.push(row![m, r, j, k, v]);
                }
            }
            let est = tightness_from_samples(m, &lattice, &fourth)?;
            for c in &est.cells {
                agg.push(row![m, c.j, c.k, c.ratio, c.std_err]);
            }
            let (j, k) = est.argmax().map(|c| (c.j, c.k)).unwrap_or((0, 0));
            summary.push(format!(
                "m = {m}: C = {:.6} +- {:.6} (max at j = {j}, k = {k})",
                est.constant, est.std_err
            ));
            constants.push(est.constant);
        }
        let pass = match section.kind.as_str() {
            "rademacher" => {
                let (lo, hi) = TIGHTNESS_RADEMACHER;
                let ok = constants.iter().all(|c| *c >= lo && *c <= hi);
                summary.push(format!("every estimate in [{lo}, {hi}]: {}", verdict(ok)));
                ok
            }
            "zero" => {
                let ok = constants.iter().all(|c| *c == 0.0);
                summary.push(format!("every estimate zero: {}", verdict(ok)));
                ok
            }
            _ => {
                let finite = constants.iter().all(|c| c.is_finite());
                let hi = constants.iter().copied().fold(0.0, f64::max);
                let lo = constants.iter().copied().fold(f64::INFINITY, f64::min);
                let change = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
                let ok = finite && change <= TIGHTNESS_STABILITY;
                summary.push(format!(
                    "estimates finite and within {:.0}% across m (spread {:.2}%): {}",
                    100.0 * TIGHTNESS_STABILITY,
                    100.0 * change,
                    verdict(ok)
                ));
                ok
            }
        };
        Ok(Artifacts {
            per_replica: per,
            aggregate: agg,
            summary,
            pass,
        })
    }
}
