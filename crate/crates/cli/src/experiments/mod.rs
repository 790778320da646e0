//! Experiments runnable from the command line, looked up by name.

mod clt;
mod identity;
mod pvar_scan;
mod rate;
mod stable_cf;
mod tightness;

use wrs_core::registry::Registry;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::Artifacts;

pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;
    /// Optional config keys this experiment reads.
    fn keys(&self) -> &'static [&'static str];
    /// Fills unset keys with the experiment's defaults.
    fn fill_defaults(&self, cfg: &mut ExperimentConfig);
    /// Re-checks module preconditions on a filled config.
    fn validate(&self, cfg: &ExperimentConfig) -> Result<(), CliError>;
    fn run(&self, cfg: &ExperimentConfig) -> Result<Artifacts, CliError>;

    /// Checks, fills and validates `cfg`.
    fn resolve(&self, mut cfg: ExperimentConfig) -> Result<ExperimentConfig, CliError> {
        cfg.check_keys(self.name(), self.keys())?;
        self.fill_defaults(&mut cfg);
        cfg.experiment = Some(self.name().to_string());
        cfg.master_seed.get_or_insert(crate::config::DEFAULT_SEED);
        self.validate(&cfg)?;
        Ok(cfg)
    }

    /// Replica count when no config file is given.
    fn default_replicas(&self) -> usize;
}

pub fn experiment_registry() -> Registry<(), dyn Experiment> {
    Registry::<(), dyn Experiment>::new("experiment")
        .with("clt", |_| Ok(Box::new(clt::Clt)))
        .with("rate", |_| Ok(Box::new(rate::Rate)))
        .with("identity", |_| Ok(Box::new(identity::Identity)))
        .with("pvar-scan", |_| Ok(Box::new(pvar_scan::PvarScanExperiment)))
        .with("tightness", |_| Ok(Box::new(tightness::Tightness)))
        .with("stable-cf", |_| Ok(Box::new(stable_cf::StableCf)))
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}
