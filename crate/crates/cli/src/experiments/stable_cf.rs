use wrs_core::generators::PreparedWeight;
use wrs_core::mc::try_replicate;
use wrs_core::paths::UniformGrid;
use wrs_core::stats::thresholds::STABLE_CF_STD_ERRS;
use wrs_core::stats::{
    functional_registry, stable_cf_from_samples, StableSample, DEFAULT_CLIP, STABLE_MIN_REPLICAS,
};

use super::{verdict, Experiment};
use crate::config::{
    check_functionals, check_generator, check_weight, need_list, need_m, need_min_replicas, ExperimentConfig,
    GeneratorSection, WeightSection,
};
use crate::error::CliError;
use crate::output::{Artifacts, Table};
use crate::row;

/// `E[e^{iuX_m(T)} h(f)]` against `E[e^{-u^2 V/2} h(f)]` for a family of bounded `h`.
pub struct StableCf;

impl Experiment for StableCf {
    fn name(&self) -> &'static str {
        "stable-cf"
    }

    fn keys(&self) -> &'static [&'static str] {
        &["m", "u", "functionals", "clip", "generator", "weight"]
    }

    fn default_replicas(&self) -> usize {
        4000
    }

    fn fill_defaults(&self, cfg: &mut ExperimentConfig) {
        cfg.m.get_or_insert(1 << 14);
        cfg.u.get_or_insert_with(|| vec![0.5, 1.0, 2.0]);
        cfg.functionals
            .get_or_insert_with(|| vec!["one".to_string(), "clipped-sup".to_string()]);
        cfg.clip.get_or_insert(DEFAULT_CLIP);
        cfg.generator
            .get_or_insert_with(|| GeneratorSection::named("rademacher"));
        cfg.weight.get_or_insert_with(|| WeightSection::fbm(0.75));
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<(), CliError> {
        need_min_replicas(cfg, STABLE_MIN_REPLICAS)?;
        need_m(cfg.m, 1)?;
        for (i, u) in need_list("u", &cfg.u)?.iter().enumerate() {
            if !u.is_finite() {
                return Err(CliError::Config(format!("u[{i}]: must be finite")));
            }
        }
        check_functionals(
            need_list("functionals", &cfg.functionals)?,
            cfg.clip.expect("filled"),
        )?;
        check_generator(cfg.generator.as_ref().expect("filled"))?;
        check_weight(cfg.weight.as_ref().expect("filled"))?;
        Ok(())
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
        let m = cfg.m.expect("filled");
        let u = cfg.u.clone().expect("filled");
        let names = cfg.functionals.clone().expect("filled");
        let clip = cfg.clip.expect("filled");
        let reg = functional_registry();
        let hs = names
            .iter()
            .map(|n| reg.build(n, &clip))
            .collect::<Result<Vec<_>, _>>()?;
        let grid = UniformGrid::unit(m)?;
        let weight = PreparedWeight::new(check_weight(cfg.weight.as_ref().expect("filled"))?, grid)?;
        let sampler = cfg
            .generator
            .as_ref()
            .expect("filled")
            .spec()
            .build()?
            .prepare(&grid)?;
        let samples = try_replicate(cfg.seed(), cfg.replicas, |seed| {
            let f = weight.sample(seed)?;
            let g = sampler.sample(seed)?;
            hs.iter()
                .map(|h| StableSample::new(&f, &g, h.as_ref()))
                .collect::<wrs_core::Result<Vec<_>>>()
        })?;

        let mut header = vec!["replica".to_string(), "x".to_string(), "v".to_string()];
        header.extend(names.iter().map(|n| format!("h_{n}")));
        let mut per = Table {
            header,
            rows: Vec::new(),
        };
        for (r, row) in samples.iter().enumerate() {
            let mut cells = row![r, row[0].x, row[0].v];
            cells.extend(row.iter().map(|s| s.h.into()));
            per.push(cells);
        }
        let mut agg = Table::new(&[
            "functional",
            "u",
            "lhs_re",
            "lhs_im",
            "rhs_re",
            "rhs_im",
            "gap",
            "std_err",
        ]);
        let mut summary = vec![format!(
            "experiment: stable-cf (m = {m}, u = {u:?}, replicas = {}, clip = {clip})",
            cfg.replicas
        )];
        let mut pass = true;
        for (idx, name) in names.iter().enumerate() {
            let column: Vec<StableSample> = samples.iter().map(|row| row[idx]).collect();
            let rep = stable_cf_from_samples(&column, &u)?;
            for (i, &ui) in u.iter().enumerate() {
                agg.push(row![
                    name.as_str(),
                    ui,
                    rep.lhs[i].re,
                    rep.lhs[i].im,
                    rep.rhs[i].re,
                    rep.rhs[i].im,
                    rep.gap[i],
                    rep.std_err[i]
                ]);
            }
            let ok = rep
                .gap
                .iter()
                .zip(&rep.std_err)
                .all(|(g, s)| *g <= STABLE_CF_STD_ERRS * s);
            pass &= ok;
            summary.push(format!(
                "h = {name}: max gap {:.6e} = {:.3} s.e. (limit {STABLE_CF_STD_ERRS} s.e.): {}",
                rep.max_abs_gap,
                rep.max_gap_in_std_errs(),
                verdict(ok)
            ));
        }
        Ok(Artifacts {
            per_replica: per,
            aggregate: agg,
            summary,
            pass,
        })
    }
}
