//! TOML experiment configuration.
//!
//! Every key is optional except `replicas`; missing keys take the
//! experiment's defaults. Unknown keys are rejected, and so are known keys
//! that the selected experiment does not use.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use wrs_core::generators::{
    generator_registry, synthesizer_registry, weight_registry, GeneratorSpec, WeightKind, WeightSpec,
};
use wrs_core::stats::functional_registry;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSection {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hurst: Option<f64>,
    #[serde(default = "yes")]
    pub normalize: bool,
    #[serde(default = "circulant")]
    pub synthesis: String,
}

fn yes() -> bool {
    true
}

fn circulant() -> String {
    "circulant".to_string()
}

impl GeneratorSection {
    pub fn named(kind: &str) -> Self {
        Self {
            kind: kind.to_string(),
            hurst: None,
            normalize: true,
            synthesis: circulant(),
        }
    }

    pub fn spec(&self) -> GeneratorSpec {
        GeneratorSpec {
            kind: self.kind.clone(),
            hurst: self.hurst,
            normalize: self.normalize,
            synthesis: self.synthesis.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSection {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hurst: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coeffs: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl WeightSection {
    pub fn named(kind: &str) -> Self {
        Self {
            kind: kind.to_string(),
            hurst: None,
            coeffs: Vec::new(),
            value: None,
        }
    }

    pub fn fbm(hurst: f64) -> Self {
        Self {
            hurst: Some(hurst),
            ..Self::named("fbm")
        }
    }

    pub fn spec(&self) -> WeightSpec {
        WeightSpec {
            kind: self.kind.clone(),
            hurst: self.hurst,
            coeffs: self.coeffs.clone(),
            value: self.value,
        }
    }
}

/// One experiment run as written in a config file. After
/// [`ExperimentConfig::resolve`] every key the experiment uses is set.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    pub replicas: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_values: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_points: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functionals: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clip: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightSection>,
}

/// Default master seed.
pub const DEFAULT_SEED: u64 = 1;

fn config_err(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{path}: {msg}"))
}

impl ExperimentConfig {
    pub fn with_replicas(replicas: usize) -> Self {
        Self {
            experiment: None,
            replicas,
            master_seed: None,
            m: None,
            m_values: None,
            n: None,
            gamma: None,
            quad_points: None,
            p: None,
            u: None,
            functionals: None,
            clip: None,
            output_dir: None,
            generator: None,
            weight: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = toml::de::Deserializer::parse(text)
            .map_err(|e| CliError::Config(format!("malformed TOML: {}", e.message())))?;
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let msg = inner.message().to_string();
            if path.is_empty() || path == "." {
                CliError::Config(msg)
            } else {
                config_err(&path, msg)
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Keys that are set, in the file's vocabulary.
    pub fn set_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        macro_rules! check {
            ($($field:ident),*) => {$(
                if self.$field.is_some() {
                    keys.push(stringify!($field));
                }
            )*};
        }
        check!(
            m,
            m_values,
            n,
            gamma,
            quad_points,
            p,
            u,
            functionals,
            clip,
            generator,
            weight
        );
        keys
    }

    /// Checks the experiment name and rejects keys the experiment does not use.
    pub fn check_keys(&self, experiment: &str, used: &[&str]) -> Result<(), CliError> {
        if let Some(name) = &self.experiment {
            if name != experiment {
                return Err(config_err(
                    "experiment",
                    format!("config is for `{name}` but the subcommand runs `{experiment}`"),
                ));
            }
        }
        for key in self.set_keys() {
            if !used.contains(&key) {
                return Err(config_err(
                    key,
                    format!(
                        "not used by experiment `{experiment}` (it reads: {})",
                        used.join(", ")
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.master_seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

// Field validators shared by the experiments. Each names the offending key.

pub fn need_min_replicas(cfg: &ExperimentConfig, min: usize) -> Result<(), CliError> {
    if cfg.replicas < min {
        return Err(config_err(
            "replicas",
            format!("must be at least {min}, got {}", cfg.replicas),
        ));
    }
    Ok(())
}

pub fn need_m(m: Option<usize>, min: usize) -> Result<usize, CliError> {
    let m = m.ok_or_else(|| config_err("m", "missing"))?;
    if m < min {
        return Err(config_err("m", format!("must be at least {min}, got {m}")));
    }
    Ok(m)
}

pub fn need_list<'a, T>(key: &str, list: &'a Option<Vec<T>>) -> Result<&'a [T], CliError> {
    match list {
        Some(v) if !v.is_empty() => Ok(v),
        Some(_) => Err(config_err(key, "must not be empty")),
        None => Err(config_err(key, "missing")),
    }
}

pub fn need_increasing(key: &str, list: &[usize], min_len: usize) -> Result<(), CliError> {
    if list.len() < min_len {
        return Err(config_err(key, format!("needs at least {min_len} entries")));
    }
    if list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(config_err(key, "must be strictly increasing"));
    }
    if list.first() == Some(&0) {
        return Err(config_err(&format!("{key}[0]"), "must be positive"));
    }
    Ok(())
}

/// Validates the `[generator]` section against the registries.
pub fn check_generator(section: &GeneratorSection) -> Result<(), CliError> {
    if !generator_registry().contains(&section.kind) {
        let names: Vec<_> = generator_registry().names().collect();
        return Err(config_err(
            "generator.kind",
            format!(
                "unknown generator `{}` (available: {})",
                section.kind,
                names.join(", ")
            ),
        ));
    }
    if !synthesizer_registry().contains(&section.synthesis) {
        let names: Vec<_> = synthesizer_registry().names().collect();
        return Err(config_err(
            "generator.synthesis",
            format!(
                "unknown synthesizer `{}` (available: {})",
                section.synthesis,
                names.join(", ")
            ),
        ));
    }
    if section.kind == "qv" {
        let h = section
            .hurst
            .ok_or_else(|| config_err("generator.hurst", "required for generator `qv`"))?;
        wrs_core::generators::check_qv_hurst(h).map_err(|e| config_err("generator.hurst", e))?;
    } else if section.hurst.is_some() {
        return Err(config_err(
            "generator.hurst",
            format!("not used by generator `{}`", section.kind),
        ));
    }
    section.spec().build().map_err(|e| config_err("generator", e))?;
    Ok(())
}

/// Validates the `[weight]` section and returns the weight kind.
pub fn check_weight(section: &WeightSection) -> Result<WeightKind, CliError> {
    if !weight_registry().contains(&section.kind) {
        let names: Vec<_> = weight_registry().names().collect();
        return Err(config_err(
            "weight.kind",
            format!(
                "unknown weight `{}` (available: {})",
                section.kind,
                names.join(", ")
            ),
        ));
    }
    let field = match section.kind.as_str() {
        "fbm" => "weight.hurst",
        "polynomial" => "weight.coeffs",
        "constant" => "weight.value",
        _ => "weight",
    };
    section
        .spec()
        .build()
        .map(|k| *k)
        .map_err(|e| config_err(field, e))
}

pub fn check_functionals(names: &[String], clip: f64) -> Result<(), CliError> {
    let reg = functional_registry();
    for (i, name) in names.iter().enumerate() {
        if !reg.contains(name) {
            let all: Vec<_> = reg.names().collect();
            return Err(config_err(
                &format!("functionals[{i}]"),
                format!("unknown functional `{name}` (available: {})", all.join(", ")),
            ));
        }
    }
    if !(clip > 0.0 && clip.is_finite()) {
        return Err(config_err("clip", format!("must be positive, got {clip}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_replicas_names_field() {
        let err = ExperimentConfig::parse("m = 64\n").unwrap_err();
        assert!(err.to_string().contains("replicas"), "{err}");
    }

    #[test]
    fn unknown_nested_key_has_path() {
        let err =
            ExperimentConfig::parse("replicas = 3\n[generator]\nkind = \"qv\"\nhurts = 0.6\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("generator") && msg.contains("hurts"), "{msg}");
    }

    #[test]
    fn roundtrip() {
        let mut cfg = ExperimentConfig::with_replicas(5);
        cfg.m = Some(64);
        cfg.generator = Some(GeneratorSection {
            hurst: Some(0.6),
            ..GeneratorSection::named("qv")
        });
        cfg.weight = Some(WeightSection::fbm(0.75));
        let back = ExperimentConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn generator_checks() {
        let mut g = GeneratorSection::named("qv");
        assert!(check_generator(&g)
            .unwrap_err()
            .to_string()
            .starts_with("config error: generator.hurst"));
        g.hurst = Some(0.8);
        assert!(check_generator(&g)
            .unwrap_err()
            .to_string()
            .contains("generator.hurst"));
        g.hurst = Some(0.6);
        check_generator(&g).unwrap();
        assert!(check_generator(&GeneratorSection::named("gauss")).is_err());
        assert!(check_weight(&WeightSection::fbm(0.4))
            .unwrap_err()
            .to_string()
            .contains("weight.hurst"));
    }
}
