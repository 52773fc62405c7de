//! Experiment files read by `landskew pipeline`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use landskew::pipeline::AnalysisConfig;
use landskew::simgen::SimConfig;

use crate::error::{data, usage, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    /// Runs the whole experiment once per seed, each in `seed_<n>/`.
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    /// Designs whose clouds are concatenated in order.
    #[serde(default)]
    pub simulate: Vec<SimConfig>,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub pca: PcaSettings,
    /// Compare the two cloud labels of a two-design sample.
    #[serde(default)]
    pub compare: bool,
    #[serde(default = "yes")]
    pub figures: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PcaSettings {
    #[serde(rename = "B")]
    pub b: usize,
    /// Also fit the model on unaligned landscapes.
    pub baseline: bool,
}

impl Default for PcaSettings {
    fn default() -> Self {
        PcaSettings { b: 2, baseline: true }
    }
}

fn yes() -> bool {
    true
}

impl ExperimentConfig {
    pub fn parse(text: &str, path: &Path) -> CliResult<Self> {
        if text.trim().is_empty() {
            return Err(usage("config", format!("{} is empty", path.display())));
        }
        let is_json = path.extension().is_some_and(|e| e == "json");
        let cfg: ExperimentConfig = if is_json {
            serde_json::from_str(text).map_err(|e| usage("config", format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(text).map_err(|e| usage("config", format!("{}: {e}", path.display())))?
        };
        if cfg.simulate.is_empty() {
            return Err(usage("config", format!("{} names no [[simulate]] design", path.display())));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| data("config", anyhow::anyhow!("{}: {e}", path.display())))?;
        Self::parse(&text, path)
    }

    /// The single-seed experiments to run, with their output subdirectory.
    pub fn per_seed(&self) -> Vec<(Option<String>, ExperimentConfig)> {
        match &self.seeds {
            None => vec![(None, self.clone())],
            Some(seeds) => seeds
                .iter()
                .map(|&seed| {
                    let mut cfg = self.clone();
                    cfg.seeds = None;
                    for part in &mut cfg.simulate {
                        part.seed = seed;
                    }
                    cfg.analysis.subsample_seed = seed;
                    (Some(format!("seed_{seed}")), cfg)
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses() {
        let cfg = ExperimentConfig::parse("[[simulate]]\ndesign = \"circle\"\n", Path::new("x.toml")).unwrap();
        assert_eq!(cfg.simulate[0].n_clouds, 20);
        assert_eq!(cfg.pca.b, 2);
        assert!(cfg.figures);
    }

    #[test]
    fn empty_and_unknown_fields_are_usage_errors() {
        let e = ExperimentConfig::parse("  \n", Path::new("x.toml")).unwrap_err();
        assert_eq!(e.kind, crate::error::Kind::Usage);
        assert!(ExperimentConfig::parse("bogus = 1\n", Path::new("x.toml")).is_err());
        assert!(ExperimentConfig::parse("name = \"a\"\n", Path::new("x.toml")).is_err());
    }

    #[test]
    fn seeds_expand() {
        let cfg = ExperimentConfig::parse("seeds = [3, 4]\n[[simulate]]\ndesign = \"torus\"\n", Path::new("x.toml")).unwrap();
        let runs = cfg.per_seed();
        assert_eq!(runs.len(), 2);
        assert_eq!(runs[1].0.as_deref(), Some("seed_4"));
        assert_eq!(runs[1].1.simulate[0].seed, 4);
        assert_eq!(runs[1].1.analysis.subsample_seed, 4);
    }
}
