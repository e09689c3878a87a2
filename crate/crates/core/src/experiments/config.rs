//! TOML experiment configuration.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::io::read_text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    BoundValidation,
    TemperatureSweep,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    /// Per-record CSV.
    pub records: Option<PathBuf>,
    /// Delta curves CSV.
    pub curves: Option<PathBuf>,
    /// Cumulative-max gap and delta against BC error.
    pub envelope: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// May be left out when the caller picks the kind.
    pub kind: Option<ExperimentKind>,
    /// Fixture name or path to a game file.
    pub game: String,
    pub gamma: Option<f64>,
    pub tau: Option<f64>,
    #[serde(default)]
    pub taus: Vec<f64>,
    /// `"fixture"`, `"regularized"` or a policy file path.
    pub expert: Option<String>,
    /// Fixture parameters.
    pub epsilon: Option<f64>,
    pub chain_pairs: Option<usize>,
    pub br_rule: Option<String>,
    #[serde(default = "default_perturbation")]
    pub perturbation: String,
    #[serde(default)]
    pub episodes: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub noise: NoiseGrid,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default)]
    pub output: OutputPaths,
}

fn default_perturbation() -> String {
    "dirichlet-mix".into()
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_grid_points() -> usize {
    101
}

impl ExperimentConfig {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: source.into(),
            message: e.to_string(),
        })
    }

    /// Loads a config and makes its relative paths relative to the file.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::parse(&read_text(path)?, &path.display().to_string())?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.rebase(base);
        Ok(cfg)
    }

    pub fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [&mut self.output.records, &mut self.output.curves, &mut self.output.envelope]
            .into_iter()
            .flatten()
        {
            fix(p);
        }
        if looks_like_path(&self.game) {
            let mut p = PathBuf::from(&self.game);
            fix(&mut p);
            self.game = p.display().to_string();
        }
        if let Some(e) = self.expert.as_mut().filter(|e| looks_like_path(e)) {
            let mut p = PathBuf::from(&*e);
            fix(&mut p);
            *e = p.display().to_string();
        }
    }
}

pub(crate) fn looks_like_path(s: &str) -> bool {
    s.contains('/') || s.contains('\\') || s.ends_with(".json")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::parse(
            "kind = \"bound-validation\"\ngame = \"dse\"\n[noise]\nmin = 0.0\nmax = 0.4\ncount = 5\n",
            "mem",
        )
        .unwrap();
        assert_eq!(cfg.kind, Some(ExperimentKind::BoundValidation));
        assert_eq!(cfg.seeds, vec![0]);
        assert_eq!(cfg.perturbation, "dirichlet-mix");
    }

    #[test]
    fn rejects_unknown_keys_and_kinds() {
        assert!(ExperimentConfig::parse("kind = \"x\"\ngame=\"dse\"\n[noise]\nmin=0\nmax=1\ncount=1", "m").is_err());
        let bad = "kind = \"bound-validation\"\ngame = \"dse\"\nbogus = 1\n[noise]\nmin = 0.0\nmax = 0.4\ncount = 5\n";
        assert!(ExperimentConfig::parse(bad, "m").is_err());
    }

    #[test]
    fn rebases_relative_paths() {
        let mut cfg = ExperimentConfig::parse(
            "kind = \"bound-validation\"\ngame = \"g.json\"\n[noise]\nmin = 0.0\nmax = 0.4\ncount = 5\n[output]\nrecords = \"out/r.csv\"\n",
            "mem",
        )
        .unwrap();
        cfg.rebase(Path::new("/base"));
        assert_eq!(cfg.game, "/base/g.json");
        assert_eq!(cfg.output.records.unwrap(), PathBuf::from("/base/out/r.csv"));
    }
}
