use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::element::check_parameters;
use crate::error::{Error, Result};
use crate::mesh::{MeshKind, DEFAULT_SEED};

/// Parameters of a convergence or patch-test run. The JSON form mirrors the CLI flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub m: usize,
    pub k: usize,
    pub mesh: MeshKind,
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub perturb: f64,
    #[serde(default = "default_solution")]
    pub solution: String,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_solution() -> String {
    "sin".into()
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        check_parameters(self.m, self.k)?;
        if self.sizes.is_empty() {
            return Err(Error::Parameter("at least one mesh size is required".into()));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter(format!(
                "mesh sizes must be strictly increasing, got {:?}",
                self.sizes
            )));
        }
        if self.sizes[0] == 0 {
            return Err(Error::Parameter("mesh size must be positive".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> RunConfig {
        RunConfig {
            m: 3,
            k: 4,
            mesh: MeshKind::Squares,
            sizes: vec![4, 8, 16],
            perturb: 0.0,
            solution: "sin3".into(),
            out: Some("out.csv".into()),
            seed: 7,
        }
    }

    #[test]
    fn json_round_trip() {
        let c = base();
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn defaults_fill_optional_fields() {
        let c = RunConfig::from_json(r#"{"m": 3, "k": 3, "mesh": "polygons-perturbed", "sizes": [2, 4]}"#).unwrap();
        assert_eq!(c.seed, DEFAULT_SEED);
        assert_eq!(c.solution, "sin");
        assert_eq!(c.out, None);
    }

    #[test]
    fn invalid_configs() {
        let mut c = base();
        c.sizes = vec![8, 4];
        assert!(c.validate().is_err());
        c = base();
        c.k = 2;
        assert!(c.validate().is_err());
        c = base();
        c.sizes.clear();
        assert!(c.validate().is_err());
        assert!(RunConfig::from_json(r#"{"m": 3, "k": 3, "mesh": "hexes", "sizes": [2]}"#).is_err());
    }
}
