//! Run configuration: a single JSON document, all magnitudes in dB.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use isrgame_core::{GainDistribution, PlayerModel, SolverOptions};
use serde::{Deserialize, Serialize};

use crate::UsageError;

pub const DEFAULT_GRID: usize = 2000;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_TRIALS: usize = 100_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_POWER_SCALE_DB: f64 = 40.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum LinkSpec {
    Rayleigh {
        #[serde(default)]
        mean_db: f64,
    },
    Nakagami {
        #[serde(default)]
        mean_db: f64,
        m: f64,
    },
    Rician {
        #[serde(default)]
        mean_db: f64,
        k: f64,
    },
}

impl LinkSpec {
    fn to_model(self) -> isrgame_core::Result<GainDistribution> {
        match self {
            LinkSpec::Rayleigh { mean_db } => GainDistribution::rayleigh(db_to_linear(mean_db)),
            LinkSpec::Nakagami { mean_db, m } => {
                GainDistribution::nakagami(m, db_to_linear(mean_db))
            }
            LinkSpec::Rician { mean_db, k } => GainDistribution::rician(k, db_to_linear(mean_db)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerSpec {
    pub direct: LinkSpec,
    pub cross: LinkSpec,
    #[serde(default = "default_power_scale_db")]
    pub power_scale_db: f64,
}

fn default_power_scale_db() -> f64 {
    DEFAULT_POWER_SCALE_DB
}

impl Default for PlayerSpec {
    fn default() -> Self {
        Self {
            direct: LinkSpec::Rayleigh { mean_db: 0.0 },
            cross: LinkSpec::Rayleigh { mean_db: 0.0 },
            power_scale_db: DEFAULT_POWER_SCALE_DB,
        }
    }
}

impl PlayerSpec {
    pub fn to_model(self) -> isrgame_core::Result<PlayerModel> {
        PlayerModel::new(
            self.direct.to_model()?,
            self.cross.to_model()?,
            db_to_linear(self.power_scale_db),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub grid: usize,
    pub tol: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            grid: DEFAULT_GRID,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarloSection {
    pub trials: usize,
    pub seed: u64,
}

impl Default for MonteCarloSection {
    fn default() -> Self {
        Self {
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Each command has its own default when unset.
    pub format: Option<Format>,
    /// Standard output when unset.
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub players: [PlayerSpec; 2],
    pub solver: SolverSection,
    pub montecarlo: MonteCarloSection,
    pub output: OutputSection,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            UsageError(format!("config field '{path}': {}", e.into_inner()))
        })?;
        cfg.models()
            .map_err(|e| UsageError(format!("config players: {e}")))?;
        Ok(cfg)
    }

    pub fn models(&self) -> isrgame_core::Result<(PlayerModel, PlayerModel)> {
        Ok((self.players[0].to_model()?, self.players[1].to_model()?))
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            grid: self.solver.grid,
            tol: self.solver.tol,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = RunConfig::parse("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!((cfg.solver.grid, cfg.solver.tol), (2000, 1e-10));
        assert_eq!((cfg.montecarlo.trials, cfg.montecarlo.seed), (100_000, 42));
        let (p1, _) = cfg.models().unwrap();
        assert_eq!(p1.power_scale, 1e4);
        assert_eq!(p1.isr_bar(), 1.0);
    }

    #[test]
    fn db_fields_become_linear() {
        let cfg = RunConfig::parse(
            r#"{"players": [
                {"direct": {"model": "nakagami", "m": 0.5}, "cross": {"model": "rayleigh", "mean_db": -6}, "power_scale_db": 20},
                {"direct": {"model": "rician", "k": 3, "mean_db": 3}, "cross": {"model": "nakagami", "m": 2, "mean_db": 3}}
            ]}"#,
        )
        .unwrap();
        let (p1, p2) = cfg.models().unwrap();
        assert!((p1.isr_bar() - 10f64.powf(-0.6)).abs() < 1e-15);
        assert_eq!(p1.power_scale, 100.0);
        assert!((p2.isr_bar() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn errors_name_the_field() {
        let e = RunConfig::parse(r#"{"solver": {"grid": "many"}}"#).unwrap_err();
        assert!(e.to_string().contains("solver.grid"), "{e}");
        let e = RunConfig::parse(r#"{"players": [{"direct": {"model": "rayleigh"}, "cross": {"model": "weibull"}}, {"direct": {"model": "rayleigh"}, "cross": {"model": "rayleigh"}}]}"#).unwrap_err();
        assert!(e.to_string().contains("players[0].cross"), "{e}");
        let e = RunConfig::parse(
            r#"{"players": [{"direct": {"model": "rayleigh"}, "cross": {"model": "rayleigh"}}]}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("players"), "{e}");
        let e = RunConfig::parse(r#"{"montecarlo": {"trails": 5}}"#).unwrap_err();
        assert!(e.to_string().contains("trails"), "{e}");
        let e = RunConfig::parse(r#"{"players": [{"direct": {"model": "nakagami", "m": 0.1}, "cross": {"model": "rayleigh"}}, {"direct": {"model": "rayleigh"}, "cross": {"model": "rayleigh"}}]}"#).unwrap_err();
        assert!(e.to_string().contains("m = 0.1"), "{e}");
    }
}
