//! Service configuration. Sources are layered: command-line flags over
//! environment variables over a TOML or JSON file over built-in defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use watchat_core::misconceptions::InvalidProbability;
use watchat_core::{MisconceptionId, PriorModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Largest misconception set considered by inference.
    pub kappa: usize,
    pub max_candidates: usize,
    /// Default per-misconception prior probability.
    pub prior_q: f64,
    /// Per-misconception priors, keyed by id (`"14"`) or name.
    pub prior_overrides: BTreeMap<String, f64>,
    pub host: String,
    pub port: u16,
    /// Origins allowed by CORS. Empty allows any origin.
    pub cors_origins: Vec<String>,
    /// Default AST-size budget for diagnostic synthesis.
    pub diagnose_budget: usize,
    /// Requests with a larger budget run as background jobs.
    pub diagnose_sync_budget: usize,
    pub kappa_v: usize,
    /// When set, each session's interactions are appended to
    /// `<dir>/<session>.jsonl`.
    pub session_export_dir: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            kappa: watchat_core::DEFAULT_KAPPA,
            max_candidates: watchat_core::DEFAULT_MAX_CANDIDATES,
            prior_q: PriorModel::DEFAULT_Q,
            prior_overrides: BTreeMap::new(),
            host: "127.0.0.1".into(),
            port: 8080,
            cors_origins: Vec::new(),
            diagnose_budget: 7,
            diagnose_sync_budget: 6,
            kappa_v: watchat_core::DEFAULT_KAPPA,
            session_export_dir: None,
        }
    }
}

/// Values given on the command line; `None` leaves lower layers in force.
#[derive(Debug, Clone, Default)]
pub struct CliOverrides {
    pub kappa: Option<usize>,
    pub max_candidates: Option<usize>,
    pub prior_q: Option<f64>,
    pub host: Option<String>,
    pub port: Option<u16>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid TOML in {path}: {source}")]
    Toml { path: PathBuf, source: toml::de::Error },
    #[error("invalid JSON in {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("environment variable {var}={value:?} is not a valid value")]
    Env { var: &'static str, value: String },
    #[error("unknown misconception `{0}` in prior_overrides")]
    UnknownMisconception(String),
    #[error(transparent)]
    Probability(#[from] InvalidProbability),
    #[error("{0} must be at least 1")]
    Zero(&'static str),
}

impl Config {
    /// Reads a config file; `.json` files are JSON, anything else TOML.
    pub fn from_file(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::from_str(&text).map_err(|source| ConfigError::Json { path: path.into(), source })
        } else {
            toml::from_str(&text).map_err(|source| ConfigError::Toml { path: path.into(), source })
        }
    }

    /// Applies `WATCHAT_KAPPA` and `WATCHAT_PORT` as found by `lookup`.
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        if let Some(v) = lookup("WATCHAT_KAPPA") {
            self.kappa = v.trim().parse().map_err(|_| ConfigError::Env { var: "WATCHAT_KAPPA", value: v })?;
        }
        if let Some(v) = lookup("WATCHAT_PORT") {
            self.port = v.trim().parse().map_err(|_| ConfigError::Env { var: "WATCHAT_PORT", value: v })?;
        }
        Ok(())
    }

    pub fn apply_cli(&mut self, cli: &CliOverrides) {
        if let Some(k) = cli.kappa {
            self.kappa = k;
        }
        if let Some(k) = cli.max_candidates {
            self.max_candidates = k;
        }
        if let Some(q) = cli.prior_q {
            self.prior_q = q;
        }
        if let Some(h) = &cli.host {
            self.host.clone_from(h);
        }
        if let Some(p) = cli.port {
            self.port = p;
        }
    }

    /// Builds the layered configuration and validates it.
    pub fn resolve(
        file: Option<&Path>,
        env: impl Fn(&str) -> Option<String>,
        cli: &CliOverrides,
    ) -> Result<Config, ConfigError> {
        let mut config = match file {
            Some(path) => Config::from_file(path)?,
            None => Config::default(),
        };
        config.apply_env(env)?;
        config.apply_cli(cli);
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.kappa == 0 {
            return Err(ConfigError::Zero("kappa"));
        }
        if self.max_candidates == 0 {
            return Err(ConfigError::Zero("max_candidates"));
        }
        if self.kappa_v == 0 {
            return Err(ConfigError::Zero("kappa_v"));
        }
        self.prior().map(|_| ())
    }

    pub fn prior(&self) -> Result<PriorModel, ConfigError> {
        let mut pm = PriorModel::uniform(self.prior_q)?;
        for (key, &q) in &self.prior_overrides {
            let id = parse_misconception(key).ok_or_else(|| ConfigError::UnknownMisconception(key.clone()))?;
            pm = pm.with_override(id, q)?;
        }
        Ok(pm)
    }
}

/// Accepts a numeric id or a registry name.
pub fn parse_misconception(key: &str) -> Option<MisconceptionId> {
    let key = key.trim().trim_start_matches('#');
    match key.parse::<u8>() {
        Ok(i) => MisconceptionId::new(i),
        Err(_) => MisconceptionId::from_name(key),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_env(_: &str) -> Option<String> {
        None
    }

    #[test]
    fn defaults_validate() {
        let c = Config::resolve(None, no_env, &CliOverrides::default()).unwrap();
        assert_eq!((c.kappa, c.max_candidates, c.port), (3, 8, 8080));
    }

    #[test]
    fn layers_apply_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("watchat.toml");
        std::fs::write(&path, "kappa = 2\nport = 9000\nmax_candidates = 4\n").unwrap();

        let c = Config::resolve(Some(&path), no_env, &CliOverrides::default()).unwrap();
        assert_eq!((c.kappa, c.port, c.max_candidates), (2, 9000, 4));

        let env = |k: &str| (k == "WATCHAT_KAPPA").then(|| "1".to_string());
        let c = Config::resolve(Some(&path), env, &CliOverrides::default()).unwrap();
        assert_eq!((c.kappa, c.port), (1, 9000));

        let cli = CliOverrides { kappa: Some(3), port: Some(1234), ..Default::default() };
        let c = Config::resolve(Some(&path), env, &cli).unwrap();
        assert_eq!((c.kappa, c.port, c.max_candidates), (3, 1234, 4));
    }

    #[test]
    fn json_files_are_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("watchat.json");
        std::fs::write(&path, r#"{"prior_overrides": {"14": 0.3, "zero_indexed": 0.05}}"#).unwrap();
        let c = Config::resolve(Some(&path), no_env, &CliOverrides::default()).unwrap();
        let pm = c.prior().unwrap();
        assert_eq!(pm.q(MisconceptionId::new(14).unwrap()), 0.3);
        assert_eq!(pm.q(MisconceptionId::new(11).unwrap()), 0.05);
    }

    #[test]
    fn bad_values_are_rejected() {
        let env = |k: &str| (k == "WATCHAT_PORT").then(|| "eighty".to_string());
        assert!(matches!(
            Config::resolve(None, env, &CliOverrides::default()),
            Err(ConfigError::Env { var: "WATCHAT_PORT", .. })
        ));
        let mut c = Config::default();
        c.prior_overrides.insert("no_such_thing".into(), 0.2);
        assert!(matches!(c.validate(), Err(ConfigError::UnknownMisconception(_))));
        c.prior_overrides.clear();
        c.prior_q = 1.5;
        assert!(matches!(c.validate(), Err(ConfigError::Probability(_))));
        let cli = CliOverrides { kappa: Some(0), ..Default::default() };
        assert!(Config::resolve(None, no_env, &cli).is_err());
    }

    #[test]
    fn unknown_keys_are_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "kapa = 2\n").unwrap();
        assert!(matches!(Config::from_file(&path), Err(ConfigError::Toml { .. })));
    }
}
