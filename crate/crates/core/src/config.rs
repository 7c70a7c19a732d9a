//! Index configuration: indicator set, weights, bounds, universe and years.
//!
//! Read from TOML or JSON; the format follows the file extension.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::composite::IndexOptions;
use crate::ingest::{PoolFilter, DEFAULT_YEAR_MIN};
use crate::mapping::Proxy;
use crate::model::{IndicatorCatalog, IndicatorCode, IndicatorDef, ModelError, Weights, YearRange};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: unsupported config extension; use .toml or .json")]
    UnknownFormat { path: String },
    #[error("config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputeConfig {
    pub target_year: i32,
    pub indicators: Vec<IndicatorCode>,
}

fn default_year_min() -> i32 {
    DEFAULT_YEAR_MIN
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexConfig {
    /// Indicators aggregated into the composite, in reporting order.
    pub indicator_set: Vec<IndicatorCode>,
    /// Geos for which the composite is computed.
    pub index_geos: Vec<String>,
    /// Geos pooled when deriving goalposts; all panel geos when absent.
    #[serde(default)]
    pub geo_universe: Option<BTreeSet<String>>,
    /// First year pooled when deriving goalposts.
    #[serde(default = "default_year_min")]
    pub year_min: i32,
    /// Years for which the composite is computed.
    pub years: YearRange,
    /// Pool carried-forward values when deriving goalposts.
    #[serde(default)]
    pub include_imputed: bool,
    #[serde(default)]
    pub zero_floor: Option<f64>,
    /// Uniform over `indicator_set` when absent.
    #[serde(default)]
    pub weights: Option<Weights>,
    #[serde(default)]
    pub impute: Option<ImputeConfig>,
    #[serde(default, rename = "indicator")]
    pub indicators: Vec<IndicatorDef>,
    #[serde(default, rename = "proxy")]
    pub proxies: Vec<Proxy>,
}

impl IndexConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: "<toml>".into(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            path: "<json>".into(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: shown.clone(),
            source,
        })?;
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        let parsed = match ext.to_ascii_lowercase().as_str() {
            "toml" => Self::from_toml_str(&text),
            "json" => Self::from_json_str(&text),
            _ => return Err(ConfigError::UnknownFormat { path: shown }),
        };
        parsed.map_err(|e| match e {
            ConfigError::Parse { message, .. } => ConfigError::Parse {
                path: shown,
                message,
            },
            other => other,
        })
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.indicator_set.is_empty() {
            return Err(ConfigError::Invalid("indicator_set must not be empty".into()));
        }
        if self.index_geos.is_empty() {
            return Err(ConfigError::Invalid("index_geos must not be empty".into()));
        }
        let mut seen = BTreeSet::new();
        for c in &self.indicator_set {
            if !seen.insert(c) {
                return Err(ConfigError::Invalid(format!("{c} repeated in indicator_set")));
            }
        }
        let catalog = self.catalog()?;
        for c in &self.indicator_set {
            if catalog.get(c).is_none() {
                return Err(ConfigError::Invalid(format!("{c} has no [[indicator]] definition")));
            }
        }
        self.weights()?;
        if let Some(f) = self.zero_floor {
            if !(f.is_finite() && f > 0.0 && f <= 100.0) {
                return Err(ConfigError::Invalid(format!("zero_floor {f} must be in (0, 100]")));
            }
        }
        Ok(())
    }

    pub fn catalog(&self) -> Result<IndicatorCatalog, ConfigError> {
        Ok(IndicatorCatalog::new(self.indicators.iter().cloned())?)
    }

    pub fn weights(&self) -> Result<Weights, ConfigError> {
        let w = match &self.weights {
            Some(w) => w.clone(),
            None => Weights::uniform(&self.indicator_set),
        };
        w.for_set(&self.indicator_set)?;
        Ok(w)
    }

    pub fn pool_filter(&self) -> PoolFilter {
        PoolFilter {
            geo_universe: self.geo_universe.clone(),
            year_min: self.year_min,
            include_imputed: self.include_imputed,
        }
    }

    pub fn index_options(&self) -> IndexOptions {
        IndexOptions {
            zero_floor: self.zero_floor,
        }
    }
}
