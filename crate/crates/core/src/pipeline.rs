//! End-to-end index computation driven by an [`IndexConfig`].

use thiserror::Error;

use crate::composite::{compute_index_series, CompositeError, IndexSeries};
use crate::config::{ConfigError, IndexConfig};
use crate::goalposts::{derive_goalposts, GoalpostError};
use crate::ingest::{impute_locf, pool_distribution, IngestError};
use crate::model::{
    DistributionStats, GoalpostSet, IndicatorCatalog, ModelError, Panel, Warning,
};
use crate::normalize::{normalize_panel, NormalizeError, NormalizedPanel};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Goalposts(#[from] GoalpostError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Composite(#[from] CompositeError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no definition for indicator {0}")]
    MissingDefinition(String),
}

/// Applies the configured carry-forward imputation, if any.
pub fn apply_imputation(
    panel: &Panel,
    config: &IndexConfig,
) -> Result<(Panel, Vec<Warning>), PipelineError> {
    match &config.impute {
        Some(imp) => Ok(impute_locf(panel, imp.target_year, &imp.indicators)?),
        None => Ok((panel.clone(), Vec::new())),
    }
}

/// Goalposts for a list of published or precomputed summaries.
pub fn goalposts_from_stats(
    stats: &[DistributionStats],
    catalog: &IndicatorCatalog,
) -> Result<GoalpostSet, PipelineError> {
    let mut set = GoalpostSet::new();
    for s in stats {
        let def = catalog
            .get(&s.indicator)
            .ok_or_else(|| PipelineError::MissingDefinition(s.indicator.to_string()))?;
        set.insert(s.indicator.clone(), derive_goalposts(s, def)?);
    }
    Ok(set)
}

/// Pools each indicator of the configured set and derives its goalposts.
pub fn goalposts_from_panel(
    panel: &Panel,
    config: &IndexConfig,
) -> Result<(Vec<DistributionStats>, GoalpostSet), PipelineError> {
    let catalog = config.catalog()?;
    let filter = config.pool_filter();
    let stats = config
        .indicator_set
        .iter()
        .map(|c| pool_distribution(panel, c, &filter))
        .collect::<Result<Vec<_>, _>>()?;
    let set = goalposts_from_stats(&stats, &catalog)?;
    Ok((stats, set))
}

/// Imputed panel, scores and composite series of one run, with every
/// warning raised along the way in stage order.
#[derive(Debug, Clone)]
pub struct IndexRun {
    pub panel: Panel,
    pub normalized: NormalizedPanel,
    pub index: IndexSeries,
    pub warnings: Vec<Warning>,
}

/// Imputes, normalizes the configured indicators and aggregates them.
pub fn run_index(
    panel: &Panel,
    goalposts: &GoalpostSet,
    config: &IndexConfig,
) -> Result<IndexRun, PipelineError> {
    let (panel, mut warnings) = apply_imputation(panel, config)?;
    let selected = Panel::new(
        panel
            .iter()
            .filter(|o| config.indicator_set.contains(&o.indicator))
            .cloned(),
        panel.geos().clone(),
        panel.years(),
    )?;
    let (normalized, w) = normalize_panel(&selected, goalposts, &config.catalog()?)?;
    warnings.extend(w);
    let index = compute_index_series(
        &normalized,
        &config.index_geos,
        config.years,
        &config.indicator_set,
        &config.weights()?,
        config.index_options(),
    )?;
    warnings.extend(index.warnings.iter().cloned());
    Ok(IndexRun {
        panel,
        normalized,
        index,
        warnings,
    })
}
