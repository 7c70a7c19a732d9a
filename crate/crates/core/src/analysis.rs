//! Decomposition of index changes and cross-country gap diagnostics.
//!
//! Both decompositions follow from the geometric mean: the log of an index
//! ratio is the weight-share-weighted sum of the log ratios of its components.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::composite::{weighted_geometric_mean, CompositeError};
use crate::model::{IndicatorCode, Weights};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("score for {indicator} is {value}; log ratios need strictly positive scores")]
    ZeroScore { indicator: IndicatorCode, value: f64 },
    #[error("indicator {0} present in only one of the two vectors")]
    MismatchedIndicators(IndicatorCode),
    #[error("no indicators to decompose")]
    EmptyInput,
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("year {year} has {found} geos; at least 2 are needed")]
    InsufficientGeos { year: i32, found: usize },
    #[error(transparent)]
    Composite(#[from] CompositeError),
}

/// One indicator's share of an index ratio, in additive and multiplicative form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contribution {
    pub indicator: IndicatorCode,
    pub weight_share: f64,
    /// `weight_share * ln(ratio_i)`
    pub log_contribution: f64,
    /// `ratio_i ^ weight_share`
    pub factor: f64,
}

/// Contributions whose log sum is `ln(total_factor)` and whose product is
/// `total_factor`, the index ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub contributions: Vec<Contribution>,
    pub index_from: f64,
    pub index_to: f64,
    pub total_log: f64,
    pub total_factor: f64,
}

fn decompose(
    from: &BTreeMap<IndicatorCode, f64>,
    to: &BTreeMap<IndicatorCode, f64>,
    weights: &Weights,
) -> Result<Decomposition, AnalysisError> {
    if from.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    for c in from.keys().chain(to.keys()) {
        if !(from.contains_key(c) && to.contains_key(c)) {
            return Err(AnalysisError::MismatchedIndicators(c.clone()));
        }
    }
    for (c, &v) in from.iter().chain(to) {
        if !(v > 0.0 && v.is_finite()) {
            return Err(AnalysisError::ZeroScore {
                indicator: c.clone(),
                value: v,
            });
        }
    }
    let codes: Vec<IndicatorCode> = from.keys().cloned().collect();
    let ws = weights
        .for_set(&codes)
        .map_err(|e| AnalysisError::InvalidWeights(e.to_string()))?;
    let total: f64 = ws.iter().sum();

    let mut contributions = Vec::with_capacity(codes.len());
    let mut total_log = 0.0;
    for (c, &w) in codes.iter().zip(&ws) {
        let share = w / total;
        let log_contribution = share * (to[c] / from[c]).ln();
        total_log += log_contribution;
        contributions.push(Contribution {
            indicator: c.clone(),
            weight_share: share,
            log_contribution,
            factor: log_contribution.exp(),
        });
    }
    let a: Vec<f64> = from.values().copied().collect();
    let b: Vec<f64> = to.values().copied().collect();
    Ok(Decomposition {
        contributions,
        index_from: weighted_geometric_mean(&a, &ws)?,
        index_to: weighted_geometric_mean(&b, &ws)?,
        total_log,
        total_factor: total_log.exp(),
    })
}

/// Splits `I(t2) / I(t1)` for one geo into per-indicator contributions.
pub fn decompose_temporal(
    scores_t1: &BTreeMap<IndicatorCode, f64>,
    scores_t2: &BTreeMap<IndicatorCode, f64>,
    weights: &Weights,
) -> Result<Decomposition, AnalysisError> {
    decompose(scores_t1, scores_t2, weights)
}

/// Splits `I_a / I_b` into per-indicator factors `(a_i / b_i)^(w_i / sum w)`.
pub fn decompose_cross_country(
    scores_a: &BTreeMap<IndicatorCode, f64>,
    scores_b: &BTreeMap<IndicatorCode, f64>,
    weights: &Weights,
) -> Result<Decomposition, AnalysisError> {
    // Same identity with b as the base.
    decompose(scores_b, scores_a, weights)
}

/// Dispersion of the composite across geos in one year.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub year: i32,
    pub n_geos: usize,
    pub max_geo: String,
    pub max: f64,
    pub min_geo: String,
    pub min: f64,
    pub range: f64,
    /// Population standard deviation over the mean. A convergence diagnostic
    /// beyond the range statistic; zero when the mean is zero.
    pub coefficient_of_variation: f64,
}

/// Per-year range and coefficient of variation. Ties for max or min go to
/// the alphabetically first geo.
pub fn gap_metrics(
    index_by_year: &BTreeMap<i32, BTreeMap<String, f64>>,
) -> Result<Vec<GapRow>, AnalysisError> {
    let mut rows = Vec::with_capacity(index_by_year.len());
    for (&year, by_geo) in index_by_year {
        if by_geo.len() < 2 {
            return Err(AnalysisError::InsufficientGeos {
                year,
                found: by_geo.len(),
            });
        }
        let mut max = (None::<&String>, f64::NEG_INFINITY);
        let mut min = (None::<&String>, f64::INFINITY);
        for (geo, &v) in by_geo {
            if v > max.1 {
                max = (Some(geo), v);
            }
            if v < min.1 {
                min = (Some(geo), v);
            }
        }
        let n = by_geo.len() as f64;
        let mean = by_geo.values().sum::<f64>() / n;
        let var = by_geo.values().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let cv = if mean == 0.0 { 0.0 } else { var.sqrt() / mean };
        rows.push(GapRow {
            year,
            n_geos: by_geo.len(),
            max_geo: max.0.cloned().unwrap_or_default(),
            max: max.1,
            min_geo: min.0.cloned().unwrap_or_default(),
            min: min.1,
            range: max.1 - min.1,
            coefficient_of_variation: cv,
        });
    }
    Ok(rows)
}
