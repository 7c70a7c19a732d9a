//! Weighted geometric-mean aggregation of normalized scores.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::model::{CompositeSeries, IndicatorCode, ModelError, Warning, Weights, YearRange};
use crate::normalize::NormalizedPanel;

#[derive(Debug, Error)]
pub enum CompositeError {
    #[error("no scores to aggregate")]
    EmptyInput,
    #[error("score {value} for {indicator} is negative")]
    NegativeScore { indicator: String, value: f64 },
    #[error("score {value} for {indicator} is not finite")]
    NonFiniteScore { indicator: String, value: f64 },
    #[error("{scores} scores but {weights} weights")]
    LengthMismatch { scores: usize, weights: usize },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("missing scores: {}", format_gaps(.0))]
    MissingCell(Vec<MissingCell>),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MissingCell {
    pub geo: String,
    pub year: i32,
    pub indicator: IndicatorCode,
}

fn format_gaps(gaps: &[MissingCell]) -> String {
    gaps.iter()
        .map(|g| format!("({}, {}, {})", g.geo, g.year, g.indicator))
        .collect::<Vec<_>>()
        .join(", ")
}

/// `(prod s_i^w_i)^(1 / sum w_i)`, computed in log space.
///
/// Components with zero weight are ignored. A zero score with positive weight
/// makes the result exactly zero.
pub fn weighted_geometric_mean(scores: &[f64], weights: &[f64]) -> Result<f64, CompositeError> {
    if scores.len() != weights.len() {
        return Err(CompositeError::LengthMismatch {
            scores: scores.len(),
            weights: weights.len(),
        });
    }
    if scores.is_empty() {
        return Err(CompositeError::EmptyInput);
    }
    let mut total_weight = 0.0;
    let mut log_sum = 0.0;
    let mut has_zero = false;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, (&s, &w)) in scores.iter().zip(weights).enumerate() {
        if !s.is_finite() {
            return Err(CompositeError::NonFiniteScore {
                indicator: format!("#{i}"),
                value: s,
            });
        }
        if s < 0.0 {
            return Err(CompositeError::NegativeScore {
                indicator: format!("#{i}"),
                value: s,
            });
        }
        if !w.is_finite() || w < 0.0 {
            return Err(CompositeError::InvalidWeights(format!("weight {w} at #{i}")));
        }
        if w == 0.0 {
            continue;
        }
        total_weight += w;
        lo = lo.min(s);
        hi = hi.max(s);
        if s == 0.0 {
            has_zero = true;
        } else {
            log_sum += w * s.ln();
        }
    }
    if total_weight <= 0.0 {
        return Err(CompositeError::InvalidWeights("weights sum to zero".into()));
    }
    if has_zero {
        return Ok(0.0);
    }
    // Rounding in exp/ln must not push the mean outside the input hull.
    Ok((log_sum / total_weight).exp().clamp(lo, hi))
}

/// Geometric mean with the indicators that forced it to zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub value: f64,
    pub zero_components: Vec<IndicatorCode>,
}

pub fn geometric_mean(
    scores: &BTreeMap<IndicatorCode, f64>,
    weights: &Weights,
) -> Result<Aggregate, CompositeError> {
    if scores.is_empty() {
        return Err(CompositeError::EmptyInput);
    }
    let codes: Vec<IndicatorCode> = scores.keys().cloned().collect();
    let ws = weights
        .for_set(&codes)
        .map_err(|e| CompositeError::InvalidWeights(e.to_string()))?;
    let vals: Vec<f64> = scores.values().copied().collect();
    for (c, &v) in scores {
        if v < 0.0 {
            return Err(CompositeError::NegativeScore {
                indicator: c.to_string(),
                value: v,
            });
        }
    }
    let value = weighted_geometric_mean(&vals, &ws)?;
    let zero_components = codes
        .into_iter()
        .zip(vals.iter().zip(&ws))
        .filter(|(_, (&s, &w))| s == 0.0 && w > 0.0)
        .map(|(c, _)| c)
        .collect();
    Ok(Aggregate {
        value,
        zero_components,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IndexOptions {
    /// Replace exact zero scores with this floor before aggregating. Off by
    /// default; for exploratory runs only.
    pub zero_floor: Option<f64>,
}

/// Composite series for each requested geo plus non-fatal warnings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexSeries {
    pub series: BTreeMap<String, CompositeSeries>,
    pub warnings: Vec<Warning>,
}

impl IndexSeries {
    pub fn value(&self, geo: &str, year: i32) -> Option<f64> {
        self.series.get(geo).and_then(|s| s.entries.get(&year).copied())
    }

    /// Index values grouped by year, then geo.
    pub fn by_year(&self) -> BTreeMap<i32, BTreeMap<String, f64>> {
        let mut out: BTreeMap<i32, BTreeMap<String, f64>> = BTreeMap::new();
        for (geo, s) in &self.series {
            for (year, v) in &s.entries {
                out.entry(*year).or_default().insert(geo.clone(), *v);
            }
        }
        out
    }
}

/// Aggregates `indicator_set` for every (geo, year). Every cell must be
/// complete; all gaps are reported together.
pub fn compute_index_series(
    np: &NormalizedPanel,
    geos: &[String],
    years: YearRange,
    indicator_set: &[IndicatorCode],
    weights: &Weights,
    options: IndexOptions,
) -> Result<IndexSeries, CompositeError> {
    if indicator_set.is_empty() {
        return Err(CompositeError::EmptyInput);
    }
    let ws = weights
        .for_set(indicator_set)
        .map_err(|e| CompositeError::InvalidWeights(e.to_string()))?;

    let mut gaps = Vec::new();
    for geo in geos {
        for year in years.years() {
            for c in indicator_set {
                if np.get(c, geo, year).is_none() {
                    gaps.push(MissingCell {
                        geo: geo.clone(),
                        year,
                        indicator: c.clone(),
                    });
                }
            }
        }
    }
    if !gaps.is_empty() {
        return Err(CompositeError::MissingCell(gaps));
    }

    let mut series = BTreeMap::new();
    let mut warnings = Vec::new();
    for geo in geos {
        let mut entries = BTreeMap::new();
        for year in years.years() {
            let mut vals = Vec::with_capacity(indicator_set.len());
            for (c, &w) in indicator_set.iter().zip(&ws) {
                let mut s = np.get(c, geo, year).map(|v| v.score).unwrap_or_default();
                if s == 0.0 && w > 0.0 {
                    match options.zero_floor {
                        Some(floor) => {
                            s = floor;
                            warnings.push(Warning::ZeroFloored {
                                indicator: c.clone(),
                                geo: geo.clone(),
                                year,
                                floor,
                            });
                        }
                        None => warnings.push(Warning::ZeroComponent {
                            indicator: c.clone(),
                            geo: Some(geo.clone()),
                            year: Some(year),
                        }),
                    }
                }
                vals.push(s);
            }
            entries.insert(year, weighted_geometric_mean(&vals, &ws)?);
        }
        series.insert(
            geo.clone(),
            CompositeSeries::new(geo.clone(), entries, indicator_set.to_vec(), weights.clone())?,
        );
    }
    Ok(IndexSeries { series, warnings })
}

/// Writes `geo,year,index` at full precision.
pub fn write_index_csv<W: Write>(index: &IndexSeries, sink: W) -> Result<(), CompositeError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["geo", "year", "index"])?;
    for (geo, s) in &index.series {
        for (year, v) in &s.entries {
            w.write_record([geo.as_str(), &year.to_string(), &v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Long-format chart table `geo,year,variable,value`: the composite under
/// `INDEX` followed by each component score.
pub fn write_plot_data<W: Write>(
    index: &IndexSeries,
    np: &NormalizedPanel,
    sink: W,
) -> Result<(), CompositeError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["geo", "year", "variable", "value"])?;
    for (geo, s) in &index.series {
        for (year, v) in &s.entries {
            w.write_record([geo.as_str(), &year.to_string(), "INDEX", &v.to_string()])?;
            for c in &s.indicator_set {
                if let Some(nv) = np.get(c, geo, *year) {
                    w.write_record([geo.as_str(), &year.to_string(), c.as_str(), &nv.score.to_string()])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}
