//! Min-max rescaling of raw values onto 0..=100 between fixed goalposts.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    GoalpostSet, Goalposts, IndicatorCatalog, IndicatorCode, ModelError, NormalizedValue, ObsKey,
    Panel, Polarity, Warning,
};

#[derive(Debug, Error)]
pub enum NormalizeError {
    #[error("input value {0} is not finite")]
    NonFiniteInput(f64),
    #[error("no goalposts for indicator {0}")]
    MissingGoalposts(IndicatorCode),
    #[error("no definition for indicator {0}")]
    MissingDefinition(IndicatorCode),
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// A score and whether the raw value had to be clamped into the goalposts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub value: f64,
    pub clamped: bool,
}

pub fn normalize_value(x: f64, gp: &Goalposts, polarity: Polarity) -> Result<Score, NormalizeError> {
    if !x.is_finite() {
        return Err(NormalizeError::NonFiniteInput(x));
    }
    let clamped = x < gp.g1 || x > gp.g2;
    let x = x.clamp(gp.g1, gp.g2);
    let raw = match polarity {
        Polarity::Positive => 100.0 * (x - gp.g1) / gp.span(),
        Polarity::Negative => 100.0 * (gp.g2 - x) / gp.span(),
    };
    Ok(Score {
        value: raw.clamp(0.0, 100.0),
        clamped,
    })
}

/// Inverse of [`normalize_value`] on the unclamped range.
pub fn denormalize(score: f64, gp: &Goalposts, polarity: Polarity) -> f64 {
    match polarity {
        Polarity::Positive => gp.g1 + score / 100.0 * gp.span(),
        Polarity::Negative => gp.g2 - score / 100.0 * gp.span(),
    }
}

/// Scores keyed by (indicator, geo, year).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NormalizedPanel {
    values: BTreeMap<ObsKey, NormalizedValue>,
}

impl NormalizedPanel {
    pub fn from_values(values: impl IntoIterator<Item = NormalizedValue>) -> Result<Self, ModelError> {
        let mut map = BTreeMap::new();
        for v in values {
            let key = (v.indicator.clone(), v.geo.clone(), v.year);
            if map.contains_key(&key) {
                return Err(ModelError::DuplicateKey {
                    indicator: key.0,
                    geo: key.1,
                    year: key.2,
                });
            }
            map.insert(key, v);
        }
        Ok(Self { values: map })
    }

    pub fn get(&self, indicator: &IndicatorCode, geo: &str, year: i32) -> Option<&NormalizedValue> {
        self.values.get(&(indicator.clone(), geo.to_string(), year))
    }

    pub fn iter(&self) -> impl Iterator<Item = &NormalizedValue> {
        self.values.values()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Scores of the given indicators for one geo-year; indicators without a
    /// score are left out.
    pub fn scores_for(
        &self,
        geo: &str,
        year: i32,
        indicators: &[IndicatorCode],
    ) -> BTreeMap<IndicatorCode, f64> {
        indicators
            .iter()
            .filter_map(|c| self.get(c, geo, year).map(|v| (c.clone(), v.score)))
            .collect()
    }
}

/// Normalizes every observation of the panel.
///
/// Returns the scores and one [`Warning::Clamped`] per value that fell
/// outside its goalposts.
pub fn normalize_panel(
    panel: &Panel,
    goalposts: &GoalpostSet,
    defs: &IndicatorCatalog,
) -> Result<(NormalizedPanel, Vec<Warning>), NormalizeError> {
    let mut values = BTreeMap::new();
    let mut warnings = Vec::new();
    for o in panel.iter() {
        let gp = goalposts
            .get(&o.indicator)
            .ok_or_else(|| NormalizeError::MissingGoalposts(o.indicator.clone()))?;
        let def = defs
            .get(&o.indicator)
            .ok_or_else(|| NormalizeError::MissingDefinition(o.indicator.clone()))?;
        let s = normalize_value(o.value, gp, def.polarity)?;
        if s.clamped {
            warnings.push(Warning::Clamped {
                indicator: o.indicator.clone(),
                geo: o.geo.clone(),
                year: o.year,
                value: o.value,
                score: s.value,
            });
        }
        let v = NormalizedValue::new(
            o.indicator.clone(),
            o.geo.clone(),
            o.year,
            s.value,
            s.clamped,
            o.imputed,
        )?;
        values.insert(o.key(), v);
    }
    Ok((NormalizedPanel { values }, warnings))
}

#[derive(Debug, Serialize, Deserialize)]
struct NormalizedRow {
    indicator: String,
    geo: String,
    year: i32,
    score: f64,
    clamped: bool,
    imputed: bool,
}

/// Writes `indicator,geo,year,score,clamped,imputed` at full precision.
pub fn write_normalized<W: Write>(np: &NormalizedPanel, sink: W) -> Result<(), NormalizeError> {
    let mut w = csv::Writer::from_writer(sink);
    for v in np.iter() {
        w.serialize(NormalizedRow {
            indicator: v.indicator.to_string(),
            geo: v.geo.clone(),
            year: v.year,
            score: v.score,
            clamped: v.clamped,
            imputed: v.imputed,
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_normalized<R: Read>(source: R) -> Result<NormalizedPanel, NormalizeError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let headers = rdr.headers()?.clone();
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let bad = |reason: String| NormalizeError::MalformedRow { line, reason };
        let row: NormalizedRow = rec.deserialize(Some(&headers)).map_err(|e| bad(e.to_string()))?;
        let code = IndicatorCode::new(row.indicator).map_err(|e| bad(e.to_string()))?;
        values.push(
            NormalizedValue::new(code, row.geo, row.year, row.score, row.clamped, row.imputed)
                .map_err(|e| bad(e.to_string()))?,
        );
    }
    Ok(NormalizedPanel::from_values(values)?)
}
