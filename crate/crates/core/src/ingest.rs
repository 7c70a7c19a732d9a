//! Tidy panel I/O, last-value imputation and distribution pooling.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::Serialize;
use thiserror::Error;

use crate::goalposts::{quartiles, GoalpostError};
use crate::model::{
    DistributionStats, IndicatorCode, ModelError, Observation, Panel, Warning, YearRange,
};

/// First year considered when pooling distributions for goalposts.
pub const DEFAULT_YEAR_MIN: i32 = 2000;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("line {line}: duplicate key ({indicator}, {geo}, {year})")]
    DuplicateKey {
        line: u64,
        indicator: String,
        geo: String,
        year: i32,
    },
    #[error("line {line}: value {text:?} is not finite")]
    NonFiniteValue { line: u64, text: String },
    #[error("header lacks column {0:?}")]
    MissingColumn(String),
    #[error("no observations of {indicator} match the pooling filter")]
    EmptyPool { indicator: IndicatorCode },
    #[error("target year {year} outside the panel's declared years")]
    YearOutOfRange { year: i32 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Column names and delimiter of a tidy panel file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSchema {
    pub indicator: String,
    pub geo: String,
    pub year: String,
    pub value: String,
    /// Optional boolean column; absent means every row is measured.
    pub imputed: String,
    pub delimiter: u8,
}

impl Default for ColumnSchema {
    fn default() -> Self {
        Self {
            indicator: "indicator".into(),
            geo: "geo".into(),
            year: "year".into(),
            value: "value".into(),
            imputed: "imputed".into(),
            delimiter: b',',
        }
    }
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell.eq_ignore_ascii_case("NA")
}

fn parse_bool(cell: &str) -> Option<bool> {
    match cell.to_ascii_lowercase().as_str() {
        "" | "false" | "0" | "no" => Some(false),
        "true" | "1" | "yes" => Some(true),
        _ => None,
    }
}

/// Parses a delimiter-separated panel with a header row.
///
/// Blank or `NA` value cells are skipped but still declare their geo and year
/// as part of the panel universe.
pub fn parse_panel<R: Read>(source: R, schema: &ColumnSchema) -> Result<Panel, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| -> Result<usize, IngestError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    };
    let (ci, cg, cy, cv) = (
        col(&schema.indicator)?,
        col(&schema.geo)?,
        col(&schema.year)?,
        col(&schema.value)?,
    );
    let cimp = headers.iter().position(|h| h == schema.imputed);

    let mut observations = Vec::new();
    let mut seen: BTreeMap<(IndicatorCode, String, i32), u64> = BTreeMap::new();
    let mut geos = BTreeSet::new();
    let mut years: Option<YearRange> = None;

    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            IngestError::MalformedRow {
                line,
                reason: e.to_string(),
            }
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let malformed = |reason: String| IngestError::MalformedRow { line, reason };
        let field = |i: usize| rec.get(i).unwrap_or("");

        let indicator = IndicatorCode::new(field(ci)).map_err(|e| malformed(e.to_string()))?;
        let geo = field(cg).to_string();
        if geo.is_empty() {
            return Err(malformed("empty geo".into()));
        }
        let year: i32 = field(cy)
            .parse()
            .map_err(|_| malformed(format!("year {:?} is not an integer", field(cy))))?;
        let imputed = match cimp {
            Some(i) => parse_bool(field(i))
                .ok_or_else(|| malformed(format!("imputed flag {:?} is not boolean", field(i))))?,
            None => false,
        };

        geos.insert(geo.clone());
        years = Some(match years {
            Some(r) => YearRange::new(r.first.min(year), r.last.max(year))?,
            None => YearRange::new(year, year)?,
        });

        let raw = field(cv);
        if is_missing(raw) {
            continue;
        }
        let value: f64 = raw
            .parse()
            .map_err(|_| malformed(format!("value {raw:?} is not a number")))?;
        if !value.is_finite() {
            return Err(IngestError::NonFiniteValue {
                line,
                text: raw.to_string(),
            });
        }
        let key = (indicator.clone(), geo.clone(), year);
        if seen.insert(key, line).is_some() {
            return Err(IngestError::DuplicateKey {
                line,
                indicator: indicator.to_string(),
                geo,
                year,
            });
        }
        observations.push(Observation::new(indicator, geo, year, value, imputed)?);
    }
    Ok(Panel::new(observations, geos, years)?)
}

/// Writes a panel as `indicator,geo,year,value,imputed` in canonical order.
///
/// Geos and boundary years of the declared universe that carry no observation
/// are written as blank-value rows so the universe survives a round trip.
/// A panel without any observation has no indicator to hang those rows on and
/// writes the header alone.
pub fn write_panel<W: Write>(panel: &Panel, sink: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["indicator", "geo", "year", "value", "imputed"])?;
    for o in panel.iter() {
        w.write_record([
            o.indicator.as_str(),
            &o.geo,
            &o.year.to_string(),
            &o.value.to_string(),
            if o.imputed { "true" } else { "false" },
        ])?;
    }
    if let (Some(years), Some(first_code)) = (panel.years(), panel.indicators().into_iter().next()) {
        let placeholder = first_code.to_string();
        let used_geos: BTreeSet<&str> = panel.iter().map(|o| o.geo.as_str()).collect();
        let used_years: BTreeSet<i32> = panel.iter().map(|o| o.year).collect();
        for geo in panel.geos() {
            if !used_geos.contains(geo.as_str()) {
                w.write_record([placeholder.as_str(), geo, &years.first.to_string(), "", "false"])?;
            }
        }
        let any_geo = panel.geos().iter().next().cloned().unwrap_or_default();
        for y in [years.first, years.last] {
            if !used_years.contains(&y) {
                w.write_record([placeholder.as_str(), &any_geo, &y.to_string(), "", "false"])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct PanelJson<'a> {
    geos: &'a BTreeSet<String>,
    years: Option<YearRange>,
    observations: Vec<&'a Observation>,
}

/// JSON export with the same fields as the CSV form plus the universe.
pub fn write_panel_json<W: Write>(panel: &Panel, sink: W) -> Result<(), IngestError> {
    let doc = PanelJson {
        geos: panel.geos(),
        years: panel.years(),
        observations: panel.iter().collect(),
    };
    serde_json::to_writer_pretty(sink, &doc)?;
    Ok(())
}

/// Carries the latest earlier value forward to `target_year` for each listed
/// indicator and each geo of the panel universe lacking a value there.
///
/// Existing values are never touched; geos with no earlier value stay missing.
/// Returns the filled panel and one [`Warning::Imputed`] per filled cell.
pub fn impute_locf(
    panel: &Panel,
    target_year: i32,
    indicators: &[IndicatorCode],
) -> Result<(Panel, Vec<Warning>), IngestError> {
    if !panel.years().is_some_and(|r| r.contains(target_year)) {
        return Err(IngestError::YearOutOfRange { year: target_year });
    }
    let mut out = panel.clone();
    let mut warnings = Vec::new();
    for indicator in indicators {
        for geo in panel.geos() {
            if panel.get(indicator, geo, target_year).is_some() {
                continue;
            }
            let latest = panel
                .iter()
                .filter(|o| &o.indicator == indicator && &o.geo == geo && o.year < target_year)
                .max_by_key(|o| o.year);
            if let Some(src) = latest {
                out.insert(Observation::new(
                    indicator.clone(),
                    geo.clone(),
                    target_year,
                    src.value,
                    true,
                )?)?;
                warnings.push(Warning::Imputed {
                    indicator: indicator.clone(),
                    geo: geo.clone(),
                    year: target_year,
                    from_year: src.year,
                });
            }
        }
    }
    Ok((out, warnings))
}

/// Which observations enter a pooled distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolFilter {
    /// Geos to pool; `None` pools every geo of the panel.
    pub geo_universe: Option<BTreeSet<String>>,
    pub year_min: i32,
    pub include_imputed: bool,
}

impl Default for PoolFilter {
    fn default() -> Self {
        Self {
            geo_universe: None,
            year_min: DEFAULT_YEAR_MIN,
            include_imputed: false,
        }
    }
}

/// Pools every matching observation of `indicator` (one value per geo-year)
/// and summarizes it.
pub fn pool_distribution(
    panel: &Panel,
    indicator: &IndicatorCode,
    filter: &PoolFilter,
) -> Result<DistributionStats, IngestError> {
    let mut values: Vec<f64> = panel
        .iter()
        .filter(|o| &o.indicator == indicator)
        .filter(|o| o.year >= filter.year_min)
        .filter(|o| filter.include_imputed || !o.imputed)
        .filter(|o| {
            filter
                .geo_universe
                .as_ref()
                .is_none_or(|u| u.contains(&o.geo))
        })
        .map(|o| o.value)
        .collect();
    if values.is_empty() {
        return Err(IngestError::EmptyPool {
            indicator: indicator.clone(),
        });
    }
    values.sort_by(f64::total_cmp);
    let q = quartiles(&values).map_err(|e| match e {
        GoalpostError::EmptyInput => IngestError::EmptyPool {
            indicator: indicator.clone(),
        },
        other => IngestError::MalformedRow {
            line: 0,
            reason: other.to_string(),
        },
    })?;
    Ok(DistributionStats::new(
        indicator.clone(),
        values[0],
        q.q1,
        q.median,
        q.q3,
        values[values.len() - 1],
        Some(values.len()),
    )?)
}
