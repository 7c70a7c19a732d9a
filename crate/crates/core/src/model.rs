//! Domain types shared by every stage of the index pipeline.
//!
//! All constructors validate their invariants and reject bad input with a
//! [`ModelError`] naming the offending field. Values are immutable once built.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{type_name}.{field}: {reason}")]
    InvalidField {
        type_name: &'static str,
        field: &'static str,
        reason: String,
    },
    #[error("duplicate indicator code {0}")]
    DuplicateCode(IndicatorCode),
    #[error("duplicate observation ({indicator}, {geo}, {year})")]
    DuplicateKey {
        indicator: IndicatorCode,
        geo: String,
        year: i32,
    },
    #[error("observation ({indicator}, {geo}, {year}) outside the declared panel universe")]
    OutOfUniverse {
        indicator: IndicatorCode,
        geo: String,
        year: i32,
    },
}

fn invalid(type_name: &'static str, field: &'static str, reason: impl Into<String>) -> ModelError {
    ModelError::InvalidField {
        type_name,
        field,
        reason: reason.into(),
    }
}

fn require_finite(type_name: &'static str, field: &'static str, x: f64) -> Result<(), ModelError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(invalid(type_name, field, format!("must be finite, got {x}")))
    }
}

/// Short indicator identifier such as `C1` or `C14`.
///
/// Ordering is natural: the alphabetic prefix first, then the numeric suffix,
/// so `C2 < C10`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct IndicatorCode(String);

impl IndicatorCode {
    pub fn new(code: impl Into<String>) -> Result<Self, ModelError> {
        let code = code.into();
        let trimmed = code.trim();
        if trimmed.is_empty() {
            return Err(invalid("IndicatorCode", "code", "must not be empty"));
        }
        if trimmed.chars().any(char::is_whitespace) {
            return Err(invalid(
                "IndicatorCode",
                "code",
                format!("must not contain whitespace: {trimmed:?}"),
            ));
        }
        Ok(Self(trimmed.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn split(&self) -> (&str, Option<u64>) {
        let cut = self
            .0
            .char_indices()
            .rev()
            .take_while(|(_, c)| c.is_ascii_digit())
            .last()
            .map(|(i, _)| i);
        match cut {
            Some(i) => (&self.0[..i], self.0[i..].parse().ok()),
            None => (&self.0, None),
        }
    }
}

impl Ord for IndicatorCode {
    fn cmp(&self, other: &Self) -> Ordering {
        let (pa, na) = self.split();
        let (pb, nb) = other.split();
        pa.cmp(pb)
            .then(na.cmp(&nb))
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for IndicatorCode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndicatorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for IndicatorCode {
    type Error = ModelError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Self::new(s)
    }
}

impl TryFrom<&str> for IndicatorCode {
    type Error = ModelError;
    fn try_from(s: &str) -> Result<Self, Self::Error> {
        Self::new(s)
    }
}

impl From<IndicatorCode> for String {
    fn from(c: IndicatorCode) -> Self {
        c.0
    }
}

/// Direction of an indicator's relation to well-being.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Deserialize)]
struct IndicatorDefRaw {
    code: IndicatorCode,
    #[serde(default)]
    description: String,
    #[serde(default)]
    unit: String,
    polarity: Polarity,
    #[serde(default)]
    natural_floor: Option<f64>,
    #[serde(default)]
    natural_ceiling: Option<f64>,
}

/// Metadata for one proxy indicator: identity, unit, polarity and the
/// natural bounds that goalposts may never cross.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IndicatorDefRaw")]
pub struct IndicatorDef {
    pub code: IndicatorCode,
    pub description: String,
    pub unit: String,
    pub polarity: Polarity,
    pub natural_floor: Option<f64>,
    pub natural_ceiling: Option<f64>,
}

impl IndicatorDef {
    pub fn new(
        code: IndicatorCode,
        description: impl Into<String>,
        unit: impl Into<String>,
        polarity: Polarity,
        natural_floor: Option<f64>,
        natural_ceiling: Option<f64>,
    ) -> Result<Self, ModelError> {
        if let Some(lo) = natural_floor {
            require_finite("IndicatorDef", "natural_floor", lo)?;
        }
        if let Some(hi) = natural_ceiling {
            require_finite("IndicatorDef", "natural_ceiling", hi)?;
        }
        if let (Some(lo), Some(hi)) = (natural_floor, natural_ceiling) {
            if lo >= hi {
                return Err(invalid(
                    "IndicatorDef",
                    "natural_floor",
                    format!("floor {lo} must be below ceiling {hi}"),
                ));
            }
        }
        Ok(Self {
            code,
            description: description.into(),
            unit: unit.into(),
            polarity,
            natural_floor,
            natural_ceiling,
        })
    }
}

impl TryFrom<IndicatorDefRaw> for IndicatorDef {
    type Error = ModelError;
    fn try_from(r: IndicatorDefRaw) -> Result<Self, Self::Error> {
        Self::new(
            r.code,
            r.description,
            r.unit,
            r.polarity,
            r.natural_floor,
            r.natural_ceiling,
        )
    }
}

/// Indicator definitions keyed by code; codes are unique.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IndicatorCatalog {
    defs: BTreeMap<IndicatorCode, IndicatorDef>,
}

impl IndicatorCatalog {
    pub fn new(defs: impl IntoIterator<Item = IndicatorDef>) -> Result<Self, ModelError> {
        let mut map = BTreeMap::new();
        for def in defs {
            if map.contains_key(&def.code) {
                return Err(ModelError::DuplicateCode(def.code));
            }
            map.insert(def.code.clone(), def);
        }
        Ok(Self { defs: map })
    }

    pub fn get(&self, code: &IndicatorCode) -> Option<&IndicatorDef> {
        self.defs.get(code)
    }

    pub fn iter(&self) -> impl Iterator<Item = &IndicatorDef> {
        self.defs.values()
    }

    pub fn codes(&self) -> impl Iterator<Item = &IndicatorCode> {
        self.defs.keys()
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }
}

/// One measured (or carried-forward) value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub indicator: IndicatorCode,
    pub geo: String,
    pub year: i32,
    pub value: f64,
    pub imputed: bool,
}

impl Observation {
    pub fn new(
        indicator: IndicatorCode,
        geo: impl Into<String>,
        year: i32,
        value: f64,
        imputed: bool,
    ) -> Result<Self, ModelError> {
        require_finite("Observation", "value", value)?;
        let geo = geo.into();
        if geo.trim().is_empty() {
            return Err(invalid("Observation", "geo", "must not be empty"));
        }
        Ok(Self {
            indicator,
            geo,
            year,
            value,
            imputed,
        })
    }

    pub fn key(&self) -> ObsKey {
        (self.indicator.clone(), self.geo.clone(), self.year)
    }
}

/// `(indicator, geo, year)`; its ordering is the canonical row order.
pub type ObsKey = (IndicatorCode, String, i32);

/// Inclusive calendar-year range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearRange {
    pub first: i32,
    pub last: i32,
}

impl YearRange {
    pub fn new(first: i32, last: i32) -> Result<Self, ModelError> {
        if first > last {
            return Err(invalid(
                "YearRange",
                "first",
                format!("{first} is after {last}"),
            ));
        }
        Ok(Self { first, last })
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.first..=self.last).contains(&year)
    }

    pub fn years(&self) -> impl Iterator<Item = i32> {
        self.first..=self.last
    }

    fn widen(self, year: i32) -> Self {
        Self {
            first: self.first.min(year),
            last: self.last.max(year),
        }
    }
}

/// Tidy panel of observations with its declared geography and year universe.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Panel {
    observations: BTreeMap<ObsKey, Observation>,
    geos: BTreeSet<String>,
    years: Option<YearRange>,
}

impl Panel {
    /// Builds a panel over an explicit universe. Every observation must fall
    /// inside it and keys must be unique.
    pub fn new(
        observations: impl IntoIterator<Item = Observation>,
        geos: BTreeSet<String>,
        years: Option<YearRange>,
    ) -> Result<Self, ModelError> {
        let mut panel = Self {
            observations: BTreeMap::new(),
            geos,
            years,
        };
        for obs in observations {
            panel.insert(obs)?;
        }
        Ok(panel)
    }

    /// Builds a panel whose universe is the geos and year span of the data.
    pub fn from_observations(
        observations: impl IntoIterator<Item = Observation>,
    ) -> Result<Self, ModelError> {
        let observations: Vec<Observation> = observations.into_iter().collect();
        let mut geos = BTreeSet::new();
        let mut years: Option<YearRange> = None;
        for o in &observations {
            geos.insert(o.geo.clone());
            years = Some(match years {
                Some(r) => r.widen(o.year),
                None => YearRange {
                    first: o.year,
                    last: o.year,
                },
            });
        }
        Self::new(observations, geos, years)
    }

    pub(crate) fn insert(&mut self, obs: Observation) -> Result<(), ModelError> {
        let in_universe =
            self.geos.contains(&obs.geo) && self.years.is_some_and(|r| r.contains(obs.year));
        if !in_universe {
            return Err(ModelError::OutOfUniverse {
                indicator: obs.indicator,
                geo: obs.geo,
                year: obs.year,
            });
        }
        let key = obs.key();
        if self.observations.contains_key(&key) {
            return Err(ModelError::DuplicateKey {
                indicator: key.0,
                geo: key.1,
                year: key.2,
            });
        }
        self.observations.insert(key, obs);
        Ok(())
    }

    pub fn get(&self, indicator: &IndicatorCode, geo: &str, year: i32) -> Option<&Observation> {
        self.observations
            .get(&(indicator.clone(), geo.to_string(), year))
    }

    /// Observations in canonical order (indicator, geo, year).
    pub fn iter(&self) -> impl Iterator<Item = &Observation> {
        self.observations.values()
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn geos(&self) -> &BTreeSet<String> {
        &self.geos
    }

    pub fn years(&self) -> Option<YearRange> {
        self.years
    }

    pub fn indicators(&self) -> BTreeSet<IndicatorCode> {
        self.observations.keys().map(|k| k.0.clone()).collect()
    }
}

/// Summary statistics of a pooled distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionStats {
    pub indicator: IndicatorCode,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// Pooled observation count; unknown for published summaries.
    pub n: Option<usize>,
}

impl DistributionStats {
    pub fn new(
        indicator: IndicatorCode,
        min: f64,
        q1: f64,
        median: f64,
        q3: f64,
        max: f64,
        n: Option<usize>,
    ) -> Result<Self, ModelError> {
        const T: &str = "DistributionStats";
        for (field, v) in [
            ("min", min),
            ("q1", q1),
            ("median", median),
            ("q3", q3),
            ("max", max),
        ] {
            require_finite(T, field, v)?;
        }
        if n == Some(0) {
            return Err(invalid(T, "n", "must be at least 1"));
        }
        let order = [
            ("q1", min, q1),
            ("median", q1, median),
            ("q3", median, q3),
            ("max", q3, max),
        ];
        for (field, lo, hi) in order {
            if lo > hi {
                return Err(invalid(
                    T,
                    field,
                    format!("order statistics out of order ({lo} > {hi})"),
                ));
            }
        }
        Ok(Self {
            indicator,
            min,
            q1,
            median,
            q3,
            max,
            n,
        })
    }

    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

/// Which rule fixed a goalpost endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalpostTrace {
    ObservedExtremum,
    TukeyFence,
    NaturalBoundClip,
}

impl GoalpostTrace {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ObservedExtremum => "observed_extremum",
            Self::TukeyFence => "tukey_fence",
            Self::NaturalBoundClip => "natural_bound_clip",
        }
    }
}

impl fmt::Display for GoalpostTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for GoalpostTrace {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "observed_extremum" => Ok(Self::ObservedExtremum),
            "tukey_fence" => Ok(Self::TukeyFence),
            "natural_bound_clip" => Ok(Self::NaturalBoundClip),
            other => Err(invalid(
                "GoalpostTrace",
                "trace",
                format!("unknown trace {other:?}"),
            )),
        }
    }
}

/// Fixed normalization bounds: `g1` is the natural zero, `g2` the
/// aspirational target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Goalposts {
    pub indicator: IndicatorCode,
    pub g1: f64,
    pub g2: f64,
    pub g1_trace: GoalpostTrace,
    pub g2_trace: GoalpostTrace,
}

impl Goalposts {
    pub fn new(
        indicator: IndicatorCode,
        g1: f64,
        g2: f64,
        g1_trace: GoalpostTrace,
        g2_trace: GoalpostTrace,
    ) -> Result<Self, ModelError> {
        require_finite("Goalposts", "g1", g1)?;
        require_finite("Goalposts", "g2", g2)?;
        if g1 >= g2 {
            return Err(invalid(
                "Goalposts",
                "g1",
                format!("lower goalpost {g1} must be below upper goalpost {g2}"),
            ));
        }
        Ok(Self {
            indicator,
            g1,
            g2,
            g1_trace,
            g2_trace,
        })
    }

    pub fn span(&self) -> f64 {
        self.g2 - self.g1
    }
}

pub type GoalpostSet = BTreeMap<IndicatorCode, Goalposts>;

/// A score on the 0..=100 scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedValue {
    pub indicator: IndicatorCode,
    pub geo: String,
    pub year: i32,
    pub score: f64,
    pub clamped: bool,
    pub imputed: bool,
}

impl NormalizedValue {
    pub fn new(
        indicator: IndicatorCode,
        geo: impl Into<String>,
        year: i32,
        score: f64,
        clamped: bool,
        imputed: bool,
    ) -> Result<Self, ModelError> {
        if !(0.0..=100.0).contains(&score) {
            return Err(invalid(
                "NormalizedValue",
                "score",
                format!("{score} outside [0, 100]"),
            ));
        }
        Ok(Self {
            indicator,
            geo: geo.into(),
            year,
            score,
            clamped,
            imputed,
        })
    }
}

/// Nonnegative per-indicator aggregation weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<IndicatorCode, f64>", into = "BTreeMap<IndicatorCode, f64>")]
pub struct Weights(BTreeMap<IndicatorCode, f64>);

impl Weights {
    pub fn new(weights: BTreeMap<IndicatorCode, f64>) -> Result<Self, ModelError> {
        for w in weights.values() {
            if !w.is_finite() || *w < 0.0 {
                return Err(invalid(
                    "Weights",
                    "weights",
                    format!("weights must be finite and nonnegative, got {w}"),
                ));
            }
        }
        Ok(Self(weights))
    }

    /// Weight 1 for every code.
    pub fn uniform<'a>(codes: impl IntoIterator<Item = &'a IndicatorCode>) -> Self {
        Self(codes.into_iter().map(|c| (c.clone(), 1.0)).collect())
    }

    pub fn get(&self, code: &IndicatorCode) -> Option<f64> {
        self.0.get(code).copied()
    }

    /// Weights for `set` in order; every code must be present and the sum
    /// must be positive.
    pub fn for_set(&self, set: &[IndicatorCode]) -> Result<Vec<f64>, ModelError> {
        let ws = set
            .iter()
            .map(|c| {
                self.get(c).ok_or_else(|| {
                    invalid("Weights", "weights", format!("no weight for indicator {c}"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if ws.iter().sum::<f64>() <= 0.0 {
            return Err(invalid("Weights", "weights", "weights must sum to a positive value"));
        }
        Ok(ws)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&IndicatorCode, f64)> {
        self.0.iter().map(|(k, v)| (k, *v))
    }
}

impl TryFrom<BTreeMap<IndicatorCode, f64>> for Weights {
    type Error = ModelError;
    fn try_from(m: BTreeMap<IndicatorCode, f64>) -> Result<Self, Self::Error> {
        Self::new(m)
    }
}

impl From<Weights> for BTreeMap<IndicatorCode, f64> {
    fn from(w: Weights) -> Self {
        w.0
    }
}

/// Composite index values for one geography.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositeSeries {
    pub geo: String,
    pub entries: BTreeMap<i32, f64>,
    pub indicator_set: Vec<IndicatorCode>,
    pub weights: Weights,
}

impl CompositeSeries {
    pub fn new(
        geo: impl Into<String>,
        entries: BTreeMap<i32, f64>,
        indicator_set: Vec<IndicatorCode>,
        weights: Weights,
    ) -> Result<Self, ModelError> {
        if indicator_set.is_empty() {
            return Err(invalid("CompositeSeries", "indicator_set", "must not be empty"));
        }
        weights.for_set(&indicator_set)?;
        for (year, v) in &entries {
            if !(0.0..=100.0).contains(v) {
                return Err(invalid(
                    "CompositeSeries",
                    "entries",
                    format!("index {v} for {year} outside [0, 100]"),
                ));
            }
        }
        Ok(Self {
            geo: geo.into(),
            entries,
            indicator_set,
            weights,
        })
    }
}

/// Non-fatal conditions reported alongside results.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// A raw value fell outside the goalposts and its score was clamped.
    Clamped {
        indicator: IndicatorCode,
        geo: String,
        year: i32,
        value: f64,
        score: f64,
    },
    /// A missing value was filled with the latest earlier one.
    Imputed {
        indicator: IndicatorCode,
        geo: String,
        year: i32,
        from_year: i32,
    },
    /// A zero score forced the geometric mean to zero.
    ZeroComponent {
        indicator: IndicatorCode,
        #[serde(skip_serializing_if = "Option::is_none")]
        geo: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        year: Option<i32>,
    },
    /// A zero score was replaced by the exploratory floor.
    ZeroFloored {
        indicator: IndicatorCode,
        geo: String,
        year: i32,
        floor: f64,
    },
    /// A mapping record could not be attributed in a finance allocation.
    MissingAmount { code: String, reason: String },
}

/// Rounds to one decimal for presentation.
pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(s: &str) -> IndicatorCode {
        IndicatorCode::new(s).unwrap()
    }

    #[test]
    fn indicator_codes_sort_naturally() {
        let mut v = [code("C10"), code("C2"), code("C1"), code("C14"), code("B3")];
        v.sort();
        let s: Vec<_> = v.iter().map(|c| c.as_str()).collect();
        assert_eq!(s, ["B3", "C1", "C2", "C10", "C14"]);
    }

    #[test]
    fn empty_code_rejected() {
        assert!(IndicatorCode::new("  ").is_err());
        assert!(IndicatorCode::new("C 1").is_err());
    }

    #[test]
    fn indicator_def_bounds_must_be_ordered() {
        let err = IndicatorDef::new(code("C5"), "", "%", Polarity::Positive, Some(100.0), Some(0.0))
            .unwrap_err();
        assert!(err.to_string().contains("natural_floor"), "{err}");
    }

    #[test]
    fn catalog_rejects_duplicates() {
        let d = IndicatorDef::new(code("C1"), "", "", Polarity::Negative, Some(0.0), None).unwrap();
        let err = IndicatorCatalog::new([d.clone(), d]).unwrap_err();
        assert_eq!(err, ModelError::DuplicateCode(code("C1")));
    }

    #[test]
    fn observation_value_must_be_finite() {
        let err = Observation::new(code("C1"), "IT", 2014, f64::NAN, false).unwrap_err();
        assert!(err.to_string().contains("Observation.value"), "{err}");
    }

    #[test]
    fn panel_rejects_out_of_universe_and_duplicates() {
        let o = Observation::new(code("C1"), "IT", 2014, 1.0, false).unwrap();
        let geos: BTreeSet<String> = ["FR".to_string()].into();
        let years = Some(YearRange::new(2014, 2021).unwrap());
        assert!(matches!(
            Panel::new([o.clone()], geos, years),
            Err(ModelError::OutOfUniverse { .. })
        ));
        assert!(matches!(
            Panel::from_observations([o.clone(), o]),
            Err(ModelError::DuplicateKey { .. })
        ));
    }

    #[test]
    fn stats_ordering_enforced() {
        assert!(DistributionStats::new(code("C1"), 1.0, 2.0, 3.0, 4.0, 5.0, Some(5)).is_ok());
        let err = DistributionStats::new(code("C1"), 1.0, 3.0, 2.0, 4.0, 5.0, None).unwrap_err();
        assert!(err.to_string().contains("median"), "{err}");
        let err = DistributionStats::new(code("C1"), 1.0, 1.0, 1.0, 1.0, 1.0, Some(0)).unwrap_err();
        assert!(err.to_string().contains(".n"), "{err}");
    }

    #[test]
    fn goalposts_must_be_increasing() {
        let t = GoalpostTrace::ObservedExtremum;
        assert!(Goalposts::new(code("C1"), 5.0, 5.0, t, t).is_err());
        assert!(Goalposts::new(code("C1"), 0.0, 5.0, t, t).is_ok());
    }

    #[test]
    fn normalized_value_range() {
        assert!(NormalizedValue::new(code("C1"), "IT", 2014, 100.0, false, false).is_ok());
        assert!(NormalizedValue::new(code("C1"), "IT", 2014, 100.0001, false, false).is_err());
        assert!(NormalizedValue::new(code("C1"), "IT", 2014, -0.1, false, false).is_err());
    }

    #[test]
    fn weights_need_positive_sum() {
        let set = vec![code("C1"), code("C2")];
        let zero = Weights::new(set.iter().map(|c| (c.clone(), 0.0)).collect()).unwrap();
        assert!(zero.for_set(&set).is_err());
        assert!(Weights::new([(code("C1"), -1.0)].into()).is_err());
        assert_eq!(Weights::uniform(&set).for_set(&set).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn composite_series_validates() {
        let set = vec![code("C1")];
        let w = Weights::uniform(&set);
        assert!(CompositeSeries::new("IT", [(2014, 23.4)].into(), set.clone(), w.clone()).is_ok());
        assert!(CompositeSeries::new("IT", [(2014, 123.4)].into(), set, w.clone()).is_err());
        assert!(CompositeSeries::new("IT", BTreeMap::new(), vec![], w).is_err());
    }

    #[test]
    fn trace_parses_its_display() {
        for t in [
            GoalpostTrace::ObservedExtremum,
            GoalpostTrace::TukeyFence,
            GoalpostTrace::NaturalBoundClip,
        ] {
            assert_eq!(t.to_string().parse::<GoalpostTrace>().unwrap(), t);
        }
    }
}
