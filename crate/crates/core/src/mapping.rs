//! Measure, common-indicator and SDG mapping catalog with its reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{IndicatorCatalog, IndicatorCode, ModelError, Warning};

pub const GOALS: std::ops::RangeInclusive<u8> = 1..=17;
pub const MISSIONS: std::ops::RangeInclusive<u8> = 1..=6;

#[derive(Debug, Error)]
pub enum MappingError {
    #[error("cannot parse measure code {text:?} at position {position}: {reason}")]
    UnparseableCode {
        text: String,
        position: usize,
        reason: &'static str,
    },
    #[error("record {code}: {reason}")]
    InvalidRecord { code: String, reason: String },
    #[error("proxy for {indicator}: {reason}")]
    InvalidProxy { indicator: IndicatorCode, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MeasureKind {
    Investment,
    Reform,
}

impl MeasureKind {
    fn letter(self) -> char {
        match self {
            Self::Investment => 'I',
            Self::Reform => 'R',
        }
    }
}

/// Hierarchical measure identifier.
///
/// Accepts the compact form (`M2C4I0401`: two digits each for measure, sub
/// and optionally detail) and the dotted form (`M5C2I1.03.00`). A zero sub or
/// detail level means the level is absent. Renders dotted without padding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct MeasureCode {
    pub mission: u8,
    pub component: u16,
    pub kind: MeasureKind,
    pub measure: u16,
    pub sub_measure: Option<u16>,
    pub detail: Option<u16>,
}

impl MeasureCode {
    /// Mission and component, e.g. `M3C1`.
    pub fn component_key(&self) -> String {
        format!("M{}C{}", self.mission, self.component)
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn fail<T>(&self, reason: &'static str) -> Result<T, MappingError> {
        Err(MappingError::UnparseableCode {
            text: self.text.to_string(),
            position: self.pos,
            reason,
        })
    }

    fn peek(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn expect(&mut self, c: u8, reason: &'static str) -> Result<(), MappingError> {
        if self.peek().map(|b| b.to_ascii_uppercase()) == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(reason)
        }
    }

    fn digits(&mut self, reason: &'static str) -> Result<&'a str, MappingError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.fail(reason);
        }
        Ok(&self.text[start..self.pos])
    }
}

fn number(cur: &Cursor, s: &str, start: usize) -> Result<u16, MappingError> {
    s.parse().map_err(|_| MappingError::UnparseableCode {
        text: cur.text.to_string(),
        position: start,
        reason: "number too large",
    })
}

impl FromStr for MeasureCode {
    type Err = MappingError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let text = text.trim();
        let mut cur = Cursor { text, pos: 0 };
        if text.is_empty() {
            return cur.fail("empty code");
        }
        cur.expect(b'M', "expected 'M'")?;
        let at = cur.pos;
        let d = cur.digits("expected mission number")?;
        let mission = number(&cur, d, at)?;
        if !(1..=u16::from(*MISSIONS.end())).contains(&mission) {
            cur.pos = at;
            return cur.fail("mission must be 1..6");
        }
        cur.expect(b'C', "expected 'C'")?;
        let at = cur.pos;
        let d = cur.digits("expected component number")?;
        let component = number(&cur, d, at)?;
        if component == 0 {
            cur.pos = at;
            return cur.fail("component must be positive");
        }
        let kind = match cur.peek().map(|b| b.to_ascii_uppercase()) {
            Some(b'I') => MeasureKind::Investment,
            Some(b'R') => MeasureKind::Reform,
            _ => return cur.fail("expected 'I' or 'R'"),
        };
        cur.pos += 1;

        let body_start = cur.pos;
        let first = cur.digits("expected measure number")?;
        let mut levels: Vec<(u16, usize)> = Vec::with_capacity(3);
        if cur.peek() == Some(b'.') {
            levels.push((number(&cur, first, body_start)?, body_start));
            while cur.peek() == Some(b'.') {
                if levels.len() == 3 {
                    return cur.fail("at most three levels after the kind");
                }
                cur.pos += 1;
                let at = cur.pos;
                let d = cur.digits("expected digits after '.'")?;
                levels.push((number(&cur, d, at)?, at));
            }
        } else {
            match first.len() {
                1 | 2 => levels.push((number(&cur, first, body_start)?, body_start)),
                4 | 6 => {
                    for i in (0..first.len()).step_by(2) {
                        let at = body_start + i;
                        levels.push((number(&cur, &first[i..i + 2], at)?, at));
                    }
                }
                _ => {
                    cur.pos = body_start;
                    return cur.fail("compact form needs 1, 2, 4 or 6 digits");
                }
            }
        }
        if cur.pos != text.len() {
            return cur.fail("unexpected trailing characters");
        }

        let (measure, at) = levels[0];
        if measure == 0 {
            cur.pos = at;
            return cur.fail("measure must be positive");
        }
        let level = |i: usize| levels.get(i).map(|l| l.0).filter(|&v| v != 0);
        let sub_measure = level(1);
        let detail = level(2);
        if sub_measure.is_none() && detail.is_some() {
            cur.pos = levels[1].1;
            return cur.fail("detail level without a sub-measure");
        }
        Ok(Self {
            mission: mission as u8,
            component,
            kind,
            measure,
            sub_measure,
            detail,
        })
    }
}

impl fmt::Display for MeasureCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "M{}C{}{}{}",
            self.mission,
            self.component,
            self.kind.letter(),
            self.measure
        )?;
        if let Some(s) = self.sub_measure {
            write!(f, ".{s}")?;
            if let Some(d) = self.detail {
                write!(f, ".{d}")?;
            }
        }
        Ok(())
    }
}

impl TryFrom<String> for MeasureCode {
    type Error = MappingError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<MeasureCode> for String {
    fn from(c: MeasureCode) -> Self {
        c.to_string()
    }
}

pub fn parse_measure_code(text: &str) -> Result<MeasureCode, MappingError> {
    text.parse()
}

/// One (sub-)measure with its indicator and goal associations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureRecord {
    pub code: MeasureCode,
    pub administration: String,
    /// Millions of euro.
    #[serde(default)]
    pub amount: Option<f64>,
    /// Common indicator to number of associations; a measure may carry the
    /// same indicator more than once.
    #[serde(default)]
    pub common_indicators: BTreeMap<IndicatorCode, u32>,
    #[serde(default)]
    pub sdg_indicators: BTreeSet<String>,
    #[serde(default)]
    pub prevalent_goal: Option<u8>,
}

impl MeasureRecord {
    fn validate(&self) -> Result<(), MappingError> {
        let fail = |reason: String| {
            Err(MappingError::InvalidRecord {
                code: self.code.to_string(),
                reason,
            })
        };
        if let Some(a) = self.amount {
            if !a.is_finite() || a < 0.0 {
                return fail(format!("amount {a} must be finite and nonnegative"));
            }
        }
        if let Some(g) = self.prevalent_goal {
            if !GOALS.contains(&g) {
                return fail(format!("prevalent goal {g} outside 1..17"));
            }
        }
        for (c, &n) in &self.common_indicators {
            if !is_common_indicator(c) {
                return fail(format!("{c} is not a common indicator C1..C14"));
            }
            if n == 0 {
                return fail(format!("{c} has zero occurrences"));
            }
        }
        Ok(())
    }

    pub fn has_common_indicator(&self) -> bool {
        !self.common_indicators.is_empty()
    }
}

/// The fourteen common indicators in display order.
pub fn common_indicator_codes() -> Vec<IndicatorCode> {
    (1..=14)
        .map(|i| IndicatorCode::new(format!("C{i}")).expect("static code"))
        .collect()
}

fn is_common_indicator(c: &IndicatorCode) -> bool {
    c.as_str()
        .strip_prefix('C')
        .and_then(|n| n.parse::<u8>().ok())
        .is_some_and(|n| (1..=14).contains(&n) && c.as_str() == format!("C{n}"))
}

/// SDG proxy for a common indicator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Proxy {
    pub indicator: IndicatorCode,
    pub sdg_indicator: String,
    pub goal: u8,
}

#[derive(Debug, Deserialize)]
struct CatalogFile {
    #[serde(default)]
    sdg_indicators: BTreeMap<String, u8>,
    records: Vec<MeasureRecord>,
}

#[derive(Debug, Clone, Default)]
pub struct MappingCatalog {
    pub records: Vec<MeasureRecord>,
    pub indicator_defs: IndicatorCatalog,
    /// Common indicator to SDG proxy. Indicators without a proxy are absent.
    pub proxy_map: BTreeMap<IndicatorCode, Proxy>,
    /// SDG indicator id to goal.
    pub sdg_goals: BTreeMap<String, u8>,
}

impl MappingCatalog {
    pub fn new(
        records: Vec<MeasureRecord>,
        sdg_goals: BTreeMap<String, u8>,
        proxies: impl IntoIterator<Item = Proxy>,
        indicator_defs: IndicatorCatalog,
    ) -> Result<Self, MappingError> {
        for (id, &g) in &sdg_goals {
            if !GOALS.contains(&g) {
                return Err(MappingError::InvalidRecord {
                    code: id.clone(),
                    reason: format!("goal {g} outside 1..17"),
                });
            }
        }
        let mut seen = BTreeSet::new();
        for r in &records {
            r.validate()?;
            if !seen.insert(r.code) {
                return Err(MappingError::InvalidRecord {
                    code: r.code.to_string(),
                    reason: "duplicate measure code".into(),
                });
            }
            for s in &r.sdg_indicators {
                if !sdg_goals.contains_key(s) {
                    return Err(MappingError::InvalidRecord {
                        code: r.code.to_string(),
                        reason: format!("unknown SDG indicator {s}"),
                    });
                }
            }
        }
        let mut proxy_map = BTreeMap::new();
        for p in proxies {
            if !is_common_indicator(&p.indicator) {
                return Err(MappingError::InvalidProxy {
                    indicator: p.indicator,
                    reason: "not a common indicator C1..C14".into(),
                });
            }
            if !GOALS.contains(&p.goal) {
                return Err(MappingError::InvalidProxy {
                    indicator: p.indicator,
                    reason: format!("goal {} outside 1..17", p.goal),
                });
            }
            if proxy_map.insert(p.indicator.clone(), p.clone()).is_some() {
                return Err(MappingError::InvalidProxy {
                    indicator: p.indicator,
                    reason: "duplicate proxy".into(),
                });
            }
        }
        Ok(Self {
            records,
            indicator_defs,
            proxy_map,
            sdg_goals,
        })
    }

    /// Loads records and the SDG indicator table from JSON of the form
    /// `{"sdg_indicators": {id: goal}, "records": [...]}`.
    pub fn from_json<R: Read>(
        reader: R,
        proxies: impl IntoIterator<Item = Proxy>,
        indicator_defs: IndicatorCatalog,
    ) -> Result<Self, MappingError> {
        let file: CatalogFile = serde_json::from_reader(reader)?;
        Self::new(file.records, file.sdg_indicators, proxies, indicator_defs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupBy {
    MissionComponent,
    Administration,
}

impl GroupBy {
    fn key(self, r: &MeasureRecord) -> String {
        match self {
            Self::MissionComponent => r.code.component_key(),
            Self::Administration => r.administration.clone(),
        }
    }
}

/// Sorts mission-component keys numerically (`M1C2` before `M1C10`) and any
/// other keys lexically.
fn group_order(a: &str, b: &str) -> std::cmp::Ordering {
    fn parts(s: &str) -> Option<(u32, u32)> {
        let rest = s.strip_prefix('M')?;
        let (m, c) = rest.split_once('C')?;
        Some((m.parse().ok()?, c.parse().ok()?))
    }
    match (parts(a), parts(b)) {
        (Some(x), Some(y)) => x.cmp(&y),
        _ => a.cmp(b),
    }
}

fn grouped(
    catalog: &MappingCatalog,
    group_by: GroupBy,
) -> Vec<(String, Vec<&MeasureRecord>)> {
    let mut groups: BTreeMap<String, Vec<&MeasureRecord>> = BTreeMap::new();
    for r in &catalog.records {
        groups.entry(group_by.key(r)).or_default().push(r);
    }
    let mut out: Vec<_> = groups.into_iter().collect();
    out.sort_by(|a, b| group_order(&a.0, &b.0));
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CoverageRow {
    pub group: String,
    pub n_investments: usize,
    pub n_reforms: usize,
    pub n_with_ic_investments: usize,
    pub n_with_ic_reforms: usize,
    /// Measures with at least one common indicator.
    pub n_with_ic: usize,
    /// Percent of all measures with at least one common indicator.
    pub share: f64,
    /// Percent of investments with at least one common indicator.
    pub investment_share: f64,
}

impl CoverageRow {
    pub fn n_measures(&self) -> usize {
        self.n_investments + self.n_reforms
    }

    fn add(&mut self, r: &MeasureRecord) {
        let ic = r.has_common_indicator();
        match r.code.kind {
            MeasureKind::Investment => {
                self.n_investments += 1;
                self.n_with_ic_investments += usize::from(ic);
            }
            MeasureKind::Reform => {
                self.n_reforms += 1;
                self.n_with_ic_reforms += usize::from(ic);
            }
        }
        self.n_with_ic += usize::from(ic);
    }

    fn finish(mut self) -> Self {
        self.share = percent(self.n_with_ic as f64, self.n_measures() as f64);
        self.investment_share = percent(self.n_with_ic_investments as f64, self.n_investments as f64);
        self
    }
}

fn percent(part: f64, whole: f64) -> f64 {
    if whole == 0.0 {
        0.0
    } else {
        100.0 * part / whole
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub rows: Vec<CoverageRow>,
    pub total: CoverageRow,
}

pub fn coverage_report(catalog: &MappingCatalog, group_by: GroupBy) -> CoverageReport {
    let mut total = CoverageRow {
        group: "Total".into(),
        ..Default::default()
    };
    let rows = grouped(catalog, group_by)
        .into_iter()
        .map(|(group, recs)| {
            let mut row = CoverageRow {
                group,
                ..Default::default()
            };
            for r in recs {
                row.add(r);
                total.add(r);
            }
            row.finish()
        })
        .collect();
    CoverageReport {
        rows,
        total: total.finish(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccurrenceRow {
    pub group: String,
    /// Aligned with [`OccurrenceMatrix::columns`].
    pub counts: Vec<u32>,
    pub total: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccurrenceMatrix {
    pub columns: Vec<IndicatorCode>,
    pub rows: Vec<OccurrenceRow>,
    pub column_totals: Vec<u32>,
    pub grand_total: u32,
}

impl OccurrenceMatrix {
    pub fn column_total(&self, code: &IndicatorCode) -> Option<u32> {
        let i = self.columns.iter().position(|c| c == code)?;
        Some(self.column_totals[i])
    }

    pub fn row(&self, group: &str) -> Option<&OccurrenceRow> {
        self.rows.iter().find(|r| r.group == group)
    }
}

/// Counts (measure, common indicator) associations per group over C1..C14.
pub fn occurrence_matrix(catalog: &MappingCatalog, group_by: GroupBy) -> OccurrenceMatrix {
    let columns = common_indicator_codes();
    let mut column_totals = vec![0; columns.len()];
    let rows: Vec<OccurrenceRow> = grouped(catalog, group_by)
        .into_iter()
        .map(|(group, recs)| {
            let mut counts = vec![0u32; columns.len()];
            for r in recs {
                for (i, c) in columns.iter().enumerate() {
                    counts[i] += r.common_indicators.get(c).copied().unwrap_or(0);
                }
            }
            for (t, n) in column_totals.iter_mut().zip(&counts) {
                *t += n;
            }
            OccurrenceRow {
                group,
                total: counts.iter().sum(),
                counts,
            }
        })
        .collect();
    let grand_total = rows.iter().map(|r| r.total).sum();
    OccurrenceMatrix {
        columns,
        rows,
        column_totals,
        grand_total,
    }
}

/// Goals touched by each mission through SDG indicators or prevalent goals.
pub fn goals_by_mission(catalog: &MappingCatalog) -> BTreeMap<u8, BTreeSet<u8>> {
    let mut out: BTreeMap<u8, BTreeSet<u8>> = BTreeMap::new();
    for r in &catalog.records {
        let goals = r
            .sdg_indicators
            .iter()
            .filter_map(|s| catalog.sdg_goals.get(s).copied())
            .chain(r.prevalent_goal);
        let mut goals = goals.peekable();
        if goals.peek().is_some() {
            out.entry(r.code.mission).or_default().extend(goals);
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SdgUsage {
    /// (measure, SDG indicator) associations.
    pub occurrences: usize,
    pub unique: usize,
}

/// SDG indicator usage per mission, with the catalog-wide unique count under
/// mission 0.
pub fn sdg_indicators_by_mission(catalog: &MappingCatalog) -> BTreeMap<u8, SdgUsage> {
    let mut sets: BTreeMap<u8, (usize, BTreeSet<&str>)> = BTreeMap::new();
    for r in &catalog.records {
        for key in [0, r.code.mission] {
            let e = sets.entry(key).or_default();
            e.0 += r.sdg_indicators.len();
            e.1.extend(r.sdg_indicators.iter().map(String::as_str));
        }
    }
    sets.into_iter()
        .map(|(m, (occurrences, set))| {
            (
                m,
                SdgUsage {
                    occurrences,
                    unique: set.len(),
                },
            )
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoalAllocation {
    pub goal: u8,
    pub amount: f64,
    pub share: f64,
    /// No amount is attributed to the goal, shown as "(-)".
    pub no_amount: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinanceReport {
    pub rows: Vec<GoalAllocation>,
    pub total: f64,
    pub warnings: Vec<Warning>,
}

impl FinanceReport {
    pub fn goal(&self, goal: u8) -> Option<&GoalAllocation> {
        self.rows.iter().find(|r| r.goal == goal)
    }

    /// Sum of shares after rounding each to one decimal; may differ from 100.
    pub fn rounded_share_sum(&self) -> f64 {
        self.rows.iter().map(|r| crate::model::round1(r.share)).sum()
    }
}

/// Sums record amounts by prevalent goal over goals 1..17. Records lacking an
/// amount or a goal are skipped and reported.
pub fn allocate_finance_by_goal(catalog: &MappingCatalog) -> FinanceReport {
    let mut by_goal: BTreeMap<u8, f64> = GOALS.map(|g| (g, 0.0)).collect();
    let mut warnings = Vec::new();
    for r in &catalog.records {
        match (r.amount, r.prevalent_goal) {
            (None, _) => warnings.push(Warning::MissingAmount {
                code: r.code.to_string(),
                reason: "no amount".into(),
            }),
            (Some(a), None) if a > 0.0 => warnings.push(Warning::MissingAmount {
                code: r.code.to_string(),
                reason: "amount has no prevalent goal".into(),
            }),
            (Some(a), Some(g)) => *by_goal.entry(g).or_default() += a,
            _ => {}
        }
    }
    let total: f64 = by_goal.values().sum();
    let rows = by_goal
        .into_iter()
        .map(|(goal, amount)| GoalAllocation {
            goal,
            amount,
            share: percent(amount, total),
            no_amount: amount == 0.0,
        })
        .collect();
    FinanceReport {
        rows,
        total,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mc(s: &str) -> MeasureCode {
        s.parse().unwrap()
    }

    #[test]
    fn parses_dotted_with_zero_detail() {
        let c = mc("M5C2I1.03.00");
        assert_eq!(
            (c.mission, c.component, c.kind, c.measure, c.sub_measure, c.detail),
            (5, 2, MeasureKind::Investment, 1, Some(3), None)
        );
        assert_eq!(c.to_string(), "M5C2I1.3");
    }

    #[test]
    fn parses_compact() {
        let c = mc("M2C4I0404");
        assert_eq!((c.mission, c.component, c.measure, c.sub_measure), (2, 4, 4, Some(4)));
        assert_eq!(mc("M2C4I0401").to_string(), "M2C4I4.1");
        assert_eq!(mc("M1C2I030104"), mc("M1C2I3.01.04"));
        assert_eq!(mc("M1C2I3.01.04").detail, Some(4));
        assert_eq!(mc("M1C1R1").kind, MeasureKind::Reform);
        assert_eq!(mc("M1C1R1").sub_measure, None);
    }

    #[test]
    fn rejects_bad_codes_with_position() {
        for (text, pos) in [
            ("X9Z1", 0),
            ("", 0),
            ("M7C1I1", 1),
            ("M1X1I1", 2),
            ("M1C1Q1", 4),
            ("M1C1I123", 5),
            ("M1C1I1.", 7),
            ("M1C1I1.2x", 8),
            ("M1C1I1.00.02", 7),
        ] {
            match text.parse::<MeasureCode>() {
                Err(MappingError::UnparseableCode { position, .. }) => {
                    assert_eq!(position, pos, "{text}")
                }
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    fn record(code: &str, admin: &str, amount: Option<f64>, ics: &[(&str, u32)], goal: Option<u8>) -> MeasureRecord {
        MeasureRecord {
            code: mc(code),
            administration: admin.into(),
            amount,
            common_indicators: ics
                .iter()
                .map(|(c, n)| (IndicatorCode::new(*c).unwrap(), *n))
                .collect(),
            sdg_indicators: BTreeSet::new(),
            prevalent_goal: goal,
        }
    }

    fn catalog(records: Vec<MeasureRecord>) -> MappingCatalog {
        MappingCatalog::new(records, BTreeMap::new(), [], IndicatorCatalog::default()).unwrap()
    }

    #[test]
    fn coverage_counts_and_shares() {
        let cat = catalog(vec![
            record("M1C1I1.1", "A", Some(1.0), &[("C7", 1)], Some(9)),
            record("M1C1I1.2", "A", Some(1.0), &[], Some(9)),
            record("M1C1R1.1", "B", None, &[("C10", 2)], None),
            record("M1C10I1.1", "B", None, &[], None),
        ]);
        let rep = coverage_report(&cat, GroupBy::MissionComponent);
        let groups: Vec<_> = rep.rows.iter().map(|r| r.group.as_str()).collect();
        assert_eq!(groups, ["M1C1", "M1C10"]);
        let r = &rep.rows[0];
        assert_eq!((r.n_investments, r.n_reforms, r.n_with_ic), (2, 1, 2));
        assert!((r.share - 200.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.investment_share, 50.0);
        assert_eq!(rep.total.n_measures(), 4);
        assert_eq!(rep.total.share, 50.0);
    }

    #[test]
    fn empty_catalog_reports_zero() {
        let cat = catalog(vec![]);
        let rep = coverage_report(&cat, GroupBy::Administration);
        assert!(rep.rows.is_empty());
        assert_eq!(rep.total.n_measures(), 0);
        assert_eq!(rep.total.share, 0.0);
        assert_eq!(occurrence_matrix(&cat, GroupBy::Administration).grand_total, 0);
    }

    #[test]
    fn single_occurrence_matrix() {
        let cat = catalog(vec![record("M6C1I1.1", "S", None, &[("C12", 1)], None)]);
        let m = occurrence_matrix(&cat, GroupBy::MissionComponent);
        assert_eq!(m.grand_total, 1);
        assert_eq!(m.rows[0].counts.iter().filter(|&&n| n > 0).count(), 1);
        assert_eq!(m.column_total(&IndicatorCode::new("C12").unwrap()), Some(1));
    }

    #[test]
    fn finance_single_goal() {
        let cat = catalog(vec![
            record("M2C2I1.1", "E", Some(100.0), &[], Some(7)),
            record("M2C2I1.2", "E", None, &[], Some(7)),
            record("M2C2R1.1", "E", Some(0.0), &[], None),
        ]);
        let f = allocate_finance_by_goal(&cat);
        assert_eq!(f.rows.len(), 17);
        assert_eq!(f.goal(7).unwrap().share, 100.0);
        assert!(f.goal(2).unwrap().no_amount);
        assert_eq!(f.warnings.len(), 1);
    }

    #[test]
    fn goals_from_indicators_and_prevalent() {
        let mut r = record("M3C1I1.1", "T", None, &[], Some(9));
        r.sdg_indicators.insert("S11".into());
        let bare = record("M4C1I1.1", "T", None, &[], None);
        let cat = MappingCatalog::new(
            vec![r, bare],
            [("S11".to_string(), 11)].into(),
            [],
            IndicatorCatalog::default(),
        )
        .unwrap();
        let g = goals_by_mission(&cat);
        assert_eq!(g[&3], BTreeSet::from([9, 11]));
        assert!(!g.contains_key(&4));
    }

    #[test]
    fn catalog_validation() {
        let bad_goal = record("M1C1I1.1", "A", None, &[], Some(18));
        assert!(MappingCatalog::new(vec![bad_goal], BTreeMap::new(), [], IndicatorCatalog::default()).is_err());
        let bad_ic = record("M1C1I1.1", "A", None, &[("C15", 1)], None);
        assert!(MappingCatalog::new(vec![bad_ic], BTreeMap::new(), [], IndicatorCatalog::default()).is_err());
        let dup = record("M1C1I1.1", "A", None, &[], None);
        assert!(MappingCatalog::new(vec![dup.clone(), dup], BTreeMap::new(), [], IndicatorCatalog::default()).is_err());
        let proxy = Proxy {
            indicator: IndicatorCode::new("C9").unwrap(),
            sdg_indicator: "x".into(),
            goal: 0,
        };
        assert!(MappingCatalog::new(vec![], BTreeMap::new(), [proxy], IndicatorCatalog::default()).is_err());
    }

    fn arb_code() -> impl Strategy<Value = MeasureCode> {
        (
            1u8..=6,
            1u16..=20,
            prop::bool::ANY,
            1u16..=99,
            prop::option::of(1u16..=99),
            prop::option::of(1u16..=99),
        )
            .prop_map(|(mission, component, inv, measure, sub, det)| MeasureCode {
                mission,
                component,
                kind: if inv { MeasureKind::Investment } else { MeasureKind::Reform },
                measure,
                sub_measure: sub,
                detail: sub.and(det),
            })
    }

    proptest! {
        #[test]
        fn dotted_round_trip(c in arb_code()) {
            prop_assert_eq!(c.to_string().parse::<MeasureCode>().unwrap(), c);
        }

        #[test]
        fn compact_round_trip(c in arb_code()) {
            let mut compact = format!("M{}C{}{}{:02}", c.mission, c.component, c.kind.letter(), c.measure);
            if let Some(s) = c.sub_measure {
                compact.push_str(&format!("{s:02}"));
                if let Some(d) = c.detail {
                    compact.push_str(&format!("{d:02}"));
                }
            }
            prop_assert_eq!(compact.parse::<MeasureCode>().unwrap(), c);
        }
    }
}
