//! Goalpost derivation from pooled distribution statistics.
//!
//! Each endpoint is the more extreme of the observed extremum and the Tukey
//! fence (`Q1 - 1.5 IQR`, `Q3 + 1.5 IQR`), then clipped to the indicator's
//! natural bounds. Quartiles use linear interpolation between order
//! statistics (type 7 in Hyndman & Fan), the only quartile rule used anywhere
//! in this crate.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    DistributionStats, GoalpostSet, GoalpostTrace, Goalposts, IndicatorCode, IndicatorDef,
    ModelError,
};

/// Name of the quartile rule, reported with derived goalposts.
pub const QUARTILE_METHOD: &str = "R-7 (linear interpolation between order statistics)";

/// Fence multiplier on the interquartile range.
pub const TUKEY_MULTIPLIER: f64 = 1.5;

#[derive(Debug, Error)]
pub enum GoalpostError {
    #[error("cannot compute quartiles of an empty sample")]
    EmptyInput,
    #[error("degenerate goalposts for {indicator}: g1 {g1} >= g2 {g2} after clipping")]
    DegenerateGoalposts {
        indicator: IndicatorCode,
        g1: f64,
        g2: f64,
    },
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("duplicate goalposts for {0}")]
    DuplicateIndicator(IndicatorCode),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fences {
    pub lower: f64,
    pub upper: f64,
}

/// Quantile `p` of an ascending sample, interpolating linearly between the
/// order statistics at `h = (n - 1) p`.
pub fn quantile_r7(sorted: &[f64], p: f64) -> Result<f64, GoalpostError> {
    if sorted.is_empty() {
        return Err(GoalpostError::EmptyInput);
    }
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]), "sample not sorted");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

pub fn quartiles(sorted: &[f64]) -> Result<Quartiles, GoalpostError> {
    Ok(Quartiles {
        q1: quantile_r7(sorted, 0.25)?,
        median: quantile_r7(sorted, 0.5)?,
        q3: quantile_r7(sorted, 0.75)?,
    })
}

pub fn tukey_fences(stats: &DistributionStats) -> Fences {
    let reach = TUKEY_MULTIPLIER * stats.iqr();
    Fences {
        lower: stats.q1 - reach,
        upper: stats.q3 + reach,
    }
}

/// Goalposts before natural-bound clipping, with the rule that produced each
/// endpoint.
pub fn unclipped_goalposts(stats: &DistributionStats) -> ((f64, GoalpostTrace), (f64, GoalpostTrace)) {
    let fences = tukey_fences(stats);
    let lower = if fences.lower < stats.min {
        (fences.lower, GoalpostTrace::TukeyFence)
    } else {
        (stats.min, GoalpostTrace::ObservedExtremum)
    };
    let upper = if fences.upper > stats.max {
        (fences.upper, GoalpostTrace::TukeyFence)
    } else {
        (stats.max, GoalpostTrace::ObservedExtremum)
    };
    (lower, upper)
}

pub fn derive_goalposts(
    stats: &DistributionStats,
    def: &IndicatorDef,
) -> Result<Goalposts, GoalpostError> {
    let ((mut g1, mut g1_trace), (mut g2, mut g2_trace)) = unclipped_goalposts(stats);
    if let Some(floor) = def.natural_floor {
        if g1 < floor {
            g1 = floor;
            g1_trace = GoalpostTrace::NaturalBoundClip;
        }
    }
    if let Some(ceiling) = def.natural_ceiling {
        if g2 > ceiling {
            g2 = ceiling;
            g2_trace = GoalpostTrace::NaturalBoundClip;
        }
    }
    if g1 >= g2 {
        return Err(GoalpostError::DegenerateGoalposts {
            indicator: stats.indicator.clone(),
            g1,
            g2,
        });
    }
    Ok(Goalposts::new(
        stats.indicator.clone(),
        g1,
        g2,
        g1_trace,
        g2_trace,
    )?)
}

#[derive(Debug, Serialize, Deserialize)]
struct StatsRow {
    indicator: String,
    #[serde(default)]
    n: Option<usize>,
    min: f64,
    q1: f64,
    median: f64,
    q3: f64,
    max: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct GoalpostRow {
    indicator: String,
    g1: f64,
    g2: f64,
    #[serde(default)]
    g1_trace: Option<String>,
    #[serde(default)]
    g2_trace: Option<String>,
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map(|p| p.line()).unwrap_or(0)
}

/// Reads a statistics CSV with columns `indicator,n,min,q1,median,q3,max`
/// (`n` may be blank or absent).
pub fn read_stats<R: Read>(source: R) -> Result<Vec<DistributionStats>, GoalpostError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let headers = rdr.headers()?.clone();
    for col in ["indicator", "min", "q1", "median", "q3", "max"] {
        if !headers.iter().any(|h| h == col) {
            return Err(GoalpostError::MissingColumn(col.to_string()));
        }
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let row: StatsRow = rec.deserialize(Some(&headers)).map_err(|e| GoalpostError::MalformedRow {
            line,
            reason: e.to_string(),
        })?;
        let code = IndicatorCode::new(row.indicator)?;
        out.push(DistributionStats::new(
            code, row.min, row.q1, row.median, row.q3, row.max, row.n,
        )?);
    }
    Ok(out)
}

pub fn write_stats<W: Write>(stats: &[DistributionStats], sink: W) -> Result<(), GoalpostError> {
    let mut w = csv::Writer::from_writer(sink);
    for s in stats {
        w.serialize(StatsRow {
            indicator: s.indicator.to_string(),
            n: s.n,
            min: s.min,
            q1: s.q1,
            median: s.median,
            q3: s.q3,
            max: s.max,
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a goalposts CSV `indicator,g1,g2[,g1_trace,g2_trace]`. Missing traces
/// default to `observed_extremum`.
pub fn read_goalposts<R: Read>(source: R) -> Result<GoalpostSet, GoalpostError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let headers = rdr.headers()?.clone();
    for col in ["indicator", "g1", "g2"] {
        if !headers.iter().any(|h| h == col) {
            return Err(GoalpostError::MissingColumn(col.to_string()));
        }
    }
    let mut out = GoalpostSet::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let row: GoalpostRow =
            rec.deserialize(Some(&headers))
                .map_err(|e| GoalpostError::MalformedRow {
                    line,
                    reason: e.to_string(),
                })?;
        let trace = |t: Option<String>| -> Result<GoalpostTrace, GoalpostError> {
            match t.as_deref() {
                None | Some("") => Ok(GoalpostTrace::ObservedExtremum),
                Some(s) => Ok(s.parse()?),
            }
        };
        let code = IndicatorCode::new(row.indicator)?;
        let gp = Goalposts::new(
            code.clone(),
            row.g1,
            row.g2,
            trace(row.g1_trace)?,
            trace(row.g2_trace)?,
        )
        .map_err(|e| GoalpostError::MalformedRow {
            line,
            reason: e.to_string(),
        })?;
        if out.insert(code.clone(), gp).is_some() {
            return Err(GoalpostError::DuplicateIndicator(code));
        }
    }
    Ok(out)
}

pub fn write_goalposts<W: Write>(set: &GoalpostSet, sink: W) -> Result<(), GoalpostError> {
    let mut w = csv::Writer::from_writer(sink);
    for gp in set.values() {
        w.serialize(GoalpostRow {
            indicator: gp.indicator.to_string(),
            g1: gp.g1,
            g2: gp.g2,
            g1_trace: Some(gp.g1_trace.to_string()),
            g2_trace: Some(gp.g2_trace.to_string()),
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Polarity;
    use approx::assert_abs_diff_eq;

    fn code(s: &str) -> IndicatorCode {
        IndicatorCode::new(s).unwrap()
    }

    fn stats(c: &str, v: [f64; 5]) -> DistributionStats {
        DistributionStats::new(code(c), v[0], v[1], v[2], v[3], v[4], None).unwrap()
    }

    fn def(c: &str, floor: Option<f64>, ceiling: Option<f64>) -> IndicatorDef {
        IndicatorDef::new(code(c), "", "", Polarity::Positive, floor, ceiling).unwrap()
    }

    #[test]
    fn quartiles_of_one_to_five() {
        let q = quartiles(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!((q.q1, q.median, q.q3), (2.0, 3.0, 4.0));
    }

    #[test]
    fn quartiles_of_singleton_and_pair() {
        let q = quartiles(&[7.0]).unwrap();
        assert_eq!((q.q1, q.median, q.q3), (7.0, 7.0, 7.0));
        let q = quartiles(&[0.0, 100.0]).unwrap();
        assert_eq!((q.q1, q.median, q.q3), (25.0, 50.0, 75.0));
    }

    #[test]
    fn quartiles_of_empty_sample() {
        assert!(matches!(quartiles(&[]), Err(GoalpostError::EmptyInput)));
    }

    #[test]
    fn fences_for_c14_and_c12() {
        let f = tukey_fences(&stats("C14", [13.9, 31.5, 35.9, 40.0, 45.8]));
        assert_abs_diff_eq!(f.lower, 18.75, epsilon = 1e-9);
        assert_abs_diff_eq!(f.upper, 52.75, epsilon = 1e-9);
        let f = tukey_fences(&stats("C12", [205.4, 364.9, 536.0, 667.9, 911.6]));
        assert_abs_diff_eq!(f.upper, 1122.4, epsilon = 1e-9);
    }

    #[test]
    fn fences_collapse_with_zero_iqr() {
        let f = tukey_fences(&stats("X", [1.0, 3.0, 3.0, 3.0, 9.0]));
        assert_eq!((f.lower, f.upper), (3.0, 3.0));
    }

    #[test]
    fn c1_fence_then_floor_clip() {
        let gp = derive_goalposts(
            &stats("C1", [40.9, 118.7, 163.5, 248.9, 769.6]),
            &def("C1", Some(0.0), None),
        )
        .unwrap();
        assert_eq!(gp.g1, 0.0);
        assert_eq!(gp.g1_trace, GoalpostTrace::NaturalBoundClip);
        assert_eq!(gp.g2, 769.6);
        assert_eq!(gp.g2_trace, GoalpostTrace::ObservedExtremum);
    }

    #[test]
    fn c5_clipped_on_both_sides() {
        let gp = derive_goalposts(
            &stats("C5", [3.8, 40.7, 69.3, 85.9, 98.6]),
            &def("C5", Some(0.0), Some(100.0)),
        )
        .unwrap();
        assert_eq!((gp.g1, gp.g2), (0.0, 100.0));
        assert_eq!(gp.g1_trace, GoalpostTrace::NaturalBoundClip);
        assert_eq!(gp.g2_trace, GoalpostTrace::NaturalBoundClip);
    }

    #[test]
    fn c14_observed_min_and_fence_max() {
        let gp = derive_goalposts(
            &stats("C14", [13.9, 31.5, 35.9, 40.0, 45.8]),
            &def("C14", Some(0.0), Some(100.0)),
        )
        .unwrap();
        assert_eq!(gp.g1, 13.9);
        assert_eq!(gp.g1_trace, GoalpostTrace::ObservedExtremum);
        assert_abs_diff_eq!(gp.g2, 52.7, epsilon = 0.2);
        assert_eq!(gp.g2_trace, GoalpostTrace::TukeyFence);
    }

    #[test]
    fn degenerate_after_clipping() {
        let err = derive_goalposts(
            &stats("X", [5.0, 5.0, 5.0, 5.0, 5.0]),
            &def("X", None, None),
        )
        .unwrap_err();
        assert!(matches!(err, GoalpostError::DegenerateGoalposts { .. }));
        let err = derive_goalposts(
            &stats("X", [50.0, 60.0, 70.0, 80.0, 90.0]),
            &def("X", None, Some(10.0)),
        )
        .unwrap_err();
        assert!(matches!(err, GoalpostError::DegenerateGoalposts { .. }));
    }

    #[test]
    fn goalposts_csv_round_trip() {
        let gp = derive_goalposts(
            &stats("C14", [13.9, 31.5, 35.9, 40.0, 45.8]),
            &def("C14", Some(0.0), Some(100.0)),
        )
        .unwrap();
        let set: GoalpostSet = [(gp.indicator.clone(), gp)].into();
        let mut buf = Vec::new();
        write_goalposts(&set, &mut buf).unwrap();
        assert_eq!(read_goalposts(buf.as_slice()).unwrap(), set);
    }

    #[test]
    fn stats_csv_allows_blank_n() {
        let src = "indicator,n,min,q1,median,q3,max\nC1,,40.9,118.7,163.5,248.9,769.6\nC2,12,0.1,8.6,16.9,27.9,85.8\n";
        let s = read_stats(src.as_bytes()).unwrap();
        assert_eq!(s[0].n, None);
        assert_eq!(s[1].n, Some(12));
    }

    #[test]
    fn stats_csv_reports_line_of_bad_row() {
        let src = "indicator,n,min,q1,median,q3,max\nC1,,40.9,118.7,163.5,248.9,769.6\nC2,,x,8.6,16.9,27.9,85.8\n";
        match read_stats(src.as_bytes()) {
            Err(GoalpostError::MalformedRow { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
