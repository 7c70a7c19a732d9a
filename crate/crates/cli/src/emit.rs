//! File emitters. Presentation rounding to one decimal happens only here.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use sdgs_rrf::analysis::{Decomposition, GapRow};
use sdgs_rrf::mapping::{CoverageReport, CoverageRow, FinanceReport, OccurrenceMatrix};
use sdgs_rrf::{round1, Warning};

/// Output directory; created on first use.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn writer(&self, name: &str) -> Result<BufWriter<File>> {
        let p = self.path(name);
        let f = File::create(&p).with_context(|| format!("creating {}", p.display()))?;
        Ok(BufWriter::new(f))
    }

    pub fn write_json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<()> {
        let mut w = self.writer(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    /// `warnings.json`: `{"warnings": [...]}`, always written.
    pub fn write_warnings(&self, warnings: &[Warning]) -> Result<()> {
        #[derive(Serialize)]
        struct Section<'a> {
            count: usize,
            warnings: &'a [Warning],
        }
        self.write_json(
            "warnings.json",
            &Section {
                count: warnings.len(),
                warnings,
            },
        )
    }

    pub fn csv(&self, name: &str) -> Result<csv::Writer<BufWriter<File>>> {
        Ok(csv::Writer::from_writer(self.writer(name)?))
    }
}

pub fn one_decimal(x: f64) -> String {
    format!("{:.1}", round1(x))
}

pub fn write_gaps(out: &OutDir, rows: &[GapRow]) -> Result<()> {
    let mut w = out.csv("gaps.csv")?;
    w.write_record(["year", "n_geos", "max_geo", "max", "min_geo", "min", "range", "cv"])?;
    for r in rows {
        w.write_record([
            r.year.to_string(),
            r.n_geos.to_string(),
            r.max_geo.clone(),
            one_decimal(r.max),
            r.min_geo.clone(),
            one_decimal(r.min),
            one_decimal(r.range),
            format!("{:.4}", r.coefficient_of_variation),
        ])?;
    }
    w.flush()?;
    out.write_json("gaps.json", rows)
}

pub fn write_decomposition(out: &OutDir, stem: &str, d: &Decomposition) -> Result<()> {
    let mut w = out.csv(&format!("{stem}.csv"))?;
    w.write_record(["indicator", "weight_share", "log_contribution", "factor"])?;
    for c in &d.contributions {
        w.write_record([
            c.indicator.to_string(),
            c.weight_share.to_string(),
            c.log_contribution.to_string(),
            c.factor.to_string(),
        ])?;
    }
    w.write_record([
        "TOTAL".to_string(),
        "1".to_string(),
        d.total_log.to_string(),
        d.total_factor.to_string(),
    ])?;
    w.flush()?;
    out.write_json(&format!("{stem}.json"), d)
}

fn coverage_record(r: &CoverageRow) -> [String; 9] {
    [
        r.group.clone(),
        r.n_investments.to_string(),
        r.n_reforms.to_string(),
        r.n_measures().to_string(),
        r.n_with_ic_investments.to_string(),
        r.n_with_ic_reforms.to_string(),
        r.n_with_ic.to_string(),
        format!("{:.0}", r.share),
        format!("{:.0}", r.investment_share),
    ]
}

pub fn write_coverage(out: &OutDir, name: &str, rep: &CoverageReport) -> Result<()> {
    let mut w = out.csv(name)?;
    w.write_record([
        "group",
        "investments",
        "reforms",
        "measures",
        "with_ic_investments",
        "with_ic_reforms",
        "with_ic",
        "share_pct",
        "investment_share_pct",
    ])?;
    for r in rep.rows.iter().chain(std::iter::once(&rep.total)) {
        w.write_record(coverage_record(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_occurrences(out: &OutDir, name: &str, m: &OccurrenceMatrix) -> Result<()> {
    let mut w = out.csv(name)?;
    let mut header = vec!["group".to_string()];
    header.extend(m.columns.iter().map(|c| c.to_string()));
    header.push("total".into());
    w.write_record(&header)?;
    for r in &m.rows {
        let mut rec = vec![r.group.clone()];
        rec.extend(r.counts.iter().map(|n| n.to_string()));
        rec.push(r.total.to_string());
        w.write_record(&rec)?;
    }
    let mut rec = vec!["Total".to_string()];
    rec.extend(m.column_totals.iter().map(|n| n.to_string()));
    rec.push(m.grand_total.to_string());
    w.write_record(&rec)?;
    w.flush()?;
    Ok(())
}

pub fn write_goals_by_mission(
    out: &OutDir,
    goals: &BTreeMap<u8, std::collections::BTreeSet<u8>>,
) -> Result<()> {
    let mut w = out.csv("goals_by_mission.csv")?;
    w.write_record(["mission", "goals"])?;
    for (m, gs) in goals {
        let list: Vec<String> = gs.iter().map(u8::to_string).collect();
        w.write_record([format!("M{m}"), list.join(" ")])?;
    }
    w.flush()?;
    Ok(())
}

/// Amounts in millions, shares in percent at one decimal. The closing note
/// states the rounded share sum, which may differ from 100.
pub fn write_finance(out: &OutDir, f: &FinanceReport) -> Result<()> {
    let mut w = out.csv("finance_by_goal.csv")?;
    w.write_record(["goal", "amount_mil", "share_pct", "flag"])?;
    for r in &f.rows {
        w.write_record([
            r.goal.to_string(),
            format!("{:.0}", r.amount),
            one_decimal(r.share),
            if r.no_amount { "(-)".into() } else { String::new() },
        ])?;
    }
    w.write_record([
        "Total".to_string(),
        format!("{:.0}", f.total),
        one_decimal(f.rounded_share_sum()),
        "(*)".to_string(),
    ])?;
    w.flush()?;
    Ok(())
}
