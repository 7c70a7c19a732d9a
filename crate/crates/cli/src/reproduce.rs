//! Offline recomputation of the published goalposts, scores, composite
//! series, gaps and mapping reports from the shipped fixtures.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use sdgs_rrf::analysis::{decompose_temporal, gap_metrics};
use sdgs_rrf::composite::{write_index_csv, write_plot_data};
use sdgs_rrf::goalposts::{read_stats, write_goalposts};
use sdgs_rrf::mapping::{allocate_finance_by_goal, coverage_report, occurrence_matrix, GroupBy};
use sdgs_rrf::pipeline::{goalposts_from_stats, run_index};
use sdgs_rrf::{round1, IndicatorCode, Warning};

use crate::commands::{load_catalog, load_config, load_goalposts, load_panel, open, write_reports};
use crate::emit::{self, OutDir};
use crate::Grouping;

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    expected: String,
    actual: String,
    pass: bool,
}

fn trim(x: f64) -> String {
    let s = format!("{x:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn near(&mut self, name: impl Into<String>, actual: f64, expected: f64, tol: f64) {
        self.0.push(Check {
            name: name.into(),
            expected: format!("{} +/- {tol}", trim(expected)),
            actual: format!("{actual:.4}"),
            pass: (actual - expected).abs() <= tol,
        });
    }

    fn within(&mut self, name: impl Into<String>, actual: f64, lo: f64, hi: f64) {
        self.0.push(Check {
            name: name.into(),
            expected: format!("[{lo}, {hi}]"),
            actual: format!("{actual:.4}"),
            pass: (lo..=hi).contains(&actual),
        });
    }

    fn equal<T: PartialEq + std::fmt::Display>(&mut self, name: impl Into<String>, actual: T, expected: T) {
        self.0.push(Check {
            name: name.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
            pass: actual == expected,
        });
    }
}

#[derive(Deserialize)]
struct PublishedCell {
    indicator: String,
    geo: String,
    year: i32,
    score: f64,
}

const INDEX_ROW: &str = "INDEX";

pub fn run(fixtures: &Path, out: &Path) -> Result<()> {
    let cfg = load_config(&fixtures.join("index.toml"))?;
    let catalog = cfg.catalog()?;
    let out = OutDir::create(out)?;
    let mut checks = Checks::default();
    let mut warnings: Vec<Warning> = Vec::new();

    // Goalposts derived from the published summaries.
    let stats_path = fixtures.join("reference_stats.csv");
    let stats = read_stats(open(&stats_path)?).with_context(|| format!("reading {}", stats_path.display()))?;
    let derived = goalposts_from_stats(&stats, &catalog)?;
    let published = load_goalposts(&fixtures.join("reference_goalposts.csv"))?;
    write_goalposts(&derived, out.writer("goalposts.csv")?)?;
    for (code, p) in &published {
        let Some(d) = derived.get(code) else {
            bail!("no summary statistics for {code}");
        };
        checks.near(format!("goalpost {code} g1"), d.g1, p.g1, 0.2);
        checks.near(format!("goalpost {code} g2"), d.g2, p.g2, 0.2);
        checks.equal(format!("goalpost {code} g1 trace"), d.g1_trace, p.g1_trace);
        checks.equal(format!("goalpost {code} g2 trace"), d.g2_trace, p.g2_trace);
    }

    // Scores and composite, normalized with the published goalposts.
    let panel = load_panel(&fixtures.join("panel_big4.csv"))?;
    let run = run_index(&panel, &published, &cfg)?;
    warnings.extend(run.warnings.iter().cloned());
    let n_imputed = run
        .warnings
        .iter()
        .filter(|w| matches!(w, Warning::Imputed { .. }))
        .count();
    checks.equal("imputed cells", n_imputed, 8);
    write_index_csv(&run.index, out.writer("index.csv")?)?;
    write_plot_data(&run.index, &run.normalized, out.writer("index_series.csv")?)?;

    let scores_path = fixtures.join("reference_scores.csv");
    let mut rdr = csv::Reader::from_reader(open(&scores_path)?);
    let mut check_out = out.csv("scores_check.csv")?;
    check_out.write_record(["indicator", "geo", "year", "computed", "published"])?;
    let mut cell_total = 0;
    let mut cell_match = 0;
    for rec in rdr.deserialize::<PublishedCell>() {
        let cell = rec.with_context(|| format!("reading {}", scores_path.display()))?;
        let computed = if cell.indicator == INDEX_ROW {
            let v = run.index.value(&cell.geo, cell.year);
            if let Some(v) = v {
                checks.near(format!("composite {} {}", cell.geo, cell.year), v, cell.score, 0.15);
            }
            v
        } else {
            let code = IndicatorCode::new(cell.indicator.as_str())?;
            let v = run.normalized.get(&code, &cell.geo, cell.year).map(|v| v.score);
            cell_total += 1;
            cell_match += usize::from(v.is_some_and(|v| round1(v) == cell.score));
            v
        };
        check_out.write_record([
            cell.indicator.clone(),
            cell.geo.clone(),
            cell.year.to_string(),
            computed.map(emit::one_decimal).unwrap_or_default(),
            emit::one_decimal(cell.score),
        ])?;
    }
    check_out.flush()?;
    checks.equal("normalized cells matching at one decimal", cell_match, 88);
    checks.equal("normalized cells published", cell_total, 88);

    if let (Some(a), Some(b)) = (run.index.value("IT", 2014), run.index.value("IT", 2017)) {
        checks.near("IT 2017 against 2014", b, a, 1.0);
    }
    let it: Vec<f64> = (2017..=2021).filter_map(|y| run.index.value("IT", y)).collect();
    checks.equal(
        "IT strictly rising 2018-2021",
        it.len() == 5 && it.windows(2).all(|w| w[1] > w[0]),
        true,
    );

    // Gaps and growth.
    let gaps = gap_metrics(&run.index.by_year())?;
    emit::write_gaps(&out, &gaps)?;
    let gap = |y: i32| gaps.iter().find(|r| r.year == y);
    if let Some(g) = gap(2014) {
        checks.near("gap 2014", g.range, 15.7, 0.1);
        checks.equal("gap 2014 pair", format!("{}-{}", g.max_geo, g.min_geo), "FR-ES".into());
    }
    if let Some(g) = gap(2021) {
        checks.near("gap 2021", g.range, 14.2, 0.1);
        checks.equal("gap 2021 pair", format!("{}-{}", g.max_geo, g.min_geo), "FR-IT".into());
    }
    let weights = cfg.weights()?;
    let set = &cfg.indicator_set;
    for (geo, lo, hi) in [("ES", 1.75, 1.77), ("IT", 1.53, 1.55)] {
        let d = decompose_temporal(
            &run.normalized.scores_for(geo, 2014, set),
            &run.normalized.scores_for(geo, 2021, set),
            &weights,
        )?;
        checks.within(format!("growth factor {geo} 2014-2021"), d.total_factor, lo, hi);
        emit::write_decomposition(&out, &format!("decomposition_{geo}_2014_2021"), &d)?;
    }

    // Mapping reports.
    let cat = load_catalog(&fixtures.join("pnrr_catalog.json"), Some(&cfg))?;
    write_reports(&cat, Grouping::Both, &out)?;
    let cov = coverage_report(&cat, GroupBy::MissionComponent);
    checks.equal("measures", cov.total.n_measures(), 285);
    checks.equal("measures with common indicator", cov.total.n_with_ic, 155);
    checks.equal("coverage share", format!("{:.0}", cov.total.share), "54".into());
    let m3c1 = cov.rows.iter().find(|r| r.group == "M3C1").map(|r| r.share);
    checks.equal("M3C1 share", m3c1.map(|s| s.to_string()).unwrap_or_default(), "0".into());
    let occ = occurrence_matrix(&cat, GroupBy::MissionComponent);
    checks.equal("occurrences", occ.grand_total, 646);
    let c10 = IndicatorCode::new("C10")?;
    checks.equal("occurrences C10", occ.column_total(&c10).unwrap_or(0), 288);
    let fin = allocate_finance_by_goal(&cat);
    warnings.extend(fin.warnings.iter().cloned());
    let share = |g: u8| fin.goal(g).map(|r| emit::one_decimal(r.share)).unwrap_or_default();
    checks.equal("goal 9 share", share(9), "30.0".into());
    checks.equal("goal 7 share", share(7), "17.9".into());
    checks.near("goal shares rounded sum", fin.rounded_share_sum(), 100.0, 0.3);

    let mut w = out.csv("checks.csv")?;
    w.write_record(["check", "expected", "actual", "pass"])?;
    for c in &checks.0 {
        w.write_record([c.name.as_str(), &c.expected, &c.actual, if c.pass { "true" } else { "false" }])?;
    }
    w.flush()?;
    out.write_warnings(&warnings)?;

    let failed = checks.0.iter().filter(|c| !c.pass).count();
    for c in &checks.0 {
        println!(
            "{} {}: {} (expected {})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.actual,
            c.expected
        );
    }
    if failed > 0 {
        bail!("{} of {} checks failed", failed, checks.0.len());
    }
    Ok(())
}
