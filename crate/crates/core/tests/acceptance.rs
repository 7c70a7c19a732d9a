//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.
//!
//! Published values are read from the reference fixtures; derived values are
//! checked against oracles computed here, independently of the library.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use serde::Deserialize;

use sdgs_rrf::analysis::{decompose_cross_country, decompose_temporal, gap_metrics};
use sdgs_rrf::composite::weighted_geometric_mean;
use sdgs_rrf::config::IndexConfig;
use sdgs_rrf::goalposts::{read_goalposts, read_stats};
use sdgs_rrf::ingest::{impute_locf, parse_panel, ColumnSchema};
use sdgs_rrf::mapping::{
    allocate_finance_by_goal, coverage_report, occurrence_matrix, GroupBy, MappingCatalog,
};
use sdgs_rrf::pipeline::{goalposts_from_stats, run_index, IndexRun};
use sdgs_rrf::{
    round1, GoalpostSet, GoalpostTrace, IndicatorCode, Panel, Polarity, Warning, Weights,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn open(name: &str) -> File {
    File::open(data(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn code(s: &str) -> IndicatorCode {
    IndicatorCode::new(s).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn config() -> IndexConfig {
    IndexConfig::load(&data("index.toml")).unwrap()
}

fn panel() -> Panel {
    parse_panel(open("panel_big4.csv"), &ColumnSchema::default()).unwrap()
}

fn published_goalposts() -> GoalpostSet {
    read_goalposts(open("reference_goalposts.csv")).unwrap()
}

#[derive(Deserialize)]
struct Cell {
    indicator: String,
    geo: String,
    year: i32,
    score: f64,
}

const INDEX_ROW: &str = "INDEX";

fn published_cells() -> Vec<Cell> {
    csv::Reader::from_reader(open("reference_scores.csv"))
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap()
}

fn published_index(geo: &str, year: i32) -> f64 {
    published_cells()
        .into_iter()
        .find(|c| c.indicator == INDEX_ROW && c.geo == geo && c.year == year)
        .map(|c| c.score)
        .unwrap_or_else(|| panic!("no published index for {geo} {year}"))
}

fn index_run() -> IndexRun {
    run_index(&panel(), &published_goalposts(), &config()).unwrap()
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

/// Weighted geometric mean as a product of powers.
fn oracle_gm(scores: &[f64], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    scores
        .iter()
        .zip(weights)
        .map(|(s, w)| s.powf(w / total))
        .product()
}

fn goalposts_from_published_summaries() -> Outcome {
    let start = Instant::now();
    let stats = read_stats(open("reference_stats.csv")).map_err(|e| e.to_string())?;
    let derived = goalposts_from_stats(&stats, &config().catalog().unwrap()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let published = published_goalposts();
    ensure(derived.len() == 11 && published.len() == 11, || {
        format!("{} derived, {} published", derived.len(), published.len())
    })?;
    let mut worst = 0.0f64;
    for (c, p) in &published {
        let d = &derived[c];
        for (name, a, b) in [("g1", d.g1, p.g1), ("g2", d.g2, p.g2)] {
            worst = worst.max((a - b).abs());
            ensure((a - b).abs() <= 0.2, || format!("{c} {name}: {a} vs published {b}"))?;
        }
    }
    let with = |pick: fn(&sdgs_rrf::Goalposts) -> GoalpostTrace, t: GoalpostTrace| -> BTreeSet<String> {
        derived
            .values()
            .filter(|g| pick(g) == t)
            .map(|g| g.indicator.to_string())
            .collect()
    };
    let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    let floor = with(|g| g.g1_trace, GoalpostTrace::NaturalBoundClip);
    ensure(floor.is_superset(&set(&["C1", "C2", "C3", "C5", "C7", "C8", "C12"])), || {
        format!("floor clips {floor:?}")
    })?;
    let ceiling = with(|g| g.g2_trace, GoalpostTrace::NaturalBoundClip);
    ensure(ceiling == set(&["C5", "C7"]), || format!("ceiling clips {ceiling:?}"))?;
    let observed_min = with(|g| g.g1_trace, GoalpostTrace::ObservedExtremum);
    ensure(observed_min == set(&["C14"]), || format!("observed minima {observed_min:?}"))?;
    let fence_max = with(|g| g.g2_trace, GoalpostTrace::TukeyFence);
    ensure(fence_max == set(&["C8", "C12", "C13", "C14"]), || {
        format!("fence maxima {fence_max:?}")
    })?;
    ensure(elapsed.as_secs_f64() < 1.0, || format!("took {elapsed:?}"))?;
    Ok(format!("22 endpoints within 0.2 (worst {worst:.3}), clip pattern matches, {elapsed:?}"))
}

fn normalization_golden() -> Outcome {
    let gp = published_goalposts();
    let cfg = config();
    let defs = cfg.catalog().unwrap();
    let raw = panel();
    let imputed: BTreeSet<&str> = ["C3", "C12"].into();
    let run = index_run();
    let mut n = 0;
    for cell in published_cells().iter().filter(|c| c.indicator != INDEX_ROW) {
        let c = code(&cell.indicator);
        let g = &gp[&c];
        // Inversion oracle: the raw value whose score is the published one.
        let expected_raw = match defs.get(&c).unwrap().polarity {
            Polarity::Positive => g.g1 + cell.score / 100.0 * (g.g2 - g.g1),
            Polarity::Negative => g.g2 - cell.score / 100.0 * (g.g2 - g.g1),
        };
        let source_year = if cell.year == 2021 && imputed.contains(cell.indicator.as_str()) {
            2020
        } else {
            cell.year
        };
        let fixture = raw
            .get(&c, &cell.geo, source_year)
            .ok_or_else(|| format!("fixture lacks {c} {} {source_year}", cell.geo))?
            .value;
        ensure((fixture - expected_raw).abs() <= 1e-6 * expected_raw.abs().max(1.0), || {
            format!("fixture {c} {} {}: {fixture} vs inverted {expected_raw}", cell.geo, cell.year)
        })?;
        let score = run
            .normalized
            .get(&c, &cell.geo, cell.year)
            .ok_or_else(|| format!("no score for {c} {} {}", cell.geo, cell.year))?
            .score;
        ensure(round1(score) == cell.score, || {
            format!("{c} {} {}: {score} vs published {}", cell.geo, cell.year, cell.score)
        })?;
        n += 1;
    }
    ensure(n == 88, || format!("{n} cells checked"))?;
    Ok("88 of 88 cells reproduce at one decimal; fixture matches inversion".into())
}

fn composite_series() -> Outcome {
    let run = index_run();
    let cfg = config();
    let mut worst = 0.0f64;
    for geo in ["FR", "DE", "IT", "ES"] {
        for year in [2014, 2021] {
            let v = run.index.value(geo, year).ok_or("missing index")?;
            let scores: Vec<f64> = run.normalized.scores_for(geo, year, &cfg.indicator_set).into_values().collect();
            let oracle = oracle_gm(&scores, &vec![1.0; scores.len()]);
            ensure((v - oracle).abs() <= 1e-9, || format!("{geo} {year}: {v} vs oracle {oracle}"))?;
            let p = published_index(geo, year);
            worst = worst.max((v - p).abs());
            ensure((v - p).abs() <= 0.15, || format!("{geo} {year}: {v:.4} vs published {p}"))?;
        }
    }
    let it = |y: i32| run.index.value("IT", y).unwrap();
    ensure((it(2017) - it(2014)).abs() <= 1.0, || {
        format!("IT 2017 {:.3} vs 2014 {:.3}", it(2017), it(2014))
    })?;
    for y in 2018..=2021 {
        ensure(it(y) > it(y - 1), || format!("IT {y} {:.3} not above {:.3}", it(y), it(y - 1)))?;
    }
    Ok(format!("8 values within 0.15 (worst {worst:.3}); IT flat to 2017 then rising"))
}

fn gap_ranges() -> Outcome {
    let run = index_run();
    let by_year = run.index.by_year();
    let rows = gap_metrics(&by_year).map_err(|e| e.to_string())?;
    let mut detail = Vec::new();
    for (year, expected, top, bottom) in [(2014, 15.7, "FR", "ES"), (2021, 14.2, "FR", "IT")] {
        let row = rows.iter().find(|r| r.year == year).ok_or("missing year")?;
        let vals = &by_year[&year];
        let oracle = vals.values().cloned().fold(f64::MIN, f64::max) - vals.values().cloned().fold(f64::MAX, f64::min);
        ensure((row.range - oracle).abs() <= 1e-12, || format!("{year}: {} vs oracle {oracle}", row.range))?;
        ensure((row.range - expected).abs() <= 0.1, || format!("{year}: range {:.3}", row.range))?;
        ensure(row.max_geo == top && row.min_geo == bottom, || {
            format!("{year}: {}-{}", row.max_geo, row.min_geo)
        })?;
        detail.push(format!("{year} {:.2} {top}-{bottom}", row.range));
    }
    Ok(detail.join(", "))
}

fn growth_factors() -> Outcome {
    let run = index_run();
    let cfg = config();
    let w = cfg.weights().unwrap();
    let mut detail = Vec::new();
    for (geo, lo, hi) in [("ES", 1.75, 1.77), ("IT", 1.53, 1.55)] {
        let a = run.normalized.scores_for(geo, 2014, &cfg.indicator_set);
        let b = run.normalized.scores_for(geo, 2021, &cfg.indicator_set);
        let d = decompose_temporal(&a, &b, &w).map_err(|e| e.to_string())?;
        let oracle = run.index.value(geo, 2021).unwrap() / run.index.value(geo, 2014).unwrap();
        ensure((d.total_factor - oracle).abs() <= 1e-9, || {
            format!("{geo}: {} vs index ratio {oracle}", d.total_factor)
        })?;
        ensure((lo..=hi).contains(&d.total_factor), || {
            format!("{geo}: factor {:.4} outside [{lo}, {hi}]", d.total_factor)
        })?;
        detail.push(format!("{geo} {:.4}", d.total_factor));
    }
    Ok(detail.join(", "))
}

fn vectors(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    n.prop_flat_map(|n| {
        (
            vec(0.1f64..=100.0, n),
            vec(0.1f64..=100.0, n),
            vec(0.01f64..=10.0, n),
        )
    })
}

fn keyed(xs: &[f64]) -> BTreeMap<IndicatorCode, f64> {
    xs.iter().enumerate().map(|(i, v)| (code(&format!("X{i}")), *v)).collect()
}

fn decomposition_identities() -> Outcome {
    let mut r = runner(1000);
    r.run(&vectors(1..=16), |(a, b, w)| {
        let weights = Weights::new(keyed(&w)).unwrap();
        let oracle_ratio = oracle_gm(&b, &w) / oracle_gm(&a, &w);

        let t = decompose_temporal(&keyed(&a), &keyed(&b), &weights).unwrap();
        let log_sum: f64 = t.contributions.iter().map(|c| c.log_contribution).sum();
        prop_assert!((log_sum - oracle_ratio.ln()).abs() <= 1e-9, "log sum {log_sum} vs {}", oracle_ratio.ln());

        let x = decompose_cross_country(&keyed(&b), &keyed(&a), &weights).unwrap();
        let product: f64 = x.contributions.iter().map(|c| c.factor).product();
        prop_assert!((product - oracle_ratio).abs() <= 1e-9, "factor product {product} vs {oracle_ratio}");
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    Ok("1000 random cases: log sum and factor product match the index ratio to 1e-9".into())
}

fn geometric_mean_properties() -> Outcome {
    let mut r = runner(1000);
    let strategy = vectors(1..=16).prop_flat_map(|(s, _, w)| {
        let n = s.len();
        (Just(s), Just(w), 0..n, 0..n, 0.1f64..=10.0)
    });
    r.run(&strategy, |(s, w, i, rot, f)| {
        let g = weighted_geometric_mean(&s, &w).unwrap();
        let lo = s.iter().cloned().fold(f64::MAX, f64::min);
        let hi = s.iter().cloned().fold(f64::MIN, f64::max);
        prop_assert!(lo <= g && g <= hi, "internality: {g} not in [{lo}, {hi}]");

        let (mut ps, mut pw) = (s.clone(), w.clone());
        ps.reverse();
        pw.reverse();
        ps.rotate_left(rot);
        pw.rotate_left(rot);
        let gp = weighted_geometric_mean(&ps, &pw).unwrap();
        prop_assert!((gp - g).abs() <= 1e-12 * g, "permutation: {gp} vs {g}");

        let mut scaled = s.clone();
        scaled[i] *= f;
        let gs = weighted_geometric_mean(&scaled, &w).unwrap();
        let share = w[i] / w.iter().sum::<f64>();
        let expected = f.powf(share);
        prop_assert!((gs / g - expected).abs() <= 1e-9 * expected, "impact: {} vs {expected}", gs / g);

        let am = s.iter().zip(&w).map(|(x, v)| x * v).sum::<f64>() / w.iter().sum::<f64>();
        prop_assert!(g <= am * (1.0 + 1e-12), "GM {g} above AM {am}");
        if hi - lo > 1e-6 * hi {
            prop_assert!(g < am, "GM {g} equals AM {am} for unequal scores");
        }
        Ok(())
    })
    .map_err(|e| e.to_string())?;

    let mut r = runner(200);
    r.run(&(0.1f64..=100.0, vec(0.01f64..=10.0, 1..=16)), |(x, w)| {
        let s = vec![x; w.len()];
        let g = weighted_geometric_mean(&s, &w).unwrap();
        let am = s.iter().zip(&w).map(|(x, v)| x * v).sum::<f64>() / w.iter().sum::<f64>();
        prop_assert!((g - am).abs() <= 1e-12 * am, "equal scores: GM {g} vs AM {am}");
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    Ok("internality, permutation invariance, equal-percentage impact, GM <= AM over 1200 cases".into())
}

fn mapping_reports() -> Outcome {
    let cfg = config();
    let cat = MappingCatalog::from_json(open("pnrr_catalog.json"), cfg.proxies.clone(), cfg.catalog().unwrap())
        .map_err(|e| e.to_string())?;
    let cov = coverage_report(&cat, GroupBy::MissionComponent);
    let t = &cov.total;
    ensure(t.n_measures() == 285 && t.n_with_ic == 155, || {
        format!("{} measures, {} with indicator", t.n_measures(), t.n_with_ic)
    })?;
    ensure(t.share.round() == 54.0, || format!("share {}", t.share))?;
    let m3c1 = cov.rows.iter().find(|r| r.group == "M3C1").ok_or("no M3C1 row")?;
    ensure(m3c1.n_measures() == 18 && m3c1.share == 0.0, || format!("M3C1 {m3c1:?}"))?;
    let summed: usize = cov.rows.iter().map(|r| r.n_measures()).sum();
    ensure(summed == 285, || format!("rows sum to {summed}"))?;

    let occ = occurrence_matrix(&cat, GroupBy::MissionComponent);
    let c10 = occ.column_total(&code("C10")).unwrap_or(0);
    ensure(occ.grand_total == 646 && c10 == 288, || {
        format!("occurrences {} with C10 {c10}", occ.grand_total)
    })?;

    let fin = allocate_finance_by_goal(&cat);
    ensure((fin.total - 191_500.0).abs() < 0.5, || format!("total {}", fin.total))?;
    let share = |g: u8| round1(fin.goal(g).unwrap().share);
    ensure(share(9) == 30.0 && share(7) == 17.9, || {
        format!("goal 9 {} goal 7 {}", share(9), share(7))
    })?;
    let sum = fin.rounded_share_sum();
    ensure((sum - 100.0).abs() <= 0.3, || format!("rounded shares sum to {sum}"))?;
    Ok(format!("285/155/54%, M3C1 0%, 646 with C10 288, goal 9 30.0%, goal 7 17.9%, shares sum {sum:.1}"))
}

fn carry_forward() -> Outcome {
    let raw = panel();
    let targets = [code("C3"), code("C12")];
    let missing: BTreeSet<(String, String)> = raw
        .indicators()
        .iter()
        .flat_map(|c| raw.geos().iter().map(move |g| (c.clone(), g.clone())))
        .filter(|(c, g)| raw.get(c, g, 2021).is_none())
        .map(|(c, g)| (c.to_string(), g))
        .collect();
    let expected: BTreeSet<(String, String)> = ["C3", "C12"]
        .iter()
        .flat_map(|c| ["DE", "ES", "FR", "IT"].map(|g| (c.to_string(), g.to_string())))
        .collect();
    ensure(missing == expected, || format!("fixture gaps in 2021: {missing:?}"))?;

    let (filled, warnings) = impute_locf(&raw, 2021, &targets).map_err(|e| e.to_string())?;
    ensure(filled.len() == raw.len() + 8 && warnings.len() == 8, || {
        format!("{} cells added, {} warnings", filled.len() - raw.len(), warnings.len())
    })?;
    for w in &warnings {
        let Warning::Imputed { indicator, geo, year, from_year } = w else {
            return Err(format!("unexpected warning {w:?}"));
        };
        let got = filled.get(indicator, geo, *year).unwrap();
        let src = raw.get(indicator, geo, 2020).unwrap();
        ensure(*from_year == 2020 && got.imputed && got.value == src.value, || {
            format!("{indicator} {geo}: {got:?} from {src:?}")
        })?;
    }
    for o in raw.iter() {
        ensure(filled.get(&o.indicator, &o.geo, o.year) == Some(o), || format!("{o:?} changed"))?;
    }
    let (again, more) = impute_locf(&filled, 2021, &targets).map_err(|e| e.to_string())?;
    ensure(again == filled && more.is_empty(), || "second pass changed the panel".into())?;
    Ok("fills exactly the 8 C3/C12 cells of 2021 from 2020; idempotent".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("goalpost reproduction", goalposts_from_published_summaries),
        ("normalization golden test", normalization_golden),
        ("composite reproduction", composite_series),
        ("gap metrics", gap_ranges),
        ("growth factors", growth_factors),
        ("decomposition identities", decomposition_identities),
        ("geometric-mean properties", geometric_mean_properties),
        ("mapping reports", mapping_reports),
        ("carry-forward imputation", carry_forward),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {} {name}: {reason}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.2?}",
        criteria.len() - failed,
        start.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
