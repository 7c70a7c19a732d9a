use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use sdgs_rrf::analysis::{decompose_cross_country, decompose_temporal, gap_metrics};
use sdgs_rrf::composite::{write_index_csv, write_plot_data};
use sdgs_rrf::config::IndexConfig;
use sdgs_rrf::goalposts::{read_goalposts, read_stats, write_goalposts, write_stats};
use sdgs_rrf::ingest::{parse_panel, ColumnSchema};
use sdgs_rrf::mapping::{
    allocate_finance_by_goal, coverage_report, goals_by_mission, occurrence_matrix, GroupBy,
    MappingCatalog,
};
use sdgs_rrf::normalize::{read_normalized, write_normalized};
use sdgs_rrf::pipeline::{apply_imputation, goalposts_from_panel, goalposts_from_stats, run_index};
use sdgs_rrf::{GoalpostSet, Panel};

use crate::emit::{self, OutDir};
use crate::{DecomposeMode, Grouping, PanelInput};

pub fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

pub fn load_config(path: &Path) -> Result<IndexConfig> {
    Ok(IndexConfig::load(path)?)
}

pub fn load_panel(path: &Path) -> Result<Panel> {
    parse_panel(open(path)?, &ColumnSchema::default())
        .with_context(|| format!("reading panel {}", path.display()))
}

pub fn load_goalposts(path: &Path) -> Result<GoalpostSet> {
    read_goalposts(open(path)?).with_context(|| format!("reading goalposts {}", path.display()))
}

pub fn load_catalog(path: &Path, config: Option<&IndexConfig>) -> Result<MappingCatalog> {
    let (proxies, defs) = match config {
        Some(c) => (c.proxies.clone(), c.catalog()?),
        None => (Vec::new(), Default::default()),
    };
    MappingCatalog::from_json(open(path)?, proxies, defs)
        .with_context(|| format!("reading catalog {}", path.display()))
}

pub fn goalposts(
    panel: Option<&Path>,
    stats: Option<&Path>,
    config: &Path,
    out: &Path,
) -> Result<()> {
    let cfg = load_config(config)?;
    let out = OutDir::create(out)?;
    let mut warnings = Vec::new();
    let set = match (panel, stats) {
        (Some(p), None) => {
            let (imputed, w) = apply_imputation(&load_panel(p)?, &cfg)?;
            warnings = w;
            let (stats, set) = goalposts_from_panel(&imputed, &cfg)
                .with_context(|| format!("pooling {}", p.display()))?;
            write_stats(&stats, out.writer("stats.csv")?)?;
            set
        }
        (None, Some(s)) => {
            let stats = read_stats(open(s)?).with_context(|| format!("reading stats {}", s.display()))?;
            goalposts_from_stats(&stats, &cfg.catalog()?)?
        }
        _ => bail!("exactly one of --panel or --stats is required"),
    };
    write_goalposts(&set, out.writer("goalposts.csv")?)?;
    out.write_warnings(&warnings)
}

pub fn normalize(input: &PanelInput, goalposts: &Path, out: &Path) -> Result<()> {
    let cfg = load_config(&input.config)?;
    let panel = load_panel(&input.panel)?;
    let gp = load_goalposts(goalposts)?;
    let (imputed, mut warnings) = apply_imputation(&panel, &cfg)?;
    let (np, w) = sdgs_rrf::normalize::normalize_panel(&imputed, &gp, &cfg.catalog()?)?;
    warnings.extend(w);
    let out = OutDir::create(out)?;
    write_normalized(&np, out.writer("normalized.csv")?)?;
    out.write_warnings(&warnings)
}

pub fn composite(
    input: &PanelInput,
    goalposts: &Path,
    out: &Path,
    plot_data: bool,
    zero_floor: Option<f64>,
) -> Result<()> {
    let mut cfg = load_config(&input.config)?;
    if zero_floor.is_some() {
        cfg.zero_floor = zero_floor;
    }
    let panel = load_panel(&input.panel)?;
    let gp = load_goalposts(goalposts)?;
    let run = run_index(&panel, &gp, &cfg)?;
    let out = OutDir::create(out)?;
    write_index_csv(&run.index, out.writer("index.csv")?)?;
    if plot_data {
        write_plot_data(&run.index, &run.normalized, out.writer("plot_data.csv")?)?;
    }
    out.write_warnings(&run.warnings)
}

pub fn decompose(
    normalized: &Path,
    config: &Path,
    geo: &str,
    mode: &DecomposeMode,
    out: &Path,
) -> Result<()> {
    let cfg = load_config(config)?;
    let np = read_normalized(open(normalized)?)
        .with_context(|| format!("reading scores {}", normalized.display()))?;
    let set = &cfg.indicator_set;
    let weights = cfg.weights()?;
    let scores = |g: &str, y: i32| {
        let s = np.scores_for(g, y, set);
        if s.len() != set.len() {
            bail!("{}: incomplete scores for {g} in {y}", normalized.display());
        }
        Ok(s)
    };
    let out = OutDir::create(out)?;
    match (mode.from, mode.to, &mode.versus, mode.year) {
        (Some(from), Some(to), None, None) => {
            let d = decompose_temporal(&scores(geo, from)?, &scores(geo, to)?, &weights)?;
            emit::write_decomposition(&out, &format!("decomposition_{geo}_{from}_{to}"), &d)?;
        }
        (None, None, Some(base), Some(year)) => {
            let d = decompose_cross_country(&scores(geo, year)?, &scores(base, year)?, &weights)?;
            emit::write_decomposition(&out, &format!("decomposition_{geo}_{base}_{year}"), &d)?;
        }
        _ => bail!("use either --from/--to or --versus/--year"),
    }
    out.write_warnings(&[])
}

#[derive(Deserialize)]
struct IndexRow {
    geo: String,
    year: i32,
    index: f64,
}

pub fn read_index(path: &Path) -> Result<BTreeMap<i32, BTreeMap<String, f64>>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(open(path)?);
    let mut out: BTreeMap<i32, BTreeMap<String, f64>> = BTreeMap::new();
    for rec in rdr.deserialize::<IndexRow>() {
        let row = rec.with_context(|| format!("reading index {}", path.display()))?;
        if out.entry(row.year).or_default().insert(row.geo.clone(), row.index).is_some() {
            bail!("{}: duplicate row ({}, {})", path.display(), row.geo, row.year);
        }
    }
    Ok(out)
}

pub fn gap(index: &Path, out: &Path) -> Result<()> {
    let rows = gap_metrics(&read_index(index)?)?;
    let out = OutDir::create(out)?;
    emit::write_gaps(&out, &rows)?;
    out.write_warnings(&[])
}

pub fn write_reports(cat: &MappingCatalog, grouping: Grouping, out: &OutDir) -> Result<()> {
    let groups: &[(GroupBy, &str)] = match grouping {
        Grouping::MissionComponent => &[(GroupBy::MissionComponent, "mission_component")],
        Grouping::Administration => &[(GroupBy::Administration, "administration")],
        Grouping::Both => &[
            (GroupBy::MissionComponent, "mission_component"),
            (GroupBy::Administration, "administration"),
        ],
    };
    for (g, stem) in groups {
        emit::write_coverage(out, &format!("coverage_{stem}.csv"), &coverage_report(cat, *g))?;
        emit::write_occurrences(out, &format!("occurrences_{stem}.csv"), &occurrence_matrix(cat, *g))?;
    }
    emit::write_goals_by_mission(out, &goals_by_mission(cat))?;
    let finance = allocate_finance_by_goal(cat);
    emit::write_finance(out, &finance)?;
    out.write_warnings(&finance.warnings)
}

pub fn report(catalog: &Path, config: Option<&Path>, grouping: Grouping, out: &Path) -> Result<()> {
    let cfg = config.map(load_config).transpose()?;
    let cat = load_catalog(catalog, cfg.as_ref())?;
    let out = OutDir::create(out)?;
    write_reports(&cat, grouping, &out)
}
