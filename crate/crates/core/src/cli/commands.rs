use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::tables::{num, opt, Table};
use super::{Settings, SynthArgs};
use crate::classifier::{
    read_classification, read_sidecar, write_classification, Classification, ClassificationConfig,
    Classifier, Method,
};
use crate::corpus::{ActiveRefDistribution, Corpus, IngestReport};
use crate::csvio;
use crate::error::{Error, Result};
use crate::metrics::{
    self, AssignmentProfile, LowReferenceCell, RefScope, RefWindow, ReferenceCv, SizeStats,
};
use crate::scheme::CategoryScheme;
use crate::synthgen;
use crate::types::PaperId;

const REF_CV_VARIANTS: [(RefScope, RefWindow, &str); 6] = [
    (RefScope::ResolvedOnly, RefWindow::All, "resolved"),
    (RefScope::ResolvedOnly, RefWindow::Previous(3), "resolved_prev3"),
    (RefScope::ResolvedOnly, RefWindow::Previous(2), "resolved_prev2"),
    (RefScope::AllRefs, RefWindow::All, "all"),
    (RefScope::AllRefs, RefWindow::Previous(3), "all_prev3"),
    (RefScope::AllRefs, RefWindow::Previous(2), "all_prev2"),
];

fn load_inputs(s: &Settings) -> Result<(CategoryScheme, Corpus, IngestReport)> {
    let scheme = CategoryScheme::load(s.required(&s.scheme, "scheme")?)?;
    let (corpus, report) = Corpus::ingest_with_report(
        s.required(&s.papers, "papers")?,
        s.required(&s.journals, "journals")?,
        s.required(&s.edges, "edges")?,
        &scheme,
    )?;
    info!(
        "corpus: {} papers, {} resolved and {} unresolved edges, {} rejected",
        report.papers, report.resolved_edges, report.unresolved_edges, report.rejected_edges
    );
    Ok((scheme, corpus, report))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    csvio::write_string(path, &text)
}

fn active_ref_table(dist: &ActiveRefDistribution) -> Table {
    let mut t = Table::new(["more_than", "gen1_pct", "gen2_pct", "gen12_pct"]);
    for (n, row) in dist.rows.iter().enumerate() {
        t.row([n.to_string(), num(row[0]), num(row[1]), num(row[2])]);
    }
    t
}

pub fn ingest(s: &Settings) -> Result<()> {
    let (scheme, corpus, report) = load_inputs(s)?;
    let dist = corpus.active_reference_distribution()?;
    write_json(
        &s.out.join("corpus_summary.json"),
        &json!({
            "ingest": report,
            "citable_papers": dist.papers,
            "targets": scheme.target_count(),
            "active_reference_distribution": dist,
        }),
    )?;
    active_ref_table(&dist).write(&s.out.join("active_refs.csv"))
}

/// Removes classification files left by earlier runs.
fn clear_classifications(dir: &Path) -> Result<()> {
    let Ok(entries) = std::fs::read_dir(dir) else {
        return Ok(());
    };
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let ext = path.extension().and_then(|e| e.to_str());
        if matches!(ext, Some("csv" | "json")) {
            std::fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(())
}

pub fn classify(s: &Settings) -> Result<Vec<Classification>> {
    let grid = s.grid()?;
    let (scheme, corpus, _) = load_inputs(s)?;
    let results = Classifier::new(&corpus, &scheme).run_grid(&grid)?;
    let dir = s.classifications_dir();
    clear_classifications(&dir)?;
    let mut t = Table::new([
        "classification",
        "citable_papers",
        "classified",
        "reference_based",
        "journal_fallback",
        "unclassifiable",
    ]);
    for (order, c) in results.iter().enumerate() {
        write_classification(c, &dir, order)?;
        let m = c.summary();
        info!("{}: {} papers ({} by references)", c.label(), m.classified, m.reference_based);
        t.row([
            c.label(),
            m.citable_papers.to_string(),
            m.classified.to_string(),
            m.reference_based.to_string(),
            m.journal_fallback.to_string(),
            m.unclassifiable.to_string(),
        ]);
    }
    t.write(&s.out.join("classification_summary.csv"))?;
    Ok(results)
}

/// Classifications in the output directory, in grid order.
fn load_classifications(s: &Settings) -> Result<Vec<Classification>> {
    let dir = s.classifications_dir();
    let mut paths: Vec<PathBuf> = match std::fs::read_dir(&dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "csv"))
            .collect(),
        Err(_) => Vec::new(),
    };
    if paths.is_empty() {
        return Err(Error::Config(format!(
            "no classifications found in {}",
            dir.display()
        )));
    }
    paths.sort();
    let mut loaded = paths
        .iter()
        .map(|p| {
            let order = read_sidecar(p).map(|sc| sc.order).unwrap_or(usize::MAX);
            Ok((order, read_classification(p)?))
        })
        .collect::<Result<Vec<_>>>()?;
    loaded.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.label().cmp(&b.1.label())));
    Ok(loaded.into_iter().map(|(_, c)| c).collect())
}

fn labels(cs: &[&Classification]) -> Vec<String> {
    cs.iter().map(|c| c.label()).collect()
}

fn size_row(label: &str, stats: Option<&SizeStats>) -> Vec<String> {
    let mut row = vec![label.to_owned()];
    match stats {
        Some(s) => row.extend([
            s.papers.to_string(),
            s.n_categories.to_string(),
            num(s.max_weight),
            num(s.min_weight),
            num(s.cv),
            num(s.granularity),
        ]),
        None => row.extend(std::iter::repeat_n(String::new(), 6)),
    }
    row
}

fn size_table(labels: &[String], stats: &[Option<SizeStats>]) -> Table {
    let mut t = Table::new([
        "classification",
        "papers",
        "categories",
        "max_cat",
        "min_cat",
        "cv",
        "granularity",
    ]);
    for (l, s) in labels.iter().zip(stats) {
        t.row(size_row(l, s.as_ref()));
    }
    t
}

fn profile_table(labels: &[String], profiles: &[Option<AssignmentProfile>]) -> Table {
    let mut t = Table::new([
        "classification",
        "assignments",
        "avg_per_paper",
        "pct_1",
        "pct_2",
        "pct_3",
        "pct_4",
        "pct_5_plus",
    ]);
    for (l, p) in labels.iter().zip(profiles) {
        let mut row = vec![l.clone()];
        match p {
            Some(p) => {
                row.push(p.total_assignments.to_string());
                row.push(num(p.avg_per_paper));
                row.extend(p.pct.iter().map(|&x| num(x)));
            }
            None => row.extend(std::iter::repeat_n(String::new(), 7)),
        }
        t.row(row);
    }
    t
}

/// One row per area, one column per classification.
fn area_table(
    scheme: &CategoryScheme,
    labels: &[String],
    dists: &[Option<BTreeMap<crate::types::AreaCode, f64>>],
) -> Table {
    let mut t = Table::new(["area", "description"].into_iter().map(String::from).chain(labels.iter().cloned()));
    for area in scheme.areas() {
        let mut row = vec![area.code.to_string(), area.name.clone()];
        for d in dists {
            row.push(match d {
                Some(d) => num(d.get(&area.code).copied().unwrap_or(0.0)),
                None => String::new(),
            });
        }
        t.row(row);
    }
    t
}

fn correlation_table(m: &metrics::CorrelationMatrix) -> Table {
    let mut t = Table::new(std::iter::once(String::new()).chain(m.labels.iter().cloned()));
    for (label, row) in m.labels.iter().zip(&m.values) {
        t.row(std::iter::once(label.clone()).chain(row.iter().map(|&v| opt(v))));
    }
    t
}

fn low_reference_table(report: &metrics::LowReferenceReport) -> Table {
    let mut header = vec!["area".to_owned(), "description".to_owned()];
    for g in ["gen1", "gen2", "gen12"] {
        header.extend(["weight", "pct", "ni"].map(|c| format!("{g}_{c}")));
    }
    let mut t = Table::new(header);
    let cells = |cs: &[LowReferenceCell; 3]| {
        cs.iter()
            .flat_map(|c| [num(c.weight), num(c.pct), num(c.mean_ni)])
            .collect::<Vec<_>>()
    };
    for row in &report.rows {
        t.row([row.area.to_string(), row.name.clone()].into_iter().chain(cells(&row.cells)));
    }
    t.row(["Total".to_owned(), String::new()].into_iter().chain(cells(&report.total)));
    t
}

#[derive(Serialize)]
struct EvaluationEntry {
    label: String,
    summary: crate::classifier::ClassificationSummary,
    size_stats: Option<SizeStats>,
    size_stats_gated: Option<SizeStats>,
    assignment_profile: AssignmentProfile,
    reference_cv: BTreeMap<&'static str, ReferenceCv>,
}

pub fn evaluate(s: &Settings) -> Result<()> {
    let classifications = load_classifications(s)?;
    let (scheme, corpus, _) = load_inputs(s)?;
    let dir = s.out.join("evaluation");
    let refs: Vec<&Classification> = classifications.iter().collect();
    let names = labels(&refs);

    let dist = corpus.active_reference_distribution()?;
    active_ref_table(&dist).write(&dir.join("active_refs.csv"))?;

    let min_refs = ClassificationConfig::MIN_ACTIVE_REFS;
    let unsplit = Classifier::new(&corpus, &scheme).run(&Method::JournalBaselineUnsplit)?;
    let low = metrics::low_reference_report(&corpus, &scheme, &unsplit, min_refs)?;
    low_reference_table(&low).write(&dir.join("low_refs.csv"))?;
    let impact = metrics::normalized_impact(&corpus, &unsplit)?;

    let gated: BTreeSet<PaperId> = corpus
        .papers()
        .iter()
        .filter(|p| p.is_citable)
        .map(|p| Ok((p.id, corpus.active_reference_counts(p.id)?)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, n)| n.n1 >= min_refs && n.n2 >= min_refs)
        .map(|(id, _)| id)
        .collect();

    let entries: Vec<EvaluationEntry> = refs
        .par_iter()
        .map(|c| {
            let mut reference_cv = BTreeMap::new();
            for (scope, window, name) in REF_CV_VARIANTS {
                reference_cv.insert(name, metrics::reference_cv(c, &corpus, scope, window)?);
            }
            Ok(EvaluationEntry {
                label: c.label(),
                summary: c.summary().clone(),
                size_stats: metrics::size_stats(c).ok(),
                size_stats_gated: metrics::size_stats(&c.restricted(|p| gated.contains(&p))).ok(),
                assignment_profile: metrics::assignment_profile(c)?,
                reference_cv,
            })
        })
        .collect::<Result<_>>()?;

    let all: Vec<_> = entries.iter().map(|e| e.size_stats.clone()).collect();
    size_table(&names, &all).write(&dir.join("size_stats.csv"))?;
    let gated_stats: Vec<_> = entries.iter().map(|e| e.size_stats_gated.clone()).collect();
    size_table(&names, &gated_stats).write(&dir.join("size_stats_gated.csv"))?;

    let mut cv_table = Table::new(
        std::iter::once("classification").chain(REF_CV_VARIANTS.iter().map(|v| v.2)),
    );
    for e in &entries {
        cv_table.row(
            std::iter::once(e.label.clone())
                .chain(REF_CV_VARIANTS.iter().map(|v| opt(e.reference_cv[v.2].mean_cv))),
        );
    }
    cv_table.write(&dir.join("reference_cv.csv"))?;

    let profiles: Vec<_> = entries.iter().map(|e| Some(e.assignment_profile.clone())).collect();
    profile_table(&names, &profiles).write(&dir.join("assignment_profile.csv"))?;

    let areas = refs
        .iter()
        .map(|c| metrics::area_distribution(c, &scheme).map(Some))
        .collect::<Result<Vec<_>>>()?;
    area_table(&scheme, &names, &areas).write(&dir.join("area_distribution.csv"))?;

    let per_year = refs
        .iter()
        .map(|c| metrics::categories_per_year(c, &corpus))
        .collect::<Result<Vec<_>>>()?;
    let years: BTreeSet<i32> = per_year.iter().flat_map(|m| m.keys().copied()).collect();
    let mut per_year_table = Table::new(std::iter::once("year".to_owned()).chain(names.iter().cloned()));
    for y in years {
        per_year_table.row(std::iter::once(y.to_string()).chain(per_year.iter().map(|m| opt(m.get(&y).copied()))));
    }
    per_year_table.write(&dir.join("categories_per_year.csv"))?;

    let bands = refs
        .iter()
        .map(|c| metrics::weight_bands(c, &scheme))
        .collect::<Result<Vec<_>>>()?;
    let mut band_table = Table::new(std::iter::once("band_pct".to_owned()).chain(names.iter().cloned()));
    let mut lower = 0.0;
    for (i, &edge) in metrics::WEIGHT_BANDS.iter().enumerate() {
        band_table.row(std::iter::once(format!("[{lower},{edge})")).chain(bands.iter().map(|b| b[i].to_string())));
        lower = edge;
    }
    let last = metrics::WEIGHT_BANDS.len();
    band_table.row(std::iter::once(format!(">={lower}")).chain(bands.iter().map(|b| b[last].to_string())));
    band_table.write(&dir.join("weight_bands.csv"))?;

    let spearman = |pick: fn(&EvaluationEntry) -> Option<&SizeStats>| {
        let pairs: Vec<(f64, f64)> = entries
            .iter()
            .zip(&refs)
            .filter(|(_, c)| c.method().is_reference_based())
            .filter_map(|(e, _)| pick(e).map(|s| (s.granularity, s.cv)))
            .collect();
        let (g, cv): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        metrics::spearman(&g, &cv)
    };
    write_json(
        &dir.join("report.json"),
        &json!({
            "classifications": entries,
            "granularity_cv_spearman": spearman(|e| e.size_stats.as_ref()),
            "granularity_cv_spearman_gated": spearman(|e| e.size_stats_gated.as_ref()),
            "low_references": low,
            "normalized_impact": {
                "baseline": unsplit.label(),
                "infinite": impact.infinite,
                "undefined": impact.undefined,
                "year_means": impact.year_means,
            },
            "active_reference_distribution": dist,
        }),
    )?;
    info!("evaluation written to {}", dir.display());
    Ok(())
}

pub fn compare(s: &Settings) -> Result<()> {
    let gold_path = s.required(&s.gold, "gold")?;
    let gold = read_classification(gold_path)?;
    let classifications = load_classifications(s)?;
    let (scheme, corpus, _) = load_inputs(s)?;
    let dir = s.out.join("comparison");

    let reports = classifications
        .par_iter()
        .map(|c| metrics::compare(c, &gold))
        .collect::<Result<Vec<_>>>()?;
    let mut comparison_table = Table::new([
        "classification",
        "papers",
        "coincidence_pct",
        "avg_rank_gold_in_test",
        "gold_winners_missing",
        "avg_rank_test_in_gold",
        "test_winners_missing",
    ]);
    for (c, r) in classifications.iter().zip(&reports) {
        comparison_table.row([
            c.label(),
            r.papers.to_string(),
            num(r.coincidence_pct),
            opt(r.ranks.avg_rank_gold_in_test),
            r.ranks.gold_winners_missing.to_string(),
            opt(r.ranks.avg_rank_test_in_gold),
            r.ranks.test_winners_missing.to_string(),
        ]);
    }
    comparison_table.write(&dir.join("comparison.csv"))?;

    // Everything below is limited to the gold papers, gold listed last.
    let mut restricted: Vec<Classification> = classifications
        .iter()
        .map(|c| c.restricted(|p| gold.get(p).is_some()))
        .collect();
    restricted.push(gold.clone());
    let refs: Vec<&Classification> = restricted.iter().collect();
    let names = labels(&refs);

    let profiles: Vec<_> = refs.iter().map(|c| metrics::assignment_profile(c).ok()).collect();
    profile_table(&names, &profiles).write(&dir.join("assignment_profile.csv"))?;

    let sizes = metrics::size_correlation(&refs, None, &scheme)?;
    correlation_table(&sizes).write(&dir.join("size_correlation.csv"))?;

    let areas: Vec<_> = refs.iter().map(|c| metrics::area_distribution(c, &scheme).ok()).collect();
    area_table(&scheme, &names, &areas).write(&dir.join("area_distribution.csv"))?;

    let multi: BTreeSet<PaperId> = metrics::multidisciplinary_only_papers(&corpus, &scheme)
        .into_iter()
        .filter(|p| gold.get(*p).is_some())
        .collect();
    let multi_areas: Vec<_> = refs
        .iter()
        .map(|c| metrics::area_distribution(&c.restricted(|p| multi.contains(&p)), &scheme).ok())
        .collect();
    area_table(&scheme, &names, &multi_areas).write(&dir.join("multidisciplinary_areas.csv"))?;
    let multi_corr = metrics::size_correlation(&refs, Some(&multi), &scheme)?;
    correlation_table(&multi_corr).write(&dir.join("multidisciplinary_correlation.csv"))?;

    let retention = refs
        .iter()
        .map(|c| metrics::misc_retention(c, &corpus, &scheme))
        .collect::<Result<Vec<_>>>()?;
    let gold_rows = retention.last().expect("gold is listed");
    let mut retention_table = Table::new(
        ["area", "description", "papers"]
            .into_iter()
            .map(String::from)
            .chain(names.iter().cloned()),
    );
    for row in gold_rows {
        let name = scheme.area(row.area).map(|a| a.name.clone()).unwrap_or_default();
        retention_table.row(
            [row.area.to_string(), name, row.papers.to_string()]
                .into_iter()
                .chain(retention.iter().map(|rows| {
                    opt(rows.iter().find(|r| r.area == row.area).map(|r| r.retention_pct))
                })),
        );
    }
    retention_table.write(&dir.join("misc_retention.csv"))?;

    let by_label: Vec<_> = classifications
        .iter()
        .zip(&reports)
        .map(|(c, r)| json!({ "label": c.label(), "report": r }))
        .collect();
    write_json(
        &dir.join("comparison.json"),
        &json!({
            "gold": gold.label(),
            "gold_papers": gold.len(),
            "comparisons": by_label,
            "multidisciplinary_only_papers": multi.len(),
            "size_correlation": sizes,
            "multidisciplinary_correlation": multi_corr,
        }),
    )?;
    info!("comparison written to {}", dir.display());
    Ok(())
}

pub fn synth(s: &Settings, args: &SynthArgs) -> Result<()> {
    let mut p = s.synth.clone();
    if let Some(seed) = args.seed {
        p.seed = seed;
    }
    if let Some(n) = args.n_papers {
        p.n_papers = n;
    }
    if let Some(n) = args.n_journals {
        p.n_journals = n;
    }
    let data = if args.asjc_like {
        synthgen::generate_with_scheme(&p, &synthgen::asjc_like_scheme())?
    } else {
        synthgen::generate(&p)?
    };
    data.emit(&s.out)?;
    write_json(&s.out.join("synth_params.json"), &p)?;
    info!(
        "synthetic corpus: {} papers, {} edges in {}",
        data.corpus.paper_count(),
        data.corpus.edge_count(),
        s.out.display()
    );
    Ok(())
}

pub fn report(s: &Settings) -> Result<()> {
    classify(s)?;
    evaluate(s)?;
    if s.gold.is_some() {
        compare(s)?;
    }
    Ok(())
}
