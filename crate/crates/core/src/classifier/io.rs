//! Classification files: `paper_id,rank,category_code,weight,source` rows
//! plus a JSON sidecar with the method and summary counts.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Classification, ClassificationSummary, Method, PaperAssignment, Source};
use crate::csvio;
use crate::error::{Error, Result};
use crate::types::{CategoryCode, PaperId};

pub const CLASSIFICATION_HEADER: [&str; 5] =
    ["paper_id", "rank", "category_code", "weight", "source"];
pub const TRUTH_HEADER: [&str; 2] = ["paper_id", "category_code"];

/// Tolerance on per-paper weight sums when reading external files.
const READ_SUM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationSidecar {
    pub label: String,
    /// Position in the grid that produced it; orders reports.
    pub order: usize,
    pub method: Method,
    pub summary: ClassificationSummary,
}

impl Classification {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let to_io = |e: csv::Error| Error::io("classification", e.into());
        w.write_record(CLASSIFICATION_HEADER).map_err(to_io)?;
        for (paper, a) in self.iter() {
            let paper = paper.to_string();
            for (rank, &(code, weight)) in a.entries().iter().enumerate() {
                w.write_record([
                    paper.as_str(),
                    &(rank + 1).to_string(),
                    &code.to_string(),
                    &weight.to_string(),
                    a.source().as_str(),
                ])
                .map_err(to_io)?;
            }
        }
        w.flush().map_err(|e| Error::io("classification", e))
    }

    pub fn sidecar(&self, order: usize) -> ClassificationSidecar {
        ClassificationSidecar {
            label: self.label(),
            order,
            method: self.method().clone(),
            summary: self.summary().clone(),
        }
    }
}

/// Writes `<dir>/<label>.csv` and `<dir>/<label>.json`; returns the CSV path.
pub fn write_classification(c: &Classification, dir: &Path, order: usize) -> Result<PathBuf> {
    let label = c.label();
    let csv_path = dir.join(format!("{label}.csv"));
    let json_path = dir.join(format!("{label}.json"));
    let mut w = csvio::create(&csv_path)?;
    c.write_csv(&mut w)?;
    w.flush().map_err(|e| Error::io(&csv_path, e))?;
    let mut json = serde_json::to_string_pretty(&c.sidecar(order))?;
    json.push('\n');
    csvio::write_string(&json_path, &json)?;
    Ok(csv_path)
}

/// Reads a classification CSV (full format, or `paper_id,category_code`
/// truth format where a paper's rows share its unit weight equally). A
/// sibling `.json` sidecar, when present, supplies the method and summary.
pub fn read_classification(path: &Path) -> Result<Classification> {
    let mut input = csvio::open(path)?;
    let file = input.name().to_owned();
    let headers = input
        .expect_headers(&TRUTH_HEADER[..1])?
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>()
        .join(",");
    let full = CLASSIFICATION_HEADER[..4].join(",");
    let mut rows: BTreeMap<PaperId, Vec<(CategoryCode, f64, Source)>> = BTreeMap::new();
    if headers.starts_with(&full) {
        let with_source = headers.split(',').nth(4) == Some("source");
        input.for_each_row(|line, rec| {
            let paper: PaperId = csvio::field(&file, line, rec, 0, "paper_id")?;
            let code: CategoryCode = csvio::field(&file, line, rec, 2, "category_code")?;
            let weight: f64 = csvio::field(&file, line, rec, 3, "weight")?;
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(Error::parse(&file, line, format!("weight {weight} must be positive")));
            }
            let source = match rec.get(4).filter(|_| with_source) {
                None | Some("reference_based") => Source::ReferenceBased,
                Some("journal_fallback") => Source::JournalFallback,
                Some(other) => {
                    return Err(Error::parse(&file, line, format!("bad source `{other}`")))
                }
            };
            rows.entry(paper).or_default().push((code, weight, source));
            Ok(())
        })?;
    } else if headers == TRUTH_HEADER.join(",") {
        input.for_each_row(|line, rec| {
            let paper: PaperId = csvio::field(&file, line, rec, 0, "paper_id")?;
            let code: CategoryCode = csvio::field(&file, line, rec, 1, "category_code")?;
            rows.entry(paper)
                .or_default()
                .push((code, 1.0, Source::ReferenceBased));
            Ok(())
        })?;
        for entries in rows.values_mut() {
            let share = 1.0 / entries.len() as f64;
            entries.iter_mut().for_each(|e| e.1 = share);
        }
    } else {
        return Err(Error::parse(
            &file,
            1,
            format!(
                "expected header `{}` or `{}`",
                CLASSIFICATION_HEADER.join(","),
                TRUTH_HEADER.join(",")
            ),
        ));
    }

    let mut assignments = Vec::with_capacity(rows.len());
    for (paper, entries) in rows {
        let source = entries[0].2;
        let mut pairs: Vec<(CategoryCode, f64)> = entries.iter().map(|e| (e.0, e.1)).collect();
        pairs.sort_by_key(|p| p.0);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidClassification(format!(
                "{file}: paper {paper} lists a category twice"
            )));
        }
        let a = PaperAssignment::new(pairs, source);
        if (a.total() - 1.0).abs() > READ_SUM_TOL {
            return Err(Error::InvalidClassification(format!(
                "{file}: weights of paper {paper} sum to {}",
                a.total()
            )));
        }
        assignments.push((paper, a));
    }

    let sidecar_path = path.with_extension("json");
    if sidecar_path.exists() {
        let raw = std::fs::read_to_string(&sidecar_path).map_err(|e| Error::io(&sidecar_path, e))?;
        let sidecar: ClassificationSidecar = serde_json::from_str(&raw)?;
        Classification::new(sidecar.method, assignments, sidecar.summary)
    } else {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "external".to_owned());
        Classification::from_assignments(Method::External { name }, assignments)
    }
}

/// Reads the sidecar next to a classification CSV.
pub fn read_sidecar(csv_path: &Path) -> Result<ClassificationSidecar> {
    let path = csv_path.with_extension("json");
    let raw = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(serde_json::from_str(&raw)?)
}
