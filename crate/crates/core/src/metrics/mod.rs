//! Evaluation of classifications: category sizes and granularity, reference
//! homogeneity, agreement with a gold standard, area aggregation,
//! miscellaneous/multidisciplinary reassignment and normalized impact.
//!
//! All functions are pure and iterate papers in ascending id order, so their
//! floating-point results are reproducible bit for bit.

mod compare;
mod impact;
mod refcv;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::classifier::Classification;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::scheme::CategoryScheme;
use crate::types::{AreaCode, CategoryCode, PaperId};

pub use compare::{
    coincidence, compare, pearson, size_correlation, spearman, winner_rank_stats,
    ComparisonReport, CorrelationMatrix, WinnerRanks,
};
pub use impact::{
    low_reference_report, normalized_impact, LowReferenceCell, LowReferenceReport,
    LowReferenceRow, NormalizedImpact,
};
pub use refcv::{reference_cv, ReferenceCv, RefScope, RefWindow};

/// Summed weight per category.
pub fn category_sizes(c: &Classification) -> BTreeMap<CategoryCode, f64> {
    let mut sizes = BTreeMap::new();
    for (_, a) in c.iter() {
        for &(code, w) in a.entries() {
            *sizes.entry(code).or_insert(0.0) += w;
        }
    }
    sizes
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeStats {
    /// Classified papers.
    pub papers: usize,
    /// Categories with nonzero summed weight.
    pub n_categories: usize,
    pub max_weight: f64,
    pub min_weight: f64,
    /// Population coefficient of variation of the nonzero category sizes.
    pub cv: f64,
    /// Papers over the sum of squared category sizes.
    pub granularity: f64,
}

pub fn size_stats(c: &Classification) -> Result<SizeStats> {
    let sizes: Vec<f64> = category_sizes(c).into_values().filter(|&w| w > 0.0).collect();
    if sizes.is_empty() {
        return Err(Error::EmptyClassification);
    }
    let n = sizes.len() as f64;
    let mean = sizes.iter().sum::<f64>() / n;
    let var = sizes.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / n;
    let sum_sq: f64 = sizes.iter().map(|w| w * w).sum();
    Ok(SizeStats {
        papers: c.len(),
        n_categories: sizes.len(),
        max_weight: sizes.iter().copied().fold(f64::MIN, f64::max),
        min_weight: sizes.iter().copied().fold(f64::MAX, f64::min),
        cv: var.sqrt() / mean,
        granularity: c.len() as f64 / sum_sq,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssignmentProfile {
    pub papers: usize,
    pub total_assignments: usize,
    pub avg_per_paper: f64,
    /// Percentage of papers with 1, 2, 3, 4 and 5-or-more categories.
    pub pct: [f64; 5],
}

pub fn assignment_profile(c: &Classification) -> Result<AssignmentProfile> {
    if c.is_empty() {
        return Err(Error::EmptyClassification);
    }
    let mut buckets = [0usize; 5];
    let mut total = 0;
    for (_, a) in c.iter() {
        total += a.len();
        buckets[a.len().clamp(1, 5) - 1] += 1;
    }
    let papers = c.len() as f64;
    Ok(AssignmentProfile {
        papers: c.len(),
        total_assignments: total,
        avg_per_paper: total as f64 / papers,
        pct: buckets.map(|b| b as f64 * 100.0 / papers),
    })
}

/// Percentage of the total weight falling in each area.
pub fn area_distribution(
    c: &Classification,
    scheme: &CategoryScheme,
) -> Result<BTreeMap<AreaCode, f64>> {
    let mut per_area: BTreeMap<AreaCode, f64> = BTreeMap::new();
    let mut total = 0.0;
    for (code, w) in category_sizes(c) {
        *per_area.entry(scheme.area_of(code)?).or_insert(0.0) += w;
        total += w;
    }
    if total <= 0.0 {
        return Err(Error::EmptyClassification);
    }
    Ok(per_area
        .into_iter()
        .map(|(a, w)| (a, w * 100.0 / total))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MiscRetentionRow {
    pub area: AreaCode,
    pub papers: usize,
    /// Mean percentage of a paper's weight kept inside the area.
    pub retention_pct: f64,
}

/// Papers whose journal is assigned to a single misc category, by area.
pub fn misc_only_papers(
    corpus: &Corpus,
    scheme: &CategoryScheme,
) -> BTreeMap<PaperId, AreaCode> {
    corpus
        .papers()
        .iter()
        .filter_map(|p| {
            let journal = corpus.journal(p.journal)?;
            match journal.codes.as_slice() {
                [code] if scheme.is_misc(*code) && !scheme.is_multidisciplinary(*code) => {
                    Some((p.id, scheme.area_of(*code).ok()?))
                }
                _ => None,
            }
        })
        .collect()
}

/// Papers whose journal is assigned only to multidisciplinary codes.
pub fn multidisciplinary_only_papers(corpus: &Corpus, scheme: &CategoryScheme) -> BTreeSet<PaperId> {
    corpus
        .papers()
        .iter()
        .filter(|p| {
            corpus.journal(p.journal).is_some_and(|j| {
                !j.codes.is_empty() && j.codes.iter().all(|&c| scheme.is_multidisciplinary(c))
            })
        })
        .map(|p| p.id)
        .collect()
}

/// For papers from misc-only journals: how much of their weight the
/// classification keeps in the misc category's own area. Areas without such
/// papers are omitted.
pub fn misc_retention(
    c: &Classification,
    corpus: &Corpus,
    scheme: &CategoryScheme,
) -> Result<Vec<MiscRetentionRow>> {
    let origin = misc_only_papers(corpus, scheme);
    let mut acc: BTreeMap<AreaCode, (usize, f64)> = BTreeMap::new();
    for (paper, a) in c.iter() {
        let Some(&area) = origin.get(&paper) else {
            continue;
        };
        let mut inside = 0.0;
        let mut total = 0.0;
        for &(code, w) in a.entries() {
            total += w;
            if scheme.area_of(code)? == area {
                inside += w;
            }
        }
        let slot = acc.entry(area).or_insert((0, 0.0));
        slot.0 += 1;
        slot.1 += 100.0 * inside / total;
    }
    Ok(acc
        .into_iter()
        .map(|(area, (papers, sum))| MiscRetentionRow {
            area,
            papers,
            retention_pct: sum / papers as f64,
        })
        .collect())
}

/// Upper edges (in percent of total weight) of the category-size bands.
pub const WEIGHT_BANDS: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

/// Number of targets whose share of the total weight falls in each band
/// `[prev, edge)` of [`WEIGHT_BANDS`], plus a final `>= 1%` band.
/// Targets without weight fall in the first band.
pub fn weight_bands(c: &Classification, scheme: &CategoryScheme) -> Result<Vec<usize>> {
    let sizes = category_sizes(c);
    let total: f64 = sizes.values().sum();
    if total <= 0.0 {
        return Err(Error::EmptyClassification);
    }
    let mut counts = vec![0usize; WEIGHT_BANDS.len() + 1];
    for code in scheme.targets() {
        let pct = sizes.get(code).copied().unwrap_or(0.0) * 100.0 / total;
        let band = WEIGHT_BANDS
            .iter()
            .position(|&edge| pct < edge)
            .unwrap_or(WEIGHT_BANDS.len());
        counts[band] += 1;
    }
    Ok(counts)
}

/// Mean number of categories per paper, by publication year.
pub fn categories_per_year(c: &Classification, corpus: &Corpus) -> Result<BTreeMap<i32, f64>> {
    let mut acc: BTreeMap<i32, (usize, usize)> = BTreeMap::new();
    for (paper, a) in c.iter() {
        let year = corpus.paper(paper)?.year;
        let slot = acc.entry(year).or_default();
        slot.0 += 1;
        slot.1 += a.len();
    }
    Ok(acc
        .into_iter()
        .map(|(y, (n, total))| (y, total as f64 / n as f64))
        .collect())
}
