use std::collections::BTreeSet;

use serde::Serialize;

use super::category_sizes;
use crate::classifier::{Classification, PaperAssignment};
use crate::error::{Error, Result};
use crate::scheme::CategoryScheme;
use crate::types::PaperId;

/// Only the first entries of an assignment are searched for winners.
const RANK_DEPTH: usize = 5;

fn paired<'a>(
    test: &'a Classification,
    gold: &'a Classification,
) -> Result<Vec<(&'a PaperAssignment, &'a PaperAssignment)>> {
    let pairs: Vec<_> = gold
        .iter()
        .filter_map(|(p, g)| test.get(p).map(|t| (t, g)))
        .collect();
    if pairs.is_empty() {
        Err(Error::EmptyIntersection)
    } else {
        Ok(pairs)
    }
}

/// Mean per-paper weight overlap `sum_c min(w_test(c), w_gold(c))`, as a
/// percentage, over the papers both classifications cover.
pub fn coincidence(test: &Classification, gold: &Classification) -> Result<f64> {
    let pairs = paired(test, gold)?;
    let total: f64 = pairs.iter().map(|(t, g)| overlap(t, g)).sum();
    Ok(100.0 * total / pairs.len() as f64)
}

fn overlap(a: &PaperAssignment, b: &PaperAssignment) -> f64 {
    a.entries()
        .iter()
        .map(|&(code, w)| w.min(b.weight(code)))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WinnerRanks {
    /// Mean rank of the gold winners within the test assignment.
    pub avg_rank_gold_in_test: Option<f64>,
    /// Gold winners absent from the test's first five entries.
    pub gold_winners_missing: usize,
    pub avg_rank_test_in_gold: Option<f64>,
    pub test_winners_missing: usize,
}

fn rank_stats(pairs: &[(&PaperAssignment, &PaperAssignment)]) -> (Option<f64>, usize) {
    let mut found = 0usize;
    let mut rank_sum = 0usize;
    let mut missing = 0;
    for (winners_of, ranked_in) in pairs {
        for code in winners_of.winners() {
            match ranked_in.rank_of(code).filter(|&r| r <= RANK_DEPTH) {
                Some(r) => {
                    found += 1;
                    rank_sum += r;
                }
                None => missing += 1,
            }
        }
    }
    let avg = (found > 0).then(|| rank_sum as f64 / found as f64);
    (avg, missing)
}

/// Every maximum-weight category of a paper is a winner; each contributes
/// one rank (1-based, within the first five entries) or one miss.
pub fn winner_rank_stats(test: &Classification, gold: &Classification) -> Result<WinnerRanks> {
    let pairs = paired(test, gold)?;
    let gold_first: Vec<_> = pairs.iter().map(|&(t, g)| (g, t)).collect();
    let (avg_rank_gold_in_test, gold_winners_missing) = rank_stats(&gold_first);
    let (avg_rank_test_in_gold, test_winners_missing) = rank_stats(&pairs);
    Ok(WinnerRanks {
        avg_rank_gold_in_test,
        gold_winners_missing,
        avg_rank_test_in_gold,
        test_winners_missing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub papers: usize,
    pub coincidence_pct: f64,
    #[serde(flatten)]
    pub ranks: WinnerRanks,
}

pub fn compare(test: &Classification, gold: &Classification) -> Result<ComparisonReport> {
    Ok(ComparisonReport {
        papers: paired(test, gold)?.len(),
        coincidence_pct: coincidence(test, gold)?,
        ranks: winner_rank_stats(test, gold)?,
    })
}

/// Pearson correlation; `None` when either input has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "pearson: length mismatch");
    let n = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    pearson(&ranks(x), &ranks(y))
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    /// `None` marks an undefined entry (a zero-variance size vector).
    pub values: Vec<Vec<Option<f64>>>,
}

/// Pearson correlations between the category-size vectors of several
/// classifications, over every target of the scheme (zeros included) and
/// optionally restricted to a paper subset. Weight on non-target codes is
/// ignored.
pub fn size_correlation(
    classifications: &[&Classification],
    papers: Option<&BTreeSet<PaperId>>,
    scheme: &CategoryScheme,
) -> Result<CorrelationMatrix> {
    if classifications.len() < 2 {
        return Err(Error::Config(
            "size correlation needs at least two classifications".into(),
        ));
    }
    let vectors: Vec<Vec<f64>> = classifications
        .iter()
        .map(|c| {
            let sizes = match papers {
                Some(keep) => category_sizes(&c.restricted(|p| keep.contains(&p))),
                None => category_sizes(c),
            };
            scheme
                .targets()
                .iter()
                .map(|code| sizes.get(code).copied().unwrap_or(0.0))
                .collect()
        })
        .collect();
    let values = vectors
        .iter()
        .enumerate()
        .map(|(i, a)| {
            vectors
                .iter()
                .enumerate()
                .map(|(j, b)| {
                    let r = pearson(a, b);
                    if i == j {
                        r.map(|_| 1.0)
                    } else {
                        r
                    }
                })
                .collect()
        })
        .collect();
    Ok(CorrelationMatrix {
        labels: classifications.iter().map(|c| c.label()).collect(),
        values,
    })
}
