use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::classifier::Classification;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::scheme::CategoryScheme;
use crate::types::{AreaCode, CategoryCode, PaperId};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedImpact {
    /// Per classified paper; `None` when its expected citations are zero.
    pub per_paper: Vec<(PaperId, Option<f64>)>,
    /// Papers with citations but zero expected citations.
    pub infinite: usize,
    /// Papers with neither citations nor expected citations.
    pub undefined: usize,
    /// Mean NI per publication year, weighted by expected citations.
    pub year_means: BTreeMap<i32, f64>,
}

impl NormalizedImpact {
    pub fn get(&self, id: PaperId) -> Option<f64> {
        self.per_paper
            .binary_search_by_key(&id, |e| e.0)
            .ok()
            .and_then(|i| self.per_paper[i].1)
    }
}

/// Citations over the citations expected from the paper's categories and
/// year: `sum_c w(c) * mu(c, year)`, where `mu` is the membership-weighted
/// mean citation count of the category in that year.
pub fn normalized_impact(corpus: &Corpus, c: &Classification) -> Result<NormalizedImpact> {
    if c.is_empty() {
        return Err(Error::EmptyClassification);
    }
    let mut totals: HashMap<(CategoryCode, i32), (f64, f64)> = HashMap::new();
    for (paper, a) in c.iter() {
        let record = corpus.paper(paper)?;
        for &(code, w) in a.entries() {
            let slot = totals.entry((code, record.year)).or_insert((0.0, 0.0));
            slot.0 += w * record.citations as f64;
            slot.1 += w;
        }
    }
    let mu: HashMap<(CategoryCode, i32), f64> = totals
        .into_iter()
        .map(|(k, (cites, weight))| (k, cites / weight))
        .collect();

    let mut per_paper = Vec::with_capacity(c.len());
    let mut infinite = 0;
    let mut undefined = 0;
    let mut year_sums: BTreeMap<i32, (f64, f64)> = BTreeMap::new();
    for (paper, a) in c.iter() {
        let record = corpus.paper(paper)?;
        let cites = record.citations as f64;
        let expected: f64 = a
            .entries()
            .iter()
            .map(|&(code, w)| w * mu[&(code, record.year)])
            .sum();
        let ni = if expected > 0.0 {
            let ni = cites / expected;
            let slot = year_sums.entry(record.year).or_insert((0.0, 0.0));
            slot.0 += expected * ni;
            slot.1 += expected;
            Some(ni)
        } else {
            if cites > 0.0 {
                infinite += 1;
            } else {
                undefined += 1;
            }
            None
        };
        per_paper.push((paper, ni));
    }
    Ok(NormalizedImpact {
        per_paper,
        infinite,
        undefined,
        year_means: year_sums
            .into_iter()
            .map(|(y, (num, den))| (y, num / den))
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct LowReferenceCell {
    /// Weight of the gate-failing papers.
    pub weight: f64,
    /// That weight as a percentage of the row's total weight.
    pub pct: f64,
    /// Membership-weighted mean NI of the failing papers; 0 when none fail.
    pub mean_ni: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowReferenceRow {
    pub area: AreaCode,
    pub name: String,
    /// First generation, second generation and both combined.
    pub cells: [LowReferenceCell; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowReferenceReport {
    pub rows: Vec<LowReferenceRow>,
    /// Totals; `pct` here is the percentage of papers failing the gate.
    pub total: [LowReferenceCell; 3],
}

#[derive(Default, Clone, Copy)]
struct Acc {
    weight: f64,
    ni_weight: f64,
    ni_sum: f64,
}

impl Acc {
    fn add(&mut self, w: f64, ni: Option<f64>) {
        self.weight += w;
        if let Some(ni) = ni {
            self.ni_weight += w;
            self.ni_sum += w * ni;
        }
    }

    fn cell(&self, base: f64) -> LowReferenceCell {
        LowReferenceCell {
            weight: self.weight,
            pct: if base > 0.0 { 100.0 * self.weight / base } else { 0.0 },
            mean_ni: if self.ni_weight > 0.0 { self.ni_sum / self.ni_weight } else { 0.0 },
        }
    }
}

/// Papers of `baseline` with fewer than `min_active_refs` active references
/// in each generation column, aggregated by area of the baseline's
/// categories. NI is normalized against the baseline itself.
pub fn low_reference_report(
    corpus: &Corpus,
    scheme: &CategoryScheme,
    baseline: &Classification,
    min_active_refs: usize,
) -> Result<LowReferenceReport> {
    let impact = normalized_impact(corpus, baseline)?;
    let mut area_weight: BTreeMap<AreaCode, f64> = BTreeMap::new();
    let mut failing: BTreeMap<AreaCode, [Acc; 3]> = BTreeMap::new();
    let mut total = [Acc::default(); 3];
    let mut papers_failing = [0usize; 3];
    for ((paper, a), &(_, ni)) in baseline.iter().zip(&impact.per_paper) {
        let counts = corpus.active_reference_counts(paper)?;
        let fails = [counts.n1, counts.n2, counts.n12].map(|n| n < min_active_refs);
        for &(code, w) in a.entries() {
            let area = scheme.area_of(code)?;
            *area_weight.entry(area).or_insert(0.0) += w;
            let row = failing.entry(area).or_default();
            for g in 0..3 {
                if fails[g] {
                    row[g].add(w, ni);
                }
            }
        }
        for g in 0..3 {
            if fails[g] {
                papers_failing[g] += 1;
                total[g].add(a.total(), ni);
            }
        }
    }
    let rows = scheme
        .areas()
        .iter()
        .filter_map(|area| {
            let base = *area_weight.get(&area.code)?;
            let acc = failing[&area.code];
            Some(LowReferenceRow {
                area: area.code,
                name: area.name.clone(),
                cells: acc.map(|a| a.cell(base)),
            })
        })
        .collect();
    let papers = baseline.len() as f64;
    let total = std::array::from_fn(|g| {
        let mut cell = total[g].cell(papers);
        cell.pct = 100.0 * papers_failing[g] as f64 / papers;
        cell
    });
    Ok(LowReferenceReport { rows, total })
}
