use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::classifier::Classification;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::types::CategoryCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RefScope {
    /// References to papers in the corpus.
    ResolvedOnly,
    /// Also references that could not be resolved.
    AllRefs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RefWindow {
    All,
    /// Cited papers from the `n` years before the citing year.
    Previous(u32),
}

impl fmt::Display for RefScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RefScope::ResolvedOnly => "resolved",
            RefScope::AllRefs => "all",
        })
    }
}

impl fmt::Display for RefWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefWindow::All => f.write_str("all_years"),
            RefWindow::Previous(n) => write!(f, "prev{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceCv {
    /// Unweighted mean over categories of the membership-weighted CV;
    /// `None` when every category is excluded.
    pub mean_cv: Option<f64>,
    pub categories: usize,
    /// Categories left out because their mean reference count is zero.
    pub excluded: usize,
}

/// Reference count of the paper at `pos`. Unresolved references carry no
/// year, so windows only ever count resolved ones.
fn reference_count(corpus: &Corpus, pos: usize, scope: RefScope, window: RefWindow) -> usize {
    let refs = corpus.refs_at(pos);
    match window {
        RefWindow::All => {
            let unresolved = match scope {
                RefScope::ResolvedOnly => 0,
                RefScope::AllRefs => corpus.unresolved_count_at(pos),
            };
            refs.len() + unresolved
        }
        RefWindow::Previous(n) => {
            let year = corpus.papers()[pos].year;
            refs.iter()
                .filter(|&&r| {
                    let cited = corpus.papers()[r as usize].year;
                    cited < year && cited >= year - n as i32
                })
                .count()
        }
    }
}

/// Per category, the CV of its papers' reference counts weighted by
/// membership (population convention), averaged over categories.
pub fn reference_cv(
    c: &Classification,
    corpus: &Corpus,
    scope: RefScope,
    window: RefWindow,
) -> Result<ReferenceCv> {
    if c.is_empty() {
        return Err(Error::EmptyClassification);
    }
    // (sum w, sum w x, sum w (x - mean)^2)
    let mut moments: BTreeMap<CategoryCode, (f64, f64, f64)> = BTreeMap::new();
    let mut counts: Vec<(f64, &[(CategoryCode, f64)])> = Vec::with_capacity(c.len());
    for (paper, a) in c.iter() {
        let x = reference_count(corpus, corpus.position(paper)?, scope, window) as f64;
        counts.push((x, a.entries()));
        for &(code, w) in a.entries() {
            let m = moments.entry(code).or_insert((0.0, 0.0, 0.0));
            m.0 += w;
            m.1 += w * x;
        }
    }
    // Second pass around the mean for numerical stability.
    for (x, entries) in &counts {
        for &(code, w) in entries.iter() {
            let m = moments.get_mut(&code).expect("category seen in first pass");
            let mean = m.1 / m.0;
            m.2 += w * (x - mean).powi(2);
        }
    }
    let mut sum = 0.0;
    let mut categories = 0;
    let mut excluded = 0;
    for (sw, swx, ssd) in moments.into_values() {
        let mean = swx / sw;
        if mean > 0.0 {
            sum += (ssd / sw).sqrt() / mean;
            categories += 1;
        } else {
            excluded += 1;
        }
    }
    Ok(ReferenceCv {
        mean_cv: (categories > 0).then(|| sum / categories as f64),
        categories,
        excluded,
    })
}
