//! Reference-based fractional classification.
//!
//! A paper's category shares are built from the journal category vectors of
//! the papers it cites (first generation) and of the papers those cite
//! (second generation). Shares are then cut down to at most
//! `max_categories` entries by the threshold chain: categories are taken in
//! descending share order while each one reaches `threshold` times the
//! previously accepted one.
//!
//! Papers with too few active references keep their journal's full
//! fractional vector instead.

mod engine;
mod io;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, JournalRecord};
use crate::error::{Error, Result};
use crate::scheme::{CategoryScheme, CategoryVector};
use crate::types::{CategoryCode, PaperId};

pub use engine::{Classifier, ShareOutcome};
pub use io::{
    read_classification, read_sidecar, write_classification, ClassificationSidecar,
    CLASSIFICATION_HEADER, TRUTH_HEADER,
};

/// Relative slack on the chain comparison `next >= threshold * last`, so
/// that shares which are equal on paper but differ in the last ulp after
/// floating-point arithmetic are still accepted.
pub const CHAIN_RTOL: f64 = 1e-12;

/// Which reference generations feed the shares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GenerationScheme {
    /// First generation only.
    M1,
    /// Second generation only.
    M2,
    /// Both, combined with the generation weights.
    M3,
}

impl GenerationScheme {
    pub const ALL: [GenerationScheme; 3] = [Self::M1, Self::M2, Self::M3];

    pub fn uses_first(self) -> bool {
        matches!(self, Self::M1 | Self::M3)
    }

    pub fn uses_second(self) -> bool {
        matches!(self, Self::M2 | Self::M3)
    }
}

impl fmt::Display for GenerationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::M1 => "M1",
            Self::M2 => "M2",
            Self::M3 => "M3",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Counting {
    /// Each reference adds 1 to every target its journal is directly assigned to.
    #[serde(rename = "FC")]
    Full,
    /// Each reference adds its journal's fractional vector.
    #[serde(rename = "WC")]
    Weighted,
}

impl Counting {
    pub const ALL: [Counting; 2] = [Self::Full, Self::Weighted];

    pub(crate) fn index(self) -> usize {
        match self {
            Self::Full => 0,
            Self::Weighted => 1,
        }
    }
}

/// One point of the parameter grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationConfig {
    pub scheme: GenerationScheme,
    pub counting: Counting,
    #[serde(default)]
    pub averaged: bool,
    #[serde(default = "default_gen1")]
    pub gen1_weight: f64,
    #[serde(default = "default_gen2")]
    pub gen2_weight: f64,
    pub threshold: f64,
    #[serde(default = "default_max")]
    pub max_categories: usize,
    #[serde(default = "default_min_refs")]
    pub min_active_refs: usize,
}

fn default_gen1() -> f64 {
    ClassificationConfig::GEN1_WEIGHT
}
fn default_gen2() -> f64 {
    ClassificationConfig::GEN2_WEIGHT
}
fn default_max() -> usize {
    ClassificationConfig::MAX_CATEGORIES
}
fn default_min_refs() -> usize {
    ClassificationConfig::MIN_ACTIVE_REFS
}

impl ClassificationConfig {
    pub const GEN1_WEIGHT: f64 = 0.618;
    pub const GEN2_WEIGHT: f64 = 0.382;
    pub const MAX_CATEGORIES: usize = 5;
    pub const MIN_ACTIVE_REFS: usize = 3;
    /// Threshold presets: 1/2, 2/3 and 4/5.
    pub const THRESHOLDS: [f64; 3] = [1.0 / 2.0, 2.0 / 3.0, 4.0 / 5.0];

    pub fn new(
        scheme: GenerationScheme,
        counting: Counting,
        averaged: bool,
        threshold: f64,
    ) -> Result<Self> {
        let cfg = ClassificationConfig {
            scheme,
            counting,
            averaged,
            gen1_weight: Self::GEN1_WEIGHT,
            gen2_weight: Self::GEN2_WEIGHT,
            threshold,
            max_categories: Self::MAX_CATEGORIES,
            min_active_refs: Self::MIN_ACTIVE_REFS,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        validate_threshold(self.threshold)?;
        if self.max_categories == 0 {
            return Err(Error::Config("max_categories must be at least 1".into()));
        }
        let weights_ok = self.gen1_weight >= 0.0
            && self.gen2_weight >= 0.0
            && (self.gen1_weight + self.gen2_weight - 1.0).abs() <= 1e-12;
        if !weights_ok {
            return Err(Error::Config(format!(
                "generation weights {} + {} must be nonnegative and sum to 1",
                self.gen1_weight, self.gen2_weight
            )));
        }
        if self.averaged && self.scheme == GenerationScheme::M1 {
            return Err(Error::Config(
                "averaging applies to second-generation schemes only".into(),
            ));
        }
        Ok(())
    }

    /// `FC`, `WC`, `AFC` or `AWC`.
    pub fn counting_label(&self) -> &'static str {
        match (self.averaged, self.counting) {
            (false, Counting::Full) => "FC",
            (false, Counting::Weighted) => "WC",
            (true, Counting::Full) => "AFC",
            (true, Counting::Weighted) => "AWC",
        }
    }

    /// E.g. `M3-AWC-0.8`.
    pub fn label(&self) -> String {
        format!(
            "{}-{}-{}",
            self.scheme,
            self.counting_label(),
            threshold_label(self.threshold)
        )
    }
}

fn validate_threshold(t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("threshold {t} outside (0, 1]")))
    }
}

/// Short label for a threshold; 2/3 prints as `0.67`.
pub fn threshold_label(t: f64) -> String {
    if (t - 2.0 / 3.0).abs() < 1e-12 {
        "0.67".to_owned()
    } else {
        format!("{t}")
    }
}

/// Parses `0.5`, `2/3`, or the preset shorthand `0.67` (read as 2/3).
pub fn parse_threshold(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Config(format!("bad threshold `{s}`"));
    let t = if s == "0.67" {
        2.0 / 3.0
    } else if let Some((num, den)) = s.split_once('/') {
        let num: f64 = num.trim().parse().map_err(|_| bad())?;
        let den: f64 = den.trim().parse().map_err(|_| bad())?;
        num / den
    } else {
        s.parse().map_err(|_| bad())?
    };
    validate_threshold(t)?;
    Ok(t)
}

/// How a classification was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    Reference(ClassificationConfig),
    /// Each paper inherits its journal's fractional vector, optionally cut by
    /// the threshold chain.
    JournalBaseline {
        threshold: Option<f64>,
        max_categories: usize,
    },
    /// Journal vector with multidisciplinary codes kept as themselves.
    JournalBaselineUnsplit,
    /// Loaded from a file (e.g. a gold standard).
    External { name: String },
}

impl Method {
    pub fn baseline(threshold: Option<f64>) -> Method {
        Method::JournalBaseline {
            threshold,
            max_categories: ClassificationConfig::MAX_CATEGORIES,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Method::Reference(cfg) => cfg.label(),
            Method::JournalBaseline { threshold: None, .. } => "ASJC".to_owned(),
            Method::JournalBaseline {
                threshold: Some(t), ..
            } => format!("ASJC-{}", threshold_label(*t)),
            Method::JournalBaselineUnsplit => "ASJC-unsplit".to_owned(),
            Method::External { name } => name.clone(),
        }
    }

    /// Inverse of [`label`](Self::label) for grid methods: `ASJC`,
    /// `ASJC-<t>`, or `<M1|M2|M3>-<FC|WC|AFC|AWC>-<t>`.
    pub fn parse_label(label: &str) -> Result<Method> {
        let bad = || Error::Config(format!("bad method label `{label}`"));
        let label = label.trim();
        if label == "ASJC" {
            return Ok(Method::baseline(None));
        }
        if let Some(t) = label.strip_prefix("ASJC-") {
            return Ok(Method::baseline(Some(parse_threshold(t)?)));
        }
        let mut parts = label.splitn(3, '-');
        let (Some(s), Some(c), Some(t)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad());
        };
        let scheme = match s {
            "M1" => GenerationScheme::M1,
            "M2" => GenerationScheme::M2,
            "M3" => GenerationScheme::M3,
            _ => return Err(bad()),
        };
        let (counting, averaged) = match c {
            "FC" => (Counting::Full, false),
            "WC" => (Counting::Weighted, false),
            "AFC" => (Counting::Full, true),
            "AWC" => (Counting::Weighted, true),
            _ => return Err(bad()),
        };
        Ok(Method::Reference(ClassificationConfig::new(
            scheme,
            counting,
            averaged,
            parse_threshold(t)?,
        )?))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Method::Reference(cfg) => cfg.validate(),
            Method::JournalBaseline {
                threshold,
                max_categories,
            } => {
                if let Some(t) = threshold {
                    validate_threshold(*t)?;
                }
                if *max_categories == 0 {
                    return Err(Error::Config("max_categories must be at least 1".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn is_reference_based(&self) -> bool {
        matches!(self, Method::Reference(_))
    }
}

/// The 30 reference-based configurations (M1 × {FC, WC}, M2 and M3 ×
/// {FC, WC, AFC, AWC}, each at the three preset thresholds) followed by the
/// four journal baselines (untruncated, then each threshold).
pub fn default_grid() -> Vec<Method> {
    let mut grid = Vec::with_capacity(34);
    for scheme in GenerationScheme::ALL {
        let variants: &[(Counting, bool)] = if scheme == GenerationScheme::M1 {
            &[(Counting::Full, false), (Counting::Weighted, false)]
        } else {
            &[
                (Counting::Full, false),
                (Counting::Weighted, false),
                (Counting::Full, true),
                (Counting::Weighted, true),
            ]
        };
        for &(counting, averaged) in variants {
            for t in ClassificationConfig::THRESHOLDS {
                let cfg = ClassificationConfig::new(scheme, counting, averaged, t)
                    .expect("preset configurations are valid");
                grid.push(Method::Reference(cfg));
            }
        }
    }
    grid.push(Method::baseline(None));
    for t in ClassificationConfig::THRESHOLDS {
        grid.push(Method::baseline(Some(t)));
    }
    grid
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    ReferenceBased,
    JournalFallback,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::ReferenceBased => "reference_based",
            Source::JournalFallback => "journal_fallback",
        }
    }
}

/// Weighted categories of one paper, heaviest first (ties by ascending code).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaperAssignment {
    entries: Vec<(CategoryCode, f64)>,
    source: Source,
}

impl PaperAssignment {
    /// Orders `entries` canonically. Weights must be positive.
    pub fn new(mut entries: Vec<(CategoryCode, f64)>, source: Source) -> Self {
        sort_ranked(&mut entries);
        PaperAssignment { entries, source }
    }

    pub fn entries(&self) -> &[(CategoryCode, f64)] {
        &self.entries
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn weight(&self, code: CategoryCode) -> f64 {
        self.entries
            .iter()
            .find(|e| e.0 == code)
            .map_or(0.0, |e| e.1)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// 1-based position of `code`.
    pub fn rank_of(&self, code: CategoryCode) -> Option<usize> {
        self.entries.iter().position(|e| e.0 == code).map(|i| i + 1)
    }

    /// Every category attaining the maximum weight.
    pub fn winners(&self) -> Vec<CategoryCode> {
        let Some(&(_, top)) = self.entries.first() else {
            return Vec::new();
        };
        self.entries
            .iter()
            .take_while(|e| e.1 == top)
            .map(|e| e.0)
            .collect()
    }
}

pub(crate) fn sort_ranked(entries: &mut [(CategoryCode, f64)]) {
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationSummary {
    pub citable_papers: usize,
    pub classified: usize,
    pub reference_based: usize,
    pub journal_fallback: usize,
    /// Papers that failed the gate and whose journal is unclassified.
    pub unclassifiable: usize,
}

/// Corpus-wide mapping from paper to assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    method: Method,
    assignments: Vec<(PaperId, PaperAssignment)>,
    summary: ClassificationSummary,
}

impl Classification {
    /// `assignments` may be in any order; duplicates are rejected.
    pub fn new(
        method: Method,
        mut assignments: Vec<(PaperId, PaperAssignment)>,
        summary: ClassificationSummary,
    ) -> Result<Self> {
        assignments.sort_by_key(|a| a.0);
        if let Some(w) = assignments.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidClassification(format!(
                "paper {} assigned twice",
                w[0].0
            )));
        }
        Ok(Classification {
            method,
            assignments,
            summary,
        })
    }

    /// Builds a classification from assignments alone, deriving the summary.
    pub fn from_assignments(
        method: Method,
        assignments: Vec<(PaperId, PaperAssignment)>,
    ) -> Result<Self> {
        let reference_based = assignments
            .iter()
            .filter(|a| a.1.source() == Source::ReferenceBased)
            .count();
        let summary = ClassificationSummary {
            citable_papers: assignments.len(),
            classified: assignments.len(),
            reference_based,
            journal_fallback: assignments.len() - reference_based,
            unclassifiable: 0,
        };
        Self::new(method, assignments, summary)
    }

    pub fn method(&self) -> &Method {
        &self.method
    }

    pub fn label(&self) -> String {
        self.method.label()
    }

    pub fn summary(&self) -> &ClassificationSummary {
        &self.summary
    }

    pub fn assignments(&self) -> &[(PaperId, PaperAssignment)] {
        &self.assignments
    }

    pub fn iter(&self) -> impl Iterator<Item = (PaperId, &PaperAssignment)> + '_ {
        self.assignments.iter().map(|(p, a)| (*p, a))
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn get(&self, id: PaperId) -> Option<&PaperAssignment> {
        self.assignments
            .binary_search_by_key(&id, |a| a.0)
            .ok()
            .map(|i| &self.assignments[i].1)
    }

    /// Keeps only the papers accepted by `keep`.
    pub fn restricted(&self, mut keep: impl FnMut(PaperId) -> bool) -> Classification {
        let assignments: Vec<_> = self
            .assignments
            .iter()
            .filter(|(p, _)| keep(*p))
            .cloned()
            .collect();
        let reference_based = assignments
            .iter()
            .filter(|a| a.1.source() == Source::ReferenceBased)
            .count();
        Classification {
            method: self.method.clone(),
            summary: ClassificationSummary {
                citable_papers: assignments.len(),
                classified: assignments.len(),
                reference_based,
                journal_fallback: assignments.len() - reference_based,
                unclassifiable: 0,
            },
            assignments,
        }
    }
}

/// Contribution of one reference: the journal's fractional vector under
/// weighted counting, or weight 1 per directly assigned target under full
/// counting. Misc and multidisciplinary codes count nothing under full
/// counting, so a journal assigned only to those contributes an empty vector.
pub fn reference_contribution(
    journal: &JournalRecord,
    counting: Counting,
    scheme: &CategoryScheme,
) -> Result<CategoryVector> {
    if journal.codes.is_empty() {
        return Err(Error::EmptyAssignment);
    }
    match counting {
        Counting::Weighted => scheme.fractionalize_journal(&journal.codes),
        Counting::Full => {
            for &c in &journal.codes {
                if scheme.category(c).is_none() {
                    return Err(Error::UnknownCategory(c));
                }
            }
            Ok(CategoryVector::from_pairs(
                journal
                    .codes
                    .iter()
                    .filter(|&&c| scheme.is_target(c))
                    .map(|&c| (c, 1.0)),
            ))
        }
    }
}

/// Normalized share of one generation. `groups` holds the contributions
/// grouped by first-generation parent. With `averaged`, each contribution is
/// divided by the number of nonempty contributions in its group.
pub fn generation_share(groups: &[Vec<CategoryVector>], averaged: bool) -> Result<CategoryVector> {
    let mut acc: BTreeMap<CategoryCode, f64> = BTreeMap::new();
    for group in groups {
        let divisor = if averaged {
            group.iter().filter(|v| !v.is_empty()).count() as f64
        } else {
            1.0
        };
        for v in group {
            for (code, w) in v.iter() {
                *acc.entry(code).or_insert(0.0) += w / divisor;
            }
        }
    }
    let total: f64 = acc.values().sum();
    if acc.is_empty() || total <= 0.0 {
        return Err(Error::NoActiveReferences);
    }
    Ok(CategoryVector::from_sorted_unchecked(
        acc.into_iter().map(|(c, w)| (c, w / total)).collect(),
    ))
}

/// Applies the threshold chain and renormalizes the accepted shares.
pub fn select_categories(
    shares: &CategoryVector,
    threshold: f64,
    max_categories: usize,
) -> Result<PaperAssignment> {
    if shares.is_empty() {
        return Err(Error::EmptyShares);
    }
    validate_threshold(threshold)?;
    if max_categories == 0 {
        return Err(Error::Config("max_categories must be at least 1".into()));
    }
    let mut ranked = shares.entries().to_vec();
    sort_ranked(&mut ranked);
    let accepted = chain_length(&ranked, threshold, max_categories);
    // Copy the prefix so the assignment does not keep the full capacity.
    let mut entries = ranked[..accepted].to_vec();
    let total: f64 = entries.iter().map(|e| e.1).sum();
    for e in &mut entries {
        e.1 /= total;
    }
    // Shares an ulp apart can become equal here; restore the tie order.
    sort_ranked(&mut entries);
    Ok(PaperAssignment {
        entries,
        source: Source::ReferenceBased,
    })
}

/// Number of leading entries of `ranked` accepted by the chain rule.
pub fn chain_length(ranked: &[(CategoryCode, f64)], threshold: f64, max_categories: usize) -> usize {
    let mut accepted = 1;
    while accepted < max_categories && accepted < ranked.len() {
        let last = ranked[accepted - 1].1;
        let next = ranked[accepted].1;
        if next >= threshold * last - CHAIN_RTOL * last {
            accepted += 1;
        } else {
            break;
        }
    }
    accepted.min(ranked.len())
}

/// Classifies every citable paper under one configuration.
pub fn classify_corpus(
    corpus: &Corpus,
    scheme: &CategoryScheme,
    config: &ClassificationConfig,
) -> Result<Classification> {
    Classifier::new(corpus, scheme).classify(config)
}

/// Journal-based classification, untruncated or cut by the threshold chain.
pub fn asjc_baseline(
    corpus: &Corpus,
    scheme: &CategoryScheme,
    threshold: Option<f64>,
) -> Result<Classification> {
    Classifier::new(corpus, scheme).run(&Method::baseline(threshold))
}
