use rayon::prelude::*;

use super::{
    select_categories, sort_ranked, Classification, ClassificationConfig, ClassificationSummary,
    Counting, GenerationScheme, Method, PaperAssignment, Source,
};
use crate::corpus::{ActiveCounts, Corpus};
use crate::error::{Error, Result};
use crate::scheme::{CategoryScheme, CategoryVector};
use crate::types::{CategoryCode, PaperId};

/// Category shares of one paper, or the gate quantity that fell short.
#[derive(Debug, Clone, PartialEq)]
pub enum ShareOutcome {
    Shares(CategoryVector),
    GateFailed { quantity: usize, required: usize },
}

/// Sparse contribution over dense target positions.
type Contribution = Vec<(u32, f64)>;

/// Classification engine over one corpus and scheme.
///
/// Journal contribution vectors are computed once up front; papers are then
/// processed independently (in parallel on the current rayon pool), each
/// with its own sequential summation order, so results do not depend on the
/// number of threads.
pub struct Classifier<'a> {
    corpus: &'a Corpus,
    scheme: &'a CategoryScheme,
    /// `[counting][journal]`
    contributions: [Vec<Contribution>; 2],
    /// Fractional vector per journal, ranked; empty for unclassified journals.
    journal_vectors: Vec<Vec<(CategoryCode, f64)>>,
}

/// Which generation shares a batch of methods needs.
#[derive(Debug, Clone, Copy, Default)]
struct Needs {
    first: bool,
    /// `[averaged]`
    second: [bool; 2],
}

impl Needs {
    fn add(&mut self, cfg: &ClassificationConfig) {
        if cfg.scheme.uses_first() {
            self.first = true;
        }
        if cfg.scheme.uses_second() {
            self.second[usize::from(cfg.averaged)] = true;
        }
    }

    fn any(&self) -> bool {
        self.first || self.second[0] || self.second[1]
    }
}

/// Normalized generation shares of one paper. `None` means not computed,
/// an empty vector means no contributions.
#[derive(Debug, Default)]
struct GenerationShares {
    counts: ActiveCounts,
    /// `[counting]`
    first: [Option<CategoryVector>; 2],
    /// `[counting][averaged]`
    second: [[Option<CategoryVector>; 2]; 2],
}

/// Dense accumulator that remembers which positions it touched.
struct DenseAccumulator {
    values: Vec<f64>,
    touched: Vec<u32>,
}

impl DenseAccumulator {
    fn new(len: usize) -> Self {
        DenseAccumulator {
            values: vec![0.0; len],
            touched: Vec::new(),
        }
    }

    fn add(&mut self, contribution: &[(u32, f64)], divisor: f64) {
        for &(pos, w) in contribution {
            let slot = &mut self.values[pos as usize];
            if *slot == 0.0 {
                self.touched.push(pos);
            }
            *slot += w / divisor;
        }
    }

    /// Drains into a unit-sum vector (summed in ascending code order).
    fn finish(&mut self, targets: &[CategoryCode]) -> CategoryVector {
        self.touched.sort_unstable();
        let total: f64 = self.touched.iter().map(|&p| self.values[p as usize]).sum();
        let entries = self
            .touched
            .iter()
            .map(|&p| (targets[p as usize], self.values[p as usize] / total))
            .collect();
        for &p in &self.touched {
            self.values[p as usize] = 0.0;
        }
        self.touched.clear();
        CategoryVector::from_sorted_unchecked(entries)
    }
}

/// Per-thread scratch space: accumulators for the first generation
/// (`[counting]`) and second generation (`[counting][averaged]`).
struct Scratch {
    first: [DenseAccumulator; 2],
    second: [[DenseAccumulator; 2]; 2],
}

impl Scratch {
    fn new(len: usize) -> Self {
        let acc = || DenseAccumulator::new(len);
        Scratch {
            first: [acc(), acc()],
            second: [[acc(), acc()], [acc(), acc()]],
        }
    }
}

impl<'a> Classifier<'a> {
    pub fn new(corpus: &'a Corpus, scheme: &'a CategoryScheme) -> Self {
        let mut full = Vec::with_capacity(corpus.journals().len());
        let mut weighted = Vec::with_capacity(corpus.journals().len());
        let mut journal_vectors = Vec::with_capacity(corpus.journals().len());
        for journal in corpus.journals() {
            if journal.codes.is_empty() {
                full.push(Vec::new());
                weighted.push(Vec::new());
                journal_vectors.push(Vec::new());
                continue;
            }
            let fc: Contribution = journal
                .codes
                .iter()
                .filter_map(|&c| scheme.target_position(c))
                .map(|p| (p as u32, 1.0))
                .collect();
            let vector = scheme
                .fractionalize_journal(&journal.codes)
                .expect("journal codes validated at corpus build");
            let wc: Contribution = vector
                .iter()
                .map(|(c, w)| (scheme.target_position(c).expect("target") as u32, w))
                .collect();
            let mut ranked = vector.entries().to_vec();
            sort_ranked(&mut ranked);
            full.push(fc);
            weighted.push(wc);
            journal_vectors.push(ranked);
        }
        Classifier {
            corpus,
            scheme,
            contributions: [full, weighted],
            journal_vectors,
        }
    }

    pub fn corpus(&self) -> &Corpus {
        self.corpus
    }

    pub fn scheme(&self) -> &CategoryScheme {
        self.scheme
    }

    fn contribution(&self, counting: usize, paper_pos: usize) -> &[(u32, f64)] {
        &self.contributions[counting][self.corpus.journal_index_at(paper_pos)]
    }

    fn generation_shares(&self, pos: usize, needs: Needs, scratch: &mut Scratch) -> GenerationShares {
        let corpus = self.corpus;
        let mut out = GenerationShares {
            counts: corpus.active_counts_at(pos),
            ..Default::default()
        };
        let refs = corpus.refs_at(pos);
        if needs.first {
            for &r in refs {
                for counting in 0..2 {
                    scratch.first[counting].add(self.contribution(counting, r as usize), 1.0);
                }
            }
            for counting in 0..2 {
                out.first[counting] = Some(scratch.first[counting].finish(self.scheme.targets()));
            }
        }
        if needs.second[0] || needs.second[1] {
            for &r in refs {
                let r = r as usize;
                let mut nonempty = [0usize; 2];
                if needs.second[1] {
                    for child in corpus.children_at(r, pos) {
                        for (counting, n) in nonempty.iter_mut().enumerate() {
                            *n += usize::from(!self.contribution(counting, child).is_empty());
                        }
                    }
                }
                for child in corpus.children_at(r, pos) {
                    for (counting, &n) in nonempty.iter().enumerate() {
                        let contribution = self.contribution(counting, child);
                        if contribution.is_empty() {
                            continue;
                        }
                        if needs.second[0] {
                            scratch.second[counting][0].add(contribution, 1.0);
                        }
                        if needs.second[1] {
                            scratch.second[counting][1].add(contribution, n as f64);
                        }
                    }
                }
            }
            for counting in 0..2 {
                for averaged in 0..2 {
                    if needs.second[averaged] {
                        out.second[counting][averaged] =
                            Some(scratch.second[counting][averaged].finish(self.scheme.targets()));
                    }
                }
            }
        }
        out
    }

    fn shares_for(&self, cfg: &ClassificationConfig, gens: &GenerationShares) -> ShareOutcome {
        let quantity = match cfg.scheme {
            GenerationScheme::M1 => gens.counts.n1,
            GenerationScheme::M2 => gens.counts.n2,
            GenerationScheme::M3 => gens.counts.n12,
        };
        if quantity < cfg.min_active_refs {
            return ShareOutcome::GateFailed {
                quantity,
                required: cfg.min_active_refs,
            };
        }
        // Full counting can leave every consumed generation empty when the
        // active references only point to misc/multidisciplinary journals;
        // the weighted contributions of the same references are used then.
        let shares = combine(cfg, cfg.counting, gens)
            .or_else(|| match cfg.counting {
                Counting::Full => combine(cfg, Counting::Weighted, gens),
                Counting::Weighted => None,
            })
            .expect("an active reference always has a nonempty weighted contribution");
        ShareOutcome::Shares(shares)
    }

    /// Category shares of one paper under `config`.
    pub fn paper_shares(&self, id: PaperId, config: &ClassificationConfig) -> Result<ShareOutcome> {
        config.validate()?;
        let pos = self.corpus.position(id)?;
        let mut needs = Needs::default();
        needs.add(config);
        let mut scratch = Scratch::new(self.scheme.target_count());
        let gens = self.generation_shares(pos, needs, &mut scratch);
        Ok(self.shares_for(config, &gens))
    }

    pub fn classify_paper(&self, id: PaperId, config: &ClassificationConfig) -> Result<PaperAssignment> {
        config.validate()?;
        let pos = self.corpus.position(id)?;
        let mut needs = Needs::default();
        needs.add(config);
        let mut scratch = Scratch::new(self.scheme.target_count());
        let gens = self.generation_shares(pos, needs, &mut scratch);
        self.assign(&Method::Reference(*config), pos, Some(&gens))?
            .ok_or(Error::UnclassifiablePaper(id))
    }

    /// The journal's full fractional vector, or `None` if it is unclassified.
    fn journal_fallback(&self, pos: usize) -> Option<PaperAssignment> {
        let ranked = &self.journal_vectors[self.corpus.journal_index_at(pos)];
        (!ranked.is_empty()).then(|| PaperAssignment {
            entries: ranked.clone(),
            source: Source::JournalFallback,
        })
    }

    fn assign(
        &self,
        method: &Method,
        pos: usize,
        gens: Option<&GenerationShares>,
    ) -> Result<Option<PaperAssignment>> {
        match method {
            Method::Reference(cfg) => {
                let gens = gens.expect("generation shares computed for reference methods");
                match self.shares_for(cfg, gens) {
                    ShareOutcome::Shares(shares) => {
                        select_categories(&shares, cfg.threshold, cfg.max_categories).map(Some)
                    }
                    ShareOutcome::GateFailed { .. } => Ok(self.journal_fallback(pos)),
                }
            }
            Method::JournalBaseline {
                threshold,
                max_categories,
            } => {
                let Some(full) = self.journal_fallback(pos) else {
                    return Ok(None);
                };
                match threshold {
                    None => Ok(Some(full)),
                    Some(t) => {
                        let vector = CategoryVector::from_pairs(full.entries.iter().copied());
                        let mut a = select_categories(&vector, *t, *max_categories)?;
                        a.source = Source::JournalFallback;
                        Ok(Some(a))
                    }
                }
            }
            Method::JournalBaselineUnsplit => {
                let journal = self.corpus.journal_of_position(pos);
                if journal.codes.is_empty() {
                    return Ok(None);
                }
                let entries = self.scheme.fractionalize_journal_unsplit(&journal.codes)?;
                Ok(Some(PaperAssignment::new(entries, Source::JournalFallback)))
            }
            Method::External { name } => Err(Error::Config(format!(
                "external classification `{name}` cannot be computed"
            ))),
        }
    }

    /// Classifies every citable paper under one configuration.
    pub fn classify(&self, config: &ClassificationConfig) -> Result<Classification> {
        self.run(&Method::Reference(*config))
    }

    pub fn run(&self, method: &Method) -> Result<Classification> {
        let mut out = self.run_grid(std::slice::from_ref(method))?;
        Ok(out.pop().expect("one method in, one classification out"))
    }

    /// Runs several methods in one pass over the corpus; generation shares
    /// of each paper are computed once and reused by every method.
    pub fn run_grid(&self, methods: &[Method]) -> Result<Vec<Classification>> {
        let mut needs = Needs::default();
        for m in methods {
            m.validate()?;
            if let Method::Reference(cfg) = m {
                needs.add(cfg);
            }
        }
        let papers = self.corpus.papers();
        let targets = self.scheme.target_count();
        let rows: Vec<(usize, Vec<Option<PaperAssignment>>)> = (0..papers.len())
            .into_par_iter()
            .filter(|&pos| papers[pos].is_citable)
            .map_init(
                || Scratch::new(targets),
                |scratch, pos| {
                    let gens = needs
                        .any()
                        .then(|| self.generation_shares(pos, needs, scratch));
                    let row = methods
                        .iter()
                        .map(|m| self.assign(m, pos, gens.as_ref()))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((pos, row))
                },
            )
            .collect::<Result<_>>()?;

        let mut per_method: Vec<Vec<(PaperId, PaperAssignment)>> =
            methods.iter().map(|_| Vec::with_capacity(rows.len())).collect();
        let mut summaries = vec![
            ClassificationSummary {
                citable_papers: rows.len(),
                ..Default::default()
            };
            methods.len()
        ];
        for (pos, row) in rows {
            let id = papers[pos].id;
            for (i, a) in row.into_iter().enumerate() {
                let summary = &mut summaries[i];
                match a {
                    Some(a) => {
                        summary.classified += 1;
                        match a.source {
                            Source::ReferenceBased => summary.reference_based += 1,
                            Source::JournalFallback => summary.journal_fallback += 1,
                        }
                        per_method[i].push((id, a));
                    }
                    None => summary.unclassifiable += 1,
                }
            }
        }
        methods
            .iter()
            .zip(per_method)
            .zip(summaries)
            .map(|((m, assignments), summary)| {
                if summary.unclassifiable > 0 {
                    log::info!(
                        "{}: {} unclassifiable papers excluded",
                        m.label(),
                        summary.unclassifiable
                    );
                }
                Classification::new(m.clone(), assignments, summary)
            })
            .collect()
    }
}

/// Shares of the generations `cfg.scheme` consumes under `counting`; `None`
/// when all of them are empty.
fn combine(
    cfg: &ClassificationConfig,
    counting: Counting,
    gens: &GenerationShares,
) -> Option<CategoryVector> {
    let c = counting.index();
    let first = gens.first[c].as_ref().filter(|v| !v.is_empty());
    let second = gens.second[c][usize::from(cfg.averaged)]
        .as_ref()
        .filter(|v| !v.is_empty());
    match cfg.scheme {
        GenerationScheme::M1 => first.cloned(),
        GenerationScheme::M2 => second.cloned(),
        GenerationScheme::M3 => match (first, second) {
            (Some(a), Some(b)) => Some(weighted_sum(a, cfg.gen1_weight, b, cfg.gen2_weight)),
            (Some(v), None) | (None, Some(v)) => Some(v.clone()),
            (None, None) => None,
        },
    }
}

/// `wa * a + wb * b` over the union of supports (missing entries are 0).
fn weighted_sum(a: &CategoryVector, wa: f64, b: &CategoryVector, wb: f64) -> CategoryVector {
    let (a, b) = (a.entries(), b.entries());
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (code, x, y) = match (a.get(i), b.get(j)) {
            (Some(&(ca, x)), Some(&(cb, _))) if ca < cb => {
                i += 1;
                (ca, x, 0.0)
            }
            (Some(&(ca, _)), Some(&(cb, y))) if cb < ca => {
                j += 1;
                (cb, 0.0, y)
            }
            (Some(&(ca, x)), Some(&(_, y))) => {
                i += 1;
                j += 1;
                (ca, x, y)
            }
            (Some(&(ca, x)), None) => {
                i += 1;
                (ca, x, 0.0)
            }
            (None, Some(&(cb, y))) => {
                j += 1;
                (cb, 0.0, y)
            }
            (None, None) => unreachable!(),
        };
        let w = wa * x + wb * y;
        if w > 0.0 {
            out.push((code, w));
        }
    }
    CategoryVector::from_sorted_unchecked(out)
}
