//! Papers, journals and the forward citation index.
//!
//! The corpus is immutable once built. References are stored in CSR form
//! (one offset array, one flat target array) over dense paper positions;
//! the order of a paper's references is the order its edges appeared in the
//! input, and repeated edges are kept as repeated references.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::csvio::{self, CsvInput};
use crate::error::{Error, Result};
use crate::scheme::CategoryScheme;
use crate::types::{CategoryCode, JournalId, PaperId};

pub const PAPERS_HEADER: [&str; 5] = ["paper_id", "year", "journal_id", "citations", "is_citable"];
pub const JOURNALS_HEADER: [&str; 2] = ["journal_id", "codes"];
pub const EDGES_HEADER: [&str; 2] = ["src_paper_id", "dst_paper_id"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PaperRecord {
    pub id: PaperId,
    pub year: i32,
    pub journal: JournalId,
    pub citations: u64,
    pub is_citable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JournalRecord {
    pub id: JournalId,
    /// Sorted, deduplicated category codes. Empty for unclassified sources.
    pub codes: Vec<CategoryCode>,
}

impl JournalRecord {
    pub fn is_classified(&self) -> bool {
        !self.codes.is_empty()
    }
}

/// Counts collected while building a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub papers: usize,
    pub journals: usize,
    pub resolved_edges: usize,
    pub unresolved_edges: usize,
    /// Edges whose source paper is unknown; dropped.
    pub rejected_edges: usize,
}

/// Active-reference counts of one paper: first generation, second
/// generation, and both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ActiveCounts {
    pub n1: usize,
    pub n2: usize,
    pub n12: usize,
}

#[derive(Debug, Default)]
pub struct CorpusBuilder {
    papers: Vec<PaperRecord>,
    journals: Vec<JournalRecord>,
    edges: Vec<(PaperId, PaperId)>,
}

impl CorpusBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn paper(&mut self, record: PaperRecord) -> &mut Self {
        self.papers.push(record);
        self
    }

    pub fn journal(&mut self, id: JournalId, codes: Vec<CategoryCode>) -> &mut Self {
        self.journals.push(JournalRecord { id, codes });
        self
    }

    pub fn edge(&mut self, src: PaperId, dst: PaperId) -> &mut Self {
        self.edges.push((src, dst));
        self
    }

    pub fn build(self, scheme: &CategoryScheme) -> Result<Corpus> {
        self.build_with_report(scheme).map(|(c, _)| c)
    }

    pub fn build_with_report(self, scheme: &CategoryScheme) -> Result<(Corpus, IngestReport)> {
        let CorpusBuilder {
            mut papers,
            mut journals,
            edges,
        } = self;
        if papers.len() > u32::MAX as usize {
            return Err(Error::IdOverflow(format!("{} papers", papers.len())));
        }
        if journals.len() > u32::MAX as usize {
            return Err(Error::IdOverflow(format!("{} journals", journals.len())));
        }

        for j in &mut journals {
            j.codes.sort_unstable();
            j.codes.dedup();
            if let Some(&bad) = j.codes.iter().find(|&&c| scheme.category(c).is_none()) {
                return Err(Error::UnknownCategory(bad));
            }
        }
        journals.sort_by_key(|j| j.id);
        if let Some(w) = journals.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::Config(format!("duplicate journal id {}", w[0].id)));
        }
        let journal_pos: HashMap<JournalId, u32> = journals
            .iter()
            .enumerate()
            .map(|(i, j)| (j.id, i as u32))
            .collect();

        papers.sort_by_key(|p| p.id);
        if let Some(w) = papers.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::Config(format!("duplicate paper id {}", w[0].id)));
        }
        let paper_pos: HashMap<PaperId, u32> = papers
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id, i as u32))
            .collect();
        let paper_journal = papers
            .iter()
            .map(|p| {
                journal_pos
                    .get(&p.journal)
                    .copied()
                    .ok_or(Error::UnknownJournal(p.journal))
            })
            .collect::<Result<Vec<u32>>>()?;
        let active: Vec<bool> = paper_journal
            .iter()
            .map(|&j| journals[j as usize].is_classified())
            .collect();

        let n = papers.len();
        let mut report = IngestReport {
            papers: n,
            journals: journals.len(),
            ..Default::default()
        };
        let mut resolved_deg = vec![0usize; n + 1];
        let mut unresolved_deg = vec![0usize; n + 1];
        let mut classified: Vec<(u32, Option<u32>, PaperId)> = Vec::with_capacity(edges.len());
        for (src, dst) in edges {
            let Some(&s) = paper_pos.get(&src) else {
                report.rejected_edges += 1;
                continue;
            };
            match paper_pos.get(&dst) {
                Some(&d) => {
                    resolved_deg[s as usize + 1] += 1;
                    classified.push((s, Some(d), dst));
                }
                None => {
                    unresolved_deg[s as usize + 1] += 1;
                    classified.push((s, None, dst));
                }
            }
        }
        if report.rejected_edges > 0 {
            log::warn!(
                "dropped {} edges whose source paper is unknown",
                report.rejected_edges
            );
        }
        for i in 0..n {
            resolved_deg[i + 1] += resolved_deg[i];
            unresolved_deg[i + 1] += unresolved_deg[i];
        }
        let ref_offsets = resolved_deg;
        let unresolved_offsets = unresolved_deg;
        let mut refs = vec![0u32; ref_offsets[n]];
        let mut unresolved = vec![PaperId(0); unresolved_offsets[n]];
        let mut fill_r = ref_offsets.clone();
        let mut fill_u = unresolved_offsets.clone();
        for (s, d, raw) in classified {
            let s = s as usize;
            match d {
                Some(d) => {
                    refs[fill_r[s]] = d;
                    fill_r[s] += 1;
                }
                None => {
                    unresolved[fill_u[s]] = raw;
                    fill_u[s] += 1;
                }
            }
        }
        report.resolved_edges = refs.len();
        report.unresolved_edges = unresolved.len();

        Ok((
            Corpus {
                papers,
                paper_pos,
                journals,
                journal_pos,
                paper_journal,
                active,
                ref_offsets,
                refs,
                unresolved_offsets,
                unresolved,
            },
            report,
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    papers: Vec<PaperRecord>,
    paper_pos: HashMap<PaperId, u32>,
    journals: Vec<JournalRecord>,
    journal_pos: HashMap<JournalId, u32>,
    paper_journal: Vec<u32>,
    active: Vec<bool>,
    ref_offsets: Vec<usize>,
    refs: Vec<u32>,
    unresolved_offsets: Vec<usize>,
    unresolved: Vec<PaperId>,
}

impl Corpus {
    /// Reads `papers.csv`, `journals.csv` and `edges.csv`.
    pub fn ingest(
        papers: &Path,
        journals: &Path,
        edges: &Path,
        scheme: &CategoryScheme,
    ) -> Result<Corpus> {
        Self::ingest_with_report(papers, journals, edges, scheme).map(|(c, _)| c)
    }

    pub fn ingest_with_report(
        papers: &Path,
        journals: &Path,
        edges: &Path,
        scheme: &CategoryScheme,
    ) -> Result<(Corpus, IngestReport)> {
        let mut builder = CorpusBuilder::new();
        read_journals(&mut csvio::open(journals)?, &mut builder)?;
        read_papers(&mut csvio::open(papers)?, &mut builder)?;
        read_edges(&mut csvio::open(edges)?, &mut builder)?;
        builder.build_with_report(scheme)
    }

    pub fn from_readers<P: Read, J: Read, E: Read>(
        papers: P,
        journals: J,
        edges: E,
        scheme: &CategoryScheme,
    ) -> Result<(Corpus, IngestReport)> {
        let mut builder = CorpusBuilder::new();
        read_journals(&mut CsvInput::new("journals.csv", journals), &mut builder)?;
        read_papers(&mut CsvInput::new("papers.csv", papers), &mut builder)?;
        read_edges(&mut CsvInput::new("edges.csv", edges), &mut builder)?;
        builder.build_with_report(scheme)
    }

    /// Writes the canonical form: papers and journals by ascending id, edges
    /// grouped by source in paper order (resolved first, then unresolved).
    pub fn write_csvs<P: Write, J: Write, E: Write>(
        &self,
        papers: P,
        journals: J,
        edges: E,
    ) -> Result<()> {
        let to_io = |e: csv::Error| Error::io("corpus", e.into());
        let mut w = csv::Writer::from_writer(papers);
        w.write_record(PAPERS_HEADER).map_err(to_io)?;
        for p in &self.papers {
            w.write_record([
                p.id.to_string(),
                p.year.to_string(),
                p.journal.to_string(),
                p.citations.to_string(),
                u8::from(p.is_citable).to_string(),
            ])
            .map_err(to_io)?;
        }
        w.flush().map_err(|e| Error::io("papers.csv", e))?;

        let mut w = csv::Writer::from_writer(journals);
        w.write_record(JOURNALS_HEADER).map_err(to_io)?;
        for j in &self.journals {
            let codes = j
                .codes
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(";");
            w.write_record([j.id.to_string(), codes]).map_err(to_io)?;
        }
        w.flush().map_err(|e| Error::io("journals.csv", e))?;

        let mut w = csv::Writer::from_writer(edges);
        w.write_record(EDGES_HEADER).map_err(to_io)?;
        for (pos, p) in self.papers.iter().enumerate() {
            let src = p.id.to_string();
            for &r in self.refs_at(pos) {
                w.write_record([src.as_str(), &self.papers[r as usize].id.to_string()])
                    .map_err(to_io)?;
            }
            for dst in self.unresolved_at(pos) {
                w.write_record([src.as_str(), &dst.to_string()])
                    .map_err(to_io)?;
            }
        }
        w.flush().map_err(|e| Error::io("edges.csv", e))
    }

    /// Writes the three canonical CSV files into `dir`.
    pub fn emit(&self, dir: &Path) -> Result<()> {
        let papers = dir.join("papers.csv");
        let journals = dir.join("journals.csv");
        let edges = dir.join("edges.csv");
        self.write_csvs(
            csvio::create(&papers)?,
            csvio::create(&journals)?,
            csvio::create(&edges)?,
        )
    }

    pub fn papers(&self) -> &[PaperRecord] {
        &self.papers
    }

    pub fn journals(&self) -> &[JournalRecord] {
        &self.journals
    }

    pub fn paper_count(&self) -> usize {
        self.papers.len()
    }

    pub fn edge_count(&self) -> usize {
        self.refs.len()
    }

    pub fn position(&self, id: PaperId) -> Result<usize> {
        self.paper_pos
            .get(&id)
            .map(|&p| p as usize)
            .ok_or(Error::UnknownPaper(id))
    }

    pub fn paper(&self, id: PaperId) -> Result<&PaperRecord> {
        self.position(id).map(|p| &self.papers[p])
    }

    pub fn journal(&self, id: JournalId) -> Option<&JournalRecord> {
        self.journal_pos.get(&id).map(|&j| &self.journals[j as usize])
    }

    pub(crate) fn journal_index_at(&self, pos: usize) -> usize {
        self.paper_journal[pos] as usize
    }

    pub fn journal_of_position(&self, pos: usize) -> &JournalRecord {
        &self.journals[self.paper_journal[pos] as usize]
    }

    /// True when the paper's journal carries category codes.
    pub fn is_active_at(&self, pos: usize) -> bool {
        self.active[pos]
    }

    pub(crate) fn refs_at(&self, pos: usize) -> &[u32] {
        &self.refs[self.ref_offsets[pos]..self.ref_offsets[pos + 1]]
    }

    pub(crate) fn unresolved_at(&self, pos: usize) -> &[PaperId] {
        &self.unresolved[self.unresolved_offsets[pos]..self.unresolved_offsets[pos + 1]]
    }

    pub fn unresolved_count(&self, id: PaperId) -> Result<usize> {
        self.position(id).map(|p| self.unresolved_at(p).len())
    }

    pub(crate) fn unresolved_count_at(&self, pos: usize) -> usize {
        self.unresolved_offsets[pos + 1] - self.unresolved_offsets[pos]
    }

    /// Children of `parent` with the focal paper removed.
    pub(crate) fn children_at(&self, parent: usize, focal: usize) -> impl Iterator<Item = usize> + '_ {
        self.refs_at(parent)
            .iter()
            .map(|&c| c as usize)
            .filter(move |&c| c != focal)
    }

    /// Cited papers, in input order and with multiplicity.
    pub fn first_generation(&self, id: PaperId) -> Result<Vec<PaperId>> {
        let pos = self.position(id)?;
        Ok(self
            .refs_at(pos)
            .iter()
            .map(|&r| self.papers[r as usize].id)
            .collect())
    }

    /// One entry per first-generation occurrence: the cited paper and its own
    /// references, excluding the focal paper.
    pub fn second_generation(&self, id: PaperId) -> Result<Vec<(PaperId, Vec<PaperId>)>> {
        let pos = self.position(id)?;
        Ok(self
            .refs_at(pos)
            .iter()
            .map(|&r| {
                let children = self
                    .children_at(r as usize, pos)
                    .map(|c| self.papers[c].id)
                    .collect();
                (self.papers[r as usize].id, children)
            })
            .collect())
    }

    pub fn active_reference_counts(&self, id: PaperId) -> Result<ActiveCounts> {
        self.position(id).map(|p| self.active_counts_at(p))
    }

    pub(crate) fn active_counts_at(&self, pos: usize) -> ActiveCounts {
        let mut n1 = 0;
        let mut n2 = 0;
        for &r in self.refs_at(pos) {
            let r = r as usize;
            n1 += usize::from(self.active[r]);
            n2 += self.children_at(r, pos).filter(|&c| self.active[c]).count();
        }
        ActiveCounts { n1, n2, n12: n1 + n2 }
    }

    /// Percentage of citable papers with more than `N` active references,
    /// `N = 0..=9`, per generation column.
    pub fn active_reference_distribution(&self) -> Result<ActiveRefDistribution> {
        let counts: Vec<ActiveCounts> = (0..self.papers.len())
            .into_par_iter()
            .filter(|&p| self.papers[p].is_citable)
            .map(|p| self.active_counts_at(p))
            .collect();
        if counts.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let total = counts.len() as f64;
        let mut rows = [[0.0; 3]; ActiveRefDistribution::ROWS];
        for (n, row) in rows.iter_mut().enumerate() {
            let above = |f: fn(&ActiveCounts) -> usize| {
                counts.iter().filter(|c| f(c) > n).count() as f64 * 100.0 / total
            };
            *row = [above(|c| c.n1), above(|c| c.n2), above(|c| c.n12)];
        }
        Ok(ActiveRefDistribution {
            papers: counts.len(),
            rows,
        })
    }
}

/// Share of citable papers above each active-reference count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActiveRefDistribution {
    pub papers: usize,
    /// `rows[n] = [gen1, gen2, gen1+2]` percentages of papers with more than `n`.
    pub rows: [[f64; 3]; ActiveRefDistribution::ROWS],
}

impl ActiveRefDistribution {
    pub const ROWS: usize = 10;
}

fn read_journals<R: Read>(input: &mut CsvInput<R>, b: &mut CorpusBuilder) -> Result<()> {
    input.expect_headers(&JOURNALS_HEADER)?;
    let file = input.name().to_owned();
    input.for_each_row(|line, rec| {
        let id: JournalId = csvio::field(&file, line, rec, 0, "journal_id")?;
        let raw = rec.get(1).unwrap_or("");
        let codes = raw
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<CategoryCode>()
                    .map_err(|e| Error::parse(&file, line, format!("bad code `{s}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        b.journal(id, codes);
        Ok(())
    })
}

fn read_papers<R: Read>(input: &mut CsvInput<R>, b: &mut CorpusBuilder) -> Result<()> {
    input.expect_headers(&PAPERS_HEADER)?;
    let file = input.name().to_owned();
    input.for_each_row(|line, rec| {
        b.paper(PaperRecord {
            id: csvio::field(&file, line, rec, 0, "paper_id")?,
            year: csvio::field(&file, line, rec, 1, "year")?,
            journal: csvio::field(&file, line, rec, 2, "journal_id")?,
            citations: csvio::field(&file, line, rec, 3, "citations")?,
            is_citable: csvio::flag(&file, line, rec, 4, "is_citable")?,
        });
        Ok(())
    })
}

fn read_edges<R: Read>(input: &mut CsvInput<R>, b: &mut CorpusBuilder) -> Result<()> {
    input.expect_headers(&EDGES_HEADER)?;
    let file = input.name().to_owned();
    input.for_each_row(|line, rec| {
        let src = csvio::field(&file, line, rec, 0, "src_paper_id")?;
        let dst = csvio::field(&file, line, rec, 1, "dst_paper_id")?;
        b.edge(src, dst);
        Ok(())
    })
}
