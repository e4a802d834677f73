//! Shared test support: raw corpora read straight from the CSV files, an
//! independent brute-force oracle for category shares, random corpus
//! generators and an invariant checker for classifications.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use refclass::synthgen::{self, SynthParams};
use refclass::{Classification, Counting, GenerationScheme, Method, Source};

#[derive(Debug, Clone)]
pub struct RawCategory {
    pub code: u32,
    pub area: u32,
    pub misc: bool,
    pub multi: bool,
}

#[derive(Debug, Clone)]
pub struct RawPaper {
    pub id: u64,
    pub year: i32,
    pub journal: u64,
    pub citations: u64,
    pub citable: bool,
}

/// A corpus as plain rows, independent of the library's loaders.
#[derive(Debug, Clone, Default)]
pub struct RawCorpus {
    pub scheme: Vec<RawCategory>,
    pub journals: BTreeMap<u64, Vec<u32>>,
    pub papers: Vec<RawPaper>,
    pub edges: Vec<(u64, u64)>,
}

fn rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    r.records().map(|x| x.unwrap()).collect()
}

impl RawCorpus {
    pub fn read(dir: &Path) -> RawCorpus {
        let scheme = rows(&dir.join("scheme.csv"))
            .iter()
            .map(|r| RawCategory {
                code: r[0].parse().unwrap(),
                area: r[2].parse().unwrap(),
                misc: &r[3] == "1",
                multi: &r[4] == "1",
            })
            .collect();
        let journals = rows(&dir.join("journals.csv"))
            .iter()
            .map(|r| {
                let codes = r[1]
                    .split(';')
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse().unwrap())
                    .collect();
                (r[0].parse().unwrap(), codes)
            })
            .collect();
        let papers = rows(&dir.join("papers.csv"))
            .iter()
            .map(|r| RawPaper {
                id: r[0].parse().unwrap(),
                year: r[1].parse().unwrap(),
                journal: r[2].parse().unwrap(),
                citations: r[3].parse().unwrap(),
                citable: &r[4] == "1",
            })
            .collect();
        let edges = rows(&dir.join("edges.csv"))
            .iter()
            .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
            .collect();
        RawCorpus {
            scheme,
            journals,
            papers,
            edges,
        }
    }

    pub fn write(&self, dir: &Path) {
        let mut s = String::from("code,name,area_code,is_misc,is_multidisciplinary-area\n");
        for c in &self.scheme {
            s += &format!("{},C{},{},{},{}\n", c.code, c.code, c.area, c.misc as u8, c.multi as u8);
        }
        std::fs::write(dir.join("scheme.csv"), s).unwrap();
        let mut s = String::from("journal_id,codes\n");
        for (j, codes) in &self.journals {
            let codes: Vec<String> = codes.iter().map(u32::to_string).collect();
            s += &format!("{j},{}\n", codes.join(";"));
        }
        std::fs::write(dir.join("journals.csv"), s).unwrap();
        let mut s = String::from("paper_id,year,journal_id,citations,is_citable\n");
        for p in &self.papers {
            s += &format!("{},{},{},{},{}\n", p.id, p.year, p.journal, p.citations, p.citable as u8);
        }
        std::fs::write(dir.join("papers.csv"), s).unwrap();
        let mut s = String::from("src_paper_id,dst_paper_id\n");
        for (a, b) in &self.edges {
            s += &format!("{a},{b}\n");
        }
        std::fs::write(dir.join("edges.csv"), s).unwrap();
    }
}

pub type Vector = BTreeMap<u32, f64>;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleOutcome {
    GateFailed(usize),
    Shares(Vector),
}

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub scheme: GenerationScheme,
    pub counting: Counting,
    pub averaged: bool,
    pub gen1_weight: f64,
    pub gen2_weight: f64,
    pub min_active_refs: usize,
}

/// Brute-force evaluation by enumerating citation paths, written from the
/// definitions alone.
pub struct Oracle<'a> {
    raw: &'a RawCorpus,
    by_id: BTreeMap<u64, &'a RawPaper>,
}

impl<'a> Oracle<'a> {
    pub fn new(raw: &'a RawCorpus) -> Self {
        Oracle {
            raw,
            by_id: raw.papers.iter().map(|p| (p.id, p)).collect(),
        }
    }

    pub fn targets(&self) -> Vec<u32> {
        self.raw
            .scheme
            .iter()
            .filter(|c| !c.misc && !c.multi)
            .map(|c| c.code)
            .collect()
    }

    fn codes(&self, paper: u64) -> BTreeSet<u32> {
        let journal = self.by_id[&paper].journal;
        self.raw.journals[&journal].iter().copied().collect()
    }

    pub fn is_active(&self, paper: u64) -> bool {
        !self.codes(paper).is_empty()
    }

    /// Weighted counting: each code gets 1/k, misc codes spread it over the
    /// non-misc categories of their area, multidisciplinary codes over all
    /// targets.
    pub fn weighted(&self, paper: u64) -> Vector {
        let codes = self.codes(paper);
        let mut v = Vector::new();
        if codes.is_empty() {
            return v;
        }
        let share = 1.0 / codes.len() as f64;
        for code in codes {
            let cat = self.raw.scheme.iter().find(|c| c.code == code).unwrap();
            let recipients: Vec<u32> = if cat.multi {
                self.targets()
            } else if cat.misc {
                self.raw
                    .scheme
                    .iter()
                    .filter(|c| c.area == cat.area && !c.misc)
                    .map(|c| c.code)
                    .collect()
            } else {
                vec![code]
            };
            for r in &recipients {
                *v.entry(*r).or_insert(0.0) += share / recipients.len() as f64;
            }
        }
        v
    }

    /// Full counting: 1 for each directly assigned target category.
    pub fn full(&self, paper: u64) -> Vector {
        self.codes(paper)
            .into_iter()
            .filter(|&code| {
                let cat = self.raw.scheme.iter().find(|c| c.code == code).unwrap();
                !cat.misc && !cat.multi
            })
            .map(|code| (code, 1.0))
            .collect()
    }

    fn contribution(&self, paper: u64, counting: Counting) -> Vector {
        match counting {
            Counting::Full => self.full(paper),
            Counting::Weighted => self.weighted(paper),
        }
    }

    /// Resolved references of `paper`, in file order, with repeats.
    pub fn refs(&self, paper: u64) -> Vec<u64> {
        self.raw
            .edges
            .iter()
            .filter(|(s, d)| *s == paper && self.by_id.contains_key(d))
            .map(|&(_, d)| d)
            .collect()
    }

    /// Every path `paper -> r -> c` with `c != paper`, grouped by `r`.
    pub fn second_paths(&self, paper: u64) -> Vec<Vec<u64>> {
        self.refs(paper)
            .into_iter()
            .map(|r| self.refs(r).into_iter().filter(|&c| c != paper).collect())
            .collect()
    }

    pub fn active_counts(&self, paper: u64) -> (usize, usize) {
        let n1 = self.refs(paper).into_iter().filter(|&r| self.is_active(r)).count();
        let n2 = self
            .second_paths(paper)
            .into_iter()
            .flatten()
            .filter(|&c| self.is_active(c))
            .count();
        (n1, n2)
    }

    pub fn gate_quantity(&self, paper: u64, scheme: GenerationScheme) -> usize {
        let (n1, n2) = self.active_counts(paper);
        match scheme {
            GenerationScheme::M1 => n1,
            GenerationScheme::M2 => n2,
            GenerationScheme::M3 => n1 + n2,
        }
    }

    fn first_share(&self, paper: u64, counting: Counting) -> Vector {
        let mut sum = Vector::new();
        for r in self.refs(paper) {
            add(&mut sum, &self.contribution(r, counting), 1.0);
        }
        normalize(sum)
    }

    fn second_share(&self, paper: u64, counting: Counting, averaged: bool) -> Vector {
        let mut sum = Vector::new();
        for group in self.second_paths(paper) {
            let contribs: Vec<Vector> = group
                .iter()
                .map(|&c| self.contribution(c, counting))
                .filter(|v| !v.is_empty())
                .collect();
            let divisor = if averaged { contribs.len() as f64 } else { 1.0 };
            for v in &contribs {
                add(&mut sum, v, divisor);
            }
        }
        normalize(sum)
    }

    fn combined(&self, paper: u64, cfg: &OracleConfig, counting: Counting) -> Vector {
        let s1 = || self.first_share(paper, counting);
        let s2 = || self.second_share(paper, counting, cfg.averaged);
        match cfg.scheme {
            GenerationScheme::M1 => s1(),
            GenerationScheme::M2 => s2(),
            GenerationScheme::M3 => {
                let (a, b) = (s1(), s2());
                if a.is_empty() {
                    return b;
                }
                if b.is_empty() {
                    return a;
                }
                let mut out = Vector::new();
                for code in a.keys().chain(b.keys()) {
                    let w = cfg.gen1_weight * a.get(code).copied().unwrap_or(0.0)
                        + cfg.gen2_weight * b.get(code).copied().unwrap_or(0.0);
                    out.insert(*code, w);
                }
                out
            }
        }
    }

    pub fn shares(&self, paper: u64, cfg: &OracleConfig) -> OracleOutcome {
        let quantity = self.gate_quantity(paper, cfg.scheme);
        if quantity < cfg.min_active_refs {
            return OracleOutcome::GateFailed(quantity);
        }
        let mut v = self.combined(paper, cfg, cfg.counting);
        if v.is_empty() && cfg.counting == Counting::Full {
            v = self.combined(paper, cfg, Counting::Weighted);
        }
        OracleOutcome::Shares(v)
    }
}

fn add(sum: &mut Vector, v: &Vector, divisor: f64) {
    for (&k, &w) in v {
        *sum.entry(k).or_insert(0.0) += w / divisor;
    }
}

fn normalize(v: Vector) -> Vector {
    let total: f64 = v.values().sum();
    if total <= 0.0 {
        return Vector::new();
    }
    v.into_iter()
        .filter(|&(_, w)| w > 0.0)
        .map(|(k, w)| (k, w / total))
        .collect()
}

/// Small adversarial corpus: arbitrary edges (cycles, self-citations,
/// repeats, unresolved targets) over a random scheme of at most 20
/// categories.
pub fn random_raw(seed: u64) -> RawCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_areas = rng.gen_range(1..=3u32);
    let mut scheme = vec![RawCategory {
        code: 1000,
        area: 1000,
        misc: false,
        multi: true,
    }];
    for a in 0..n_areas {
        let area = 1100 + 100 * a;
        let n = rng.gen_range(1..=5u32);
        scheme.push(RawCategory {
            code: area,
            area,
            misc: true,
            multi: false,
        });
        for k in 1..=n {
            scheme.push(RawCategory {
                code: area + k,
                area,
                misc: false,
                multi: false,
            });
        }
    }
    let codes: Vec<u32> = scheme.iter().map(|c| c.code).collect();
    let n_journals = rng.gen_range(1..=12u64);
    let journals = (0..n_journals)
        .map(|j| {
            let k = rng.gen_range(0..=3usize);
            let picked: BTreeSet<u32> = (0..k).map(|_| codes[rng.gen_range(0..codes.len())]).collect();
            (j, picked.into_iter().collect())
        })
        .collect();
    let n_papers = rng.gen_range(1..=100u64);
    let papers = (0..n_papers)
        .map(|i| RawPaper {
            id: i * 3 + 1,
            year: rng.gen_range(2015..=2020),
            journal: rng.gen_range(0..n_journals),
            citations: rng.gen_range(0..20),
            citable: rng.gen::<f64>() < 0.9,
        })
        .collect::<Vec<_>>();
    let n_edges = rng.gen_range(0..=(n_papers as usize * 6));
    let edges = (0..n_edges)
        .map(|_| {
            let s = papers[rng.gen_range(0..papers.len())].id;
            let d = if rng.gen::<f64>() < 0.1 {
                1_000_000 + rng.gen_range(0..50)
            } else {
                papers[rng.gen_range(0..papers.len())].id
            };
            (s, d)
        })
        .collect();
    RawCorpus {
        scheme,
        journals,
        papers,
        edges,
    }
}

/// Synthetic-generator parameters for a small random corpus (at most 100
/// papers and 20 categories).
pub fn small_synth_params(seed: u64) -> SynthParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let refs_min = rng.gen_range(0..=4);
    SynthParams {
        seed,
        n_areas: rng.gen_range(1..=3),
        cats_per_area: rng.gen_range(1..=5),
        n_journals: rng.gen_range(8..=25),
        n_papers: rng.gen_range(20..=100),
        refs_min,
        refs_max: refs_min + rng.gen_range(0..=8),
        within_category_prob: rng.gen(),
        misc_journal_frac: rng.gen_range(0.0..0.2),
        multi_journal_frac: rng.gen_range(0.0..0.15),
        unclassified_journal_frac: rng.gen_range(0.0..0.2),
        secondary_code_prob: rng.gen(),
        low_ref_frac: rng.gen_range(0.0..0.3),
        unresolved_ref_prob: rng.gen_range(0.0..0.2),
        non_citable_frac: rng.gen_range(0.0..0.1),
        first_year: 2016,
        last_year: 2020,
    }
}

/// Writes a synthetic corpus for `params` into `dir` and reads it back raw.
pub fn synth_raw(params: &SynthParams, dir: &Path) -> RawCorpus {
    synthgen::generate(params).unwrap().emit(dir).unwrap();
    RawCorpus::read(dir)
}

pub fn oracle_config(method: &Method) -> Option<OracleConfig> {
    match method {
        Method::Reference(c) => Some(OracleConfig {
            scheme: c.scheme,
            counting: c.counting,
            averaged: c.averaged,
            gen1_weight: c.gen1_weight,
            gen2_weight: c.gen2_weight,
            min_active_refs: c.min_active_refs,
        }),
        _ => None,
    }
}

/// Checks the per-paper invariants of a classification; returns the first
/// violation. Journal fallbacks keep the whole journal vector, so the cap
/// and the chain rule apply only to reference-based entries and to the
/// thresholded baselines.
pub fn check_invariants(c: &Classification) -> Result<(), String> {
    let (truncated, threshold, max) = match c.method() {
        Method::Reference(cfg) => (true, Some(cfg.threshold), cfg.max_categories),
        Method::JournalBaseline {
            threshold,
            max_categories,
        } => (threshold.is_some(), *threshold, *max_categories),
        _ => (false, None, usize::MAX),
    };
    let mut last_id = None;
    for (id, a) in c.iter() {
        if last_id.is_some_and(|l| l >= id) {
            return Err(format!("papers out of order at {id}"));
        }
        last_id = Some(id);
        let e = a.entries();
        if e.is_empty() {
            return Err(format!("paper {id}: empty assignment"));
        }
        if e.iter().any(|&(_, w)| w.is_nan() || w <= 0.0) {
            return Err(format!("paper {id}: non-positive weight"));
        }
        let sum: f64 = e.iter().map(|x| x.1).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(format!("paper {id}: weights sum to {sum}"));
        }
        for w in e.windows(2) {
            if w[0].1 < w[1].1 || (w[0].1 == w[1].1 && w[0].0 >= w[1].0) {
                return Err(format!("paper {id}: entries not ranked"));
            }
        }
        let capped = truncated && a.source() == Source::ReferenceBased
            || matches!(c.method(), Method::JournalBaseline { threshold: Some(_), .. });
        if capped && e.len() > max {
            return Err(format!("paper {id}: {} entries over cap {max}", e.len()));
        }
        if let (true, Some(t)) = (capped, threshold) {
            for w in e.windows(2) {
                if w[1].1 < t * w[0].1 * (1.0 - 1e-9) {
                    return Err(format!("paper {id}: chain rule broken"));
                }
            }
        }
    }
    Ok(())
}
