//! Deterministic synthetic corpora with planted categories.
//!
//! All randomness comes from a ChaCha8 stream seeded with
//! `SynthParams::seed`, so a seed reproduces the same corpus on every
//! platform.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifier::{Classification, Method, PaperAssignment, Source, TRUTH_HEADER};
use crate::corpus::{Corpus, CorpusBuilder, PaperRecord};
use crate::csvio;
use crate::error::{Error, Result};
use crate::scheme::{Category, CategoryScheme};
use crate::types::{AreaCode, CategoryCode, JournalId, PaperId};

/// Ids given to references that do not resolve to a generated paper.
pub const UNRESOLVED_BASE: u64 = 1_000_000_000;

const MULTIDISCIPLINARY: u32 = 1000;
const FIRST_AREA: u32 = 1100;
const OUTSIDE_TRIES: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthParams {
    pub seed: u64,
    pub n_areas: usize,
    /// Non-misc categories per area.
    pub cats_per_area: usize,
    pub n_journals: usize,
    pub n_papers: usize,
    pub refs_min: usize,
    pub refs_max: usize,
    pub within_category_prob: f64,
    pub misc_journal_frac: f64,
    pub multi_journal_frac: f64,
    pub unclassified_journal_frac: f64,
    /// Probability that a regular journal gets a second category.
    pub secondary_code_prob: f64,
    /// Papers generated without any references.
    pub low_ref_frac: f64,
    /// Probability that a reference points outside the corpus.
    pub unresolved_ref_prob: f64,
    pub non_citable_frac: f64,
    pub first_year: i32,
    pub last_year: i32,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            seed: 42,
            n_areas: 6,
            cats_per_area: 5,
            n_journals: 120,
            n_papers: 2000,
            refs_min: 5,
            refs_max: 15,
            within_category_prob: 0.8,
            misc_journal_frac: 0.05,
            multi_journal_frac: 0.03,
            unclassified_journal_frac: 0.05,
            secondary_code_prob: 0.3,
            low_ref_frac: 0.05,
            unresolved_ref_prob: 0.1,
            non_citable_frac: 0.05,
            first_year: 2015,
            last_year: 2020,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InfeasibleParams(msg));
        for (name, n) in [
            ("n_areas", self.n_areas),
            ("cats_per_area", self.cats_per_area),
            ("n_journals", self.n_journals),
            ("n_papers", self.n_papers),
        ] {
            if n == 0 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        if self.n_areas > 89 || self.cats_per_area > 99 {
            return bad("at most 89 areas of 99 categories fit four-digit codes".into());
        }
        if self.n_papers as u64 >= UNRESOLVED_BASE {
            return bad(format!("n_papers must stay below {UNRESOLVED_BASE}"));
        }
        for (name, p) in [
            ("within_category_prob", self.within_category_prob),
            ("misc_journal_frac", self.misc_journal_frac),
            ("multi_journal_frac", self.multi_journal_frac),
            ("unclassified_journal_frac", self.unclassified_journal_frac),
            ("secondary_code_prob", self.secondary_code_prob),
            ("low_ref_frac", self.low_ref_frac),
            ("unresolved_ref_prob", self.unresolved_ref_prob),
            ("non_citable_frac", self.non_citable_frac),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is outside [0, 1]"));
            }
        }
        if self.misc_journal_frac + self.multi_journal_frac + self.unclassified_journal_frac > 1.0 {
            return bad("journal kind fractions sum above 1".into());
        }
        if self.refs_min > self.refs_max {
            return bad("refs_min exceeds refs_max".into());
        }
        if self.first_year > self.last_year {
            return bad("first_year is after last_year".into());
        }
        Ok(())
    }
}

/// A generated corpus, its scheme and the planted truth.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub scheme: CategoryScheme,
    pub corpus: Corpus,
    /// Planted category of every paper.
    pub truth: BTreeMap<PaperId, CategoryCode>,
    /// Single-category assignments of the citable papers.
    pub gold: Classification,
}

impl SynthCorpus {
    /// Writes `scheme.csv`, `papers.csv`, `journals.csv`, `edges.csv` and
    /// `truth.csv` into `dir`.
    pub fn emit(&self, dir: &Path) -> Result<()> {
        let path = dir.join("scheme.csv");
        let mut w = csvio::create(&path)?;
        self.scheme.write_csv(&mut w)?;
        w.flush().map_err(|e| Error::io(&path, e))?;
        self.corpus.emit(dir)?;
        let path = dir.join("truth.csv");
        let mut w = csvio::create(&path)?;
        write_truth(&self.truth, &mut w).map_err(|e| Error::io(&path, e))?;
        w.flush().map_err(|e| Error::io(&path, e))
    }
}

fn write_truth<W: Write>(truth: &BTreeMap<PaperId, CategoryCode>, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{}", TRUTH_HEADER.join(","))?;
    for (paper, code) in truth {
        writeln!(w, "{paper},{code}")?;
    }
    Ok(())
}

/// Scheme with `n_areas` areas coded 1100, 1200, ...; each area code is
/// also its misc category, followed by `cats_per_area` targets. Code 1000
/// is the multidisciplinary area.
pub fn synthetic_scheme(n_areas: usize, cats_per_area: usize) -> Result<CategoryScheme> {
    let areas: Vec<(String, usize)> = (0..n_areas)
        .map(|i| (format!("Area {}", FIRST_AREA + 100 * i as u32), cats_per_area))
        .collect();
    build_scheme(&areas)
}

const ASJC_LIKE_AREAS: [(&str, usize); 26] = [
    ("Agricultural and Biological Sciences", 10),
    ("Arts and Humanities", 12),
    ("Biochemistry, Genetics and Molecular Biology", 14),
    ("Business, Management and Accounting", 9),
    ("Chemical Engineering", 7),
    ("Chemistry", 6),
    ("Computer Science", 11),
    ("Decision Sciences", 3),
    ("Earth and Planetary Sciences", 11),
    ("Economics, Econometrics and Finance", 2),
    ("Energy", 4),
    ("Engineering", 16),
    ("Environmental Science", 11),
    ("Immunology and Microbiology", 5),
    ("Materials Science", 7),
    ("Mathematics", 13),
    ("Medicine", 50),
    ("Neuroscience", 8),
    ("Nursing", 22),
    ("Pharmacology, Toxicology and Pharmaceutics", 4),
    ("Physics and Astronomy", 9),
    ("Psychology", 6),
    ("Social Sciences", 22),
    ("Veterinary", 3),
    ("Dentistry", 5),
    ("Health Professions", 15),
];

/// A scheme shaped like the 26-area taxonomy: 285 targets, 26 misc
/// categories and the multidisciplinary category 1000.
pub fn asjc_like_scheme() -> CategoryScheme {
    let areas: Vec<(String, usize)> = ASJC_LIKE_AREAS
        .iter()
        .map(|&(name, n)| (name.to_owned(), n))
        .collect();
    build_scheme(&areas).expect("static scheme is valid")
}

fn build_scheme(areas: &[(String, usize)]) -> Result<CategoryScheme> {
    let mut rows = vec![(
        Category {
            code: CategoryCode(MULTIDISCIPLINARY),
            name: "Multidisciplinary".into(),
            area: AreaCode(MULTIDISCIPLINARY),
            is_misc: false,
        },
        true,
    )];
    for (i, (name, n)) in areas.iter().enumerate() {
        let area = FIRST_AREA + 100 * i as u32;
        rows.push((
            Category {
                code: CategoryCode(area),
                name: name.clone(),
                area: AreaCode(area),
                is_misc: true,
            },
            false,
        ));
        for k in 1..=*n as u32 {
            rows.push((
                Category {
                    code: CategoryCode(area + k),
                    name: format!("{name} {k}"),
                    area: AreaCode(area),
                    is_misc: false,
                },
                false,
            ));
        }
    }
    CategoryScheme::from_rows(rows)
}

pub fn generate(params: &SynthParams) -> Result<SynthCorpus> {
    params.validate()?;
    let scheme = synthetic_scheme(params.n_areas, params.cats_per_area)?;
    generate_with_scheme(params, &scheme)
}

enum JournalKind {
    Regular(CategoryCode),
    Misc(AreaCode),
    Multi,
    Unclassified,
}

/// Generates a corpus over an existing scheme; `n_areas` and
/// `cats_per_area` are ignored.
pub fn generate_with_scheme(params: &SynthParams, scheme: &CategoryScheme) -> Result<SynthCorpus> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let targets = scheme.targets();
    let misc_of: BTreeMap<AreaCode, CategoryCode> = scheme
        .categories()
        .iter()
        .filter(|c| c.is_misc && !scheme.is_multidisciplinary(c.code))
        .map(|c| (c.area, c.code))
        .collect();
    let misc_areas: Vec<AreaCode> = misc_of.keys().copied().collect();
    let mut area_targets: BTreeMap<AreaCode, Vec<CategoryCode>> = BTreeMap::new();
    for &t in targets {
        area_targets.entry(scheme.area_of(t)?).or_default().push(t);
    }
    let multi_codes: Vec<CategoryCode> = scheme
        .categories()
        .iter()
        .filter(|c| scheme.is_multidisciplinary(c.code))
        .map(|c| c.code)
        .collect();

    // Journals: kind counts are fixed by rounding, kinds then assigned in order.
    let n_j = params.n_journals;
    let n_misc = if misc_of.is_empty() { 0 } else { round(params.misc_journal_frac * n_j as f64) };
    let n_multi = round(params.multi_journal_frac * n_j as f64);
    let n_unclassified = round(params.unclassified_journal_frac * n_j as f64);
    if n_misc + n_multi + n_unclassified >= n_j {
        return Err(Error::InfeasibleParams(
            "no journal is left for regular categories".into(),
        ));
    }
    let mut builder = CorpusBuilder::new();
    let mut kinds = Vec::with_capacity(n_j);
    for j in 0..n_j {
        let (kind, codes) = if j < n_misc {
            let area = misc_areas[rng.gen_range(0..misc_areas.len())];
            (JournalKind::Misc(area), vec![misc_of[&area]])
        } else if j < n_misc + n_multi {
            (JournalKind::Multi, multi_codes.clone())
        } else if j < n_misc + n_multi + n_unclassified {
            (JournalKind::Unclassified, Vec::new())
        } else {
            let primary_pos = rng.gen_range(0..targets.len());
            let primary = targets[primary_pos];
            let mut codes = vec![primary];
            // Secondary codes sort after the primary so ties resolve to it.
            if primary_pos + 1 < targets.len() && rng.gen::<f64>() < params.secondary_code_prob {
                codes.push(targets[rng.gen_range(primary_pos + 1..targets.len())]);
            }
            (JournalKind::Regular(primary), codes)
        };
        builder.journal(JournalId(j as u64), codes);
        kinds.push(kind);
    }

    // Papers, ordered by year so that earlier ids never have later years.
    let n = params.n_papers;
    let mut years: Vec<i32> = (0..n)
        .map(|_| rng.gen_range(params.first_year..=params.last_year))
        .collect();
    years.sort_unstable();
    let mut planted = Vec::with_capacity(n);
    let mut journal_of = Vec::with_capacity(n);
    let mut citable = Vec::with_capacity(n);
    for _ in 0..n {
        let j = rng.gen_range(0..n_j);
        let category = match kinds[j] {
            JournalKind::Regular(c) => c,
            JournalKind::Misc(area) => {
                let inside = &area_targets[&area];
                inside[rng.gen_range(0..inside.len())]
            }
            JournalKind::Multi | JournalKind::Unclassified => targets[rng.gen_range(0..targets.len())],
        };
        planted.push(category);
        journal_of.push(j);
        citable.push(rng.gen::<f64>() >= params.non_citable_frac);
    }

    let mut by_category: BTreeMap<CategoryCode, Vec<usize>> = BTreeMap::new();
    for (i, &c) in planted.iter().enumerate() {
        by_category.entry(c).or_default().push(i);
    }
    let mut citations = vec![0u64; n];
    let mut edges: Vec<(usize, Option<usize>)> = Vec::new();
    let mut year_start = 0;
    let mut unresolved = 0u64;
    for i in 0..n {
        if years[i] != years[year_start] {
            year_start = i;
        }
        if rng.gen::<f64>() < params.low_ref_frac {
            continue;
        }
        let k = rng.gen_range(params.refs_min..=params.refs_max);
        let own = &by_category[&planted[i]];
        let own_earlier = own.partition_point(|&p| p < year_start);
        for _ in 0..k {
            if rng.gen::<f64>() < params.unresolved_ref_prob {
                edges.push((i, None));
                continue;
            }
            let target = if rng.gen::<f64>() < params.within_category_prob {
                (own_earlier > 0).then(|| own[rng.gen_range(0..own_earlier)])
            } else if year_start > own_earlier {
                (0..OUTSIDE_TRIES)
                    .map(|_| rng.gen_range(0..year_start))
                    .find(|&p| planted[p] != planted[i])
            } else {
                None
            };
            if let Some(t) = target {
                citations[t] += 1;
                edges.push((i, Some(t)));
            }
        }
    }

    let mut truth = BTreeMap::new();
    let mut gold = Vec::new();
    for i in 0..n {
        let id = PaperId(i as u64);
        builder.paper(PaperRecord {
            id,
            year: years[i],
            journal: JournalId(journal_of[i] as u64),
            citations: citations[i],
            is_citable: citable[i],
        });
        truth.insert(id, planted[i]);
        if citable[i] {
            gold.push((
                id,
                PaperAssignment::new(vec![(planted[i], 1.0)], Source::ReferenceBased),
            ));
        }
    }
    for (src, dst) in edges {
        let dst = match dst {
            Some(d) => d as u64,
            None => {
                unresolved += 1;
                UNRESOLVED_BASE + unresolved
            }
        };
        builder.edge(PaperId(src as u64), PaperId(dst));
    }
    let corpus = builder.build(scheme)?;
    let gold = Classification::from_assignments(
        Method::External {
            name: "truth".into(),
        },
        gold,
    )?;
    Ok(SynthCorpus {
        scheme: scheme.clone(),
        corpus,
        truth,
        gold,
    })
}

fn round(x: f64) -> usize {
    x.round() as usize
}
