//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints one PASS/FAIL line; the process fails if any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{check_invariants, oracle_config, Oracle, OracleOutcome};
use refclass::metrics;
use refclass::synthgen::{self, SynthCorpus, SynthParams};
use refclass::{
    default_grid, generation_share, reference_contribution, select_categories, CategoryCode,
    CategoryScheme, CategoryVector, Classification, ClassificationConfig, Classifier, Corpus,
    Counting, GenerationScheme, Method, PaperId, ShareOutcome, Source,
};

const ORACLE_TOL: f64 = 1e-12;
const ORACLE_BUDGET: Duration = Duration::from_secs(10);
const SUM_TOL: f64 = 1e-9;
const NI_TOL: f64 = 1e-9;
const SHARE_VECTORS: usize = 10_000;
const LARGE_PAPERS: usize = 100_000;
const LARGE_EDGES: usize = 1_000_000;
const GRID_BUDGET: Duration = Duration::from_secs(300);
const MEMORY_BUDGET_KB: u64 = 4 * 1024 * 1024;
/// Upper bound on the log-log slope of grid time against path count.
const MAX_SCALING_SLOPE: f64 = 1.3;

type Check = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("grid structure", grid_structure),
        ("chain, cap and monotonicity", chain_cap_monotonicity),
        ("M3 linearity", m3_linearity),
        ("gate rule", gate_rule),
        ("zero-noise recovery", zero_noise_recovery),
        ("metric identities", metric_identities),
        ("granularity-CV anticorrelation", granularity_cv),
        ("performance", performance),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS [{secs:.1}s] {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{secs:.1}s] {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn load(dir: &Path) -> (CategoryScheme, Corpus) {
    let scheme = CategoryScheme::load(&dir.join("scheme.csv")).unwrap();
    let corpus = Corpus::ingest(
        &dir.join("papers.csv"),
        &dir.join("journals.csv"),
        &dir.join("edges.csv"),
        &scheme,
    )
    .unwrap();
    (scheme, corpus)
}

/// Every configuration the engine supports: the 30 grid points plus M3
/// with a relaxed gate.
fn all_configs() -> Vec<ClassificationConfig> {
    let mut out: Vec<ClassificationConfig> = default_grid()
        .iter()
        .filter_map(|m| match m {
            Method::Reference(c) => Some(*c),
            _ => None,
        })
        .collect();
    for c in out.clone() {
        if c.scheme == GenerationScheme::M3 && c.threshold == 0.5 {
            out.push(ClassificationConfig {
                min_active_refs: 1,
                ..c
            });
        }
    }
    out
}

fn oracle_equivalence() -> Result<String, String> {
    let started = Instant::now();
    let configs = all_configs();
    let mut checked = 0usize;
    for k in 0..50u64 {
        let tmp = tempfile::tempdir().unwrap();
        let raw = if k % 2 == 0 {
            let raw = common::random_raw(k);
            raw.write(tmp.path());
            raw
        } else {
            common::synth_raw(&common::small_synth_params(k), tmp.path())
        };
        let (scheme, corpus) = load(tmp.path());
        ensure(scheme.categories().len() <= 20, || format!("corpus {k}: scheme too large"))?;
        ensure(corpus.paper_count() <= 100, || format!("corpus {k}: too many papers"))?;
        let engine = Classifier::new(&corpus, &scheme);
        let oracle = Oracle::new(&raw);
        for cfg in &configs {
            let ocfg = oracle_config(&Method::Reference(*cfg)).unwrap();
            for p in &raw.papers {
                let got = engine.paper_shares(PaperId(p.id), cfg).unwrap();
                let want = oracle.shares(p.id, &ocfg);
                match (&got, &want) {
                    (ShareOutcome::GateFailed { quantity, .. }, OracleOutcome::GateFailed(q))
                        if quantity == q => {}
                    (ShareOutcome::Shares(v), OracleOutcome::Shares(w)) => {
                        let keys: BTreeSet<u32> =
                            v.iter().map(|(c, _)| c.0).chain(w.keys().copied()).collect();
                        for code in keys {
                            let a = v.get(CategoryCode(code));
                            let b = w.get(&code).copied().unwrap_or(0.0);
                            ensure((a - b).abs() <= ORACLE_TOL, || {
                                format!(
                                    "corpus {k}, paper {}, {}: category {code} engine {a} oracle {b}",
                                    p.id,
                                    cfg.label()
                                )
                            })?;
                        }
                    }
                    _ => {
                        return Err(format!(
                            "corpus {k}, paper {}, {}: engine {got:?} oracle {want:?}",
                            p.id,
                            cfg.label()
                        ))
                    }
                }
                checked += 1;
            }
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < ORACLE_BUDGET, || {
        format!("took {elapsed:?}, budget {ORACLE_BUDGET:?}")
    })?;
    Ok(format!(
        "50 corpora, {checked} paper/config pairs within {ORACLE_TOL:e} in {elapsed:.2?} (< {ORACLE_BUDGET:?})"
    ))
}

/// Row labels of the method comparison table, in order.
fn expected_grid_labels() -> Vec<String> {
    let mut labels = Vec::new();
    for (scheme, countings) in [
        ("M1", &["FC", "WC"][..]),
        ("M2", &["FC", "WC", "AFC", "AWC"][..]),
        ("M3", &["FC", "WC", "AFC", "AWC"][..]),
    ] {
        for counting in countings {
            for t in ["0.5", "0.67", "0.8"] {
                labels.push(format!("{scheme}-{counting}-{t}"));
            }
        }
    }
    labels.push("ASJC".into());
    for t in ["0.5", "0.67", "0.8"] {
        labels.push(format!("ASJC-{t}"));
    }
    labels
}

fn grid_structure() -> Result<String, String> {
    let synth = synthgen::generate(&SynthParams::default()).unwrap();
    let grid = default_grid();
    let reference = grid.iter().filter(|m| m.is_reference_based()).count();
    ensure(reference == 30 && grid.len() == 34, || {
        format!("{reference} reference-based of {}", grid.len())
    })?;
    let labels: Vec<String> = grid.iter().map(Method::label).collect();
    ensure(labels == expected_grid_labels(), || format!("labels {labels:?}"))?;
    let runs = Classifier::new(&synth.corpus, &synth.scheme).run_grid(&grid).unwrap();
    ensure(runs.len() == 34, || format!("{} classifications", runs.len()))?;
    let mut assignments = 0;
    for c in &runs {
        check_invariants(c).map_err(|e| format!("{}: {e}", c.label()))?;
        assignments += c.len();
    }
    Ok(format!("30 reference-based + 4 baselines, {assignments} assignments pass the invariants"))
}

fn random_shares(rng: &mut ChaCha8Rng) -> CategoryVector {
    let n = rng.gen_range(1..=30u32);
    let pairs = (0..n).map(|i| {
        // Mix continuous weights with repeated values so ties occur.
        let w = if rng.gen_bool(0.3) {
            rng.gen_range(1..=4) as f64
        } else {
            rng.gen_range(1e-6..1.0)
        };
        (CategoryCode(1000 + i * 7), w)
    });
    CategoryVector::from_pairs(pairs).normalized()
}

fn chain_cap_monotonicity() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let thresholds = [0.5, 2.0 / 3.0, 0.8];
    for i in 0..SHARE_VECTORS {
        let shares = random_shares(&mut rng);
        let mut ranked = shares.entries().to_vec();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut lengths = Vec::new();
        for t in thresholds {
            let a = select_categories(&shares, t, 5).unwrap();
            let e = a.entries();
            ensure(!e.is_empty() && e.len() <= 5, || format!("vector {i}: {} entries", e.len()))?;
            let sum: f64 = e.iter().map(|x| x.1).sum();
            ensure((sum - 1.0).abs() <= SUM_TOL, || format!("vector {i}: sum {sum}"))?;
            // Accepted entries are the ranked prefix, each at least t times
            // the previous; the first rejected one (below the cap) breaks it.
            for (k, &(code, _)) in e.iter().enumerate() {
                ensure(code == ranked[k].0, || format!("vector {i}: not a ranked prefix"))?;
                if k > 0 {
                    ensure(ranked[k].1 >= t * ranked[k - 1].1 * (1.0 - 1e-12), || {
                        format!("vector {i}: accepted entry {k} violates the chain at t={t}")
                    })?;
                }
            }
            let n = e.len();
            if n < 5 && n < ranked.len() {
                ensure(ranked[n].1 < t * ranked[n - 1].1, || {
                    format!("vector {i}: entry {n} rejected although it satisfies the chain")
                })?;
            }
            lengths.push(n);
        }
        ensure(lengths.windows(2).all(|w| w[0] >= w[1]), || {
            format!("vector {i}: lengths {lengths:?} not monotone in threshold")
        })?;
    }
    Ok(format!(
        "{SHARE_VECTORS} vectors x 3 thresholds: chain, cap 5, prefix monotonicity, sums 1 +/- {SUM_TOL:e}"
    ))
}

fn contributions(
    corpus: &Corpus,
    scheme: &CategoryScheme,
    ids: &[PaperId],
    counting: Counting,
) -> Vec<CategoryVector> {
    ids.iter()
        .filter_map(|&id| {
            let j = corpus.journal(corpus.paper(id).unwrap().journal).unwrap();
            (!j.codes.is_empty()).then(|| reference_contribution(j, counting, scheme).unwrap())
        })
        .collect()
}

fn m3_linearity() -> Result<String, String> {
    let mut papers = 0usize;
    for seed in [1u64, 2, 3] {
        let synth = synthgen::generate(&SynthParams {
            seed,
            n_papers: 800,
            n_journals: 60,
            ..SynthParams::default()
        })
        .unwrap();
        let (corpus, scheme) = (&synth.corpus, &synth.scheme);
        let engine = Classifier::new(corpus, scheme);
        let configs: Vec<ClassificationConfig> = all_configs()
            .into_iter()
            .filter(|c| c.scheme == GenerationScheme::M3)
            .collect();
        for p in corpus.papers() {
            for cfg in &configs {
                let first = corpus.first_generation(p.id).unwrap();
                let g1 = vec![contributions(corpus, scheme, &first, cfg.counting)];
                let g2: Vec<Vec<CategoryVector>> = corpus
                    .second_generation(p.id)
                    .unwrap()
                    .iter()
                    .map(|(_, children)| contributions(corpus, scheme, children, cfg.counting))
                    .collect();
                let (Ok(s1), Ok(s2)) = (generation_share(&g1, false), generation_share(&g2, cfg.averaged))
                else {
                    continue;
                };
                let ShareOutcome::Shares(m3) = engine.paper_shares(p.id, cfg).unwrap() else {
                    continue;
                };
                let codes: BTreeSet<CategoryCode> =
                    s1.iter().chain(s2.iter()).map(|(c, _)| c).collect();
                ensure(m3.len() == codes.len(), || format!("paper {}: support differs", p.id))?;
                for code in codes {
                    let want = 0.618 * s1.get(code) + 0.382 * s2.get(code);
                    ensure(m3.get(code) == want, || {
                        format!("paper {} {}: {} != {want}", p.id, cfg.label(), m3.get(code))
                    })?;
                }
                papers += 1;
            }
        }
    }
    ensure(papers > 0, || "no paper has both generations".into())?;
    Ok(format!("{papers} paper/config pairs equal 0.618*S1 + 0.382*S2 bit for bit"))
}

fn gate_rule() -> Result<String, String> {
    let mut checked = 0usize;
    let mut fallbacks = 0usize;
    let mut excluded = 0usize;
    for seed in 0..6u64 {
        let tmp = tempfile::tempdir().unwrap();
        let params = SynthParams {
            seed,
            n_papers: 600,
            n_journals: 50,
            misc_journal_frac: 0.15,
            multi_journal_frac: 0.1,
            unclassified_journal_frac: 0.15,
            low_ref_frac: 0.3,
            ..SynthParams::default()
        };
        let raw = common::synth_raw(&params, tmp.path());
        let oracle = Oracle::new(&raw);
        let (scheme, corpus) = load(tmp.path());
        let runs = Classifier::new(&corpus, &scheme)
            .run_grid(&default_grid()[..30])
            .unwrap();
        for c in &runs {
            let Method::Reference(cfg) = c.method() else { unreachable!() };
            let mut want_fallback = BTreeSet::new();
            let mut want_excluded = BTreeSet::new();
            for p in raw.papers.iter().filter(|p| p.citable) {
                if oracle.gate_quantity(p.id, cfg.scheme) < 3 {
                    if raw.journals[&p.journal].is_empty() {
                        want_excluded.insert(p.id);
                    } else {
                        want_fallback.insert(p.id);
                    }
                }
            }
            let got_fallback: BTreeSet<u64> = c
                .iter()
                .filter(|(_, a)| a.source() == Source::JournalFallback)
                .map(|(id, _)| id.0)
                .collect();
            let citable: BTreeSet<u64> =
                raw.papers.iter().filter(|p| p.citable).map(|p| p.id).collect();
            let classified: BTreeSet<u64> = c.iter().map(|(id, _)| id.0).collect();
            let got_excluded: BTreeSet<u64> = citable.difference(&classified).copied().collect();
            ensure(got_fallback == want_fallback, || {
                format!("seed {seed} {}: fallback sets differ", c.label())
            })?;
            ensure(got_excluded == want_excluded, || {
                format!("seed {seed} {}: excluded sets differ", c.label())
            })?;
            fallbacks += got_fallback.len();
            excluded += got_excluded.len();
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} classifications: {fallbacks} fallbacks and {excluded} exclusions match the recount"
    ))
}

fn zero_noise_recovery() -> Result<String, String> {
    let synth = synthgen::generate(&SynthParams {
        seed: 11,
        within_category_prob: 1.0,
        low_ref_frac: 0.0,
        misc_journal_frac: 0.0,
        multi_journal_frac: 0.0,
        ..SynthParams::default()
    })
    .unwrap();
    let runs = Classifier::new(&synth.corpus, &synth.scheme)
        .run_grid(&default_grid()[..30])
        .unwrap();
    let by_label: BTreeMap<String, &Classification> = runs.iter().map(|c| (c.label(), c)).collect();
    let mut lines = Vec::new();
    for c in &runs {
        let Method::Reference(cfg) = c.method() else { unreachable!() };
        if cfg.counting != Counting::Weighted {
            continue;
        }
        for (id, a) in c.iter() {
            let top = a.entries()[0].0;
            ensure(top == synth.truth[&id], || {
                format!("{}: paper {id} top-1 {top}, planted {}", c.label(), synth.truth[&id])
            })?;
        }
        let wc = metrics::coincidence(c, &synth.gold).unwrap();
        let fc_label = c.label().replacen("WC", "FC", 1);
        let fc = metrics::coincidence(by_label[&fc_label], &synth.gold).unwrap();
        ensure(wc >= fc, || format!("{}: coincidence {wc} below {fc_label} {fc}", c.label()))?;
        lines.push(format!("{} {wc:.2}>={fc:.2}", c.label()));
    }
    Ok(format!("WC top-1 100% on 15 configs; coincidence {}", lines.join(", ")))
}

fn metric_identities() -> Result<String, String> {
    use refclass::PaperAssignment;
    // Weights {3, 1}: four papers, three in one category and one in another.
    let fixture = Classification::from_assignments(
        Method::External { name: "fixture".into() },
        (1..=4)
            .map(|i| {
                let code = if i == 4 { 1102 } else { 1101 };
                (PaperId(i), PaperAssignment::new(vec![(CategoryCode(code), 1.0)], Source::ReferenceBased))
            })
            .collect(),
    )
    .unwrap();
    let g = metrics::size_stats(&fixture).unwrap().granularity;
    ensure((g - 0.4).abs() <= 1e-15, || format!("granularity {g}, want 0.4"))?;

    let tmp = tempfile::tempdir().unwrap();
    let corpus_dir = tmp.path().join("corpus");
    let synth = synthgen::generate(&SynthParams {
        n_papers: 1500,
        ..SynthParams::default()
    })
    .unwrap();
    synth.emit(&corpus_dir).unwrap();
    let runs = Classifier::new(&synth.corpus, &synth.scheme).run_grid(&default_grid()).unwrap();
    for c in &runs {
        let x = metrics::coincidence(c, c).unwrap();
        ensure((x - 100.0).abs() <= 1e-9, || format!("{}: self-coincidence {x}", c.label()))?;
        let ni = metrics::normalized_impact(&synth.corpus, c).unwrap();
        let expected: f64 = ni_year_weights(&synth.corpus, c, &ni);
        ensure((expected - 1.0).abs() <= NI_TOL, || {
            format!("{}: year-weighted mean NI {expected}", c.label())
        })?;
        for (year, mean) in &ni.year_means {
            ensure((mean - 1.0).abs() <= NI_TOL, || {
                format!("{}: year {year} mean NI {mean}", c.label())
            })?;
        }
    }

    let run = |threads: &str| {
        let out = tmp.path().join(format!("out{threads}"));
        let code = refclass::cli::main_from([
            "refclass",
            "report",
            "--corpus",
            corpus_dir.to_str().unwrap(),
            "--gold",
            corpus_dir.join("truth.csv").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert_eq!(code, 0, "report with {threads} threads failed");
        out
    };
    let (a, b) = (run("1"), run("4"));
    let files = tree(&a);
    ensure(files == tree(&b), || "output file sets differ".into())?;
    for f in &files {
        ensure(std::fs::read(a.join(f)).unwrap() == std::fs::read(b.join(f)).unwrap(), || {
            format!("{f} differs between 1 and 4 threads")
        })?;
    }
    Ok(format!(
        "granularity {{3,1}} = 0.4, self-coincidence 100 and mean NI 1 +/- {NI_TOL:e} on 34 methods, {} output files identical at 1 and 4 threads",
        files.len()
    ))
}

/// Overall mean NI with each year weighted by its expected citations.
fn ni_year_weights(corpus: &Corpus, c: &Classification, ni: &metrics::NormalizedImpact) -> f64 {
    let mut weight: BTreeMap<i32, f64> = BTreeMap::new();
    for (id, _) in c.iter() {
        if ni.get(id).is_some() {
            *weight.entry(corpus.paper(id).unwrap().year).or_insert(0.0) += 1.0;
        }
    }
    let total: f64 = weight.values().sum();
    ni.year_means.iter().map(|(y, m)| m * weight[y] / total).sum()
}

fn tree(root: &Path) -> Vec<String> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_string_lossy().into_owned());
            }
        }
    }
    out.sort();
    out
}

fn large_params(n_papers: usize) -> SynthParams {
    SynthParams {
        seed: 7,
        n_papers,
        n_journals: n_papers / 50,
        refs_min: 9,
        refs_max: 17,
        first_year: 2010,
        last_year: 2020,
        unresolved_ref_prob: 0.05,
        low_ref_frac: 0.02,
        ..SynthParams::default()
    }
}

fn large() -> &'static SynthCorpus {
    static LARGE: OnceLock<SynthCorpus> = OnceLock::new();
    LARGE.get_or_init(|| {
        synthgen::generate_with_scheme(&large_params(LARGE_PAPERS), &synthgen::asjc_like_scheme()).unwrap()
    })
}

fn granularity_cv() -> Result<String, String> {
    let synth = large();
    let runs = Classifier::new(&synth.corpus, &synth.scheme)
        .run_grid(&default_grid()[..30])
        .unwrap();
    let (g, cv): (Vec<f64>, Vec<f64>) = runs
        .iter()
        .map(|c| {
            let s = metrics::size_stats(c).unwrap();
            (s.granularity, s.cv)
        })
        .unzip();
    let rho = metrics::spearman(&g, &cv).ok_or("Spearman undefined")?;
    ensure(rho < 0.0, || format!("Spearman {rho}"))?;
    Ok(format!("Spearman {rho:.4} < 0 over 30 configs on {} papers", synth.corpus.paper_count()))
}

/// Number of first- and second-generation reference paths of all papers.
fn path_count(corpus: &Corpus) -> usize {
    corpus
        .papers()
        .iter()
        .map(|p| {
            corpus
                .second_generation(p.id)
                .unwrap()
                .iter()
                .map(|(_, children)| 1 + children.len())
                .sum::<usize>()
        })
        .sum()
}

fn peak_rss_kb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

/// Best of two runs of the full grid, to damp scheduler noise.
fn time_grid(synth: &SynthCorpus) -> Duration {
    (0..2)
        .map(|_| {
            let started = Instant::now();
            let runs = Classifier::new(&synth.corpus, &synth.scheme)
                .run_grid(&default_grid())
                .unwrap();
            assert_eq!(runs.len(), 34);
            started.elapsed()
        })
        .min()
        .unwrap()
}

fn performance() -> Result<String, String> {
    let synth = large();
    let (papers, edges) = (synth.corpus.paper_count(), synth.corpus.edge_count());
    ensure(papers >= LARGE_PAPERS && edges >= LARGE_EDGES, || {
        format!("corpus has {papers} papers and {edges} resolved edges")
    })?;
    let elapsed = time_grid(synth);
    ensure(elapsed < GRID_BUDGET, || format!("grid took {elapsed:?}"))?;
    let memory = match peak_rss_kb() {
        Some(kb) => {
            ensure(kb < MEMORY_BUDGET_KB, || format!("peak RSS {kb} kB"))?;
            format!("peak RSS {} MB", kb / 1024)
        }
        None => "peak RSS unavailable".to_owned(),
    };

    let mut points = Vec::new();
    for n in [LARGE_PAPERS / 4, LARGE_PAPERS / 2] {
        let s = synthgen::generate_with_scheme(&large_params(n), &synth.scheme).unwrap();
        points.push((path_count(&s.corpus) as f64, time_grid(&s).as_secs_f64()));
    }
    points.push((path_count(&synth.corpus) as f64, elapsed.as_secs_f64()));
    let logs: Vec<(f64, f64)> = points.iter().map(|&(w, t)| (w.ln(), t.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / logs.len() as f64;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / logs.len() as f64;
    let slope = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / logs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    ensure(slope <= MAX_SCALING_SLOPE, || {
        format!("time grows with path count at log-log slope {slope:.2} (points {points:?})")
    })?;
    Ok(format!(
        "34 methods on {papers} papers / {edges} edges in {elapsed:.1?} (< {GRID_BUDGET:?}), {memory} (< 4 GB), scaling slope {slope:.2} (<= {MAX_SCALING_SLOPE})"
    ))
}
