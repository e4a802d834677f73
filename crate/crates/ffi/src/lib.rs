//! C ABI over the refclass core.
//!
//! Objects cross the boundary as opaque handles that the caller frees with
//! the matching `rc_*_free`. Every fallible call returns an [`RcStatus`];
//! on failure `rc_last_error_message` describes the error on the calling
//! thread. Panics are caught and reported as `RC_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use refclass::{
    Classification, ClassificationConfig, Classifier, Corpus, Counting, Error, GenerationScheme,
    Method, Source,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    InvalidInput = 5,
    OutOfRange = 6,
    EmptyIntersection = 7,
    Panic = 99,
}

/// Generation scheme codes for [`RcConfig::scheme`].
pub const RC_SCHEME_M1: u32 = 1;
pub const RC_SCHEME_M2: u32 = 2;
pub const RC_SCHEME_M3: u32 = 3;
/// Counting codes for [`RcConfig::counting`].
pub const RC_COUNTING_FULL: u32 = 0;
pub const RC_COUNTING_WEIGHTED: u32 = 1;
/// Values of the `source` out-parameter of [`rc_classification_get`].
pub const RC_SOURCE_REFERENCE_BASED: u32 = 0;
pub const RC_SOURCE_JOURNAL_FALLBACK: u32 = 1;

/// One classification configuration.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RcConfig {
    pub scheme: u32,
    pub counting: u32,
    pub averaged: bool,
    pub threshold: f64,
    pub max_categories: u32,
    pub min_active_refs: u32,
    pub gen1_weight: f64,
    pub gen2_weight: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RcEntry {
    pub category_code: u32,
    pub weight: f64,
}

pub struct RcScheme(refclass::CategoryScheme);
pub struct RcCorpus(Corpus);
pub struct RcClassification(Classification);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

type Failure = (RcStatus, String);

fn from_core(e: Error) -> Failure {
    let status = match &e {
        Error::Io { .. } => RcStatus::Io,
        Error::Parse { .. } | Error::Json(_) => RcStatus::Parse,
        Error::EmptyIntersection => RcStatus::EmptyIntersection,
        _ => RcStatus::InvalidInput,
    };
    (status, e.to_string())
}

fn guarded(f: impl FnOnce() -> Result<(), Failure>) -> RcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RcStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_owned());
            set_error(&format!("panic: {message}"));
            RcStatus::Panic
        }
    }
}

unsafe fn reference<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref()
        .ok_or_else(|| (RcStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_param<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    ptr.as_mut()
        .ok_or_else(|| (RcStatus::NullPointer, format!("{what} is null")))
}

unsafe fn path_arg(ptr: *const c_char, what: &str) -> Result<PathBuf, Failure> {
    if ptr.is_null() {
        return Err((RcStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map(PathBuf::from)
        .map_err(|_| (RcStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

impl RcConfig {
    fn to_core(self) -> Result<ClassificationConfig, Failure> {
        let invalid = |m: String| (RcStatus::InvalidInput, m);
        let scheme = match self.scheme {
            RC_SCHEME_M1 => GenerationScheme::M1,
            RC_SCHEME_M2 => GenerationScheme::M2,
            RC_SCHEME_M3 => GenerationScheme::M3,
            s => return Err(invalid(format!("unknown scheme code {s}"))),
        };
        let counting = match self.counting {
            RC_COUNTING_FULL => Counting::Full,
            RC_COUNTING_WEIGHTED => Counting::Weighted,
            c => return Err(invalid(format!("unknown counting code {c}"))),
        };
        let cfg = ClassificationConfig {
            scheme,
            counting,
            averaged: self.averaged,
            gen1_weight: self.gen1_weight,
            gen2_weight: self.gen2_weight,
            threshold: self.threshold,
            max_categories: self.max_categories as usize,
            min_active_refs: self.min_active_refs as usize,
        };
        cfg.validate().map_err(from_core)?;
        Ok(cfg)
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn rc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// The M3-AWC-0.8 configuration with the standard weights, cap and gate.
#[no_mangle]
pub extern "C" fn rc_config_default() -> RcConfig {
    RcConfig {
        scheme: RC_SCHEME_M3,
        counting: RC_COUNTING_WEIGHTED,
        averaged: true,
        threshold: 0.8,
        max_categories: ClassificationConfig::MAX_CATEGORIES as u32,
        min_active_refs: ClassificationConfig::MIN_ACTIVE_REFS as u32,
        gen1_weight: ClassificationConfig::GEN1_WEIGHT,
        gen2_weight: ClassificationConfig::GEN2_WEIGHT,
    }
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_scheme_load(path: *const c_char, out: *mut *mut RcScheme) -> RcStatus {
    guarded(|| {
        let out = out_param(out, "out")?;
        let scheme = refclass::CategoryScheme::load(&path_arg(path, "path")?).map_err(from_core)?;
        *out = Box::into_raw(Box::new(RcScheme(scheme)));
        Ok(())
    })
}

/// # Safety
/// `scheme` must be null or a handle from [`rc_scheme_load`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rc_scheme_free(scheme: *mut RcScheme) {
    if !scheme.is_null() {
        drop(Box::from_raw(scheme));
    }
}

/// Number of target categories; 0 for a null handle.
///
/// # Safety
/// `scheme` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_scheme_target_count(scheme: *const RcScheme) -> usize {
    scheme.as_ref().map_or(0, |s| s.0.target_count())
}

/// # Safety
/// Paths must be NUL-terminated strings, `scheme` a live handle and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn rc_corpus_ingest(
    papers: *const c_char,
    journals: *const c_char,
    edges: *const c_char,
    scheme: *const RcScheme,
    out: *mut *mut RcCorpus,
) -> RcStatus {
    guarded(|| {
        let out = out_param(out, "out")?;
        let scheme = reference(scheme, "scheme")?;
        let corpus = Corpus::ingest(
            &path_arg(papers, "papers")?,
            &path_arg(journals, "journals")?,
            &path_arg(edges, "edges")?,
            &scheme.0,
        )
        .map_err(from_core)?;
        *out = Box::into_raw(Box::new(RcCorpus(corpus)));
        Ok(())
    })
}

/// # Safety
/// `corpus` must be null or a handle from [`rc_corpus_ingest`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rc_corpus_free(corpus: *mut RcCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// # Safety
/// `corpus` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_corpus_paper_count(corpus: *const RcCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.0.paper_count())
}

unsafe fn run_method(
    corpus: *const RcCorpus,
    scheme: *const RcScheme,
    method: impl FnOnce() -> Result<Method, Failure>,
    out: *mut *mut RcClassification,
) -> RcStatus {
    guarded(|| {
        let out = out_param(out, "out")?;
        let corpus = reference(corpus, "corpus")?;
        let scheme = reference(scheme, "scheme")?;
        let c = Classifier::new(&corpus.0, &scheme.0)
            .run(&method()?)
            .map_err(from_core)?;
        *out = Box::into_raw(Box::new(RcClassification(c)));
        Ok(())
    })
}

/// Classifies every citable paper of `corpus` under `config`.
///
/// # Safety
/// Handles must be live, `config` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_classify(
    corpus: *const RcCorpus,
    scheme: *const RcScheme,
    config: *const RcConfig,
    out: *mut *mut RcClassification,
) -> RcStatus {
    run_method(
        corpus,
        scheme,
        || Ok(Method::Reference(reference(config, "config")?.to_core()?)),
        out,
    )
}

/// Journal-based classification; `threshold <= 0` leaves it untruncated.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_asjc_baseline(
    corpus: *const RcCorpus,
    scheme: *const RcScheme,
    threshold: f64,
    out: *mut *mut RcClassification,
) -> RcStatus {
    run_method(
        corpus,
        scheme,
        || {
            let m = Method::baseline((threshold > 0.0).then_some(threshold));
            m.validate().map_err(from_core)?;
            Ok(m)
        },
        out,
    )
}

/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_classification_len(c: *const RcClassification) -> usize {
    c.as_ref().map_or(0, |c| c.0.len())
}

/// Paper id, number of entries and source of the `index`-th assignment
/// (papers in ascending id order).
///
/// # Safety
/// `c` must be a live handle and the out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn rc_classification_get(
    c: *const RcClassification,
    index: usize,
    paper_id: *mut u64,
    entries: *mut usize,
    source: *mut u32,
) -> RcStatus {
    guarded(|| {
        let c = reference(c, "classification")?;
        let paper_id = out_param(paper_id, "paper_id")?;
        let entries = out_param(entries, "entries")?;
        let source = out_param(source, "source")?;
        let (id, a) = c.0.assignments().get(index).ok_or_else(|| {
            (RcStatus::OutOfRange, format!("index {index} >= {}", c.0.len()))
        })?;
        *paper_id = id.0;
        *entries = a.len();
        *source = match a.source() {
            Source::ReferenceBased => RC_SOURCE_REFERENCE_BASED,
            Source::JournalFallback => RC_SOURCE_JOURNAL_FALLBACK,
        };
        Ok(())
    })
}

/// Entry `rank` (0-based, heaviest first) of the `index`-th assignment.
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_classification_entry(
    c: *const RcClassification,
    index: usize,
    rank: usize,
    out: *mut RcEntry,
) -> RcStatus {
    guarded(|| {
        let c = reference(c, "classification")?;
        let out = out_param(out, "out")?;
        let (_, a) = c.0.assignments().get(index).ok_or_else(|| {
            (RcStatus::OutOfRange, format!("index {index} >= {}", c.0.len()))
        })?;
        let &(code, weight) = a.entries().get(rank).ok_or_else(|| {
            (RcStatus::OutOfRange, format!("rank {rank} >= {}", a.len()))
        })?;
        *out = RcEntry {
            category_code: code.0,
            weight,
        };
        Ok(())
    })
}

/// Writes `paper_id,rank,category_code,weight,source` rows to `path`.
///
/// # Safety
/// `c` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rc_classification_write_csv(
    c: *const RcClassification,
    path: *const c_char,
) -> RcStatus {
    guarded(|| {
        let c = reference(c, "classification")?;
        let path = path_arg(path, "path")?;
        let file = std::fs::File::create(&path)
            .map_err(|e| (RcStatus::Io, format!("{}: {e}", path.display())))?;
        c.0.write_csv(std::io::BufWriter::new(file)).map_err(from_core)
    })
}

/// # Safety
/// `c` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rc_classification_free(c: *mut RcClassification) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Percentage weight overlap of `test` with `gold` over their shared papers.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_coincidence(
    test: *const RcClassification,
    gold: *const RcClassification,
    out: *mut f64,
) -> RcStatus {
    guarded(|| {
        let test = reference(test, "test")?;
        let gold = reference(gold, "gold")?;
        let out = out_param(out, "out")?;
        *out = refclass::metrics::coincidence(&test.0, &gold.0).map_err(from_core)?;
        Ok(())
    })
}
