//! C ABI for the coreference evaluation toolkit, for binding from other
//! languages.
//!
//! Conventions:
//! - Corpora are opaque handles created by the `coref_eval_corpus_*`
//!   constructors and released with [`coref_eval_corpus_free`].
//! - Every fallible function returns a [`CorefEvalStatus`]; on failure a
//!   thread-local message is readable via
//!   [`coref_eval_last_error_message`] until the next call on that
//!   thread.
//! - Returned strings are UTF-8, NUL-terminated, owned by the caller,
//!   and must be released with [`coref_eval_string_free`].
//!
//! The header `include/coref_eval.h` is generated at build time.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use coref_eval::ingest::{
    align, filter_scope, parse_coref_file, parse_dependency_file, AlignOptions, IngestOptions,
};
use coref_eval::metrics::{
    b_cubed_counts, b_cubed_typed_counts, ceaf_e_counts, conll_f1_from, muc_counts, PairCounts,
    ScoreTriple,
};
use coref_eval::typing::{predicates_for_names, TypingConfig};
use coref_eval::{Corpus, EntityPartition, Error};

/// Status codes, mirroring the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorefEvalStatus {
    /// Success.
    CorefEvalOk = 0,
    /// Invalid arguments or configuration (including unreadable files).
    CorefEvalUsageError = 1,
    /// Parse or alignment failure in an input file.
    CorefEvalParseError = 2,
    /// Internal invariant violation (including caught panics).
    CorefEvalInternalError = 3,
}

use CorefEvalStatus::*;

/// Opaque parsed corpus handle.
pub struct CorefEvalCorpus {
    corpus: Corpus,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_for(err: &Error) -> CorefEvalStatus {
    match err.exit_code() {
        1 => CorefEvalUsageError,
        2 => CorefEvalParseError,
        _ => CorefEvalInternalError,
    }
}

fn fail(err: &Error) -> CorefEvalStatus {
    set_error(&err.to_string());
    status_for(err)
}

fn guard(body: impl FnOnce() -> CorefEvalStatus) -> CorefEvalStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic in coref-eval".to_string());
            set_error(&message);
            CorefEvalInternalError
        }
    }
}

/// # Safety
/// `ptr` must be NULL or a valid NUL-terminated UTF-8 string.
unsafe fn optional_str<'a>(ptr: *const c_char) -> Result<Option<&'a str>, CorefEvalStatus> {
    if ptr.is_null() {
        return Ok(None);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(Some(s)),
        Err(_) => {
            set_error("argument is not valid UTF-8");
            Err(CorefEvalUsageError)
        }
    }
}

unsafe fn required_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, CorefEvalStatus> {
    match optional_str(ptr)? {
        Some(s) => Ok(s),
        None => {
            set_error(&format!("{what} must not be NULL"));
            Err(CorefEvalUsageError)
        }
    }
}

fn build_corpus(
    gold_text: &str,
    parse_text: Option<&str>,
    apply_scope_filter: bool,
) -> Result<Corpus, Error> {
    let parsed = parse_coref_file(gold_text, &IngestOptions::named("corpus"))?;
    let mut corpus = parsed.corpus;
    if let Some(parse_text) = parse_text {
        let deps = parse_dependency_file(parse_text)?;
        align(&mut corpus, &deps, &AlignOptions::default())?;
    }
    if apply_scope_filter {
        corpus = filter_scope(corpus).0;
    }
    Ok(corpus)
}

unsafe fn emit_corpus(
    corpus: Result<Corpus, Error>,
    out: *mut *mut CorefEvalCorpus,
) -> CorefEvalStatus {
    if out.is_null() {
        set_error("output handle must not be NULL");
        return CorefEvalUsageError;
    }
    match corpus {
        Ok(corpus) => {
            *out = Box::into_raw(Box::new(CorefEvalCorpus { corpus }));
            CorefEvalOk
        }
        Err(e) => {
            *out = ptr::null_mut();
            fail(&e)
        }
    }
}

/// Parses a corpus (and optional dependency sidecar) from in-memory text.
/// `parse_text` may be NULL. When `apply_scope_filter` is true,
/// discontinuous mentions and singleton clusters are removed, matching
/// the scoring scope.
///
/// # Safety
/// Pointer arguments must satisfy the conventions in the module docs.
#[no_mangle]
pub unsafe extern "C" fn coref_eval_corpus_parse(
    gold_text: *const c_char,
    parse_text: *const c_char,
    apply_scope_filter: bool,
    out: *mut *mut CorefEvalCorpus,
) -> CorefEvalStatus {
    guard(|| {
        let gold = match required_str(gold_text, "gold_text") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let parses = match optional_str(parse_text) {
            Ok(p) => p,
            Err(status) => return status,
        };
        emit_corpus(build_corpus(gold, parses, apply_scope_filter), out)
    })
}

/// Loads a corpus from a bracket-format file plus an optional dependency
/// sidecar path (NULL to skip).
///
/// # Safety
/// Pointer arguments must satisfy the conventions in the module docs.
#[no_mangle]
pub unsafe extern "C" fn coref_eval_corpus_load(
    gold_path: *const c_char,
    parse_path: *const c_char,
    apply_scope_filter: bool,
    out: *mut *mut CorefEvalCorpus,
) -> CorefEvalStatus {
    guard(|| {
        let gold_path = match required_str(gold_path, "gold_path") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let parse_path = match optional_str(parse_path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let read =
            |p: &str| std::fs::read_to_string(Path::new(p)).map_err(|e| Error::io(Path::new(p), e));
        let gold_text = match read(gold_path) {
            Ok(t) => t,
            Err(e) => return fail(&e),
        };
        let parse_text = match parse_path.map(read).transpose() {
            Ok(t) => t,
            Err(e) => return fail(&e),
        };
        emit_corpus(
            build_corpus(&gold_text, parse_text.as_deref(), apply_scope_filter),
            out,
        )
    })
}

/// Number of documents in the corpus; 0 for NULL.
///
/// # Safety
/// `corpus` must be NULL or a live handle returned by a constructor.
#[no_mangle]
pub unsafe extern "C" fn coref_eval_corpus_document_count(corpus: *const CorefEvalCorpus) -> u64 {
    if corpus.is_null() {
        return 0;
    }
    (*corpus).corpus.documents.len() as u64
}

/// Releases a corpus handle. NULL is a no-op.
///
/// # Safety
/// `corpus` must be NULL or a handle returned by a constructor, not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn coref_eval_corpus_free(corpus: *mut CorefEvalCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

#[derive(serde::Serialize)]
struct ScoreReport {
    b_cubed: ScoreTriple,
    muc: ScoreTriple,
    ceaf_e: ScoreTriple,
    conll_f1: Option<f64>,
    typed: BTreeMap<String, ScoreTriple>,
}

fn score_corpora(
    gold: &Corpus,
    pred: &Corpus,
    type_names: &[String],
) -> Result<ScoreReport, Error> {
    let predicates = predicates_for_names(type_names, &TypingConfig::default())?;
    let pred_by_id: BTreeMap<&str, &EntityPartition> = pred
        .documents
        .iter()
        .map(|d| (d.doc_id.as_str(), &d.gold))
        .collect();
    let empty = EntityPartition::empty();
    let mut b3 = PairCounts::default();
    let mut muc = PairCounts::default();
    let mut ceaf = PairCounts::default();
    let mut typed: BTreeMap<String, PairCounts> = BTreeMap::new();
    for doc in &gold.documents {
        let pred_partition = pred_by_id
            .get(doc.doc_id.as_str())
            .copied()
            .unwrap_or(&empty);
        b3.merge(&b_cubed_counts(&doc.gold, pred_partition));
        muc.merge(&muc_counts(&doc.gold, pred_partition));
        ceaf.merge(&ceaf_e_counts(&doc.gold, pred_partition));
        if doc.is_parse_aligned() {
            for predicate in &predicates {
                typed
                    .entry(predicate.name().to_string())
                    .or_default()
                    .merge(&b_cubed_typed_counts(
                        &doc.gold,
                        pred_partition,
                        predicate,
                        doc,
                    ));
            }
        } else if !predicates.is_empty() {
            for predicate in &predicates {
                typed.entry(predicate.name().to_string()).or_default();
            }
        }
    }
    let b_cubed = b3.score();
    let muc = muc.score();
    let ceaf_e = ceaf.score();
    Ok(ScoreReport {
        conll_f1: conll_f1_from(&b_cubed, &muc, &ceaf_e),
        b_cubed,
        muc,
        ceaf_e,
        typed: typed.into_iter().map(|(k, v)| (k, v.score())).collect(),
    })
}

unsafe fn emit_json(report: ScoreReport, out_json: *mut *mut c_char) -> CorefEvalStatus {
    if out_json.is_null() {
        set_error("output string must not be NULL");
        return CorefEvalUsageError;
    }
    match serde_json::to_string_pretty(&report) {
        Ok(json) => match CString::new(json) {
            Ok(cstring) => {
                *out_json = cstring.into_raw();
                CorefEvalOk
            }
            Err(_) => {
                set_error("report contained an interior NUL");
                CorefEvalInternalError
            }
        },
        Err(e) => {
            set_error(&format!("JSON encoding failed: {e}"));
            CorefEvalInternalError
        }
    }
}

/// Scores `pred` against `gold` (documents matched by id) and writes a
/// JSON report with the mention-, link-, and entity-based triples plus
/// the averaged score.
///
/// # Safety
/// Pointer arguments must satisfy the conventions in the module docs.
#[no_mangle]
pub unsafe extern "C" fn coref_eval_score_json(
    gold: *const CorefEvalCorpus,
    pred: *const CorefEvalCorpus,
    out_json: *mut *mut c_char,
) -> CorefEvalStatus {
    coref_eval_typed_score_json(gold, pred, ptr::null(), out_json)
}

/// As [`coref_eval_score_json`], adding type-restricted triples for a
/// comma-separated list of type names (e.g. `"nested,on_generic"`).
/// Typed scoring requires the gold corpus to carry parse layers.
///
/// # Safety
/// Pointer arguments must satisfy the conventions in the module docs.
#[no_mangle]
pub unsafe extern "C" fn coref_eval_typed_score_json(
    gold: *const CorefEvalCorpus,
    pred: *const CorefEvalCorpus,
    types_csv: *const c_char,
    out_json: *mut *mut c_char,
) -> CorefEvalStatus {
    guard(|| {
        if gold.is_null() || pred.is_null() {
            set_error("corpus handles must not be NULL");
            return CorefEvalUsageError;
        }
        let types: Vec<String> = match optional_str(types_csv) {
            Ok(Some(csv)) => csv
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect(),
            Ok(None) => Vec::new(),
            Err(status) => return status,
        };
        match score_corpora(&(*gold).corpus, &(*pred).corpus, &types) {
            Ok(report) => emit_json(report, out_json),
            Err(e) => fail(&e),
        }
    })
}

/// Releases a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn coref_eval_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next library call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn coref_eval_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}
