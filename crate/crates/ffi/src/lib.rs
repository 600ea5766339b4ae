//! C interface to genlang.
//!
//! Checkpoints and ranked lists are opaque handles owned by the caller and
//! released with their `*_free` function. Every fallible call returns a
//! [`GlStatus`]; on failure the message is available from
//! [`gl_last_error`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use genlang::corpus::Gender;
use genlang::eval::{permutation_test, spearman, topk};
use genlang::lexicons::Sentiment;
use genlang::model::{femaleness, score, Checkpoint, Instance, ModelParams};
use genlang::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Data = 4,
    Numerical = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlGender {
    Masc = 0,
    Fem = 1,
}

/// Sentiment selector; `GL_SENTIMENT_NONE` for sentiment-free models.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlSentiment {
    Pos = 0,
    Neg = 1,
    Neu = 2,
    None = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GlTestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub corrected_alpha: f64,
    pub significant: bool,
    pub exact: bool,
    pub permutations: u64,
}

/// A loaded checkpoint.
pub struct GlModel {
    params: ModelParams,
    instance: Instance,
    names: Vec<CString>,
    femaleness: Vec<f64>,
}

/// A ranked neighbor list.
pub struct GlRanking {
    words: Vec<CString>,
    scores: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(err: &Error) -> GlStatus {
    match err {
        Error::Io { .. } => GlStatus::Io,
        Error::InvalidArgument(_) => GlStatus::InvalidArgument,
        e if e.is_numerical() => GlStatus::Numerical,
        _ => GlStatus::Data,
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard(f: impl FnOnce() -> Result<(), (GlStatus, String)>) -> GlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GlStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GlStatus::Panic
        }
    }
}

fn fail(err: Error) -> (GlStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (GlStatus, String) {
    (GlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (GlStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (GlStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], (GlStatus, String)> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

fn gender_of(g: GlGender) -> Gender {
    match g {
        GlGender::Masc => Gender::Masc,
        GlGender::Fem => Gender::Fem,
    }
}

fn sentiment_of(s: GlSentiment) -> Option<Sentiment> {
    match s {
        GlSentiment::Pos => Some(Sentiment::Pos),
        GlSentiment::Neg => Some(Sentiment::Neg),
        GlSentiment::Neu => Some(Sentiment::Neu),
        GlSentiment::None => None,
    }
}

fn neighbor(model: &GlModel, word: &str) -> Result<usize, (GlStatus, String)> {
    model
        .instance
        .neighbor_index(word)
        .ok_or_else(|| fail(Error::UnknownNeighbor(word.to_string())))
}

/// Message of the last failure on this thread, or an empty string.
#[no_mangle]
pub extern "C" fn gl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a checkpoint file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn gl_model_load(path: *const c_char, out: *mut *mut GlModel) -> GlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let path = str_arg(path, "path")?;
        let ck = Checkpoint::load(path).map_err(fail)?;
        let params = ck.params().map_err(fail)?;
        let instance = ck.instance().map_err(fail)?;
        let names = instance
            .neighbors
            .iter()
            .map(|w| CString::new(w.as_str()).map_err(|_| (GlStatus::Data, format!("neighbor `{w}` contains NUL"))))
            .collect::<Result<_, _>>()?;
        let femaleness = femaleness(&params, &instance);
        *out = Box::into_raw(Box::new(GlModel {
            params,
            instance,
            names,
            femaleness,
        }));
        Ok(())
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from [`gl_model_load`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gl_model_free(model: *mut GlModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of neighbor words, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gl_model_num_neighbors(model: *const GlModel) -> usize {
    model.as_ref().map_or(0, |m| m.names.len())
}

/// Number of sentiment components (1 or 3), or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gl_model_num_sentiments(model: *const GlModel) -> usize {
    model.as_ref().map_or(0, |m| m.params.num_sentiments)
}

/// Neighbor word at `index`; null when out of range. The string lives as
/// long as the model.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gl_model_neighbor(model: *const GlModel, index: usize) -> *const c_char {
    model
        .as_ref()
        .and_then(|m| m.names.get(index))
        .map_or(ptr::null(), |s| s.as_ptr())
}

/// Deviation score of `word` for a gender and sentiment.
///
/// # Safety
/// `model` must be a live handle, `word` NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gl_model_score(
    model: *const GlModel,
    word: *const c_char,
    gender: GlGender,
    sentiment: GlSentiment,
    out: *mut f64,
) -> GlStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = neighbor(m, str_arg(word, "word")?)?;
        let s = match (m.params.num_sentiments, sentiment_of(sentiment)) {
            (1, None) => 0,
            (3, Some(s)) => s.index(),
            _ => {
                return Err((
                    GlStatus::InvalidArgument,
                    "sentiment does not match the model".to_string(),
                ))
            }
        };
        *out = score(&m.params, &m.instance.space, gender_of(gender), s, v);
        Ok(())
    })
}

/// Posterior probability that `word` collocates with a female noun.
///
/// # Safety
/// `model` must be a live handle, `word` NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gl_model_femaleness(model: *const GlModel, word: *const c_char, out: *mut f64) -> GlStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = m.femaleness[neighbor(m, str_arg(word, "word")?)?];
        Ok(())
    })
}

/// Ranks neighbors for a gender and sentiment and keeps the top `k`.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gl_topk(
    model: *const GlModel,
    gender: GlGender,
    sentiment: GlSentiment,
    k: usize,
    out: *mut *mut GlRanking,
) -> GlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let list = topk(&m.params, &m.instance, gender_of(gender), sentiment_of(sentiment), k).map_err(fail)?;
        let (words, scores) = list
            .entries
            .into_iter()
            .map(|(w, s)| (CString::new(w).unwrap_or_default(), s))
            .unzip();
        *out = Box::into_raw(Box::new(GlRanking { words, scores }));
        Ok(())
    })
}

/// # Safety
/// `ranking` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gl_ranking_len(ranking: *const GlRanking) -> usize {
    ranking.as_ref().map_or(0, |r| r.words.len())
}

/// Word at `rank` (0-based); null when out of range.
///
/// # Safety
/// `ranking` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gl_ranking_word(ranking: *const GlRanking, rank: usize) -> *const c_char {
    ranking
        .as_ref()
        .and_then(|r| r.words.get(rank))
        .map_or(ptr::null(), |s| s.as_ptr())
}

/// Score at `rank`; NaN when out of range.
///
/// # Safety
/// `ranking` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gl_ranking_score(ranking: *const GlRanking, rank: usize) -> f64 {
    ranking
        .as_ref()
        .and_then(|r| r.scores.get(rank).copied())
        .unwrap_or(f64::NAN)
}

/// # Safety
/// `ranking` must come from [`gl_topk`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gl_ranking_free(ranking: *mut GlRanking) {
    if !ranking.is_null() {
        drop(Box::from_raw(ranking));
    }
}

/// Spearman rank correlation with midrank ties.
///
/// # Safety
/// `x` and `y` must each point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gl_spearman(x: *const f64, y: *const f64, n: usize, out: *mut f64) -> GlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let x = slice_arg(x, n, "x")?;
        let y = slice_arg(y, n, "y")?;
        *out = spearman(x, y).map_err(fail)?;
        Ok(())
    })
}

/// Two-sample permutation test on the absolute difference of means.
///
/// # Safety
/// `a` and `b` must point to `na` and `nb` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gl_permutation_test(
    a: *const f64,
    na: usize,
    b: *const f64,
    nb: usize,
    permutations: usize,
    seed: u64,
    out: *mut GlTestResult,
) -> GlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let a = slice_arg(a, na, "a")?;
        let b = slice_arg(b, nb, "b")?;
        let r = permutation_test(a, b, permutations, seed).map_err(fail)?;
        *out = GlTestResult {
            statistic: r.statistic,
            p_value: r.p_value,
            corrected_alpha: r.corrected_alpha,
            significant: r.significant,
            exact: r.exact,
            permutations: r.permutations,
        };
        Ok(())
    })
}
