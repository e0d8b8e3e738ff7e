//! C ABI for the `morphic` toolkit.
//!
//! Every function returns a [`MorphicStatus`]; results travel through out
//! pointers. Objects are opaque handles owned by the caller and released with
//! the matching `*_free`. Strings handed out by the library are released with
//! [`morphic_string_free`]. After a non-`Ok` status,
//! [`morphic_last_error_message`] describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use morphic::characterize::{verify_characterization, TheoremManifest};
use morphic::constraint::{check, ConstraintSet, ViolationKind};
use morphic::pattern::{avoids, Formula};
use morphic::repetition::{distinct_min_overlaps, distinct_squares, find_sq_t, max_exponent};
use morphic::search::{count_by_length, extendable_set, longest_word_search, OutcomeKind};
use morphic::word::{apply, compose, fixed_point_prefix, morphic_prefix, Morphism, Word};
use morphic::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MorphicStatus {
    Ok = 0,
    Syntax = 1,
    Alphabet = 2,
    Domain = 3,
    Resource = 4,
    Io = 5,
    NullPointer = 6,
    InvalidUtf8 = 7,
    Panic = 8,
}

/// Opaque word handle.
pub struct MorphicWord(Word);

/// Opaque morphism handle.
pub struct MorphicMorphism(Morphism);

/// Opaque formula handle.
pub struct MorphicFormula(Formula);

/// Opaque constraint-set handle.
pub struct MorphicConstraints(ConstraintSet);

/// A violation `word[start..end)`; `kind` follows the order of
/// `MorphicViolationKind`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct MorphicViolation {
    pub kind: u32,
    pub start: usize,
    pub end: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MorphicViolationKind {
    Letter = 0,
    Edge = 1,
    Factor = 2,
    LongSquare = 3,
    UnlistedSquare = 4,
    TooManySquares = 5,
    UnlistedOverlap = 6,
    Exponent = 7,
    Formula = 8,
    OccurrenceBudget = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct MorphicSearchResult {
    /// True when the language is finite and `max_length` is exact.
    pub exhausted: bool,
    pub max_length: usize,
    pub tree_nodes: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(MorphicStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Syntax(_) => MorphicStatus::Syntax,
            Error::Alphabet(_) => MorphicStatus::Alphabet,
            Error::Domain(_) => MorphicStatus::Domain,
            Error::Io { .. } => MorphicStatus::Io,
            _ if e.is_resource() => MorphicStatus::Resource,
            _ => MorphicStatus::Domain,
        };
        Fail(status, e.to_string())
    }
}

type Outcome = Result<(), Fail>;

fn guard(f: impl FnOnce() -> Outcome) -> MorphicStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            MorphicStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MorphicStatus::Panic
        }
    }
}

fn null(name: &str) -> Fail {
    Fail(MorphicStatus::NullPointer, format!("{name} is null"))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(MorphicStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn obj<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(name))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s)
        .expect("rendered output has no NUL")
        .into_raw()
}

fn lines<'a>(words: impl IntoIterator<Item = &'a Word>) -> String {
    words
        .into_iter()
        .map(|w| format!("{w}\n"))
        .collect::<String>()
}

/// Message for the last failure on this thread; empty after success. The
/// pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn morphic_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn morphic_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `text` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_word_parse(
    text_: *const c_char,
    out_: *mut *mut MorphicWord,
) -> MorphicStatus {
    guard(|| {
        let o = out(out_, "out")?;
        *o = boxed(MorphicWord(Word::parse(text(text_, "text")?)?));
        Ok(())
    })
}

/// # Safety
/// `w` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn morphic_word_free(w: *mut MorphicWord) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Length of `w`, or 0 for a null handle.
///
/// # Safety
/// `w` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn morphic_word_len(w: *const MorphicWord) -> usize {
    w.as_ref().map_or(0, |w| w.0.len())
}

/// # Safety
/// `w` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_word_to_string(
    w: *const MorphicWord,
    out_: *mut *mut c_char,
) -> MorphicStatus {
    guard(|| {
        let w = obj(w, "word")?;
        *out(out_, "out")? = c_string(w.0.to_string());
        Ok(())
    })
}

/// Parses slash-separated images such as `"01/0"`.
///
/// # Safety
/// `text` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_morphism_parse(
    text_: *const c_char,
    out_: *mut *mut MorphicMorphism,
) -> MorphicStatus {
    guard(|| {
        let o = out(out_, "out")?;
        *o = boxed(MorphicMorphism(Morphism::parse(text(text_, "text")?)?));
        Ok(())
    })
}

/// # Safety
/// `m` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn morphic_morphism_free(m: *mut MorphicMorphism) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_morphism_to_string(
    m: *const MorphicMorphism,
    out_: *mut *mut c_char,
) -> MorphicStatus {
    guard(|| {
        let m = obj(m, "morphism")?;
        *out(out_, "out")? = c_string(m.0.to_string());
        Ok(())
    })
}

/// `outer ∘ inner`.
///
/// # Safety
/// Both handles are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_morphism_compose(
    outer: *const MorphicMorphism,
    inner: *const MorphicMorphism,
    out_: *mut *mut MorphicMorphism,
) -> MorphicStatus {
    guard(|| {
        let c = compose(&obj(outer, "outer")?.0, &obj(inner, "inner")?.0)?;
        *out(out_, "out")? = boxed(MorphicMorphism(c));
        Ok(())
    })
}

/// # Safety
/// Both handles are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_morphism_apply(
    m: *const MorphicMorphism,
    w: *const MorphicWord,
    out_: *mut *mut MorphicWord,
) -> MorphicStatus {
    guard(|| {
        let image = apply(&obj(m, "morphism")?.0, &obj(w, "word")?.0)?;
        *out(out_, "out")? = boxed(MorphicWord(image));
        Ok(())
    })
}

/// Length-`n` prefix of the fixed point of `m` starting with 0.
///
/// # Safety
/// `m` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_fixed_point_prefix(
    m: *const MorphicMorphism,
    n: usize,
    out_: *mut *mut MorphicWord,
) -> MorphicStatus {
    guard(|| {
        let w = fixed_point_prefix(&obj(m, "morphism")?.0, n)?;
        *out(out_, "out")? = boxed(MorphicWord(w));
        Ok(())
    })
}

/// Length-`n` prefix of `g` applied to the fixed point of `f`.
///
/// # Safety
/// Both handles are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_morphic_prefix(
    g: *const MorphicMorphism,
    f: *const MorphicMorphism,
    n: usize,
    out_: *mut *mut MorphicWord,
) -> MorphicStatus {
    guard(|| {
        let w = morphic_prefix(&obj(g, "g")?.0, &obj(f, "f")?.0, n)?;
        *out(out_, "out")? = boxed(MorphicWord(w));
        Ok(())
    })
}

/// Distinct squares of `w`, one per line in ascending order.
///
/// # Safety
/// `w` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_distinct_squares(
    w: *const MorphicWord,
    out_: *mut *mut c_char,
) -> MorphicStatus {
    guard(|| {
        let set = distinct_squares(&obj(w, "word")?.0);
        *out(out_, "out")? = c_string(lines(&set));
        Ok(())
    })
}

/// Distinct minimal overlaps of `w`, one per line in ascending order.
///
/// # Safety
/// `w` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_distinct_overlaps(
    w: *const MorphicWord,
    out_: *mut *mut c_char,
) -> MorphicStatus {
    guard(|| {
        let set = distinct_min_overlaps(&obj(w, "word")?.0);
        *out(out_, "out")? = c_string(lines(&set));
        Ok(())
    })
}

/// Looks for a square of period at least `t`; on a hit, `found` is set and
/// `start`/`period` locate it.
///
/// # Safety
/// `w` is a live handle; the out pointers are writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_find_sq_t(
    w: *const MorphicWord,
    t: usize,
    found: *mut bool,
    start: *mut usize,
    period: *mut usize,
) -> MorphicStatus {
    guard(|| {
        let w = obj(w, "word")?;
        let (found, start, period) = (
            out(found, "found")?,
            out(start, "start")?,
            out(period, "period")?,
        );
        match find_sq_t(&w.0, t) {
            Some(r) => {
                *found = true;
                *start = r.start;
                *period = r.period;
            }
            None => *found = false,
        }
        Ok(())
    })
}

/// Largest exponent `num/den` of a factor of a non-empty `w`, in lowest terms.
///
/// # Safety
/// `w` is a live handle; the out pointers are writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_max_exponent(
    w: *const MorphicWord,
    num: *mut u64,
    den: *mut u64,
) -> MorphicStatus {
    guard(|| {
        let w = obj(w, "word")?;
        let (num, den) = (out(num, "num")?, out(den, "den")?);
        let (e, _) = max_exponent(&w.0)?;
        *num = e.numerator();
        *den = e.denominator();
        Ok(())
    })
}

/// Parses a formula such as `"AA.ABAB.BB"`.
///
/// # Safety
/// `text` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_formula_parse(
    text_: *const c_char,
    out_: *mut *mut MorphicFormula,
) -> MorphicStatus {
    guard(|| {
        let o = out(out_, "out")?;
        *o = boxed(MorphicFormula(Formula::parse(text(text_, "text")?)?));
        Ok(())
    })
}

/// # Safety
/// `f` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn morphic_formula_free(f: *mut MorphicFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// Both handles are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_avoids(
    w: *const MorphicWord,
    f: *const MorphicFormula,
    out_: *mut bool,
) -> MorphicStatus {
    guard(|| {
        let r = avoids(&obj(w, "word")?.0, &obj(f, "formula")?.0)?;
        *out(out_, "out")? = r;
        Ok(())
    })
}

/// Parses a constraint file body.
///
/// # Safety
/// `text` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_constraints_parse(
    text_: *const c_char,
    out_: *mut *mut MorphicConstraints,
) -> MorphicStatus {
    guard(|| {
        let o = out(out_, "out")?;
        *o = boxed(MorphicConstraints(ConstraintSet::parse(text(
            text_, "text",
        )?)?));
        Ok(())
    })
}

/// # Safety
/// `path` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_constraints_from_file(
    path: *const c_char,
    out_: *mut *mut MorphicConstraints,
) -> MorphicStatus {
    guard(|| {
        let o = out(out_, "out")?;
        let c = ConstraintSet::from_file(Path::new(text(path, "path")?))?;
        *o = boxed(MorphicConstraints(c));
        Ok(())
    })
}

/// # Safety
/// `c` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn morphic_constraints_free(c: *mut MorphicConstraints) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

fn kind_code(k: ViolationKind) -> MorphicViolationKind {
    match k {
        ViolationKind::Letter => MorphicViolationKind::Letter,
        ViolationKind::Edge => MorphicViolationKind::Edge,
        ViolationKind::Factor => MorphicViolationKind::Factor,
        ViolationKind::LongSquare => MorphicViolationKind::LongSquare,
        ViolationKind::UnlistedSquare => MorphicViolationKind::UnlistedSquare,
        ViolationKind::TooManySquares => MorphicViolationKind::TooManySquares,
        ViolationKind::UnlistedOverlap => MorphicViolationKind::UnlistedOverlap,
        ViolationKind::Exponent => MorphicViolationKind::Exponent,
        ViolationKind::Formula => MorphicViolationKind::Formula,
        ViolationKind::OccurrenceBudget => MorphicViolationKind::OccurrenceBudget,
    }
}

/// Checks `w` against `c`. `good` is set when `w` satisfies every
/// constraint; otherwise `violation` holds the earliest violation.
///
/// # Safety
/// Both handles are live; the out pointers are writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_check(
    w: *const MorphicWord,
    c: *const MorphicConstraints,
    good: *mut bool,
    violation: *mut MorphicViolation,
) -> MorphicStatus {
    guard(|| {
        let (w, c) = (obj(w, "word")?, obj(c, "constraints")?);
        let (good, violation) = (out(good, "good")?, out(violation, "violation")?);
        match check(&w.0, &c.0)? {
            None => {
                *good = true;
                *violation = MorphicViolation::default();
            }
            Some(v) => {
                *good = false;
                *violation = MorphicViolation {
                    kind: kind_code(v.kind) as u32,
                    start: v.start,
                    end: v.end,
                };
            }
        }
        Ok(())
    })
}

/// Depth-first search for a good word of length `max_length`. `witness` may be
/// null; otherwise it receives a longest good word found (or null if the
/// language is empty).
///
/// # Safety
/// `c` is a live handle; `result` is writable; `witness` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_longest_word_search(
    c: *const MorphicConstraints,
    max_length: usize,
    node_budget: u64,
    result: *mut MorphicSearchResult,
    witness: *mut *mut MorphicWord,
) -> MorphicStatus {
    guard(|| {
        let c = obj(c, "constraints")?;
        let result = out(result, "result")?;
        let o = longest_word_search(&c.0, max_length, node_budget)?;
        *result = MorphicSearchResult {
            exhausted: o.kind == OutcomeKind::Exhausted,
            max_length: o.max_length,
            tree_nodes: o.tree_nodes,
        };
        if let Some(slot) = witness.as_mut() {
            *slot = o.witness.map_or(ptr::null_mut(), |w| boxed(MorphicWord(w)));
        }
        Ok(())
    })
}

/// Words of length `length` that extend by `horizon` letters on both sides,
/// one per line in ascending order.
///
/// # Safety
/// `c` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_extendable_set(
    c: *const MorphicConstraints,
    length: usize,
    horizon: usize,
    out_: *mut *mut c_char,
) -> MorphicStatus {
    guard(|| {
        let c = obj(c, "constraints")?;
        let o = out(out_, "out")?;
        let set = extendable_set(&c.0, length, horizon)?;
        *o = c_string(lines(set.words()));
        Ok(())
    })
}

/// Writes the number of good words of each length `1..=n_max` into
/// `counts[0..n_max]`.
///
/// # Safety
/// `c` is a live handle; `counts` has room for `n_max` values.
#[no_mangle]
pub unsafe extern "C" fn morphic_count_by_length(
    c: *const MorphicConstraints,
    n_max: usize,
    counts: *mut u64,
) -> MorphicStatus {
    guard(|| {
        let c = obj(c, "constraints")?;
        if counts.is_null() {
            return Err(null("counts"));
        }
        let v = count_by_length(&c.0, n_max)?;
        std::slice::from_raw_parts_mut(counts, n_max).copy_from_slice(&v[..n_max]);
        Ok(())
    })
}

/// Runs a theorem manifest. `passed` receives the verdict; `report`, if not
/// null, receives the rendered report.
///
/// # Safety
/// `path` is a NUL-terminated string; `passed` is writable; `report` is null
/// or writable.
#[no_mangle]
pub unsafe extern "C" fn morphic_verify_manifest(
    path: *const c_char,
    passed: *mut bool,
    report: *mut *mut c_char,
) -> MorphicStatus {
    guard(|| {
        let passed = out(passed, "passed")?;
        let m = TheoremManifest::from_file(Path::new(text(path, "path")?))?;
        let r = verify_characterization(&m)?;
        *passed = r.passed();
        if let Some(slot) = report.as_mut() {
            *slot = c_string(r.to_string());
        }
        Ok(())
    })
}
