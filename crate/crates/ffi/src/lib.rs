//! C ABI over `hopfq-core`.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `_free` function. Every fallible call returns a status code
//! (`HOPFQ_OK` on success); the message of the last failure on the calling
//! thread is available from [`hopfq_last_error`]. Strings handed out by the
//! library are NUL-terminated UTF-8 and must be released with
//! [`hopfq_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use serde_json::json;

use hopfq_core::cyclo::{format_scalar, make_context, parse_scalar};
use hopfq_core::quiver::{parse_element_strict, parse_quiver, Quiver};
use hopfq_core::symmetry::{
    canonical_labels, classify_minimal, decompose_components, orbits, parse_action, validate_action, ZnAction,
};
use hopfq_core::taft::{
    build_action, build_action_unchecked, params_to_json, parametrize, parse_params, sample_params, ActionSpec,
    TaftError, TaftParams,
};
use hopfq_core::verifier::{default_depth, extend_system, taft_constraint_entries, verify_all, OperatorSystem};

pub const HOPFQ_OK: i32 = 0;
/// A required pointer argument was null.
pub const HOPFQ_ERR_NULL: i32 = 1;
/// A string argument was not valid UTF-8.
pub const HOPFQ_ERR_UTF8: i32 = 2;
/// Malformed input: JSON schema, scalar syntax, unknown ids.
pub const HOPFQ_ERR_INPUT: i32 = 3;
/// Well-formed input describing an invalid quiver or action.
pub const HOPFQ_ERR_INVALID: i32 = 4;
/// Parameters violate the constraints of the checked builder.
pub const HOPFQ_ERR_CONSTRAINT: i32 = 5;
/// Internal error; the message names the panic.
pub const HOPFQ_ERR_INTERNAL: i32 = 6;

/// A quiver with a validated Z_n-action.
pub struct HopfqSession {
    quiver: Quiver,
    action: ZnAction,
}

/// A T(n)-action built on a session's quiver.
pub struct HopfqSpec {
    spec: ActionSpec,
    params: TaftParams,
}

struct Failure {
    code: i32,
    msg: String,
}

impl Failure {
    fn new(code: i32, msg: impl ToString) -> Self {
        Failure { code, msg: msg.to_string() }
    }
}

type Res<T> = Result<T, Failure>;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Res<()>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            HOPFQ_OK
        }
        Ok(Err(e)) => {
            set_error(&e.msg);
            e.code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal error: {msg}"));
            HOPFQ_ERR_INTERNAL
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Res<&'a str> {
    if p.is_null() {
        return Err(Failure::new(HOPFQ_ERR_NULL, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure::new(HOPFQ_ERR_UTF8, format!("{what}: {e}")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Res<&'a T> {
    p.as_ref().ok_or_else(|| Failure::new(HOPFQ_ERR_NULL, format!("{what} is null")))
}

unsafe fn store<T>(out: *mut *mut T, v: T) -> Res<()> {
    if out.is_null() {
        return Err(Failure::new(HOPFQ_ERR_NULL, "output pointer is null"));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn store_string(out: *mut *mut c_char, s: String) -> Res<()> {
    if out.is_null() {
        return Err(Failure::new(HOPFQ_ERR_NULL, "output pointer is null"));
    }
    let c = CString::new(s).map_err(|e| Failure::new(HOPFQ_ERR_INTERNAL, e))?;
    *out = c.into_raw();
    Ok(())
}

fn input(e: impl ToString) -> Failure {
    Failure::new(HOPFQ_ERR_INPUT, e)
}

fn to_json(v: &impl serde::Serialize) -> Res<String> {
    serde_json::to_string(v).map_err(|e| Failure::new(HOPFQ_ERR_INTERNAL, e))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn hopfq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn hopfq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hopfq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Canonical form of a scalar expression in Q(z), z a primitive 2n-th root.
///
/// # Safety
/// `expr` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hopfq_scalar_normalize(n: i64, expr: *const c_char, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let ctx = make_context(n).map_err(input)?;
        let s = parse_scalar(&ctx, text(expr, "expr")?).map_err(input)?;
        store_string(out, format_scalar(&s))
    })
}

/// Parse a quiver and a Z_n-action (both JSON) and validate the action.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hopfq_session_new(
    quiver_json: *const c_char,
    action_json: *const c_char,
    out: *mut *mut HopfqSession,
) -> i32 {
    guard(|| {
        let quiver = parse_quiver(text(quiver_json, "quiver_json")?).map_err(input)?;
        let action = parse_action(&quiver, text(action_json, "action_json")?).map_err(input)?;
        let rep = validate_action(&quiver, &action);
        if !rep.valid {
            return Err(Failure::new(
                HOPFQ_ERR_INVALID,
                format!("invalid action: {}", to_json(&rep.violations)?),
            ));
        }
        store(out, HopfqSession { quiver, action })
    })
}

/// # Safety
/// `s` must come from [`hopfq_session_new`] and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hopfq_session_free(s: *mut HopfqSession) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Order n of the session's action.
///
/// # Safety
/// `s` must be a live session handle.
#[no_mangle]
pub unsafe extern "C" fn hopfq_session_order(s: *const HopfqSession) -> u32 {
    s.as_ref().map_or(0, |s| s.action.n())
}

/// Orbits, minimality and canonically labelled components as JSON.
///
/// # Safety
/// `s` must be a live session handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hopfq_decompose(s: *const HopfqSession, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let s = handle(s, "session")?;
        let q = &s.quiver;
        let orb = orbits(q, &s.action);
        let comps = decompose_components(q, &orb);
        let orbit_list: Vec<_> = orb
            .vertex_orbits
            .iter()
            .enumerate()
            .map(|(o, m)| {
                json!({
                    "id": orb.orbit_name(q, o),
                    "size": m.len(),
                    "vertices": m.iter().map(|&v| q.vertex_id(v)).collect::<Vec<_>>(),
                })
            })
            .collect();
        let body = json!({
            "n": s.action.n(),
            "minimality": classify_minimal(q, &s.action),
            "orbits": orbit_list,
            "components": comps.iter().map(|c| canonical_labels(q, &orb, c)).collect::<Vec<_>>(),
        });
        store_string(out, to_json(&body)?)
    })
}

/// Parameter-space report as JSON.
///
/// # Safety
/// `s` must be a live session handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hopfq_parametrize(s: *const HopfqSession, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let s = handle(s, "session")?;
        store_string(out, to_json(&parametrize(&s.quiver, &s.action))?)
    })
}

/// Parameters satisfying every reported constraint, as params JSON.
/// The same seed gives the same output.
///
/// # Safety
/// `s` must be a live session handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hopfq_sample(s: *const HopfqSession, seed: u64, attempts: usize, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let s = handle(s, "session")?;
        let ctx = s.action.ctx();
        let r = parametrize(&s.quiver, &s.action);
        let vals = sample_params(&r, ctx, seed, attempts.max(1)).map_err(|e| Failure::new(HOPFQ_ERR_CONSTRAINT, e))?;
        let p = r.instantiate(ctx, &vals);
        store_string(out, to_json(&params_to_json(&s.quiver, &orbits(&s.quiver, &s.action), &p))?)
    })
}

/// Build a T(n)-action from params JSON. With `checked` nonzero, parameters
/// violating a constraint give `HOPFQ_ERR_CONSTRAINT`.
///
/// # Safety
/// `s` must be a live session handle; `params_json` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hopfq_spec_new(
    s: *const HopfqSession,
    params_json: *const c_char,
    checked: i32,
    out: *mut *mut HopfqSpec,
) -> i32 {
    guard(|| {
        let s = handle(s, "session")?;
        let orb = orbits(&s.quiver, &s.action);
        let params = parse_params(&s.quiver, &orb, s.action.ctx(), text(params_json, "params_json")?).map_err(input)?;
        let spec = if checked != 0 {
            build_action(&s.quiver, &s.action, &params).map_err(|e| match e {
                TaftError::Constraint(_) => Failure::new(HOPFQ_ERR_CONSTRAINT, e),
                other => input(other),
            })?
        } else {
            build_action_unchecked(&s.quiver, &s.action, &params)
        };
        store(out, HopfqSpec { spec, params })
    })
}

/// # Safety
/// `s` must come from [`hopfq_spec_new`] and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hopfq_spec_free(s: *mut HopfqSpec) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Check every relation on paths up to `depth` (0 picks the default).
/// `all_pass` receives 1 or 0; `report_json` receives the report. Either
/// output may be null.
///
/// # Safety
/// `s` must be a live spec handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn hopfq_verify(
    s: *const HopfqSpec,
    depth: usize,
    all_pass: *mut i32,
    report_json: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let s = handle(s, "spec")?;
        let sp = &s.spec;
        let depth = if depth == 0 { default_depth(sp.ctx()) } else { depth };
        let mut report = verify_all(sp, depth);
        report.constraints = taft_constraint_entries(&sp.quiver, &sp.action, &s.params);
        if !all_pass.is_null() {
            *all_pass = i32::from(report.all_pass());
        }
        if !report_json.is_null() {
            store_string(report_json, to_json(&report)?)?;
        }
        Ok(())
    })
}

/// Apply generator `g` or `x` to an element such as `"f1*f2 + 1/2*e[v1]"`.
///
/// # Safety
/// `s` must be a live spec handle; strings NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hopfq_act(
    s: *const HopfqSpec,
    generator: *const c_char,
    element: *const c_char,
    out: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let s = handle(s, "spec")?;
        let sp = &s.spec;
        let gen = text(generator, "generator")?;
        if gen != "g" && gen != "x" {
            return Err(input(format!("unknown generator {gen}; available: g, x")));
        }
        let e = parse_element_strict(&sp.quiver, sp.ctx(), text(element, "element")?).map_err(input)?;
        let table = extend_system(&OperatorSystem::taft(sp), e.degree());
        store_string(out, table.apply(Some(gen), &e).display(&sp.quiver))
    })
}
