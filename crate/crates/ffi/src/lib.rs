//! C ABI over the `christol` library.
//!
//! Every function returns a [`ChristolStatus`]. On failure the message is
//! available from [`christol_last_error`] on the same thread. Handles are
//! opaque and must be released with their `_free` function; strings handed
//! out by the library are released with [`christol_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use christol::algebra::FieldCtx;
use christol::automaton::{build_forward_dfao, build_reverse_dfao, Dfao};
use christol::cli::expr::parse_curve_expr;
use christol::function_field::PlaneCurve;
use christol::kernel::{enumerate_kernel, extract_representation};
use christol::series::{hensel_expand, simple_roots_at_origin, TruncSeries};
use christol::{Error, ErrorKind};

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChristolStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Bad input: parse errors, invalid fields, inseparable curves.
    UserError = 3,
    /// A cap was hit: state limit, precision exhausted, search caps.
    Refusal = 4,
    /// An internal invariant failed.
    Internal = 5,
    /// A panic was caught at the boundary.
    Panic = 6,
}

/// Reading direction of an automaton.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChristolConvention {
    Reverse = 0,
    Forward = 1,
}

/// A plane curve over a finite field together with one branch at the origin.
pub struct ChristolCurve {
    curve: PlaneCurve,
    branch: TruncSeries,
}

/// A minimal automaton.
pub struct ChristolAutomaton {
    dfao: Dfao,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> ChristolStatus {
    let status = match e.kind() {
        ErrorKind::User => ChristolStatus::UserError,
        ErrorKind::Refusal => ChristolStatus::Refusal,
        ErrorKind::Internal => ChristolStatus::Internal,
    };
    set_error(e.to_string());
    status
}

/// Runs `body`, translating errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), ChristolStatus>) -> ChristolStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ChristolStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("panic inside christol".into());
            ChristolStatus::Panic
        }
    }
}

fn null(what: &str) -> ChristolStatus {
    set_error(format!("{what} is null"));
    ChristolStatus::NullPointer
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, ChristolStatus> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        ChristolStatus::InvalidUtf8
    })
}

fn export_string(s: String, out: *mut *mut c_char) -> Result<(), ChristolStatus> {
    let c = CString::new(s).map_err(|_| {
        set_error("output contains a nul byte".into());
        ChristolStatus::Internal
    })?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn christol_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a curve over `F_{p^r}` (default modulus) from an expression in `x`
/// and `T`, and expands the branch with constant term `a0` to `precision`
/// coefficients. A negative `a0` selects the unique simple root at the
/// origin.
///
/// # Safety
/// `expr` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn christol_curve_new(
    p: u32,
    r: u32,
    expr: *const c_char,
    a0: i64,
    precision: usize,
    out: *mut *mut ChristolCurve,
) -> ChristolStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(expr, "expr")?;
        let f = FieldCtx::new(p, r, None).map_err(fail)?;
        let terms = parse_curve_expr(text, &f).map_err(fail)?;
        let curve = PlaneCurve::from_terms(f.clone(), &terms).map_err(fail)?;
        let root = if a0 < 0 {
            match simple_roots_at_origin(&curve).as_slice() {
                [a] => *a,
                _ => return Err(fail(Error::InvalidInput("no unique simple root at the origin; pass a0".into()))),
            }
        } else {
            f.try_elem(a0 as u64)
                .ok_or_else(|| fail(Error::InvalidInput(format!("a0 = {a0} is not an element code of F_{}", f.q()))))?
        };
        let branch = hensel_expand(&curve, root, precision).map_err(fail)?;
        *out = Box::into_raw(Box::new(ChristolCurve { curve, branch }));
        Ok(())
    })
}

/// # Safety
/// `curve` must come from [`christol_curve_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn christol_curve_free(curve: *mut ChristolCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Copies the first `len` branch coefficients (as element codes) into
/// `coeffs`; `len` may not exceed the precision given at construction.
///
/// # Safety
/// `coeffs` must point to `len` writable `u32`s.
#[no_mangle]
pub unsafe extern "C" fn christol_curve_expand(
    curve: *const ChristolCurve,
    coeffs: *mut u32,
    len: usize,
) -> ChristolStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        if coeffs.is_null() {
            return Err(null("coeffs"));
        }
        let have = c.branch.precision();
        if len > have {
            return Err(fail(Error::Precision { have, need: len }));
        }
        let out = std::slice::from_raw_parts_mut(coeffs, len);
        for (slot, a) in out.iter_mut().zip(c.branch.coeffs()) {
            *slot = a.code();
        }
        Ok(())
    })
}

/// Number of kernel states of the branch.
///
/// # Safety
/// `curve` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn christol_curve_kernel_size(
    curve: *const ChristolCurve,
    max_states: usize,
    out: *mut usize,
) -> ChristolStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let k = enumerate_kernel(&c.curve, &c.curve.y(), &c.branch, max_states).map_err(fail)?;
        *out = k.len();
        Ok(())
    })
}

/// Minimal automaton of the branch in the given reading direction.
///
/// # Safety
/// `curve` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn christol_automaton_build(
    curve: *const ChristolCurve,
    convention: ChristolConvention,
    max_states: usize,
    out: *mut *mut ChristolAutomaton,
) -> ChristolStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let k = enumerate_kernel(&c.curve, &c.curve.y(), &c.branch, max_states).map_err(fail)?;
        let dfao = match convention {
            ChristolConvention::Reverse => build_reverse_dfao(&k).minimize(),
            ChristolConvention::Forward => {
                let rep = extract_representation(&c.curve, &k).map_err(fail)?;
                build_forward_dfao(&rep, c.curve.field(), max_states).map_err(fail)?.minimize()
            }
        };
        *out = Box::into_raw(Box::new(ChristolAutomaton { dfao }));
        Ok(())
    })
}

/// # Safety
/// `automaton` must come from [`christol_automaton_build`] and not be freed
/// twice.
#[no_mangle]
pub unsafe extern "C" fn christol_automaton_free(automaton: *mut ChristolAutomaton) {
    if !automaton.is_null() {
        drop(Box::from_raw(automaton));
    }
}

/// # Safety
/// `automaton` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn christol_automaton_n_states(
    automaton: *const ChristolAutomaton,
    out: *mut usize,
) -> ChristolStatus {
    guard(|| {
        let a = automaton.as_ref().ok_or_else(|| null("automaton"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = a.dfao.n_states();
        Ok(())
    })
}

/// Output of the automaton on the base-q digits of `n`, as an element code.
///
/// # Safety
/// `automaton` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn christol_automaton_eval(
    automaton: *const ChristolAutomaton,
    n: u64,
    out: *mut u32,
) -> ChristolStatus {
    guard(|| {
        let a = automaton.as_ref().ok_or_else(|| null("automaton"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = a.dfao.eval(n).code();
        Ok(())
    })
}

/// JSON serialization; release with [`christol_string_free`].
///
/// # Safety
/// `automaton` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn christol_automaton_to_json(
    automaton: *const ChristolAutomaton,
    out: *mut *mut c_char,
) -> ChristolStatus {
    guard(|| {
        let a = automaton.as_ref().ok_or_else(|| null("automaton"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        export_string(a.dfao.to_json(), out)
    })
}

/// Graphviz DOT rendering; release with [`christol_string_free`].
///
/// # Safety
/// `automaton` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn christol_automaton_to_dot(
    automaton: *const ChristolAutomaton,
    out: *mut *mut c_char,
) -> ChristolStatus {
    guard(|| {
        let a = automaton.as_ref().ok_or_else(|| null("automaton"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        export_string(a.dfao.to_dot(), out)
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn christol_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
