//! C ABI for the csplab library: opaque handles, integer status codes, and
//! a thread-local last-error message. All functions return CSPLAB_OK on
//! success; out-parameters are only written on success.

use std::cell::RefCell;
use std::ffi::{CStr, CString};

use csplab::csp::{read_instance, write_instance, ConstraintDistribution, Flavor, Instance};
use csplab::models::parse_model;
use csplab::sampler::{sample_hat, sample_plain, GenSpec};
use csplab::solver::{solve, SolveResult};
use csplab::Error;
use libc::{c_char, c_int, size_t};

pub const CSPLAB_OK: c_int = 0;
pub const CSPLAB_ERR_INPUT: c_int = 1;
pub const CSPLAB_ERR_CAPACITY: c_int = 2;
pub const CSPLAB_ERR_PARSE: c_int = 3;
pub const CSPLAB_ERR_IO: c_int = 4;
pub const CSPLAB_ERR_INTERNAL: c_int = 5;
pub const CSPLAB_ERR_NULL: c_int = 6;
pub const CSPLAB_ERR_UTF8: c_int = 7;

pub const CSPLAB_SAT: c_int = 1;
pub const CSPLAB_UNSAT: c_int = 0;
pub const CSPLAB_BUDGET_EXCEEDED: c_int = 2;

pub const CSPLAB_FLAVOR_PLAIN: c_int = 0;
pub const CSPLAB_FLAVOR_HAT: c_int = 1;

pub const CSPLAB_AUDIT_ALL_SATISFIABLE: c_int = 0;
pub const CSPLAB_AUDIT_COUNTEREXAMPLE: c_int = 1;

/// Opaque constraint distribution handle.
pub struct CsplabDist(ConstraintDistribution);
/// Opaque CSP instance handle.
pub struct CsplabInstance(Instance);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn code_of(err: &Error) -> c_int {
    match err {
        Error::Input(_) => CSPLAB_ERR_INPUT,
        Error::Capacity(_) => CSPLAB_ERR_CAPACITY,
        Error::Parse(_) => CSPLAB_ERR_PARSE,
        Error::Io(_) => CSPLAB_ERR_IO,
        Error::Internal(_) => CSPLAB_ERR_INTERNAL,
    }
}

fn fail(err: Error) -> c_int {
    let code = code_of(&err);
    set_error(&err.to_string());
    code
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, c_int> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(CSPLAB_ERR_NULL);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        CSPLAB_ERR_UTF8
    })
}

/// Copy the message of the most recent error on this thread into `buf`
/// (NUL-terminated, truncated to `len`). Returns the full message length.
#[no_mangle]
pub unsafe extern "C" fn csplab_last_error(buf: *mut c_char, len: size_t) -> size_t {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Parse a model expression (`ed3`, `s3:<q>`, `dkt:<d>,<k>,<t>`,
/// `coloring:<d>`, `hom:<path>`, `file:<path>`) into a distribution handle.
#[no_mangle]
pub unsafe extern "C" fn csplab_dist_parse(
    expr: *const c_char,
    out: *mut *mut CsplabDist,
) -> c_int {
    if out.is_null() {
        set_error("null out pointer");
        return CSPLAB_ERR_NULL;
    }
    let expr = match read_str(expr) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match parse_model(expr) {
        Ok(dist) => {
            *out = Box::into_raw(Box::new(CsplabDist(dist)));
            CSPLAB_OK
        }
        Err(e) => fail(e),
    }
}

#[no_mangle]
pub unsafe extern "C" fn csplab_dist_free(dist: *mut CsplabDist) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// Domain size of the distribution, or -1 on a null handle.
#[no_mangle]
pub unsafe extern "C" fn csplab_dist_d(dist: *const CsplabDist) -> c_int {
    if dist.is_null() {
        return -1;
    }
    (*dist).0.d() as c_int
}

/// Constraint arity of the distribution, or -1 on a null handle.
#[no_mangle]
pub unsafe extern "C" fn csplab_dist_k(dist: *const CsplabDist) -> c_int {
    if dist.is_null() {
        return -1;
    }
    (*dist).0.k() as c_int
}

/// Sample one random instance at density c. `flavor` is
/// CSPLAB_FLAVOR_PLAIN or CSPLAB_FLAVOR_HAT; (seed, trial) pin the
/// pseudorandom substream.
#[no_mangle]
pub unsafe extern "C" fn csplab_sample(
    dist: *const CsplabDist,
    n: size_t,
    c: f64,
    flavor: c_int,
    seed: u64,
    trial: u64,
    out: *mut *mut CsplabInstance,
) -> c_int {
    if dist.is_null() || out.is_null() {
        set_error("null handle");
        return CSPLAB_ERR_NULL;
    }
    let flavor = match flavor {
        CSPLAB_FLAVOR_PLAIN => Flavor::Plain,
        CSPLAB_FLAVOR_HAT => Flavor::Hat,
        other => {
            set_error(&format!("unknown flavor code {other}"));
            return CSPLAB_ERR_INPUT;
        }
    };
    let spec = GenSpec {
        dist: (*dist).0.clone(),
        n,
        c,
        flavor,
        seed,
        trial_index: trial,
    };
    let sampled = match flavor {
        Flavor::Plain => sample_plain(&spec),
        Flavor::Hat => sample_hat(&spec),
    };
    match sampled {
        Ok(inst) => {
            *out = Box::into_raw(Box::new(CsplabInstance(inst)));
            CSPLAB_OK
        }
        Err(e) => fail(e),
    }
}

/// Parse the textual instance format (`CSPINST 1` header).
#[no_mangle]
pub unsafe extern "C" fn csplab_instance_read(
    text: *const c_char,
    out: *mut *mut CsplabInstance,
) -> c_int {
    if out.is_null() {
        set_error("null out pointer");
        return CSPLAB_ERR_NULL;
    }
    let text = match read_str(text) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match read_instance(text) {
        Ok(inst) => {
            *out = Box::into_raw(Box::new(CsplabInstance(inst)));
            CSPLAB_OK
        }
        Err(e) => fail(e),
    }
}

/// Serialize the instance; the returned string must be released with
/// csplab_string_free.
#[no_mangle]
pub unsafe extern "C" fn csplab_instance_write(
    inst: *const CsplabInstance,
    out: *mut *mut c_char,
) -> c_int {
    if inst.is_null() || out.is_null() {
        set_error("null handle");
        return CSPLAB_ERR_NULL;
    }
    let text = write_instance(&(*inst).0).replace('\0', " ");
    *out = CString::new(text).unwrap().into_raw();
    CSPLAB_OK
}

#[no_mangle]
pub unsafe extern "C" fn csplab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn csplab_instance_free(inst: *mut CsplabInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of variables, or -1 on a null handle.
#[no_mangle]
pub unsafe extern "C" fn csplab_instance_n(inst: *const CsplabInstance) -> c_int {
    if inst.is_null() {
        return -1;
    }
    (*inst).0.n as c_int
}

/// Number of constrained tuples, or -1 on a null handle.
#[no_mangle]
pub unsafe extern "C" fn csplab_instance_edges(inst: *const CsplabInstance) -> c_int {
    if inst.is_null() {
        return -1;
    }
    (*inst).0.edges.len() as c_int
}

/// Exact satisfiability within `budget` search nodes. On success `*status`
/// is CSPLAB_SAT, CSPLAB_UNSAT, or CSPLAB_BUDGET_EXCEEDED; when SAT and
/// `witness` is non-null it must point at `n` bytes and receives the
/// 1-based satisfying values.
#[no_mangle]
pub unsafe extern "C" fn csplab_solve(
    inst: *const CsplabInstance,
    budget: u64,
    status: *mut c_int,
    witness: *mut u8,
) -> c_int {
    if inst.is_null() || status.is_null() {
        set_error("null handle");
        return CSPLAB_ERR_NULL;
    }
    let inst = &(*inst).0;
    match solve(inst, budget) {
        Ok(SolveResult::Sat(a)) => {
            if !witness.is_null() {
                for v in 0..inst.n {
                    *witness.add(v) = a.get(v).unwrap_or(0);
                }
            }
            *status = CSPLAB_SAT;
            CSPLAB_OK
        }
        Ok(SolveResult::Unsat) => {
            *status = CSPLAB_UNSAT;
            CSPLAB_OK
        }
        Ok(SolveResult::BudgetExceeded(_)) => {
            *status = CSPLAB_BUDGET_EXCEEDED;
            CSPLAB_OK
        }
        Err(e) => fail(e),
    }
}

/// Decide whether every tree or unicyclic instance over the distribution's
/// support is satisfiable. On success `*verdict` is
/// CSPLAB_AUDIT_ALL_SATISFIABLE or CSPLAB_AUDIT_COUNTEREXAMPLE; in the
/// latter case a minimal witness instance is returned through `witness`
/// when that pointer is non-null.
#[no_mangle]
pub unsafe extern "C" fn csplab_audit_binary(
    dist: *const CsplabDist,
    verdict: *mut c_int,
    witness: *mut *mut CsplabInstance,
) -> c_int {
    if dist.is_null() || verdict.is_null() {
        set_error("null handle");
        return CSPLAB_ERR_NULL;
    }
    match csplab::audit::audit_binary(&(*dist).0) {
        Ok(csplab::audit::AuditVerdict::AllSatisfiable) => {
            *verdict = CSPLAB_AUDIT_ALL_SATISFIABLE;
            CSPLAB_OK
        }
        Ok(csplab::audit::AuditVerdict::Counterexample(w)) => {
            *verdict = CSPLAB_AUDIT_COUNTEREXAMPLE;
            if !witness.is_null() {
                *witness = Box::into_raw(Box::new(CsplabInstance(w)));
            }
            CSPLAB_OK
        }
        Err(e) => fail(e),
    }
}
