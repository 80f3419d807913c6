//! C interface to `padelab`.
//!
//! Every function returns a [`PadelabStatus`]; on failure a message is kept
//! per thread and read with [`padelab_last_error`]. Handles are opaque and
//! released with their `_free` function. Strings handed out by the library
//! are released with [`padelab_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use padelab::algebra::BigComplex;
use padelab::cli::config::{bundled, ProblemConfig};
use padelab::cli::{emit_outputs, oracle, run, CliError, RunRecord};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PadelabStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    Io = 4,
    SolveFailed = 5,
    NotFound = 6,
    BufferTooSmall = 7,
    Internal = 8,
}

/// A validated run configuration.
pub struct PadelabConfig(ProblemConfig);

/// The result of solving every order of a configuration.
pub struct PadelabRun(RunRecord);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

struct Failure(PadelabStatus, String);

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        let status = match e {
            CliError::InvalidConfig(_) => PadelabStatus::InvalidConfig,
            CliError::Io(_) => PadelabStatus::Io,
            CliError::MissingArtifact(_) => PadelabStatus::NotFound,
            CliError::Setup(_) => PadelabStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PadelabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PadelabStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PadelabStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(PadelabStatus::NullArgument, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(PadelabStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn padelab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn padelab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a JSON configuration.
///
/// # Safety
/// `json` must be a nul-terminated string; `out_config` must be writable.
#[no_mangle]
pub unsafe extern "C" fn padelab_config_from_json(
    json: *const c_char,
    out_config: *mut *mut PadelabConfig,
) -> PadelabStatus {
    guard(|| {
        let slot = out(out_config, "out_config")?;
        let c = ProblemConfig::from_json(text(json, "json")?)?;
        *slot = Box::into_raw(Box::new(PadelabConfig(c)));
        Ok(())
    })
}

/// Loads one of the bundled configurations by name, e.g. `markov_arcsine`.
///
/// # Safety
/// `name` must be a nul-terminated string; `out_config` must be writable.
#[no_mangle]
pub unsafe extern "C" fn padelab_config_bundled(
    name: *const c_char,
    out_config: *mut *mut PadelabConfig,
) -> PadelabStatus {
    guard(|| {
        let slot = out(out_config, "out_config")?;
        let name = text(name, "name")?;
        let json =
            bundled(name).ok_or_else(|| Failure(PadelabStatus::NotFound, format!("no bundled config `{name}`")))?;
        *slot = Box::into_raw(Box::new(PadelabConfig(ProblemConfig::from_json(json)?)));
        Ok(())
    })
}

/// Replaces the orders to solve.
///
/// # Safety
/// `config` must be a live handle; `ns` must point to `len` values.
#[no_mangle]
pub unsafe extern "C" fn padelab_config_set_orders(
    config: *mut PadelabConfig,
    ns: *const usize,
    len: usize,
) -> PadelabStatus {
    guard(|| {
        let c = out(config, "config")?;
        if ns.is_null() {
            return Err(null("ns"));
        }
        let mut next = c.0.clone();
        next.n_range = std::slice::from_raw_parts(ns, len).to_vec();
        next.validate()?;
        c.0 = next;
        Ok(())
    })
}

/// Sets the working precision in bits.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn padelab_config_set_precision(config: *mut PadelabConfig, bits: u32) -> PadelabStatus {
    guard(|| {
        let c = out(config, "config")?;
        if bits < padelab::algebra::MIN_PRECISION {
            return Err(Failure(
                PadelabStatus::InvalidConfig,
                format!("precision must be at least {} bits", padelab::algebra::MIN_PRECISION),
            ));
        }
        c.0.precision = bits;
        Ok(())
    })
}

/// # Safety
/// `config` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn padelab_config_free(config: *mut PadelabConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Solves every order and runs the enabled checkers. Orders that fail to
/// solve are recorded in the report; the call itself still succeeds.
///
/// # Safety
/// `config` must be a live handle; `out_run` must be writable.
#[no_mangle]
pub unsafe extern "C" fn padelab_run(config: *const PadelabConfig, out_run: *mut *mut PadelabRun) -> PadelabStatus {
    guard(|| {
        let slot = out(out_run, "out_run")?;
        let c = config.as_ref().ok_or_else(|| null("config"))?;
        *slot = Box::into_raw(Box::new(PadelabRun(run(&c.0)?)));
        Ok(())
    })
}

/// # Safety
/// `run` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn padelab_run_free(run: *mut PadelabRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Whether every order solved and every enabled checker passed.
///
/// # Safety
/// `run` must be a live handle; `out_ok` must be writable.
#[no_mangle]
pub unsafe extern "C" fn padelab_run_ok(run: *const PadelabRun, out_ok: *mut bool) -> PadelabStatus {
    guard(|| {
        let r = run.as_ref().ok_or_else(|| null("run"))?;
        *out(out_ok, "out_ok")? = r.0.exit_ok();
        Ok(())
    })
}

/// The run report as pretty-printed JSON; free with [`padelab_string_free`].
///
/// # Safety
/// `run` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn padelab_run_report_json(run: *const PadelabRun, out_json: *mut *mut c_char) -> PadelabStatus {
    guard(|| {
        let r = run.as_ref().ok_or_else(|| null("run"))?;
        let slot = out(out_json, "out_json")?;
        let s =
            serde_json::to_string_pretty(&r.0.report).map_err(|e| Failure(PadelabStatus::Internal, e.to_string()))?;
        *slot = owned_string(s);
        Ok(())
    })
}

/// Writes all artifacts of the run into `dir`.
///
/// # Safety
/// `run` must be a live handle; `dir` must be a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn padelab_run_write(run: *const PadelabRun, dir: *const c_char) -> PadelabStatus {
    guard(|| {
        let r = run.as_ref().ok_or_else(|| null("run"))?;
        emit_outputs(&r.0, Path::new(text(dir, "dir")?))?;
        Ok(())
    })
}

fn approx(r: &PadelabRun, n: usize) -> Result<&padelab::pade::PadeApproximant, Failure> {
    if !r.0.config.ns().contains(&n) {
        return Err(Failure(
            PadelabStatus::NotFound,
            format!("order {n} is not part of the run"),
        ));
    }
    r.0.approximant(n)
        .ok_or_else(|| Failure(PadelabStatus::SolveFailed, format!("order {n} failed to solve")))
}

/// Copies the zeros of `q_n` into `re`/`im` (capacity `cap`). The count is
/// always stored in `out_len`; a short buffer gives `BufferTooSmall`.
///
/// # Safety
/// `run` must be a live handle; `re` and `im` must hold `cap` values or be
/// null with `cap == 0`; `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn padelab_run_poles(
    run: *const PadelabRun,
    n: usize,
    re: *mut f64,
    im: *mut f64,
    cap: usize,
    out_len: *mut usize,
) -> PadelabStatus {
    guard(|| {
        let r = run.as_ref().ok_or_else(|| null("run"))?;
        let len = out(out_len, "out_len")?;
        let roots = approx(r, n)?.roots_c64();
        *len = roots.len();
        if roots.len() > cap {
            return Err(Failure(
                PadelabStatus::BufferTooSmall,
                format!("{} poles do not fit in {cap}", roots.len()),
            ));
        }
        if roots.is_empty() {
            return Ok(());
        }
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        for (k, z) in roots.iter().enumerate() {
            *re.add(k) = z.re;
            *im.add(k) = z.im;
        }
        Ok(())
    })
}

/// `Π_n(z)` rounded to double precision.
///
/// # Safety
/// `run` must be a live handle; `out_re` and `out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn padelab_run_eval(
    run: *const PadelabRun,
    n: usize,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> PadelabStatus {
    guard(|| {
        let r = run.as_ref().ok_or_else(|| null("run"))?;
        let (or, oi) = (out(out_re, "out_re")?, out(out_im, "out_im")?);
        let a = approx(r, n)?;
        let v = a.eval(&BigComplex::from_f64(a.prec, re, im)).to_c64();
        *or = v.re;
        *oi = v.im;
        Ok(())
    })
}

/// Runs a bundled oracle suite (`markov`, `potential` or `all`); the
/// PASS/FAIL lines go to `out_text`, free with [`padelab_string_free`].
///
/// # Safety
/// `name` must be a nul-terminated string; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn padelab_oracle(
    name: *const c_char,
    precision: u32,
    out_text: *mut *mut c_char,
    out_all_pass: *mut bool,
) -> PadelabStatus {
    guard(|| {
        let slot = out(out_text, "out_text")?;
        let pass = out(out_all_pass, "out_all_pass")?;
        let lines = oracle::run_suite(text(name, "name")?, precision)?;
        *pass = lines.iter().all(|l| l.passed);
        *slot = owned_string(lines.iter().map(|l| format!("{l}\n")).collect());
        Ok(())
    })
}
