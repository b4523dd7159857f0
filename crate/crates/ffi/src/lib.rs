//! C ABI over the `semifluid` solvers.
//!
//! Instances and solutions are opaque handles owned by the caller and released
//! with the matching `*_free` function. Every fallible call returns an
//! [`SfStatus`]; on failure the message is available from [`sf_last_error`] on
//! the same thread. Strings returned through `char **` are released with
//! [`sf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use semifluid::generator::{generate, Family, GenSpec};
use semifluid::model::{
    format_instance, format_solution, parse_instance, read_instance, read_solution, validate,
    write_solution, FormatError, Instance, Solution,
};
use semifluid::search::{Limits, SearchConfig};
use semifluid::solver::{solve, Method};
use semifluid::Rational;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    InvalidArgument = 5,
    /// A solution broke a packing rule.
    Infeasible = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfFamily {
    Easy = 0,
    Hard = 1,
}

/// Search limits. Zero (or a negative discrepancy) means unlimited.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SfLimits {
    /// Seconds of wall time.
    pub time_limit: f64,
    pub max_queue: u64,
    pub max_discrepancy: i64,
    pub max_nodes: u64,
    pub symmetry: bool,
    /// Skip nodes whose packing state was already expanded.
    pub prune_duplicates: bool,
    /// Bound each item by the holders it fits instead of all free volume.
    pub fit_bound: bool,
}

/// Opaque instance handle.
pub struct SfInstance {
    instance: Instance,
}

/// Opaque solution handle.
pub struct SfSolution {
    solution: Solution,
    optimal: bool,
    explored: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(SfStatus, String);

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        let status = match e {
            FormatError::Io { .. } => SfStatus::Io,
            _ => SfStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, turning errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SfStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("panic: {msg}"));
            SfStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(SfStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(SfStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(SfStatus::NullPointer, format!("{what} is null")))
}

fn out_arg<T>(p: *mut *mut T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(SfStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s)
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Message of the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn sf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn sf_status_name(status: SfStatus) -> *const c_char {
    let s: &'static CStr = match status {
        SfStatus::Ok => c"ok",
        SfStatus::NullPointer => c"null pointer",
        SfStatus::InvalidUtf8 => c"invalid utf-8",
        SfStatus::Io => c"i/o error",
        SfStatus::Parse => c"parse error",
        SfStatus::InvalidArgument => c"invalid argument",
        SfStatus::Infeasible => c"infeasible solution",
        SfStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Reads an instance file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_instance_read(
    path: *const c_char,
    out: *mut *mut SfInstance,
) -> SfStatus {
    guard(|| {
        out_arg(out, "out")?;
        let file = read_instance(str_arg(path, "path")?)?;
        *out = Box::into_raw(Box::new(SfInstance {
            instance: file.instance,
        }));
        Ok(())
    })
}

/// Parses instance text in the file format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_instance_parse(
    text: *const c_char,
    out: *mut *mut SfInstance,
) -> SfStatus {
    guard(|| {
        out_arg(out, "out")?;
        let file = parse_instance(str_arg(text, "text")?)?;
        *out = Box::into_raw(Box::new(SfInstance {
            instance: file.instance,
        }));
        Ok(())
    })
}

/// # Safety
/// `instance` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sf_instance_free(instance: *mut SfInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Number of items, or 0 for null.
///
/// # Safety
/// `instance` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_instance_item_count(instance: *const SfInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.instance.len())
}

/// Instance text in the file format.
///
/// # Safety
/// `instance` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_instance_to_string(
    instance: *const SfInstance,
    out: *mut *mut c_char,
) -> SfStatus {
    guard(|| {
        out_arg(out, "out")?;
        let inst = ref_arg(instance, "instance")?;
        *out = c_string(format_instance(&inst.instance, &[]));
        Ok(())
    })
}

/// Generates an instance. `factor` is a fraction such as "3/2" and may be null
/// for 1; it only affects hard instances. For easy instances the known full
/// packing is stored in `layout` when that pointer is not null.
///
/// # Safety
/// `factor` must be null or a NUL-terminated string; `out` must be valid;
/// `layout` may be null.
#[no_mangle]
pub unsafe extern "C" fn sf_generate(
    family: SfFamily,
    n_items: usize,
    length_digits: u32,
    factor: *const c_char,
    seed: u64,
    out: *mut *mut SfInstance,
    layout: *mut *mut SfSolution,
) -> SfStatus {
    guard(|| {
        out_arg(out, "out")?;
        let volume_factor = if factor.is_null() {
            Rational::one()
        } else {
            str_arg(factor, "factor")?
                .parse::<Rational>()
                .map_err(|e| Failure(SfStatus::InvalidArgument, format!("factor: {e}")))?
        };
        let family = match family {
            SfFamily::Easy => Family::Easy,
            SfFamily::Hard => Family::Hard,
        };
        let spec = GenSpec {
            family,
            n_items,
            length_digits,
            volume_factor,
            value_digits: 3,
            seed,
        };
        let g = generate(&spec).map_err(|e| Failure(SfStatus::InvalidArgument, e.to_string()))?;
        if !layout.is_null() {
            *layout = g.layout.map_or(ptr::null_mut(), |solution| {
                Box::into_raw(Box::new(SfSolution {
                    solution,
                    optimal: false,
                    explored: 0,
                }))
            });
        }
        *out = Box::into_raw(Box::new(SfInstance {
            instance: g.instance,
        }));
        Ok(())
    })
}

fn limits_from(l: Option<&SfLimits>) -> Result<SearchConfig, Failure> {
    let Some(l) = l else {
        return Ok(SearchConfig::default());
    };
    if l.time_limit.is_nan() || l.time_limit.is_infinite() {
        return Err(Failure(
            SfStatus::InvalidArgument,
            "time limit is not finite".into(),
        ));
    }
    let nonzero = |v: u64| (v > 0).then_some(v);
    Ok(SearchConfig {
        limits: Limits {
            time: (l.time_limit > 0.0).then(|| Duration::from_secs_f64(l.time_limit)),
            max_queue: nonzero(l.max_queue).map(|v| v as usize),
            max_discrepancy: u32::try_from(l.max_discrepancy).ok(),
            max_nodes: nonzero(l.max_nodes),
        },
        symmetry: l.symmetry,
        prune_duplicates: l.prune_duplicates,
        fit_bound: l.fit_bound,
    })
}

/// Solves with a method named as on the command line ("LBF", "LDS", ...).
/// `limits` may be null for unlimited search with the symmetry rules,
/// duplicate pruning and the fit-aware bound.
///
/// # Safety
/// `instance` must be a live handle, `method` a NUL-terminated string,
/// `limits` null or valid, and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_solve(
    instance: *const SfInstance,
    method: *const c_char,
    limits: *const SfLimits,
    out: *mut *mut SfSolution,
) -> SfStatus {
    guard(|| {
        out_arg(out, "out")?;
        let inst = ref_arg(instance, "instance")?;
        let method: Method = str_arg(method, "method")?
            .parse()
            .map_err(|e| Failure(SfStatus::InvalidArgument, e))?;
        let config = limits_from(limits.as_ref())?;
        let report = solve(&inst.instance, method, &config);
        *out = Box::into_raw(Box::new(SfSolution {
            optimal: report.optimal,
            explored: report.stats.map_or(0, |s| s.explored),
            solution: report.solution,
        }));
        Ok(())
    })
}

/// Reads a solution file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_solution_read(
    path: *const c_char,
    out: *mut *mut SfSolution,
) -> SfStatus {
    guard(|| {
        out_arg(out, "out")?;
        let solution = read_solution(str_arg(path, "path")?)?;
        *out = Box::into_raw(Box::new(SfSolution {
            solution,
            optimal: false,
            explored: 0,
        }));
        Ok(())
    })
}

/// # Safety
/// `solution` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sf_solution_free(solution: *mut SfSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Writes a solution file.
///
/// # Safety
/// `solution` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sf_solution_write(
    solution: *const SfSolution,
    path: *const c_char,
) -> SfStatus {
    guard(|| {
        let sol = ref_arg(solution, "solution")?;
        write_solution(str_arg(path, "path")?, &sol.solution)?;
        Ok(())
    })
}

/// Solution text in the file format.
///
/// # Safety
/// `solution` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_solution_to_string(
    solution: *const SfSolution,
    out: *mut *mut c_char,
) -> SfStatus {
    guard(|| {
        out_arg(out, "out")?;
        let sol = ref_arg(solution, "solution")?;
        *out = c_string(format_solution(&sol.solution));
        Ok(())
    })
}

/// Exact objective as a fraction such as "1321/500".
///
/// # Safety
/// `solution` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_solution_objective(
    solution: *const SfSolution,
    out: *mut *mut c_char,
) -> SfStatus {
    guard(|| {
        out_arg(out, "out")?;
        let sol = ref_arg(solution, "solution")?;
        *out = c_string(sol.solution.value.to_string());
        Ok(())
    })
}

/// Nearest double to the objective, or NaN for null.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_solution_objective_f64(solution: *const SfSolution) -> f64 {
    solution
        .as_ref()
        .map_or(f64::NAN, |s| s.solution.value.to_f64())
}

/// True if a tree search proved the solution optimal.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_solution_is_optimal(solution: *const SfSolution) -> bool {
    solution.as_ref().is_some_and(|s| s.optimal)
}

/// Nodes expanded by the search that produced the solution; 0 for heuristics.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_solution_nodes_explored(solution: *const SfSolution) -> u64 {
    solution.as_ref().map_or(0, |s| s.explored)
}

/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_solution_placement_count(solution: *const SfSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.solution.placements.len())
}

/// Checks a solution. An infeasible one gives the `Infeasible` status, with the
/// violations in the last error.
///
/// # Safety
/// Both handles must be live.
#[no_mangle]
pub unsafe extern "C" fn sf_validate(
    instance: *const SfInstance,
    solution: *const SfSolution,
) -> SfStatus {
    guard(|| {
        let inst = ref_arg(instance, "instance")?;
        let sol = ref_arg(solution, "solution")?;
        validate(&inst.instance, &sol.solution).map_err(|v| {
            let list: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            Failure(SfStatus::Infeasible, list.join("; "))
        })
    })
}
