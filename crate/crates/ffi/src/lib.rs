//! C interface to `weakdisc`.
//!
//! Every function returns a [`WdStatus`]; results go through out-pointers.
//! After a non-zero status, [`wd_last_error_message`] describes the failure
//! on the calling thread. Objects behind opaque handles are released with
//! their `_free` function. Unbounded ratios are reported as `+INFINITY`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufWriter;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use weakdisc::discrimination::{self, PovmSet};
use weakdisc::error_analysis::{self, DeviationSampling, McParams};
use weakdisc::harness::{
    self, Cell, ExperimentConfig, Format, HarnessError, Metadata, Record, ResultRow,
};
use weakdisc::qubit_algebra::BlochVector;
use weakdisc::weak_measurement;
use weakdisc::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Regime = 3,
    Degenerate = 4,
    NoDiscrimination = 5,
    Config = 6,
    Io = 7,
    Invariant = 8,
    MissingValue = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WdFormat {
    Csv = 0,
    Jsonl = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WdSampling {
    UniformAngle = 0,
    Gaussian = 1,
}

/// Monte Carlo averages of the success-to-error ratios.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WdMcSummary {
    pub mean_beta_a: f64,
    pub mean_beta_b: f64,
    pub std_error_a: f64,
    pub std_error_b: f64,
    pub mean_trace_beta_a: f64,
    pub mean_trace_beta_b: f64,
    pub std_error_trace_a: f64,
    pub std_error_trace_b: f64,
    pub sample_count: u64,
    pub seed: u64,
}

/// A validated three-element POVM.
pub struct WdPovm(PovmSet);

/// A parsed experiment configuration.
pub struct WdConfig(ExperimentConfig);

/// Sweep output, one row per sweep point.
pub struct WdRows {
    rows: Vec<ResultRow>,
    seed: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(WdStatus, String);

impl From<weakdisc::Error> for Failure {
    fn from(e: weakdisc::Error) -> Self {
        use weakdisc::Error as E;
        let status = match e {
            E::UnphysicalBloch { .. } | E::InvalidState(_) | E::InvalidParameter { .. } => {
                WdStatus::InvalidArgument
            }
            E::DegeneratePostselection { .. } => WdStatus::Degenerate,
            E::Regime(_) => WdStatus::Regime,
            E::NoDiscrimination => WdStatus::NoDiscrimination,
        };
        Failure(status, e.to_string())
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        let status = match e {
            HarnessError::Config(_) => WdStatus::Config,
            HarnessError::Io(_) => WdStatus::Io,
            HarnessError::Invariant(_) => WdStatus::Invariant,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> WdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            WdStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            WdStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(WdStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn put<T>(out: *mut T, name: &str, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn get<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn read_vec3(p: *const f64, name: &str) -> Result<BlochVector, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    let s = std::slice::from_raw_parts(p, 3);
    Ok(BlochVector::new(s[0], s[1], s[2]))
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Failure(
            WdStatus::InvalidArgument,
            format!("`{name}` is not valid UTF-8"),
        )
    })
}

unsafe fn boxed<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`) and returns the full message length
/// excluding the NUL. `buf` may be null to query the length.
///
/// # Safety
/// `buf` must be null or point to at least `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn wd_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// IDP limit `1 − 1/√(1+2|η|²)`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wd_idp_limit_eta(eta_re: f64, eta_im: f64, out: *mut f64) -> WdStatus {
    guard(|| {
        put(
            out,
            "out",
            discrimination::idp_limit_eta(Complex64::new(eta_re, eta_im)),
        )
    })
}

/// Exact overall success probability of the weak-measurement protocol.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wd_overall_success_exact(
    eta_re: f64,
    eta_im: f64,
    g: f64,
    out: *mut f64,
) -> WdStatus {
    guard(|| {
        put(
            out,
            "out",
            discrimination::overall_success_exact(Complex64::new(eta_re, eta_im), g),
        )
    })
}

/// Weak-coupling approximation `|η|²cos²g`; `Regime` outside `|η| ≤ g/10, g ≤ 0.3`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wd_overall_success_approx(
    eta_re: f64,
    eta_im: f64,
    g: f64,
    out: *mut f64,
) -> WdStatus {
    guard(|| {
        let p = discrimination::overall_success_approx(Complex64::new(eta_re, eta_im), g)?;
        put(out, "out", p)
    })
}

/// Postselection probabilities: `lambda1` for the `ψ₂` branch, `lambda2 = sin²g` for `ψ₁`.
///
/// # Safety
/// Both pointers must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wd_postselection_probs(
    eta_re: f64,
    eta_im: f64,
    g: f64,
    lambda1: *mut f64,
    lambda2: *mut f64,
) -> WdStatus {
    guard(|| {
        if lambda1.is_null() || lambda2.is_null() {
            return Err(null("lambda"));
        }
        let (l1, l2) = weak_measurement::postselection_probs(Complex64::new(eta_re, eta_im), g);
        put(lambda1, "lambda1", l1)?;
        put(lambda2, "lambda2", l2)
    })
}

/// `|⟨φ′₁|φ′₂⟩|` of the closed-form pointer states.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wd_pointer_overlap(
    eta_re: f64,
    eta_im: f64,
    g: f64,
    out: *mut f64,
) -> WdStatus {
    guard(|| {
        let ps = weak_measurement::pointer_states_analytic(Complex64::new(eta_re, eta_im), g)?;
        put(out, "out", ps.overlap())
    })
}

/// Exact postselected pointer Bloch vector and success probability for
/// source `k_a`, pointer `k_b`, postselection direction `f`, coupling axis
/// `n` (each three doubles) and strength `g`.
///
/// # Safety
/// Input pointers must reference three readable doubles, `out_bloch` three
/// writable doubles, `out_prob` one.
#[no_mangle]
pub unsafe extern "C" fn wd_exact_pointer_bloch(
    k_a: *const f64,
    k_b: *const f64,
    f: *const f64,
    n: *const f64,
    g: f64,
    out_bloch: *mut f64,
    out_prob: *mut f64,
) -> WdStatus {
    guard(|| {
        let (k_a, k_b) = (read_vec3(k_a, "k_a")?, read_vec3(k_b, "k_b")?);
        let (f, n) = (read_vec3(f, "f")?, read_vec3(n, "n")?);
        if out_bloch.is_null() || out_prob.is_null() {
            return Err(null("out"));
        }
        let o = weak_measurement::exact_pointer_bloch(k_a, k_b, f, n, g)?;
        let v = o.pointer_state.bloch().to_array();
        ptr::copy_nonoverlapping(v.as_ptr(), out_bloch, 3);
        put(out_prob, "out_prob", o.success_prob)
    })
}

/// Conventional POVM for the source pair with in-plane deviation `(dx, dy)`.
///
/// # Safety
/// `out` must be null or valid for writes; free the handle with [`wd_povm_free`].
#[no_mangle]
pub unsafe extern "C" fn wd_povm_conventional(
    eps: f64,
    dx: f64,
    dy: f64,
    out: *mut *mut WdPovm,
) -> WdStatus {
    guard(|| {
        let set = discrimination::povm_conventional(eps, BlochVector::new(dx, dy, 0.0))?;
        boxed(out, WdPovm(set))
    })
}

/// Weak-measurement POVM for the pointer pair with in-plane deviation `(dx, dy)`.
///
/// # Safety
/// `out` must be null or valid for writes; free the handle with [`wd_povm_free`].
#[no_mangle]
pub unsafe extern "C" fn wd_povm_weak(
    eps: f64,
    g: f64,
    dx: f64,
    dy: f64,
    out: *mut *mut WdPovm,
) -> WdStatus {
    guard(|| {
        let set = discrimination::povm_weak(eps, g, BlochVector::new(dx, dy, 0.0))?;
        boxed(out, WdPovm(set))
    })
}

/// Element `index` (0 = π₁, 1 = π₂, 2 = π_?) as 8 doubles: row-major
/// `re, im` pairs.
///
/// # Safety
/// `povm` must be a live handle, `out` must point to 8 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn wd_povm_element(
    povm: *const WdPovm,
    index: u32,
    out: *mut f64,
) -> WdStatus {
    guard(|| {
        let povm = get(povm, "povm")?;
        let m = povm
            .0
            .elements()
            .get(index as usize)
            .copied()
            .ok_or_else(|| {
                Failure(
                    WdStatus::InvalidArgument,
                    format!("element index {index} is not 0, 1 or 2"),
                )
            })?;
        if out.is_null() {
            return Err(null("out"));
        }
        let flat: Vec<f64> = m.0.iter().flatten().flat_map(|z| [z.re, z.im]).collect();
        ptr::copy_nonoverlapping(flat.as_ptr(), out, 8);
        Ok(())
    })
}

/// Smallest eigenvalue of π_?; negative values mean the set is not a
/// physical POVM.
///
/// # Safety
/// `povm` must be a live handle, `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wd_povm_min_inconclusive_eigenvalue(
    povm: *const WdPovm,
    out: *mut f64,
) -> WdStatus {
    guard(|| {
        put(
            out,
            "out",
            get(povm, "povm")?.0.min_inconclusive_eigenvalue(),
        )
    })
}

/// # Safety
/// `povm` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wd_povm_free(povm: *mut WdPovm) {
    if !povm.is_null() {
        drop(Box::from_raw(povm));
    }
}

/// Closed-form `β_A`; `+INFINITY` when `δ_f = 0`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wd_beta_a(eps: f64, dx: f64, dy: f64, out: *mut f64) -> WdStatus {
    guard(|| {
        put(
            out,
            "out",
            error_analysis::beta_a_formula(eps, BlochVector::new(dx, dy, 0.0))?.value(),
        )
    })
}

/// Closed-form `β_B`; `+INFINITY` when `δ_f = 0`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wd_beta_b(eps: f64, g: f64, dx: f64, dy: f64, out: *mut f64) -> WdStatus {
    guard(|| {
        put(
            out,
            "out",
            error_analysis::beta_b_formula(eps, g, BlochVector::new(dx, dy, 0.0))?.value(),
        )
    })
}

/// Monte Carlo averages of `β_A`, `β_B`; bit-reproducible for a given seed.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wd_mc_average_beta(
    eps: f64,
    g: f64,
    delta_f_mag: f64,
    samples: u64,
    seed: u64,
    sampling: WdSampling,
    out: *mut WdMcSummary,
) -> WdStatus {
    guard(|| {
        let params = McParams {
            eps,
            g,
            delta_f_mag,
            samples: samples as usize,
            seed,
            sampling: match sampling {
                WdSampling::UniformAngle => DeviationSampling::UniformAngle,
                WdSampling::Gaussian => DeviationSampling::Gaussian,
            },
        };
        let s = error_analysis::mc_average_beta(&params)?;
        put(
            out,
            "out",
            WdMcSummary {
                mean_beta_a: s.mean_beta_a,
                mean_beta_b: s.mean_beta_b,
                std_error_a: s.std_error_a,
                std_error_b: s.std_error_b,
                mean_trace_beta_a: s.mean_trace_beta_a,
                mean_trace_beta_b: s.mean_trace_beta_b,
                std_error_trace_a: s.std_error_trace_a,
                std_error_trace_b: s.std_error_trace_b,
                sample_count: s.sample_count as u64,
                seed: s.seed,
            },
        )
    })
}

/// Parses a JSON experiment configuration.
///
/// # Safety
/// `json` must be a NUL-terminated string; free the handle with [`wd_config_free`].
#[no_mangle]
pub unsafe extern "C" fn wd_config_from_json(
    json: *const c_char,
    out: *mut *mut WdConfig,
) -> WdStatus {
    guard(|| {
        let cfg = ExperimentConfig::from_json_str(read_str(json, "json")?)?;
        boxed(out, WdConfig(cfg))
    })
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wd_config_set_seed(config: *mut WdConfig, seed: u64) -> WdStatus {
    guard(|| {
        config.as_mut().ok_or_else(|| null("config"))?.0.seed = seed;
        Ok(())
    })
}

/// # Safety
/// `config` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wd_config_free(config: *mut WdConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the configured sweep (a single row without a sweep axis).
///
/// # Safety
/// `config` must be a live handle; free the result with [`wd_rows_free`].
#[no_mangle]
pub unsafe extern "C" fn wd_run_sweep(config: *const WdConfig, out: *mut *mut WdRows) -> WdStatus {
    guard(|| {
        let cfg = &get(config, "config")?.0;
        boxed(
            out,
            WdRows {
                rows: harness::run_sweep(cfg),
                seed: cfg.seed,
            },
        )
    })
}

/// # Safety
/// `rows` must be a live handle, `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wd_rows_len(rows: *const WdRows, out: *mut usize) -> WdStatus {
    guard(|| put(out, "out", get(rows, "rows")?.rows.len()))
}

/// Numeric value of `column` in row `row`. Skipped outputs give
/// `MissingValue`; unbounded values are `+INFINITY`.
///
/// # Safety
/// `rows` must be a live handle, `column` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn wd_rows_value(
    rows: *const WdRows,
    row: usize,
    column: *const c_char,
    out: *mut f64,
) -> WdStatus {
    guard(|| {
        let rows = get(rows, "rows")?;
        let column = read_str(column, "column")?;
        let r = rows
            .rows
            .get(row)
            .ok_or_else(|| Failure(WdStatus::InvalidArgument, format!("row {row} out of range")))?;
        let idx = ResultRow::COLUMNS
            .iter()
            .position(|c| *c == column)
            .ok_or_else(|| {
                Failure(
                    WdStatus::InvalidArgument,
                    format!("unknown column `{column}`"),
                )
            })?;
        match &r.cells()[idx] {
            Cell::Real(x) => put(out, "out", *x),
            Cell::Int(n) => put(out, "out", *n as f64),
            Cell::Missing => Err(Failure(
                WdStatus::MissingValue,
                format!("row {row}: {}", r.status),
            )),
            Cell::Text(_) => Err(Failure(
                WdStatus::InvalidArgument,
                format!("column `{column}` is not numeric"),
            )),
        }
    })
}

/// Whether row `row` has every output (otherwise it is marked skipped).
///
/// # Safety
/// `rows` must be a live handle, `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wd_rows_is_complete(
    rows: *const WdRows,
    row: usize,
    out: *mut bool,
) -> WdStatus {
    guard(|| {
        let r = get(rows, "rows")?
            .rows
            .get(row)
            .ok_or_else(|| Failure(WdStatus::InvalidArgument, format!("row {row} out of range")))?;
        put(out, "out", r.is_complete())
    })
}

/// Writes the rows with a metadata header to `path`.
///
/// # Safety
/// `rows` must be a live handle, `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn wd_rows_write(
    rows: *const WdRows,
    format: WdFormat,
    path: *const c_char,
) -> WdStatus {
    guard(|| {
        let rows = get(rows, "rows")?;
        let path = std::path::Path::new(read_str(path, "path")?);
        let file = File::create(path).map_err(|e| HarnessError::io_at(path, e))?;
        let format = match format {
            WdFormat::Csv => Format::Csv,
            WdFormat::Jsonl => Format::Jsonl,
        };
        harness::emit(
            &mut BufWriter::new(file),
            format,
            &Metadata::new("sweep", rows.seed),
            &rows.rows,
        )?;
        Ok(())
    })
}

/// # Safety
/// `rows` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wd_rows_free(rows: *mut WdRows) {
    if !rows.is_null() {
        drop(Box::from_raw(rows));
    }
}

/// Runs the verification suite; `failed` receives the number of failing
/// checks. Returns `Invariant` when any check fails.
///
/// # Safety
/// `failed` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wd_verify(quick: bool, seed: u64, failed: *mut u32) -> WdStatus {
    guard(|| {
        let report = harness::run_verify(&harness::VerifyOptions {
            quick,
            seed,
            fault: None,
        });
        let names: Vec<&str> = report.failed().map(|c| c.name).collect();
        put(failed, "failed", names.len() as u32)?;
        if names.is_empty() {
            Ok(())
        } else {
            Err(HarnessError::Invariant(names.join(", ")).into())
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_error() -> String {
        let mut buf = [0 as c_char; 256];
        unsafe { wd_last_error_message(buf.as_mut_ptr(), buf.len()) };
        unsafe { CStr::from_ptr(buf.as_ptr()) }
            .to_string_lossy()
            .into_owned()
    }

    #[test]
    fn null_out_pointer_is_reported() {
        let s = unsafe { wd_idp_limit_eta(0.1, 0.0, ptr::null_mut()) };
        assert_eq!(s, WdStatus::NullPointer);
        assert!(last_error().contains("out"));
    }

    #[test]
    fn error_message_truncates() {
        unsafe { wd_overall_success_approx(0.5, 0.0, 0.1, &mut 0.0) };
        let mut buf = [0 as c_char; 8];
        let full = unsafe { wd_last_error_message(buf.as_mut_ptr(), buf.len()) };
        assert!(full > 7);
        let s = unsafe { CStr::from_ptr(buf.as_ptr()) };
        assert_eq!(s.to_bytes().len(), 7);
        assert_eq!(unsafe { wd_last_error_message(ptr::null_mut(), 0) }, full);
    }

    #[test]
    fn version_is_nul_terminated() {
        let v = unsafe { CStr::from_ptr(wd_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
