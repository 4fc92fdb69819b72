//! C interface to `nscert`.
//!
//! Objects are opaque handles created by `*_new`/`*_from_*` functions and
//! released with the matching `*_free`. Every fallible function returns an
//! [`NscertStatus`]; on failure a message is available from
//! [`nscert_last_error`] on the same thread. Strings returned through `out`
//! parameters are owned by the caller and released with [`nscert_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nscert::certify::{self, CertificateReport, EpsilonBudget};
use nscert::constants::{self, BundleInputs, ConstantBundle, K2Variant, SobolevConstantTable, SobolevValues};
use nscert::solver::{self, Forcing, SolverConfig, Trajectory};
use nscert::spectral::{snapshot, BoxSpec, SpectralField};
use nscert::{Complex64, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NscertStatus {
    Ok = 0,
    /// The computation finished and the criterion does not hold.
    CriterionFailed = 1,
    InvalidInput = 2,
    Numerical = 3,
    NullPointer = 4,
    Io = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NscertK2Variant {
    ClosedForm = 0,
    Assembled = 1,
    Conservative = 2,
}

/// Periodic box `[0, L]^3` with viscosity and regularity index.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct NscertBox {
    pub side: f64,
    pub nu: f64,
    pub alpha: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct NscertBudget {
    pub nu_bar: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub sigma: f64,
    pub delta: f64,
}

/// Opaque spectral field.
pub struct NscertField(SpectralField);

/// Opaque constant bundle.
pub struct NscertBundle(ConstantBundle);

/// Opaque trajectory.
pub struct NscertTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: NscertStatus, msg: impl Into<String>) -> NscertStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> NscertStatus {
    let status = match e {
        Error::Numerical(_) => NscertStatus::Numerical,
        Error::Io(_) => NscertStatus::Io,
        _ => NscertStatus::InvalidInput,
    };
    fail(status, e.to_string())
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<NscertStatus, NscertStatus>) -> NscertStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) | Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(NscertStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, NscertStatus>;
}

impl<T> OrStatus<T> for nscert::Result<T> {
    fn or_status(self) -> Result<T, NscertStatus> {
        self.map_err(from_error)
    }
}

unsafe fn reference<'a, T>(p: *const T, what: &str) -> Result<&'a T, NscertStatus> {
    p.as_ref().ok_or_else(|| fail(NscertStatus::NullPointer, format!("{what} is null")))
}

unsafe fn reference_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, NscertStatus> {
    p.as_mut().ok_or_else(|| fail(NscertStatus::NullPointer, format!("{what} is null")))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, NscertStatus> {
    if p.is_null() {
        return Err(fail(NscertStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(NscertStatus::InvalidInput, format!("{what} is not valid UTF-8")))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<NscertStatus, NscertStatus> {
    if out.is_null() {
        return Err(fail(NscertStatus::NullPointer, "output pointer is null"));
    }
    out.write(value);
    Ok(NscertStatus::Ok)
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<NscertStatus, NscertStatus> {
    let c = CString::new(s).map_err(|_| fail(NscertStatus::InvalidInput, "string contains NUL"))?;
    put(out, c.into_raw())
}

fn to_box(b: &NscertBox) -> Result<BoxSpec, NscertStatus> {
    BoxSpec::new(b.side, b.nu, b.alpha).or_status()
}

fn to_budget(b: &NscertBudget) -> EpsilonBudget {
    EpsilonBudget {
        nu_bar: b.nu_bar,
        eps1: b.eps1,
        eps2: b.eps2,
        sigma: b.sigma,
        delta: b.delta,
    }
}

fn report_status(r: &CertificateReport) -> NscertStatus {
    if r.passed {
        NscertStatus::Ok
    } else {
        NscertStatus::CriterionFailed
    }
}

/// Message of the last failure on this thread, or null. Valid until the next
/// failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn nscert_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn nscert_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn nscert_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Zero field on `[0, side]^3` with truncation `m`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nscert_field_zeros(side: f64, m: usize, out: *mut *mut NscertField) -> NscertStatus {
    guard(|| {
        let f = SpectralField::zeros(side, m).or_status()?;
        put(out, Box::into_raw(Box::new(NscertField(f))))
    })
}

/// Field from the JSON snapshot format.
///
/// # Safety
/// `json` must be a NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nscert_field_from_json(json: *const c_char, out: *mut *mut NscertField) -> NscertStatus {
    guard(|| {
        let text = string(json, "json")?;
        let f = snapshot::from_json(text).or_status()?;
        put(out, Box::into_raw(Box::new(NscertField(f))))
    })
}

/// Field from a snapshot file in either format.
///
/// # Safety
/// `path` must be a NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nscert_field_load(path: *const c_char, out: *mut *mut NscertField) -> NscertStatus {
    guard(|| {
        let p = string(path, "path")?;
        let f = snapshot::load(p).or_status()?;
        put(out, Box::into_raw(Box::new(NscertField(f))))
    })
}

/// # Safety
/// `field` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn nscert_field_free(field: *mut NscertField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Sets the coefficient at wave vector `k` (and its conjugate at `-k`).
///
/// # Safety
/// `field` must be a valid handle; `re` and `im` must point to three values each.
#[no_mangle]
pub unsafe extern "C" fn nscert_field_set_mode(
    field: *mut NscertField,
    k1: i32,
    k2: i32,
    k3: i32,
    re: *const f64,
    im: *const f64,
) -> NscertStatus {
    guard(|| {
        let f = reference_mut(field, "field")?;
        let re = std::slice::from_raw_parts(reference(re, "re")?, 3);
        let im = std::slice::from_raw_parts(reference(im, "im")?, 3);
        let v = [0, 1, 2].map(|i| Complex64::new(re[i], im[i]));
        f.0.set_coefficient([k1, k2, k3], v).or_status()?;
        Ok(NscertStatus::Ok)
    })
}

/// Applies the Leray projection in place.
///
/// # Safety
/// `field` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn nscert_field_leray_project(field: *mut NscertField) -> NscertStatus {
    guard(|| {
        let f = reference_mut(field, "field")?;
        f.0 = f.0.leray_project();
        Ok(NscertStatus::Ok)
    })
}

/// `|u|_{s,L}`.
///
/// # Safety
/// `field` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nscert_field_hs_norm(field: *const NscertField, s: f64, out: *mut f64) -> NscertStatus {
    guard(|| put(out, reference(field, "field")?.0.hs_norm(s)))
}

/// JSON snapshot of the field.
///
/// # Safety
/// `field` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nscert_field_to_json(field: *const NscertField, out: *mut *mut c_char) -> NscertStatus {
    guard(|| {
        let s = snapshot::to_json(&reference(field, "field")?.0).or_status()?;
        put_string(out, s)
    })
}

/// Lower bound for `C_S(β)` from `budget` ascent iterations.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nscert_estimate_sobolev(beta: f64, budget: usize, seed: u64, out: *mut f64) -> NscertStatus {
    guard(|| put(out, constants::estimate_sobolev_constant(beta, budget, seed).or_status()?))
}

fn variant(v: NscertK2Variant) -> K2Variant {
    match v {
        NscertK2Variant::ClosedForm => K2Variant::ClosedForm,
        NscertK2Variant::Assembled => K2Variant::Assembled,
        NscertK2Variant::Conservative => K2Variant::Conservative,
    }
}

/// Bundle from explicit `C_S(1-α)`, `C_S(1)`, `C_S(α-½)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nscert_bundle_from_values(
    alpha: f64,
    side: f64,
    eps1: f64,
    eps2: f64,
    cs_one_minus_alpha: f64,
    cs_one: f64,
    cs_alpha_minus_half: f64,
    k2_variant: NscertK2Variant,
    out: *mut *mut NscertBundle,
) -> NscertStatus {
    guard(|| {
        let b = constants::assemble_from_values(
            BundleInputs { alpha, l: side, eps1, eps2 },
            SobolevValues {
                one_minus_alpha: cs_one_minus_alpha,
                one: cs_one,
                alpha_minus_half: cs_alpha_minus_half,
            },
            variant(k2_variant),
        )
        .or_status()?;
        put(out, Box::into_raw(Box::new(NscertBundle(b))))
    })
}

/// Bundle from a constant table in its JSON form.
///
/// # Safety
/// `table_json` must be a NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nscert_bundle_from_table(
    alpha: f64,
    side: f64,
    eps1: f64,
    eps2: f64,
    table_json: *const c_char,
    k2_variant: NscertK2Variant,
    out: *mut *mut NscertBundle,
) -> NscertStatus {
    guard(|| {
        let table = SobolevConstantTable::from_json(string(table_json, "table_json")?).or_status()?;
        let b = constants::assemble_bundle_with(alpha, side, eps1, eps2, &table, variant(k2_variant)).or_status()?;
        put(out, Box::into_raw(Box::new(NscertBundle(b))))
    })
}

/// # Safety
/// `bundle` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn nscert_bundle_free(bundle: *mut NscertBundle) {
    if !bundle.is_null() {
        drop(Box::from_raw(bundle));
    }
}

/// Selected `K₂`, `K₃`, `K₄`; any output may be null.
///
/// # Safety
/// `bundle` must be a valid handle; non-null outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn nscert_bundle_constants(
    bundle: *const NscertBundle,
    k2: *mut f64,
    k3: *mut f64,
    k4: *mut f64,
) -> NscertStatus {
    guard(|| {
        let b = &reference(bundle, "bundle")?.0;
        for (p, v) in [(k2, b.k2), (k3, b.k3), (k4, b.k4)] {
            if !p.is_null() {
                p.write(v);
            }
        }
        Ok(NscertStatus::Ok)
    })
}

/// # Safety
/// `bundle` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nscert_bundle_to_json(bundle: *const NscertBundle, out: *mut *mut c_char) -> NscertStatus {
    guard(|| {
        let s = serde_json::to_string_pretty(&reference(bundle, "bundle")?.0).map_err(|e| fail(NscertStatus::InvalidInput, e.to_string()))?;
        put_string(out, s)
    })
}

/// Unforced Galerkin run from `u0`; `config_json` holds the solver settings
/// (`m`, `dt`, `t_end`, optional `sample_every`, `k0`, `caloric`, ...).
///
/// # Safety
/// `u0` must be a valid handle, `config_json` a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nscert_integrate(
    u0: *const NscertField,
    domain: NscertBox,
    config_json: *const c_char,
    out: *mut *mut NscertTrajectory,
) -> NscertStatus {
    guard(|| {
        let u0 = &reference(u0, "u0")?.0;
        let config: SolverConfig = serde_json::from_str(string(config_json, "config_json")?)
            .map_err(|e| fail(NscertStatus::InvalidInput, format!("solver config: {e}")))?;
        let spec = to_box(&domain)?;
        let traj = solver::integrate(u0, &Forcing::Zero, &config, &spec).or_status()?;
        put(out, Box::into_raw(Box::new(NscertTrajectory(traj))))
    })
}

/// # Safety
/// `traj` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn nscert_trajectory_free(traj: *mut NscertTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of diagnostic samples; `completed` receives 1 if the run reached `t_end`.
///
/// # Safety
/// `traj` must be a valid handle; outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn nscert_trajectory_info(
    traj: *const NscertTrajectory,
    samples: *mut usize,
    completed: *mut i32,
) -> NscertStatus {
    guard(|| {
        let t = &reference(traj, "trajectory")?.0;
        put(samples, t.samples.len())?;
        put(completed, i32::from(t.is_completed()))
    })
}

/// Diagnostics as CSV text.
///
/// # Safety
/// `traj` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nscert_trajectory_csv(traj: *const NscertTrajectory, out: *mut *mut c_char) -> NscertStatus {
    guard(|| {
        let t = &reference(traj, "trajectory")?.0;
        let mut buf = Vec::new();
        t.write_csv(&mut buf).or_status()?;
        put_string(out, String::from_utf8_lossy(&buf).into_owned())
    })
}

/// Unforced small-data condition. Returns `NSCERT_STATUS_OK` when it holds,
/// `NSCERT_STATUS_CRITERION_FAILED` when it does not; the certificate JSON
/// is written to `report_json` in both cases.
///
/// # Safety
/// Handles must be valid and `report_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nscert_check_smallness(
    u0: *const NscertField,
    bundle: *const NscertBundle,
    domain: NscertBox,
    budget: NscertBudget,
    t_end: f64,
    report_json: *mut *mut c_char,
) -> NscertStatus {
    guard(|| {
        let u0 = &reference(u0, "u0")?.0;
        let b = &reference(bundle, "bundle")?.0;
        let spec = to_box(&domain)?;
        let r = certify::check_smallness_a4(u0, &Forcing::Zero, t_end, b, &to_budget(&budget), &spec).or_status()?;
        put_string(report_json, r.to_json().or_status()?)?;
        Ok(report_status(&r))
    })
}

/// Unforced proximity condition for the datum `v0` against the reference run `traj`.
///
/// # Safety
/// Handles must be valid and `report_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nscert_check_proximity(
    traj: *const NscertTrajectory,
    v0: *const NscertField,
    bundle: *const NscertBundle,
    budget: NscertBudget,
    t_end: f64,
    report_json: *mut *mut c_char,
) -> NscertStatus {
    guard(|| {
        let t = &reference(traj, "trajectory")?.0;
        if !t.forcing.is_zero() {
            return Err(fail(NscertStatus::InvalidInput, "reference run is forced"));
        }
        let v0 = &reference(v0, "v0")?.0;
        let b = &reference(bundle, "bundle")?.0;
        let data = certify::PerturbedData { v0, g: &Forcing::Zero };
        let r = certify::check_proximity_a1(t, &data, t_end, b, &to_budget(&budget)).or_status()?;
        put_string(report_json, r.to_json().or_status()?)?;
        Ok(report_status(&r))
    })
}

/// Caloric lower bound `T0` with default search options and the given `T_max`.
///
/// # Safety
/// Handles must be valid; `t0` and `report_json` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn nscert_caloric_lower_bound(
    u0: *const NscertField,
    bundle: *const NscertBundle,
    domain: NscertBox,
    budget: NscertBudget,
    t_max: f64,
    t0: *mut f64,
    report_json: *mut *mut c_char,
) -> NscertStatus {
    guard(|| {
        let u0 = &reference(u0, "u0")?.0;
        let b = &reference(bundle, "bundle")?.0;
        let spec = to_box(&domain)?;
        let options = certify::CaloricOptions {
            t_max,
            ..Default::default()
        };
        let bound = certify::caloric_lower_bound(u0, &spec, b, &to_budget(&budget), options).or_status()?;
        put(t0, bound.t0)?;
        put_string(report_json, bound.report.to_json().or_status()?)?;
        Ok(report_status(&bound.report))
    })
}

/// Runs the command-line interface with `argc` arguments (including the
/// program name) and returns its exit code.
///
/// # Safety
/// `argv` must point to `argc` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn nscert_cli_run(argc: i32, argv: *const *const c_char) -> i32 {
    let args: Option<Vec<String>> = (0..argc.max(0) as usize)
        .map(|i| {
            let p = *argv.add(i);
            (!p.is_null()).then(|| CStr::from_ptr(p).to_string_lossy().into_owned())
        })
        .collect();
    let Some(args) = args else {
        set_error("argv contains a null pointer".into());
        return 2;
    };
    catch_unwind(|| nscert::cli::run(args)).unwrap_or(3)
}
