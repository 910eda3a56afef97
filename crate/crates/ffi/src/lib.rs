//! C interface. Every function returns a [`GgStatus`]; on failure the
//! message is available from [`gg_last_error_message`] on the same thread.
//! Handles are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use gibbsgeo::coexistence::{
    local_second_derivatives, saturation_scan, solve_coexistence, spinodal, CoexistencePoint, SaturationCurve,
    SolverOptions,
};
use gibbsgeo::critical::{fit_power_law, ScalingSeries};
use gibbsgeo::edge::{edge_point, P_SECOND_FLOOR};
use gibbsgeo::eos::{EosParams, ThermoState};
use gibbsgeo::geometry::SurfacePoint;
use gibbsgeo::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    NoConvergence = 4,
    SingularEdge = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// Equation-of-state parameters and solver settings.
pub struct GgModel {
    params: EosParams,
    opts: SolverOptions,
}

/// A solved saturation curve.
pub struct GgCurve {
    curve: SaturationCurve,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GgState {
    pub s: f64,
    pub v: f64,
    pub u: f64,
    pub t: f64,
    pub p: f64,
    pub mu: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GgDerivatives {
    pub dt_ds_v: f64,
    pub dt_dv_s: f64,
    pub dp_ds_v: f64,
    pub dp_dv_s: f64,
    pub dp_dv_t: f64,
    pub ds_dt_v: f64,
    pub dp_dt_v: f64,
    pub ds_dv_t: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GgCurvature {
    pub lambda1: f64,
    pub lambda2: f64,
    pub gaussian: f64,
    pub mean: f64,
}

/// One coexistence pair with first and second derivatives along the curve.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GgCoexistence {
    pub t: f64,
    pub p_sat: f64,
    pub mu_sat: f64,
    pub liquid: GgState,
    pub vapor: GgState,
    pub dp_dt: f64,
    pub dmu_dt: f64,
    pub d2p_dt2: f64,
    pub d2mu_dt2: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GgEdgePoint {
    pub t: f64,
    pub s: f64,
    pub v: f64,
    pub e: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GgExponent {
    pub exponent: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub n: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    // interior NULs would truncate the C string
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> GgStatus {
    match err {
        Error::ScanNode { source, .. } => status_of(source),
        Error::Domain(_) | Error::Asymmetric { .. } | Error::ZeroVector => GgStatus::Domain,
        Error::NoConvergence { .. } => GgStatus::NoConvergence,
        Error::SingularEdge { .. } => GgStatus::SingularEdge,
        Error::OutOfRange { .. } => GgStatus::OutOfRange,
        _ => GgStatus::InvalidArgument,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), GgStatus>) -> GgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            GgStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            GgStatus::Panic
        }
    }
}

fn lift<T>(r: gibbsgeo::Result<T>) -> Result<T, GgStatus> {
    r.map_err(|e| {
        set_error(&e.to_string());
        status_of(&e)
    })
}

fn null(what: &str) -> GgStatus {
    set_error(&format!("{what} is null"));
    GgStatus::NullPointer
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, GgStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(p: *mut T, value: T, what: &str) -> Result<(), GgStatus> {
    match p.as_mut() {
        Some(slot) => {
            *slot = value;
            Ok(())
        }
        None => Err(null(what)),
    }
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], GgStatus> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

impl From<&ThermoState> for GgState {
    fn from(s: &ThermoState) -> Self {
        Self { s: s.s, v: s.v, u: s.u, t: s.t, p: s.p, mu: s.mu }
    }
}

fn coexistence_record(pt: &CoexistencePoint, d2p: f64, d2mu: f64) -> GgCoexistence {
    GgCoexistence {
        t: pt.t,
        p_sat: pt.p_sat,
        mu_sat: pt.mu_sat,
        liquid: (&pt.liquid).into(),
        vapor: (&pt.vapor).into(),
        dp_dt: pt.dp_dt,
        dmu_dt: pt.dmu_dt,
        d2p_dt2: d2p,
        d2mu_dt2: d2mu,
    }
}

/// Creates a model with heat capacity `c` and default solver settings.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn gg_model_new(c: f64, out: *mut *mut GgModel) -> GgStatus {
    guard(|| {
        let params = lift(EosParams::new(c))?;
        let model = Box::new(GgModel { params, opts: SolverOptions::default() });
        put(out, Box::into_raw(model), "out")
    })
}

/// Lowers or raises the smallest temperature the solver accepts.
///
/// # Safety
/// `model` must come from [`gg_model_new`].
#[no_mangle]
pub unsafe extern "C" fn gg_model_set_t_min(model: *mut GgModel, t_min: f64) -> GgStatus {
    guard(|| {
        let m = model.as_mut().ok_or_else(|| null("model"))?;
        if !(t_min > 0.0 && t_min < 1.0) {
            set_error(&format!("t_min = {t_min} must lie in (0, 1)"));
            return Err(GgStatus::InvalidArgument);
        }
        m.opts.t_min = t_min;
        Ok(())
    })
}

/// # Safety
/// `model` must come from [`gg_model_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gg_model_free(model: *mut GgModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gg_state_from_tv(model: *const GgModel, t: f64, v: f64, out: *mut GgState) -> GgStatus {
    guard(|| {
        let m = get(model, "model")?;
        let s = lift(m.params.state_from_tv(t, v))?;
        put(out, (&s).into(), "out")
    })
}

/// # Safety
/// `model` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gg_state_from_sv(model: *const GgModel, s: f64, v: f64, out: *mut GgState) -> GgStatus {
    guard(|| {
        let m = get(model, "model")?;
        let st = lift(m.params.state_from_sv(s, v))?;
        put(out, (&st).into(), "out")
    })
}

/// Closed-form partials at `(T, V)`.
///
/// # Safety
/// `model` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gg_derivatives(model: *const GgModel, t: f64, v: f64, out: *mut GgDerivatives) -> GgStatus {
    guard(|| {
        let m = get(model, "model")?;
        let st = lift(m.params.state_from_tv(t, v))?;
        let d = m.params.derivative_bundle(&st);
        put(
            out,
            GgDerivatives {
                dt_ds_v: d.dt_ds_v,
                dt_dv_s: d.dt_dv_s,
                dp_ds_v: d.dp_ds_v,
                dp_dv_s: d.dp_dv_s,
                dp_dv_t: d.dp_dv_t,
                ds_dt_v: d.ds_dt_v,
                dp_dt_v: d.dp_dt_v,
                ds_dv_t: d.ds_dv_t,
            },
            "out",
        )
    })
}

/// Principal, Gaussian and mean curvature of the energy surface at `(T, V)`.
///
/// # Safety
/// `model` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gg_curvature(model: *const GgModel, t: f64, v: f64, out: *mut GgCurvature) -> GgStatus {
    guard(|| {
        let m = get(model, "model")?;
        let st = lift(m.params.state_from_tv(t, v))?;
        let sp = lift(SurfacePoint::new(&m.params, st))?;
        let k = &sp.spectrum;
        put(
            out,
            GgCurvature { lambda1: k.lambda1, lambda2: k.lambda2, gaussian: k.gaussian(), mean: k.mean() },
            "out",
        )
    })
}

/// Spinodal volumes at subcritical `t`.
///
/// # Safety
/// `model` must be a live handle; `v_liquid`, `v_vapor` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gg_spinodal(
    model: *const GgModel,
    t: f64,
    v_liquid: *mut f64,
    v_vapor: *mut f64,
) -> GgStatus {
    guard(|| {
        let m = get(model, "model")?;
        let (l, g) = lift(spinodal(&m.params, t))?;
        put(v_liquid, l, "v_liquid")?;
        put(v_vapor, g, "v_vapor")
    })
}

/// Coexistence at `t`, including second derivatives along the curve.
///
/// # Safety
/// `model` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gg_solve_coexistence(model: *const GgModel, t: f64, out: *mut GgCoexistence) -> GgStatus {
    guard(|| {
        let m = get(model, "model")?;
        let pt = lift(solve_coexistence(&m.params, t, &m.opts))?;
        let (d2p, d2mu) = lift(local_second_derivatives(&m.params, &pt, &m.opts))?;
        put(out, coexistence_record(&pt, d2p, d2mu), "out")
    })
}

/// Solves the saturation curve on a strictly increasing grid of `n >= 5`
/// temperatures.
///
/// # Safety
/// `temperatures` must hold `n` values; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn gg_curve_scan(
    model: *const GgModel,
    temperatures: *const f64,
    n: usize,
    out: *mut *mut GgCurve,
) -> GgStatus {
    guard(|| {
        let m = get(model, "model")?;
        let grid = slice(temperatures, n, "temperatures")?;
        let curve = lift(saturation_scan(&m.params, grid, &m.opts))?;
        put(out, Box::into_raw(Box::new(GgCurve { curve })), "out")
    })
}

/// # Safety
/// `curve` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gg_curve_len(curve: *const GgCurve, out: *mut usize) -> GgStatus {
    guard(|| {
        let c = get(curve, "curve")?;
        put(out, c.curve.len(), "out")
    })
}

/// # Safety
/// `curve` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gg_curve_point(curve: *const GgCurve, index: usize, out: *mut GgCoexistence) -> GgStatus {
    guard(|| {
        let c = &get(curve, "curve")?.curve;
        if index >= c.len() {
            set_error(&format!("index {index} outside a curve of {} nodes", c.len()));
            return Err(GgStatus::OutOfRange);
        }
        let rec = coexistence_record(&c.points[index], c.p_second[index], c.mu_second[index]);
        put(out, rec, "out")
    })
}

/// Point of the edge of regression at any `t` inside the curve's range.
///
/// # Safety
/// `curve` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gg_curve_edge_point(curve: *const GgCurve, t: f64, out: *mut GgEdgePoint) -> GgStatus {
    guard(|| {
        let c = get(curve, "curve")?;
        let e = lift(edge_point(&c.curve, t, P_SECOND_FLOOR))?;
        put(out, GgEdgePoint { t: e.t, s: e.s, v: e.v, e: e.e }, "out")
    })
}

/// # Safety
/// `curve` must come from [`gg_curve_scan`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gg_curve_free(curve: *mut GgCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Fits `|value| = A tau^p` over `tau` in `[lo, hi]`.
///
/// # Safety
/// `tau` and `values` must each hold `n` values; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gg_fit_power_law(
    tau: *const f64,
    values: *const f64,
    n: usize,
    lo: f64,
    hi: f64,
    out: *mut GgExponent,
) -> GgStatus {
    guard(|| {
        let series = ScalingSeries {
            label: "series".into(),
            tau: slice(tau, n, "tau")?.to_vec(),
            values: slice(values, n, "values")?.to_vec(),
        };
        let est = lift(fit_power_law(&series, (lo, hi)))?;
        put(
            out,
            GgExponent { exponent: est.exponent, stderr: est.stderr, r_squared: est.r_squared, n: est.n },
            "out",
        )
    })
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn gg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn gg_status_name(status: GgStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        GgStatus::Ok => b"ok\0",
        GgStatus::NullPointer => b"null_pointer\0",
        GgStatus::InvalidArgument => b"invalid_argument\0",
        GgStatus::Domain => b"domain\0",
        GgStatus::NoConvergence => b"no_convergence\0",
        GgStatus::SingularEdge => b"singular_edge\0",
        GgStatus::OutOfRange => b"out_of_range\0",
        GgStatus::Panic => b"panic\0",
    };
    s.as_ptr().cast()
}
