//! Checks against references built independently of the library: finite
//! differences of the equation of state, an equal-area quadrature, and
//! coexistence values computed offline at 50 digits.

#![allow(clippy::excessive_precision)]

use approx::assert_relative_eq;
use proptest::prelude::*;

use gibbsgeo::coexistence::{saturation_scan, solve_coexistence, spinodal, SolverOptions};
use gibbsgeo::critical::{fit_power_law, ScalingSeries};
use gibbsgeo::eos::{EosParams, Partial};
use gibbsgeo::geometry::SurfacePoint;

const A: f64 = 9.0 / 8.0;
const B: f64 = 1.0 / 3.0;
const C: f64 = 1.5;

fn p_tv(t: f64, v: f64) -> f64 {
    t / (v - B) - A / (v * v)
}

fn s_tv(t: f64, v: f64) -> f64 {
    C * t.ln() + (v - B).ln()
}

fn t_sv(s: f64, v: f64) -> f64 {
    ((s - (v - B).ln()) / C).exp()
}

fn p_sv(s: f64, v: f64) -> f64 {
    p_tv(t_sv(s, v), v)
}

/// Central difference at steps `h` and `h/2`, Richardson-combined.
fn richardson(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// `V` on the isobar `p` at temperature `t`, by Newton from `v0`.
fn v_tp(t: f64, p: f64, v0: f64) -> f64 {
    let mut v = v0;
    for _ in 0..100 {
        let f = p_tv(t, v) - p;
        let df = -t / (v - B).powi(2) + 2.0 * A / v.powi(3);
        let step = f / df;
        v -= step;
        if step.abs() <= 1e-15 * v {
            break;
        }
    }
    v
}

fn fd_checks(t: f64, v: f64) {
    let params = EosParams::default();
    let st = params.state_from_tv(t, v).unwrap();
    let d = params.derivative_bundle(&st);
    let h = 1e-5;
    let s = st.s;
    let rel = 1e-7;
    assert_relative_eq!(d.dp_dv_t, richardson(|x| p_tv(t, x), v, h), max_relative = rel);
    assert_relative_eq!(d.dp_dt_v, richardson(|x| p_tv(x, v), t, h), max_relative = rel);
    assert_relative_eq!(d.ds_dt_v, richardson(|x| s_tv(x, v), t, h), max_relative = rel);
    assert_relative_eq!(d.ds_dv_t, richardson(|x| s_tv(t, x), v, h), max_relative = rel);
    assert_relative_eq!(d.dt_ds_v, richardson(|x| t_sv(x, v), s, h), max_relative = rel);
    assert_relative_eq!(d.dt_dv_s, richardson(|x| t_sv(s, x), v, h), max_relative = rel);
    assert_relative_eq!(d.dp_ds_v, richardson(|x| p_sv(x, v), s, h), max_relative = rel);
    assert_relative_eq!(d.dp_dv_s, richardson(|x| p_sv(s, x), v, h), max_relative = rel);

    // isobaric responses through the inverted equation of state
    let p = st.p;
    let dv_dt_p = richardson(|x| v_tp(x, p, v), t, h);
    assert_relative_eq!(d.partial(Partial::DvDtP), dv_dt_p, max_relative = rel);
    let ds_dt_p = richardson(|x| s_tv(x, v_tp(x, p, v)), t, h);
    assert_relative_eq!(d.partial(Partial::DsDtP), ds_dt_p, max_relative = rel);
    // isentropic pressure-temperature slope, along V(T) at fixed S
    let v_ts = |x: f64| B + (s - C * x.ln()).exp();
    let dp_dt_s = richardson(|x| p_tv(x, v_ts(x)), t, h);
    assert_relative_eq!(d.partial(Partial::DpDtS), dp_dt_s, max_relative = rel);
}

#[test]
fn partials_match_finite_differences() {
    for (t, v) in [(0.9, 3.0), (0.9, 0.5), (1.2, 1.0), (0.7, 0.45), (1.5, 8.0), (0.99, 2.0)] {
        fd_checks(t, v);
    }
}

#[test]
fn stable_vapor_at_reference_state() {
    let h = 1e-6;
    assert!(richardson(|x| p_tv(0.9, x), 3.0, h) < 0.0);
    let d = EosParams::default().derivative_bundle(&EosParams::default().state_from_tv(0.9, 3.0).unwrap());
    assert!(d.dp_dv_t < 0.0);
}

/// Adaptive Simpson quadrature.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rule(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (f(a) + 4.0 * fm + f(b)), fm)
    }
    fn go(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (left, _) = rule(f, a, m);
        let (right, _) = rule(f, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        go(f, a, m, left, 0.5 * tol, depth - 1) + go(f, m, b, right, 0.5 * tol, depth - 1)
    }
    let (whole, _) = rule(f, a, b);
    go(f, a, b, whole, tol, 40)
}

#[test]
fn equal_areas() {
    let params = EosParams::default();
    for t in [0.55, 0.7, 0.85, 0.9, 0.97, 0.995] {
        let pt = solve_coexistence(&params, t, &SolverOptions::default()).unwrap();
        let (vl, vg) = (pt.liquid.v, pt.vapor.v);
        let area = simpson(&|v| p_tv(t, v), vl, vg, 1e-14);
        let rect = pt.p_sat * (vg - vl);
        assert!(((area - rect) / rect).abs() <= 1e-10, "T = {t}: {area} vs {rect}");
    }
}

#[test]
fn frozen_high_precision_coexistence() {
    let params = EosParams::default();
    let opts = SolverOptions::default();
    // (T, V_L, V_G, P_sat, mu)
    let table = [
        (0.9, 0.60340190317800295001, 2.3488423762022276877, 0.24262438195209418276, 0.95237917232241023662),
        (0.5, 0.40675340812887738032, 45.983761809313556674, 0.010420760641203854758, -0.18592549397849649713),
        (0.99, 0.83091406147160748263, 1.242953310124908823, 0.3601796478352609037, 1.1362899445026416219),
    ];
    for (t, vl, vg, p, mu) in table {
        let pt = solve_coexistence(&params, t, &opts).unwrap();
        assert_relative_eq!(pt.liquid.v, vl, max_relative = 1e-11);
        assert_relative_eq!(pt.vapor.v, vg, max_relative = 1e-11);
        assert_relative_eq!(pt.p_sat, p, max_relative = 1e-11);
        assert_relative_eq!(pt.mu_sat, mu, max_relative = 1e-11);
    }
    assert_relative_eq!(params.pressure(0.9, 0.6034), 0.24262837477130193149, max_relative = 1e-14);
    let (l, g) = spinodal(&params, 0.9).unwrap();
    assert_relative_eq!(l, 0.71859718895325338381, max_relative = 1e-12);
    assert_relative_eq!(g, 1.528504964267177867, max_relative = 1e-12);
}

#[test]
fn gap_matches_critical_asymptote() {
    // V_G - V_L ~ 4 tau^(1/2) as tau -> 0
    let params = EosParams::default();
    for tau in [1e-4, 1e-5] {
        let pt = solve_coexistence(&params, 1.0 - tau, &SolverOptions::default()).unwrap();
        let ratio = pt.gap() / (4.0 * f64::sqrt(tau));
        assert!((ratio - 1.0).abs() < 10.0 * tau.sqrt(), "tau {tau}: {ratio}");
    }
}

#[test]
fn saturation_slope_matches_grid_differences() {
    // P' from the construction against a difference of P_sat on a halved grid
    let params = EosParams::default();
    let grid: Vec<f64> = (0..41).map(|i| 0.8 + 0.0025 * i as f64).collect();
    let curve = saturation_scan(&params, &grid, &SolverOptions::default()).unwrap();
    let h = 0.0025;
    for i in 2..grid.len() - 2 {
        let p = |k: usize| curve.points[k].p_sat;
        let fd = (p(i - 2) - 8.0 * p(i - 1) + 8.0 * p(i + 1) - p(i + 2)) / (12.0 * h);
        assert_relative_eq!(curve.points[i].dp_dt, fd, max_relative = 1e-8);
    }
}

#[test]
fn second_derivatives_converge_with_step() {
    // P'' against a wide-stencil second difference of P_sat
    let params = EosParams::default();
    let grid: Vec<f64> = (0..9).map(|i| 0.85 + 0.01 * i as f64).collect();
    let curve = saturation_scan(&params, &grid, &SolverOptions::default()).unwrap();
    for i in 2..7 {
        let p = |k: usize| curve.points[k].p_sat;
        let h = 0.01;
        let fd = (-p(i - 2) + 16.0 * p(i - 1) - 30.0 * p(i) + 16.0 * p(i + 1) - p(i + 2)) / (12.0 * h * h);
        assert_relative_eq!(curve.p_second[i], fd, max_relative = 1e-5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn curvature_paths_agree(t in 0.5f64..2.0, lv in (0.4f64).ln()..(20f64).ln()) {
        let params = EosParams::default();
        let st = params.state_from_tv(t, lv.exp()).unwrap();
        let sp = SurfacePoint::new(&params, st).unwrap();
        prop_assume!(sp.bundle.dp_dv_t < 0.0 && sp.forms.is_stable());
        let s = &sp.spectrum;
        let k = gibbsgeo::geometry::gaussian_curvature(&st, &sp.bundle);
        let h2 = 2.0 * gibbsgeo::geometry::mean_curvature(&st, &sp.bundle);
        prop_assert!(((s.lambda1 * s.lambda2 - k) / k).abs() <= 1e-10);
        prop_assert!(((s.lambda1 + s.lambda2 - h2) / h2).abs() <= 1e-10);
        prop_assert!(s.lambda1 > 0.0 && s.lambda1 <= s.lambda2);
    }

    #[test]
    fn sv_round_trip(t in 0.3f64..3.0, v in 0.35f64..50.0) {
        let params = EosParams::default();
        let a = params.state_from_tv(t, v).unwrap();
        let b = params.state_from_sv(a.s, a.v).unwrap();
        prop_assert!((a.t - b.t).abs() <= 1e-13 * t);
        prop_assert!((a.u - b.u).abs() <= 1e-12 * (1.0 + a.u.abs()));
    }

    #[test]
    fn coexistence_invariants(t in 0.5f64..0.9999) {
        let params = EosParams::default();
        let pt = solve_coexistence(&params, t, &SolverOptions::default()).unwrap();
        let (l, g) = spinodal(&params, t).unwrap();
        prop_assert!(pt.liquid.v < l && l < 1.0 && 1.0 < g && g < pt.vapor.v);
        prop_assert!(((pt.liquid.p - pt.vapor.p) / pt.p_sat).abs() <= 1e-11);
        prop_assert!(pt.dp_dt > 0.0);
        prop_assert!(pt.dv_dt_liquid > 0.0 && pt.dv_dt_vapor < 0.0);
    }

    #[test]
    fn power_law_fit_recovers_exponent(p in -2.0f64..2.0, scale in 0.01f64..100.0, neg in any::<bool>()) {
        let tau: Vec<f64> = (0..20).map(|i| 1e-2 * 0.8f64.powi(i)).collect();
        let sign = if neg { -1.0 } else { 1.0 };
        let series = ScalingSeries {
            label: "synthetic".into(),
            values: tau.iter().map(|t| sign * scale * t.powf(p)).collect(),
            tau: tau.clone(),
        };
        let est = fit_power_law(&series, (tau[19], tau[0])).unwrap();
        prop_assert!((est.exponent - p).abs() <= 1e-10);
        prop_assert!(est.stderr <= 1e-10);
    }
}
