//! Two-phase equilibrium along the saturation curve.
//!
//! At fixed temperature the unknowns are the liquid and vapor volumes. A
//! bracketed iteration in pressure (the Maxwell construction written as
//! `mu_G(p) - mu_L(p) = 0`, whose slope is `V_G - V_L`) supplies a start
//! that is then polished by a 2x2 Newton iteration with the analytic
//! Jacobian. First temperature derivatives are attached in closed form;
//! second derivatives along a grid come from finite differences.

use rayon::prelude::*;

use crate::eos::{EosParams, ThermoState, COVOLUME};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Liquid,
    Vapor,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Liquid, Branch::Vapor];

    pub fn tag(self) -> &'static str {
        match self {
            Branch::Liquid => "L",
            Branch::Vapor => "G",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Lowest temperature accepted by the solver.
    pub t_min: f64,
    pub max_iter: usize,
    /// Bound on `|P_L - P_G|` and `|mu_L - mu_G|` at convergence.
    pub tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            t_min: 0.5,
            max_iter: 100,
            tol: 1e-12,
        }
    }
}

/// A converged liquid/vapor pair with exact first derivatives along the
/// saturation curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoexistencePoint {
    pub t: f64,
    pub p_sat: f64,
    pub mu_sat: f64,
    pub liquid: ThermoState,
    pub vapor: ThermoState,
    pub dv_dt_liquid: f64,
    pub dv_dt_vapor: f64,
    pub ds_dt_liquid: f64,
    pub ds_dt_vapor: f64,
    /// Clausius-Clapeyron slope `(S_G - S_L)/(V_G - V_L)`.
    pub dp_dt: f64,
    /// Gibbs-Duhem slope `-S_G + V_G P'`.
    pub dmu_dt: f64,
}

impl CoexistencePoint {
    pub fn state(&self, branch: Branch) -> &ThermoState {
        match branch {
            Branch::Liquid => &self.liquid,
            Branch::Vapor => &self.vapor,
        }
    }

    pub fn dv_dt(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Liquid => self.dv_dt_liquid,
            Branch::Vapor => self.dv_dt_vapor,
        }
    }

    pub fn ds_dt(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Liquid => self.ds_dt_liquid,
            Branch::Vapor => self.ds_dt_vapor,
        }
    }

    /// `U'_A = T S'_A - P V'_A`, the Gibbs relation along the branch.
    pub fn du_dt(&self, branch: Branch) -> f64 {
        self.t * self.ds_dt(branch) - self.p_sat * self.dv_dt(branch)
    }

    /// `V_G - V_L`.
    pub fn gap(&self) -> f64 {
        self.vapor.v - self.liquid.v
    }

    /// `(T, -P, -1) . (dS, dV, dU)` over the sum of the term magnitudes.
    pub fn orthogonality_residual(&self) -> f64 {
        let ds = self.vapor.s - self.liquid.s;
        let dv = self.gap();
        let du = self.vapor.u - self.liquid.u;
        let terms = [self.t * ds, -self.p_sat * dv, -du];
        let scale: f64 = terms.iter().map(|x| x.abs()).sum();
        terms.iter().sum::<f64>() / scale
    }

    /// Gibbs-Duhem `mu' = -S_A + V_A P'` evaluated on both branches.
    pub fn gibbs_duhem_residual(&self) -> f64 {
        let on = |st: &ThermoState| -st.s + st.v * self.dp_dt;
        let (l, g) = (on(&self.liquid), on(&self.vapor));
        let scale = [self.liquid.s, self.vapor.s, self.vapor.v * self.dp_dt, self.liquid.v * self.dp_dt]
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()));
        (l - g) / scale
    }

    /// `(-P + T P') - (U_G - U_L)/(V_G - V_L)`, relative.
    pub fn energy_slope_residual(&self) -> f64 {
        let lhs = -self.p_sat + self.t * self.dp_dt;
        let rhs = (self.vapor.u - self.liquid.u) / self.gap();
        (lhs - rhs) / rhs.abs()
    }
}

/// Safeguarded Newton on a bracket where `f(lo)` and `f(hi)` have opposite
/// signs (`sign_lo` gives the sign at `lo`). `f` returns value and slope.
fn bracketed_newton(
    f: impl Fn(f64) -> (f64, f64),
    mut lo: f64,
    mut hi: f64,
    sign_lo: f64,
    start: f64,
) -> Option<f64> {
    let mut x = start.clamp(lo, hi);
    for _ in 0..300 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Some(x);
        }
        if fx.signum() == sign_lo {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs() || hi - lo <= 4.0 * f64::EPSILON * x.abs() {
            return Some(next);
        }
        x = next;
    }
    None
}

fn check_subcritical(t: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0 && t < 1.0) {
        return Err(Error::domain(format!(
            "coexistence requires 0 < T < 1, got {t}"
        )));
    }
    Ok(())
}

/// Volumes where `(dP/dV)_T = 0` on the isotherm `t`, liquid side first.
pub fn spinodal(params: &EosParams, t: f64) -> Result<(f64, f64)> {
    check_subcritical(t)?;
    let a2 = 2.0 * crate::eos::ATTRACTION;
    // sign((dP/dV)_T) = sign(h), h(b) < 0, h(1) = 1 - T > 0, h(2a/T + 1) < 0
    let h = |v: f64| {
        let x = v - COVOLUME;
        (a2 * x * x - t * v * v * v, 2.0 * a2 * x - 3.0 * t * v * v)
    };
    let none = || Error::NoConvergence {
        t,
        detail: "spinodal root search failed".into(),
    };
    let liquid = bracketed_newton(h, COVOLUME, 1.0, -1.0, 0.5 * (COVOLUME + 1.0)).ok_or_else(none)?;
    let hi = a2 / t + 1.0;
    let vapor = bracketed_newton(h, 1.0, hi, 1.0, 1.5).ok_or_else(none)?;
    debug_assert!(params.dp_dv_t(t, liquid).abs() < 1e-8);
    Ok((liquid, vapor))
}

/// Liquid-side volume with `P(t, V) = p` on `(1/3, v_spinodal)`.
fn liquid_volume(params: &EosParams, t: f64, p: f64, v_sp: f64) -> Option<f64> {
    let f = |v: f64| (params.pressure(t, v) - p, params.dp_dv_t(t, v));
    let mut lo = COVOLUME + 1e-3 * (v_sp - COVOLUME);
    while params.pressure(t, lo) <= p {
        lo = COVOLUME + (lo - COVOLUME) * 0.01;
        if lo - COVOLUME < 1e-300 {
            return None;
        }
    }
    bracketed_newton(f, lo, v_sp, 1.0, 0.5 * (lo + v_sp))
}

/// Vapor-side volume with `P(t, V) = p` on `(v_spinodal, inf)`.
fn vapor_volume(params: &EosParams, t: f64, p: f64, v_sp: f64) -> Option<f64> {
    let f = |v: f64| (params.pressure(t, v) - p, params.dp_dv_t(t, v));
    let mut hi = 2.0 * v_sp;
    while params.pressure(t, hi) >= p {
        hi *= 2.0;
        if !hi.is_finite() {
            return None;
        }
    }
    bracketed_newton(f, v_sp, hi, 1.0, (t / p).clamp(v_sp, hi))
}

/// Maxwell construction by safeguarded Newton in pressure.
fn pressure_iteration(params: &EosParams, t: f64, spin: (f64, f64)) -> Result<(f64, f64)> {
    let p_min = params.pressure(t, spin.0);
    let p_max = params.pressure(t, spin.1);
    let fail = |detail: &str| Error::NoConvergence {
        t,
        detail: detail.to_string(),
    };
    let mut lo = p_min.max(0.0);
    let mut hi = p_max;
    let mut p = params.pressure(t, 1.0).clamp(lo, hi);
    if p <= lo {
        p = 0.5 * (lo + hi);
    }
    for _ in 0..300 {
        let vl = liquid_volume(params, t, p, spin.0).ok_or_else(|| fail("liquid root"))?;
        let vg = vapor_volume(params, t, p, spin.1).ok_or_else(|| fail("vapor root"))?;
        let f = params.mu_volume_part(t, vg) - params.mu_volume_part(t, vl);
        if f == 0.0 {
            return Ok((vl, vg));
        }
        if f < 0.0 {
            lo = p;
        } else {
            hi = p;
        }
        let newton = p - f / (vg - vl);
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - p).abs() <= 2.0 * f64::EPSILON * p {
            return Ok((vl, vg));
        }
        p = next;
    }
    Err(fail("pressure iteration exhausted"))
}

/// Residuals `(P_L - P_G, mu_L - mu_G)`.
fn residuals(params: &EosParams, t: f64, vl: f64, vg: f64) -> [f64; 2] {
    [
        params.pressure(t, vl) - params.pressure(t, vg),
        params.mu_volume_part(t, vl) - params.mu_volume_part(t, vg),
    ]
}

/// Newton on the residuals divided by `V_G - V_L`, which removes the trivial
/// root `V_L = V_G`. Steps are damped to keep each volume on its own side of
/// the spinodal.
fn newton_polish(
    params: &EosParams,
    t: f64,
    start: (f64, f64),
    spin: (f64, f64),
    opts: &SolverOptions,
) -> Result<(f64, f64)> {
    let (mut vl, mut vg) = start;
    let inside = |vl: f64, vg: f64| vl > COVOLUME && vl < spin.0 && vg > spin.1 && vg.is_finite();
    if !inside(vl, vg) {
        return Err(Error::NoConvergence {
            t,
            detail: format!("start ({vl}, {vg}) not on the two branches"),
        });
    }
    for _ in 0..opts.max_iter {
        let f = residuals(params, t, vl, vg);
        let gap = vg - vl;
        let pl = params.dp_dv_t(t, vl);
        let pg = params.dp_dv_t(t, vg);
        // J_F = [[P_V(L), -P_V(G)], [V_L P_V(L), -V_G P_V(G)]]; d(gap) = (-1, 1)
        let j = [
            [(pl + f[0] / gap) / gap, (-pg - f[0] / gap) / gap],
            [(vl * pl + f[1] / gap) / gap, (-vg * pg - f[1] / gap) / gap],
        ];
        let g = [f[0] / gap, f[1] / gap];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let mut dl = -(g[0] * j[1][1] - g[1] * j[0][1]) / det;
        let mut dg = -(j[0][0] * g[1] - j[1][0] * g[0]) / det;
        if !(dl.is_finite() && dg.is_finite()) {
            break;
        }
        let mut halvings = 0;
        while !inside(vl + dl, vg + dg) {
            dl *= 0.5;
            dg *= 0.5;
            halvings += 1;
            if halvings > 60 {
                return Err(Error::NoConvergence {
                    t,
                    detail: "Newton step left the two-branch domain".into(),
                });
            }
        }
        vl += dl;
        vg += dg;
        if dl.abs().max(dg.abs()) <= 1e-15 * vg {
            break;
        }
    }
    let f = residuals(params, t, vl, vg);
    if f[0].abs() <= opts.tol && f[1].abs() <= opts.tol {
        Ok((vl, vg))
    } else {
        Err(Error::NoConvergence {
            t,
            detail: format!("residuals {:e}, {:e} above {:e}", f[0], f[1], opts.tol),
        })
    }
}

fn assemble(params: &EosParams, t: f64, vl: f64, vg: f64) -> Result<CoexistencePoint> {
    let liquid = params.state_from_tv(t, vl)?;
    let vapor = params.state_from_tv(t, vg)?;
    let dp_dt = (vapor.s - liquid.s) / (vapor.v - liquid.v);
    let branch = |st: &ThermoState| {
        let d = params.derivative_bundle(st);
        let dv = (dp_dt - d.dp_dt_v) / d.dp_dv_t;
        (dv, d.ds_dt_v + d.ds_dv_t * dv)
    };
    let (dv_dt_liquid, ds_dt_liquid) = branch(&liquid);
    let (dv_dt_vapor, ds_dt_vapor) = branch(&vapor);
    Ok(CoexistencePoint {
        t,
        p_sat: vapor.p,
        mu_sat: vapor.mu,
        liquid,
        vapor,
        dv_dt_liquid,
        dv_dt_vapor,
        ds_dt_liquid,
        ds_dt_vapor,
        dp_dt,
        dmu_dt: -vapor.s + vapor.v * dp_dt,
    })
}

fn check_range(t: f64, opts: &SolverOptions) -> Result<()> {
    check_subcritical(t)?;
    if t < opts.t_min {
        return Err(Error::domain(format!(
            "T = {t} below the configured minimum {}",
            opts.t_min
        )));
    }
    Ok(())
}

pub fn solve_coexistence(params: &EosParams, t: f64, opts: &SolverOptions) -> Result<CoexistencePoint> {
    check_range(t, opts)?;
    let spin = spinodal(params, t)?;
    let start = pressure_iteration(params, t, spin)?;
    let (vl, vg) = newton_polish(params, t, start, spin, opts)?;
    assemble(params, t, vl, vg)
}

/// Newton from a caller-supplied `(V_L, V_G)`, typically a neighbouring
/// solution.
pub fn solve_coexistence_from(
    params: &EosParams,
    t: f64,
    guess: (f64, f64),
    opts: &SolverOptions,
) -> Result<CoexistencePoint> {
    check_range(t, opts)?;
    let spin = spinodal(params, t)?;
    let (vl, vg) = newton_polish(params, t, guess, spin, opts)?;
    assemble(params, t, vl, vg)
}

/// Continuation from `from` to `t`: warm start, halving the temperature step
/// on failure, with a cold solve as the last resort.
fn continue_to(
    params: &EosParams,
    from: &CoexistencePoint,
    t: f64,
    opts: &SolverOptions,
    depth: u32,
) -> Result<CoexistencePoint> {
    let guess = (from.liquid.v, from.vapor.v);
    match solve_coexistence_from(params, t, guess, opts) {
        Ok(pt) => Ok(pt),
        Err(_) if depth < 8 => {
            let mid = continue_to(params, from, 0.5 * (from.t + t), opts, depth + 1)?;
            solve_coexistence_from(params, t, (mid.liquid.v, mid.vapor.v), opts)
                .or_else(|_| solve_coexistence(params, t, opts))
        }
        Err(_) => solve_coexistence(params, t, opts),
    }
}

/// Saturation data on an increasing temperature grid, with finite-difference
/// second derivatives of `P_sat` and `mu`.
#[derive(Debug, Clone)]
pub struct SaturationCurve {
    pub params: EosParams,
    pub points: Vec<CoexistencePoint>,
    pub p_second: Vec<f64>,
    pub mu_second: Vec<f64>,
}

/// Interpolated view of the curve at one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub t: f64,
    pub p: f64,
    pub mu: f64,
    pub dp: f64,
    pub dmu: f64,
    pub d2p: f64,
    pub d2mu: f64,
    /// Grid index when `t` is a node.
    pub node: Option<usize>,
}

fn validate_grid(grid: &[f64], opts: &SolverOptions) -> Result<()> {
    if grid.len() < 5 {
        return Err(Error::InvalidArgument(format!(
            "saturation grid needs at least 5 nodes, got {}",
            grid.len()
        )));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("temperature grid must be strictly increasing".into()));
    }
    let (first, last) = (grid[0], grid[grid.len() - 1]);
    if first < opts.t_min || !(last < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "temperature grid [{first}, {last}] must lie in [{}, 1)",
            opts.t_min
        )));
    }
    Ok(())
}

/// Half-width of the outer local stencil for second derivatives at `t`.
fn second_derivative_step(t: f64) -> f64 {
    (1e-3f64).min(0.125 * (1.0 - t))
}

/// `(P'', mu'')` at a solved point: five-point differences of the exact
/// `P'`, `mu'` from neighbouring solves at steps `h` and `h/2`, combined by
/// Richardson extrapolation.
pub fn local_second_derivatives(
    params: &EosParams,
    point: &CoexistencePoint,
    opts: &SolverOptions,
) -> Result<(f64, f64)> {
    let h = second_derivative_step(point.t);
    let local = SolverOptions {
        t_min: opts.t_min.min(point.t - 2.0 * h),
        ..*opts
    };
    let guess = (point.liquid.v, point.vapor.v);
    let at = |dt: f64| {
        let t = point.t + dt;
        solve_coexistence_from(params, t, guess, &local)
            .or_else(|_| solve_coexistence(params, t, &local))
            .map(|p| (p.dp_dt, p.dmu_dt))
    };
    // offsets -2h, -h, -h/2, h/2, h, 2h
    let mut p = [0.0; 6];
    let mut mu = [0.0; 6];
    for (i, k) in [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0].into_iter().enumerate() {
        (p[i], mu[i]) = at(k * h)?;
    }
    let richardson = |f: &[f64; 6]| {
        let coarse = (f[0] - 8.0 * f[1] + 8.0 * f[4] - f[5]) / (12.0 * h);
        let fine = (f[1] - 8.0 * f[2] + 8.0 * f[3] - f[4]) / (6.0 * h);
        (16.0 * fine - coarse) / 15.0
    };
    Ok((richardson(&p), richardson(&mu)))
}

impl SaturationCurve {
    fn from_points(params: EosParams, points: Vec<CoexistencePoint>, opts: &SolverOptions) -> Result<Self> {
        let seconds = points
            .par_iter()
            .enumerate()
            .map(|(index, pt)| {
                local_second_derivatives(&params, pt, opts).map_err(|e| Error::ScanNode {
                    index,
                    t: pt.t,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let (p_second, mu_second) = seconds.into_iter().unzip();
        Ok(Self {
            params,
            points,
            p_second,
            mu_second,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn temperatures(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.points[0].t, self.points[self.points.len() - 1].t)
    }

    pub fn node_index(&self, t: f64) -> Option<usize> {
        self.points
            .iter()
            .position(|p| (p.t - t).abs() <= 1e-12 * t.abs().max(1.0))
    }

    pub fn node_sample(&self, i: usize) -> CurveSample {
        let pt = &self.points[i];
        CurveSample {
            t: pt.t,
            p: pt.p_sat,
            mu: pt.mu_sat,
            dp: pt.dp_dt,
            dmu: pt.dmu_dt,
            d2p: self.p_second[i],
            d2mu: self.mu_second[i],
            node: Some(i),
        }
    }

    /// Exact values on grid nodes; between nodes, cubic Hermite interpolation
    /// of `(P, mu)` and `(P', mu')` from their derivatives, linear in the
    /// second derivatives.
    pub fn sample(&self, t: f64) -> Result<CurveSample> {
        let (lo, hi) = self.t_range();
        if let Some(i) = self.node_index(t) {
            return Ok(self.node_sample(i));
        }
        if !(t > lo && t < hi) {
            return Err(Error::OutOfRange { t, lo, hi });
        }
        let k = self.points.partition_point(|p| p.t < t) - 1;
        let (a, b) = (self.node_sample(k), self.node_sample(k + 1));
        let h = b.t - a.t;
        let s = (t - a.t) / h;
        let hermite = |y0: f64, y1: f64, d0: f64, d1: f64| {
            let s2 = s * s;
            let s3 = s2 * s;
            (2.0 * s3 - 3.0 * s2 + 1.0) * y0
                + (s3 - 2.0 * s2 + s) * h * d0
                + (-2.0 * s3 + 3.0 * s2) * y1
                + (s3 - s2) * h * d1
        };
        let lerp = |y0: f64, y1: f64| y0 + s * (y1 - y0);
        Ok(CurveSample {
            t,
            p: hermite(a.p, b.p, a.dp, b.dp),
            mu: hermite(a.mu, b.mu, a.dmu, b.dmu),
            dp: hermite(a.dp, b.dp, a.d2p, b.d2p),
            dmu: hermite(a.dmu, b.dmu, a.d2mu, b.d2mu),
            d2p: lerp(a.d2p, b.d2p),
            d2mu: lerp(a.d2mu, b.d2mu),
            node: None,
        })
    }

    /// Both sides of `mu'' - V_A P'' = -(dS/dT)_V + (dP/dV)_T (V'_A)^2` at a
    /// node: the left side from the numerical second derivatives, the right
    /// side in closed form.
    pub fn second_order_gibbs_duhem(&self, i: usize, branch: Branch) -> (f64, f64) {
        let pt = &self.points[i];
        let st = pt.state(branch);
        let d = self.params.derivative_bundle(st);
        let lhs = self.mu_second[i] - st.v * self.p_second[i];
        let dv = pt.dv_dt(branch);
        let rhs = -d.ds_dt_v + d.dp_dv_t * dv * dv;
        (lhs, rhs)
    }
}

/// Sequential scan with warm starts from the previous node.
pub fn saturation_scan(params: &EosParams, grid: &[f64], opts: &SolverOptions) -> Result<SaturationCurve> {
    validate_grid(grid, opts)?;
    let mut points: Vec<CoexistencePoint> = Vec::with_capacity(grid.len());
    for (index, &t) in grid.iter().enumerate() {
        let solved = match points.last() {
            Some(prev) => continue_to(params, prev, t, opts, 0),
            None => solve_coexistence(params, t, opts),
        };
        let pt = solved.map_err(|e| Error::ScanNode {
            index,
            t,
            source: Box::new(e),
        })?;
        points.push(pt);
    }
    SaturationCurve::from_points(*params, points, opts)
}

/// Independent cold solves per node, evaluated in parallel.
pub fn saturation_scan_parallel(
    params: &EosParams,
    grid: &[f64],
    opts: &SolverOptions,
) -> Result<SaturationCurve> {
    validate_grid(grid, opts)?;
    let points = grid
        .par_iter()
        .enumerate()
        .map(|(index, &t)| {
            solve_coexistence(params, t, opts).map_err(|e| Error::ScanNode {
                index,
                t,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SaturationCurve::from_points(*params, points, opts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClausiusClapeyronResidual {
    /// `|P' - dS/dV| / |P'|` with `P'` as stored on the point.
    pub construction: f64,
    /// `|dP_sat/dT - dS/dV| / |P'|`, the slope taken by a five-point
    /// difference of independent solves.
    pub finite_difference: f64,
    pub step: f64,
}

pub fn clausius_clapeyron_residual(
    params: &EosParams,
    point: &CoexistencePoint,
    opts: &SolverOptions,
) -> Result<ClausiusClapeyronResidual> {
    let ratio = (point.vapor.s - point.liquid.s) / (point.vapor.v - point.liquid.v);
    let construction = (point.dp_dt - ratio).abs() / point.dp_dt.abs();

    let tau = 1.0 - point.t;
    let h = (1e-3f64).min(0.25 * tau);
    let local = SolverOptions {
        t_min: opts.t_min.min(point.t - 2.0 * h),
        ..*opts
    };
    let p_at = |k: f64| solve_coexistence(params, point.t + k * h, &local).map(|p| p.p_sat);
    let slope = (p_at(-2.0)? - 8.0 * p_at(-1.0)? + 8.0 * p_at(1.0)? - p_at(2.0)?) / (12.0 * h);
    Ok(ClausiusClapeyronResidual {
        construction,
        finite_difference: (slope - ratio).abs() / point.dp_dt.abs(),
        step: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn vdw() -> EosParams {
        EosParams::default()
    }

    #[test]
    fn spinodal_brackets_unity() {
        let (l, g) = spinodal(&vdw(), 0.9).unwrap();
        assert!(COVOLUME < l && l < 1.0 && 1.0 < g);
        assert!(vdw().dp_dv_t(0.9, l).abs() <= 1e-12);
        assert!(vdw().dp_dv_t(0.9, g).abs() <= 1e-12);
    }

    #[test]
    fn spinodal_closes_at_critical_point() {
        let (l, g) = spinodal(&vdw(), 1.0 - 1e-8).unwrap();
        assert!((l - 1.0).abs() < 1e-3 && (g - 1.0).abs() < 1e-3);
        assert!(spinodal(&vdw(), 1.0).is_err());
        assert!(spinodal(&vdw(), 1.2).is_err());
    }

    #[test]
    fn equal_t_p_mu() {
        let pt = solve_coexistence(&vdw(), 0.9, &SolverOptions::default()).unwrap();
        assert_eq!(pt.liquid.t, pt.vapor.t);
        assert!((pt.liquid.p - pt.vapor.p).abs() <= 1e-11);
        assert!((pt.liquid.mu - pt.vapor.mu).abs() <= 1e-11);
        assert!(pt.liquid.v < 1.0 && 1.0 < pt.vapor.v);
    }

    #[test]
    fn rejects_supercritical_and_cold() {
        let opts = SolverOptions::default();
        assert!(matches!(solve_coexistence(&vdw(), 1.0, &opts), Err(Error::Domain(_))));
        assert!(matches!(solve_coexistence(&vdw(), 0.3, &opts), Err(Error::Domain(_))));
        let cold = SolverOptions { t_min: 0.2, ..opts };
        assert!(solve_coexistence(&vdw(), 0.3, &cold).is_ok());
    }

    #[test]
    fn gibbs_duhem_on_both_branches() {
        let pt = solve_coexistence(&vdw(), 0.75, &SolverOptions::default()).unwrap();
        let l = -pt.liquid.s + pt.liquid.v * pt.dp_dt;
        let g = -pt.vapor.s + pt.vapor.v * pt.dp_dt;
        assert_relative_eq!(l, pt.dmu_dt, epsilon = 1e-11);
        assert_relative_eq!(g, pt.dmu_dt, epsilon = 1e-11);
    }

    #[test]
    fn warm_start_matches_cold() {
        let opts = SolverOptions::default();
        let a = solve_coexistence(&vdw(), 0.8, &opts).unwrap();
        let b = solve_coexistence_from(&vdw(), 0.81, (a.liquid.v, a.vapor.v), &opts).unwrap();
        let c = solve_coexistence(&vdw(), 0.81, &opts).unwrap();
        assert_relative_eq!(b.liquid.v, c.liquid.v, max_relative = 1e-12);
        assert_relative_eq!(b.vapor.v, c.vapor.v, max_relative = 1e-12);
    }

    #[test]
    fn bad_warm_start_is_rejected() {
        let opts = SolverOptions::default();
        let r = solve_coexistence_from(&vdw(), 0.9, (1.0, 1.0), &opts);
        assert!(matches!(r, Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn scan_grid_validation() {
        let opts = SolverOptions::default();
        assert!(saturation_scan(&vdw(), &[0.6, 0.7, 0.8, 0.9], &opts).is_err());
        assert!(saturation_scan(&vdw(), &[0.6, 0.7, 0.65, 0.8, 0.9], &opts).is_err());
        assert!(saturation_scan(&vdw(), &[0.6, 0.7, 0.8, 0.9, 1.0], &opts).is_err());
    }

    #[test]
    fn parallel_scan_agrees() {
        let opts = SolverOptions::default();
        let grid: Vec<f64> = (0..12).map(|i| 0.55 + 0.035 * i as f64).collect();
        let a = saturation_scan(&vdw(), &grid, &opts).unwrap();
        let b = saturation_scan_parallel(&vdw(), &grid, &opts).unwrap();
        for (x, y) in a.points.iter().zip(&b.points) {
            assert_relative_eq!(x.p_sat, y.p_sat, max_relative = 1e-12);
            assert_relative_eq!(x.vapor.v, y.vapor.v, max_relative = 1e-10);
        }
    }

    #[test]
    fn sample_interpolates_between_nodes() {
        let opts = SolverOptions::default();
        let grid: Vec<f64> = (0..21).map(|i| 0.6 + 0.015 * i as f64).collect();
        let curve = saturation_scan(&vdw(), &grid, &opts).unwrap();
        let t = 0.7321;
        let s = curve.sample(t).unwrap();
        let exact = solve_coexistence(&vdw(), t, &opts).unwrap();
        assert_relative_eq!(s.p, exact.p_sat, max_relative = 1e-8);
        assert_relative_eq!(s.mu, exact.mu_sat, max_relative = 1e-8);
        assert_relative_eq!(s.dp, exact.dp_dt, max_relative = 1e-5);
        assert!(matches!(curve.sample(0.95), Err(Error::OutOfRange { .. })));
        assert_eq!(curve.sample(grid[3]).unwrap().node, Some(3));
    }
}
