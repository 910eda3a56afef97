//! The rolling double-tangent plane, its ruling lines and the edge of
//! regression.
//!
//! For each temperature the plane `-T S + P V + E - mu = 0` touches the
//! surface at both coexisting points. Differentiating it once in `T` gives
//! `-S + P' V - mu' = 0`, twice gives `P'' V - mu'' = 0`; the first two
//! intersect in the ruling line, all three in the edge of regression.

use nalgebra::Vector3;

use crate::coexistence::{
    local_second_derivatives, solve_coexistence, solve_coexistence_from, Branch, CoexistencePoint, CurveSample,
    SaturationCurve, SolverOptions,
};
use crate::eos::EosParams;
use crate::error::{Error, Result};
use crate::stencil;

/// Default `|P''|` below which the edge is reported singular.
pub const P_SECOND_FLOOR: f64 = 1e-10;

/// `normal . x + offset = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub normal: Vector3<f64>,
    pub offset: f64,
}

impl Plane {
    pub fn residual(&self, x: &Vector3<f64>) -> f64 {
        self.normal.dot(x) + self.offset
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentPlane {
    pub t: f64,
    pub plane: Plane,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RulingLine {
    pub anchor: Vector3<f64>,
    /// `(P', 1, -P + T P')`.
    pub direction: Vector3<f64>,
}

impl RulingLine {
    /// Distance from `x` to the line.
    pub fn distance(&self, x: &Vector3<f64>) -> f64 {
        (x - self.anchor).cross(&self.direction).norm() / self.direction.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePoint {
    pub t: f64,
    pub s: f64,
    pub v: f64,
    pub e: f64,
}

impl EdgePoint {
    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.s, self.v, self.e)
    }
}

fn position(state: &crate::eos::ThermoState) -> Vector3<f64> {
    Vector3::new(state.s, state.v, state.u)
}

/// `0 = -T S + P(T) V + E - mu(T)`.
pub fn tangent_plane_at(sample: &CurveSample) -> TangentPlane {
    TangentPlane {
        t: sample.t,
        plane: Plane {
            normal: Vector3::new(-sample.t, sample.p, 1.0),
            offset: -sample.mu,
        },
    }
}

pub fn tangent_plane(curve: &SaturationCurve, t: f64) -> Result<TangentPlane> {
    Ok(tangent_plane_at(&curve.sample(t)?))
}

/// `0 = -S + P'(T) V - mu'(T)`.
pub fn derivative_plane(point: &CoexistencePoint) -> Plane {
    Plane {
        normal: Vector3::new(-1.0, point.dp_dt, 0.0),
        offset: -point.dmu_dt,
    }
}

fn derivative_plane_at(sample: &CurveSample) -> Plane {
    Plane {
        normal: Vector3::new(-1.0, sample.dp, 0.0),
        offset: -sample.dmu,
    }
}

/// `0 = P''(T) V - mu''(T)`.
pub fn second_derivative_plane(sample: &CurveSample) -> Plane {
    Plane {
        normal: Vector3::new(0.0, sample.d2p, 0.0),
        offset: -sample.d2mu,
    }
}

pub fn ruling_direction(t: f64, p: f64, dp: f64) -> Vector3<f64> {
    Vector3::new(dp, 1.0, -p + t * dp)
}

/// Point of the ruling family at `V = 0`: `(-mu', 0, -T mu' + mu)`.
fn ruling_base(sample: &CurveSample) -> Vector3<f64> {
    Vector3::new(-sample.dmu, 0.0, -sample.t * sample.dmu + sample.mu)
}

pub fn edge_point_at(sample: &CurveSample, floor: f64) -> Result<EdgePoint> {
    if !(sample.d2p.abs() > floor) {
        return Err(Error::SingularEdge {
            t: sample.t,
            p_second: sample.d2p.abs(),
        });
    }
    let v = sample.d2mu / sample.d2p;
    let x = ruling_base(sample) + ruling_direction(sample.t, sample.p, sample.dp) * v;
    Ok(EdgePoint {
        t: sample.t,
        s: x[0],
        v,
        e: x[2],
    })
}

pub fn edge_point(curve: &SaturationCurve, t: f64, floor: f64) -> Result<EdgePoint> {
    edge_point_at(&curve.sample(t)?, floor)
}

pub fn ruling_line(curve: &SaturationCurve, t: f64, floor: f64) -> Result<RulingLine> {
    let sample = curve.sample(t)?;
    let edge = edge_point_at(&sample, floor)?;
    Ok(RulingLine {
        anchor: edge.position(),
        direction: ruling_direction(sample.t, sample.p, sample.dp),
    })
}

/// Coexistence point at `t`: the stored node, or a fresh solve inside the
/// grid range.
fn point_at(curve: &SaturationCurve, t: f64) -> Result<CoexistencePoint> {
    if let Some(i) = curve.node_index(t) {
        return Ok(curve.points[i]);
    }
    let (lo, hi) = curve.t_range();
    if !(t > lo && t < hi) {
        return Err(Error::OutOfRange { t, lo, hi });
    }
    let opts = SolverOptions {
        t_min: lo,
        ..SolverOptions::default()
    };
    crate::coexistence::solve_coexistence(&curve.params, t, &opts)
}

/// `(-mu', 0, -T mu' + mu) + V_A (P', 1, -P + T P')`.
pub fn reconstruct_branch(curve: &SaturationCurve, t: f64, branch: Branch) -> Result<Vector3<f64>> {
    let pt = point_at(curve, t)?;
    Ok(reconstruct_from_point(&pt, branch))
}

fn reconstruct_from_point(pt: &CoexistencePoint, branch: Branch) -> Vector3<f64> {
    let base = Vector3::new(-pt.dmu_dt, 0.0, -pt.t * pt.dmu_dt + pt.mu_sat);
    base + ruling_direction(pt.t, pt.p_sat, pt.dp_dt) * pt.state(branch).v
}

/// The two terms of `(1/V'_A)(dS/dT)_V - (dP/dV)_T V'_A`.
pub fn tangent_coefficient_terms(curve: &SaturationCurve, pt: &CoexistencePoint, branch: Branch) -> Result<(f64, f64)> {
    let dv = pt.dv_dt(branch);
    if dv == 0.0 || !dv.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "branch volume slope V'_{} vanishes at T = {}",
            branch.tag(),
            pt.t
        )));
    }
    let d = curve.params.derivative_bundle(pt.state(branch));
    Ok((d.ds_dt_v / dv, -d.dp_dv_t * dv))
}

/// Max-norm of
/// `(S'/V', 1, U'/V') - [coef (1, 0, T) + (P', 1, -P + T P')]`.
pub fn tangent_identity_residual(curve: &SaturationCurve, t: f64, branch: Branch) -> Result<f64> {
    let pt = point_at(curve, t)?;
    let (a, b) = tangent_coefficient_terms(curve, &pt, branch)?;
    let dv = pt.dv_dt(branch);
    let lhs = Vector3::new(pt.ds_dt(branch) / dv, 1.0, pt.du_dt(branch) / dv);
    let rhs = Vector3::new(1.0, 0.0, pt.t) * (a + b) + ruling_direction(pt.t, pt.p_sat, pt.dp_dt);
    Ok((lhs - rhs).amax())
}

/// Checks of the plane family and edge at one grid node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeNodeReport {
    pub t: f64,
    pub edge: Option<EdgePoint>,
    /// Largest of the three plane residuals at the edge point.
    pub plane_residual: f64,
    /// `|(X - L) x (G - L)| / (|X - L| |G - L|)` for the edge point `X`.
    pub collinearity: f64,
    pub reconstruction_liquid: f64,
    pub reconstruction_vapor: f64,
    pub tangent_identity_liquid: f64,
    pub tangent_identity_vapor: f64,
    /// Both coexistence points on the tangent and derivative planes.
    pub tangency_residual: f64,
}

pub fn node_report(curve: &SaturationCurve, i: usize, floor: f64) -> Result<EdgeNodeReport> {
    let pt = &curve.points[i];
    let sample = curve.node_sample(i);
    let plane1 = tangent_plane_at(&sample).plane;
    let plane2 = derivative_plane_at(&sample);
    let plane3 = second_derivative_plane(&sample);
    let (xl, xg) = (position(&pt.liquid), position(&pt.vapor));

    let tangency_residual = [plane1.residual(&xl), plane1.residual(&xg), plane2.residual(&xl), plane2.residual(&xg)]
        .iter()
        .fold(0.0f64, |m, r| m.max(r.abs()));

    let recon = |b: Branch, x: &Vector3<f64>| (reconstruct_from_point(pt, b) - x).amax();
    let ident = |b: Branch| tangent_identity_residual(curve, pt.t, b);

    let (edge, plane_residual, collinearity) = match edge_point_at(&sample, floor) {
        Ok(edge) => {
            let x = edge.position();
            let planes = [plane1.residual(&x), plane2.residual(&x), plane3.residual(&x)]
                .iter()
                .fold(0.0f64, |m, r| m.max(r.abs()));
            let (a, b) = (x - xl, xg - xl);
            let col = a.cross(&b).norm() / (a.norm() * b.norm());
            (Some(edge), planes, col)
        }
        Err(Error::SingularEdge { .. }) => (None, f64::NAN, f64::NAN),
        Err(e) => return Err(e),
    };

    Ok(EdgeNodeReport {
        t: pt.t,
        edge,
        plane_residual,
        collinearity,
        reconstruction_liquid: recon(Branch::Liquid, &xl),
        reconstruction_vapor: recon(Branch::Vapor, &xg),
        tangent_identity_liquid: ident(Branch::Liquid)?,
        tangent_identity_vapor: ident(Branch::Vapor)?,
        tangency_residual,
    })
}

/// Angle between the edge curve differenced over the grid and the ruling
/// direction at each node; coarse grids limit its accuracy. `None` where the stencil touches a singular edge.
pub fn edge_tangent_angles(curve: &SaturationCurve, floor: f64) -> Vec<Option<f64>> {
    let n = curve.len();
    let edges: Vec<Option<Vector3<f64>>> = (0..n)
        .map(|i| edge_point_at(&curve.node_sample(i), floor).ok().map(|e| e.position()))
        .collect();
    let x: Vec<f64> = curve.points.iter().map(|p| (1.0 - p.t).ln()).collect();
    (0..n)
        .map(|i| {
            let w = stencil::five_point_window(i, n);
            let pts: Option<Vec<Vector3<f64>>> = edges[w.clone()].iter().copied().collect();
            let pts = pts?;
            let weights = stencil::fornberg_weights(x[i], &x[w], 1);
            let tangent = pts
                .iter()
                .zip(&weights[1])
                .fold(Vector3::zeros(), |acc, (p, c)| acc + p * *c);
            let pt = &curve.points[i];
            let dir = ruling_direction(pt.t, pt.p_sat, pt.dp_dt);
            Some(tangent.cross(&dir).norm().atan2(tangent.dot(&dir).abs()))
        })
        .collect()
}

/// Angle between the edge tangent and the ruling direction at a solved
/// point, the tangent taken by a five-point difference of edge points at
/// `T + k h`, each with locally refined second derivatives.
pub fn edge_tangent_angle(
    params: &EosParams,
    point: &CoexistencePoint,
    opts: &SolverOptions,
    floor: f64,
) -> Result<f64> {
    let h = 0.5 * (1e-3f64).min(0.125 * (1.0 - point.t));
    let local = SolverOptions {
        t_min: opts.t_min.min(point.t - 3.0 * h),
        ..*opts
    };
    let guess = (point.liquid.v, point.vapor.v);
    let edge_at = |k: f64| -> Result<Vector3<f64>> {
        let t = point.t + k * h;
        let pt = solve_coexistence_from(params, t, guess, &local)
            .or_else(|_| solve_coexistence(params, t, &local))?;
        let (d2p, d2mu) = local_second_derivatives(params, &pt, &local)?;
        let sample = CurveSample {
            t,
            p: pt.p_sat,
            mu: pt.mu_sat,
            dp: pt.dp_dt,
            dmu: pt.dmu_dt,
            d2p,
            d2mu,
            node: None,
        };
        Ok(edge_point_at(&sample, floor)?.position())
    };
    let tangent = (edge_at(-2.0)? - edge_at(-1.0)? * 8.0 + edge_at(1.0)? * 8.0 - edge_at(2.0)?) / (12.0 * h);
    let dir = ruling_direction(point.t, point.p_sat, point.dp_dt);
    Ok(tangent.cross(&dir).norm().atan2(tangent.dot(&dir).abs()))
}
