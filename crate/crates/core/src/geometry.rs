//! Differential geometry of the surface `E = U(S, V)` at a point.
//!
//! Tangent directions are written as coefficient pairs `(s, v)` in the basis
//! `e_S = (1, 0, T)`, `e_V = (0, 1, -P)`. The first form is the Gram matrix
//! of that basis; the second form carries the Hessian of `U(S, V)` scaled by
//! `1/sqrt(1 + T^2 + P^2)`.

use nalgebra::{Matrix2, Vector2, Vector3};

use crate::eos::{DerivativeBundle, EosParams, ThermoState};
use crate::error::{Error, Result};

/// Relative eigenvalue gap below which a point is treated as umbilic.
pub const UMBILIC_GAP: f64 = 1e-13;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentBasis {
    pub e_s: Vector3<f64>,
    pub e_v: Vector3<f64>,
}

impl TangentBasis {
    /// Maps coefficients `(s, v)` to the 3-vector `s e_S + v e_V`.
    pub fn embed(&self, coeffs: Vector2<f64>) -> Vector3<f64> {
        self.e_s * coeffs[0] + self.e_v * coeffs[1]
    }
}

/// Unit normal `g`, parallel to `(T, -P, -1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalVector(pub Vector3<f64>);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalForms {
    pub first: Matrix2<f64>,
    pub second: Matrix2<f64>,
}

impl FundamentalForms {
    /// Both principal curvatures positive (`B` positive-definite).
    pub fn is_stable(&self) -> bool {
        let b = &self.second;
        b[(0, 0)] > 0.0 && b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)] > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSpectrum {
    /// Minimal principal curvature.
    pub lambda1: f64,
    /// Maximal principal curvature.
    pub lambda2: f64,
    pub d1: Vector2<f64>,
    pub d2: Vector2<f64>,
    /// Set when the two curvatures coincide; `d1`, `d2` are then an arbitrary
    /// (but fixed) `A`-orthonormal pair.
    pub umbilic: bool,
}

impl CurvatureSpectrum {
    pub fn gaussian(&self) -> f64 {
        self.lambda1 * self.lambda2
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.lambda1 + self.lambda2)
    }

    /// `d1 cos(phi) + d2 sin(phi)`.
    pub fn direction_at(&self, phi: f64) -> Vector2<f64> {
        self.d1 * phi.cos() + self.d2 * phi.sin()
    }
}

pub fn tangent_basis(state: &ThermoState) -> TangentBasis {
    TangentBasis {
        e_s: Vector3::new(1.0, 0.0, state.t),
        e_v: Vector3::new(0.0, 1.0, -state.p),
    }
}

pub fn unit_normal(state: &ThermoState) -> NormalVector {
    let g = Vector3::new(state.t, -state.p, -1.0);
    NormalVector(g / g.norm())
}

/// `1 + T^2 + P^2`, the determinant of the first form.
fn metric_factor(state: &ThermoState) -> f64 {
    1.0 + state.t * state.t + state.p * state.p
}

pub fn fundamental_forms(state: &ThermoState, d: &DerivativeBundle) -> Result<FundamentalForms> {
    let (t, p) = (state.t, state.p);
    let first = Matrix2::new(1.0 + t * t, -t * p, -t * p, 1.0 + p * p);

    let upper = d.dt_dv_s;
    let lower = -d.dp_ds_v;
    if (upper - lower).abs() > SYMMETRY_TOL * upper.abs().max(lower.abs()).max(1.0) {
        return Err(Error::Asymmetric {
            dt_dv_s: upper,
            minus_dp_ds_v: lower,
        });
    }
    let off = 0.5 * (upper + lower);
    let scale = 1.0 / metric_factor(state).sqrt();
    let second = Matrix2::new(d.dt_ds_v, off, off, -d.dp_dv_s) * scale;
    Ok(FundamentalForms { first, second })
}

/// Flips `u` so its `e_V` coefficient is non-negative (ties broken on `e_S`).
fn canonical_orientation(u: Vector2<f64>) -> Vector2<f64> {
    if u[1] < 0.0 || (u[1] == 0.0 && u[0] < 0.0) {
        -u
    } else {
        u
    }
}

fn a_normalize(u: Vector2<f64>, a: &Matrix2<f64>) -> Vector2<f64> {
    u / (u.dot(&(a * u))).sqrt()
}

/// Null vector of a (numerically) singular 2x2 matrix, taken from its
/// larger row.
fn kernel(m: &Matrix2<f64>) -> Vector2<f64> {
    let r0 = Vector2::new(m[(0, 0)], m[(0, 1)]);
    let r1 = Vector2::new(m[(1, 0)], m[(1, 1)]);
    let r = if r0.norm_squared() >= r1.norm_squared() { r0 } else { r1 };
    Vector2::new(-r[1], r[0])
}

/// Solves `B d = lambda A d` in closed form.
pub fn principal_curvatures(forms: &FundamentalForms) -> CurvatureSpectrum {
    let a = &forms.first;
    let b = &forms.second;
    let det_a = a.determinant();
    let det_b = b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)];
    // det(B - lambda A) = det_a lambda^2 - m lambda + det_b
    let m = a[(0, 0)] * b[(1, 1)] + a[(1, 1)] * b[(0, 0)] - a[(0, 1)] * b[(1, 0)] - a[(1, 0)] * b[(0, 1)];
    let disc = (m * m - 4.0 * det_a * det_b).max(0.0);
    let (lambda1, lambda2) = if m == 0.0 && disc == 0.0 {
        (0.0, 0.0)
    } else {
        let q = 0.5 * (m + m.signum() * disc.sqrt());
        let r1 = q / det_a;
        let r2 = if q != 0.0 { det_b / q } else { r1 };
        (r1.min(r2), r1.max(r2))
    };

    let umbilic = (lambda2 - lambda1).abs() <= UMBILIC_GAP * lambda2.abs().max(lambda1.abs());
    let d1 = if umbilic {
        Vector2::new(1.0, 0.0)
    } else {
        kernel(&(b - a * lambda1))
    };
    let d1 = a_normalize(canonical_orientation(d1), a);
    let ad1 = a * d1;
    let d2 = a_normalize(canonical_orientation(Vector2::new(-ad1[1], ad1[0])), a);

    CurvatureSpectrum {
        lambda1,
        lambda2,
        d1,
        d2,
        umbilic,
    }
}

/// Gaussian curvature from the thermodynamic closed form
/// `K = -(dP/dV)_T / ((dS/dT)_V (1 + T^2 + P^2)^2)`.
pub fn gaussian_curvature(state: &ThermoState, d: &DerivativeBundle) -> f64 {
    let w = metric_factor(state);
    -d.dp_dv_t / (d.ds_dt_v * w * w)
}

/// Mean curvature `H`; returns half of
/// `[(1+P^2) T_S + 2 T P T_V - (1+T^2) P_V] / (1+T^2+P^2)^{3/2}`.
pub fn mean_curvature(state: &ThermoState, d: &DerivativeBundle) -> f64 {
    let (t, p) = (state.t, state.p);
    let w = metric_factor(state);
    let bracket = (1.0 + p * p) * d.dt_ds_v + 2.0 * t * p * d.dt_dv_s - (1.0 + t * t) * d.dp_dv_s;
    0.5 * bracket / (w * w.sqrt())
}

/// Euler's formula `lambda1 cos^2(phi) + lambda2 sin^2(phi)`.
pub fn directional_curvature(spec: &CurvatureSpectrum, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    spec.lambda1 * c * c + spec.lambda2 * s * s
}

/// Signed angle of a tangent direction against `d1`, in `(-pi, pi]`.
pub fn angle_of(coeffs: Vector2<f64>, spec: &CurvatureSpectrum, a: &Matrix2<f64>) -> Result<f64> {
    if !(coeffs[0].is_finite() && coeffs[1].is_finite()) || coeffs == Vector2::zeros() {
        return Err(Error::ZeroVector);
    }
    let u = a_normalize(canonical_orientation(coeffs), a);
    let au = a * u;
    Ok(spec.d2.dot(&au).atan2(spec.d1.dot(&au)))
}

/// Unnormalized bilinear form `a^T B b`.
pub fn conjugacy_form(dir_a: Vector2<f64>, dir_b: Vector2<f64>, b: &Matrix2<f64>) -> f64 {
    dir_a.dot(&(b * dir_b))
}

/// `|a^T B b| / (||B||_F |a| |b|)`.
pub fn conjugacy_residual(dir_a: Vector2<f64>, dir_b: Vector2<f64>, b: &Matrix2<f64>) -> f64 {
    conjugacy_form(dir_a, dir_b, b).abs() / (b.norm() * dir_a.norm() * dir_b.norm())
}

/// Sine of the angle between `B u` and `target`.
pub fn proportionality_residual(u: Vector2<f64>, target: Vector2<f64>, b: &Matrix2<f64>) -> f64 {
    let bu = b * u;
    (bu[0] * target[1] - bu[1] * target[0]).abs() / (bu.norm() * target.norm())
}

/// Everything the geometry module knows about one surface point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub state: ThermoState,
    pub bundle: DerivativeBundle,
    pub forms: FundamentalForms,
    pub spectrum: CurvatureSpectrum,
}

impl SurfacePoint {
    pub fn new(params: &EosParams, state: ThermoState) -> Result<Self> {
        let bundle = params.derivative_bundle(&state);
        let forms = fundamental_forms(&state, &bundle)?;
        let spectrum = principal_curvatures(&forms);
        Ok(Self {
            state,
            bundle,
            forms,
            spectrum,
        })
    }

    pub fn angle_of(&self, coeffs: Vector2<f64>) -> Result<f64> {
        angle_of(coeffs, &self.spectrum, &self.forms.first)
    }
}
