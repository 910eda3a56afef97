//! Power-law behaviour of surface quantities as `tau = 1 - T -> 0`.
//!
//! Quantities are sampled at both coexisting points. Exponent fits default to
//! the geometric mean of the two branch magnitudes, which cancels the
//! leading asymmetric correction to scaling that biases either branch alone.

use nalgebra::Vector2;
use rayon::prelude::*;

use crate::coexistence::{solve_coexistence, solve_coexistence_from, Branch, CoexistencePoint, SolverOptions};
use crate::eos::{DerivativeBundle, EosParams, Partial};
use crate::error::{Error, Result};
use crate::geometry::{self, SurfacePoint};

/// Slopes at or below this magnitude classify a quantity as finite.
pub const FINITE_SLOPE: f64 = 0.02;

/// Product law is checked only where `lambda1/lambda2` exceeds this.
pub const PRODUCT_LAW_FLOOR: f64 = 1e-12;

/// Mean-field `(alpha, beta, gamma)`.
pub const MEAN_FIELD: (f64, f64, f64) = (0.0, 0.5, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSample {
    pub surface: SurfacePoint,
    pub dv_dt: f64,
    pub ds_dt: f64,
    /// Angle of the branch curve tangent `(S'_A, V'_A)` from `d1`.
    pub phi_a: f64,
    /// Angle of the ruling direction `(P', 1)` from `d1`.
    pub phi_r: f64,
}

impl BranchSample {
    pub fn bundle(&self) -> &DerivativeBundle {
        &self.surface.bundle
    }

    /// `|tan(phi_R) tan(phi_A) + lambda1/lambda2| / (lambda1/lambda2)`, or
    /// `None` below the ratio floor.
    pub fn product_law_residual(&self) -> Option<f64> {
        let ratio = self.surface.spectrum.lambda1 / self.surface.spectrum.lambda2;
        if !(ratio > PRODUCT_LAW_FLOOR) {
            return None;
        }
        Some((self.phi_r.tan() * self.phi_a.tan() + ratio).abs() / ratio)
    }

    pub fn signs_opposite(&self) -> bool {
        self.phi_r.signum() == -self.phi_a.signum() && self.phi_r != 0.0 && self.phi_a != 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepNode {
    pub tau: f64,
    pub point: CoexistencePoint,
    pub liquid: BranchSample,
    pub vapor: BranchSample,
}

impl SweepNode {
    pub fn branch(&self, b: Branch) -> &BranchSample {
        match b {
            Branch::Liquid => &self.liquid,
            Branch::Vapor => &self.vapor,
        }
    }
}

fn branch_sample(params: &EosParams, pt: &CoexistencePoint, b: Branch) -> Result<BranchSample> {
    let surface = SurfacePoint::new(params, *pt.state(b))?;
    let (dv_dt, ds_dt) = (pt.dv_dt(b), pt.ds_dt(b));
    Ok(BranchSample {
        phi_a: surface.angle_of(Vector2::new(ds_dt, dv_dt))?,
        phi_r: surface.angle_of(Vector2::new(pt.dp_dt, 1.0))?,
        surface,
        dv_dt,
        ds_dt,
    })
}

/// Samples on a descending `tau` grid.
#[derive(Debug)]
pub struct ScalingSweep {
    pub params: EosParams,
    pub nodes: Vec<SweepNode>,
    /// First node the solver could not reach; the sweep stops there.
    pub failure: Option<(f64, Error)>,
}

impl ScalingSweep {
    /// Continuation in decreasing `tau` with warm starts, then per-node
    /// geometry in parallel.
    pub fn run(params: &EosParams, tau_grid: &[f64], opts: &SolverOptions) -> Result<Self> {
        params.validate()?;
        let mut taus = tau_grid.to_vec();
        if taus.iter().any(|t| !(*t >= 1e-5 && *t <= 1e-1)) {
            return Err(Error::InvalidArgument("tau grid must lie in [1e-5, 1e-1]".into()));
        }
        taus.sort_by(|a, b| b.total_cmp(a));
        taus.dedup();
        let local = SolverOptions {
            t_min: opts.t_min.min(1.0 - taus.first().copied().unwrap_or(0.0)),
            ..*opts
        };

        let mut points: Vec<(f64, CoexistencePoint)> = Vec::with_capacity(taus.len());
        let mut failure = None;
        for &tau in &taus {
            let t = 1.0 - tau;
            let solved = match points.last() {
                Some((_, prev)) => solve_coexistence_from(params, t, (prev.liquid.v, prev.vapor.v), &local)
                    .or_else(|_| solve_coexistence(params, t, &local)),
                None => solve_coexistence(params, t, &local),
            };
            match solved {
                Ok(pt) => points.push((tau, pt)),
                Err(e) => {
                    failure = Some((tau, e));
                    break;
                }
            }
        }

        let nodes = points
            .par_iter()
            .map(|(tau, pt)| {
                Ok(SweepNode {
                    tau: *tau,
                    point: *pt,
                    liquid: branch_sample(params, pt, Branch::Liquid)?,
                    vapor: branch_sample(params, pt, Branch::Vapor)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params: *params,
            nodes,
            failure,
        })
    }

    pub fn taus(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.tau).collect()
    }

    pub fn series(&self, q: Quantity, eval: Evaluation) -> ScalingSeries {
        ScalingSeries {
            label: q.label(),
            tau: self.taus(),
            values: self.nodes.iter().map(|n| eval.apply(n, q)).collect(),
        }
    }

    pub fn fit(&self, q: Quantity, eval: Evaluation, window: (f64, f64)) -> Result<ExponentEstimate> {
        fit_power_law(&self.series(q, eval), window)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Partial(Partial),
    /// Product of two partials, as in chain-rule decompositions.
    Product(Partial, Partial),
    /// `V_G - V_L`.
    Gap,
    /// `P'` along the saturation curve.
    SaturationSlope,
    BranchVolumeSlope,
    BranchEntropySlope,
    Lambda1,
    Lambda2,
    Gaussian,
    /// `2H` from its closed form.
    MeanCurvatureSum,
    PhiA,
    PhiR,
    /// `phi_R phi_A`.
    AngleProduct,
    /// `(dS/dT)_V / V'_A`.
    BracketEntropy,
    /// `-(dP/dV)_T V'_A`.
    BracketCompression,
}

impl Quantity {
    pub fn label(self) -> String {
        match self {
            Quantity::Partial(p) => p.label().to_string(),
            Quantity::Product(a, b) => format!("{}*{}", a.label(), b.label()),
            Quantity::Gap => "V_G-V_L".into(),
            Quantity::SaturationSlope => "Pprime".into(),
            Quantity::BranchVolumeSlope => "Vprime_A".into(),
            Quantity::BranchEntropySlope => "Sprime_A".into(),
            Quantity::Lambda1 => "lambda1".into(),
            Quantity::Lambda2 => "lambda2".into(),
            Quantity::Gaussian => "K".into(),
            Quantity::MeanCurvatureSum => "2H".into(),
            Quantity::PhiA => "phi_A".into(),
            Quantity::PhiR => "phi_R".into(),
            Quantity::AngleProduct => "phi_R*phi_A".into(),
            Quantity::BracketEntropy => "bracket_entropy".into(),
            Quantity::BracketCompression => "bracket_compression".into(),
        }
    }

    /// Value on one branch of a sweep node.
    pub fn on_branch(self, node: &SweepNode, b: Branch) -> f64 {
        let s = node.branch(b);
        let d = s.bundle();
        let st = &s.surface.state;
        match self {
            Quantity::Partial(p) => d.partial(p),
            Quantity::Product(p, q) => d.partial(p) * d.partial(q),
            Quantity::Gap => node.point.gap(),
            Quantity::SaturationSlope => node.point.dp_dt,
            Quantity::BranchVolumeSlope => s.dv_dt,
            Quantity::BranchEntropySlope => s.ds_dt,
            Quantity::Lambda1 => s.surface.spectrum.lambda1,
            Quantity::Lambda2 => s.surface.spectrum.lambda2,
            Quantity::Gaussian => geometry::gaussian_curvature(st, d),
            Quantity::MeanCurvatureSum => 2.0 * geometry::mean_curvature(st, d),
            Quantity::PhiA => s.phi_a,
            Quantity::PhiR => s.phi_r,
            Quantity::AngleProduct => s.phi_r * s.phi_a,
            Quantity::BracketEntropy => d.ds_dt_v / s.dv_dt,
            Quantity::BracketCompression => -d.dp_dv_t * s.dv_dt,
        }
    }
}

/// Which coexisting point a scaling quantity is read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Evaluation {
    Liquid,
    Vapor,
    /// `sqrt(|q_L q_G|)`, carrying the vapor sign.
    #[default]
    Symmetric,
}

impl Evaluation {
    pub fn apply(self, node: &SweepNode, q: Quantity) -> f64 {
        match self {
            Evaluation::Liquid => q.on_branch(node, Branch::Liquid),
            Evaluation::Vapor => q.on_branch(node, Branch::Vapor),
            Evaluation::Symmetric => {
                let (l, g) = (q.on_branch(node, Branch::Liquid), q.on_branch(node, Branch::Vapor));
                g.signum() * (l.abs().sqrt() * g.abs().sqrt())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSeries {
    pub label: String,
    pub tau: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentEstimate {
    pub exponent: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    pub n: usize,
}

/// Ordinary least squares of `ln|q|` on `ln tau` over `tau` in `window`.
pub fn fit_power_law(series: &ScalingSeries, window: (f64, f64)) -> Result<ExponentEstimate> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidArgument(format!("fit window ({lo}, {hi}) is not a positive interval")));
    }
    if series.tau.len() != series.values.len() {
        return Err(Error::InvalidArgument(format!("series '{}' has mismatched lengths", series.label)));
    }
    let slack = 1e-12;
    let picked: Vec<(f64, f64)> = series
        .tau
        .iter()
        .zip(&series.values)
        .filter(|(t, _)| **t >= lo * (1.0 - slack) && **t <= hi * (1.0 + slack))
        .map(|(t, v)| (*t, *v))
        .collect();
    if picked.len() < 5 {
        return Err(Error::InsufficientPoints {
            needed: 5,
            found: picked.len(),
        });
    }
    let sign = picked[0].1.signum();
    if picked.iter().any(|(_, v)| !v.is_finite() || *v == 0.0 || v.signum() != sign) {
        return Err(Error::SignChange {
            label: series.label.clone(),
        });
    }

    let n = picked.len() as f64;
    let xs: Vec<f64> = picked.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = picked.iter().map(|(_, v)| v.abs().ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let sst: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    Ok(ExponentEstimate {
        exponent: slope,
        stderr: (sse / (n - 2.0) / sxx).sqrt(),
        window,
        // a constant series leaves only round-off in both sums
        r_squared: if sst > 1e-24 * n * my.abs().max(1.0).powi(2) { 1.0 - sse / sst } else { 1.0 },
        n: picked.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Finite,
    Divergent,
    Vanishing,
}

pub fn classify(est: &ExponentEstimate) -> Classification {
    if est.exponent.abs() <= FINITE_SLOPE {
        Classification::Finite
    } else if est.exponent < 0.0 {
        Classification::Divergent
    } else {
        Classification::Vanishing
    }
}

/// A fitted exponent against its prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentCheck {
    pub quantity: String,
    pub estimate: ExponentEstimate,
    pub predicted: f64,
    pub tolerance: f64,
}

impl ExponentCheck {
    pub fn deviation(&self) -> f64 {
        self.estimate.exponent - self.predicted
    }

    pub fn passes(&self) -> bool {
        self.deviation().abs() <= self.tolerance
    }
}

fn check(sweep: &ScalingSweep, q: Quantity, window: (f64, f64), predicted: f64, tolerance: f64) -> Result<ExponentCheck> {
    Ok(ExponentCheck {
        quantity: q.label(),
        estimate: sweep.fit(q, Evaluation::Symmetric, window)?,
        predicted,
        tolerance,
    })
}

/// Exponent predictions for the response table, in `Partial::TABLE` order.
pub fn response_predictions(alpha: f64, gamma: f64) -> [f64; 12] {
    [-gamma, -alpha, 0.0, 0.0, -alpha, -alpha, -gamma, -gamma, 0.0, 0.0, -gamma, -alpha]
}

/// Tolerance for table entries: the finite-classification slope where the
/// prediction is zero, otherwise `TABLE_TOLERANCE`.
pub const TABLE_TOLERANCE: f64 = 0.03;

pub fn response_table(sweep: &ScalingSweep, window: (f64, f64)) -> Result<Vec<ExponentCheck>> {
    let (alpha, _, gamma) = MEAN_FIELD;
    Partial::TABLE
        .iter()
        .zip(response_predictions(alpha, gamma))
        .map(|(p, pred)| {
            let tol = if pred == 0.0 { FINITE_SLOPE } else { TABLE_TOLERANCE };
            check(sweep, Quantity::Partial(*p), window, pred, tol)
        })
        .collect()
}

/// `lambda1`, `lambda2`, `K` and `2H`.
pub fn curvature_exponents(sweep: &ScalingSweep, window: (f64, f64)) -> Result<Vec<ExponentCheck>> {
    let (alpha, _, gamma) = MEAN_FIELD;
    Ok(vec![
        check(sweep, Quantity::Lambda1, window, gamma, 0.02)?,
        check(sweep, Quantity::Lambda2, window, alpha, 0.02)?,
        check(sweep, Quantity::Gaussian, window, alpha + gamma, 0.03)?,
        check(sweep, Quantity::MeanCurvatureSum, window, alpha, 0.02)?,
    ])
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleReport {
    pub exponents: Vec<ExponentCheck>,
    /// Largest relative product-law residual over nodes and branches.
    pub product_law_worst: f64,
    /// Nodes (times branches) where the two angles share a sign.
    pub same_sign_count: usize,
}

/// `|phi_A|`, `|phi_R|` and their product, with the pointwise tangent
/// product law and sign opposition.
pub fn angle_exponents(sweep: &ScalingSweep, window: (f64, f64)) -> Result<AngleReport> {
    let (alpha, beta, gamma) = MEAN_FIELD;
    let exponents = vec![
        check(sweep, Quantity::PhiA, window, 1.0 - alpha - beta, 0.03)?,
        check(sweep, Quantity::PhiR, window, gamma + beta - 1.0, 0.03)?,
        check(sweep, Quantity::AngleProduct, window, gamma - alpha, 0.05)?,
    ];
    let samples = sweep.nodes.iter().flat_map(|n| [&n.liquid, &n.vapor]);
    let product_law_worst = samples
        .clone()
        .filter_map(|s| s.product_law_residual())
        .fold(0.0f64, |m, r| if r.is_nan() || m.is_nan() { f64::NAN } else { m.max(r) });
    let same_sign_count = samples.filter(|s| !s.signs_opposite()).count();
    Ok(AngleReport {
        exponents,
        product_law_worst,
        same_sign_count,
    })
}

/// A three-term chain-rule identity `lhs = first + second`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainRuleTriple {
    pub lhs: Quantity,
    pub first: Quantity,
    pub second: Quantity,
}

pub const CHAIN_RULE_TRIPLES: [ChainRuleTriple; 3] = [
    ChainRuleTriple {
        lhs: Quantity::Partial(Partial::DpDtV),
        first: Quantity::Partial(Partial::DpDtS),
        second: Quantity::Product(Partial::DpDsT, Partial::DsDtV),
    },
    ChainRuleTriple {
        lhs: Quantity::Partial(Partial::DvDsT),
        first: Quantity::Partial(Partial::DvDsP),
        second: Quantity::Product(Partial::DvDpS, Partial::DpDsT),
    },
    ChainRuleTriple {
        lhs: Quantity::Partial(Partial::DvDtP),
        first: Quantity::Partial(Partial::DvDtS),
        second: Quantity::Product(Partial::DvDsT, Partial::DsDtP),
    },
];

#[derive(Debug, Clone, PartialEq)]
pub struct TripleReport {
    pub labels: [String; 3],
    pub exponents: [ExponentEstimate; 3],
    /// Spread between the two smallest exponents.
    pub dominant_spread: f64,
    /// Excess of the subleading term over the dominant pair.
    pub gap: f64,
    /// Largest relative defect of the identity itself over the sweep.
    pub identity_residual: f64,
}

impl TripleReport {
    pub fn passes(&self, gap_target: f64) -> bool {
        self.dominant_spread <= 0.03 && (self.gap - gap_target).abs() <= 0.05
    }
}

pub fn chain_rule_triples(sweep: &ScalingSweep, window: (f64, f64)) -> Result<Vec<TripleReport>> {
    CHAIN_RULE_TRIPLES
        .iter()
        .map(|tr| {
            let qs = [tr.lhs, tr.first, tr.second];
            let mut est = [None; 3];
            for (slot, q) in est.iter_mut().zip(qs) {
                *slot = Some(sweep.fit(q, Evaluation::Symmetric, window)?);
            }
            let est = est.map(|e| e.expect("filled above"));
            let mut order = [0usize, 1, 2];
            order.sort_by(|a, b| est[*a].exponent.total_cmp(&est[*b].exponent));
            let (a, b, c) = (est[order[0]].exponent, est[order[1]].exponent, est[order[2]].exponent);
            let identity_residual = sweep
                .nodes
                .iter()
                .flat_map(|n| Branch::BOTH.map(|br| (n, br)))
                .map(|(n, br)| {
                    let [l, f, s] = qs.map(|q| q.on_branch(n, br));
                    (l - f - s).abs() / l.abs().max(f.abs()).max(s.abs())
                })
                .fold(0.0f64, f64::max);
            Ok(TripleReport {
                labels: qs.map(|q| q.label()),
                exponents: est,
                dominant_spread: b - a,
                gap: c - 0.5 * (a + b),
                identity_residual,
            })
        })
        .collect()
}

/// `S'_A` and `V'_A` share an exponent; both bracket terms of the edge
/// tangent coefficient vanish.
pub fn branch_slope_checks(sweep: &ScalingSweep, window: (f64, f64)) -> Result<Vec<ExponentCheck>> {
    let (alpha, beta, gamma) = MEAN_FIELD;
    let v = sweep.fit(Quantity::BranchVolumeSlope, Evaluation::Symmetric, window)?;
    Ok(vec![
        check(sweep, Quantity::BranchVolumeSlope, window, beta - 1.0, 0.03)?,
        ExponentCheck {
            quantity: Quantity::BranchEntropySlope.label(),
            estimate: sweep.fit(Quantity::BranchEntropySlope, Evaluation::Symmetric, window)?,
            predicted: v.exponent,
            tolerance: 0.03,
        },
        check(sweep, Quantity::SaturationSlope, window, 0.0, FINITE_SLOPE)?,
        check(sweep, Quantity::BracketEntropy, window, 1.0 - alpha - beta, 0.05)?,
        check(sweep, Quantity::BracketCompression, window, gamma + beta - 1.0, 0.05)?,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RushbrookeReport {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// `alpha + 2 beta + gamma - 2`.
    pub delta: f64,
    pub stderr: f64,
    /// `(gamma + beta - 1, (gamma - alpha)/2, 1 - alpha - beta)`.
    pub chain: (f64, f64, f64),
}

impl RushbrookeReport {
    pub fn inequality_holds(&self) -> bool {
        self.delta >= -3.0 * self.stderr
    }

    /// Non-increasing within `3 stderr`.
    pub fn chain_ordered(&self) -> bool {
        let slack = 3.0 * self.stderr;
        self.chain.0 >= self.chain.1 - slack && self.chain.1 >= self.chain.2 - slack
    }
}

/// Exponent estimates are signed as in `C ~ tau^-alpha`, `gap ~ tau^beta`,
/// `chi ~ tau^-gamma`.
pub fn rushbrooke_check(alpha: &ExponentEstimate, beta: &ExponentEstimate, gamma: &ExponentEstimate) -> RushbrookeReport {
    let (a, b, g) = (alpha.exponent, beta.exponent, gamma.exponent);
    RushbrookeReport {
        alpha: a,
        beta: b,
        gamma: g,
        delta: a + 2.0 * b + g - 2.0,
        stderr: (alpha.stderr.powi(2) + 4.0 * beta.stderr.powi(2) + gamma.stderr.powi(2)).sqrt(),
        chain: (g + b - 1.0, 0.5 * (g - a), 1.0 - a - b),
    }
}

/// `(alpha, beta, gamma)` fitted from `(dS/dT)_V`, the gap and `(dV/dP)_T`.
pub fn fitted_exponents(sweep: &ScalingSweep, window: (f64, f64)) -> Result<[ExponentEstimate; 3]> {
    let neg = |e: ExponentEstimate| ExponentEstimate {
        exponent: -e.exponent,
        ..e
    };
    Ok([
        neg(sweep.fit(Quantity::Partial(Partial::DsDtV), Evaluation::Symmetric, window)?),
        sweep.fit(Quantity::Gap, Evaluation::Symmetric, window)?,
        neg(sweep.fit(Quantity::Partial(Partial::DvDpT), Evaluation::Symmetric, window)?),
    ])
}

/// `n` log-spaced values from `hi` down to `lo`.
pub fn log_grid_descending(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    let (a, b) = (hi.ln(), lo.ln());
    (0..n)
        .map(|i| match i {
            0 => hi,
            _ if i == n - 1 => lo,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::sync::OnceLock;

    const WINDOW: (f64, f64) = (1e-4, 1e-2);

    fn sweep() -> &'static ScalingSweep {
        static S: OnceLock<ScalingSweep> = OnceLock::new();
        S.get_or_init(|| {
            ScalingSweep::run(
                &EosParams::default(),
                &log_grid_descending(1e-4, 1e-2, 25),
                &SolverOptions::default(),
            )
            .unwrap()
        })
    }

    fn synthetic(f: impl Fn(f64) -> f64) -> ScalingSeries {
        let tau = log_grid_descending(1e-4, 1e-2, 25);
        ScalingSeries {
            label: "synthetic".into(),
            values: tau.iter().map(|&t| f(t)).collect(),
            tau,
        }
    }

    #[test]
    fn exact_power_law() {
        let e = fit_power_law(&synthetic(|t| 3.0 * t * t), WINDOW).unwrap();
        assert_relative_eq!(e.exponent, 2.0, epsilon = 1e-12);
        assert!(e.stderr <= 1e-12);
        assert_relative_eq!(e.r_squared, 1.0, epsilon = 1e-12);
        assert_eq!(e.n, 25);
    }

    #[test]
    fn constant_series() {
        let e = fit_power_law(&synthetic(|_| -4.5), WINDOW).unwrap();
        assert!(e.exponent.abs() <= 1e-12);
        assert_eq!(e.r_squared, 1.0);
        assert_eq!(classify(&e), Classification::Finite);
    }

    #[test]
    fn fit_errors() {
        let s = synthetic(|t| if t > 1e-3 { t } else { -t });
        assert!(matches!(fit_power_law(&s, WINDOW), Err(Error::SignChange { .. })));
        let s = synthetic(|t| if t > 1e-3 { t } else { 0.0 });
        assert!(matches!(fit_power_law(&s, WINDOW), Err(Error::SignChange { .. })));
        let s = synthetic(|t| t);
        assert!(matches!(
            fit_power_law(&s, (1e-4, 2e-4)),
            Err(Error::InsufficientPoints { needed: 5, .. })
        ));
        assert!(fit_power_law(&s, (1e-2, 1e-4)).is_err());
    }

    #[test]
    fn window_restricts_points() {
        let e = fit_power_law(&synthetic(|t| t.sqrt()), (1e-3, 1e-2)).unwrap();
        assert_eq!(e.n, 13);
        assert_relative_eq!(e.exponent, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid_descending(1e-4, 1e-2, 25);
        assert_eq!((g[0], g[24]), (1e-2, 1e-4));
        assert!(g.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn rushbrooke_mean_field_is_saturated() {
        let est = |x: f64| ExponentEstimate {
            exponent: x,
            stderr: 0.0,
            window: WINDOW,
            r_squared: 1.0,
            n: 25,
        };
        let r = rushbrooke_check(&est(0.0), &est(0.5), &est(1.0));
        assert_eq!(r.delta, 0.0);
        assert_eq!(r.chain, (0.5, 0.5, 0.5));
        assert!(r.inequality_holds() && r.chain_ordered());
    }

    #[test]
    fn sweep_is_descending_and_complete() {
        let s = sweep();
        assert_eq!(s.nodes.len(), 25);
        assert!(s.failure.is_none());
        assert!(s.taus().windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn sweep_rejects_out_of_range_tau() {
        let r = ScalingSweep::run(&EosParams::default(), &[0.5, 1e-3], &SolverOptions::default());
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn symmetric_evaluation_is_geometric_mean() {
        let n = &sweep().nodes[3];
        let q = Quantity::Lambda1;
        let (l, g) = (q.on_branch(n, Branch::Liquid), q.on_branch(n, Branch::Vapor));
        assert_relative_eq!(Evaluation::Symmetric.apply(n, q), (l * g).sqrt(), max_relative = 1e-15);
        assert_eq!(Evaluation::Vapor.apply(n, q), g);
    }

    #[test]
    fn angle_signs_oppose_and_product_law_holds() {
        for n in &sweep().nodes {
            for b in Branch::BOTH {
                let s = n.branch(b);
                assert!(s.signs_opposite(), "tau {} {:?}", n.tau, b);
                assert!(s.product_law_residual().unwrap() <= 1e-8);
            }
            assert!(n.liquid.phi_r > 0.0 && n.liquid.phi_a < 0.0);
            assert!(n.vapor.phi_r < 0.0 && n.vapor.phi_a > 0.0);
        }
    }

    #[test]
    fn chain_rule_identities_hold_pointwise() {
        for tr in chain_rule_triples(sweep(), WINDOW).unwrap() {
            assert!(tr.identity_residual <= 1e-9, "{:?}", tr.labels);
        }
    }

    #[test]
    fn gap_exponent() {
        let e = sweep().fit(Quantity::Gap, Evaluation::Symmetric, WINDOW).unwrap();
        assert!((e.exponent - 0.5).abs() <= 0.01);
    }
}

