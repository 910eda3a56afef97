//! Reduced van der Waals energy surface `U(S, V)`.
//!
//! Variables are scaled so that the Gibbs relation `dU = T dS - P dV` holds
//! with unit coefficients: `T/T_c`, `V/V_c`, `S/R`, `U/(R T_c)` and
//! `P V_c/(R T_c)`. In these units the isotherm reads
//!
//! ```text
//! P(T, V) = T/(V - 1/3) - (9/8)/V^2
//! ```
//!
//! with the critical point at `(T, V, P) = (1, 1, 3/8)`. The entropy constant
//! is zero, `S = c ln T + ln(V - 1/3)`, and `U = c T - (9/8)/V`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Attraction constant of the reduced isotherm.
pub const ATTRACTION: f64 = 9.0 / 8.0;
/// Covolume of the reduced isotherm.
pub const COVOLUME: f64 = 1.0 / 3.0;
/// Critical pressure in Gibbs-consistent reduced units.
pub const CRITICAL_PRESSURE: f64 = 3.0 / 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EosModel {
    #[default]
    VanDerWaals,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosParams {
    /// Ideal-gas heat capacity `c_v / R`.
    pub c: f64,
    pub model: EosModel,
}

impl Default for EosParams {
    fn default() -> Self {
        Self {
            c: 1.5,
            model: EosModel::VanDerWaals,
        }
    }
}

/// One equilibrium point of the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoState {
    pub s: f64,
    pub v: f64,
    pub u: f64,
    pub t: f64,
    pub p: f64,
    pub mu: f64,
}

impl ThermoState {
    /// Position `(S, V, U)` in Gibbs space.
    pub fn position(&self) -> [f64; 3] {
        [self.s, self.v, self.u]
    }

    /// Surface gradient `(T, -P, -1)`.
    pub fn normal(&self) -> [f64; 3] {
        [self.t, -self.p, -1.0]
    }
}

/// Closed-form first partials among `S, V, T, P` at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeBundle {
    pub dt_ds_v: f64,
    pub dt_dv_s: f64,
    pub dp_ds_v: f64,
    pub dp_dv_s: f64,
    pub dp_dv_t: f64,
    pub ds_dt_v: f64,
    pub dp_dt_v: f64,
    pub ds_dv_t: f64,
}

/// Partial derivatives whose near-critical behaviour is tabulated by the
/// exponent analysis. The first twelve variants form the response table; the
/// remaining ones appear in chain-rule decompositions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Partial {
    DsDtP,
    DsDtV,
    DpDtV,
    DsDvT,
    DsDpV,
    DvDtS,
    DvDtP,
    DsDpT,
    DsDvP,
    DpDtS,
    DvDpT,
    DvDpS,
    DpDsT,
    DvDsT,
    DvDsP,
}

impl Partial {
    /// The response table, in order.
    pub const TABLE: [Partial; 12] = [
        Partial::DsDtP,
        Partial::DsDtV,
        Partial::DpDtV,
        Partial::DsDvT,
        Partial::DsDpV,
        Partial::DvDtS,
        Partial::DvDtP,
        Partial::DsDpT,
        Partial::DsDvP,
        Partial::DpDtS,
        Partial::DvDpT,
        Partial::DvDpS,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Partial::DsDtP => "dS_dT_P",
            Partial::DsDtV => "dS_dT_V",
            Partial::DpDtV => "dP_dT_V",
            Partial::DsDvT => "dS_dV_T",
            Partial::DsDpV => "dS_dP_V",
            Partial::DvDtS => "dV_dT_S",
            Partial::DvDtP => "dV_dT_P",
            Partial::DsDpT => "dS_dP_T",
            Partial::DsDvP => "dS_dV_P",
            Partial::DpDtS => "dP_dT_S",
            Partial::DvDpT => "dV_dP_T",
            Partial::DvDpS => "dV_dP_S",
            Partial::DpDsT => "dP_dS_T",
            Partial::DvDsT => "dV_dS_T",
            Partial::DvDsP => "dV_dS_P",
        }
    }
}

impl DerivativeBundle {
    /// `(dS/dT)_P = (dS/dT)_V + (dP/dT)_V^2 / (-(dP/dV)_T)`.
    pub fn ds_dt_p(&self) -> f64 {
        self.ds_dt_v - self.dp_dt_v * self.dp_dt_v / self.dp_dv_t
    }

    pub fn dv_dt_p(&self) -> f64 {
        -self.dp_dt_v / self.dp_dv_t
    }

    pub fn dv_dt_s(&self) -> f64 {
        -self.ds_dt_v / self.ds_dv_t
    }

    pub fn partial(&self, which: Partial) -> f64 {
        match which {
            Partial::DsDtP => self.ds_dt_p(),
            Partial::DsDtV => self.ds_dt_v,
            Partial::DpDtV => self.dp_dt_v,
            Partial::DsDvT => self.ds_dv_t,
            Partial::DsDpV => self.ds_dt_v / self.dp_dt_v,
            Partial::DvDtS => self.dv_dt_s(),
            Partial::DvDtP => self.dv_dt_p(),
            Partial::DsDpT => self.ds_dv_t / self.dp_dv_t,
            Partial::DsDvP => self.ds_dt_p() / self.dv_dt_p(),
            // along an isentrope: dP = P_T dT + P_V dV with dV = (dV/dT)_S dT
            Partial::DpDtS => self.dp_dt_v + self.dp_dv_t * self.dv_dt_s(),
            Partial::DvDpT => 1.0 / self.dp_dv_t,
            Partial::DvDpS => 1.0 / self.dp_dv_s,
            Partial::DpDsT => self.dp_dv_t / self.ds_dv_t,
            Partial::DvDsT => 1.0 / self.ds_dv_t,
            Partial::DvDsP => self.dv_dt_p() / self.ds_dt_p(),
        }
    }
}

impl EosParams {
    pub fn new(c: f64) -> Result<Self> {
        let params = Self {
            c,
            model: EosModel::VanDerWaals,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "heat capacity c must be positive, got {}",
                self.c
            )));
        }
        Ok(())
    }

    fn check_tv(t: f64, v: f64) -> Result<()> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::domain(format!("temperature must be positive, got {t}")));
        }
        if !(v.is_finite() && v > COVOLUME) {
            return Err(Error::domain(format!(
                "volume must exceed the covolume 1/3, got {v}"
            )));
        }
        Ok(())
    }

    pub fn pressure(&self, t: f64, v: f64) -> f64 {
        match self.model {
            EosModel::VanDerWaals => t / (v - COVOLUME) - ATTRACTION / (v * v),
        }
    }

    pub fn entropy(&self, t: f64, v: f64) -> f64 {
        match self.model {
            EosModel::VanDerWaals => self.c * t.ln() + (v - COVOLUME).ln(),
        }
    }

    pub fn energy(&self, t: f64, v: f64) -> f64 {
        match self.model {
            EosModel::VanDerWaals => self.c * t - ATTRACTION / v,
        }
    }

    /// `(dP/dV)_T` from the closed form.
    pub fn dp_dv_t(&self, t: f64, v: f64) -> f64 {
        match self.model {
            EosModel::VanDerWaals => {
                let x = v - COVOLUME;
                -t / (x * x) + 2.0 * ATTRACTION / (v * v * v)
            }
        }
    }

    /// `(dP/dT)_V`, equal to `(dS/dV)_T` by the Maxwell relation.
    pub fn dp_dt_v(&self, _t: f64, v: f64) -> f64 {
        match self.model {
            EosModel::VanDerWaals => 1.0 / (v - COVOLUME),
        }
    }

    /// Chemical potential minus its `V`-independent part `c T (1 - ln T)`.
    /// Differences at equal temperature are taken on this reduced form.
    pub(crate) fn mu_volume_part(&self, t: f64, v: f64) -> f64 {
        match self.model {
            EosModel::VanDerWaals => {
                -ATTRACTION / v + self.pressure(t, v) * v - t * (v - COVOLUME).ln()
            }
        }
    }

    pub fn state_from_tv(&self, t: f64, v: f64) -> Result<ThermoState> {
        Self::check_tv(t, v)?;
        let s = self.entropy(t, v);
        let u = self.energy(t, v);
        let p = self.pressure(t, v);
        Ok(ThermoState {
            s,
            v,
            u,
            t,
            p,
            mu: u + p * v - t * s,
        })
    }

    pub fn state_from_sv(&self, s: f64, v: f64) -> Result<ThermoState> {
        if !(v.is_finite() && v > COVOLUME) {
            return Err(Error::domain(format!(
                "volume must exceed the covolume 1/3, got {v}"
            )));
        }
        if !s.is_finite() {
            return Err(Error::domain(format!("entropy must be finite, got {s}")));
        }
        let t = match self.model {
            EosModel::VanDerWaals => ((s - (v - COVOLUME).ln()) / self.c).exp(),
        };
        self.state_from_tv(t, v)
    }

    pub fn derivative_bundle(&self, state: &ThermoState) -> DerivativeBundle {
        let (t, v) = (state.t, state.v);
        match self.model {
            EosModel::VanDerWaals => {
                let x = v - COVOLUME;
                let c = self.c;
                let attraction = 2.0 * ATTRACTION / (v * v * v);
                DerivativeBundle {
                    dt_ds_v: t / c,
                    dt_dv_s: -t / (c * x),
                    dp_ds_v: t / (c * x),
                    dp_dv_s: -t * (1.0 + 1.0 / c) / (x * x) + attraction,
                    dp_dv_t: -t / (x * x) + attraction,
                    ds_dt_v: c / t,
                    dp_dt_v: 1.0 / x,
                    ds_dv_t: 1.0 / x,
                }
            }
        }
    }
}

/// `mu = U + P V - T S`.
pub fn chemical_potential(state: &ThermoState) -> f64 {
    state.u + state.p * state.v - state.t * state.s
}

/// `mu = -(T, -P, -1) . (S, V, U)`: the normal vector against the position.
pub fn chemical_potential_normal_form(state: &ThermoState) -> f64 {
    let n = state.normal();
    let x = state.position();
    -(n[0] * x[0] + n[1] * x[1] + n[2] * x[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn vdw() -> EosParams {
        EosParams::default()
    }

    #[test]
    fn critical_pressure() {
        let st = vdw().state_from_tv(1.0, 1.0).unwrap();
        assert_relative_eq!(st.p, CRITICAL_PRESSURE, epsilon = 1e-15);
    }

    #[test]
    fn ideal_gas_limit() {
        let st = vdw().state_from_tv(1.0, 1e9).unwrap();
        assert_relative_eq!(st.p * st.v, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn liquid_pressure_at_t09() {
        // 0.9/(0.6034 - 1/3) - (9/8)/0.6034^2
        let p = vdw().pressure(0.9, 0.6034);
        assert_relative_eq!(p, 0.242_628_374_771_301_93, epsilon = 1e-14);
        assert!((p - 0.2426).abs() < 5e-5);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(vdw().state_from_tv(1.0, 1.0 / 3.0), Err(Error::Domain(_))));
        assert!(matches!(vdw().state_from_tv(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(vdw().state_from_tv(-1.0, 2.0), Err(Error::Domain(_))));
        assert!(matches!(vdw().state_from_sv(0.0, 0.2), Err(Error::Domain(_))));
        assert!(EosParams::new(0.0).is_err());
        assert!(EosParams::new(f64::NAN).is_err());
    }

    #[test]
    fn sv_round_trip() {
        let p = vdw();
        let st = p.state_from_tv(0.8, 2.0).unwrap();
        let back = p.state_from_sv(st.s, 2.0).unwrap();
        assert_relative_eq!(back.t, 0.8, epsilon = 1e-12);
    }

    #[test]
    fn energy_at_unit_temperature() {
        let p = vdw();
        let s = p.entropy(1.0, 1.0);
        let st = p.state_from_sv(s, 1.0).unwrap();
        assert_relative_eq!(st.u, p.c - 9.0 / 8.0, epsilon = 1e-14);
    }

    #[test]
    fn bundle_basics() {
        let p = vdw();
        let st = p.state_from_tv(0.7, 1.9).unwrap();
        let d = p.derivative_bundle(&st);
        assert_eq!(d.ds_dt_v, p.c / 0.7);
        assert_eq!(d.dt_dv_s, -d.dp_ds_v);

        let crit = p.derivative_bundle(&p.state_from_tv(1.0, 1.0).unwrap());
        assert!(crit.dp_dv_t.abs() < 1e-15);
    }

    #[test]
    fn isentropic_chain_rule() {
        let p = vdw();
        let st = p.state_from_tv(0.95, 1.4).unwrap();
        let d = p.derivative_bundle(&st);
        let via_chain = d.dp_dv_t + d.dp_dt_v * d.dt_dv_s;
        assert_relative_eq!(via_chain, d.dp_dv_s, max_relative = 1e-10);
    }

    #[test]
    fn maxwell_pairs_in_table() {
        let p = vdw();
        let st = p.state_from_tv(1.2, 0.9).unwrap();
        let d = p.derivative_bundle(&st);
        assert_relative_eq!(d.partial(Partial::DsDpV), -d.partial(Partial::DvDtS), max_relative = 1e-12);
        assert_relative_eq!(d.partial(Partial::DvDtP), -d.partial(Partial::DsDpT), max_relative = 1e-12);
        // enthalpy Maxwell relation: (dT/dP)_S = (dV/dS)_P
        assert_relative_eq!(d.partial(Partial::DsDvP), d.partial(Partial::DpDtS), max_relative = 1e-12);
    }

    #[test]
    fn chemical_potential_forms_agree() {
        let p = vdw();
        for (t, v) in [(0.6, 0.5), (0.9, 2.3), (1.5, 7.0)] {
            let st = p.state_from_tv(t, v).unwrap();
            assert_relative_eq!(chemical_potential(&st), st.mu, epsilon = 1e-14);
            assert_relative_eq!(chemical_potential_normal_form(&st), st.mu, epsilon = 1e-14);
        }
    }
}
