//! Run configuration: a TOML file with sections, overridable per key.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coexistence::SolverOptions;
use crate::eos::{EosModel, EosParams};
use crate::error::{Error, Result};

/// Environment variable that replaces `output.dir`.
pub const OUT_ENV: &str = "GIBBSGEO_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    /// Geometric in `1 - T`, clustering nodes toward the critical point.
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub c: f64,
    pub eos: EosModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t_min: f64,
    pub t_max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauSection {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub window_min: f64,
    pub window_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub max_iter: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    /// Coexistence identities.
    pub identity: f64,
    /// Equalities enforced by the solver itself.
    pub solver: f64,
    pub second_order: f64,
    pub geometry: f64,
    pub edge_plane: f64,
    pub collinearity: f64,
    pub reconstruction: f64,
    pub tangent_identity: f64,
    /// Radians.
    pub edge_angle: f64,
    pub product_law: f64,
    pub p_second_floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
    pub v_min: f64,
    pub v_max: f64,
    pub v_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub grid: GridSection,
    pub tau: TauSection,
    pub fit: FitSection,
    pub solver: SolverSection,
    pub tolerances: ToleranceSection,
    pub mesh: MeshSection,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelSection {
                c: 1.5,
                eos: EosModel::VanDerWaals,
            },
            grid: GridSection {
                t_min: 0.5,
                t_max: 0.99,
                count: 50,
                spacing: Spacing::Log,
            },
            tau: TauSection {
                min: 1e-4,
                max: 1e-2,
                count: 25,
            },
            fit: FitSection {
                window_min: 1e-4,
                window_max: 1e-2,
            },
            solver: SolverSection {
                max_iter: 100,
                tol: 1e-12,
            },
            tolerances: ToleranceSection {
                identity: 1e-8,
                solver: 1e-11,
                second_order: 1e-6,
                geometry: 1e-10,
                edge_plane: 1e-9,
                collinearity: 1e-5,
                reconstruction: 1e-9,
                tangent_identity: 1e-9,
                edge_angle: 1e-4,
                product_law: 1e-8,
                p_second_floor: 1e-10,
            },
            mesh: MeshSection {
                t_min: 0.6,
                t_max: 1.4,
                t_count: 33,
                v_min: 0.4,
                v_max: 12.0,
                v_count: 48,
            },
            output: OutputSection { dir: "out".into() },
        }
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Parses the right side of `--set`: a TOML value, or a bare string.
fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| config_err(format!("override '{assignment}' is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(config_err(format!("malformed key '{key}'")));
    }
    let (last, parents) = path.split_last().expect("split yields at least one part");
    let mut cur = table;
    for p in parents {
        cur = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| config_err(format!("'{p}' in '{key}' is not a section")))?;
    }
    let mut value = parse_value(raw.trim());
    // integers given where floats are expected still parse
    if let (Some(toml::Value::Float(_)), toml::Value::Integer(i)) = (cur.get(*last), &value) {
        value = toml::Value::Float(*i as f64);
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

impl RunConfig {
    /// Default values, then the file (if any), then each `key=value`.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let base = toml::to_string(&Self::default()).map_err(|e| config_err(e.to_string()))?;
        let mut table: toml::Table = base.parse().map_err(|e: toml::de::Error| config_err(e.to_string()))?;
        if let Some(p) = path {
            let text = std::fs::read_to_string(p)
                .map_err(|e| config_err(format!("cannot read {}: {e}", p.display())))?;
            let file: toml::Table = text
                .parse()
                .map_err(|e: toml::de::Error| config_err(format!("{}: {e}", p.display())))?;
            merge(&mut table, file);
        }
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        Self::from_table(table)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| config_err(e.to_string()))?;
        Self::from_table(table)
    }

    fn from_table(table: toml::Table) -> Result<Self> {
        let cfg: Self = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        let g = &self.grid;
        if !(g.t_min >= 0.2 && g.t_min < g.t_max && g.t_max < 1.0) {
            return Err(config_err(format!(
                "grid needs 0.2 <= t_min < t_max < 1, got [{}, {}]",
                g.t_min, g.t_max
            )));
        }
        if g.count < 5 {
            return Err(config_err("grid.count must be at least 5"));
        }
        let t = &self.tau;
        if !(t.min >= 1e-5 && t.min < t.max && t.max <= 1e-1) || t.count < 5 {
            return Err(config_err("tau grid needs 1e-5 <= min < max <= 1e-1 and count >= 5"));
        }
        let f = &self.fit;
        if !(f.window_min > 0.0 && f.window_min < f.window_max) {
            return Err(config_err("fit window must be a positive interval"));
        }
        if !(self.solver.tol > 0.0) || self.solver.max_iter == 0 {
            return Err(config_err("solver tolerance and iteration limit must be positive"));
        }
        let tol = &self.tolerances;
        let all = [
            tol.identity,
            tol.solver,
            tol.second_order,
            tol.geometry,
            tol.edge_plane,
            tol.collinearity,
            tol.reconstruction,
            tol.tangent_identity,
            tol.edge_angle,
            tol.product_law,
            tol.p_second_floor,
        ];
        if all.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(config_err("tolerances must be positive and finite"));
        }
        let m = &self.mesh;
        if !(m.t_min > 0.0 && m.t_min < m.t_max && m.v_min > crate::eos::COVOLUME && m.v_min < m.v_max)
            || m.t_count < 2
            || m.v_count < 2
        {
            return Err(config_err("mesh needs 0 < t_min < t_max, 1/3 < v_min < v_max, counts >= 2"));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<EosParams> {
        let p = EosParams {
            c: self.model.c,
            model: self.model.eos,
        };
        p.validate().map_err(|e| config_err(e.to_string()))?;
        Ok(p)
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            t_min: self.grid.t_min,
            max_iter: self.solver.max_iter,
            tol: self.solver.tol,
        }
    }

    pub fn temperature_grid(&self) -> Vec<f64> {
        let g = &self.grid;
        let n = g.count;
        let mut out: Vec<f64> = (0..n)
            .map(|i| {
                let s = i as f64 / (n - 1) as f64;
                match g.spacing {
                    Spacing::Linear => g.t_min + s * (g.t_max - g.t_min),
                    Spacing::Log => {
                        let (a, b) = ((1.0 - g.t_min).ln(), (1.0 - g.t_max).ln());
                        1.0 - (a + s * (b - a)).exp()
                    }
                }
            })
            .collect();
        out[0] = g.t_min;
        out[n - 1] = g.t_max;
        out
    }

    /// Descending.
    pub fn tau_grid(&self) -> Vec<f64> {
        crate::critical::log_grid_descending(self.tau.min, self.tau.max, self.tau.count)
    }

    pub fn fit_window(&self) -> (f64, f64) {
        (self.fit.window_min, self.fit.window_max)
    }

    /// `GIBBSGEO_OUT` if set and non-empty, else `output.dir`.
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUT_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => self.output.dir.clone(),
        }
    }
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (Some(toml::Value::Float(_)), toml::Value::Integer(i)) => {
                base.insert(k, toml::Value::Float(i as f64));
            }
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let cfg = RunConfig::default();
        let back = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn shipped_default_matches() {
        let text = include_str!("../configs/default.toml");
        assert_eq!(RunConfig::from_toml(text).unwrap(), RunConfig::default());
    }

    #[test]
    fn overrides_apply() {
        let o = ["grid.count=60".to_string(), "model.c=2".into(), "grid.spacing=linear".into()];
        let cfg = RunConfig::load(None, &o).unwrap();
        assert_eq!(cfg.grid.count, 60);
        assert_eq!(cfg.model.c, 2.0);
        assert_eq!(cfg.grid.spacing, Spacing::Linear);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(RunConfig::load(None, &["grid.nodes=3".into()]), Err(Error::Config(_))));
        assert!(matches!(RunConfig::load(None, &["nonsense".into()]), Err(Error::Config(_))));
        assert!(matches!(RunConfig::load(None, &["grid.t_max=1.0".into()]), Err(Error::Config(_))));
        assert!(matches!(RunConfig::load(None, &["model.c=-1".into()]), Err(Error::Config(_))));
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "[grid]\ncount = 12\n").unwrap();
        let cfg = RunConfig::load(Some(&path), &[]).unwrap();
        assert_eq!(cfg.grid.count, 12);
        assert_eq!(cfg.tau, RunConfig::default().tau);
    }

    #[test]
    fn grids() {
        let cfg = RunConfig::default();
        let t = cfg.temperature_grid();
        assert_eq!((t.len(), t[0], t[49]), (50, 0.5, 0.99));
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        // spacing in ln(1 - T) is uniform
        let d0 = (1.0 - t[1]).ln() - (1.0 - t[0]).ln();
        let d1 = (1.0 - t[40]).ln() - (1.0 - t[39]).ln();
        assert!((d0 - d1).abs() < 1e-12);
        assert_eq!(cfg.tau_grid().len(), 25);
    }
}
