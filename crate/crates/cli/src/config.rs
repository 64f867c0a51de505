//! JSON run configuration: schema with defaults, strict validation, and
//! conversion into the core solver configuration.

use std::fs;
use std::path::Path;

use conewave_core::algebra::Algebra;
use conewave_core::solver::{
    Background, InitialDataSpec, Profile, RunMode, SolverConfig, Velocity,
};
use conewave_core::weights::WeightParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraChoice {
    Abelian,
    Su2,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ModeChoice {
    Linear,
    YangMillsOnly,
    Coupled,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileChoice {
    Bump { r0: f64, width: f64 },
    /// p defaults to (n-1)/2 + gamma + 1 when omitted.
    PolyDecay { p: Option<f64> },
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum VelocityChoice {
    #[default]
    Zero,
    Outgoing,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DataEntry {
    pub component: String,
    pub amplitude: f64,
    pub profile: ProfileChoice,
    #[serde(default)]
    pub basis: usize,
    #[serde(default)]
    pub velocity: VelocityChoice,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BackgroundSpec {
    pub c: f64,
    pub eps: f64,
}

fn default_cfl() -> f64 {
    0.3
}
fn default_lambda() -> f64 {
    0.5
}
fn default_cadence() -> usize {
    16
}
fn default_fit_window() -> (f64, f64) {
    (4.0, 64.0)
}
fn default_hardy_rates() -> Vec<f64> {
    vec![2.5, 3.0, 4.0]
}
fn default_hardy_exponents() -> Vec<f64> {
    vec![0.0, 1.0, 3.0]
}
fn default_bootstrap_factor() -> f64 {
    4.0
}
fn default_identity_samples() -> usize {
    10_000
}

/// Everything a run needs: solver shape, weights, initial data, diagnostics
/// cadence and windows, and output routing. Unknown keys are rejected.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub algebra: AlgebraChoice,
    pub mode: ModeChoice,
    pub dr: f64,
    pub r_max: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub t_end: f64,
    pub gamma: f64,
    pub mu: f64,
    #[serde(default)]
    pub q0: f64,
    /// Interior energy-growth exponent; this artifact pins it to 0.
    #[serde(default)]
    pub delta: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub data: Vec<DataEntry>,
    /// Hierarchy depth N: words over {d_t, S} up to this length.
    #[serde(default)]
    pub level: usize,
    /// Steps between committed ledger rows.
    #[serde(default = "default_cadence")]
    pub cadence: usize,
    #[serde(default)]
    pub include_pqg: bool,
    #[serde(default)]
    pub background: Option<BackgroundSpec>,
    /// (1+t) window used by decay fits.
    #[serde(default = "default_fit_window")]
    pub fit_window: (f64, f64),
    #[serde(default = "default_hardy_rates")]
    pub hardy_rates: Vec<f64>,
    #[serde(default = "default_hardy_exponents")]
    pub hardy_exponents: Vec<f64>,
    /// E_target = bootstrap_factor * E_N(0).
    #[serde(default = "default_bootstrap_factor")]
    pub bootstrap_factor: f64,
    /// Number of Gronwall windows; 0 means one window per sample.
    #[serde(default)]
    pub gronwall_windows: usize,
    /// Random jets per dimension in the identity suite.
    #[serde(default = "default_identity_samples")]
    pub identity_samples: usize,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn weights(&self) -> Result<WeightParams, CliError> {
        WeightParams::new(self.gamma, self.mu, self.q0, self.lambda)
            .map_err(|e| CliError::Config(format!("weights: {e}")))
    }

    pub fn algebra(&self) -> Algebra {
        match self.algebra {
            AlgebraChoice::Abelian => Algebra::Abelian,
            AlgebraChoice::Su2 => Algebra::Su2,
        }
    }

    pub fn to_solver(&self) -> Result<SolverConfig, CliError> {
        let weights = self.weights()?;
        let mode = match self.mode {
            ModeChoice::Linear => RunMode::Linear,
            ModeChoice::YangMillsOnly => RunMode::YangMillsOnly,
            ModeChoice::Coupled => RunMode::Coupled,
        };
        let mut data = Vec::new();
        for entry in &self.data {
            let profile = match entry.profile {
                ProfileChoice::Bump { r0, width } => Profile::Bump { r0, width },
                ProfileChoice::PolyDecay { p: Some(p) } => Profile::PolyDecay { p },
                ProfileChoice::PolyDecay { p: None } => {
                    Profile::poly_default(self.n, self.gamma)
                }
            };
            data.push(InitialDataSpec {
                component: entry.component.clone(),
                amplitude: entry.amplitude,
                profile,
                basis: entry.basis,
                velocity: match entry.velocity {
                    VelocityChoice::Zero => Velocity::Zero,
                    VelocityChoice::Outgoing => Velocity::Outgoing,
                },
            });
        }
        let cfg = SolverConfig {
            n: self.n,
            alg: self.algebra(),
            mode,
            dr: self.dr,
            r_max: self.r_max,
            cfl: self.cfl,
            t_end: self.t_end,
            weights,
            data,
            level: self.level,
            cadence: self.cadence,
            include_pqg: self.include_pqg,
            background: self.background.map(|b| Background { c: b.c, eps: b.eps }),
        };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

/// Loads and fully validates a run configuration. Schema violations carry
/// the JSON path of the offending field; invariant violations carry the
/// constraint in the message.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let cfg: RunConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        CliError::Config(format!("config field `{}`: {}", e.path(), e.inner()))
    })?;

    if cfg.delta != 0.0 {
        return Err(CliError::Config(String::from(
            "config field `delta`: nonzero values are not supported; the interior \
             energy-growth exponent is pinned to 0 in this artifact, so weighted \
             energies carry no secular growth factor",
        )));
    }
    if !(cfg.fit_window.0 >= 0.0 && cfg.fit_window.1 > cfg.fit_window.0) {
        return Err(CliError::Config(format!(
            "config field `fit_window`: want 0 <= lo < hi, got ({}, {})",
            cfg.fit_window.0, cfg.fit_window.1
        )));
    }
    if !(cfg.bootstrap_factor.is_finite() && cfg.bootstrap_factor > 0.0) {
        return Err(CliError::Config(format!(
            "config field `bootstrap_factor`: must be positive and finite, got {}",
            cfg.bootstrap_factor
        )));
    }
    if cfg.identity_samples == 0 {
        return Err(CliError::Config(String::from(
            "config field `identity_samples`: must be at least 1",
        )));
    }
    // Full cross-field validation (grid shape, CFL, horizon vs cone cut,
    // data against the component table) lives in the core config.
    cfg.to_solver()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use conewave_core::solver::{Profile, RunMode, Velocity};

    fn parse(body: &str) -> RunConfig {
        serde_json::from_str(body).expect("config parses")
    }

    #[test]
    fn omitted_fields_take_documented_defaults() {
        let cfg = parse(
            r#"{ "n": 4, "algebra": "abelian", "mode": "linear", "dr": 0.125,
                 "r_max": 16.0, "t_end": 1.0, "gamma": 0.5, "mu": -0.25 }"#,
        );
        assert_eq!(cfg.cfl, 0.3);
        assert_eq!(cfg.lambda, 0.5);
        assert_eq!(cfg.cadence, 16);
        assert_eq!(cfg.fit_window, (4.0, 64.0));
        assert_eq!(cfg.q0, 0.0);
        assert_eq!(cfg.delta, 0.0);
        assert_eq!(cfg.hardy_rates, vec![2.5, 3.0, 4.0]);
        assert_eq!(cfg.hardy_exponents, vec![0.0, 1.0, 3.0]);
        assert!(cfg.data.is_empty());
    }

    #[test]
    fn omitted_poly_rate_defaults_to_the_slowest_admissible_fall_off() {
        let cfg = parse(
            r#"{ "n": 4, "algebra": "abelian", "mode": "linear", "dr": 0.125,
                 "r_max": 16.0, "t_end": 1.0, "gamma": 0.5, "mu": -0.25,
                 "data": [ { "component": "Phi", "amplitude": 1.0,
                             "profile": { "kind": "poly_decay" } } ] }"#,
        );
        let solver = cfg.to_solver().expect("valid config");
        // (n - 1)/2 + gamma + 1 with n = 4, gamma = 0.5.
        assert_eq!(solver.data[0].profile, Profile::PolyDecay { p: 3.0 });
    }

    #[test]
    fn data_entries_convert_losslessly_to_solver_specs() {
        let cfg = parse(
            r#"{ "n": 4, "algebra": "su2", "mode": "coupled", "dr": 0.125,
                 "r_max": 32.0, "t_end": 8.0, "gamma": 0.5, "mu": -0.25,
                 "q0": 2.0,
                 "data": [ { "component": "A_r", "amplitude": 0.001,
                             "basis": 2, "velocity": "outgoing",
                             "profile": { "kind": "bump", "r0": 7.0,
                                          "width": 4.0 } } ] }"#,
        );
        let solver = cfg.to_solver().expect("valid config");
        assert_eq!(solver.mode, RunMode::Coupled);
        let d = &solver.data[0];
        assert_eq!(d.component, "A_r");
        assert_eq!(d.basis, 2);
        assert_eq!(d.velocity, Velocity::Outgoing);
        assert_eq!(d.profile, Profile::Bump { r0: 7.0, width: 4.0 });
    }
}
