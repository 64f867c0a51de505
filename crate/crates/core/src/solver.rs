//! Method-of-lines evolution of the first-order-in-time reduction of
//! g^{ab} d_a d_b Phi = S on the radial grid, classical RK4 in time.
//!
//! The second-order equation is solved for the acceleration:
//!
//! ```text
//!   d_t^2 Phi = [ S - 2 g^{tr} d_r Pi - g^{rr} (d_r^2 + (n-1)/r d_r) Phi ] / g^{tt},
//! ```
//!
//! with the parity limit (n-1) d_r^2 Phi(0) replacing the 1/r term at the
//! origin for even components; odd components are pinned to zero there.
//!
//! Modes: `Linear` evolves a single scalar with S = 0 (optionally on a
//! prescribed decaying background H^{tt}); `YangMillsOnly` evolves (A_t, A_r)
//! with the gauge source on flat geometry; `Coupled` adds (h_tt, h_tr, h_rr),
//! with g = m + h rebuilt from the evolving perturbation at every stage.
//! Angular gauge components and angular metric derivatives are dropped (ray
//! truncation); the emitted records label this.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{Algebra, LieValue};
use crate::diagnostics::{
    conservation_integrands, energy_ext, initial_norm, DecaySample, DiagnosticsError, EnergyLedger,
};
use crate::fields::{ComponentField, ComponentSpec, Family, COUPLED_SET, SCALAR_SET};
use crate::geometry::{build_metric, build_metric_with_derivs, radial_h, MetricPoint};
use crate::grid::{deriv2_r, deriv_r, sample_linear, Parity, RadialGrid};
use crate::num;
use crate::sources::{curvature_f, curvature_norm_sq, source_a, source_h, GaugeJets, MetricJets, PqgModel, SourceError};
use crate::symmetry::{lie_hierarchy, MAX_HIERARCHY_LEVEL};
use crate::weights::WeightParams;

/// Evolution aborts when g^{tt} rises above this anywhere on the grid.
pub const DEGENERACY_FLOOR: f64 = -0.5;
/// Number of cone-band offsets sampled for decay fits, spaced 0.5 in q.
pub const DECAY_OFFSETS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    /// Single scalar, S = 0, metric flat or prescribed background.
    Linear,
    /// Gauge pair (A_t, A_r) with the full gauge source on flat geometry.
    YangMillsOnly,
    /// Gauge pair plus radial metric perturbation (h_tt, h_tr, h_rr).
    Coupled,
}

impl RunMode {
    pub fn component_set(self) -> &'static [ComponentSpec] {
        match self {
            RunMode::Linear => &SCALAR_SET,
            RunMode::YangMillsOnly => &COUPLED_SET[..2],
            RunMode::Coupled => &COUPLED_SET,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            RunMode::Linear => "linear",
            RunMode::YangMillsOnly => "yang-mills",
            RunMode::Coupled => "coupled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// Smooth compactly supported mollifier exp(-x^2/(width^2 - x^2)) on
    /// |x| < width, x = r - r0; identically 0 outside.
    Bump { r0: f64, width: f64 },
    /// (1 + r)^{-p}.
    PolyDecay { p: f64 },
}

impl Profile {
    /// Default polynomial fall-off (n-1)/2 + gamma + 1, the slowest rate the
    /// weighted initial norms accept.
    pub fn poly_default(n: usize, gamma: f64) -> Profile {
        Profile::PolyDecay {
            p: (n as f64 - 1.0) / 2.0 + gamma + 1.0,
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Profile::Bump { r0, width } => {
                let x = r - r0;
                let d = width * width - x * x;
                if d <= 0.0 {
                    0.0
                } else {
                    num::exp(-x * x / d)
                }
            }
            Profile::PolyDecay { p } => num::powf(1.0 + r, -p),
        }
    }

    pub fn deriv(&self, r: f64) -> f64 {
        match *self {
            Profile::Bump { r0, width } => {
                let x = r - r0;
                let d = width * width - x * x;
                if d <= 0.0 {
                    0.0
                } else {
                    // d/dx exp(-x^2/d) with d = w^2 - x^2.
                    self.eval(r) * (-2.0 * x * width * width) / (d * d)
                }
            }
            Profile::PolyDecay { p } => -p * num::powf(1.0 + r, -p - 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Velocity {
    /// Pi(0) = 0: time-symmetric data.
    Zero,
    /// Pi(0) = -d_r Phi(0): purely outgoing to leading order.
    Outgoing,
}

#[derive(Debug, Clone)]
pub struct InitialDataSpec {
    pub component: String,
    pub amplitude: f64,
    pub profile: Profile,
    /// Lie-algebra basis direction; must be 0 for metric components, whose
    /// values are scalars embedded in coefficient 0.
    pub basis: usize,
    pub velocity: Velocity,
}

/// Prescribed decaying background for isolating the energy estimate from the
/// metric evolution: H^{tt} = -c eps (1+t+|q|)^{-(n-1)/2} (1+|q|)^{-(1+gamma)},
/// all other H components zero.
#[derive(Debug, Clone, Copy)]
pub struct Background {
    pub c: f64,
    pub eps: f64,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub n: usize,
    pub alg: Algebra,
    pub mode: RunMode,
    pub dr: f64,
    pub r_max: f64,
    /// dt = cfl * dr.
    pub cfl: f64,
    pub t_end: f64,
    pub weights: WeightParams,
    pub data: Vec<InitialDataSpec>,
    /// Hierarchy depth N for the energy ledger.
    pub level: usize,
    /// Ledger rows and decay samples are committed every `cadence` steps.
    pub cadence: usize,
    /// Enable the stand-in quasilinear/weak-null metric self-interaction.
    pub include_pqg: bool,
    pub background: Option<Background>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolverError {
    Config(String),
    Numerics(String),
}

impl core::fmt::Display for SolverError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SolverError::Config(msg) => write!(f, "config: {msg}"),
            SolverError::Numerics(msg) => write!(f, "numerics: {msg}"),
        }
    }
}

impl SolverConfig {
    /// Full cross-field validation; returns the grid on success.
    pub fn validate(&self) -> Result<RadialGrid, SolverError> {
        let grid = RadialGrid::new(self.n, self.dr, self.r_max)
            .map_err(|e| SolverError::Config(format!("{e}")))?;
        self.weights
            .validate()
            .map_err(|e| SolverError::Config(format!("{e}")))?;
        if !(self.cfl > 0.0 && self.cfl <= 0.9) {
            return Err(SolverError::Config(format!(
                "cfl factor {} outside (0, 0.9]",
                self.cfl
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(SolverError::Config(format!("bad horizon t_end = {}", self.t_end)));
        }
        let bound = self.r_max - 4.0 * self.dr;
        if self.t_end + self.weights.q0 >= bound {
            return Err(SolverError::Config(format!(
                "horizon exhausts the exterior: t_end + q0 = {} must stay below r_max - 4 dr = {bound}",
                self.t_end + self.weights.q0
            )));
        }
        if self.level > MAX_HIERARCHY_LEVEL {
            return Err(SolverError::Config(format!(
                "hierarchy level {} exceeds the maximum {MAX_HIERARCHY_LEVEL}",
                self.level
            )));
        }
        if self.cadence == 0 {
            return Err(SolverError::Config(String::from("cadence must be at least 1")));
        }
        if let Some(bg) = &self.background {
            if self.mode != RunMode::Linear {
                return Err(SolverError::Config(String::from(
                    "prescribed background is only meaningful in linear mode",
                )));
            }
            if !(bg.c.is_finite() && bg.eps.is_finite() && bg.c >= 0.0 && bg.eps >= 0.0) {
                return Err(SolverError::Config(format!(
                    "background requires finite c, eps >= 0; got c = {}, eps = {}",
                    bg.c, bg.eps
                )));
            }
        }
        let set = self.mode.component_set();
        for d in &self.data {
            let spec = set
                .iter()
                .find(|s| s.name == d.component)
                .ok_or_else(|| {
                    SolverError::Config(format!(
                        "component '{}' does not exist in {} mode",
                        d.component,
                        self.mode.token()
                    ))
                })?;
            if !d.amplitude.is_finite() {
                return Err(SolverError::Config(format!(
                    "amplitude of '{}' is not finite",
                    d.component
                )));
            }
            if d.basis >= self.alg.dim() {
                return Err(SolverError::Config(format!(
                    "basis index {} out of range for the {}-dimensional algebra",
                    d.basis,
                    self.alg.dim()
                )));
            }
            if spec.family == Family::Metric && d.basis != 0 {
                return Err(SolverError::Config(format!(
                    "metric component '{}' is scalar: basis must be 0",
                    d.component
                )));
            }
            match d.profile {
                Profile::Bump { r0, width } => {
                    if !(width > 0.0 && r0 >= 0.0 && r0 + width <= self.r_max) {
                        return Err(SolverError::Config(format!(
                            "bump (r0 = {r0}, width = {width}) not supported inside [0, {}]",
                            self.r_max
                        )));
                    }
                    if spec.parity == Parity::Odd && r0 - width < 0.0 {
                        return Err(SolverError::Config(format!(
                            "odd component '{}' needs a bump clear of the origin",
                            d.component
                        )));
                    }
                }
                Profile::PolyDecay { p } => {
                    if !(p > 0.0) {
                        return Err(SolverError::Config(format!(
                            "polynomial decay rate must be positive, got {p}"
                        )));
                    }
                    if spec.parity == Parity::Odd {
                        return Err(SolverError::Config(format!(
                            "odd component '{}' cannot carry (1+r)^-p data (nonzero at r = 0)",
                            d.component
                        )));
                    }
                }
            }
        }
        Ok(grid)
    }

    fn pqg(&self) -> PqgModel {
        if self.include_pqg {
            PqgModel::StandardWeakNull
        } else {
            PqgModel::Off
        }
    }
}

/// Initial slice from the data specs: u = amplitude * profile * basis vector,
/// pi per the velocity rule (analytic profile derivative, not a stencil).
pub fn initial_field(cfg: &SolverConfig, grid: &RadialGrid) -> Result<ComponentField, SolverError> {
    let mut field = ComponentField::zeros(cfg.mode.component_set(), cfg.alg, grid);
    for d in &cfg.data {
        let dir = LieValue::basis(cfg.alg, d.basis);
        let comp = field
            .find_mut(&d.component)
            .ok_or_else(|| SolverError::Config(format!("no component '{}'", d.component)))?;
        for j in 0..grid.len() {
            let r = grid.r(j);
            comp.u[j] = comp.u[j].add_scaled(d.amplitude * d.profile.eval(r), &dir);
            if d.velocity == Velocity::Outgoing {
                comp.pi[j] = comp.pi[j].add_scaled(-d.amplitude * d.profile.deriv(r), &dir);
            }
        }
    }
    field
        .validate(grid)
        .map_err(|e| SolverError::Config(format!("initial data invalid: {e}")))?;
    Ok(field)
}

// --------------------------------------------------------------------------
// Right-hand side.
// --------------------------------------------------------------------------

/// A failure during a right-hand-side or stage evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepIssue {
    MetricDegenerate { t: f64 },
    NonFinite { t: f64 },
}

/// Time derivative of the full state: u_dot = Pi, pi_dot = acceleration.
#[derive(Debug, Clone)]
pub struct Rhs {
    pub u_dot: Vec<Vec<LieValue>>,
    pub pi_dot: Vec<Vec<LieValue>>,
}

/// The prescribed-background perturbation H^{tt} and its (t, r) derivatives.
pub fn background_h_tt(bg: &Background, n: usize, gamma: f64, t: f64, r: f64) -> (f64, f64, f64) {
    let q = r - t;
    let aq = num::abs(q);
    let s = if q >= 0.0 { 1.0 } else { -1.0 };
    let p = 1.0 + t + aq;
    let qq = 1.0 + aq;
    let a = (n as f64 - 1.0) / 2.0;
    let b = 1.0 + gamma;
    let h = -bg.c * bg.eps * num::powf(p, -a) * num::powf(qq, -b);
    // d_t|q| = -s, d_r|q| = s.
    let dh_dt = h * (-a * (1.0 - s) / p - b * (-s) / qq);
    let dh_dr = h * (-a * s / p - b * s / qq);
    (h, dh_dt, dh_dr)
}

/// Per-node inverse-metric rows (g^{tt}, g^{tr}, g^{rr}), with the
/// degeneracy abort g^{tt} > -1/2.
fn metric_rows(
    state: &ComponentField,
    grid: &RadialGrid,
    cfg: &SolverConfig,
    du: &[Vec<LieValue>],
) -> Result<Vec<(f64, f64, f64)>, StepIssue> {
    let len = grid.len();
    let t = state.t;
    match cfg.mode {
        RunMode::Linear => {
            if let Some(bg) = &cfg.background {
                let mut rows = Vec::with_capacity(len);
                for j in 0..len {
                    let (h, _, _) = background_h_tt(bg, cfg.n, cfg.weights.gamma, t, grid.r(j));
                    let gtt = -1.0 + h;
                    if !(gtt <= DEGENERACY_FLOOR) {
                        return Err(StepIssue::MetricDegenerate { t });
                    }
                    rows.push((gtt, 0.0, 1.0));
                }
                Ok(rows)
            } else {
                Ok(vec![(-1.0, 0.0, 1.0); len])
            }
        }
        RunMode::YangMillsOnly => Ok(vec![(-1.0, 0.0, 1.0); len]),
        RunMode::Coupled => {
            let _ = du;
            let mut rows = Vec::with_capacity(len);
            for j in 0..len {
                let htt = state.comps[2].u[j].scalar();
                let htr = state.comps[3].u[j].scalar();
                let hrr = state.comps[4].u[j].scalar();
                // 2x2 inverse of the (t, r) block of m + h; angular block is
                // the identity.
                let det = (-1.0 + htt) * (1.0 + hrr) - htr * htr;
                if det == 0.0 || !det.is_finite() {
                    return Err(StepIssue::MetricDegenerate { t });
                }
                let gtt = (1.0 + hrr) / det;
                let gtr = -htr / det;
                let grr = (-1.0 + htt) / det;
                if !(gtt <= DEGENERACY_FLOOR) {
                    return Err(StepIssue::MetricDegenerate { t });
                }
                rows.push((gtt, gtr, grr));
            }
            Ok(rows)
        }
    }
}

/// Shared per-node jets for the source terms. `du[c][j]` are the radial
/// derivatives of every component.
fn node_jets(
    state: &ComponentField,
    du: &[Vec<LieValue>],
    j: usize,
    n: usize,
    coupled: bool,
) -> (GaugeJets, MetricJets) {
    let mut g = GaugeJets::zero(n, state.alg);
    g.a[0] = state.comps[0].u[j];
    g.a[1] = state.comps[1].u[j];
    g.da[0][0] = state.comps[0].pi[j];
    g.da[0][1] = state.comps[1].pi[j];
    g.da[1][0] = du[0][j];
    g.da[1][1] = du[1][j];
    let mut m = MetricJets::zero(n);
    if coupled {
        m.h = radial_h(
            n,
            state.comps[2].u[j].scalar(),
            state.comps[3].u[j].scalar(),
            state.comps[4].u[j].scalar(),
        );
        m.dh[0] = radial_h(
            n,
            state.comps[2].pi[j].scalar(),
            state.comps[3].pi[j].scalar(),
            state.comps[4].pi[j].scalar(),
        );
        m.dh[1] = radial_h(
            n,
            du[2][j].scalar(),
            du[3][j].scalar(),
            du[4][j].scalar(),
        );
    }
    (g, m)
}

fn lift_source(e: SourceError, t: f64) -> StepIssue {
    match e {
        SourceError::BadJet(_) => StepIssue::NonFinite { t },
        SourceError::BadIndex(_) => StepIssue::NonFinite { t },
    }
}

/// Evaluates the time derivative of the state.
pub fn rhs(state: &ComponentField, grid: &RadialGrid, cfg: &SolverConfig) -> Result<Rhs, StepIssue> {
    let len = grid.len();
    let t = state.t;
    let n = cfg.n;
    let nc = state.comps.len();

    let mut du = Vec::with_capacity(nc);
    let mut du2 = Vec::with_capacity(nc);
    let mut dpi = Vec::with_capacity(nc);
    for comp in &state.comps {
        let par = comp.spec.parity;
        du.push(deriv_r(&comp.u, grid, par).map_err(|_| StepIssue::NonFinite { t })?);
        du2.push(deriv2_r(&comp.u, grid, par).map_err(|_| StepIssue::NonFinite { t })?);
        dpi.push(deriv_r(&comp.pi, grid, par).map_err(|_| StepIssue::NonFinite { t })?);
    }

    let rows = metric_rows(state, grid, cfg, &du)?;

    let mut pi_dot: Vec<Vec<LieValue>> = state
        .comps
        .iter()
        .map(|_| vec![LieValue::zero(state.alg); len])
        .collect();

    for (c, comp) in state.comps.iter().enumerate() {
        let par = comp.spec.parity;
        for j in 0..len {
            if j == 0 && par == Parity::Odd {
                continue; // pinned to zero by parity
            }
            let (gtt, gtr, grr) = rows[j];
            let lap = if j == 0 {
                // (d_r^2 + (n-1)/r d_r) -> n d_r^2 at the origin for even
                // profiles.
                du2[c][0].scale(n as f64)
            } else {
                du2[c][j].add_scaled((n as f64 - 1.0) / grid.r(j), &du[c][j])
            };
            pi_dot[c][j] = dpi[c][j]
                .scale(-2.0 * gtr)
                .add_scaled(-grr, &lap)
                .scale(1.0 / gtt);
        }
    }

    if cfg.mode != RunMode::Linear {
        let coupled = cfg.mode == RunMode::Coupled;
        let pqg = cfg.pqg();
        for j in 0..len {
            let gtt = rows[j].0;
            let (gauge, metric) = node_jets(state, &du, j, n, coupled);
            let sa_t = source_a(0, &gauge, &metric).map_err(|e| lift_source(e, t))?;
            pi_dot[0][j] = pi_dot[0][j].add_scaled(1.0 / gtt, &sa_t);
            if j > 0 {
                let sa_r = source_a(1, &gauge, &metric).map_err(|e| lift_source(e, t))?;
                pi_dot[1][j] = pi_dot[1][j].add_scaled(1.0 / gtt, &sa_r);
            }
            if coupled {
                for (c, (mu, nu)) in [(2usize, (0usize, 0usize)), (3, (0, 1)), (4, (1, 1))] {
                    if j == 0 && state.comps[c].spec.parity == Parity::Odd {
                        continue;
                    }
                    let s = source_h(mu, nu, &gauge, &metric, pqg)
                        .map_err(|e| lift_source(e, t))?;
                    pi_dot[c][j] = pi_dot[c][j]
                        .add_scaled(s / gtt, &LieValue::from_scalar(state.alg, 1.0));
                }
            }
        }
    }

    let u_dot = state.comps.iter().map(|c| c.pi.clone()).collect();
    Ok(Rhs { u_dot, pi_dot })
}

fn shifted(base: &ComponentField, k: &Rhs, s: f64) -> ComponentField {
    let mut out = base.clone();
    out.t = base.t + s;
    for (c, comp) in out.comps.iter_mut().enumerate() {
        for j in 0..comp.u.len() {
            comp.u[j] = comp.u[j].add_scaled(s, &k.u_dot[c][j]);
            comp.pi[j] = comp.pi[j].add_scaled(s, &k.pi_dot[c][j]);
        }
    }
    out
}

/// One classical RK4 step reusing a precomputed first stage.
pub fn rk4_advance(
    state: &mut ComponentField,
    k1: &Rhs,
    grid: &RadialGrid,
    cfg: &SolverConfig,
    dt: f64,
) -> Result<(), StepIssue> {
    let y2 = shifted(state, k1, 0.5 * dt);
    let k2 = rhs(&y2, grid, cfg)?;
    let y3 = shifted(state, &k2, 0.5 * dt);
    let k3 = rhs(&y3, grid, cfg)?;
    let y4 = shifted(state, &k3, dt);
    let k4 = rhs(&y4, grid, cfg)?;
    let w = dt / 6.0;
    for (c, comp) in state.comps.iter_mut().enumerate() {
        for j in 0..comp.u.len() {
            comp.u[j] = comp.u[j]
                .add_scaled(w, &k1.u_dot[c][j])
                .add_scaled(2.0 * w, &k2.u_dot[c][j])
                .add_scaled(2.0 * w, &k3.u_dot[c][j])
                .add_scaled(w, &k4.u_dot[c][j]);
            comp.pi[j] = comp.pi[j]
                .add_scaled(w, &k1.pi_dot[c][j])
                .add_scaled(2.0 * w, &k2.pi_dot[c][j])
                .add_scaled(2.0 * w, &k3.pi_dot[c][j])
                .add_scaled(w, &k4.pi_dot[c][j]);
        }
    }
    state.t += dt;
    Ok(())
}

/// One full RK4 step from scratch.
pub fn step_rk4(
    state: &mut ComponentField,
    grid: &RadialGrid,
    cfg: &SolverConfig,
    dt: f64,
) -> Result<(), StepIssue> {
    let k1 = rhs(state, grid, cfg)?;
    rk4_advance(state, &k1, grid, cfg, dt)
}

// --------------------------------------------------------------------------
// Full metric points for the conservation diagnostics.
// --------------------------------------------------------------------------

/// Per-node [`MetricPoint`]s including first derivatives of the perturbation.
pub fn metric_points(
    state: &ComponentField,
    grid: &RadialGrid,
    cfg: &SolverConfig,
) -> Result<Vec<MetricPoint>, StepIssue> {
    let t = state.t;
    let n = cfg.n;
    let len = grid.len();
    match cfg.mode {
        RunMode::Linear if cfg.background.is_some() => {
            let bg = cfg.background.as_ref().unwrap();
            let mut out = Vec::with_capacity(len);
            for j in 0..len {
                let (h, dh_dt, dh_dr) = background_h_tt(bg, n, cfg.weights.gamma, t, grid.r(j));
                // Lower the prescribed upper perturbation: with only H^{tt}
                // set, h_tt = H^{tt}/(-1 + H^{tt}) and
                // dh_tt = -dH^{tt}/(-1 + H^{tt})^2.
                let den = -1.0 + h;
                let htt = h / den;
                let sc = -1.0 / (den * den);
                let pt = build_metric_with_derivs(
                    n,
                    &radial_h(n, htt, 0.0, 0.0),
                    &radial_h(n, sc * dh_dt, 0.0, 0.0),
                    &radial_h(n, sc * dh_dr, 0.0, 0.0),
                )
                .map_err(|_| StepIssue::MetricDegenerate { t })?;
                out.push(pt);
            }
            Ok(out)
        }
        RunMode::Linear | RunMode::YangMillsOnly => {
            let pt = build_metric(n, &crate::mat::SqMat::zero(n + 1))
                .map_err(|_| StepIssue::MetricDegenerate { t })?;
            Ok(vec![pt; len])
        }
        RunMode::Coupled => {
            let mut du = Vec::with_capacity(3);
            for c in 2..5 {
                du.push(
                    deriv_r(&state.comps[c].u, grid, state.comps[c].spec.parity)
                        .map_err(|_| StepIssue::NonFinite { t })?,
                );
            }
            let mut out = Vec::with_capacity(len);
            for j in 0..len {
                let h = radial_h(
                    n,
                    state.comps[2].u[j].scalar(),
                    state.comps[3].u[j].scalar(),
                    state.comps[4].u[j].scalar(),
                );
                let dt_h = radial_h(
                    n,
                    state.comps[2].pi[j].scalar(),
                    state.comps[3].pi[j].scalar(),
                    state.comps[4].pi[j].scalar(),
                );
                let dr_h = radial_h(n, du[0][j].scalar(), du[1][j].scalar(), du[2][j].scalar());
                let pt = build_metric_with_derivs(n, &h, &dt_h, &dr_h)
                    .map_err(|_| StepIssue::MetricDegenerate { t })?;
                out.push(pt);
            }
            Ok(out)
        }
    }
}

// --------------------------------------------------------------------------
// Evolution driver.
// --------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Completed,
    MetricDegenerate { t: f64 },
    NanDetected { t: f64 },
    DomainExhausted { t: f64 },
}

impl RunStatus {
    pub fn label(&self) -> String {
        match self {
            RunStatus::Completed => String::from("completed"),
            RunStatus::MetricDegenerate { t } => format!("metric degenerate at t = {t}"),
            RunStatus::NanDetected { t } => format!("non-finite state at t = {t}"),
            RunStatus::DomainExhausted { t } => format!("domain exhausted at t = {t}"),
        }
    }

    pub fn is_completed(&self) -> bool {
        matches!(self, RunStatus::Completed)
    }
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub status: RunStatus,
    pub ledger: EnergyLedger,
    pub decay: Vec<DecaySample>,
    pub final_field: ComponentField,
    pub steps: usize,
    pub dt: f64,
}

fn issue_status(issue: StepIssue) -> RunStatus {
    match issue {
        StepIssue::MetricDegenerate { t } => RunStatus::MetricDegenerate { t },
        StepIssue::NonFinite { t } => RunStatus::NanDetected { t },
    }
}

/// Observable arrays for decay sampling: gradient norms per family, gauge
/// value norm, curvature norm.
fn decay_arrays(
    state: &ComponentField,
    grid: &RadialGrid,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>), StepIssue> {
    let len = grid.len();
    let t = state.t;
    let mut grad_g = vec![0.0; len];
    let mut grad_m = vec![0.0; len];
    let mut val_g = vec![0.0; len];
    let mut curv = vec![0.0; len];
    let mut du = Vec::with_capacity(state.comps.len());
    for comp in &state.comps {
        du.push(
            deriv_r(&comp.u, grid, comp.spec.parity).map_err(|_| StepIssue::NonFinite { t })?,
        );
    }
    for (c, comp) in state.comps.iter().enumerate() {
        for j in 0..len {
            let g2 = comp.pi[j].norm_sq() + du[c][j].norm_sq();
            match comp.spec.family {
                Family::Gauge => {
                    grad_g[j] += g2;
                    val_g[j] += comp.u[j].norm_sq();
                }
                Family::Metric => grad_m[j] += g2,
            }
        }
    }
    if cfg.mode != RunMode::Linear {
        for j in 0..len {
            let (gauge, _) = node_jets(state, &du, j, cfg.n, false);
            let f = curvature_f(&gauge);
            curv[j] = num::sqrt(curvature_norm_sq(&f, cfg.n));
        }
    }
    for j in 0..len {
        grad_g[j] = num::sqrt(grad_g[j]);
        grad_m[j] = num::sqrt(grad_m[j]);
        val_g[j] = num::sqrt(val_g[j]);
    }
    Ok((grad_g, grad_m, val_g, curv))
}

/// Advances the configured system to t_end, accumulating the conservation
/// ledger every step and committing rows/decay samples at the cadence.
/// Abnormal terminations land in the record's status, not in `Err`.
pub fn evolve(cfg: &SolverConfig) -> Result<RunRecord, SolverError> {
    let grid = cfg.validate()?;
    let mut state = initial_field(cfg, &grid)?;
    let dt0 = cfg.cfl * grid.dr;
    let steps = if cfg.t_end > 0.0 {
        num::max(1.0, libm::ceil(cfg.t_end / dt0 - 1e-12)) as usize
    } else {
        0
    };
    let dt = if steps > 0 { cfg.t_end / steps as f64 } else { 0.0 };

    let eps_scale = {
        let m = cfg
            .data
            .iter()
            .fold(0.0f64, |m, d| num::max(m, num::abs(d.amplitude)));
        if m > 0.0 {
            m
        } else {
            1.0
        }
    };
    let mut ledger = EnergyLedger::new(cfg.n, cfg.level, eps_scale);
    let mut decay = Vec::new();
    let mut status = RunStatus::Completed;

    for step in 0..=steps {
        if state.validate(&grid).is_err() {
            status = RunStatus::NanDetected { t: state.t };
            break;
        }
        let k1 = match rhs(&state, &grid, cfg) {
            Ok(k) => k,
            Err(issue) => {
                status = issue_status(issue);
                break;
            }
        };
        let pts = match metric_points(&state, &grid, cfg) {
            Ok(p) => p,
            Err(issue) => {
                status = issue_status(issue);
                break;
            }
        };
        match conservation_integrands(&state, &grid, &pts, &k1.pi_dot, &cfg.weights) {
            Ok(s) => ledger.accumulate(s),
            Err(DiagnosticsError::DomainExhausted { .. }) => {
                status = RunStatus::DomainExhausted { t: state.t };
                break;
            }
            Err(e) => return Err(SolverError::Numerics(format!("conservation integrands: {e}"))),
        }
        if step % cfg.cadence == 0 || step == steps {
            let hier = lie_hierarchy(&state, &grid, &k1.pi_dot, cfg.level)
                .map_err(|e| SolverError::Numerics(format!("hierarchy: {e}")))?;
            if step == 0 {
                ledger.e_bar0 = initial_norm(&hier, &grid, cfg.weights.gamma)
                    .map_err(|e| SolverError::Numerics(format!("initial norm: {e}")))?;
            }
            match energy_ext(&hier, &grid, &cfg.weights) {
                Ok(e) => ledger.commit_row(e.per_level, state.max_abs()),
                Err(DiagnosticsError::DomainExhausted { .. }) => {
                    status = RunStatus::DomainExhausted { t: state.t };
                    break;
                }
                Err(e) => return Err(SolverError::Numerics(format!("energy: {e}"))),
            }
            let (grad_g, grad_m, val_g, curv) = match decay_arrays(&state, &grid, cfg) {
                Ok(a) => a,
                Err(issue) => {
                    status = issue_status(issue);
                    break;
                }
            };
            for k in 0..DECAY_OFFSETS {
                let q = cfg.weights.q0 + 0.5 * k as f64;
                let r = state.t + q;
                if r >= grid.dr && r <= grid.r_max - grid.dr {
                    decay.push(DecaySample {
                        t: state.t,
                        q,
                        grad_gauge: sample_linear(&grad_g, &grid, r),
                        grad_metric: sample_linear(&grad_m, &grid, r),
                        value_gauge: sample_linear(&val_g, &grid, r),
                        curvature: sample_linear(&curv, &grid, r),
                    });
                }
            }
        }
        if step == steps {
            break;
        }
        if let Err(issue) = rk4_advance(&mut state, &k1, &grid, cfg, dt) {
            status = issue_status(issue);
            break;
        }
    }

    Ok(RunRecord {
        status,
        ledger,
        decay,
        final_field: state,
        steps,
        dt,
    })
}
