//! Weighted exterior energies, the discrete conservation ledger, Hardy and
//! pointwise-decay checks, decay-rate fits, and Gronwall/bootstrap monitors.
//!
//! Conservation bookkeeping integrates the exact balance
//!
//! ```text
//!   d/dt int_ext T_tt wt  +  int_ext (T_tt + T_rt) wt'
//!     + |S^{n-1}| (t+q0)^{n-1} wt(q0) (T_tt + T_rt)|_{r=t+q0}
//!     + int_ext (d^u T_{ut}) wt  =  0,
//! ```
//!
//! over the exterior { r >= t + q0 } with wt = w_tilde (and an unweighted
//! variant wt = 1, whose tangential term vanishes). The running residual of
//! a run measures pure discretization error, normalized by E_0(t1)^2.
//!
//! Energies follow the hierarchy convention: E_k = sum over words |J| <= k
//! of per-family norms ||w^{1/2} d(L_J phi)||, each norm carrying the word's
//! angular weight inside the square root.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::LieValue;
use crate::fields::{ComponentField, Family};
use crate::geometry::{smallness_check, MetricPoint};
use crate::grid::{deriv2_r, deriv_r, integrate_exterior, sample_linear, GridError, Parity, RadialGrid};
use crate::mat::SqMat;
use crate::num;
use crate::stress::{
    divergence_t_with_spatial_div, stress_trt, stress_ttt, tangential_split, Jet1, Jet2, Position,
};
use crate::symmetry::Hierarchy;
use crate::weights::{eval_weights, WeightParams};

const TINY: f64 = 1e-30;
/// Samples below this magnitude are treated as numerical noise in fits.
pub const NOISE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub enum DiagnosticsError {
    BadInput(String),
    /// The cone cut leaves fewer than four cells of grid: the run horizon
    /// exhausted the domain.
    DomainExhausted { t: f64, q0: f64 },
    /// The field fails the decay precondition at the outer grid edge.
    InsufficientDecay { boundary: f64, max: f64 },
    /// Too few usable samples for a fit or monitor.
    TooFewSamples { needed: usize, got: usize },
}

impl core::fmt::Display for DiagnosticsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DiagnosticsError::BadInput(msg) => write!(f, "bad input: {msg}"),
            DiagnosticsError::DomainExhausted { t, q0 } => {
                write!(f, "domain exhausted: cone cut t + q0 = {} leaves no grid", t + q0)
            }
            DiagnosticsError::InsufficientDecay { boundary, max } => write!(
                f,
                "insufficient decay at grid edge: |phi(r_max)| = {boundary} vs max {max}"
            ),
            DiagnosticsError::TooFewSamples { needed, got } => {
                write!(f, "too few samples: need {needed}, got {got}")
            }
        }
    }
}

fn lift_grid(e: GridError, t: f64, q0: f64) -> DiagnosticsError {
    match e {
        GridError::DomainExhausted { .. } => DiagnosticsError::DomainExhausted { t, q0 },
        other => DiagnosticsError::BadInput(format!("grid failure: {other:?}")),
    }
}

// --------------------------------------------------------------------------
// Weighted exterior energies.
// --------------------------------------------------------------------------

/// Energy content of one hierarchy snapshot: cumulative levels E_0..E_N and
/// the per-word family norms backing them.
#[derive(Debug, Clone)]
pub struct EnergyBreakdown {
    pub t: f64,
    /// per_level[k] = E_k.
    pub per_level: Vec<f64>,
    /// (word label, gauge-family norm, metric-family norm).
    pub per_word: Vec<(String, f64, f64)>,
}

fn family_norm(
    word: &crate::symmetry::DerivedWord,
    family: Family,
    grid: &RadialGrid,
    wp: &WeightParams,
    t: f64,
) -> Result<f64, DiagnosticsError> {
    let mut density = vec![0.0; grid.len()];
    let mut present = false;
    for comp in word.comps.iter().filter(|c| c.family == family) {
        present = true;
        let du = deriv_r(&comp.u, grid, comp.parity).map_err(|e| lift_grid(e, t, wp.q0))?;
        for j in 0..grid.len() {
            density[j] += comp.pi[j].norm_sq() + du[j].norm_sq();
        }
    }
    if !present {
        return Ok(0.0);
    }
    let sq = integrate_exterior(&density, grid, t, wp.q0, |q| {
        eval_weights(q, wp).map(|s| s.w).unwrap_or(0.0)
    })
    .map_err(|e| lift_grid(e, t, wp.q0))?;
    Ok(num::sqrt(num::max(word.angular_weight * sq, 0.0)))
}

/// Weighted exterior energy of a hierarchy snapshot, by level and word.
pub fn energy_ext(
    hier: &Hierarchy,
    grid: &RadialGrid,
    wp: &WeightParams,
) -> Result<EnergyBreakdown, DiagnosticsError> {
    let t = hier.t;
    let mut per_word = Vec::new();
    let mut per_level = vec![0.0; hier.level + 1];
    for word in hier.words.iter() {
        let g = family_norm(word, Family::Gauge, grid, wp, t)?;
        let m = family_norm(word, Family::Metric, grid, wp, t)?;
        for k in word.order..=hier.level {
            per_level[k] += g + m;
        }
        per_word.push((word.label.clone(), g, m));
    }
    Ok(EnergyBreakdown {
        t,
        per_level,
        per_word,
    })
}

/// Flat initial-data norm: like the energy but over the whole slice, with
/// weight (1+r)^{1+2*gamma+2|J|} on the squared gradient of each word.
pub fn initial_norm(
    hier: &Hierarchy,
    grid: &RadialGrid,
    gamma: f64,
) -> Result<f64, DiagnosticsError> {
    let mut total = 0.0;
    for word in hier.words.iter() {
        for family in [Family::Gauge, Family::Metric] {
            let mut density = vec![0.0; grid.len()];
            let mut present = false;
            for comp in word.comps.iter().filter(|c| c.family == family) {
                present = true;
                let du = deriv_r(&comp.u, grid, comp.parity)
                    .map_err(|e| lift_grid(e, hier.t, 0.0))?;
                for j in 0..grid.len() {
                    density[j] += comp.pi[j].norm_sq() + du[j].norm_sq();
                }
            }
            if !present {
                continue;
            }
            let p = 1.0 + 2.0 * gamma + 2.0 * word.order as f64;
            // Whole-slice integral: exterior call with a cut below the grid.
            let sq = integrate_exterior(&density, grid, 0.0, -1.0, |q| {
                // q = r - t with t = 0 here, so 1 + r = 1 + q.
                num::powf(1.0 + num::max(q, 0.0), p)
            })
            .map_err(|e| lift_grid(e, hier.t, 0.0))?;
            total += num::sqrt(num::max(word.angular_weight * sq, 0.0));
        }
    }
    Ok(total)
}

// --------------------------------------------------------------------------
// Conservation integrands and the ledger.
// --------------------------------------------------------------------------

/// Pointwise exterior integrals of one snapshot, both weighted (w_tilde) and
/// unweighted, plus the good-sign tangential density against w_hat'.
#[derive(Debug, Clone, Copy)]
pub struct SliceIntegrands {
    pub t: f64,
    /// int T_tt w_tilde.
    pub slice_w: f64,
    /// int T_tt (unweighted).
    pub slice_1: f64,
    /// int (T_tt + T_rt) w_tilde'.
    pub tan_wtp: f64,
    /// int good_sq w_hat' (the manifestly nonnegative tangential integral).
    pub tan_good: f64,
    /// |S|(t+q0)^{n-1} w_tilde(q0) (T_tt+T_rt) at the cone cut.
    pub cone_w: f64,
    pub cone_1: f64,
    /// int (d^u T_{ut}) w_tilde.
    pub div_w: f64,
    pub div_1: f64,
    pub smallness_ok: bool,
}

/// Evaluates all conservation integrands of a snapshot. `metric[j]` is the
/// metric at grid node j; `accel[c][j]` is d_t^2 of component c there.
pub fn conservation_integrands(
    field: &ComponentField,
    grid: &RadialGrid,
    metric: &[MetricPoint],
    accel: &[Vec<LieValue>],
    wp: &WeightParams,
) -> Result<SliceIntegrands, DiagnosticsError> {
    let t = field.t;
    let q0 = wp.q0;
    let len = grid.len();
    if metric.len() != len || accel.len() != field.comps.len() {
        return Err(DiagnosticsError::BadInput(String::from(
            "metric or accel arrays do not match the grid",
        )));
    }
    let n = grid.n;

    let mut ttt = vec![0.0; len];
    let mut trt = vec![0.0; len];
    let mut good = vec![0.0; len];
    let mut div = vec![0.0; len];

    for (c, comp) in field.comps.iter().enumerate() {
        let par = comp.spec.parity;
        let du = deriv_r(&comp.u, grid, par).map_err(|e| lift_grid(e, t, q0))?;
        let du2 = deriv2_r(&comp.u, grid, par).map_err(|e| lift_grid(e, t, q0))?;
        let dpi = deriv_r(&comp.pi, grid, par).map_err(|e| lift_grid(e, t, q0))?;
        for j in 0..len {
            let r = grid.r(j);
            let pt = &metric[j];
            let pos = Position::on_axis(t, r);
            let jet = Jet1::radial(n, pos, comp.pi[j], du[j]);
            ttt[j] += stress_ttt(&jet, pt);
            if j > 0 {
                trt[j] += stress_trt(&jet, pt).map_err(|e| {
                    DiagnosticsError::BadInput(format!("stress at r={r}: {e:?}"))
                })?;
                let (g, _) = tangential_split(&jet, pt).map_err(|e| {
                    DiagnosticsError::BadInput(format!("split at r={r}: {e:?}"))
                })?;
                good[j] += g;
            } else {
                // Limits at the origin: the radial direction degenerates,
                // T_rt -> 0 by parity, and the only surviving good-derivative
                // term is the time one.
                good[j] += 0.5 * comp.pi[j].norm_sq();
            }

            let mut jet2 = Jet2::new(jet);
            jet2.set_dd(0, 0, accel[c][j]);
            jet2.set_dd(0, 1, dpi[j]);
            jet2.set_dd(1, 1, du2[j]);
            for k in 2..=n {
                // Radial profile: d_k d_k Phi = d_r Phi / r off axis, with the
                // even-parity limit d_r^2 Phi at the origin.
                let v = if j > 0 { du[j].scale(1.0 / r) } else { du2[j] };
                jet2.set_dd(k, k, v);
            }
            let mut div_h = [0.0; crate::mat::DMAX];
            if j > 0 {
                // d_j H^{j a} for the spherical extension H^{jk} ~ w_j w_k:
                // d_r H^{1a} + (n-1)/r H^{1a} on the axis.
                for al in 0..=n {
                    div_h[al] =
                        pt.d_big_h[1].a[1][al] + (n as f64 - 1.0) / r * pt.big_h_upper.a[1][al];
                }
            }
            div[j] += divergence_t_with_spatial_div(&jet2, pt, &div_h);
        }
    }

    let mut plus = vec![0.0; len];
    for j in 0..len {
        plus[j] = ttt[j] + trt[j];
    }

    let wt = |q: f64| eval_weights(q, wp).map(|s| s.w_tilde).unwrap_or(0.0);
    // The weight derivatives jump at q = 0 (interior vs exterior branch).
    // Quadrature samples landing exactly on q = 0 — the cone cut when
    // q0 = 0 — must take the exterior-side value, or the boundary cell
    // degrades the residual to first order.
    let from_right = |q: f64| if q == 0.0 { f64::MIN_POSITIVE } else { q };
    let wtp = |q: f64| {
        eval_weights(from_right(q), wp)
            .map(|s| s.w_tilde_prime)
            .unwrap_or(0.0)
    };
    let whp = |q: f64| {
        eval_weights(from_right(q), wp)
            .map(|s| s.w_hat_prime)
            .unwrap_or(0.0)
    };
    let one = |_q: f64| 1.0;

    let slice_w = integrate_exterior(&ttt, grid, t, q0, wt).map_err(|e| lift_grid(e, t, q0))?;
    let slice_1 = integrate_exterior(&ttt, grid, t, q0, one).map_err(|e| lift_grid(e, t, q0))?;
    let tan_wtp = integrate_exterior(&plus, grid, t, q0, wtp).map_err(|e| lift_grid(e, t, q0))?;
    let tan_good = integrate_exterior(&good, grid, t, q0, whp).map_err(|e| lift_grid(e, t, q0))?;
    let div_w = integrate_exterior(&div, grid, t, q0, wt).map_err(|e| lift_grid(e, t, q0))?;
    let div_1 = integrate_exterior(&div, grid, t, q0, one).map_err(|e| lift_grid(e, t, q0))?;

    let cut = t + q0;
    let (cone_w, cone_1) = if cut > 0.0 {
        let at_cut = sample_linear(&plus, grid, cut);
        let shell = grid.sphere_area * num::powf(cut, n as f64 - 1.0);
        let wq0 = wt(q0);
        (shell * wq0 * at_cut, shell * at_cut)
    } else {
        (0.0, 0.0)
    };

    // Smallness over the exterior nodes only; interior values do not enter
    // any weighted estimate.
    let mut smallness_ok = true;
    for (j, pt) in metric.iter().enumerate() {
        if grid.r(j) >= num::max(cut, 0.0) && !smallness_check(pt).ok {
            smallness_ok = false;
            break;
        }
    }

    Ok(SliceIntegrands {
        t,
        slice_w,
        slice_1,
        tan_wtp,
        tan_good,
        cone_w,
        cone_1,
        div_w,
        div_1,
        smallness_ok,
    })
}

/// One committed sample row of a run.
#[derive(Debug, Clone)]
pub struct LedgerRow {
    pub t: f64,
    /// E_0..E_N of the hierarchy at this time.
    pub e_levels: Vec<f64>,
    pub slice_w: f64,
    pub slice_1: f64,
    /// Cumulative time integrals from t = 0 to this row.
    pub cum_tan_wtp: f64,
    pub cum_tan_good: f64,
    pub cum_cone_w: f64,
    pub cum_cone_1: f64,
    pub cum_div_w: f64,
    pub cum_div_1: f64,
    /// Running conservation residual from the first row, normalized.
    pub residual_w: f64,
    pub residual_1: f64,
    pub smallness_ok: bool,
    pub max_abs: f64,
}

/// Append-only record of a run: per-step accumulators (trapezoid in time)
/// and committed rows at the sampling cadence.
#[derive(Debug, Clone)]
pub struct EnergyLedger {
    pub n: usize,
    pub level: usize,
    /// Data amplitude scale, used by the Gronwall monitor.
    pub eps: f64,
    /// Flat weighted initial-data norm.
    pub e_bar0: f64,
    pub rows: Vec<LedgerRow>,
    last: Option<SliceIntegrands>,
    cum_tan_wtp: f64,
    cum_tan_good: f64,
    cum_cone_w: f64,
    cum_cone_1: f64,
    cum_div_w: f64,
    cum_div_1: f64,
}

impl EnergyLedger {
    pub fn new(n: usize, level: usize, eps: f64) -> EnergyLedger {
        EnergyLedger {
            n,
            level,
            eps,
            e_bar0: 0.0,
            rows: Vec::new(),
            last: None,
            cum_tan_wtp: 0.0,
            cum_tan_good: 0.0,
            cum_cone_w: 0.0,
            cum_cone_1: 0.0,
            cum_div_w: 0.0,
            cum_div_1: 0.0,
        }
    }

    /// Advances the trapezoid accumulators to the snapshot `s`. Must be
    /// called once per time step, in increasing time order.
    pub fn accumulate(&mut self, s: SliceIntegrands) {
        if let Some(prev) = self.last {
            let dt = s.t - prev.t;
            self.cum_tan_wtp += 0.5 * dt * (prev.tan_wtp + s.tan_wtp);
            self.cum_tan_good += 0.5 * dt * (prev.tan_good + s.tan_good);
            self.cum_cone_w += 0.5 * dt * (prev.cone_w + s.cone_w);
            self.cum_cone_1 += 0.5 * dt * (prev.cone_1 + s.cone_1);
            self.cum_div_w += 0.5 * dt * (prev.div_w + s.div_w);
            self.cum_div_1 += 0.5 * dt * (prev.div_1 + s.div_1);
        }
        self.last = Some(s);
    }

    /// Commits a row at the current accumulator state. `e_levels` comes from
    /// [`energy_ext`] on the hierarchy at the same time.
    pub fn commit_row(&mut self, e_levels: Vec<f64>, max_abs: f64) {
        let s = match self.last {
            Some(s) => s,
            None => return,
        };
        let mut row = LedgerRow {
            t: s.t,
            e_levels,
            slice_w: s.slice_w,
            slice_1: s.slice_1,
            cum_tan_wtp: self.cum_tan_wtp,
            cum_tan_good: self.cum_tan_good,
            cum_cone_w: self.cum_cone_w,
            cum_cone_1: self.cum_cone_1,
            cum_div_w: self.cum_div_w,
            cum_div_1: self.cum_div_1,
            residual_w: 0.0,
            residual_1: 0.0,
            smallness_ok: s.smallness_ok,
            max_abs,
        };
        if let Some(first) = self.rows.first() {
            let norm = first.e_levels.first().map(|e| e * e).unwrap_or(0.0) + TINY;
            row.residual_w = (row.slice_w - first.slice_w
                + (row.cum_tan_wtp - first.cum_tan_wtp)
                + (row.cum_cone_w - first.cum_cone_w)
                + (row.cum_div_w - first.cum_div_w))
                / norm;
            row.residual_1 = (row.slice_1 - first.slice_1
                + (row.cum_cone_1 - first.cum_cone_1)
                + (row.cum_div_1 - first.cum_div_1))
                / norm;
        }
        self.rows.push(row);
    }

    /// Conservation residual between two committed rows, normalized by
    /// E_0(t1)^2. `weighted` selects the w_tilde variant; the unweighted one
    /// has no tangential term because w_tilde' = 0.
    pub fn residual_between(&self, i1: usize, i2: usize, weighted: bool) -> Option<f64> {
        let a = self.rows.get(i1)?;
        let b = self.rows.get(i2)?;
        let norm = a.e_levels.first().map(|e| e * e).unwrap_or(0.0) + TINY;
        Some(if weighted {
            (b.slice_w - a.slice_w
                + (b.cum_tan_wtp - a.cum_tan_wtp)
                + (b.cum_cone_w - a.cum_cone_w)
                + (b.cum_div_w - a.cum_div_w))
                / norm
        } else {
            (b.slice_1 - a.slice_1 + (b.cum_cone_1 - a.cum_cone_1) + (b.cum_div_1 - a.cum_div_1))
                / norm
        })
    }

    /// The good-sign tangential integral between two rows; additive by
    /// construction: T(i1,i3) = T(i1,i2) + T(i2,i3) exactly.
    pub fn tangential_between(&self, i1: usize, i2: usize) -> Option<f64> {
        let a = self.rows.get(i1)?;
        let b = self.rows.get(i2)?;
        Some(b.cum_tan_good - a.cum_tan_good)
    }

    /// Time series (t, E_k) for one level.
    pub fn energy_series(&self, k: usize) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .map(|r| (r.t, r.e_levels.get(k).copied().unwrap_or(0.0)))
            .collect()
    }
}

// --------------------------------------------------------------------------
// Hardy-type check.
// --------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct HardyReport {
    pub a: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs / rhs, defined as 0 when both vanish.
    pub ratio: f64,
}

/// Weighted Hardy comparison over the exterior:
///   int r^{n-1} (1+t+r)^{-a} w (1+|q|)^{-2} |phi|^2
///     <= c * int r^{n-1} (1+t+r)^{-a} w |d_r phi|^2.
/// Preconditions: 0 <= a <= n-1 and decay at the outer edge
/// (|phi(r_max)| < 1e-8 max |phi|).
pub fn hardy_check(
    phi: &[LieValue],
    parity: Parity,
    grid: &RadialGrid,
    a: f64,
    t: f64,
    wp: &WeightParams,
) -> Result<HardyReport, DiagnosticsError> {
    if !(0.0..=(grid.n as f64 - 1.0)).contains(&a) {
        return Err(DiagnosticsError::BadInput(format!(
            "exponent a = {a} outside [0, n-1] = [0, {}]",
            grid.n - 1
        )));
    }
    if phi.len() != grid.len() {
        return Err(DiagnosticsError::BadInput(String::from(
            "profile length does not match the grid",
        )));
    }
    let mut max = 0.0;
    for v in phi.iter() {
        max = num::max(max, v.norm());
    }
    let boundary = phi[grid.len() - 1].norm();
    if max > 0.0 && boundary >= 1e-8 * max {
        return Err(DiagnosticsError::InsufficientDecay { boundary, max });
    }

    let du = deriv_r(phi, grid, parity).map_err(|e| lift_grid(e, t, wp.q0))?;
    let mut val_sq = vec![0.0; grid.len()];
    let mut grad_sq = vec![0.0; grid.len()];
    for j in 0..grid.len() {
        val_sq[j] = phi[j].norm_sq();
        grad_sq[j] = du[j].norm_sq();
    }
    let wfun = |q: f64| eval_weights(q, wp).map(|s| s.w).unwrap_or(0.0);
    let lhs = integrate_exterior(&val_sq, grid, t, wp.q0, |q| {
        let r = t + q;
        let aq = 1.0 + num::abs(q);
        wfun(q) * num::powf(1.0 + t + r, -a) / (aq * aq)
    })
    .map_err(|e| lift_grid(e, t, wp.q0))?;
    let rhs = integrate_exterior(&grad_sq, grid, t, wp.q0, |q| {
        let r = t + q;
        wfun(q) * num::powf(1.0 + t + r, -a)
    })
    .map_err(|e| lift_grid(e, t, wp.q0))?;
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    Ok(HardyReport { a, lhs, rhs, ratio })
}

// --------------------------------------------------------------------------
// Pointwise decay (Klainerman-Sobolev style) check.
// --------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct KsReport {
    pub level: usize,
    /// max over exterior nodes and components of LHS / (sum of word norms).
    pub sup_ratio: f64,
    pub worst_r: f64,
    pub worst_component: String,
}

/// Pointwise-decay comparison: for each component,
///   |phi|(1+t+|q|)^{(n-1)/2} [(1+|q|) w]^{1/2}  vs
///   sum over words |I| <= level of ||w^{1/2} L_{Z^I} phi||,
/// maximized over exterior grid nodes. The hierarchy must already be built
/// to the level being reported.
pub fn ks_check(
    hier: &Hierarchy,
    grid: &RadialGrid,
    wp: &WeightParams,
) -> Result<KsReport, DiagnosticsError> {
    let t = hier.t;
    let cut = num::max(t + wp.q0, 0.0);
    if cut >= grid.r_max - 4.0 * grid.dr {
        return Err(DiagnosticsError::DomainExhausted { t, q0: wp.q0 });
    }
    let root = hier
        .words
        .iter()
        .find(|w| w.order == 0)
        .ok_or_else(|| DiagnosticsError::BadInput(String::from("hierarchy lacks level 0")))?;

    let mut sup_ratio = 0.0;
    let mut worst_r = 0.0;
    let mut worst_component = String::new();
    for (c, comp) in root.comps.iter().enumerate() {
        // Denominator: value norms (no gradient) of every word of this
        // component.
        let mut denom = 0.0;
        for word in hier.words.iter() {
            let mut density = vec![0.0; grid.len()];
            for j in 0..grid.len() {
                density[j] = word.comps[c].u[j].norm_sq();
            }
            let sq = integrate_exterior(&density, grid, t, wp.q0, |q| {
                eval_weights(q, wp).map(|s| s.w).unwrap_or(0.0)
            })
            .map_err(|e| lift_grid(e, t, wp.q0))?;
            denom += num::sqrt(num::max(word.angular_weight * sq, 0.0));
        }
        if denom <= 0.0 {
            continue;
        }
        for j in 0..grid.len() {
            let r = grid.r(j);
            if r < cut {
                continue;
            }
            let q = r - t;
            let w = eval_weights(q, wp).map(|s| s.w).unwrap_or(0.0);
            let lhs = root.comps[c].u[j].norm()
                * num::powf(1.0 + t + num::abs(q), 0.5 * (grid.n as f64 - 1.0))
                * num::sqrt((1.0 + num::abs(q)) * w);
            let ratio = lhs / denom;
            if ratio > sup_ratio {
                sup_ratio = ratio;
                worst_r = r;
                worst_component = String::from(comp.name);
            }
        }
    }
    Ok(KsReport {
        level: hier.level,
        sup_ratio,
        worst_r,
        worst_component,
    })
}

// --------------------------------------------------------------------------
// Decay-rate fits.
// --------------------------------------------------------------------------

/// One cone-band sample of the decaying observables at (t, r = t + q).
#[derive(Debug, Clone, Copy)]
pub struct DecaySample {
    pub t: f64,
    pub q: f64,
    /// |d A|: gradient norm of the gauge family (identity word).
    pub grad_gauge: f64,
    /// |d h|: gradient norm of the metric family.
    pub grad_metric: f64,
    /// |A|: value norm of the gauge family.
    pub value_gauge: f64,
    /// |F|: gauge-invariant curvature norm.
    pub curvature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayObservable {
    GradGauge,
    GradMetric,
    ValueGauge,
    Curvature,
}

impl DecayObservable {
    pub fn label(self) -> &'static str {
        match self {
            DecayObservable::GradGauge => "grad_gauge",
            DecayObservable::GradMetric => "grad_metric",
            DecayObservable::ValueGauge => "value_gauge",
            DecayObservable::Curvature => "curvature",
        }
    }

    fn pick(self, s: &DecaySample) -> f64 {
        match self {
            DecayObservable::GradGauge => s.grad_gauge,
            DecayObservable::GradMetric => s.grad_metric,
            DecayObservable::ValueGauge => s.value_gauge,
            DecayObservable::Curvature => s.curvature,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    pub p_t: f64,
    pub p_q: f64,
    pub amplitude_log: f64,
    pub se_t: f64,
    pub se_q: f64,
    pub samples: usize,
}

/// Least-squares fit log v = c0 - p_t log(1+t+|q|) - p_q log(1+|q|) over the
/// cone-band samples with (1+t) inside `t_window`. Samples at or below the
/// noise floor are dropped; fewer than 8 usable samples is an error.
pub fn decay_fit(
    samples: &[DecaySample],
    obs: DecayObservable,
    t_window: (f64, f64),
    noise_floor: f64,
) -> Result<DecayFit, DiagnosticsError> {
    let mut xs: Vec<[f64; 3]> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for s in samples.iter() {
        let opt = 1.0 + s.t;
        if opt < t_window.0 || opt > t_window.1 {
            continue;
        }
        let v = obs.pick(s);
        if !(v > noise_floor) || !v.is_finite() {
            continue;
        }
        let aq = num::abs(s.q);
        xs.push([1.0, -num::ln(1.0 + s.t + aq), -num::ln(1.0 + aq)]);
        ys.push(num::ln(v));
    }
    if xs.len() < 8 {
        return Err(DiagnosticsError::TooFewSamples {
            needed: 8,
            got: xs.len(),
        });
    }
    // Normal equations (X^T X) beta = X^T y on 3 parameters.
    let mut xtx = SqMat::zero(3);
    let mut xty = [0.0f64; 3];
    for (row, y) in xs.iter().zip(ys.iter()) {
        for i in 0..3 {
            xty[i] += row[i] * y;
            for k in 0..3 {
                xtx.a[i][k] += row[i] * row[k];
            }
        }
    }
    let inv = xtx
        .invert()
        .ok_or_else(|| DiagnosticsError::BadInput(String::from("degenerate fit design")))?;
    let mut beta = [0.0f64; 3];
    for i in 0..3 {
        for k in 0..3 {
            beta[i] += inv.a[i][k] * xty[k];
        }
    }
    let mut rss = 0.0;
    for (row, y) in xs.iter().zip(ys.iter()) {
        let pred = beta[0] * row[0] + beta[1] * row[1] + beta[2] * row[2];
        rss += (y - pred) * (y - pred);
    }
    let dof = (xs.len() as f64 - 3.0).max(1.0);
    let sigma_sq = rss / dof;
    Ok(DecayFit {
        p_t: beta[1],
        p_q: beta[2],
        amplitude_log: beta[0],
        se_t: num::sqrt(num::max(sigma_sq * inv.a[1][1], 0.0)),
        se_q: num::sqrt(num::max(sigma_sq * inv.a[2][2], 0.0)),
        samples: xs.len(),
    })
}

// --------------------------------------------------------------------------
// Gronwall and bootstrap monitors.
// --------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct GronwallReport {
    pub lambda: f64,
    pub eps: f64,
    /// (window end time, smallest C making the window inequality hold).
    pub per_window: Vec<(f64, f64)>,
    pub c_sup: f64,
    /// Sup recomputed from every other sample.
    pub c_half_sampling: f64,
    /// Sup over windows ending in the first half of the horizon.
    pub c_prefix: f64,
    pub closes: bool,
    pub reason: String,
}

/// Fits the smallest constant C per window in
///   E^2(t_k) <= E^2(t_0) + C int_{t_0}^{t_k} eps (1+tau)^{-1-lambda} E^2 dtau
/// and judges closure: the sup over windows must be finite, stable under
/// dropping every other sample (factor <= 2), and non-accumulating toward
/// the end of the horizon (sup <= 1.2x the sup over the first half). A
/// monotone-growing energy fails the last test; a saturating one passes.
pub fn gronwall_monitor(
    series: &[(f64, f64)],
    eps: f64,
    lambda: f64,
    windows: usize,
) -> Result<GronwallReport, DiagnosticsError> {
    if series.len() < 8 {
        return Err(DiagnosticsError::TooFewSamples {
            needed: 8,
            got: series.len(),
        });
    }
    if !(lambda > 0.0 && lambda <= 0.5) {
        return Err(DiagnosticsError::BadInput(format!(
            "lambda = {lambda} outside (0, 1/2]"
        )));
    }
    let per_window = window_constants(series, eps, lambda, windows);
    let c_sup = per_window.iter().fold(0.0f64, |m, (_, c)| num::max(m, *c));

    let halved: Vec<(f64, f64)> = series
        .iter()
        .enumerate()
        .filter(|(i, _)| i % 2 == 0 || *i == series.len() - 1)
        .map(|(_, s)| *s)
        .collect();
    let c_half_sampling = window_constants(&halved, eps, lambda, windows)
        .iter()
        .fold(0.0f64, |m, (_, c)| num::max(m, *c));

    let t0 = series[0].0;
    let t_end = series[series.len() - 1].0;
    let t_mid = 0.5 * (t0 + t_end);
    let c_prefix = per_window
        .iter()
        .filter(|(t, _)| *t <= t_mid)
        .fold(0.0f64, |m, (_, c)| num::max(m, *c));

    let finite = c_sup.is_finite();
    let sampling_stable =
        c_sup <= 2.0 * c_half_sampling + 1e-12 && c_half_sampling <= 2.0 * c_sup + 1e-12;
    let trend_stable = c_sup <= 1.2 * c_prefix + 1e-12;
    let closes = finite && sampling_stable && trend_stable;
    let reason = if !finite {
        String::from("window constant diverged")
    } else if !sampling_stable {
        format!("unstable under sample halving: {c_sup} vs {c_half_sampling}")
    } else if !trend_stable {
        format!("constant still growing at the horizon: sup {c_sup} vs first-half {c_prefix}")
    } else {
        String::from("sup finite and stable")
    };
    Ok(GronwallReport {
        lambda,
        eps,
        per_window,
        c_sup,
        c_half_sampling,
        c_prefix,
        closes,
        reason,
    })
}

fn window_constants(series: &[(f64, f64)], eps: f64, lambda: f64, windows: usize) -> Vec<(f64, f64)> {
    let (t0, e0) = series[0];
    let e0_sq = e0 * e0;
    let mut out = Vec::new();
    let mut integral = 0.0;
    let stride = if windows == 0 {
        1
    } else {
        num::max(1.0, ((series.len() - 1) as f64) / (windows as f64)) as usize
    };
    let kernel = |t: f64, e: f64| eps * num::powf(1.0 + t, -1.0 - lambda) * e * e;
    let mut prev = (t0, kernel(t0, e0));
    for (k, (t, e)) in series.iter().enumerate().skip(1) {
        let f = kernel(*t, *e);
        integral += 0.5 * (*t - prev.0) * (prev.1 + f);
        prev = (*t, f);
        if k % stride != 0 && k != series.len() - 1 {
            continue;
        }
        let diff = e * e - e0_sq;
        let c = if diff <= 0.0 {
            0.0
        } else if integral > 0.0 {
            diff / integral
        } else {
            f64::INFINITY
        };
        out.push((*t, c));
    }
    out
}

#[derive(Debug, Clone)]
pub struct BootstrapReport {
    pub e_target: f64,
    pub max_e: f64,
    /// Max over t >= 1 (after the initial transient window).
    pub max_e_late: f64,
    pub closed: bool,
    /// (E_target - max E) / E_target.
    pub margin: f64,
    /// (E_target/2 - late max) / (E_target/2).
    pub margin_late: f64,
}

/// Bootstrap verdict on the top-level energy series: closed iff the energy
/// never exceeds the target and, after the transient window [0, 1], stays
/// below half the target.
pub fn bootstrap_report(series: &[(f64, f64)], e_target: f64) -> Result<BootstrapReport, DiagnosticsError> {
    if series.is_empty() {
        return Err(DiagnosticsError::TooFewSamples { needed: 1, got: 0 });
    }
    if !(e_target > 0.0) {
        return Err(DiagnosticsError::BadInput(String::from(
            "bootstrap target must be positive",
        )));
    }
    let mut max_e = 0.0f64;
    let mut max_e_late = f64::NEG_INFINITY;
    for (t, e) in series.iter() {
        max_e = num::max(max_e, *e);
        if *t >= 1.0 {
            max_e_late = num::max(max_e_late, *e);
        }
    }
    if max_e_late == f64::NEG_INFINITY {
        // Horizon shorter than the transient window: judge on the last sample.
        max_e_late = series[series.len() - 1].1;
    }
    let closed = max_e <= e_target && max_e_late <= 0.5 * e_target;
    Ok(BootstrapReport {
        e_target,
        max_e,
        max_e_late,
        closed,
        margin: (e_target - max_e) / e_target,
        margin_late: (0.5 * e_target - max_e_late) / (0.5 * e_target),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::fields::{ComponentField, SCALAR_SET};
    use crate::geometry::build_metric;
    use crate::symmetry::lie_hierarchy;

    fn flat_points(grid: &RadialGrid) -> Vec<MetricPoint> {
        let h = SqMat::zero(grid.n + 1);
        let pt = build_metric(grid.n, &h).expect("flat metric");
        vec![pt; grid.len()]
    }

    fn wp(gamma: f64, q0: f64) -> WeightParams {
        WeightParams::new(gamma, -0.25, q0, 0.5).expect("weight params")
    }

    #[test]
    fn energy_of_unit_time_gradient_matches_closed_form() {
        // pi = 1 on [2, 5] at t = 6 with q0 = -5: the band lies in q < 0
        // where w = 1, so E_0^2 = |S^2| int_2^5 r^2 dr = 4 pi * 39.
        let grid = RadialGrid::new(3, 1.0 / 64.0, 8.0).expect("grid");
        let mut field = ComponentField::zeros(&SCALAR_SET, Algebra::Abelian, &grid);
        field.t = 6.0;
        for j in 0..grid.len() {
            let r = grid.r(j);
            if (2.0..=5.0).contains(&r) {
                field.comps[0].pi[j] = LieValue::from_scalar(Algebra::Abelian, 1.0);
            }
        }
        let accel = vec![vec![LieValue::zero(Algebra::Abelian); grid.len()]];
        let hier = lie_hierarchy(&field, &grid, &accel, 0).expect("hierarchy");
        let e = energy_ext(&hier, &grid, &wp(0.5, -5.0)).expect("energy");
        let want = (4.0 * core::f64::consts::PI * 39.0f64).sqrt();
        assert!(
            (e.per_level[0] - want).abs() < 0.01 * want,
            "E_0 = {} must match closed form {want}",
            e.per_level[0]
        );
    }

    #[test]
    fn energy_is_monotone_in_level_and_homogeneous() {
        let grid = RadialGrid::new(3, 1.0 / 32.0, 8.0).expect("grid");
        let mut field = ComponentField::zeros(&SCALAR_SET, Algebra::Abelian, &grid);
        field.t = 0.5;
        for j in 0..grid.len() {
            let r = grid.r(j);
            field.comps[0].u[j] = LieValue::from_scalar(Algebra::Abelian, (-r * r).exp());
            field.comps[0].pi[j] = LieValue::from_scalar(Algebra::Abelian, r * (-r * r).exp());
        }
        let accel = vec![vec![LieValue::zero(Algebra::Abelian); grid.len()]];
        let hier = lie_hierarchy(&field, &grid, &accel, 2).expect("hierarchy");
        let w = wp(0.5, -2.0);
        let e = energy_ext(&hier, &grid, &w).expect("energy");
        assert!(
            e.per_level[0] <= e.per_level[1] && e.per_level[1] <= e.per_level[2],
            "E_k must be nondecreasing in k: {:?}",
            e.per_level
        );

        let mut scaled = field.clone();
        for j in 0..grid.len() {
            scaled.comps[0].u[j] = scaled.comps[0].u[j].scale(3.0);
            scaled.comps[0].pi[j] = scaled.comps[0].pi[j].scale(3.0);
        }
        let hier3 = lie_hierarchy(&scaled, &grid, &accel, 2).expect("hierarchy");
        let e3 = energy_ext(&hier3, &grid, &w).expect("energy");
        for k in 0..=2 {
            assert!(
                (e3.per_level[k] - 3.0 * e.per_level[k]).abs() < 1e-9 * (1.0 + e.per_level[k]),
                "E_{k} must be homogeneous of degree 1 under field scaling"
            );
        }
    }

    #[test]
    fn ledger_tangential_accumulator_is_additive() {
        let mut ledger = EnergyLedger::new(3, 0, 1.0);
        let mk = |t: f64, tan: f64| SliceIntegrands {
            t,
            slice_w: 1.0,
            slice_1: 1.0,
            tan_wtp: 0.0,
            tan_good: tan,
            cone_w: 0.0,
            cone_1: 0.0,
            div_w: 0.0,
            div_1: 0.0,
            smallness_ok: true,
        };
        for (k, tan) in [(0, 1.0), (1, 3.0), (2, 2.0), (3, 5.0)] {
            ledger.accumulate(mk(k as f64, tan));
            ledger.commit_row(vec![1.0], 0.0);
        }
        let t02 = ledger.tangential_between(0, 2).expect("rows");
        let t01 = ledger.tangential_between(0, 1).expect("rows");
        let t12 = ledger.tangential_between(1, 2).expect("rows");
        assert!(
            (t02 - (t01 + t12)).abs() < 1e-14,
            "tangential integral must be additive over abutting windows"
        );
    }

    #[test]
    fn static_profile_conservation_pieces_are_consistent() {
        // For a static profile with pi = 0 the slice integral reduces to the
        // weighted potential term and T_rt = 0, so the tangential integrand
        // against w_tilde' equals int |d_r u|^2/2 w_tilde'.
        let grid = RadialGrid::new(4, 1.0 / 32.0, 10.0).expect("grid");
        let mut field = ComponentField::zeros(&SCALAR_SET, Algebra::Abelian, &grid);
        field.t = 1.0;
        for j in 0..grid.len() {
            let r = grid.r(j);
            field.comps[0].u[j] = LieValue::from_scalar(Algebra::Abelian, (-(r - 4.0) * (r - 4.0)).exp());
        }
        let accel = vec![vec![LieValue::zero(Algebra::Abelian); grid.len()]];
        let pts = flat_points(&grid);
        let w = wp(0.5, 0.5);
        let s = conservation_integrands(&field, &grid, &pts, &accel, &w).expect("integrands");
        assert!(s.slice_w > 0.0, "weighted slice energy must be positive");
        assert!(
            s.smallness_ok,
            "flat metric must pass the smallness test everywhere"
        );
        // Independent quadrature of the tangential integrand.
        let du = deriv_r(&field.comps[0].u, &grid, Parity::Even).expect("deriv");
        let density: Vec<f64> = du.iter().map(|v| 0.5 * v.norm_sq()).collect();
        let expect = integrate_exterior(&density, &grid, field.t, w.q0, |q| {
            eval_weights(q, &w).map(|s| s.w_tilde_prime).unwrap_or(0.0)
        })
        .expect("integral");
        assert!(
            (s.tan_wtp - expect).abs() < 1e-10 * (1.0 + expect.abs()),
            "static tangential integrand {} must equal oracle {expect}",
            s.tan_wtp
        );
    }

    #[test]
    fn hardy_ratio_matches_pointwise_identity() {
        // With t = 0, q0 = 0, gamma = 0.5, phi = (1+r)^{-k}: the integrands
        // are pointwise proportional, lhs/rhs = 1/k^2 exactly. The grid must
        // resolve the near-origin peak of the a = n-1 integrand, where the
        // discrete derivative of (1+r)^{-k} carries an O(dr^2/(1+r)^2) bias.
        let grid = RadialGrid::new(4, 1.0 / 16.0, 2560.0).expect("grid");
        let w = wp(0.5, 0.0);
        for k in [2.5f64, 3.0, 4.0] {
            let phi: Vec<LieValue> = (0..grid.len())
                .map(|j| LieValue::from_scalar(Algebra::Abelian, (1.0 + grid.r(j)).powf(-k)))
                .collect();
            for a in [0.0, 1.0, 3.0] {
                let rep = hardy_check(&phi, Parity::Even, &grid, a, 0.0, &w).expect("hardy");
                assert!(
                    (rep.ratio * k * k - 1.0).abs() < 0.02,
                    "k={k}, a={a}: ratio {} must be close to 1/k^2",
                    rep.ratio
                );
            }
        }
    }

    #[test]
    fn hardy_ratio_is_amplitude_invariant() {
        let grid = RadialGrid::new(4, 0.25, 2560.0).expect("grid");
        let w = wp(0.5, 0.0);
        let phi: Vec<LieValue> = (0..grid.len())
            .map(|j| LieValue::from_scalar(Algebra::Abelian, (1.0 + grid.r(j)).powf(-3.0)))
            .collect();
        let scaled: Vec<LieValue> = phi.iter().map(|v| v.scale(5.0)).collect();
        let a = hardy_check(&phi, Parity::Even, &grid, 1.0, 0.0, &w).expect("hardy");
        let b = hardy_check(&scaled, Parity::Even, &grid, 1.0, 0.0, &w).expect("hardy");
        assert!(
            (a.ratio - b.ratio).abs() < 1e-12,
            "Hardy ratio must not depend on field amplitude"
        );
    }

    #[test]
    fn hardy_rejects_slow_decay_and_bad_exponent() {
        let grid = RadialGrid::new(4, 0.25, 64.0).expect("grid");
        let w = wp(0.5, 0.0);
        let slow: Vec<LieValue> = (0..grid.len())
            .map(|j| LieValue::from_scalar(Algebra::Abelian, (1.0 + grid.r(j)).powf(-1.0)))
            .collect();
        assert!(
            matches!(
                hardy_check(&slow, Parity::Even, &grid, 0.0, 0.0, &w),
                Err(DiagnosticsError::InsufficientDecay { .. })
            ),
            "(1+r)^{{-1}} on a short grid must fail the edge-decay precondition"
        );
        let ok: Vec<LieValue> = (0..grid.len())
            .map(|j| LieValue::from_scalar(Algebra::Abelian, (-grid.r(j)).exp()))
            .collect();
        assert!(
            hardy_check(&ok, Parity::Even, &grid, 4.0, 0.0, &w).is_err(),
            "a = n must be rejected"
        );
    }

    #[test]
    fn zero_field_hardy_and_ks_are_zero() {
        let grid = RadialGrid::new(4, 1.0 / 16.0, 8.0).expect("grid");
        let w = wp(0.5, 0.0);
        let zero: Vec<LieValue> = vec![LieValue::zero(Algebra::Abelian); grid.len()];
        let rep = hardy_check(&zero, Parity::Even, &grid, 0.0, 0.0, &w).expect("hardy");
        assert_eq!((rep.lhs, rep.rhs, rep.ratio), (0.0, 0.0, 0.0));

        let field = ComponentField::zeros(&SCALAR_SET, Algebra::Abelian, &grid);
        let accel = vec![vec![LieValue::zero(Algebra::Abelian); grid.len()]];
        let hier = lie_hierarchy(&field, &grid, &accel, 3).expect("hierarchy");
        let ks = ks_check(&hier, &grid, &w).expect("ks");
        assert_eq!(ks.sup_ratio, 0.0, "zero field must give zero ratio");
    }

    #[test]
    fn ks_ratio_is_amplitude_invariant() {
        let grid = RadialGrid::new(4, 1.0 / 32.0, 10.0).expect("grid");
        let w = wp(0.5, 0.0);
        let mut field = ComponentField::zeros(&SCALAR_SET, Algebra::Abelian, &grid);
        field.t = 1.0;
        for j in 0..grid.len() {
            let r = grid.r(j);
            field.comps[0].u[j] =
                LieValue::from_scalar(Algebra::Abelian, (-(r - 3.0) * (r - 3.0)).exp());
        }
        let accel = vec![vec![LieValue::zero(Algebra::Abelian); grid.len()]];
        let hier = lie_hierarchy(&field, &grid, &accel, 3).expect("hierarchy");
        let a = ks_check(&hier, &grid, &w).expect("ks");

        let mut scaled = field.clone();
        for j in 0..grid.len() {
            scaled.comps[0].u[j] = scaled.comps[0].u[j].scale(1e-3);
        }
        let hier2 = lie_hierarchy(&scaled, &grid, &accel, 3).expect("hierarchy");
        let b = ks_check(&hier2, &grid, &w).expect("ks");
        assert!(
            a.sup_ratio > 0.0 && (a.sup_ratio - b.sup_ratio).abs() < 1e-9 * a.sup_ratio,
            "pointwise ratio must be invariant under amplitude scaling: {} vs {}",
            a.sup_ratio,
            b.sup_ratio
        );
    }

    fn synthetic_samples<F: Fn(f64, f64) -> f64>(f: F) -> Vec<DecaySample> {
        let mut out = Vec::new();
        let mut t = 3.0;
        while t <= 63.0 {
            for kq in 0..9 {
                let q = 0.5 * kq as f64;
                let v = f(t, q);
                out.push(DecaySample {
                    t,
                    q,
                    grad_gauge: v,
                    grad_metric: v,
                    value_gauge: v,
                    curvature: v,
                });
            }
            t += 2.0;
        }
        out
    }

    #[test]
    fn decay_fit_recovers_exact_rates() {
        let samples =
            synthetic_samples(|t, q| (1.0 + t + q).powf(-1.5) * (1.0 + q).powf(-1.5));
        let fit = decay_fit(&samples, DecayObservable::GradGauge, (4.0, 64.0), NOISE_FLOOR)
            .expect("fit");
        assert!(
            (fit.p_t - 1.5).abs() < 0.02 && (fit.p_q - 1.5).abs() < 0.02,
            "exact-rate samples must recover (1.5, 1.5): got ({}, {})",
            fit.p_t,
            fit.p_q
        );
    }

    #[test]
    fn decay_fit_of_constant_observable_is_flat() {
        let samples = synthetic_samples(|_, _| 0.125);
        let fit = decay_fit(&samples, DecayObservable::Curvature, (4.0, 64.0), NOISE_FLOOR)
            .expect("fit");
        assert!(
            fit.p_t.abs() < 0.02 && fit.p_q.abs() < 0.02,
            "constant observable must fit zero exponents: ({}, {})",
            fit.p_t,
            fit.p_q
        );
    }

    #[test]
    fn decay_fit_rejects_noise_floor_data() {
        let samples = synthetic_samples(|_, _| 1e-14);
        assert!(
            matches!(
                decay_fit(&samples, DecayObservable::GradGauge, (4.0, 64.0), NOISE_FLOOR),
                Err(DiagnosticsError::TooFewSamples { .. })
            ),
            "samples below the noise floor must be rejected"
        );
    }

    #[test]
    fn gronwall_constant_energy_closes_with_zero_constant() {
        let series: Vec<(f64, f64)> = (0..=48).map(|k| (k as f64, 2.0)).collect();
        let rep = gronwall_monitor(&series, 1e-3, 0.5, 0).expect("monitor");
        assert!(rep.closes, "constant energy must close: {}", rep.reason);
        assert_eq!(rep.c_sup, 0.0, "constant energy needs C = 0");
    }

    #[test]
    fn gronwall_matches_analytic_saturating_family() {
        // E^2 = E0^2 (2 - (1+t)^{-lambda}) saturates the inequality with a
        // computable C per window.
        let lambda = 0.5;
        let eps = 1.0;
        let e0 = 1.5f64;
        let series: Vec<(f64, f64)> = (0..=480)
            .map(|k| {
                let t = 0.1 * k as f64;
                (t, e0 * (2.0 - (1.0 + t).powf(-lambda)).sqrt())
            })
            .collect();
        let rep = gronwall_monitor(&series, eps, lambda, 0).expect("monitor");
        assert!(rep.closes, "saturating family must close: {}", rep.reason);
        for (t, c) in rep.per_window.iter().skip(4) {
            let d = |s: f64| 1.0 - (1.0 + t).powf(-s);
            let diff = e0 * e0 * d(lambda);
            let integral = eps * e0 * e0 * (2.0 * d(lambda) / lambda - d(2.0 * lambda) / (2.0 * lambda));
            let analytic = diff / integral;
            assert!(
                (c - analytic).abs() < 0.05 * analytic,
                "window ending t={t}: fitted C {c} vs analytic {analytic}"
            );
        }
    }

    #[test]
    fn gronwall_growing_energy_does_not_close() {
        let series: Vec<(f64, f64)> = (0..=48)
            .map(|k| {
                let t = k as f64;
                (t, (1.0 + t).powf(0.5))
            })
            .collect();
        let rep = gronwall_monitor(&series, 1e-3, 0.5, 0).expect("monitor");
        assert!(
            !rep.closes,
            "E = (1+t)^{{1/2}} must not close; got C sup {} with reason '{}'",
            rep.c_sup, rep.reason
        );
    }

    #[test]
    fn bootstrap_verdicts_and_margins() {
        let quiet: Vec<(f64, f64)> = (0..=40).map(|k| (0.1 * k as f64, 0.3)).collect();
        let rep = bootstrap_report(&quiet, 1.0).expect("report");
        assert!(rep.closed, "energy well under half target must close");
        assert!((rep.margin - 0.7).abs() < 1e-12);

        let loud: Vec<(f64, f64)> = (0..=40).map(|k| (0.1 * k as f64, 0.8)).collect();
        let rep = bootstrap_report(&loud, 1.0).expect("report");
        assert!(
            !rep.closed,
            "energy above half target after the transient must fail"
        );

        let zero: Vec<(f64, f64)> = (0..=40).map(|k| (0.1 * k as f64, 0.0)).collect();
        let rep = bootstrap_report(&zero, 1.0).expect("report");
        assert!(rep.closed && (rep.margin - 1.0).abs() < 1e-12, "zero data closes with full margin");
    }

    #[test]
    fn initial_norm_is_positive_and_scales_linearly() {
        let grid = RadialGrid::new(4, 1.0 / 32.0, 8.0).expect("grid");
        let mut field = ComponentField::zeros(&SCALAR_SET, Algebra::Abelian, &grid);
        for j in 0..grid.len() {
            let r = grid.r(j);
            field.comps[0].u[j] =
                LieValue::from_scalar(Algebra::Abelian, (-(r - 2.0) * (r - 2.0)).exp());
        }
        let accel = vec![vec![LieValue::zero(Algebra::Abelian); grid.len()]];
        let hier = lie_hierarchy(&field, &grid, &accel, 1).expect("hierarchy");
        let n1 = initial_norm(&hier, &grid, 0.5).expect("norm");
        assert!(n1 > 0.0, "bump data must have positive initial norm");

        let mut scaled = field.clone();
        for j in 0..grid.len() {
            scaled.comps[0].u[j] = scaled.comps[0].u[j].scale(2.0);
        }
        let hier2 = lie_hierarchy(&scaled, &grid, &accel, 1).expect("hierarchy");
        let n2 = initial_norm(&hier2, &grid, 0.5).expect("norm");
        assert!(
            (n2 - 2.0 * n1).abs() < 1e-9 * n1,
            "initial norm must be homogeneous of degree 1"
        );
    }
}
