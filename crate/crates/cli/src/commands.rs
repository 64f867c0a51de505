//! Subcommand implementations. Every command writes its artifacts (series
//! CSV and/or JSON reports) plus a manifest, and reports an outcome that the
//! binary maps onto its exit code. Verification thresholds are pinned here.

use std::path::Path;

use conewave_core::algebra::{Algebra, LieValue};
use conewave_core::diagnostics::{
    bootstrap_report, decay_fit, gronwall_monitor, hardy_check, DecayObservable, NOISE_FLOOR,
};
use conewave_core::grid::{Parity, RadialGrid};
use conewave_core::rng;
use conewave_core::solver::{evolve, RunRecord, RunStatus, SolverError};
use conewave_core::stress::identity_suite;
use conewave_core::symmetry::commutator_table_check;
use conewave_core::weights::{check_weight_equivalences, WeightParams};
use serde::Serialize;

use crate::config::RunConfig;
use crate::outputs::{Emitter, FailureRecord};
use crate::CliError;

/// Identity-suite residuals are rounding noise only.
const STRESS_TOL: f64 = 1e-12;
/// Hardy ratios must move by at most this relative amount under dr halving.
const HARDY_STABILITY: f64 = 1e-2;
/// Conservation residual of the half-resolution run must sit below this.
const RESIDUAL_BOUND: f64 = 1e-4;
/// Residual ratio under dr halving must land in this band (4 +- 25%).
const RATIO_BAND: (f64, f64) = (3.0, 5.0);

pub struct CommandOutcome {
    pub status: String,
    pub failure: Option<FailureRecord>,
}

impl CommandOutcome {
    fn ok(status: &str) -> CommandOutcome {
        CommandOutcome {
            status: status.to_string(),
            failure: None,
        }
    }

    fn verification(status: &str, message: String) -> CommandOutcome {
        CommandOutcome {
            status: status.to_string(),
            failure: Some(FailureRecord {
                kind: "verification",
                message,
            }),
        }
    }

}

fn evolve_cfg(cfg: &RunConfig) -> Result<RunRecord, CliError> {
    let solver_cfg = cfg.to_solver()?;
    evolve(&solver_cfg).map_err(|e| match e {
        SolverError::Config(m) => CliError::Config(m),
        SolverError::Numerics(m) => CliError::Numerical(m),
    })
}

fn run_failure(status: &RunStatus) -> Option<FailureRecord> {
    match status {
        RunStatus::Completed => None,
        RunStatus::MetricDegenerate { t } => Some(FailureRecord {
            kind: "numerical",
            message: format!("effective metric degenerated at t = {t}"),
        }),
        RunStatus::NanDetected { t } => Some(FailureRecord {
            kind: "numerical",
            message: format!("non-finite field values at t = {t}"),
        }),
        RunStatus::DomainExhausted { t } => Some(FailureRecord {
            kind: "numerical",
            message: format!("cone cut left the grid interior at t = {t}"),
        }),
    }
}

#[derive(Serialize)]
struct RunReport {
    status: String,
    steps: usize,
    dt: f64,
    rows: usize,
    eps_scale: f64,
    initial_data_norm: f64,
    final_energies: Vec<f64>,
    decay_samples: usize,
}

/// `run`: evolve the configured system, emit the full time series and a
/// summary report. Exit is nonzero only if the run aborted.
pub fn run(cfg: &RunConfig, out: &Path, seed: u64) -> Result<CommandOutcome, CliError> {
    let rec = evolve_cfg(cfg)?;
    let mut em = Emitter::new(out);
    em.add_series(&rec.ledger);
    let report = RunReport {
        status: rec.status.label().to_string(),
        steps: rec.steps,
        dt: rec.dt,
        rows: rec.ledger.rows.len(),
        eps_scale: rec.ledger.eps,
        initial_data_norm: rec.ledger.e_bar0,
        final_energies: rec
            .ledger
            .rows
            .last()
            .map(|r| r.e_levels.clone())
            .unwrap_or_default(),
        decay_samples: rec.decay.len(),
    };
    em.add_report("run", &report)?;
    let failure = run_failure(&rec.status);
    let status = rec.status.label();
    em.finalize("run", cfg, seed, &status, failure.as_ref())?;
    Ok(CommandOutcome {
        status: status.to_string(),
        failure,
    })
}

#[derive(Serialize)]
struct StressRow {
    n: usize,
    samples: usize,
    split: f64,
    cross_term: f64,
    radial_row: f64,
    flat_divergence: f64,
    good_part_negativity: f64,
    admissible_fraction: f64,
}

#[derive(Serialize)]
struct CommutatorRow {
    n: usize,
    monomials: usize,
    checks: usize,
    failures: Vec<String>,
}

#[derive(Serialize)]
struct WeightPairRow {
    gamma: f64,
    mu: f64,
    band: (f64, f64),
    observed: (f64, f64),
    ok: bool,
}

#[derive(Serialize)]
struct IdentityReport {
    seed: u64,
    stress_tolerance: f64,
    stress: Vec<StressRow>,
    commutators: Vec<CommutatorRow>,
    weight_pairs: Vec<WeightPairRow>,
    ok: bool,
}

/// `check-identities`: exact algebraic gates. Stress-tensor identities on
/// seeded random jets for n = 2..6, the commutator table on all monomials of
/// degree <= 4, and the weight sum/band relations over sampled parameters.
pub fn check_identities(cfg: &RunConfig, out: &Path, seed: u64) -> Result<CommandOutcome, CliError> {
    let mut ok = true;
    let mut stress = Vec::new();
    for n in 2..=6 {
        let rep = identity_suite(n, cfg.algebra(), cfg.identity_samples, seed);
        let worst = [
            rep.split.max_residual,
            rep.cross_term.max_residual,
            rep.radial_row.max_residual,
            rep.flat_divergence.max_residual,
            rep.positivity.max_residual,
        ]
        .into_iter()
        .fold(0.0f64, f64::max);
        ok &= worst <= STRESS_TOL;
        stress.push(StressRow {
            n,
            samples: rep.samples,
            split: rep.split.max_residual,
            cross_term: rep.cross_term.max_residual,
            radial_row: rep.radial_row.max_residual,
            flat_divergence: rep.flat_divergence.max_residual,
            good_part_negativity: rep.positivity.max_residual,
            admissible_fraction: rep.admissible_fraction,
        });
    }

    let mut commutators = Vec::new();
    for n in 2..=6 {
        let rep = commutator_table_check(n)
            .map_err(|e| CliError::Numerical(format!("commutator table: {e}")))?;
        ok &= rep.ok();
        commutators.push(CommutatorRow {
            n: rep.n,
            monomials: rep.monomials,
            checks: rep.checks,
            failures: rep.failures,
        });
    }

    // 20 seeded (gamma, mu) pairs x 1000 seeded q samples each.
    let mut weight_pairs = Vec::new();
    let mut stream = rng::Stream::at(seed, 1 << 32);
    for _ in 0..20 {
        let gamma = 0.05 + 2.95 * stream.next_uniform();
        let mu = -(0.05 + 1.95 * stream.next_uniform());
        let params = WeightParams::new(gamma, mu, 0.0, 0.5)
            .map_err(|e| CliError::Numerical(format!("weight params: {e}")))?;
        let qs: Vec<f64> = (0..1000).map(|_| 80.0 * stream.next_symmetric()).collect();
        let rep = check_weight_equivalences(&params, &qs)
            .map_err(|e| CliError::Numerical(format!("weight equivalences: {e}")))?;
        ok &= rep.ok;
        weight_pairs.push(WeightPairRow {
            gamma,
            mu,
            band: rep.hat_band_bounds,
            observed: rep.hat_band,
            ok: rep.ok,
        });
    }

    let report = IdentityReport {
        seed,
        stress_tolerance: STRESS_TOL,
        stress,
        commutators,
        weight_pairs,
        ok,
    };
    let mut em = Emitter::new(out);
    em.add_report("identities", &report)?;
    let outcome = if ok {
        CommandOutcome::ok("verified")
    } else {
        CommandOutcome::verification(
            "identity_violation",
            String::from("an algebraic identity left its tolerance; see reports/identities.json"),
        )
    };
    em.finalize(
        "check-identities",
        cfg,
        seed,
        &outcome.status,
        outcome.failure.as_ref(),
    )?;
    Ok(outcome)
}

#[derive(Serialize)]
struct HardyCell {
    rate: f64,
    a: f64,
    lhs: f64,
    rhs: f64,
    ratio: f64,
    ratio_half_dr: f64,
    rel_drift: f64,
    stable: bool,
}

#[derive(Serialize)]
struct HardyReportOut {
    stability_tolerance: f64,
    cells: Vec<HardyCell>,
    max_ratio: f64,
    all_stable: bool,
}

/// `hardy`: weighted Hardy-inequality sweep over the configured decay rates
/// and exponents, with a half-resolution partner grid for stability.
pub fn hardy(cfg: &RunConfig, out: &Path, seed: u64) -> Result<CommandOutcome, CliError> {
    let wp = cfg.weights()?;
    let lift = |e: conewave_core::diagnostics::DiagnosticsError| CliError::Numerical(e.to_string());

    let grids = [
        RadialGrid::new(cfg.n, cfg.dr, cfg.r_max),
        RadialGrid::new(cfg.n, cfg.dr / 2.0, cfg.r_max),
    ];
    let [base, half] = grids.map(|g| g.map_err(|e| CliError::Config(e.to_string())));
    let (base, half) = (base?, half?);

    let profile = |grid: &RadialGrid, k: f64| -> Vec<LieValue> {
        (0..grid.len())
            .map(|j| {
                LieValue::from_scalar(Algebra::Abelian, (1.0 + grid.r(j)).powf(-k))
            })
            .collect()
    };

    let mut cells = Vec::new();
    let mut max_ratio = 0.0f64;
    let mut all_stable = true;
    for &k in &cfg.hardy_rates {
        let phi_base = profile(&base, k);
        let phi_half = profile(&half, k);
        for &a in &cfg.hardy_exponents {
            let rb = hardy_check(&phi_base, Parity::Even, &base, a, 0.0, &wp).map_err(lift)?;
            let rh = hardy_check(&phi_half, Parity::Even, &half, a, 0.0, &wp).map_err(lift)?;
            let drift = (rb.ratio - rh.ratio).abs() / rh.ratio.abs().max(1e-300);
            let stable =
                rb.ratio.is_finite() && rh.ratio.is_finite() && drift <= HARDY_STABILITY;
            all_stable &= stable;
            max_ratio = max_ratio.max(rb.ratio).max(rh.ratio);
            cells.push(HardyCell {
                rate: k,
                a,
                lhs: rb.lhs,
                rhs: rb.rhs,
                ratio: rb.ratio,
                ratio_half_dr: rh.ratio,
                rel_drift: drift,
                stable,
            });
        }
    }

    let report = HardyReportOut {
        stability_tolerance: HARDY_STABILITY,
        cells,
        max_ratio,
        all_stable,
    };
    let mut em = Emitter::new(out);
    em.add_report("hardy", &report)?;
    let outcome = if all_stable && max_ratio.is_finite() {
        CommandOutcome::ok("verified")
    } else {
        CommandOutcome::verification(
            "hardy_unstable",
            String::from("a Hardy ratio was non-finite or moved more than the stability tolerance under refinement"),
        )
    };
    em.finalize("hardy", cfg, seed, &outcome.status, outcome.failure.as_ref())?;
    Ok(outcome)
}

#[derive(Serialize)]
struct ConservationReport {
    residual_bound: f64,
    ratio_band: (f64, f64),
    sup_residual: f64,
    sup_residual_half_dr: f64,
    sup_unweighted: f64,
    sup_unweighted_half_dr: f64,
    endpoint_residual: f64,
    endpoint_residual_half_dr: f64,
    ratio: f64,
    ok: bool,
}

fn sup_rows(rec: &RunRecord, weighted: bool) -> f64 {
    rec.ledger.rows.iter().fold(0.0f64, |m, r| {
        m.max(if weighted { r.residual_w } else { r.residual_1 }.abs())
    })
}

/// `conservation`: exterior energy-balance residual of the configured run,
/// refined once. Verified when the half-resolution sup-residual sits under
/// the pinned bound and shrinks by the second-order band.
pub fn conservation(cfg: &RunConfig, out: &Path, seed: u64) -> Result<CommandOutcome, CliError> {
    let rec = evolve_cfg(cfg)?;
    let mut half_cfg = cfg.clone();
    half_cfg.dr /= 2.0;
    half_cfg.cadence *= 2;
    let rec_half = evolve_cfg(&half_cfg)?;

    let mut em = Emitter::new(out);
    em.add_series(&rec.ledger);

    if let Some(failure) = run_failure(&rec.status).or_else(|| run_failure(&rec_half.status)) {
        let status = if rec.status.is_completed() {
            rec_half.status.label()
        } else {
            rec.status.label()
        };
        em.add_report(
            "conservation",
            &serde_json::json!({ "aborted": status }),
        )?;
        em.finalize("conservation", cfg, seed, &status, Some(&failure))?;
        return Ok(CommandOutcome {
            status: status.to_string(),
            failure: Some(failure),
        });
    }

    let sup = sup_rows(&rec, true);
    let sup_half = sup_rows(&rec_half, true);
    let last = rec.ledger.rows.len() - 1;
    let last_half = rec_half.ledger.rows.len() - 1;
    let ratio = sup / sup_half.max(1e-300);
    let ok = sup_half < RESIDUAL_BOUND && ratio >= RATIO_BAND.0 && ratio <= RATIO_BAND.1;

    let report = ConservationReport {
        residual_bound: RESIDUAL_BOUND,
        ratio_band: RATIO_BAND,
        sup_residual: sup,
        sup_residual_half_dr: sup_half,
        sup_unweighted: sup_rows(&rec, false),
        sup_unweighted_half_dr: sup_rows(&rec_half, false),
        endpoint_residual: rec.ledger.residual_between(0, last, true).unwrap_or(f64::NAN),
        endpoint_residual_half_dr: rec_half
            .ledger
            .residual_between(0, last_half, true)
            .unwrap_or(f64::NAN),
        ratio,
        ok,
    };
    em.add_report("conservation", &report)?;
    let outcome = if ok {
        CommandOutcome::ok("verified")
    } else {
        CommandOutcome::verification(
            "residual_out_of_band",
            format!(
                "sup residual {sup_half:e} (half dr) against bound {RESIDUAL_BOUND:e}, refinement ratio {ratio} against band [{}, {}]",
                RATIO_BAND.0, RATIO_BAND.1
            ),
        )
    };
    em.finalize(
        "conservation",
        cfg,
        seed,
        &outcome.status,
        outcome.failure.as_ref(),
    )?;
    Ok(outcome)
}

#[derive(Serialize)]
struct FitOut {
    observable: &'static str,
    p_t: Option<f64>,
    p_q: Option<f64>,
    amplitude_log: Option<f64>,
    se_t: Option<f64>,
    se_q: Option<f64>,
    samples: usize,
    error: Option<String>,
}

#[derive(Serialize)]
struct DecayReportOut {
    fit_window: (f64, f64),
    noise_floor: f64,
    fits: Vec<FitOut>,
}

/// `decay-report`: pointwise cone-band decay rates for all four observables
/// over the configured (1+t) window.
pub fn decay_report(cfg: &RunConfig, out: &Path, seed: u64) -> Result<CommandOutcome, CliError> {
    let rec = evolve_cfg(cfg)?;
    let mut em = Emitter::new(out);
    em.add_series(&rec.ledger);

    let mut fits = Vec::new();
    for obs in [
        DecayObservable::GradGauge,
        DecayObservable::GradMetric,
        DecayObservable::ValueGauge,
        DecayObservable::Curvature,
    ] {
        match decay_fit(&rec.decay, obs, cfg.fit_window, NOISE_FLOOR) {
            Ok(fit) => fits.push(FitOut {
                observable: obs.label(),
                p_t: Some(fit.p_t),
                p_q: Some(fit.p_q),
                amplitude_log: Some(fit.amplitude_log),
                se_t: Some(fit.se_t),
                se_q: Some(fit.se_q),
                samples: fit.samples,
                error: None,
            }),
            Err(e) => fits.push(FitOut {
                observable: obs.label(),
                p_t: None,
                p_q: None,
                amplitude_log: None,
                se_t: None,
                se_q: None,
                samples: 0,
                error: Some(e.to_string()),
            }),
        }
    }
    let report = DecayReportOut {
        fit_window: cfg.fit_window,
        noise_floor: NOISE_FLOOR,
        fits,
    };
    em.add_report("decay", &report)?;
    let failure = run_failure(&rec.status);
    let status = rec.status.label();
    em.finalize("decay-report", cfg, seed, &status, failure.as_ref())?;
    Ok(CommandOutcome {
        status: status.to_string(),
        failure,
    })
}

#[derive(Serialize)]
struct GronwallOut {
    level: usize,
    lambda: f64,
    eps: f64,
    c_sup: f64,
    c_half_sampling: f64,
    c_prefix: f64,
    closes: bool,
    reason: String,
    per_window: Vec<(f64, f64)>,
}

/// `gronwall`: fit per-window constants for the integral inequality on the
/// top-level exterior energy and judge closure. Not closing is a
/// verification failure; an aborted run is a numerical one.
pub fn gronwall(cfg: &RunConfig, out: &Path, seed: u64) -> Result<CommandOutcome, CliError> {
    let rec = evolve_cfg(cfg)?;
    let mut em = Emitter::new(out);
    em.add_series(&rec.ledger);

    if let Some(failure) = run_failure(&rec.status) {
        let status = rec.status.label();
        em.add_report("gronwall", &serde_json::json!({ "aborted": status }))?;
        em.finalize("gronwall", cfg, seed, &status, Some(&failure))?;
        return Ok(CommandOutcome {
            status: status.to_string(),
            failure: Some(failure),
        });
    }

    let series = rec.ledger.energy_series(cfg.level);
    let rep = gronwall_monitor(&series, rec.ledger.eps, cfg.lambda, cfg.gronwall_windows)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let closes = rep.closes;
    let report = GronwallOut {
        level: cfg.level,
        lambda: rep.lambda,
        eps: rep.eps,
        c_sup: rep.c_sup,
        c_half_sampling: rep.c_half_sampling,
        c_prefix: rep.c_prefix,
        closes: rep.closes,
        reason: rep.reason.clone(),
        per_window: rep.per_window,
    };
    em.add_report("gronwall", &report)?;
    let outcome = if closes {
        CommandOutcome::ok("closes")
    } else {
        CommandOutcome::verification(
            "does_not_close",
            format!("integral-inequality constants do not stabilize: {}", rep.reason),
        )
    };
    em.finalize("gronwall", cfg, seed, &outcome.status, outcome.failure.as_ref())?;
    Ok(outcome)
}

#[derive(Serialize)]
struct BootstrapOut {
    level: usize,
    e_initial: f64,
    e_target: f64,
    max_e: f64,
    max_e_late: f64,
    margin: f64,
    margin_late: f64,
    closed: bool,
}

/// `bootstrap`: energy-boundedness verdict against the configured target
/// factor, with the post-transient half-target improvement.
pub fn bootstrap(cfg: &RunConfig, out: &Path, seed: u64) -> Result<CommandOutcome, CliError> {
    let rec = evolve_cfg(cfg)?;
    let mut em = Emitter::new(out);
    em.add_series(&rec.ledger);

    if let Some(failure) = run_failure(&rec.status) {
        let status = rec.status.label();
        em.add_report("bootstrap", &serde_json::json!({ "aborted": status }))?;
        em.finalize("bootstrap", cfg, seed, &status, Some(&failure))?;
        return Ok(CommandOutcome {
            status: status.to_string(),
            failure: Some(failure),
        });
    }

    let series = rec.ledger.energy_series(cfg.level);
    let e_initial = series.first().map(|s| s.1).unwrap_or(0.0);
    let e_target = cfg.bootstrap_factor * e_initial;
    let rep = bootstrap_report(&series, e_target.max(f64::MIN_POSITIVE))
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let report = BootstrapOut {
        level: cfg.level,
        e_initial,
        e_target: rep.e_target,
        max_e: rep.max_e,
        max_e_late: rep.max_e_late,
        margin: rep.margin,
        margin_late: rep.margin_late,
        closed: rep.closed,
    };
    em.add_report("bootstrap", &report)?;
    let outcome = if rep.closed {
        CommandOutcome::ok("closed")
    } else {
        CommandOutcome::verification(
            "not_closed",
            format!(
                "max energy {} exceeded the target {} or the post-transient half-target",
                rep.max_e, rep.e_target
            ),
        )
    };
    em.finalize("bootstrap", cfg, seed, &outcome.status, outcome.failure.as_ref())?;
    Ok(outcome)
}
