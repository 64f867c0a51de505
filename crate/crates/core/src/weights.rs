//! The null-coordinate weights steering every exterior estimate, as
//! functions of q = r - t:
//!
//! ```text
//! w(q)      = (1+|q|)^(1+2*gamma)   q > 0          w_hat(q) = (1+q)^(1+2*gamma)   q > 0
//!           = 1                     q <= 0                  = (1-q)^(2*mu)         q <= 0
//! w_tilde   = w_hat + w
//! ```
//!
//! with gamma > 0 and mu < 0, so w_hat' > 0 on both branches — the sign that
//! makes the tangential space-time integral in the conservation law carry a
//! good sign. At q = 0 exactly the q < 0 branch is used: values agree there,
//! one-sided derivatives do not, and the choice is reported downstream.

use crate::num;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightParams {
    /// Exterior growth exponent, > 0.
    pub gamma: f64,
    /// Interior decay exponent, < 0.
    pub mu: f64,
    /// Cone offset: the exterior region is { r - t >= q0 }.
    pub q0: f64,
    /// Energy-growth exponent; pinned to 0 (nonzero rejected at config load).
    pub delta: f64,
    /// Gronwall integrability exponent, in (0, 1/2].
    pub lambda: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightSample {
    pub w: f64,
    pub w_hat: f64,
    pub w_hat_prime: f64,
    pub w_tilde: f64,
    pub w_tilde_prime: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightError {
    /// gamma, mu, or lambda outside its admissible range, or delta != 0.
    InvalidParams(&'static str),
    /// q was NaN or infinite.
    NonFiniteInput,
}

impl core::fmt::Display for WeightError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            WeightError::InvalidParams(what) => write!(f, "invalid weight parameters: {what}"),
            WeightError::NonFiniteInput => write!(f, "weight argument must be finite"),
        }
    }
}

impl WeightParams {
    pub fn new(gamma: f64, mu: f64, q0: f64, lambda: f64) -> Result<Self, WeightError> {
        let p = WeightParams {
            gamma,
            mu,
            q0,
            delta: 0.0,
            lambda,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), WeightError> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(WeightError::InvalidParams("gamma must be finite and > 0"));
        }
        if !(self.mu.is_finite() && self.mu < 0.0) {
            return Err(WeightError::InvalidParams("mu must be finite and < 0"));
        }
        if !self.q0.is_finite() {
            return Err(WeightError::InvalidParams("q0 must be finite"));
        }
        if self.delta != 0.0 {
            return Err(WeightError::InvalidParams("delta is pinned to 0"));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0 && self.lambda <= 0.5) {
            return Err(WeightError::InvalidParams("lambda must lie in (0, 1/2]"));
        }
        Ok(())
    }
}

/// Evaluate all five weight quantities at q. The q <= 0 branch applies at
/// q = 0 exactly.
pub fn eval_weights(q: f64, params: &WeightParams) -> Result<WeightSample, WeightError> {
    params.validate()?;
    if !q.is_finite() {
        return Err(WeightError::NonFiniteInput);
    }
    let g = params.gamma;
    let mu = params.mu;
    let s = if q > 0.0 {
        let base = 1.0 + q;
        let w = num::powf(base, 1.0 + 2.0 * g);
        let w_hat = w;
        let w_hat_prime = (1.0 + 2.0 * g) * num::powf(base, 2.0 * g);
        WeightSample {
            w,
            w_hat,
            w_hat_prime,
            w_tilde: w_hat + w,
            w_tilde_prime: 2.0 * w_hat_prime,
        }
    } else {
        let base = 1.0 - q; // = 1 + |q|
        let w_hat = num::powf(base, 2.0 * mu);
        let w_hat_prime = -2.0 * mu * num::powf(base, 2.0 * mu - 1.0);
        WeightSample {
            w: 1.0,
            w_hat,
            w_hat_prime,
            w_tilde: w_hat + 1.0,
            w_tilde_prime: w_hat_prime,
        }
    };
    Ok(s)
}

/// Which weight multiplies a given exterior integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightKind {
    One,
    W,
    WHat,
    WHatPrime,
    WTilde,
    WTildePrime,
}

impl WeightKind {
    pub fn eval(self, q: f64, params: &WeightParams) -> Result<f64, WeightError> {
        if self == WeightKind::One {
            if !q.is_finite() {
                return Err(WeightError::NonFiniteInput);
            }
            return Ok(1.0);
        }
        let s = eval_weights(q, params)?;
        Ok(match self {
            WeightKind::One => unreachable!(),
            WeightKind::W => s.w,
            WeightKind::WHat => s.w_hat,
            WeightKind::WHatPrime => s.w_hat_prime,
            WeightKind::WTilde => s.w_tilde,
            WeightKind::WTildePrime => s.w_tilde_prime,
        })
    }
}

/// Observed ranges of the three equivalence ratios, plus the first violation
/// if any bound fails.
#[derive(Clone, Copy, Debug)]
pub struct EquivalenceReport {
    pub tilde_over_w: (f64, f64),
    pub tilde_prime_over_hat_prime: (f64, f64),
    pub hat_band: (f64, f64),
    pub hat_band_bounds: (f64, f64),
    pub ok: bool,
    pub violating_q: Option<f64>,
}

/// Check w <= w_tilde <= 2w, w_hat' <= w_tilde' <= 2 w_hat', and the band
/// min(1+2g, -2mu) <= w_hat'(q)(1+|q|)/w_hat(q) <= max(1+2g, -2mu)
/// over the given samples.
pub fn check_weight_equivalences(
    params: &WeightParams,
    q_samples: &[f64],
) -> Result<EquivalenceReport, WeightError> {
    if q_samples.is_empty() {
        return Err(WeightError::InvalidParams("empty sample set"));
    }
    let lo_band = num::min(1.0 + 2.0 * params.gamma, -2.0 * params.mu);
    let hi_band = num::max(1.0 + 2.0 * params.gamma, -2.0 * params.mu);
    // The band bounds are exact on both branches, so only rounding slack is
    // tolerated.
    let slack = 1e-12;

    let mut rep = EquivalenceReport {
        tilde_over_w: (f64::INFINITY, f64::NEG_INFINITY),
        tilde_prime_over_hat_prime: (f64::INFINITY, f64::NEG_INFINITY),
        hat_band: (f64::INFINITY, f64::NEG_INFINITY),
        hat_band_bounds: (lo_band, hi_band),
        ok: true,
        violating_q: None,
    };

    for &q in q_samples {
        let s = eval_weights(q, params)?;
        let r1 = s.w_tilde / s.w;
        let r2 = s.w_tilde_prime / s.w_hat_prime;
        let r3 = s.w_hat_prime * (1.0 + num::abs(q)) / s.w_hat;
        rep.tilde_over_w = (num::min(rep.tilde_over_w.0, r1), num::max(rep.tilde_over_w.1, r1));
        rep.tilde_prime_over_hat_prime = (
            num::min(rep.tilde_prime_over_hat_prime.0, r2),
            num::max(rep.tilde_prime_over_hat_prime.1, r2),
        );
        rep.hat_band = (num::min(rep.hat_band.0, r3), num::max(rep.hat_band.1, r3));

        let in_bounds = (1.0 - slack..=2.0 + slack).contains(&r1)
            && (1.0 - slack..=2.0 + slack).contains(&r2)
            && (lo_band - slack..=hi_band + slack).contains(&r3);
        if !in_bounds && rep.ok {
            rep.ok = false;
            rep.violating_q = Some(q);
        }
    }
    Ok(rep)
}
