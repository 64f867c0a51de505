//! Metric assembly at a point: g = m + h with m = diag(-1, +1, ..., +1),
//! the inverse g^{-1}, the perturbation H^{uv} = g^{uv} - m^{uv}, and first
//! derivatives dH = -g^{-1} (dh) g^{-1} when dh is supplied. The smallness
//! test sum |H_{uv}| < 1/n gates every coupled estimate downstream.

use crate::mat::SqMat;
use crate::num;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeometryError {
    /// g = m + h failed to invert.
    Singular,
    /// g^{tt} >= -0.1: the time direction is no longer uniformly timelike.
    MetricDegenerate { g_tt_upper: f64 },
    /// h was not symmetric, not finite, or of the wrong dimension.
    BadPerturbation(&'static str),
}

impl core::fmt::Display for GeometryError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GeometryError::Singular => write!(f, "metric degenerate: g is singular"),
            GeometryError::MetricDegenerate { g_tt_upper } => {
                write!(f, "metric degenerate: g^tt = {g_tt_upper} >= -0.1")
            }
            GeometryError::BadPerturbation(what) => write!(f, "bad perturbation: {what}"),
        }
    }
}

/// Assembled metric data at one spacetime point. `dh_lower` / `d_big_h`
/// are indexed by the derivative direction: 0 = d/dt, 1 = d/dr.
#[derive(Clone, Copy, Debug)]
pub struct MetricPoint {
    pub n: usize,
    pub h_lower: SqMat,
    pub g_lower: SqMat,
    pub g_upper: SqMat,
    /// h^{uv} = m^{uu'} m^{vv'} h_{u'v'} (raised with m, not g).
    pub h_upper_raised: SqMat,
    /// H^{uv} = g^{uv} - m^{uv}.
    pub big_h_upper: SqMat,
    pub dh_lower: [SqMat; 2],
    /// dH^{uv} along t and r: exact matrix identity -g^{-1}(dh)g^{-1}.
    pub d_big_h: [SqMat; 2],
}

/// Sign of the diagonal Minkowski metric: s(0) = -1, s(i) = +1.
#[inline]
pub fn msign(mu: usize) -> f64 {
    if mu == 0 {
        -1.0
    } else {
        1.0
    }
}

/// Raise or lower every index of a 2-tensor with m (an involution).
pub fn m_flip(t: &SqMat) -> SqMat {
    let mut out = *t;
    for i in 0..t.dim {
        for j in 0..t.dim {
            out.a[i][j] = msign(i) * msign(j) * t.a[i][j];
        }
    }
    out
}

pub fn build_metric(n: usize, h_lower: &SqMat) -> Result<MetricPoint, GeometryError> {
    let zero = SqMat::zero(n + 1);
    build_metric_with_derivs(n, h_lower, &zero, &zero)
}

/// Assemble the point including dH from the supplied perturbation
/// derivatives (lowered indices, directions t and r).
pub fn build_metric_with_derivs(
    n: usize,
    h_lower: &SqMat,
    dt_h: &SqMat,
    dr_h: &SqMat,
) -> Result<MetricPoint, GeometryError> {
    if h_lower.dim != n + 1 {
        return Err(GeometryError::BadPerturbation("dimension mismatch"));
    }
    if !h_lower.is_finite() {
        return Err(GeometryError::BadPerturbation("non-finite entries"));
    }
    if !h_lower.is_symmetric(1e-14) {
        return Err(GeometryError::BadPerturbation("h must be symmetric"));
    }
    let m = SqMat::minkowski(n + 1);
    let g_lower = m.add(h_lower);
    let g_upper = g_lower.invert().ok_or(GeometryError::Singular)?;
    if g_upper.a[0][0] >= -0.1 {
        return Err(GeometryError::MetricDegenerate {
            g_tt_upper: g_upper.a[0][0],
        });
    }
    // m is its own inverse, so H = g^{-1} - m.
    let big_h_upper = g_upper.sub(&m);
    let d_big_h = [
        g_upper.mul(dt_h).mul(&g_upper).scale(-1.0),
        g_upper.mul(dr_h).mul(&g_upper).scale(-1.0),
    ];
    Ok(MetricPoint {
        n,
        h_lower: *h_lower,
        g_lower,
        g_upper,
        h_upper_raised: m_flip(h_lower),
        big_h_upper,
        dh_lower: [*dt_h, *dr_h],
        d_big_h,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct SmallnessReport {
    /// sum over u,v of |H_{uv}| (indices lowered with m).
    pub sum_lower: f64,
    /// sum over u,v of |H^{uv}| (as stored). Equal to sum_lower for diagonal
    /// m, kept separately as cost-free insurance.
    pub sum_raised: f64,
    pub bound: f64,
    pub ok: bool,
}

/// The perturbation bound sum |H_{uv}| < 1/n required by every energy
/// estimate. Both index placements must pass.
pub fn smallness_check(pt: &MetricPoint) -> SmallnessReport {
    let lowered = m_flip(&pt.big_h_upper);
    let mut sum_lower = 0.0;
    let mut sum_raised = 0.0;
    for i in 0..pt.big_h_upper.dim {
        for j in 0..pt.big_h_upper.dim {
            sum_lower += num::abs(lowered.a[i][j]);
            sum_raised += num::abs(pt.big_h_upper.a[i][j]);
        }
    }
    let bound = 1.0 / pt.n as f64;
    SmallnessReport {
        sum_lower,
        sum_raised,
        bound,
        ok: sum_lower < bound && sum_raised < bound,
    }
}

/// Radial-mode perturbation: only (tt, tr, rr) tracked, angular block zero.
pub fn radial_h(n: usize, h_tt: f64, h_tr: f64, h_rr: f64) -> SqMat {
    let mut h = SqMat::zero(n + 1);
    h.a[0][0] = h_tt;
    h.a[0][1] = h_tr;
    h.a[1][0] = h_tr;
    h.a[1][1] = h_rr;
    h
}
