//! Truncated reduced right-hand sides for the gauge potential and the metric
//! perturbation, plus the curvature two-form.
//!
//! All contractions use the flat inverse m = diag(-1, 1, .., 1); raising one
//! index multiplies by msign. With F~_{ab} = d_a A_b - d_b A_a:
//!
//! Gauge source, fixed sigma:
//!
//! ```text
//!   S_A[sigma] =   (d_sigma h^{am}) (d_a A_m)
//!     + 1/2 (d^m h^n_sigma + d_sigma h^{nm} - d^n h^m_sigma) (d_m A_n - d_n A_m)
//!     + 1/2 (d^m h^n_sigma + d_sigma h^{nm} - d^n h^m_sigma) [A_m, A_n]
//!     - ( [A_m, d^m A_sigma] + [A^m, d_m A_sigma - d_sigma A_m]
//!         + [A^m, [A_m, A_sigma]] ).
//! ```
//!
//! Metric source, fixed (mu, nu):
//!
//! ```text
//!   S_h[mu nu] = -4 <F~_{mu b}, F~_{nu}{}^b> + m_{mu nu} <F~_{ab}, F~^{ab}>
//!     - 4 ( <F~_{mu b}, [A_nu, A^b]> + <[A_mu, A_b], F~_{nu}{}^b> )
//!     + m_{mu nu} ( <F~_{ab}, [A^a, A^b]> + <[A_a, A_b], F~^{ab}> )
//!     - 4 <[A_mu, A_b], [A_nu, A^b]> + m_{mu nu} <[A_a, A_b], [A^a, A^b]>
//!     + optional quadratic forms P/Q/G in the metric gradients.
//! ```
//!
//! The remainders dropped from both right-hand sides are cubic and higher
//! with at least one h factor; every emitted report carries the
//! "truncated reduced system" label. The P/Q/G hook defaults to off; the
//! built-in [`PqgModel::StandardWeakNull`] is a generic structural stand-in
//! (trace/null-form contractions), not a transcription of any particular
//! system.

use crate::algebra::{bracket, inner, Algebra, LieValue};
use crate::geometry::msign;
use crate::mat::{SqMat, DMAX};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceError {
    /// An index exceeds the spatial dimension of the jets.
    BadIndex(&'static str),
    /// Jets disagree on dimension or carry non-finite entries.
    BadJet(&'static str),
}

impl core::fmt::Display for SourceError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SourceError::BadIndex(what) => write!(f, "index out of range: {what}"),
            SourceError::BadJet(what) => write!(f, "bad jet: {what}"),
        }
    }
}

/// First-order jet of the gauge potential at one point: values A_mu and
/// gradients da[l][m] = d_l A_m, slots beyond n unused (zero).
#[derive(Debug, Clone)]
pub struct GaugeJets {
    pub n: usize,
    pub a: [LieValue; DMAX],
    pub da: [[LieValue; DMAX]; DMAX],
}

impl GaugeJets {
    pub fn zero(n: usize, alg: Algebra) -> GaugeJets {
        GaugeJets {
            n,
            a: core::array::from_fn(|_| LieValue::zero(alg)),
            da: core::array::from_fn(|_| core::array::from_fn(|_| LieValue::zero(alg))),
        }
    }

    pub fn validate(&self) -> Result<(), SourceError> {
        if self.n == 0 || self.n >= DMAX {
            return Err(SourceError::BadJet("gauge jet dimension"));
        }
        for mu in 0..=self.n {
            if !self.a[mu].is_finite() {
                return Err(SourceError::BadJet("non-finite potential value"));
            }
            for la in 0..=self.n {
                if !self.da[la][mu].is_finite() {
                    return Err(SourceError::BadJet("non-finite potential gradient"));
                }
            }
        }
        Ok(())
    }
}

/// First-order jet of the metric perturbation at one point: values h_{mu nu}
/// and gradients dh[l] = d_l h, all symmetric matrices on (n+1) slots.
#[derive(Debug, Clone)]
pub struct MetricJets {
    pub n: usize,
    pub h: SqMat,
    pub dh: [SqMat; DMAX],
}

impl MetricJets {
    pub fn zero(n: usize) -> MetricJets {
        MetricJets {
            n,
            h: SqMat::zero(n + 1),
            dh: core::array::from_fn(|_| SqMat::zero(n + 1)),
        }
    }

    pub fn validate(&self) -> Result<(), SourceError> {
        if self.n == 0 || self.n >= DMAX {
            return Err(SourceError::BadJet("metric jet dimension"));
        }
        if !self.h.is_symmetric(1e-14) {
            return Err(SourceError::BadJet("perturbation not symmetric"));
        }
        for la in 0..=self.n {
            if !self.dh[la].is_symmetric(1e-14) {
                return Err(SourceError::BadJet("perturbation gradient not symmetric"));
            }
        }
        Ok(())
    }
}

/// Optional quadratic forms in the metric gradients on the h right-hand
/// side. `StandardWeakNull` is a generic stand-in:
/// P = 1/4 d_mu(tr h) d_nu(tr h) - 1/2 <d_mu h, d_nu h>_m and
/// Q_{mu nu} = Q0(h_{mu nu}, tr h) with the null form
/// Q0(f, g) = m^{ab} d_a f d_b g; the curvature-coupled block G is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PqgModel {
    Off,
    StandardWeakNull,
}

fn check_pair(n_gauge: usize, n_metric: usize) -> Result<(), SourceError> {
    if n_gauge != n_metric {
        return Err(SourceError::BadJet("gauge and metric jets disagree on n"));
    }
    Ok(())
}

/// Gauge right-hand side S_A[sigma]; see the module header for the four
/// groups. Metric indices are raised with m throughout.
pub fn source_a(
    sigma: usize,
    gauge: &GaugeJets,
    metric: &MetricJets,
) -> Result<LieValue, SourceError> {
    gauge.validate()?;
    metric.validate()?;
    check_pair(gauge.n, metric.n)?;
    let n = gauge.n;
    if sigma > n {
        return Err(SourceError::BadIndex("sigma"));
    }
    let alg = gauge.a[0].alg;
    let mut out = LieValue::zero(alg);

    // (d_sigma h^{am}) (d_a A_m).
    for al in 0..=n {
        for mu in 0..=n {
            let c = msign(al) * msign(mu) * metric.dh[sigma].a[al][mu];
            if c != 0.0 {
                out = out.add_scaled(c, &gauge.da[al][mu]);
            }
        }
    }

    // Shared factor C^{mn} = d^m h^n_sigma + d_sigma h^{nm} - d^n h^m_sigma,
    // paired with the antisymmetrized gradient and with the bracket.
    for m in 0..=n {
        for nu in 0..=n {
            let c = 0.5
                * msign(m)
                * msign(nu)
                * (metric.dh[m].a[nu][sigma] + metric.dh[sigma].a[nu][m]
                    - metric.dh[nu].a[m][sigma]);
            if c != 0.0 {
                let asym = gauge.da[m][nu].sub(&gauge.da[nu][m]);
                out = out.add_scaled(c, &asym);
                out = out.add_scaled(c, &bracket(&gauge.a[m], &gauge.a[nu]));
            }
        }
    }

    // -( [A_m, d^m A_sigma] + [A^m, d_m A_sigma - d_sigma A_m]
    //    + [A^m, [A_m, A_sigma]] ).
    for m in 0..=n {
        let sm = msign(m);
        out = out.add_scaled(-sm, &bracket(&gauge.a[m], &gauge.da[m][sigma]));
        let d = gauge.da[m][sigma].sub(&gauge.da[sigma][m]);
        out = out.add_scaled(-sm, &bracket(&gauge.a[m], &d));
        out = out.add_scaled(
            -sm,
            &bracket(&gauge.a[m], &bracket(&gauge.a[m], &gauge.a[sigma])),
        );
    }

    Ok(out)
}

fn m_lower(mu: usize, nu: usize) -> f64 {
    if mu == nu {
        msign(mu)
    } else {
        0.0
    }
}

/// Yang-Mills feedback on the metric right-hand side S_h[mu nu], plus the
/// optional P/Q/G block.
pub fn source_h(
    mu: usize,
    nu: usize,
    gauge: &GaugeJets,
    metric: &MetricJets,
    pqg: PqgModel,
) -> Result<f64, SourceError> {
    gauge.validate()?;
    metric.validate()?;
    check_pair(gauge.n, metric.n)?;
    let n = gauge.n;
    if mu > n || nu > n {
        return Err(SourceError::BadIndex("mu or nu"));
    }
    let ft = |al: usize, be: usize| gauge.da[al][be].sub(&gauge.da[be][al]);
    let br = |al: usize, be: usize| bracket(&gauge.a[al], &gauge.a[be]);
    let mmn = m_lower(mu, nu);

    let mut total = 0.0;

    // -4 <F~_{mu b}, F~_{nu}{}^b>.
    for b in 0..=n {
        total += -4.0 * msign(b) * inner(&ft(mu, b), &ft(nu, b));
    }
    // + m_{mu nu} <F~_{ab}, F~^{ab}>.
    if mmn != 0.0 {
        let mut tr = 0.0;
        for a in 0..=n {
            for b in 0..=n {
                tr += msign(a) * msign(b) * inner(&ft(a, b), &ft(a, b));
            }
        }
        total += mmn * tr;
    }
    // -4 ( <F~_{mu b}, [A_nu, A^b]> + <[A_mu, A_b], F~_{nu}{}^b> ).
    for b in 0..=n {
        let sb = msign(b);
        total += -4.0 * sb * inner(&ft(mu, b), &br(nu, b));
        total += -4.0 * sb * inner(&br(mu, b), &ft(nu, b));
    }
    // + m_{mu nu} ( <F~_{ab}, [A^a, A^b]> + <[A_a, A_b], F~^{ab}> ).
    if mmn != 0.0 {
        let mut tr = 0.0;
        for a in 0..=n {
            for b in 0..=n {
                let s = msign(a) * msign(b);
                tr += s * inner(&ft(a, b), &br(a, b));
                tr += s * inner(&br(a, b), &ft(a, b));
            }
        }
        total += mmn * tr;
    }
    // -4 <[A_mu, A_b], [A_nu, A^b]>.
    for b in 0..=n {
        total += -4.0 * msign(b) * inner(&br(mu, b), &br(nu, b));
    }
    // + m_{mu nu} <[A_a, A_b], [A^a, A^b]>.
    if mmn != 0.0 {
        let mut tr = 0.0;
        for a in 0..=n {
            for b in 0..=n {
                tr += msign(a) * msign(b) * inner(&br(a, b), &br(a, b));
            }
        }
        total += mmn * tr;
    }

    if pqg == PqgModel::StandardWeakNull {
        total += pqg_standard(mu, nu, metric);
    }

    Ok(total)
}

/// Generic weak-null stand-in for the P/Q/G block; see [`PqgModel`].
fn pqg_standard(mu: usize, nu: usize, metric: &MetricJets) -> f64 {
    let n = metric.n;
    let tr_grad = |la: usize| -> f64 {
        let mut s = 0.0;
        for a in 0..=n {
            s += msign(a) * metric.dh[la].a[a][a];
        }
        s
    };
    // P = 1/4 d_mu(tr h) d_nu(tr h) - 1/2 <d_mu h, d_nu h>_m.
    let mut p = 0.25 * tr_grad(mu) * tr_grad(nu);
    for a in 0..=n {
        for b in 0..=n {
            p -= 0.5 * msign(a) * msign(b) * metric.dh[mu].a[a][b] * metric.dh[nu].a[a][b];
        }
    }
    // Q_{mu nu} = Q0(h_{mu nu}, tr h) with Q0(f, g) = m^{ab} d_a f d_b g.
    let mut q = 0.0;
    for a in 0..=n {
        q += msign(a) * metric.dh[a].a[mu][nu] * tr_grad(a);
    }
    // G block: zero in the stand-in.
    p + q
}

/// Curvature two-form F_{ab} = d_a A_b - d_b A_a + [A_a, A_b] on all slots.
pub fn curvature_f(gauge: &GaugeJets) -> [[LieValue; DMAX]; DMAX] {
    let alg = gauge.a[0].alg;
    let mut f: [[LieValue; DMAX]; DMAX] =
        core::array::from_fn(|_| core::array::from_fn(|_| LieValue::zero(alg)));
    for al in 0..=gauge.n {
        for be in 0..=gauge.n {
            f[al][be] = gauge.da[al][be]
                .sub(&gauge.da[be][al])
                .add(&bracket(&gauge.a[al], &gauge.a[be]));
        }
    }
    f
}

/// Squared pointwise size sum_{a,b} |F_{ab}|^2 over both index orders; the
/// killing-form pairing makes it invariant under algebra automorphisms.
pub fn curvature_norm_sq(f: &[[LieValue; DMAX]; DMAX], n: usize) -> f64 {
    let mut s = 0.0;
    for al in 0..=n {
        for be in 0..=n {
            s += f[al][be].norm_sq();
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    fn e(k: usize) -> LieValue {
        LieValue::basis(Algebra::Su2, k)
    }

    #[test]
    fn constant_su2_potentials_give_pure_bracket_source() {
        // A_t = e1, A_r = e2, all gradients and h zero. Only the iterated
        // bracket survives: -([A^t,[A_t,A_r]] + [A^r,[A_r,A_r]]) = [e1, e3].
        let mut gauge = GaugeJets::zero(3, Algebra::Su2);
        gauge.a[0] = e(0);
        gauge.a[1] = e(1);
        let metric = MetricJets::zero(3);
        let got = source_a(1, &gauge, &metric).expect("source");
        let want = e(1).scale(-1.0);
        assert!(
            got.sub(&want).norm() < 1e-15,
            "constant-potential source must be -e2, got coeffs {:?}",
            [got.coeff(0), got.coeff(1), got.coeff(2)]
        );
    }

    #[test]
    fn abelian_electric_gradient_drives_metric_source() {
        // d_t A_r = e1 only: the (t,t) source is -4 |F~_tr|^2 + m_tt * 2 |F~_tr|^2
        // with the trace running over both index orders: -4 + (-1)(-2) = -2.
        let mut gauge = GaugeJets::zero(4, Algebra::Abelian);
        gauge.da[0][1] = LieValue::from_scalar(Algebra::Abelian, 1.0);
        let metric = MetricJets::zero(4);
        let got = source_h(0, 0, &gauge, &metric, PqgModel::Off).expect("source");
        assert!(
            (got - (-2.0)).abs() < 1e-15,
            "frozen abelian (t,t) source must be -2, got {got}"
        );
    }

    #[test]
    fn metric_gradient_group_matches_hand_value() {
        // Only dh[0] = diag(2,3) (n = 1) and diagonal gauge gradients:
        // S_A[0] = s(a)s(m) dh[0]_{am} da[a][m] = 2*5 + 3*7 = 31 (times e1);
        // the shared-factor group vanishes for diagonal dh[0].
        let mut gauge = GaugeJets::zero(1, Algebra::Abelian);
        gauge.da[0][0] = LieValue::from_scalar(Algebra::Abelian, 5.0);
        gauge.da[1][1] = LieValue::from_scalar(Algebra::Abelian, 7.0);
        let mut metric = MetricJets::zero(1);
        metric.dh[0].a[0][0] = 2.0;
        metric.dh[0].a[1][1] = 3.0;
        let got = source_a(0, &gauge, &metric).expect("source");
        assert!(
            (got.scalar() - 31.0).abs() < 1e-13,
            "gradient-contraction group must give 31, got {}",
            got.scalar()
        );
    }

    #[test]
    fn shared_factor_group_matches_hand_value() {
        // Only d_r h_tt = 4 and d_r A_t = e1 (n = 1, sigma = t):
        // C^{10} = -4, C^{01} = +4, so the antisymmetric pairing gives
        // 1/2 (C^{10} - C^{01}) (d_r A_t) = -4 e1.
        let mut gauge = GaugeJets::zero(1, Algebra::Abelian);
        gauge.da[1][0] = LieValue::from_scalar(Algebra::Abelian, 1.0);
        let mut metric = MetricJets::zero(1);
        metric.dh[1].a[0][0] = 4.0;
        let got = source_a(0, &gauge, &metric).expect("source");
        assert!(
            (got.scalar() - (-4.0)).abs() < 1e-13,
            "shared-factor group must give -4, got {}",
            got.scalar()
        );
    }

    #[test]
    fn su2_curvature_of_constant_potentials_is_bracket() {
        let mut gauge = GaugeJets::zero(3, Algebra::Su2);
        gauge.a[0] = e(0);
        gauge.a[1] = e(1);
        let f = curvature_f(&gauge);
        assert!(
            f[0][1].sub(&e(2)).norm() < 1e-15,
            "F_tr of constant e1, e2 potentials must be e3"
        );
        assert!(
            f[1][0].add(&e(2)).norm() < 1e-15,
            "curvature must be antisymmetric"
        );
        assert!(
            (curvature_norm_sq(&f, 3) - 2.0).abs() < 1e-15,
            "norm squared counts both index orders"
        );
    }

    #[test]
    fn abelian_curvature_is_gradient_antisymmetrization() {
        let mut gauge = GaugeJets::zero(2, Algebra::Abelian);
        gauge.a[1] = LieValue::from_scalar(Algebra::Abelian, 9.0);
        gauge.da[0][1] = LieValue::from_scalar(Algebra::Abelian, 2.5);
        let f = curvature_f(&gauge);
        assert!(
            (f[0][1].scalar() - 2.5).abs() < 1e-15,
            "abelian F_tr must be d_t A_r; brackets vanish"
        );
    }

    fn random_gauge(n: usize, alg: Algebra, seed: u64) -> GaugeJets {
        let mut g = GaugeJets::zero(n, alg);
        let mut s = Stream::new(seed);
        let dim = alg.dim();
        let draw = |s: &mut Stream| {
            let mut c = [0.0f64; 3];
            for slot in c.iter_mut().take(dim) {
                *slot = s.next_symmetric();
            }
            LieValue::from_coeffs(alg, &c[..dim])
        };
        for mu in 0..=n {
            g.a[mu] = draw(&mut s);
            for la in 0..=n {
                g.da[la][mu] = draw(&mut s);
            }
        }
        g
    }

    fn random_metric(n: usize, seed: u64) -> MetricJets {
        let mut m = MetricJets::zero(n);
        let mut s = Stream::new(seed);
        for a in 0..=n {
            for b in a..=n {
                let v = 0.2 * s.next_symmetric();
                m.h.a[a][b] = v;
                m.h.a[b][a] = v;
                for la in 0..=n {
                    let w = 0.2 * s.next_symmetric();
                    m.dh[la].a[a][b] = w;
                    m.dh[la].a[b][a] = w;
                }
            }
        }
        m
    }

    fn scale_gauge(g: &GaugeJets, s: f64) -> GaugeJets {
        let mut out = g.clone();
        for mu in 0..DMAX {
            out.a[mu] = out.a[mu].scale(s);
            for la in 0..DMAX {
                out.da[la][mu] = out.da[la][mu].scale(s);
            }
        }
        out
    }

    #[test]
    fn metric_source_quadratic_block_scales_by_four() {
        // With values zeroed the source is purely quadratic in dA.
        let mut gauge = random_gauge(4, Algebra::Su2, 11);
        for mu in 0..DMAX {
            gauge.a[mu] = LieValue::zero(Algebra::Su2);
        }
        let metric = MetricJets::zero(4);
        let one = source_h(0, 2, &gauge, &metric, PqgModel::Off).expect("source");
        let two = source_h(0, 2, &scale_gauge(&gauge, 2.0), &metric, PqgModel::Off)
            .expect("source");
        assert!(
            (two - 4.0 * one).abs() < 1e-12 * (1.0 + one.abs()),
            "gradient-only metric source must scale by 4 under doubling: {one} -> {two}"
        );
    }

    #[test]
    fn metric_source_pure_bracket_block_scales_by_sixteen() {
        let mut gauge = random_gauge(4, Algebra::Su2, 12);
        for la in 0..DMAX {
            for mu in 0..DMAX {
                gauge.da[la][mu] = LieValue::zero(Algebra::Su2);
            }
        }
        let metric = MetricJets::zero(4);
        let one = source_h(1, 1, &gauge, &metric, PqgModel::Off).expect("source");
        let two = source_h(1, 1, &scale_gauge(&gauge, 2.0), &metric, PqgModel::Off)
            .expect("source");
        assert!(
            (two - 16.0 * one).abs() < 1e-12 * (1.0 + one.abs()),
            "value-only metric source must scale by 16 under doubling: {one} -> {two}"
        );
    }

    #[test]
    fn gauge_source_cubic_block_scales_by_eight() {
        // Gradients and h zeroed: only the iterated bracket remains.
        let mut gauge = random_gauge(3, Algebra::Su2, 13);
        for la in 0..DMAX {
            for mu in 0..DMAX {
                gauge.da[la][mu] = LieValue::zero(Algebra::Su2);
            }
        }
        let metric = MetricJets::zero(3);
        let one = source_a(2, &gauge, &metric).expect("source");
        let two = source_a(2, &scale_gauge(&gauge, 2.0), &metric, ).expect("source");
        assert!(
            two.sub(&one.scale(8.0)).norm() < 1e-12 * (1.0 + one.norm()),
            "pure-bracket gauge source must scale by 8 under doubling"
        );
    }

    #[test]
    fn gauge_source_linear_in_metric_gradients() {
        let gauge = random_gauge(3, Algebra::Su2, 14);
        let metric = random_metric(3, 15);
        let mut doubled = metric.clone();
        for la in 0..DMAX {
            for a in 0..DMAX {
                for b in 0..DMAX {
                    doubled.dh[la].a[a][b] *= 2.0;
                }
            }
        }
        // Isolate the h-dependent groups by subtracting the h-free part.
        let flat = MetricJets::zero(3);
        let base = source_a(1, &gauge, &flat).expect("flat source");
        let s1 = source_a(1, &gauge, &metric).expect("source").sub(&base);
        let s2 = source_a(1, &gauge, &doubled).expect("source").sub(&base);
        assert!(
            s2.sub(&s1.scale(2.0)).norm() < 1e-12 * (1.0 + s1.norm()),
            "metric-gradient groups must be linear in dh"
        );
    }

    #[test]
    fn metric_source_is_symmetric_in_its_indices() {
        let gauge = random_gauge(4, Algebra::Su2, 16);
        let metric = random_metric(4, 17);
        for mu in 0..=4 {
            for nu in 0..=4 {
                let ab = source_h(mu, nu, &gauge, &metric, PqgModel::Off).expect("source");
                let ba = source_h(nu, mu, &gauge, &metric, PqgModel::Off).expect("source");
                assert!(
                    (ab - ba).abs() < 1e-12 * (1.0 + ab.abs()),
                    "S_h must be symmetric: ({mu},{nu}) gave {ab} vs {ba}"
                );
            }
        }
    }

    #[test]
    fn gauge_source_is_equivariant_under_basis_rotation() {
        // Cyclic permutation of the su(2) basis is an inner automorphism;
        // the source built from permuted jets must equal the permuted source.
        let rotate = |v: &LieValue| {
            LieValue::from_coeffs(Algebra::Su2, &[v.coeff(2), v.coeff(0), v.coeff(1)])
        };
        let gauge = random_gauge(3, Algebra::Su2, 18);
        let metric = random_metric(3, 19);
        let mut rotated = gauge.clone();
        for mu in 0..DMAX {
            rotated.a[mu] = rotate(&rotated.a[mu]);
            for la in 0..DMAX {
                rotated.da[la][mu] = rotate(&rotated.da[la][mu]);
            }
        }
        for sigma in 0..=3 {
            let direct = source_a(sigma, &rotated, &metric).expect("source");
            let pushed = rotate(&source_a(sigma, &gauge, &metric).expect("source"));
            assert!(
                direct.sub(&pushed).norm() < 1e-12,
                "sigma={sigma}: source must commute with basis rotation"
            );
        }
    }

    #[test]
    fn metric_source_invariant_under_basis_rotation() {
        let rotate = |v: &LieValue| {
            LieValue::from_coeffs(Algebra::Su2, &[v.coeff(2), v.coeff(0), v.coeff(1)])
        };
        let gauge = random_gauge(3, Algebra::Su2, 20);
        let metric = random_metric(3, 21);
        let mut rotated = gauge.clone();
        for mu in 0..DMAX {
            rotated.a[mu] = rotate(&rotated.a[mu]);
            for la in 0..DMAX {
                rotated.da[la][mu] = rotate(&rotated.da[la][mu]);
            }
        }
        let a = source_h(0, 1, &gauge, &metric, PqgModel::Off).expect("source");
        let b = source_h(0, 1, &rotated, &metric, PqgModel::Off).expect("source");
        assert!(
            (a - b).abs() < 1e-12 * (1.0 + a.abs()),
            "scalar metric source must be invariant under basis rotation"
        );
    }

    #[test]
    fn pqg_hook_only_fires_when_enabled() {
        let gauge = random_gauge(3, Algebra::Su2, 22);
        let metric = random_metric(3, 23);
        let off = source_h(1, 2, &gauge, &metric, PqgModel::Off).expect("source");
        let on = source_h(1, 2, &gauge, &metric, PqgModel::StandardWeakNull).expect("source");
        assert!(
            (on - off).abs() > 1e-6,
            "weak-null stand-in must contribute for generic metric gradients"
        );
        let flat = MetricJets::zero(3);
        let off_flat = source_h(1, 2, &gauge, &flat, PqgModel::Off).expect("source");
        let on_flat = source_h(1, 2, &gauge, &flat, PqgModel::StandardWeakNull).expect("source");
        assert!(
            (on_flat - off_flat).abs() < 1e-15,
            "stand-in must vanish on flat metric jets"
        );
    }

    #[test]
    fn index_and_shape_validation() {
        let gauge = GaugeJets::zero(3, Algebra::Su2);
        let metric = MetricJets::zero(3);
        assert!(matches!(
            source_a(4, &gauge, &metric),
            Err(SourceError::BadIndex(_))
        ));
        assert!(matches!(
            source_h(0, 5, &gauge, &metric, PqgModel::Off),
            Err(SourceError::BadIndex(_))
        ));
        let other = MetricJets::zero(2);
        assert!(matches!(
            source_a(0, &gauge, &other),
            Err(SourceError::BadJet(_))
        ));
        let mut asym = MetricJets::zero(3);
        asym.h.a[0][1] = 0.3;
        assert!(matches!(
            source_a(0, &gauge, &asym),
            Err(SourceError::BadJet(_))
        ));
    }
}
