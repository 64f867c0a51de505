//! Pointwise algebra of the non-symmetric stress tensor
//!
//!   T^u_v = g^{ua} <d_a Phi, d_v Phi> - 1/2 delta^u_v g^{ab} <d_a Phi, d_b Phi>
//!
//! for Lie-algebra-valued fields: the T_tt and T_rt components, the split
//!   T_tt + T_rt = good_sq + H_correction
//! into a nonnegative tangential square plus a small-H remainder, and the
//! four-term divergence d^u T_{ut}. Everything here is exact algebra on
//! first/second-derivative jets; the identity suite hammers it with random
//! jets and random admissible metrics.

use crate::algebra::{inner, Algebra, LieValue};
use crate::geometry::MetricPoint;
use crate::mat::{SqMat, DMAX};
use crate::num;
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StressError {
    /// Radial components need x_i/r, undefined at the spatial origin.
    OriginRadialDirection,
    /// Non-finite entries, non-unit direction, or dimension mismatch.
    BadJet(&'static str),
}

impl core::fmt::Display for StressError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            StressError::OriginRadialDirection => {
                write!(f, "radial stress component undefined at r = 0")
            }
            StressError::BadJet(what) => write!(f, "bad jet: {what}"),
        }
    }
}

/// Spacetime point with the spatial direction x_i/r (unit when r > 0).
#[derive(Clone, Copy, Debug)]
pub struct Position {
    pub t: f64,
    pub r: f64,
    pub dir: [f64; DMAX - 1],
}

impl Position {
    /// Point on the first coordinate axis, the ray used by radial evolution.
    pub fn on_axis(t: f64, r: f64) -> Self {
        let mut dir = [0.0; DMAX - 1];
        dir[0] = 1.0;
        Position { t, r, dir }
    }
}

/// First-derivative jet: d[0] = d_t Phi, d[j] = d_{x_j} Phi (Cartesian).
#[derive(Clone, Copy, Debug)]
pub struct Jet1 {
    pub n: usize,
    pub pos: Position,
    pub d: [LieValue; DMAX],
}

impl Jet1 {
    pub fn new(n: usize, alg: Algebra, pos: Position) -> Self {
        Jet1 {
            n,
            pos,
            d: [LieValue::zero(alg); DMAX],
        }
    }

    /// Build the Cartesian jet of a radial field: d_j = (x_j/r) d_r Phi.
    pub fn radial(n: usize, pos: Position, dt_phi: LieValue, dr_phi: LieValue) -> Self {
        let mut jet = Jet1::new(n, dt_phi.alg, pos);
        jet.d[0] = dt_phi;
        for j in 1..=n {
            jet.d[j] = dr_phi.scale(pos.dir[j - 1]);
        }
        jet
    }

    pub fn validate(&self) -> Result<(), StressError> {
        if self.n == 0 || self.n >= DMAX {
            return Err(StressError::BadJet("spatial dimension out of range"));
        }
        for mu in 0..=self.n {
            if !self.d[mu].is_finite() {
                return Err(StressError::BadJet("non-finite derivative"));
            }
        }
        if !(self.pos.t.is_finite() && self.pos.r.is_finite() && self.pos.r >= 0.0) {
            return Err(StressError::BadJet("bad position"));
        }
        if self.pos.r > 0.0 {
            let mut nrm = 0.0;
            for j in 0..self.n {
                nrm += self.pos.dir[j] * self.pos.dir[j];
            }
            if num::abs(nrm - 1.0) > 1e-12 {
                return Err(StressError::BadJet("direction not unit"));
            }
        }
        Ok(())
    }

    /// d_r Phi = (x_j/r) d_j Phi.
    pub fn radial_derivative(&self) -> LieValue {
        let mut dr = LieValue::zero(self.d[0].alg);
        for j in 1..=self.n {
            dr = dr.add_scaled(self.pos.dir[j - 1], &self.d[j]);
        }
        dr
    }

    /// |d Phi|^2 = sum_u |d_u Phi|^2, the flat reference quadratic form.
    pub fn flat_grad_sq(&self) -> f64 {
        let mut s = 0.0;
        for mu in 0..=self.n {
            s += self.d[mu].norm_sq();
        }
        s
    }
}

/// Second-derivative jet; dd[u][v] = d_u d_v Phi, stored symmetrically.
#[derive(Clone, Copy, Debug)]
pub struct Jet2 {
    pub first: Jet1,
    pub dd: [[LieValue; DMAX]; DMAX],
}

impl Jet2 {
    pub fn new(first: Jet1) -> Self {
        let z = LieValue::zero(first.d[0].alg);
        Jet2 {
            first,
            dd: [[z; DMAX]; DMAX],
        }
    }

    /// Set d_u d_v Phi = d_v d_u Phi in one call, keeping dd symmetric.
    pub fn set_dd(&mut self, mu: usize, nu: usize, v: LieValue) {
        self.dd[mu][nu] = v;
        self.dd[nu][mu] = v;
    }
}

/// T_tt = -1/2 g^{tt} |d_t Phi|^2 + 1/2 g^{ji} <d_j Phi, d_i Phi>.
/// The g^{tj} cross terms have cancelled; `stress_raw_mixed` is the
/// uncancelled oracle.
pub fn stress_ttt(jet: &Jet1, pt: &MetricPoint) -> f64 {
    let g = &pt.g_upper;
    let mut out = -0.5 * g.a[0][0] * jet.d[0].norm_sq();
    for i in 1..=jet.n {
        for j in 1..=jet.n {
            out += 0.5 * g.a[j][i] * inner(&jet.d[j], &jet.d[i]);
        }
    }
    out
}

/// T_rt = g^{rt} |d_t Phi|^2 + g^{rj} <d_j Phi, d_t Phi>, with the radial
/// row g^{ra} = (x_i/r) g^{ia}.
pub fn stress_trt(jet: &Jet1, pt: &MetricPoint) -> Result<f64, StressError> {
    jet.validate()?;
    if jet.pos.r <= 0.0 {
        return Err(StressError::OriginRadialDirection);
    }
    let g = &pt.g_upper;
    let mut out = 0.0;
    for i in 1..=jet.n {
        let w = jet.pos.dir[i - 1];
        out += w * g.a[i][0] * jet.d[0].norm_sq();
        for j in 1..=jet.n {
            out += w * g.a[i][j] * inner(&jet.d[j], &jet.d[0]);
        }
    }
    Ok(out)
}

/// Split T_tt + T_rt = good_sq + H_correction:
///   good_sq = 1/2 |(d_t + d_r)Phi|^2 + 1/2 sum_i |(d_i - (x_i/r) d_r)Phi|^2
///   H_correction = -1/2 H^{tt}|d_t Phi|^2 + 1/2 H^{ji}<d_j Phi, d_i Phi>
///                  + H^{rt}|d_t Phi|^2 + H^{rj}<d_j Phi, d_t Phi>
/// good_sq is manifestly nonnegative; for small H the correction is a small
/// multiple of the full gradient square.
pub fn tangential_split(jet: &Jet1, pt: &MetricPoint) -> Result<(f64, f64), StressError> {
    jet.validate()?;
    if jet.pos.r <= 0.0 {
        return Err(StressError::OriginRadialDirection);
    }
    let dr = jet.radial_derivative();
    let out_null = jet.d[0].add(&dr);
    let mut good = 0.5 * out_null.norm_sq();
    for i in 1..=jet.n {
        let ang = jet.d[i].add_scaled(-jet.pos.dir[i - 1], &dr);
        good += 0.5 * ang.norm_sq();
    }

    let bh = &pt.big_h_upper;
    let mut corr = -0.5 * bh.a[0][0] * jet.d[0].norm_sq();
    for i in 1..=jet.n {
        for j in 1..=jet.n {
            corr += 0.5 * bh.a[j][i] * inner(&jet.d[j], &jet.d[i]);
        }
    }
    for i in 1..=jet.n {
        let w = jet.pos.dir[i - 1];
        corr += w * bh.a[i][0] * jet.d[0].norm_sq();
        for j in 1..=jet.n {
            corr += w * bh.a[i][j] * inner(&jet.d[j], &jet.d[0]);
        }
    }
    Ok((good, corr))
}

/// Divergence d^u T_{ut} in the four-term form
///   <g^{ua} d_u d_a Phi, d_t Phi>
///   + 1/2 (d_t H^{ta}) <d_a Phi, d_t Phi>
///   + (d_j H^{ja}) <d_a Phi, d_t Phi>
///   - 1/2 (d_t H^{jb}) <d_j Phi, d_b Phi>
/// with the spatial divergence d_j H^{ja} supplied explicitly (entry per a).
pub fn divergence_t_with_spatial_div(
    jet: &Jet2,
    pt: &MetricPoint,
    div_h: &[f64; DMAX],
) -> f64 {
    let n = jet.first.n;
    let d = &jet.first.d;
    let alg = d[0].alg;

    let mut box_g = LieValue::zero(alg);
    for mu in 0..=n {
        for al in 0..=n {
            box_g = box_g.add_scaled(pt.g_upper.a[mu][al], &jet.dd[mu][al]);
        }
    }
    let mut out = inner(&box_g, &d[0]);

    let dth = &pt.d_big_h[0];
    for al in 0..=n {
        out += (0.5 * dth.a[0][al] + div_h[al]) * inner(&d[al], &d[0]);
    }
    for j in 1..=n {
        for be in 0..=n {
            out -= 0.5 * dth.a[j][be] * inner(&d[j], &d[be]);
        }
    }
    out
}

/// Spatial divergence of H under the ray-aligned reduction d_j -> (x_j/r) d_r
/// applied to each Cartesian component: d_j H^{ja} = (x_j/r) (d_r H)^{ja}.
/// Zero at r = 0 (no radial direction there).
pub fn ray_spatial_div_h(jet: &Jet1, pt: &MetricPoint) -> [f64; DMAX] {
    let mut div = [0.0; DMAX];
    if jet.pos.r <= 0.0 {
        return div;
    }
    let drh = &pt.d_big_h[1];
    for al in 0..=jet.n {
        for j in 1..=jet.n {
            div[al] += jet.pos.dir[j - 1] * drh.a[j][al];
        }
    }
    div
}

/// Four-term divergence with the default ray-reduced spatial divergence of H.
pub fn divergence_t(jet: &Jet2, pt: &MetricPoint) -> f64 {
    let div = ray_spatial_div_h(&jet.first, pt);
    divergence_t_with_spatial_div(jet, pt, &div)
}

/// Energy density -1/2 (m^{tt}+H^{tt}) |d_t Phi|^2
///              + 1/2 (m^{ji}+H^{ji}) <d_j Phi, d_i Phi>,
/// comparable to 1/2 |d Phi|^2 whenever the smallness condition holds.
pub fn energy_density(jet: &Jet1, pt: &MetricPoint) -> f64 {
    let bh = &pt.big_h_upper;
    let mut out = -0.5 * (-1.0 + bh.a[0][0]) * jet.d[0].norm_sq();
    for i in 1..=jet.n {
        for j in 1..=jet.n {
            let m = if i == j { 1.0 } else { 0.0 };
            out += 0.5 * (m + bh.a[j][i]) * inner(&jet.d[j], &jet.d[i]);
        }
    }
    out
}

/// Raw mixed component T^u_v = g^{ua}<d_a Phi, d_v Phi>
///                     - 1/2 delta^u_v g^{ab}<d_a Phi, d_b Phi>,
/// straight from the definition with no cancellations. Oracle for the
/// component formulas above.
pub fn stress_raw_mixed(jet: &Jet1, pt: &MetricPoint, mu: usize, nu: usize) -> f64 {
    let g = &pt.g_upper;
    let mut out = 0.0;
    for al in 0..=jet.n {
        out += g.a[mu][al] * inner(&jet.d[al], &jet.d[nu]);
    }
    if mu == nu {
        let mut tr = 0.0;
        for al in 0..=jet.n {
            for be in 0..=jet.n {
                tr += g.a[al][be] * inner(&jet.d[al], &jet.d[be]);
            }
        }
        out -= 0.5 * tr;
    }
    out
}

/// Residual maxima of one pointwise identity over a jet sample.
#[derive(Clone, Copy, Debug)]
pub struct IdentityResidual {
    pub name: &'static str,
    pub max_residual: f64,
    /// RNG counter base of the worst jet; the jet is reproducible from
    /// (seed, counter) alone.
    pub worst_counter: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct IdentitySuiteReport {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    /// |T_tt + T_rt - good_sq - H_correction|.
    pub split: IdentityResidual,
    /// |T_tt - (-T^t_t raw)|: the g^{tj} cross-term cancellation.
    pub cross_term: IdentityResidual,
    /// |T_rt - (x_i/r) T^i_t raw|.
    pub radial_row: IdentityResidual,
    /// -min good_sq (positive iff positivity ever failed).
    pub positivity: IdentityResidual,
    /// |divergence| for flat-metric jets with m^{ua} d_u d_a Phi = 0.
    pub flat_divergence: IdentityResidual,
    /// Fraction of sampled metrics passing the smallness check (coverage).
    pub admissible_fraction: f64,
}

fn bump(res: &mut IdentityResidual, value: f64, counter: u64) {
    if value > res.max_residual {
        res.max_residual = value;
        res.worst_counter = counter;
    }
}

/// Random unit direction, non-degenerate by construction.
fn random_direction(n: usize, s: &mut rng::Stream) -> [f64; DMAX - 1] {
    let mut dir = [0.0; DMAX - 1];
    let mut nrm = 0.0;
    for j in 0..n {
        dir[j] = s.next_symmetric();
        nrm += dir[j] * dir[j];
    }
    if nrm < 1e-4 {
        dir = [0.0; DMAX - 1];
        dir[0] = 1.0;
        return dir;
    }
    let inv = 1.0 / num::sqrt(nrm);
    for j in 0..n {
        dir[j] *= inv;
    }
    dir
}

fn random_lie(alg: Algebra, s: &mut rng::Stream) -> LieValue {
    let mut c = [0.0; 3];
    for k in 0..alg.dim() {
        c[k] = s.next_symmetric();
    }
    LieValue::from_coeffs(alg, &c[..alg.dim()])
}

/// Random admissible perturbation h with sum |h_{uv}| <= 0.4/n, which keeps
/// the induced H inside the smallness band for every n in 2..=6.
fn random_small_h(n: usize, s: &mut rng::Stream) -> SqMat {
    let mut h = SqMat::zero(n + 1);
    let mut sum = 0.0;
    for i in 0..=n {
        for j in i..=n {
            let v = s.next_symmetric();
            h.a[i][j] = v;
            h.a[j][i] = v;
            sum += if i == j { num::abs(v) } else { 2.0 * num::abs(v) };
        }
    }
    let target = 0.4 / n as f64 * s.next_uniform();
    if sum > 0.0 {
        let sc = target / sum;
        for i in 0..=n {
            for j in 0..=n {
                h.a[i][j] *= sc;
            }
        }
    }
    h
}

/// Exercise every exact pointwise identity on `samples` random jets with
/// random small metrics. Residuals are pure algebra and should sit at the
/// rounding floor (~1e-15 per term); anything above 1e-12 is a defect.
pub fn identity_suite(n: usize, alg: Algebra, samples: usize, seed: u64) -> IdentitySuiteReport {
    let zero = IdentityResidual {
        name: "",
        max_residual: 0.0,
        worst_counter: 0,
    };
    let mut rep = IdentitySuiteReport {
        n,
        samples,
        seed,
        split: IdentityResidual { name: "split_identity", ..zero },
        cross_term: IdentityResidual { name: "cross_term_cancellation", ..zero },
        radial_row: IdentityResidual { name: "radial_row_vs_raw", ..zero },
        positivity: IdentityResidual { name: "good_sq_negativity", ..zero },
        flat_divergence: IdentityResidual { name: "flat_divergence", ..zero },
        admissible_fraction: 0.0,
    };
    let mut admissible = 0usize;

    for k in 0..samples {
        // 256 draws per jet keeps counters disjoint across samples.
        let base = (k as u64) * 256;
        let mut s = rng::Stream::at(seed, base);

        let dir = random_direction(n, &mut s);
        let pos = Position {
            t: 2.0 * s.next_uniform(),
            r: 0.5 + 4.0 * s.next_uniform(),
            dir,
        };
        let mut jet = Jet1::new(n, alg, pos);
        for mu in 0..=n {
            jet.d[mu] = random_lie(alg, &mut s);
        }

        let h = random_small_h(n, &mut s);
        let pt = match crate::geometry::build_metric(n, &h) {
            Ok(pt) => pt,
            Err(_) => continue,
        };
        if crate::geometry::smallness_check(&pt).ok {
            admissible += 1;
        }

        let ttt = stress_ttt(&jet, &pt);
        let trt = stress_trt(&jet, &pt).expect("jet has r > 0");
        let (good, corr) = tangential_split(&jet, &pt).expect("jet has r > 0");
        bump(&mut rep.split, num::abs(ttt + trt - good - corr), base);
        bump(&mut rep.positivity, -good, base);

        bump(
            &mut rep.cross_term,
            num::abs(ttt + stress_raw_mixed(&jet, &pt, 0, 0)),
            base,
        );
        let mut raw_radial = 0.0;
        for i in 1..=n {
            raw_radial += pos.dir[i - 1] * stress_raw_mixed(&jet, &pt, i, 0);
        }
        bump(&mut rep.radial_row, num::abs(trt - raw_radial), base);

        // Flat-wave second jet: random dd, then cancel the m-trace through
        // the dd[1][1] entry so m^{ua} d_u d_a Phi = 0 exactly.
        let flat_pt = crate::geometry::build_metric(n, &SqMat::zero(n + 1))
            .expect("flat metric is valid");
        let mut jet2 = Jet2::new(jet);
        for mu in 0..=n {
            for nu in mu..=n {
                let v = random_lie(alg, &mut s);
                jet2.set_dd(mu, nu, v);
            }
        }
        let mut trace = LieValue::zero(alg);
        for mu in 0..=n {
            let sgn = if mu == 0 { -1.0 } else { 1.0 };
            trace = trace.add_scaled(sgn, &jet2.dd[mu][mu]);
        }
        let fixed = jet2.dd[1][1].add_scaled(-1.0, &trace);
        jet2.set_dd(1, 1, fixed);
        bump(
            &mut rep.flat_divergence,
            num::abs(divergence_t(&jet2, &flat_pt)),
            base,
        );
    }

    rep.admissible_fraction = admissible as f64 / samples.max(1) as f64;
    rep
}
