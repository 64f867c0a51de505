//! Uniform radial grid r_j = j dr, 4th-order finite differences with parity
//! ghost points across r = 0 and one-sided closures at the outer edge, and
//! the weighted exterior integral
//!
//!   |S^{n-1}| int_{r >= t+q0} f(r) weight(r - t) r^{n-1} dr
//!
//! by composite trapezoid with a fractional first cell at the cone cut.

use crate::algebra::LieValue;
use crate::num;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GridError {
    BadSpec(&'static str),
    LengthMismatch { expected: usize, got: usize },
    /// The cone cut t + q0 has run past r_max - 4 dr: the resolved exterior
    /// is gone and the run horizon is over.
    DomainExhausted { t: f64, q0: f64 },
}

impl core::fmt::Display for GridError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GridError::BadSpec(what) => write!(f, "bad grid spec: {what}"),
            GridError::LengthMismatch { expected, got } => {
                write!(f, "array length {got} does not match grid ({expected} points)")
            }
            GridError::DomainExhausted { t, q0 } => {
                write!(f, "domain exhausted: t + q0 = {} reached the outer boundary", t + q0)
            }
        }
    }
}

/// Reflection symmetry of a radial profile across r = 0. Even profiles have
/// vanishing slope at the origin, odd profiles vanish there.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    /// d/dr maps even profiles to odd ones and vice versa.
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RadialGrid {
    pub n: usize,
    pub dr: f64,
    /// Highest index: points are r_j = j dr for j = 0..=jmax.
    pub jmax: usize,
    pub r_max: f64,
    /// |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2).
    pub sphere_area: f64,
}

/// Gamma(m/2) for positive integer m, by the half-integer recursion.
fn gamma_half(m: usize) -> f64 {
    match m {
        0 => f64::INFINITY,
        1 => num::sqrt(core::f64::consts::PI),
        2 => 1.0,
        _ => (m as f64 / 2.0 - 1.0) * gamma_half(m - 2),
    }
}

pub fn sphere_area(n: usize) -> f64 {
    2.0 * num::powf(core::f64::consts::PI, n as f64 / 2.0) / gamma_half(n)
}

impl RadialGrid {
    pub fn new(n: usize, dr: f64, r_max: f64) -> Result<RadialGrid, GridError> {
        if n == 0 || n >= crate::mat::DMAX {
            return Err(GridError::BadSpec("spatial dimension out of range"));
        }
        if !(dr > 0.0 && dr.is_finite()) {
            return Err(GridError::BadSpec("dr must be positive"));
        }
        let jmax = libm::round(r_max / dr) as usize;
        if jmax < 16 {
            return Err(GridError::BadSpec("fewer than 16 grid cells"));
        }
        Ok(RadialGrid {
            n,
            dr,
            jmax,
            r_max: jmax as f64 * dr,
            sphere_area: sphere_area(n),
        })
    }

    pub fn len(&self) -> usize {
        self.jmax + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn r(&self, j: usize) -> f64 {
        j as f64 * self.dr
    }

    fn check_len<T>(&self, f: &[T]) -> Result<(), GridError> {
        if f.len() != self.len() {
            return Err(GridError::LengthMismatch {
                expected: self.len(),
                got: f.len(),
            });
        }
        Ok(())
    }
}

/// Values that finite-difference stencils can combine linearly. The `like`
/// argument supplies run-time structure (the Lie algebra) for the zero.
pub trait Linear: Copy {
    fn lin_zero(like: &Self) -> Self;
    fn lin_add_scaled(&self, s: f64, other: &Self) -> Self;
    fn lin_scale(&self, s: f64) -> Self;
}

impl Linear for f64 {
    fn lin_zero(_like: &f64) -> f64 {
        0.0
    }
    fn lin_add_scaled(&self, s: f64, other: &f64) -> f64 {
        self + s * other
    }
    fn lin_scale(&self, s: f64) -> f64 {
        self * s
    }
}

impl Linear for LieValue {
    fn lin_zero(like: &LieValue) -> LieValue {
        LieValue::zero(like.alg)
    }
    fn lin_add_scaled(&self, s: f64, other: &LieValue) -> LieValue {
        self.add_scaled(s, other)
    }
    fn lin_scale(&self, s: f64) -> LieValue {
        self.scale(s)
    }
}

// 4th-order stencils, all scaled by 1/(12 dr^k). Interior rows are centered;
// the last two rows use left-biased points; near r = 0 the centered rows
// reach across the origin via parity ghosts f_{-j} = sign * f_j.
const D1_CENTER: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
const D1_EDGE_M1: [f64; 5] = [-1.0, 6.0, -18.0, 10.0, 3.0]; // at x3 of x0..x4
const D1_EDGE: [f64; 5] = [3.0, -16.0, 36.0, -48.0, 25.0]; // at x4 of x0..x4
const D2_CENTER: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];
const D2_EDGE_M1: [f64; 6] = [1.0, -6.0, 14.0, -4.0, -15.0, 10.0]; // at x4 of x0..x5
const D2_EDGE: [f64; 6] = [-10.0, 61.0, -156.0, 214.0, -154.0, 45.0]; // at x5

fn combine<T: Linear>(f: &[T], start: isize, coeffs: &[f64], parity: Parity, scale: f64) -> T {
    let mut acc = T::lin_zero(&f[0]);
    if start >= 0 {
        for (k, c) in coeffs.iter().enumerate() {
            if *c != 0.0 {
                acc = acc.lin_add_scaled(c * scale, &f[start as usize + k]);
            }
        }
        return acc;
    }
    // Ghost points across r = 0: fold each reflected coefficient onto its
    // mirror index first, so parity cancellations are exact (an even
    // profile's derivative is identically 0 at the origin, not 1e-16).
    let mut folded = [0.0; 8];
    for (k, c) in coeffs.iter().enumerate() {
        let idx = start + k as isize;
        if idx >= 0 {
            folded[idx as usize] += c;
        } else {
            folded[(-idx) as usize] += c * parity.sign();
        }
    }
    for (j, c) in folded.iter().enumerate() {
        if *c != 0.0 {
            acc = acc.lin_add_scaled(c * scale, &f[j]);
        }
    }
    acc
}

/// d/dr, 4th order. The result has the opposite parity; in particular the
/// derivative of an even profile vanishes at r = 0 exactly.
pub fn deriv_r<T: Linear>(f: &[T], grid: &RadialGrid, parity: Parity) -> Result<Vec<T>, GridError> {
    grid.check_len(f)?;
    let jmax = grid.jmax;
    let s = 1.0 / (12.0 * grid.dr);
    let mut out = vec![T::lin_zero(&f[0]); f.len()];
    for j in 0..=jmax {
        out[j] = if j + 2 <= jmax {
            combine(f, j as isize - 2, &D1_CENTER, parity, s)
        } else if j + 1 <= jmax {
            combine(f, j as isize - 3, &D1_EDGE_M1, parity, s)
        } else {
            combine(f, j as isize - 4, &D1_EDGE, parity, s)
        };
    }
    Ok(out)
}

/// d^2/dr^2, 4th order, dedicated stencil (not d/dr applied twice).
pub fn deriv2_r<T: Linear>(
    f: &[T],
    grid: &RadialGrid,
    parity: Parity,
) -> Result<Vec<T>, GridError> {
    grid.check_len(f)?;
    let jmax = grid.jmax;
    let s = 1.0 / (12.0 * grid.dr * grid.dr);
    let mut out = vec![T::lin_zero(&f[0]); f.len()];
    for j in 0..=jmax {
        out[j] = if j + 2 <= jmax {
            combine(f, j as isize - 2, &D2_CENTER, parity, s)
        } else if j + 1 <= jmax {
            combine(f, j as isize - 4, &D2_EDGE_M1, parity, s)
        } else {
            combine(f, j as isize - 5, &D2_EDGE, parity, s)
        };
    }
    Ok(out)
}

/// Linear interpolation of a grid profile at radius r (clamped to the grid).
pub fn sample_linear<T: Linear>(f: &[T], grid: &RadialGrid, r: f64) -> T {
    let x = num::max(0.0, num::min(r / grid.dr, grid.jmax as f64));
    let j = num::min(libm::floor(x), (grid.jmax - 1) as f64) as usize;
    let frac = x - j as f64;
    f[j].lin_scale(1.0 - frac).lin_add_scaled(frac, &f[j + 1])
}

/// Weighted integral over the exterior region {r - t >= q0}:
///   |S^{n-1}| int_R^{r_max} density(r) weight(r - t) r^{n-1} dr,  R = t + q0,
/// composite trapezoid with a fractional first cell: the density is linearly
/// interpolated to the cut R while weight and r^{n-1} are evaluated exactly.
pub fn integrate_exterior<W: Fn(f64) -> f64>(
    density: &[f64],
    grid: &RadialGrid,
    t: f64,
    q0: f64,
    weight: W,
) -> Result<f64, GridError> {
    grid.check_len(density)?;
    if !(t >= 0.0 && t.is_finite() && q0.is_finite()) {
        return Err(GridError::BadSpec("bad time or cutoff"));
    }
    let cut = t + q0;
    if cut >= grid.r_max - 4.0 * grid.dr {
        return Err(GridError::DomainExhausted { t, q0 });
    }

    let node = |j: usize| -> f64 {
        let r = grid.r(j);
        density[j] * weight(r - t) * num::powi(r, grid.n as u32 - 1)
    };

    // First whole node at or beyond the cut; cut <= 0 means the exterior
    // covers the entire grid.
    let j0 = if cut <= 0.0 {
        0
    } else {
        libm::ceil(cut / grid.dr) as usize
    };

    let mut acc = 0.5 * (node(j0) + node(grid.jmax));
    for j in (j0 + 1)..grid.jmax {
        acc += node(j);
    }
    let mut total = acc * grid.dr;

    if cut > 0.0 {
        let r0 = grid.r(j0);
        let width = r0 - cut;
        if width > 0.0 {
            let frac = cut / grid.dr - (j0 - 1) as f64;
            let dens_cut = density[j0 - 1] * (1.0 - frac) + density[j0] * frac;
            let f_cut = dens_cut * weight(q0) * num::powi(cut, grid.n as u32 - 1);
            total += 0.5 * (f_cut + node(j0)) * width;
        }
    }

    Ok(grid.sphere_area * total)
}
