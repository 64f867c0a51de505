//! Value arithmetic for fields taking values in a compact Lie algebra 𝔤.
//! Two algebras are supported: abelian (dim 1, the Maxwell/linear baseline)
//! and su(2) (dim 3, the smallest non-abelian compact case) with structure
//! constants [e_a, e_b] = eps_{abc} e_c. The inner product makes the basis
//! orthonormal and is ad-invariant: <[z,x],y> + <x,[z,y]> = 0.

use crate::num;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algebra {
    Abelian,
    Su2,
}

impl Algebra {
    pub fn dim(self) -> usize {
        match self {
            Algebra::Abelian => 1,
            Algebra::Su2 => 3,
        }
    }

    /// Config-token form used by run files.
    pub fn parse(token: &str) -> Option<Algebra> {
        match token {
            "abelian" => Some(Algebra::Abelian),
            "su2" => Some(Algebra::Su2),
            _ => None,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Algebra::Abelian => "abelian",
            Algebra::Su2 => "su2",
        }
    }
}

/// Element of 𝔤 as coefficients on the fixed orthonormal basis. Coefficients
/// beyond `alg.dim()` are structurally zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LieValue {
    pub alg: Algebra,
    c: [f64; 3],
}

impl LieValue {
    pub fn zero(alg: Algebra) -> Self {
        LieValue { alg, c: [0.0; 3] }
    }

    /// Basis vector e_{a+1} (zero-based index).
    pub fn basis(alg: Algebra, a: usize) -> Self {
        assert!(a < alg.dim(), "basis index {a} out of range for {alg:?}");
        let mut v = LieValue::zero(alg);
        v.c[a] = 1.0;
        v
    }

    /// Scalar embedded on the first basis direction; the representation used
    /// for real-valued (metric) components.
    pub fn from_scalar(alg: Algebra, x: f64) -> Self {
        let mut v = LieValue::zero(alg);
        v.c[0] = x;
        v
    }

    pub fn from_coeffs(alg: Algebra, coeffs: &[f64]) -> Self {
        assert_eq!(coeffs.len(), alg.dim(), "coefficient length mismatch");
        let mut v = LieValue::zero(alg);
        v.c[..coeffs.len()].copy_from_slice(coeffs);
        v
    }

    pub fn coeff(&self, a: usize) -> f64 {
        assert!(a < self.alg.dim());
        self.c[a]
    }

    /// First coefficient; inverse of [`LieValue::from_scalar`].
    pub fn scalar(&self) -> f64 {
        self.c[0]
    }

    pub fn add(&self, other: &LieValue) -> LieValue {
        assert_eq!(self.alg, other.alg, "algebra mismatch");
        LieValue {
            alg: self.alg,
            c: [
                self.c[0] + other.c[0],
                self.c[1] + other.c[1],
                self.c[2] + other.c[2],
            ],
        }
    }

    pub fn sub(&self, other: &LieValue) -> LieValue {
        assert_eq!(self.alg, other.alg, "algebra mismatch");
        LieValue {
            alg: self.alg,
            c: [
                self.c[0] - other.c[0],
                self.c[1] - other.c[1],
                self.c[2] - other.c[2],
            ],
        }
    }

    pub fn scale(&self, s: f64) -> LieValue {
        LieValue {
            alg: self.alg,
            c: [self.c[0] * s, self.c[1] * s, self.c[2] * s],
        }
    }

    /// self + s * other, the fused update used throughout the integrator.
    pub fn add_scaled(&self, s: f64, other: &LieValue) -> LieValue {
        assert_eq!(self.alg, other.alg, "algebra mismatch");
        LieValue {
            alg: self.alg,
            c: [
                self.c[0] + s * other.c[0],
                self.c[1] + s * other.c[1],
                self.c[2] + s * other.c[2],
            ],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(self)
    }

    pub fn norm(&self) -> f64 {
        norm(self)
    }
}

/// Lie bracket [x, y]: zero in the abelian algebra, eps_{abc} in su(2).
pub fn bracket(x: &LieValue, y: &LieValue) -> LieValue {
    assert_eq!(x.alg, y.alg, "algebra mismatch");
    match x.alg {
        Algebra::Abelian => LieValue::zero(Algebra::Abelian),
        Algebra::Su2 => LieValue {
            alg: Algebra::Su2,
            c: [
                x.c[1] * y.c[2] - x.c[2] * y.c[1],
                x.c[2] * y.c[0] - x.c[0] * y.c[2],
                x.c[0] * y.c[1] - x.c[1] * y.c[0],
            ],
        },
    }
}

/// Ad-invariant inner product; the basis is orthonormal by construction.
pub fn inner(x: &LieValue, y: &LieValue) -> f64 {
    assert_eq!(x.alg, y.alg, "algebra mismatch");
    x.c[0] * y.c[0] + x.c[1] * y.c[1] + x.c[2] * y.c[2]
}

pub fn norm_sq(x: &LieValue) -> f64 {
    inner(x, x)
}

pub fn norm(x: &LieValue) -> f64 {
    num::sqrt(norm_sq(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(a: usize) -> LieValue {
        LieValue::basis(Algebra::Su2, a)
    }

    #[test]
    fn bracket_of_element_with_itself_vanishes() {
        let x = LieValue::from_coeffs(Algebra::Su2, &[0.3, -1.2, 0.7]);
        assert_eq!(bracket(&x, &x), LieValue::zero(Algebra::Su2));
        let a = LieValue::basis(Algebra::Abelian, 0);
        assert_eq!(bracket(&a, &a), LieValue::zero(Algebra::Abelian));
    }

    #[test]
    fn su2_structure_constants_follow_eps_123() {
        assert_eq!(bracket(&e(0), &e(1)), e(2));
        assert_eq!(bracket(&e(1), &e(2)), e(0));
        assert_eq!(bracket(&e(2), &e(0)), e(1));
        assert_eq!(bracket(&e(1), &e(0)), e(2).scale(-1.0));
    }

    #[test]
    fn jacobi_identity_exact_on_all_basis_triples() {
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let lhs = bracket(&e(a), &bracket(&e(b), &e(c)))
                        .add(&bracket(&e(b), &bracket(&e(c), &e(a))))
                        .add(&bracket(&e(c), &bracket(&e(a), &e(b))));
                    assert_eq!(
                        lhs,
                        LieValue::zero(Algebra::Su2),
                        "jacobi failed on ({a},{b},{c})"
                    );
                }
            }
        }
    }

    #[test]
    fn inner_product_is_orthonormal_and_ad_invariant() {
        for a in 0..3 {
            for b in 0..3 {
                let expected = if a == b { 1.0 } else { 0.0 };
                assert_eq!(inner(&e(a), &e(b)), expected);
            }
        }
        // <[z,x],y> + <x,[z,y]> = 0 on every basis triple; e.g. z=e1, x=e2,
        // y=e3 gives 1 + (-1) = 0.
        for z in 0..3 {
            for x in 0..3 {
                for y in 0..3 {
                    let s = inner(&bracket(&e(z), &e(x)), &e(y))
                        + inner(&e(x), &bracket(&e(z), &e(y)));
                    assert_eq!(s, 0.0, "ad-invariance failed on ({z},{x},{y})");
                }
            }
        }
    }

    #[test]
    fn norm_positive_definite() {
        let x = LieValue::from_coeffs(Algebra::Su2, &[3.0, 4.0, 0.0]);
        assert_eq!(norm_sq(&x), 25.0);
        assert_eq!(norm(&LieValue::zero(Algebra::Su2)), 0.0);
    }

    #[test]
    #[should_panic(expected = "algebra mismatch")]
    fn mixing_algebras_panics() {
        let a = LieValue::basis(Algebra::Abelian, 0);
        let s = LieValue::basis(Algebra::Su2, 0);
        let _ = inner(&a, &s);
    }
}
