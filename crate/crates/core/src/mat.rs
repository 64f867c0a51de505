//! Small dense square matrices over f64, sized for spacetime dimension
//! n+1 <= 7. Storage is a fixed array with a runtime dimension; inversion is
//! Gauss-Jordan with partial pivoting, which at this size is exact to a few
//! ulps — the metric round-trip contract is `|g^{-1} g - I|_max <= 1e-12`.

use crate::num;

/// Maximum spacetime dimension: spatial n <= 6, so matrices are at most 7x7.
pub const DMAX: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqMat {
    pub dim: usize,
    pub a: [[f64; DMAX]; DMAX],
}

impl SqMat {
    pub fn zero(dim: usize) -> Self {
        assert!((1..=DMAX).contains(&dim), "matrix dim {dim} out of range");
        SqMat {
            dim,
            a: [[0.0; DMAX]; DMAX],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = SqMat::zero(dim);
        for i in 0..dim {
            m.a[i][i] = 1.0;
        }
        m
    }

    /// Minkowski metric diag(-1, +1, ..., +1); equal to its own inverse.
    pub fn minkowski(dim: usize) -> Self {
        let mut m = SqMat::identity(dim);
        m.a[0][0] = -1.0;
        m
    }

    pub fn add(&self, other: &SqMat) -> SqMat {
        assert_eq!(self.dim, other.dim);
        let mut out = SqMat::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.a[i][j] = self.a[i][j] + other.a[i][j];
            }
        }
        out
    }

    pub fn sub(&self, other: &SqMat) -> SqMat {
        assert_eq!(self.dim, other.dim);
        let mut out = SqMat::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.a[i][j] = self.a[i][j] - other.a[i][j];
            }
        }
        out
    }

    pub fn mul(&self, other: &SqMat) -> SqMat {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = SqMat::zero(n);
        for i in 0..n {
            for k in 0..n {
                let s = self.a[i][k];
                if s == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i][j] += s * other.a[k][j];
                }
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> SqMat {
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.a[i][j] *= s;
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m = num::max(m, num::abs(self.a[i][j]));
            }
        }
        m
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                if num::abs(self.a[i][j] - self.a[j][i]) > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_finite(&self) -> bool {
        for i in 0..self.dim {
            for j in 0..self.dim {
                if !self.a[i][j].is_finite() {
                    return false;
                }
            }
        }
        true
    }

    /// Gauss-Jordan inverse with partial pivoting. Returns None when a pivot
    /// collapses below 1e-300 (numerically singular).
    pub fn invert(&self) -> Option<SqMat> {
        let n = self.dim;
        let mut w = self.a;
        let mut inv = SqMat::identity(n).a;

        for col in 0..n {
            let mut pivot = col;
            for row in (col + 1)..n {
                if num::abs(w[row][col]) > num::abs(w[pivot][col]) {
                    pivot = row;
                }
            }
            if num::abs(w[pivot][col]) < 1e-300 {
                return None;
            }
            w.swap(col, pivot);
            inv.swap(col, pivot);

            let d = w[col][col];
            for j in 0..n {
                w[col][j] /= d;
                inv[col][j] /= d;
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let f = w[row][col];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    w[row][j] -= f * w[col][j];
                    inv[row][j] -= f * inv[col][j];
                }
            }
        }
        Some(SqMat { dim: n, a: inv })
    }
}
