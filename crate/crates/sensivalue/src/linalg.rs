//! Closed-form 2-vector and symmetric 2x2 matrix arithmetic.
//!
//! Everything downstream is fixed at dimension two (one sensitivity estimate
//! per benchmark source), so inverses and determinants use the explicit 2x2
//! formulas with a determinant floor instead of a general solver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Determinant floor below which a matrix is treated as singular.
pub const DET_FLOOR: f64 = 1e-300;

/// Real 2-vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Vector with both components equal to `c` (`c * ones`).
    pub fn splat(c: f64) -> Self {
        Self { x: c, y: c }
    }

    pub fn add(self, other: Vec2) -> Vec2 {
        Vec2::new(self.x + other.x, self.y + other.y)
    }

    pub fn sub(self, other: Vec2) -> Vec2 {
        Vec2::new(self.x - other.x, self.y - other.y)
    }

    pub fn scale(self, c: f64) -> Vec2 {
        Vec2::new(c * self.x, c * self.y)
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Sum of components (`1' v`).
    pub fn sum(self) -> f64 {
        self.x + self.y
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Outer product `v v'` (always symmetric PSD of rank one).
    pub fn outer(self) -> SymMat2 {
        SymMat2::new(self.x * self.x, self.x * self.y, self.y * self.y)
    }
}

/// Symmetric 2x2 matrix `[[a, b], [b, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymMat2 {
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

impl SymMat2 {
    pub fn new(a: f64, b: f64, d: f64) -> Self {
        Self { a, b, d }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn identity() -> Self {
        Self::new(1.0, 0.0, 1.0)
    }

    pub fn det(self) -> f64 {
        self.a * self.d - self.b * self.b
    }

    pub fn trace(self) -> f64 {
        self.a + self.d
    }

    /// Both eigenvalues strictly positive.
    pub fn is_positive_definite(self) -> bool {
        self.a > 0.0 && self.det() > 0.0 && self.a.is_finite() && self.b.is_finite() && self.d.is_finite()
    }

    pub fn add(self, other: SymMat2) -> SymMat2 {
        SymMat2::new(self.a + other.a, self.b + other.b, self.d + other.d)
    }

    pub fn scale(self, c: f64) -> SymMat2 {
        SymMat2::new(c * self.a, c * self.b, c * self.d)
    }

    /// Closed-form inverse; errors when `|det|` is below [`DET_FLOOR`].
    pub fn inverse(self) -> Result<SymMat2> {
        let det = self.det();
        if !det.is_finite() || det.abs() < DET_FLOOR {
            return Err(Error::SingularMatrix(det));
        }
        Ok(SymMat2::new(self.d / det, -self.b / det, self.a / det))
    }

    pub fn ln_det(self) -> Result<f64> {
        let det = self.det();
        if !det.is_finite() || det < DET_FLOOR {
            return Err(Error::SingularMatrix(det));
        }
        Ok(det.ln())
    }

    pub fn mul_vec(self, v: Vec2) -> Vec2 {
        Vec2::new(self.a * v.x + self.b * v.y, self.b * v.x + self.d * v.y)
    }

    /// Quadratic form `v' M v`.
    pub fn quad_form(self, v: Vec2) -> f64 {
        v.dot(self.mul_vec(v))
    }

    /// `1' M 1 = a + 2b + d`.
    pub fn quad_form_ones(self) -> f64 {
        self.a + 2.0 * self.b + self.d
    }

    /// Lower Cholesky factor `L` with `L L' = M`; requires positive definiteness.
    pub fn cholesky(self) -> Result<(f64, f64, f64)> {
        if !self.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        let l11 = self.a.sqrt();
        let l21 = self.b / l11;
        let l22 = (self.d - l21 * l21).sqrt();
        Ok((l11, l21, l22))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn inverse_roundtrip() {
        let m = SymMat2::new(2.0, 0.3, 1.5);
        let inv = m.inverse().unwrap();
        let prod_a = m.a * inv.a + m.b * inv.b;
        let prod_b = m.a * inv.b + m.b * inv.d;
        let prod_d = m.b * inv.b + m.d * inv.d;
        assert_relative_eq!(prod_a, 1.0, epsilon = 1e-14);
        assert_relative_eq!(prod_b, 0.0, epsilon = 1e-14);
        assert_relative_eq!(prod_d, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn singular_rejected() {
        let m = SymMat2::new(1.0, 1.0, 1.0);
        assert!(matches!(m.inverse(), Err(Error::SingularMatrix(_))));
    }

    #[test]
    fn cholesky_reconstructs() {
        let m = SymMat2::new(0.0025, 0.0004, 0.0025);
        let (l11, l21, l22) = m.cholesky().unwrap();
        assert_relative_eq!(l11 * l11, m.a, epsilon = 1e-15);
        assert_relative_eq!(l11 * l21, m.b, epsilon = 1e-15);
        assert_relative_eq!(l21 * l21 + l22 * l22, m.d, epsilon = 1e-15);
    }

    #[test]
    fn quad_forms() {
        let m = SymMat2::new(3.0, -1.0, 2.0);
        let v = Vec2::new(1.0, 2.0);
        assert_relative_eq!(m.quad_form(v), 3.0 - 4.0 + 8.0, epsilon = 1e-14);
        assert_relative_eq!(m.quad_form_ones(), 3.0 - 2.0 + 2.0, epsilon = 1e-14);
    }
}
