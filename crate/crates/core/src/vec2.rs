//! Planar vector type shared by every module.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// A 2-component vector. Used for positions (m), velocities (m/s) and
/// accelerations (m/s²).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector `[sin θ, cos θ]`, the direction convention used by the
    /// input discretization.
    pub fn from_heading_sin_cos(theta: f64) -> Self {
        Self::new(theta.sin(), theta.cos())
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Unsigned angle in `[0, π]` between two vectors. Returns 0 when either
    /// norm is below `eps`.
    pub fn angle_to(self, other: Vec2, eps: f64) -> f64 {
        let (na, nb) = (self.norm(), other.norm());
        if na < eps || nb < eps {
            return 0.0;
        }
        (self.dot(other) / (na * nb)).clamp(-1.0, 1.0).acos()
    }

    /// Cosine of the angle between two vectors, 0 when either is (near) zero.
    pub fn cosine(self, other: Vec2, eps: f64) -> f64 {
        let (na, nb) = (self.norm(), other.norm());
        if na < eps || nb < eps {
            return 0.0;
        }
        (self.dot(other) / (na * nb)).clamp(-1.0, 1.0)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_is_symmetric_and_zero_safe() {
        let a = Vec2::new(1.0, 0.0);
        let b = Vec2::new(0.0, 2.0);
        assert!((a.angle_to(b, 1e-9) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert_eq!(a.angle_to(b, 1e-9), b.angle_to(a, 1e-9));
        assert_eq!(Vec2::ZERO.angle_to(b, 1e-9), 0.0);
    }

    #[test]
    fn parallel_vectors_do_not_produce_nan() {
        // dot/(|a||b|) can land a hair above 1 here
        let a = Vec2::new(0.1, 0.7);
        let b = a * 3.0;
        let th = a.angle_to(b, 1e-9);
        assert!(th.is_finite());
        assert!(th < 1e-7);
    }
}
