//! Plane-strain symmetric tensors and their Mandel representation.
//!
//! A plane-strain symmetric tensor has an in-plane 2×2 block plus an
//! independent out-of-plane `zz` entry (the `xz`, `yz` shears vanish).
//! The Mandel vector `[xx, yy, zz, √2·xy]` is orthonormal, so fourth-order
//! tensors with minor symmetries become plain 4×4 matrices and double
//! contraction becomes matrix multiplication.

use nalgebra::{Matrix2, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

pub type Mat2 = Matrix2<f64>;
pub type Mat4 = Matrix4<f64>;
pub type Vec4 = Vector4<f64>;

const SQRT2: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SymTensor {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub xy: f64,
}

impl SymTensor {
    pub const ZERO: SymTensor = SymTensor { xx: 0.0, yy: 0.0, zz: 0.0, xy: 0.0 };
    pub const IDENTITY: SymTensor = SymTensor { xx: 1.0, yy: 1.0, zz: 1.0, xy: 0.0 };

    pub fn new(xx: f64, yy: f64, zz: f64, xy: f64) -> Self {
        Self { xx, yy, zz, xy }
    }

    /// Symmetric part of an in-plane matrix combined with an out-of-plane value.
    pub fn from_parts(m: &Mat2, zz: f64) -> Self {
        Self { xx: m[(0, 0)], yy: m[(1, 1)], zz, xy: 0.5 * (m[(0, 1)] + m[(1, 0)]) }
    }

    pub fn inplane(&self) -> Mat2 {
        Mat2::new(self.xx, self.xy, self.xy, self.yy)
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy + self.zz
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.xx * s, self.yy * s, self.zz * s, self.xy * s)
    }

    pub fn add(&self, o: &SymTensor) -> Self {
        Self::new(self.xx + o.xx, self.yy + o.yy, self.zz + o.zz, self.xy + o.xy)
    }

    pub fn sub(&self, o: &SymTensor) -> Self {
        self.add(&o.scale(-1.0))
    }

    /// Full double contraction `a : b`.
    pub fn ddot(&self, o: &SymTensor) -> f64 {
        self.xx * o.xx + self.yy * o.yy + self.zz * o.zz + 2.0 * self.xy * o.xy
    }

    pub fn norm(&self) -> f64 {
        self.ddot(self).sqrt()
    }

    pub fn to_mandel(&self) -> Vec4 {
        Vec4::new(self.xx, self.yy, self.zz, SQRT2 * self.xy)
    }

    pub fn from_mandel(v: &Vec4) -> Self {
        Self::new(v[0], v[1], v[2], v[3] / SQRT2)
    }
}

/// Mandel vector of the second-order identity.
pub fn mandel_identity() -> Vec4 {
    Vec4::new(1.0, 1.0, 1.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mandel_round_trip_and_contraction() {
        let a = SymTensor::new(1.0, -2.0, 0.5, 0.3);
        let b = SymTensor::new(0.2, 0.7, -1.0, -0.4);
        let back = SymTensor::from_mandel(&a.to_mandel());
        assert!((back.xy - a.xy).abs() < 1e-15);
        assert!((a.ddot(&b) - a.to_mandel().dot(&b.to_mandel())).abs() < 1e-14);
    }
}
