use super::canonical_angles;
use crate::error::{Error, Result};

/// A point in spherical coordinates `(r, θ, φ)`, with θ measured from +z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphericalPoint {
    /// Angles outside `[0, π] × (−π, π]` are wrapped onto the same direction.
    pub fn new(r: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::Domain(format!(
                "radius must be finite and >= 0, got {r}"
            )));
        }
        if !(theta.is_finite() && phi.is_finite()) {
            return Err(Error::Domain("angles must be finite".into()));
        }
        let (theta, phi) = canonical_angles(theta, phi);
        Ok(Self { r, theta, phi })
    }

    pub fn origin() -> Self {
        Self {
            r: 0.0,
            theta: 0.0,
            phi: 0.0,
        }
    }

    pub fn from_cartesian([x, y, z]: [f64; 3]) -> Self {
        let r = (x * x + y * y + z * z).sqrt();
        if r == 0.0 {
            return Self::origin();
        }
        Self {
            r,
            theta: (z / r).clamp(-1.0, 1.0).acos(),
            phi: y.atan2(x),
        }
    }

    pub fn to_cartesian(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [self.r * st * cp, self.r * st * sp, self.r * ct]
    }

    /// Unit vector pointing along `(θ, φ)`.
    pub fn unit(theta: f64, phi: f64) -> [f64; 3] {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn distance_to(&self, other: &SphericalPoint) -> f64 {
        let a = self.to_cartesian();
        let b = other.to_cartesian();
        a.iter()
            .zip(b.iter())
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt()
    }
}
