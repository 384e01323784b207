//! Analytic global pressure coefficients of plane waves and point sources.
//!
//! Time dependence is `e^{+iωt}`, so an outgoing point source is
//! `e^{−ikd}/(4πd)` and expands with `h_ℓ^(2)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sh_basis::{sh_index, sph_hankel2_all, sph_harmonics_all, ShVector, SphericalPoint};

fn i_pow(l: usize) -> Complex64 {
    match l % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `α_ℓ^q = 4π i^ℓ conj(Y_ℓ^q(θ, φ))`, independent of wavenumber.
pub fn plane_wave_coeffs(theta: f64, phi: f64, max_degree: usize) -> ShVector {
    let y = sph_harmonics_all(max_degree, theta, phi);
    ShVector::from_fn(max_degree, |l, q| {
        let idx = (l * l + l) as isize + q;
        4.0 * PI * i_pow(l) * y[idx as usize].conj()
    })
}

/// `α_ℓ^q(k) = −ik h_ℓ^(2)(k r_ps) conj(Y_ℓ^q(θ_ps, φ_ps))`, valid for `r < r_ps`.
pub fn point_source_coeffs(
    position: &SphericalPoint,
    k: f64,
    max_degree: usize,
) -> Result<ShVector> {
    if position.r <= 0.0 {
        return Err(Error::Domain(
            "point source at the expansion origin is singular".into(),
        ));
    }
    if k <= 0.0 || !k.is_finite() {
        return Err(Error::Domain(format!("wavenumber must be > 0, got {k}")));
    }
    let h = sph_hankel2_all(max_degree, k * position.r)?;
    let y = sph_harmonics_all(max_degree, position.theta, position.phi);
    let pre = Complex64::new(0.0, -k);
    Ok(ShVector::from_fn(max_degree, |l, q| {
        let idx = sh_index(l, q).expect("valid index");
        pre * h[l] * y[idx].conj()
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceKind {
    /// Plane wave with incidence direction `(θ, φ)`.
    PlaneWave {
        theta: f64,
        phi: f64,
    },
    PointSource {
        position: SphericalPoint,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    pub kind: SourceKind,
    pub gain: Complex64,
}

impl SourceSpec {
    pub fn plane_wave(theta: f64, phi: f64) -> Self {
        Self {
            kind: SourceKind::PlaneWave { theta, phi },
            gain: Complex64::new(1.0, 0.0),
        }
    }

    pub fn point_source(position: SphericalPoint) -> Self {
        Self {
            kind: SourceKind::PointSource { position },
            gain: Complex64::new(1.0, 0.0),
        }
    }

    pub fn with_gain(mut self, gain: Complex64) -> Self {
        self.gain = gain;
        self
    }

    /// Radius inside which the interior expansion converges.
    pub fn validity_radius(&self) -> f64 {
        match self.kind {
            SourceKind::PlaneWave { .. } => f64::INFINITY,
            SourceKind::PointSource { position } => position.r,
        }
    }

    /// Rejects a point source that does not lie strictly outside `region_radius`.
    pub fn check_outside(&self, region_radius: f64) -> Result<()> {
        let r = self.validity_radius();
        if r <= region_radius {
            return Err(Error::Domain(format!(
                "source at r = {r} m is not outside the listening region (radius {region_radius} m)"
            )));
        }
        Ok(())
    }

    /// Global pressure coefficients including the source gain.
    pub fn coeffs(&self, k: f64, max_degree: usize) -> Result<ShVector> {
        let alpha = match self.kind {
            SourceKind::PlaneWave { theta, phi } => plane_wave_coeffs(theta, phi, max_degree),
            SourceKind::PointSource { position } => point_source_coeffs(&position, k, max_degree)?,
        };
        Ok(if self.gain == Complex64::new(1.0, 0.0) {
            alpha
        } else {
            alpha.scaled(self.gain)
        })
    }
}

/// Loudspeakers modeled as point sources with a complex gain each.
#[derive(Debug, Clone, PartialEq)]
pub struct LoudspeakerArray {
    positions: Vec<SphericalPoint>,
    gains: Vec<Complex64>,
}

impl LoudspeakerArray {
    pub fn new(positions: Vec<SphericalPoint>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::Domain(
                "loudspeaker array needs at least one loudspeaker".into(),
            ));
        }
        if let Some(p) = positions.iter().find(|p| p.r <= 0.0) {
            return Err(Error::Domain(format!(
                "loudspeaker at the origin ({p:?}) is singular"
            )));
        }
        let gains = vec![Complex64::new(1.0, 0.0); positions.len()];
        Ok(Self { positions, gains })
    }

    /// Loudspeakers on a horizontal circle of `radius` at the given azimuths.
    pub fn horizontal_circle(radius: f64, azimuths: &[f64]) -> Result<Self> {
        let positions = azimuths
            .iter()
            .map(|&phi| SphericalPoint::new(radius, PI / 2.0, phi))
            .collect::<Result<Vec<_>>>()?;
        Self::new(positions)
    }

    pub fn with_gains(mut self, gains: Vec<Complex64>) -> Result<Self> {
        if gains.len() != self.positions.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} gains", self.positions.len()),
                got: format!("{}", gains.len()),
            });
        }
        self.gains = gains;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[SphericalPoint] {
        &self.positions
    }

    pub fn gains(&self) -> &[Complex64] {
        &self.gains
    }

    pub fn sources(&self) -> impl Iterator<Item = SourceSpec> + '_ {
        self.positions
            .iter()
            .zip(&self.gains)
            .map(|(p, g)| SourceSpec::point_source(*p).with_gain(*g))
    }

    /// Closest loudspeaker distance from the origin.
    pub fn min_radius(&self) -> f64 {
        self.positions
            .iter()
            .map(|p| p.r)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn check_outside(&self, region_radius: f64) -> Result<()> {
        for (s, p) in self.positions.iter().enumerate() {
            if p.r <= region_radius {
                return Err(Error::Domain(format!(
                    "loudspeaker {s} at r = {} m is inside the listening region (radius {region_radius} m)",
                    p.r
                )));
            }
        }
        Ok(())
    }
}
