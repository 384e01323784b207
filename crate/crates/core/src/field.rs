//! Pressure and particle velocity inside the listening region.
//!
//! Pressure comes from the global expansion `p = Σ α_ℓ^q j_ℓ(kr) Y_ℓ^q`.
//! Velocity comes from the region-wide velocity coefficients
//! `V_e = Σ (ζ_e)_a^d j_a(k r_b) Y_a^d`, with the central-difference gradient of
//! the pressure kept as an independent check.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operators::{MediumConstants, VelocityOperators};
use crate::sh_basis::{sh_len, sph_bessel_j_all, sph_harmonics_all, ShVector, SphericalPoint};

/// Default central-difference step in meters.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

const RADIUS_SLACK: f64 = 1e-9;

/// Complex velocity `(V_x, V_y, V_z)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VelocityVector(pub [Complex64; 3]);

impl VelocityVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn real(&self) -> [f64; 3] {
        self.0.map(|c| c.re)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self(self.0.map(|c| c * s))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
        ])
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }
}

/// `j_n(kr) Y_n^m(θ, φ)` for all `(n, m)` up to `max_degree`.
fn radial_basis(max_degree: usize, k: f64, point: &SphericalPoint) -> Vec<Complex64> {
    let j = sph_bessel_j_all(max_degree, k * point.r);
    let mut y = sph_harmonics_all(max_degree, point.theta, point.phi);
    for n in 0..=max_degree {
        for v in &mut y[n * n..(n + 1) * (n + 1)] {
            *v *= j[n];
        }
    }
    y
}

fn dot(coeffs: &[Complex64], basis: &[Complex64]) -> Complex64 {
    coeffs.iter().zip(basis).map(|(a, b)| a * b).sum()
}

/// Truncated global expansion `Σ α_ℓ^q j_ℓ(kr) Y_ℓ^q(θ, φ)`.
pub fn pressure_at(alpha: &ShVector, k: f64, point: &SphericalPoint) -> Complex64 {
    let basis = radial_basis(alpha.max_degree(), k, point);
    dot(alpha.as_slice(), &basis)
}

fn check_zeta(zeta: &[ShVector; 3]) -> Result<usize> {
    let a = zeta[0].max_degree();
    if zeta.iter().any(|z| z.max_degree() != a) {
        return Err(Error::ShapeMismatch {
            expected: "three velocity coefficient vectors of equal degree".into(),
            got: format!(
                "degrees {}, {}, {}",
                zeta[0].max_degree(),
                zeta[1].max_degree(),
                zeta[2].max_degree()
            ),
        });
    }
    Ok(a)
}

/// Velocity at `point` from the region-wide velocity coefficients.
pub fn velocity_at_via_zeta(
    zeta: &[ShVector; 3],
    k: f64,
    point: &SphericalPoint,
    region_radius: f64,
) -> Result<VelocityVector> {
    let degree = check_zeta(zeta)?;
    check_in_region(point, region_radius)?;
    let basis = radial_basis(degree, k, point);
    Ok(VelocityVector(
        [0, 1, 2].map(|e| dot(zeta[e].as_slice(), &basis)),
    ))
}

fn check_in_region(point: &SphericalPoint, region_radius: f64) -> Result<()> {
    if point.r > region_radius * (1.0 + RADIUS_SLACK) {
        return Err(Error::Domain(format!(
            "point at r = {} m is outside the listening region (radius {region_radius} m)",
            point.r
        )));
    }
    Ok(())
}

/// Velocity at the expansion center from the local coefficients `β`; only the
/// first-degree coefficients contribute.
pub fn velocity_at_origin_from_beta(
    beta: &ShVector,
    medium: &MediumConstants,
) -> Result<VelocityVector> {
    if beta.max_degree() < 1 {
        return Err(Error::DegreeTooSmall {
            needed: 1,
            got: beta.max_degree(),
        });
    }
    let pre = Complex64::new(0.0, 1.0 / (3.0 * medium.impedance()));
    let c8 = (3.0 / (8.0 * std::f64::consts::PI)).sqrt();
    let c4 = (3.0 / (4.0 * std::f64::consts::PI)).sqrt();
    let (bm, b0, bp) = (beta[1], beta[2], beta[3]);
    let i = Complex64::new(0.0, 1.0);
    Ok(VelocityVector([
        pre * c8 * (bm - bp),
        pre * c8 * (-i * bm - i * bp),
        pre * c4 * b0,
    ]))
}

/// Central-difference velocity `(i/kρ₀c) ∇p` at a Cartesian point.
pub fn velocity_at_finite_difference(
    alpha: &ShVector,
    k: f64,
    point: [f64; 3],
    h: f64,
    medium: &MediumConstants,
) -> VelocityVector {
    let scale = Complex64::new(0.0, 1.0 / (k * medium.impedance()));
    let comp = |axis: usize| {
        let mut plus = point;
        let mut minus = point;
        plus[axis] += h;
        minus[axis] -= h;
        let pp = pressure_at(alpha, k, &SphericalPoint::from_cartesian(plus));
        let pm = pressure_at(alpha, k, &SphericalPoint::from_cartesian(minus));
        scale * (pp - pm) / (2.0 * h)
    };
    VelocityVector([comp(0), comp(1), comp(2)])
}

/// A sound field described by global pressure coefficients together with its
/// region-wide velocity coefficients.
#[derive(Debug, Clone)]
pub struct SoundField {
    alpha: ShVector,
    zeta: [ShVector; 3],
    k: f64,
    medium: MediumConstants,
    region_radius: f64,
    validity_radius: f64,
}

impl SoundField {
    /// `ops` must be built for the degree of `alpha`.
    pub fn new(
        alpha: ShVector,
        k: f64,
        ops: &VelocityOperators,
        region_radius: f64,
        validity_radius: f64,
    ) -> Result<Self> {
        if ops.max_degree() != alpha.max_degree() {
            return Err(Error::ShapeMismatch {
                expected: format!("pressure coefficients of degree {}", ops.max_degree()),
                got: format!("degree {}", alpha.max_degree()),
            });
        }
        if region_radius >= validity_radius {
            return Err(Error::Domain(format!(
                "listening region (radius {region_radius} m) reaches a source at r = {validity_radius} m"
            )));
        }
        let zeta = ops.apply(&alpha)?;
        Ok(Self {
            alpha,
            zeta,
            k,
            medium: *ops.medium(),
            region_radius,
            validity_radius,
        })
    }

    pub fn alpha(&self) -> &ShVector {
        &self.alpha
    }

    pub fn zeta(&self) -> &[ShVector; 3] {
        &self.zeta
    }

    pub fn wavenumber(&self) -> f64 {
        self.k
    }

    pub fn region_radius(&self) -> f64 {
        self.region_radius
    }

    fn check_valid(&self, point: &SphericalPoint) -> Result<()> {
        if point.r >= self.validity_radius {
            return Err(Error::Domain(format!(
                "point at r = {} m is outside the interior expansion (source at r = {} m)",
                point.r, self.validity_radius
            )));
        }
        Ok(())
    }

    pub fn pressure(&self, point: &SphericalPoint) -> Result<Complex64> {
        self.check_valid(point)?;
        Ok(pressure_at(&self.alpha, self.k, point))
    }

    pub fn velocity(&self, point: &SphericalPoint) -> Result<VelocityVector> {
        velocity_at_via_zeta(&self.zeta, self.k, point, self.region_radius)
    }

    /// Pressure and velocity sharing one basis evaluation.
    pub fn evaluate(&self, point: &SphericalPoint) -> Result<(Complex64, VelocityVector)> {
        self.check_valid(point)?;
        check_in_region(point, self.region_radius)?;
        let basis = radial_basis(self.alpha.max_degree(), self.k, point);
        let p = dot(self.alpha.as_slice(), &basis);
        let vel_len = sh_len(self.alpha.max_degree() - 1);
        let v = [0, 1, 2].map(|e| dot(self.zeta[e].as_slice(), &basis[..vel_len]));
        Ok((p, VelocityVector(v)))
    }

    pub fn velocity_fd(&self, point: [f64; 3], h: f64) -> Result<VelocityVector> {
        let r = SphericalPoint::from_cartesian(point).r + h * 3f64.sqrt();
        if r >= self.validity_radius {
            return Err(Error::Domain(format!(
                "finite-difference stencil at r = {r} m leaves the interior expansion"
            )));
        }
        Ok(velocity_at_finite_difference(
            &self.alpha,
            self.k,
            point,
            h,
            &self.medium,
        ))
    }
}

/// Square lattice on a horizontal plane, masked to a disk about the z axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub spacing: f64,
    pub mask_radius: f64,
    pub z: f64,
}

impl GridSpec {
    /// Lattice used for the region error averages: 1/60 m spacing.
    pub const DEFAULT_SPACING: f64 = 1.0 / 60.0;

    pub fn new(spacing: f64, mask_radius: f64) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::Domain(format!(
                "grid spacing must be > 0, got {spacing}"
            )));
        }
        if !(mask_radius >= 0.0 && mask_radius.is_finite()) {
            return Err(Error::Domain(format!(
                "mask radius must be >= 0, got {mask_radius}"
            )));
        }
        Ok(Self {
            spacing,
            mask_radius,
            z: 0.0,
        })
    }

    /// Lattice points `(i·h, j·h, z)` with `x² + y² <= R²`, row-major in `y` then `x`.
    /// A mask smaller than one spacing gives no points.
    pub fn points(&self) -> Vec<[f64; 3]> {
        if self.mask_radius < self.spacing {
            return Vec::new();
        }
        let n = (self.mask_radius / self.spacing + 1e-9).floor() as i64;
        let r2 = self.mask_radius * self.mask_radius * (1.0 + 1e-12);
        let mut out = Vec::new();
        for j in -n..=n {
            for i in -n..=n {
                let x = i as f64 * self.spacing;
                let y = j as f64 * self.spacing;
                if x * x + y * y <= r2 {
                    out.push([x, y, self.z]);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub position: [f64; 3],
    pub pressure: Complex64,
    pub velocity: VelocityVector,
}

/// Pressure and velocity sampled on a planar grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub spec: GridSpec,
    pub samples: Vec<FieldSample>,
}

pub const FIELD_CSV_HEADER: &str = "x,y,z,re_p,im_p,re_vx,im_vx,re_vy,im_vy,re_vz,im_vz";

impl FieldGrid {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// CSV with header `x,y,z,re_p,im_p,re_vx,…,im_vz`.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "{FIELD_CSV_HEADER}")?;
        for s in &self.samples {
            let [x, y, z] = s.position;
            let [vx, vy, vz] = s.velocity.0;
            writeln!(
                w,
                "{x:.6},{y:.6},{z:.6},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                s.pressure.re, s.pressure.im, vx.re, vx.im, vy.re, vy.im, vz.re, vz.im
            )?;
        }
        Ok(())
    }
}

/// Evaluates `field` at every grid point. Points outside the field's listening
/// region are an error.
pub fn sample_plane(field: &SoundField, grid: &GridSpec) -> Result<FieldGrid> {
    let samples = grid
        .points()
        .into_par_iter()
        .map(|position| {
            let (pressure, velocity) = field.evaluate(&SphericalPoint::from_cartesian(position))?;
            Ok(FieldSample {
                position,
                pressure,
                velocity,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FieldGrid {
        spec: *grid,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::plane_wave_coeffs;

    #[test]
    fn plane_wave_pressure_at_origin_is_one() {
        let alpha = plane_wave_coeffs(1.0, 2.0, 6);
        let p = pressure_at(&alpha, 12.0, &SphericalPoint::origin());
        assert!((p - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn beta_only_b10() {
        let medium = MediumConstants::default();
        let mut beta = ShVector::zeros(2);
        beta[2] = Complex64::new(1.0, 0.0);
        let v = velocity_at_origin_from_beta(&beta, &medium).unwrap();
        let expect = Complex64::new(0.0, 1.0 / (3.0 * medium.impedance()))
            * (3.0 / (4.0 * std::f64::consts::PI)).sqrt();
        assert!(v.0[0].norm() == 0.0 && v.0[1].norm() == 0.0);
        assert!((v.0[2] - expect).norm() < 1e-18);
    }

    #[test]
    fn beta_x_cancellation() {
        let mut beta = ShVector::zeros(1);
        beta[1] = Complex64::new(1.0, 0.0);
        beta[3] = Complex64::new(1.0, 0.0);
        let v = velocity_at_origin_from_beta(&beta, &MediumConstants::default()).unwrap();
        assert_eq!(v.0[0].norm(), 0.0);
    }

    #[test]
    fn beta_degree_too_small() {
        assert!(
            velocity_at_origin_from_beta(&ShVector::zeros(0), &MediumConstants::default()).is_err()
        );
    }

    #[test]
    fn zero_field_zero_fd_velocity() {
        let v = velocity_at_finite_difference(
            &ShVector::zeros(4),
            10.0,
            [0.1, 0.0, 0.0],
            DEFAULT_FD_STEP,
            &MediumConstants::default(),
        );
        assert_eq!(v, VelocityVector::zero());
    }

    #[test]
    fn grid_counts() {
        let h = GridSpec::DEFAULT_SPACING;
        assert_eq!(GridSpec::new(h, 0.5).unwrap().points().len(), 2821);
        assert_eq!(GridSpec::new(h, 0.15).unwrap().points().len(), 253);
        assert!(GridSpec::new(h, 0.01).unwrap().points().is_empty());
        assert!(GridSpec::new(0.0, 0.5).is_err());
    }

    #[test]
    fn velocity_outside_region_is_domain_error() {
        let ops = VelocityOperators::build(3, MediumConstants::default()).unwrap();
        let f = SoundField::new(
            plane_wave_coeffs(0.0, 0.0, 3),
            5.0,
            &ops,
            0.2,
            f64::INFINITY,
        )
        .unwrap();
        let p = SphericalPoint::new(0.3, 1.0, 0.0).unwrap();
        assert!(matches!(f.velocity(&p), Err(Error::Domain(_))));
        assert!(f.pressure(&p).is_ok());
    }
}
