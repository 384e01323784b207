//! Spherical-harmonic basis: coefficient indexing, complex orthonormal
//! harmonics, spherical Bessel/Hankel functions and spherical coordinates.
//!
//! Coefficients of every expansion in this crate (global pressure, translated
//! first-degree coefficients, velocity coefficients) are stored degree-major
//! in a flat array, `index = n² + n + m`.

mod bessel;
mod harmonics;
mod point;

pub use bessel::{
    sph_bessel_j, sph_bessel_j_all, sph_bessel_j_radial_derivative_at_zero, sph_bessel_y_all,
    sph_hankel2, sph_hankel2_all,
};
pub use harmonics::{canonical_angles, sph_harmonic, sph_harmonics_all};
pub use point::SphericalPoint;

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A (degree, order) pair with `|m| <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DegreeOrder {
    pub degree: usize,
    pub order: isize,
}

impl DegreeOrder {
    pub fn new(degree: usize, order: isize) -> Result<Self> {
        if order.unsigned_abs() > degree {
            return Err(Error::InvalidOrder { degree, order });
        }
        Ok(Self { degree, order })
    }

    pub fn index(self) -> usize {
        let n = self.degree as isize;
        (n * n + n + self.order) as usize
    }

    pub fn from_index(index: usize) -> Self {
        let degree = index.isqrt();
        let order = index as isize - (degree * degree + degree) as isize;
        Self { degree, order }
    }
}

/// Linear index of `(n, m)` in a degree-ordered coefficient vector.
pub fn sh_index(degree: usize, order: isize) -> Result<usize> {
    DegreeOrder::new(degree, order).map(DegreeOrder::index)
}

/// Number of coefficients up to and including `max_degree`.
pub const fn sh_len(max_degree: usize) -> usize {
    (max_degree + 1) * (max_degree + 1)
}

/// Degree-ordered complex SH coefficient vector of length `(N+1)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShVector {
    max_degree: usize,
    coeffs: Vec<Complex64>,
}

impl ShVector {
    pub fn zeros(max_degree: usize) -> Self {
        Self {
            max_degree,
            coeffs: vec![Complex64::new(0.0, 0.0); sh_len(max_degree)],
        }
    }

    pub fn from_coeffs(max_degree: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != sh_len(max_degree) {
            return Err(Error::ShapeMismatch {
                expected: format!(
                    "{} coefficients for degree {max_degree}",
                    sh_len(max_degree)
                ),
                got: format!("{}", coeffs.len()),
            });
        }
        Ok(Self { max_degree, coeffs })
    }

    /// Builds a vector from a function of `(n, m)`.
    pub fn from_fn(max_degree: usize, mut f: impl FnMut(usize, isize) -> Complex64) -> Self {
        let coeffs = (0..sh_len(max_degree))
            .map(|i| {
                let DegreeOrder { degree, order } = DegreeOrder::from_index(i);
                f(degree, order)
            })
            .collect();
        Self { max_degree, coeffs }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn get(&self, degree: usize, order: isize) -> Option<Complex64> {
        if degree > self.max_degree {
            return None;
        }
        sh_index(degree, order).ok().map(|i| self.coeffs[i])
    }

    /// Copy truncated (or zero-padded) to another maximum degree.
    pub fn with_max_degree(&self, max_degree: usize) -> Self {
        let mut out = Self::zeros(max_degree);
        let n = out.len().min(self.len());
        out.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        out
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            max_degree: self.max_degree,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (DegreeOrder, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (DegreeOrder::from_index(i), *c))
    }
}

impl Index<usize> for ShVector {
    type Output = Complex64;
    fn index(&self, index: usize) -> &Complex64 {
        &self.coeffs[index]
    }
}

impl IndexMut<usize> for ShVector {
    fn index_mut(&mut self, index: usize) -> &mut Complex64 {
        &mut self.coeffs[index]
    }
}
