use std::f64::consts::PI;

use num_complex::Complex64;

use super::{sh_index, sh_len};
use crate::error::Result;

/// Wraps `(theta, phi)` into `theta ∈ [0, π]`, `phi ∈ (−π, π]` while keeping
/// the direction they describe.
pub fn canonical_angles(theta: f64, phi: f64) -> (f64, f64) {
    let mut theta = theta.rem_euclid(2.0 * PI);
    let mut phi = phi;
    if theta > PI {
        theta = 2.0 * PI - theta;
        phi += PI;
    }
    let mut phi = phi.rem_euclid(2.0 * PI);
    if phi > PI {
        phi -= 2.0 * PI;
    }
    (theta, phi)
}

/// Normalized associated Legendre values `P̄_n^m(cos θ)` for `0 <= m <= n <= max_degree`,
/// stored at `sh_index(n, m)`. Includes the Condon–Shortley phase and the
/// `sqrt((2n+1)/4π · (n−m)!/(n+m)!)` factor.
fn normalized_legendre(max_degree: usize, theta: f64, out: &mut [f64]) {
    let (s, x) = theta.sin_cos();
    let s = s.abs();
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=max_degree {
        if m > 0 {
            let mf = m as f64;
            pmm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
        }
        out[m * m + 2 * m] = pmm;
        if m == max_degree {
            break;
        }
        let mf = m as f64;
        let mut p_prev2 = pmm;
        let mut p_prev = (2.0 * mf + 3.0).sqrt() * x * pmm;
        let n1 = m + 1;
        out[n1 * n1 + n1 + m] = p_prev;
        for n in (m + 2)..=max_degree {
            let nf = n as f64;
            let a = ((4.0 * nf * nf - 1.0) / (nf * nf - mf * mf)).sqrt();
            let b = (((nf - 1.0) * (nf - 1.0) - mf * mf) / (4.0 * (nf - 1.0) * (nf - 1.0) - 1.0))
                .sqrt();
            let p = a * (x * p_prev - b * p_prev2);
            out[n * n + n + m] = p;
            p_prev2 = p_prev;
            p_prev = p;
        }
    }
}

/// All complex orthonormal harmonics `Y_n^m(θ, φ)` up to `max_degree`,
/// degree-ordered.
pub fn sph_harmonics_all(max_degree: usize, theta: f64, phi: f64) -> Vec<Complex64> {
    let (theta, phi) = canonical_angles(theta, phi);
    let len = sh_len(max_degree);
    let mut legendre = vec![0.0; len];
    normalized_legendre(max_degree, theta, &mut legendre);

    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for n in 0..=max_degree {
        let base = n * n + n;
        out[base] = Complex64::new(legendre[base], 0.0);
        for m in 1..=n {
            let y = Complex64::from_polar(legendre[base + m], m as f64 * phi);
            out[base + m] = y;
            // Y_n^{-m} = (-1)^m conj(Y_n^m)
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            out[base - m] = y.conj() * sign;
        }
    }
    out
}

/// Complex orthonormal spherical harmonic `Y_n^m(θ, φ)` with Condon–Shortley phase.
pub fn sph_harmonic(degree: usize, order: isize, theta: f64, phi: f64) -> Result<Complex64> {
    let idx = sh_index(degree, order)?;
    Ok(sph_harmonics_all(degree, theta, phi)[idx])
}
