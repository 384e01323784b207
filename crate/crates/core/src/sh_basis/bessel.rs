//! Spherical Bessel functions of the first and second kind and the spherical
//! Hankel function of the second kind, `h_n^(2)(x) = j_n(x) − i y_n(x)`.
//!
//! `j_n` uses Miller's downward recurrence normalized with the sum rule
//! `Σ (2k+1) j_k(x)² = 1` when `x < n`, upward recurrence otherwise, and a
//! power series for `x < 1e-3`. `y_n` is evaluated upward, which is stable.

use num_complex::Complex64;

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 1e-3;
const RESCALE: f64 = 1e100;

/// `j_0(x), …, j_nmax(x)` for `x >= 0`.
pub fn sph_bessel_j_all(nmax: usize, x: f64) -> Vec<f64> {
    let x = x.abs();
    if x < SERIES_LIMIT {
        return series_all(nmax, x);
    }
    if x >= nmax as f64 {
        return upward_j(nmax, x);
    }
    miller_j(nmax, x)
}

/// Spherical Bessel function of the first kind `j_n(x)`.
pub fn sph_bessel_j(n: usize, x: f64) -> f64 {
    sph_bessel_j_all(n, x)[n]
}

fn series_all(nmax: usize, x: f64) -> Vec<f64> {
    let x2 = x * x;
    let mut out = Vec::with_capacity(nmax + 1);
    // x^n / (2n+1)!!
    let mut lead = 1.0;
    for n in 0..=nmax {
        if n > 0 {
            lead *= x / (2 * n + 1) as f64;
        }
        let d1 = (2 * n + 3) as f64;
        let d2 = (2 * n + 5) as f64;
        let corr = 1.0 - x2 / (2.0 * d1) + x2 * x2 / (8.0 * d1 * d2);
        out.push(lead * corr);
    }
    out
}

fn upward_j(nmax: usize, x: f64) -> Vec<f64> {
    let (s, c) = x.sin_cos();
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(s / x);
    if nmax >= 1 {
        out.push(s / (x * x) - c / x);
    }
    for n in 1..nmax {
        let next = (2 * n + 1) as f64 / x * out[n] - out[n - 1];
        out.push(next);
    }
    out
}

fn miller_j(nmax: usize, x: f64) -> Vec<f64> {
    let top = nmax.max(x.ceil() as usize);
    let start = top + 20 + ((40 * top) as f64).sqrt() as usize;

    let mut vals = vec![0.0; start + 2];
    vals[start + 1] = 0.0;
    vals[start] = 1.0;
    for k in (1..=start).rev() {
        let prev = (2 * k + 1) as f64 / x * vals[k] - vals[k + 1];
        vals[k - 1] = prev;
        if prev.abs() > RESCALE {
            for v in vals[k - 1..].iter_mut() {
                *v /= RESCALE;
            }
        }
    }
    let norm: f64 = vals[..=start]
        .iter()
        .enumerate()
        .map(|(k, v)| (2 * k + 1) as f64 * v * v)
        .sum::<f64>()
        .sqrt();
    // sign fixed by j_0 (or j_1 where j_0 vanishes)
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let j1 = s / (x * x) - c / x;
    let sign = if j0.abs() > j1.abs() {
        (j0 * vals[0]).signum()
    } else {
        (j1 * vals[1]).signum()
    };
    vals.truncate(nmax + 1);
    vals.iter_mut().for_each(|v| *v *= sign / norm);
    vals
}

/// `y_0(x), …, y_nmax(x)` for `x > 0`.
pub fn sph_bessel_y_all(nmax: usize, x: f64) -> Result<Vec<f64>> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::SingularArgument(x));
    }
    let (s, c) = x.sin_cos();
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(-c / x);
    if nmax >= 1 {
        out.push(-c / (x * x) - s / x);
    }
    for n in 1..nmax {
        let next = (2 * n + 1) as f64 / x * out[n] - out[n - 1];
        out.push(next);
    }
    Ok(out)
}

/// `h_0^(2)(x), …, h_nmax^(2)(x)` for `x > 0`.
pub fn sph_hankel2_all(nmax: usize, x: f64) -> Result<Vec<Complex64>> {
    let y = sph_bessel_y_all(nmax, x)?;
    let j = sph_bessel_j_all(nmax, x);
    Ok(j.into_iter()
        .zip(y)
        .map(|(j, y)| Complex64::new(j, -y))
        .collect())
}

/// Spherical Hankel function of the second kind `h_n^(2)(x)`.
pub fn sph_hankel2(n: usize, x: f64) -> Result<Complex64> {
    Ok(sph_hankel2_all(n, x)?[n])
}

/// `∂ j_n(kr)/∂r` at `r = 0`, which is `k/3` for `n = 1` and zero otherwise.
pub fn sph_bessel_j_radial_derivative_at_zero(n: usize, k: f64) -> f64 {
    if n == 1 {
        k / 3.0
    } else {
        0.0
    }
}
