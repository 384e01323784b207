#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shvel::{MediumConstants, SphericalPoint, VelocityVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Uniform random point in the ball of radius `r`.
pub fn point_in_ball(rng: &mut impl Rng, r: f64) -> [f64; 3] {
    loop {
        let p = [0, 1, 2].map(|_| rng.random_range(-r..=r));
        if p.iter().map(|x| x * x).sum::<f64>() <= r * r {
            return p;
        }
    }
}

pub fn random_direction(rng: &mut impl Rng) -> (f64, f64) {
    let z: f64 = rng.random_range(-1.0..=1.0);
    (z.acos(), rng.random_range(-PI..PI))
}

pub fn random_source(rng: &mut impl Rng, r_min: f64, r_max: f64) -> SphericalPoint {
    let (t, p) = random_direction(rng);
    SphericalPoint::new(rng.random_range(r_min..=r_max), t, p).unwrap()
}

/// Closed-form free-field point source `e^{−ikd}/(4πd)`.
pub fn green(k: f64, source: [f64; 3], x: [f64; 3]) -> Complex64 {
    let d = dist(source, x);
    Complex64::new(0.0, -k * d).exp() / (4.0 * PI * d)
}

/// Closed-form velocity of the same source, `(i/kρc) ∇p`.
pub fn green_velocity(
    k: f64,
    source: [f64; 3],
    x: [f64; 3],
    medium: &MediumConstants,
) -> VelocityVector {
    let d = dist(source, x);
    let radial = Complex64::new(1.0, -1.0 / (k * d)) * green(k, source, x) / medium.impedance();
    VelocityVector([0, 1, 2].map(|i| radial * (x[i] - source[i]) / d))
}

pub fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt()
}

pub fn rel_err(a: &VelocityVector, b: &VelocityVector) -> f64 {
    a.sub(b).norm() / b.norm()
}
