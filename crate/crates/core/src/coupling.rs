//! Wigner-3j symbols and the translation coupling coefficient `G_{nm}^{ℓqa}`.
//!
//! Symbols are evaluated with the Racah sum in exact rational arithmetic; only
//! the final square root is taken in floating point. Results are memoized in a
//! process-wide cache.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arguments of a Wigner-3j symbol `(j1 j2 j3; m1 m2 m3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Wigner3jArgs {
    pub j1: i64,
    pub j2: i64,
    pub j3: i64,
    pub m1: i64,
    pub m2: i64,
    pub m3: i64,
}

impl Wigner3jArgs {
    pub fn new(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> Self {
        Self {
            j1,
            j2,
            j3,
            m1,
            m2,
            m3,
        }
    }

    /// Selection rules: `|m_i| <= j_i`, `m1 + m2 + m3 = 0`, triangle inequality.
    pub fn is_allowed(&self) -> bool {
        let Self {
            j1,
            j2,
            j3,
            m1,
            m2,
            m3,
        } = *self;
        j1 >= 0
            && j2 >= 0
            && j3 >= 0
            && m1.abs() <= j1
            && m2.abs() <= j2
            && m3.abs() <= j3
            && m1 + m2 + m3 == 0
            && (j1 - j2).abs() <= j3
            && j3 <= j1 + j2
    }
}

fn cache() -> &'static RwLock<HashMap<Wigner3jArgs, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<Wigner3jArgs, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Wigner-3j symbol. Returns 0 when a selection rule is violated.
pub fn wigner3j(args: Wigner3jArgs) -> f64 {
    if !args.is_allowed() {
        return 0.0;
    }
    // (j1 j2 j3; 0 0 0) vanishes for odd j1+j2+j3
    if args.m1 == 0 && args.m2 == 0 && (args.j1 + args.j2 + args.j3) % 2 == 1 {
        return 0.0;
    }
    if let Some(v) = cache().read().expect("wigner3j cache poisoned").get(&args) {
        return *v;
    }
    let v = racah_exact(args);
    cache()
        .write()
        .expect("wigner3j cache poisoned")
        .insert(args, v);
    v
}

fn factorial(n: i64) -> BigInt {
    debug_assert!(n >= 0);
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn racah_exact(args: Wigner3jArgs) -> f64 {
    let Wigner3jArgs {
        j1,
        j2,
        j3,
        m1,
        m2,
        m3,
    } = args;

    // Δ(j1 j2 j3) · Π (j_i ± m_i)!
    let radicand = BigRational::new(
        factorial(j1 + j2 - j3)
            * factorial(j1 - j2 + j3)
            * factorial(-j1 + j2 + j3)
            * factorial(j1 + m1)
            * factorial(j1 - m1)
            * factorial(j2 + m2)
            * factorial(j2 - m2)
            * factorial(j3 + m3)
            * factorial(j3 - m3),
        factorial(j1 + j2 + j3 + 1),
    );

    let k_min = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let k_max = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let denom = factorial(k)
            * factorial(j3 - j2 + k + m1)
            * factorial(j3 - j1 + k - m2)
            * factorial(j1 + j2 - j3 - k)
            * factorial(j1 - k - m1)
            * factorial(j2 - k + m2);
        let term = BigRational::new(BigInt::one(), denom);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }
    let negative = sum.is_negative() ^ ((j1 - j2 - m3).rem_euclid(2) == 1);
    let square = radicand * &sum * &sum;
    let magnitude = square.to_f64().expect("rational to f64 conversion").sqrt();
    if negative {
        -magnitude
    } else {
        magnitude
    }
}

fn i_pow(p: i64) -> Complex64 {
    match p.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Translation coupling coefficient
/// `G_{nm}^{ℓqa} = 4π i^{n+a−ℓ} (−1)^q sqrt((2ℓ+1)(2n+1)(2a+1)/4π) · W1 · W2`
/// with `W1 = (ℓ n a; 0 0 0)` and `W2 = (ℓ n a; −q m q−m)`.
pub fn gaunt_g(l: i64, q: i64, n: i64, m: i64, a: i64) -> Complex64 {
    let w1 = wigner3j(Wigner3jArgs::new(l, n, a, 0, 0, 0));
    if w1 == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let w2 = wigner3j(Wigner3jArgs::new(l, n, a, -q, m, q - m));
    if w2 == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let sign = if q.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let norm = (((2 * l + 1) * (2 * n + 1) * (2 * a + 1)) as f64 / (4.0 * PI)).sqrt();
    i_pow(n + a - l) * (4.0 * PI * sign * norm * w1 * w2)
}
