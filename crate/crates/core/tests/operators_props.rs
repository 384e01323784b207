mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use shvel::field::{velocity_at_finite_difference, velocity_at_via_zeta, DEFAULT_FD_STEP};
use shvel::operators::{build_b1m, OperatorKind};
use shvel::sh_basis::DegreeOrder;
use shvel::sources::point_source_coeffs;
use shvel::{Axis, MediumConstants, ShVector, SphericalPoint, VelocityOperators};

#[test]
fn shapes_for_all_degrees() {
    for l in 1..=12 {
        let ops = VelocityOperators::build(l, MediumConstants::default()).unwrap();
        for axis in Axis::ALL {
            assert_eq!(ops.get(axis).shape(), (l * l, (l + 1) * (l + 1)));
            assert_eq!(ops.get(axis).kind(), OperatorKind::Velocity(axis));
        }
    }
}

#[test]
fn translation_sparsity_exhaustive() {
    for l in 1..=10 {
        for m in -1i8..=1 {
            let b = build_b1m(m, l).unwrap();
            let mat = b.matrix();
            for r in 0..mat.nrows() {
                let DegreeOrder {
                    degree: a,
                    order: d,
                } = DegreeOrder::from_index(r);
                for c in 0..mat.ncols() {
                    let DegreeOrder {
                        degree: n,
                        order: q,
                    } = DegreeOrder::from_index(c);
                    if mat[(r, c)].norm() != 0.0 {
                        assert_eq!(d, q - m as isize, "L={l} m={m} ({a},{d})<-({n},{q})");
                        assert!(a + 1 == n || a == n + 1);
                    }
                }
            }
        }
    }
}

#[test]
fn operators_identical_across_builds() {
    let medium = MediumConstants::default();
    let a = VelocityOperators::build(10, medium).unwrap();
    let b = VelocityOperators::build(10, medium).unwrap();
    for axis in Axis::ALL {
        let (x, y) = (a.get(axis).matrix(), b.get(axis).matrix());
        assert!(x
            .iter()
            .zip(y.iter())
            .all(|(u, v)| u.re.to_bits() == v.re.to_bits() && u.im.to_bits() == v.im.to_bits()));
    }
}

/// ζ-velocity against central differences of the pressure series, with a
/// truncation comfortably above `k·r`.
#[test]
fn zeta_velocity_matches_finite_differences() {
    let medium = MediumConstants::default();
    let mut rng = common::rng(7);
    for &(f, region) in &[(500.0, 0.3), (2000.0, 0.2)] {
        let k = medium.wavenumber(f);
        let l = (k * region).ceil() as usize + 12;
        let ops = VelocityOperators::build(l, medium).unwrap();
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let src = common::random_source(&mut rng, 2.0 * region, 2.0);
            let alpha = point_source_coeffs(&src, k, l).unwrap();
            let zeta = ops.apply(&alpha).unwrap();
            for _ in 0..20 {
                let x = common::point_in_ball(&mut rng, region);
                let p = SphericalPoint::from_cartesian(x);
                let v = velocity_at_via_zeta(&zeta, k, &p, region).unwrap();
                let fd = velocity_at_finite_difference(&alpha, k, x, DEFAULT_FD_STEP, &medium);
                worst = worst.max(common::rel_err(&v, &fd));
            }
        }
        assert!(worst < 1e-6, "f={f}: worst {worst}");
    }
}

#[test]
fn plane_wave_along_z_has_no_transverse_velocity() {
    let medium = MediumConstants::default();
    let k = medium.wavenumber(1000.0);
    let ops = VelocityOperators::build(12, medium).unwrap();
    let alpha = shvel::sources::plane_wave_coeffs(0.0, 0.0, 12);
    let zeta = ops.apply(&alpha).unwrap();
    let mut rng = common::rng(3);
    for _ in 0..50 {
        let p = SphericalPoint::from_cartesian(common::point_in_ball(&mut rng, 0.2));
        let v = velocity_at_via_zeta(&zeta, k, &p, 0.2).unwrap();
        assert!(v.0[0].norm() < 1e-12 * v.norm() && v.0[1].norm() < 1e-12 * v.norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operators_are_linear(seed in any::<u64>(), ar in -3.0f64..3.0, ai in -3.0f64..3.0) {
        let ops = VelocityOperators::build(5, MediumConstants::default()).unwrap();
        let mut rng = common::rng(seed);
        let mut rand_vec = || ShVector::from_fn(5, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let (x, y) = (rand_vec(), rand_vec());
        let a = Complex64::new(ar, ai);
        let combo = ShVector::from_fn(5, |l, q| {
            let i = (l * l + l) as isize + q;
            a * x[i as usize] + y[i as usize]
        });
        let zx = ops.apply(&x).unwrap();
        let zy = ops.apply(&y).unwrap();
        let zc = ops.apply(&combo).unwrap();
        for e in 0..3 {
            for i in 0..zc[e].len() {
                prop_assert!((zc[e][i] - (a * zx[e][i] + zy[e][i])).norm() < 1e-12);
            }
        }
    }
}
