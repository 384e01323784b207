mod common;

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use shvel::operators::OperatorCache;
use shvel::reproduction::{
    solve_weights, write_weights_csv, ArrayScenario, PinvTolerance, Weights, WEIGHTS_CSV_HEADER,
};
use shvel::{Error, LoudspeakerArray, MediumConstants, SphericalPoint};

fn random_c(rng: &mut impl Rng, scale: f64) -> Complex64 {
    Complex64::new(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

#[test]
fn least_squares_residual_is_minimal() {
    let sc = ArrayScenario::five_speaker_reference();
    let cache = OperatorCache::new(sc.medium);
    let sol = sc.solve(1000.0, &cache).unwrap();
    let mut rng = common::rng(99);
    for (m, b, w) in [
        (
            &sol.system.h,
            &sol.system.zeta_desired,
            &sol.velocity_method.w,
        ),
        (
            &sol.system.g,
            &sol.system.alpha_desired,
            &sol.pressure_method.w,
        ),
    ] {
        let best = (m * w - b).norm();
        for _ in 0..1000 {
            let delta = DVector::from_fn(w.len(), |_, _| random_c(&mut rng, 1e-3 * w.norm()));
            assert!((m * (w + delta) - b).norm() >= best * (1.0 - 1e-12));
        }
    }
}

#[test]
fn reachable_target_is_recovered() {
    let sc = ArrayScenario::five_speaker_reference();
    let cache = OperatorCache::new(sc.medium);
    let sol = sc.solve(600.0, &cache).unwrap();
    let mut rng = common::rng(1);
    for m in [&sol.system.h, &sol.system.g] {
        let w0 = DVector::from_fn(5, |_, _| random_c(&mut rng, 1.0));
        let target = m * &w0;
        let w = solve_weights(m, &target, PinvTolerance::Default).unwrap();
        assert!((m * (&w - &w0)).norm() / target.norm() < 1e-10);
    }
}

#[test]
fn dimensions_across_sweep() {
    let sc = ArrayScenario::five_speaker_reference();
    let cache = OperatorCache::new(sc.medium);
    for i in 1..=40 {
        let sol = sc.solve(50.0 * i as f64, &cache).unwrap();
        assert_eq!(sol.system.h.shape(), (48, 5));
        assert_eq!(sol.system.g.shape(), (25, 5));
    }
}

#[test]
fn single_loudspeaker_is_runnable() {
    let mut sc = ArrayScenario::five_speaker_reference();
    sc.array = LoudspeakerArray::horizontal_circle(1.21, &[0.0]).unwrap();
    let cache = OperatorCache::new(sc.medium);
    let sol = sc.solve(1000.0, &cache).unwrap();
    assert_eq!(sol.velocity_method.w.len(), 1);
    assert!(sol.velocity_method.w[0].is_finite());
}

#[test]
fn loudspeaker_inside_region_rejected() {
    let mut sc = ArrayScenario::five_speaker_reference();
    sc.array =
        LoudspeakerArray::new(vec![SphericalPoint::new(0.3, PI / 2.0, 0.0).unwrap()]).unwrap();
    let cache = OperatorCache::new(sc.medium);
    assert!(matches!(sc.solve(1000.0, &cache), Err(Error::Domain(_))));
}

#[test]
fn custom_medium_rescales_velocity_system_only() {
    let mut sc = ArrayScenario::five_speaker_reference();
    let cache = OperatorCache::new(sc.medium);
    let a = sc.solve(800.0, &cache).unwrap();
    sc.medium = MediumConstants::new(2.0 * sc.medium.density, sc.medium.sound_speed).unwrap();
    let cache2 = OperatorCache::new(sc.medium);
    let b = sc.solve(800.0, &cache2).unwrap();
    assert!(
        (&a.velocity_method.w - &b.velocity_method.w).norm() < 1e-10 * a.velocity_method.w.norm()
    );
    assert!(
        (&a.system.h * Complex64::new(0.5, 0.0) - &b.system.h).norm() < 1e-12 * a.system.h.norm()
    );
}

#[test]
fn weights_csv_schema() {
    let sets = [
        Weights {
            frequency_hz: 100.0,
            w: DVector::from_element(2, Complex64::new(1.0, -0.5)),
        },
        Weights {
            frequency_hz: 150.0,
            w: DVector::from_element(2, Complex64::new(0.25, 2.0)),
        },
    ];
    let mut buf = Vec::new();
    write_weights_csv(&sets, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], WEIGHTS_CSV_HEADER);
    assert_eq!(lines.len(), 5);
    let cols: Vec<_> = lines[4].split(',').collect();
    assert_eq!(cols[0], "150");
    assert_eq!(cols[1], "1");
    assert_eq!(cols[3].parse::<f64>().unwrap(), 2.0);
}
