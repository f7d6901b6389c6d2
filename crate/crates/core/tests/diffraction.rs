use conewave::cone_geometry::{ConeAngle, ConePoint, Sign};
use conewave::cone_wave_kernel::hw_leading_amplitude;
use conewave::diffraction::*;
use proptest::prelude::*;
use std::f64::consts::PI;

const ANGLES: [f64; 4] = [PI, 3.0 * PI, 4.0 * PI, 7.0];

fn ang(a: f64) -> ConeAngle {
    ConeAngle::new(a).unwrap()
}

/// Distance from theta to the nearest pole +-pi (mod alpha).
fn pole_gap(a: f64, theta: f64) -> f64 {
    [PI, -PI]
        .iter()
        .map(|p| {
            let d = (theta - p).rem_euclid(a);
            d.min(a - d)
        })
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #[test]
    fn closed_form_is_even_and_periodic(ai in 0usize..4, theta in -20.0f64..20.0) {
        let a = ANGLES[ai];
        prop_assume!(pole_gap(a, theta) > 1e-6);
        let s = scattering_matrix(ang(a), theta).value;
        prop_assert_eq!(s, scattering_matrix(ang(a), -theta).value);
        let shifted = scattering_matrix(ang(a), theta + a).value;
        prop_assert!((s - shifted).abs() <= 1e-9 * s.abs().max(1.0));
    }

    #[test]
    fn fourier_oracle_is_even(ai in 0usize..4, theta in 0.0f64..6.0) {
        let a = ang(ANGLES[ai]);
        let f = |th| scattering_matrix_fourier(a, th, 300, FourierSummation::Cesaro(DEFAULT_CESARO_ORDER));
        prop_assert!((f(theta) - f(-theta)).norm() < 1e-6);
    }

    #[test]
    fn gtd_ratio_to_four_pi(ai in 0usize..4, r1 in 0.1f64..5.0, r2 in 0.1f64..5.0, theta in -3.0f64..3.0) {
        let a = ANGLES[ai];
        prop_assume!(pole_gap(a, theta) > 1e-3);
        let g = gtd_amplitude(ang(a), r1, r2, theta).unwrap();
        let g4 = gtd_amplitude(ang(4.0 * PI), r1, r2, theta).unwrap();
        let want = scattering_value(ang(a), theta).unwrap() / scattering_4pi(theta);
        prop_assert!((g / g4 - want).abs() <= 1e-12 * want.abs().max(1.0));
        let scaled = gtd_amplitude(ang(a), 4.0 * r1, r2, theta).unwrap();
        prop_assert!((scaled * 2.0 - g).abs() <= 1e-14 * g.abs().max(1e-300));
    }
}

#[test]
fn poles_sit_at_geometric_directions() {
    for a in [PI, 3.0 * PI, 4.0 * PI, 7.0] {
        for p in [PI, -PI, PI + a, -PI + a] {
            assert!(scattering_matrix(ang(a), p).is_pole, "alpha {a}, theta {p}");
            if a != PI {
                // The denominator changes sign across a simple pole.
                let (l, r) = (scattering_matrix(ang(a), p - 1e-4).value, scattering_matrix(ang(a), p + 1e-4).value);
                assert!(l * r < 0.0, "alpha {a}, theta {p}: {l} {r}");
            }
        }
        let interior = (0..200).map(|k| -PI + 2.0 * PI * (k as f64 + 0.5) / 200.0);
        for th in interior {
            if pole_gap(a, th) > 1e-6 {
                assert!(!scattering_matrix(ang(a), th).is_pole);
            }
        }
    }
    assert!(!scattering_matrix(ang(2.0 * PI), 0.3).is_pole);
    assert_eq!(scattering_matrix(ang(2.0 * PI), 0.3).value, 0.0);
}

#[test]
fn pole_limits_are_independent_of_the_angle() {
    for a in [3.0 * PI, 4.0 * PI, 7.0] {
        let alpha = ang(a);
        for (which, want) in [(PoleLimit::IncomingAt0, 1.0 / (2.0 * PI)), (PoleLimit::OutgoingAtPi, -1.0 / (2.0 * PI))] {
            assert_eq!(regularized_sine_product(which), want);
            let lim = sine_product_near_pole(alpha, which, 0.0);
            assert!((lim - want).abs() < 1e-12, "alpha {a}: {lim}");
        }
        // Symmetric numerical limit of the unregularized products.
        let d = 1e-6;
        let inc = |th: f64| th.sin() * scattering_value(alpha, -PI - th).unwrap();
        let out = |th: f64| th.sin() * scattering_value(alpha, th).unwrap();
        let inc_lim = 0.5 * (inc(d) + inc(-d));
        let out_lim = 0.5 * (out(PI + d) + out(PI - d));
        assert!((inc_lim - 1.0 / (2.0 * PI)).abs() < 1e-10, "alpha {a}: {inc_lim}");
        assert!((out_lim + 1.0 / (2.0 * PI)).abs() < 1e-10, "alpha {a}: {out_lim}");
    }
}

#[test]
fn pole_limit_vanishes_when_the_cone_does_not_diffract() {
    // sin(2 pi^2 / alpha) = 0 at alpha = pi, so every finite product is zero.
    for which in [PoleLimit::IncomingAt0, PoleLimit::OutgoingAtPi] {
        for d in [0.0, 1e-6, 1e-3] {
            assert_eq!(sine_product_near_pole(ang(PI), which, d), 0.0);
        }
    }
}

#[test]
fn fourier_oracle_examples() {
    let a = ang(4.0 * PI);
    // The Fejer mean converges like 1/N: at N = 200 it is within 1e-3, not 1e-4.
    let z = scattering_matrix_fourier(a, 0.0, 200, FourierSummation::Cesaro(1));
    assert!((z - num_complex::Complex64::new(-1.0 / (4.0 * PI), 0.0)).norm() < 1e-3, "{z}");
    let z = scattering_matrix_fourier(a, 0.0, 4000, FourierSummation::Cesaro(1));
    assert!((z - num_complex::Complex64::new(-1.0 / (4.0 * PI), 0.0)).norm() < 1e-4, "{z}");
    let z0 = scattering_matrix_fourier(a, 0.7, 0, FourierSummation::Partial);
    assert!((z0.re).abs() < 1e-15 && (z0.im + 1.0 / (4.0 * PI)).abs() < 1e-15);
    let s = scattering_value(ang(3.0 * PI), PI / 2.0).unwrap();
    assert!((s + 3f64.sqrt() / (6.0 * PI)).abs() < 1e-14);
}

#[test]
fn leading_amplitude_for_three_pi() {
    let alpha = ang(3.0 * PI);
    let (q1, q2) = (ConePoint { r: 1.3, theta: 0.3 }, ConePoint { r: 0.7, theta: PI + 0.1 });
    let s = scattering_matrix(alpha, q1.theta - q2.theta);
    assert!(!s.is_pole);
    for eps in [Sign::Plus, Sign::Minus] {
        let v = hw_leading_amplitude(alpha, eps, q1, q2).unwrap();
        let want = -2.0 * PI * eps.value() * s.value * (q1.theta.sin() + q2.theta.sin()) / (q1.r * q2.r).sqrt();
        assert!(v.re == 0.0 && (v.im - want).abs() < 1e-14 * want.abs(), "{v} vs {want}");
    }
}

#[test]
fn leading_amplitude_vanishes_with_the_sine_sum() {
    let alpha = ang(3.0 * PI);
    let (q1, q2) = (ConePoint { r: 1.0, theta: 0.4 }, ConePoint { r: 2.0, theta: -0.4 });
    let v = hw_leading_amplitude(alpha, Sign::Plus, q1, q2).unwrap();
    assert!(v.norm() < 1e-15);
}
