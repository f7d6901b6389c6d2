use conewave::cone_geometry::{cone_distance, ConeAngle, ConePoint, Sign};
use conewave::cone_wave_kernel::*;
use std::f64::consts::PI;

fn ang(a: f64) -> ConeAngle {
    ConeAngle::new(a).unwrap()
}

fn pt(a: ConeAngle, r: f64, th: f64) -> ConePoint {
    ConePoint::new(a, r, th).unwrap()
}

/// Geometric fronts: distances to the images theta2 + k alpha within angle pi of theta1.
fn direct_fronts(a: f64, r1: f64, r2: f64, z: f64) -> Vec<f64> {
    (-10..=10)
        .map(|k| z + k as f64 * a)
        .filter(|w| w.abs() < PI)
        .map(|w| (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * w.cos()).sqrt())
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn four_pi_representations_agree_pairwise() {
    let a = ang(4.0 * PI);
    let fg = build_friedlander(a, FriedlanderSpec::default()).unwrap();
    let cases = [(1.0, 0.3, 1.2, 1.4, 1.3), (1.0, 0.3, 1.2, 1.4, 2.9), (0.8, 0.0, 1.1, 2.5, 2.4), (1.3, 0.5, 0.9, 4.0, 2.6)];
    for &(r1, t1, r2, t2, t) in &cases {
        let q = KernelQuery::new(t, pt(a, r1, t1), pt(a, r2, t2), 0.0).unwrap();
        let closed = sine_kernel_4pi_closed(&q).unwrap().value.re;
        let fried = sine_kernel_friedlander(&fg, &q).unwrap().value.re;
        assert!(rel(fried, closed) < 1e-2, "Friedlander {fried} vs closed {closed}");
        if let Ok(mp) = sine_kernel_moving_point(&q, Sign::Minus) {
            assert!(rel(mp.value.re, closed) < 1e-10, "moving point {} vs closed {closed}", mp.value.re);
            let df = sine_kernel_moving_point_delta_form(&q, Sign::Minus).unwrap();
            assert!(rel(df, closed) < 1e-10);
        }
        let qh = KernelQuery { h: 0.05, ..q };
        let front_gap = [cone_distance(a, q.q1, q.q2), r1 + r2].iter().map(|f| (t - f).abs()).fold(f64::INFINITY, f64::min);
        if front_gap > 0.5 {
            let cm = sine_kernel_4pi_closed_mollified(&qh).unwrap().value.re;
            let ch = sine_kernel_cheeger_series(a, &qh, None).unwrap().value.re;
            let fm = sine_kernel_friedlander(&fg, &qh).unwrap().value.re;
            assert!(rel(ch, cm) < 2e-2, "Cheeger {ch} vs mollified closed {cm}");
            assert!(rel(fm, cm) < 2e-2, "mollified Friedlander {fm} vs mollified closed {cm}");
        }
    }
}

#[test]
fn cheeger_series_matches_friedlander_for_general_angles() {
    let h = 0.05;
    for alpha in [PI, 3.0 * PI, 7.0] {
        let a = ang(alpha);
        let fg = build_friedlander(a, FriedlanderSpec::default()).unwrap();
        let (r1, r2, t1) = (2.0, 2.5, 0.2);
        let t2 = t1 + 0.4 * alpha.min(2.0 * PI);
        let z = t1 - t2;
        let mut fronts = direct_fronts(alpha, r1, r2, z);
        fronts.push(r1 + r2);
        let ts: Vec<f64> = (0..200)
            .map(|k| 0.5 + 8.0 * k as f64 / 200.0)
            .filter(|t| fronts.iter().all(|f| (t - f).abs() > 10.0 * h) && *t > fronts.iter().cloned().fold(f64::INFINITY, f64::min))
            .collect();
        let step = ts.len() / 10;
        let ts: Vec<f64> = ts.iter().step_by(step).take(10).cloned().collect();
        assert_eq!(ts.len(), 10);
        let cheeger = sine_kernel_cheeger_sweep(a, r1, r2, z, &ts, h, None).unwrap();
        let mut worst = 0.0f64;
        for (&t, &c) in ts.iter().zip(&cheeger) {
            let q = KernelQuery::new(t, pt(a, r1, t1), pt(a, r2, t2), h).unwrap();
            let f = sine_kernel_friedlander(&fg, &q).unwrap().value.re;
            worst = worst.max(rel(c, f));
        }
        assert!(worst < 2e-2, "alpha {alpha}: worst relative difference {worst}");
    }
}

#[test]
fn kernels_are_symmetric() {
    let a = ang(4.0 * PI);
    let fg = build_friedlander(a, FriedlanderSpec::default()).unwrap();
    for &(r1, t1, r2, t2, t) in &[(1.0, 0.3, 1.4, 1.9, 1.7), (0.9, 0.1, 1.2, 5.0, 2.8)] {
        for h in [0.0, 0.05] {
            let q = KernelQuery::new(t, pt(a, r1, t1), pt(a, r2, t2), h).unwrap();
            let s = swapped_query(&q);
            let pairs: Vec<(f64, f64)> = vec![
                (sine_kernel_4pi_closed_mollified(&q).unwrap().value.re, sine_kernel_4pi_closed_mollified(&s).unwrap().value.re),
                (sine_kernel_friedlander(&fg, &q).unwrap().value.re, sine_kernel_friedlander(&fg, &s).unwrap().value.re),
            ];
            for (x, y) in pairs {
                assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0), "{x} vs {y}");
            }
            if h > 0.0 {
                let x = sine_kernel_cheeger_series(a, &q, None).unwrap().value.re;
                let y = sine_kernel_cheeger_series(a, &s, None).unwrap().value.re;
                assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0), "{x} vs {y}");
            } else {
                let x = sine_kernel_moving_point(&q, Sign::Minus).unwrap().value.re;
                let y = sine_kernel_moving_point(&s, Sign::Minus).unwrap().value.re;
                assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0), "{x} vs {y}");
            }
        }
    }
}

#[test]
fn kernels_vanish_before_the_first_front() {
    let h = 0.05;
    for alpha in [PI, 3.0 * PI, 4.0 * PI, 7.0] {
        let a = ang(alpha);
        let fg = build_friedlander(a, FriedlanderSpec::default()).unwrap();
        let (q1, q2) = (pt(a, 2.0, 0.1), pt(a, 1.5, 1.4));
        let d = cone_distance(a, q1, q2);
        let ts: Vec<f64> = (1..6).map(|k| (d - 10.0 * h) * k as f64 / 6.0).collect();
        let ch = sine_kernel_cheeger_sweep(a, q1.r, q2.r, q1.theta - q2.theta, &ts, h, None).unwrap();
        for (&t, &c) in ts.iter().zip(&ch) {
            assert!(c.abs() < 1e-6, "alpha {alpha} t {t}: Cheeger {c}");
            let q = KernelQuery::new(t, q1, q2, h).unwrap();
            let f = sine_kernel_friedlander(&fg, &q).unwrap().value.re;
            assert!(f.abs() < 1e-6, "alpha {alpha} t {t}: Friedlander {f}");
            if alpha == 4.0 * PI {
                assert!(sine_kernel_4pi_closed_mollified(&q).unwrap().value.re.abs() < 1e-6);
                assert_eq!(sine_kernel_4pi_closed(&KernelQuery { h: 0.0, ..q }).unwrap().value.re, 0.0);
                // Only the cosine part is supported in the light cone; the imaginary
                // part is its Hilbert transform in t.
                assert!(halfwave_mu_4pi(t, q1, q2, h).unwrap().re.abs() < 1e-6);
            }
        }
    }
}

/// Mollified cosine kernel d/dt E_h by central differences of the mollified closed form.
fn cosine_kernel(q: &KernelQuery) -> f64 {
    let dt = 1e-3;
    let e = |t| sine_kernel_4pi_closed_mollified(&KernelQuery { t, ..*q }).unwrap().value.re;
    (e(q.t + dt) - e(q.t - dt)) / (2.0 * dt)
}

#[test]
fn halfwave_real_part_is_the_cosine_kernel() {
    let a = ang(4.0 * PI);
    let h = 0.05;
    let (q1, q2) = (pt(a, 1.0, 0.3), pt(a, 1.2, 1.4));
    let d = cone_distance(a, q1, q2);
    let f = q1.r + q2.r;
    for t in [d + 0.6, 0.5 * (d + f), f + 0.6, f + 1.5] {
        if (t - d).abs() < 10.0 * h || (t - f).abs() < 10.0 * h {
            continue;
        }
        let q = KernelQuery::new(t, q1, q2, h).unwrap();
        let u = halfwave_mu_4pi(t, q1, q2, h).unwrap();
        let c = cosine_kernel(&q);
        assert!(rel(u.re, c) < 2e-2, "t {t}: Re U {} vs cosine kernel {c}", u.re);
    }
}

#[test]
fn halfwave_has_no_negative_frequencies() {
    let a = ang(4.0 * PI);
    let h = 0.05;
    let (q1, q2) = (pt(a, 1.0, 0.3), pt(a, 1.2, 1.4));
    let n = 512;
    let (t0, t1) = (0.2, 6.0);
    let dt = (t1 - t0) / n as f64;
    // A cosine taper on the last quarter removes the truncation of the slow tail.
    let samples: Vec<num_complex::Complex64> = (0..n)
        .map(|k| {
            let t = t0 + k as f64 * dt;
            let x = k as f64 / n as f64;
            let w = if x < 0.75 { 1.0 } else { 0.5 * (1.0 + (PI * (x - 0.75) / 0.25).cos()) };
            halfwave_mu_4pi(t, q1, q2, h).unwrap() * w
        })
        .collect();
    // e^{-i omega t} with omega > 0 occupies the upper half of the DFT bins.
    let mut pos = 0.0;
    let mut neg = 0.0;
    for m in 1..n / 2 {
        for (sign, acc) in [(1.0, &mut neg), (-1.0, &mut pos)] {
            let z: num_complex::Complex64 = samples
                .iter()
                .enumerate()
                .map(|(k, v)| v * num_complex::Complex64::from_polar(1.0, sign * -2.0 * PI * (m * k) as f64 / n as f64))
                .sum();
            *acc += z.norm_sqr();
        }
    }
    assert!(neg < 1e-3 * (pos + neg), "fraction {}", neg / (pos + neg));
}
