use conewave::cone_geometry::{ConeAngle, ConeChain, PlanarPoint, Sign};
use conewave::two_diffraction::*;
use conewave::verification::at4_point;
use conewave::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn chain(alpha1: f64, alpha2: f64, eps1: Sign, eps2: Sign, a: f64, b: f64, c: f64) -> ConeChain {
    ConeChain {
        alpha1: ConeAngle::new(alpha1).unwrap(),
        alpha2: ConeAngle::new(alpha2).unwrap(),
        eps1,
        eps2,
        a,
        b,
        c,
    }
}

fn sign() -> impl Strategy<Value = Sign> {
    prop::bool::ANY.prop_map(|b| if b { Sign::Plus } else { Sign::Minus })
}

proptest! {
    #[test]
    fn critical_point_is_collinear_with_shifted_vertices(
        s1 in 0.0f64..0.3, s2 in 0.0f64..0.3, e1 in sign(), e2 in sign(),
        a in 0.5f64..2.0, b in 0.5f64..3.0, c in 0.5f64..2.0, th1 in -1.0f64..1.0, th2 in 2.2f64..4.0,
    ) {
        let ch = chain(3.0 * PI, 7.0, e1, e2, a, b, c);
        let (q1, q2, t) = chain_points(&ch, th1, th2);
        let cp = CompositionPoint { s1, s2, ..CompositionPoint::new(ch, q1, q2, t, 50.0).unwrap() };
        let Ok(sd) = stationary_eliminate(&cp) else { return Ok(()) };
        prop_assert!(sd.collinearity_defect < 1e-10);
        prop_assert!(sd.hessian_det < 0.0);
        prop_assert_eq!(sd.signature, 1);
        prop_assert!((sd.a + sd.b - cp.p1().dist(cp.p2())).abs() < 1e-12);
    }
}

/// Newton iteration for a critical point of Psi in the free shifts.
fn critical_shifts(ch: &ConeChain, q1: PlanarPoint, q2: PlanarPoint, free: (bool, bool), start: (f64, f64)) -> (f64, f64) {
    let grad = |s1: f64, s2: f64| composed_phase_s_derivatives(ch, 0.0, q1, q2, s1, s2, 1.0);
    let (mut s1, mut s2) = start;
    let h = 1e-6;
    for _ in 0..50 {
        let g = grad(s1, s2);
        let (g1, g2) = (if free.0 { g.0 } else { 0.0 }, if free.1 { g.1 } else { 0.0 });
        let d11 = (grad(s1 + h, s2).0 - grad(s1 - h, s2).0) / (2.0 * h);
        let d22 = (grad(s1, s2 + h).1 - grad(s1, s2 - h).1) / (2.0 * h);
        let d12 = (grad(s1, s2 + h).0 - grad(s1, s2 - h).0) / (2.0 * h);
        let (ds1, ds2) = match free {
            (true, true) => {
                let det = d11 * d22 - d12 * d12;
                ((d22 * g1 - d12 * g2) / det, (d11 * g2 - d12 * g1) / det)
            }
            (true, false) => (g1 / d11, 0.0),
            (false, true) => (0.0, g2 / d22),
            (false, false) => (0.0, 0.0),
        };
        s1 -= ds1;
        s2 -= ds2;
        if ds1.abs() + ds2.abs() < 1e-14 {
            break;
        }
    }
    (s1, s2)
}

#[test]
fn restricted_stationary_sets_reproduce_the_four_fronts() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for free in [(false, false), (true, false), (false, true), (true, true)] {
        for _ in 0..20 {
            let (e1, e2) = (if rng.gen() { Sign::Plus } else { Sign::Minus }, if rng.gen() { Sign::Plus } else { Sign::Minus });
            let b = rng.gen_range(0.5..3.0);
            let ch = chain(3.0 * PI, 4.0 * PI, e1, e2, 1.0, b, 1.0);
            let s_true = (if free.0 { rng.gen_range(0.05..0.5) } else { 0.0 }, if free.1 { rng.gen_range(0.05..0.5) } else { 0.0 });
            let p1 = PlanarPoint::new(b, -e1.value() * s_true.0);
            let p2 = PlanarPoint::new(0.0, -e2.value() * s_true.1);
            // Place the free vertices on straight continuations of the neighbouring legs.
            let q1 = if free.0 {
                let u = p1.sub(p2);
                let m = rng.gen_range(0.5..2.0) / u.norm();
                PlanarPoint::new(p1.x + m * u.x, p1.y + m * u.y)
            } else {
                PlanarPoint::new(b + rng.gen_range(0.3..2.0), rng.gen_range(-1.0..1.0))
            };
            let q2 = if free.1 {
                let u = p2.sub(if free.0 { q1 } else { p1 });
                let m = rng.gen_range(0.5..2.0) / u.norm();
                PlanarPoint::new(p2.x + m * u.x, p2.y + m * u.y)
            } else {
                PlanarPoint::new(-rng.gen_range(0.3..2.0), rng.gen_range(-1.0..1.0))
            };
            let start = (s_true.0 * 1.1, s_true.1 * 0.9);
            let (s1, s2) = critical_shifts(&ch, q1, q2, free, start);
            let travel = composed_phase_psi(&ch, 0.0, q1, q2, s1, s2, 1.0).unwrap();
            let front = match free {
                (false, false) => q2.norm() + b + q1.dist(PlanarPoint::new(b, 0.0)),
                (true, false) => q2.norm() + q1.norm(),
                (false, true) => q2.dist(PlanarPoint::new(b, 0.0)) + q1.dist(PlanarPoint::new(b, 0.0)),
                (true, true) => q1.dist(q2),
            };
            assert!((travel - front).abs() < 1e-8, "{free:?}: {travel} vs {front}");
        }
    }
}

#[test]
fn amplitude_and_stationary_value_have_order_three_halves() {
    let cp = at4_point(100.0).unwrap();
    let omegas: [f64; 3] = [1e2, 1e3, 1e4];
    let fit = |f: &dyn Fn(f64) -> f64| {
        let xs: Vec<f64> = omegas.iter().map(|w| w.ln()).collect();
        let ys: Vec<f64> = omegas.iter().map(|&w| f(w).ln()).collect();
        let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
        let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        num / den
    };
    let amp = fit(&|w| amplitude_tilde(&cp.chain, cp.q1, cp.q2, w).unwrap().norm());
    let stat = fit(&|w| stationary_phase_value(&CompositionPoint { omega: w, ..cp }, OracleAmplitude::Leading).unwrap().norm());
    assert!((amp - 1.5).abs() < 0.02, "amplitude exponent {amp}");
    assert!((stat - 1.5).abs() < 0.02, "stationary value exponent {stat}");
}

#[test]
fn split_time_does_not_change_the_result() {
    let cp = at4_point(200.0).unwrap();
    let other = CompositionPoint { t0: cp.chain.a + cp.chain.b / 3.0, ..cp };
    let (s_half, s_third) = (
        stationary_phase_value(&cp, OracleAmplitude::Leading).unwrap(),
        stationary_phase_value(&other, OracleAmplitude::Leading).unwrap(),
    );
    assert!((s_half - s_third).norm() < 1e-12 * s_half.norm(), "{s_half} vs {s_third}");
    // The brute-force quadrature carries an O(1/omega) deviation that depends on where q is localized.
    for p in [cp, other] {
        let o = oscillatory_oracle(&p, OracleAmplitude::Leading, &OracleConfig::default()).unwrap();
        assert!((o - s_half).norm() < 0.1 * s_half.norm(), "t0 {}: {o} vs {s_half}", p.t0);
    }
}

#[test]
fn system_phase_is_nondegenerate_on_the_base_line() {
    let ch = chain(3.0 * PI, 3.0 * PI, Sign::Minus, Sign::Plus, 1.0, 2.0, 1.5);
    let t = ch.a + ch.b + ch.c;
    let point = [t, ch.b + ch.c, 0.0, -ch.a, 0.0, 0.0, 0.0, 1.0];
    let rep = nondegeneracy_check(&SystemPhase { chain: ch }, &point).unwrap();
    assert!(rep.pass, "{rep:?}");
}

struct DuplicatedParameter(SystemPhase);

impl PhaseFunction for DuplicatedParameter {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn params(&self) -> Vec<usize> {
        vec![5, 5, 7]
    }
    fn eval(&self, v: &[Complex64]) -> Complex64 {
        self.0.eval(v)
    }
}

#[test]
fn duplicated_parameter_is_degenerate() {
    let ch = chain(3.0 * PI, 3.0 * PI, Sign::Minus, Sign::Plus, 1.0, 2.0, 1.5);
    let point = [4.5, 3.5, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0];
    let rep = nondegeneracy_check(&DuplicatedParameter(SystemPhase { chain: ch }), &point).unwrap();
    assert!(!rep.pass && rep.smallest_singular_value < 1e-8, "{rep:?}");
}

#[test]
fn pair_phase_is_nondegenerate_at_a_diffractive_point() {
    // q1 and q2 on either side of the vertex, off the geometric direction, on the front t = r1 + r2.
    let (q1, q2) = (PlanarPoint::new(1.0, 0.4), PlanarPoint::new(-0.8, 0.9));
    let t = q1.norm() + q2.norm();
    let point = [t, q1.x, q1.y, q2.x, q2.y, 0.0, 1.0];
    for eps in [Sign::Plus, Sign::Minus] {
        let rep = nondegeneracy_check(&PairPhase { eps }, &point).unwrap();
        assert!(rep.pass, "{eps:?}: {rep:?}");
    }
}
