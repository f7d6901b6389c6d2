//! Scattering matrix S_alpha of the cone, its Fourier-series oracle, the GTD
//! diffracted-front amplitude and the regularized coefficient near geometric
//! directions.

use crate::cone_geometry::ConeAngle;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Denominator factors below this magnitude are reported as poles.
pub const POLE_TOL: f64 = 1e-12;

/// Closed-form value of S_alpha at an angle difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringEvaluation {
    pub alpha: ConeAngle,
    pub theta: f64,
    /// NaN at a pole.
    pub value: f64,
    pub is_pole: bool,
}

/// sin(2 pi^2 / alpha), with exact zero when the cone angle divides 2 pi.
fn numerator(alpha: f64) -> f64 {
    let n = (2.0 * PI * PI / alpha).sin();
    if n.abs() < 1e-14 {
        0.0
    } else {
        n
    }
}

/// S_alpha(theta) = -(1/2alpha) sin(2pi^2/alpha) / [sin((pi/alpha)(pi-theta)) sin((pi/alpha)(pi+theta))].
pub fn scattering_matrix(alpha: ConeAngle, theta: f64) -> ScatteringEvaluation {
    let a = alpha.value();
    let c = PI / a;
    let d = (c * (PI - theta)).sin() * (c * (PI + theta)).sin();
    let is_pole = (c * (PI - theta)).sin().abs() < POLE_TOL || (c * (PI + theta)).sin().abs() < POLE_TOL;
    let value = if is_pole { f64::NAN } else { -numerator(a) / (2.0 * a * d) };
    ScatteringEvaluation { alpha, theta, value, is_pole }
}

/// S_alpha(theta), or `GeometricDirection` at a pole.
pub fn scattering_value(alpha: ConeAngle, theta: f64) -> Result<f64> {
    let e = scattering_matrix(alpha, theta);
    if e.is_pole {
        Err(Error::GeometricDirection)
    } else {
        Ok(e.value)
    }
}

/// S_{4 pi}(theta) = -1 / (4 pi cos(theta/2)).
pub fn scattering_4pi(theta: f64) -> f64 {
    -1.0 / (4.0 * PI * (0.5 * theta).cos())
}

/// Summation method for the Fourier oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FourierSummation {
    /// Plain symmetric partial sum over |k| <= N.
    Partial,
    /// Cesaro mean of order k, (C, k). Order 1 is the Fejer mean.
    Cesaro(u32),
}

/// Cesaro order used by default for the oracle (the Fejer mean). For every
/// order k the error decays only like k / (N |1 - z|^2), z = e^{2 pi i (theta -+ pi)/alpha}.
pub const DEFAULT_CESARO_ORDER: u32 = 1;

/// Weight of term j in the (C, k) mean of order N.
fn cesaro_weight(n: usize, j: usize, k: u32) -> f64 {
    let mut w = 1.0;
    for i in 1..=k as usize {
        w *= (n - j + i) as f64 / (n + i) as f64;
    }
    w
}

/// Fourier series (-i/alpha) sum_k e^{-i pi |nu_k|} e^{-i nu_k theta}, nu_k = 2 pi k/alpha,
/// over |k| <= N with the chosen summation.
pub fn scattering_matrix_fourier(alpha: ConeAngle, theta: f64, n: usize, summation: FourierSummation) -> Complex64 {
    let a = alpha.value();
    let pref = Complex64::new(0.0, -1.0 / a);
    let order = match summation {
        FourierSummation::Partial => 0,
        FourierSummation::Cesaro(k) => k,
    };
    let terms: Vec<Complex64> = (1..=n)
        .map(|j| {
            let nu = 2.0 * PI * j as f64 / a;
            let w = cesaro_weight(n, j, order);
            Complex64::from_polar(2.0 * w * (nu * theta).cos(), -PI * nu)
        })
        .collect();
    pref * (Complex64::new(1.0, 0.0) + crate::par::pairwise_sum(&terms))
}

/// Leading diffracted-front amplitude (1/2pi) (r1 r2)^{-1/2} S_alpha(theta).
pub fn gtd_amplitude(alpha: ConeAngle, r1: f64, r2: f64, theta: f64) -> Result<f64> {
    if !(r1 > 0.0 && r2 > 0.0) {
        return Err(Error::DegeneratePoint);
    }
    Ok(scattering_value(alpha, theta)? / (2.0 * PI * (r1 * r2).sqrt()))
}

/// Which pole limit of the sine-weighted scattering matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PoleLimit {
    /// lim_{theta1 -> 0} sin(theta1) S_alpha(-pi - theta1)
    IncomingAt0,
    /// lim_{theta2 -> pi} sin(theta2) S_alpha(theta2)
    OutgoingAtPi,
}

/// Limit values 1/(2pi) and -1/(2pi). They hold whenever sin(2pi^2/alpha) != 0;
/// for alpha = 2pi/n the finite products vanish identically.
pub fn regularized_sine_product(which: PoleLimit) -> f64 {
    match which {
        PoleLimit::IncomingAt0 => 1.0 / (2.0 * PI),
        PoleLimit::OutgoingAtPi => -1.0 / (2.0 * PI),
    }
}

/// sin(u) / sin(c u), continuous at u = 0.
fn sine_ratio(u: f64, c: f64) -> f64 {
    if u == 0.0 {
        1.0 / c
    } else {
        u.sin() / (c * u).sin()
    }
}

/// The finite product at offset `delta` from the pole: sin(delta) S(-pi - delta)
/// for the incoming limit and sin(pi + delta) S(pi + delta) for the outgoing one,
/// evaluated without cancellation.
pub fn sine_product_near_pole(alpha: ConeAngle, which: PoleLimit, delta: f64) -> f64 {
    let a = alpha.value();
    let c = PI / a;
    // sin(delta) S(pi + delta) = (1/2a) N sin(delta)/sin(c delta) / sin(c (2pi + delta)).
    let p = numerator(a) / (2.0 * a) * sine_ratio(delta, c) / (c * (2.0 * PI + delta)).sin();
    match which {
        PoleLimit::IncomingAt0 => p,
        PoleLimit::OutgoingAtPi => -p,
    }
}

/// sin(u/2) / sin(c u), continuous at u = 0.
fn half_sine_ratio(u: f64, c: f64) -> Result<f64> {
    if u == 0.0 {
        return Ok(0.5 / c);
    }
    let d = (c * u).sin();
    if d.abs() < POLE_TOL {
        return Err(Error::GeometricDirection);
    }
    Ok((0.5 * u).sin() / d)
}

/// S_alpha(theta1 - theta2) (sin theta1 + sin theta2), regularized at
/// theta1 - theta2 = +-pi where the sine sum cancels the pole.
pub fn sine_sum_product(alpha: ConeAngle, theta1: f64, theta2: f64) -> Result<f64> {
    let a = alpha.value();
    let c = PI / a;
    let n = numerator(a);
    let th = theta1 - theta2;
    let sigma = 0.5 * (theta1 + theta2);
    // sin th1 + sin th2 = 2 sin(sigma) cos(th/2), cos(th/2) = sin((pi -+ th)/2).
    let (xm, xp) = (PI - th, PI + th);
    let (near, far) = if xm.abs() <= xp.abs() { (xm, xp) } else { (xp, xm) };
    let other = (c * far).sin();
    if other.abs() < POLE_TOL {
        if n == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::GeometricDirection);
    }
    let ratio = match half_sine_ratio(near, c) {
        Ok(r) => r,
        Err(_) if n == 0.0 => return Ok(0.0),
        Err(e) => return Err(e),
    };
    Ok(-n / (2.0 * a) * 2.0 * sigma.sin() * ratio / other)
}
