//! Gaussian mollification in time and the mollified model singularities.

use super::elementary::dawson;
use super::quadrature::{adaptive, Tolerance};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Gaussian mollifier: multiplication by exp(-h^2 omega^2 / 2) in frequency,
/// convolution with a unit-mass Gaussian of width `h` in time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mollifier {
    pub h: f64,
}

impl Mollifier {
    pub fn new(h: f64) -> Result<Self> {
        if h > 0.0 && h.is_finite() {
            Ok(Mollifier { h })
        } else {
            Err(Error::InvalidInput(format!("mollifier width must be positive, got {h}")))
        }
    }

    /// Fourier damping factor at frequency `omega`.
    pub fn damping(&self, omega: f64) -> f64 {
        (-0.5 * (self.h * omega).powi(2)).exp()
    }

    /// Frequency beyond which the damping is below `tol`.
    pub fn cutoff(&self, tol: f64) -> f64 {
        (-2.0 * tol.ln()).sqrt() / self.h
    }
}

/// (1/2 pi) integral over R of exp(i omega x) exp(-h^2 omega^2 / 2) d omega.
pub fn mollified_delta(h: f64, x: f64) -> f64 {
    (-0.5 * (x / h).powi(2)).exp() / (h * (2.0 * PI).sqrt())
}

/// Exponent of a conormal model singularity (x - i0)^{-mu}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SingularityOrder {
    /// mu = 1/2
    Half,
    /// mu = 1
    One,
    /// mu = 3/2
    ThreeHalves,
}

impl SingularityOrder {
    pub fn mu(self) -> f64 {
        match self {
            SingularityOrder::Half => 0.5,
            SingularityOrder::One => 1.0,
            SingularityOrder::ThreeHalves => 1.5,
        }
    }

    pub fn from_mu(mu: f64) -> Result<Self> {
        match mu {
            m if m == 0.5 => Ok(SingularityOrder::Half),
            m if m == 1.0 => Ok(SingularityOrder::One),
            m if m == 1.5 => Ok(SingularityOrder::ThreeHalves),
            _ => Err(Error::InvalidInput(format!("unsupported singularity order {mu}"))),
        }
    }

    fn gamma(self) -> f64 {
        match self {
            SingularityOrder::Half => PI.sqrt(),
            SingularityOrder::One => 1.0,
            SingularityOrder::ThreeHalves => 0.5 * PI.sqrt(),
        }
    }
}

/// F_mu(y) = integral_0^inf exp(-i u y) u^{mu-1} exp(-u^2/2) du by quadrature.
///
/// With u = v^2 the integrand is entire in v; the contour is rotated by
/// -pi/10 * sign(y), which turns the oscillation into Gaussian decay.
pub fn model_integral_quadrature(order: SingularityOrder, y: f64) -> Result<Complex64> {
    let phi = if y == 0.0 { 0.0 } else { -PI / 10.0 * y.signum() };
    let rot = Complex64::from_polar(1.0, phi);
    let f = |w: f64| {
        let v = rot * w;
        let v2 = v * v;
        let expo = Complex64::new(0.0, -y) * v2 - 0.5 * v2 * v2;
        let power = match order {
            SingularityOrder::Half => Complex64::new(1.0, 0.0),
            SingularityOrder::One => v,
            SingularityOrder::ThreeHalves => v2,
        };
        2.0 * power * expo.exp() * rot
    };
    adaptive(f, &[0.0, 1.0, 2.0, 3.0, 4.6], Tolerance::new(1e-13, 1e-12), "model singularity")
}

fn model_integral(order: SingularityOrder, y: f64) -> Result<Complex64> {
    match order {
        SingularityOrder::One => Ok(Complex64::new(
            (PI / 2.0).sqrt() * (-0.5 * y * y).exp(),
            -(2.0f64).sqrt() * dawson(y / 2.0f64.sqrt()),
        )),
        _ => model_integral_quadrature(order, y),
    }
}

/// Gaussian-mollified (x - i0)^{-mu}:
/// (e^{i pi mu/2} / Gamma(mu)) integral_0^inf e^{-i omega x} omega^{mu-1} e^{-h^2 omega^2/2} d omega.
///
/// For mu = 1 this is i integral_0^inf e^{-i omega x} e^{-h^2 omega^2/2} d omega, whose
/// value at x = 0 is i sqrt(pi/2)/h and whose real part tends to 1/x as h -> 0.
pub fn mollified_inverse_power(h: f64, x: f64, order: SingularityOrder) -> Result<Complex64> {
    let mu = order.mu();
    let pref = Complex64::from_polar(1.0, PI * mu / 2.0) / order.gamma() * h.powf(-mu);
    Ok(pref * model_integral(order, x / h)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_has_unit_mass_and_expected_peak() {
        let h = 0.05;
        let gl = crate::special_functions::quadrature::GaussLegendre::new(32);
        let mass = gl.integrate(|x| mollified_delta(h, x), -1.0, 1.0, 40);
        assert!((mass - 1.0).abs() < 1e-13);
        assert!((mollified_delta(h, 0.0) - 1.0 / (h * (2.0 * PI).sqrt())).abs() < 1e-12);
    }

    #[test]
    fn order_one_peak_value() {
        let h = 0.03;
        let v = mollified_inverse_power(h, 0.0, SingularityOrder::One).unwrap();
        assert!(v.re.abs() < 1e-14);
        assert!((v.im - (PI / 2.0).sqrt() / h).abs() < 1e-12);
    }

    #[test]
    fn order_one_tends_to_principal_value() {
        let h = 1e-3;
        for &x in &[0.1, -0.2, 0.5] {
            let v = mollified_inverse_power(h, x, SingularityOrder::One).unwrap();
            assert!((v.re - 1.0 / x).abs() < 1e-3 / x.abs());
            assert!(v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_reproduces_dawson_closed_form() {
        for &y in &[-40.0, -3.0, -0.4, 0.0, 0.7, 2.5, 12.0, 300.0] {
            let q = model_integral_quadrature(SingularityOrder::One, y).unwrap();
            let c = model_integral(SingularityOrder::One, y).unwrap();
            assert!((q - c).norm() < 1e-11, "y={y} q={q} c={c}");
        }
    }

    #[test]
    fn half_order_limit_is_inverse_square_root() {
        // (x - i0)^{-1/2} = x^{-1/2} for x > 0 and i |x|^{-1/2} for x < 0.
        let h = 1e-4;
        let v = mollified_inverse_power(h, 0.5, SingularityOrder::Half).unwrap();
        assert!((v - Complex64::new(0.5f64.powf(-0.5), 0.0)).norm() < 1e-3);
        let v = mollified_inverse_power(h, -0.5, SingularityOrder::Half).unwrap();
        assert!((v - Complex64::new(0.0, 0.5f64.powf(-0.5))).norm() < 1e-3);
    }

    #[test]
    fn three_halves_limit() {
        let h = 1e-4;
        let v = mollified_inverse_power(h, 0.25, SingularityOrder::ThreeHalves).unwrap();
        assert!((v.re - 8.0).abs() < 1e-2, "{v}");
        let v = mollified_inverse_power(h, -0.25, SingularityOrder::ThreeHalves).unwrap();
        // (x - i0)^{-3/2} = |x|^{-3/2} e^{3 i pi / 2} = -i |x|^{-3/2} for x < 0.
        assert!((v - Complex64::new(0.0, -8.0)).norm() < 1e-2, "{v}");
    }
}
