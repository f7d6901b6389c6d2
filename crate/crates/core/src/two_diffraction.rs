//! Composition of two diffractive half-wave kernels along a cone chain.
//!
//! The intermediate point q and frequency omega2 are eliminated by stationary
//! phase. The module provides the phases, the critical point with its Hessian,
//! the composed phase Psi, the composed amplitude, the principal symbol on the
//! twice-diffracted Lagrangian, finite-difference nondegeneracy checks and a
//! brute-force quadrature of the composed oscillatory integral.

use crate::cone_geometry::{chart_angle, ConeAngle, ConeChain, ConePoint, PlanarPoint, Sign};
use crate::cone_wave_kernel::hw_leading_amplitude;
use crate::diffraction::{scattering_value, sine_product_near_pole, PoleLimit};
use crate::error::{Error, Result};
use crate::special_functions::quadrature::GaussLegendre;
use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Distances below this are treated as coincident points.
const DIST_TOL: f64 = 1e-12;

/// Arguments of the composed kernel at shifted vertices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositionPoint {
    pub chain: ConeChain,
    pub q1: PlanarPoint,
    pub q2: PlanarPoint,
    pub s1: f64,
    pub s2: f64,
    pub omega: f64,
    pub t: f64,
    pub t0: f64,
}

impl CompositionPoint {
    /// Composition point with zero shifts and the split time t0 = a + b/2.
    pub fn new(chain: ConeChain, q1: PlanarPoint, q2: PlanarPoint, t: f64, omega: f64) -> Result<Self> {
        chain.validate()?;
        let cp = CompositionPoint { chain, q1, q2, s1: 0.0, s2: 0.0, omega, t, t0: chain.a + 0.5 * chain.b };
        cp.validate()?;
        Ok(cp)
    }

    pub fn validate(&self) -> Result<()> {
        self.chain.validate()?;
        if !(self.s1 >= 0.0 && self.s2 >= 0.0) {
            return Err(Error::InvalidInput("vertex shifts must be nonnegative".into()));
        }
        if !(self.omega > 0.0 && self.t > 0.0 && self.t0 > 0.0) {
            return Err(Error::InvalidInput("omega, t and t0 must be positive".into()));
        }
        Ok(())
    }

    /// Shifted first vertex p1(s1) = (b, -eps1 s1).
    pub fn p1(&self) -> PlanarPoint {
        PlanarPoint::new(self.chain.b, -self.chain.eps1.value() * self.s1)
    }

    /// Shifted second vertex p2(s2) = (0, -eps2 s2).
    pub fn p2(&self) -> PlanarPoint {
        PlanarPoint::new(0.0, -self.chain.eps2.value() * self.s2)
    }
}

fn checked_dist(a: PlanarPoint, b: PlanarPoint) -> Result<f64> {
    let d = a.dist(b);
    if d < DIST_TOL {
        Err(Error::DegenerateDistance)
    } else {
        Ok(d)
    }
}

/// Phi2 = [|q - p2(s2)| + |p2(s2) - q2| - t0] omega.
pub fn phase_phi2(cp: &CompositionPoint, q: PlanarPoint) -> Result<f64> {
    let p2 = cp.p2();
    Ok((checked_dist(q, p2)? + checked_dist(p2, cp.q2)? - cp.t0) * cp.omega)
}

/// Phi1 = [|q1 - p1(s1)| + |p1(s1) - q| - (t - t0)] omega.
pub fn phase_phi1(cp: &CompositionPoint, q: PlanarPoint) -> Result<f64> {
    let p1 = cp.p1();
    Ok((checked_dist(cp.q1, p1)? + checked_dist(p1, q)? - (cp.t - cp.t0)) * cp.omega)
}

/// Critical point of Phi1 + Phi2 in (q, omega2) and the Hessian data there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryData {
    pub q_c: PlanarPoint,
    /// |q_c - p2(s2)|.
    pub a: f64,
    /// |q_c - p1(s1)|.
    pub b: f64,
    /// 1/A + 1/B.
    pub c: f64,
    pub hessian_det: f64,
    pub signature: i32,
    /// Distance of q_c from the line through the shifted vertices.
    pub collinearity_defect: f64,
}

/// Signature (positive minus negative eigenvalues) of a symmetric 3x3 matrix.
pub fn hessian_signature(m: &Matrix3<f64>) -> i32 {
    let eig = m.symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    eig.eigenvalues
        .iter()
        .map(|&v| if v > 1e-14 * scale { 1 } else if v < -1e-14 * scale { -1 } else { 0 })
        .sum()
}

/// Hessian of Phi1 + Phi2 in (x along the segment, y across it, omega2).
pub fn stationary_hessian(d2_along: f64, c: f64, omega: f64) -> Matrix3<f64> {
    Matrix3::new(d2_along, 0.0, 1.0, 0.0, omega * c, 0.0, 1.0, 0.0, 0.0)
}

/// Eliminates (q, omega2): q_c lies on the segment [p2(s2), p1(s1)] at distance
/// t0 - |p2(s2) - q2| from p2(s2), and omega2 = omega1.
pub fn stationary_eliminate(cp: &CompositionPoint) -> Result<StationaryData> {
    cp.validate()?;
    let (p1, p2) = (cp.p1(), cp.p2());
    let seg = checked_dist(p1, p2)?;
    let a = cp.t0 - checked_dist(p2, cp.q2)?;
    if !(a > 0.0 && a < seg) {
        return Err(Error::NoInteriorCriticalPoint);
    }
    let u = p1.sub(p2);
    let q_c = PlanarPoint::new(p2.x + a * u.x / seg, p2.y + a * u.y / seg);
    let b = q_c.dist(p1);
    let c = 1.0 / a + 1.0 / b;
    let w = q_c.sub(p2);
    let collinearity_defect = (w.x * u.y - w.y * u.x).abs() / seg;
    let h = stationary_hessian(0.0, c, cp.omega);
    Ok(StationaryData {
        q_c,
        a,
        b,
        c,
        hessian_det: h.determinant(),
        signature: hessian_signature(&h),
        collinearity_defect,
    })
}

fn cdist(a: (Complex64, Complex64), b: (Complex64, Complex64)) -> Complex64 {
    let (dx, dy) = (a.0 - b.0, a.1 - b.1);
    (dx * dx + dy * dy).sqrt()
}

/// Psi = [|q2 - p2(s2)| + |p2(s2) - p1(s1)| + |p1(s1) - q1| - t] omega, for complex
/// shifts (used for complex-step derivatives).
pub fn composed_phase_psi_complex(
    chain: &ConeChain,
    t: f64,
    q1: PlanarPoint,
    q2: PlanarPoint,
    s1: Complex64,
    s2: Complex64,
    omega: f64,
) -> Complex64 {
    let re = |x: f64| Complex64::new(x, 0.0);
    let p1 = (re(chain.b), -s1 * chain.eps1.value());
    let p2 = (re(0.0), -s2 * chain.eps2.value());
    let (q1c, q2c) = ((re(q1.x), re(q1.y)), (re(q2.x), re(q2.y)));
    (cdist(q2c, p2) + cdist(p2, p1) + cdist(p1, q1c) - t) * omega
}

/// Composed phase Psi at real shifts.
pub fn composed_phase_psi(
    chain: &ConeChain,
    t: f64,
    q1: PlanarPoint,
    q2: PlanarPoint,
    s1: f64,
    s2: f64,
    omega: f64,
) -> Result<f64> {
    let p1 = PlanarPoint::new(chain.b, -chain.eps1.value() * s1);
    let p2 = PlanarPoint::new(0.0, -chain.eps2.value() * s2);
    Ok((checked_dist(q2, p2)? + checked_dist(p2, p1)? + checked_dist(p1, q1)? - t) * omega)
}

const CSTEP: f64 = 1e-30;

/// (dPsi/ds1, dPsi/ds2) by complex-step differentiation.
pub fn composed_phase_s_derivatives(
    chain: &ConeChain,
    t: f64,
    q1: PlanarPoint,
    q2: PlanarPoint,
    s1: f64,
    s2: f64,
    omega: f64,
) -> (f64, f64) {
    let h = Complex64::new(0.0, CSTEP);
    let r = |x: f64| Complex64::new(x, 0.0);
    let d1 = composed_phase_psi_complex(chain, t, q1, q2, r(s1) + h, r(s2), omega).im / CSTEP;
    let d2 = composed_phase_psi_complex(chain, t, q1, q2, r(s1), r(s2) + h, omega).im / CSTEP;
    (d1, d2)
}

/// Angles (theta1 of q1 about p1, theta2 of q2 about p2) in the convention of the
/// composed amplitude: theta1 in (-pi, pi], theta2 in [0, 2pi), after reflecting
/// y -> -y in a chart whose sign differs from (eps1, eps2) = (-1, +1).
pub fn composed_angles(chain: &ConeChain, q1: PlanarPoint, q2: PlanarPoint) -> Result<((f64, f64), (f64, f64))> {
    let v1 = q1.sub(PlanarPoint::new(chain.b, 0.0));
    let v2 = q2;
    let (r1, r2) = (v1.norm(), v2.norm());
    if r1 < DIST_TOL || r2 < DIST_TOL {
        return Err(Error::DegeneratePoint);
    }
    let y1 = if chain.eps1 == Sign::Minus { v1.y } else { -v1.y };
    let y2 = if chain.eps2 == Sign::Plus { v2.y } else { -v2.y };
    let th1 = y1.atan2(v1.x);
    let th2 = y2.atan2(v2.x).rem_euclid(2.0 * PI);
    Ok(((r1, th1), (r2, th2)))
}

fn finite_or_pole(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::GeometricDirection)
    }
}

/// sin(theta1) S_{alpha1}(-pi - theta1) and sin(theta2) S_{alpha2}(theta2),
/// continuous through theta1 = 0 and theta2 = pi.
pub fn sine_weighted_factors(chain: &ConeChain, th1: f64, th2: f64) -> Result<(f64, f64)> {
    let f1 = sine_product_near_pole(chain.alpha1, PoleLimit::IncomingAt0, th1);
    let f2 = sine_product_near_pole(chain.alpha2, PoleLimit::OutgoingAtPi, th2 - PI);
    Ok((finite_or_pole(f1)?, finite_or_pole(f2)?))
}

/// Composed amplitude at s1 = s2 = 0:
/// e^{i pi/4} (2pi)^2 S_{alpha1}(-pi - theta1) S_{alpha2}(theta2) sin(theta1) sin(theta2)
/// (r1 r2 / b)^{-1/2} omega^{3/2}.
pub fn amplitude_tilde(chain: &ConeChain, q1: PlanarPoint, q2: PlanarPoint, omega: f64) -> Result<Complex64> {
    chain.validate()?;
    let ((r1, th1), (r2, th2)) = composed_angles(chain, q1, q2)?;
    let (f1, f2) = sine_weighted_factors(chain, th1, th2)?;
    let modulus = (2.0 * PI).powi(2) * f1 * f2 * (chain.b / (r1 * r2)).sqrt() * omega.powf(1.5);
    Ok(Complex64::from_polar(1.0, PI / 4.0) * modulus)
}

/// Scalar part of the principal symbol on the twice-diffracted Lagrangian:
/// 2pi e^{i pi/4} omega^{-1/2} b^{-1/2} S_{alpha2}(theta2) S_{alpha1}(-pi - theta1).
/// The half-density |dr1 dtheta1 dtheta2 domega|^{1/2} is implicit.
pub fn principal_symbol_lambda0(chain: &ConeChain, theta1: f64, theta2: f64, omega: f64) -> Result<Complex64> {
    chain.validate()?;
    let s2 = scattering_value(chain.alpha2, theta2)?;
    let s1 = scattering_value(chain.alpha1, -PI - theta1)?;
    Ok(Complex64::from_polar(1.0, PI / 4.0) * (2.0 * PI * s1 * s2 / (omega * chain.b).sqrt()))
}

/// Half-density carried by the principal symbol.
pub const LAMBDA0_HALF_DENSITY: &str = "|dr1 dtheta1 dtheta2 domega|^{1/2}";

/// |det d(r1, theta1, theta2, omega, r1 + b + r2 - t)/d(x1, y1, x2, y2, omega)|
/// by central differences, at s1 = s2 = 0.
pub fn lambda0_jacobian(chain: &ConeChain, q1: PlanarPoint, q2: PlanarPoint) -> Result<f64> {
    let p1 = PlanarPoint::new(chain.b, 0.0);
    let coords = |v: &[f64; 5]| -> [f64; 5] {
        let a = PlanarPoint::new(v[0], v[1]).sub(p1);
        let b = PlanarPoint::new(v[2], v[3]);
        let (r1, r2) = (a.norm(), b.norm());
        [r1, a.y.atan2(a.x), b.y.atan2(b.x).rem_euclid(2.0 * PI), v[4], r1 + chain.b + r2]
    };
    if q1.dist(p1) < DIST_TOL || q2.norm() < DIST_TOL {
        return Err(Error::DegeneratePoint);
    }
    let x0 = [q1.x, q1.y, q2.x, q2.y, 1.0];
    let h = 1e-6;
    let mut m = DMatrix::<f64>::zeros(5, 5);
    for j in 0..5 {
        let (mut xp, mut xm) = (x0, x0);
        xp[j] += h;
        xm[j] -= h;
        let (fp, fm) = (coords(&xp), coords(&xm));
        for i in 0..5 {
            m[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(m.determinant().abs())
}

/// Phase family for the nondegeneracy check. Variables are complex so that
/// first derivatives in the phase parameters can be taken by complex step.
pub trait PhaseFunction: Sync {
    /// Number of variables (base and parameters).
    fn dim(&self) -> usize;
    /// Indices of the phase parameters among the variables.
    fn params(&self) -> Vec<usize>;
    fn eval(&self, v: &[Complex64]) -> Complex64;
}

/// Single-diffraction phase omega (|q1 - p(s)| + |q2 - p(s)| - t), p(s) = (0, -eps s);
/// variables (t, x1, y1, x2, y2, s, omega), parameters (s, omega).
#[derive(Debug, Clone, Copy)]
pub struct PairPhase {
    pub eps: Sign,
}

impl PhaseFunction for PairPhase {
    fn dim(&self) -> usize {
        7
    }
    fn params(&self) -> Vec<usize> {
        vec![5, 6]
    }
    fn eval(&self, v: &[Complex64]) -> Complex64 {
        let p = (Complex64::new(0.0, 0.0), -v[5] * self.eps.value());
        (cdist((v[1], v[2]), p) + cdist((v[3], v[4]), p) - v[0]) * v[6]
    }
}

/// Composed phase Psi with variables (t, x1, y1, x2, y2, s1, s2, omega) and
/// parameters (s1, s2, omega).
#[derive(Debug, Clone, Copy)]
pub struct SystemPhase {
    pub chain: ConeChain,
}

impl PhaseFunction for SystemPhase {
    fn dim(&self) -> usize {
        8
    }
    fn params(&self) -> Vec<usize> {
        vec![5, 6, 7]
    }
    fn eval(&self, v: &[Complex64]) -> Complex64 {
        let z = Complex64::new(0.0, 0.0);
        let p1 = (Complex64::new(self.chain.b, 0.0), -v[5] * self.chain.eps1.value());
        let p2 = (z, -v[6] * self.chain.eps2.value());
        (cdist((v[3], v[4]), p2) + cdist(p2, p1) + cdist(p1, (v[1], v[2])) - v[0]) * v[7]
    }
}

/// Outcome of a nondegeneracy check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NondegeneracyReport {
    pub smallest_singular_value: f64,
    pub pass: bool,
}

/// Threshold on the smallest singular value.
pub const NONDEGENERACY_TOL: f64 = 1e-6;

/// Differentials d(dphi/dtheta_j) stacked as rows; first derivatives in the
/// parameters by complex step, their gradients by central differences with step
/// 1e-6 and one Richardson extrapolation.
pub fn nondegeneracy_check(phase: &dyn PhaseFunction, point: &[f64]) -> Result<NondegeneracyReport> {
    let n = phase.dim();
    if point.len() != n {
        return Err(Error::InvalidInput(format!("expected {n} variables, got {}", point.len())));
    }
    let params = phase.params();
    let dparam = |x: &[f64], j: usize| -> f64 {
        let mut v: Vec<Complex64> = x.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        v[j].im = CSTEP;
        phase.eval(&v).im / CSTEP
    };
    let central = |j: usize, k: usize, h: f64| -> f64 {
        let (mut xp, mut xm) = (point.to_vec(), point.to_vec());
        xp[k] += h;
        xm[k] -= h;
        (dparam(&xp, j) - dparam(&xm, j)) / (2.0 * h)
    };
    let h = 1e-6;
    let mut m = DMatrix::<f64>::zeros(params.len(), n);
    for (row, &j) in params.iter().enumerate() {
        for k in 0..n {
            let (d1, d2) = (central(j, k, h), central(j, k, 0.5 * h));
            m[(row, k)] = (4.0 * d2 - d1) / 3.0;
        }
    }
    let sv = m.singular_values();
    let smallest = sv.iter().fold(f64::INFINITY, |a, &v| a.min(v));
    Ok(NondegeneracyReport { smallest_singular_value: smallest, pass: smallest > NONDEGENERACY_TOL })
}

/// Amplitudes used in the oscillatory oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleAmplitude {
    /// Leading half-wave amplitudes a_{alpha_i, eps_i, 1} omega_i of the two kernels.
    Leading,
    /// a1 a2 = 1 (phase only).
    Unit,
}

/// Localization of the oracle integrand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Width of the Gaussian in omega2, relative to omega.
    pub kappa: f64,
    /// Width of the Gaussian in q, relative to min(A, B).
    pub sigma_q: f64,
    /// Relative tolerance of the refinement check.
    pub rel_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { kappa: 1.0 / 6.0, sigma_q: 1.0 / 3.0, rel_tol: 1e-6 }
    }
}

/// Leading amplitude of a single diffractive kernel about `vertex`: the first
/// point is `qa`, the second `qb`, angles in the chart of `eps`.
fn kernel_amplitude(alpha: ConeAngle, eps: Sign, vertex: PlanarPoint, qa: PlanarPoint, qb: PlanarPoint) -> Result<Complex64> {
    let (va, vb) = (qa.sub(vertex), qb.sub(vertex));
    let pa = ConePoint { r: va.norm(), theta: chart_angle(eps, va) };
    let pb = ConePoint { r: vb.norm(), theta: chart_angle(eps, vb) };
    hw_leading_amplitude(alpha, eps, pa, pb)
}

/// a1(q) a2(q) per unit omega1 omega2, at zero shifts.
fn amplitude_product(cp: &CompositionPoint, q: PlanarPoint, amp: OracleAmplitude) -> Result<Complex64> {
    match amp {
        OracleAmplitude::Unit => Ok(Complex64::new(1.0, 0.0)),
        OracleAmplitude::Leading => {
            let ch = &cp.chain;
            let a1 = kernel_amplitude(ch.alpha1, ch.eps1, cp.p1(), cp.q1, q)?;
            let a2 = kernel_amplitude(ch.alpha2, ch.eps2, cp.p2(), q, cp.q2)?;
            Ok(a1 * a2)
        }
    }
}

fn zero_shift(cp: &CompositionPoint) -> CompositionPoint {
    CompositionPoint { s1: 0.0, s2: 0.0, ..*cp }
}

/// Leading stationary-phase value of the (q, omega2) integral:
/// (2pi)^{3/2} |det H|^{-1/2} e^{i pi sgn/4} e^{i Psi} a1(q_c) a2(q_c).
pub fn stationary_phase_value(cp: &CompositionPoint, amp: OracleAmplitude) -> Result<Complex64> {
    let cp = zero_shift(cp);
    let sd = stationary_eliminate(&cp)?;
    let psi = composed_phase_psi(&cp.chain, cp.t, cp.q1, cp.q2, 0.0, 0.0, cp.omega)?;
    let w = match amp {
        OracleAmplitude::Leading => cp.omega * cp.omega,
        OracleAmplitude::Unit => 1.0,
    };
    let a = amplitude_product(&cp, sd.q_c, amp)? * w;
    let pref = (2.0 * PI).powf(1.5) / sd.hessian_det.abs().sqrt();
    Ok(a * pref * Complex64::from_polar(1.0, PI * sd.signature as f64 / 4.0 + psi))
}

/// W(f) = integral of omega2^m exp(-(omega2 - omega)^2 / (2 (kappa omega)^2)) e^{i omega2 f}
/// over omega2 > 0 (m = 1 for leading amplitudes, 0 for unit ones), by composite
/// Gauss-Legendre.
pub fn omega2_integral(omega: f64, kappa: f64, f: f64, with_weight: bool, gl: &GaussLegendre) -> Complex64 {
    let s = kappa * omega;
    let (lo, hi) = ((omega - 8.0 * s).max(0.0), omega + 8.0 * s);
    let panels = (((hi - lo) * f.abs() / (2.0 * PI)).ceil() as usize + 4).max(4);
    gl.integrate(
        |w| {
            let g = (-0.5 * ((w - omega) / s).powi(2)).exp();
            let m = if with_weight { w } else { 1.0 };
            Complex64::from_polar(g * m, w * f)
        },
        lo,
        hi,
        panels,
    )
}

/// The same integral over the whole line, in closed form.
pub fn omega2_integral_closed(omega: f64, kappa: f64, f: f64, with_weight: bool) -> Complex64 {
    let s = kappa * omega;
    let base = Complex64::from_polar((2.0 * PI).sqrt() * s * (-0.5 * s * s * f * f).exp(), omega * f);
    if with_weight {
        base * Complex64::new(omega, s * s * f)
    } else {
        base
    }
}

fn oracle_sum(cp: &CompositionPoint, sd: &StationaryData, amp: OracleAmplitude, cfg: &OracleConfig, refine: usize) -> Result<Complex64> {
    let omega = cp.omega;
    let (a, b) = (sd.a, sd.b);
    let p2 = cp.p2();
    let sigma = cfg.sigma_q * a.min(b);
    let w = 8.0 / (cfg.kappa * omega);
    let (rho_lo, rho_hi) = ((a - w).max(0.05 * a), (a + w).min(a + 0.95 * b));
    let beta_hi = cp.chain.eps2.value() * PI / 2.0;
    let beta_lo = beta_hi - 2.0 * PI;
    let gl = GaussLegendre::new(16);
    let n_rho = refine * (((rho_hi - rho_lo) * 2.0 * omega / (2.0 * PI)).ceil() as usize + 4);
    let n_beta = refine * ((2.0 * omega * rho_hi).ceil() as usize + 8);
    let with_weight = amp == OracleAmplitude::Leading;
    let rho_nodes = panel_nodes(&gl, rho_lo, rho_hi, n_rho);
    let beta_nodes = panel_nodes(&gl, beta_lo, beta_hi, n_beta);
    let dist_q2 = p2.dist(cp.q2);
    let w_rho: Vec<Complex64> = crate::par::map(&rho_nodes, |&(rho, _)| {
        omega2_integral(omega, cfg.kappa, rho + dist_q2 - cp.t0, with_weight, &gl)
    });
    let w1 = if with_weight { omega } else { 1.0 };
    let rows: Vec<Result<Complex64>> = crate::par::map_range(rho_nodes.len(), |i| {
        let (rho, wr) = rho_nodes[i];
        let mut row = Vec::with_capacity(beta_nodes.len());
        for &(beta, wb) in &beta_nodes {
            let q = PlanarPoint::new(p2.x + rho * beta.cos(), p2.y + rho * beta.sin());
            let chi = (-0.5 * q.dist(sd.q_c).powi(2) / (sigma * sigma)).exp();
            if chi < 1e-18 {
                continue;
            }
            let phi1 = phase_phi1(cp, q)?;
            let val = amplitude_product(cp, q, amp)? * Complex64::from_polar(chi * w1 * rho * wb, phi1);
            row.push(val);
        }
        Ok(crate::par::pairwise_sum(&row) * w_rho[i] * wr)
    });
    let rows: Vec<Complex64> = rows.into_iter().collect::<Result<_>>()?;
    Ok(crate::par::pairwise_sum(&rows))
}

fn panel_nodes(gl: &GaussLegendre, lo: f64, hi: f64, panels: usize) -> Vec<(f64, f64)> {
    let width = (hi - lo) / panels as f64;
    let mut out = Vec::with_capacity(panels * gl.nodes.len());
    for p in 0..panels {
        let c = lo + (p as f64 + 0.5) * width;
        for (x, w) in gl.nodes.iter().zip(&gl.weights) {
            out.push((c + 0.5 * width * x, 0.5 * width * w));
        }
    }
    out
}

/// Direct quadrature of the (q, omega2) integral
/// integral e^{i(Phi1 + Phi2)} a1 a2 chi(q) eta(omega2) dq domega2 at zero shifts,
/// with chi a Gaussian of width sigma_q min(A, B) about q_c and eta a Gaussian of
/// width kappa omega about omega. q is parametrized by polar coordinates about p2
/// over the chart of the second cone.
pub fn oscillatory_oracle(cp: &CompositionPoint, amp: OracleAmplitude, cfg: &OracleConfig) -> Result<Complex64> {
    let cp = zero_shift(cp);
    cp.validate()?;
    let sd = stationary_eliminate(&cp)?;
    let mut prev = oracle_sum(&cp, &sd, amp, cfg, 1)?;
    let mut refine = 1;
    for _ in 0..3 {
        let next_refine = refine * 3 / 2 + 1;
        let next = oracle_sum(&cp, &sd, amp, cfg, next_refine)?;
        let err = (next - prev).norm();
        if err <= cfg.rel_tol * next.norm() {
            return Ok(next);
        }
        prev = next;
        refine = next_refine;
    }
    Err(Error::QuadratureFailure { what: "two-diffraction oracle".into(), estimate: f64::NAN })
}

/// Stationary value, oracle and their relative deviation for one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositionCheck {
    pub stationary: Complex64,
    pub oracle: Complex64,
    pub rel_err: f64,
}

pub fn composition_check(cp: &CompositionPoint, amp: OracleAmplitude, cfg: &OracleConfig) -> Result<CompositionCheck> {
    let stationary = stationary_phase_value(cp, amp)?;
    let oracle = oscillatory_oracle(cp, amp, cfg)?;
    Ok(CompositionCheck { stationary, oracle, rel_err: (oracle - stationary).norm() / stationary.norm() })
}

/// Standard chain configuration: q1 at angle theta1 about p1 at distance c,
/// q2 at angle theta2 about p2 at distance a, t = a + b + c.
pub fn chain_points(chain: &ConeChain, theta1: f64, theta2: f64) -> (PlanarPoint, PlanarPoint, f64) {
    let q1 = PlanarPoint::new(chain.b + chain.c * theta1.cos(), chain.c * theta1.sin());
    let q2 = PlanarPoint::new(chain.a * theta2.cos(), chain.a * theta2.sin());
    (q1, q2, chain.a + chain.b + chain.c)
}
