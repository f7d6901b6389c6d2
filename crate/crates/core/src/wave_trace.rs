//! Wave-trace singularities of diffractive periodic orbits, and the pillowcase
//! spectrum used to observe them numerically.

use crate::diffraction::{regularized_sine_product, PoleLimit};
use crate::error::{Error, Result};
use crate::special_functions::mollifier::{mollified_inverse_power, Mollifier, SingularityOrder};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Leading singularity coeff * (t - L - i0)^{-order} of an isolated periodic
/// orbit with two geometric diffractions, legs b and L - b.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePrediction {
    #[serde(rename = "L")]
    pub l: f64,
    pub b: f64,
    pub order: i32,
    pub coefficient: Complex64,
}

/// (1/(4 i pi^2)) sqrt(b (L - b)).
pub fn predict_two_diffraction_singularity(l: f64, b: f64) -> Result<TracePrediction> {
    if !(b > 0.0 && b < l && l.is_finite()) {
        return Err(Error::BadLeg);
    }
    let coefficient = Complex64::new(0.0, -(b * (l - b)).sqrt() / (4.0 * PI * PI));
    Ok(TracePrediction { l, b, order: -1, coefficient })
}

/// Eigenfrequencies with multiplicities, complete up to `lambda_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub multiplicities: Vec<u32>,
    pub lambda_max: f64,
}

impl Spectrum {
    pub fn new(frequencies: Vec<f64>, multiplicities: Vec<u32>, lambda_max: f64) -> Result<Self> {
        if frequencies.len() != multiplicities.len() {
            return Err(Error::InvalidInput("frequency and multiplicity lengths differ".into()));
        }
        if frequencies.windows(2).any(|w| w[1] < w[0]) || frequencies.iter().any(|&f| !(f >= 0.0)) {
            return Err(Error::InvalidInput("frequencies must be sorted and nonnegative".into()));
        }
        if multiplicities.iter().any(|&m| m == 0) {
            return Err(Error::InvalidInput("multiplicities must be positive".into()));
        }
        Ok(Spectrum { frequencies, multiplicities, lambda_max })
    }

    /// N(lambda): number of eigenfrequencies <= lambda, with multiplicity.
    pub fn counting(&self, lambda: f64) -> u64 {
        let k = self.frequencies.partition_point(|&f| f <= lambda);
        self.multiplicities[..k].iter().map(|&m| m as u64).sum()
    }

    /// Frequencies repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.frequencies
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&f, &m)| std::iter::repeat(f).take(m as usize))
            .collect()
    }
}

/// Two copies of an a_rect x b_rect rectangle glued along the boundary: a flat
/// sphere with four cone points of angle pi.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PillowcaseSurface {
    pub a_rect: f64,
    pub b_rect: f64,
}

impl PillowcaseSurface {
    pub fn new(a_rect: f64, b_rect: f64) -> Result<Self> {
        if a_rect > 0.0 && b_rect > 0.0 && a_rect.is_finite() && b_rect.is_finite() {
            Ok(PillowcaseSurface { a_rect, b_rect })
        } else {
            Err(Error::InvalidInput("rectangle sides must be positive".into()))
        }
    }

    pub fn area(&self) -> f64 {
        2.0 * self.a_rect * self.b_rect
    }

    /// Weyl term area * lambda^2 / (4 pi).
    pub fn weyl_count(&self, lambda: f64) -> f64 {
        self.area() * lambda * lambda / (4.0 * PI)
    }

    /// Lengths 2 sqrt(m^2 a^2 + n^2 b^2) <= t_max, (m, n) != (0, 0): closed
    /// geodesics of the covering torus and orbits bouncing between cone points.
    pub fn length_set(&self, t_max: f64) -> Vec<f64> {
        let (a, b) = (self.a_rect, self.b_rect);
        let mut out = Vec::new();
        let m_max = (t_max / (2.0 * a)).floor() as i64;
        let n_max = (t_max / (2.0 * b)).floor() as i64;
        for m in 0..=m_max {
            for n in 0..=n_max {
                if m == 0 && n == 0 {
                    continue;
                }
                let l = 2.0 * (((m * m) as f64) * a * a + ((n * n) as f64) * b * b).sqrt();
                if l <= t_max {
                    out.push(l);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * y.abs());
        out
    }
}

/// Laplace spectrum of the pillowcase: the torus-quotient frequencies
/// pi sqrt(m^2/a^2 + n^2/b^2), m, n >= 0, with multiplicity 2 when both indices
/// are positive (cos cos and sin sin) and 1 otherwise.
pub fn pillowcase_spectrum(surface: PillowcaseSurface, lambda_max: f64) -> Result<Spectrum> {
    if !(lambda_max > 0.0) {
        return Err(Error::InvalidInput("lambda_max must be positive".into()));
    }
    let (a, b) = (surface.a_rect, surface.b_rect);
    let m_max = (lambda_max * a / PI).floor() as u64;
    let n_max = (lambda_max * b / PI).floor() as u64;
    let mut entries: Vec<(f64, u32)> = Vec::new();
    for m in 0..=m_max {
        for n in 0..=n_max {
            let lam = PI * (((m * m) as f64) / (a * a) + ((n * n) as f64) / (b * b)).sqrt();
            if lam <= lambda_max {
                let mult = if m >= 1 && n >= 1 { 2 } else { 1 };
                entries.push((lam, mult));
            }
        }
    }
    entries.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut frequencies: Vec<f64> = Vec::with_capacity(entries.len());
    let mut multiplicities: Vec<u32> = Vec::with_capacity(entries.len());
    for (lam, mult) in entries {
        if frequencies.last() == Some(&lam) {
            *multiplicities.last_mut().unwrap() += mult;
        } else {
            frequencies.push(lam);
            multiplicities.push(mult);
        }
    }
    Spectrum::new(frequencies, multiplicities, lambda_max)
}

/// Damping required at lambda_max before a truncated trace sum is accepted.
pub const TRACE_DAMPING_BOUND: f64 = 1e-10;

/// sum_j mult_j e^{-i t lambda_j} e^{-h^2 lambda_j^2 / 2} at each t.
pub fn mollified_trace(spec: &Spectrum, t_grid: &[f64], h: Mollifier) -> Result<Vec<Complex64>> {
    let damp = h.damping(spec.lambda_max);
    if damp >= TRACE_DAMPING_BOUND {
        return Err(Error::IncompleteSpectrum(damp));
    }
    let weights: Vec<f64> = spec
        .frequencies
        .iter()
        .zip(&spec.multiplicities)
        .map(|(&f, &m)| m as f64 * h.damping(f))
        .collect();
    Ok(crate::par::map(t_grid, |&t| {
        let terms: Vec<Complex64> = spec
            .frequencies
            .iter()
            .zip(&weights)
            .map(|(&f, &w)| Complex64::from_polar(w, -t * f))
            .collect();
        crate::par::pairwise_sum(&terms)
    }))
}

/// A local maximum of |trace|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub t: f64,
    pub height: f64,
    pub prominence: f64,
}

/// Median of the samples, the reference level for peak prominence.
pub fn noise_floor(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Local maxima whose topographic prominence exceeds `min_prominence`. The
/// peak position is refined by a parabola through the three samples.
pub fn find_peaks(ts: &[f64], values: &[f64], min_prominence: f64) -> Vec<Peak> {
    let n = values.len();
    let mut out = Vec::new();
    for i in 1..n.saturating_sub(1) {
        let v = values[i];
        if !(v > values[i - 1] && v >= values[i + 1]) {
            continue;
        }
        let mut left_min = v;
        let mut j = i;
        while j > 0 {
            j -= 1;
            if values[j] > v {
                break;
            }
            left_min = left_min.min(values[j]);
        }
        let mut right_min = v;
        let mut k = i;
        while k + 1 < n {
            k += 1;
            if values[k] > v {
                break;
            }
            right_min = right_min.min(values[k]);
        }
        let prominence = v - left_min.max(right_min);
        if prominence <= min_prominence {
            continue;
        }
        let (ym, y0, yp) = (values[i - 1], v, values[i + 1]);
        let denom = ym - 2.0 * y0 + yp;
        let shift = if denom != 0.0 { 0.5 * (ym - yp) / denom } else { 0.0 };
        let dt = ts[i + 1] - ts[i];
        out.push(Peak { t: ts[i] + shift.clamp(-0.5, 0.5) * dt, height: v, prominence });
    }
    out
}

/// Half-width of the least-squares window, in units of h.
pub const FIT_WINDOW: f64 = 6.0;
/// Minimum distance to any other length, in units of h.
pub const MASK_RADIUS: f64 = 10.0;
/// Residual ratio below which a fit is flagged valid.
pub const VALID_RESIDUAL: f64 = 0.2;

/// Fitted coefficients of mollified model singularities at one length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityFit {
    pub orders: Vec<SingularityOrder>,
    pub coefficients: Vec<Complex64>,
    pub residual_ratio: f64,
    pub valid: bool,
    pub samples: usize,
}

impl SingularityFit {
    /// Coefficient of the first (or only) order.
    pub fn coefficient(&self) -> Complex64 {
        self.coefficients[0]
    }
}

/// Joint least-squares fit of sum_k c_k * mollified (t - L - i0)^{-mu_k} to
/// trace samples with |t - L| <= 6h. Fails when another length lies within
/// 10h of L.
pub fn fit_singularities(
    ts: &[f64],
    trace: &[Complex64],
    l: f64,
    h: f64,
    orders: &[SingularityOrder],
    other_lengths: &[f64],
) -> Result<SingularityFit> {
    if ts.len() != trace.len() {
        return Err(Error::InvalidInput("time and trace lengths differ".into()));
    }
    if orders.is_empty() {
        return Err(Error::InvalidInput("no model orders given".into()));
    }
    if let Some(&bad) = other_lengths
        .iter()
        .find(|&&o| (o - l).abs() > 1e-12 * l.abs().max(1.0) && (o - l).abs() < MASK_RADIUS * h)
    {
        return Err(Error::WindowContaminated(bad));
    }
    let mut rows: Vec<Complex64> = Vec::new();
    let mut rhs: Vec<Complex64> = Vec::new();
    for (&t, &v) in ts.iter().zip(trace) {
        if (t - l).abs() <= FIT_WINDOW * h {
            for &o in orders {
                rows.push(mollified_inverse_power(h, t - l, o)?);
            }
            rhs.push(v);
        }
    }
    let (n, k) = (rhs.len(), orders.len());
    if n < k + 2 {
        return Err(Error::InvalidInput("fit window holds too few samples".into()));
    }
    let a = DMatrix::from_row_slice(n, k, &rows);
    let y = DVector::from_vec(rhs);
    let c = a
        .clone()
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::InvalidInput(format!("singular fit: {e}")))?;
    let norm = y.norm();
    let residual_ratio = if norm > 0.0 { (&y - &a * &c).norm() / norm } else { 0.0 };
    Ok(SingularityFit {
        orders: orders.to_vec(),
        coefficients: c.iter().copied().collect(),
        residual_ratio,
        valid: residual_ratio < VALID_RESIDUAL,
        samples: n,
    })
}

/// Single-order fit of c * mollified (t - L - i0)^{-mu}.
pub fn extract_singularity_coefficient(
    ts: &[f64],
    trace: &[Complex64],
    l: f64,
    h: f64,
    order: SingularityOrder,
    other_lengths: &[f64],
) -> Result<SingularityFit> {
    fit_singularities(ts, trace, l, h, &[order], other_lengths)
}

/// Step-by-step recomputation of the two-diffraction trace coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePipelineReport {
    #[serde(rename = "L")]
    pub l: f64,
    pub b: f64,
    pub omega: f64,
    /// Second u-derivative of the reduced phase at u = 0, by finite differences.
    pub hessian_u: f64,
    /// omega L / (b (L - b)).
    pub hessian_u_expected: f64,
    /// Sample position x on the leg between the two cones, and the transverse
    /// Hessian there, by finite differences.
    pub x_sample: f64,
    pub hessian_y: f64,
    pub hessian_y_expected: f64,
    /// Leading amplitude after the y stationary phase, divided by omega.
    pub amplitude: Complex64,
    pub coefficient: Complex64,
    pub predicted: Complex64,
    pub rel_err: f64,
    pub pass: bool,
}

/// Reduced phase omega [sqrt(b^2 + u^2) + sqrt((L-b)^2 + u^2) - t].
pub fn reduced_phase(l: f64, b: f64, t: f64, u: f64, omega: f64) -> f64 {
    omega * ((b * b + u * u).sqrt() + ((l - b).powi(2) + u * u).sqrt() - t)
}

/// Richardson-extrapolated central second difference.
fn second_difference(f: impl Fn(f64) -> f64, x: f64, step: f64) -> f64 {
    let d = |s: f64| (f(x + s) - 2.0 * f(x) + f(x - s)) / (s * s);
    (4.0 * d(0.5 * step) - d(step)) / 3.0
}

/// Second derivative at 0 of a phase that depends on its argument through its
/// square: f(u) = g(u^2) gives f''(0) = 2 g'(0), and g'(0) comes from a complex
/// step in u^2 free of cancellation.
fn even_hessian(f: impl Fn(Complex64) -> Complex64) -> f64 {
    const STEP: f64 = 1e-30;
    let u = Complex64::new(0.0, STEP).sqrt();
    2.0 * f(u).im / STEP
}

pub const PIPELINE_TOL: f64 = 1e-10;
pub const HESSIAN_TOL: f64 = 1e-6;

/// Recomputes the coefficient from its ingredients: the transverse stationary
/// phase about the orbit, the pole limits of the sine-weighted diffraction
/// coefficients, the boundary term of the (u, v) integral and the length of
/// the orbit from the x integral.
pub fn trace_pipeline_check(l: f64, b: f64) -> Result<TracePipelineReport> {
    let pred = predict_two_diffraction_singularity(l, b)?;
    let omega = 1.0;
    let scale = b.min(l - b);

    let hessian_u_fd = second_difference(|u| reduced_phase(l, b, l, u, omega), 0.0, 1e-2 * scale);
    let hessian_u = even_hessian(|u| omega * ((b * b + u * u).sqrt() + ((l - b) * (l - b) + u * u).sqrt() - l));
    let hessian_u_expected = omega * l / (b * (l - b));

    // q = (-x, y) on the leg of length L - b that closes the orbit; q1 = q + (L, 0).
    let x = 0.37 * (l - b);
    let full_phase = |y: Complex64| {
        let to_p2 = (x * x + y * y).sqrt();
        let to_p1 = ((l - b - x).powi(2) + y * y).sqrt();
        omega * (to_p2 + to_p1 + (b - l))
    };
    let hessian_y_fd = second_difference(|y| full_phase(Complex64::new(y, 0.0)).re, 0.0, 1e-2 * x.min(l - b - x));
    let hessian_y = even_hessian(full_phase);
    let hessian_y_expected = omega * (l - b) / (x * (l - b - x));
    let (r1, r2) = (l - b - x, x);

    // a~ = (2pi)^2 e^{i pi/4} (sin th1 S)(sin th2 S) / sqrt(r1 b r2) omega^{3/2}.
    let lim = regularized_sine_product(PoleLimit::IncomingAt0) * regularized_sine_product(PoleLimit::OutgoingAtPi);
    let e4 = Complex64::from_polar(1.0, PI / 4.0);
    let a_tilde = (2.0 * PI).powi(2) * e4 * lim / (r1 * b * r2).sqrt() * omega.powf(1.5);
    // y stationary phase: (2pi)^{1/2} e^{i pi/4} |H_y|^{-1/2}, with the (2pi)^{-5/2} prefactor.
    let amplitude = (2.0 * PI).powf(0.5 - 2.5) * e4 * a_tilde / hessian_y.abs().sqrt() / omega;

    // Boundary term of the u integral: i A / psi_uu; the x integral contributes L.
    let omega_density = Complex64::i() * amplitude * omega / hessian_u * l;
    // integral_0^inf e^{-i omega (t - L)} d omega = (1/i) (t - L - i0)^{-1}.
    let coefficient = omega_density / Complex64::i();

    let rel_err = (coefficient - pred.coefficient).norm() / pred.coefficient.norm();
    let hess_ok = (hessian_u_fd - hessian_u_expected).abs() <= HESSIAN_TOL * hessian_u_expected
        && (hessian_y_fd - hessian_y_expected).abs() <= HESSIAN_TOL * hessian_y_expected;
    Ok(TracePipelineReport {
        l,
        b,
        omega,
        hessian_u: hessian_u_fd,
        hessian_u_expected,
        x_sample: x,
        hessian_y: hessian_y_fd,
        hessian_y_expected,
        amplitude,
        coefficient,
        predicted: pred.coefficient,
        rel_err,
        pass: hess_ok && rel_err <= PIPELINE_TOL,
    })
}
