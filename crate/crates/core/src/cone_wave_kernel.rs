//! Sine and half-wave kernels on cones.
//!
//! Representations: the closed form on C_{4pi}, the Bessel mode series for
//! general alpha, the Friedlander periodization with the operator A3 A2 A1,
//! and the moving-vertex delta integral on C_{4pi}. Also the building blocks
//! l_{+-1} and Upsilon_0 of the differentiated propagator.

use crate::cone_geometry::{
    angular_separation, cone_distance, shifted_vertex_coords, ConeAngle, ConePoint, PlanarPoint, Sign,
};
use crate::diffraction::{sine_sum_product, scattering_matrix};
use crate::error::{Error, Result};
use crate::special_functions::bessel::{bessel_j, bessel_j_ladder};
use crate::special_functions::elementary::{dawson, elliptic_k};
use crate::special_functions::fractional::{half_derivative, SampledFunction1D};
use crate::special_functions::mollifier::mollified_delta;
use crate::special_functions::quadrature::{adaptive, gk15_from_values, kronrod15_nodes, Tolerance};
use crate::special_functions::roots::find_roots_convex;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

/// Arguments of a kernel evaluation. `h = 0` requests the unmollified kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelQuery {
    pub t: f64,
    pub q1: ConePoint,
    pub q2: ConePoint,
    pub h: f64,
}

impl KernelQuery {
    pub fn new(t: f64, q1: ConePoint, q2: ConePoint, h: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("time must be positive, got {t}")));
        }
        if !(h >= 0.0 && h.is_finite()) {
            return Err(Error::InvalidInput(format!("mollifier width must be nonnegative, got {h}")));
        }
        if q1.r <= 0.0 || q2.r <= 0.0 {
            return Err(Error::DegeneratePoint);
        }
        Ok(KernelQuery { t, q1, q2, h })
    }

    fn swapped(&self) -> Self {
        KernelQuery { q1: self.q2, q2: self.q1, ..*self }
    }
}

/// Position of the time relative to the direct and diffracted fronts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    BeforeDirect,
    BetweenFronts,
    AfterDiffracted,
    NearFront,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::BeforeDirect => "before_direct",
            Region::BetweenFronts => "between_fronts",
            Region::AfterDiffracted => "after_diffracted",
            Region::NearFront => "near_front",
        }
    }
}

/// Kernel value (real for the sine kernel) with its region tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: Complex64,
    pub region: Region,
}

impl KernelValue {
    fn real(v: f64, region: Region) -> Self {
        KernelValue { value: Complex64::new(v, 0.0), region }
    }
}

/// Region of `q`; the band around each front is 10h, or 1e-12 relative when h = 0.
pub fn classify_region(alpha: ConeAngle, q: &KernelQuery) -> Region {
    let d = cone_distance(alpha, q.q1, q.q2);
    let f = q.q1.r + q.q2.r;
    let tol = if q.h > 0.0 { 10.0 * q.h } else { 1e-12 * q.t.max(1.0) };
    if (q.t - d).abs() < tol || (q.t - f).abs() < tol {
        Region::NearFront
    } else if q.t < d {
        Region::BeforeDirect
    } else if q.t < f {
        Region::BetweenFronts
    } else {
        Region::AfterDiffracted
    }
}

fn four_pi() -> ConeAngle {
    ConeAngle::new(4.0 * PI).expect("4 pi is a valid cone angle")
}

/// Squared chart distance r1^2 + r2^2 - 2 r1 r2 cos(delta), cancellation-free.
fn chart_dist2(r1: f64, r2: f64, delta: f64) -> f64 {
    (r1 - r2).powi(2) + 4.0 * r1 * r2 * (0.5 * delta).sin().powi(2)
}

/// Pointwise sine kernel on C_{4pi} as a function of t for fixed (r1, r2, reduced delta).
pub fn closed_4pi_profile(t: f64, r1: f64, r2: f64, delta: f64) -> f64 {
    let dist = if delta >= PI { r1 + r2 } else { chart_dist2(r1, r2, delta).sqrt() };
    if t <= dist {
        return 0.0;
    }
    let s = if delta >= PI { (t * t - chart_dist2(r1, r2, delta)).sqrt() } else { ((t - dist) * (t + dist)).sqrt() };
    if t < r1 + r2 {
        1.0 / (2.0 * PI * s)
    } else {
        1.0 / (4.0 * PI * s)
    }
}

/// Planar sine kernel (1/2pi)(t^2 - d^2)^{-1/2} H(t - d).
pub fn plane_profile(t: f64, d: f64) -> f64 {
    if t <= d {
        0.0
    } else {
        1.0 / (2.0 * PI * ((t - d) * (t + d)).sqrt())
    }
}

/// Closed-form sine kernel on C_{4pi} (three regions).
pub fn sine_kernel_4pi_closed(q: &KernelQuery) -> Result<KernelValue> {
    let alpha = four_pi();
    let region = classify_region(alpha, &KernelQuery { h: 0.0, ..*q });
    if region == Region::NearFront {
        return Err(Error::OnFront);
    }
    let delta = angular_separation(alpha, q.q1.theta, q.q2.theta);
    Ok(KernelValue::real(closed_4pi_profile(q.t, q.q1.r, q.q2.r, delta), region))
}

/// Half-width of the Gaussian window, in units of h.
const WINDOW: f64 = 9.0;

/// Integral of `f(s) w(s)` over [lo, hi], split at breakpoints; at points in
/// `sqrt_sing` the integrand may blow up like (s - p)^{-1/2} from the right.
fn integrate_pieces(
    f: &(impl Fn(f64) -> f64 + Sync),
    lo: f64,
    hi: f64,
    sqrt_sing: &[f64],
    jumps: &[f64],
    tol: Tolerance,
) -> Result<f64> {
    if hi <= lo {
        return Ok(0.0);
    }
    let mut pts: Vec<f64> = vec![lo, hi];
    for &p in sqrt_sing.iter().chain(jumps) {
        if p > lo && p < hi {
            pts.push(p);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut total = 0.0;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let singular = sqrt_sing.iter().any(|&p| (p - a).abs() <= 1e-14 * p.abs().max(1.0));
        total += if singular {
            let g = |u: f64| 2.0 * u * f(a + u * u);
            adaptive(g, &[0.0, (b - a).sqrt()], tol, "mollified kernel")?
        } else {
            adaptive(f, &[a, b], tol, "mollified kernel")?
        };
    }
    Ok(total)
}

/// Gaussian mollification in t of a kernel profile that vanishes for t <= 0,
/// extended oddly to negative t (the profile of the sine kernel in t).
pub fn mollify_profile(
    profile: impl Fn(f64) -> f64 + Sync,
    t: f64,
    h: f64,
    sqrt_sing: &[f64],
    jumps: &[f64],
) -> Result<f64> {
    let tol = Tolerance::new(1e-12, 1e-11);
    let lo = (t - WINDOW * h).max(0.0);
    let hi = t + WINDOW * h;
    let fwd = |s: f64| profile(s) * mollified_delta(h, t - s);
    let mut total = integrate_pieces(&fwd, lo, hi, sqrt_sing, jumps, tol)?;
    let lo_m = (-(t + WINDOW * h)).max(0.0);
    let hi_m = -(t - WINDOW * h);
    if hi_m > lo_m {
        let back = |s: f64| profile(s) * mollified_delta(h, t + s);
        total -= integrate_pieces(&back, lo_m, hi_m, sqrt_sing, jumps, tol)?;
    }
    Ok(total)
}

/// Closed-form C_{4pi} sine kernel convolved in t with the Gaussian of width h.
pub fn sine_kernel_4pi_closed_mollified(q: &KernelQuery) -> Result<KernelValue> {
    if q.h <= 0.0 {
        return sine_kernel_4pi_closed(q);
    }
    let alpha = four_pi();
    let delta = angular_separation(alpha, q.q1.theta, q.q2.theta);
    let (r1, r2) = (q.q1.r, q.q2.r);
    let dist = cone_distance(alpha, q.q1, q.q2);
    let sing: Vec<f64> = if dist < r1 + r2 { vec![dist] } else { vec![] };
    let v = mollify_profile(|s| closed_4pi_profile(s, r1, r2, delta), q.t, q.h, &sing, &[r1 + r2])?;
    Ok(KernelValue::real(v, classify_region(alpha, q)))
}

/// Planar (alpha = 2pi) sine kernel, mollified when h > 0.
pub fn sine_kernel_plane(q: &KernelQuery) -> Result<KernelValue> {
    let alpha = ConeAngle::new(2.0 * PI)?;
    let d = cone_distance(alpha, q.q1, q.q2);
    let region = if (q.t - d).abs() < if q.h > 0.0 { 10.0 * q.h } else { 1e-12 * q.t.max(1.0) } {
        Region::NearFront
    } else if q.t < d {
        Region::BeforeDirect
    } else {
        Region::BetweenFronts
    };
    if q.h == 0.0 {
        if region == Region::NearFront {
            return Err(Error::OnFront);
        }
        return Ok(KernelValue::real(plane_profile(q.t, d), region));
    }
    let v = mollify_profile(|s| plane_profile(s, d), q.t, q.h, &[d], &[])?;
    Ok(KernelValue::real(v, region))
}

// ---------------------------------------------------------------------------
// Bessel mode series

/// Damping exponent h*lambda at which the Gaussian factor drops below 1e-16.
const LAMBDA_CUT: f64 = 7.0;

/// Detects 2pi/alpha = p/q with q <= 24.
fn rational_ratio(alpha: f64) -> Option<(u64, u64)> {
    let beta = 2.0 * PI / alpha;
    for q in 1..=24u64 {
        let p = (beta * q as f64).round();
        if p >= 1.0 && (beta * q as f64 - p).abs() < 1e-12 * p.max(1.0) {
            return Some((p as u64, q));
        }
    }
    None
}

/// Mode bookkeeping for the Bessel series.
struct ModePlan {
    weights: Vec<f64>,
    orders: Vec<f64>,
    /// For rational cone angles: (fractional order, max ladder index, [(mode, ladder index)]).
    ladders: Option<Vec<(f64, usize, Vec<(usize, usize)>)>>,
}

impl ModePlan {
    fn new(alpha: f64, dtheta: f64, k_max: usize) -> Self {
        let orders: Vec<f64> = (0..=k_max).map(|k| 2.0 * PI * k as f64 / alpha).collect();
        let weights: Vec<f64> =
            orders.iter().enumerate().map(|(k, nu)| if k == 0 { 1.0 } else { 2.0 * (nu * dtheta).cos() }).collect();
        let ladders = rational_ratio(alpha).map(|(p, q)| {
            let mut classes: Vec<(f64, usize, Vec<(usize, usize)>)> =
                (0..q).map(|c| (c as f64 / q as f64, 0, Vec::new())).collect();
            for k in 0..=k_max {
                let num = k as u64 * p;
                let (c, n) = ((num % q) as usize, (num / q) as usize);
                classes[c].1 = classes[c].1.max(n);
                classes[c].2.push((k, n));
            }
            classes.retain(|c| !c.2.is_empty());
            classes
        });
        ModePlan { weights, orders, ladders }
    }

    /// (sum_k w_k J_{nu_k}(x1) J_{nu_k}(x2), contribution of the last mode).
    fn mode_sum(&self, x1: f64, x2: f64) -> (f64, f64) {
        let last = self.weights.len() - 1;
        let mut total = 0.0;
        let mut last_val = 0.0;
        match &self.ladders {
            Some(classes) => {
                for (mu, n_max, modes) in classes {
                    let l1 = bessel_j_ladder(*mu, *n_max, x1);
                    let l2 = if x2 == x1 { None } else { Some(bessel_j_ladder(*mu, *n_max, x2)) };
                    for &(k, n) in modes {
                        let j2 = l2.as_ref().map_or(l1[n], |l| l[n]);
                        let v = self.weights[k] * l1[n] * j2;
                        total += v;
                        if k == last {
                            last_val = v;
                        }
                    }
                }
            }
            None => {
                let cap = x1.max(x2) + 30.0 * x1.max(x2).cbrt() + 40.0;
                for (k, (&w, &nu)) in self.weights.iter().zip(&self.orders).enumerate() {
                    if nu > cap {
                        break;
                    }
                    let j1 = bessel_j(nu, x1);
                    let j2 = if x2 == x1 { j1 } else { bessel_j(nu, x2) };
                    let v = w * j1 * j2;
                    total += v;
                    if k == last {
                        last_val = v;
                    }
                }
            }
        }
        (total, last_val)
    }
}

/// Default mode cutoff for the Bessel series at width h.
pub fn default_mode_cut(alpha: ConeAngle, r_max: f64, h: f64) -> usize {
    let x = LAMBDA_CUT / h * r_max;
    let nu = x + 10.0 * x.cbrt() + 10.0;
    (nu * alpha.value() / (2.0 * PI)).ceil() as usize
}

/// Mollified sine kernel from the Bessel mode series at several times at once:
/// E_h(t) = (1/alpha) integral_0^inf sin(lambda t) e^{-h^2 lambda^2/2}
///          sum_k w_k J_{nu_k}(lambda r1) J_{nu_k}(lambda r2) d lambda,
/// nu_k = 2 pi k/alpha, w_0 = 1, w_k = 2 cos(nu_k dtheta).
pub fn sine_kernel_cheeger_sweep(
    alpha: ConeAngle,
    r1: f64,
    r2: f64,
    dtheta: f64,
    ts: &[f64],
    h: f64,
    mode_cut: Option<usize>,
) -> Result<Vec<f64>> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput("the mode series requires h > 0".into()));
    }
    if !(r1 > 0.0 && r2 > 0.0) {
        return Err(Error::DegeneratePoint);
    }
    if ts.is_empty() {
        return Ok(Vec::new());
    }
    let a = alpha.value();
    let k_max = mode_cut.unwrap_or_else(|| default_mode_cut(alpha, r1.max(r2), h));
    let plan = ModePlan::new(a, dtheta, k_max);
    let lam_max = LAMBDA_CUT / h;
    let t_max = ts.iter().fold(0.0f64, |m, &t| m.max(t.abs()));
    let freq = t_max + r1 + r2;
    let mut panels = ((lam_max * freq / (2.0 * PI)).ceil() as usize).max(8);
    let nodes = kronrod15_nodes();
    // Per time: (integral, contribution of the last mode, L1 norm of the integrand).
    let level = |panels: usize| -> Vec<(f64, f64, f64)> {
        let width = lam_max / panels as f64;
        let lambdas: Vec<f64> = (0..panels)
            .flat_map(|p| {
                let c = (p as f64 + 0.5) * width;
                nodes.iter().map(move |x| c + 0.5 * width * x)
            })
            .collect();
        let sums = crate::par::map(&lambdas, |&lam| {
            let (s, l) = plan.mode_sum(lam * r1, lam * r2);
            let damp = (-0.5 * (h * lam).powi(2)).exp();
            (s * damp, l * damp)
        });
        ts.iter()
            .map(|&t| {
                let (mut total, mut last, mut l1) = (0.0, 0.0, 0.0);
                for p in 0..panels {
                    let vals: [f64; 15] = std::array::from_fn(|i| (lambdas[p * 15 + i] * t).sin() * sums[p * 15 + i].0);
                    let lv: [f64; 15] = std::array::from_fn(|i| (lambdas[p * 15 + i] * t).sin() * sums[p * 15 + i].1);
                    total += gk15_from_values(&vals, 0.5 * width).0;
                    last += gk15_from_values(&lv, 0.5 * width).0;
                    l1 += vals.iter().map(|v| v.abs()).sum::<f64>() * width / 15.0;
                }
                (total, last, l1)
            })
            .collect()
    };
    let mut prev = level(panels);
    let mut worst = f64::NAN;
    for _attempt in 0..4 {
        panels *= 2;
        let cur = level(panels);
        let mut ok = true;
        worst = 0.0;
        for (&(v, _, l1), &(p, _, _)) in cur.iter().zip(&prev) {
            let tol = 1e-8 * v.abs() + 1e-10 * l1;
            worst = f64::max(worst, (v - p).abs() / tol * 1e-8);
            ok &= (v - p).abs() <= tol;
        }
        if ok {
            let mut out = Vec::with_capacity(ts.len());
            for &(v, last, l1) in &cur {
                if last.abs() > 1e-8 * v.abs().max(1e-6 * l1) {
                    return Err(Error::ModeTailTooLarge(last.abs() / v.abs().max(f64::MIN_POSITIVE)));
                }
                out.push(v / a);
            }
            return Ok(out);
        }
        prev = cur;
    }
    Err(Error::QuadratureFailure { what: "Bessel series lambda integral".into(), estimate: worst })
}

/// Mollified sine kernel from the Bessel mode series.
pub fn sine_kernel_cheeger_series(alpha: ConeAngle, q: &KernelQuery, mode_cut: Option<usize>) -> Result<KernelValue> {
    let v = sine_kernel_cheeger_sweep(alpha, q.q1.r, q.q2.r, q.q1.theta - q.q2.theta, &[q.t], q.h, mode_cut)?;
    Ok(KernelValue::real(v[0], classify_region(alpha, q)))
}

// ---------------------------------------------------------------------------
// Friedlander representation

/// Unperiodized Friedlander function G(y, z): H(y + cos z) H(pi - |z|) for y < 1
/// and (1/pi)[arctan((pi - z)/u) + arctan((pi + z)/u)], u = arccosh y, for y > 1.
pub fn friedlander_g(y: f64, z: f64) -> f64 {
    if y < 1.0 {
        if z.abs() < PI && y + z.cos() > 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        let u = y.acosh();
        (((PI - z) / u).atan() + ((PI + z) / u).atan()) / PI
    }
}

/// Images z + alpha k with |z + alpha k| < pi.
fn images(alpha: f64, z: f64) -> Vec<f64> {
    let k_lo = ((-PI - z) / alpha).floor() as i64;
    let k_hi = ((PI - z) / alpha).ceil() as i64;
    (k_lo..=k_hi).map(|k| z + alpha * k as f64).filter(|zk| zk.abs() < PI).collect()
}

/// R(y, z) = G_alpha(y, z) - #{images}, y >= 1, by the closed form of the image sum:
/// -(1/pi)[arctan(cot(c(pi - z)) tanh(c u)) + arctan(cot(c(pi + z)) tanh(c u))], c = pi/alpha.
pub fn friedlander_remainder(alpha: f64, y: f64, z: f64) -> f64 {
    let c = PI / alpha;
    let tu = (c * y.max(1.0).acosh()).tanh();
    let cot = |x: f64| x.cos() / x.sin();
    -((cot(c * (PI - z)) * tu).atan() + (cot(c * (PI + z)) * tu).atan()) / PI
}

/// Periodized G_alpha(y, z) = sum_k G(y, z + alpha k).
pub fn friedlander_g_alpha(alpha: ConeAngle, y: f64, z: f64) -> f64 {
    let a = alpha.value();
    let steps = images(a, z);
    if y < 1.0 {
        steps.iter().filter(|&&zk| y + zk.cos() > 0.0).count() as f64
    } else {
        steps.len() as f64 + friedlander_remainder(a, y, z)
    }
}

/// Resolution of the Friedlander grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FriedlanderSpec {
    pub y_max: f64,
    pub dy: f64,
    pub dz: f64,
}

impl Default for FriedlanderSpec {
    fn default() -> Self {
        FriedlanderSpec { y_max: 12.0, dy: 2e-3, dz: 0.02 }
    }
}

#[derive(Debug, Clone)]
struct ZSegment {
    start: f64,
    len: f64,
    dz: f64,
    /// columns[i][j]: half-derivative data at z = start + (i + 1/2) dz, y = 1 + j dy.
    columns: Vec<Vec<f64>>,
}

/// Tabulated A1-image of the smooth part of G_alpha for y >= 1.
///
/// G_alpha = sum over images H(y - y0_k) + 2 S_alpha(z) arccosh(y) + R2(y, z) with
/// R2 = O(arccosh^3 y). The step and arccosh parts have closed-form half-derivatives;
/// R2 is sampled on a uniform y-grid for each z-node and transformed by
/// `half_derivative`. The z-range is split at the poles z = +-pi mod alpha.
#[derive(Debug, Clone)]
pub struct FriedlanderGrid {
    pub alpha: ConeAngle,
    pub spec: FriedlanderSpec,
    pub ny: usize,
    segments: Vec<ZSegment>,
}

impl FriedlanderGrid {
    /// Sampled G_alpha at a point (not interpolated; evaluated in closed form).
    pub fn g(&self, y: f64, z: f64) -> f64 {
        friedlander_g_alpha(self.alpha, y, z)
    }

    /// Number of z-nodes over one period.
    pub fn nz(&self) -> usize {
        self.segments.iter().map(|s| s.columns.len()).sum()
    }

    fn locate(&self, z: f64) -> &ZSegment {
        let a = self.alpha.value();
        for s in &self.segments {
            let off = (z - s.start).rem_euclid(a);
            if off < s.len {
                return s;
            }
        }
        &self.segments[0]
    }

    /// Interpolated sqrt(pi) D^{1/2} R2 at (y, z), y in [1, y_max].
    fn smooth_part(&self, y: f64, z: f64) -> f64 {
        let s = self.locate(z);
        let a = self.alpha.value();
        let nz = s.columns.len();
        let zi = (z - s.start).rem_euclid(a) / s.dz - 0.5;
        let yj = (y - 1.0) / self.spec.dy;
        let (iz, wz) = lagrange4(zi, nz);
        let (jy, wy) = lagrange4(yj, self.ny);
        let mut v = 0.0;
        for (p, &w1) in wz.iter().enumerate() {
            let col = &s.columns[iz + p];
            for (q, &w2) in wy.iter().enumerate() {
                v += w1 * w2 * col[jy + q];
            }
        }
        v
    }

    /// A1 G_alpha at (y, z), with A1 = sqrt(pi) D^{1/2}.
    pub fn a1_g(&self, y: f64, z: f64) -> Result<f64> {
        if y > self.spec.y_max {
            return Err(Error::OutOfGrid(format!("y = {y} exceeds y_max = {}", self.spec.y_max)));
        }
        let a = self.alpha.value();
        let mut v = 0.0;
        for zk in images(a, z) {
            let y0 = -zk.cos();
            if y > y0 {
                v += 1.0 / (y - y0).sqrt();
            }
        }
        if y > 1.0 {
            let s = scattering_matrix(self.alpha, z);
            if s.is_pole {
                return Err(Error::OutOfGrid("angle difference on a geometric direction".into()));
            }
            v += 2.0 * s.value * SQRT_2 * elliptic_k(-(y - 1.0) / 2.0);
            v += self.smooth_part(y, z);
        }
        Ok(v)
    }
}

/// Start index and weights of a 4-point Lagrange stencil at fractional index x,
/// clamped to [0, n-1].
fn lagrange4(x: f64, n: usize) -> (usize, [f64; 4]) {
    if n < 4 {
        // Linear fallback for tiny grids.
        let i = (x.floor().max(0.0) as usize).min(n.saturating_sub(2));
        let f = (x - i as f64).clamp(0.0, 1.0);
        let mut w = [0.0; 4];
        w[0] = 1.0 - f;
        if n > 1 {
            w[1] = f;
        } else {
            w[0] = 1.0;
        }
        return (i, w);
    }
    let i0 = (x.floor() as i64 - 1).clamp(0, n as i64 - 4) as usize;
    let mut w = [0.0; 4];
    for (p, wp) in w.iter_mut().enumerate() {
        let mut l = 1.0;
        for q in 0..4 {
            if q != p {
                l *= (x - (i0 + q) as f64) / (p as f64 - q as f64);
            }
        }
        *wp = l;
    }
    (i0, w)
}

/// Builds the Friedlander grid for cone angle alpha.
pub fn build_friedlander(alpha: ConeAngle, spec: FriedlanderSpec) -> Result<FriedlanderGrid> {
    if !(spec.dy > 0.0 && spec.dz > 0.0 && spec.y_max > 1.0 + 4.0 * spec.dy) {
        return Err(Error::InvalidInput("Friedlander grid resolutions must be positive".into()));
    }
    let a = alpha.value();
    let ny = ((spec.y_max - 1.0) / spec.dy).ceil() as usize + 1;
    let mut poles = vec![PI.rem_euclid(a), (-PI).rem_euclid(a)];
    poles.sort_by(f64::total_cmp);
    poles.dedup_by(|x, y| (*x - *y).abs() < 1e-12 || (a - (*x - *y).abs()) < 1e-12);
    let bounds: Vec<(f64, f64)> = if poles.len() == 1 {
        vec![(poles[0], a)]
    } else {
        vec![(poles[0], poles[1] - poles[0]), (poles[1], a - (poles[1] - poles[0]))]
    };
    let mut segments = Vec::new();
    for (start, len) in bounds {
        let nz = ((len / spec.dz).ceil() as usize).max(4);
        let dz = len / nz as f64;
        let zs: Vec<f64> = (0..nz).map(|i| start + (i as f64 + 0.5) * dz).collect();
        let columns = crate::par::map(&zs, |&z| {
            let s = scattering_matrix(alpha, z).value;
            let f = SampledFunction1D::from_fn(1.0, spec.dy, ny, |y| {
                let u = y.acosh();
                friedlander_remainder(a, y, z) - 2.0 * s * u
            });
            half_derivative(&f).values.into_iter().map(|v| v * PI.sqrt()).collect::<Vec<f64>>()
        });
        segments.push(ZSegment { start, len, dz, columns });
    }
    Ok(FriedlanderGrid { alpha, spec, ny, segments })
}

/// Pointwise Friedlander kernel E = A3 A2 A1 G_alpha with A3 = (2 pi sqrt(2 r1 r2))^{-1}
/// and y = (t^2 - r1^2 - r2^2)/(2 r1 r2), z = theta1 - theta2.
pub fn friedlander_profile(fg: &FriedlanderGrid, t: f64, r1: f64, r2: f64, z: f64) -> Result<f64> {
    let y = (t * t - r1 * r1 - r2 * r2) / (2.0 * r1 * r2);
    Ok(fg.a1_g(y, z)? / (2.0 * PI * (2.0 * r1 * r2).sqrt()))
}

/// Sine kernel from the Friedlander grid (mollified when h > 0).
pub fn sine_kernel_friedlander(fg: &FriedlanderGrid, q: &KernelQuery) -> Result<KernelValue> {
    let (r1, r2) = (q.q1.r, q.q2.r);
    let z = q.q1.theta - q.q2.theta;
    let region = classify_region(fg.alpha, q);
    if q.h == 0.0 {
        if region == Region::NearFront {
            return Err(Error::OnFront);
        }
        return Ok(KernelValue::real(friedlander_profile(fg, q.t, r1, r2, z)?, region));
    }
    let t_hi = q.t + WINDOW * q.h;
    let y_hi = (t_hi * t_hi - r1 * r1 - r2 * r2) / (2.0 * r1 * r2);
    if y_hi > fg.spec.y_max {
        return Err(Error::OutOfGrid(format!("y = {y_hi} exceeds y_max = {}", fg.spec.y_max)));
    }
    let fronts: Vec<f64> = images(fg.alpha.value(), z)
        .iter()
        .map(|zk| chart_dist2(r1, r2, *zk).sqrt())
        .collect();
    let v = mollify_profile(
        |s| friedlander_profile(fg, s, r1, r2, z).unwrap_or(f64::NAN),
        q.t,
        q.h,
        &fronts,
        &[r1 + r2],
    )?;
    if !v.is_finite() {
        return Err(Error::OutOfGrid("mollification window left the grid".into()));
    }
    Ok(KernelValue::real(v, region))
}

// ---------------------------------------------------------------------------
// Moving conical point on C_{4pi}

/// Chart positions of (q1, q2) for the moving-vertex representation on C_{4pi}:
/// the pair is rotated to sit symmetrically about the direction in which the
/// vertex moves ((0, s) for eps = -1, (0, -s) for eps = +1).
pub fn moving_point_frame(q1: ConePoint, q2: ConePoint, eps: Sign) -> Result<(PlanarPoint, PlanarPoint)> {
    let sep = angular_separation(four_pi(), q1.theta, q2.theta);
    if !(sep > 1e-9 && sep < 2.0 * PI - 1e-9) {
        return Err(Error::DegenerateFrame);
    }
    let dir = -eps.value() * PI / 2.0;
    let (a1, a2) = (dir - 0.5 * sep, dir + 0.5 * sep);
    Ok((
        PlanarPoint::new(q1.r * a1.cos(), q1.r * a1.sin()),
        PlanarPoint::new(q2.r * a2.cos(), q2.r * a2.sin()),
    ))
}

/// Roots of g(s) = r1(s) + r2(s) - t for the moving vertex p(s) = (0, -eps s).
fn moving_roots(p1: PlanarPoint, p2: PlanarPoint, eps: Sign, t: f64) -> Result<Vec<f64>> {
    let e = eps.value();
    let g = |s: f64| p1.dist(PlanarPoint::new(0.0, -e * s)) + p2.dist(PlanarPoint::new(0.0, -e * s)) - t;
    let s_max = t + p1.norm() + p2.norm();
    find_roots_convex(g, s_max)
}

/// Per-root data (s, r1(s), r2(s), theta1(s), theta2(s), g'(s)).
struct RootData {
    r1: f64,
    r2: f64,
    th1: f64,
    th2: f64,
    dg: f64,
}

fn root_data(p1: PlanarPoint, p2: PlanarPoint, eps: Sign, s: f64) -> Result<RootData> {
    let (r1, th1) = shifted_vertex_coords(p1, eps, s)?;
    let (r2, th2) = shifted_vertex_coords(p2, eps, s)?;
    let dg = eps.value() * (th1.sin() + th2.sin());
    Ok(RootData { r1, r2, th1, th2, dg })
}

/// Sine kernel on C_{4pi} from the moving-vertex delta integral
/// E = (1/4pi) integral (r1 r2)^{-1/2} delta(t - r1(s) - r2(s)) sin((theta1(s)+theta2(s))/2) ds.
/// Each root contributes (1/8pi)(r1 r2)^{-1/2} |cos(dtheta(s)/2)|^{-1}.
pub fn sine_kernel_moving_point(q: &KernelQuery, eps: Sign) -> Result<KernelValue> {
    let alpha = four_pi();
    let region = classify_region(alpha, &KernelQuery { h: 0.0, ..*q });
    let (p1, p2) = moving_point_frame(q.q1, q.q2, eps)?;
    let mut total = 0.0;
    for s in moving_roots(p1, p2, eps, q.t)? {
        let d = root_data(p1, p2, eps, s)?;
        if d.dg.abs() < 1e-10 {
            return Err(Error::TangentRoot(d.dg.abs()));
        }
        total += 1.0 / (8.0 * PI * (d.r1 * d.r2).sqrt() * (0.5 * (d.th1 - d.th2)).cos().abs());
    }
    Ok(KernelValue::real(total, region))
}

/// The same integral evaluated literally as sum over roots of
/// (1/4pi)(r1 r2)^{-1/2} sin((theta1+theta2)/2) / |g'(s)|.
pub fn sine_kernel_moving_point_delta_form(q: &KernelQuery, eps: Sign) -> Result<f64> {
    let (p1, p2) = moving_point_frame(q.q1, q.q2, eps)?;
    let mut total = 0.0;
    for s in moving_roots(p1, p2, eps, q.t)? {
        let d = root_data(p1, p2, eps, s)?;
        if d.dg.abs() < 1e-10 {
            return Err(Error::TangentRoot(d.dg.abs()));
        }
        total += (0.5 * (d.th1 + d.th2)).sin() / (4.0 * PI * (d.r1 * d.r2).sqrt() * d.dg.abs());
    }
    Ok(total)
}

/// F1(x) = integral_0^inf omega e^{i omega x} e^{-h^2 omega^2/2} d omega.
pub fn gaussian_first_moment(x: f64, h: f64) -> Complex64 {
    let y = x / h;
    let phi0 = Complex64::new((PI / 2.0).sqrt() * (-0.5 * y * y).exp(), SQRT_2 * dawson(y / SQRT_2));
    (Complex64::new(1.0, 0.0) + Complex64::new(0.0, y) * phi0) / (h * h)
}

/// Half-wave kernel on C_{4pi} from the moving-vertex oscillatory integral
/// U = (-i/4pi^2) integral_0^inf ds integral_0^inf d omega
///     sin((theta1(s)+theta2(s))/2) (r1(s) r2(s))^{-1/2} omega e^{i omega (r1(s)+r2(s)-t)} e^{-h^2 omega^2/2}.
pub fn halfwave_mu_4pi(t: f64, q1: ConePoint, q2: ConePoint, h: f64) -> Result<Complex64> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput("halfwave_mu_4pi requires h > 0".into()));
    }
    let eps = Sign::Minus;
    let (p1, p2) = moving_point_frame(q1, q2, eps)?;
    let e = eps.value();
    let integrand = |s: f64| -> Complex64 {
        let (r1, th1) = match shifted_vertex_coords(p1, eps, s) {
            Ok(x) => x,
            Err(_) => return Complex64::new(0.0, 0.0),
        };
        let (r2, th2) = match shifted_vertex_coords(p2, eps, s) {
            Ok(x) => x,
            Err(_) => return Complex64::new(0.0, 0.0),
        };
        let amp = (0.5 * (th1 + th2)).sin() / (r1 * r2).sqrt();
        gaussian_first_moment(r1 + r2 - t, h) * amp
    };
    let roots = moving_roots(p1, p2, eps, t)?;
    let s_far = t + p1.norm() + p2.norm() + 10.0;
    let mut pts = vec![0.0, s_far];
    for &r in &roots {
        for k in [-20.0, -5.0, -1.0, 0.0, 1.0, 5.0, 20.0] {
            let p = r + k * h;
            if p > 0.0 && p < s_far {
                pts.push(p);
            }
        }
    }
    // Kinks of r_j(s) where the moving vertex passes a point's height.
    for p in [p1, p2] {
        let s = -e * p.y;
        if s > 0.0 && s < s_far {
            pts.push(s);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let tol = Tolerance { abs: 1e-12 / (h * h), rel: 1e-10, max_segments: 20000 };
    let near = adaptive(integrand, &pts, tol, "moving-point s integral")?;
    // Tail s in (s_far, inf) with s = s_far / v.
    let tail = adaptive(
        |v: f64| if v <= 0.0 { Complex64::new(0.0, 0.0) } else { integrand(s_far / v) * (s_far / (v * v)) },
        &[0.0, 1.0],
        tol,
        "moving-point tail",
    )?;
    Ok((near + tail) * Complex64::new(0.0, -1.0 / (4.0 * PI * PI)))
}

/// Leading half-wave amplitude a_{alpha,eps,1}(s = 0)
/// = -2 pi i eps S_alpha(theta1 - theta2) (r1 r2)^{-1/2} (sin theta1 + sin theta2).
/// The angles are chart angles and are used as given; the product is
/// regularized where the sine sum cancels a pole.
pub fn hw_leading_amplitude(alpha: ConeAngle, eps: Sign, q1: ConePoint, q2: ConePoint) -> Result<Complex64> {
    if q1.r <= 0.0 || q2.r <= 0.0 {
        return Err(Error::DegeneratePoint);
    }
    let p = sine_sum_product(alpha, q1.theta, q2.theta)?;
    Ok(Complex64::new(0.0, -2.0 * PI * eps.value() * p / (q1.r * q2.r).sqrt()))
}

/// l_{+-1}(t) = (1/(4 pi sqrt r)) delta_h(t - r) exp(-+ i theta/2).
pub fn spherical_wave_l(j: Sign, t: f64, q: ConePoint, h: f64) -> Result<Complex64> {
    if q.r <= 0.0 {
        return Err(Error::DegeneratePoint);
    }
    let amp = mollified_delta(h, t - q.r) / (4.0 * PI * q.r.sqrt());
    Ok(Complex64::from_polar(amp, -j.value() * 0.5 * q.theta))
}

/// Upsilon_0 = (1/(4 pi sqrt(r1 r2))) delta_h(t - r1 - r2) cos((theta1 + theta2)/2 - theta).
pub fn upsilon0(t: f64, q1: ConePoint, q2: ConePoint, dir_theta: f64, h: f64) -> Result<f64> {
    if q1.r <= 0.0 || q2.r <= 0.0 {
        return Err(Error::DegeneratePoint);
    }
    Ok(mollified_delta(h, t - q1.r - q2.r) * (0.5 * (q1.theta + q2.theta) - dir_theta).cos()
        / (4.0 * PI * (q1.r * q2.r).sqrt()))
}

/// Jump of sampled data across `front`: quadratic least-squares fits on
/// [front - outer, front - inner] and [front + inner, front + outer], each
/// extrapolated to the front; returns right minus left.
pub fn jump_estimate(ts: &[f64], vals: &[f64], front: f64, inner: f64, outer: f64) -> Result<f64> {
    if ts.len() != vals.len() || !(0.0 <= inner && inner < outer) {
        return Err(Error::InvalidInput("jump estimate needs matching samples and 0 <= inner < outer".into()));
    }
    let side = |sign: f64| -> Result<f64> {
        let (mut rows, mut rhs) = (Vec::new(), Vec::new());
        for (&t, &v) in ts.iter().zip(vals) {
            let x = sign * (t - front);
            if x >= inner && x <= outer {
                let u = (t - front) / outer;
                rows.extend_from_slice(&[1.0, u, u * u]);
                rhs.push(v);
            }
        }
        if rhs.len() < 4 {
            return Err(Error::InvalidInput("fewer than four samples on one side of the front".into()));
        }
        let a = nalgebra::DMatrix::from_row_slice(rhs.len(), 3, &rows);
        let c = a
            .svd(true, true)
            .solve(&nalgebra::DVector::from_vec(rhs), 1e-14)
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(c[0])
    };
    Ok(side(1.0)? - side(-1.0)?)
}

/// Symmetric evaluation helper used by tests: value with the points swapped.
pub fn swapped_query(q: &KernelQuery) -> KernelQuery {
    q.swapped()
}
