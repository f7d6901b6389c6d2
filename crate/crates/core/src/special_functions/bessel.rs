//! Bessel functions of the first kind for real order and argument.
//!
//! Single values use the continued-fraction method of Steed (x >= 2) or the
//! Temme series (x < 2) for the order reduced to [-1/2, 1/2], combined with
//! Miller's downward recurrence. Ladders `J_{mu+n}(x)`, n = 0..N, share one
//! downward recurrence and are normalized through the Wronskian.

use std::f64::consts::PI;

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAXIT: usize = 1_000_000;
const BIG: f64 = 1e250;

/// Coefficients of 1/Gamma(1+z) = sum c_k z^(k-1).
const RGAM: [f64; 26] = [
    1.0,
    0.5772156649015328606,
    -0.6558780715202538811,
    -0.0420026350340952355,
    0.1665386113822914895,
    -0.0421977345555443367,
    -0.0096219715278769736,
    0.0072189432466630995,
    -0.0011651675918590651,
    -0.0002152416741149510,
    0.0001280502823881162,
    -0.0000201348547807882,
    -0.0000012504934821427,
    0.0000011330272319817,
    -0.0000002056338416978,
    0.0000000061160951045,
    0.0000000050020076445,
    -0.0000000011812745705,
    0.0000000001043426712,
    0.0000000000077822634,
    -0.0000000000036968056,
    0.0000000000005100370,
    -0.0000000000000205833,
    -0.0000000000000053481,
    0.0000000000000012268,
    -0.0000000000000001181,
];

/// Temme's auxiliary gamma quantities for |mu| <= 1/2:
/// (gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu)).
pub(crate) fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let m2 = mu * mu;
    let mut even = 0.0;
    let mut odd = 0.0;
    for k in (0..RGAM.len()).rev() {
        if k % 2 == 1 {
            even = even * m2 + RGAM[k];
        } else {
            odd = odd * m2 + RGAM[k];
        }
    }
    // 1/Gamma(1+mu) = odd + mu*even, 1/Gamma(1-mu) = odd - mu*even.
    let gam1 = -even;
    let gam2 = odd;
    (gam1, gam2, odd + mu * even, odd - mu * even)
}

/// Continued fraction CF1 for J'_nu(x)/J_nu(x); returns (ratio, sign of the
/// unnormalized J that the recurrence seeds with).
fn cf1(nu: f64, x: f64) -> (f64, f64) {
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let mut isign = 1.0;
    let mut h = nu * xi;
    if h.abs() < FPMIN {
        h = FPMIN;
    }
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() <= EPS {
            break;
        }
    }
    (h, isign)
}

/// Normalization factor `c` such that `c * (j, jp)` equals `(J_mu, J'_mu)`,
/// given an unnormalized pair `(j, jp)` proportional to them, |mu| <= 1/2
/// when `x < 2`.
fn normalization(mu: f64, x: f64, j: f64, jp: f64) -> f64 {
    let xi = 1.0 / x;
    let w = xi * 2.0 / PI;
    if x < 2.0 {
        let (y, yp) = temme_y(mu, x);
        w / (j * yp - jp * y)
    } else {
        let (p, q) = cf2(mu, x);
        let f = jp / j;
        (w * q / ((p - f).powi(2) + q * q)).sqrt() / j.abs()
    }
}

/// Y_mu(x) and Y'_mu(x) from the Temme series, |mu| <= 1/2, 0 < x < 2.
fn temme_y(mu: f64, x: f64) -> (f64, f64) {
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let mu2 = mu * mu;
    let x2 = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
    let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
    let mut ff = 2.0 / PI * fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let ee = e.exp();
    let mut p = ee / (gampl * PI);
    let mut q = 1.0 / (ee * PI * gammi);
    let pimu2 = 0.5 * pimu;
    let fact3 = if pimu2.abs() < EPS { 1.0 } else { pimu2.sin() / pimu2 };
    let r = PI * pimu2 * fact3 * fact3;
    let mut c = 1.0;
    let dd = -x2 * x2;
    let mut sum = ff + r * q;
    let mut sum1 = p;
    for i in 1..MAXIT {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * (ff + r * q);
        sum += del;
        let del1 = c * p - fi * del;
        sum1 += del1;
        if del.abs() < (1.0 + sum.abs()) * EPS {
            break;
        }
    }
    let ymu = -sum;
    let y1 = -sum1 * xi2;
    let ymup = mu * xi * ymu - y1;
    (ymu, ymup)
}

/// Steed's CF2: p + i q = (J' + i Y')/(J + i Y) at order mu, x >= 2.
fn cf2(mu: f64, x: f64) -> (f64, f64) {
    let xi = 1.0 / x;
    let mut a = 0.25 - mu * mu;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fact = a * xi / (p * p + q * q);
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    for i in 1..MAXIT {
        a += 2.0 * i as f64;
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di /= -den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() <= EPS {
            break;
        }
    }
    (p, q)
}

/// Hankel asymptotic expansion; `None` if it does not reach full precision.
fn hankel(nu: f64, x: f64) -> Option<f64> {
    let m = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        term *= (m - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        if term.abs() > last {
            return None;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            let chi = x - (0.5 * nu + 0.25) * PI;
            return Some((2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin()));
        }
    }
    None
}

/// Bessel function J_nu(x) for nu >= 0, x >= 0.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    assert!(nu >= 0.0 && x >= 0.0, "bessel_j requires nu >= 0 and x >= 0");
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if x > 25.0 && x > 2.0 * nu * nu {
        if let Some(v) = hankel(nu, x) {
            return v;
        }
    }
    let nl = if x < 2.0 {
        (nu + 0.5).floor() as usize
    } else {
        (nu - x + 1.5).floor().max(0.0) as usize
    };
    let mu = nu - nl as f64;
    let (h, isign) = cf1(nu, x);
    let xi = 1.0 / x;
    let mut jl = isign * FPMIN;
    let mut jpl = h * jl;
    let j_top = jl;
    let mut fact = nu * xi;
    let mut scale = 1.0;
    for _ in 0..nl {
        let jtemp = fact * jl + jpl;
        fact -= xi;
        jpl = fact * jtemp - jl;
        jl = jtemp;
        if jl.abs() > BIG {
            jl /= BIG;
            jpl /= BIG;
            scale /= BIG;
        }
    }
    if jl == 0.0 && jpl == 0.0 {
        jl = EPS;
    }
    let c = normalization(mu, x, jl, jpl);
    j_top * scale * c
}

/// J_{mu+n}(x) for n = 0..=n_max with 0 <= mu < 1, by one downward recurrence.
/// Orders far above x (where J underflows relative to the low orders) are set to zero.
pub fn bessel_j_ladder(mu: f64, n_max: usize, x: f64) -> Vec<f64> {
    assert!((0.0..1.0).contains(&mu) && x >= 0.0);
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        if mu == 0.0 {
            out[0] = 1.0;
        }
        return out;
    }
    // Reduce the base order to [-1/2, 1/2] for the Temme branch.
    let shift = usize::from(mu > 0.5);
    let base = mu - shift as f64;
    let cap = x + 30.0 * x.cbrt() + 40.0;
    let top = ((cap - base).ceil().max(0.0) as usize).min(n_max + shift);
    let nu_top = base + top as f64;
    let xi = 1.0 / x;
    let (h, isign) = if nu_top > 0.0 { cf1(nu_top, x) } else { cf1(0.0, x) };
    let mut jl = isign * 1e-30;
    let mut jpl = h * jl;
    // buf[k] holds the unnormalized value at order base + k.
    let mut buf = vec![0.0; top + 1];
    buf[top] = jl;
    let mut fact = nu_top * xi;
    for k in (0..top).rev() {
        let jtemp = fact * jl + jpl;
        fact -= xi;
        jpl = fact * jtemp - jl;
        jl = jtemp;
        buf[k] = jl;
        if jl.abs() > BIG {
            for v in &mut buf[k..=top] {
                *v /= BIG;
            }
            jl /= BIG;
            jpl /= BIG;
        }
    }
    let c = normalization(base, x, jl, jpl);
    for n in 0..=n_max {
        let k = n + shift;
        if k <= top {
            out[n] = buf[k] * c;
        }
    }
    out
}
