//! Roots of a convex function on a bounded interval.

use crate::error::{Error, Result};

const SAMPLES: usize = 257;

/// Bisection to full floating-point resolution on a sign-changing bracket.
pub fn bisect(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ga = g(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm > 0.0) == (ga > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Golden-section minimization of a convex function on [a, b].
fn golden_min(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    0.5 * (a + b)
}

/// All roots of `g` on [0, s_max], assuming `g` is convex there (checked on a
/// sample grid; `NotConvex` otherwise). Returns zero, one or two roots in
/// ascending order, each to within a few ulps of the true root.
pub fn find_roots_convex(g: impl Fn(f64) -> f64, s_max: f64) -> Result<Vec<f64>> {
    if !(s_max > 0.0) {
        return Err(Error::InvalidInput("s_max must be positive".into()));
    }
    let ds = s_max / (SAMPLES - 1) as f64;
    let vals: Vec<f64> = (0..SAMPLES).map(|i| g(ds * i as f64)).collect();
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())) + 1.0;
    for w in vals.windows(3) {
        if w[0] - 2.0 * w[1] + w[2] < -1e-9 * scale {
            return Err(Error::NotConvex);
        }
    }
    let imin = (0..SAMPLES).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).expect("samples");
    let lo = ds * imin.saturating_sub(1) as f64;
    let hi = (ds * (imin + 1) as f64).min(s_max);
    let smin = golden_min(&g, lo, hi);
    let gmin = g(smin);
    let mut roots = Vec::new();
    if gmin > 0.0 {
        return Ok(roots);
    }
    if gmin == 0.0 {
        roots.push(smin);
        return Ok(roots);
    }
    if vals[0] >= 0.0 {
        roots.push(if vals[0] == 0.0 { 0.0 } else { bisect(&g, 0.0, smin) });
    }
    if vals[SAMPLES - 1] >= 0.0 {
        roots.push(if vals[SAMPLES - 1] == 0.0 { s_max } else { bisect(&g, smin, s_max) });
    }
    Ok(roots)
}
