//! Gauss-Legendre and adaptive Gauss-Kronrod quadrature.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

/// Scalar types that can be integrated.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let jf = j as f64;
                    let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = nf * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Composite rule with `panels` equal panels on [a, b].
    pub fn integrate<T: QuadValue>(&self, f: impl Fn(f64) -> T, a: f64, b: f64, panels: usize) -> T {
        let h = (b - a) / panels as f64;
        let mut total = T::default();
        for p in 0..panels {
            let lo = a + h * p as f64;
            let c = lo + 0.5 * h;
            let mut s = T::default();
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                s = s + f(c + 0.5 * h * x) * *w;
            }
            total = total + s * (0.5 * h);
        }
        total
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Abscissae of the 15-point Kronrod rule on [-1, 1] (ascending).
pub fn kronrod15_nodes() -> [f64; 15] {
    let mut x = [0.0; 15];
    for i in 0..7 {
        x[i] = -XGK[i];
        x[14 - i] = XGK[i];
    }
    x
}

/// Returns (Kronrod-15 estimate, Gauss-7 estimate) from the 15 function values at
/// `kronrod15_nodes()` mapped to an interval of half-width `half`.
pub fn gk15_from_values<T: QuadValue>(vals: &[T; 15], half: f64) -> (T, T) {
    let mut k = vals[7] * WGK[7];
    let mut g = vals[7] * WG[3];
    for i in 0..7 {
        let pair = vals[i] + vals[14 - i];
        k = k + pair * WGK[i];
        if i % 2 == 1 {
            g = g + pair * WG[i / 2];
        }
    }
    (k * half, g * half)
}

/// One Gauss-Kronrod 7/15 panel: (integral, error estimate).
pub fn gk15<T: QuadValue>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let nodes = kronrod15_nodes();
    let vals: [T; 15] = std::array::from_fn(|i| f(c + half * nodes[i]));
    let (k, g) = gk15_from_values(&vals, half);
    (k, (k - g).magnitude())
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Tolerances for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_segments: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel, max_segments: 4000 }
    }
}

/// Globally adaptive Gauss-Kronrod integration of `f` over the breakpoints
/// `pts` (ascending, at least two). Returns the integral or `QuadratureFailure`.
pub fn adaptive<T: QuadValue>(f: impl Fn(f64) -> T, pts: &[f64], tol: Tolerance, what: &str) -> Result<T> {
    let mut heap = BinaryHeap::new();
    let mut total = T::default();
    let mut err = 0.0;
    for w in pts.windows(2) {
        if w[1] > w[0] {
            let (v, e) = gk15(&f, w[0], w[1]);
            total = total + v;
            err += e;
            heap.push(Segment { a: w[0], b: w[1], value: v, err: e });
        }
    }
    let mut count = heap.len();
    loop {
        let target = tol.abs.max(tol.rel * total.magnitude());
        if err <= target || heap.is_empty() {
            return Ok(total);
        }
        if count >= tol.max_segments {
            break;
        }
        let s = heap.pop().expect("heap is non-empty");
        let m = 0.5 * (s.a + s.b);
        if !(m > s.a && m < s.b) {
            break;
        }
        let (v1, e1) = gk15(&f, s.a, m);
        let (v2, e2) = gk15(&f, m, s.b);
        total = total - s.value + v1 + v2;
        err += e1 + e2 - s.err;
        heap.push(Segment { a: s.a, b: m, value: v1, err: e1 });
        heap.push(Segment { a: m, b: s.b, value: v2, err: e2 });
        count += 1;
    }
    // Recompute the error sum to remove drift before deciding.
    let err: f64 = heap.iter().map(|s| s.err).sum();
    let total = heap.iter().fold(T::default(), |acc, s| acc + s.value);
    if err <= tol.abs.max(tol.rel * total.magnitude()) {
        Ok(total)
    } else {
        Err(Error::QuadratureFailure { what: what.to_string(), estimate: err })
    }
}
