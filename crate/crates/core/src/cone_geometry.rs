//! Geometry of the Euclidean cone C_alpha = (R_+ x R/alpha Z, dr^2 + r^2 dtheta^2)
//! and of the planar charts obtained by cutting along a ray.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Tolerance used when classifying angles against the diffraction poles.
pub const ANGLE_TOL: f64 = 1e-9;

/// Total cone angle, validated positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ConeAngle(f64);

impl ConeAngle {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha.is_finite() {
            Ok(ConeAngle(alpha))
        } else {
            Err(Error::InvalidInput(format!("cone angle must be positive and finite, got {alpha}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Reduces an angle to [0, alpha).
    pub fn reduce(self, theta: f64) -> f64 {
        let t = theta.rem_euclid(self.0);
        if t >= self.0 {
            0.0
        } else {
            t
        }
    }
}

impl TryFrom<f64> for ConeAngle {
    type Error = Error;
    fn try_from(a: f64) -> Result<Self> {
        ConeAngle::new(a)
    }
}

impl From<ConeAngle> for f64 {
    fn from(a: ConeAngle) -> f64 {
        a.0
    }
}

/// Point of a cone in polar coordinates, with `theta` stored in [0, alpha).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub r: f64,
    pub theta: f64,
}

impl ConePoint {
    pub fn new(alpha: ConeAngle, r: f64, theta: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidInput(format!("invalid cone point (r={r}, theta={theta})")));
        }
        Ok(ConePoint { r, theta: alpha.reduce(theta) })
    }
}

/// Point of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub fn new(x: f64, y: f64) -> Self {
        PlanarPoint { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn sub(self, o: PlanarPoint) -> PlanarPoint {
        PlanarPoint::new(self.x - o.x, self.y - o.y)
    }

    pub fn dist(self, o: PlanarPoint) -> f64 {
        self.sub(o).norm()
    }
}

/// Side of the cut, `Plus` for epsilon = +1 and `Minus` for epsilon = -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl TryFrom<i32> for Sign {
    type Error = Error;
    fn try_from(v: i32) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::InvalidInput(format!("sign must be +1 or -1, got {v}"))),
        }
    }
}

impl From<Sign> for i32 {
    fn from(s: Sign) -> i32 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// Angular separation min_k |theta1 - theta2 + k alpha|, in [0, alpha/2].
pub fn angular_separation(alpha: ConeAngle, theta1: f64, theta2: f64) -> f64 {
    let a = alpha.value();
    let d = (theta1 - theta2).rem_euclid(a);
    d.min(a - d).max(0.0)
}

/// Geodesic distance on C_alpha.
pub fn cone_distance(alpha: ConeAngle, q1: ConePoint, q2: ConePoint) -> f64 {
    if q1.r == 0.0 || q2.r == 0.0 {
        return q1.r + q2.r;
    }
    let sep = angular_separation(alpha, q1.theta, q2.theta);
    if sep >= PI {
        q1.r + q2.r
    } else {
        // (r1 - r2)^2 + 4 r1 r2 sin^2(sep/2) avoids cancellation for nearby points.
        ((q1.r - q2.r).powi(2) + 4.0 * q1.r * q2.r * (0.5 * sep).sin().powi(2)).sqrt()
    }
}

/// Polar angle of a planar vector in the branch of the epsilon chart:
/// (-3pi/2, pi/2] for epsilon = +1 and [-pi/2, 3pi/2) for epsilon = -1.
pub fn chart_angle(eps: Sign, v: PlanarPoint) -> f64 {
    let a = v.y.atan2(v.x);
    match eps {
        Sign::Plus if a > PI / 2.0 => a - 2.0 * PI,
        Sign::Minus if a < -PI / 2.0 => a + 2.0 * PI,
        _ => a,
    }
}

fn on_cut(eps: Sign, v: PlanarPoint) -> bool {
    v.x == 0.0 && v.y * eps.value() > 0.0
}

/// Develops a cone point into the epsilon chart: the ray theta = 0 maps to the
/// positive x-axis, the cut is {(0, eps y) : y > 0}. The representative of
/// theta modulo alpha closest to the direction opposite the cut is used.
pub fn develop(alpha: ConeAngle, eps: Sign, q: ConePoint) -> Result<PlanarPoint> {
    let a = alpha.value();
    let centre = -eps.value() * PI / 2.0;
    let k = ((centre - q.theta) / a).round();
    let th = q.theta + k * a;
    if (th - centre).abs() >= PI - ANGLE_TOL {
        return Err(Error::PointOnCut(format!("theta = {} is not inside the chart", q.theta)));
    }
    Ok(PlanarPoint::new(q.r * th.cos(), q.r * th.sin()))
}

/// Polar coordinates of `q` about the shifted vertex p(s) = (0, -eps s), with
/// the angle in the epsilon branch.
pub fn shifted_vertex_coords(q: PlanarPoint, eps: Sign, s: f64) -> Result<(f64, f64)> {
    let v = PlanarPoint::new(q.x, q.y + eps.value() * s);
    let r = v.norm();
    if r == 0.0 {
        return Err(Error::DegeneratePoint);
    }
    if on_cut(eps, v) {
        return Err(Error::PointOnCut("point lies on the cut through the shifted vertex".into()));
    }
    Ok((r, chart_angle(eps, v)))
}

/// Classification of an (incoming, outgoing) direction pair at the vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RayClass {
    Geometric,
    Diffractive,
}

/// Geometric when the angle difference is congruent to +-pi modulo alpha.
pub fn classify_ray(alpha: ConeAngle, delta_theta: f64) -> RayClass {
    let a = alpha.value();
    let near = |c: f64| {
        let d = (delta_theta - c).rem_euclid(a);
        d.min(a - d) < ANGLE_TOL
    };
    if near(PI) || near(-PI) {
        RayClass::Geometric
    } else {
        RayClass::Diffractive
    }
}

/// Two cones joined along a geodesic, with the base legs of lengths a, b, c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeChain {
    pub alpha1: ConeAngle,
    pub alpha2: ConeAngle,
    pub eps1: Sign,
    pub eps2: Sign,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ConeChain {
    pub fn validate(&self) -> Result<()> {
        for l in [self.a, self.b, self.c] {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::BadLeg);
            }
        }
        Ok(())
    }
}

/// A ray {origin + s direction : s > 0}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub origin: PlanarPoint,
    pub direction: PlanarPoint,
}

/// Planar frame of a cone chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainFrame {
    pub q1_star: PlanarPoint,
    pub q2_star: PlanarPoint,
    pub p1: PlanarPoint,
    pub p2: PlanarPoint,
    pub cut1: Ray,
    pub cut2: Ray,
}

/// Places q2* = (-a, 0), p2 = (0, 0), p1 = (b, 0), q1* = (b + c, 0) with cuts
/// (0, eps2 R_+) and (b, eps1 R_+).
pub fn chain_frame(chain: &ConeChain) -> Result<ChainFrame> {
    chain.validate()?;
    let p1 = PlanarPoint::new(chain.b, 0.0);
    let p2 = PlanarPoint::new(0.0, 0.0);
    Ok(ChainFrame {
        q1_star: PlanarPoint::new(chain.b + chain.c, 0.0),
        q2_star: PlanarPoint::new(-chain.a, 0.0),
        p1,
        p2,
        cut1: Ray { origin: p1, direction: PlanarPoint::new(0.0, chain.eps1.value()) },
        cut2: Ray { origin: p2, direction: PlanarPoint::new(0.0, chain.eps2.value()) },
    })
}
