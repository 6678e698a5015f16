//! Surface points and charts shared by all model maps.
//!
//! Four concrete surfaces appear: the plane (also hosting the circle factor
//! and the annulus), the unit sphere, the flat torus R^2/Z^2 and the
//! projective plane realized as the sphere modulo the antipodal map.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Which surface a point (or a model) lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurfaceKind {
    Plane,
    Circle,
    Sphere,
    Torus,
    Projective,
}

impl SurfaceKind {
    pub fn euler_characteristic(self) -> Option<i64> {
        match self {
            SurfaceKind::Sphere => Some(2),
            SurfaceKind::Torus => Some(0),
            SurfaceKind::Projective => Some(1),
            _ => None,
        }
    }
}

/// A point on one of the supported surfaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfacePoint {
    /// Cartesian plane point.
    Plane { x: f64, y: f64 },
    /// Point of S^1 = R/Z, stored in [0,1).
    Circle { t: f64 },
    /// Point of the unit sphere in R^3.
    Sphere { x: [f64; 3] },
    /// Point of T^2 = R^2/Z^2, coordinates in [0,1).
    Torus { u: f64, v: f64 },
    /// Point of RP^2: a sphere representative, canonicalized on demand.
    Proj { x: [f64; 3] },
}

impl SurfacePoint {
    pub fn plane(x: f64, y: f64) -> Self {
        SurfacePoint::Plane { x, y }
    }

    pub fn polar(r: f64, phi: f64) -> Self {
        SurfacePoint::Plane {
            x: r * phi.cos(),
            y: r * phi.sin(),
        }
    }

    pub fn circle(t: f64) -> Self {
        SurfacePoint::Circle { t: wrap_unit(t) }
    }

    pub fn sphere(x: [f64; 3]) -> Self {
        SurfacePoint::Sphere { x: normalize3(x) }
    }

    pub fn torus(u: f64, v: f64) -> Self {
        SurfacePoint::Torus {
            u: wrap_unit(u),
            v: wrap_unit(v),
        }
    }

    pub fn proj(x: [f64; 3]) -> Self {
        SurfacePoint::Proj {
            x: proj_canonical(normalize3(x)),
        }
    }

    pub fn kind(&self) -> SurfaceKind {
        match self {
            SurfacePoint::Plane { .. } => SurfaceKind::Plane,
            SurfacePoint::Circle { .. } => SurfaceKind::Circle,
            SurfacePoint::Sphere { .. } => SurfaceKind::Sphere,
            SurfacePoint::Torus { .. } => SurfaceKind::Torus,
            SurfacePoint::Proj { .. } => SurfaceKind::Projective,
        }
    }

    /// Polar view of a plane point; phi in [0, 2pi).
    pub fn to_polar(&self) -> Option<(f64, f64)> {
        match self {
            SurfacePoint::Plane { x, y } => {
                let r = (x * x + y * y).sqrt();
                let mut phi = y.atan2(*x);
                if phi < 0.0 {
                    phi += TAU;
                }
                Some((r, phi))
            }
            _ => None,
        }
    }

    /// Intrinsic-ish distance used for deduplication and limit detection.
    /// Chordal on the sphere, quotient metric on torus and RP^2.
    pub fn dist(&self, other: &SurfacePoint) -> f64 {
        match (self, other) {
            (SurfacePoint::Plane { x: ax, y: ay }, SurfacePoint::Plane { x: bx, y: by }) => {
                ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt()
            }
            (SurfacePoint::Circle { t: a }, SurfacePoint::Circle { t: b }) => {
                let d = (a - b).abs();
                d.min(1.0 - d)
            }
            (SurfacePoint::Sphere { x: a }, SurfacePoint::Sphere { x: b }) => dist3(*a, *b),
            (SurfacePoint::Torus { u: au, v: av }, SurfacePoint::Torus { u: bu, v: bv }) => {
                let du = (au - bu).abs();
                let dv = (av - bv).abs();
                let du = du.min(1.0 - du);
                let dv = dv.min(1.0 - dv);
                (du * du + dv * dv).sqrt()
            }
            (SurfacePoint::Proj { x: a }, SurfacePoint::Proj { x: b }) => {
                dist3(*a, *b).min(dist3(*a, neg3(*b)))
            }
            _ => f64::INFINITY,
        }
    }
}

pub fn wrap_unit(t: f64) -> f64 {
    let r = t - t.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

pub fn normalize3(x: [f64; 3]) -> [f64; 3] {
    let n = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    [x[0] / n, x[1] / n, x[2] / n]
}

pub fn neg3(x: [f64; 3]) -> [f64; 3] {
    [-x[0], -x[1], -x[2]]
}

pub fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Canonical representative of +/- x: positive x3, or x3 = 0 and positive x2,
/// or (1,0,0). Ties are broken with a small dead band so that points on the
/// equator coming from numerics do not flip-flop; callers that need a
/// continuous lift track signs themselves.
pub fn proj_canonical(x: [f64; 3]) -> [f64; 3] {
    const EPS: f64 = 1e-13;
    if x[2] > EPS {
        x
    } else if x[2] < -EPS {
        neg3(x)
    } else if x[1] > EPS {
        x
    } else if x[1] < -EPS {
        neg3(x)
    } else if x[0] >= 0.0 {
        x
    } else {
        neg3(x)
    }
}

/// True when `x` already is the canonical representative.
pub fn proj_is_canonical(x: [f64; 3]) -> bool {
    dist3(x, proj_canonical(x)) < 1e-9
}

// ---- stereographic charts --------------------------------------------------

/// Stereographic chart of the sphere. `FromNorth` maps S^2\{N} to the plane,
/// `FromSouth` maps S^2\{S}. The south chart is mirrored in y so that both
/// charts induce the same orientation on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereChart {
    FromNorth,
    FromSouth,
}

impl SphereChart {
    /// Chart singular point.
    pub fn pole(self) -> [f64; 3] {
        match self {
            SphereChart::FromNorth => [0.0, 0.0, 1.0],
            SphereChart::FromSouth => [0.0, 0.0, -1.0],
        }
    }

    pub fn project(self, x: [f64; 3]) -> (f64, f64) {
        match self {
            SphereChart::FromNorth => (x[0] / (1.0 - x[2]), x[1] / (1.0 - x[2])),
            SphereChart::FromSouth => (x[0] / (1.0 + x[2]), -x[1] / (1.0 + x[2])),
        }
    }

    pub fn unproject(self, p: (f64, f64)) -> [f64; 3] {
        let (u, v) = p;
        let r2 = u * u + v * v;
        let s = 1.0 / (1.0 + r2);
        match self {
            SphereChart::FromNorth => [2.0 * u * s, 2.0 * v * s, (r2 - 1.0) * s],
            SphereChart::FromSouth => [2.0 * u * s, -2.0 * v * s, (1.0 - r2) * s],
        }
    }

    /// Pick the chart whose singular point is farther from x.
    pub fn best_for(x: [f64; 3]) -> SphereChart {
        if x[2] <= 0.0 {
            SphereChart::FromNorth
        } else {
            SphereChart::FromSouth
        }
    }

    /// Chordal distance from the chart's singular point.
    pub fn pole_distance(self, x: [f64; 3]) -> f64 {
        dist3(x, self.pole())
    }
}

/// The stereographic projection from the north pole used by the sphere
/// models (the map called theta-with-a-hat in local code: x -> x/(1-x3)).
pub fn stereo_n(x: [f64; 3]) -> (f64, f64) {
    SphereChart::FromNorth.project(x)
}

pub fn stereo_n_inv(p: (f64, f64)) -> [f64; 3] {
    SphereChart::FromNorth.unproject(p)
}

pub fn angle_in(phi: f64) -> f64 {
    let mut a = phi % TAU;
    if a < 0.0 {
        a += TAU;
    }
    a
}

/// Signed angular difference a-b folded into (-pi, pi].
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let mut d = (a - b) % TAU;
    if d <= -PI {
        d += TAU;
    }
    if d > PI {
        d -= TAU;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polar_cartesian_round_trip() {
        for &(r, phi) in &[(0.5, 0.3), (2.0, 4.0), (17.0, 6.0), (0.01, 1.0), (100.0, 2.2)] {
            let p = SurfacePoint::polar(r, phi);
            let (r2, phi2) = p.to_polar().unwrap();
            assert_relative_eq!(r, r2, max_relative = 1e-12);
            assert!(angle_diff(phi, phi2).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_charts_are_inverse_pairs() {
        let pts = [
            [0.3, -0.4, 0.866025],
            [0.0, 1.0, 0.0],
            [0.6, 0.0, -0.8],
            [-0.2, 0.9, 0.387298],
        ];
        for x in pts {
            let x = normalize3(x);
            for chart in [SphereChart::FromNorth, SphereChart::FromSouth] {
                if chart.pole_distance(x) < 1e-6 {
                    continue;
                }
                let y = chart.unproject(chart.project(x));
                assert!(dist3(x, y) < 1e-10);
            }
        }
    }

    #[test]
    fn chart_transition_preserves_orientation() {
        // The transition FromSouth o FromNorth^{-1} must have positive
        // Jacobian determinant wherever defined.
        let h = 1e-6;
        for &(u, v) in &[(1.0, 0.5), (-0.7, 2.0), (0.3, -0.2)] {
            let f = |u: f64, v: f64| SphereChart::FromSouth.project(stereo_n_inv((u, v)));
            let (fx0, fy0) = f(u, v);
            let (fx1, fy1) = f(u + h, v);
            let (fx2, fy2) = f(u, v + h);
            let det = (fx1 - fx0) * (fy2 - fy0) - (fx2 - fx0) * (fy1 - fy0);
            assert!(det > 0.0, "transition determinant {det} not positive");
        }
    }

    #[test]
    fn canonical_is_antipodal_invariant() {
        let pts = [[0.1, 0.2, 0.97], [0.5, -0.5, 0.0], [1.0, 0.0, 0.0], [0.0, -1.0, 0.0]];
        for x in pts {
            let x = normalize3(x);
            assert!(dist3(proj_canonical(x), proj_canonical(neg3(x))) < 1e-12);
        }
    }

    #[test]
    fn torus_coordinates_reduce_mod_one() {
        let p = SurfacePoint::torus(1.25, -0.25);
        match p {
            SurfacePoint::Torus { u, v } => {
                assert_relative_eq!(u, 0.25, max_relative = 1e-12);
                assert_relative_eq!(v, 0.75, max_relative = 1e-12);
            }
            _ => unreachable!(),
        }
    }
}
