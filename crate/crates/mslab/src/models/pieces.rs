//! Closed-form building blocks and vector fields for the model catalog.

use crate::geom::angle_in;
use std::f64::consts::{PI, TAU};

/// Radial bump with rho(r) = rho(1/r), vanishing at 0 and infinity.
/// The sign is chosen so that on the invariant circle r = 1 the angular flow
/// attracts to phi = 0, pi and repels from phi = pi/2, 3pi/2; this is what
/// puts the fixed sinks of psi0_bar on the theta-fixed axis and the period-2
/// saddle orbit on the swapped pair.
pub fn rho(r: f64) -> f64 {
    // -sech(ln r) in closed form; analytic at r = 0.
    -2.0 * r / (1.0 + r * r)
}

/// Radial component of the chi field: -r(r-1) on [0,1], 1-r beyond.
pub fn chi_radial(r: f64) -> f64 {
    if r <= 1.0 {
        -r * (r - 1.0)
    } else {
        1.0 - r
    }
}

/// The chi vector field in Cartesian coordinates.
pub fn chi_field(p: [f64; 2]) -> [f64; 2] {
    let [x, y] = p;
    let r2 = x * x + y * y;
    let r = r2.sqrt();
    if r < 1e-12 {
        // linearization at the origin: dr/dt = r, angular term second order
        return [x, y];
    }
    let radial = chi_radial(r) / r;
    // phi' = rho(r) sin 2phi, with sin 2phi = 2xy/r^2
    let ang = rho(r) * 2.0 * x * y / r2;
    [radial * x - ang * y, radial * y + ang * x]
}

/// theta(r, phi) = (r, -phi): reflection in the x-axis.
pub fn theta(p: [f64; 2]) -> [f64; 2] {
    [p[0], -p[1]]
}

/// h(r, phi) = (r/2, phi): the linear sink of section 3.6.
pub fn h_map(p: [f64; 2]) -> [f64; 2] {
    [0.5 * p[0], 0.5 * p[1]]
}

pub fn h_inv(p: [f64; 2]) -> [f64; 2] {
    [2.0 * p[0], 2.0 * p[1]]
}

// ---- the circle / torus family ----------------------------------------------

/// F_bar(x) = x + sin(2 pi x) / (6 pi); strictly increasing, commutes with x+1.
pub fn f_bar_line(x: f64) -> f64 {
    x + (TAU * x).sin() / (6.0 * PI)
}

pub fn f_bar_line_deriv(x: f64) -> f64 {
    1.0 + (TAU * x).cos() / 3.0
}

/// Inverse of F_bar by Newton; the derivative is bounded below by 2/3.
pub fn f_bar_line_inv(y: f64) -> f64 {
    let mut x = y;
    for _ in 0..60 {
        let r = f_bar_line(x) - y;
        if r.abs() < 1e-15 {
            break;
        }
        x -= r / f_bar_line_deriv(x);
    }
    x
}

// ---- the Cherry-box flows of section 3.6 ------------------------------------

/// eta_minus : A_- -> C, (r, phi) |-> (3 - log2 r, 8(phi/pi - 1)).
/// Expects phi in [3pi/4, 5pi/4].
pub fn eta_minus(r: f64, phi: f64) -> [f64; 2] {
    [3.0 - r.log2(), 8.0 * (phi / PI - 1.0)]
}

pub fn eta_minus_inv(x: f64, d: f64) -> (f64, f64) {
    ((3.0 - x).exp2(), PI * (1.0 + d / 8.0))
}

/// eta_plus : A_+ -> C, (r, phi) |-> (-3 - log2 r, 8 phi / pi).
/// Expects phi in [-pi/4, pi/4] (signed).
pub fn eta_plus(r: f64, phi: f64) -> [f64; 2] {
    [-3.0 - r.log2(), 8.0 * phi / PI]
}

pub fn eta_plus_inv(x: f64, d: f64) -> (f64, f64) {
    ((-3.0 - x).exp2(), PI * d / 8.0)
}

fn x_dot(s: f64) -> f64 {
    if s <= 4.0 {
        1.0 - (s - 4.0).powi(2) / 9.0
    } else {
        1.0
    }
}

/// The phi_minus field on the strip C (saddle at (1,0), sink at (-1,0)).
pub fn phi_minus_field(p: [f64; 2]) -> [f64; 2] {
    let [x, d] = p;
    let s = x * x + d * d;
    let dd = if s <= 2.0 {
        -d
    } else if s <= 4.0 {
        0.5 * d * ((0.5 * PI * (s - 3.0)).sin() - 1.0)
    } else {
        0.0
    };
    [x_dot(s), dd]
}

/// The phi_plus field (saddle at (-1,0), source at (1,0)).
pub fn phi_plus_field(p: [f64; 2]) -> [f64; 2] {
    let [x, d] = p;
    let s = x * x + d * d;
    let dd = if s <= 2.0 {
        d
    } else if s <= 4.0 {
        -0.5 * d * ((0.5 * PI * (s - 3.0)).sin() - 1.0)
    } else {
        0.0
    };
    [x_dot(s), dd]
}

/// Sector A_- : 3pi/4 <= phi <= 5pi/4 (closed).
pub fn in_sector_minus(phi: f64) -> bool {
    let a = angle_in(phi);
    (0.75 * PI..=1.25 * PI).contains(&a)
}

/// Sector A_+ : |phi| <= pi/4 (closed).
pub fn in_sector_plus(phi: f64) -> bool {
    let a = angle_in(phi);
    a <= 0.25 * PI || a >= 1.75 * PI
}

/// Signed angle for the A_+ chart: fold [7pi/4, 2pi) to [-pi/4, 0).
pub fn signed_plus_angle(phi: f64) -> f64 {
    let a = angle_in(phi);
    if a >= PI {
        a - TAU
    } else {
        a
    }
}

// ---- Dehn twist --------------------------------------------------------------

/// Twist profile nu: [1,2] -> [1,2], smooth, nu(1) = 1, nu(2) = 2.
/// Extended by its boundary values so the twist is a whole turn (hence the
/// identity) outside the annulus.
pub fn nu(t: f64) -> f64 {
    if t <= 1.0 {
        return 1.0;
    }
    if t >= 2.0 {
        return 2.0;
    }
    let denom = (t - 1.0).powi(2) * (t - 2.0).powi(2);
    let arg = (1.5 - t) / denom;
    if arg > 700.0 {
        1.0
    } else if arg < -700.0 {
        2.0
    } else {
        1.0 + 1.0 / (1.0 + arg.exp())
    }
}

/// Dehn twist of the annulus 1 <= |z| <= 2, a full 2 pi turn across; the
/// identity on both boundary circles and outside the annulus.
pub fn dehn_twist(p: [f64; 2], inverse: bool) -> [f64; 2] {
    let t = (p[0] * p[0] + p[1] * p[1]).sqrt();
    if t < 1e-300 {
        return p;
    }
    let sign = if inverse { -1.0 } else { 1.0 };
    let ang = sign * TAU * nu(t);
    let (s, c) = ang.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1]]
}

// ---- fixed-step integrator ----------------------------------------------------

/// Classical RK4 over total time `t` (may be negative) with approximately
/// |t|/step steps. Deterministic for fixed arguments.
pub fn rk4<F: Fn([f64; 2]) -> [f64; 2]>(field: F, y0: [f64; 2], t: f64, step: f64) -> [f64; 2] {
    let n = (t.abs() / step).round().max(1.0) as usize;
    let h = t / n as f64;
    let mut y = y0;
    for _ in 0..n {
        let k1 = field(y);
        let k2 = field([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = field([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = field([y[0] + h * k3[0], y[1] + h * k3[1]]);
        y[0] += h * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) / 6.0;
        y[1] += h * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) / 6.0;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rho_is_symmetric_under_inversion() {
        let mut r = 0.01;
        while r <= 100.0 {
            assert!((rho(r) - rho(1.0 / r)).abs() <= 1e-12, "r = {r}");
            r *= 1.07;
        }
        assert_eq!(rho(0.0), 0.0);
    }

    #[test]
    fn f_bar_line_monotone_and_periodic() {
        let mut prev = f_bar_line(0.0);
        assert_relative_eq!(prev, 0.0);
        for i in 1..=200 {
            let x = i as f64 / 200.0;
            let y = f_bar_line(x);
            assert!(y > prev, "not increasing at {x}");
            prev = y;
        }
        for &x in &[0.0, 0.31, 0.5, 0.77] {
            assert_relative_eq!(f_bar_line(x + 1.0), f_bar_line(x) + 1.0, epsilon = 1e-12);
        }
        assert_relative_eq!(f_bar_line(0.5), 0.5, epsilon = 1e-15);
        assert_relative_eq!(f_bar_line_deriv(0.0), 4.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(f_bar_line_deriv(0.5), 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn f_bar_inverse_round_trip() {
        for i in 0..40 {
            let x = -1.0 + i as f64 * 0.1;
            let y = f_bar_line(x);
            assert_relative_eq!(f_bar_line_inv(y), x, epsilon = 1e-10);
        }
    }

    #[test]
    fn eta_pinned_values() {
        // eta_-(2, pi) = (2, 0) and eta_+(1/2, 0) = (-2, 0)
        let em = eta_minus(2.0, PI);
        assert_relative_eq!(em[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(em[1], 0.0, epsilon = 1e-12);
        let ep = eta_plus(0.5, 0.0);
        assert_relative_eq!(ep[0], -2.0, epsilon = 1e-12);
        assert_relative_eq!(ep[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn eta_conjugates_h_to_shift() {
        // eta_-(h(p)) = g(eta_-(p)) with g(x,d) = (x+1, d)
        for &(r, phi) in &[(2.0, PI), (7.3, 0.8 * PI), (0.4, 1.2 * PI), (16.0, 1.05 * PI)] {
            let hp = (0.5 * r, phi);
            let lhs = eta_minus(hp.0, hp.1);
            let rhs = eta_minus(r, phi);
            assert_relative_eq!(lhs[0], rhs[0] + 1.0, epsilon = 1e-12);
            assert_relative_eq!(lhs[1], rhs[1], epsilon = 1e-12);
        }
        for &(r, phi) in &[(0.5, 0.0), (2.0, 0.2), (0.01, -0.6)] {
            let lhs = eta_plus(0.5 * r, phi);
            let rhs = eta_plus(r, phi);
            assert_relative_eq!(lhs[0], rhs[0] + 1.0, epsilon = 1e-12);
            assert_relative_eq!(lhs[1], rhs[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn phi_fields_fixed_points() {
        for p in [[1.0, 0.0], [-1.0, 0.0]] {
            let v = phi_minus_field(p);
            assert!(v[0].abs() < 1e-14 && v[1].abs() < 1e-14);
            let v = phi_plus_field(p);
            assert!(v[0].abs() < 1e-14 && v[1].abs() < 1e-14);
        }
    }

    #[test]
    fn phi_fields_match_shift_field_outside() {
        // for |x| >= 2 both fields are (1, 0)
        for &p in &[[2.0, 0.0], [-2.5, 1.0], [3.0, -2.0], [2.0, 2.0]] {
            assert_eq!(phi_minus_field(p), [1.0, 0.0]);
            assert_eq!(phi_plus_field(p), [1.0, 0.0]);
        }
    }

    #[test]
    fn nu_profile_endpoints_and_midpoint() {
        assert_eq!(nu(1.0), 1.0);
        assert_eq!(nu(2.0), 2.0);
        assert_relative_eq!(nu(1.5), 1.5, epsilon = 1e-12);
        assert_eq!(nu(0.2), 1.0);
        assert_eq!(nu(5.0), 2.0);
        // monotone on a sample
        let mut prev = nu(1.0);
        for i in 1..=50 {
            let t = 1.0 + i as f64 / 50.0;
            let v = nu(t);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn dehn_twist_fixes_boundary_and_exterior() {
        for &p in &[[1.0, 0.0], [0.0, 2.0], [0.5, 0.0], [3.0, 1.0]] {
            let q = dehn_twist(p, false);
            assert_relative_eq!(q[0], p[0], epsilon = 1e-9);
            assert_relative_eq!(q[1], p[1], epsilon = 1e-9);
        }
        // interior circles move
        let q = dehn_twist([1.5, 0.0], false);
        assert!((q[0] - 1.5).abs() + q[1].abs() > 0.5);
        // inverse undoes
        let p = [1.3, 0.4];
        let q = dehn_twist(dehn_twist(p, false), true);
        assert_relative_eq!(q[0], p[0], epsilon = 1e-12);
        assert_relative_eq!(q[1], p[1], epsilon = 1e-12);
    }

    #[test]
    fn rk4_exponential_decay_accuracy() {
        // y' = -y over unit time
        let y = rk4(|p| [-p[0], -p[1]], [1.0, 2.0], 1.0, 1e-3);
        assert_relative_eq!(y[0], (-1.0f64).exp(), epsilon = 1e-10);
        assert_relative_eq!(y[1], 2.0 * (-1.0f64).exp(), epsilon = 1e-10);
    }
}
