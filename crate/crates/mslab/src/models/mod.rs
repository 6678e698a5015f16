//! The model diffeomorphism catalog: every base construction realized as an
//! evaluatable map on a concrete chart, with inverses and finite-difference
//! Jacobians.

pub mod pieces;

use crate::geom::{
    angle_in, dist3, neg3, proj_canonical, stereo_n, stereo_n_inv, SphereChart, SurfaceKind,
    SurfacePoint,
};
use pieces::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("evaluation produced a non-finite value")]
    NonFinite,
    #[error("point lives on {found:?} but the model is defined on {expected:?}")]
    ChartMismatch {
        expected: SurfaceKind,
        found: SurfaceKind,
    },
    #[error("no admissible chart at this point")]
    ChartSingularity,
    #[error("unknown model id `{0}`")]
    UnknownModel(String),
}

/// Evaluation rule of a catalog entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    Chi,
    Theta,
    Psi0Bar,
    Psi0,
    PsiTilde1,
    FCircle,
    F1Torus,
    AHat,
    Psi1,
    HPlane,
    PhiMinus,
    PhiPlus,
    FBar,
    DehnTwist,
    Xi0Bar,
    Xi0,
}

/// An evaluatable model diffeomorphism.
#[derive(Debug, Clone)]
pub struct ModelMap {
    id: &'static str,
    surface: SurfaceKind,
    rule: Rule,
    flow_based: bool,
    step: f64,
}

/// Default integration step for time-1 maps of the named vector fields.
pub const DEFAULT_STEP: f64 = 1e-3;

impl ModelMap {
    pub fn id(&self) -> &'static str {
        self.id
    }

    pub fn surface(&self) -> SurfaceKind {
        self.surface
    }

    pub fn flow_based(&self) -> bool {
        self.flow_based
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    /// Look a model up by its stable identifier.
    pub fn by_id(id: &str) -> Result<ModelMap, ModelError> {
        model_catalog()
            .into_iter()
            .find(|m| m.id == id)
            .ok_or_else(|| ModelError::UnknownModel(id.to_string()))
    }

    pub fn eval(&self, p: &SurfacePoint) -> Result<SurfacePoint, ModelError> {
        self.apply(p, false)
    }

    pub fn eval_inverse(&self, p: &SurfacePoint) -> Result<SurfacePoint, ModelError> {
        self.apply(p, true)
    }

    fn apply(&self, p: &SurfacePoint, inv: bool) -> Result<SurfacePoint, ModelError> {
        if p.kind() != self.surface {
            return Err(ModelError::ChartMismatch {
                expected: self.surface,
                found: p.kind(),
            });
        }
        let out = match (self.rule, p) {
            (Rule::Chi, SurfacePoint::Plane { x, y }) => {
                SurfacePoint::plane_from(self.plane_map([*x, *y], Rule::Chi, inv))
            }
            (Rule::Theta, SurfacePoint::Plane { x, y }) => {
                SurfacePoint::plane_from(theta([*x, *y]))
            }
            (Rule::Psi0Bar, SurfacePoint::Plane { x, y }) => {
                SurfacePoint::plane_from(self.plane_map([*x, *y], Rule::Psi0Bar, inv))
            }
            (Rule::HPlane, SurfacePoint::Plane { x, y }) => {
                SurfacePoint::plane_from(if inv { h_inv([*x, *y]) } else { h_map([*x, *y]) })
            }
            (Rule::PhiMinus, SurfacePoint::Plane { x, y }) => SurfacePoint::plane_from(rk4(
                phi_minus_field,
                [*x, *y],
                if inv { -1.0 } else { 1.0 },
                self.step,
            )),
            (Rule::PhiPlus, SurfacePoint::Plane { x, y }) => SurfacePoint::plane_from(rk4(
                phi_plus_field,
                [*x, *y],
                if inv { -1.0 } else { 1.0 },
                self.step,
            )),
            (Rule::FBar, SurfacePoint::Plane { x, y }) => {
                SurfacePoint::plane_from(self.f_bar_plane([*x, *y], inv))
            }
            (Rule::DehnTwist, SurfacePoint::Plane { x, y }) => {
                SurfacePoint::plane_from(dehn_twist([*x, *y], inv))
            }
            (Rule::Xi0Bar, SurfacePoint::Plane { x, y }) => {
                SurfacePoint::plane_from(self.plane_map([*x, *y], Rule::Xi0Bar, inv))
            }
            (Rule::FCircle, SurfacePoint::Circle { t }) => SurfacePoint::circle(if inv {
                f_bar_line_inv(*t)
            } else {
                f_bar_line(*t)
            }),
            (Rule::F1Torus, SurfacePoint::Torus { u, v }) => {
                if inv {
                    SurfacePoint::torus(f_bar_line_inv(*u), f_bar_line_inv(*v))
                } else {
                    SurfacePoint::torus(f_bar_line(*u), f_bar_line(*v))
                }
            }
            (Rule::AHat, SurfacePoint::Torus { u, v }) => SurfacePoint::torus(*v, *u),
            (Rule::Psi1, SurfacePoint::Torus { u, v }) => {
                if inv {
                    // psi1^{-1} = F1^{-1} o A_hat
                    SurfacePoint::torus(f_bar_line_inv(*v), f_bar_line_inv(*u))
                } else {
                    // psi1 = A_hat o F1
                    SurfacePoint::torus(f_bar_line(*v), f_bar_line(*u))
                }
            }
            (Rule::Psi0, SurfacePoint::Sphere { x }) => {
                SurfacePoint::Sphere { x: self.sphere_lift(*x, Rule::Psi0Bar, inv)? }
            }
            (Rule::Xi0, SurfacePoint::Sphere { x }) => {
                SurfacePoint::Sphere { x: self.sphere_lift(*x, Rule::Xi0Bar, inv)? }
            }
            (Rule::PsiTilde1, SurfacePoint::Proj { x }) => SurfacePoint::Proj {
                x: proj_canonical(self.sphere_lift(*x, Rule::Psi0Bar, inv)?),
            },
            _ => {
                return Err(ModelError::ChartMismatch {
                    expected: self.surface,
                    found: p.kind(),
                })
            }
        };
        match &out {
            SurfacePoint::Plane { x, y } if !(x.is_finite() && y.is_finite()) => {
                Err(ModelError::NonFinite)
            }
            SurfacePoint::Sphere { x } | SurfacePoint::Proj { x }
                if !x.iter().all(|c| c.is_finite()) =>
            {
                Err(ModelError::NonFinite)
            }
            _ => Ok(out),
        }
    }

    /// Composite plane maps. `Psi0Bar = theta o chi`, `Xi0Bar = dehn o f_bar`.
    fn plane_map(&self, p: [f64; 2], rule: Rule, inv: bool) -> [f64; 2] {
        match (rule, inv) {
            (Rule::Chi, false) => rk4(chi_field, p, 1.0, self.step),
            (Rule::Chi, true) => rk4(chi_field, p, -1.0, self.step),
            (Rule::Psi0Bar, false) => theta(rk4(chi_field, p, 1.0, self.step)),
            (Rule::Psi0Bar, true) => rk4(chi_field, theta(p), -1.0, self.step),
            (Rule::Xi0Bar, false) => dehn_twist(self.f_bar_plane(p, false), false),
            (Rule::Xi0Bar, true) => self.f_bar_plane(dehn_twist(p, true), true),
            _ => unreachable!(),
        }
    }

    /// The piecewise map f_bar: h outside the sectors, the conjugated Cherry
    /// flows inside them. Sectors are closed; on their boundary rays both
    /// branches agree.
    fn f_bar_plane(&self, p: [f64; 2], inv: bool) -> [f64; 2] {
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        if r < 1e-300 {
            return [0.0, 0.0];
        }
        let phi = angle_in(p[1].atan2(p[0]));
        let t = if inv { -1.0 } else { 1.0 };
        if in_sector_minus(phi) {
            let c = eta_minus(r, phi);
            let c1 = rk4(phi_minus_field, c, t, self.step);
            let (r1, phi1) = eta_minus_inv(c1[0], c1[1]);
            [r1 * phi1.cos(), r1 * phi1.sin()]
        } else if in_sector_plus(phi) {
            let c = eta_plus(r, signed_plus_angle(phi));
            let c1 = rk4(phi_plus_field, c, t, self.step);
            let (r1, phi1) = eta_plus_inv(c1[0], c1[1]);
            [r1 * phi1.cos(), r1 * phi1.sin()]
        } else if inv {
            h_inv(p)
        } else {
            h_map(p)
        }
    }

    /// Conjugate a plane rule by the stereographic projection, fixing the
    /// north pole. Points in the north polar cap of psi0 are routed through
    /// the antipode using the equivariance of psi0_bar.
    fn sphere_lift(&self, x: [f64; 3], plane_rule: Rule, inv: bool) -> Result<[f64; 3], ModelError> {
        let north = [0.0, 0.0, 1.0];
        if dist3(x, north) < 1e-9 {
            return Ok(north);
        }
        if plane_rule == Rule::Psi0Bar && x[2] > 0.999_999 {
            // psi0_bar commutes with the antipodal map; evaluate at -x.
            return Ok(neg3(self.sphere_lift(neg3(x), plane_rule, inv)?));
        }
        let (u, v) = stereo_n(x);
        let q = self.plane_map([u, v], plane_rule, inv);
        if !(q[0].is_finite() && q[1].is_finite()) {
            return Err(ModelError::NonFinite);
        }
        Ok(stereo_n_inv((q[0], q[1])))
    }

    /// Central finite-difference Jacobian in a local chart at `p`.
    pub fn jacobian(&self, p: &SurfacePoint, h: f64) -> Result<[[f64; 2]; 2], ModelError> {
        let chart = LocalChart::at(p)?;
        fd_jacobian(&chart, p, h, |q| self.eval(q))
    }
}

/// Central finite-difference Jacobian of an arbitrary surface map in the
/// given chart. The image chart is the same as the source chart, so this is
/// meaningful for maps that keep `p` in the chart's domain (Newton residuals,
/// model maps near periodic points, compositions).
pub fn fd_jacobian<F>(
    chart: &LocalChart,
    p: &SurfacePoint,
    h: f64,
    f: F,
) -> Result<[[f64; 2]; 2], ModelError>
where
    F: Fn(&SurfacePoint) -> Result<SurfacePoint, ModelError>,
{
    let c0 = chart.project(p);
    let col = |du: f64, dv: f64| -> Result<[f64; 2], ModelError> {
        let plus = f(&chart.unproject((c0.0 + du, c0.1 + dv)))?;
        let minus = f(&chart.unproject((c0.0 - du, c0.1 - dv)))?;
        let fp = chart.project_near(&plus, None);
        let fm = chart.project_near(&minus, Some(fp));
        Ok([(fp.0 - fm.0) / (2.0 * h), (fp.1 - fm.1) / (2.0 * h)])
    };
    let cx = col(h, 0.0)?;
    let cy = col(0.0, h)?;
    let m = [[cx[0], cy[0]], [cx[1], cy[1]]];
    if m.iter().flatten().all(|v| v.is_finite()) {
        Ok(m)
    } else {
        Err(ModelError::NonFinite)
    }
}

impl SurfacePoint {
    fn plane_from(p: [f64; 2]) -> SurfacePoint {
        SurfacePoint::Plane { x: p[0], y: p[1] }
    }
}

/// A local chart around a point, used for Jacobians, Newton steps and
/// angular sorting. Sphere points use the stereographic chart whose singular
/// point is at chart distance >= 0.1; torus points use the obvious lift;
/// projective points the chart of their canonical representative.
#[derive(Debug, Clone, Copy)]
pub struct LocalChart {
    base: ChartBase,
}

#[derive(Debug, Clone, Copy)]
enum ChartBase {
    Plane,
    Circle { t0: f64 },
    Sphere { chart: SphereChart },
    Torus { u0: f64, v0: f64 },
    Proj { chart: SphereChart, rep: [f64; 3] },
}

impl LocalChart {
    pub fn at(p: &SurfacePoint) -> Result<LocalChart, ModelError> {
        let base = match p {
            SurfacePoint::Plane { .. } => ChartBase::Plane,
            SurfacePoint::Circle { t } => ChartBase::Circle { t0: *t },
            SurfacePoint::Sphere { x } => {
                let chart = SphereChart::best_for(*x);
                if chart.pole_distance(*x) < 0.1 {
                    return Err(ModelError::ChartSingularity);
                }
                ChartBase::Sphere { chart }
            }
            SurfacePoint::Torus { u, v } => ChartBase::Torus { u0: *u, v0: *v },
            SurfacePoint::Proj { x } => {
                let rep = proj_canonical(*x);
                let chart = SphereChart::best_for(rep);
                if chart.pole_distance(rep) < 0.1 {
                    return Err(ModelError::ChartSingularity);
                }
                ChartBase::Proj { chart, rep }
            }
        };
        Ok(LocalChart { base })
    }

    pub fn project(&self, p: &SurfacePoint) -> (f64, f64) {
        self.project_near(p, None)
    }

    /// Project, choosing lifts continuously: torus points unwrap to the
    /// representative nearest `near` (or the chart base point), projective
    /// points pick the sphere lift nearest the reference.
    pub fn project_near(&self, p: &SurfacePoint, near: Option<(f64, f64)>) -> (f64, f64) {
        match (&self.base, p) {
            (ChartBase::Plane, SurfacePoint::Plane { x, y }) => (*x, *y),
            (ChartBase::Circle { t0 }, SurfacePoint::Circle { t }) => {
                let anchor = near.map(|n| n.0).unwrap_or(*t0);
                let mut val = *t;
                while val - anchor > 0.5 {
                    val -= 1.0;
                }
                while val - anchor < -0.5 {
                    val += 1.0;
                }
                (val, 0.0)
            }
            (ChartBase::Sphere { chart }, SurfacePoint::Sphere { x }) => chart.project(*x),
            (ChartBase::Torus { u0, v0 }, SurfacePoint::Torus { u, v }) => {
                let (au, av) = near.unwrap_or((*u0, *v0));
                let unwrap = |val: f64, anchor: f64| {
                    let mut w = val;
                    while w - anchor > 0.5 {
                        w -= 1.0;
                    }
                    while w - anchor < -0.5 {
                        w += 1.0;
                    }
                    w
                };
                (unwrap(*u, au), unwrap(*v, av))
            }
            (ChartBase::Proj { chart, rep }, SurfacePoint::Proj { x }) => {
                let cand = if let Some(n) = near {
                    let target = chart.unproject(n);
                    if dist3(*x, target) <= dist3(neg3(*x), target) {
                        *x
                    } else {
                        neg3(*x)
                    }
                } else if dist3(*x, *rep) <= dist3(neg3(*x), *rep) {
                    *x
                } else {
                    neg3(*x)
                };
                chart.project(cand)
            }
            _ => (f64::NAN, f64::NAN),
        }
    }

    pub fn unproject(&self, c: (f64, f64)) -> SurfacePoint {
        match &self.base {
            ChartBase::Plane => SurfacePoint::Plane { x: c.0, y: c.1 },
            ChartBase::Circle { .. } => SurfacePoint::circle(c.0),
            ChartBase::Sphere { chart } => SurfacePoint::Sphere {
                x: chart.unproject(c),
            },
            ChartBase::Torus { .. } => SurfacePoint::torus(c.0, c.1),
            ChartBase::Proj { chart, .. } => SurfacePoint::Proj {
                x: proj_canonical(chart.unproject(c)),
            },
        }
    }
}

/// One catalog row.
#[derive(Debug, Clone)]
pub struct ModelDescriptor {
    pub id: &'static str,
    pub surface: SurfaceKind,
    pub flow_based: bool,
    pub summary: &'static str,
}

fn entry(id: &'static str, surface: SurfaceKind, rule: Rule, flow_based: bool) -> ModelMap {
    ModelMap {
        id,
        surface,
        rule,
        flow_based,
        step: DEFAULT_STEP,
    }
}

/// All catalog models. Connected sums are deliberately absent: the families
/// f_g, f~_q, xi_g, xi~_q exist only at descriptor level.
pub fn model_catalog() -> Vec<ModelMap> {
    use SurfaceKind::*;
    vec![
        entry("chi", Plane, Rule::Chi, true),
        entry("theta", Plane, Rule::Theta, false),
        entry("psi0_bar", Plane, Rule::Psi0Bar, true),
        entry("psi0", Sphere, Rule::Psi0, true),
        entry("psitilde1", Projective, Rule::PsiTilde1, true),
        entry("F_circle", Circle, Rule::FCircle, false),
        entry("F1_torus", Torus, Rule::F1Torus, false),
        entry("a_hat", Torus, Rule::AHat, false),
        entry("psi1", Torus, Rule::Psi1, false),
        entry("h_plane", Plane, Rule::HPlane, false),
        entry("phi_minus", Plane, Rule::PhiMinus, true),
        entry("phi_plus", Plane, Rule::PhiPlus, true),
        entry("f_bar", Plane, Rule::FBar, true),
        entry("dehn_twist", Plane, Rule::DehnTwist, false),
        entry("xi0_bar", Plane, Rule::Xi0Bar, true),
        entry("xi0", Sphere, Rule::Xi0, true),
    ]
}

pub fn catalog_descriptors() -> Vec<ModelDescriptor> {
    model_catalog()
        .into_iter()
        .map(|m| ModelDescriptor {
            id: m.id,
            surface: m.surface,
            flow_based: m.flow_based,
            summary: match m.id {
                "chi" => "time-1 map of the radial/angular flow on the plane",
                "theta" => "reflection (r, phi) -> (r, -phi)",
                "psi0_bar" => "theta composed with chi",
                "psi0" => "orientation-changing gradient-like sphere diffeomorphism",
                "psitilde1" => "quotient of psi0 on the projective plane",
                "F_circle" => "source-sink circle diffeomorphism",
                "F1_torus" => "product F x F on the torus",
                "a_hat" => "coordinate swap automorphism of the torus",
                "psi1" => "a_hat composed with F1: orientation-changing torus map",
                "h_plane" => "linear contraction (r, phi) -> (r/2, phi)",
                "phi_minus" => "time-1 map of the saddle/sink strip flow",
                "phi_plus" => "time-1 map of the saddle/source strip flow",
                "f_bar" => "h with two Cherry boxes inserted in the sectors",
                "dehn_twist" => "full twist of the annulus 1 <= |z| <= 2",
                "xi0_bar" => "dehn_twist composed with f_bar",
                "xi0" => "Morse-Smale sphere diffeomorphism with heteroclinic points",
                _ => "",
            },
        })
        .collect()
}

/// Maximum conjugacy residuals over random samples, one entry per identity.
#[derive(Debug, Clone)]
pub struct ConjugacyResiduals {
    pub eta_minus: f64,
    pub eta_plus: f64,
    pub stereo: f64,
}

/// Checks the identities eta_-(h(p)) = g(eta_-(p)), eta_+(h(p)) = g(eta_+(p))
/// and theta-hat(psi0(q)) = psi0_bar(theta-hat(q)) on `sample_count` points.
pub fn conjugacy_residual(sample_count: usize) -> ConjugacyResiduals {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d73_6c61_6221);
    let mut worst_minus: f64 = 0.0;
    let mut worst_plus: f64 = 0.0;
    let mut worst_stereo: f64 = 0.0;
    let psi0 = ModelMap::by_id("psi0").unwrap();
    let psi0_bar = ModelMap::by_id("psi0_bar").unwrap();
    for _ in 0..sample_count.max(1) {
        // A_- sample
        let r = (rng.gen_range(-4.0..5.3f64)).exp2();
        let phi = rng.gen_range(0.75 * PI..=1.25 * PI);
        let lhs = eta_minus(0.5 * r, phi);
        let rhs = eta_minus(r, phi);
        worst_minus = worst_minus
            .max((lhs[0] - rhs[0] - 1.0).abs())
            .max((lhs[1] - rhs[1]).abs());
        // A_+ sample
        let r = (rng.gen_range(-5.3..4.0f64)).exp2();
        let phi = rng.gen_range(-0.25 * PI..=0.25 * PI);
        let lhs = eta_plus(0.5 * r, phi);
        let rhs = eta_plus(r, phi);
        worst_plus = worst_plus
            .max((lhs[0] - rhs[0] - 1.0).abs())
            .max((lhs[1] - rhs[1]).abs());
        // sphere sample away from the poles
        let z = rng.gen_range(-0.98..0.98f64);
        let a = rng.gen_range(0.0..2.0 * PI);
        let s = (1.0 - z * z).sqrt();
        let q = [s * a.cos(), s * a.sin(), z];
        let sphere_image = psi0.eval(&SurfacePoint::Sphere { x: q }).unwrap();
        let projected = match sphere_image {
            SurfacePoint::Sphere { x } => stereo_n(x),
            _ => unreachable!(),
        };
        let direct = psi0_bar
            .eval(&SurfacePoint::plane(stereo_n(q).0, stereo_n(q).1))
            .unwrap();
        if let SurfacePoint::Plane { x, y } = direct {
            worst_stereo = worst_stereo
                .max((projected.0 - x).abs())
                .max((projected.1 - y).abs());
        }
    }
    ConjugacyResiduals {
        eta_minus: worst_minus,
        eta_plus: worst_plus,
        stereo: worst_stereo,
    }
}

/// Eigenvalues of a 2x2 real matrix.
#[derive(Debug, Clone, Copy)]
pub struct Eigen2 {
    pub re: [f64; 2],
    pub im: [f64; 2],
}

impl Eigen2 {
    pub fn moduli(&self) -> [f64; 2] {
        [
            (self.re[0] * self.re[0] + self.im[0] * self.im[0]).sqrt(),
            (self.re[1] * self.re[1] + self.im[1] * self.im[1]).sqrt(),
        ]
    }

    pub fn is_real(&self) -> bool {
        self.im[0].abs() < 1e-12 && self.im[1].abs() < 1e-12
    }
}

pub fn eigen2(m: [[f64; 2]; 2]) -> Eigen2 {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = tr * tr / 4.0 - det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        Eigen2 {
            re: [tr / 2.0 - s, tr / 2.0 + s],
            im: [0.0, 0.0],
        }
    } else {
        let s = (-disc).sqrt();
        Eigen2 {
            re: [tr / 2.0, tr / 2.0],
            im: [-s, s],
        }
    }
}

/// Unit eigenvector of a 2x2 matrix for a real eigenvalue.
pub fn eigenvector2(m: [[f64; 2]; 2], lambda: f64) -> [f64; 2] {
    // (m - lambda I) v = 0; pick the larger row for stability.
    let a = [m[0][0] - lambda, m[0][1]];
    let b = [m[1][0], m[1][1] - lambda];
    let v = if a[0].abs() + a[1].abs() >= b[0].abs() + b[1].abs() {
        [-a[1], a[0]]
    } else {
        [-b[1], b[0]]
    };
    let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
    if n < 1e-300 {
        [1.0, 0.0]
    } else {
        [v[0] / n, v[1] / n]
    }
}

pub fn det2(m: [[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

#[cfg(test)]
mod tests;
