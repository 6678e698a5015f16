use super::*;
use crate::geom::normalize3;
use approx::assert_relative_eq;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn plane(x: f64, y: f64) -> SurfacePoint {
    SurfacePoint::plane(x, y)
}

#[test]
fn catalog_contains_required_models() {
    let ids: Vec<&str> = model_catalog().iter().map(|m| m.id()).collect();
    for required in [
        "chi",
        "psi0_bar",
        "psi0",
        "psitilde1",
        "F_circle",
        "F1_torus",
        "psi1",
        "h_plane",
        "phi_minus",
        "phi_plus",
        "f_bar",
        "dehn_twist",
        "xi0_bar",
        "xi0",
    ] {
        assert!(ids.contains(&required), "missing {required}");
    }
    // no connected-sum models: sums are descriptor-level
    assert!(!ids.iter().any(|id| id.contains("sum") || id.starts_with("f_g")));
    let psi0 = ModelMap::by_id("psi0").unwrap();
    assert_eq!(psi0.surface(), SurfaceKind::Sphere);
    assert!(psi0.flow_based());
    let xi0 = ModelMap::by_id("xi0").unwrap();
    assert_eq!(xi0.surface(), SurfaceKind::Sphere);
    assert!(ModelMap::by_id("nosuchmodel").is_err());
}

#[test]
fn psi0_fixes_north_pole() {
    let psi0 = ModelMap::by_id("psi0").unwrap();
    let n = SurfacePoint::sphere([0.0, 0.0, 1.0]);
    let img = psi0.eval(&n).unwrap();
    assert!(img.dist(&n) < 1e-12);
}

#[test]
fn psi1_swaps_the_saddle_pair() {
    let psi1 = ModelMap::by_id("psi1").unwrap();
    let img = psi1.eval(&SurfacePoint::torus(0.0, 0.5)).unwrap();
    assert!(img.dist(&SurfacePoint::torus(0.5, 0.0)) < 1e-12);
    let img2 = psi1.eval(&SurfacePoint::torus(0.5, 0.0)).unwrap();
    assert!(img2.dist(&SurfacePoint::torus(0.0, 0.5)) < 1e-12);
}

#[test]
fn phi_minus_time_one_fixed_points() {
    let phi = ModelMap::by_id("phi_minus").unwrap();
    for p in [plane(1.0, 0.0), plane(-1.0, 0.0)] {
        let img = phi.eval(&p).unwrap();
        assert!(img.dist(&p) < 1e-9, "{p:?} moved to {img:?}");
    }
}

#[test]
fn phi_flows_match_unit_shift_where_straight() {
    // the fields equal (1,0) wherever |x| >= 2; trajectories started at
    // x >= 2 or ending before x = -2 translate exactly
    for model in ["phi_minus", "phi_plus"] {
        let m = ModelMap::by_id(model).unwrap();
        for &(x, d) in &[(2.0, 0.0), (2.5, 1.0), (-3.0, 0.5), (-4.0, -1.9), (5.0, 2.0)] {
            let img = m.eval(&plane(x, d)).unwrap();
            assert!(
                img.dist(&plane(x + 1.0, d)) < 1e-9,
                "{model} at ({x},{d}) gave {img:?}"
            );
        }
    }
}

#[test]
fn dehn_twist_boundary_circles_fixed() {
    let d = ModelMap::by_id("dehn_twist").unwrap();
    for &phi in &[0.0, 1.0, 2.5, 4.4] {
        for &t in &[1.0, 2.0] {
            let p = SurfacePoint::polar(t, phi);
            let img = d.eval(&p).unwrap();
            assert!(img.dist(&p) < 1e-9);
        }
    }
}

#[test]
fn every_model_inverse_round_trips() {
    let samples = |kind: SurfaceKind| -> Vec<SurfacePoint> {
        match kind {
            SurfaceKind::Plane => vec![
                plane(0.3, 0.2),
                plane(-1.4, 0.7),
                plane(3.0, -2.0),
                plane(0.0, 1.3),
            ],
            SurfaceKind::Circle => vec![SurfacePoint::circle(0.12), SurfacePoint::circle(0.81)],
            SurfaceKind::Sphere => vec![
                SurfacePoint::sphere([0.3, -0.4, 0.5]),
                SurfacePoint::sphere([-0.6, 0.2, -0.4]),
            ],
            SurfaceKind::Torus => vec![SurfacePoint::torus(0.2, 0.7), SurfacePoint::torus(0.9, 0.05)],
            SurfaceKind::Projective => vec![
                SurfacePoint::proj([0.3, -0.4, 0.5]),
                SurfacePoint::proj([0.1, 0.9, 0.2]),
            ],
        }
    };
    for m in model_catalog() {
        for p in samples(m.surface()) {
            let there = m.eval(&p).unwrap();
            let back = m.eval_inverse(&there).unwrap();
            assert!(
                back.dist(&p) < 1e-8,
                "{}: {p:?} -> {there:?} -> {back:?}",
                m.id()
            );
        }
    }
}

#[test]
fn chart_mismatch_is_reported() {
    let psi0 = ModelMap::by_id("psi0").unwrap();
    let err = psi0.eval(&SurfacePoint::torus(0.1, 0.1)).unwrap_err();
    assert!(matches!(err, ModelError::ChartMismatch { .. }));
}

#[test]
fn jacobian_of_f1_at_the_sink() {
    let f1 = ModelMap::by_id("F1_torus").unwrap();
    let j = f1.jacobian(&SurfacePoint::torus(0.5, 0.5), 1e-5).unwrap();
    assert_relative_eq!(j[0][0], 2.0 / 3.0, epsilon = 1e-6);
    assert_relative_eq!(j[1][1], 2.0 / 3.0, epsilon = 1e-6);
    assert!(j[0][1].abs() < 1e-6 && j[1][0].abs() < 1e-6);
}

#[test]
fn jacobian_of_chi_at_origin_expands() {
    let chi = ModelMap::by_id("chi").unwrap();
    let j = chi.jacobian(&plane(0.0, 0.0), 1e-5).unwrap();
    let eig = eigen2(j);
    let m = eig.moduli();
    assert!(m[0] > 1.0 && m[1] > 1.0, "moduli {m:?}");
    // the linearization is e * I
    assert_relative_eq!(m[0], 1.0f64.exp(), epsilon = 1e-4);
}

#[test]
fn jacobian_of_identity_composition_is_identity() {
    let psi1 = ModelMap::by_id("psi1").unwrap();
    let p = SurfacePoint::torus(0.23, 0.61);
    let chart = LocalChart::at(&p).unwrap();
    let j = fd_jacobian(&chart, &p, 1e-5, |q| psi1.eval_inverse(&psi1.eval(q)?)).unwrap();
    assert_relative_eq!(j[0][0], 1.0, epsilon = 1e-6);
    assert_relative_eq!(j[1][1], 1.0, epsilon = 1e-6);
    assert!(j[0][1].abs() < 1e-6 && j[1][0].abs() < 1e-6);
}

#[test]
fn sphere_jacobian_near_pole_uses_opposite_chart() {
    // near N the FromSouth chart applies; psi0 is a source there with
    // negative orientation, so the Jacobian has |det| > 1 and det < 0
    let psi0 = ModelMap::by_id("psi0").unwrap();
    let near_north = SurfacePoint::sphere([1e-4, 0.0, 1.0]);
    let j = psi0.jacobian(&near_north, 1e-3).unwrap();
    let m = eigen2(j).moduli();
    assert!(m[0] > 1.0 && m[1] > 1.0, "moduli {m:?}");
    assert!(det2(j) < 0.0);
}

#[test]
fn orientation_characters() {
    // sign(det J) must be constant over sampled points per model:
    // negative for psi0, psi0_bar, psi1; positive for F1_torus and xi0.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sample_sphere = |rng: &mut ChaCha8Rng| {
        let z: f64 = rng.gen_range(-0.9..0.9);
        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let s = (1.0 - z * z).sqrt();
        SurfacePoint::Sphere {
            x: normalize3([s * a.cos(), s * a.sin(), z]),
        }
    };
    for (id, expected_sign) in [
        ("psi0", -1.0),
        ("psi0_bar", -1.0),
        ("psi1", -1.0),
        ("F1_torus", 1.0),
        ("xi0", 1.0),
    ] {
        let m = ModelMap::by_id(id).unwrap();
        for _ in 0..8 {
            let p = match m.surface() {
                SurfaceKind::Sphere => sample_sphere(&mut rng),
                SurfaceKind::Torus => {
                    SurfacePoint::torus(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))
                }
                SurfaceKind::Plane => plane(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
                _ => unreachable!(),
            };
            if matches!(LocalChart::at(&p), Err(_)) {
                continue;
            }
            let j = match m.jacobian(&p, 1e-5) {
                Ok(j) => j,
                Err(_) => continue,
            };
            let d = det2(j);
            assert!(
                d * expected_sign > 0.0,
                "{id} at {p:?}: det = {d}, expected sign {expected_sign}"
            );
        }
    }
}

#[test]
fn f_bar_branches_agree_on_sector_rays() {
    // on the boundary rays of A_- and A_+ the conjugated flow equals h
    let fb = ModelMap::by_id("f_bar").unwrap();
    for &phi in &[
        0.75 * std::f64::consts::PI,
        1.25 * std::f64::consts::PI,
        0.25 * std::f64::consts::PI,
        1.75 * std::f64::consts::PI,
    ] {
        for &r in &[0.3, 1.0, 4.7, 19.0] {
            let p = SurfacePoint::polar(r, phi);
            let img = fb.eval(&p).unwrap();
            let want = SurfacePoint::polar(0.5 * r, phi);
            assert!(img.dist(&want) < 1e-9, "phi={phi} r={r}: {img:?}");
        }
    }
}

#[test]
fn psitilde1_is_well_defined_on_the_quotient() {
    // canonical(p(psi0(q))) == canonical(p(psi0(-q))) on random sphere points
    let psi0 = ModelMap::by_id("psi0").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..60 {
        let z: f64 = rng.gen_range(-0.95..0.95);
        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let s = (1.0 - z * z).sqrt();
        let q = normalize3([s * a.cos(), s * a.sin(), z]);
        let img_q = match psi0.eval(&SurfacePoint::Sphere { x: q }).unwrap() {
            SurfacePoint::Sphere { x } => x,
            _ => unreachable!(),
        };
        let img_nq = match psi0.eval(&SurfacePoint::Sphere { x: neg3(q) }).unwrap() {
            SurfacePoint::Sphere { x } => x,
            _ => unreachable!(),
        };
        assert!(
            dist3(proj_canonical(img_q), proj_canonical(img_nq)) < 1e-7,
            "equivariance failed at {q:?}"
        );
    }
}

#[test]
fn a_hat_is_an_involution() {
    let a = ModelMap::by_id("a_hat").unwrap();
    let p = SurfacePoint::torus(0.31, 0.87);
    let back = a.eval(&a.eval(&p).unwrap()).unwrap();
    assert_eq!(back.dist(&p), 0.0);
}

#[test]
fn conjugacy_residuals_are_tiny() {
    let res = conjugacy_residual(300);
    assert!(res.eta_minus <= 1e-6, "eta_minus residual {}", res.eta_minus);
    assert!(res.eta_plus <= 1e-6, "eta_plus residual {}", res.eta_plus);
    assert!(res.stereo <= 1e-6, "stereo residual {}", res.stereo);
}

#[test]
fn time_one_step_is_converged_at_default() {
    // halving the integration step changes the image by < 1e-9
    for id in ["chi", "psi0_bar", "phi_minus", "phi_plus"] {
        let coarse = ModelMap::by_id(id).unwrap();
        let fine = coarse.clone().with_step(coarse.step() / 2.0);
        let p = plane(0.73, -0.4);
        let a = coarse.eval(&p).unwrap();
        let b = fine.eval(&p).unwrap();
        assert!(a.dist(&b) < 1e-9, "{id}: step not converged ({})", a.dist(&b));
    }
}

#[test]
fn xi0_fixed_point_inventory_points() {
    // the six fixed points of xi0 in plane coordinates, through the chart
    let xi0_bar = ModelMap::by_id("xi0_bar").unwrap();
    let fixed = [
        plane(-16.0, 0.0),  // sink  (Q_- image)
        plane(-4.0, 0.0),   // saddle (P_- image)
        plane(0.25, 0.0),   // saddle (P_+ image)
        plane(1.0 / 16.0, 0.0), // source (Q_+ image)
        plane(0.0, 0.0),    // sink at the origin
    ];
    for p in fixed {
        let img = xi0_bar.eval(&p).unwrap();
        assert!(img.dist(&p) < 1e-8, "{p:?} -> {img:?}");
    }
}

#[test]
fn psi0_bar_circle_fixed_points() {
    let m = ModelMap::by_id("psi0_bar").unwrap();
    // fixed sinks at phi = 0, pi on the unit circle
    for p in [plane(1.0, 0.0), plane(-1.0, 0.0)] {
        let img = m.eval(&p).unwrap();
        assert!(img.dist(&p) < 1e-9, "{p:?} -> {img:?}");
    }
    // the saddle pair at phi = pi/2, 3pi/2 swaps
    let top = plane(0.0, 1.0);
    let bot = plane(0.0, -1.0);
    let img = m.eval(&top).unwrap();
    assert!(img.dist(&bot) < 1e-9);
    let img = m.eval(&bot).unwrap();
    assert!(img.dist(&top) < 1e-9);
}
