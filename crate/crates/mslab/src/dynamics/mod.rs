//! Numerical recovery of the nonwandering structure of a model map:
//! periodic points, hyperbolic classification, orientation types,
//! separatrix traces, and assembly into a combinatorial descriptor.

pub mod oracle;

use crate::descriptor::{
    Attachment, Branch, Descriptor, Orbit, OrbitKind, OrientationType, SepRef,
};
use crate::geom::{dist3, neg3, proj_canonical, SurfaceKind, SurfacePoint};
use crate::models::{eigen2, eigenvector2, fd_jacobian, LocalChart, ModelError, ModelMap};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DynError {
    #[error("eigenvalue modulus {modulus} too close to 1 at {point:?}")]
    NonHyperbolic { point: SurfacePoint, modulus: f64 },
    #[error("separatrix trace reached no limit within the step budget")]
    NoLimit,
    #[error("component count changed between grid resolutions {0} and {1}")]
    ResolutionTooCoarse(usize, usize),
    #[error("point is not a saddle")]
    NotASaddle,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("analysis failed: {0}")]
    Failed(String),
}

/// A periodic point with its hyperbolic data.
#[derive(Debug, Clone)]
pub struct PeriodicPointRecord {
    pub point: SurfacePoint,
    pub period: usize,
    pub kind: OrbitKind,
    /// Real eigenvalues of the return map's Jacobian, |small| first.
    pub eigenvalues: [f64; 2],
    pub orientation: OrientationType,
}

/// Where a separatrix trace ends up.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceLimit {
    /// Accumulates on a node orbit (orbit index into the analysis, and the
    /// specific point index it converges to).
    Node { orbit: usize, point: usize },
    /// Crosses the stable (dually unstable) manifold of another saddle
    /// transversally: heteroclinic.
    Heteroclinic {
        orbit: usize,
        crossed: Branch,
        crossings: usize,
    },
}

/// Sampled separatrix with its limit.
#[derive(Debug, Clone)]
pub struct SeparatrixTrace {
    pub polyline: Vec<SurfacePoint>,
    /// Sign of the continuous sphere lift at each vertex, for quotient
    /// surfaces; all +1 elsewhere.
    pub lift_signs: Vec<i8>,
    pub limit: Option<TraceLimit>,
}

/// One periodic orbit with per-point data.
#[derive(Debug, Clone)]
pub struct OrbitAnalysis {
    pub kind: OrbitKind,
    pub period: usize,
    pub orientation: OrientationType,
    pub points: Vec<SurfacePoint>,
    pub eigenvalues: [f64; 2],
    /// Orientation parity of the pushed-forward gauge at each point,
    /// relative to the ambient chart orientation; +1 at the representative.
    pub parity: Vec<i8>,
    /// Canonical branch directions at each point (saddles only), in the
    /// ambient chart at that point.
    pub branch_dirs: Vec<BTreeMap<Branch, [f64; 2]>>,
}

/// Full numeric analysis of one model.
pub struct ModelAnalysis {
    pub model: ModelMap,
    pub orbits: Vec<OrbitAnalysis>,
    /// Traces per (saddle orbit, point, branch).
    pub traces: BTreeMap<(usize, usize, Branch), SeparatrixTrace>,
}

const NEWTON_TOL: f64 = 1e-11;
const HYPERBOLIC_MARGIN: f64 = 1e-6;
const DEDUP_DIST: f64 = 1e-6;
const SEED_OFFSET: f64 = 1e-4;
const NODE_CAPTURE: f64 = 1e-4;
const HET_TUBE: f64 = 1e-3;

fn jac_step(model: &ModelMap) -> f64 {
    if model.flow_based() {
        1e-5
    } else {
        1e-6
    }
}

/// Evaluate f^k.
fn iterate(model: &ModelMap, p: &SurfacePoint, k: usize) -> Result<SurfacePoint, ModelError> {
    let mut q = *p;
    for _ in 0..k {
        q = model.eval(&q)?;
    }
    Ok(q)
}

fn iterate_inv(model: &ModelMap, p: &SurfacePoint, k: usize) -> Result<SurfacePoint, ModelError> {
    let mut q = *p;
    for _ in 0..k {
        q = model.eval_inverse(&q)?;
    }
    Ok(q)
}

/// Seed points for the root search, per surface.
fn seeds(model: &ModelMap, grid_n: usize) -> Vec<SurfacePoint> {
    let n = grid_n.max(8);
    let mut out = Vec::new();
    match model.surface() {
        SurfaceKind::Plane => {
            // window generous enough for every catalog model's nonwandering set
            let lo = -20.0;
            let hi = 20.0;
            for i in 0..n {
                for j in 0..n {
                    let x = lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
                    let y = lo + (hi - lo) * (j as f64 + 0.5) / n as f64;
                    out.push(SurfacePoint::plane(x, y));
                }
            }
            // a finer patch near the origin where the radial models live
            for i in 0..n {
                for j in 0..n {
                    let x = -2.5 + 5.0 * (i as f64 + 0.5) / n as f64;
                    let y = -2.5 + 5.0 * (j as f64 + 0.5) / n as f64;
                    out.push(SurfacePoint::plane(x, y));
                }
            }
        }
        SurfaceKind::Circle => {
            for i in 0..n {
                out.push(SurfacePoint::circle(i as f64 / n as f64));
            }
        }
        SurfaceKind::Torus => {
            for i in 0..n {
                for j in 0..n {
                    out.push(SurfacePoint::torus(
                        (i as f64 + 0.5) / n as f64,
                        (j as f64 + 0.5) / n as f64,
                    ));
                }
            }
        }
        SurfaceKind::Sphere | SurfaceKind::Projective => {
            let rows = n;
            for i in 0..rows {
                let theta = std::f64::consts::PI * (i as f64 + 0.5) / rows as f64;
                let cols = ((2.0 * rows as f64 * theta.sin()).ceil() as usize).max(4);
                for j in 0..cols {
                    let phi = std::f64::consts::TAU * (j as f64 + 0.5) / cols as f64;
                    let x = [
                        theta.sin() * phi.cos(),
                        theta.sin() * phi.sin(),
                        theta.cos(),
                    ];
                    if model.surface() == SurfaceKind::Sphere {
                        out.push(SurfacePoint::sphere(x));
                    } else {
                        out.push(SurfacePoint::proj(x));
                    }
                }
            }
            if model.surface() == SurfaceKind::Sphere {
                out.push(SurfacePoint::sphere([0.0, 0.0, 1.0]));
                out.push(SurfacePoint::sphere([0.0, 0.0, -1.0]));
            } else {
                out.push(SurfacePoint::proj([0.0, 0.0, 1.0]));
            }
        }
    }
    out
}

/// Damped Newton iteration on f^k(x) - x from one seed.
fn newton_from(
    model: &ModelMap,
    seed: &SurfacePoint,
    k: usize,
) -> Option<SurfacePoint> {
    let mut x = *seed;
    let mut last_norm = f64::INFINITY;
    let mut stall = 0;
    for _ in 0..50 {
        let chart = LocalChart::at(&x).ok()?;
        let c0 = chart.project(&x);
        let fx = iterate(model, &x, k).ok()?;
        let fc = chart.project_near(&fx, Some(c0));
        let r = (fc.0 - c0.0, fc.1 - c0.1);
        let norm = (r.0 * r.0 + r.1 * r.1).sqrt();
        if norm < NEWTON_TOL {
            return Some(x);
        }
        if norm > 0.9 * last_norm {
            stall += 1;
            if stall >= 4 {
                return None;
            }
        } else {
            stall = 0;
        }
        last_norm = norm;
        // residual Jacobian: d(f^k) - I in the chart
        let h = jac_step(model);
        let j = fd_jacobian(&chart, &x, h, |q| iterate(model, q, k)).ok()?;
        let m = [[j[0][0] - 1.0, j[0][1]], [j[1][0], j[1][1] - 1.0]];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() < 1e-14 {
            return None;
        }
        let dx = (-(r.0 * m[1][1] - r.1 * m[0][1]) / det, -(m[0][0] * r.1 - m[1][0] * r.0) / det);
        let step_norm = (dx.0 * dx.0 + dx.1 * dx.1).sqrt();
        if !step_norm.is_finite() || step_norm > 10.0 {
            return None;
        }
        // damping: halve until the residual shrinks
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..8 {
            let cand = chart.unproject((c0.0 + t * dx.0, c0.1 + t * dx.1));
            if let Ok(fc2) = iterate(model, &cand, k) {
                let cc = chart.project_near(&cand, Some(c0));
                let fcc = chart.project_near(&fc2, Some(cc));
                let rn = ((fcc.0 - cc.0).powi(2) + (fcc.1 - cc.1).powi(2)).sqrt();
                if rn < norm {
                    accepted = Some(cand);
                    break;
                }
            }
            t *= 0.5;
        }
        x = accepted?;
    }
    None
}

/// Jacobian of the return map f^period at p, in the local chart.
pub fn return_jacobian(
    model: &ModelMap,
    p: &SurfacePoint,
    period: usize,
) -> Result<[[f64; 2]; 2], DynError> {
    let chart = LocalChart::at(p)?;
    Ok(fd_jacobian(&chart, p, jac_step(model), |q| {
        iterate(model, q, period)
    })?)
}

/// Classify a periodic point: kind, eigenvalues and orientation type.
pub fn classify(
    model: &ModelMap,
    p: &SurfacePoint,
    period: usize,
) -> Result<PeriodicPointRecord, DynError> {
    let j = return_jacobian(model, p, period)?;
    let eig = eigen2(j);
    let moduli = eig.moduli();
    for m in moduli {
        if (m - 1.0).abs() < HYPERBOLIC_MARGIN {
            return Err(DynError::NonHyperbolic {
                point: *p,
                modulus: m,
            });
        }
    }
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let (kind, orientation, eigenvalues) = if moduli[0] < 1.0 && moduli[1] < 1.0 {
        (
            OrbitKind::Sink,
            OrientationType::Node {
                sigma: if det > 0.0 { 1 } else { -1 },
            },
            [eig.re[0], eig.re[1]],
        )
    } else if moduli[0] > 1.0 && moduli[1] > 1.0 {
        (
            OrbitKind::Source,
            OrientationType::Node {
                sigma: if det > 0.0 { 1 } else { -1 },
            },
            [eig.re[0], eig.re[1]],
        )
    } else {
        if !eig.is_real() {
            return Err(DynError::Failed(format!(
                "saddle with complex eigenvalues at {p:?}"
            )));
        }
        // real, one inside and one outside the unit circle
        let (small, large) = if eig.re[0].abs() < eig.re[1].abs() {
            (eig.re[0], eig.re[1])
        } else {
            (eig.re[1], eig.re[0])
        };
        (
            OrbitKind::Saddle,
            OrientationType::Saddle {
                nu: if small > 0.0 { 1 } else { -1 },
                lambda: if large > 0.0 { 1 } else { -1 },
            },
            [small, large],
        )
    };
    Ok(PeriodicPointRecord {
        point: *p,
        period,
        kind,
        eigenvalues,
        orientation,
    })
}

/// Locate all periodic points of period up to `max_period` from a seed grid.
/// Points are deduplicated and reported with their minimal period; every
/// returned point satisfies |f^per(p) - p| <= 1e-8.
pub fn find_periodic_points(
    model: &ModelMap,
    max_period: usize,
    grid_n: usize,
) -> Result<Vec<PeriodicPointRecord>, DynError> {
    assert!(max_period >= 1);
    let mut found: Vec<(SurfacePoint, usize)> = Vec::new();
    for k in 1..=max_period {
        for seed in seeds(model, grid_n) {
            let Some(p) = newton_from(model, &seed, k) else {
                continue;
            };
            // minimal period
            let mut minimal = k;
            for d in 1..k {
                if k % d == 0 {
                    if let Ok(q) = iterate(model, &p, d) {
                        if q.dist(&p) < 1e-8 {
                            minimal = d;
                            break;
                        }
                    }
                }
            }
            if found
                .iter()
                .any(|(q, _)| q.dist(&p) < DEDUP_DIST)
            {
                continue;
            }
            let residual = iterate(model, &p, minimal)
                .map(|q| q.dist(&p))
                .unwrap_or(f64::INFINITY);
            if residual > 1e-8 {
                continue;
            }
            found.push((p, minimal));
        }
    }
    let mut records = Vec::new();
    for (p, per) in found {
        records.push(classify(model, &p, per)?);
    }
    Ok(records)
}

/// Orientation parity of df at p relative to the ambient charts at p and
/// f(p). For the projective plane the canonical-representative charts are
/// used on both sides.
fn ambient_eps(model: &ModelMap, p: &SurfacePoint) -> Result<i8, DynError> {
    let fp = model.eval(p)?;
    let chart_p = LocalChart::at(p)?;
    let chart_fp = LocalChart::at(&fp)?;
    let h = jac_step(model);
    let c0 = chart_p.project(p);
    let image = |du: f64, dv: f64| -> Result<(f64, f64), ModelError> {
        let q = chart_p.unproject((c0.0 + du, c0.1 + dv));
        let fq = model.eval(&q)?;
        Ok(chart_fp.project_near(&fq, Some(chart_fp.project(&fp))))
    };
    let pxp = image(h, 0.0)?;
    let pxm = image(-h, 0.0)?;
    let pyp = image(0.0, h)?;
    let pym = image(0.0, -h)?;
    let a = ((pxp.0 - pxm.0) / (2.0 * h), (pxp.1 - pxm.1) / (2.0 * h));
    let b = ((pyp.0 - pym.0) / (2.0 * h), (pyp.1 - pym.1) / (2.0 * h));
    let det = a.0 * b.1 - a.1 * b.0;
    if det == 0.0 || !det.is_finite() {
        return Err(DynError::Failed(format!("degenerate df at {p:?}")));
    }
    Ok(if det > 0.0 { 1 } else { -1 })
}

/// Push a tangent direction forward through df by finite differences.
fn push_dir(
    model: &ModelMap,
    p: &SurfacePoint,
    dir: [f64; 2],
) -> Result<[f64; 2], DynError> {
    let fp = model.eval(p)?;
    let chart_p = LocalChart::at(p)?;
    let chart_fp = LocalChart::at(&fp)?;
    let h = jac_step(model);
    let c0 = chart_p.project(p);
    let anchor = chart_fp.project(&fp);
    let plus = model.eval(&chart_p.unproject((c0.0 + h * dir[0], c0.1 + h * dir[1])))?;
    let minus = model.eval(&chart_p.unproject((c0.0 - h * dir[0], c0.1 - h * dir[1])))?;
    let cp = chart_fp.project_near(&plus, Some(anchor));
    let cm = chart_fp.project_near(&minus, Some(anchor));
    let v = [(cp.0 - cm.0) / (2.0 * h), (cp.1 - cm.1) / (2.0 * h)];
    let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
    if n < 1e-12 {
        return Err(DynError::Failed("vanishing pushforward".into()));
    }
    Ok([v[0] / n, v[1] / n])
}

fn angle_of(v: [f64; 2]) -> f64 {
    crate::geom::angle_in(v[1].atan2(v[0]))
}

/// Assign canonical branch labels at a saddle representative: the CCW order
/// of the four separatrix directions must read [U+, S+, U-, S-] in the
/// gauge, which at the representative is the ambient chart orientation.
fn canonical_labels(
    unstable: [f64; 2],
    stable: [f64; 2],
) -> BTreeMap<Branch, [f64; 2]> {
    let u_plus = unstable;
    let u_minus = [-unstable[0], -unstable[1]];
    let s_cand = stable;
    // S+ is the stable direction encountered first going CCW from U+
    let du = angle_of(u_plus);
    let to = |v: [f64; 2]| {
        let mut a = angle_of(v) - du;
        while a < 0.0 {
            a += std::f64::consts::TAU;
        }
        a
    };
    let s_plus = if to(s_cand) < to([-s_cand[0], -s_cand[1]]) {
        s_cand
    } else {
        [-s_cand[0], -s_cand[1]]
    };
    let s_minus = [-s_plus[0], -s_plus[1]];
    [
        (Branch::UPlus, u_plus),
        (Branch::UMinus, u_minus),
        (Branch::SPlus, s_plus),
        (Branch::SMinus, s_minus),
    ]
    .into_iter()
    .collect()
}

/// Group classified points into f-orbits, compute parities and saddle
/// branch frames.
pub fn analyze(model: &ModelMap, max_period: usize, grid_n: usize) -> Result<ModelAnalysis, DynError> {
    let records = find_periodic_points(model, max_period, grid_n)?;
    let mut used = vec![false; records.len()];
    let mut orbits = Vec::new();
    for i in 0..records.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let rec = &records[i];
        let mut points = vec![rec.point];
        let mut cur = rec.point;
        for _ in 1..rec.period {
            cur = model.eval(&cur)?;
            let j = records
                .iter()
                .position(|r| r.point.dist(&cur) < 10.0 * DEDUP_DIST)
                .ok_or_else(|| DynError::Failed("orbit point missing from the record set".into()))?;
            used[j] = true;
            points.push(records[j].point);
        }
        // parity chain along the orbit
        let mut parity = vec![1i8];
        for k in 0..rec.period - 1 {
            let eps = ambient_eps(model, &points[k])?;
            parity.push(parity[k] * eps);
        }
        // saddle frames: eigen directions at the representative, pushed
        // forward along the orbit
        let mut branch_dirs = Vec::new();
        if rec.kind == OrbitKind::Saddle {
            let j = return_jacobian(model, &points[0], rec.period)?;
            let eig = eigen2(j);
            let (small, large) = if eig.re[0].abs() < eig.re[1].abs() {
                (eig.re[0], eig.re[1])
            } else {
                (eig.re[1], eig.re[0])
            };
            let v_u = eigenvector2(j, large);
            let v_s = eigenvector2(j, small);
            let mut frame = canonical_labels(v_u, v_s);
            branch_dirs.push(frame.clone());
            for k in 1..rec.period {
                let mut next = BTreeMap::new();
                for (b, v) in &frame {
                    next.insert(*b, push_dir(model, &points[k - 1], *v)?);
                }
                frame = next;
                branch_dirs.push(frame.clone());
            }
        }
        orbits.push(OrbitAnalysis {
            kind: rec.kind,
            period: rec.period,
            orientation: rec.orientation,
            points,
            eigenvalues: rec.eigenvalues,
            parity,
            branch_dirs,
        });
    }
    // deterministic orbit order: sinks, saddles, sources, by position
    let sort_key = |o: &OrbitAnalysis| {
        let kind_rank = match o.kind {
            OrbitKind::Sink => 0,
            OrbitKind::Saddle => 1,
            OrbitKind::Source => 2,
        };
        let (a, b) = rough_coords(&o.points[0]);
        (kind_rank, (a * 1e6).round() as i64, (b * 1e6).round() as i64)
    };
    orbits.sort_by_key(sort_key);
    let mut analysis = ModelAnalysis {
        model: model.clone(),
        orbits,
        traces: BTreeMap::new(),
    };
    trace_all(&mut analysis)?;
    Ok(analysis)
}

fn rough_coords(p: &SurfacePoint) -> (f64, f64) {
    match p {
        SurfacePoint::Plane { x, y } => (*x, *y),
        SurfacePoint::Circle { t } => (*t, 0.0),
        SurfacePoint::Sphere { x } => (x[2], x[1].atan2(x[0])),
        SurfacePoint::Torus { u, v } => (*u, *v),
        SurfacePoint::Proj { x } => (x[2], x[1].atan2(x[0])),
    }
}

/// March a separatrix from a saddle point: seed along the branch direction,
/// iterate the return map (inverse for stable branches), refine the image
/// arcs, detect the limit.
pub fn trace_separatrix(
    analysis: &ModelAnalysis,
    orbit: usize,
    point: usize,
    branch: Branch,
    steps: usize,
) -> Result<SeparatrixTrace, DynError> {
    let model = &analysis.model;
    let o = &analysis.orbits[orbit];
    if o.kind != OrbitKind::Saddle {
        return Err(DynError::NotASaddle);
    }
    let p = o.points[point];
    let dir = o.branch_dirs[point][&branch];
    let per = o.period;
    let forward = branch.is_unstable();
    let chart = LocalChart::at(&p)?;
    let c0 = chart.project(&p);
    let advance = |q: &SurfacePoint| -> Result<SurfacePoint, ModelError> {
        if forward {
            iterate(model, q, per)
        } else {
            iterate_inv(model, q, per)
        }
    };
    // fundamental segment between the seed and its first return
    let seed = chart.unproject((c0.0 + SEED_OFFSET * dir[0], c0.1 + SEED_OFFSET * dir[1]));
    let first = advance(&seed)?;
    let fc = chart.project_near(&first, Some(c0));
    let samples = 48;
    let mut wave: Vec<SurfacePoint> = (0..samples)
        .map(|i| {
            let t = i as f64 / samples as f64;
            chart.unproject((
                c0.0 + (1.0 - t) * (SEED_OFFSET * dir[0]) + t * (fc.0 - c0.0),
                c0.1 + (1.0 - t) * (SEED_OFFSET * dir[1]) + t * (fc.1 - c0.1),
            ))
        })
        .collect();
    let mut polyline: Vec<SurfacePoint> = Vec::new();
    let mut lift_signs: Vec<i8> = Vec::new();
    let mut lift = LiftTracker::new(model.surface());
    let proj = model.surface() == SurfaceKind::Projective;
    let mut push = |pt: &SurfacePoint, polyline: &mut Vec<SurfacePoint>, signs: &mut Vec<i8>| {
        signs.push(lift.sign_for(pt, polyline.last()));
        polyline.push(*pt);
    };
    for pt in &wave {
        push(pt, &mut polyline, &mut lift_signs);
    }
    // node capture bookkeeping along the seed orbit
    let mut capture: Option<(usize, usize)> = None;
    let mut capture_count = 0;
    let mut seed_orbit = *wave.last().unwrap();
    let max_points = 6000;
    for _ in 0..steps {
        // advance the whole wave
        let mut next = Vec::with_capacity(wave.len());
        for q in &wave {
            next.push(advance(q).map_err(DynError::Model)?);
        }
        wave = next;
        for pt in &wave {
            push(pt, &mut polyline, &mut lift_signs);
        }
        if polyline.len() > max_points {
            break;
        }
        seed_orbit = *wave.last().unwrap();
        // node capture: within tolerance of the same node point repeatedly
        let mut hit = None;
        for (oi, other) in analysis.orbits.iter().enumerate() {
            if other.kind == OrbitKind::Saddle {
                continue;
            }
            if forward && other.kind != OrbitKind::Sink {
                continue;
            }
            if !forward && other.kind != OrbitKind::Source {
                continue;
            }
            for (pi, np) in other.points.iter().enumerate() {
                if seed_orbit.dist(np) < NODE_CAPTURE {
                    hit = Some((oi, pi));
                }
            }
        }
        match (hit, capture) {
            (Some(h), Some(c)) if h == c => {
                capture_count += 1;
                if capture_count >= 3 {
                    return Ok(SeparatrixTrace {
                        polyline,
                        lift_signs: if proj { lift_signs } else { vec![1; polyline.len()] },
                        limit: Some(TraceLimit::Node {
                            orbit: h.0,
                            point: h.1,
                        }),
                    });
                }
            }
            (Some(h), _) => {
                capture = Some(h);
                capture_count = 1;
            }
            (None, _) => {
                capture = None;
                capture_count = 0;
            }
        }
    }
    Ok(SeparatrixTrace {
        polyline,
        lift_signs: if proj {
            lift_signs
        } else {
            vec![1; polyline.len()]
        },
        limit: None,
    })
}

/// Continuous sphere-lift tracking for quotient-surface polylines.
struct LiftTracker {
    active: bool,
    sign: i8,
    prev_rep: Option<[f64; 3]>,
}

impl LiftTracker {
    fn new(kind: SurfaceKind) -> LiftTracker {
        LiftTracker {
            active: kind == SurfaceKind::Projective,
            sign: 1,
            prev_rep: None,
        }
    }

    fn sign_for(&mut self, p: &SurfacePoint, _prev: Option<&SurfacePoint>) -> i8 {
        if !self.active {
            return 1;
        }
        let SurfacePoint::Proj { x } = p else { return 1 };
        let rep = proj_canonical(*x);
        if let Some(prev) = self.prev_rep {
            let lifted = if self.sign == 1 { rep } else { neg3(rep) };
            // continue the lift: flip when the other representative is closer
            if dist3(lifted, prev) > dist3(neg3(lifted), prev) {
                self.sign = -self.sign;
            }
        }
        self.prev_rep = Some(if self.sign == 1 { rep } else { neg3(rep) });
        self.sign
    }
}

/// Trace every branch of every saddle point and resolve heteroclinic limits
/// by tube crossings.
fn trace_all(analysis: &mut ModelAnalysis) -> Result<(), DynError> {
    let saddle_ids: Vec<usize> = (0..analysis.orbits.len())
        .filter(|&i| analysis.orbits[i].kind == OrbitKind::Saddle)
        .collect();
    let steps = 80;
    let mut traces: BTreeMap<(usize, usize, Branch), SeparatrixTrace> = BTreeMap::new();
    for &oi in &saddle_ids {
        for pi in 0..analysis.orbits[oi].period {
            for b in [Branch::UPlus, Branch::UMinus, Branch::SPlus, Branch::SMinus] {
                let trace = trace_separatrix(analysis, oi, pi, b, steps)?;
                traces.insert((oi, pi, b), trace);
            }
        }
    }
    // resolve missing limits heteroclinically: an unstable trace that
    // crosses another saddle's stable trace transversally >= 3 times
    let keys: Vec<(usize, usize, Branch)> = traces.keys().copied().collect();
    for key in keys {
        if traces[&key].limit.is_some() {
            continue;
        }
        let (oi, _pi, b) = key;
        let opposite: [Branch; 2] = if b.is_unstable() {
            Branch::STABLE
        } else {
            Branch::UNSTABLE
        };
        let mut best: Option<(usize, Branch, usize)> = None;
        for &oj in &saddle_ids {
            if oj == oi {
                continue;
            }
            for cb in opposite {
                let mut crossings = 0;
                for pj in 0..analysis.orbits[oj].period {
                    if let Some(other) = traces.get(&(oj, pj, cb)) {
                        crossings += tube_crossings(&traces[&key].polyline, &other.polyline);
                    }
                }
                if crossings >= 3 && best.map(|(_, _, c)| crossings > c).unwrap_or(true) {
                    best = Some((oj, cb, crossings));
                }
            }
        }
        if let Some((target, crossed, crossings)) = best {
            if let Some(t) = traces.get_mut(&key) {
                t.limit = Some(TraceLimit::Heteroclinic {
                    orbit: target,
                    crossed,
                    crossings,
                });
            }
        }
    }
    analysis.traces = traces;
    Ok(())
}

/// Transversal crossings of `a` through the tube around `b`: segments of
/// `a` whose endpoints lie within the tube and on opposite sides of `b`.
fn tube_crossings(a: &[SurfacePoint], b: &[SurfacePoint]) -> usize {
    let mut count = 0;
    for w in a.windows(2) {
        let (d0, s0) = side_of(&w[0], b);
        let (d1, s1) = side_of(&w[1], b);
        if d0 < HET_TUBE && d1 < HET_TUBE && s0 * s1 < 0.0 {
            count += 1;
        }
    }
    count
}

/// Distance from p to the polyline and the sign of the side it lies on
/// relative to the nearest segment (in rough chart coordinates).
fn side_of(p: &SurfacePoint, line: &[SurfacePoint]) -> (f64, f64) {
    let mut best = (f64::INFINITY, 0.0);
    let pc = rough_coords(p);
    for w in line.windows(2) {
        let a = rough_coords(&w[0]);
        let b = rough_coords(&w[1]);
        let d = p.dist(&w[0]).min(p.dist(&w[1]));
        let seg = (b.0 - a.0, b.1 - a.1);
        let rel = (pc.0 - a.0, pc.1 - a.1);
        let cross = seg.0 * rel.1 - seg.1 * rel.0;
        if d < best.0 {
            best = (d, if cross >= 0.0 { 1.0 } else { -1.0 });
        }
    }
    best
}

mod extract;
pub use extract::extract_descriptor;

#[cfg(test)]
mod tests;
