//! Hand-built golden descriptors for the base models.
//!
//! Branch labels follow the gauge convention: at every saddle point the
//! gauge-CCW order of separatrices is [U+, S+, U-, S-]. Gauges are the
//! ambient chart orientation at each orbit's representative point and its
//! pushforwards along the orbit.

use super::*;

fn orbit(name: &str, kind: OrbitKind, period: usize, otype: OrientationType) -> Orbit {
    Orbit {
        name: name.to_string(),
        kind,
        period,
        otype,
    }
}

fn node(sigma: i8) -> OrientationType {
    OrientationType::Node { sigma }
}

fn saddle(nu: i8, lambda: i8) -> OrientationType {
    OrientationType::Saddle { nu, lambda }
}

fn sep(saddle: OrbitId, point: usize, branch: Branch) -> SepRef {
    SepRef {
        saddle,
        point,
        branch,
    }
}

fn attach(d: &mut Descriptor, s: SepRef, nodeid: OrbitId, point: usize, twist: i8) {
    d.ends.insert(
        s,
        Attachment::Node {
            node: nodeid,
            point,
            twist,
        },
    );
}

/// Source-sink sphere: one source, one sink, both of positive type.
pub fn north_south_sphere() -> Descriptor {
    north_south_sphere_signed(1)
}

/// Source-sink sphere with the given node orientation type (+1 for the
/// rotation-like map, -1 for the reflection-like one).
pub fn north_south_sphere_signed(sigma: i8) -> Descriptor {
    let mut d = Descriptor::default();
    d.orbits.push(orbit("a", OrbitKind::Source, 1, node(sigma)));
    d.orbits.push(orbit("w", OrbitKind::Sink, 1, node(sigma)));
    d
}

/// The orientation-changing sphere model: two fixed sources, two fixed
/// sinks (all of negative type) and one period-2 saddle orbit of positive
/// type whose unstable separatrices run along the invariant circle.
pub fn psi0() -> Descriptor {
    let mut d = Descriptor::default();
    let a1 = 0; // north pole
    let a2 = 1; // south pole (origin of the chart)
    let w0 = 2; // sink at phi = 0
    let w1 = 3; // sink at phi = pi
    let s = 4; // saddle orbit {phi = pi/2, phi = 3pi/2}
    d.orbits.push(orbit("a1", OrbitKind::Source, 1, node(-1)));
    d.orbits.push(orbit("a2", OrbitKind::Source, 1, node(-1)));
    d.orbits.push(orbit("w0", OrbitKind::Sink, 1, node(-1)));
    d.orbits.push(orbit("w1", OrbitKind::Sink, 1, node(-1)));
    d.orbits.push(orbit("s", OrbitKind::Saddle, 2, saddle(1, 1)));
    // point 0: twists +1 (ambient gauge at the representative)
    attach(&mut d, sep(s, 0, Branch::UPlus), w0, 0, 1);
    attach(&mut d, sep(s, 0, Branch::UMinus), w1, 0, 1);
    attach(&mut d, sep(s, 0, Branch::SPlus), a1, 0, 1);
    attach(&mut d, sep(s, 0, Branch::SMinus), a2, 0, 1);
    // point 1: gauge is the reversed ambient orientation, twists -1
    attach(&mut d, sep(s, 1, Branch::UPlus), w0, 0, -1);
    attach(&mut d, sep(s, 1, Branch::UMinus), w1, 0, -1);
    attach(&mut d, sep(s, 1, Branch::SPlus), a1, 0, -1);
    attach(&mut d, sep(s, 1, Branch::SMinus), a2, 0, -1);
    d.rotations
        .insert((w0, 0), vec![sep(s, 0, Branch::UPlus), sep(s, 1, Branch::UPlus)]);
    d.rotations
        .insert((w1, 0), vec![sep(s, 0, Branch::UMinus), sep(s, 1, Branch::UMinus)]);
    d.rotations
        .insert((a1, 0), vec![sep(s, 0, Branch::SPlus), sep(s, 1, Branch::SPlus)]);
    d.rotations
        .insert((a2, 0), vec![sep(s, 0, Branch::SMinus), sep(s, 1, Branch::SMinus)]);
    d
}

/// Quotient of psi0 on the projective plane: three fixed points. The saddle
/// has type (-1,-1); its two unstable separatrices form a one-sided circle
/// through the sink, which the twist signs encode.
pub fn psitilde1() -> Descriptor {
    let mut d = Descriptor::default();
    let a = 0;
    let w = 1;
    let s = 2;
    d.orbits.push(orbit("at", OrbitKind::Source, 1, node(-1)));
    d.orbits.push(orbit("wt", OrbitKind::Sink, 1, node(-1)));
    d.orbits
        .push(orbit("st", OrbitKind::Saddle, 1, saddle(-1, -1)));
    attach(&mut d, sep(s, 0, Branch::UPlus), w, 0, 1);
    attach(&mut d, sep(s, 0, Branch::UMinus), w, 0, -1);
    attach(&mut d, sep(s, 0, Branch::SPlus), a, 0, 1);
    attach(&mut d, sep(s, 0, Branch::SMinus), a, 0, -1);
    d.rotations
        .insert((w, 0), vec![sep(s, 0, Branch::UPlus), sep(s, 0, Branch::UMinus)]);
    d.rotations
        .insert((a, 0), vec![sep(s, 0, Branch::SPlus), sep(s, 0, Branch::SMinus)]);
    d
}

/// The orientation-preserving torus product map: four fixed points of
/// positive type, a cellular wedge of two circles through the sink.
pub fn f1_torus() -> Descriptor {
    let mut d = Descriptor::default();
    let a = 0;
    let w = 1;
    let s1 = 2; // saddle at (0, 1/2), unstable along v = 1/2
    let s2 = 3; // saddle at (1/2, 0), unstable along u = 1/2
    d.orbits.push(orbit("a", OrbitKind::Source, 1, node(1)));
    d.orbits.push(orbit("w", OrbitKind::Sink, 1, node(1)));
    d.orbits.push(orbit("s1", OrbitKind::Saddle, 1, saddle(1, 1)));
    d.orbits.push(orbit("s2", OrbitKind::Saddle, 1, saddle(1, 1)));
    for s in [s1, s2] {
        attach(&mut d, sep(s, 0, Branch::UPlus), w, 0, 1);
        attach(&mut d, sep(s, 0, Branch::UMinus), w, 0, 1);
        attach(&mut d, sep(s, 0, Branch::SPlus), a, 0, 1);
        attach(&mut d, sep(s, 0, Branch::SMinus), a, 0, 1);
    }
    // CCW at the sink: east, north, west, south arrivals
    d.rotations.insert(
        (w, 0),
        vec![
            sep(s1, 0, Branch::UMinus),
            sep(s2, 0, Branch::UMinus),
            sep(s1, 0, Branch::UPlus),
            sep(s2, 0, Branch::UPlus),
        ],
    );
    d.rotations.insert(
        (a, 0),
        vec![
            sep(s2, 0, Branch::SPlus),
            sep(s1, 0, Branch::SMinus),
            sep(s2, 0, Branch::SMinus),
            sep(s1, 0, Branch::SPlus),
        ],
    );
    d
}

/// The orientation-changing torus model psi1 = A_hat o F1: fixed source and
/// sink of negative type and one period-2 saddle orbit of positive type.
pub fn psi1() -> Descriptor {
    let mut d = Descriptor::default();
    let a = 0;
    let w = 1;
    let s = 2; // orbit { (0,1/2), (1/2,0) }
    d.orbits.push(orbit("a", OrbitKind::Source, 1, node(-1)));
    d.orbits.push(orbit("w", OrbitKind::Sink, 1, node(-1)));
    d.orbits.push(orbit("s", OrbitKind::Saddle, 2, saddle(1, 1)));
    attach(&mut d, sep(s, 0, Branch::UPlus), w, 0, 1);
    attach(&mut d, sep(s, 0, Branch::UMinus), w, 0, 1);
    attach(&mut d, sep(s, 0, Branch::SPlus), a, 0, 1);
    attach(&mut d, sep(s, 0, Branch::SMinus), a, 0, 1);
    attach(&mut d, sep(s, 1, Branch::UPlus), w, 0, -1);
    attach(&mut d, sep(s, 1, Branch::UMinus), w, 0, -1);
    attach(&mut d, sep(s, 1, Branch::SPlus), a, 0, -1);
    attach(&mut d, sep(s, 1, Branch::SMinus), a, 0, -1);
    // CCW arrivals at the sink: east (pt0 U-), north (pt1 U-), west (pt0 U+),
    // south (pt1 U+)
    d.rotations.insert(
        (w, 0),
        vec![
            sep(s, 0, Branch::UMinus),
            sep(s, 1, Branch::UMinus),
            sep(s, 0, Branch::UPlus),
            sep(s, 1, Branch::UPlus),
        ],
    );
    // CCW arrivals at the source: east (pt1 S-), north (pt0 S-),
    // west (pt1 S+), south (pt0 S+)
    d.rotations.insert(
        (a, 0),
        vec![
            sep(s, 1, Branch::SMinus),
            sep(s, 0, Branch::SMinus),
            sep(s, 1, Branch::SPlus),
            sep(s, 0, Branch::SPlus),
        ],
    );
    d
}

/// The heteroclinic sphere model xi0: six fixed points of positive type and
/// one Smale edge s > s0. The spiral branch of s is recorded as a
/// heteroclinic reference crossing the ray branch of s0, and dually.
pub fn xi0() -> Descriptor {
    let mut d = Descriptor::default();
    let a1 = 0; // north pole
    let a2 = 1; // source inside the plus box, at (1/16, 0)
    let w = 2; // south pole (chart origin)
    let w0 = 3; // sink at (-16, 0)
    let s0 = 4; // saddle at (1/4, 0)
    let s = 5; // saddle at (-4, 0)
    d.orbits.push(orbit("a1", OrbitKind::Source, 1, node(1)));
    d.orbits.push(orbit("a2", OrbitKind::Source, 1, node(1)));
    d.orbits.push(orbit("w", OrbitKind::Sink, 1, node(1)));
    d.orbits.push(orbit("w0", OrbitKind::Sink, 1, node(1)));
    d.orbits.push(orbit("s0", OrbitKind::Saddle, 1, saddle(1, 1)));
    d.orbits.push(orbit("s", OrbitKind::Saddle, 1, saddle(1, 1)));
    // s0 at (1/4, 0): unstable vertical (both branches spiral into the
    // origin sink), stable horizontal: west germ reaches a2, east germ is
    // the heteroclinic ray.
    attach(&mut d, sep(s0, 0, Branch::UPlus), w, 0, 1);
    attach(&mut d, sep(s0, 0, Branch::UMinus), w, 0, 1);
    attach(&mut d, sep(s0, 0, Branch::SPlus), a2, 0, 1);
    d.ends.insert(
        sep(s0, 0, Branch::SMinus),
        Attachment::Het {
            target: s,
            crossed: Branch::UMinus,
        },
    );
    // s at (-4, 0): unstable horizontal: west germ reaches w0, east germ
    // spirals onto the closure of W^u(s0); stable vertical, both germs to N.
    attach(&mut d, sep(s, 0, Branch::UPlus), w0, 0, 1);
    d.ends.insert(
        sep(s, 0, Branch::UMinus),
        Attachment::Het {
            target: s0,
            crossed: Branch::SMinus,
        },
    );
    attach(&mut d, sep(s, 0, Branch::SPlus), a1, 0, 1);
    attach(&mut d, sep(s, 0, Branch::SMinus), a1, 0, 1);
    d.rotations.insert(
        (w, 0),
        vec![sep(s0, 0, Branch::UPlus), sep(s0, 0, Branch::UMinus)],
    );
    d.rotations.insert((w0, 0), vec![sep(s, 0, Branch::UPlus)]);
    d.rotations.insert(
        (a1, 0),
        vec![sep(s, 0, Branch::SPlus), sep(s, 0, Branch::SMinus)],
    );
    d.rotations.insert((a2, 0), vec![sep(s0, 0, Branch::SPlus)]);
    d.smale.insert((s, s0));
    d
}

/// All fixtures with stable names, in catalog order.
pub fn all() -> Vec<(&'static str, Descriptor)> {
    vec![
        ("psi0", psi0()),
        ("psitilde1", psitilde1()),
        ("F1_torus", f1_torus()),
        ("psi1", psi1()),
        ("xi0", xi0()),
        ("ns_sphere", north_south_sphere()),
    ]
}
