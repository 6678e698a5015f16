use super::sums::{connected_sum, mirror, power, Interleaving};
use super::*;
use crate::descriptor::fixtures;

#[test]
fn golden_fixtures_validate() {
    for (name, d) in fixtures::all() {
        let bad = d.validate();
        assert!(bad.is_empty(), "{name}: {bad:?}");
    }
}

#[test]
fn euler_characteristics_match_surfaces() {
    let cases = [
        ("psi0", 2),
        ("psitilde1", 1),
        ("F1_torus", 0),
        ("psi1", 0),
        ("xi0", 2),
        ("ns_sphere", 2),
    ];
    let all = fixtures::all();
    for (name, chi) in cases {
        let d = &all.iter().find(|(n, _)| *n == name).unwrap().1;
        assert_eq!(d.euler_characteristic(), chi, "{name}");
    }
}

#[test]
fn surface_of_fixtures() {
    let cases = [
        ("psi0", true, 0),
        ("psitilde1", false, 1),
        ("F1_torus", true, 1),
        ("psi1", true, 1),
        ("xi0", true, 0),
        ("ns_sphere", true, 0),
    ];
    let all = fixtures::all();
    for (name, orientable, genus) in cases {
        let d = &all.iter().find(|(n, _)| *n == name).unwrap().1;
        let s = surface_of(d).unwrap();
        assert_eq!(s.orientable, orientable, "{name} orientability");
        assert_eq!(s.genus, genus, "{name} genus");
    }
}

#[test]
fn validate_rejects_unstable_end_at_source() {
    let mut d = fixtures::psi0();
    let s = d.orbit_by_name("s").unwrap();
    let a1 = d.orbit_by_name("a1").unwrap();
    let sep = SepRef {
        saddle: s,
        point: 0,
        branch: Branch::UPlus,
    };
    d.ends.insert(
        sep,
        Attachment::Node {
            node: a1,
            point: 0,
            twist: 1,
        },
    );
    let bad = d.validate();
    assert!(
        bad.iter().any(|v| v.contains("must end at a Sink")),
        "{bad:?}"
    );
}

#[test]
fn validate_rejects_f_action_mismatch() {
    let mut d = fixtures::psi0();
    let s = d.orbit_by_name("s").unwrap();
    let w0 = d.orbit_by_name("w0").unwrap();
    let w1 = d.orbit_by_name("w1").unwrap();
    // point 1's U+ must follow point 0's U+ to the same sink orbit; move it
    let sep = SepRef {
        saddle: s,
        point: 1,
        branch: Branch::UPlus,
    };
    d.ends.insert(
        sep,
        Attachment::Node {
            node: w1,
            point: 0,
            twist: -1,
        },
    );
    d.rotations
        .get_mut(&(w0, 0))
        .unwrap()
        .retain(|e| *e != sep);
    d.rotations.get_mut(&(w1, 0)).unwrap().push(sep);
    let bad = d.validate();
    assert!(bad.iter().any(|v| v.contains("f-action mismatch")), "{bad:?}");
}

#[test]
fn validate_rejects_twist_equivariance_breakage() {
    let mut d = fixtures::psi1();
    let s = d.orbit_by_name("s").unwrap();
    let sep = SepRef {
        saddle: s,
        point: 1,
        branch: Branch::UPlus,
    };
    let w = d.orbit_by_name("w").unwrap();
    d.ends.insert(
        sep,
        Attachment::Node {
            node: w,
            point: 0,
            twist: 1, // must be -1 in the normalized gauge
        },
    );
    let bad = d.validate();
    assert!(bad.iter().any(|v| v.contains("f-action mismatch")), "{bad:?}");
}

#[test]
fn fixtures_are_self_isomorphic_and_mutually_distinct() {
    let all = fixtures::all();
    for (name, d) in &all {
        assert!(isomorphic(d, d), "{name} not isomorphic to itself");
    }
    assert!(!isomorphic(&fixtures::psi0(), &fixtures::psi1()));
    assert!(!isomorphic(&fixtures::f1_torus(), &fixtures::psi1()));
    assert!(!isomorphic(&fixtures::xi0(), &fixtures::psi0()));
}

#[test]
fn io_round_trip_is_isomorphic() {
    for (name, d) in fixtures::all() {
        let text = io::write_str(&d);
        let back = io::read_str(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(isomorphic(&d, &back), "{name} round trip");
        assert_eq!(d.ends, back.ends, "{name} ends differ");
        assert_eq!(d.rotations, back.rotations, "{name} rotations differ");
    }
}

#[test]
fn io_reports_missing_rotation_section() {
    let d = fixtures::psi0();
    let mut v = io::to_json(&d);
    v.as_object_mut().unwrap().remove("rotation");
    let err = io::read_str(&serde_json::to_string(&v).unwrap()).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("rotation"), "{msg}");
}

#[test]
fn io_rejects_bad_version() {
    let d = fixtures::psi0();
    let mut v = io::to_json(&d);
    v.as_object_mut()
        .unwrap()
        .insert("version".into(), "msd-0".into());
    let err = io::read_str(&serde_json::to_string(&v).unwrap()).unwrap_err();
    assert!(err.to_string().contains("msd-1"));
}

#[test]
fn xi0_round_trip_keeps_smale_edge() {
    let d = fixtures::xi0();
    let back = io::read_str(&io::write_str(&d)).unwrap();
    let s = back.orbit_by_name("s").unwrap();
    let s0 = back.orbit_by_name("s0").unwrap();
    assert!(back.smale.contains(&(s, s0)));
}

#[test]
fn mirror_preserves_validity() {
    for (name, d) in fixtures::all() {
        let m = mirror(&d);
        let bad = m.validate();
        assert!(bad.is_empty(), "{name}: {bad:?}");
        assert!(
            surface_of(&m).unwrap().orientable == surface_of(&d).unwrap().orientable,
            "{name}: mirror changed orientability"
        );
    }
}

#[test]
fn power_one_is_identity() {
    let d = fixtures::psi1();
    let p = power(&d, 1).unwrap();
    assert!(isomorphic(&d, &p));
}

#[test]
fn power_two_splits_the_psi1_saddle_orbit() {
    let d = fixtures::psi1();
    let p = power(&d, 2).unwrap();
    assert!(p.validate().is_empty());
    let saddles = p.saddle_orbits();
    assert_eq!(saddles.len(), 2);
    for s in saddles {
        assert_eq!(p.orbits[s].period, 1);
        assert_eq!(
            p.orbits[s].otype,
            OrientationType::Saddle { nu: 1, lambda: 1 }
        );
    }
    for o in &p.orbits {
        if o.kind != OrbitKind::Saddle {
            assert_eq!(o.otype, OrientationType::Node { sigma: 1 }, "{}", o.name);
        }
    }
    // same carrier surface
    let s = surface_of(&p).unwrap();
    assert!(s.orientable);
    assert_eq!(s.genus, 1);
}

#[test]
fn power_two_of_psitilde1_turns_types_positive() {
    let d = fixtures::psitilde1();
    let p = power(&d, 2).unwrap();
    assert!(p.validate().is_empty());
    let st = p.orbit_by_name("st").unwrap();
    assert_eq!(
        p.orbits[st].otype,
        OrientationType::Saddle { nu: 1, lambda: 1 }
    );
    let surf = surface_of(&p).unwrap();
    assert!(!surf.orientable);
    assert_eq!(surf.genus, 1);
}

#[test]
fn sum_psi1_with_psi1_gives_genus_two() {
    let d1 = fixtures::psi1();
    let d2 = fixtures::psi1();
    let w = d1.orbit_by_name("w").unwrap();
    let a = d2.orbit_by_name("a").unwrap();
    let sum = connected_sum(&d1, w, &d2, a, Interleaving::default()).unwrap();
    assert!(sum.validate().is_empty());
    // one source, one sink (both negative), two period-2 positive saddles
    assert_eq!(sum.point_count(OrbitKind::Sink), 1);
    assert_eq!(sum.point_count(OrbitKind::Source), 1);
    assert_eq!(sum.saddle_orbits().len(), 2);
    for s in sum.saddle_orbits() {
        assert_eq!(sum.orbits[s].period, 2);
        assert_eq!(
            sum.orbits[s].otype,
            OrientationType::Saddle { nu: 1, lambda: 1 }
        );
    }
    assert_eq!(sum.euler_characteristic(), -2);
    let surf = surface_of(&sum).unwrap();
    assert!(surf.orientable, "psi2 must live on an orientable surface");
    assert_eq!(surf.genus, 2);
}

#[test]
fn sum_psitilde1_with_psitilde1_gives_nonorientable_genus_two() {
    let d1 = fixtures::psitilde1();
    let d2 = fixtures::psitilde1();
    let w = d1.orbit_by_name("wt").unwrap();
    let a = d2.orbit_by_name("at").unwrap();
    let sum = connected_sum(&d1, w, &d2, a, Interleaving::default()).unwrap();
    assert!(sum.validate().is_empty());
    assert_eq!(sum.point_count(OrbitKind::Sink), 1);
    assert_eq!(sum.point_count(OrbitKind::Source), 1);
    assert_eq!(sum.saddle_orbits().len(), 2);
    for s in sum.saddle_orbits() {
        assert_eq!(sum.orbits[s].period, 1);
        assert_eq!(
            sum.orbits[s].otype,
            OrientationType::Saddle { nu: -1, lambda: -1 }
        );
    }
    let surf = surface_of(&sum).unwrap();
    assert!(!surf.orientable);
    assert_eq!(surf.genus, 2);
}

#[test]
fn sum_with_north_south_sphere_is_identity() {
    let d1 = fixtures::psi1();
    let ns = fixtures::north_south_sphere_signed(-1);
    let w = d1.orbit_by_name("w").unwrap();
    let a = ns.orbit_by_name("a").unwrap();
    let sum = connected_sum(&d1, w, &ns, a, Interleaving::default()).unwrap();
    assert!(sum.validate().is_empty());
    assert!(isomorphic(&sum, &d1), "gluing a source-sink sphere must not change the dynamics");
}

#[test]
fn sum_rejects_type_mismatch() {
    let d1 = fixtures::psi1(); // sink has sigma = -1
    let ns = fixtures::north_south_sphere(); // source has sigma = +1
    let w = d1.orbit_by_name("w").unwrap();
    let a = ns.orbit_by_name("a").unwrap();
    let err = connected_sum(&d1, w, &ns, a, Interleaving::default()).unwrap_err();
    assert_eq!(err, super::sums::SumError::OrientationTypeMismatch);
}

#[test]
fn chi_is_additive_under_sums() {
    let d1 = fixtures::psi0();
    let d2 = fixtures::psi1();
    let w0 = d1.orbit_by_name("w0").unwrap();
    let a = d2.orbit_by_name("a").unwrap();
    let sum = connected_sum(&d1, w0, &d2, a, Interleaving::default()).unwrap();
    assert_eq!(
        sum.euler_characteristic(),
        d1.euler_characteristic() + d2.euler_characteristic() - 2
    );
}
