use super::*;
use crate::descriptor::fixtures;
use crate::families;
use SurfaceType::{KleinBottle as K, Torus as T};

fn cls(surface: SurfaceType, multiplicity: usize) -> ComponentClass {
    ComponentClass {
        surface,
        multiplicity,
    }
}

fn summary_of(d: &Descriptor, names: &[&str]) -> CharSpaceSummary {
    let sigma = SigmaSet(
        names
            .iter()
            .map(|n| d.orbit_by_name(n).unwrap())
            .collect(),
    );
    analyze_sigma_best(d, &sigma).unwrap().summary().canonical()
}

#[test]
fn psi0_table() {
    let d = fixtures::psi0();
    assert_eq!(enumerate_valid_sigma(&d).len(), 2);
    assert_eq!(summary_of(&d, &[]).classes, vec![cls(K, 1), cls(K, 1)]);
    assert_eq!(summary_of(&d, &["s"]).classes, vec![cls(K, 1), cls(K, 1)]);
    let (connected, cert) = has_connected_charspace(&d).unwrap();
    assert!(!connected);
    assert!(cert.rows.iter().all(|r| r.count == 2));
}

#[test]
fn psitilde1_table() {
    let d = fixtures::psitilde1();
    assert_eq!(summary_of(&d, &[]).classes, vec![cls(K, 1)]);
    assert_eq!(summary_of(&d, &["st"]).classes, vec![cls(K, 1)]);
    let (connected, cert) = has_connected_charspace(&d).unwrap();
    assert!(connected);
    assert_eq!(cert.witness, Some(vec![]));
}

#[test]
fn f1_torus_table() {
    let d = fixtures::f1_torus();
    assert_eq!(summary_of(&d, &[]).classes, vec![cls(T, 1)]);
    assert_eq!(summary_of(&d, &["s1"]).classes, vec![cls(T, 1), cls(T, 1)]);
    assert_eq!(summary_of(&d, &["s2"]).classes, vec![cls(T, 1), cls(T, 1)]);
    assert_eq!(summary_of(&d, &["s1", "s2"]).classes, vec![cls(T, 1)]);
    let (connected, _) = has_connected_charspace(&d).unwrap();
    assert!(connected);
}

#[test]
fn psi1_table() {
    let d = fixtures::psi1();
    assert_eq!(summary_of(&d, &[]).classes, vec![cls(K, 1)]);
    assert_eq!(summary_of(&d, &["s"]).classes, vec![cls(K, 1)]);
    let (connected, cert) = has_connected_charspace(&d).unwrap();
    assert!(connected);
    assert_eq!(cert.witness, Some(vec![]));
}

#[test]
fn xi0_table() {
    let d = fixtures::xi0();
    let sigmas = enumerate_valid_sigma(&d);
    let names: Vec<Vec<String>> = sigmas.iter().map(|s| s.names(&d)).collect();
    assert_eq!(
        names,
        vec![
            Vec::<String>::new(),
            vec!["s0".to_string()],
            vec!["s0".to_string(), "s".to_string()]
        ],
        "{{s}} alone must be rejected"
    );
    assert_eq!(summary_of(&d, &[]).classes, vec![cls(T, 1), cls(T, 1)]);
    assert_eq!(
        summary_of(&d, &["s0"]).classes,
        vec![cls(T, 1), cls(T, 1), cls(T, 1)]
    );
    assert_eq!(
        summary_of(&d, &["s0", "s"]).classes,
        vec![cls(T, 1), cls(T, 1)]
    );
    let (connected, cert) = has_connected_charspace(&d).unwrap();
    assert!(!connected);
    assert_eq!(
        cert.rows.iter().map(|r| r.count).collect::<Vec<_>>(),
        vec![2, 3, 2]
    );
}

#[test]
fn ns_sphere_table() {
    let d = fixtures::north_south_sphere();
    assert_eq!(summary_of(&d, &[]).classes, vec![cls(T, 1)]);
    let (connected, _) = has_connected_charspace(&d).unwrap();
    assert!(connected);
}

#[test]
fn prop1_specialization_on_fixtures() {
    // at sigma = empty: one class per sink orbit, torus iff sigma = +1,
    // multiplicity the orbit period; dually at full sigma for sources
    for (name, d) in fixtures::all() {
        let empty = analyze_sigma_best(&d, &SigmaSet::empty()).unwrap();
        let mut expect: Vec<ComponentClass> = d
            .orbits
            .iter()
            .filter(|o| o.kind == crate::descriptor::OrbitKind::Sink)
            .map(|o| {
                cls(
                    if o.otype.return_sign() == 1 { T } else { K },
                    o.period,
                )
            })
            .collect();
        expect.sort();
        assert_eq!(
            empty.summary().canonical().classes,
            expect,
            "{name} at empty sigma"
        );
        let full = SigmaSet(d.saddle_orbits().into_iter().collect());
        let full_an = analyze_sigma_best(&d, &full).unwrap();
        let mut expect_src: Vec<ComponentClass> = d
            .orbits
            .iter()
            .filter(|o| o.kind == crate::descriptor::OrbitKind::Source)
            .map(|o| {
                cls(
                    if o.otype.return_sign() == 1 { T } else { K },
                    o.period,
                )
            })
            .collect();
        expect_src.sort();
        assert_eq!(
            full_an.summary().canonical().classes,
            expect_src,
            "{name} at full sigma"
        );
    }
}

#[test]
fn dual_consistency_on_fixtures() {
    for (name, d) in fixtures::all() {
        let bad = dual_consistency_check(&d);
        assert!(bad.is_empty(), "{name}: {bad:?}");
    }
}

#[test]
fn tier2_reproduces_tier1_on_f1() {
    let d = fixtures::f1_torus();
    for sigma in enumerate_valid_sigma(&d) {
        let (summary, transitions) = charspace_tier2(&d, &sigma).unwrap();
        let direct = charspace_of_sigma(&d, &sigma).unwrap();
        assert_eq!(summary.canonical(), direct.canonical());
        assert_eq!(transitions.len(), sigma.0.len());
    }
}

#[test]
fn tier2_chain_for_xi0_full_sigma() {
    let d = fixtures::xi0();
    let s0 = d.orbit_by_name("s0").unwrap();
    let s = d.orbit_by_name("s").unwrap();
    let (summary, transitions) = charspace_tier2(&d, &SigmaSet::of(&[s0, s])).unwrap();
    assert_eq!(summary.canonical().classes, vec![cls(T, 1), cls(T, 1)]);
    assert_eq!(transitions.len(), 2);
    assert_eq!(transitions[0].added, "s0");
    assert_eq!(transitions[0].case, CorollaryCase::PosTorusToTwoTori);
    assert_eq!(transitions[0].count_after, 3);
    assert_eq!(transitions[1].added, "s");
    assert_eq!(transitions[1].case, CorollaryCase::PosTwoToriToTorus);
    assert_eq!(transitions[1].count_after, 2);
}

#[test]
fn conformance_psi0() {
    let d = fixtures::psi0();
    let report = corollary_conformance(&d).unwrap();
    assert_eq!(report.entries.len(), 1);
    assert_eq!(
        report.entries[0].case,
        Some(CorollaryCase::PosTwoKleinsToTwoKleins)
    );
    assert!(report.violations().is_empty());
}

#[test]
fn conformance_psitilde1_uses_negative_case() {
    let d = fixtures::psitilde1();
    let report = corollary_conformance(&d).unwrap();
    assert_eq!(report.entries.len(), 1);
    assert_eq!(report.entries[0].case, Some(CorollaryCase::NegKleinToKlein));
}

#[test]
fn conformance_ns_sphere_is_empty() {
    let d = fixtures::north_south_sphere();
    let report = corollary_conformance(&d).unwrap();
    assert!(report.entries.is_empty());
}

#[test]
fn f_g_has_no_connected_charspace_small() {
    for g in 0..=2 {
        let d = families::f_g(g).unwrap();
        assert!(d.validate().is_empty(), "f_{g} invalid");
        let (connected, cert) = has_connected_charspace(&d).unwrap();
        assert!(!connected, "f_{g} must not be connected");
        assert!(cert.rows.iter().all(|r| r.count >= 2), "f_{g}: {cert:?}");
        // sigma = empty: exactly two Klein bottles
        assert_eq!(cert.rows[0].classes, vec![cls(K, 1), cls(K, 1)]);
        assert_eq!(cert.rows.len(), 1 << (g + 1));
    }
}

#[test]
fn ftilde_q_has_no_connected_charspace_small() {
    for q in 1..=2 {
        let d = families::ftilde_q(q).unwrap();
        assert!(d.validate().is_empty(), "ftilde_{q} invalid");
        let surf = crate::descriptor::surface_of(&d).unwrap();
        assert!(!surf.orientable);
        assert_eq!(surf.genus, q as i64);
        let (connected, cert) = has_connected_charspace(&d).unwrap();
        assert!(!connected, "ftilde_{q} must not be connected");
        assert!(cert.rows.iter().all(|r| r.count >= 2));
        assert_eq!(cert.rows[0].classes, vec![cls(K, 1), cls(K, 1)]);
    }
}

#[test]
fn xi_family_tables_small() {
    for (label, d) in [
        ("xi_1", families::xi_g(1).unwrap()),
        ("xitilde_1", families::xitilde_q(1).unwrap()),
    ] {
        assert!(d.validate().is_empty(), "{label} invalid");
        let (connected, cert) = has_connected_charspace(&d).unwrap();
        assert!(!connected, "{label} must not be connected");
        // empty sigma: two components; sigma = {s0}: three
        assert_eq!(cert.rows[0].count, 2, "{label} empty sigma");
        let s0_row = cert
            .rows
            .iter()
            .find(|r| r.sigma == vec!["s0".to_string()])
            .unwrap();
        assert_eq!(s0_row.count, 3, "{label} s0 row");
        // {s} alone is invalid and must not appear
        assert!(
            !cert.rows.iter().any(|r| r.sigma == vec!["s".to_string()]),
            "{label} lists the invalid sigma"
        );
    }
}
