use psl3_core::catalogue::{self, eval_param, Family, Params, Tuple};
use psl3_core::verify::{verify_family, ChiralityStatus, Status, VerificationReport, VerifyOptions};
use psl3_core::{make_field, Fe, Pgl3};

fn run(family: Family, q: u32, params: Params) -> VerificationReport {
    let opts = VerifyOptions { timings: false, ..VerifyOptions::default() };
    verify_family(family, q, &params, &opts).unwrap()
}

#[test]
fn thm1_at_seven() {
    let r = run(Family::Thm1, 7, Params { x: Some("3".into()), ..Params::default() });
    assert_eq!(r.schlafli, vec![6, 4, 6]);
    assert_eq!(r.group_order, Some(1876896));
    assert_eq!(r.checks.chirality, ChiralityStatus::Chiral);
    assert!(r.expectations_met, "{:?}", r.mismatches);
}

#[test]
fn thm1_geometry_at_seven() {
    let f = make_field(7, 1).unwrap();
    let g = Pgl3::new(f.clone());
    let x = f.from_int(3);
    let (t, _) = catalogue::thm1_matrices(&g, x).unwrap();
    // s1 s2 is a homology with axis Z = 0 and center (1, 1 + x^-1, 2)
    let (center, axis) = g.center_axis(&t.tau(1, 2)).unwrap();
    let xi = f.inv(x).unwrap();
    assert_eq!(center, g.normalize([Fe::ONE, f.add(Fe::ONE, xi), f.from_int(2)]).unwrap());
    assert_eq!(axis, g.point([0, 0, 1]).unwrap());
    let mut fixed = g.fixed_points(&t.sigma(3));
    fixed.sort();
    let mut expected = vec![
        g.normalize([x, f.add(Fe::ONE, x), x]).unwrap(),
        g.point([0, 1, 0]).unwrap(),
        g.point([0, 0, 1]).unwrap(),
    ];
    expected.sort();
    assert_eq!(fixed, expected);
}

#[test]
fn thm1_rejects_bad_parameters() {
    assert!(catalogue::build(Family::Thm1, 4, &Params::default()).is_err());
    // 2 has order 3 in GF(7)
    assert!(catalogue::build(Family::Thm1, 7, &Params { x: Some("2".into()), ..Params::default() }).is_err());
}

#[test]
fn thm2_variants_at_seven() {
    for k in [1, -1] {
        for i in [1, 2] {
            let r = run(Family::Thm2, 7, Params { k: Some(k), i: Some(i), ..Params::default() });
            let expected = if k == 1 { vec![3, 6, 6, 3] } else { vec![3, 6, 3, 3] };
            assert_eq!(r.schlafli, expected);
            assert_eq!(r.checks.chirality, ChiralityStatus::Chiral);
            assert!(r.expectations_met, "k={k} i={i}: {:?}", r.mismatches);
        }
    }
}

#[test]
fn thm2_needs_a_cube_root() {
    assert!(catalogue::build(Family::Thm2, 5, &Params::default()).is_err());
    assert!(catalogue::build(Family::Thm2, 11, &Params::default()).is_err());
    assert!(catalogue::build(Family::Thm2, 7, &Params { k: Some(2), ..Params::default() }).is_err());
}

#[test]
fn expected_failures_fail() {
    for (fam, q, params) in [
        (Family::R3OddCase1, 7, Params::default()),
        (Family::R3OddCase4, 5, Params::default()),
        (Family::R4Odd, 5, Params { case: Some(2), ..Params::default() }),
        (Family::EvenTriangular, 4, Params { rank: Some(3), case: Some(2), ..Params::default() }),
    ] {
        let r = run(fam, q, params);
        assert!(!r.is_polytope(), "{fam}");
        assert!(r.expectations_met, "{fam}: {:?}", r.mismatches);
    }
}

#[test]
fn dihedral_families() {
    for (fam, q, params, order) in [
        (Family::DihA, 8, Params { a: Some("X".into()), ..Params::default() }, 4),
        (Family::DihB, 7, Params::default(), 4),
        (Family::Dih1, 11, Params { x: Some("2".into()), ..Params::default() }, 20),
        (Family::Dih2, 7, Params::default(), 14),
        (Family::Dih3, 7, Params { sign: Some(1), ..Params::default() }, 14),
        (Family::Dih4, 7, Params::default(), 8),
        (Family::Dih4, 7, Params { x: Some("3".into()), ..Params::default() }, 16),
    ] {
        let r = run(fam, q, params);
        assert_eq!(r.group_order, Some(order), "{fam}");
        assert_eq!(r.group_order, Some(2 * r.schlafli[0] as u128));
        assert!(r.is_polytope(), "{fam}");
        assert!(r.expectations_met, "{fam}: {:?}", r.mismatches);
    }
}

#[test]
fn conic_family_exceptional_groups() {
    for (q, a, b, order) in [
        (7, "-1/2", "-1/2", 24),
        (7, "0", "-1/2", 24),
        (11, "-1/2", "(-1+X)/4", 60),
        (11, "(-1+X)/4", "(-1-X)/4", 60),
        (19, "(-1-X)/4", "-1/2", 60),
    ] {
        let r = run(Family::R3Conic, q, Params { a: Some(a.into()), b: Some(b.into()), ..Params::default() });
        assert_eq!(r.group_order, Some(order), "q={q} a={a} b={b}");
        assert!(r.facts["form_preserved"].holds);
        assert!(r.expectations_met, "{:?}", r.mismatches);
    }
}

#[test]
fn conic_form_needs_nonzero_denominators() {
    let f = make_field(5, 1).unwrap();
    let g = Pgl3::new(f.clone());
    assert!(catalogue::conic_rho2(&g, f.from_int(-1), f.from_int(1)).is_err());
}

#[test]
fn even_rank_three_branches() {
    // b = a gives the affine group as well
    let r = run(Family::R3Even, 4, Params { a: Some("X".into()), b: Some("X".into()), ..Params::default() });
    assert!(r.expectations_met, "{:?}", r.mismatches);
    // neither branch condition: no prediction, still verifiable
    let r = run(Family::R3Even, 4, Params { a: Some("X".into()), b: Some("1".into()), ..Params::default() });
    assert_eq!(r.expected.group_order, None);
}

#[test]
fn rank4_odd_third_case_order() {
    let r = run(Family::R4Odd, 7, Params { case: Some(3), ..Params::default() });
    // 4p^2: the dihedral square, not the dihedral group of order 2p
    assert_eq!(r.group_order, Some(196));
}

#[test]
fn rank6_witnesses() {
    let r = run(Family::Rank6WitnessEven, 8, Params::default());
    assert!(r.facts["common_fixed_point"].holds);
    for q in [3, 5, 7] {
        let r = run(Family::Rank6WitnessOdd, q, Params::default());
        assert!(!r.facts["distant_generators_commute"].holds);
        assert!(r.expectations_met);
    }
    let r = run(Family::Rank6WitnessOdd, 7, Params { a: Some("2".into()), ..Params::default() });
    assert!(!r.facts["distant_generators_commute"].holds);
    assert!(catalogue::build(Family::Rank6WitnessEven, 5, &Params::default()).is_err());
    assert!(catalogue::build(Family::Rank6WitnessOdd, 4, &Params::default()).is_err());
}

#[test]
fn instances_expose_tuples() {
    let inst = catalogue::build(Family::R4Odd, 5, &Params::default()).unwrap();
    assert!(matches!(inst.tuple, Tuple::Regular(ref t) if t.rank() == 4));
    assert_eq!(inst.params["a"], "2");
    let f = make_field(11, 1).unwrap();
    assert_eq!(eval_param(&f, "(-1-X)/4").unwrap(), f.from_int(7));
}

#[test]
fn reports_round_trip_through_json() {
    let r = run(Family::Thm1, 5, Params::default());
    let json = serde_json::to_string(&r).unwrap();
    let back: VerificationReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
    assert_eq!(r.checks.string, Status::Pass);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in ["family", "q", "params", "rank", "schlafli", "checks", "witnesses", "group_order"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}
