//! Results of the fast paths checked against naive recomputation.

use std::collections::{HashSet, VecDeque};

use psl3_core::catalogue::{self, Family, Params, Tuple};
use psl3_core::cgroup::{schlafli_chiral, ChiralTuple};
use psl3_core::grp::{schreier_sims_order, GroupHandle, PermAction, Perm, DEFAULT_CAP};
use psl3_core::{make_field, Pgl3, ProjMatrix};
use rand::{rngs::StdRng, Rng, SeedableRng};

/// Breadth-first closure using only multiplication and hashing.
fn naive_closure(g: &Pgl3, gens: &[ProjMatrix]) -> HashSet<ProjMatrix> {
    let mut seen = HashSet::from([g.identity()]);
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        for s in gens {
            let y = g.mul(&x, s);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Smallest `n > 0` with `m^n` the identity, by repeated multiplication.
fn naive_order(g: &Pgl3, m: &ProjMatrix) -> u64 {
    let mut x = *m;
    let mut n = 1;
    while !g.is_identity(&x) {
        x = g.mul(&x, m);
        n += 1;
    }
    n
}

fn random_matrix(g: &Pgl3, rng: &mut StdRng) -> ProjMatrix {
    let f = g.field();
    loop {
        let raw = std::array::from_fn(|_| f.elem(rng.gen_range(0..f.q())).unwrap());
        if let Ok(m) = g.canonicalize(raw) {
            return m;
        }
    }
}

#[test]
fn small_psl_orders_by_enumeration() {
    for (p, n, order) in [(2, 1, 168usize), (3, 1, 5616), (2, 2, 20160)] {
        let g = Pgl3::new(make_field(p, n).unwrap());
        let set = naive_closure(&g, &g.psl_generators());
        assert_eq!(set.len(), order);
        assert_eq!(g.psl_order(), order as u128);
    }
}

#[test]
fn schreier_sims_matches_closure_on_random_subgroups() {
    let mut rng = StdRng::seed_from_u64(7);
    for (p, n) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
        let g = Pgl3::new(make_field(p, n).unwrap());
        let mut tried = 0;
        while tried < 12 {
            // pairs of random elements of small order keep the closure small
            let gens: Vec<_> = (0..2).map(|_| random_matrix(&g, &mut rng)).collect();
            let h = GroupHandle::new(&g, gens.clone(), DEFAULT_CAP);
            if h.order() > 200_000 {
                continue;
            }
            tried += 1;
            assert_eq!(naive_closure(&g, &gens).len() as u128, h.order(), "q={}", g.q());
            assert_eq!(h.cross_check().unwrap(), Some(h.order()));
        }
    }
}

#[test]
fn permutation_and_matrix_chains_agree() {
    let g = Pgl3::new(make_field(3, 1).unwrap());
    let gens = g.psl_generators();
    let perms: Vec<Perm> = gens.iter().map(|m| Perm(g.permutation(m))).collect();
    let action = PermAction { degree: g.num_points() };
    assert_eq!(schreier_sims_order(&action, &perms), 5616);
}

#[test]
fn intersections_match_set_filter() {
    // THM1 at q=5: the two rank-3 parabolics meet in <s2>
    let inst = catalogue::build(Family::Thm1, 5, &Params::default()).unwrap();
    let g = &inst.pgl;
    let Tuple::Chiral(t) = &inst.tuple else { unreachable!() };
    let s = t.generators();
    let left = naive_closure(g, &s[..2]);
    let right = naive_closure(g, &s[1..]);
    let mid = naive_closure(g, &s[1..2]);
    let mut filtered: Vec<_> = left.intersection(&right).copied().collect();
    filtered.sort();
    let mut expected: Vec<_> = mid.into_iter().collect();
    expected.sort();
    assert_eq!(filtered, expected);
    // both code paths: enumerate-and-filter and the backtrack search with a tiny cap
    for cap in [DEFAULT_CAP, 10] {
        let l = GroupHandle::new(g, s[..2].to_vec(), cap);
        let r = GroupHandle::new(g, s[1..].to_vec(), cap);
        assert_eq!(l.intersect(&r).unwrap(), filtered, "cap {cap}");
    }
}

#[test]
fn thm2_parabolic_orders_by_enumeration() {
    let inst = catalogue::build(Family::Thm2, 7, &Params::default()).unwrap();
    let Tuple::Chiral(t) = &inst.tuple else { unreachable!() };
    let s = t.generators();
    let h = GroupHandle::new(&inst.pgl, s[1..3].to_vec(), DEFAULT_CAP);
    assert_eq!(h.order(), naive_closure(&inst.pgl, &s[1..3]).len() as u128);
}

#[test]
fn thm1_rotation_subgroup_at_seven() {
    let inst = catalogue::build(Family::Thm1, 7, &Params { x: Some("3".into()), ..Params::default() }).unwrap();
    let Tuple::Chiral(t) = &inst.tuple else { unreachable!() };
    let set = naive_closure(&inst.pgl, &t.generators()[1..]);
    assert_eq!(set.len(), 1176);
}

#[test]
fn schlafli_matches_repeated_multiplication() {
    for q in [5, 7, 8, 9] {
        let inst = catalogue::build(Family::Thm1, q, &Params::default()).unwrap();
        let g = &inst.pgl;
        let Tuple::Chiral(t) = &inst.tuple else { unreachable!() };
        let naive: Vec<u64> = t.generators().iter().map(|m| naive_order(g, m)).collect();
        assert_eq!(schlafli_chiral(g, t).unwrap().entries, naive);
    }
    let g = Pgl3::new(make_field(5, 1).unwrap());
    let (t, _) = catalogue::thm1_matrices(&g, g.field().from_int(2)).unwrap();
    let t: &ChiralTuple = &t;
    assert_eq!(schlafli_chiral(&g, t).unwrap().entries, vec![4, 8, 4]);
}

#[test]
fn regular_family_orders_by_enumeration() {
    let p = Params::default();
    for (fam, q, params) in [
        (Family::R3OddCase2, 5, p.clone()),
        (Family::R3OddCase3, 5, p.clone()),
        (Family::R3OddCase6, 5, p.clone()),
        (Family::R3OddCase7, 5, p.clone()),
        (Family::R3OddCase8, 5, p.clone()),
        (Family::R4Odd, 5, p.clone()),
        (Family::R4Even, 4, p.clone()),
        (Family::R3Even, 4, p.clone()),
        (Family::EvenTriangular, 4, p.clone()),
        (Family::EvenTriangular, 4, Params { rank: Some(3), case: Some(2), ..p.clone() }),
    ] {
        let inst = catalogue::build(fam, q, &params).unwrap();
        let n = naive_closure(&inst.pgl, &inst.generators()).len() as u128;
        assert_eq!(Some(n), inst.expect.group_order, "{fam}");
    }
}
