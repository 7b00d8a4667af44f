mod common;

use std::sync::{Arc, OnceLock};

use common::suites::{self, corpus};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regmaps::classify::SearchOptions;
use regmaps::families::{self, FamilyParams};
use regmaps::fields::{self, Gl2Matrix};
use regmaps::groups::{triple_isomorphic, Closure, FiniteGroup, GroupElement};

#[test]
fn corpus_duality_and_euler_characteristic() {
    for m in corpus() {
        let d = m.dual();
        let (x, y) = m.map_type();
        assert_eq!(d.map_type(), (y, x));
        assert_eq!(d.dual().triple(), m.triple());
        assert_eq!(d.euler_characteristic().unwrap(), m.euler_characteristic().unwrap());
        assert_eq!(d.is_orientable(), m.is_orientable());
        assert_eq!(m.euler_characteristic().unwrap(), m.euler_characteristic_by_orbits());
    }
}

#[test]
fn corpus_orientability_and_genus() {
    for m in corpus() {
        let idx = m.even_word_index();
        assert!(idx == 1 || idx == 2);
        assert_eq!(m.is_orientable(), idx == 2);
        let chi = m.euler_characteristic_by_orbits();
        if chi % 2 != 0 {
            assert!(!m.is_orientable());
        }
        let g = m.genus() as i64;
        if m.is_orientable() {
            assert_eq!(2 * g, 2 - chi);
        } else {
            assert_eq!(g, 2 - chi);
        }
        assert_eq!(m.invariants().edges * 4, m.group().order());
    }
}

#[test]
fn corpus_family_types_non_orientable() {
    for (j, k) in [(3u32, 5u32), (5, 9), (7, 7)] {
        let m = families::build_m1(j, k).unwrap();
        assert_eq!(m.map_type(), (2 * j as u64, 2 * k as u64));
        assert!(!m.is_orientable());
    }
    for m in corpus().iter().filter(|m| m.group().name().starts_with("G")) {
        assert!(!m.is_orientable(), "{}", m.group().name());
    }
}

#[test]
fn triple_isomorphic_reflexive_symmetric_conjugation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let maps = corpus();
    for (i, a) in maps.iter().enumerate() {
        let g = a.group();
        assert!(triple_isomorphic(g, &a.triple(), g, &a.triple()).unwrap());
        let els = g.elements().unwrap();
        let h = &els[rng.gen_range(0..els.len())];
        let conj = a.triple().map(|e| g.conjugate(&e, h));
        assert!(triple_isomorphic(g, &a.triple(), g, &conj).unwrap());
        for b in &maps[i + 1..(i + 4).min(maps.len())] {
            let ab = triple_isomorphic(g, &a.triple(), b.group(), &b.triple()).unwrap();
            let ba = triple_isomorphic(b.group(), &b.triple(), g, &a.triple()).unwrap();
            assert_eq!(ab, ba);
        }
    }
}

fn families_under_test() -> Vec<Arc<FiniteGroup>> {
    let mut out: Vec<Arc<FiniteGroup>> = [
        "g1:j=3,k=5",
        "g2:x=1,n=6,p=5",
        "g2:x=0,n=4,p=7",
        "g3:u=9",
        "psl:f=7",
        "pgl:f=7",
        "zdpgl:d=3,f=5",
        "dihedral:n=6",
        "cyclic:n=10",
    ]
    .iter()
    .map(|s| s.parse::<FamilyParams>().unwrap().build().unwrap())
    .collect();
    out.push(Arc::new(FiniteGroup::dihedral(9).unwrap()));
    out
}

#[test]
fn generator_closure_matches_declared_order() {
    for g in families_under_test() {
        let gens = g.generator_list();
        let n = g.closure(&gens, None).len().unwrap() as u64;
        assert_eq!(n, g.order(), "{}", g.name());
    }
    let orders = [
        ("g1:j=5,k=7", 140),
        ("g2:x=1,n=6,p=5", 300),
        ("g3:u=15", 120),
        ("zdpgl:d=5,f=7", 1680),
    ];
    for (spec, order) in orders {
        let f: FamilyParams = spec.parse().unwrap();
        assert_eq!(f.order(), order);
        assert_eq!(f.build().unwrap().elements().unwrap().len() as u64, order);
    }
}

fn relation_holds(g: &FiniteGroup, word: &[&GroupElement]) -> bool {
    let prod = word.iter().fold(g.identity(), |acc, e| g.mul(&acc, e));
    g.is_identity(&prod)
}

#[test]
fn family_presentations_hold() {
    // G1(j,k)
    let g = families::build_g1(5, 7).unwrap();
    let [a, b, c, d] = ["a", "b", "c", "d"].map(|n| g.generator(n).unwrap().clone());
    for x in [&a, &b, &c, &d] {
        assert!(g.is_involution(x));
    }
    assert_eq!(g.element_order(&g.mul(&a, &b)), 5);
    assert_eq!(g.element_order(&g.mul(&c, &d)), 7);
    for (x, y) in [(&a, &c), (&a, &d), (&b, &c), (&b, &d)] {
        assert_eq!(g.mul(x, y), g.mul(y, x));
    }
    // G2(x,n,p): a^c = a^-1, b^c = a^x b, a^d = b, b^d = a
    for (xv, n, p) in [(1u64, 6u64, 5u64), (0, 4, 7)] {
        let g = families::build_g2(xv, n, p).unwrap();
        let [a, b, c, d] = ["a", "b", "c", "d"].map(|s| g.generator(s).unwrap().clone());
        assert_eq!(g.element_order(&a), p);
        assert_eq!(g.element_order(&b), p);
        assert!(g.is_involution(&c) && g.is_involution(&d));
        assert!(g.is_identity(&g.pow(&g.mul(&c, &d), n)));
        assert_eq!(g.mul(&a, &b), g.mul(&b, &a));
        assert_eq!(g.conjugate(&a, &c), g.inv(&a));
        assert_eq!(g.conjugate(&b, &c), g.mul(&g.pow(&a, xv), &b));
        assert_eq!(g.conjugate(&a, &d), b);
        assert_eq!(g.conjugate(&b, &d), a);
    }
    // G3(u): a^c = b, b^c = a, a^d = a, b^d = ab
    let g = families::build_g3(9).unwrap();
    let [a, b, c, d] = ["a", "b", "c", "d"].map(|s| g.generator(s).unwrap().clone());
    for x in [&a, &b, &c, &d] {
        assert!(g.is_involution(x));
    }
    assert!(relation_holds(&g, &[&a, &b, &a, &b]));
    assert!(g.is_identity(&g.pow(&g.mul(&c, &d), 9)));
    assert_eq!(g.conjugate(&a, &c), b);
    assert_eq!(g.conjugate(&b, &c), a);
    assert_eq!(g.conjugate(&a, &d), a);
    assert_eq!(g.conjugate(&b, &d), g.mul(&a, &b));
}

#[test]
fn m2_maps_pairwise_distinct_across_snp() {
    let mut checked = 0;
    for p in [7u64, 11, 13] {
        for n in [6u64, 8, 10, 12] {
            let xs = fields::s_set(n, p).unwrap().members;
            let maps: Vec<_> = xs.iter().map(|&x| families::build_m2(x, n, p).unwrap()).collect();
            for i in 0..maps.len() {
                for j in i + 1..maps.len() {
                    assert!(!maps[i].is_isomorphic(&maps[j]).unwrap());
                    assert!(!maps[i].is_isomorphic(&maps[j].dual()).unwrap());
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn lift_quotient_recovers_base() {
    let base = regmaps::classify::find_lift_base(7, 3, 8, &SearchOptions::default())
        .unwrap()
        .unwrap();
    for power in [1, 2] {
        let lifted = families::lift_map(5, &base, power).unwrap();
        let alpha = lifted.group().generator("alpha").unwrap().clone();
        let normal: Vec<_> = (0..5).map(|k| lifted.group().pow(&alpha, k)).collect();
        let q = lifted.quotient(&normal).unwrap();
        assert_eq!(q.group().order(), base.group().order());
        assert_eq!(q.map_type(), base.map_type());
        assert!(q.is_isomorphic(&base).unwrap());
        assert!(lifted.is_regular_cover(&base).unwrap().is_some());
    }
    let a = families::lift_map(5, &base, 1).unwrap();
    let b = families::lift_map(5, &base, 2).unwrap();
    assert!(a.is_isomorphic(&b).unwrap());
}

#[test]
fn s_set_round_trip() {
    assert_eq!(suites::s_set_mismatches(), vec![]);
    for p in [5u64, 7, 97] {
        assert!(!fields::s_set(12, p).unwrap().contains(2));
    }
}

#[test]
fn dickson_cap_agrees_with_full_closure() {
    let t = suites::dickson_samples(2024, 1250);
    assert!(t.disagreements.is_empty(), "{:?}", t.disagreements);
    assert!(t.total >= 10_000);
    assert!(t.generating > 100 && t.proper > 100, "{t:?}");
}

#[test]
fn dickson_cap_agrees_on_all_involution_triples_pgl5() {
    let g = families::build_pgl2(5).unwrap();
    let invs = g.involutions().unwrap();
    for r in &invs {
        for t in invs.iter().take(6) {
            for l in invs.iter().take(6) {
                let s = [r.clone(), t.clone(), l.clone()];
                assert_eq!(g.generates_with(&s, true), g.generates_with(&s, false));
            }
        }
    }
}

fn group_index() -> &'static [Arc<FiniteGroup>] {
    static GROUPS: OnceLock<Vec<Arc<FiniteGroup>>> = OnceLock::new();
    GROUPS.get_or_init(families_under_test)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn group_axioms(gi in 0usize..10, i in any::<usize>(), j in any::<usize>(), k in any::<usize>()) {
        let g = &group_index()[gi];
        let els = g.elements().unwrap();
        let (a, b, c) = (&els[i % els.len()], &els[j % els.len()], &els[k % els.len()]);
        prop_assert_eq!(g.mul(&g.mul(a, b), c), g.mul(a, &g.mul(b, c)));
        prop_assert_eq!(g.mul(a, &g.identity()), a.clone());
        prop_assert_eq!(g.mul(&g.identity(), a), a.clone());
        prop_assert!(g.is_identity(&g.mul(a, &g.inv(a))));
        prop_assert!(g.contains(&g.mul(a, b)));
    }

    #[test]
    fn closure_is_a_subgroup(gi in 0usize..10, picks in proptest::collection::vec(any::<usize>(), 1..3)) {
        let g = &group_index()[gi];
        let els = g.elements().unwrap();
        let seeds: Vec<GroupElement> = picks.iter().map(|i| els[i % els.len()].clone()).collect();
        let Closure::Complete(h) = g.closure(&seeds, None) else { panic!("uncapped closure") };
        prop_assert_eq!(g.order() % h.len() as u64, 0);
        prop_assert!(h.contains(&g.identity()));
        for s in &seeds {
            prop_assert!(h.contains(s));
        }
        let sample: Vec<&GroupElement> = h.iter().take(12).collect();
        for a in &sample {
            prop_assert!(h.contains(&g.inv(a)));
            for b in &sample {
                prop_assert!(h.contains(&g.mul(a, b)));
            }
        }
        let again: Vec<GroupElement> = h.iter().cloned().collect();
        prop_assert_eq!(g.closure(&again, None).len(), Some(h.len()));
    }

    #[test]
    fn projective_normalization_scale_invariant(
        p in prop::sample::select(vec![5u64, 7, 11, 13, 97]),
        e in any::<[u32; 4]>(),
        lambda in 1u64..1000,
    ) {
        let ent = e.map(|v| (v as u64 % p) as i64);
        prop_assume!((ent[0] * ent[3] - ent[1] * ent[2]).rem_euclid(p as i64) != 0);
        let m = Gl2Matrix::new(ent, p).unwrap();
        let l = lambda % p;
        prop_assume!(l != 0);
        prop_assert_eq!(m.scale(l).normalized(), m.normalized());
    }

    #[test]
    fn formula_chi_matches_orbits_on_dihedral_products(
        j in prop::sample::select(vec![3u32, 5, 7, 9, 11, 13]),
        k in prop::sample::select(vec![3u32, 5, 7, 9, 11, 13]),
    ) {
        let m = families::build_m1(j, k).unwrap();
        prop_assert_eq!(m.euler_characteristic().unwrap(), m.euler_characteristic_by_orbits());
        prop_assert_eq!(m.group().order(), 4 * j as u64 * k as u64);
    }
}
