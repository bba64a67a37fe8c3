use proptest::prelude::*;
use std::sync::Arc;
use wittlab_complex::homology::homology;
use wittlab_complex::kinds::{
    hyperbolic_poset, isotropic_poset, lambda_unimodular_poset, unimodular_poset, ModuleSpace, QuadSpace,
};
use wittlab_complex::poset::{Point, SequencePoset};
use wittlab_core::form::make_form_parameter;
use wittlab_core::module::{unimodular, Module};
use wittlab_core::quad::QuadraticModule;
use wittlab_core::ring::{make_ring, Involution, RingSpec};
use wittlab_core::{Elem, ModElem, Ring};

fn gf2() -> Arc<Ring> {
    Arc::new(make_ring(&RingSpec::Gf { q: 2, involution: Involution::Identity }).unwrap())
}

fn hyperbolic(g: usize) -> QuadraticModule {
    let r = gf2();
    let p = Arc::new(make_form_parameter(r.clone(), r.neg(Elem::ONE), &[]).unwrap());
    QuadraticModule::hyperbolic(p, g)
}

fn free_space(n: usize) -> Arc<ModuleSpace> {
    Arc::new(ModuleSpace::new(Arc::new(Module::free(gf2(), n))).unwrap())
}

fn e(v: &[u16]) -> ModElem {
    ModElem(v.iter().map(|&x| Elem(x)).collect())
}

#[test]
fn unimodular_rank_two_over_gf2() {
    let f = unimodular_poset(&free_space(2), None).unwrap();
    let l = f.enumerate(4, 1000).unwrap();
    assert_eq!(l.counts(), vec![3, 6]);
}

#[test]
fn hyperbolic_pair_is_a_member() {
    let q = Arc::new(QuadSpace::new(hyperbolic(1)).unwrap());
    let hu = hyperbolic_poset(&q).unwrap();
    let x = vec![vec![q.index(&e(&[1, 0])), q.index(&e(&[0, 1]))]];
    assert!(hu.contains(&x));
    let swapped = vec![vec![x[0][1], x[0][0]]];
    assert!(hu.contains(&swapped));
    let bad = vec![vec![x[0][0], x[0][0]]];
    assert!(!hu.contains(&bad));
}

#[test]
fn truncation_to_one_is_the_vertex_set() {
    let f = Arc::new(unimodular_poset(&free_space(3), None).unwrap());
    let t = f.truncate(1);
    let l = t.enumerate(5, 10_000).unwrap();
    assert_eq!(l.counts(), vec![7]);
    assert_eq!(t.vertices().len(), f.vertices().len());
}

#[test]
fn decoration_by_a_point_is_isomorphic() {
    let f = Arc::new(unimodular_poset(&free_space(3), None).unwrap());
    let d = f.decorate(&[vec![0]]).unwrap();
    assert_eq!(d.enumerate(4, 100_000).unwrap().counts(), f.enumerate(4, 100_000).unwrap().counts());
    let hf = homology(&f, 1, 100_000).unwrap();
    let hd = homology(&d, 1, 100_000).unwrap();
    assert_eq!(hf.groups, hd.groups);
}

#[test]
fn decoration_multiplies_vertices() {
    let q = Arc::new(QuadSpace::new(hyperbolic(2)).unwrap());
    let iu = Arc::new(isotropic_poset(&q).unwrap());
    let s: Vec<Point> = (0..4).map(|i| vec![i]).collect();
    let d = iu.decorate(&s).unwrap();
    assert_eq!(d.vertices().len(), iu.vertices().len() * 4);
}

#[test]
fn lambda_unimodular_implies_unimodular() {
    let q = Arc::new(QuadSpace::new(hyperbolic(2)).unwrap());
    let lu = lambda_unimodular_poset(&q, None).unwrap();
    let levels = lu.enumerate(4, 1_000_000).unwrap();
    let m = q.quad().module();
    for s in levels.by_len.iter().flatten() {
        let seq: Vec<ModElem> = s.iter().map(|&i| q.elem(lu.point(i)[0]).clone()).collect();
        assert!(unimodular(m, &seq), "{seq:?}");
    }
}

#[test]
fn sibling_enumeration_matches_full_scan() {
    let q = Arc::new(QuadSpace::new(hyperbolic(2)).unwrap());
    for f in [
        lambda_unimodular_poset(&q, None).unwrap(),
        isotropic_poset(&q).unwrap(),
        hyperbolic_poset(&q).unwrap(),
        unimodular_poset(&free_space(3), None).unwrap(),
    ] {
        let a = f.enumerate(5, 1_000_000).unwrap();
        let b = f.enumerate_full(5, 1_000_000).unwrap();
        assert_eq!(a.by_len, b.by_len, "{}", f.label());
    }
}

#[test]
fn chain_condition_holds() {
    let q = Arc::new(QuadSpace::new(hyperbolic(2)).unwrap());
    for f in [
        lambda_unimodular_poset(&q, None).unwrap(),
        isotropic_poset(&q).unwrap(),
        hyperbolic_poset(&q).unwrap(),
    ] {
        assert_eq!(f.check_chain_condition(4, 500, 3).unwrap(), None, "{}", f.label());
    }
    let u = unimodular_poset(&free_space(3), None).unwrap();
    assert_eq!(u.check_chain_condition(4, 500, 3).unwrap(), None);
}

#[test]
fn homology_is_invariant_under_relabelling() {
    let f = Arc::new(unimodular_poset(&free_space(3), None).unwrap());
    let h = homology(&f, 2, 1_000_000).unwrap();
    for seed in [1, 2, 3] {
        let s = f.shuffled(seed);
        assert_eq!(homology(&s, 2, 1_000_000).unwrap().groups, h.groups);
    }
}

#[test]
fn unimodular_gf2_cubed_homology() {
    let f = unimodular_poset(&free_space(3), None).unwrap();
    let h = homology(&f, 1, 1_000_000).unwrap();
    assert!(h.groups[0].is_zero());
    assert!(h.groups[1].is_zero());
}

fn ordered_space() -> Arc<SequencePoset> {
    Arc::new(unimodular_poset(&free_space(3), None).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn link_of_link(a in 0u32..7, b in 0u32..7, c in 0u32..7) {
        let f = ordered_space();
        let v = vec![f.universe()[a as usize].clone()];
        let w = vec![f.universe()[b as usize].clone()];
        prop_assume!(f.contains(&v) && a != b);
        let fv = Arc::new(f.link(&v).unwrap());
        let u = f.universe()[c as usize].clone();
        let wv: Vec<Point> = w.iter().chain(&v).cloned().collect();
        if fv.contains(&w) {
            let fvw = fv.link(&w).unwrap();
            let fwv = f.link(&wv).unwrap();
            prop_assert_eq!(fvw.contains(std::slice::from_ref(&u)), fwv.contains(std::slice::from_ref(&u)));
        } else {
            prop_assert!(!f.contains(&wv));
        }
    }
}
