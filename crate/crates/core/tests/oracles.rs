//! Unimodularity against a definitional oracle, and frozen counts.

use proptest::prelude::*;
use std::sync::Arc;
use wittlab_core::form::make_form_parameter;
use wittlab_core::module::unimodular;
use wittlab_core::ring::{make_ring, Involution};
use wittlab_core::stable_rank::{stable_rank, unitary_stable_rank, EuMode, DEFAULT_BUDGET};
use wittlab_core::{Elem, ModElem, Module, Ring, RingSpec};

fn ring(spec: RingSpec) -> Arc<Ring> {
    Arc::new(make_ring(&spec).unwrap())
}

fn gf2() -> Arc<Ring> {
    ring(RingSpec::Gf { q: 2, involution: Involution::Identity })
}

fn z4() -> Arc<Ring> {
    ring(RingSpec::Zmod { n: 4 })
}

/// All maps R^n → R, as coefficient rows: f(v) = Σ v_i c_i.
fn functionals(r: &Ring, n: usize) -> Vec<Vec<Elem>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|f| {
                r.elements().map(move |x| {
                    let mut g = f.clone();
                    g.push(x);
                    g
                })
            })
            .collect();
    }
    out
}

fn apply(r: &Ring, f: &[Elem], v: &ModElem) -> Elem {
    r.sum(v.0.iter().zip(f).map(|(&a, &c)| r.mul(a, c)))
}

/// Functionals f_1, …, f_k with f_i(v_j) = δ_ij exist, by search.
fn oracle(r: &Ring, n: usize, seq: &[ModElem]) -> bool {
    let fs = functionals(r, n);
    (0..seq.len()).all(|i| {
        fs.iter().any(|f| {
            seq.iter()
                .enumerate()
                .all(|(j, v)| apply(r, f, v) == if i == j { Elem::ONE } else { Elem::ZERO })
        })
    })
}

fn count(m: &Module, len: usize, f: impl Fn(&[ModElem]) -> bool) -> usize {
    let elems: Vec<ModElem> = m.elements().collect();
    let mut seqs: Vec<Vec<ModElem>> = vec![vec![]];
    for _ in 0..len {
        seqs = seqs
            .into_iter()
            .flat_map(|s| {
                elems.iter().map(move |x| {
                    let mut t = s.clone();
                    t.push(x.clone());
                    t
                })
            })
            .collect();
    }
    seqs.iter().filter(|s| f(s)).count()
}

#[test]
fn frozen_unimodular_counts() {
    // (ring, rank, length, count): unimodular elements of GF(2)^3 are the
    // 7 nonzero vectors; ordered bases of GF(2)^2 number |GL_2(F_2)| = 6;
    // Z/4^2 has 12 unimodular vectors and |GL_2(Z/4)| = 96 ordered bases.
    let table = [(gf2(), 3, 1, 7), (gf2(), 2, 2, 6), (z4(), 2, 1, 12), (z4(), 2, 2, 96)];
    for (r, n, len, expect) in table {
        let m = Module::free(r.clone(), n);
        assert_eq!(count(&m, len, |s| oracle(&r, n, s)), expect, "oracle {} {n} {len}", r.label());
        assert_eq!(count(&m, len, |s| unimodular(&m, s)), expect, "library {} {n} {len}", r.label());
    }
}

#[test]
fn cyclic_quotients() {
    let r = z4();
    let m = Module::cyclic(r.clone(), Elem(2));
    assert_eq!(m.size(), 2);
    for x in m.elements() {
        assert!(!unimodular(&m, &[x]));
    }
}

#[test]
fn semi_local_rings_have_stable_rank_one() {
    for r in [gf2(), z4(), ring(RingSpec::Gf { q: 4, involution: Involution::Frobenius }), ring(RingSpec::Zmod { n: 8 })] {
        assert_eq!(stable_rank(&r, 3, DEFAULT_BUDGET).unwrap().value, Some(1), "{}", r.label());
    }
}

#[test]
fn unitary_stable_rank_is_at_most_two() {
    for r in [gf2(), ring(RingSpec::Gf { q: 3, involution: Involution::Identity }), z4()] {
        let eps = r.neg(Elem::ONE);
        let p = Arc::new(make_form_parameter(r.clone(), eps, &[]).unwrap());
        let u = unitary_stable_rank(&p, 3, EuMode::Transvection, DEFAULT_BUDGET).unwrap();
        assert!(u.value.is_some_and(|v| v <= 2), "{}: {:?}", r.label(), u.value);
    }
}

fn elem_strategy(size: u16, n: usize) -> impl Strategy<Value = ModElem> {
    proptest::collection::vec(0..size, n).prop_map(|v| ModElem(v.into_iter().map(Elem).collect()))
}

proptest! {
    #[test]
    fn library_agrees_with_oracle_over_z4(seq in proptest::collection::vec(elem_strategy(4, 3), 1..=3)) {
        let r = z4();
        let m = Module::free(r.clone(), 3);
        prop_assert_eq!(unimodular(&m, &seq), oracle(&r, 3, &seq));
    }

    #[test]
    fn unimodularity_ignores_order(seq in proptest::collection::vec(elem_strategy(4, 2), 1..=2)) {
        let m = Module::free(z4(), 2);
        let mut rev = seq.clone();
        rev.reverse();
        prop_assert_eq!(unimodular(&m, &seq), unimodular(&m, &rev));
    }
}
