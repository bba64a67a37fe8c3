use proptest::prelude::*;
use std::sync::Arc;
use wittlab_core::form::make_form_parameter;
use wittlab_core::pipeline::{cancel_h, hyperbolic_straighten, standard_decomposition, transitive_move, RangeData};
use wittlab_core::quad::{lambda_unimodular, transvection, Isometry, QuadraticModule};
use wittlab_core::ring::{make_ring, Involution};
use wittlab_core::stable_rank::DEFAULT_BUDGET;
use wittlab_core::{Elem, ModElem, Module, RMatrix, RingSpec};

const RANGE: RangeData = RangeData { sr: 1, usr: 1, budget: DEFAULT_BUDGET };

fn gf3_param() -> Arc<wittlab_core::FormParameter> {
    let r = Arc::new(make_ring(&RingSpec::Gf { q: 3, involution: Involution::Identity }).unwrap());
    Arc::new(make_form_parameter(r.clone(), r.neg(Elem::ONE), &[]).unwrap())
}

/// P ⊕ H^g with P free of rank one and zero form.
fn with_complement(g: usize) -> QuadraticModule {
    let param = gf3_param();
    let p = QuadraticModule::new(
        Arc::new(Module::free(param.ring().clone(), 1)),
        RMatrix::zeros(1, 1),
        vec![Elem::ZERO],
        param.clone(),
    )
    .unwrap();
    p.direct_sum(&QuadraticModule::hyperbolic(param, g)).unwrap()
}

fn elem(v: &[u16]) -> ModElem {
    ModElem(v.iter().map(|&x| Elem(x)).collect())
}

/// Witnesses w ∈ H^k with λ(w_i, v_j) = δ_ij, by search over all of H^k.
fn lambda_unimodular_brute(h: &QuadraticModule, seq: &[ModElem]) -> bool {
    let all: Vec<ModElem> = h.module().elements().collect();
    (0..seq.len()).all(|i| {
        all.iter().any(|w| {
            seq.iter()
                .enumerate()
                .all(|(j, v)| h.lambda(w, v) == if i == j { Elem::ONE } else { Elem::ZERO })
        })
    })
}

fn coords(n: usize) -> impl Strategy<Value = Vec<u16>> {
    proptest::collection::vec(0u16..3, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn straightening_post_conditions(a in coords(5), b in coords(5)) {
        // P ⊕ H^2 with k = 1, and P ⊕ H^3 with k = 2 would be larger; one
        // and two vectors in P ⊕ H^2 cover k = 1 and the precondition check.
        let q = with_complement(2);
        let dec = standard_decomposition(&q, 1).unwrap();
        let v = q.module().canon(&elem(&a).0);
        prop_assume!(lambda_unimodular(&q, std::slice::from_ref(&v)));
        let st = hyperbolic_straighten(&q, &dec, std::slice::from_ref(&v), RANGE).unwrap();
        prop_assert!(q.is_isometry(&q, st.phi.map()));
        let img = st.phi.apply(&v);
        prop_assert_eq!(&img, &st.images[0]);
        prop_assert!(img.0[3..].iter().all(|&c| c == Elem::ZERO));
        let h1 = QuadraticModule::hyperbolic(gf3_param(), 1);
        prop_assert!(lambda_unimodular_brute(&h1, &[elem(&[img.0[1].0, img.0[2].0])]));

        let w = q.module().canon(&elem(&b).0);
        prop_assume!(lambda_unimodular(&q, &[v.clone(), w.clone()]));
        prop_assert!(hyperbolic_straighten(&q, &dec, &[v, w], RANGE).is_err());
    }

    #[test]
    fn transitive_move_hits_the_target(a in coords(5)) {
        let q = with_complement(2);
        let dec = standard_decomposition(&q, 1).unwrap();
        let v = q.module().canon(&elem(&a).0);
        prop_assume!(lambda_unimodular(&q, std::slice::from_ref(&v)));
        let mv = transitive_move(&q, &dec, &v, q.mu(&v).rep(), RANGE).unwrap();
        prop_assert!(q.is_isometry(&q, mv.phi.map()));
        prop_assert_eq!(mv.phi.apply(&v), mv.target.clone());
        prop_assert_eq!(q.mu(&mv.target), q.mu(&v));
    }

    #[test]
    fn cancellation_of_scrambled_isometries(seeds in proptest::collection::vec((coords(6), coords(6), 0u16..3), 1..6)) {
        let param = gf3_param();
        let m = QuadraticModule::hyperbolic(param.clone(), 2);
        let mh = m.direct_sum(&QuadraticModule::hyperbolic(param, 1)).unwrap();
        let mut iso = Isometry::identity(&mh);
        for (e, u, x) in &seeds {
            if let Ok(t) = transvection(&mh, &elem(e), &elem(u), Elem(*x)) {
                iso = t.compose_after(&iso);
            }
        }
        let c = cancel_h(&m, &m, &iso, RANGE, true).unwrap();
        prop_assert!(m.is_isometry(&m, c.isometry.map()));
        prop_assert_eq!(c.cross_checked, Some(true));
    }
}

#[test]
fn straightening_needs_enough_hyperbolic_rank() {
    let q = with_complement(1);
    let dec = standard_decomposition(&q, 1).unwrap();
    let v = elem(&[0, 1, 0]);
    assert!(lambda_unimodular(&q, std::slice::from_ref(&v)));
    assert!(hyperbolic_straighten(&q, &dec, &[v], RANGE).is_err());
}
