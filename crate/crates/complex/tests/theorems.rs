use std::sync::Arc;
use wittlab_complex::link_iso::{verify_link_isos, LinkIsoInstance, LinkIsoOptions};
use wittlab_complex::theorem::{
    depth_independence, verify_theorem, RangeContext, Structure, TheoremConfig, TheoremId, TheoremInstance,
};
use wittlab_complex::verdict::Tier;
use wittlab_core::form::make_form_parameter;
use wittlab_core::module::Module;
use wittlab_core::quad::QuadraticModule;
use wittlab_core::ring::{make_ring, Involution, RingSpec};
use wittlab_core::{Elem, Ring};

fn ring(spec: RingSpec) -> Arc<Ring> {
    Arc::new(make_ring(&spec).unwrap())
}

fn gf2() -> Arc<Ring> {
    ring(RingSpec::Gf { q: 2, involution: Involution::Identity })
}

fn zero_p(r: &Arc<Ring>) -> QuadraticModule {
    let p = Arc::new(make_form_parameter(r.clone(), r.neg(Elem::ONE), &[]).unwrap());
    QuadraticModule::zero(p)
}

fn v(xs: &[u16]) -> Vec<Elem> {
    xs.iter().map(|&x| Elem(x)).collect()
}

fn gl(n: usize, base: Vec<Vec<Elem>>) -> TheoremInstance {
    TheoremInstance {
        label: format!("GF(2)^{n}"),
        structure: Structure::Module(Arc::new(Module::free(gf2(), n))),
        part: if base.is_empty() { 1 } else { 2 },
        base,
    }
}

fn quad(g: usize, base: Vec<Vec<Elem>>) -> TheoremInstance {
    TheoremInstance {
        label: format!("H^{g}"),
        structure: Structure::Quad { p: zero_p(&gf2()), g },
        part: if base.is_empty() { 1 } else { 2 },
        base,
    }
}

#[test]
fn gl_on_gf2_cubed() {
    let ctx = RangeContext::default();
    let r = verify_theorem(TheoremId::Gl, &gl(3, vec![]), &ctx, &TheoremConfig::default()).unwrap();
    assert_eq!(r.bound, 1);
    assert_eq!(r.hypotheses.sr, Some(1));
    assert_eq!(r.verdict.tier, Tier::FullyVerified);
    assert!(!r.critical);
}

#[test]
fn gl_link_and_translated() {
    let ctx = RangeContext::default();
    let cfg = TheoremConfig::default();
    let base = vec![v(&[1, 0, 0, 0, 0])];
    let r = verify_theorem(TheoremId::Gl, &gl(3, base.clone()), &ctx, &cfg).unwrap();
    assert_eq!(r.bound, 0);
    assert!(r.verdict.tier.is_positive());
    let t = verify_theorem(TheoremId::GlTranslated, &gl(3, base), &ctx, &cfg).unwrap();
    assert_eq!(t.bound, 1);
    assert!(t.verdict.tier.is_positive(), "{:?}", t.verdict);
}

#[test]
fn hyperbolic_bounds() {
    let ctx = RangeContext::default();
    let cfg = TheoremConfig::default();
    for (g, want) in [(1, -2), (2, -1), (3, -1)] {
        let r = verify_theorem(TheoremId::Hyperbolic, &quad(g, vec![]), &ctx, &cfg).unwrap();
        assert_eq!(r.hypotheses.witt_index, Some(g));
        assert_eq!(r.bound, want, "g = {g}");
        assert!(r.verdict.tier.is_positive());
    }
}

#[test]
fn isotropic_link_is_nonempty() {
    let ctx = RangeContext::default();
    let base = vec![v(&[1, 0, 0, 0, 0, 0])];
    let r = verify_theorem(TheoremId::Isotropic, &quad(3, base), &ctx, &TheoremConfig::default()).unwrap();
    assert_eq!(r.bound, -1);
    assert_eq!(r.verdict.tier, Tier::NonemptyVerified);
}

#[test]
fn quad_statements_are_not_refuted() {
    let ctx = RangeContext::default();
    let cfg = TheoremConfig::default();
    for t in [TheoremId::QuadLambda, TheoremId::QuadTranslated, TheoremId::QuadCorollary] {
        for g in 1..=2 {
            let r = verify_theorem(t, &quad(g, vec![]), &ctx, &cfg).unwrap();
            assert!(!r.critical, "{} g = {g}: {:?}", t.name(), r.verdict);
        }
    }
    let base = vec![v(&[1, 0, 0, 0])];
    let r = verify_theorem(TheoremId::OrthogonalLink, &quad(2, base), &ctx, &cfg).unwrap();
    assert!(!r.critical);
}

#[test]
fn stabilization_depth_does_not_matter() {
    let m = Arc::new(Module::free(gf2(), 2));
    assert!(depth_independence(&m, &[1, 2, 3], 3).unwrap());
    let z4 = ring(RingSpec::Zmod { n: 4 });
    let c = Arc::new(Module::cyclic(z4, Elem(2)));
    assert!(depth_independence(&c, &[1, 2], 2).unwrap());
}

#[test]
fn part_must_match_base() {
    let ctx = RangeContext::default();
    let mut inst = gl(2, vec![]);
    inst.part = 2;
    assert!(verify_theorem(TheoremId::Gl, &inst, &ctx, &TheoremConfig::default()).is_err());
}

#[test]
fn link_isomorphisms_on_h3() {
    let ctx = RangeContext::default();
    let inst = LinkIsoInstance {
        label: "H^3".into(),
        q: QuadraticModule::hyperbolic(zero_p(&gf2()).param().clone(), 3),
        pairs: vec![(v(&[1, 0, 0, 0, 0, 0]), v(&[0, 1, 0, 0, 0, 0]))],
    };
    let r = verify_link_isos(&inst, &ctx, &LinkIsoOptions::default()).unwrap();
    assert_eq!(r.y_size, 16);
    assert_eq!(r.v_size, 2);
    assert_eq!(r.parts.len(), 3);
    for p in &r.parts {
        assert!(p.skipped.is_none() && p.isomorphic, "{p:?}");
    }
    assert!(r.ok);
}

#[test]
fn link_isomorphisms_with_trivial_complement() {
    let ctx = RangeContext::default();
    let inst = LinkIsoInstance {
        label: "H^1".into(),
        q: QuadraticModule::hyperbolic(zero_p(&gf2()).param().clone(), 1),
        pairs: vec![(v(&[1, 0]), v(&[0, 1]))],
    };
    assert!(verify_link_isos(&inst, &ctx, &LinkIsoOptions::default()).is_err());
    let opts = LinkIsoOptions {
        enforce_hypothesis: false,
        ..Default::default()
    };
    let r = verify_link_isos(&inst, &ctx, &opts).unwrap();
    assert_eq!(r.y_size, 1);
    assert!(r.ok, "{r:?}");
}
