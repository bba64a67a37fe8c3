use wittlab::spec::{Built, InstanceSpec, ModuleSpec, RingRef, TheoremSpec};
use wittlab_complex::theorem::TheoremId;

#[test]
fn labels_and_inline_rings() {
    let a: InstanceSpec = serde_json::from_str(r#"{"ring": "Z/4", "module": {"kind": "free", "n": 2}}"#).unwrap();
    assert_eq!(a.ring, RingRef::Label("Z/4".into()));
    let Built::Module(m) = a.build().unwrap() else { panic!("module expected") };
    assert_eq!(m.size(), 16);
    let b: InstanceSpec =
        serde_json::from_str(r#"{"ring": {"kind": "zmod", "n": 4}, "module": {"kind": "cyclic", "a": 2}}"#).unwrap();
    let Built::Module(m) = b.build().unwrap() else { panic!("module expected") };
    assert_eq!(m.size(), 2);
    assert!(RingRef::parse(r#"{"kind": "gf", "q": 3}"#).unwrap().build().is_ok());
    assert!(RingRef::parse("no such ring").unwrap().build().is_err());
}

#[test]
fn quadratic_instances() {
    let h: InstanceSpec = serde_json::from_str(r#"{"ring": "GF(2)", "module": {"kind": "hyperbolic", "g": 2}}"#).unwrap();
    let (q, p, g) = h.quadratic().unwrap();
    assert_eq!((q.ngens(), p.ngens(), g), (4, 0, 2));
    let s: InstanceSpec = serde_json::from_str(
        r#"{"ring": "GF(3)", "module": {"kind": "quadratic", "complement": {"ngens": 1}, "g": 1}}"#,
    )
    .unwrap();
    let (q, p, _) = s.quadratic().unwrap();
    assert_eq!((q.size(), p.size()), (27, 3));
    let f: InstanceSpec = serde_json::from_str(r#"{"ring": "GF(2)", "module": {"kind": "free", "n": 1}}"#).unwrap();
    assert!(f.quadratic().is_err());
}

#[test]
fn digests_are_stable_and_distinguish() {
    let text = r#"{"theorem": "isotropic", "instance": {"ring": "GF(2)", "module": {"kind": "hyperbolic", "g": 3}}}"#;
    let a: TheoremSpec = serde_json::from_str(text).unwrap();
    let b: TheoremSpec = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.digest(), b.digest());
    assert_eq!(a.theorem, TheoremId::Isotropic);
    let mut c = a.clone();
    c.instance.module = ModuleSpec::Hyperbolic { g: 2 };
    assert_ne!(a.digest(), c.digest());
    let inst = a.to_instance().unwrap();
    assert_eq!(inst.part, 1);
    assert!(inst.label.starts_with("isotropic:"));
}

#[test]
fn malformed_instances_are_rejected() {
    assert!(serde_json::from_str::<InstanceSpec>(r#"{"ring": "GF(2)", "module": {"kind": "torus"}}"#).is_err());
    assert!(serde_json::from_str::<TheoremSpec>(r#"{"theorem": "fermat", "instance": {"ring": "GF(2)", "module": {"kind": "free", "n": 1}}}"#).is_err());
}
