use std::sync::Arc;
use wittlab::cache::{CacheEntry, HomologyCache};
use wittlab_complex::homology;
use wittlab_complex::kinds::{unimodular_poset, ModuleSpace};
use wittlab_core::ring::{make_ring, Involution, RingSpec};
use wittlab_core::Module;

fn fresh() -> wittlab_complex::ReducedHomology {
    let r = Arc::new(make_ring(&RingSpec::Gf { q: 2, involution: Involution::Identity }).unwrap());
    let sp = Arc::new(ModuleSpace::new(Arc::new(Module::free(r, 3))).unwrap());
    homology(&unimodular_poset(&sp, None).unwrap(), 1, 100_000).unwrap()
}

#[test]
fn cached_equals_fresh() {
    let dir = tempfile::tempdir().unwrap();
    let c = HomologyCache::new(dir.path());
    let (a, hit) = c.get_or_compute("abc", 1, || Ok(fresh())).unwrap();
    assert!(!hit);
    let (b, hit) = c.get_or_compute("abc", 1, || panic!("should be cached")).unwrap();
    assert!(hit);
    assert_eq!(a, b);
    assert_eq!(b, fresh());
}

#[test]
fn keys_include_degree_and_digest() {
    let dir = tempfile::tempdir().unwrap();
    let c = HomologyCache::new(dir.path());
    c.put("abc", 1, &fresh()).unwrap();
    assert!(c.get("abc", 1).is_some());
    assert!(c.get("abc", 2).is_none());
    assert!(c.get("abd", 1).is_none());
    c.invalidate("abc", 1).unwrap();
    assert!(c.get("abc", 1).is_none());
    c.invalidate("abc", 1).unwrap();
}

#[test]
fn stale_and_corrupt_entries_are_misses() {
    let dir = tempfile::tempdir().unwrap();
    let c = HomologyCache::new(dir.path());
    c.put("abc", 1, &fresh()).unwrap();
    let path = dir.path().join("abc-h1.json");
    let mut e: CacheEntry = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    e.tool_version = "0.0.0-old".into();
    std::fs::write(&path, serde_json::to_vec(&e).unwrap()).unwrap();
    assert!(c.get("abc", 1).is_none());
    std::fs::write(&path, b"{ not json").unwrap();
    assert!(c.get("abc", 1).is_none());
    let (_, hit) = c.get_or_compute("abc", 1, || Ok(fresh())).unwrap();
    assert!(!hit);
    assert!(c.get("abc", 1).is_some());
}
