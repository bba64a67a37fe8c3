use serde_json::Value;
use std::process::{Command, Output};

fn wittlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wittlab")).args(args).env_remove("WITTLAB_CACHE_DIR").output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

const H3: &str = r#"{"ring": "GF(2)", "module": {"kind": "hyperbolic", "g": 3}}"#;

#[test]
fn lists_suites() {
    let o = wittlab(&["suites"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    for s in wittlab::SUITES {
        assert!(text.contains(s), "{s}");
    }
}

#[test]
fn suite_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = wittlab(&["suite", "stable-rank", "--config", r#"{"rings": ["GF(2)"]}"#, "--out", out, "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("suite,case,status,critical,detail\n"));
    let text = std::fs::read_to_string(dir.path().join("stable-rank.json")).unwrap();
    let r = wittlab::SuiteReport::from_json(&text).unwrap();
    assert_eq!(r.suite, "stable-rank");
    assert_eq!(r.count(wittlab::Status::Verified), r.cases.len());
}

#[test]
fn usage_errors_exit_with_three() {
    assert_eq!(wittlab(&["suite", "nonsense"]).status.code(), Some(3));
    assert_eq!(wittlab(&["suite", "axioms", "--config", r#"{"bogus": 1}"#]).status.code(), Some(3));
}

#[test]
fn complex_verify_prints_the_verdict() {
    let o = wittlab(&["complex", "verify", "--theorem", "isotropic", "--instance", H3]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    for k in ["theorem", "instance_digest", "bound", "verdict", "betti", "timings"] {
        assert!(v.get(k).is_some(), "missing {k}");
    }
    assert_eq!(v["theorem"], "isotropic");
    assert_eq!(v["bound"], 0);
    assert_eq!(v["verdict"]["tier"], "fully-verified");
}

#[test]
fn complex_build_counts_members() {
    let inst = r#"{"ring": "GF(2)", "module": {"kind": "free", "n": 2}}"#;
    let o = wittlab(&["complex", "build", "--theorem", "gl", "--instance", inst, "--max-len", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["bound"], 0);
    assert!(v["members_by_length"][0].as_u64().unwrap() > 0);
}

#[test]
fn complex_homology_uses_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_wittlab"))
            .args(["complex", "homology", "--theorem", "hyperbolic", "--instance", H3, "--degree", "0"])
            .env("WITTLAB_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let a = json(&run());
    let b = json(&run());
    assert_eq!(a["cached"], false);
    assert_eq!(b["cached"], true);
    assert_eq!(a["homology"], b["homology"]);
    assert_eq!(a["instance_digest"], b["instance_digest"]);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn default_config_round_trips() {
    let o = wittlab(&["default-config"]);
    assert!(o.status.success());
    let c: wittlab::SuiteConfig = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(c, wittlab::SuiteConfig::default());
}
