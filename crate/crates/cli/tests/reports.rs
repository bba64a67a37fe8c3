use proptest::prelude::*;
use wittlab::report::{aggregate, CSV_HEADER};
use wittlab::{run_suite, CaseResult, Status, SuiteConfig, SuiteReport};

fn small_config() -> SuiteConfig {
    SuiteConfig {
        rings: vec!["GF(2)".into(), "Z/4".into()],
        ..Default::default()
    }
}

#[test]
fn json_round_trip_renders_the_original() {
    let r = run_suite("stable-rank", &small_config()).unwrap();
    let text = r.to_json();
    let back = SuiteReport::from_json(&text).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.to_json(), text);
}

#[test]
fn same_config_same_digest() {
    let cfg = small_config();
    let a = run_suite("straighten", &cfg).unwrap();
    let b = run_suite("straighten", &cfg).unwrap();
    assert_eq!(a.digest(), b.digest());
    assert_eq!(a.to_csv(), b.to_csv());
    let other = run_suite("straighten", &SuiteConfig { seed: cfg.seed + 1, ..cfg }).unwrap();
    assert_ne!(a.input_digest, other.input_digest);
}

#[test]
fn digest_ignores_timings() {
    let mut r = SuiteReport::new("x", 1, "d".into(), vec![CaseResult::new("c", Status::Verified, "")], 5);
    let d = r.digest();
    r.wall_ms = 99;
    r.cases[0].wall_ms = 7;
    assert_eq!(r.digest(), d);
    r.cases[0].detail = "changed".into();
    assert_ne!(r.digest(), d);
}

#[test]
fn empty_report_is_header_only_csv() {
    let r = SuiteReport::new("axioms", 0, String::new(), Vec::new(), 0);
    assert_eq!(r.to_csv(), format!("{}\n", CSV_HEADER.join(",")));
    assert_eq!(r.aggregate, Status::Verified);
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn csv_quotes_and_flags_critical() {
    let cases = vec![
        CaseResult::new("a, b", Status::Critical, "said \"no\""),
        CaseResult::new("c", Status::Vacuous, ""),
    ];
    let r = SuiteReport::new("s", 0, String::new(), cases, 0);
    let text = r.to_csv();
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(&rows[0][1], "a, b");
    assert_eq!(&rows[0][3], "yes");
    assert_eq!(&rows[0][4], "said \"no\"");
    assert_eq!(&rows[1][3], "no");
    assert_eq!(r.exit_code(), 2);
}

#[test]
fn unknown_suite_is_an_error() {
    assert!(run_suite("nonsense", &SuiteConfig::default()).is_err());
}

#[test]
fn config_rejects_unknown_fields() {
    assert!(serde_json::from_str::<SuiteConfig>(r#"{"sed": 1}"#).is_err());
    let c: SuiteConfig = serde_json::from_str(r#"{"seed": 1}"#).unwrap();
    assert_eq!(c.seed, 1);
    assert_eq!(c.link_cap, SuiteConfig::default().link_cap);
}

fn status() -> impl Strategy<Value = Status> {
    prop_oneof![
        Just(Status::Verified),
        Just(Status::Vacuous),
        Just(Status::Inconclusive),
        Just(Status::Critical)
    ]
}

proptest! {
    #[test]
    fn exit_code_follows_the_worst_status(ss in proptest::collection::vec(status(), 0..8)) {
        let cases: Vec<CaseResult> = ss.iter().map(|&s| CaseResult::new("c", s, "")).collect();
        let r = SuiteReport::new("s", 0, String::new(), cases.clone(), 0);
        let expect = if ss.contains(&Status::Critical) {
            2
        } else if ss.contains(&Status::Inconclusive) {
            1
        } else {
            0
        };
        prop_assert_eq!(r.exit_code(), expect);
        prop_assert_eq!(aggregate(&cases), r.aggregate);
        let back = SuiteReport::from_json(&r.to_json()).unwrap();
        prop_assert_eq!(back, r);
    }
}
