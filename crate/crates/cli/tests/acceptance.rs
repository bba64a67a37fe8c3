//! Acceptance criteria 1 to 10, one pass/fail line each.
//!
//! Every suite runs once with the default configuration. Run with
//! `cargo test -p wittlab --test acceptance -- --nocapture` to see the lines.

use std::collections::BTreeMap;
use std::time::Duration;
use wittlab::catalog;
use wittlab::{run_suite, CaseResult, Status, SuiteConfig, SuiteReport};
use wittlab_core::stable_rank::unitary_stable_rank;

struct Outcome {
    pass: bool,
    note: String,
}

fn outcome(pass: bool, note: impl Into<String>) -> Outcome {
    Outcome { pass, note: note.into() }
}

fn elapsed(r: &SuiteReport) -> Duration {
    Duration::from_millis(r.wall_ms)
}

fn bad(r: &SuiteReport) -> Vec<&CaseResult> {
    r.cases
        .iter()
        .filter(|c| matches!(c.status, Status::Critical | Status::Inconclusive))
        .collect()
}

fn metric<'a>(c: &'a CaseResult, k: &str) -> &'a str {
    c.metrics.get(k).map_or("", String::as_str)
}

fn find<'a>(r: &'a SuiteReport, case: &str) -> Option<&'a CaseResult> {
    r.cases.iter().find(|c| c.case == case)
}

fn first_bad(r: &SuiteReport) -> String {
    bad(r)
        .first()
        .map_or_else(String::new, |c| format!("; first failure: {} ({})", c.case, c.detail))
}

fn axioms(r: &SuiteReport, cfg: &SuiteConfig) -> Outcome {
    let limit = Duration::from_secs(30);
    let small_unchecked = r
        .cases
        .iter()
        .filter(|c| c.case.starts_with("quad ") && c.status != Status::Verified)
        .filter(|c| metric(c, "size").parse::<u128>().is_ok_and(|s| s <= cfg.axiom_element_cap))
        .count();
    let exhaustive = r.cases.iter().filter(|c| c.status == Status::Verified).count();
    outcome(
        bad(r).is_empty() && small_unchecked == 0 && elapsed(r) < limit,
        format!(
            "{} cases, {exhaustive} exhaustive, {} above {} elements; {:.1?} (limit 30 s){}",
            r.cases.len(),
            r.count(Status::Vacuous),
            cfg.axiom_element_cap,
            elapsed(r),
            first_bad(r)
        ),
    )
}

fn oracles(r: &SuiteReport) -> Outcome {
    let limit = Duration::from_secs(300);
    let oracle: Vec<&CaseResult> = r.cases.iter().filter(|c| c.case.starts_with("oracle ")).collect();
    let sweeps: Vec<&CaseResult> = r.cases.iter().filter(|c| c.case.starts_with("blocks ")).collect();
    let rings_ok = ["GF(2)", "Z/4"]
        .iter()
        .all(|l| sweeps.iter().any(|c| c.case.starts_with(&format!("blocks {l} n=3 k=2"))));
    let checked: usize = oracle.iter().map(|c| metric(c, "sequences").parse::<usize>().unwrap_or(0)).sum();
    let blocks: usize = sweeps.iter().map(|c| metric(c, "blocks").parse::<usize>().unwrap_or(0)).sum();
    outcome(
        bad(r).is_empty() && rings_ok && checked > 0 && elapsed(r) < limit,
        format!(
            "{} modules, {checked} sequences; {} block sweeps, {blocks} blocks; {:.1?} (limit 5 min){}",
            oracle.len(),
            sweeps.len(),
            elapsed(r),
            first_bad(r)
        ),
    )
}

fn stable_ranks(r: &SuiteReport) -> Outcome {
    let limit = Duration::from_secs(600);
    let sr: Vec<&CaseResult> = r.cases.iter().filter(|c| c.case.starts_with("sr ")).collect();
    let usr: Vec<&CaseResult> = r.cases.iter().filter(|c| c.case.starts_with("usr ")).collect();
    let sr_ok = !sr.is_empty() && sr.iter().all(|c| metric(c, "sr") == "1");
    let usr_ok = !usr.is_empty() && usr.iter().all(|c| metric(c, "usr").parse::<usize>().is_ok_and(|u| u <= 2));
    let max_usr = usr.iter().filter_map(|c| metric(c, "usr").parse::<usize>().ok()).max();
    outcome(
        sr_ok && usr_ok && elapsed(r) < limit,
        format!(
            "{} rings with sr = 1, {} parameters with usr <= 2 (max {max_usr:?}); {:.1?} (limit 10 min){}",
            sr.iter().filter(|c| metric(c, "sr") == "1").count(),
            usr.len(),
            elapsed(r),
            first_bad(r)
        ),
    )
}

fn reductions(r: &SuiteReport) -> Outcome {
    let sweeps: Vec<&CaseResult> = r.cases.iter().filter(|c| c.case.starts_with("blocks ")).collect();
    let reduced: usize = sweeps.iter().map(|c| metric(c, "reduced").parse::<usize>().unwrap_or(0)).sum();
    let tails: usize = sweeps.iter().map(|c| metric(c, "keep_tail").parse::<usize>().unwrap_or(0)).sum();
    let all = !sweeps.is_empty() && sweeps.iter().all(|c| c.status == Status::Verified);
    outcome(
        all && reduced > 0,
        format!("{reduced} unimodular blocks reduced and replayed, {tails} keep-tail certificates"),
    )
}

fn straightening(r: &SuiteReport) -> Outcome {
    let rings = catalog::ring_specs().len();
    let short: Vec<&CaseResult> = r
        .cases
        .iter()
        .filter(|c| c.status != Status::Verified || metric(c, "instances").parse::<usize>().unwrap_or(0) < 200)
        .collect();
    outcome(
        r.cases.len() == rings && short.is_empty(),
        format!(
            "{} of {rings} rings with >= 200 re-verified instances{}",
            r.cases.len() - short.len(),
            short.first().map_or_else(String::new, |c| format!("; first failure: {} ({})", c.case, c.detail))
        ),
    )
}

fn transitivity(r: &SuiteReport) -> Outcome {
    let per_ring = |l: &str| r.cases.iter().filter(|c| c.case.starts_with(&format!("transitivity {l} "))).count();
    let classes: usize = r.cases.iter().map(|c| metric(c, "classes").parse::<usize>().unwrap_or(0)).sum();
    let all = r.cases.iter().all(|c| c.status == Status::Verified);
    outcome(
        all && per_ring("GF(2)") > 0 && per_ring("Z/4") > 0,
        format!(
            "{} modules ({} over GF(2), {} over Z/4), {classes} classes, each a single orbit{}",
            r.cases.len(),
            per_ring("GF(2)"),
            per_ring("Z/4"),
            first_bad(r)
        ),
    )
}

fn cancellation(r: &SuiteReport) -> Outcome {
    let crossed = r.cases.iter().filter(|c| c.detail.contains("exhaustive search agrees")).count();
    let verified = r.count(Status::Verified);
    outcome(
        bad(r).is_empty() && verified > 0 && crossed > 0,
        format!(
            "{verified} isometries verified, {crossed} cross-checked by exhaustive search, {} above the size cap{}",
            r.count(Status::Vacuous),
            first_bad(r)
        ),
    )
}

fn certified(c: &CaseResult, bound: i64) -> bool {
    let tier = metric(c, "tier");
    match bound {
        b if b <= -2 => tier == "vacuous",
        -1 => matches!(tier, "nonempty-verified" | "homology-verified" | "fully-verified"),
        _ => matches!(tier, "homology-verified" | "fully-verified"),
    }
}

fn gl(r: &SuiteReport) -> Outcome {
    let limit = Duration::from_secs(600);
    let mut notes = Vec::new();
    let mut ok = bad(r).is_empty();
    for n in 2..=4i64 {
        for (part, expect) in [(1, n - 2), (2, n - 3)] {
            let case = format!("gl GF(2)^{n} part {part}");
            match find(r, &case) {
                Some(c) => {
                    let b: i64 = metric(c, "bound").parse().unwrap_or(i64::MIN);
                    let good = b == expect && certified(c, b);
                    ok &= good;
                    notes.push(format!("n={n} part {part}: d={b} {}", metric(c, "tier")));
                }
                None => {
                    ok = false;
                    notes.push(format!("{case} missing"));
                }
            }
        }
    }
    outcome(
        ok && elapsed(r) < limit,
        format!("{}; {:.1?} (limit 10 min){}", notes.join(", "), elapsed(r), first_bad(r)),
    )
}

fn quad(r: &SuiteReport, usr: i64) -> Outcome {
    let limit = Duration::from_secs(900);
    let mut notes = Vec::new();
    let mut ok = bad(r).is_empty() && r.count(Status::Critical) == 0;
    for g in 1..=4i64 {
        for (name, expect) in [
            ("isotropic", (g - usr - 2).div_euclid(2)),
            ("hyperbolic", (g - usr - 3).div_euclid(2)),
        ] {
            let case = format!("{name} GF(2) H^{g} part 1");
            match find(r, &case) {
                Some(c) => {
                    let b: i64 = metric(c, "bound").parse().unwrap_or(i64::MIN);
                    let good = b == expect && certified(c, b);
                    ok &= good;
                    if !good {
                        notes.push(format!("{case}: d={b}, expected {expect}, {}", metric(c, "tier")));
                    }
                }
                None => {
                    ok = false;
                    notes.push(format!("{case} missing"));
                }
            }
        }
    }
    let certified_nonvacuous = r
        .cases
        .iter()
        .filter(|c| matches!(metric(c, "tier"), "nonempty-verified" | "homology-verified" | "fully-verified"))
        .count();
    outcome(
        ok && elapsed(r) < limit,
        format!(
            "usr = {usr}; IU and HU bounds met for g = 1..4; {certified_nonvacuous} of {} cases positively certified, none refuted; {:.1?} (limit 15 min){}{}",
            r.cases.len(),
            elapsed(r),
            if notes.is_empty() { String::new() } else { format!("; {}", notes.join(", ")) },
            first_bad(r)
        ),
    )
}

fn link_isos(r: &SuiteReport) -> Outcome {
    let mut parts = BTreeMap::from([("iso", 0usize), ("skipped", 0), ("FAILED", 0)]);
    for c in &r.cases {
        for (k, v) in &c.metrics {
            if k.starts_with("part") {
                let tag = v.split_whitespace().next().unwrap_or("").trim_end_matches(':');
                *parts.entry(if tag == "skipped" { "skipped" } else if tag == "iso" { "iso" } else { "FAILED" }).or_default() += 1;
            }
        }
    }
    outcome(
        bad(r).is_empty() && parts["FAILED"] == 0 && parts["iso"] > 0,
        format!(
            "{} instances, {} parts isomorphic, {} parts above 1e5 simplices{}",
            r.cases.len(),
            parts["iso"],
            parts["skipped"],
            first_bad(r)
        ),
    )
}

#[test]
fn acceptance() {
    let cfg = SuiteConfig::default();
    let run = |name: &str| run_suite(name, &cfg).unwrap_or_else(|e| panic!("suite {name}: {e}"));
    let gf2 = catalog::ring_by_label("GF(2)").unwrap();
    let param = catalog::default_parameter(&gf2).unwrap();
    let usr = unitary_stable_rank(&param, cfg.n_max, cfg.eu_mode, cfg.budget)
        .unwrap()
        .value
        .expect("usr of GF(2)") as i64;

    let axioms_r = run("axioms");
    let blocks_r = run("blocks");
    let sr_r = run("stable-rank");
    let results = vec![
        (1, "axiom suite", axioms(&axioms_r, &cfg)),
        (2, "oracle equivalence", oracles(&blocks_r)),
        (3, "stable ranks", stable_ranks(&sr_r)),
        (4, "matrix reducibility", reductions(&blocks_r)),
        (5, "straightening", straightening(&run("straighten"))),
        (6, "transitivity", transitivity(&run("transitivity"))),
        (7, "cancellation", cancellation(&run("cancellation"))),
        (8, "GL connectivity", gl(&run("gl-connectivity"))),
        (9, "quadratic connectivity", quad(&run("quad-connectivity"), usr)),
        (10, "link isomorphisms", link_isos(&run("link-isos"))),
    ];
    for (n, name, o) in &results {
        println!("criterion {n:>2} {:<24} {}: {}", name, if o.pass { "PASS" } else { "FAIL" }, o.note);
    }
    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
