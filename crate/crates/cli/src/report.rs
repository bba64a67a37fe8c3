//! Suite reports: per-case results, aggregate status, CSV/JSON rendering
//! and digests that ignore timing fields.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Verified,
    Vacuous,
    Inconclusive,
    /// An in-hypothesis refutation or a replay mismatch.
    Critical,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Verified => "verified",
            Status::Vacuous => "vacuous",
            Status::Inconclusive => "inconclusive",
            Status::Critical => "critical",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseResult {
    pub case: String,
    pub status: Status,
    pub detail: String,
    /// Named measurements, rendered in key order.
    pub metrics: BTreeMap<String, String>,
    pub wall_ms: u64,
}

impl CaseResult {
    pub fn new(case: impl Into<String>, status: Status, detail: impl Into<String>) -> Self {
        CaseResult {
            case: case.into(),
            status,
            detail: detail.into(),
            metrics: BTreeMap::new(),
            wall_ms: 0,
        }
    }

    pub fn metric(mut self, key: &str, value: impl ToString) -> Self {
        self.metrics.insert(key.to_string(), value.to_string());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub tool_version: String,
    pub seed: u64,
    /// Digest of the configuration the suite ran with.
    pub input_digest: String,
    pub cases: Vec<CaseResult>,
    pub aggregate: Status,
    pub wall_ms: u64,
}

/// Worst status, Verified for no cases.
pub fn aggregate(cases: &[CaseResult]) -> Status {
    let mut it = cases.iter().map(|c| c.status);
    let Some(first) = it.next() else { return Status::Verified };
    it.fold(first, |a, s| match (a, s) {
        (Status::Critical, _) | (_, Status::Critical) => Status::Critical,
        (Status::Inconclusive, _) | (_, Status::Inconclusive) => Status::Inconclusive,
        (Status::Vacuous, Status::Vacuous) => Status::Vacuous,
        _ => Status::Verified,
    })
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest_json<T: Serialize>(value: &T) -> String {
    digest_bytes(&serde_json::to_vec(value).expect("serializable"))
}

pub const CSV_HEADER: [&str; 5] = ["suite", "case", "status", "critical", "detail"];

impl SuiteReport {
    pub fn new(suite: &str, seed: u64, input_digest: String, cases: Vec<CaseResult>, wall_ms: u64) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            seed,
            input_digest,
            aggregate: aggregate(&cases),
            cases,
            wall_ms,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.aggregate {
            Status::Verified | Status::Vacuous => 0,
            Status::Inconclusive => 1,
            Status::Critical => 2,
        }
    }

    pub fn count(&self, s: Status) -> usize {
        self.cases.iter().filter(|c| c.status == s).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Stable columns; timings are left out.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for c in &self.cases {
            let critical = if c.status == Status::Critical { "yes" } else { "no" };
            w.write_record([self.suite.as_str(), &c.case, c.status.as_str(), critical, &c.detail])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    /// Digest of the report with every timing field zeroed.
    pub fn digest(&self) -> String {
        let mut r = self.clone();
        r.wall_ms = 0;
        for c in &mut r.cases {
            c.wall_ms = 0;
        }
        digest_json(&r)
    }

    pub fn summary_table(&self) -> String {
        let width = self.cases.iter().map(|c| c.case.chars().count()).max().unwrap_or(4).max(4);
        let mut out = format!("{:<width$}  {:<12}  detail\n", "case", "status");
        for c in &self.cases {
            out += &format!("{:<width$}  {:<12}  {}\n", c.case, c.status.as_str(), c.detail);
        }
        out += &format!(
            "{}: {} cases, {} verified, {} vacuous, {} inconclusive, {} critical; aggregate {} ({} ms)\n",
            self.suite,
            self.cases.len(),
            self.count(Status::Verified),
            self.count(Status::Vacuous),
            self.count(Status::Inconclusive),
            self.count(Status::Critical),
            self.aggregate.as_str(),
            self.wall_ms
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregate_order() {
        let c = |s| CaseResult::new("x", s, "");
        assert_eq!(aggregate(&[]), Status::Verified);
        assert_eq!(aggregate(&[c(Status::Vacuous)]), Status::Vacuous);
        assert_eq!(aggregate(&[c(Status::Vacuous), c(Status::Verified)]), Status::Verified);
        assert_eq!(aggregate(&[c(Status::Inconclusive), c(Status::Verified)]), Status::Inconclusive);
        assert_eq!(aggregate(&[c(Status::Inconclusive), c(Status::Critical)]), Status::Critical);
    }
}
