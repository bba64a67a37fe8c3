//! Catalog, batch suites, reports and the homology cache behind the
//! `wittlab` command.

pub mod cache;
pub mod catalog;
pub mod report;
pub mod spec;
pub mod suites;

pub use report::{CaseResult, Status, SuiteReport};
pub use suites::{run_suite, SuiteConfig, SUITES};
