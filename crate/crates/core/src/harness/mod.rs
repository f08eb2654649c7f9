//! Statistical machinery and the verification suite.

pub mod report;
pub mod stats;
pub mod suite;

pub use report::{CheckKind, Rule, Status, SuiteReport, VerifyReport};
pub use stats::{chi2_combine, chi2_pmf_test, ks_one_sample, ks_two_sample, Chi2Result, KsResult};
pub use suite::{criterion_name, run_suite, SuiteConfig};
