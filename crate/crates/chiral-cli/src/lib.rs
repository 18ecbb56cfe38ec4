//! Verification suites, computations and JSON reports for the `chiral`
//! command-line tool.

pub mod report;
pub mod suites;
