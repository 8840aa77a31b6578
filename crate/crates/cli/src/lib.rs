//! Library surface of the verification CLI: suite definitions and report
//! serialization, kept apart from the binary so the acceptance tests can
//! drive them directly.

pub mod report;
pub mod suites;
