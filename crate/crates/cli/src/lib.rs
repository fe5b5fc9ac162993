//! Problem and report files plus the seeded suites behind the `maslov` binary.

pub mod error;
pub mod problem;
pub mod report;
pub mod suite;

pub use error::{CliError, ExitStatus};
