//! Command-line harness, report formats and sample dumps for
//! [`condhaar_core`].

pub mod cli;
pub mod dump;
pub mod experiments;
pub mod report;
pub mod runner;
