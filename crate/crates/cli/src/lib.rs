//! Library half of the `ncc-outage` command-line tool.
//!
//! The binary is a thin shell around these modules so that integration tests
//! can drive sweeps, CSV emission and the selftest plumbing directly.

pub mod config;
pub mod sweep;

/// Environment variable holding the default worker count; the `--workers`
/// flag overrides it. Worker count never affects results, only wall time.
pub const WORKERS_ENV: &str = "NCC_OUTAGE_WORKERS";
