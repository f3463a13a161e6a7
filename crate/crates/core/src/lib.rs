//! Outage probability for network-coded cooperative wireless networks over
//! Nakagami-m fading.
//!
//! The library models a two source-destination pair, two relay topology in
//! which the first relay XOR-combines the source messages and the second
//! relay amplifies and forwards, plus its generalization to N pairs and M
//! relays in series. It provides:
//!
//! - [`analytic`]: closed-form end-to-end outage probabilities built from
//!   per-link regularized incomplete-Gamma CDFs, in both the literal
//!   sum-of-unions form and an exact union form,
//! - [`montecarlo`]: three independent estimators (event-level sampling,
//!   equivalent-SNR sampling, and a full symbol-level BPSK/XOR/AF bit error
//!   chain) used to validate the closed forms,
//! - [`diversity`]: log-log slope fitting of outage curves against the
//!   `d = N*m` prediction,
//! - [`special`] and [`fading`]: the incomplete-Gamma kernel and the
//!   Nakagami-m distribution machinery underneath everything else,
//! - [`selftest`]: cross-module consistency suites for release checks.
//!
//! All Monte-Carlo runs are deterministic: estimates depend only on the
//! inputs and the seed, never on the number of worker threads.

pub mod analytic;
pub mod diversity;
pub mod fading;
pub mod montecarlo;
pub mod selftest;
pub mod special;

mod stream;

pub use analytic::{RateTarget, UnionMode};
pub use fading::{LinkFading, NakagamiParams};
pub use montecarlo::OutageEstimate;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument fell outside a function's mathematical domain.
    #[error("domain error in {what}: {why}")]
    Domain { what: &'static str, why: String },

    /// A parameter failed construction-time validation.
    #[error("invalid {what}: {why}")]
    InvalidParam { what: &'static str, why: String },

    /// A declared topology is missing a link.
    #[error("missing link {link}")]
    MissingLink { link: String },

    /// A series or continued fraction failed to converge.
    #[error("{what} did not converge for a={a}, x={x}")]
    NoConvergence { what: &'static str, a: f64, x: f64 },
}

impl Error {
    pub(crate) fn domain(what: &'static str, why: impl Into<String>) -> Self {
        Error::Domain { what, why: why.into() }
    }

    pub(crate) fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        Error::InvalidParam { what, why: why.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Converts an average SNR in dB to linear scale.
///
/// Unit conversion lives at API boundaries; everything inside the crate is
/// linear-scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear SNR to dB.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
