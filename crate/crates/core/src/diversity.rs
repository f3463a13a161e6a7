//! Diversity-order estimation.
//!
//! The diversity order is the high-SNR slope of the outage curve on log-log
//! axes, `d = -lim log P_out / log SNR`; for the N-pair network over
//! Nakagami-m links the closed forms predict `d = N m`. A windowed
//! least-squares fit is used instead of a two-point difference so that
//! curvature away from the asymptote averages out.

use crate::{Error, Result};

/// Result of a log-log slope fit over an SNR window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    /// Estimated diversity order (negated slope).
    pub d_hat: f64,
    /// The fitting window in dB, `(lo, hi)`.
    pub snr_window_db: (f64, f64),
    /// Root-mean-square residual of the fit in log10 units.
    pub residual: f64,
}

/// Fits `log10 P_out` against `log10 SNR` over the points whose SNR falls in
/// `window_db` and returns the negated slope.
///
/// `curve` holds `(snr_linear, p_out)` points. At least 3 points must fall
/// inside the window and every windowed outage must be positive.
pub fn estimate_diversity(curve: &[(f64, f64)], window_db: (f64, f64)) -> Result<SlopeFit> {
    let (lo, hi) = window_db;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::invalid("estimate_diversity", format!("bad window [{lo}, {hi}] dB")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(snr, p) in curve {
        if !(snr.is_finite() && snr > 0.0) {
            return Err(Error::domain("estimate_diversity", format!("SNR must be > 0, got {snr}")));
        }
        let db = 10.0 * snr.log10();
        if db < lo || db > hi {
            continue;
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::domain(
                "estimate_diversity",
                format!("p_out must be > 0 inside the window (log undefined), got {p} at {db:.2} dB"),
            ));
        }
        xs.push(snr.log10());
        ys.push(p.log10());
    }
    if xs.len() < 3 {
        return Err(Error::invalid(
            "estimate_diversity",
            format!("need >= 3 points in [{lo}, {hi}] dB, found {}", xs.len()),
        ));
    }

    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();

    Ok(SlopeFit { d_hat: -slope, snr_window_db: window_db, residual: (ss_res / n).sqrt() })
}

/// The closed-form prediction `d = N m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiversityPrediction {
    pub d: f64,
    /// The prediction was established for integer shape factors only;
    /// non-integer `m` falls outside that validated regime.
    pub integer_shape: bool,
}

/// Predicted diversity order of the N-pair network, `d = N m`.
pub fn predicted_diversity(n_pairs: usize, m: f64) -> Result<DiversityPrediction> {
    if n_pairs < 2 {
        return Err(Error::invalid("predicted_diversity", format!("need N >= 2 pairs, got {n_pairs}")));
    }
    if !m.is_finite() || m < 0.5 {
        return Err(Error::invalid("predicted_diversity", format!("shape m must be >= 0.5, got {m}")));
    }
    Ok(DiversityPrediction {
        d: n_pairs as f64 * m,
        integer_shape: (m - m.round()).abs() < 1e-9,
    })
}
