//! Nakagami-m fading: amplitude and SNR distributions, random variates, and
//! the Rician correspondence.
//!
//! Amplitudes X follow the Nakagami-m density
//! `f(x) = 2 m^m x^{2m-1} e^{-m x²/μ} / (Γ(m) μ^m)` with `μ = E[X²]` and
//! shape `m = μ² / Var(X²) >= 1/2`; the instantaneous SNR of a link is then
//! Gamma-distributed, which is what every outage formula builds on.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::special::{log_gamma, reg_lower_gamma};
use crate::{Error, Result};

/// Shape and mean-square amplitude of one Nakagami-m fading process.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NakagamiParams {
    m: f64,
    mu: f64,
}

impl NakagamiParams {
    /// `m >= 0.5` and `mu > 0`, both finite.
    pub fn new(m: f64, mu: f64) -> Result<Self> {
        if !m.is_finite() || m < 0.5 {
            return Err(Error::invalid("NakagamiParams", format!("shape m must be >= 0.5, got {m}")));
        }
        if !mu.is_finite() || mu <= 0.0 {
            return Err(Error::invalid("NakagamiParams", format!("mean square mu must be > 0, got {mu}")));
        }
        Ok(Self { m, mu })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Mean square amplitude `μ = E[X²]`.
    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// Per-link fading description: shape factor and average linear SNR.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkFading {
    m: f64,
    mean_snr: f64,
}

impl LinkFading {
    /// `m >= 0.5` and `mean_snr > 0` (linear scale, not dB), both finite.
    pub fn new(m: f64, mean_snr: f64) -> Result<Self> {
        if !m.is_finite() || m < 0.5 {
            return Err(Error::invalid("LinkFading", format!("shape m must be >= 0.5, got {m}")));
        }
        if !mean_snr.is_finite() || mean_snr <= 0.0 {
            return Err(Error::invalid(
                "LinkFading",
                format!("mean_snr must be > 0 (linear scale), got {mean_snr}"),
            ));
        }
        Ok(Self { m, mean_snr })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Average SNR `γ̄ = E[γ]`, linear scale.
    pub fn mean_snr(&self) -> f64 {
        self.mean_snr
    }
}

/// Nakagami-m amplitude density at `x >= 0`.
pub fn amplitude_pdf(p: NakagamiParams, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain("amplitude_pdf", format!("x must be finite and >= 0, got {x}")));
    }
    let (m, mu) = (p.m, p.mu);
    if x == 0.0 {
        // x^{2m-1} vanishes for m > 1/2; at exactly m = 1/2 the density is
        // the half-normal value 2 √(m/μ) / Γ(1/2).
        return Ok(if m > 0.5 {
            0.0
        } else {
            (std::f64::consts::LN_2 + 0.5 * (m / mu).ln() - log_gamma(m)?).exp()
        });
    }
    let ln_f = std::f64::consts::LN_2 + m * m.ln() + (2.0 * m - 1.0) * x.ln()
        - m * x * x / mu
        - log_gamma(m)?
        - m * mu.ln();
    Ok(ln_f.exp())
}

/// Instantaneous-SNR density at `g >= 0` (Gamma with shape `m`, mean `γ̄`).
///
/// For `m < 1` the density diverges at the origin; `f64::INFINITY` is
/// returned there.
pub fn snr_pdf(l: LinkFading, g: f64) -> Result<f64> {
    if !g.is_finite() || g < 0.0 {
        return Err(Error::domain("snr_pdf", format!("g must be finite and >= 0, got {g}")));
    }
    let (m, gbar) = (l.m, l.mean_snr);
    if g == 0.0 {
        return Ok(if m > 1.0 {
            0.0
        } else if m == 1.0 {
            1.0 / gbar
        } else {
            f64::INFINITY
        });
    }
    let ln_f = m * (m / gbar).ln() + (m - 1.0) * g.ln() - m * g / gbar - log_gamma(m)?;
    Ok(ln_f.exp())
}

/// Instantaneous-SNR CDF `F(g) = 1 - Q(m, m g / γ̄)`, the per-link outage
/// probability at threshold `g`.
pub fn snr_cdf(l: LinkFading, g: f64) -> Result<f64> {
    if !g.is_finite() || g < 0.0 {
        return Err(Error::domain("snr_cdf", format!("g must be finite and >= 0, got {g}")));
    }
    reg_lower_gamma(l.m, l.m * g / l.mean_snr)
}

/// Draws one Nakagami-m amplitude: X = √G with G ~ Gamma(shape = m,
/// scale = μ/m), so `E[X²] = μ` by construction.
pub fn sample_amplitude<R: Rng + ?Sized>(p: NakagamiParams, rng: &mut R) -> f64 {
    sample_gamma(p.m, p.mu / p.m, rng).sqrt()
}

/// Draws one instantaneous SNR for a link: Gamma(shape = m, scale = γ̄/m).
pub fn sample_snr<R: Rng + ?Sized>(l: LinkFading, rng: &mut R) -> f64 {
    sample_gamma(l.m, l.mean_snr / l.m, rng)
}

/// Shape factor matching a Rician K-factor: `m = (K+1)² / (2K+1)`.
///
/// `K = 0` gives `m = 1`, the Rayleigh case.
pub fn rician_to_nakagami(k: f64) -> Result<f64> {
    if !k.is_finite() || k < 0.0 {
        return Err(Error::domain("rician_to_nakagami", format!("K must be finite and >= 0, got {k}")));
    }
    Ok((k + 1.0) * (k + 1.0) / (2.0 * k + 1.0))
}

/// Marsaglia-Tsang rejection sampler for Gamma(shape, scale).
///
/// For shape >= 1: squeeze/accept on d·v³ with d = shape - 1/3,
/// c = 1/√(9d). For shape < 1 the standard boost applies: draw at
/// shape + 1 and multiply by U^{1/shape}.
pub(crate) fn sample_gamma<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> f64 {
    debug_assert!(shape > 0.0 && scale > 0.0);
    if shape < 1.0 {
        let boost: f64 = rng.random::<f64>().powf(1.0 / shape);
        return boost * sample_gamma(shape + 1.0, scale, rng);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = StandardNormal.sample(rng);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = rng.random();
        if u < 1.0 - 0.0331 * x.powi(4) {
            return d * v * scale;
        }
        if u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln()) {
            return d * v * scale;
        }
    }
}
