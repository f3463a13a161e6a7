//! Monte-Carlo validators for the closed-form outage expressions.
//!
//! Three estimators, deliberately independent of one another:
//!
//! 1. [`mc_event_outage`]: samples every link's instantaneous SNR and
//!    evaluates the literal outage-event algebra. Under link independence
//!    this is an exact estimator of the event probability (no union-as-sum
//!    approximation), so it must agree with the exact-union closed form to
//!    within binomial noise.
//! 2. [`mc_snr_outage`]: samples the end-to-end equivalent SNR — either the
//!    general five-link expression or its shared-amplitude simplification —
//!    and counts threshold violations.
//! 3. [`mc_ber`]: the full symbol-level chain (BPSK mapping, matched
//!    estimator at each receiver, XOR network coding at R1, amplify-and-
//!    forward at R2, XOR decoding at D1) producing a bit error rate.
//!
//! Every estimator processes trials in fixed-size chunks with per-chunk
//! ChaCha substreams and integer accumulators, so results are bit-identical
//! for any worker count.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::analytic::{snr_threshold, ExtendedTopology, RateTarget, TwoPairLinks};
use crate::fading::{sample_gamma, sample_snr, NakagamiParams};
use crate::stream::{lane_rng, parallel_chunk_count, Lane};
use crate::{Error, Result};

/// Canonical link order used throughout: s1r1, s2r1, r1r2, r2d1, s2d1.
const N_LINKS: usize = 5;
const S1R1: usize = 0;
const S2R1: usize = 1;
const R1R2: usize = 2;
const R2D1: usize = 3;
const S2D1: usize = 4;

/// Transmit power per node, linear scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodePowers {
    pub s1: f64,
    pub s2: f64,
    pub r1: f64,
    pub r2: f64,
}

impl NodePowers {
    /// All four nodes transmit with the same power.
    pub fn uniform(p: f64) -> Self {
        Self { s1: p, s2: p, r1: p, r2: p }
    }
}

/// Receiver noise variance per link, linear scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkNoise {
    pub s1r1: f64,
    pub s2r1: f64,
    pub r1r2: f64,
    pub r2d1: f64,
    pub s2d1: f64,
}

impl LinkNoise {
    pub fn uniform(n0: f64) -> Self {
        Self { s1r1: n0, s2r1: n0, r1r2: n0, r2d1: n0, s2d1: n0 }
    }

    fn as_array(&self) -> [f64; N_LINKS] {
        [self.s1r1, self.s2r1, self.r1r2, self.r2d1, self.s2d1]
    }
}

/// Powers, noise variances and fading for the five-link two-pair network.
///
/// The mean square channel gain of each link is tied to its average SNR by
/// `γ̄ = P E[|h|²] / σ²`; [`LinkBudget::new`] derives `E[|h|²]` from that
/// relation, while [`LinkBudget::with_channel_gains`] accepts explicit gains
/// and rejects inconsistent specifications.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkBudget {
    powers: NodePowers,
    noise: [f64; N_LINKS],
    links: TwoPairLinks,
    mean_amp_sq: [f64; N_LINKS],
}

impl LinkBudget {
    pub fn new(powers: NodePowers, noise: LinkNoise, links: TwoPairLinks) -> Result<Self> {
        let noise = noise.as_array();
        validate_budget(&powers, &noise)?;
        let mut mean_amp_sq = [0.0; N_LINKS];
        let fading = links.as_array();
        for i in 0..N_LINKS {
            mean_amp_sq[i] = fading[i].mean_snr() * noise[i] / tx_power(&powers, i);
        }
        Ok(Self { powers, noise, links, mean_amp_sq })
    }

    /// Builds a budget with explicit mean square channel gains, checking the
    /// `γ̄ = P E[|h|²] / σ²` consistency relation to 1e-9 relative.
    pub fn with_channel_gains(
        powers: NodePowers,
        noise: LinkNoise,
        links: TwoPairLinks,
        gains: [f64; N_LINKS],
    ) -> Result<Self> {
        let noise = noise.as_array();
        validate_budget(&powers, &noise)?;
        let fading = links.as_array();
        for i in 0..N_LINKS {
            if !(gains[i].is_finite() && gains[i] > 0.0) {
                return Err(Error::invalid("LinkBudget", format!("channel gain {i} must be > 0")));
            }
            let implied = tx_power(&powers, i) * gains[i] / noise[i];
            let rel = ((fading[i].mean_snr() - implied) / implied).abs();
            if rel > 1e-9 {
                return Err(Error::invalid(
                    "LinkBudget",
                    format!(
                        "link {i}: mean_snr {} inconsistent with P*E|h|^2/noise = {implied}",
                        fading[i].mean_snr()
                    ),
                ));
            }
        }
        Ok(Self { powers, noise, links, mean_amp_sq: gains })
    }

    /// Homogeneous network: unit noise and channel gain everywhere, all
    /// transmit powers equal to `mean_snr`, every link Nakagami-`m`.
    pub fn iid(m: f64, mean_snr: f64) -> Result<Self> {
        let link = crate::fading::LinkFading::new(m, mean_snr)?;
        Self::new(NodePowers::uniform(mean_snr), LinkNoise::uniform(1.0), TwoPairLinks::iid(link))
    }

    pub fn powers(&self) -> NodePowers {
        self.powers
    }

    pub fn links(&self) -> &TwoPairLinks {
        &self.links
    }

    fn nakagami(&self, idx: usize) -> NakagamiParams {
        // parameters were validated at construction
        NakagamiParams::new(self.links.as_array()[idx].m(), self.mean_amp_sq[idx]).expect("validated")
    }

    fn uniform_parameters(&self) -> Option<(f64, f64, NakagamiParams)> {
        let p = self.powers;
        if p.s1 != p.s2 || p.s1 != p.r1 || p.s1 != p.r2 {
            return None;
        }
        if self.noise.iter().any(|&n| n != self.noise[0]) {
            return None;
        }
        let nak = self.nakagami(0);
        for i in 1..N_LINKS {
            if self.nakagami(i) != nak {
                return None;
            }
        }
        Some((p.s1, self.noise[0], nak))
    }
}

fn tx_power(powers: &NodePowers, idx: usize) -> f64 {
    match idx {
        S1R1 => powers.s1,
        S2R1 | S2D1 => powers.s2,
        R1R2 => powers.r1,
        R2D1 => powers.r2,
        _ => unreachable!(),
    }
}

fn validate_budget(powers: &NodePowers, noise: &[f64; N_LINKS]) -> Result<()> {
    for (name, v) in [
        ("power s1", powers.s1),
        ("power s2", powers.s2),
        ("power r1", powers.r1),
        ("power r2", powers.r2),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid("LinkBudget", format!("{name} must be > 0, got {v}")));
        }
    }
    for (i, v) in noise.iter().enumerate() {
        if !(v.is_finite() && *v > 0.0) {
            return Err(Error::invalid("LinkBudget", format!("noise variance {i} must be > 0, got {v}")));
        }
    }
    Ok(())
}

/// One joint realization of the five-link channel: fading coefficient and
/// additive noise per link.
#[derive(Clone, Copy, Debug)]
pub struct ChannelDraw {
    /// Fading coefficients, Nakagami-m amplitude with uniform phase.
    pub h: [Complex64; N_LINKS],
    /// Complex Gaussian noise, variance split evenly between re/im.
    pub n: [Complex64; N_LINKS],
}

/// Whether channel phases are drawn uniformly or pinned to zero.
///
/// Phases are irrelevant to everything that depends on `|h|` only; the zero
/// mode exists so tests can assert exactly that without perturbing the
/// amplitude stream (phases always come from their own substream).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PhaseMode {
    #[default]
    Uniform,
    Zero,
}

fn sample_fading<R: Rng + ?Sized>(
    b: &LinkBudget,
    amp_rng: &mut R,
    phase_rng: &mut R,
    phase: PhaseMode,
) -> [Complex64; N_LINKS] {
    let mut h = [Complex64::ZERO; N_LINKS];
    for (i, slot) in h.iter_mut().enumerate() {
        let nak = b.nakagami(i);
        let amp = crate::fading::sample_amplitude(nak, amp_rng);
        let theta = match phase {
            PhaseMode::Uniform => phase_rng.random::<f64>() * std::f64::consts::TAU,
            PhaseMode::Zero => 0.0,
        };
        *slot = Complex64::from_polar(amp, theta);
    }
    h
}

fn sample_noise<R: Rng + ?Sized>(b: &LinkBudget, noise_rng: &mut R) -> [Complex64; N_LINKS] {
    let mut n = [Complex64::ZERO; N_LINKS];
    for (i, slot) in n.iter_mut().enumerate() {
        let s = (b.noise[i] / 2.0).sqrt();
        let re: f64 = StandardNormal.sample(noise_rng);
        let im: f64 = StandardNormal.sample(noise_rng);
        *slot = Complex64::new(s * re, s * im);
    }
    n
}

impl ChannelDraw {
    /// Draws fading and noise for all five links. Amplitudes, phases and
    /// noise each consume their own RNG so they can be varied independently.
    pub fn sample<R: Rng + ?Sized>(
        b: &LinkBudget,
        amp_rng: &mut R,
        phase_rng: &mut R,
        noise_rng: &mut R,
        phase: PhaseMode,
    ) -> Self {
        Self {
            h: sample_fading(b, amp_rng, phase_rng, phase),
            n: sample_noise(b, noise_rng),
        }
    }
}

/// A Monte-Carlo probability estimate with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub trials: u64,
    pub std_err: f64,
}

impl OutageEstimate {
    pub fn from_counts(events: u64, trials: u64) -> Self {
        assert!(trials >= 1 && events <= trials);
        let p_hat = events as f64 / trials as f64;
        let std_err = (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
        Self { p_hat, trials, std_err }
    }

    /// One-sided 95% upper bound `3 / trials` when no event was observed.
    pub fn zero_event_bound(&self) -> Option<f64> {
        (self.p_hat == 0.0).then(|| 3.0 / self.trials as f64)
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::invalid("trials", "need at least one trial"));
    }
    Ok(())
}

/// Event-level outage estimator: draws every link's instantaneous SNR from
/// its Gamma law and evaluates the outage-event algebra
/// `(∩ side links) ∩ (last hop ∪ relay hops ∪ (∩ source uplinks))` per trial.
pub fn mc_event_outage(
    topology: &ExtendedTopology,
    r: RateTarget,
    trials: u64,
    seed: u64,
) -> Result<OutageEstimate> {
    check_trials(trials)?;
    let gth = snr_threshold(r);
    let events = parallel_chunk_count(trials, |chunk, len| {
        let mut rng = lane_rng(seed, chunk, Lane::Amplitude);
        let mut count = 0u64;
        for _ in 0..len {
            let mut src_all = true;
            for l in topology.source_to_relay1() {
                src_all &= sample_snr(*l, &mut rng) < gth;
            }
            let mut branch = src_all;
            for l in topology.relay_hops() {
                branch |= sample_snr(*l, &mut rng) < gth;
            }
            branch |= sample_snr(topology.last_relay_to_dest(), &mut rng) < gth;
            let mut side_all = true;
            for l in topology.source_to_dest() {
                side_all &= sample_snr(*l, &mut rng) < gth;
            }
            count += u64::from(side_all && branch);
        }
        count
    });
    Ok(OutageEstimate::from_counts(events, trials))
}

/// [`mc_event_outage`] on the concrete two-pair / two-relay network.
pub fn mc_event_outage_two_pair(
    links: &TwoPairLinks,
    r: RateTarget,
    trials: u64,
    seed: u64,
) -> Result<OutageEstimate> {
    mc_event_outage(&ExtendedTopology::from_two_pair(links), r, trials, seed)
}

/// End-to-end equivalent SNR of one channel realization:
///
/// ```text
///         P_s2 |h_s2d1|² + P_r1 P_r2 |h_r1r2|² |h_r2d1|² (P_s1 |h_s1r1|² + P_s2 |h_s2r1|²)
/// γ_eq = ───────────────────────────────────────────────────────────────────────────────────
///         σ²_s2d1 + σ²_r2d1 + P_r2 |h_r2d1|² σ²_r1r2
///                 + P_r1 P_r2 |h_r1r2|² |h_r2d1|² (σ²_s1r1 + σ²_s2r1)
/// ```
///
/// The noise terms enter through their expected powers, so only the fading
/// magnitudes of the draw matter.
pub fn equivalent_snr(draw: &ChannelDraw, b: &LinkBudget) -> f64 {
    let mut g = [0.0; N_LINKS];
    for (slot, h) in g.iter_mut().zip(&draw.h) {
        *slot = h.norm_sqr();
    }
    let p = b.powers;
    let cascade = p.r1 * p.r2 * g[R1R2] * g[R2D1];
    let num = p.s2 * g[S2D1] + cascade * (p.s1 * g[S1R1] + p.s2 * g[S2R1]);
    let den = b.noise[S2D1]
        + b.noise[R2D1]
        + p.r2 * g[R2D1] * b.noise[R1R2]
        + cascade * (b.noise[S1R1] + b.noise[S2R1]);
    num / den
}

/// Shared-amplitude simplification of [`equivalent_snr`]: with one common
/// `|h|²`, equal powers `P` and equal noise `N0` on every link,
///
/// ```text
/// γ_eq = P |h|² (1 + 2 P² |h|⁴) / (N0 (2 + P |h|² + 2 P² |h|⁴))
/// ```
pub fn equivalent_snr_shared(amp_sq: f64, power: f64, noise: f64) -> f64 {
    let a = power * amp_sq;
    a * (1.0 + 2.0 * a * a) / (noise * (2.0 + a + 2.0 * a * a))
}

/// How [`mc_snr_outage`] draws the five fading coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SnrSamplingMode {
    /// All five coefficients drawn independently (the general expression).
    IndependentLinks,
    /// One amplitude shared by all links (the simplified expression);
    /// requires a fully homogeneous budget.
    SharedAmplitude,
}

/// Equivalent-SNR outage estimator: counts realizations with
/// `γ_eq < 2^{R_t} - 1`.
pub fn mc_snr_outage(
    b: &LinkBudget,
    r: RateTarget,
    trials: u64,
    seed: u64,
    mode: SnrSamplingMode,
) -> Result<OutageEstimate> {
    mc_snr_outage_with_phases(b, r, trials, seed, mode, PhaseMode::Uniform)
}

/// [`mc_snr_outage`] with an explicit phase mode. The estimate depends on
/// the fading magnitudes only, so both phase modes must agree exactly; tests
/// assert precisely that.
pub fn mc_snr_outage_with_phases(
    b: &LinkBudget,
    r: RateTarget,
    trials: u64,
    seed: u64,
    mode: SnrSamplingMode,
    phase: PhaseMode,
) -> Result<OutageEstimate> {
    check_trials(trials)?;
    let gth = snr_threshold(r);
    let events = match mode {
        SnrSamplingMode::IndependentLinks => parallel_chunk_count(trials, |chunk, len| {
            let mut amp_rng = lane_rng(seed, chunk, Lane::Amplitude);
            let mut phase_rng = lane_rng(seed, chunk, Lane::Phase);
            let mut noise_rng = lane_rng(seed, chunk, Lane::Noise);
            let mut count = 0u64;
            for _ in 0..len {
                let draw = ChannelDraw::sample(b, &mut amp_rng, &mut phase_rng, &mut noise_rng, phase);
                count += u64::from(equivalent_snr(&draw, b) < gth);
            }
            count
        }),
        SnrSamplingMode::SharedAmplitude => {
            let (power, noise, nak) = b.uniform_parameters().ok_or_else(|| {
                Error::invalid(
                    "mc_snr_outage",
                    "shared-amplitude mode requires equal powers, noise variances and fading on all links",
                )
            })?;
            parallel_chunk_count(trials, |chunk, len| {
                let mut rng = lane_rng(seed, chunk, Lane::Amplitude);
                let mut count = 0u64;
                for _ in 0..len {
                    let amp_sq = sample_gamma(nak.m(), nak.mu() / nak.m(), &mut rng);
                    count += u64::from(equivalent_snr_shared(amp_sq, power, noise) < gth);
                }
                count
            })
        }
    };
    Ok(OutageEstimate::from_counts(events, trials))
}

/// Amplify-and-forward gain at R2:
/// `β = √( P_r2 / (P_r1 |h_r1r2|² + σ²_r1r2) )`.
pub fn af_gain(b: &LinkBudget, h_r1r2: Complex64) -> f64 {
    (b.powers.r2 / (b.powers.r1 * h_r1r2.norm_sqr() + b.noise[R1R2])).sqrt()
}

/// Whether fading is redrawn per symbol or held constant over each block.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FadingGranularity {
    /// Fresh fading coefficients for every symbol.
    #[default]
    PerSymbol,
    /// Block fading: one coefficient set per block, redrawn across blocks.
    PerBlock,
}

/// Symbol-level simulation size and seeding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BerConfig {
    pub blocks: u64,
    pub symbols_per_block: u64,
    pub seed: u64,
    pub granularity: FadingGranularity,
}

impl BerConfig {
    pub fn new(blocks: u64, symbols_per_block: u64, seed: u64) -> Result<Self> {
        if blocks == 0 || symbols_per_block == 0 {
            return Err(Error::invalid("BerConfig", "blocks and symbols_per_block must be >= 1"));
        }
        Ok(Self { blocks, symbols_per_block, seed, granularity: FadingGranularity::default() })
    }

    /// The reference scale: 10³ realizations of 10⁴ symbols each.
    pub fn reference_scale(seed: u64) -> Self {
        Self { blocks: 1_000, symbols_per_block: 10_000, seed, granularity: FadingGranularity::default() }
    }

    pub fn with_granularity(mut self, granularity: FadingGranularity) -> Self {
        self.granularity = granularity;
        self
    }
}

/// A bit error rate estimate with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BerEstimate {
    pub ber: f64,
    pub errors: u64,
    pub bits: u64,
    pub std_err: f64,
}

#[inline]
fn bpsk(bit: bool) -> f64 {
    if bit {
        -1.0
    } else {
        1.0
    }
}

#[inline]
fn demod(z: Complex64) -> bool {
    z.re < 0.0
}

/// Full symbol-level BER of the S1 message at D1.
///
/// Per symbol: both sources BPSK-map fresh bits; R1 hard-decides each uplink
/// via the matched estimator `y h*`, XORs the decisions and re-modulates;
/// R2 scales by the AF gain and forwards; D1 hard-decides the relayed
/// network-coded bit (matched against the cascade `h_r1r2 h_r2d1`, the
/// receiver has full CSI) and the direct S2 bit, XORs them, and the result
/// is compared against the original S1 bit. Fading is redrawn per symbol or
/// per block according to the configured granularity; noise is always per
/// symbol.
pub fn mc_ber(b: &LinkBudget, cfg: &BerConfig) -> Result<BerEstimate> {
    if cfg.blocks == 0 || cfg.symbols_per_block == 0 {
        return Err(Error::invalid("BerConfig", "blocks and symbols_per_block must be >= 1"));
    }
    let sqrt_p = [
        b.powers.s1.sqrt(),
        b.powers.s2.sqrt(),
        b.powers.r1.sqrt(),
        b.powers.r2.sqrt(),
        b.powers.s2.sqrt(),
    ];

    // one chunk per block, whatever the block length
    let errors: u64 = {
        use rayon::prelude::*;
        (0..cfg.blocks)
            .into_par_iter()
            .map(|block| {
                let mut amp_rng = lane_rng(cfg.seed, block, Lane::Amplitude);
                let mut phase_rng = lane_rng(cfg.seed, block, Lane::Phase);
                let mut noise_rng = lane_rng(cfg.seed, block, Lane::Noise);
                let mut bit_rng = lane_rng(cfg.seed, block, Lane::Bits);
                let mut h = sample_fading(b, &mut amp_rng, &mut phase_rng, PhaseMode::Uniform);
                let mut count = 0u64;
                for _ in 0..cfg.symbols_per_block {
                    if cfg.granularity == FadingGranularity::PerSymbol {
                        h = sample_fading(b, &mut amp_rng, &mut phase_rng, PhaseMode::Uniform);
                    }
                    let n = sample_noise(b, &mut noise_rng);

                    let bit1: bool = bit_rng.random();
                    let bit2: bool = bit_rng.random();
                    let x1 = bpsk(bit1);
                    let x2 = bpsk(bit2);

                    // uplinks to R1, hard decisions, XOR, re-modulation
                    let y_s1r1 = sqrt_p[S1R1] * h[S1R1] * x1 + n[S1R1];
                    let y_s2r1 = sqrt_p[S2R1] * h[S2R1] * x2 + n[S2R1];
                    let nc_bit = demod(y_s1r1 * h[S1R1].conj()) ^ demod(y_s2r1 * h[S2R1].conj());
                    let x_nc = bpsk(nc_bit);

                    // R1 -> R2, then AF forwarding to D1
                    let y_r1r2 = sqrt_p[R1R2] * h[R1R2] * x_nc + n[R1R2];
                    let beta = af_gain(b, h[R1R2]);
                    let y_r2d1 = h[R2D1] * beta * y_r1r2 + n[R2D1];
                    let nc_hat = demod(y_r2d1 * (h[R1R2] * h[R2D1]).conj());

                    // direct side link and final XOR decode
                    let y_s2d1 = sqrt_p[S2D1] * h[S2D1] * x2 + n[S2D1];
                    let s2_hat = demod(y_s2d1 * h[S2D1].conj());
                    let s1_hat = nc_hat ^ s2_hat;

                    count += u64::from(s1_hat != bit1);
                }
                count
            })
            .sum()
    };

    let bits = cfg.blocks * cfg.symbols_per_block;
    let ber = errors as f64 / bits as f64;
    let std_err = (ber * (1.0 - ber) / bits as f64).sqrt();
    Ok(BerEstimate { ber, errors, bits, std_err })
}
