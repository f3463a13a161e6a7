//! Closed-form end-to-end outage probabilities.
//!
//! For the two-pair / two-relay network the S1->D1 outage event is
//!
//! ```text
//! E = E_s2d1 ∩ ( E_r2d1 ∪ E_r1r2 ∪ (E_s1r1 ∩ E_s2r1) )
//! ```
//!
//! with one event per participating link. The literal closed form multiplies
//! the side-link outage by the *sum* of the branch outages
//! (`p_s2d1 (p_r2d1 + p_r1r2 + p_s1r1 p_s2r1)`), which treats the union as a
//! sum and is exact only when the per-link outages are small; at very low SNR
//! it exceeds 1. [`UnionMode`] selects between that literal form
//! ([`UnionMode::PaperSum`], the default, never clamped) and the exact
//! complement-product union ([`UnionMode::ExactUnion`]), which is a true
//! probability everywhere and is what event-level Monte-Carlo converges to.
//!
//! The N-pair / M-relay generalizations keep the same structure: the relay
//! chain contributes `M - 1` hop events plus the last-hop event, the source
//! cluster contributes the product of all N source-to-first-relay outages,
//! and the side links contribute one factor per interfering source. In the
//! i.i.d. case everything collapses to `p^N (M + p^{N-1}) = M p^N + p^{2N-1}`.
//! (The printed i.i.d. form carries the source product as `p^{N-1}` inside
//! the bracket and one extra `p` outside; the distinct-parameter form puts
//! all N source factors inside the bracket. The two layouts differ only in
//! where that factor of `p` sits, so the end-to-end values coincide.)

use crate::fading::{snr_cdf, LinkFading};
use crate::{Error, Result};

/// Target spectral efficiency in bits/s/Hz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateTarget(f64);

impl RateTarget {
    pub fn new(rt: f64) -> Result<Self> {
        if !rt.is_finite() || rt <= 0.0 {
            return Err(Error::invalid("RateTarget", format!("rate must be > 0 bits/s/Hz, got {rt}")));
        }
        Ok(Self(rt))
    }

    pub fn get(&self) -> f64 {
        self.0
    }

    /// Outage threshold `γ_th = 2^{R_t} - 1` (linear SNR).
    pub fn threshold(&self) -> f64 {
        snr_threshold(*self)
    }
}

/// Linear SNR below which the target rate cannot be supported.
pub fn snr_threshold(r: RateTarget) -> f64 {
    2f64.powf(r.0) - 1.0
}

/// How the union of branch outage events is combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UnionMode {
    /// Union as a plain sum: the literal closed form. May exceed 1 at low
    /// SNR; callers are expected to surface that rather than clamp.
    #[default]
    PaperSum,
    /// Exact union via complement products; always a probability.
    ExactUnion,
}

/// The five links participating in the S1->D1 end-to-end event.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoPairLinks {
    pub s1r1: LinkFading,
    pub s2r1: LinkFading,
    pub r1r2: LinkFading,
    pub r2d1: LinkFading,
    pub s2d1: LinkFading,
}

impl TwoPairLinks {
    /// All five links share the same fading parameters.
    pub fn iid(link: LinkFading) -> Self {
        Self { s1r1: link, s2r1: link, r1r2: link, r2d1: link, s2d1: link }
    }

    /// Canonical link order: s1r1, s2r1, r1r2, r2d1, s2d1.
    pub fn as_array(&self) -> [LinkFading; 5] {
        [self.s1r1, self.s2r1, self.r1r2, self.r2d1, self.s2d1]
    }
}

/// An N source-destination pair, M serial-relay topology (first relay does
/// the XOR combining, the rest amplify and forward), with per-link fading.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedTopology {
    /// S_k -> R_1 for k = 1..N.
    source_to_relay1: Vec<LinkFading>,
    /// R_j -> R_{j+1} for j = 1..M-1.
    relay_hops: Vec<LinkFading>,
    /// R_M -> D_1.
    last_relay_to_dest: LinkFading,
    /// S_i -> D_1 for i = 2..N (side information links).
    source_to_dest: Vec<LinkFading>,
}

impl ExtendedTopology {
    /// Builds a topology for `n_pairs` S-D pairs and `m_relays` relays,
    /// checking that every declared link is present.
    pub fn from_parts(
        n_pairs: usize,
        m_relays: usize,
        source_to_relay1: Vec<LinkFading>,
        relay_hops: Vec<LinkFading>,
        last_relay_to_dest: LinkFading,
        source_to_dest: Vec<LinkFading>,
    ) -> Result<Self> {
        if n_pairs < 2 {
            return Err(Error::invalid("ExtendedTopology", format!("need N >= 2 pairs, got {n_pairs}")));
        }
        if m_relays < 2 {
            return Err(Error::invalid("ExtendedTopology", format!("need M >= 2 relays, got {m_relays}")));
        }
        if source_to_relay1.len() != n_pairs {
            let k = source_to_relay1.len().min(n_pairs) + 1;
            return Err(Error::MissingLink { link: format!("S{k}->R1") });
        }
        if relay_hops.len() != m_relays - 1 {
            let j = relay_hops.len().min(m_relays - 1) + 1;
            return Err(Error::MissingLink { link: format!("R{j}->R{}", j + 1) });
        }
        if source_to_dest.len() != n_pairs - 1 {
            let i = source_to_dest.len().min(n_pairs - 1) + 2;
            return Err(Error::MissingLink { link: format!("S{i}->D1") });
        }
        Ok(Self { source_to_relay1, relay_hops, last_relay_to_dest, source_to_dest })
    }

    /// All links i.i.d. with the given fading.
    pub fn iid(n_pairs: usize, m_relays: usize, link: LinkFading) -> Result<Self> {
        Self::from_parts(
            n_pairs,
            m_relays,
            vec![link; n_pairs],
            vec![link; m_relays - 1],
            link,
            vec![link; n_pairs - 1],
        )
    }

    /// The concrete two-pair / two-relay network as an extended topology.
    pub fn from_two_pair(links: &TwoPairLinks) -> Self {
        Self {
            source_to_relay1: vec![links.s1r1, links.s2r1],
            relay_hops: vec![links.r1r2],
            last_relay_to_dest: links.r2d1,
            source_to_dest: vec![links.s2d1],
        }
    }

    pub fn n_pairs(&self) -> usize {
        self.source_to_relay1.len()
    }

    pub fn m_relays(&self) -> usize {
        self.relay_hops.len() + 1
    }

    pub(crate) fn source_to_relay1(&self) -> &[LinkFading] {
        &self.source_to_relay1
    }

    pub(crate) fn relay_hops(&self) -> &[LinkFading] {
        &self.relay_hops
    }

    pub(crate) fn last_relay_to_dest(&self) -> LinkFading {
        self.last_relay_to_dest
    }

    pub(crate) fn source_to_dest(&self) -> &[LinkFading] {
        &self.source_to_dest
    }
}

/// Per-link outage probability at threshold `gth`: the SNR CDF
/// `1 - Q(m, m gth / γ̄)`.
pub fn link_outage(l: LinkFading, gth: f64) -> Result<f64> {
    if !gth.is_finite() || gth < 0.0 {
        return Err(Error::domain("link_outage", format!("threshold must be >= 0, got {gth}")));
    }
    snr_cdf(l, gth)
}

fn combine(mode: UnionMode, branch_terms: &[f64]) -> f64 {
    match mode {
        UnionMode::PaperSum => branch_terms.iter().sum(),
        // 1 - ∏(1 - p_i), written through ln1p/expm1 so tiny outages keep
        // full precision instead of cancelling against 1
        UnionMode::ExactUnion => {
            -branch_terms.iter().map(|p| (-p).ln_1p()).sum::<f64>().exp_m1()
        }
    }
}

/// End-to-end S1->D1 outage for the two-pair / two-relay network.
///
/// In [`UnionMode::PaperSum`] this is the literal closed form
/// `p_s2d1 (p_r2d1 + p_r1r2 + p_s1r1 p_s2r1)` and may exceed 1 at very low
/// SNR; in [`UnionMode::ExactUnion`] the bracket becomes
/// `1 - (1-p_r2d1)(1-p_r1r2)(1-p_s1r1 p_s2r1)`.
pub fn outage_two_pair(links: &TwoPairLinks, r: RateTarget, mode: UnionMode) -> Result<f64> {
    let gth = snr_threshold(r);
    let p_s1r1 = link_outage(links.s1r1, gth)?;
    let p_s2r1 = link_outage(links.s2r1, gth)?;
    let p_r1r2 = link_outage(links.r1r2, gth)?;
    let p_r2d1 = link_outage(links.r2d1, gth)?;
    let p_s2d1 = link_outage(links.s2d1, gth)?;
    Ok(p_s2d1 * combine(mode, &[p_r2d1, p_r1r2, p_s1r1 * p_s2r1]))
}

/// I.i.d. two-pair / two-relay outage `p² (2 + p)` with
/// `p = 1 - Q(m, m (2^{R_t} - 1) / γ̄)`.
pub fn outage_iid(m: f64, mean_snr: f64, r: RateTarget) -> Result<f64> {
    let p = link_outage(LinkFading::new(m, mean_snr)?, snr_threshold(r))?;
    Ok(p * p * (2.0 + p))
}

/// I.i.d. N-pair / M-relay outage `p^N (M + p^{N-1})`.
pub fn outage_extended_iid(
    n_pairs: usize,
    m_relays: usize,
    m: f64,
    mean_snr: f64,
    r: RateTarget,
) -> Result<f64> {
    if n_pairs < 2 {
        return Err(Error::invalid("outage_extended_iid", format!("need N >= 2 pairs, got {n_pairs}")));
    }
    if m_relays < 2 {
        return Err(Error::invalid("outage_extended_iid", format!("need M >= 2 relays, got {m_relays}")));
    }
    let p = link_outage(LinkFading::new(m, mean_snr)?, snr_threshold(r))?;
    Ok(p.powi(n_pairs as i32) * (m_relays as f64 + p.powi(n_pairs as i32 - 1)))
}

/// General N-pair / M-relay outage with per-link fading parameters:
///
/// ```text
/// ∏_{i=2..N} p_sid1 × [ p_rMd1 + Σ_{j=1..M-1} p_rjrj+1 + ∏_{k=1..N} p_skr1 ]
/// ```
///
/// with the bracket replaced by the exact complement-product union in
/// [`UnionMode::ExactUnion`]. Reduces to [`outage_two_pair`] at N = M = 2 and
/// to [`outage_extended_iid`] when all links share the same parameters.
pub fn outage_generalized(t: &ExtendedTopology, r: RateTarget, mode: UnionMode) -> Result<f64> {
    let gth = snr_threshold(r);

    let mut side_product = 1.0;
    for l in t.source_to_dest() {
        side_product *= link_outage(*l, gth)?;
    }

    let mut source_product = 1.0;
    for l in t.source_to_relay1() {
        source_product *= link_outage(*l, gth)?;
    }

    let mut branch_terms = Vec::with_capacity(t.m_relays() + 1);
    branch_terms.push(link_outage(t.last_relay_to_dest(), gth)?);
    for l in t.relay_hops() {
        branch_terms.push(link_outage(*l, gth)?);
    }
    branch_terms.push(source_product);

    Ok(side_product * combine(mode, &branch_terms))
}

/// The i.i.d. outage polynomial split into its exact form
/// `M p^N + p^{2N-1}` and the leading high-SNR term `M p^N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticOutage {
    pub exact: f64,
    pub leading: f64,
}

/// Evaluates `M p^N + p^{2N-1}` and its leading term for a common per-link
/// outage `p`; the ratio tends to 1 as `p -> 0`, which is where the
/// diversity order `d = N m` comes from.
pub fn asymptotic_outage(n_pairs: usize, m_relays: usize, p: f64) -> AsymptoticOutage {
    debug_assert!((0.0..=1.0).contains(&p));
    let leading = m_relays as f64 * p.powi(n_pairs as i32);
    AsymptoticOutage { exact: leading + p.powi(2 * n_pairs as i32 - 1), leading }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::db_to_linear;

    fn rel_err(got: f64, want: f64) -> f64 {
        if want == 0.0 {
            got.abs()
        } else {
            ((got - want) / want).abs()
        }
    }

    fn iid_links(m: f64, gbar: f64) -> TwoPairLinks {
        TwoPairLinks::iid(LinkFading::new(m, gbar).unwrap())
    }

    #[test]
    fn threshold_values() {
        assert_eq!(snr_threshold(RateTarget::new(1.0).unwrap()), 1.0);
        // 2^{1.1} - 1 (oracle value)
        let t = snr_threshold(RateTarget::new(1.1).unwrap());
        assert!(rel_err(t, 1.143_546_925_072_586_3) < 1e-14);
        assert!(snr_threshold(RateTarget::new(1e-9).unwrap()) > 0.0);
        assert!(snr_threshold(RateTarget::new(1e-9).unwrap()) < 1e-8);
        assert!(RateTarget::new(0.0).is_err());
        assert!(RateTarget::new(-1.0).is_err());
    }

    #[test]
    fn link_outage_values() {
        let l = LinkFading::new(1.0, 1.0).unwrap();
        assert_eq!(link_outage(l, 0.0).unwrap(), 0.0);
        assert!(rel_err(link_outage(l, 1.0).unwrap(), 0.632_120_558_828_557_7) < 1e-13);
        let l10 = LinkFading::new(1.0, 10.0).unwrap();
        // 1 - e^{-0.1}
        assert!(rel_err(link_outage(l10, 1.0).unwrap(), 0.095_162_581_964_040_43) < 1e-13);
        assert!(link_outage(l, -1.0).is_err());
    }

    #[test]
    fn two_pair_limits() {
        let rt = RateTarget::new(1.0).unwrap();
        // γ̄ -> ∞: no link ever in outage
        let hi = iid_links(1.0, 1e15);
        assert!(outage_two_pair(&hi, rt, UnionMode::PaperSum).unwrap() < 1e-25);
        assert!(outage_two_pair(&hi, rt, UnionMode::ExactUnion).unwrap() < 1e-25);
        // γ̄ -> 0: every link outage is 1; sum form hits 3, union hits 1
        let lo = iid_links(1.0, 1e-300);
        assert_eq!(outage_two_pair(&lo, rt, UnionMode::PaperSum).unwrap(), 3.0);
        assert_eq!(outage_two_pair(&lo, rt, UnionMode::ExactUnion).unwrap(), 1.0);
    }

    #[test]
    fn two_pair_matches_iid_form() {
        let rt = RateTarget::new(1.0).unwrap();
        let links = iid_links(1.0, 10.0);
        let general = outage_two_pair(&links, rt, UnionMode::PaperSum).unwrap();
        let iid = outage_iid(1.0, 10.0, rt).unwrap();
        // p²(2+p) at p = 1 - e^{-0.1} (oracle value)
        assert!(rel_err(iid, 0.018_973_618_456_474_415) < 1e-13);
        assert!(rel_err(general, iid) < 1e-15);
    }

    #[test]
    fn iid_values() {
        let rt = RateTarget::new(1.0).unwrap();
        // dominated by 2p² at high SNR
        let p_out = outage_iid(1.0, 100.0, rt).unwrap();
        assert!(rel_err(p_out, 1.989_967_410_919_591_5e-4) < 1e-13);
    }

    #[test]
    fn extended_reduces_to_iid() {
        let rt = RateTarget::new(0.8).unwrap();
        for &(m, gbar) in &[(0.5, 3.0), (1.0, 10.0), (2.7, 42.0)] {
            let a = outage_extended_iid(2, 2, m, gbar, rt).unwrap();
            let b = outage_iid(m, gbar, rt).unwrap();
            assert!(rel_err(a, b) < 1e-15, "m={m} gbar={gbar}");
        }
        assert!(outage_extended_iid(1, 2, 1.0, 1.0, rt).is_err());
        assert!(outage_extended_iid(2, 1, 1.0, 1.0, rt).is_err());
    }

    #[test]
    fn extended_saturated_and_small_p() {
        let rt = RateTarget::new(1.0).unwrap();
        // γ̄ -> 0 limit: p = 1, P = M + 1
        let p_out = outage_extended_iid(3, 4, 1.0, 1e-300, rt).unwrap();
        assert_eq!(p_out, 5.0);
        // p = 0.01 via γ̄ = γ_th / -ln(1 - p) at m = 1
        let gbar = 1.0 / -(0.99f64).ln();
        let p_out = outage_extended_iid(3, 2, 1.0, gbar, rt).unwrap();
        assert!(rel_err(p_out, 2.0001e-6) < 1e-12, "p_out={p_out}");
    }

    #[test]
    fn generalized_reductions() {
        let rt = RateTarget::new(1.0).unwrap();
        let link = LinkFading::new(2.0, 25.0).unwrap();
        let topo = ExtendedTopology::iid(2, 2, link).unwrap();
        let a = outage_generalized(&topo, rt, UnionMode::PaperSum).unwrap();
        let b = outage_iid(2.0, 25.0, rt).unwrap();
        assert!(rel_err(a, b) < 1e-14);

        let two_pair = TwoPairLinks {
            s1r1: LinkFading::new(2.0, 8.0).unwrap(),
            s2r1: LinkFading::new(1.0, 12.0).unwrap(),
            r1r2: LinkFading::new(4.0, 30.0).unwrap(),
            r2d1: LinkFading::new(0.5, 5.0).unwrap(),
            s2d1: LinkFading::new(3.0, 17.0).unwrap(),
        };
        for mode in [UnionMode::PaperSum, UnionMode::ExactUnion] {
            let via_general =
                outage_generalized(&ExtendedTopology::from_two_pair(&two_pair), rt, mode).unwrap();
            let direct = outage_two_pair(&two_pair, rt, mode).unwrap();
            assert!(rel_err(via_general, direct) < 1e-15);
        }
    }

    #[test]
    fn generalized_three_by_three_polynomial() {
        // all links with common outage q: P = q² (3q + q³)
        let rt = RateTarget::new(1.0).unwrap();
        let link = LinkFading::new(1.0, 7.0).unwrap();
        let q = link_outage(link, snr_threshold(rt)).unwrap();
        let topo = ExtendedTopology::iid(3, 3, link).unwrap();
        let got = outage_generalized(&topo, rt, UnionMode::PaperSum).unwrap();
        let want = q * q * (3.0 * q + q.powi(3));
        assert!(rel_err(got, want) < 1e-14);
        // and the i.i.d. layouts coincide: q³(3 + q²) = q²(3q + q³)
        let iid = outage_extended_iid(3, 3, 1.0, 7.0, rt).unwrap();
        assert!(rel_err(got, iid) < 1e-14);
    }

    #[test]
    fn missing_link_is_named() {
        let l = LinkFading::new(1.0, 1.0).unwrap();
        let err = ExtendedTopology::from_parts(3, 2, vec![l; 2], vec![l; 1], l, vec![l; 2]);
        assert_eq!(err.unwrap_err(), Error::MissingLink { link: "S3->R1".into() });
        let err = ExtendedTopology::from_parts(2, 4, vec![l; 2], vec![l; 2], l, vec![l; 1]);
        assert_eq!(err.unwrap_err(), Error::MissingLink { link: "R3->R4".into() });
        let err = ExtendedTopology::from_parts(3, 2, vec![l; 3], vec![l; 1], l, vec![l; 1]);
        assert_eq!(err.unwrap_err(), Error::MissingLink { link: "S3->D1".into() });
    }

    #[test]
    fn side_link_dominates_m_sensitivity() {
        // toggling m from 2 to 4 link-by-link at 20 dB: the S2->D1 toggle
        // moves the outage most, the S->R1 toggles barely move it
        let rt = RateTarget::new(1.0).unwrap();
        let gbar = db_to_linear(20.0);
        let base = iid_links(2.0, gbar);
        let p0 = outage_two_pair(&base, rt, UnionMode::PaperSum).unwrap();
        let toggled = |f: fn(&mut TwoPairLinks, LinkFading)| {
            let mut links = base;
            f(&mut links, LinkFading::new(4.0, gbar).unwrap());
            outage_two_pair(&links, rt, UnionMode::PaperSum).unwrap()
        };
        let d_s1r1 = (toggled(|l, v| l.s1r1 = v) - p0).abs();
        let d_s2r1 = (toggled(|l, v| l.s2r1 = v) - p0).abs();
        let d_r1r2 = (toggled(|l, v| l.r1r2 = v) - p0).abs();
        let d_r2d1 = (toggled(|l, v| l.r2d1 = v) - p0).abs();
        let d_s2d1 = (toggled(|l, v| l.s2d1 = v) - p0).abs();
        assert!(d_s2d1 > d_r1r2 && d_s2d1 > d_r2d1);
        assert!(d_r1r2 > d_s1r1 && d_r2d1 > d_s2r1);
    }

    #[test]
    fn asymptotic_values() {
        let a = asymptotic_outage(2, 2, 0.0);
        assert_eq!((a.exact, a.leading), (0.0, 0.0));
        let a = asymptotic_outage(2, 2, 0.1);
        assert!(rel_err(a.exact, 0.021) < 1e-14);
        assert!(rel_err(a.leading, 0.02) < 1e-14);
        // exact/leading - 1 = p^{N-1}/M, so the ratio tends to 1 as p -> 0
        let a = asymptotic_outage(2, 2, 1e-4);
        assert!((a.exact / a.leading - 1.0 - 1e-4 / 2.0).abs() < 1e-12);
        let a = asymptotic_outage(2, 2, 1e-10);
        assert!((a.exact / a.leading - 1.0).abs() < 1e-7);
    }

    #[test]
    fn monotone_in_snr_and_rate() {
        // paper_sum outage: non-increasing in each link's mean SNR,
        // non-decreasing in R_t
        let rt = RateTarget::new(1.0).unwrap();
        let mut prev = f64::INFINITY;
        for db in [0, 5, 10, 15, 20, 25, 30, 35, 40] {
            let p = outage_iid(2.0, db_to_linear(db as f64), rt).unwrap();
            assert!(p <= prev);
            prev = p;
        }
        let mut prev = 0.0;
        for rt in [0.25, 0.5, 1.0, 2.0, 3.0] {
            let p = outage_iid(2.0, 10.0, RateTarget::new(rt).unwrap()).unwrap();
            assert!(p >= prev);
            prev = p;
        }
        // per-link monotonicity in mean_snr
        let gth = 1.0;
        let mut prev = 1.0;
        for gbar in [0.1, 1.0, 10.0, 100.0] {
            let p = link_outage(LinkFading::new(3.0, gbar).unwrap(), gth).unwrap();
            assert!(p < prev, "strictly decreasing in mean_snr for gth > 0");
            prev = p;
        }
    }

    #[test]
    fn rayleigh_collapse() {
        // at m = 1 every incomplete-Gamma term is an exponential; compare
        // the full evaluation with an all-exponential closed form
        for &rt_v in &[0.5, 1.0, 2.0] {
            let rt = RateTarget::new(rt_v).unwrap();
            let gth = snr_threshold(rt);
            for db in 0..=40 {
                let gbar = db_to_linear(db as f64);
                let p = -(-gth / gbar).exp_m1();
                let want = p * p * (2.0 + p);
                let got = outage_iid(1.0, gbar, rt).unwrap();
                assert!(rel_err(got, want) < 1e-12, "rt={rt_v} db={db}");
            }
        }
    }
}
