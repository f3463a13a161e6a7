//! Sweep configuration: the grid description, estimator selection, and the
//! TOML config file format.
//!
//! Configuration is layered: a TOML file supplies defaults, command-line
//! flags override individual keys. Validation reports the offending key so
//! misconfigurations are quick to pin down.

use anyhow::{anyhow, bail, Context, Result};
use ncc_outage::analytic::TwoPairLinks;
use ncc_outage::fading::LinkFading;
use serde::Deserialize;

/// The estimators a sweep can run, in canonical (sort) order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Estimator {
    AnalyticPaper,
    AnalyticUnion,
    McEvent,
    McSnrShared,
    McSnrIndep,
    McBer,
}

impl Estimator {
    pub const ALL: [Estimator; 6] = [
        Estimator::AnalyticPaper,
        Estimator::AnalyticUnion,
        Estimator::McEvent,
        Estimator::McSnrShared,
        Estimator::McSnrIndep,
        Estimator::McBer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::AnalyticPaper => "analytic_paper",
            Estimator::AnalyticUnion => "analytic_union",
            Estimator::McEvent => "mc_event",
            Estimator::McSnrShared => "mc_snr_shared",
            Estimator::McSnrIndep => "mc_snr_indep",
            Estimator::McBer => "mc_ber",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| anyhow!("estimators: unknown estimator {s:?}"))
    }

    pub fn is_mc(self) -> bool {
        !matches!(self, Estimator::AnalyticPaper | Estimator::AnalyticUnion)
    }
}

/// Shape factor specification: one global value, or one value per link of
/// the two-pair network in `s1r1;s2r1;r1r2;r2d1;s2d1` order.
#[derive(Clone, Debug, PartialEq)]
pub enum MSpec {
    Scalar(f64),
    PerLink([f64; 5]),
}

impl MSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let parse_one = |v: &str| -> Result<f64> {
            let m: f64 = v.trim().parse().with_context(|| format!("m: bad shape factor {v:?}"))?;
            if !m.is_finite() || m < 0.5 {
                bail!("m: shape factor must be >= 0.5, got {m}");
            }
            Ok(m)
        };
        if s.contains(';') {
            let parts: Vec<&str> = s.split(';').collect();
            if parts.len() != 5 {
                bail!("m: per-link spec needs 5 values (s1r1;s2r1;r1r2;r2d1;s2d1), got {}", parts.len());
            }
            let mut vals = [0.0; 5];
            for (slot, part) in vals.iter_mut().zip(&parts) {
                *slot = parse_one(part)?;
            }
            Ok(MSpec::PerLink(vals))
        } else {
            Ok(MSpec::Scalar(parse_one(s)?))
        }
    }

    /// The CSV `m_spec` label.
    pub fn label(&self) -> String {
        match self {
            MSpec::Scalar(m) => format!("{m}"),
            MSpec::PerLink(v) => v.map(|m| format!("{m}")).join(";"),
        }
    }

    pub fn scalar(&self) -> Option<f64> {
        match self {
            MSpec::Scalar(m) => Some(*m),
            MSpec::PerLink(_) => None,
        }
    }

    /// The five two-pair links at a common mean SNR.
    pub fn links(&self, mean_snr: f64) -> Result<TwoPairLinks> {
        let link = |m: f64| LinkFading::new(m, mean_snr).map_err(|e| anyhow!("m: {e}"));
        Ok(match self {
            MSpec::Scalar(m) => TwoPairLinks::iid(link(*m)?),
            MSpec::PerLink(v) => TwoPairLinks {
                s1r1: link(v[0])?,
                s2r1: link(v[1])?,
                r1r2: link(v[2])?,
                r2d1: link(v[3])?,
                s2d1: link(v[4])?,
            },
        })
    }

    fn sort_key(&self) -> ([f64; 5], bool) {
        match self {
            MSpec::Scalar(m) => ([*m; 5], false),
            MSpec::PerLink(v) => (*v, true),
        }
    }

    pub fn cmp_key(&self, other: &Self) -> std::cmp::Ordering {
        let (ka, ta) = self.sort_key();
        let (kb, tb) = other.sort_key();
        for (a, b) in ka.iter().zip(&kb) {
            let ord = a.total_cmp(b);
            if ord != std::cmp::Ordering::Equal {
                return ord;
            }
        }
        ta.cmp(&tb)
    }
}

/// Inclusive dB grid `start, start+step, ..., <= stop`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnrGridDb {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SnrGridDb {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            bail!("snr_db: grid bounds must be finite");
        }
        if step <= 0.0 {
            bail!("snr_db.step: must be > 0, got {step}");
        }
        if start > stop {
            bail!("snr_db: start {start} must be <= stop {stop}");
        }
        Ok(Self { start, stop, step })
    }

    /// Parses `start:step:stop`, e.g. `0:2:30`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            bail!("snr_db: expected start:step:stop, got {s:?}");
        }
        let num = |v: &str| -> Result<f64> {
            v.trim().parse().with_context(|| format!("snr_db: bad number {v:?}"))
        };
        Self::new(num(parts[0])?, num(parts[2])?, num(parts[1])?)
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// Topology the sweep runs over. Monte-Carlo link-level estimators
/// (`mc_snr_*`, `mc_ber`) are defined for the concrete 2-pair / 2-relay
/// network; the analytic and event estimators accept any N >= 2, M >= 2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetworkScenario {
    pub n_pairs: usize,
    pub m_relays: usize,
}

impl Default for NetworkScenario {
    fn default() -> Self {
        Self { n_pairs: 2, m_relays: 2 }
    }
}

/// Everything needed to produce one results table.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub snr_grid_db: SnrGridDb,
    pub rt_values: Vec<f64>,
    pub m_values: Vec<MSpec>,
    pub estimators: Vec<Estimator>,
    pub trials: u64,
    pub seed: u64,
    pub ber_blocks: u64,
    pub ber_symbols: u64,
    pub ber_granularity: ncc_outage::montecarlo::FadingGranularity,
}

/// Parses `per-symbol` / `per-block`.
pub fn parse_granularity(s: &str) -> Result<ncc_outage::montecarlo::FadingGranularity> {
    use ncc_outage::montecarlo::FadingGranularity;
    match s {
        "per-symbol" => Ok(FadingGranularity::PerSymbol),
        "per-block" => Ok(FadingGranularity::PerBlock),
        other => bail!("ber.granularity: expected per-symbol or per-block, got {other:?}"),
    }
}

impl SweepSpec {
    pub fn validate(&self, scenario: &NetworkScenario) -> Result<()> {
        if self.estimators.is_empty() {
            bail!("estimators: select at least one estimator");
        }
        if self.rt_values.is_empty() {
            bail!("rt: need at least one target rate");
        }
        if self.m_values.is_empty() {
            bail!("m: need at least one shape factor");
        }
        for rt in &self.rt_values {
            if !rt.is_finite() || *rt <= 0.0 {
                bail!("rt: target rate must be > 0, got {rt}");
            }
        }
        if self.estimators.iter().any(|e| e.is_mc()) && self.trials == 0 {
            bail!("trials: must be >= 1 when a Monte-Carlo estimator is selected");
        }
        if scenario.n_pairs < 2 {
            bail!("scenario.n_pairs: need N >= 2, got {}", scenario.n_pairs);
        }
        if scenario.m_relays < 2 {
            bail!("scenario.m_relays: need M >= 2, got {}", scenario.m_relays);
        }
        let two_by_two = *scenario == NetworkScenario::default();
        if !two_by_two {
            for e in &self.estimators {
                if matches!(e, Estimator::McSnrShared | Estimator::McSnrIndep | Estimator::McBer) {
                    bail!(
                        "estimators: {} is defined for the 2-pair/2-relay network only \
                         (scenario is {}x{})",
                        e.name(),
                        scenario.n_pairs,
                        scenario.m_relays
                    );
                }
            }
            if self.m_values.iter().any(|m| m.scalar().is_none()) {
                bail!("m: per-link shape factors apply to the 2-pair/2-relay network only");
            }
        }
        if self.estimators.contains(&Estimator::McBer) && (self.ber_blocks == 0 || self.ber_symbols == 0) {
            bail!("ber: blocks and symbols must be >= 1");
        }
        if self.estimators.contains(&Estimator::McSnrShared)
            && self.m_values.iter().any(|m| matches!(m, MSpec::PerLink(v) if v.iter().any(|x| *x != v[0])))
        {
            bail!("estimators: mc_snr_shared requires identical fading on all links");
        }
        Ok(())
    }
}

// ---- TOML config file ----

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub estimators: Option<Vec<String>>,
    pub rt: Option<Vec<f64>>,
    pub m: Option<Vec<MEntry>>,
    pub snr_db: Option<SnrGridToml>,
    pub scenario: Option<ScenarioToml>,
    pub ber: Option<BerToml>,
}

/// A shape factor entry: a plain number or a per-link string like
/// `"2;2;2;2;4"`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum MEntry {
    Num(f64),
    Str(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnrGridToml {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioToml {
    pub n_pairs: Option<usize>,
    pub m_relays: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BerToml {
    pub blocks: Option<u64>,
    pub symbols: Option<u64>,
    /// `per-symbol` (default) or `per-block`.
    pub granularity: Option<String>,
}

impl ConfigFile {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("config: cannot read {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("config: cannot parse {}", path.display()))
    }

    pub fn parse_m_entries(entries: &[MEntry]) -> Result<Vec<MSpec>> {
        entries
            .iter()
            .map(|e| match e {
                MEntry::Num(v) => MSpec::parse(&format!("{v}")),
                MEntry::Str(s) => MSpec::parse(s),
            })
            .collect()
    }
}
