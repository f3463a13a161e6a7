//! Cross-module consistency suites.
//!
//! These are runtime checks (exposed through the CLI `selftest` subcommand)
//! rather than unit tests: special-function identities, sampler moment and
//! KS checks, analytic reduction chains, and Monte-Carlo-vs-analytic
//! agreement at configurable trial counts. Each suite returns a verdict plus
//! a human-readable detail line.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::analytic::{
    outage_extended_iid, outage_generalized, outage_iid, outage_two_pair, ExtendedTopology,
    RateTarget, TwoPairLinks, UnionMode,
};
use crate::fading::{sample_amplitude, snr_cdf, LinkFading, NakagamiParams};
use crate::montecarlo::mc_event_outage_two_pair;
use crate::special::reg_upper_gamma;
use crate::{db_to_linear, Result};

/// Outcome of one suite.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl SuiteReport {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }
}

/// Runs every suite. `reduced` shrinks the Monte-Carlo trial counts tenfold;
/// the agreement bands widen with the binomial standard error, so both modes
/// are expected to pass.
pub fn run_all(reduced: bool) -> Vec<SuiteReport> {
    let (trials, draws) = if reduced { (10_000, 100_000) } else { (100_000, 1_000_000) };
    vec![
        special_identities(),
        sampler_moments(2024, draws),
        analytic_reductions(),
        mc_agreement(trials, 2024),
    ]
}

/// Identity checks for the incomplete-Gamma kernel.
pub fn special_identities() -> SuiteReport {
    special_identities_with(reg_upper_gamma)
}

/// Identity checks against an arbitrary `Q(a, x)` implementation.
///
/// Taking the kernel as a parameter lets tests inject a perturbed version
/// and confirm the suite actually detects faults.
pub fn special_identities_with<Q>(q: Q) -> SuiteReport
where
    Q: Fn(f64, f64) -> Result<f64>,
{
    let mut worst: f64 = 0.0;
    let mut detail = String::new();
    let mut check = |name: &str, got: f64, want: f64, tol: f64| {
        let rel = if want == 0.0 { got.abs() } else { ((got - want) / want).abs() };
        if rel > worst {
            worst = rel;
        }
        if rel > tol {
            detail = format!("{name}: got {got}, want {want} (rel {rel:.3e} > {tol:.0e})");
        }
    };

    let mut x = 0.01;
    while x <= 100.0 {
        match (q(1.0, x), q(2.0, x)) {
            (Ok(q1), Ok(q2)) => {
                check("Q(1,x)=e^-x", q1, (-x).exp(), 1e-12);
                check("Q(2,x)=(1+x)e^-x", q2, (1.0 + x) * (-x).exp(), 1e-12);
            }
            _ => return SuiteReport::new("special-identities", false, format!("Q failed at x={x}")),
        }
        x *= 1.6;
    }
    // recurrence Q(a+1,x) = Q(a,x) + x^a e^-x / Γ(a+1)
    for a in [0.5, 1.5, 3.0, 7.0] {
        let mut x = 0.05;
        while x <= 60.0 {
            match (q(a + 1.0, x), q(a, x), crate::special::log_gamma(a + 1.0)) {
                (Ok(lhs), Ok(qa), Ok(lg)) => {
                    let rhs = qa + (a * x.ln() - x - lg).exp();
                    check("recurrence", lhs, rhs, 1e-10);
                }
                _ => return SuiteReport::new("special-identities", false, format!("Q failed at a={a} x={x}")),
            }
            x *= 2.3;
        }
    }
    // boundary value
    match q(1.7, 0.0) {
        Ok(v) => check("Q(a,0)=1", v, 1.0, 1e-15),
        Err(e) => return SuiteReport::new("special-identities", false, e.to_string()),
    }

    let passed = detail.is_empty();
    if passed {
        detail = format!("worst relative deviation {worst:.3e}");
    }
    SuiteReport::new("special-identities", passed, detail)
}

/// Moment and KS checks for the Nakagami amplitude sampler.
pub fn sampler_moments(seed: u64, draws: usize) -> SuiteReport {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut detail = String::new();
    for &m in &[0.5, 1.0, 2.0, 4.0] {
        let mu = 1.0;
        let params = NakagamiParams::new(m, mu).unwrap();
        let mut sq: Vec<f64> = (0..draws).map(|_| sample_amplitude(params, &mut rng).powi(2)).collect();
        let mean = sq.iter().sum::<f64>() / draws as f64;
        // Var(X²) = μ²/m for a Gamma(m, μ/m) square
        let se = (mu * mu / m / draws as f64).sqrt();
        if (mean - mu).abs() > 3.0 * se {
            detail = format!("m={m}: E[X²]={mean} deviates from {mu} by more than 3se={:.2e}", 3.0 * se);
            break;
        }
        // KS of X² against the SNR CDF with γ̄ = μ (identity scaling)
        sq.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let link = LinkFading::new(m, mu).unwrap();
        let d = ks_statistic(&sq, |x| snr_cdf(link, x).unwrap());
        let crit = ks_critical(draws, 0.01);
        if d > crit {
            detail = format!("m={m}: KS statistic {d:.3e} exceeds 1% critical value {crit:.3e}");
            break;
        }
    }
    let passed = detail.is_empty();
    if passed {
        detail = format!("moments within 3se and KS below the 1% critical value, {draws} draws");
    }
    SuiteReport::new("sampler-moments", passed, detail)
}

/// Reduction-chain checks across the analytic forms.
pub fn analytic_reductions() -> SuiteReport {
    let mut worst: f64 = 0.0;
    let mut detail = String::new();
    let cases = [(0.5, 3.0, 0.5), (1.0, 10.0, 1.0), (2.0, 31.6, 1.5), (4.0, 100.0, 2.0)];
    for &(m, gbar, rt_v) in &cases {
        let rt = RateTarget::new(rt_v).unwrap();
        let link = LinkFading::new(m, gbar).unwrap();
        let iid = outage_iid(m, gbar, rt).unwrap();
        let two_pair = outage_two_pair(&TwoPairLinks::iid(link), rt, UnionMode::PaperSum).unwrap();
        for (n, m_rel) in [(2usize, 2usize), (3, 2), (2, 4), (3, 4)] {
            let ext = outage_extended_iid(n, m_rel, m, gbar, rt).unwrap();
            let topo = ExtendedTopology::iid(n, m_rel, link).unwrap();
            let gen = outage_generalized(&topo, rt, UnionMode::PaperSum).unwrap();
            let rel = ((gen - ext) / ext).abs();
            worst = worst.max(rel);
            if rel > 1e-14 {
                detail = format!("N={n} M={m_rel} m={m}: generalized {gen} vs extended {ext}");
            }
        }
        let rel = ((two_pair - iid) / iid).abs();
        worst = worst.max(rel);
        if rel > 1e-14 {
            detail = format!("m={m}: two-pair {two_pair} vs iid {iid}");
        }
    }
    let passed = detail.is_empty();
    if passed {
        detail = format!("reduction chain agrees, worst relative deviation {worst:.3e}");
    }
    SuiteReport::new("analytic-reductions", passed, detail)
}

/// Event-level Monte-Carlo against the exact-union closed form.
pub fn mc_agreement(trials: u64, seed: u64) -> SuiteReport {
    let rt = RateTarget::new(1.0).unwrap();
    let mut worst: f64 = 0.0;
    let mut detail = String::new();
    for &m in &[1.0, 2.0] {
        for &db in &[5.0, 15.0] {
            let links = TwoPairLinks::iid(LinkFading::new(m, db_to_linear(db)).unwrap());
            let want = outage_two_pair(&links, rt, UnionMode::ExactUnion).unwrap();
            let est = mc_event_outage_two_pair(&links, rt, trials, seed).unwrap();
            let sigma = (want * (1.0 - want) / trials as f64).sqrt();
            let z = (est.p_hat - want).abs() / sigma;
            worst = worst.max(z);
            if z > 3.0 {
                detail = format!("m={m} snr={db}dB: p_hat={} vs {want} is {z:.2} sigma off", est.p_hat);
            }
        }
    }
    let passed = detail.is_empty();
    if passed {
        detail = format!("event MC within 3 sigma of exact union at {trials} trials (worst {worst:.2})");
    }
    SuiteReport::new("mc-vs-analytic", passed, detail)
}

/// Two-sided Kolmogorov-Smirnov statistic of `sorted` samples against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// Asymptotic two-sided KS critical value `sqrt(ln(2/α) / 2n)`.
pub fn ks_critical(n: usize, significance: f64) -> f64 {
    ((2.0 / significance).ln() / (2.0 * n as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_reduced() {
        for report in run_all(true) {
            assert!(report.passed, "{}: {}", report.name, report.detail);
        }
    }

    #[test]
    fn fault_injection_is_detected() {
        // a kernel off by 1e-6 must fail the identity suite
        let perturbed = |a: f64, x: f64| reg_upper_gamma(a, x).map(|q| q * (1.0 + 1e-6));
        let report = special_identities_with(perturbed);
        assert!(!report.passed, "perturbed kernel slipped through: {}", report.detail);
        // and the honest kernel passes
        assert!(special_identities().passed);
    }

    #[test]
    fn ks_helpers() {
        // uniform samples against the uniform CDF
        let n = 10_000;
        let sorted: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&sorted, |x| x);
        assert!(d < ks_critical(n, 0.01));
        // grossly wrong CDF is rejected
        let d_bad = ks_statistic(&sorted, |x| x * x);
        assert!(d_bad > ks_critical(n, 0.01));
    }
}
