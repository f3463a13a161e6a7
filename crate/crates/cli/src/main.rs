//! `ncc-outage`: outage probabilities for network-coded cooperative relaying
//! over Nakagami-m fading, with Monte-Carlo validation.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use ncc_outage::analytic::{
    outage_extended_iid, outage_generalized, ExtendedTopology, RateTarget, UnionMode,
};
use ncc_outage::diversity::{estimate_diversity, predicted_diversity};
use ncc_outage::fading::LinkFading;
use ncc_outage::{db_to_linear, selftest};
use ncc_outage_cli::config::{
    parse_granularity, ConfigFile, Estimator, MSpec, NetworkScenario, SnrGridDb, SweepSpec,
};
use ncc_outage_cli::sweep::{run_sweep, write_csv};
use ncc_outage_cli::WORKERS_ENV;

#[derive(Parser)]
#[command(name = "ncc-outage", version, about = "Outage probability toolkit for network-coded cooperative relaying over Nakagami-m fading")]
struct Cli {
    /// Worker threads (default: NCC_OUTAGE_WORKERS, then all cores).
    /// Never affects results, only wall time.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form outage probabilities over an SNR grid
    Analytic(AnalyticArgs),
    /// Monte-Carlo outage estimators over an SNR grid
    Mc(McArgs),
    /// Symbol-level bit-error-rate chain over an SNR grid
    Ber(BerArgs),
    /// Diversity-order slope fit on an analytic outage curve
    Diversity(DiversityArgs),
    /// Run a sweep described by a config file, flags override keys
    Sweep(GridArgs),
    /// Cross-module consistency suites
    Selftest(SelftestArgs),
}

#[derive(Args, Clone)]
struct GridArgs {
    /// TOML config file supplying defaults
    #[arg(long)]
    config: Option<PathBuf>,

    /// SNR grid in dB, start:step:stop (e.g. 0:2:30)
    #[arg(long = "snr-db")]
    snr_db: Option<String>,

    /// Target rates R_t in bits/s/Hz, comma separated
    #[arg(long)]
    rt: Option<String>,

    /// Shape factors, comma separated; each entry is a scalar or a per-link
    /// list s1r1;s2r1;r1r2;r2d1;s2d1 (quote it)
    #[arg(long)]
    m: Option<String>,

    /// Root seed; per-cell seeds are derived from it
    #[arg(long)]
    seed: Option<u64>,

    /// Monte-Carlo trials per cell
    #[arg(long)]
    trials: Option<u64>,

    /// Estimators to run, comma separated (analytic_paper, analytic_union,
    /// mc_event, mc_snr_shared, mc_snr_indep, mc_ber)
    #[arg(long)]
    estimators: Option<String>,

    /// Source-destination pair count N
    #[arg(long = "n-pairs")]
    n_pairs: Option<usize>,

    /// Relay count M
    #[arg(long)]
    relays: Option<usize>,

    /// Fading blocks for mc_ber
    #[arg(long = "ber-blocks")]
    ber_blocks: Option<u64>,

    /// Symbols per fading block for mc_ber
    #[arg(long = "ber-symbols")]
    ber_symbols: Option<u64>,

    /// Fading granularity for mc_ber: per-symbol (default) or per-block
    #[arg(long = "ber-granularity")]
    ber_granularity: Option<String>,

    /// Output CSV path (stdout when omitted)
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyticArgs {
    #[command(flatten)]
    grid: GridArgs,

    /// Union handling: paper (literal sum form), union (exact), or both
    #[arg(long, default_value = "paper")]
    mode: String,
}

#[derive(Args)]
struct McArgs {
    #[command(flatten)]
    grid: GridArgs,

    /// Estimators: event, snr-shared, snr-indep (comma separated)
    #[arg(long, default_value = "event")]
    estimator: String,
}

#[derive(Args)]
struct BerArgs {
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct DiversityArgs {
    /// Shape factor m
    #[arg(long, default_value_t = 1.0)]
    m: f64,

    /// Target rate R_t
    #[arg(long, default_value_t = 1.0)]
    rt: f64,

    /// Source-destination pair count N
    #[arg(long = "n-pairs", default_value_t = 2)]
    n_pairs: usize,

    /// Relay count M
    #[arg(long, default_value_t = 2)]
    relays: usize,

    /// Fitting window in dB as lo:hi
    #[arg(long, default_value = "30:45")]
    window: String,

    /// Curve sampling step in dB
    #[arg(long, default_value_t = 1.0)]
    step: f64,

    /// Curve to fit: paper (sum form) or union (exact)
    #[arg(long, default_value = "paper")]
    mode: String,
}

#[derive(Args)]
struct SelftestArgs {
    /// Shrink Monte-Carlo trial counts tenfold (agreement bands widen
    /// accordingly)
    #[arg(long)]
    reduced: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    if let Err(e) = init_workers(cli.workers) {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }

    let outcome = match cli.cmd {
        Cmd::Analytic(args) => run_grid_command(args.grid, CommandKind::Analytic { mode: args.mode }),
        Cmd::Mc(args) => run_grid_command(args.grid, CommandKind::Mc { estimator: args.estimator }),
        Cmd::Ber(args) => run_grid_command(args.grid, CommandKind::Ber),
        Cmd::Sweep(args) => run_grid_command(args, CommandKind::Sweep),
        Cmd::Diversity(args) => run_diversity(args),
        Cmd::Selftest(args) => return run_selftest(args.reduced),
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn init_workers(flag: Option<usize>) -> Result<()> {
    let from_env = match std::env::var(WORKERS_ENV) {
        Ok(v) => Some(
            v.parse::<usize>()
                .with_context(|| format!("{WORKERS_ENV}: bad worker count {v:?}"))?,
        ),
        Err(_) => None,
    };
    if let Some(n) = flag.or(from_env) {
        if n == 0 {
            return Err(anyhow!("workers: must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("workers: cannot initialize thread pool")?;
    }
    Ok(())
}

enum CommandKind {
    Analytic { mode: String },
    Mc { estimator: String },
    Ber,
    Sweep,
}

fn parse_list<T, F: Fn(&str) -> Result<T>>(s: &str, what: &str, f: F) -> Result<Vec<T>> {
    s.split(',')
        .map(|part| f(part.trim()).with_context(|| format!("{what}: bad entry {part:?}")))
        .collect()
}

/// Layered spec assembly: built-in defaults, then the config file, then
/// command-line flags.
fn build_spec(grid: &GridArgs, kind: &CommandKind) -> Result<(SweepSpec, NetworkScenario)> {
    let file = match &grid.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };

    let snr_grid_db = match &grid.snr_db {
        Some(s) => SnrGridDb::parse(s)?,
        None => match &file.snr_db {
            Some(g) => SnrGridDb::new(g.start, g.stop, g.step)?,
            None => SnrGridDb::new(0.0, 30.0, 2.0)?,
        },
    };

    let rt_values = match &grid.rt {
        Some(s) => parse_list(s, "rt", |v| Ok(v.parse::<f64>()?))?,
        None => file.rt.clone().unwrap_or_else(|| vec![1.0]),
    };

    let m_values = match &grid.m {
        Some(s) => parse_list(s, "m", MSpec::parse)?,
        None => match &file.m {
            Some(entries) => ConfigFile::parse_m_entries(entries)?,
            None => vec![MSpec::Scalar(1.0)],
        },
    };

    let estimators = match kind {
        CommandKind::Analytic { mode } => match mode.as_str() {
            "paper" => vec![Estimator::AnalyticPaper],
            "union" => vec![Estimator::AnalyticUnion],
            "both" => vec![Estimator::AnalyticPaper, Estimator::AnalyticUnion],
            other => return Err(anyhow!("mode: expected paper, union or both, got {other:?}")),
        },
        CommandKind::Mc { estimator } => parse_list(estimator, "estimator", |v| match v {
            "event" => Ok(Estimator::McEvent),
            "snr-shared" => Ok(Estimator::McSnrShared),
            "snr-indep" => Ok(Estimator::McSnrIndep),
            other => Err(anyhow!("expected event, snr-shared or snr-indep, got {other:?}")),
        })?,
        CommandKind::Ber => vec![Estimator::McBer],
        CommandKind::Sweep => match &grid.estimators {
            Some(s) => parse_list(s, "estimators", Estimator::parse)?,
            None => match &file.estimators {
                Some(names) => names
                    .iter()
                    .map(|n| Estimator::parse(n))
                    .collect::<Result<Vec<_>>>()?,
                None => return Err(anyhow!("estimators: select at least one (flag or config)")),
            },
        },
    };
    if matches!(kind, CommandKind::Sweep) && grid.estimators.is_none() && file.estimators.is_none() {
        return Err(anyhow!("estimators: select at least one"));
    }

    let ber_file = file.ber.as_ref();
    let granularity_name = grid
        .ber_granularity
        .clone()
        .or_else(|| ber_file.and_then(|b| b.granularity.clone()));
    let spec = SweepSpec {
        snr_grid_db,
        rt_values,
        m_values,
        estimators,
        trials: grid.trials.or(file.trials).unwrap_or(1_000_000),
        seed: grid.seed.or(file.seed).unwrap_or(42),
        ber_blocks: grid.ber_blocks.or(ber_file.and_then(|b| b.blocks)).unwrap_or(1_000),
        ber_symbols: grid.ber_symbols.or(ber_file.and_then(|b| b.symbols)).unwrap_or(10_000),
        ber_granularity: match granularity_name {
            Some(name) => parse_granularity(&name)?,
            None => ncc_outage::montecarlo::FadingGranularity::PerSymbol,
        },
    };

    let scenario_file = file.scenario.as_ref();
    let scenario = NetworkScenario {
        n_pairs: grid.n_pairs.or(scenario_file.and_then(|s| s.n_pairs)).unwrap_or(2),
        m_relays: grid.relays.or(scenario_file.and_then(|s| s.m_relays)).unwrap_or(2),
    };

    Ok((spec, scenario))
}

fn run_grid_command(grid: GridArgs, kind: CommandKind) -> Result<()> {
    let (spec, scenario) = build_spec(&grid, &kind)?;
    let rows = run_sweep(&spec, &scenario)?;

    let gt1 = rows.iter().filter(|r| r.p_out > 1.0).count();
    if gt1 > 0 {
        eprintln!(
            "warning: {gt1} cell(s) exceed 1 under the sum-form closed form; \
             see the warn_gt1 column (the exact-union mode stays in [0,1])"
        );
    }

    match &grid.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .with_context(|| format!("out: cannot create {}", path.display()))?;
            write_csv(&rows, &mut f)?;
            f.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_csv(&rows, &mut lock)?;
        }
    }
    Ok(())
}

fn run_diversity(args: DiversityArgs) -> Result<()> {
    let (lo, hi) = {
        let parts: Vec<&str> = args.window.split(':').collect();
        if parts.len() != 2 {
            return Err(anyhow!("window: expected lo:hi in dB, got {:?}", args.window));
        }
        (parts[0].trim().parse::<f64>()?, parts[1].trim().parse::<f64>()?)
    };
    if args.step <= 0.0 {
        return Err(anyhow!("step: must be > 0 dB"));
    }
    let mode = match args.mode.as_str() {
        "paper" => UnionMode::PaperSum,
        "union" => UnionMode::ExactUnion,
        other => return Err(anyhow!("mode: expected paper or union, got {other:?}")),
    };
    let rt = RateTarget::new(args.rt)?;

    // sample the analytic curve a little beyond the window so the edge
    // points are always included
    let mut curve = Vec::new();
    let mut db = lo;
    while db <= hi + 1e-9 {
        let gbar = db_to_linear(db);
        let p = match mode {
            UnionMode::PaperSum => {
                outage_extended_iid(args.n_pairs, args.relays, args.m, gbar, rt)?
            }
            UnionMode::ExactUnion => {
                let link = LinkFading::new(args.m, gbar)?;
                let topo = ExtendedTopology::iid(args.n_pairs, args.relays, link)?;
                outage_generalized(&topo, rt, mode)?
            }
        };
        curve.push((gbar, p));
        db += args.step;
    }

    let fit = estimate_diversity(&curve, (lo, hi))?;
    let predicted = predicted_diversity(args.n_pairs, args.m)?;
    println!(
        "d_hat={:.6} predicted={} residual={:.3e} window=[{},{}]dB points={}",
        fit.d_hat,
        predicted.d,
        fit.residual,
        lo,
        hi,
        curve.len()
    );
    if !predicted.integer_shape {
        println!("note: d = N*m was validated for integer m only; m={} is outside that regime", args.m);
    }
    Ok(())
}

fn run_selftest(reduced: bool) -> ExitCode {
    let reports = selftest::run_all(reduced);
    let mut failed = 0;
    for r in &reports {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {}: {}", r.name, r.detail);
        failed += u32::from(!r.passed);
    }
    if failed > 0 {
        println!("{failed} suite(s) failed");
        ExitCode::from(2)
    } else {
        println!("all {} suites passed", reports.len());
        ExitCode::SUCCESS
    }
}
