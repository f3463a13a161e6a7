//! Integration tests against the compiled binary: exit codes, config-file
//! layering, worker-count independence and the CSV contract.

use std::io::Write;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ncc-outage"))
}

#[test]
fn selftest_reduced_exits_zero() {
    let out = bin().args(["selftest", "--reduced"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("PASS").count(), 4, "{text}");
    assert!(text.contains("all 4 suites passed"));
}

#[test]
fn configuration_errors_exit_one() {
    for args in [
        vec!["analytic", "--m", "0.2"],
        vec!["analytic", "--snr-db", "30:2:0"],
        vec!["mc", "--estimator", "bogus"],
        vec!["sweep"], // no estimators anywhere
        vec!["bogus-subcommand"],
        vec!["ber", "--n-pairs", "3"], // mc_ber is 2x2 only
        vec!["ber", "--ber-granularity", "sometimes"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(1), "args {args:?}: {:?}", out.status);
        assert!(!out.stderr.is_empty(), "args {args:?} should explain the error");
    }
}

#[test]
fn help_exits_zero() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn csv_contract_and_gt1_warning() {
    let out = bin()
        .args(["analytic", "--m", "0.5,2", "--rt", "1", "--snr-db", "0:10:20"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "snr_db,rt,m_spec,estimator,p_out,std_err,trials,seed,warn_gt1"
    );
    assert_eq!(lines.count(), 6);
    // sum form exceeds 1 at 0 dB for m = 0.5; the CLI warns on stderr
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("warning"), "{err}");

    // a high-SNR run has no marker column and no warning
    let out = bin()
        .args(["analytic", "--m", "2", "--rt", "1", "--snr-db", "20:5:30"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("snr_db,rt,m_spec,estimator,p_out,std_err,trials,seed\n"));
    assert!(out.stderr.is_empty());
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = std::env::temp_dir().join(format!("ncc-outage-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("sweep.toml");
    let mut f = std::fs::File::create(&config).unwrap();
    writeln!(
        f,
        r#"
seed = 7
trials = 5000
estimators = ["analytic_paper", "mc_event"]
rt = [1.0]
m = [1.0]

[snr_db]
start = 10.0
stop = 20.0
step = 5.0
"#
    )
    .unwrap();
    drop(f);

    let csv_a = dir.join("a.csv");
    let out = bin()
        .args(["sweep", "--config"])
        .arg(&config)
        .args(["-o"])
        .arg(&csv_a)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let a = std::fs::read_to_string(&csv_a).unwrap();
    assert_eq!(a.lines().count(), 1 + 3 * 2, "3 SNR points x 2 estimators");

    // --m flag overrides the config file's m list
    let csv_b = dir.join("b.csv");
    let out = bin()
        .args(["sweep", "--config"])
        .arg(&config)
        .args(["--m", "2", "-o"])
        .arg(&csv_b)
        .output()
        .unwrap();
    assert!(out.status.success());
    let b = std::fs::read_to_string(&csv_b).unwrap();
    assert!(b.contains(",2,mc_event,"), "m flag must win: {b}");
    assert!(!b.contains(",1,mc_event,"));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn worker_env_var_does_not_change_output() {
    let args = ["mc", "--estimator", "event,snr-indep", "--trials", "50000", "--m", "1,2",
        "--snr-db", "10:5:15", "--seed", "99"];
    let one = bin().args(args).env("NCC_OUTAGE_WORKERS", "1").output().unwrap();
    let two = bin().args(args).env("NCC_OUTAGE_WORKERS", "2").output().unwrap();
    let flag = bin().args(args).args(["--workers", "2"]).output().unwrap();
    assert!(one.status.success() && two.status.success() && flag.status.success());
    assert_eq!(one.stdout, two.stdout, "worker count must not change the CSV");
    assert_eq!(one.stdout, flag.stdout);
    // bad env var is a configuration error
    let bad = bin().args(args).env("NCC_OUTAGE_WORKERS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn diversity_subcommand_reports_fit() {
    let out = bin()
        .args(["diversity", "--m", "3", "--n-pairs", "2", "--relays", "4", "--window", "30:45"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("predicted=6"), "{text}");
    let d_hat: f64 = text
        .split("d_hat=")
        .nth(1)
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((d_hat - 6.0).abs() / 6.0 < 0.1, "{d_hat}");

    // non-integer m carries the regime note
    let out = bin().args(["diversity", "--m", "2.5"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("integer m"), "{text}");
}

#[test]
fn ber_granularity_flag() {
    let args = |g: &str| {
        vec![
            "ber".to_string(),
            "--m".into(), "1".into(),
            "--snr-db".into(), "10:1:10".into(),
            "--ber-blocks".into(), "10".into(),
            "--ber-symbols".into(), "500".into(),
            "--seed".into(), "4".into(),
            "--ber-granularity".into(), g.into(),
        ]
    };
    let sym = bin().args(args("per-symbol")).output().unwrap();
    let blk = bin().args(args("per-block")).output().unwrap();
    assert!(sym.status.success() && blk.status.success());
    assert_ne!(sym.stdout, blk.stdout, "granularity must change the estimate");
    // default is per-symbol
    let mut default_args = args("per-symbol");
    default_args.truncate(default_args.len() - 2);
    let def = bin().args(&default_args).output().unwrap();
    assert_eq!(def.stdout, sym.stdout);
}

#[test]
fn per_link_m_spec_row_label() {
    let out = bin()
        .args(["analytic", "--m", "2;2;2;2;4", "--rt", "1", "--snr-db", "20:1:20"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("20,1,2;2;2;2;4,analytic_paper,"), "{text}");
}
