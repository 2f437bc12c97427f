use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn acceptset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acceptset")).args(args).env_remove("ACCEPTSET_SEED").output().unwrap()
}

fn scenarios(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

/// 100 equally likely scenarios, one of them a loss of 1.
fn one_loss_in_hundred() -> NamedTempFile {
    let mut text = String::from("scenario_id,value\n");
    for i in 0..100 {
        text.push_str(&format!("s{i},{}\n", if i == 0 { -1 } else { 1 }));
    }
    scenarios(&text)
}

#[test]
fn assess_reports_each_family() {
    let f = one_loss_in_hundred();
    let o = acceptset(&["assess", "--scenarios", path(&f), "--alpha", "0.99"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(1), "{out}");
    assert!(out.contains("set=AMinus(99/100) accepted=false"), "{out}");
    assert!(out.contains("set=APlus(99/100) accepted=true"), "{out}");
    assert!(out.contains("default_probability=1/100"));
    assert!(out.lines().any(|l| l.starts_with("# accepted by")));

    let o = acceptset(&["assess", "--scenarios", path(&f), "--set", "APlus:0.99"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn measure_var_at_tail_level() {
    let f = one_loss_in_hundred();
    let o = acceptset(&["measure", "--scenarios", path(&f), "--measure", "VaRLower:0.99"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("measure=var_lower level=99/100"), "{out}");
    assert!(out.contains("value=-1 "), "{out}");
}

#[test]
fn bad_inputs_exit_two() {
    let empty = scenarios("");
    let o = acceptset(&["assess", "--scenarios", path(&empty), "--alpha", "1/2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error:"));

    let short = scenarios("scenario_id,probability,value\na,0.5,1\nb,0.4,-1\n");
    let o = acceptset(&["assess", "--scenarios", path(&short), "--alpha", "1/2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("probabilities sum to 9/10"), "{}", stderr(&o));

    let bad = scenarios("scenario_id,value\na,one\n");
    let o = acceptset(&["assess", "--scenarios", path(&bad), "--alpha", "1/2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = acceptset(&["assess", "--scenarios", "/nonexistent/file.csv", "--alpha", "1/2"]);
    assert_eq!(o.status.code(), Some(2));

    let o = acceptset(&["classify", "--set", "Nonsense:1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = acceptset(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    let o = acceptset(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("check-properties"));
}

#[test]
fn balance_sheet_capital() {
    let f = scenarios("scenario_id,probability,value\nup,0.5,0.1\ndown,0.5,-0.2\n");
    let o = acceptset(&[
        "balance-sheet",
        "--scenarios",
        path(&f),
        "--capital",
        "10",
        "--debt",
        "90",
        "--rate",
        "0",
        "--set",
        "APlus:0.6",
    ]);
    let out = stdout(&o);
    assert!(out.contains("capital=-10 "), "{out}");
    assert!(out.contains("capital=20 "), "{out}");
    assert!(out.contains("set=APlus(3/5) accepted=false"), "{out}");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_properties_expectations() {
    let o = acceptset(&[
        "check-properties",
        "--set",
        "ESInduced:0",
        "--n",
        "3",
        "--grid",
        "-1,0,1",
        "--property",
        "surplus",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    let o = acceptset(&[
        "check-properties",
        "--set",
        "ESInduced:0",
        "--n",
        "3",
        "--grid",
        "-1,0,1",
        "--property",
        "surplus",
        "--expect",
        "violated",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("replay=true"));

    let o = acceptset(&["check-properties", "--set", "APlus:0.5", "--n", "3", "--grid", "-1,0,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn classify_and_counterexamples() {
    let o = acceptset(&["classify", "--set", "APlus:0.75", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("# APlus(3/4): APlusForm 3/4"), "{}", stdout(&o));

    let o = acceptset(&["counterexample", "d1", "--alpha", "0.6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

fn run_with_seed(env: Option<&str>, args: &[&str]) -> String {
    let mut c = Command::new(env!("CARGO_BIN_EXE_acceptset"));
    c.args(args).env_remove("ACCEPTSET_SEED");
    if let Some(s) = env {
        c.env("ACCEPTSET_SEED", s);
    }
    stdout(&c.output().unwrap())
}

#[test]
fn seed_environment_overrides_flag() {
    let args = ["check-properties", "--set", "APlus:0.5", "--n", "8", "--grid", "-1,0,1", "--trials", "50"];
    let with_flag: Vec<&str> = args.iter().copied().chain(["--seed", "5"]).collect();
    let from_env = run_with_seed(Some("7"), &with_flag);
    assert!(from_env.contains("seed=7"), "{from_env}");
    assert_eq!(from_env, run_with_seed(Some("7"), &args));
    assert!(run_with_seed(None, &with_flag).contains("seed=5"));
}

#[test]
fn config_file_supplies_defaults() {
    let mut cfg = NamedTempFile::new().unwrap();
    writeln!(
        cfg,
        "seed = 11\nn = 3\ngrid = \"-1,0,1\"\n\n[[set]]\nkind = \"APlus\"\nalpha = 0.5\n\n[[set]]\nkind = \"AMinus\"\nalpha = \"1/2\"\n"
    )
    .unwrap();
    let cfg_path = cfg.path().to_str().unwrap();
    let o = acceptset(&["--config", cfg_path, "classify"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}{}", stderr(&o));
    assert!(out.contains("APlus(1/2)") && out.contains("AMinus(1/2)"), "{out}");

    let f = one_loss_in_hundred();
    let o = acceptset(&["--config", cfg_path, "assess", "--scenarios", path(&f)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let mut bad = NamedTempFile::new().unwrap();
    writeln!(bad, "unknown_key = 1").unwrap();
    let o = acceptset(&["--config", bad.path().to_str().unwrap(), "classify"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn library_entry_point_matches_binary() {
    let f = one_loss_in_hundred();
    let args = ["acceptset", "measure", "--scenarios", path(&f), "--alpha", "0.99", "--beta", "0.9"];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let status = acceptset::cli::run(args, &mut out, &mut err);
    let o = acceptset(&args[1..]);
    assert_eq!(Some(status), o.status.code());
    assert_eq!(out, o.stdout);
}
