use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ifmid::commands::{ADAPT_SUMMARY_HEADER, ADAPT_TRAJECTORY_HEADER, CONVERGE_HEADER};
use ifmid::config::{Mode, PartialConfig, RunConfig};
use serde_json::Value;

fn ifmid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ifmid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = ifmid(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn converge_writes_exact_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    ok(&[
        "converge",
        "--problem",
        "ex2",
        "--m",
        "31",
        "--n-list",
        "16,32,64",
        "--out",
        out.to_str().unwrap(),
    ]);
    let csv = read(&out.join("converge.csv"));
    assert_eq!(csv.lines().next().unwrap(), CONVERGE_HEADER);
    assert_eq!(CONVERGE_HEADER, "N,err_inf,order_err,E,order_E,bound,ei_U");
    let r = rows(&csv);
    assert_eq!(r.len(), 3);
    assert_eq!(r[0][0], "16");
    assert_eq!(r[0][2], "");
    assert_eq!(r[0][4], "");
    let order: f64 = r[1][2].parse().unwrap();
    assert!((order - 2.0).abs() < 0.1);
    // six significant digits, scientific
    for cell in &r[1][1..] {
        let (mantissa, exp) = cell.split_once('e').unwrap();
        assert_eq!(mantissa.trim_start_matches('-').len(), 7, "{cell}");
        assert!(exp.starts_with('+') || exp.starts_with('-'));
    }
}

#[test]
fn single_step_count_gives_one_row_without_orders() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("one");
    ok(&[
        "converge",
        "--m",
        "15",
        "--n-list",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    let r = rows(&read(&out.join("converge.csv")));
    assert_eq!(r.len(), 1);
    assert_eq!((r[0][2].as_str(), r[0][4].as_str()), ("", ""));
}

#[test]
fn json_summary_round_trips_the_effective_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("j");
    let out_s = out.to_str().unwrap();
    ok(&[
        "converge",
        "--problem",
        "ex3",
        "--m",
        "20",
        "--theta",
        "0.2",
        "--n-list",
        "8 16",
        "--out",
        out_s,
    ]);
    let json: Value = serde_json::from_str(&read(&out.join("converge.json"))).unwrap();
    let echoed: RunConfig = serde_json::from_value(json["config"].clone()).unwrap();
    let expected = PartialConfig::parse_str(&format!(
        "problem = ex3\nm = 20\ntheta = 0.2\nn_list = 8,16\nout = {out_s}"
    ))
    .unwrap()
    .resolve(Mode::Converge)
    .unwrap();
    assert_eq!(echoed, expected);
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d");
    let out_s = out.to_str().unwrap();
    let files = [
        "converge.csv",
        "converge.json",
        "adapt_summary.csv",
        "adapt_trajectory.csv",
        "adapt.json",
    ];
    let mut snapshots = Vec::new();
    for _ in 0..2 {
        ok(&[
            "converge",
            "--problem",
            "ex4",
            "--m",
            "15",
            "--n-list",
            "100,200",
            "--out",
            out_s,
        ]);
        ok(&[
            "adapt",
            "--problem",
            "ex2",
            "--m",
            "15",
            "--tol",
            "1e-3",
            "--out",
            out_s,
        ]);
        snapshots.push(files.map(|f| fs::read(out.join(f)).unwrap()));
    }
    assert!(snapshots[0] == snapshots[1]);
}

#[test]
fn empty_step_list_fails() {
    let out = ifmid(&["converge", "--n-list", ""]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no step counts given"));
}

#[test]
fn unwritable_output_fails() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = ifmid(&[
        "converge",
        "--m",
        "5",
        "--n-list",
        "4",
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot create output directory"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("f");
    fs::write(
        &cfg,
        format!(
            "# manifest\nproblem = ex2\nm = 9\nn_list = 4, 8\nout = {}\n",
            out.display()
        ),
    )
    .unwrap();
    ok(&["converge", "--config", cfg.to_str().unwrap(), "--m", "11"]);
    let json: Value = serde_json::from_str(&read(&out.join("converge.json"))).unwrap();
    assert_eq!(json["config"]["m"], 11);
    assert_eq!(json["config"]["problem"], "ex2");
    assert_eq!(json["config"]["n_list"], serde_json::json!([4, 8]));

    fs::write(&cfg, "problem = ex2\nspeed = 3\n").unwrap();
    let bad = ifmid(&["converge", "--config", cfg.to_str().unwrap()]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("unknown key `speed`"));
}

#[test]
fn adapt_meets_tolerance_on_example_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ex3");
    ok(&[
        "adapt",
        "--problem",
        "ex3",
        "--tol",
        "1e-2",
        "--k0",
        "0.016666666666666666",
        "--kmax",
        "4e-2",
        "--out",
        out.to_str().unwrap(),
    ]);
    let summary = read(&out.join("adapt_summary.csv"));
    assert_eq!(summary.lines().next().unwrap(), ADAPT_SUMMARY_HEADER);
    let json: Value = serde_json::from_str(&read(&out.join("adapt.json"))).unwrap();
    let global_e = json["global_e"].as_f64().unwrap();
    assert!(2.0 * global_e <= 0.1);
    let count = json["count"].as_u64().unwrap() as f64;
    assert!((count - 402.0).abs() <= 0.2 * 402.0, "count {count}");

    let traj = read(&out.join("adapt_trajectory.csv"));
    assert_eq!(traj.lines().next().unwrap(), ADAPT_TRAJECTORY_HEADER);
    let steps: Vec<(f64, f64)> = rows(&traj)
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    assert_eq!(steps.len() as f64, count);
    let (t_min, _) = steps
        .iter()
        .cloned()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!(t_min > 0.4 && t_min < 0.6, "argmin at {t_min}");
    assert_eq!(steps.last().unwrap().0, 1.0);
}

#[test]
fn loose_tolerance_ramps_to_kmax() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("loose");
    ok(&[
        "adapt",
        "--problem",
        "ex1",
        "--m",
        "15",
        "--tol",
        "1e4",
        "--k0",
        "0.01",
        "--kmax",
        "0.1",
        "--out",
        out.to_str().unwrap(),
    ]);
    let ks: Vec<f64> = rows(&read(&out.join("adapt_trajectory.csv")))
        .iter()
        .map(|r| r[1].parse().unwrap())
        .collect();
    let ramp = &ks[..ks.len() - 1];
    assert!(ramp.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(ramp.last().unwrap(), &1.0e-1);
}

#[test]
fn controller_abort_flushes_partial_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("abort");
    let res = ifmid(&[
        "adapt",
        "--problem",
        "ex3",
        "--m",
        "9",
        "--tol",
        "1e-40",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("aborted"));
    assert_eq!(
        read(&out.join("adapt_trajectory.csv"))
            .lines()
            .next()
            .unwrap(),
        ADAPT_TRAJECTORY_HEADER
    );
    let json: Value = serde_json::from_str(&read(&out.join("adapt.json"))).unwrap();
    assert!(json["status"].as_str().unwrap().starts_with("aborted"));
    assert!(!out.join("adapt_summary.csv").exists());
}

#[test]
fn mode_in_file_must_match_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("m.cfg");
    fs::write(&cfg, "mode = adapt\n").unwrap();
    let res = ifmid(&["converge", "--config", cfg.to_str().unwrap()]);
    assert!(!res.status.success());
}
