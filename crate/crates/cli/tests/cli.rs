use std::path::Path;
use std::process::{Command, Output};

fn forecast(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forecast"))
        .args(args)
        .current_dir(dir)
        .env_remove("FORECAST_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn simulate_to(dir: &Path, name: &str, extra: &[&str]) {
    let mut args = vec!["simulate", "--out", name];
    args.extend_from_slice(extra);
    let o = forecast(&args, dir);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn simulate_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let a = forecast(
        &["simulate", "--kind", "arfima", "--n", "50", "--seed", "3"],
        dir.path(),
    );
    let b = forecast(
        &["simulate", "--kind", "arfima", "--n", "50", "--seed", "3"],
        dir.path(),
    );
    let c = forecast(
        &["simulate", "--kind", "arfima", "--n", "50", "--seed", "4"],
        dir.path(),
    );
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 51);
    assert_eq!(lines[0], "date,value");
    assert!(lines[1].starts_with("1971-01,"));
    assert!(lines[13].starts_with("1972-01,"));
}

#[test]
fn run_text_json_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    simulate_to(
        dir.path(),
        "rates.csv",
        &["--kind", "arfima", "--n", "120", "--seed", "5"],
    );

    let text = forecast(&["run", "--input", "rates.csv"], dir.path());
    assert!(
        text.status.success(),
        "{}",
        String::from_utf8_lossy(&text.stderr)
    );
    let table = stdout(&text);
    for id in [
        "ARFIMA",
        "DGM-FMarkov",
        "F-Kalman",
        "Method 1",
        "Method 2",
        "Method 3",
        "Average",
    ] {
        assert!(table.lines().any(|l| l.starts_with(id)), "{id} missing");
    }

    let json = forecast(
        &[
            "run",
            "--input",
            "rates.csv",
            "--format",
            "json",
            "--out",
            "r.json",
        ],
        dir.path(),
    );
    assert!(json.status.success());
    assert!(json.stdout.is_empty());
    let saved = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&saved).unwrap();
    assert_eq!(value["methods"].as_array().unwrap().len(), 7);
    assert_eq!(value["points"].as_array().unwrap().len(), 13);

    // re-rendering the saved report reproduces direct output
    let again = forecast(
        &["report", "--input", "r.json", "--format", "json"],
        dir.path(),
    );
    assert_eq!(stdout(&again), saved);
    let rendered = forecast(&["report", "--input", "r.json"], dir.path());
    assert_eq!(stdout(&rendered), table);

    let csv = forecast(
        &["run", "--input", "rates.csv", "--format", "csv"],
        dir.path(),
    );
    assert_eq!(stdout(&csv).lines().count(), 1 + 7 * 13);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    simulate_to(
        dir.path(),
        "rates.csv",
        &["--kind", "arfima", "--n", "100", "--seed", "8"],
    );
    let a = forecast(
        &["run", "--input", "rates.csv", "--format", "json"],
        dir.path(),
    );
    let b = forecast(
        &["run", "--input", "rates.csv", "--format", "json"],
        dir.path(),
    );
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn flags_reach_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = forecast(
        &[
            "run",
            "--print-config",
            "--horizon",
            "6",
            "--rho",
            "0.4",
            "--fractal-transition",
            "paper",
            "--markov-midpoint",
            "source",
            "--effective-degree-direction",
            "minimize",
            "--difference-first",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["horizon"], 6);
    assert_eq!(v["rho"], 0.4);
    assert_eq!(v["fractal_transition"], "paper");
    assert_eq!(v["markov_midpoint"], "source");
    assert_eq!(v["effective_degree_direction"], "minimize");
    assert_eq!(v["difference_first"], true);
    assert_eq!(v["kalman_q"], 0.0001);
    assert_eq!(v["kalman_r"], 1.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        forecast(&["run", "--input", "missing.csv"], dir.path())
            .status
            .code(),
        Some(2)
    );
    std::fs::write(
        dir.path().join("bad.csv"),
        "date,value\n1971-01,1.0\n1971-02,abc\n",
    )
    .unwrap();
    let bad = forecast(&["run", "--input", "bad.csv"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 3"));
    std::fs::write(dir.path().join("short.csv"), "a,1\nb,2\nc,3\n").unwrap();
    assert_eq!(
        forecast(&["run", "--input", "short.csv"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        forecast(&["run", "--bogus"], dir.path()).status.code(),
        Some(2)
    );

    // trending prices defeat the stationary levels fit: a fit error
    simulate_to(
        dir.path(),
        "trend.csv",
        &["--kind", "fractal", "--n", "100", "--seed", "7"],
    );
    let o = forecast(&["run", "--input", "trend.csv"], dir.path());
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let o = forecast(
        &["run", "--input", "trend.csv", "--difference-first"],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn log_goes_to_stderr() {
    let dir = tempfile::tempdir().unwrap();
    simulate_to(dir.path(), "rates.csv", &["--kind", "arfima", "--n", "100"]);
    let o = Command::new(env!("CARGO_BIN_EXE_forecast"))
        .args(["run", "--input", "rates.csv", "--format", "json"])
        .current_dir(dir.path())
        .env("FORECAST_LOG", "debug")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("read 100 points"));
    serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap();
}
