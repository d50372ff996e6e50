use std::process::{Command, Output};

fn snc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(args: &[&str]) -> serde_json::Value {
    let out = snc(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn csv_rows(args: &[&str]) -> (Vec<String>, Vec<Vec<String>>) {
    let out = snc(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn toy_reports_all_three_methods() {
    let v = stdout_json(&["toy"]);
    let j = v["jsnc_profit"].as_f64().unwrap();
    assert!((v["usnc_profit"].as_f64().unwrap() - 3.0).abs() < 0.05);
    assert!((j - 4.16).abs() < 0.05);
    let (header, rows) = csv_rows(&["toy", "--format", "csv"]);
    assert_eq!(header[..2], ["method", "profit"]);
    let methods: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(methods, ["usnc", "jsnc", "semi-jsnc"]);
}

#[test]
fn solve_commands_emit_one_row_per_user() {
    for cmd in ["place", "jsnc", "semi-jsnc"] {
        let (header, rows) = csv_rows(&[cmd, "--preset", "paper-default", "--format", "csv"]);
        assert_eq!(header[0], "user_id");
        assert_eq!(rows.len(), 15);
        let v = stdout_json(&[cmd]);
        assert_eq!(v["solution"]["method"], cmd.replace("place", "usnc"));
        assert!(v["score"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn scenario_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("toy.json");
    let text = snc_core::harness::Scenario::toy().to_json();
    std::fs::write(&path, text).unwrap();
    let v = stdout_json(&["jsnc", "--scenario", path.to_str().unwrap()]);
    assert_eq!(v["scenario"], "toy");
    assert!((v["gamma_star"].as_f64().unwrap() - 200.0).abs() < 1e-6);
}

#[test]
fn invalid_input_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"schema_version\": 1}").unwrap();
    for args in [
        vec!["place", "--scenario", bad.to_str().unwrap()],
        vec!["place", "--scenario", "/nonexistent/scenario.json"],
        vec!["place", "--preset", "unknown"],
        vec!["density-sweep", "--min-users", "9", "--max-users", "3"],
        vec!["fit-pwl", "--breakpoints", "1"],
        vec!["regional", "--radius", "-5"],
    ] {
        let out = snc(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
    assert!(!snc(&["no-such-command"]).status.success());
    assert!(!snc(&["toy", "--format", "xml"]).status.success());
}

#[test]
fn montecarlo_writes_replayable_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let out = snc(&[
            "montecarlo",
            "--trials",
            "3",
            "--seed",
            "5",
            "--out",
            d.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let read = |d: &std::path::Path| -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(d.join("montecarlo.json")).unwrap()).unwrap()
    };
    let (ra, rb) = (read(&a), read(&b));
    assert_eq!(ra["master_seed"], 5);
    assert_eq!(ra["generator"], "chacha20/v1");
    let scores = |r: &serde_json::Value| -> Vec<serde_json::Value> {
        r["trials"]
            .as_array()
            .unwrap()
            .iter()
            .flat_map(|t| t["outcomes"].as_array().unwrap().iter().map(|o| o["score"].clone()))
            .collect()
    };
    assert_eq!(scores(&ra), scores(&rb));
    assert_eq!(scores(&ra).len(), 12);
}

#[test]
fn density_sweep_csv_has_one_row_per_count_and_method() {
    let (header, rows) = csv_rows(&[
        "density-sweep",
        "--min-users",
        "10",
        "--max-users",
        "12",
        "--trials",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(header[..2], ["user_count", "density"]);
    assert_eq!(rows.len(), 3 * 4);
}

#[test]
fn alpha_star_and_fit_pwl() {
    let (_, rows) = csv_rows(&["alpha-star", "--all", "--format", "csv"]);
    assert_eq!(rows.len(), 3);
    let v = stdout_json(&["alpha-star"]);
    let g = v[0]["gamma_star"].as_f64().unwrap();
    assert!(g > 100.0 && g < 120.0);

    let (_, rows) = csv_rows(&["fit-pwl", "--breakpoints", "4", "--format", "csv"]);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 0.0);
    assert_eq!(rows[3][1].parse::<f64>().unwrap(), 200.0);
}

#[test]
fn regional_curve_and_sweep() {
    let v = stdout_json(&["regional", "--points", "101", "--sweep-points", "10"]);
    assert_eq!(v["curve"].as_array().unwrap().len(), 101);
    assert_eq!(v["sweep"].as_array().unwrap().len(), 10);
    let gain = v["optimum"]["gain_percent"].as_f64().unwrap();
    assert!((gain - 50.0).abs() < 5.0);
    let (header, rows) = csv_rows(&["regional", "--points", "5", "--sweep-points", "3", "--format", "csv"]);
    assert_eq!(header, ["series", "x", "tau", "profit", "gain_percent"]);
    assert_eq!(rows.len(), 8);
}
