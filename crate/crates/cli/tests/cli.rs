use std::process::{Command, Output};

fn negdep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_negdep")).args(args).env_remove("NEGDEP_SEED").output().unwrap()
}

fn stdout_ok(args: &[&str]) -> String {
    let out = negdep(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Data lines after the `#` header and the column line.
fn body(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn header_records_version_and_config() {
    let text = stdout_ok(&["gen", "--family", "halton", "--s", "2", "--n", "3"]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), format!("# negdep {}", env!("CARGO_PKG_VERSION")));
    let cfg = lines.next().unwrap().strip_prefix("# config: ").unwrap();
    let v: serde_json::Value = serde_json::from_str(cfg).unwrap();
    assert_eq!(v["gen"]["n"], 3);
    assert_eq!(lines.next().unwrap(), "x1,x2");
    assert_eq!(body(&text)[2], ["0.25", "0.6666666666666666"]);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["gen", "--family", "faure", "--s", "2"][..],
        &["gen", "--family", "nope", "--s", "2", "--n", "3"],
        &["gen", "--family", "faure", "--s", "0", "--n", "3"],
        &["gen", "--family", "faure", "--s", "2", "--n", "3", "--perms", "faure92"],
        &["criteria", "--table", "5"],
        &["criteria", "--table", "1", "--family", "faure"],
        &["converge", "--f", "h1", "--s", "2", "--family", "halton", "--ns", "abc"],
    ] {
        assert_eq!(negdep(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn runtime_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.txt");
    let perms = format!("file:{}", missing.display());
    let bad_out = dir.path().join("no/such/dir/x.csv");
    for args in [
        vec!["gen", "--family", "ghalton", "--s", "2", "--n", "3", "--perms", &perms],
        vec!["gen", "--family", "faure", "--s", "2", "--n", "3", "--out", bad_out.to_str().unwrap()],
    ] {
        assert_eq!(negdep(&args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn config_file_merges_and_rejects_duplicates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"s": 3, "family": "faure"}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let text = stdout_ok(&["gen", "--config", cfg, "--n", "2"]);
    assert_eq!(body(&text)[1], ["0.3333333333333333"; 3]);
    assert_eq!(negdep(&["gen", "--config", cfg, "--s", "2", "--n", "2"]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pts.csv");
    let printed = stdout_ok(&["gen", "--family", "faure", "--s", "3", "--n", "10"]);
    stdout_ok(&["gen", "--family", "faure", "--s", "3", "--n", "10", "--out", path.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(path).unwrap(), printed);
}

#[test]
fn converge_grid_has_one_row_per_n() {
    let text = stdout_ok(&[
        "converge", "--f", "g2", "--s", "12", "--family", "faure", "--base", "13", "--rand", "shift", "--ns",
        "2197:60", "--V", "2",
    ]);
    let rows = body(&text);
    assert_eq!(rows.len(), 60);
    assert_eq!(rows[0][0], "2197");
    assert_eq!(rows[59][0], (2197 * 60).to_string());
}

#[test]
fn hist_row_count() {
    let text = stdout_ok(&["hist", "--f", "h1", "--s", "4", "--family", "faure", "--n", "125", "--R", "7", "--V", "2"]);
    let rows = body(&text);
    let count = |k: &str| rows.iter().filter(|r| r[0] == k).count();
    assert_eq!(count("scrambled"), 7);
    assert_eq!(count("variant"), 3);
    assert_eq!(count("mc"), 1);
    assert_eq!(rows.len(), 7 + 3 + 1);
}

#[test]
fn seed_falls_back_to_environment() {
    let args = ["converge", "--f", "h1", "--s", "2", "--family", "halton", "--ns", "64", "--V", "3"];
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_negdep"));
        c.args(args).args(extra).env_remove("NEGDEP_SEED");
        if let Some(v) = env {
            c.env("NEGDEP_SEED", v);
        }
        let out = c.output().unwrap();
        assert!(out.status.success());
        body(&String::from_utf8(out.stdout).unwrap())
    };
    let from_env = run(Some("42"), &[]);
    assert_eq!(from_env, run(None, &["--seed", "42"]));
    assert_ne!(from_env, run(None, &[]));
    assert_eq!(run(Some("42"), &["--seed", "7"]), run(None, &["--seed", "7"]));
}

#[test]
fn gfaure_differs_only_where_factor_is_one() {
    let plain = body(&stdout_ok(&["gen", "--family", "faure", "--s", "4", "--n", "25"]));
    let gen = body(&stdout_ok(&["gen", "--family", "gfaure", "--factors", "offset", "--s", "4", "--n", "25"]));
    // offset factors in base 5 are [3, 1, 4, 2]
    for j in 0..4 {
        let same = (0..25).all(|i| plain[i][j] == gen[i][j]);
        assert_eq!(same, j == 1, "coordinate {}", j + 1);
    }
}

#[test]
fn faure_is_cqe_in_own_base() {
    let text = stdout_ok(&["criteria", "--family", "faure", "--s", "4", "--base", "5", "--n", "3125", "--criterion-base", "5"]);
    let row = &body(&text)[0];
    let c: f64 = row[5].parse().unwrap();
    assert!(c <= 1.0, "c = {c}");
}

#[test]
fn cqe_reports_holds() {
    let text = stdout_ok(&["cqe", "--family", "faure", "--s", "3", "--n", "125"]);
    assert!(text.contains("# holds: true"));
}

#[test]
fn criteria_json_format() {
    let text = stdout_ok(&["criteria", "--family", "halton", "--s", "3", "--n", "100", "--format", "json"]);
    let json: String = text.lines().filter(|l| !l.starts_with('#')).collect();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let c = v[0]["max"].as_f64().unwrap();
    let cbar = v[0]["mean"].as_f64().unwrap();
    assert!(cbar > 0.0 && cbar <= c);
    assert_eq!(v[0]["n"], 100);
}
