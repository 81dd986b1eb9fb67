use std::process::Command;

fn ampsum() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ampsum"))
}

#[test]
fn malformed_config_exits_2_without_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    for (name, text) in [
        ("broken.json", "{ \"seed\": "),
        ("unknown.json", "{ \"suite\": \"nu\", \"no_such_key\": 1 }"),
        ("negative.json", "{ \"suite\": \"nu\", \"seed\": -1 }"),
    ] {
        let cfg = dir.path().join(name);
        std::fs::write(&cfg, text).unwrap();
        let status = ampsum()
            .args(["verify", "nu", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .env("AMPSUM_CACHE_DIR", dir.path().join("cache"))
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(2), "{name}");
        assert!(!out.exists(), "{name}");
    }
}

#[test]
fn small_suite_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    for (path, format) in [(&json, "json"), (&csv, "csv")] {
        let status = ampsum()
            .args(["verify", "partition", "--seed", "3", "--format", format, "--out"])
            .arg(path)
            .env("AMPSUM_CACHE_DIR", dir.path().join("cache"))
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["body"]["summary"]["failures"], 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("id,suite,status"));
    assert_eq!(text.lines().count(), 1 + report["body"]["checks"].as_array().unwrap().len());

    let summary = ampsum().args(["report", "--summary", "--in"]).arg(&json).output().unwrap();
    assert!(summary.status.success());
    assert!(String::from_utf8_lossy(&summary.stdout).contains("0 failures"));
}
