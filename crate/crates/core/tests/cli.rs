use std::path::PathBuf;
use std::process::{Command, Output};
use vhda::pipeline::replay_record;
use vhda::trace::{read_jsonl, CSV_HEADER};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn vhda(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vhda"))
        .args(args)
        .env_remove("VHDA_SEED")
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn decide_emits_replayable_jsonl() {
    let path = fixture("paper_sec4.json");
    let out = vhda(&["decide", path.to_str().unwrap(), "--seed", "42"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let trace = read_jsonl(out.stdout.as_slice()).unwrap();
    assert_eq!(trace.records.len(), 1);
    let r = &trace.records[0];
    assert_eq!(r.seed, 42);
    assert!(r.timings.is_none());
    assert_eq!(replay_record(r).unwrap(), r.decision);
}

#[test]
fn seed_flag_env_and_config() {
    let path = fixture("paper_sec4.json");
    let p = path.to_str().unwrap();
    let by_flag = vhda(&["decide", p, "--seed", "9"]).stdout;
    let by_env = Command::new(env!("CARGO_BIN_EXE_vhda"))
        .args(["decide", p])
        .env("VHDA_SEED", "9")
        .output()
        .unwrap()
        .stdout;
    assert_eq!(by_flag, by_env);
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_vhda"))
        .args(["decide", p, "--seed", "9"])
        .env("VHDA_SEED", "10")
        .output()
        .unwrap()
        .stdout;
    assert_eq!(by_flag, flag_wins);
    let from_config = read_jsonl(vhda(&["decide", p]).stdout.as_slice()).unwrap();
    assert_eq!(from_config.records[0].seed, 42);
}

#[test]
fn decide_csv_to_file_with_timings() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("trace.csv");
    let path = fixture("paper_sec4.json");
    let out = vhda(&[
        "decide",
        path.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        out_path.to_str().unwrap(),
        "--timings",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    let row = lines.next().unwrap();
    assert!(row.contains("handoff") && row.ends_with("WiMAX_2"), "{row}");

    let json_path = dir.path().join("trace.jsonl");
    vhda(&[
        "decide",
        path.to_str().unwrap(),
        "--out",
        json_path.to_str().unwrap(),
        "--timings",
    ]);
    let trace = read_jsonl(
        std::fs::File::open(json_path)
            .map(std::io::BufReader::new)
            .unwrap(),
    )
    .unwrap();
    assert!(trace.records[0].timings.is_some());
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("paper_sec4.json")).unwrap();
    let bad = text.replace("\"security\": [0.8, 0.9]", "\"security\": [0.95, 0.9]");
    assert_ne!(bad, text);
    let path = dir.path().join("bad.json");
    std::fs::write(&path, bad).unwrap();
    let out = vhda(&["decide", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bounds.security"), "{err}");
    assert_eq!(err.matches("bounds.security").count(), 2, "{err}");

    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(
        vhda(&["decide", path.to_str().unwrap()]).status.code(),
        Some(2)
    );

    let ok = fixture("paper_sec4.json");
    assert_eq!(
        vhda(&["decide", ok.to_str().unwrap(), "--threshold", "1.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        vhda(&["decide", ok.to_str().unwrap(), "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn missing_file_exits_3() {
    let out = vhda(&["decide", "/nonexistent/scenario.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn fis_eval_reports_factor() {
    let out = vhda(&[
        "fis-eval",
        "--rssi",
        "-67.3",
        "--rate",
        "48.8",
        "--coverage",
        "47.9",
        "--latency",
        "56.5",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    let f = v["factor"].as_f64().unwrap();
    assert!(f > 0.65 && f < 0.9, "{f}");
    assert_eq!(v["initiate"], true);
    assert_eq!(v["direction"], "umts_to_wimax");

    let out = vhda(&[
        "fis-eval",
        "--rssi",
        "-67.3",
        "--rate",
        "48.8",
        "--coverage",
        "47.9",
        "--latency",
        "56.5",
        "--direction",
        "wimax-to-umts",
    ]);
    let g = stdout_json(&out)["factor"].as_f64().unwrap();
    assert!(g < 0.5, "{g}");

    let out = vhda(&[
        "fis-eval",
        "--rssi",
        "-70",
        "--rate",
        "1",
        "--coverage",
        "1",
        "--latency",
        "1",
        "--threshold",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn weights_from_matrix_file() {
    let path = fixture("consistent_ahp_3x3.json");
    let out = vhda(&["weights", "--matrix", path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    let w: Vec<f64> = serde_json::from_value(v["weights"].clone()).unwrap();
    for (a, b) in w.iter().zip([0.5, 0.3, 0.2]) {
        assert!((a - b).abs() < 1e-9);
    }
    assert!((v["lambda_max"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert!(out.stderr.is_empty());

    let dir = tempfile::tempdir().unwrap();
    let inconsistent = dir.path().join("m.json");
    std::fs::write(&inconsistent, "[[1, 9, 0.111111111111111111], [0.111111111111111111, 1, 9], [9, 0.111111111111111111, 1]]")
        .unwrap();
    let out = vhda(&["weights", "--matrix", inconsistent.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("consistency ratio"));

    std::fs::write(&inconsistent, "[[1, 2], [3, 1]]").unwrap();
    assert_eq!(
        vhda(&["weights", "--matrix", inconsistent.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn ga_subcommand_matches_pipeline() {
    let path = fixture("paper_sec4.json");
    let p = path.to_str().unwrap();
    let out = vhda(&[
        "ga",
        "--network",
        "WiMAX_2",
        "--scenario",
        p,
        "--seed",
        "42",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    let trace = read_jsonl(vhda(&["decide", p, "--seed", "42"]).stdout.as_slice()).unwrap();
    let rec = trace.records[0]
        .optimizations
        .iter()
        .find(|o| o.network == "WiMAX_2")
        .unwrap();
    assert_eq!(v["seed"].as_u64().unwrap(), rec.seed);
    assert_eq!(v["best_fitness"].as_f64().unwrap(), rec.best_fitness);

    assert_eq!(
        vhda(&["ga", "--network", "UMTS_2", "--scenario", p])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        vhda(&["ga", "--network", "nope", "--scenario", p])
            .status
            .code(),
        Some(2)
    );
}
