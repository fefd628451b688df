use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::Instant;

fn sisi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sisi"))
        .args(args)
        .output()
        .expect("failed to run sisi")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("sisi-cli-{}-{name}", std::process::id()))
}

/// Coordinates of the `# limit=...` summary line.
fn limit_of(text: &str) -> (String, [f64; 4]) {
    let line = text.lines().find(|l| l.starts_with("# limit=")).expect("no limit line");
    let rest = &line["# limit=".len()..];
    let (label, inner) = rest.split_once(" (").unwrap_or(("", rest.trim_start_matches('(')));
    let nums: Vec<f64> = inner
        .trim_end_matches(')')
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    (label.to_string(), [nums[0], nums[1], nums[2], nums[3]])
}

#[test]
fn validate_exit_codes() {
    let ok = sisi(&["validate", "--figure", "1"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("admissible: yes"));

    let neg = sisi(&["validate", "--params", "b=-0.1"]);
    assert_eq!(neg.status.code(), Some(2));

    let bad = sisi(&["validate", "--params", "b=0.9,alpha=0.5"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("alpha+b <= 1 violated"));
}

#[test]
fn validate_json() {
    let o = sisi(&["validate", "--params", "b=0.9,alpha=0.5", "--format", "json"]);
    let line = stdout(&o).lines().last().unwrap().to_string();
    let v: serde_json::Value = serde_json::from_str(&line).unwrap();
    assert_eq!(v["admissible"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn trajectory_presets_reach_their_limits() {
    let l11 = [0.24930287391756065, 0.6824519328022176, 0.03893503951884738, 0.02931015376137437];
    let cases = [
        ("1", "lambda1", [1.0, 0.0, 0.0, 0.0]),
        ("2", "lambda10", [0.6, 2.0 / 15.0, 4.0 / 15.0, 0.0]),
        ("3", "lambda1", [1.0, 0.0, 0.0, 0.0]),
        ("4", "lambda11", l11),
    ];
    for (fig, label, want) in cases {
        let start = Instant::now();
        let o = sisi(&["simulate", "--figure", fig, "--stride", "50"]);
        assert!(start.elapsed().as_secs_f64() < 10.0, "figure {fig} too slow");
        assert_eq!(o.status.code(), Some(0), "figure {fig}");
        let text = stdout(&o);
        let (got, c) = limit_of(&text);
        assert_eq!(got, label, "figure {fig}");
        for (a, b) in c.iter().zip(want) {
            assert!((a - b).abs() <= 1e-6, "figure {fig}: {c:?} vs {want:?}");
        }
        assert!(text.contains("# match=true"));
    }
}

#[test]
fn curve_presets_run() {
    for fig in ["5", "6"] {
        let start = Instant::now();
        let o = sisi(&["curves", "--figure", fig]);
        assert!(start.elapsed().as_secs_f64() < 10.0);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        assert!(text.contains("\nx,f,g\n"));
        let crossings = text.lines().find(|l| l.starts_with("# crossings=")).unwrap();
        let n = crossings["# crossings=".len()..].split(';').filter(|s| !s.is_empty()).count();
        assert_eq!(n, if fig == "5" { 1 } else { 0 });
    }
    let o = sisi(&["simulate", "--figure", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fixpoints_lists_catalog() {
    let o = sisi(&["fixpoints", "--figure", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("lambda1,")));
    assert!(text.lines().any(|l| l.starts_with("lambda10,")));
}

#[test]
fn classify_reports_nonhyperbolic_without_birth() {
    let o = sisi(&["classify", "--params", "b=0,alpha=0.1,beta1=0.5,k1=1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("lambda1 by parameter rule: nonhyperbolic"));
}

#[test]
fn conjugacy_passes() {
    let o = sisi(&["conjugacy", "--params", "b=0.2,beta1=1,k1=0.9"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().ends_with("PASS"));
}

#[test]
fn scan_writes_json_lines_deterministically() {
    let args = ["scan", "--which", "1", "--grid", "2", "--points", "2", "--seed", "9"];
    let a = sisi(&args);
    let b = sisi(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let json: Vec<serde_json::Value> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let summary = &json.last().unwrap()["summary"];
    assert_eq!(summary["cells"], 32);
    assert_eq!(summary["records"].as_u64().unwrap() as usize, json.len() - 1);
    assert_eq!(summary["counterexamples"], 0);
}

#[test]
fn simulate_is_byte_identical() {
    let a = sisi(&["simulate", "--figure", "4", "--seed", "3"]);
    let b = sisi(&["simulate", "--figure", "4", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exhausted_budget_exits_three() {
    let o = sisi(&["simulate", "--figure", "4", "--max-iter", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("# converged=false iterations=10"));
}

#[test]
fn echoed_header_reproduces_the_run() {
    let first = temp_path("first.csv");
    let o = sisi(&[
        "simulate",
        "--figure",
        "2",
        "--params",
        "k2=0.25",
        "--seed",
        "11",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let original = std::fs::read_to_string(&first).unwrap();
    let header: String = original
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let config = temp_path("header.cfg");
    std::fs::write(&config, &header).unwrap();
    let again = sisi(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(stdout(&again), original);
    let _ = std::fs::remove_file(first);
    let _ = std::fs::remove_file(config);
}

#[test]
fn tensor_dump_and_inadmissible_tensor() {
    let o = sisi(&["tensor-dump", "--figure", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = stdout(&o).lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 65);
    let bad = sisi(&["tensor-dump", "--params", "b=0.9,alpha=0.5"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn verify_single_regime() {
    let o = sisi(&["verify", "--regime", "beta1=beta2=0;b>0", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains(",PASS"));
    let unknown = sisi(&["verify", "--regime", "nope"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(sisi(&["simulate", "--params", "gamma=1"]).status.code(), Some(2));
    assert_eq!(sisi(&["simulate", "--figure", "1", "--init", "0.5,0.5,0.5,0.5"]).status.code(), Some(2));
    assert_eq!(sisi(&["simulate", "--figure", "9"]).status.code(), Some(2));
}
