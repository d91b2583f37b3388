//! End-to-end checks of the command-line surface: exit codes, artifact
//! determinism, and the documented subcommand behavior.

use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_grlimit"));
    cmd.args(args);
    match stdin {
        None => cmd.stdin(std::process::Stdio::null()),
        Some(_) => cmd.stdin(std::process::Stdio::piped()),
    };
    cmd.stdout(std::process::Stdio::piped());
    cmd.stderr(std::process::Stdio::piped());
    let mut child = cmd.spawn().expect("binary spawns");
    if let Some(input) = stdin {
        child
            .stdin
            .as_mut()
            .unwrap()
            .write_all(input.as_bytes())
            .unwrap();
    }
    child.wait_with_output().expect("binary finishes")
}

const BALANCED_SYSTEM: &str = r#"{
  "rank": 2,
  "points": ["0", "1", "2"],
  "residues": [
    [["0", "1"], ["0", "1/2"]],
    [["1/2", "-1"], ["0", "0"]],
    [["-1/2", "0"], ["0", "-1/2"]]
  ],
  "parabolic": [
    { "point": "0", "steps": [
      { "weight": "1/2", "vectors": [["2", "1"]] },
      { "weight": "0", "vectors": [["1", "0"]] }
    ]},
    { "point": "1", "steps": [
      { "weight": "1/2", "vectors": [["1", "0"]] },
      { "weight": "0", "vectors": [["2", "1"]] }
    ]}
  ]
}"#;

const MOVING_SYSTEM: &str = r#"{
  "rank": 2,
  "points": ["0", "1", "2"],
  "residues": [
    [["0", "1"], ["0", "1/2"]],
    [["1/2", "0"], ["1", "0"]],
    [["-1/2", "-1"], ["-1", "-1/2"]]
  ],
  "parabolic": [
    { "point": "0", "steps": [
      { "weight": "3/4", "vectors": [["2", "1"]] },
      { "weight": "0", "vectors": [["1", "0"]] }
    ]},
    { "point": "1", "steps": [
      { "weight": "3/4", "vectors": [["1", "2"]] },
      { "weight": "0", "vectors": [["0", "1"]] }
    ]},
    { "point": "2", "steps": [
      { "weight": "3/4", "vectors": [["1", "-1"]] },
      { "weight": "0", "vectors": [["1", "1"]] }
    ]}
  ]
}"#;

const DIVERGENT_SYSTEM: &str = r#"{
  "rank": 2,
  "points": ["0", "1", "2"],
  "residues": [
    [["0", "1"], ["0", "1/2"]],
    [["1/2", "-1"], ["0", "0"]],
    [["-1/2", "0"], ["0", "-1/2"]]
  ],
  "parabolic": [
    { "point": "0", "steps": [
      { "weight": "1/2", "vectors": [["2", "1"]] },
      { "weight": "0", "vectors": [["1", "0"]] }
    ]},
    { "point": "1", "steps": [
      { "weight": "1/2", "vectors": [["2", "1"]] },
      { "weight": "0", "vectors": [["1", "0"]] }
    ]}
  ]
}"#;

#[test]
fn limit_writes_a_descending_trace() {
    let out = run(&["limit"], Some(MOVING_SYSTEM));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<serde_json::Value> = stdout
        .lines()
        .map(|l| serde_json::from_str(l).expect("each trace line is JSON"))
        .collect();
    assert!(lines.len() >= 2, "at least one step and the summary");
    let last = lines.last().unwrap();
    assert_eq!(last["final"], true);
    assert_eq!(last["semistable"], true);
    // strictly descending invariants over the recorded steps
    let steps: Vec<&serde_json::Value> = lines[..lines.len() - 1].iter().collect();
    for w in steps.windows(2) {
        let beta_a: f64 = parse_rat(&w[0]["beta"]);
        let beta_b: f64 = parse_rat(&w[1]["beta"]);
        assert!(beta_b <= beta_a);
    }
}

fn parse_rat(v: &serde_json::Value) -> f64 {
    let s = v.as_str().expect("rationals serialize as strings");
    match s.split_once('/') {
        None => s.parse::<f64>().unwrap(),
        Some((p, q)) => p.parse::<f64>().unwrap() / q.parse::<f64>().unwrap(),
    }
}

#[test]
fn limit_is_byte_deterministic() {
    let a = run(&["limit", "--seed", "7", "--threads", "1"], Some(BALANCED_SYSTEM));
    let b = run(&["limit", "--seed", "7", "--threads", "4"], Some(BALANCED_SYSTEM));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "thread count must not affect artifacts");
    let c = run(
        &["limit", "--seed", "7", "--explore-seed", "99"],
        Some(BALANCED_SYSTEM),
    );
    assert_eq!(a.stdout, c.stdout, "exploration order must not affect artifacts");
}

#[test]
fn validate_rejects_bad_residues_with_exit_one() {
    let bad = r#"{
      "rank": 2,
      "points": ["0", "1"],
      "residues": [[["1","0"],["0","1"]],[["0","0"],["0","0"]]],
      "parabolic": []
    }"#;
    let out = run(&["validate"], Some(bad));
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("sum to zero"), "stderr: {err}");
}

#[test]
fn divergent_reducible_input_exits_two() {
    let out = run(&["limit", "--budget", "6"], Some(DIVERGENT_SYSTEM));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kostov_fixtures() {
    let generic = r#"{"eigenvalues": [["1/5","-1/5"],["1/7","-1/7"],["3/35","-3/35"]]}"#;
    let out = run(&["kostov"], Some(generic));
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["generic"], true);
    assert!(String::from_utf8_lossy(&out.stderr).contains("generic: true"));

    let special = r#"{"eigenvalues": [["1/5","-1/5"],["1/7","-1/7"],["2/35","-2/35"]]}"#;
    let out = run(&["kostov"], Some(special));
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["generic"], false);
}

#[test]
fn walls_reports_the_four_sign_classes() {
    let arrangement = r#"{"type":"traceless_rank2","points":3,"box_lo":"1/100","box_hi":"49/100"}"#;
    let out = run(&["walls"], Some(arrangement));
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["walls"].as_array().unwrap().len(), 4);
}

#[test]
fn oracle_agrees_on_an_unbalanced_system() {
    let system = r#"{
      "points": ["0", "1", "2"],
      "levels": [
        { "p": 0, "degrees": [1, -1], "flags": [
          { "point": "0", "steps": [ { "weight": "0", "vectors": [["1","0"],["0","1"]] } ] },
          { "point": "1", "steps": [ { "weight": "0", "vectors": [["1","0"],["0","1"]] } ] },
          { "point": "2", "steps": [ { "weight": "0", "vectors": [["1","0"],["0","1"]] } ] }
        ]}
      ],
      "theta": []
    }"#;
    let out = run(&["oracle"], Some(system));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["destabilizer"]["beta"], "1");
    assert_eq!(report["destabilizer"]["rho"], 1);
}

#[test]
fn defdim_reports_the_rigid_three_point_dimension() {
    let out = run(&["defdim"], Some(MOVING_SYSTEM));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // three points, rank two: rigid, so the moduli direction vanishes
    assert_eq!(report["h1"], 0);
    assert_eq!(report["h0"], 1);
    assert_eq!(report["h2"], 1);
    assert_eq!(report["trace_free"]["h1"], 0);
}

#[test]
fn scan_smoke_test() {
    let arrangement = r#"{"type":"traceless_rank2","points":3,"box_lo":"1/100","box_hi":"49/100"}"#;
    let out = run(&["scan", "--trials", "4", "--seed", "5"], Some(arrangement));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["disagreements"].as_array().unwrap().is_empty());
    // determinism: identical config, identical bytes
    let again = run(&["scan", "--trials", "4", "--seed", "5"], Some(arrangement));
    assert_eq!(out.stdout, again.stdout);
}
