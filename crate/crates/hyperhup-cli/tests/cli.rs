use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn hyperhup(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperhup"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_t_default_passes() {
    let o = hyperhup(&["verify-t"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["command"], "verify-t");
    assert_eq!(r["pass"], true);
    assert_eq!(r["exit_code"], 0);
    assert_eq!(r["config"]["grid"]["n"], 16384);
    assert!(r["result"]["checks"].as_array().unwrap().len() >= 8 * 6);
}

#[test]
fn verify_t_coarse_grid_fails_with_diagnostics() {
    let o = hyperhup(&["verify-t", "--grid-n", "16", "--format", "csv"]);
    assert_eq!(code(&o), 1);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("fixture,check,value,tolerance,pass"));
    assert!(text.contains(",false"));
    assert!(text
        .lines()
        .skip(1)
        .all(|l| l.ends_with(",true") || l.ends_with(",false")));
}

#[test]
fn malformed_config_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"grid\": {\"L\": 32,").unwrap();
    assert_eq!(
        code(&hyperhup(&["verify-t", "--config", path_str(&bad)])),
        2
    );
    let unknown = dir.path().join("unknown.json");
    std::fs::write(&unknown, "{\"gird\": {}}").unwrap();
    assert_eq!(
        code(&hyperhup(&["verify-t", "--config", path_str(&unknown)])),
        2
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(
        code(&hyperhup(&["verify-t", "--config", path_str(&missing)])),
        2
    );
}

#[test]
fn tolerance_overrides_are_validated() {
    assert_eq!(
        code(&hyperhup(&["verify-t", "--tol", "involution=1e-17"])),
        2
    );
    assert_eq!(code(&hyperhup(&["verify-t", "--tol", "nonsense=1e-3"])), 2);
    assert_eq!(code(&hyperhup(&["verify-t", "--tol", "involution"])), 2);
    assert_eq!(code(&hyperhup(&["verify-t", "--grid-n", "15"])), 2);
}

#[test]
fn certify_poisson_witness() {
    let o = hyperhup(&[
        "certify",
        "--psi",
        "poisson:1.2:1.2",
        "--cross",
        "0.9:0.9",
        "--window",
        "-30:30",
    ]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["result"]["certificate"]["verdict"], "vanishing_violated");

    let strict = hyperhup(&[
        "certify",
        "--psi",
        "poisson:1.2:1.2",
        "--cross",
        "0.9:0.9",
        "--window",
        "-30:30",
        "--expect-uniqueness",
    ]);
    assert_eq!(code(&strict), 1);

    let native = hyperhup(&[
        "certify",
        "--psi",
        "poisson:1.2:1.2",
        "--cross",
        "1.2:1.2",
        "--window",
        "-25:25",
    ]);
    assert_eq!(code(&native), 3);
    let r = json(&native);
    assert_eq!(r["result"]["certificate"]["vanishing"], true);
    assert_eq!(r["result"]["certificate"]["verdict"], "inconclusive");
}

#[test]
fn certify_zero_and_infeasible() {
    let o = hyperhup(&["certify", "--psi", "zero"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        json(&o)["result"]["certificate"]["verdict"],
        "consistent_uniqueness"
    );
    let o = hyperhup(&["certify", "--psi", "poisson:1:1", "--cross", "1:1"]);
    assert_eq!(code(&o), 4);
    assert!(json(&o)["result"]["error"]
        .as_str()
        .unwrap()
        .contains("infeasible"));
}

#[test]
fn certify_critical_cross_runs_structure_check() {
    let o = hyperhup(&[
        "certify",
        "--psi",
        "odd_gaussian",
        "--cross",
        "1:1",
        "--window",
        "-20:20",
        "--grid-l",
        "32",
        "--grid-n",
        "16384",
    ]);
    let r = json(&o);
    let cert = &r["result"]["certificate"];
    assert_eq!(cert["sup_gap_a"].as_f64().unwrap(), 1.0);
    // t·e^{−πt²} does not vanish on ℤ, so the structure check reports why it was skipped
    assert_eq!(cert["verdict"], "vanishing_violated");
    assert!(r["result"]["critical"].is_null());
}

#[test]
fn construct_guards() {
    let o = hyperhup(&["construct", "--cross", "1:1", "--window", "-48:48"]);
    assert_eq!(code(&o), 4);
    let msg = json(&o)["result"]["error"].as_str().unwrap().to_string();
    assert!(msg.contains("≤ 1"), "{msg}");
    let o = hyperhup(&[
        "construct",
        "--a-points",
        "-3,-2,-2,1,2,3",
        "--b-points",
        "-3,-2,-1,1,2,3",
    ]);
    assert_eq!(code(&o), 2);
    let o = hyperhup(&["construct", "--a-points", "1,2,3"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn construct_one_and_a_half() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("witness.json");
    let o = hyperhup(&["construct", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let s = &r["result"]["summary"];
    assert!(s["contraction_factor"].as_f64().unwrap() <= 0.5);
    assert!(s["residual_a"].as_f64().unwrap() <= 1e-5);
    assert!(s["residual_b"].as_f64().unwrap() <= 1e-5);
    assert_eq!(r["result"]["witness"]["psi"]["n"], 65536);
}

#[test]
fn annulus_csv() {
    let o = hyperhup(&["annulus", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("a,b,d,lambda1,c_computed,c_bound,pass"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3 * 3 * 5);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
    assert_eq!(code(&hyperhup(&["annulus", "--dims", "9"])), 2);
}

#[test]
fn kg_gaussian_second_order() {
    let o = hyperhup(&["kg", "--points", "64", "--extent", "2"]);
    assert_eq!(code(&o), 0);
    let ratio = json(&o)["result"]["ratio"].as_f64().unwrap();
    assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    let csv = hyperhup(&["kg", "--points", "32", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("x,y,re,im\n"));
    assert_eq!(text.lines().count(), 1 + 64 * 64);
}

#[test]
fn onesided_zero_is_all_zero() {
    let o = hyperhup(&["onesided", "--psi", "zero", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,re,im,abs"));
    for l in lines {
        let cells: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cells[2..].iter().all(|&v| v == 0.0), "{l}");
    }
}

#[test]
fn onesided_mean_zero_passes() {
    let o = hyperhup(&["onesided"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert!(
        r["result"]["probe"]["invariance_residual"]
            .as_f64()
            .unwrap()
            <= 1e-4
    );
}

#[test]
fn saved_report_reproduces_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let o = hyperhup(&[
        "kg",
        "--points",
        "32",
        "--seed",
        "7",
        "--out",
        path_str(&first),
    ]);
    assert_eq!(code(&o), 0);
    let o = hyperhup(&["kg", "--config", path_str(&first)]);
    let a: Value = serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();
    let b = json(&o);
    assert_eq!(a["config"], b["config"]);
    assert_eq!(a["result"], b["result"]);
    assert_eq!(b["config"]["seed"], 7);
    // flags beat the file
    let o = hyperhup(&["kg", "--config", path_str(&first), "--seed", "9"]);
    assert_eq!(json(&o)["config"]["seed"], 9);
    assert_eq!(json(&o)["config"]["kg"]["points"], 32);
}

#[test]
fn floats_have_seventeen_digits() {
    let o = hyperhup(&["annulus", "--radii", "1", "--ratios", "2", "--dims", "2"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let start = text.find("\"c_bound\":").unwrap() + "\"c_bound\":".len();
    let num: String = text[start..]
        .chars()
        .take_while(|c| !matches!(c, ',' | '}'))
        .collect();
    let mantissa = num.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{num}");
}

#[test]
fn cross_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("cross.json");
    let a: Vec<f64> = (-30..=30).map(|n| 0.9 * n as f64).collect();
    std::fs::write(&f, serde_json::json!({"A": a, "B": a}).to_string()).unwrap();
    let o = hyperhup(&[
        "certify",
        "--psi",
        "poisson:1.2:1.2",
        "--cross-file",
        path_str(&f),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        json(&o)["result"]["certificate"]["verdict"],
        "vanishing_violated"
    );
}
