use std::process::Command;

use abelkit::parse::parse_value;
use abelkit::symbol::{x, y};
use abelkit::tower::diff;
use serde_json::Value;

fn abelkit(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_abelkit")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let (code, out, err) = abelkit(&all);
    (code, serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}{err}")))
}

#[test]
fn fit_all_verifies_fourteen() {
    let (code, out, _) = abelkit(&["fit", "--all"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.trim_end().ends_with("14/14 identities verified"));
    let ids: Vec<&str> = out.lines().take(14).map(|l| l.split_whitespace().next().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
}

#[test]
fn fit_single_entry() {
    let (code, v) = json(&["fit", "kamke-151"]);
    assert_eq!(code, 0);
    assert_eq!(v["entries"][0]["identity"], true);
    assert_eq!(v["entries"][0]["class"], "AIL");
    assert_eq!(abelkit(&["fit", "nope"]).0, 2);
    assert_eq!(abelkit(&["fit"]).0, 2);
}

#[test]
fn invert_is_an_involution() {
    let src = "y' = (1-2*x*y+y^2-2*y^3*x)/(x^2+1)";
    let (c1, once, _) = abelkit(&["invert", src]);
    let (c2, twice, _) = abelkit(&["invert", once.trim()]);
    assert_eq!((c1, c2), (0, 0));
    let (_, canon, _) = abelkit(&["parse", src]);
    assert_eq!(twice, canon);
}

#[test]
fn solve_ail_inverse_linear() {
    let (code, v) = json(&["solve-ail", "--set", "s1=0,s0=1,r1=1,r0=0,a3=0,a2=0,a1=0,a0=1"]);
    assert_eq!(code, 0);
    assert_eq!(v["verified"], true);
    let psi = parse_value(v["first_integral"].as_str().unwrap()).unwrap();
    let gap = &psi - &parse_value("(x+y-1)*exp(y)").unwrap();
    assert!(diff(&gap, x()).is_zero() && diff(&gap, y()).is_zero(), "{psi}");
}

#[test]
fn json_round_trips_through_parse() {
    for args in [
        vec!["construct", "AIL8", "--set", "s1=1,r0=2,a3=1/2"],
        vec!["invert", "y' = x*y^3 + 1"],
        vec!["transform", "y' = y^2 + x", "--spec", r#"{"kind":"point","F":"2*t","P":"1","Q":"t"}"#],
        vec!["parse", "y' = (y^3 + x)/(x*y - 1)"],
    ] {
        let (code, v) = json(&args);
        assert_eq!(code, 0, "{args:?}");
        let eq = v["equation"].as_str().unwrap();
        let (_, again) = json(&["parse", eq]);
        assert_eq!(again["equation"], v["equation"], "{args:?}");
        assert_eq!(again["slots"], v["slots"], "{args:?}");
    }
    let (_, v) = json(&["parse", "exp(log(x)/2)*sqrt(x)"]);
    assert_eq!(v["canonical"], "x");
}

#[test]
fn shape_and_split() {
    let (code, v) = json(&["form", "y' = -(y^3 + 1)/((x+1)*y + 2*x)"]);
    assert_eq!(code, 0);
    let tags: Vec<&str> = v["tags"].as_array().unwrap().iter().map(|t| t.as_str().unwrap()).collect();
    assert!(tags.contains(&"AIL-form"), "{tags:?}");
    let (code, v) = json(&["split", "--set", "s1=1,s0=0,r1=0,r0=1,a3=0,a2=0,a1=0,a0=-1"]);
    assert_eq!(code, 0);
    assert_eq!(v["normal_form"], "AIL_2");
    let (code, _) = json(&["split", "--strict", "--set", "s1=1,s0=0,r1=0,r0=1,a3=0,a2=0,a1=0,a0=2"]);
    assert_eq!(code, 2);
    let (code, v) = json(&["split", "--set", "s1=1,s0=2,r1=2,r0=4,a3=1,a2=1,a1=1,a0=1"]);
    assert_eq!(code, 0);
    assert_eq!(v["normal_form"], "constant-invariant");
}

#[test]
fn reduce_moves_roots() {
    let (code, v) = json(&["reduce", "y' = (y^3 - y)/(x*y + 1)"]);
    assert_eq!(code, 0);
    assert_eq!(v["pattern"], "Distinct");
    let (code, _) = json(&["reduce", "y' = (y^3 - 2)/(x*y + 1)"]);
    assert_eq!(code, 2);
    let (code, v) = json(&["reduce", "y' = (y-a)*(y-b)^2/(x*y + 1)", "--roots", "b,b,a"]);
    assert_eq!(code, 0);
    assert_eq!(v["pattern"], "DoubleSimple");
}

#[test]
fn verify_and_numeric_exit_codes() {
    let ode = "y' = -1/(y+x)";
    assert_eq!(abelkit(&["verify", ode, "--psi", "(x+y-1)*exp(y)"]).0, 0);
    assert_eq!(abelkit(&["verify", ode, "--psi", "x*exp(y)"]).0, 1);
    assert_eq!(abelkit(&["verify", ode, "--psi", "x*"]).0, 2);
    let (code, v) = json(&["numeric-check", ode, "--psi", "(x+y-1)*exp(y)", "--from", "1,1", "--to", "2"]);
    assert_eq!(code, 0);
    assert!(v["max_drift"].as_f64().unwrap() < 1e-8);
    let (code, v) = json(&["numeric-check", ode, "--psi", "x*exp(y)", "--from", "1,1", "--to", "2"]);
    assert_eq!(code, 1);
    assert!(v["max_drift"].as_f64().unwrap() > 1e-3);
    assert_eq!(abelkit(&["numeric-check", ode, "--psi", "x", "--from", "1,-1", "--to", "2"]).0, 3);
    assert_eq!(abelkit(&["numeric-check", "y' = y^2", "--psi", "x + 1/y", "--from", "0,1", "--to", "2"]).0, 3);
}

#[test]
fn csv_export() {
    let path = std::env::temp_dir().join(format!("abelkit-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let (code, _, _) =
        abelkit(&["numeric-check", "y' = -1/(y+x)", "--psi", "(x+y-1)*exp(y)", "--from", "1,1", "--to", "2", "--csv", p]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,psi"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert!(rows.len() > 2);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    assert!(rows.iter().all(|r| (r[2] - std::f64::consts::E).abs() < 1e-8));
}

#[test]
fn catalog_path_override() {
    let dir = std::env::temp_dir().join(format!("abelkit-cat-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("catalog.json");
    let full: Value = serde_json::from_str(abelkit::catalog::EMBEDDED).unwrap();
    let mut small = full.clone();
    small.as_array_mut().unwrap().retain(|e| e["id"] == "A");
    std::fs::write(&file, serde_json::to_string(&small).unwrap()).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_abelkit"))
        .args(["fit", "--all"])
        .env("ABELKIT_CATALOG", &file)
        .output()
        .unwrap();
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("1/1 identities verified"));
}
