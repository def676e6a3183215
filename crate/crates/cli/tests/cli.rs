use std::path::PathBuf;
use std::process::{Command, Output};

use tticad::cad::{build, Sequential};
use tticad::projection::Projector;
use tticad::qff::{family, Scheme};
use tticad_cli::report::RunReport;
use tticad_cli::{apply_order, parse_problem, Rayon};

fn fixture(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    root.to_string_lossy().into_owned()
}

fn tticad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tticad")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (RunReport, i32) {
    let mut a = args.to_vec();
    a.push("--json");
    let out = tticad(&a);
    let r: RunReport = serde_json::from_slice(&out.stdout).expect("valid report");
    (r, out.status.code().unwrap())
}

#[test]
fn phi_counts() {
    let phi = fixture("phi.qff");
    let (tti, code) = json(&["build", &phi, "--scheme", "tti"]);
    assert_eq!(code, 0);
    assert_eq!(tti.levels, vec![25, 105]);
    assert!(tti.fail.is_none());
    let (sign, _) = json(&["build", &phi, "--scheme", "sign"]);
    assert_eq!(sign.leaves, 317);
    let (res, _) = json(&["build", &phi, "--scheme", "rescad"]);
    assert_eq!(res.leaves, 105);
    assert_eq!(res.truth_buckets, tti.truth_buckets);
    assert_eq!(tti.truth_buckets.values().sum::<usize>(), 105);
}

#[test]
fn order_flag_and_directive() {
    let phi = fixture("phi.qff");
    let (r, _) = json(&["build", &phi, "--order", "y,x"]);
    assert_eq!(r.order, vec!["y", "x"]);
    assert_eq!(r.leaves, 153);
    let src = std::fs::read_to_string(&phi).unwrap();
    let p = parse_problem(&format!("@scheme sign\n@order y, x\n{}", src)).unwrap();
    assert_eq!(p.scheme, Some(Scheme::Sign));
    assert_eq!(p.order.as_deref(), Some(&["y".to_string(), "x".to_string()][..]));
    assert!(apply_order(&p.qff, &["x".into()]).is_err());
    assert!(apply_order(&p.qff, &["x".into(), "x".into()]).is_err());
    assert!(apply_order(&p.qff, &["x".into(), "q".into()]).is_err());
    // directives are blanked, so parse errors keep their line numbers
    let e = parse_problem("@scheme tti\nvars x;\nx +* 1 = 0;\n").unwrap_err();
    assert!(e.starts_with("line 3"), "{}", e);
    assert!(parse_problem("@frobnicate\nvars x;\nx = 0;\n").is_err());
}

#[test]
fn failure_exit_code_and_witness() {
    let (r, code) = json(&["build", &fixture("tti_fail.qff")]);
    assert_eq!(code, 2);
    let f = r.fail.expect("witness");
    assert_eq!(f.kind, "TtiNotWellOriented");
    assert_eq!(f.level, 3);
    assert_eq!(f.poly, "w*y + z");
    let out = tticad(&["build", &fixture("tti_fail.qff")]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(tticad(&["build", "/nonexistent.qff"]).status.code(), Some(1));
    assert_eq!(tticad(&["build", &fixture("phi.qff"), "--scheme", "nope"]).status.code(), Some(1));
    assert_eq!(tticad(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(tticad(&["bounds", "--scheme", "tti", "-n", "3", "-m", "2", "-d", "2", "-t", "3"]).status.code(), Some(1));
    assert_eq!(tticad(&["heuristics", &fixture("spheres.qff"), "--cap", "2"]).status.code(), Some(1));
    assert_eq!(tticad(&["--help"]).status.code(), Some(0));
    assert_eq!(tticad(&["--version"]).status.code(), Some(0));
}

#[test]
fn bounds_command() {
    let out = tticad(&["bounds", "--scheme", "sign", "-n", "3", "-m", "4", "-d", "2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["M"], 12);
    assert_eq!(v["table"].as_array().unwrap().len(), 4);
    let out = tticad(&[
        "bounds", "--scheme", "tti", "-n", "3", "-m", "4", "-d", "2", "-t", "2", "--compare", "tti,ec-implicit", "--json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["compare"]["difference"], 2);
    assert_eq!(v["M"], 7);
    let out = tticad(&["bounds", "--scheme", "tti-general", "-n", "2", "-m", "5", "-d", "2", "-t", "3", "-e", "2", "--me", "3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn family_counts() {
    let (r, _) = json(&["family", "4", "--scheme", "tti"]);
    assert_eq!(r.leaves, 209);
    let (r, _) = json(&["family", "4", "--scheme", "sign"]);
    assert_eq!(r.leaves, 1241);
    let (r, _) = json(&["family", "6", "--psi"]);
    assert_eq!(r.leaves, 487);
}

#[test]
fn heuristics_command() {
    let out = tticad(&["heuristics", &fixture("phi.qff"), "--build", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let cs = v["candidates"].as_array().unwrap();
    assert_eq!(cs.len(), 2);
    assert_eq!(cs[0]["cells"], 105);
    assert_eq!(cs[1]["cells"], 153);
    assert_eq!(cs[0]["ndrr"], 12);
    assert_eq!(v["pick_cells"], 0);
}

#[test]
fn json_round_trip_and_determinism() {
    let a = tticad(&["build", &fixture("exclp.qff"), "--json", "--cells"]);
    let b = tticad(&["build", &fixture("exclp.qff"), "--json", "--cells", "--threads", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r: RunReport = serde_json::from_slice(&a.stdout).unwrap();
    let again = serde_json::to_string(&r).unwrap();
    assert_eq!(serde_json::from_str::<RunReport>(&again).unwrap(), r);
    assert_eq!(r.cells.as_ref().unwrap().len(), r.leaves);
}

#[test]
fn rayon_matches_sequential() {
    let pool = Rayon::new(4).unwrap();
    for q in [family(3, false), family(3, true)] {
        for scheme in [Scheme::Sign, Scheme::Tti, Scheme::ResCad] {
            let pr = Projector::default();
            let mut a = build(&q, scheme, &pr, &Sequential).unwrap();
            let mut b = build(&q, scheme, &pr, &pool).unwrap();
            a.evaluate(&q, &Sequential);
            b.evaluate(&q, &pool);
            assert_eq!(RunReport::from_cad(&a, true), RunReport::from_cad(&b, true));
        }
    }
    let q = apply_order(&family(2, false), &["y".into(), "x".into()]).unwrap();
    let c = build(&q, Scheme::Tti, &Projector::default(), &pool).unwrap();
    assert_eq!(c.vars, vec!["y", "x"]);
}
