//! Command-line behavior: exit codes, CSV layout and input validation.

use nambu_shadow::cli::{run_cli, CSV_HEADER};

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli(std::iter::once("nambu-shadow").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn run_writes_header_and_rows() {
    let (code, out, _) = call(&["run", "--steps", "10", "--stride", "5"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 1 + 3);
    for l in &lines[1..] {
        assert_eq!(l.split(',').count(), 14);
    }
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(&first[..4], &[0.0, 1.0, 1.0, 1.0]);
}

#[test]
fn zero_steps_gives_one_row() {
    let (code, out, _) = call(&["run", "--steps", "0"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 2);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.csv"), dir.path().join("b.csv")];
    for p in &paths {
        let (code, _, _) = call(&["run", "--steps", "500", "--scheme", "21312", "--out", p.to_str().unwrap()]);
        assert_eq!(code, 0);
    }
    assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
}

#[test]
fn conserving_scheme_keeps_h_constant() {
    let (_, out, _) = call(&["run", "--scheme", "12321", "--steps", "2000", "--stride", "10"]);
    let h: Vec<f64> = out.lines().skip(1).map(|l| l.split(',').nth(4).unwrap().parse().unwrap()).collect();
    assert!(h.iter().all(|v| (v - h[0]).abs() <= 1e-9));
}

#[test]
fn invalid_input_creates_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let p = path.to_str().unwrap();
    for args in [
        vec!["run", "--scheme", "99999", "--out", p],
        vec!["run", "--scheme", "TVT", "--out", p],
        vec!["run", "--h", "0", "--out", p],
        vec!["run", "--h", "2.5", "--out", p],
        vec!["run", "--m", "-1", "--out", p],
        vec!["run", "--stride", "0", "--out", p],
        vec!["run", "--x0", "1,2", "--out", p],
        vec!["run", "--alpha", "nan", "--out", p],
    ] {
        let (code, _, err) = call(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty());
        assert!(!path.exists(), "{args:?}");
    }
}

#[test]
fn unwritable_output_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let (code, _, err) = call(&["run", "--steps", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("out.csv"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(call(&[]).0, 2);
    assert_eq!(call(&["frobnicate"]).0, 2);
    assert_eq!(call(&["derive", "--scheme", "1232"]).0, 2);
    assert_eq!(call(&["verify", "--level", "slow"]).0, 2);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn derive_reports_shadow_pairs() {
    let (code, out, _) = call(&["derive", "--scheme", "12321"]);
    assert_eq!(code, 0);
    assert!(out.contains("dG = 1/4*x2^2"));
    assert!(out.contains("homogeneous dimension: 5"));
    assert!(out.contains("consistent=true"));
    let (code, out, _) = call(&["derive", "--scheme", "TVT"]);
    assert_eq!(code, 0);
    assert!(out.contains("H_S = H + h^2*(1/12*x1^2 - 1/24*x2^2)"));
}

#[test]
fn derive_accepts_rational_parameters() {
    let (code, out, _) = call(&["derive", "--scheme", "32123", "--m", "1/2", "--omega", "5", "--alpha", "0.5"]);
    assert_eq!(code, 0);
    assert!(out.contains("m = 1/2, omega = 5"));
}

#[test]
fn table_lists_registry() {
    let (code, out, _) = call(&["table", "--steps", "1000"]);
    assert_eq!(code, 0);
    assert!(out.contains("H - w^2/(4*m)*h^2*x2^2"));
    assert!(out.contains("G - 1/(4*m^2)*h^2*x2^2"));
    assert_eq!(out.lines().count(), 8);
}

#[test]
fn verify_quick_passes() {
    let (code, out, _) = call(&["verify"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("0 failed"));
}
