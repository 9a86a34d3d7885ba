use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use starlike::sysio::{parse_poly_in, poly_from_json};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_starlike"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn fgu(s: &str) -> starlike::polyring::MultiPoly {
    parse_poly_in(s, &["f", "g", "u"]).unwrap()
}

#[test]
fn threed_reproduces_the_rigid_cubic_field() {
    let v = json_ok(&["threed", "--system", &fixture("ex1.txt")]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["kind"], "sys3d");
    let df = fgu("(1-u^2)*(2*u*f^3 - g - (1-u^2)*(2*u^2-3)*g^3 + 6*u*(1-u^2)*f*g^2 - 3*(2*u^2-3)*f^2*g)");
    let dg = fgu("-f - (2*u^2-3)*f^3 + u*g + (1-u^2)*(2*u*(1-u^2)*g^2 - 3*(2*u^2-3)*f*g + 6*u*f^2)*g");
    assert_eq!(poly_from_json(&v["df"]).unwrap(), df);
    assert_eq!(poly_from_json(&v["dg"]).unwrap(), dg);
    assert_eq!(poly_from_json(&v["du"]).unwrap(), fgu("1-u^2"));
}

#[test]
fn threed_orbit_as_csv() {
    let start = format!("{},0,0", 3f64.powf(-0.5));
    let out = run(&["--format", "csv", "threed", "--system", &fixture("ex1.txt"), "--start", &start]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,f,g,u"));
    for line in lines {
        let row: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        let exact = (3.0 - 2.0 * row[3] * row[3]).powf(-0.5);
        assert!((row[1] - exact).abs() < 1e-6, "{line}");
    }
}

#[test]
fn invariant_surface_of_the_center() {
    let v = json_ok(&[
        "invariant",
        "--system",
        &fixture("ex2.txt"),
        "--field",
        "threed",
        "--candidate",
        "2*f*g - 2*u*(f^2 - (1-u^2)*g^2)^2",
    ]);
    assert_eq!(v["invariant"], true);
    assert_eq!(poly_from_json(&v["cofactor"]).unwrap(), fgu("u + 8*(1-u^2)*(1-2*u^2)*f*g"));
}

#[test]
fn common_curve_at_the_solved_parameters() {
    let v = json_ok(&[
        "common",
        "--a",
        &fixture("common_a.txt"),
        "--b",
        &fixture("common_b.txt"),
        "--params",
        "rho=1,lambda=2,sigma=1",
        "--candidate",
        "f^3-u^2+1",
    ]);
    assert_eq!(v["params_report"]["necessary_condition_met"], true);
    assert_eq!(v["curve_report"]["common"], true);
}

#[test]
fn reversible_curve_with_symbolic_parameter() {
    let v = json_ok(&["reversible", "--system", &fixture("cla2.txt")]);
    let xy = |s: &str| parse_poly_in(s, &["x", "y", "b2"]).unwrap();
    let curve = poly_from_json(&v["curve_xy"]).unwrap();
    let ratio = curve.exact_div(&xy("2*x^4+4*y^2-4*x^2+b2")).unwrap().unwrap();
    assert!(ratio.as_constant().is_some_and(|c| c > starlike::polyring::Rational::from_integer(0.into())));
    assert_eq!(poly_from_json(&v["cofactor"]).unwrap(), xy("8*y^2"));
    assert_eq!(v["cofactor_sign"], ">=0");

    let v = json_ok(&["reversible", "--system", &fixture("reversible_center.txt")]);
    assert_eq!(v["continuum"], true);
    assert!(v["curve_xy"].is_null());
}

#[test]
fn bifurcation_value_and_scan() {
    let v = json_ok(&["bifurcate", "eval", "--system", &fixture("perturbed_center_a1.txt"), "--rho", "0.5"]);
    assert_eq!(v["rho"], 0.5);
    let n = v["N"].as_f64().unwrap();
    assert!((n + std::f64::consts::FRAC_PI_4).abs() < 1e-6, "{n}");

    let v = json_ok(&[
        "bifurcate",
        "scan",
        "--system",
        &fixture("reversible_center.txt"),
        "--rho-min",
        "0.1",
        "--rho-max",
        "0.9",
        "--grid-n",
        "5",
    ]);
    assert_eq!(v["identically_zero"], true);
    assert_eq!(v["zeros"].as_array().unwrap().len(), 0);
}

#[test]
fn abelian_ratio_on_the_circle() {
    let v = json_ok(&["bifurcate", "abelian", "--hamiltonian", "x^2+y^2", "--level", "0.25"]);
    assert!(v["ratio"].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn periodic_fit_csv() {
    let out = run(&["--format", "csv", "periodic-fit", "--samples", &fixture("ex1_cycle_samples.csv")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("u,f,g"));
    assert_eq!(text.lines().count(), 65);
    for line in text.lines().skip(1) {
        let row: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        assert!((row[1] - (3.0 - 2.0 * row[0] * row[0]).powf(-0.5)).abs() < 1e-10);
        assert!(row[2].abs() < 1e-10);
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["bogus"],
        vec!["threed", "--system", "no/such/file.txt"],
        vec!["threed", "--system", &fixture("ex1.txt"), "--start", "1,2"],
        vec!["decompose", "--poly", "x^(2"],
        vec!["decompose", "--poly", "x", "--bogus-flag"],
        vec!["--format", "xml", "decompose", "--poly", "x"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn computation_errors_exit_1_with_json() {
    let out = run(&[
        "bifurcate",
        "eval",
        "--system",
        &fixture("perturbed_hamiltonian.txt"),
        "--params",
        "a=1,b=1",
        "--rho",
        "0.6",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["error"]["kind"], "NonStarlike");
    assert!(v["error"]["message"].is_string());

    let out = run(&["bifurcate", "abelian", "--hamiltonian", "x^2+y^2/2-y^3/3", "--level", "0.17"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "OpenLevelSet");
}

#[test]
fn output_is_deterministic() {
    let sys = fixture("perturbed_center.txt");
    let scan = |jobs: &str| {
        let out = run(&[
            "bifurcate",
            "scan",
            "--system",
            &sys,
            "--params",
            "a1=-1/4,a2=0,a3=0,b1=1,b2=0,b3=0",
            "--rho-min",
            "0.1",
            "--rho-max",
            "0.95",
            "--grid-n",
            "12",
            "--jobs",
            jobs,
        ]);
        assert_eq!(out.status.code(), Some(0));
        out.stdout
    };
    let one = scan("1");
    assert_eq!(one, scan("1"));
    assert_eq!(one, scan("4"));
    let v: Value = serde_json::from_slice(&one).unwrap();
    let zeros = v["zeros"].as_array().unwrap();
    assert_eq!(zeros.len(), 1);
    assert!((zeros[0]["rho"].as_f64().unwrap() - 0.75f64.sqrt()).abs() < 1e-5);

    let a = run(&["threed", "--system", &fixture("ex1.txt")]).stdout;
    assert_eq!(a, run(&["threed", "--system", &fixture("ex1.txt")]).stdout);
}
