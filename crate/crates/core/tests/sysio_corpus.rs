mod support;

use std::fs;

use proptest::prelude::*;
use starlike::polyring::MultiPoly;
use starlike::sysio::{emit, parse_poly_in, poly_from_json, Format, ParseError, SystemFile};
use support::{fixture, poly};

const NAMES: &[&str] = &["x", "y", "f", "g", "u", "a", "b2"];

/// Every expression in every fixture file, with the names it may use.
fn fixture_expressions() -> Vec<(String, Vec<String>)> {
    let mut out = Vec::new();
    for entry in fs::read_dir(fixture("")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "txt") {
            continue;
        }
        let file = SystemFile::parse(&fs::read_to_string(&path).unwrap()).unwrap();
        let mut names: Vec<String> = ["x", "y", "f", "u"].map(String::from).to_vec();
        names.extend(file.params.iter().map(|p| p.name.clone()));
        for (_, text, _) in &file.fields {
            out.push((text.clone(), names.clone()));
        }
    }
    out
}

fn json_round_trip(p: &MultiPoly) -> MultiPoly {
    let bytes = emit(p, Format::Json).unwrap();
    poly_from_json(&serde_json::from_slice(&bytes).unwrap()).unwrap()
}

#[test]
fn fixture_expressions_round_trip() {
    let corpus = fixture_expressions();
    assert!(corpus.len() >= 25, "{}", corpus.len());
    for (text, names) in corpus {
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let p = parse_poly_in(&text, &names).unwrap();
        assert_eq!(json_round_trip(&p), p, "{text}");
        assert_eq!(parse_poly_in(&p.to_string(), &names).unwrap(), p, "{text}");
    }
}

proptest! {
    #[test]
    fn random_polynomials_round_trip(p in poly(&["x", "y", "f", "g", "u", "a", "b2"], 6, 10)) {
        prop_assert_eq!(json_round_trip(&p), p.clone());
        prop_assert_eq!(parse_poly_in(&p.to_string(), NAMES).unwrap(), p);
    }
}

/// Inputs that are not polynomials in x, y, with the offset of the fault.
const NEGATIVE: &[(&str, usize)] = &[
    ("x/y", 1),
    ("1/(x+1)", 1),
    ("x^2/x", 3),
    ("(x+y)/(x-y)", 5),
    ("y/(2*x)", 1),
    ("1/x^2", 1),
    ("x/0", 1),
    ("3/(2-2)", 1),
    ("x^-1", 2),
    ("x^y", 2),
    ("x^(1/2)", 2),
    ("x^1.5", 3),
    ("2.5*x", 1),
    ("x^", 2),
    ("x+", 2),
    ("*x", 0),
    ("x**2", 2),
    ("x*+", 3),
    ("(x+y", 4),
    ("x+y)", 3),
    ("()", 1),
    ("", 0),
    ("   ", 3),
    ("x y", 2),
    ("2x", 1),
    ("x(y)", 1),
    ("(x)(y)", 3),
    ("z", 0),
    ("x+z^2", 2),
    ("sin(x)", 0),
    ("exp(y)", 0),
    ("sqrt(x)", 0),
    ("x#y", 1),
    ("x=y", 1),
    ("x,y", 1),
    ("x;", 1),
    ("[x]", 0),
    ("{y}", 0),
    ("x & y", 2),
    ("x % 2", 2),
    ("x!", 1),
    ("$x", 0),
    ("x..y", 1),
    ("x^^2", 2),
    ("((x)", 4),
    ("x^(2", 2),
    ("1e3*x", 1),
    ("x^2.", 3),
    ("y/x*x", 1),
    ("-", 1),
];

#[test]
fn negative_corpus_rejected_with_positions() {
    assert_eq!(NEGATIVE.len(), 50);
    let mut wrong = Vec::new();
    for &(text, pos) in NEGATIVE {
        match parse_poly_in(text, &["x", "y"]) {
            Ok(p) => wrong.push(format!("{text:?} accepted as {p}")),
            Err(e) => {
                if e.position() != pos {
                    wrong.push(format!("{text:?}: {e} (expected offset {pos})"));
                }
                if matches!(e, ParseError::NonPolynomial { .. }) {
                    assert!(text.contains('/'));
                }
            }
        }
    }
    assert!(wrong.is_empty(), "{}", wrong.join("\n"));
}
