#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use proptest::prelude::*;
use starlike::polyring::{MultiPoly, Rational};
use starlike::sysio::{read_system_file, PlanarSystem};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Random polynomial over `vars` with total degree at most `deg`.
pub fn poly(vars: &'static [&'static str], deg: u32, terms: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(
        (prop::collection::vec(0..=deg, vars.len()), -9i64..=9, 1i64..=4),
        0..=terms,
    )
    .prop_map(move |ts| {
        MultiPoly::from_terms(
            vars,
            ts.into_iter()
                .filter(|(e, _, _)| e.iter().sum::<u32>() <= deg)
                .map(|(e, n, d)| (e, q(n, d)))
                .collect::<Vec<_>>(),
        )
    })
}

pub fn nonzero_poly(vars: &'static [&'static str], deg: u32, terms: usize) -> impl Strategy<Value = MultiPoly> {
    poly(vars, deg, terms).prop_filter("nonzero", |p| !p.is_zero())
}

pub fn var(n: &str) -> MultiPoly {
    MultiPoly::var(n)
}

pub fn bind(pairs: &[(&str, MultiPoly)]) -> HashMap<String, MultiPoly> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn planar(name: &str) -> PlanarSystem {
    read_system_file(&fixture(name)).unwrap().planar().unwrap()
}
