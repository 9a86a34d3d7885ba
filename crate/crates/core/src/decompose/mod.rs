//! Polar splitting `H = H0 + v*H1` under `x = (f+vg)v`, `y = (f+vg)u`, the
//! polar numerator/denominator data of a planar system, and the numeric
//! `f + g*cos` fit of sampled periodic functions.

mod periodic;

pub use periodic::{periodic_fit, PeriodicFit};

use std::collections::HashMap;

use thiserror::Error;

use crate::polyring::{v_split, MultiPoly};
use crate::sysio::PlanarSystem;

#[derive(Debug, Error, PartialEq)]
pub enum DecomposeError {
    #[error("the origin is not an equilibrium: X(0,0) or Y(0,0) is nonzero")]
    OriginNotFixed,
    #[error("need at least {need} samples, got {got}")]
    InsufficientSamples { need: usize, got: usize },
    #[error("samples must be a uniform grid on [0, 2pi) starting at 0")]
    NonUniformGrid,
}

/// Parts of a polynomial in the polar variables.
#[derive(Clone, Debug, PartialEq)]
pub struct VParts {
    pub h0: MultiPoly,
    pub h1: MultiPoly,
    pub even_refinement: Option<EvenParts>,
}

/// Refinement for `H = K(x^2, y)`: `h0 = k00 + (1-u^2) g^2 k01`, `h1 = g k10`.
#[derive(Clone, Debug, PartialEq)]
pub struct EvenParts {
    pub k00: MultiPoly,
    pub k01: MultiPoly,
    pub k10: MultiPoly,
}

/// `N = (f+vg)(vX+uY)` and `D = vY-uX` after substitution, split in `v`.
/// `R = vX+uY` is kept as well since the curve pipeline works with it.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarData {
    pub n0: MultiPoly,
    pub n1: MultiPoly,
    pub d0: MultiPoly,
    pub d1: MultiPoly,
    pub r0: MultiPoly,
    pub r1: MultiPoly,
}

pub(crate) fn var(n: &str) -> MultiPoly {
    MultiPoly::var(n)
}

/// `1 - u^2`.
pub fn one_minus_u2() -> MultiPoly {
    &MultiPoly::one() - &var("u").pow(2)
}

/// Bindings `x -> (f+vg)v`, `y -> (f+vg)u`.
pub fn polar_bindings() -> HashMap<String, MultiPoly> {
    let r = &var("f") + &(&var("v") * &var("g"));
    let mut b = HashMap::new();
    b.insert("x".to_string(), &r * &var("v"));
    b.insert("y".to_string(), &r * &var("u"));
    b
}

/// Polar substitution followed by `v`-reduction.
pub fn polar_split(h: &MultiPoly) -> (MultiPoly, MultiPoly) {
    v_split(&h.subst(&polar_bindings()))
}

pub fn decompose_xy(h: &MultiPoly) -> VParts {
    let (h0, h1) = polar_split(h);
    let even_refinement = if h.is_even_in("x") {
        even_parts(h, &h0, &h1)
    } else {
        None
    };
    VParts {
        h0,
        h1,
        even_refinement,
    }
}

/// `K((1-u^2) f^2, u f)` for `H(x, y) = K(x^2, y)`.
pub fn even_at_g_zero(h: &MultiPoly) -> MultiPoly {
    let halved = halve_x(h);
    let mut b = HashMap::new();
    b.insert("x".to_string(), &one_minus_u2() * &var("f").pow(2));
    b.insert("y".to_string(), &var("u") * &var("f"));
    halved.subst(&b)
}

/// Rewrites `x^(2k)` as `x^k`; the caller guarantees even exponents.
fn halve_x(h: &MultiPoly) -> MultiPoly {
    let vars: Vec<&str> = h.vars().iter().map(String::as_str).collect();
    let xi = vars.iter().position(|v| *v == "x");
    let terms = h.terms().map(|(e, c)| {
        let mut e = e.to_vec();
        if let Some(i) = xi {
            e[i] /= 2;
        }
        (e, c.clone())
    });
    MultiPoly::from_terms(&vars, terms.collect::<Vec<_>>())
}

fn even_parts(h: &MultiPoly, h0: &MultiPoly, h1: &MultiPoly) -> Option<EvenParts> {
    let k00 = even_at_g_zero(h);
    let k10 = h1.exact_div(&var("g")).ok()??;
    let w = &one_minus_u2() * &var("g").pow(2);
    let k01 = (h0 - &k00).exact_div(&w).ok()??;
    Some(EvenParts { k00, k01, k10 })
}

fn vanishes_at_origin(p: &MultiPoly) -> bool {
    let mut b = HashMap::new();
    b.insert("x".to_string(), MultiPoly::zero());
    b.insert("y".to_string(), MultiPoly::zero());
    p.subst(&b).is_zero()
}

pub fn polar_parts(sys: &PlanarSystem) -> Result<PolarData, DecomposeError> {
    if !vanishes_at_origin(&sys.x) || !vanishes_at_origin(&sys.y) {
        return Err(DecomposeError::OriginNotFixed);
    }
    let (u, v) = (var("u"), var("v"));
    let radial = &(&v * &sys.x) + &(&u * &sys.y);
    let angular = &(&v * &sys.y) - &(&u * &sys.x);
    let b = polar_bindings();
    let r = &var("f") + &(&v * &var("g"));
    let radial = radial.subst(&b);
    let (r0, r1) = v_split(&radial);
    let (n0, n1) = v_split(&(&r * &radial));
    let (d0, d1) = v_split(&angular.subst(&b));
    Ok(PolarData {
        n0,
        n1,
        d0,
        d1,
        r0,
        r1,
    })
}

/// Sets `g = 0`.
pub fn at_g_zero(p: &MultiPoly) -> MultiPoly {
    let mut b = HashMap::new();
    b.insert("g".to_string(), MultiPoly::zero());
    p.subst(&b)
}
