//! Algebraic curves carrying reversible star-like limit cycles.

use std::collections::HashMap;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::decompose::{at_g_zero, one_minus_u2, polar_parts, var, DecomposeError};
use crate::polyring::{MultiPoly, Rational};
use crate::sysio::{poly_json, PlanarSystem, Record};
use crate::systems::invariant_cofactor;

#[derive(Debug, Error, PartialEq)]
pub enum ReversibleError {
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error("the curve polynomial is zero")]
    ZeroInput,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicCurveResult {
    /// Primitive part of `n0 d0 - (1-u^2) n1 d1` at `g = 0`.
    pub h_fu: MultiPoly,
    /// Content removed from `h_fu`.
    pub stripped: MultiPoly,
    pub continuum: bool,
    pub curve_xy: Option<MultiPoly>,
    /// Curve (or supplied factor) that passed the invariance test.
    pub invariant: Option<MultiPoly>,
    pub cofactor: Option<MultiPoly>,
    pub sign_note: Option<&'static str>,
}

#[allow(non_snake_case)]
pub fn reversible_H(sys: &PlanarSystem) -> Result<AlgebraicCurveResult, ReversibleError> {
    let pd = polar_parts(sys)?;
    let (n0, n1, d0, d1) = (at_g_zero(&pd.n0), at_g_zero(&pd.n1), at_g_zero(&pd.d0), at_g_zero(&pd.d1));
    let h = &(&n0 * &d0) - &(&(&one_minus_u2() * &n1) * &d1);
    if h.is_zero() {
        return Ok(AlgebraicCurveResult {
            h_fu: h,
            stripped: MultiPoly::one(),
            continuum: true,
            curve_xy: None,
            invariant: None,
            cofactor: None,
            sign_note: None,
        });
    }
    let (h_fu, stripped) = h.strip_content().expect("nonzero");
    Ok(AlgebraicCurveResult {
        h_fu,
        stripped,
        continuum: false,
        curve_xy: None,
        invariant: None,
        cofactor: None,
        sign_note: None,
    })
}

/// Numerator of `h(r, y/r)` split as `r G(r^2, y) + K(r^2, y)`; returns the
/// primitive part of `r^2 G^2 - K^2` in `x, y`, or `G`, `K` alone when the
/// other vanishes.
pub fn curve_to_cartesian(h: &MultiPoly) -> Result<MultiPoly, ReversibleError> {
    if h.is_zero() {
        return Err(ReversibleError::ZeroInput);
    }
    let vars: Vec<&str> = h.vars().iter().map(String::as_str).collect();
    let fi = vars.iter().position(|v| *v == "f");
    let ui = vars.iter().position(|v| *v == "u");
    let du = h.degree_in("u") as i64;
    let rest: Vec<usize> = (0..vars.len()).filter(|&i| Some(i) != fi && Some(i) != ui).collect();
    let mut out_vars = vec!["r", "y"];
    out_vars.extend(rest.iter().map(|&i| vars[i]));

    let mut terms: Vec<(Vec<u32>, Rational)> = Vec::new();
    for (e, c) in h.terms() {
        let ef = fi.map_or(0, |i| e[i]) as i64;
        let eu = ui.map_or(0, |i| e[i]) as i64;
        let mut ne = vec![(ef - eu + du) as u32, eu as u32];
        ne.extend(rest.iter().map(|&i| e[i]));
        terms.push((ne, c.clone()));
    }
    // drop the power of r common to all terms
    let rmin = terms.iter().map(|(e, _)| e[0]).min().unwrap_or(0);
    let (mut even, mut odd) = (Vec::new(), Vec::new());
    for (mut e, c) in terms {
        e[0] -= rmin;
        if e[0] % 2 == 0 {
            e[0] /= 2;
            even.push((e, c));
        } else {
            e[0] = (e[0] - 1) / 2;
            odd.push((e, c));
        }
    }
    // `s` stands for r^2
    let mut s_vars = out_vars.clone();
    s_vars[0] = "s";
    let k = MultiPoly::from_terms(&s_vars, even);
    let g = MultiPoly::from_terms(&s_vars, odd);
    let curve_s = if g.is_zero() {
        k
    } else if k.is_zero() {
        g
    } else {
        &(&var("s") * &g.pow(2)) - &k.pow(2)
    };
    let bind = HashMap::from([("s".to_string(), &var("x").pow(2) + &var("y").pow(2))]);
    let curve = curve_s.subst(&bind);
    Ok(curve.strip_content().expect("nonzero curve").0)
}

/// `"<=0"` or `">=0"` when `k` is a constant times a monomial with even
/// exponents, `"=0"` when it vanishes.
pub fn cofactor_sign(k: &MultiPoly) -> Option<&'static str> {
    if k.is_zero() {
        return Some("=0");
    }
    if k.len() != 1 {
        return None;
    }
    let (e, c) = k.terms().next().expect("one term");
    if e.iter().any(|x| x % 2 == 1) {
        return None;
    }
    Some(if c.is_negative() { "<=0" } else { ">=0" })
}

pub fn reversible_pipeline(sys: &PlanarSystem) -> Result<AlgebraicCurveResult, ReversibleError> {
    reversible_pipeline_with(sys, &[])
}

/// As [`reversible_pipeline`], also trying `factors` of the curve for
/// invariance when the whole curve is not invariant.
pub fn reversible_pipeline_with(
    sys: &PlanarSystem,
    factors: &[MultiPoly],
) -> Result<AlgebraicCurveResult, ReversibleError> {
    let mut res = reversible_H(sys)?;
    if res.continuum {
        return Ok(res);
    }
    let curve = curve_to_cartesian(&res.h_fu)?;
    let candidates = std::iter::once(&curve).chain(factors.iter().filter(|f| !f.is_constant()));
    for c in candidates {
        if let Ok(Some(k)) = invariant_cofactor(sys, c) {
            res.sign_note = cofactor_sign(&k);
            res.cofactor = Some(k);
            res.invariant = Some(c.clone());
            break;
        }
    }
    res.curve_xy = Some(curve);
    Ok(res)
}

fn is_positive_constant(p: &MultiPoly) -> bool {
    p.as_constant().is_some_and(|c| c > Rational::zero())
}

impl AlgebraicCurveResult {
    /// True when `p` equals the Cartesian curve up to a positive constant.
    pub fn curve_matches(&self, p: &MultiPoly) -> bool {
        let Some(c) = &self.curve_xy else { return false };
        match c.exact_div(p) {
            Ok(Some(q)) => is_positive_constant(&q),
            _ => false,
        }
    }
}

impl Record for AlgebraicCurveResult {
    fn kind(&self) -> &'static str {
        "reversible curve"
    }
    fn to_json(&self) -> Value {
        let opt = |p: &Option<MultiPoly>| p.as_ref().map(poly_json);
        let disp = |p: &Option<MultiPoly>| p.as_ref().map(|p| p.to_string());
        json!({
            "kind": "reversible",
            "continuum": self.continuum,
            "h_fu": poly_json(&self.h_fu),
            "stripped": self.stripped.to_string(),
            "curve_xy": opt(&self.curve_xy),
            "invariant": opt(&self.invariant),
            "cofactor": opt(&self.cofactor),
            "cofactor_sign": self.sign_note,
            "display": {
                "h_fu": self.h_fu.to_string(),
                "curve_xy": disp(&self.curve_xy),
                "cofactor": disp(&self.cofactor),
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysio::{parse_poly_in, parse_system};

    fn fu(s: &str) -> MultiPoly {
        parse_poly_in(s, &["f", "u", "b2"]).unwrap()
    }
    fn xy(s: &str) -> MultiPoly {
        parse_poly_in(s, &["x", "y", "b2"]).unwrap()
    }

    #[test]
    fn cartesian_forms() {
        assert_eq!(curve_to_cartesian(&fu("f-1")).unwrap(), xy("x^2+y^2-1"));
        assert_eq!(
            curve_to_cartesian(&fu("(1-u^2)^2*f^4+2*f^2*u^2-1")).unwrap(),
            xy("x^4+2*y^2-1")
        );
        assert_eq!(
            curve_to_cartesian(&fu("2*(1-u^2)^2*f^4+4*(2*u^2-1)*f^2+b2")).unwrap(),
            xy("2*x^4+4*y^2-4*x^2+b2")
        );
        assert_eq!(curve_to_cartesian(&MultiPoly::zero()), Err(ReversibleError::ZeroInput));
    }

    #[test]
    fn reversible_center_is_a_continuum() {
        let r = reversible_pipeline(&parse_system("dx = y - x^2*y\ndy = -x - x*y^2").unwrap()).unwrap();
        assert!(r.continuum);
        assert!(r.curve_xy.is_none());
    }

    #[test]
    fn cla_curve_and_cofactor() {
        let r = reversible_pipeline(&parse_system("dx = -y*(1+x*y)\ndy = y + x^3 - 2*y^3").unwrap()).unwrap();
        assert!(r.curve_matches(&xy("x^4+2*y^2-1")), "{:?}", r.curve_xy);
        assert_eq!(r.cofactor, Some(xy("-4*y^2")));
        assert_eq!(r.sign_note, Some("<=0"));
    }
}
