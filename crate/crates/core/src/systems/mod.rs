//! The implicit `(f', g')` system, the associated polynomial 3D field on
//! `(f, g, u)`, invariant surfaces and numerical heteroclinic orbits.

mod hetero;

pub use hetero::{integrate_from, integrate_heteroclinic, HeteroOptions, Trajectory};

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::decompose::{one_minus_u2, polar_parts, var, DecomposeError, PolarData};
use crate::numerics::OdeError;
use crate::polyring::{MultiPoly, Rational, RationalFunction};
use crate::sysio::{poly_json, PlanarSystem, Record};

#[derive(Debug, Error, PartialEq)]
pub enum SystemsError {
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error("the surface polynomial is zero")]
    ZeroSurface,
    #[error("the angular part vanishes identically; no 3D system exists")]
    DegenerateField,
    #[error("parameter `{0}` must be bound before numerical integration")]
    UnboundParameter(String),
    #[error("state norm exceeded the bound at s = {s}")]
    BlowUp { s: f64 },
    #[error("u stopped advancing before reaching the end plane (s = {s}, u = {u})")]
    Stalled { s: f64, u: f64 },
    #[error("invalid start: {0}")]
    BadStart(String),
    #[error("integration failed: {0}")]
    Integration(OdeError),
}

/// `eq0 = eq1 = 0` in `(f, g, u, fp, gp)` with the solved forms of `fp`, `gp`.
#[derive(Clone, Debug, PartialEq)]
pub struct FGSystem {
    pub eq0: MultiPoly,
    pub eq1: MultiPoly,
    pub fp: RationalFunction,
    pub gp: RationalFunction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sys3D {
    pub df: MultiPoly,
    pub dg: MultiPoly,
    pub du: MultiPoly,
    /// Factors removed from all three raw components, including constants.
    pub cancelled_factors: Vec<MultiPoly>,
}

fn angular_norm(pd: &PolarData) -> MultiPoly {
    &pd.d0.pow(2) - &(&one_minus_u2() * &pd.d1.pow(2))
}

pub fn build_fg(sys: &PlanarSystem) -> Result<FGSystem, SystemsError> {
    let pd = polar_parts(sys)?;
    fg_from_parts(&pd)
}

pub fn fg_from_parts(pd: &PolarData) -> Result<FGSystem, SystemsError> {
    let w = one_minus_u2();
    let (fp, gp, g, u) = (var("fp"), var("gp"), var("g"), var("u"));
    let eq0 = &(&(&(&w * &pd.d1) * &fp) + &(&(&w * &pd.d0) * &gp)) - &(&(&(&u * &pd.d0) * &g) + &pd.n0);
    let eq1 = &(&(&pd.d0 * &fp) + &(&(&w * &pd.d1) * &gp)) - &(&(&(&u * &pd.d1) * &g) + &pd.n1);
    let (df, dg, du) = raw_components(pd);
    let den = angular_norm(pd);
    if den.is_zero() {
        return Err(SystemsError::DegenerateField);
    }
    let fp = RationalFunction::new(df.exact_div(&w).unwrap().expect("(1-u^2) | df"), den)
        .expect("nonzero denominator");
    let gp = RationalFunction::new(dg, du).expect("nonzero denominator");
    Ok(FGSystem { eq0, eq1, fp, gp })
}

/// Uncancelled `(df, dg, du)`.
pub fn raw_components(pd: &PolarData) -> (MultiPoly, MultiPoly, MultiPoly) {
    let w = one_minus_u2();
    let ug = &var("u") * &var("g");
    let df = &w * &(&(&pd.n1 * &pd.d0) - &(&pd.n0 * &pd.d1));
    let dg = &(&pd.d0 * &(&pd.n0 + &(&ug * &pd.d0))) - &(&(&w * &pd.d1) * &(&pd.n1 + &(&ug * &pd.d1)));
    let du = &w * &angular_norm(pd);
    (df, dg, du)
}

pub fn build_3d(sys: &PlanarSystem) -> Result<Sys3D, SystemsError> {
    let pd = polar_parts(sys)?;
    sys3d_from_parts(&pd)
}

const ORIENTATION_SAMPLES: [(i64, i64, i64, i64, i64, i64); 3] =
    [(1, 1, 0, 1, 0, 1), (1, 2, 0, 1, 1, 3), (1, 1, 1, 3, 1, 2)];

pub fn sys3d_from_parts(pd: &PolarData) -> Result<Sys3D, SystemsError> {
    let (df, dg, du) = raw_components(pd);
    if du.is_zero() {
        return Err(SystemsError::DegenerateField);
    }
    let mut comps = [df, dg, du];
    let mut cancelled = Vec::new();
    let w = one_minus_u2();
    let candidates = [var("f"), var("g"), var("u"), w.clone(), angular_norm(pd)];
    loop {
        let mut progressed = false;
        for cand in &candidates {
            if cand.is_constant() {
                continue;
            }
            let Some(q) = divide_all(&comps, cand) else {
                continue;
            };
            // the planes u = +-1 must stay invariant
            if cand == &w && q[2].exact_div(&w).unwrap().is_none() {
                continue;
            }
            comps = q;
            cancelled.push(cand.clone());
            progressed = true;
        }
        let mono = common_monomial(&comps);
        if !mono.is_constant() {
            comps = divide_all(&comps, &mono).expect("common monomial divides");
            cancelled.push(mono);
            progressed = true;
        }
        if !progressed {
            break;
        }
    }
    let content = common_content(&comps);
    if !content.is_one() {
        let c = MultiPoly::constant(content);
        comps = divide_all(&comps, &c).expect("constant divides");
        cancelled.push(c);
    }
    if orientation_negative(&comps[2]) {
        comps = comps.map(|p| -p);
        cancelled.push(MultiPoly::int(-1));
    }
    let [df, dg, du] = comps;
    Ok(Sys3D {
        df,
        dg,
        du,
        cancelled_factors: cancelled,
    })
}

fn divide_all(comps: &[MultiPoly; 3], d: &MultiPoly) -> Option<[MultiPoly; 3]> {
    let q0 = comps[0].exact_div(d).ok()??;
    let q1 = comps[1].exact_div(d).ok()??;
    let q2 = comps[2].exact_div(d).ok()??;
    Some([q0, q1, q2])
}

fn common_monomial(comps: &[MultiPoly; 3]) -> MultiPoly {
    let nonzero: Vec<&MultiPoly> = comps.iter().filter(|p| !p.is_zero()).collect();
    let mut names: Vec<String> = Vec::new();
    for p in &nonzero {
        for v in p.vars() {
            if !names.contains(v) {
                names.push(v.clone());
            }
        }
    }
    let mut out = MultiPoly::one();
    for n in names {
        let e = nonzero
            .iter()
            .map(|p| p.monomial_content().degree_in(&n))
            .min()
            .unwrap_or(0);
        if e > 0 {
            out = &out * &var(&n).pow(e);
        }
    }
    out
}

fn common_content(comps: &[MultiPoly; 3]) -> Rational {
    let mut num = num_bigint::BigInt::zero();
    let mut den = num_bigint::BigInt::one();
    for p in comps.iter().filter(|p| !p.is_zero()) {
        let c = p.rational_content();
        num = num_integer::Integer::gcd(&num, c.numer());
        den = num_integer::Integer::lcm(&den, c.denom());
    }
    if num.is_zero() {
        Rational::one()
    } else {
        Rational::new(num, den)
    }
}

/// Sign of `du / (1-u^2)` at the first sample point where it is a nonzero
/// number; parameters that survive evaluation leave the orientation alone.
fn orientation_negative(du: &MultiPoly) -> bool {
    let Some(q) = du.exact_div(&one_minus_u2()).unwrap() else {
        return false;
    };
    for &(fn_, fd, gn, gd, un, ud) in &ORIENTATION_SAMPLES {
        let mut at = HashMap::new();
        at.insert("f".to_string(), Rational::new(fn_.into(), fd.into()));
        at.insert("g".to_string(), Rational::new(gn.into(), gd.into()));
        at.insert("u".to_string(), Rational::new(un.into(), ud.into()));
        match q.eval_partial(&at).as_constant() {
            Some(c) if c.is_zero() => continue,
            Some(c) => return c.is_negative(),
            None => return false,
        }
    }
    false
}

impl Sys3D {
    /// Product of the cancelled factors.
    pub fn scale_factor(&self) -> MultiPoly {
        self.cancelled_factors
            .iter()
            .fold(MultiPoly::one(), |acc, c| &acc * c)
    }
}

/// A polynomial vector field given by `(variable, component)` pairs.
pub trait VectorField {
    fn components(&self) -> Vec<(&str, &MultiPoly)>;

    /// `Z(H) = sum component * dH/dvar`.
    fn lie_derivative(&self, h: &MultiPoly) -> MultiPoly {
        self.components()
            .into_iter()
            .fold(MultiPoly::zero(), |acc, (v, c)| &acc + &(c * &h.diff(v)))
    }
}

impl VectorField for Sys3D {
    fn components(&self) -> Vec<(&str, &MultiPoly)> {
        vec![("f", &self.df), ("g", &self.dg), ("u", &self.du)]
    }
}

impl VectorField for PlanarSystem {
    fn components(&self) -> Vec<(&str, &MultiPoly)> {
        vec![("x", &self.x), ("y", &self.y)]
    }
}

/// Cofactor `K` with `Z(H) = K H`, or `None` when `H = 0` is not invariant.
pub fn invariant_cofactor(field: &dyn VectorField, h: &MultiPoly) -> Result<Option<MultiPoly>, SystemsError> {
    if h.is_zero() {
        return Err(SystemsError::ZeroSurface);
    }
    let zh = field.lie_derivative(h);
    let Some(k) = zh.exact_div(h).expect("nonzero divisor") else {
        return Ok(None);
    };
    if &zh - &(&k * h) != MultiPoly::zero() {
        return Ok(None);
    }
    Ok(Some(k))
}

/// Invariance of the curve `{H = 0, plane = 0}` where `plane` is one of the
/// field's variables.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveInvariance {
    /// `Z(H) = cofactor * H` on the plane.
    pub cofactor: MultiPoly,
    /// `Z(plane) = transversal * H` on the plane.
    pub transversal: MultiPoly,
}

pub fn invariant_on_plane(
    field: &dyn VectorField,
    h: &MultiPoly,
    plane: &str,
) -> Result<Option<CurveInvariance>, SystemsError> {
    let mut at = HashMap::new();
    at.insert(plane.to_string(), MultiPoly::zero());
    let h0 = h.subst(&at);
    if h0.is_zero() {
        return Err(SystemsError::ZeroSurface);
    }
    let on_plane = |p: &MultiPoly| p.subst(&at);
    let zh = on_plane(&field.lie_derivative(h));
    let zp = field
        .components()
        .into_iter()
        .find(|(v, _)| *v == plane)
        .map(|(_, c)| on_plane(c))
        .unwrap_or_else(MultiPoly::zero);
    let div = |p: &MultiPoly| -> Option<MultiPoly> {
        let q = p.exact_div(&h0).expect("nonzero divisor")?;
        (&(&q * &h0) - p).is_zero().then_some(q)
    };
    match (div(&zh), div(&zp)) {
        (Some(cofactor), Some(transversal)) => Ok(Some(CurveInvariance { cofactor, transversal })),
        _ => Ok(None),
    }
}

impl Record for Sys3D {
    fn kind(&self) -> &'static str {
        "3d system"
    }
    fn to_json(&self) -> Value {
        json!({
            "kind": "sys3d",
            "vars": ["f", "g", "u"],
            "df": poly_json(&self.df),
            "dg": poly_json(&self.dg),
            "du": poly_json(&self.du),
            "display": {
                "df": self.df.to_string(),
                "dg": self.dg.to_string(),
                "du": self.du.to_string(),
            },
            "cancelled_factors": self.cancelled_factors.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }
}

impl Record for FGSystem {
    fn kind(&self) -> &'static str {
        "fg system"
    }
    fn to_json(&self) -> Value {
        json!({
            "kind": "fg",
            "eq0": poly_json(&self.eq0),
            "eq1": poly_json(&self.eq1),
            "display": {
                "eq0": self.eq0.to_string(),
                "eq1": self.eq1.to_string(),
                "fp": self.fp.to_string(),
                "gp": self.gp.to_string(),
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysio::{parse_poly_in, parse_system};

    fn p(s: &str) -> MultiPoly {
        parse_poly_in(s, &["f", "g", "u", "fp", "gp", "x", "y"]).unwrap()
    }

    #[test]
    fn linear_center() {
        let sys = parse_system("dx = -y\ndy = x").unwrap();
        let fg = build_fg(&sys).unwrap();
        assert_eq!(fg.eq0, p("(1-u^2)*g*fp + (1-u^2)*f*gp - u*f*g"));
        assert_eq!(fg.eq1, p("f*fp + (1-u^2)*g*gp - u*g^2"));
        let s = build_3d(&sys).unwrap();
        assert!(s.df.is_zero());
        assert_eq!(s.dg, p("u*g"));
        assert_eq!(s.du, p("1-u^2"));
    }

    #[test]
    fn solved_forms_satisfy_both_equations() {
        let sys = parse_system("dx = -y + x*(x^2 - y^2)\ndy = x + y*(x^2+y)").unwrap();
        let fg = build_fg(&sys).unwrap();
        // clear denominators: fp = A/W, gp = B/V
        let (a, w) = (fg.fp.numerator(), fg.fp.denominator());
        let (b, v) = (fg.gp.numerator(), fg.gp.denominator());
        for eq in [&fg.eq0, &fg.eq1] {
            let c = eq.coeffs_wrt("fp");
            let d = c[0].coeffs_wrt("gp");
            let lhs = &(&(&(&d[0] * w) * v) + &(&c[1] * &(a * v))) + &(&(&d[1] * b) * w);
            assert!(lhs.is_zero(), "{eq}");
        }
    }

    #[test]
    fn cancelled_factors_rebuild_raw() {
        let sys = parse_system("dx = -y + x*(3*x^2+2*x*y+y^2-1)\ndy = x + y*(3*x^2+2*x*y+y^2-1)").unwrap();
        let pd = polar_parts(&sys).unwrap();
        let s = sys3d_from_parts(&pd).unwrap();
        let k = s.scale_factor();
        let (df, dg, du) = raw_components(&pd);
        assert_eq!(&s.df * &k, df);
        assert_eq!(&s.dg * &k, dg);
        assert_eq!(&s.du * &k, du);
        assert_eq!(s.du, p("1-u^2"));
    }

    #[test]
    fn planar_cofactor() {
        let sys = parse_system("dx = -y*(1+x*y)\ndy = y + x^3 - 2*y^3").unwrap();
        let k = invariant_cofactor(&sys, &p("x^4+2*y^2-1")).unwrap().unwrap();
        assert_eq!(k, p("-4*y^2"));
        assert_eq!(invariant_cofactor(&sys, &p("x^2+y^2-1")).unwrap(), None);
        assert_eq!(invariant_cofactor(&sys, &MultiPoly::zero()), Err(SystemsError::ZeroSurface));
    }
}
