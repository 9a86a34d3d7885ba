//! Necessary conditions for two systems `f' = P_i/Q_i` in the `(f, u)`
//! plane to share a solution curve, by elimination.

pub mod univariate;

use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Value};
use thiserror::Error;

use crate::polyring::{sylvester_resultant, MultiPoly, PolyError, Rational};
use crate::sysio::{poly_json, Record};
use crate::systems::{invariant_cofactor, VectorField};

#[derive(Debug, Error, PartialEq)]
pub enum CommonError {
    #[error("the candidate curve is constant")]
    ZeroSurface,
    #[error("parameter `{0}` is not bound by the assignment")]
    UnboundParameter(String),
    #[error("automatic solving handles at most two parameters, found {0}")]
    TooManyParameters(usize),
    #[error("the conditions leave a positive-dimensional family in `{0}`")]
    Underdetermined(String),
    #[error("rational root search exceeds the coefficient size limit")]
    RootSearchTooLarge,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `f' = p / q`, i.e. the field `(f, u) -> (p, q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldPair {
    pub p: MultiPoly,
    pub q: MultiPoly,
}

impl FieldPair {
    pub fn new(p: MultiPoly, q: MultiPoly) -> Self {
        Self { p, q }
    }

    fn bind(&self, a: &HashMap<String, MultiPoly>) -> Self {
        Self::new(self.p.subst(a), self.q.subst(a))
    }

    pub fn params(&self) -> Vec<String> {
        let mut out = Vec::new();
        for p in [&self.p, &self.q] {
            for v in p.vars() {
                if v != "f" && v != "u" && !out.contains(v) {
                    out.push(v.clone());
                }
            }
        }
        out
    }
}

impl VectorField for FieldPair {
    fn components(&self) -> Vec<(&str, &MultiPoly)> {
        vec![("f", &self.p), ("u", &self.q)]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommonProblem {
    pub a: FieldPair,
    pub b: FieldPair,
    /// `p1 q2 - p2 q1`.
    pub h: MultiPoly,
    /// Polynomial differentiated and eliminated against: `h` itself, or `h`
    /// without its monomial and rational content.
    pub h_used: MultiPoly,
    /// `J_i = dh/df p_i + dh/du q_i` built from `h_used`.
    pub j: [MultiPoly; 2],
    pub strip_before_derive: bool,
}

pub fn build_problem(a: &FieldPair, b: &FieldPair) -> CommonProblem {
    build_problem_with(a, b, false)
}

pub fn build_problem_with(a: &FieldPair, b: &FieldPair, strip_before_derive: bool) -> CommonProblem {
    let h = &(&a.p * &b.q) - &(&b.p * &a.q);
    let h_used = if strip_before_derive && !h.is_zero() {
        h.strip_content().expect("nonzero").0
    } else {
        h.clone()
    };
    let j = [a.lie_derivative(&h_used), b.lie_derivative(&h_used)];
    CommonProblem {
        a: a.clone(),
        b: b.clone(),
        h,
        h_used,
        j,
        strip_before_derive,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Elimination {
    pub var: String,
    pub result: MultiPoly,
    /// `h` or `J` was constant in `var`; the constant convention applied.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionPolys {
    pub i: usize,
    /// `Res_u(h, J_i)`, a polynomial in `f` and parameters.
    pub g_f: Elimination,
    /// `Res_f(h, J_i)`.
    pub g_u: Elimination,
}

fn eliminate(h: &MultiPoly, j: &MultiPoly, var: &str) -> Elimination {
    let degenerate = h.degree_in(var) == 0 || j.degree_in(var) == 0;
    let result = match sylvester_resultant(h, j, var) {
        Ok(r) => r,
        // both constant in `var`: the empty Sylvester determinant
        Err(_) => MultiPoly::one(),
    };
    let result = if h.is_zero() || j.is_zero() { MultiPoly::zero() } else { result };
    Elimination {
        var: var.to_string(),
        result,
        degenerate,
    }
}

/// `i` is 1 or 2.
pub fn condition_polys(cp: &CommonProblem, i: usize) -> ConditionPolys {
    assert!(i == 1 || i == 2, "system index must be 1 or 2");
    let j = &cp.j[i - 1];
    let (g_f, g_u) = rayon::join(|| eliminate(&cp.h_used, j, "u"), || eliminate(&cp.h_used, j, "f"));
    ConditionPolys { i, g_f, g_u }
}

/// Coefficients of `g` in `main`, zeros dropped.
pub fn parameter_conditions(g: &MultiPoly, main: &str) -> Vec<MultiPoly> {
    g.coeffs_wrt(main).into_iter().filter(|c| !c.is_zero()).collect()
}

fn bindings(assignment: &BTreeMap<String, Rational>) -> HashMap<String, MultiPoly> {
    assignment
        .iter()
        .map(|(k, v)| (k.clone(), MultiPoly::constant(v.clone())))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultantCheck {
    pub i: usize,
    pub eliminated: String,
    pub vanishes: bool,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamReport {
    pub assignment: BTreeMap<String, Rational>,
    pub checks: Vec<ResultantCheck>,
    pub necessary_condition_met: bool,
    /// `h` vanishes identically after substitution.
    pub degenerate: bool,
}

pub fn verify_params(cp: &CommonProblem, assignment: &BTreeMap<String, Rational>) -> Result<ParamReport, CommonError> {
    let b = bindings(assignment);
    let (a, bb) = (cp.a.bind(&b), cp.b.bind(&b));
    if let Some(p) = a.params().into_iter().chain(bb.params()).next() {
        return Err(CommonError::UnboundParameter(p));
    }
    let bound = build_problem_with(&a, &bb, cp.strip_before_derive);
    if bound.h.is_zero() {
        return Ok(ParamReport {
            assignment: assignment.clone(),
            checks: Vec::new(),
            necessary_condition_met: true,
            degenerate: true,
        });
    }
    let (c1, c2) = rayon::join(|| condition_polys(&bound, 1), || condition_polys(&bound, 2));
    let mut checks = Vec::new();
    for c in [c1, c2] {
        for e in [c.g_f, c.g_u] {
            checks.push(ResultantCheck {
                i: c.i,
                eliminated: e.var,
                vanishes: e.result.is_zero(),
                degenerate: e.degenerate,
            });
        }
    }
    let met = checks.iter().all(|c| c.vanishes);
    Ok(ParamReport {
        assignment: assignment.clone(),
        checks,
        necessary_condition_met: met,
        degenerate: false,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveReport {
    pub curve: MultiPoly,
    pub cofactors: [Option<MultiPoly>; 2],
    pub common: bool,
    pub divides_h: bool,
}

pub fn verify_common_curve(
    a: &FieldPair,
    b: &FieldPair,
    curve: &MultiPoly,
    assignment: &BTreeMap<String, Rational>,
) -> Result<CurveReport, CommonError> {
    let bi = bindings(assignment);
    let curve = curve.subst(&bi);
    if curve.degree_in("f") == 0 && curve.degree_in("u") == 0 {
        return Err(CommonError::ZeroSurface);
    }
    let (a, b) = (a.bind(&bi), b.bind(&bi));
    let k = |s: &FieldPair| invariant_cofactor(s, &curve).expect("nonzero curve");
    let cofactors = [k(&a), k(&b)];
    let h = &(&a.p * &b.q) - &(&b.p * &a.q);
    let divides_h = h.exact_div(&curve)?.is_some();
    Ok(CurveReport {
        common: cofactors.iter().all(Option::is_some),
        cofactors,
        curve,
        divides_h,
    })
}

/// Rational points of the condition system for at most two parameters.
pub fn solve_conditions(conds: &[MultiPoly]) -> Result<Vec<BTreeMap<String, Rational>>, CommonError> {
    let conds: Vec<MultiPoly> = conds.iter().filter(|c| !c.is_zero()).cloned().collect();
    let mut names: Vec<String> = Vec::new();
    for c in &conds {
        for v in c.vars() {
            if c.degree_in(v) > 0 && !names.contains(v) {
                names.push(v.clone());
            }
        }
    }
    names.sort();
    match names.len() {
        0 => Ok(if conds.is_empty() { vec![BTreeMap::new()] } else { Vec::new() }),
        1 => {
            let roots = solve_one(&conds, &names[0])?;
            Ok(roots
                .into_iter()
                .map(|r| BTreeMap::from([(names[0].clone(), r)]))
                .collect())
        }
        2 => solve_two(&conds, &names[0], &names[1]),
        n => Err(CommonError::TooManyParameters(n)),
    }
}

fn solve_one(conds: &[MultiPoly], var: &str) -> Result<Vec<Rational>, CommonError> {
    let mut g: Vec<Rational> = Vec::new();
    for c in conds {
        let d = univariate::dense(c, var).expect("univariate condition");
        g = univariate::gcd(&g, &d);
    }
    if g.is_empty() {
        return Err(CommonError::Underdetermined(var.to_string()));
    }
    univariate::rational_roots(&g).map_err(|_| CommonError::RootSearchTooLarge)
}

fn solve_two(conds: &[MultiPoly], a: &str, b: &str) -> Result<Vec<BTreeMap<String, Rational>>, CommonError> {
    // project onto `a` by eliminating `b` pairwise against the first condition
    // that involves it
    let pivot = conds.iter().find(|c| c.degree_in(b) > 0).expect("b occurs");
    let mut projected = Vec::new();
    for c in conds {
        if c.degree_in(b) == 0 {
            projected.push(c.clone());
        } else if !std::ptr::eq(c, pivot) {
            projected.push(sylvester_resultant(pivot, c, b)?);
        }
    }
    projected.retain(|p| !p.is_zero());
    if projected.is_empty() {
        return Err(CommonError::Underdetermined(a.to_string()));
    }
    let mut out = Vec::new();
    for ra in solve_one(&projected, a)? {
        let at = HashMap::from([(a.to_string(), MultiPoly::constant(ra.clone()))]);
        let rest: Vec<MultiPoly> = conds.iter().map(|c| c.subst(&at)).filter(|c| !c.is_zero()).collect();
        if rest.iter().any(|c| c.is_constant()) {
            continue;
        }
        if rest.is_empty() {
            return Err(CommonError::Underdetermined(b.to_string()));
        }
        for rb in solve_one(&rest, b)? {
            out.push(BTreeMap::from([(a.to_string(), ra.clone()), (b.to_string(), rb)]));
        }
    }
    Ok(out)
}

fn assignment_json(a: &BTreeMap<String, Rational>) -> Value {
    Value::Object(a.iter().map(|(k, v)| (k.clone(), json!(v.to_string()))).collect())
}

impl Record for CommonProblem {
    fn kind(&self) -> &'static str {
        "common problem"
    }
    fn to_json(&self) -> Value {
        json!({
            "kind": "common",
            "h": poly_json(&self.h),
            "j1": poly_json(&self.j[0]),
            "j2": poly_json(&self.j[1]),
            "strip_before_derive": self.strip_before_derive,
            "display": { "h": self.h.to_string() },
        })
    }
}

impl ParamReport {
    pub fn json(&self) -> Value {
        json!({
            "assignment": assignment_json(&self.assignment),
            "necessary_condition_met": self.necessary_condition_met,
            "degenerate": self.degenerate,
            "checks": self.checks.iter().map(|c| json!({
                "i": c.i, "eliminated": c.eliminated, "vanishes": c.vanishes, "degenerate": c.degenerate,
            })).collect::<Vec<_>>(),
        })
    }
}

impl CurveReport {
    pub fn json(&self) -> Value {
        json!({
            "curve": self.curve.to_string(),
            "common": self.common,
            "divides_h": self.divides_h,
            "cofactors": self.cofactors.iter().map(|k| k.as_ref().map(|k| k.to_string())).collect::<Vec<_>>(),
        })
    }
}

pub fn solutions_json(sols: &[BTreeMap<String, Rational>]) -> Value {
    Value::Array(sols.iter().map(assignment_json).collect())
}
