//! Exact multivariate polynomials over arbitrary-precision rationals.
//!
//! A [`MultiPoly`] carries its own variable table. Binary operations merge
//! the tables by name, so polynomials built in different contexts can be
//! combined freely. The table is kept trimmed to the variables that actually
//! occur, ordered as `f, g, u, v, x, y, r` followed by every other name
//! (parameters) in order of first appearance.

mod modular;
mod rational;
mod resultant;

pub use rational::RationalFunction;
pub use resultant::{resultant_with, sylvester_matrix, sylvester_resultant, ResultantMethod};

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

/// Variables with a fixed rank in the canonical order.
pub const CORE_VARS: [&str; 7] = ["f", "g", "u", "v", "x", "y", "r"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisorZero,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("both polynomials are constant in `{0}`")]
    DegreeZero(String),
    #[error("variable `{0}` has no numeric value")]
    UnboundVariable(String),
}

fn core_rank(name: &str) -> Option<usize> {
    CORE_VARS.iter().position(|v| *v == name)
}

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Monomial(pub(crate) Vec<u32>);

impl Monomial {
    fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with rational coefficients.
#[derive(Clone, Debug, Default)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, Rational>,
}

/// Merged variable table plus index maps from each operand into it.
fn merge_vars(a: &[String], b: &[String]) -> (Vec<String>, Vec<usize>, Vec<usize>) {
    if a == b {
        let idx: Vec<usize> = (0..a.len()).collect();
        return (a.to_vec(), idx.clone(), idx);
    }
    let mut core: Vec<&String> = a
        .iter()
        .chain(b)
        .filter(|n| core_rank(n).is_some())
        .collect();
    core.sort_by_key(|n| core_rank(n));
    core.dedup();
    let mut merged: Vec<String> = core.into_iter().cloned().collect();
    for n in a.iter().chain(b) {
        if core_rank(n).is_none() && !merged.contains(n) {
            merged.push(n.clone());
        }
    }
    let pos = |n: &String| merged.iter().position(|m| m == n).unwrap();
    let ia = a.iter().map(pos).collect();
    let ib = b.iter().map(pos).collect();
    (merged, ia, ib)
}

fn remap(m: &Monomial, index: &[usize], width: usize) -> Monomial {
    let mut out = vec![0; width];
    for (e, &i) in m.0.iter().zip(index) {
        out[i] = *e;
    }
    Monomial(out)
}

impl MultiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial(Vec::new()), c);
        }
        Self { vars: Vec::new(), terms }
    }

    pub fn int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c.into()))
    }

    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial(vec![1]), Rational::one());
        Self {
            vars: vec![name.to_string()],
            terms,
        }
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs over `vars`.
    /// Repeated exponent vectors are summed.
    pub fn from_terms<I>(vars: &[&str], terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let mut map: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length mismatch");
            *map.entry(Monomial(e)).or_insert_with(Rational::zero) += c;
        }
        Self::from_parts(vars, map)
    }

    /// Normalizes an arbitrary table: drops zero coefficients, unused
    /// variables, and reorders variables canonically.
    fn from_parts(vars: Vec<String>, mut terms: BTreeMap<Monomial, Rational>) -> Self {
        terms.retain(|_, c| !c.is_zero());
        let width = vars.len();
        let mut used = vec![false; width];
        for m in terms.keys() {
            for (u, &e) in used.iter_mut().zip(&m.0) {
                *u |= e > 0;
            }
        }
        // canonical order of the surviving names
        let kept: Vec<usize> = (0..width).filter(|&i| used[i]).collect();
        let mut order = kept.clone();
        order.sort_by_key(|&i| match core_rank(&vars[i]) {
            Some(r) => (0, r, 0),
            None => (1, 0, i),
        });
        if order.len() == width && order.iter().enumerate().all(|(a, &b)| a == b) {
            return Self { vars, terms };
        }
        let new_vars: Vec<String> = order.iter().map(|&i| vars[i].clone()).collect();
        let terms = terms
            .into_iter()
            .map(|(m, c)| (Monomial(order.iter().map(|&i| m.0[i]).collect()), c))
            .collect();
        Self {
            vars: new_vars,
            terms,
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn has_var(&self, name: &str) -> bool {
        self.vars.iter().any(|v| v == name)
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Constant value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Rational> {
        if !self.is_constant() {
            return None;
        }
        Some(self.terms.values().next().cloned().unwrap_or_else(Rational::zero))
    }

    /// Terms in descending canonical order (leading term first).
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().rev().map(|(m, c)| (m.0.as_slice(), c))
    }

    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.terms.values().next_back()
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, name: &str) -> u32 {
        match self.var_index(name) {
            Some(i) => self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0),
            None => 0,
        }
    }

    /// Exponent of `name` in the monomial of each term, ascending unique.
    pub fn exponents_of(&self, name: &str) -> Vec<u32> {
        let Some(i) = self.var_index(name) else {
            return if self.is_zero() { vec![] } else { vec![0] };
        };
        let mut e: Vec<u32> = self.terms.keys().map(|m| m.0[i]).collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    /// Returns the polynomial re-expressed over `vars` (a superset of its own).
    fn lift(&self, vars: &[String], index: &[usize]) -> BTreeMap<Monomial, Rational> {
        if self.vars.as_slice() == vars {
            return self.terms.clone();
        }
        self.terms
            .iter()
            .map(|(m, c)| (remap(m, index, vars.len()), c.clone()))
            .collect()
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let (vars, ia, ib) = merge_vars(&self.vars, &other.vars);
        let mut terms = self.lift(&vars, &ia);
        for (m, c) in &other.terms {
            let m = if other.vars == vars {
                m.clone()
            } else {
                remap(m, &ib, vars.len())
            };
            let e = terms.entry(m).or_insert_with(Rational::zero);
            if negate {
                *e -= c;
            } else {
                *e += c;
            }
        }
        Self::from_parts(vars, terms)
    }

    fn product(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let (vars, ia, ib) = merge_vars(&self.vars, &other.vars);
        let w = vars.len();
        let a: Vec<(Monomial, &Rational)> = self
            .terms
            .iter()
            .map(|(m, c)| (remap(m, &ia, w), c))
            .collect();
        let b: Vec<(Monomial, &Rational)> = other
            .terms
            .iter()
            .map(|(m, c)| (remap(m, &ib, w), c))
            .collect();
        let mut acc: HashMap<Vec<u32>, Rational> = HashMap::with_capacity(a.len() * b.len());
        for (ma, ca) in &a {
            for (mb, cb) in &b {
                let e: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(x, y)| x + y).collect();
                let prod = *ca * *cb;
                match acc.get_mut(&e) {
                    Some(v) => *v += prod,
                    None => {
                        acc.insert(e, prod);
                    }
                }
            }
        }
        let terms = acc.into_iter().map(|(e, c)| (Monomial(e), c)).collect();
        Self::from_parts(vars, terms)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Formal partial derivative.
    pub fn diff(&self, name: &str) -> Self {
        let Some(i) = self.var_index(name) else {
            return Self::zero();
        };
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            terms.insert(m2, c * Rational::from_integer(e.into()));
        }
        Self::from_parts(self.vars.clone(), terms)
    }

    /// Simultaneous substitution of variables by polynomials.
    pub fn subst(&self, bindings: &HashMap<String, MultiPoly>) -> Self {
        let bound: Vec<Option<&MultiPoly>> = self.vars.iter().map(|v| bindings.get(v)).collect();
        if bound.iter().all(Option::is_none) {
            return self.clone();
        }
        let mut powers: HashMap<(usize, u32), MultiPoly> = HashMap::new();
        // group the result by the untouched variables to limit multiplications
        let mut acc: BTreeMap<Vec<u32>, MultiPoly> = BTreeMap::new();
        let free: Vec<usize> = (0..self.vars.len()).filter(|&i| bound[i].is_none()).collect();
        for (m, c) in &self.terms {
            let mut factor = MultiPoly::constant(c.clone());
            for (i, b) in bound.iter().enumerate() {
                if let Some(b) = b {
                    let e = m.0[i];
                    if e == 0 {
                        continue;
                    }
                    let p = powers.entry((i, e)).or_insert_with(|| b.pow(e));
                    factor = &factor * &*p;
                }
            }
            let key: Vec<u32> = free.iter().map(|&i| m.0[i]).collect();
            let slot = acc.entry(key).or_insert_with(MultiPoly::zero);
            *slot = &*slot + &factor;
        }
        let free_vars: Vec<&str> = free.iter().map(|&i| self.vars[i].as_str()).collect();
        let mut out = MultiPoly::zero();
        for (key, part) in acc {
            let mono = MultiPoly::from_terms(&free_vars, [(key, Rational::one())]);
            out = &out + &(&mono * &part);
        }
        out
    }

    /// Substitutes rational values for some variables.
    pub fn eval_partial(&self, values: &HashMap<String, Rational>) -> Self {
        let bindings = values
            .iter()
            .map(|(k, v)| (k.clone(), MultiPoly::constant(v.clone())))
            .collect();
        self.subst(&bindings)
    }

    /// Coefficients as a univariate polynomial in `name`, ascending degree.
    /// The zero polynomial yields an empty list.
    pub fn coeffs_wrt(&self, name: &str) -> Vec<MultiPoly> {
        if self.is_zero() {
            return Vec::new();
        }
        let Some(i) = self.var_index(name) else {
            return vec![self.clone()];
        };
        let deg = self.degree_in(name) as usize;
        let mut parts: Vec<BTreeMap<Monomial, Rational>> = vec![BTreeMap::new(); deg + 1];
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            let e = m2.0[i] as usize;
            m2.0[i] = 0;
            parts[e].insert(m2, c.clone());
        }
        parts
            .into_iter()
            .map(|t| Self::from_parts(self.vars.clone(), t))
            .collect()
    }

    /// Inverse of [`coeffs_wrt`](Self::coeffs_wrt).
    pub fn from_coeffs(name: &str, coeffs: &[MultiPoly]) -> Self {
        let x = MultiPoly::var(name);
        let mut out = MultiPoly::zero();
        for c in coeffs.iter().rev() {
            out = &(&out * &x) + c;
        }
        out
    }

    /// True when every exponent of `name` is even.
    pub fn is_even_in(&self, name: &str) -> bool {
        self.exponents_of(name).iter().all(|e| e % 2 == 0)
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &MultiPoly) -> Result<Option<MultiPoly>, PolyError> {
        if d.is_zero() {
            return Err(PolyError::DivisorZero);
        }
        if self.is_zero() {
            return Ok(Some(Self::zero()));
        }
        if let Some(c) = d.as_constant() {
            return Ok(Some(self.scale(&c.recip())));
        }
        let (vars, ia, ib) = merge_vars(&self.vars, &d.vars);
        let w = vars.len();
        let mut rem = self.lift(&vars, &ia);
        let div: Vec<(Monomial, Rational)> = d
            .terms
            .iter()
            .rev()
            .map(|(m, c)| (remap(m, &ib, w), c.clone()))
            .collect();
        let (lead_m, lead_c) = &div[0];
        let mut quotient: BTreeMap<Monomial, Rational> = BTreeMap::new();
        while let Some((rm, rc)) = rem.iter().next_back() {
            if !lead_m.divides(rm) {
                return Ok(None);
            }
            let qm = Monomial(rm.0.iter().zip(&lead_m.0).map(|(a, b)| a - b).collect());
            let qc = rc / lead_c;
            for (dm, dc) in &div {
                let m = Monomial(dm.0.iter().zip(&qm.0).map(|(a, b)| a + b).collect());
                let delta = &qc * dc;
                match rem.get_mut(&m) {
                    Some(e) => {
                        *e -= delta;
                        if e.is_zero() {
                            rem.remove(&m);
                        }
                    }
                    None => {
                        rem.insert(m, -delta);
                    }
                }
            }
            quotient.insert(qm, qc);
        }
        Ok(Some(Self::from_parts(vars, quotient)))
    }

    /// Divides out every factor in `d` as many times as possible; returns the
    /// cofactor and the multiplicity.
    pub fn divide_out(&self, d: &MultiPoly) -> Result<(MultiPoly, u32), PolyError> {
        let mut p = self.clone();
        let mut k = 0;
        if self.is_zero() {
            return Ok((p, 0));
        }
        while let Some(q) = p.exact_div(d)? {
            if d.is_constant() {
                break;
            }
            p = q;
            k += 1;
        }
        Ok((p, k))
    }

    /// Largest monomial dividing every term (coefficient one).
    pub fn monomial_content(&self) -> MultiPoly {
        let Some(first) = self.terms.keys().next() else {
            return Self::one();
        };
        let mut g = first.0.clone();
        for m in self.terms.keys() {
            for (a, b) in g.iter_mut().zip(&m.0) {
                *a = (*a).min(*b);
            }
        }
        let vars: Vec<&str> = self.vars.iter().map(String::as_str).collect();
        Self::from_terms(&vars, [(g, Rational::one())])
    }

    /// Positive rational gcd of the coefficients.
    pub fn rational_content(&self) -> Rational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Rational::one();
        }
        Rational::new(num, den)
    }

    /// Splits into `(primitive, content)` with `self = primitive * content`.
    /// The content is the rational gcd times the largest common monomial,
    /// signed so that the primitive part has a positive leading coefficient.
    pub fn strip_content(&self) -> Result<(MultiPoly, MultiPoly), PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mono = self.monomial_content();
        let mut c = self.rational_content();
        if self.leading_coefficient().unwrap().is_negative() {
            c = -c;
        }
        let content = mono.scale(&c);
        let prim = self
            .exact_div(&content)?
            .expect("content divides its polynomial");
        Ok((prim, content))
    }

    /// Evaluates with `f64` values for every variable.
    pub fn eval_f64(&self, values: &HashMap<String, f64>) -> Result<f64, PolyError> {
        let names: Vec<&str> = self.vars.iter().map(String::as_str).collect();
        let compiled = self.compile(&names)?;
        let mut x = Vec::with_capacity(names.len());
        for n in &names {
            match values.get(*n) {
                Some(v) => x.push(*v),
                None => return Err(PolyError::UnboundVariable(n.to_string())),
            }
        }
        Ok(compiled.eval(&x))
    }

    /// Exact evaluation with rational values for every variable.
    pub fn eval_rational(&self, values: &HashMap<String, Rational>) -> Result<Rational, PolyError> {
        for v in &self.vars {
            if !values.contains_key(v) {
                return Err(PolyError::UnboundVariable(v.clone()));
            }
        }
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (name, &e) in self.vars.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(values[name].clone(), e as usize);
                }
            }
            total += t;
        }
        Ok(total)
    }

    /// Compiles to a floating-point evaluator whose argument slots follow `order`.
    pub fn compile(&self, order: &[&str]) -> Result<CompiledPoly, PolyError> {
        let mut slot = Vec::with_capacity(self.vars.len());
        for v in &self.vars {
            match order.iter().position(|o| o == v) {
                Some(i) => slot.push(i),
                None => return Err(PolyError::UnboundVariable(v.clone())),
            }
        }
        let mut max_exp = vec![0u32; order.len()];
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let factors: Vec<(usize, u32)> = m
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        max_exp[slot[i]] = max_exp[slot[i]].max(e);
                        (slot[i], e)
                    })
                    .collect();
                (c.to_f64().unwrap_or(f64::NAN), factors)
            })
            .collect();
        Ok(CompiledPoly {
            terms,
            arity: order.len(),
            max_exp,
        })
    }

    /// Renames variables; targets must not already occur.
    pub fn rename(&self, from: &str, to: &str) -> Self {
        if !self.has_var(from) {
            return self.clone();
        }
        let mut b = HashMap::new();
        b.insert(from.to_string(), MultiPoly::var(to));
        self.subst(&b)
    }
}

/// A polynomial prepared for repeated `f64` evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, u32)>)>,
    arity: usize,
    max_exp: Vec<u32>,
}

impl CompiledPoly {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.arity);
        // power tables keep evaluation order fixed and cheap
        let mut pw: Vec<Vec<f64>> = Vec::with_capacity(self.arity);
        for (i, &m) in self.max_exp.iter().enumerate() {
            let mut row = Vec::with_capacity(m as usize + 1);
            let mut acc = 1.0;
            row.push(acc);
            for _ in 0..m {
                acc *= x[i];
                row.push(acc);
            }
            pw.push(row);
        }
        let mut s = 0.0;
        for (c, fs) in &self.terms {
            let mut t = *c;
            for &(i, e) in fs {
                t *= pw[i][e as usize];
            }
            s += t;
        }
        s
    }
}

/// Rewrites powers of `v` through `v^2 = 1 - u^2`, returning `(p0, p1)` with
/// `p = p0 + v*p1` and both parts free of `v`.
pub fn v_split(p: &MultiPoly) -> (MultiPoly, MultiPoly) {
    let coeffs = p.coeffs_wrt("v");
    let w = &MultiPoly::one() - &MultiPoly::var("u").pow(2);
    let mut p0 = MultiPoly::zero();
    let mut p1 = MultiPoly::zero();
    let mut wk = MultiPoly::one();
    for (k, pair) in coeffs.chunks(2).enumerate() {
        if k > 0 {
            wk = &wk * &w;
        }
        p0 = &p0 + &(&pair[0] * &wk);
        if let Some(odd) = pair.get(1) {
            p1 = &p1 + &(odd * &wk);
        }
    }
    (p0, p1)
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        if self.terms.len() != other.terms.len() {
            return false;
        }
        if self.vars == other.vars {
            return self.terms == other.terms;
        }
        (self - other).is_zero()
    }
}

impl Eq for MultiPoly {}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl<'a, 'b> $trait<&'b MultiPoly> for &'a MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &'b MultiPoly) -> MultiPoly {
                let f: fn(&MultiPoly, &MultiPoly) -> MultiPoly = $body;
                f(self, rhs)
            }
        }
        impl $trait<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
        impl<'b> $trait<&'b MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &'b MultiPoly) -> MultiPoly {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<MultiPoly> for &'a MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.combine(b, false));
forward_binop!(Sub, sub, |a, b| a.combine(b, true));
forward_binop!(Mul, mul, |a, b| a.product(b));

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

/// Binary arithmetic selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub fn arith(a: &MultiPoly, b: &MultiPoly, op: ArithOp) -> MultiPoly {
    match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
    }
}

fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let factors: Vec<String> = self
                .vars
                .iter()
                .zip(m)
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    if e == 1 {
                        v.clone()
                    } else {
                        format!("{v}^{e}")
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> MultiPoly {
        MultiPoly::var(n)
    }

    fn c(k: i64) -> MultiPoly {
        MultiPoly::int(k)
    }

    #[test]
    fn difference_of_squares() {
        let u = v("u");
        assert_eq!(&(&u + &c(1)) * &(&u - &c(1)), &u.pow(2) - &c(1));
    }

    #[test]
    fn additive_identity() {
        let p = &v("f").pow(3) - &v("u");
        assert_eq!(arith(&p, &MultiPoly::zero(), ArithOp::Add), p);
    }

    #[test]
    fn conjugate_product() {
        let fvg = &v("f") + &(&v("v") * &v("g"));
        let fmg = &v("f") - &(&v("v") * &v("g"));
        let want = &v("f").pow(2) - &(&v("v").pow(2) * &v("g").pow(2));
        assert_eq!(&fvg * &fmg, want);
    }

    #[test]
    fn derivatives() {
        let p = &(&v("f").pow(3) - &v("u").pow(2)) + &c(1);
        assert_eq!(p.diff("f"), &c(3) * &v("f").pow(2));
        assert_eq!(p.diff("u"), &c(-2) * &v("u"));
        let q = &(&v("c") * &v("f")) * &v("u");
        assert_eq!(q.diff("c"), &v("f") * &v("u"));
        assert!(q.diff("zz").is_zero());
    }

    #[test]
    fn substitution() {
        let r = &v("f") + &(&v("v") * &v("g"));
        let mut b = HashMap::new();
        b.insert("x".to_string(), &r * &v("v"));
        b.insert("y".to_string(), &r * &v("u"));
        let x = v("x").subst(&b);
        assert_eq!(x, &(&v("f") * &v("v")) + &(&v("g") * &v("v").pow(2)));
        let s = (&v("x").pow(2) + &v("y").pow(2)).subst(&b);
        assert_eq!(s, &r.pow(2) * &(&v("u").pow(2) + &v("v").pow(2)));
        let y = v("y").subst(&b);
        assert_eq!(y, &(&v("f") * &v("u")) + &(&(&v("v") * &v("g")) * &v("u")));
    }

    #[test]
    fn v_split_rules() {
        let w = &c(1) - &v("u").pow(2);
        assert_eq!(v_split(&v("v").pow(2)), (w.clone(), MultiPoly::zero()));
        let p = &(&v("f") * &v("v")) + &(&v("g") * &v("v").pow(2));
        assert_eq!(v_split(&p), (&v("g") * &w, v("f")));
        let q = &v("v").pow(3) + &v("v");
        assert_eq!(v_split(&q), (MultiPoly::zero(), &c(2) - &v("u").pow(2)));
    }

    #[test]
    fn exact_division() {
        let u = v("u");
        let q = (&u.pow(2) - &c(1)).exact_div(&(&u - &c(1))).unwrap();
        assert_eq!(q, Some(&u + &c(1)));
        let h = &(&v("f").pow(3) - &u.pow(2)) + &c(1);
        assert_eq!(h.exact_div(&v("f")).unwrap(), None);
        let p = &v("f").pow(2) * &h;
        assert_eq!(p.exact_div(&v("f").pow(2)).unwrap(), Some(h.clone()));
        assert_eq!(h.exact_div(&MultiPoly::zero()), Err(PolyError::DivisorZero));
    }

    #[test]
    fn content_stripping() {
        // 2f^2u + 4f^3u^2: monomial content f^2 u, rational content 2
        let p = &(&c(2) * &(&v("f").pow(2) * &v("u")))
            + &(&c(4) * &(&v("f").pow(3) * &v("u").pow(2)));
        let (prim, content) = p.strip_content().unwrap();
        assert_eq!(content, &c(2) * &(&v("f").pow(2) * &v("u")));
        assert_eq!(prim, &c(1) + &(&c(2) * &(&v("f") * &v("u"))));

        let q = &c(1) - &v("u").pow(2);
        let (prim, content) = q.strip_content().unwrap();
        assert_eq!(prim, &v("u").pow(2) - &c(1));
        assert_eq!(content, c(-1));

        let h = &(&v("f").pow(3) - &v("u").pow(2)) + &c(1);
        assert_eq!(h.strip_content().unwrap(), (h.clone(), c(1)));
        assert_eq!(
            MultiPoly::zero().strip_content(),
            Err(PolyError::ZeroPolynomial)
        );
    }

    #[test]
    fn coefficient_views() {
        let l = v("lambda");
        let p = &(&(&l * &v("u").pow(2)) - &v("u").pow(2)) + &c(1);
        assert_eq!(p.coeffs_wrt("u"), vec![c(1), MultiPoly::zero(), &l - &c(1)]);
        assert_eq!(v("f").coeffs_wrt("u"), vec![v("f")]);
        assert!(MultiPoly::zero().coeffs_wrt("u").is_empty());
        assert_eq!(MultiPoly::from_coeffs("u", &p.coeffs_wrt("u")), p);
    }

    #[test]
    fn canonical_variable_order() {
        let p = &(&v("b2") * &v("x")) + &(&v("f") * &v("a"));
        assert_eq!(p.vars(), &["f", "x", "b2", "a"]);
    }

    #[test]
    fn display_is_readable() {
        let p = &(&c(-2) * &v("u").pow(2)) + &(&v("f") + &c(1));
        assert_eq!(p.to_string(), "-2*u^2 + f + 1");
    }

    #[test]
    fn compiled_evaluation() {
        let p = &(&c(3) * &(&v("f").pow(2) * &v("u"))) - &c(1);
        let e = p.compile(&["f", "g", "u"]).unwrap();
        assert_eq!(e.eval(&[2.0, 9.0, 0.5]), 5.0);
        assert!(matches!(
            p.compile(&["f"]),
            Err(PolyError::UnboundVariable(_))
        ));
    }
}
