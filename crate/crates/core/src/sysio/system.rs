//! Planar systems and the line-oriented system file format.
//!
//! ```text
//! # comment
//! param b2
//! param a1 = 1/2
//! dx = 2*y*(10+x*y)
//! dy = 20*x+b2*y-20*x^3-2*x^2*y+4*y^3
//! eps dx = a1*x
//! ```
//!
//! Bound parameters are substituted at parse time; unbound ones stay
//! symbolic. A second flavour with `df =` / `du =` lines describes the
//! rational systems in `(f, u)` used by the common-trajectory search.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use thiserror::Error;

use super::parse::{parse_poly, ParseError};
use crate::polyring::{MultiPoly, Rational};

#[derive(Debug, Error)]
pub enum SystemError {
    #[error("missing field `{0}`")]
    MissingField(String),
    #[error("line {line}: field `{field}` given twice")]
    DuplicateField { line: usize, field: String },
    #[error("line {line}: {msg}")]
    BadLine { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Expr {
        line: usize,
        #[source]
        source: ParseError,
    },
    #[error("perturbation does not vanish at the origin")]
    PerturbationNotVanishingAtOrigin,
    #[error("system is not of the form dx = A(x^2,y), dy = x*B(x^2,y)")]
    ReversibilityCheckFailed,
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

/// A declared parameter with an optional bound value.
#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: String,
    pub value: Option<Rational>,
}

/// Split `dx = A(x^2, y)`, `dy = x*B(x^2, y)`, stored with `a = dx`, `b = dy/x`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReversibleSplit {
    pub a: MultiPoly,
    pub b: MultiPoly,
}

/// Perturbation `(C, D)` entering as `dx += eps*C`, `dy += eps*D`.
#[derive(Clone, Debug, PartialEq)]
pub struct Perturbation {
    pub c: MultiPoly,
    pub d: MultiPoly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanarSystem {
    pub x: MultiPoly,
    pub y: MultiPoly,
    pub perturbation: Option<Perturbation>,
    pub params: Vec<Param>,
    reversible: Option<ReversibleSplit>,
}

impl PlanarSystem {
    pub fn new(x: MultiPoly, y: MultiPoly) -> Self {
        let reversible = reversible_split(&x, &y);
        Self {
            x,
            y,
            perturbation: None,
            params: Vec::new(),
            reversible,
        }
    }

    pub fn with_perturbation(mut self, c: MultiPoly, d: MultiPoly) -> Self {
        self.perturbation = Some(Perturbation { c, d });
        self
    }

    pub fn with_params(mut self, params: Vec<Param>) -> Self {
        self.params = params;
        self
    }

    pub fn is_reversible(&self) -> bool {
        self.reversible.is_some()
    }

    pub fn reversible(&self) -> Result<&ReversibleSplit, SystemError> {
        self.reversible
            .as_ref()
            .ok_or(SystemError::ReversibilityCheckFailed)
    }

    /// Names other than `x`, `y` occurring in the system.
    pub fn free_params(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut polys = vec![&self.x, &self.y];
        if let Some(p) = &self.perturbation {
            polys.push(&p.c);
            polys.push(&p.d);
        }
        for p in polys {
            for v in p.vars() {
                if v != "x" && v != "y" && !out.contains(v) {
                    out.push(v.clone());
                }
            }
        }
        out
    }

    /// Substitutes rational values for parameters.
    pub fn bind(&self, values: &HashMap<String, Rational>) -> Self {
        let mut out = PlanarSystem::new(self.x.eval_partial(values), self.y.eval_partial(values));
        if let Some(p) = &self.perturbation {
            out = out.with_perturbation(p.c.eval_partial(values), p.d.eval_partial(values));
        }
        let params = self
            .params
            .iter()
            .map(|p| Param {
                name: p.name.clone(),
                value: values.get(&p.name).cloned().or_else(|| p.value.clone()),
            })
            .collect();
        out.with_params(params)
    }
}

fn reversible_split(x: &MultiPoly, y: &MultiPoly) -> Option<ReversibleSplit> {
    if !x.is_even_in("x") {
        return None;
    }
    if y.exponents_of("x").iter().any(|e| e % 2 == 0) && !y.is_zero() {
        return None;
    }
    let b = y
        .exact_div(&MultiPoly::var("x"))
        .expect("nonzero divisor")
        .expect("odd in x means divisible by x");
    Some(ReversibleSplit { a: x.clone(), b })
}

/// Raw contents of a system file, before interpretation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SystemFile {
    pub fields: Vec<(String, String, usize)>,
    pub params: Vec<Param>,
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<Self, SystemError> {
        let mut out = SystemFile::default();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (lhs, rhs) = match body.split_once('=') {
                Some((l, r)) => (l.trim(), Some(r.trim())),
                None => (body, None),
            };
            let words: Vec<&str> = lhs.split_whitespace().collect();
            match words.as_slice() {
                ["param", name] => {
                    if !is_ident(name) {
                        return Err(SystemError::BadLine {
                            line,
                            msg: format!("bad parameter name `{name}`"),
                        });
                    }
                    if out.params.iter().any(|p| p.name == *name) {
                        return Err(SystemError::DuplicateField {
                            line,
                            field: format!("param {name}"),
                        });
                    }
                    let value = match rhs {
                        None => None,
                        Some(r) => {
                            let c = parse_poly(r, &HashSet::new())
                                .map_err(|source| SystemError::Expr { line, source })?;
                            Some(c.as_constant().expect("no symbols allowed"))
                        }
                    };
                    out.params.push(Param {
                        name: name.to_string(),
                        value,
                    });
                }
                _ => {
                    let field = words.join(" ");
                    let Some(rhs) = rhs else {
                        return Err(SystemError::BadLine {
                            line,
                            msg: "expected `name = expression`".into(),
                        });
                    };
                    if out.fields.iter().any(|(f, _, _)| *f == field) {
                        return Err(SystemError::DuplicateField { line, field });
                    }
                    out.fields.push((field, rhs.to_string(), line));
                }
            }
        }
        Ok(out)
    }

    fn take(&self, field: &str, vars: &[&str], bindings: &HashMap<String, Rational>) -> Result<Option<MultiPoly>, SystemError> {
        let Some((_, text, line)) = self.fields.iter().find(|(f, _, _)| f == field) else {
            return Ok(None);
        };
        let mut allowed: HashSet<String> = vars.iter().map(|s| s.to_string()).collect();
        allowed.extend(self.params.iter().map(|p| p.name.clone()));
        let p = parse_poly(text, &allowed).map_err(|source| SystemError::Expr {
            line: *line,
            source,
        })?;
        Ok(Some(p.eval_partial(bindings)))
    }

    fn bindings(&self) -> HashMap<String, Rational> {
        self.params
            .iter()
            .filter_map(|p| p.value.clone().map(|v| (p.name.clone(), v)))
            .collect()
    }

    fn check_fields(&self, known: &[&str]) -> Result<(), SystemError> {
        for (f, _, line) in &self.fields {
            if !known.contains(&f.as_str()) {
                return Err(SystemError::BadLine {
                    line: *line,
                    msg: format!("unknown field `{f}`"),
                });
            }
        }
        Ok(())
    }

    /// Interprets the file as a planar system in `(x, y)`.
    pub fn planar(&self) -> Result<PlanarSystem, SystemError> {
        self.check_fields(&["dx", "dy", "eps dx", "eps dy"])?;
        let b = self.bindings();
        let xy = ["x", "y"];
        let x = self
            .take("dx", &xy, &b)?
            .ok_or_else(|| SystemError::MissingField("dx".into()))?;
        let y = self
            .take("dy", &xy, &b)?
            .ok_or_else(|| SystemError::MissingField("dy".into()))?;
        let c = self.take("eps dx", &xy, &b)?;
        let d = self.take("eps dy", &xy, &b)?;
        let mut sys = PlanarSystem::new(x, y).with_params(self.params.clone());
        if c.is_some() || d.is_some() {
            let c = c.unwrap_or_else(MultiPoly::zero);
            let d = d.unwrap_or_else(MultiPoly::zero);
            if !vanishes_at_origin(&c) || !vanishes_at_origin(&d) {
                return Err(SystemError::PerturbationNotVanishingAtOrigin);
            }
            sys = sys.with_perturbation(c, d);
        }
        Ok(sys)
    }

    /// Interprets the file as a system `df = P(f,u)`, `du = Q(f,u)`.
    pub fn fu_pair(&self) -> Result<(MultiPoly, MultiPoly), SystemError> {
        self.check_fields(&["df", "du"])?;
        let b = self.bindings();
        let fu = ["f", "u"];
        let p = self
            .take("df", &fu, &b)?
            .ok_or_else(|| SystemError::MissingField("df".into()))?;
        let q = self
            .take("du", &fu, &b)?
            .ok_or_else(|| SystemError::MissingField("du".into()))?;
        Ok((p, q))
    }
}

fn vanishes_at_origin(p: &MultiPoly) -> bool {
    let mut zero = HashMap::new();
    zero.insert("x".to_string(), MultiPoly::zero());
    zero.insert("y".to_string(), MultiPoly::zero());
    p.subst(&zero).is_zero()
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_system(text: &str) -> Result<PlanarSystem, SystemError> {
    SystemFile::parse(text)?.planar()
}

pub fn read_system_file(path: &Path) -> Result<SystemFile, SystemError> {
    let text = std::fs::read_to_string(path).map_err(|e| SystemError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    SystemFile::parse(&text)
}
