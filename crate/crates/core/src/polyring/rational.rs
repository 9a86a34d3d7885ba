use std::fmt;

use super::{MultiPoly, PolyError};

/// Quotient of two polynomials. Not reduced beyond common monomial and
/// rational content.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalFunction {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, PolyError> {
        if den.is_zero() {
            return Err(PolyError::DivisorZero);
        }
        if num.is_zero() {
            return Ok(Self {
                num,
                den: MultiPoly::one(),
            });
        }
        let common = gcd_monomial(&num.monomial_content(), &den.monomial_content())
            .scale(den.leading_coefficient().expect("nonzero denominator"));
        let num = num.exact_div(&common)?.expect("monomial divides numerator");
        let den = den.exact_div(&common)?.expect("monomial divides denominator");
        Ok(Self { num, den })
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.den
    }
}

fn gcd_monomial(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let mut out = MultiPoly::one();
    for name in a.vars() {
        let e = a.degree_in(name).min(b.degree_in(name));
        if e > 0 {
            out = &out * &MultiPoly::var(name).pow(e);
        }
    }
    out
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}
