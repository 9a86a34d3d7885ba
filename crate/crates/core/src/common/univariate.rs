//! Dense univariate polynomials over the rationals: gcd and rational roots.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::polyring::{MultiPoly, Rational};

/// Coefficients `c[k]` of `x^k`; `None` if `p` involves another variable.
pub fn dense(p: &MultiPoly, var: &str) -> Option<Vec<Rational>> {
    if p.vars().iter().any(|v| v != var) {
        return None;
    }
    Some(
        p.coeffs_wrt(var)
            .iter()
            .map(|c| c.as_constant().unwrap_or_else(Rational::zero))
            .collect(),
    )
}

fn trim(mut a: Vec<Rational>) -> Vec<Rational> {
    while a.last().is_some_and(Zero::is_zero) {
        a.pop();
    }
    a
}

fn rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db {
        let lr = r.last().expect("nonempty").clone();
        let shift = r.len() - 1 - db;
        let q = &lr / lb;
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= &q * bi;
        }
        r.pop();
        r = trim(r);
    }
    r
}

/// Monic gcd; the zero polynomial is the empty vector.
pub fn gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(l) = a.last().cloned() {
        for c in &mut a {
            *c /= &l;
        }
    }
    a
}

/// Candidates are bounded by this size of the extreme coefficients.
const DIVISOR_CAP: u64 = 1_000_000_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct RootSearchTooLarge;

fn divisors(n: &BigInt) -> Result<Vec<u64>, RootSearchTooLarge> {
    let n = n.abs().to_u64().filter(|&n| n <= DIVISOR_CAP).ok_or(RootSearchTooLarge)?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}

fn eval(c: &[Rational], x: &Rational) -> Rational {
    c.iter().rev().fold(Rational::zero(), |acc, ci| acc * x + ci)
}

/// Distinct rational roots, ascending.
pub fn rational_roots(c: &[Rational]) -> Result<Vec<Rational>, RootSearchTooLarge> {
    let mut c = trim(c.to_vec());
    if c.len() <= 1 {
        return Ok(Vec::new());
    }
    let mut roots = Vec::new();
    if c[0].is_zero() {
        roots.push(Rational::zero());
        let k = c.iter().position(|x| !x.is_zero()).expect("nonzero polynomial");
        c.drain(..k);
    }
    if c.len() > 1 {
        let l = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = c.iter().map(|x| (x * Rational::from(l.clone())).to_integer()).collect();
        let ps = divisors(&ints[0])?;
        let qs = divisors(ints.last().expect("nonempty"))?;
        for &q in &qs {
            for &p in &ps {
                if p.gcd(&q) != 1 {
                    continue;
                }
                for s in [1i64, -1] {
                    let x = Rational::new(BigInt::from(p) * s, BigInt::from(q));
                    if eval(&c, &x).is_zero() {
                        roots.push(x);
                    }
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn gcd_of_products() {
        // (x-1)(x+2) and (x-1)(2x-3)
        let a = vec![q(-2, 1), q(1, 1), q(1, 1)];
        let b = vec![q(3, 1), q(-5, 1), q(2, 1)];
        assert_eq!(gcd(&a, &b), vec![q(-1, 1), q(1, 1)]);
    }

    #[test]
    fn roots_with_fractions() {
        // x (3x - 2)(x + 5)
        let c = vec![q(0, 1), q(-10, 1), q(13, 1), q(3, 1)];
        assert_eq!(rational_roots(&c).unwrap(), vec![q(-5, 1), q(0, 1), q(2, 3)]);
        assert!(rational_roots(&[q(2, 1), q(0, 1), q(-1, 1)]).unwrap().is_empty());
    }
}
