//! Sylvester resultants by fraction-free (Bareiss) elimination.
//!
//! Sign convention: the resultant is the determinant of the Sylvester matrix
//! whose first `deg q` rows hold the coefficients of `p` (leading coefficient
//! first) and whose remaining `deg p` rows hold those of `q`. With this
//! layout `Res(u - a, u - b) = a - b`.
//!
//! Large problems with other variables left over are routed to the modular
//! engine, which produces the same exact polynomial far faster.

use super::{modular, MultiPoly, PolyError};

/// Algorithm used by [`resultant_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResultantMethod {
    /// Fraction-free elimination over the polynomial ring.
    Bareiss,
    /// Evaluation/interpolation modulo primes with CRT reconstruction.
    /// Falls back to Bareiss when the evaluation grid would be too large.
    Modular,
    /// Modular for Sylvester matrices of size at least 8, else Bareiss.
    Auto,
}

/// Sylvester matrix of `p` and `q` with respect to `var`.
pub fn sylvester_matrix(p: &MultiPoly, q: &MultiPoly, var: &str) -> Vec<Vec<MultiPoly>> {
    let pc = p.coeffs_wrt(var);
    let qc = q.coeffs_wrt(var);
    let m = pc.len().saturating_sub(1);
    let n = qc.len().saturating_sub(1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![MultiPoly::zero(); size];
        for (k, c) in pc.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![MultiPoly::zero(); size];
        for (k, c) in qc.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Resultant of `p` and `q` with respect to `var`.
///
/// When exactly one input is constant in `var` the standard convention
/// applies: `Res(c, q) = c^deg(q)` and `Res(p, c) = c^deg(p)`.
pub fn sylvester_resultant(p: &MultiPoly, q: &MultiPoly, var: &str) -> Result<MultiPoly, PolyError> {
    resultant_with(p, q, var, ResultantMethod::Auto)
}

pub fn resultant_with(
    p: &MultiPoly,
    q: &MultiPoly,
    var: &str,
    method: ResultantMethod,
) -> Result<MultiPoly, PolyError> {
    let dp = p.degree_in(var);
    let dq = q.degree_in(var);
    match (dp, dq) {
        (0, 0) => return Err(PolyError::DegreeZero(var.to_string())),
        (0, n) => return Ok(p.pow(n)),
        (m, 0) => return Ok(q.pow(m)),
        _ => {}
    }
    let modular_first = match method {
        ResultantMethod::Bareiss => false,
        ResultantMethod::Modular => true,
        ResultantMethod::Auto => dp + dq >= 8,
    };
    if modular_first {
        if let Some(r) = modular::resultant(p, q, var) {
            return Ok(r);
        }
    }
    Ok(bareiss_determinant(sylvester_matrix(p, q, var)))
}

/// Determinant over the polynomial ring by Bareiss' fraction-free elimination.
pub(crate) fn bareiss_determinant(mut a: Vec<Vec<MultiPoly>>) -> MultiPoly {
    let n = a.len();
    if n == 0 {
        return MultiPoly::one();
    }
    let mut negate = false;
    let mut prev = MultiPoly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            // smallest nonzero pivot below keeps intermediate sizes down
            let swap = (k + 1..n)
                .filter(|&i| !a[i][k].is_zero())
                .min_by_key(|&i| a[i][k].len());
            match swap {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return MultiPoly::zero(),
            }
        }
        let pivot = a[k][k].clone();
        for i in k + 1..n {
            let factor = a[i][k].clone();
            for j in k + 1..n {
                let num = &(&pivot * &a[i][j]) - &(&factor * &a[k][j]);
                a[i][j] = num
                    .exact_div(&prev)
                    .expect("nonzero Bareiss divisor")
                    .expect("Bareiss division is exact");
            }
            a[i][k] = MultiPoly::zero();
        }
        prev = pivot;
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> MultiPoly {
        MultiPoly::var(n)
    }

    #[test]
    fn linear_resultant_sign() {
        let r = sylvester_resultant(&(&v("u") - &v("a")), &(&v("u") - &v("b")), "u").unwrap();
        assert_eq!(r, &v("a") - &v("b"));
    }

    #[test]
    fn evaluates_at_root() {
        let p = &v("u").pow(2) - &v("f");
        let q = &v("u") - &MultiPoly::one();
        let r = sylvester_resultant(&p, &q, "u").unwrap();
        assert_eq!(r, &MultiPoly::one() - &v("f"));
    }

    #[test]
    fn constant_conventions() {
        let q = &v("u").pow(3) + &v("f");
        let c = MultiPoly::int(2);
        assert_eq!(sylvester_resultant(&c, &q, "u").unwrap(), MultiPoly::int(8));
        assert_eq!(sylvester_resultant(&q, &v("f"), "u").unwrap(), v("f").pow(3));
        assert_eq!(
            sylvester_resultant(&c, &v("f"), "u"),
            Err(PolyError::DegreeZero("u".into()))
        );
    }

    #[test]
    fn common_factor_vanishes() {
        let common = &v("u") - &v("f");
        let p = &common * &(&v("u").pow(2) + &MultiPoly::int(3));
        let q = &common * &(&v("u") + &v("f").pow(2));
        assert!(sylvester_resultant(&p, &q, "u").unwrap().is_zero());
    }

    #[test]
    fn zero_pivot_is_swapped() {
        let m = vec![
            vec![MultiPoly::zero(), MultiPoly::one()],
            vec![v("a"), v("b")],
        ];
        assert_eq!(bareiss_determinant(m), -v("a"));
    }

    #[test]
    fn modular_agrees_with_bareiss() {
        let vars = ["u", "f", "s"];
        let p = crate::sysio::parse_poly_in("3*u^3*f - u^2*s + 2/3*u*f^2 - s + 1", &vars).unwrap();
        let q = crate::sysio::parse_poly_in("u^2*f*s - 5*u + f^3 - 1/2", &vars).unwrap();
        for var in ["u", "f"] {
            let a = resultant_with(&p, &q, var, ResultantMethod::Bareiss).unwrap();
            let b = resultant_with(&p, &q, var, ResultantMethod::Modular).unwrap();
            assert_eq!(a, b, "eliminating {var}");
        }
    }
}
