//! Resultants by dense evaluation and interpolation modulo 31-bit primes.
//!
//! The Sylvester determinant is a polynomial in the surviving variables with
//! known degree bounds (sum of row degrees) and a known coefficient bound
//! (product of row 1-norms), so enough primes and grid points make the
//! reconstruction exact. Each grid point is a univariate resultant over
//! GF(p), computed with the formal degrees of the Sylvester matrix.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use super::{MultiPoly, Rational};

/// Largest evaluation grid attempted before falling back to Bareiss.
const MAX_GRID: usize = 3_000_000;

/// Arithmetic modulo a prime below 2^31 with Barrett reduction.
#[derive(Clone, Copy)]
struct Field {
    p: u64,
    r: u64,
}

impl Field {
    fn new(p: u64) -> Self {
        Self {
            p,
            r: (u128::from(u64::MAX) / u128::from(p)) as u64,
        }
    }

    #[inline]
    fn reduce(self, x: u64) -> u64 {
        let q = ((u128::from(x) * u128::from(self.r)) >> 64) as u64;
        let t = x - q * self.p;
        if t >= self.p {
            t - self.p
        } else {
            t
        }
    }

    #[inline]
    fn mul(self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }

    #[inline]
    fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    fn add(self, a: u64, b: u64) -> u64 {
        let t = a + b;
        if t >= self.p {
            t - self.p
        } else {
            t
        }
    }

    fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    fn inv(self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn primes_exceeding(bound: &BigInt) -> Vec<u64> {
    let mut out = Vec::new();
    let mut prod = BigInt::one();
    let mut c: u64 = (1 << 31) - 1;
    while &prod <= bound {
        while !is_prime(c) {
            c -= 2;
        }
        out.push(c);
        prod *= c;
        c -= 2;
    }
    out
}

/// Resultant over GF(p) of polynomials given by ascending coefficient
/// slices, with the formal degrees `a.len()-1`, `b.len()-1` (leading
/// coefficients may vanish). Buffers are consumed.
fn res_formal(a: &mut Vec<u64>, b: &mut Vec<u64>, fp: Field) -> u64 {
    let mut acc = 1u64;
    // strip vanishing leading coefficients of the formal Sylvester layout
    loop {
        let m = a.len() - 1;
        let n = b.len() - 1;
        if m == 0 {
            return fp.mul(acc, fp.pow(a[0], n as u64));
        }
        if n == 0 {
            return fp.mul(acc, fp.pow(b[0], m as u64));
        }
        let am = a[m];
        let bn = b[n];
        if am == 0 && bn == 0 {
            return 0;
        }
        if am == 0 {
            let s = if n % 2 == 1 { fp.neg(bn) } else { bn };
            acc = fp.mul(acc, s);
            a.pop();
        } else if bn == 0 {
            acc = fp.mul(acc, am);
            b.pop();
        } else {
            break;
        }
    }
    fp.mul(acc, res_field(a, b, fp))
}

/// Resultant over GF(p) for nonzero leading coefficients. Remainders are
/// taken fraction-free; the accumulated scalar is inverted once at the end.
fn res_field(a: &mut Vec<u64>, b: &mut Vec<u64>, fp: Field) -> u64 {
    let mut num = 1u64;
    let mut den = 1u64;
    let (mut x, mut y) = (a, b);
    loop {
        let m = x.len() - 1;
        let n = y.len() - 1;
        if m == 0 {
            num = fp.mul(num, fp.pow(x[0], n as u64));
            break;
        }
        if n == 0 {
            num = fp.mul(num, fp.pow(y[0], m as u64));
            break;
        }
        if n < m {
            if (m * n) % 2 == 1 {
                num = fp.neg(num);
            }
            std::mem::swap(&mut x, &mut y);
            continue;
        }
        // lc^(n-m+1) y = s x + r, so Res(x, y) = lc^(n-k) Res(x, r) / lc^((n-m+1) m)
        let lc = x[m];
        for top in (m..=n).rev() {
            let c = y[top];
            let shift = top - m;
            for j in 0..top {
                y[j] = fp.mul(y[j], lc);
            }
            if c != 0 {
                for i in 0..m {
                    y[shift + i] = fp.sub(y[shift + i], fp.mul(c, x[i]));
                }
            }
            y[top] = 0;
        }
        y.truncate(m);
        while y.len() > 1 && *y.last().unwrap() == 0 {
            y.pop();
        }
        if y.len() == 1 && y[0] == 0 {
            return 0;
        }
        let k = y.len() - 1;
        num = fp.mul(num, fp.pow(lc, (n - k) as u64));
        den = fp.mul(den, fp.pow(lc, ((n - m + 1) * m) as u64));
    }
    fp.mul(num, fp.inv(den))
}

struct IntPoly {
    terms: Vec<(Vec<u32>, BigInt)>,
}

/// Dense grid interpolation of one axis: values at 0..=d to monomial
/// coefficients, in place.
fn newton_to_monomial(c: &mut [u64], inv: &[u64], fp: Field) {
    let d = c.len() - 1;
    for k in 1..=d {
        for j in (k..=d).rev() {
            c[j] = fp.mul(fp.sub(c[j], c[j - 1]), inv[k]);
        }
    }
    let mut r = vec![0u64; d + 1];
    r[0] = c[d];
    for k in (0..d).rev() {
        let deg = d - 1 - k;
        for i in (1..=deg + 1).rev() {
            r[i] = fp.sub(r[i - 1], fp.mul(k as u64, r[i]));
        }
        r[0] = fp.sub(c[k], fp.mul(k as u64, r[0]));
    }
    c.copy_from_slice(&r);
}

/// Attempts the modular computation; `None` when the grid would be too large
/// or nothing but `var` occurs.
pub(crate) fn resultant(p: &MultiPoly, q: &MultiPoly, var: &str) -> Option<MultiPoly> {
    let pc = p.coeffs_wrt(var);
    let qc = q.coeffs_wrt(var);
    let m = pc.len() - 1;
    let n = qc.len() - 1;

    let mut names: Vec<String> = Vec::new();
    for v in p.vars().iter().chain(q.vars()) {
        if v != var && !names.contains(v) {
            names.push(v.clone());
        }
    }
    if names.is_empty() {
        return None;
    }
    let k = names.len();

    let den_lcm = |cs: &[MultiPoly]| {
        cs.iter()
            .flat_map(|c| c.terms().map(|(_, r)| r.denom().clone()).collect::<Vec<_>>())
            .fold(BigInt::one(), |a, b| a.lcm(&b))
    };
    let lp = den_lcm(&pc);
    let lq = den_lcm(&qc);
    let to_int = |c: &MultiPoly, l: &BigInt| IntPoly {
        terms: c
            .terms()
            .map(|(e, r)| {
                let mut ex = vec![0u32; k];
                for (name, &x) in c.vars().iter().zip(e) {
                    ex[names.iter().position(|n| n == name).unwrap()] = x;
                }
                (ex, (r * Rational::from_integer(l.clone())).to_integer())
            })
            .collect(),
    };
    let pi: Vec<IntPoly> = pc.iter().map(|c| to_int(c, &lp)).collect();
    let qi: Vec<IntPoly> = qc.iter().map(|c| to_int(c, &lq)).collect();

    // degree bounds: the smaller of the row and column sums of entry degrees
    let size = m + n;
    let entry = |row: usize, col: usize| -> Option<&IntPoly> {
        if row < n {
            let k = col.checked_sub(row)?;
            (k <= m).then(|| &pi[m - k])
        } else {
            let k = col.checked_sub(row - n)?;
            (k <= n).then(|| &qi[n - k])
        }
    };
    let deg = |c: &IntPoly, a: usize| c.terms.iter().map(|(e, _)| e[a] as usize).max();
    let bound: Vec<usize> = (0..k)
        .map(|a| {
            let rows: usize = (0..size)
                .map(|r| (0..size).filter_map(|c| entry(r, c).and_then(|e| deg(e, a))).max().unwrap_or(0))
                .sum();
            let cols: usize = (0..size)
                .map(|c| (0..size).filter_map(|r| entry(r, c).and_then(|e| deg(e, a))).max().unwrap_or(0))
                .sum();
            rows.min(cols)
        })
        .collect();
    let mut grid: usize = 1;
    for b in &bound {
        grid = grid.checked_mul(b + 1)?;
        if grid > MAX_GRID {
            return None;
        }
    }

    // every coefficient is bounded by max |det| on the unit torus, hence by
    // the Hadamard bound of the matrix of entry 1-norms
    let sq_norms = |cs: &[IntPoly]| -> BigInt {
        cs.iter()
            .map(|c| {
                let s: BigInt = c.terms.iter().map(|(_, x)| x.abs()).sum();
                &s * &s
            })
            .sum()
    };
    let hadamard_sq = num_traits::pow(sq_norms(&pi), n) * num_traits::pow(sq_norms(&qi), m);
    let coeff_bound = (hadamard_sq.sqrt() + 1u32) * 2u32;
    let primes = primes_exceeding(&coeff_bound);

    // axes: largest bound innermost
    let inner = (0..k).max_by_key(|&i| (bound[i], i)).unwrap();
    let mut axes: Vec<usize> = (0..k).filter(|&i| i != inner).collect();
    axes.push(inner);
    let dims: Vec<usize> = axes.iter().map(|&a| bound[a] + 1).collect();

    let images: Vec<Vec<u32>> = primes
        .iter()
        .map(|&pr| image(&pi, &qi, &axes, &dims, pr))
        .collect();

    // Garner reconstruction, symmetric range
    let s = primes.len();
    let fields: Vec<Field> = primes.iter().map(|&p| Field::new(p)).collect();
    let mut inv_table = vec![vec![0u64; s]; s];
    for i in 0..s {
        for j in 0..i {
            inv_table[j][i] = Field::new(primes[i]).inv(primes[j] % primes[i]);
        }
    }
    let modulus: BigInt = primes.iter().map(|&x| BigInt::from(x)).product();
    let half = &modulus >> 1;
    let scale = Rational::from_integer(num_traits::pow(lp, n) * num_traits::pow(lq, m));
    let mut terms = Vec::new();
    let mut digits = vec![0u64; s];
    let mut idx = vec![0usize; k];
    for g in 0..grid {
        let mut nonzero = false;
        for i in 0..s {
            let fp = fields[i];
            let mut t = images[i][g] as u64;
            for j in 0..i {
                t = fp.mul(fp.sub(t, digits[j] % fp.p), inv_table[j][i]);
            }
            digits[i] = t;
            nonzero |= t != 0;
        }
        if nonzero {
            let mut val = BigInt::from(digits[s - 1]);
            for j in (0..s - 1).rev() {
                val = val * primes[j] + digits[j];
            }
            if val > half {
                val -= &modulus;
            }
            // grid index back to exponents
            let mut rem = g;
            for a in (0..k).rev() {
                idx[a] = rem % dims[a];
                rem /= dims[a];
            }
            let mut ex = vec![0u32; k];
            for (a, &axis) in axes.iter().enumerate() {
                ex[axis] = idx[a] as u32;
            }
            terms.push((ex, Rational::from_integer(val) / &scale));
        }
    }
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    Some(MultiPoly::from_terms(&names, terms))
}

/// Coefficients (mod `pr`) of the resultant on the dense grid.
fn image(pi: &[IntPoly], qi: &[IntPoly], axes: &[usize], dims: &[usize], pr: u64) -> Vec<u32> {
    let fp = Field::new(pr);
    let k = axes.len();
    let inner = axes[k - 1];
    let d_inner = dims[k - 1];
    let red = |c: &IntPoly| -> Vec<(Vec<u32>, u64)> {
        c.terms
            .iter()
            .map(|(e, x)| {
                let r = x.mod_floor(&BigInt::from(pr)).to_u64().unwrap();
                (e.clone(), r)
            })
            .filter(|(_, r)| *r != 0)
            .collect()
    };
    let pr_terms: Vec<Vec<(Vec<u32>, u64)>> = pi.iter().map(red).collect();
    let qr_terms: Vec<Vec<(Vec<u32>, u64)>> = qi.iter().map(red).collect();

    // power tables per axis position
    let max_exp: Vec<usize> = axes
        .iter()
        .map(|&a| {
            pi.iter()
                .chain(qi)
                .flat_map(|c| c.terms.iter().map(move |(e, _)| e[a] as usize))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let pw: Vec<Vec<Vec<u64>>> = (0..k)
        .map(|a| {
            (0..dims[a])
                .map(|t| {
                    let mut row = Vec::with_capacity(max_exp[a] + 1);
                    let mut acc = 1u64;
                    for _ in 0..=max_exp[a] {
                        row.push(acc);
                        acc = fp.mul(acc, t as u64);
                    }
                    row
                })
                .collect()
        })
        .collect();

    let grid: usize = dims.iter().product();
    let outer: usize = grid / d_inner;
    let mut out = vec![0u32; grid];
    let deg_inner = max_exp[k - 1];
    let mut uni_p = vec![vec![0u64; deg_inner + 1]; pi.len()];
    let mut uni_q = vec![vec![0u64; deg_inner + 1]; qi.len()];
    let mut at = vec![0usize; k - 1];
    let mut a_buf: Vec<u64> = Vec::with_capacity(pi.len());
    let mut b_buf: Vec<u64> = Vec::with_capacity(qi.len());

    let collapse = |terms: &[Vec<(Vec<u32>, u64)>], uni: &mut [Vec<u64>], at: &[usize]| {
        for (c, u) in terms.iter().zip(uni.iter_mut()) {
            u.iter_mut().for_each(|x| *x = 0);
            for (e, x) in c {
                let mut t = *x;
                for (a, &axis) in axes[..k - 1].iter().enumerate() {
                    t = fp.mul(t, pw[a][at[a]][e[axis] as usize]);
                }
                let slot = e[inner] as usize;
                u[slot] = fp.add(u[slot], t);
            }
        }
    };
    let horner = |u: &[u64], t: u64| u.iter().rev().fold(0u64, |acc, &c| fp.add(fp.mul(acc, t), c));

    for o in 0..outer {
        collapse(&pr_terms, &mut uni_p, &at);
        collapse(&qr_terms, &mut uni_q, &at);
        for t in 0..d_inner {
            a_buf.clear();
            a_buf.extend(uni_p.iter().map(|u| horner(u, t as u64)));
            b_buf.clear();
            b_buf.extend(uni_q.iter().map(|u| horner(u, t as u64)));
            out[o * d_inner + t] = res_formal(&mut a_buf, &mut b_buf, fp) as u32;
        }
        for a in (0..k - 1).rev() {
            at[a] += 1;
            if at[a] < dims[a] {
                break;
            }
            at[a] = 0;
        }
    }

    // interpolate along every axis
    let max_dim = *dims.iter().max().unwrap();
    let inv: Vec<u64> = (0..max_dim as u64)
        .map(|x| if x == 0 { 0 } else { fp.inv(x) })
        .collect();
    let mut fiber: Vec<u64> = Vec::with_capacity(max_dim);
    for a in 0..k {
        let stride: usize = dims[a + 1..].iter().product();
        let d = dims[a];
        for base in 0..grid {
            if (base / stride) % d != 0 {
                continue;
            }
            fiber.clear();
            fiber.extend((0..d).map(|i| out[base + i * stride] as u64));
            newton_to_monomial(&mut fiber, &inv, fp);
            for (i, &x) in fiber.iter().enumerate() {
                out[base + i * stride] = x as u32;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slow_det(m: Vec<Vec<u64>>, p: u64) -> u64 {
        let fp = Field::new(p);
        let mul = |a, b| fp.mul(a, b);
        let n = m.len();
        let mut a = m;
        let mut det = 1u64;
        for c in 0..n {
            let Some(r) = (c..n).find(|&r| a[r][c] != 0) else {
                return 0;
            };
            if r != c {
                a.swap(r, c);
                det = (p - det) % p;
            }
            det = mul(det, a[c][c]);
            let inv = fp.inv(a[c][c]);
            for r in c + 1..n {
                let f = mul(a[r][c], inv);
                for j in c..n {
                    a[r][j] = fp.sub(a[r][j], mul(f, a[c][j]));
                }
            }
        }
        det
    }

    fn sylvester(a: &[u64], b: &[u64]) -> Vec<Vec<u64>> {
        let m = a.len() - 1;
        let n = b.len() - 1;
        let mut rows = Vec::new();
        for i in 0..n {
            let mut r = vec![0; m + n];
            for (k, &c) in a.iter().rev().enumerate() {
                r[i + k] = c;
            }
            rows.push(r);
        }
        for i in 0..m {
            let mut r = vec![0; m + n];
            for (k, &c) in b.iter().rev().enumerate() {
                r[i + k] = c;
            }
            rows.push(r);
        }
        rows
    }

    #[test]
    fn euclid_matches_determinant_with_degenerate_leads() {
        let p = 101;
        let mut seed = 7u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 33) % 5
        };
        for _ in 0..500 {
            let m = 1 + (next() as usize % 4);
            let n = 1 + (next() as usize % 4);
            let a: Vec<u64> = (0..=m).map(|_| next()).collect();
            let b: Vec<u64> = (0..=n).map(|_| next()).collect();
            let want = slow_det(sylvester(&a, &b), p);
            assert_eq!(res_formal(&mut a.clone(), &mut b.clone(), Field::new(p)), want, "{a:?} {b:?}");
        }
    }

    #[test]
    fn interpolation_recovers_coefficients() {
        let p = 1_000_003;
        let coeffs = [5u64, 0, 3, 7];
        let mut vals: Vec<u64> = (0..4u64)
            .map(|t| coeffs.iter().rev().fold(0, |acc, &c| (acc * t + c) % p))
            .collect();
        let fp = Field::new(p);
        let inv: Vec<u64> = (0..4).map(|x| if x == 0 { 0 } else { fp.inv(x) }).collect();
        newton_to_monomial(&mut vals, &inv, fp);
        assert_eq!(vals, coeffs);
    }
}
