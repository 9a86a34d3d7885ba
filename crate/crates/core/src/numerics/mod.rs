//! Numerical kernels: adaptive ODE integration, quadrature, root bracketing.

mod ode;
mod quad;

pub use ode::{ode_solve, DenseSolution, Guard, GuardAction, GuardHit, OdeError, OdeProblem};
pub use quad::{quad, quad_detail, Endpoint, QuadError, QuadResult};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BisectError {
    #[error("no sign change on [{a}, {b}]: f(a) = {fa}, f(b) = {fb}")]
    NoSignChange { a: f64, b: f64, fa: f64, fb: f64 },
}

/// Root of `f` in `[a, b]` to width `tol`, given a sign change.
pub fn bisect(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64, BisectError> {
    bisect_with(|x| Ok::<f64, BisectError>(f(x)), a, b, tol)
}

/// As [`bisect`] for a fallible function; errors from `f` are passed through.
pub fn bisect_with<E: From<BisectError>>(
    f: impl Fn(f64) -> Result<f64, E>,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64, E> {
    let (mut a, mut b) = (a, b);
    let fa = f(a)?;
    if fa == 0.0 {
        return Ok(a);
    }
    let fb = f(b)?;
    if fb == 0.0 {
        return Ok(b);
    }
    if (fa > 0.0) == (fb > 0.0) || fa.is_nan() || fb.is_nan() {
        return Err(BisectError::NoSignChange { a, b, fa, fb }.into());
    }
    let pos_a = fa > 0.0;
    while (b - a).abs() > tol {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm > 0.0) == pos_a {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
