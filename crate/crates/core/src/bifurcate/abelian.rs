use std::f64::consts::TAU;

use crate::numerics::{bisect, ode_solve, GuardAction, OdeError, OdeProblem};
use crate::polyring::{CompiledPoly, MultiPoly, PolyError};

use super::BifurcateError;

const CLOSURE_TOL: f64 = 1e-9;
const DENOMINATOR_TOL: f64 = 1e-12;

/// Line integrals over the oval `H = h` through `(x0, 0)`, `x0 > 0`, traversed
/// along the Hamiltonian flow `dx = H_y`, `dy = -H_x`.
#[derive(Clone, Debug, PartialEq)]
pub struct AbelianIntegrals {
    pub x0: f64,
    pub xy_dy: f64,
    pub x_dy: f64,
    pub period: f64,
}

impl AbelianIntegrals {
    pub fn ratio(&self) -> f64 {
        self.xy_dy / self.x_dy
    }
}

fn compile(p: &MultiPoly) -> Result<CompiledPoly, BifurcateError> {
    p.compile(&["x", "y"]).map_err(|e| match e {
        PolyError::UnboundVariable(n) => BifurcateError::UnboundParameter(n),
        other => BifurcateError::UnboundParameter(other.to_string()),
    })
}

/// First crossing of `H(x, 0) = h` on the positive `x` axis.
fn start_point(h0: &CompiledPoly, h: f64) -> Result<f64, BifurcateError> {
    let g = |x: f64| h0.eval(&[x, 0.0]) - h;
    if g(0.0) >= 0.0 {
        return Err(BifurcateError::OpenLevelSet { h });
    }
    let mut hi = h.abs().sqrt().max(1e-3);
    let mut lo = 0.0;
    while g(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(BifurcateError::OpenLevelSet { h });
        }
    }
    Ok(bisect(g, lo, hi, 1e-15 * hi.max(1.0))?)
}

pub fn abelian_integrals(ham: &MultiPoly, h: f64) -> Result<AbelianIntegrals, BifurcateError> {
    let hc = compile(ham)?;
    let hx = compile(&ham.diff("x"))?;
    let hy = compile(&ham.diff("y"))?;
    let x0 = start_point(&hc, h)?;
    // state: x, y, int x y dy, int x dy, winding angle
    let rhs = |_: f64, s: &[f64], d: &mut [f64]| {
        let p = [s[0], s[1]];
        let dx = hy.eval(&p);
        let dy = -hx.eval(&p);
        d[0] = dx;
        d[1] = dy;
        d[2] = s[0] * s[1] * dy;
        d[3] = s[0] * dy;
        d[4] = (s[0] * dy - s[1] * dx) / (s[0] * s[0] + s[1] * s[1]);
    };
    let p = OdeProblem::new(rhs, 0.0, 1e4, vec![x0, 0.0, 0.0, 0.0, 0.0])
        .tolerances(1e-12, 1e-14)
        .max_steps(200_000)
        .norm_bound(1e6)
        .guard(GuardAction::Stop, |_, s| s[4] * s[4] - TAU * TAU);
    let sol = match ode_solve(&p) {
        Ok(sol) => sol,
        Err(OdeError::BlowUp { .. } | OdeError::StepBudget { .. } | OdeError::StepUnderflow { .. }) => {
            return Err(BifurcateError::OpenLevelSet { h })
        }
        Err(e) => return Err(BifurcateError::Ode(e)),
    };
    let Some(hit) = sol.stop else {
        return Err(BifurcateError::OpenLevelSet { h });
    };
    let end = &sol.y_end;
    if (end[0] - x0).hypot(end[1]) > CLOSURE_TOL * x0.max(1.0) {
        return Err(BifurcateError::OpenLevelSet { h });
    }
    if end[3].abs() < DENOMINATOR_TOL {
        return Err(BifurcateError::DegenerateDenominator { value: end[3] });
    }
    Ok(AbelianIntegrals {
        x0,
        xy_dy: end[2],
        x_dy: end[3],
        period: hit.t,
    })
}

/// `(oint x y dy) / (oint x dy)` over the oval `H = h`.
pub fn abelian_ratio(ham: &MultiPoly, h: f64) -> Result<f64, BifurcateError> {
    abelian_integrals(ham, h).map(|a| a.ratio())
}
