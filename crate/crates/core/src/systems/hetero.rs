use serde_json::{json, Value};

use crate::numerics::{ode_solve, DenseSolution, GuardAction, OdeError, OdeProblem};
use crate::polyring::{CompiledPoly, PolyError};
use crate::sysio::{Record, Table};

use super::{Sys3D, SystemsError};

#[derive(Clone, Debug, PartialEq)]
pub struct HeteroOptions {
    pub delta: f64,
    pub rtol: f64,
    pub atol: f64,
    pub norm_bound: f64,
    pub max_steps: usize,
    /// Largest `|s|` tried in each direction.
    pub s_max: f64,
}

impl Default for HeteroOptions {
    fn default() -> Self {
        Self {
            delta: 1e-3,
            rtol: 1e-10,
            atol: 1e-12,
            norm_bound: 1e8,
            max_steps: 10_000,
            s_max: 1e4,
        }
    }
}

/// Samples `(s, f, g, u)` in increasing `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<[f64; 4]>,
    pub reached_plus: bool,
    pub reached_minus: bool,
}

impl Trajectory {
    pub fn first(&self) -> [f64; 4] {
        self.samples[0]
    }

    pub fn last(&self) -> [f64; 4] {
        *self.samples.last().expect("trajectory has samples")
    }
}

fn compile(sys: &Sys3D) -> Result<[CompiledPoly; 3], SystemsError> {
    let order = ["f", "g", "u"];
    let c = |p: &crate::polyring::MultiPoly| {
        p.compile(&order).map_err(|e| match e {
            PolyError::UnboundVariable(n) => SystemsError::UnboundParameter(n),
            other => SystemsError::UnboundParameter(other.to_string()),
        })
    };
    Ok([c(&sys.df)?, c(&sys.dg)?, c(&sys.du)?])
}

enum Leg {
    Reached(DenseSolution),
    Missed(DenseSolution),
}

fn leg(field: &[CompiledPoly; 3], y0: [f64; 3], target: f64, forward: bool, o: &HeteroOptions) -> Result<Leg, SystemsError> {
    let rhs = |_: f64, y: &[f64], d: &mut [f64]| {
        for (di, c) in d.iter_mut().zip(field) {
            *di = c.eval(y);
        }
    };
    let t1 = if forward { o.s_max } else { -o.s_max };
    let p = OdeProblem::new(rhs, 0.0, t1, y0.to_vec())
        .tolerances(o.rtol, o.atol)
        .max_steps(o.max_steps)
        .norm_bound(o.norm_bound)
        .guard(GuardAction::Stop, move |_, y| y[2] - target);
    match ode_solve(&p) {
        Ok(sol) if sol.stop.is_some() => Ok(Leg::Reached(sol)),
        Ok(sol) => Ok(Leg::Missed(sol)),
        Err(OdeError::BlowUp { t, .. }) => Err(SystemsError::BlowUp { s: t }),
        Err(OdeError::StepBudget { t, .. }) | Err(OdeError::StepUnderflow { t, .. }) => {
            Err(SystemsError::Stalled { s: t, u: f64::NAN })
        }
        Err(e) => Err(SystemsError::Integration(e)),
    }
}

fn samples_of(sol: &DenseSolution) -> Vec<[f64; 4]> {
    sol.mesh()
        .into_iter()
        .map(|s| {
            let y = sol.eval(s);
            [s, y[0], y[1], y[2]]
        })
        .collect()
}

/// Integrates forward to `u = 1 - delta` and backward to `u = -1 + delta`
/// from an interior point.
pub fn integrate_from(sys: &Sys3D, start: [f64; 3], o: &HeteroOptions) -> Result<Trajectory, SystemsError> {
    if !(o.delta > 0.0 && o.delta <= 0.1) {
        return Err(SystemsError::BadStart(format!("delta = {} outside (0, 0.1]", o.delta)));
    }
    let (lo, hi) = (-1.0 + o.delta, 1.0 - o.delta);
    if !start.iter().all(|v| v.is_finite()) || start[2] < lo - 1e-12 || start[2] > hi + 1e-12 {
        return Err(SystemsError::BadStart(format!("u = {} outside [{lo}, {hi}]", start[2])));
    }
    let field = compile(sys)?;
    let at_lo = start[2] <= lo;
    let at_hi = start[2] >= hi;

    let mut samples: Vec<[f64; 4]> = Vec::new();
    let mut reached_minus = at_lo;
    if !at_lo {
        match leg(&field, start, lo, false, o)? {
            Leg::Reached(sol) => {
                reached_minus = true;
                samples.extend(samples_of(&sol).into_iter().rev());
            }
            Leg::Missed(sol) => samples.extend(samples_of(&sol).into_iter().rev()),
        }
        samples.pop();
    }
    let mut reached_plus = at_hi;
    if at_hi {
        samples.push([0.0, start[0], start[1], start[2]]);
    } else {
        match leg(&field, start, hi, true, o)? {
            Leg::Reached(sol) => {
                reached_plus = true;
                samples.extend(samples_of(&sol));
            }
            Leg::Missed(sol) => {
                let y = &sol.y_end;
                return Err(SystemsError::Stalled { s: sol.t_end, u: y[2] });
            }
        }
    }
    Ok(Trajectory {
        samples,
        reached_plus,
        reached_minus,
    })
}

/// Orbit through `(f, g, -1 + delta)`.
pub fn integrate_heteroclinic(sys: &Sys3D, start: (f64, f64), o: &HeteroOptions) -> Result<Trajectory, SystemsError> {
    integrate_from(sys, [start.0, start.1, -1.0 + o.delta], o)
}

impl Record for Trajectory {
    fn kind(&self) -> &'static str {
        "trajectory"
    }
    fn to_json(&self) -> Value {
        json!({
            "kind": "trajectory",
            "reached_plus": self.reached_plus,
            "reached_minus": self.reached_minus,
            "samples": self.samples,
        })
    }
    fn table(&self) -> Option<Table> {
        Some(Table {
            header: ["s", "f", "g", "u"].map(String::from).to_vec(),
            rows: self.samples.iter().map(|r| r.to_vec()).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysio::parse_system;
    use crate::systems::build_3d;

    #[test]
    fn linear_center_runs_along_u() {
        // df = 0, dg = u g, du = 1 - u^2: u = tanh s, f is constant, g = g0 cosh s
        let s = build_3d(&parse_system("dx = -y\ndy = x").unwrap()).unwrap();
        let t = integrate_from(&s, [1.0, 0.5, 0.0], &HeteroOptions::default()).unwrap();
        assert!(t.reached_plus && t.reached_minus);
        for r in &t.samples {
            assert!((r[1] - 1.0).abs() < 1e-12);
            assert!((r[2] - 0.5 * r[0].cosh()).abs() < 1e-8);
        }
        assert!(t.samples.windows(2).all(|w| w[0][0] < w[1][0]));
    }

    #[test]
    fn unbound_parameter_rejected() {
        let s = build_3d(&parse_system("param a\ndx = -y + a*x^3\ndy = x").unwrap()).unwrap();
        assert_eq!(
            integrate_heteroclinic(&s, (1.0, 0.0), &HeteroOptions::default()),
            Err(SystemsError::UnboundParameter("a".into()))
        );
    }
}
