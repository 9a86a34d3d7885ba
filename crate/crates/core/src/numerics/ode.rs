//! Dormand-Prince 5(4) with the pair's continuous extension and sign guards.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64, y: Vec<f64> },
    #[error("guard {guard} triggered at t = {t}")]
    GuardTriggered { guard: usize, t: f64, y: Vec<f64> },
    #[error("state norm exceeded {bound} at t = {t}")]
    BlowUp { t: f64, bound: f64 },
    #[error("step budget of {steps} exhausted at t = {t}")]
    StepBudget { t: f64, steps: usize },
    #[error("invalid problem: {0}")]
    Invalid(String),
}

/// What happens when a guard changes sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GuardAction {
    /// End the integration at the root; the solution reports the hit.
    Stop,
    /// Abort with [`OdeError::GuardTriggered`].
    Fail,
}

type RhsFn<'a> = dyn Fn(f64, &[f64], &mut [f64]) + Sync + 'a;
type GuardFn<'a> = dyn Fn(f64, &[f64]) -> f64 + Sync + 'a;

pub struct Guard<'a> {
    pub func: Box<GuardFn<'a>>,
    pub action: GuardAction,
}

pub struct OdeProblem<'a> {
    pub rhs: Box<RhsFn<'a>>,
    pub y0: Vec<f64>,
    pub t0: f64,
    pub t1: f64,
    pub rtol: f64,
    pub atol: f64,
    pub guards: Vec<Guard<'a>>,
    pub max_steps: usize,
    pub norm_bound: f64,
    pub max_step: f64,
}

impl<'a> OdeProblem<'a> {
    pub fn new(
        rhs: impl Fn(f64, &[f64], &mut [f64]) + Sync + 'a,
        t0: f64,
        t1: f64,
        y0: Vec<f64>,
    ) -> Self {
        Self {
            rhs: Box::new(rhs),
            y0,
            t0,
            t1,
            rtol: 1e-10,
            atol: 1e-12,
            guards: Vec::new(),
            max_steps: 10_000,
            norm_bound: 1e8,
            max_step: f64::INFINITY,
        }
    }

    pub fn tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    pub fn guard(mut self, action: GuardAction, func: impl Fn(f64, &[f64]) -> f64 + Sync + 'a) -> Self {
        self.guards.push(Guard {
            func: Box::new(func),
            action,
        });
        self
    }

    pub fn max_steps(mut self, n: usize) -> Self {
        self.max_steps = n;
        self
    }

    pub fn norm_bound(mut self, b: f64) -> Self {
        self.norm_bound = b;
        self
    }

    pub fn max_step(mut self, h: f64) -> Self {
        self.max_step = h;
        self
    }
}

/// Guard root at which integration stopped.
#[derive(Clone, Debug, PartialEq)]
pub struct GuardHit {
    pub guard: usize,
    pub t: f64,
}

#[derive(Clone, Debug)]
struct Step {
    t: f64,
    h: f64,
    rcont: [Vec<f64>; 5],
}

impl Step {
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        let th = (t - self.t) / self.h;
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = &self.rcont;
        for i in 0..out.len() {
            out[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        }
    }

    fn deriv_into(&self, t: f64, out: &mut [f64]) {
        let th = (t - self.t) / self.h;
        let th1 = 1.0 - th;
        let [_, r2, r3, r4, r5] = &self.rcont;
        for i in 0..out.len() {
            let p = r3[i] + th * (r4[i] + th1 * r5[i]);
            let dp = r4[i] + (th1 - th) * r5[i];
            out[i] = (r2[i] + (th1 - th) * p + th * th1 * dp) / self.h;
        }
    }
}

/// Accepted steps with their dense interpolants.
#[derive(Clone, Debug)]
pub struct DenseSolution {
    steps: Vec<Step>,
    pub t0: f64,
    pub t_end: f64,
    pub y_end: Vec<f64>,
    pub stop: Option<GuardHit>,
    pub rejected: usize,
}

impl DenseSolution {
    pub fn dim(&self) -> usize {
        self.y_end.len()
    }

    pub fn accepted(&self) -> usize {
        self.steps.len()
    }

    /// Mesh points `t0, t1, ..., t_end`.
    pub fn mesh(&self) -> Vec<f64> {
        let mut m: Vec<f64> = self.steps.iter().map(|s| s.t).collect();
        m.push(self.t_end);
        m
    }

    fn contains(&self, t: f64) -> bool {
        let (lo, hi) = if self.t_end >= self.t0 {
            (self.t0, self.t_end)
        } else {
            (self.t_end, self.t0)
        };
        t >= lo && t <= hi
    }

    /// State at `t`, which must lie between `t0` and `t_end`.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        assert!(self.contains(t), "t = {t} outside the integrated range");
        if self.steps.is_empty() {
            out.copy_from_slice(&self.y_end);
            return;
        }
        self.step_at(t).eval_into(t, out);
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(t, &mut out);
        out
    }

    fn step_at(&self, t: f64) -> &Step {
        let forward = self.t_end >= self.t0;
        let k = self
            .steps
            .partition_point(|s| if forward { s.t <= t } else { s.t >= t })
            .saturating_sub(1);
        &self.steps[k]
    }

    /// Derivative of the interpolant at `t`.
    pub fn deriv(&self, t: f64) -> Vec<f64> {
        assert!(self.contains(t), "t = {t} outside the integrated range");
        let mut out = vec![0.0; self.dim()];
        if !self.steps.is_empty() {
            self.step_at(t).deriv_into(t, &mut out);
        }
        out
    }
}

// Dormand-Prince coefficients
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const GUARD_TOL: f64 = 1e-12;

fn wrms(v: &[f64], y0: &[f64], y1: &[f64], rtol: f64, atol: f64) -> f64 {
    let n = v.len() as f64;
    let s: f64 = v
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = atol + rtol * a.abs().max(b.abs());
            (e / sc) * (e / sc)
        })
        .sum();
    (s / n).sqrt()
}

pub fn ode_solve(problem: &OdeProblem<'_>) -> Result<DenseSolution, OdeError> {
    let n = problem.y0.len();
    if n == 0 || !(problem.rtol > 0.0 && problem.atol > 0.0) {
        return Err(OdeError::Invalid("empty state or nonpositive tolerance".into()));
    }
    if problem.t1 == problem.t0 || !problem.t0.is_finite() || !problem.t1.is_finite() {
        return Err(OdeError::Invalid("degenerate interval".into()));
    }
    let rhs = &problem.rhs;
    let dir = (problem.t1 - problem.t0).signum();
    let span = (problem.t1 - problem.t0).abs();
    let (rtol, atol) = (problem.rtol, problem.atol);

    let mut t = problem.t0;
    let mut y = problem.y0.clone();
    let mut k1 = vec![0.0; n];
    rhs(t, &y, &mut k1);
    if k1.iter().chain(&y).any(|x| !x.is_finite()) {
        return Err(OdeError::Invalid("right-hand side not finite at the initial point".into()));
    }

    // initial step (Hairer's heuristic)
    let sc: Vec<f64> = y.iter().map(|v| atol + rtol * v.abs()).collect();
    let norm = |v: &[f64]| (v.iter().zip(&sc).map(|(a, s)| (a / s) * (a / s)).sum::<f64>() / n as f64).sqrt();
    let d0 = norm(&y);
    let d1 = norm(&k1);
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(span);
    let ye: Vec<f64> = y.iter().zip(&k1).map(|(a, b)| a + dir * h * b).collect();
    let mut f1 = vec![0.0; n];
    rhs(t + dir * h, &ye, &mut f1);
    let diff: Vec<f64> = f1.iter().zip(&k1).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    h = (100.0 * h).min(h1).min(span);
    if !h.is_finite() || h <= 0.0 {
        h = span * 1e-3;
    }

    let mut g_prev: Vec<f64> = problem.guards.iter().map(|g| (g.func)(t, &y)).collect();

    let mut steps: Vec<Step> = Vec::new();
    let mut rejected = 0;
    let mut last_rejected = false;
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let mut y1 = vec![0.0; n];
    let mut err = vec![0.0; n];

    loop {
        if steps.len() >= problem.max_steps {
            return Err(OdeError::StepBudget {
                t,
                steps: problem.max_steps,
            });
        }
        let remaining = (problem.t1 - t) * dir;
        h = h.min(problem.max_step);
        let mut last = false;
        if h >= remaining {
            h = remaining;
            last = true;
        }
        if h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(OdeError::StepUnderflow { t, y: y.clone() });
        }
        let hs = dir * h;
        for i in 0..n {
            tmp[i] = y[i] + hs * A21 * k1[i];
        }
        rhs(t + C2 * hs, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs(t + C3 * hs, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs(t + C4 * hs, &tmp, &mut k4);
        for i in 0..n {
            tmp[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs(t + C5 * hs, &tmp, &mut k5);
        for i in 0..n {
            tmp[i] = y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_new = if last { problem.t1 } else { t + hs };
        rhs(t_new, &tmp, &mut k6);
        for i in 0..n {
            y1[i] = y[i] + hs * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        rhs(t_new, &y1, &mut k7);
        for i in 0..n {
            err[i] = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let mut e = wrms(&err, &y, &y1, rtol, atol);
        if !e.is_finite() || y1.iter().chain(&k7).any(|v| !v.is_finite()) {
            e = f64::INFINITY;
        }
        if e > 1.0 {
            rejected += 1;
            let fac = if e.is_finite() {
                (0.9 * e.powf(-0.2)).max(0.2)
            } else {
                0.1
            };
            h *= fac;
            last_rejected = true;
            continue;
        }

        // accepted
        let mut rcont: [Vec<f64>; 5] = Default::default();
        rcont[0] = y.clone();
        rcont[1] = y1.iter().zip(&y).map(|(a, b)| a - b).collect();
        rcont[2] = (0..n).map(|i| hs * k1[i] - rcont[1][i]).collect();
        rcont[3] = (0..n).map(|i| rcont[1][i] - hs * k7[i] - rcont[2][i]).collect();
        rcont[4] = (0..n)
            .map(|i| hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]))
            .collect();
        let step = Step { t, h: hs, rcont };

        // guards: earliest sign change inside the step
        let g_new: Vec<f64> = problem.guards.iter().map(|g| (g.func)(t_new, &y1)).collect();
        let mut hit: Option<(usize, f64)> = None;
        for (gi, guard) in problem.guards.iter().enumerate() {
            let (a, b) = (g_prev[gi], g_new[gi]);
            if a == 0.0 || !(b == 0.0 || (a > 0.0) != (b > 0.0)) {
                continue;
            }
            let root = locate(&step, &*guard.func, t, t_new, a, n);
            if hit.is_none_or(|(_, r)| (root - r) * dir < 0.0) {
                hit = Some((gi, root));
            }
        }
        if let Some((gi, root)) = hit {
            let mut yr = vec![0.0; n];
            step.eval_into(root, &mut yr);
            match problem.guards[gi].action {
                GuardAction::Fail => {
                    return Err(OdeError::GuardTriggered {
                        guard: gi,
                        t: root,
                        y: yr,
                    })
                }
                GuardAction::Stop => {
                    steps.push(step);
                    return Ok(DenseSolution {
                        steps,
                        t0: problem.t0,
                        t_end: root,
                        y_end: yr,
                        stop: Some(GuardHit { guard: gi, t: root }),
                        rejected,
                    });
                }
            }
        }
        for (gp, gn) in g_prev.iter_mut().zip(&g_new) {
            if *gn != 0.0 {
                *gp = *gn;
            }
        }

        steps.push(step);
        t = t_new;
        std::mem::swap(&mut y, &mut y1);
        std::mem::swap(&mut k1, &mut k7);
        if y.iter().any(|v| v.abs() > problem.norm_bound) {
            return Err(OdeError::BlowUp {
                t,
                bound: problem.norm_bound,
            });
        }
        if last {
            return Ok(DenseSolution {
                steps,
                t0: problem.t0,
                t_end: t,
                y_end: y,
                stop: None,
                rejected,
            });
        }
        let mut fac = (0.9 * e.max(1e-10).powf(-0.2)).clamp(0.2, 10.0);
        if last_rejected {
            fac = fac.min(1.0);
        }
        last_rejected = false;
        h *= fac;
    }
}

/// Bisection on the dense output between a sign change of a guard.
fn locate(step: &Step, g: &GuardFn<'_>, ta: f64, tb: f64, ga: f64, n: usize) -> f64 {
    let mut buf = vec![0.0; n];
    let (mut a, mut b) = (ta, tb);
    let sa = ga > 0.0;
    while (b - a).abs() > GUARD_TOL {
        let m = 0.5 * (a + b);
        step.eval_into(m, &mut buf);
        let gm = g(m, &buf);
        if gm == 0.0 {
            return m;
        }
        if (gm > 0.0) == sa {
            a = m;
        } else {
            b = m;
        }
    }
    b
}
