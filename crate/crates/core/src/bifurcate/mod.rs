//! First-order persistence of periodic orbits of perturbed reversible
//! centers `dx = A(x^2,y) + eps C`, `dy = x B(x^2,y) + eps D`.

mod abelian;

pub use abelian::{abelian_integrals, abelian_ratio, AbelianIntegrals};

use std::cell::Cell;
use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::decompose::{at_g_zero, decompose_xy};
use crate::numerics::{bisect_with, ode_solve, quad_detail, BisectError, DenseSolution, Endpoint, GuardAction, OdeError, OdeProblem, QuadError};
use crate::polyring::{CompiledPoly, MultiPoly, PolyError};
use crate::sysio::{PlanarSystem, Record, Table};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BifurcateError {
    #[error("system is not of the form dx = A(x^2,y), dy = x*B(x^2,y)")]
    NotReversibleForm,
    #[error("perturbation must vanish at the origin")]
    PerturbationNotVanishingAtOrigin,
    #[error("parameter `{0}` must be bound before numerical evaluation")]
    UnboundParameter(String),
    #[error("rho must be positive and finite, got {0}")]
    BadRho(f64),
    #[error("the angular velocity vanishes along the orbit through rho (u = {u})")]
    NonStarlike { u: f64 },
    #[error("f blew up at u = {u}")]
    BlowUp { u: f64 },
    #[error("denominator of L or M vanishes at interior u = {u}")]
    SingularInterior { u: f64 },
    #[error("outer integral did not converge (estimate {estimate}, error {error})")]
    NonIntegrableEndpoint { estimate: f64, error: f64 },
    #[error("integration failed: {0}")]
    Ode(OdeError),
    #[error("the level set H = {h} is not a closed oval around the origin")]
    OpenLevelSet { h: f64 },
    #[error("the integral of x dy is too small to divide by ({value})")]
    DegenerateDenominator { value: f64 },
    #[error(transparent)]
    Bisect(#[from] BisectError),
}

/// Polar parts of `A`, `B`, `C`, `D` in `(f, g, u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReversibleParts {
    pub a00: MultiPoly,
    pub a10: MultiPoly,
    pub b00: MultiPoly,
    pub b10: MultiPoly,
    pub c0: MultiPoly,
    pub c1: MultiPoly,
    pub d0: MultiPoly,
    pub d1: MultiPoly,
}

fn vanishes_at_origin(p: &MultiPoly) -> bool {
    let mut at = std::collections::HashMap::new();
    at.insert("x".to_string(), MultiPoly::zero());
    at.insert("y".to_string(), MultiPoly::zero());
    p.subst(&at).is_zero()
}

/// A missing perturbation counts as zero.
pub fn reversible_parts(sys: &PlanarSystem) -> Result<ReversibleParts, BifurcateError> {
    let split = sys.reversible().map_err(|_| BifurcateError::NotReversibleForm)?;
    let a = decompose_xy(&split.a);
    let b = decompose_xy(&split.b);
    let ea = a.even_refinement.ok_or(BifurcateError::NotReversibleForm)?;
    let eb = b.even_refinement.ok_or(BifurcateError::NotReversibleForm)?;
    let (c, d) = match &sys.perturbation {
        Some(p) => (p.c.clone(), p.d.clone()),
        None => (MultiPoly::zero(), MultiPoly::zero()),
    };
    if !vanishes_at_origin(&c) || !vanishes_at_origin(&d) {
        return Err(BifurcateError::PerturbationNotVanishingAtOrigin);
    }
    let c = decompose_xy(&c);
    let d = decompose_xy(&d);
    Ok(ReversibleParts {
        a00: ea.k00,
        a10: ea.k10,
        b00: eb.k00,
        b10: eb.k10,
        c0: c.h0,
        c1: c.h1,
        d0: d.h0,
        d1: d.h1,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BifurcationOptions {
    pub delta_end: f64,
    pub ode_tol: f64,
    pub quad_tol: f64,
}

impl Default for BifurcationOptions {
    fn default() -> Self {
        Self {
            delta_end: 1e-6,
            ode_tol: 1e-10,
            quad_tol: 1e-10,
        }
    }
}

/// The parts at `g = 0`, compiled in `(f, u)`.
pub struct Compiled {
    a00: CompiledPoly,
    a10: CompiledPoly,
    b00: CompiledPoly,
    b10: CompiledPoly,
    c1: CompiledPoly,
    d0: CompiledPoly,
}

impl Compiled {
    pub fn new(parts: &ReversibleParts) -> Result<Self, BifurcateError> {
        let c = |p: &MultiPoly| {
            at_g_zero(p).compile(&["f", "u"]).map_err(|e| match e {
                PolyError::UnboundVariable(n) => BifurcateError::UnboundParameter(n),
                other => BifurcateError::UnboundParameter(other.to_string()),
            })
        };
        Ok(Self {
            a00: c(&parts.a00)?,
            a10: c(&parts.a10)?,
            b00: c(&parts.b00)?,
            b10: c(&parts.b10)?,
            c1: c(&parts.c1)?,
            d0: c(&parts.d0)?,
        })
    }

    /// `df/du` along unperturbed orbits.
    pub fn orbit_slope(&self, f: f64, u: f64) -> f64 {
        let (n, den) = self.rhs(f, u);
        n / den
    }

    /// Numerator and denominator of [`Compiled::orbit_slope`].
    fn rhs(&self, f: f64, u: f64) -> (f64, f64) {
        let x = [f, u];
        let a = self.a00.eval(&x);
        let b = self.b00.eval(&x);
        let den = (1.0 - u * u) * b * f - u * a;
        ((a + u * b * f) * f, den)
    }
}

/// Unperturbed orbit `r = f_rho(sin theta)` on `[-1, 1]`.
pub struct FRho {
    pub rho: f64,
    pub delta_end: f64,
    pos: DenseSolution,
    neg: DenseSolution,
}

impl FRho {
    fn side(&self, u: f64) -> &DenseSolution {
        if u >= 0.0 {
            &self.pos
        } else {
            &self.neg
        }
    }

    /// `f_rho(u)`; beyond `1 - delta_end` the last value is extended linearly.
    pub fn eval(&self, u: f64) -> f64 {
        let lim = 1.0 - self.delta_end;
        let s = self.side(u);
        if u.abs() <= lim {
            s.eval(u)[0]
        } else {
            let ue = lim.copysign(u);
            s.eval(ue)[0] + s.deriv(ue)[0] * (u - ue)
        }
    }

    /// Derivative of the interpolant, for residual checks.
    pub fn deriv(&self, u: f64) -> f64 {
        let lim = 1.0 - self.delta_end;
        self.side(u).deriv(u.clamp(-lim, lim))[0]
    }

    /// `|f' - RHS(f, u)|` from the dense interpolant.
    pub fn residual(&self, c: &Compiled, u: f64) -> f64 {
        let f = self.eval(u);
        let (n, den) = c.rhs(f, u);
        (self.deriv(u) - n / den).abs()
    }

    pub fn mesh(&self) -> Vec<f64> {
        let mut m: Vec<f64> = self.neg.mesh().into_iter().rev().collect();
        m.pop();
        m.extend(self.pos.mesh());
        m
    }
}

fn map_ode(c: &Compiled, e: OdeError) -> BifurcateError {
    match e {
        OdeError::GuardTriggered { t, .. } => BifurcateError::NonStarlike { u: t },
        // the integrator stalls just short of a fold where the angular part
        // vanishes, before the guard sees a sign change
        OdeError::StepUnderflow { t, y } => {
            let (n, den) = c.rhs(y[0], t);
            if den.abs() <= 1e-5 * n.abs().max(1.0) {
                BifurcateError::NonStarlike { u: t }
            } else {
                BifurcateError::Ode(OdeError::StepUnderflow { t, y })
            }
        }
        OdeError::BlowUp { t, .. } => BifurcateError::BlowUp { u: t },
        other => BifurcateError::Ode(other),
    }
}

pub fn f_rho_solve(parts: &ReversibleParts, rho: f64, o: &BifurcationOptions) -> Result<FRho, BifurcateError> {
    f_rho_compiled(&Compiled::new(parts)?, rho, o)
}

pub fn f_rho_compiled(c: &Compiled, rho: f64, o: &BifurcationOptions) -> Result<FRho, BifurcateError> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(BifurcateError::BadRho(rho));
    }
    let (_, den0) = c.rhs(rho, 0.0);
    if den0 == 0.0 || !den0.is_finite() {
        return Err(BifurcateError::NonStarlike { u: 0.0 });
    }
    let lim = 1.0 - o.delta_end;
    let solve = |t1: f64| {
        let rhs = |u: f64, y: &[f64], d: &mut [f64]| {
            let (n, den) = c.rhs(y[0], u);
            d[0] = n / den;
        };
        let p = OdeProblem::new(rhs, 0.0, t1, vec![rho])
            .tolerances(o.ode_tol * 0.1, o.ode_tol * 0.1)
            .max_steps(100_000)
            // the interpolant's derivative error scales like h^4
            .max_step(0.05 * o.ode_tol.powf(0.25))
            .guard(GuardAction::Fail, |u, y| c.rhs(y[0], u).1);
        ode_solve(&p).map_err(|e| map_ode(c, e))
    };
    let pos = solve(lim)?;
    let neg = solve(-lim)?;
    Ok(FRho {
        rho,
        delta_end: o.delta_end,
        pos,
        neg,
    })
}

/// Pointwise `S`, `L`, `M` along `f_rho`.
pub struct Slm<'a> {
    c: &'a Compiled,
    pub f: &'a FRho,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlmValues {
    pub s: f64,
    pub l: f64,
    pub m: f64,
    /// `u A00 - (1-u^2) B00 f`.
    pub den: f64,
}

impl<'a> Slm<'a> {
    pub fn new(c: &'a Compiled, f: &'a FRho) -> Self {
        Self { c, f }
    }

    pub fn at(&self, u: f64) -> SlmValues {
        self.at_w(u, 1.0 - u * u)
    }

    /// `w = 1 - u^2` supplied separately to keep precision near `|u| = 1`.
    pub fn at_w(&self, u: f64, w: f64) -> SlmValues {
        let f = self.f.eval(u);
        let x = [f, u];
        let a00 = self.c.a00.eval(&x);
        let a10 = self.c.a10.eval(&x);
        let b00 = self.c.b00.eval(&x);
        let b10 = self.c.b10.eval(&x);
        let c1 = self.c.c1.eval(&x);
        let d0 = self.c.d0.eval(&x);
        let s = w * (a10 * b00 - a00 * b10 + 2.0 * u * w * b00 * b00) * f * f
            - 4.0 * u * u * w * a00 * b00 * f
            - u * (1.0 - 2.0 * u * u) * a00 * a00;
        let den = u * a00 - w * b00 * f;
        let q = w * den * den;
        SlmValues {
            s,
            l: s / q,
            m: -f * (a00 * d0 - w * b00 * c1 * f) / q,
            den,
        }
    }
}

pub fn slm<'a>(c: &'a Compiled, f: &'a FRho) -> Slm<'a> {
    Slm::new(c, f)
}

/// Pieces of `[0, pi/2)` on which the cumulative inner integral is cached.
const INNER_PIECES: usize = 32;

/// `Lambda(u) = int_0^u L`, in the angle `psi = asin(s)`.
struct Inner<'a> {
    slm: &'a Slm<'a>,
    tol: f64,
    cum_pos: Vec<f64>,
    cum_neg: Vec<f64>,
    fail: &'a Cell<Option<BifurcateError>>,
}

impl<'a> Inner<'a> {
    fn integrand(&self, psi: f64) -> f64 {
        let (s, c) = psi.sin_cos();
        let v = self.slm.at_w(s, c * c);
        if v.den == 0.0 {
            self.fail.set(Some(BifurcateError::SingularInterior { u: s }));
        }
        v.l * c
    }

    fn piece(&self, a: f64, b: f64) -> f64 {
        let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
        match quad_detail(|p| self.integrand(p), lo, hi, self.tol, Endpoint::Plain) {
            Ok(r) => sign * r.value,
            Err(QuadError::NonIntegrableEndpoint { estimate, error }) => {
                self.fail.set(Some(BifurcateError::NonIntegrableEndpoint { estimate, error }));
                f64::NAN
            }
            Err(_) => f64::NAN,
        }
    }

    fn new(slm: &'a Slm<'a>, tol: f64, fail: &'a Cell<Option<BifurcateError>>) -> Self {
        let mut me = Self {
            slm,
            tol,
            cum_pos: vec![0.0],
            cum_neg: vec![0.0],
            fail,
        };
        let h = FRAC_PI_2 / INNER_PIECES as f64;
        for j in 1..INNER_PIECES {
            let (a, b) = ((j - 1) as f64 * h, j as f64 * h);
            let p = me.piece(a, b);
            let n = me.piece(-a, -b);
            let (lp, ln) = (me.cum_pos[j - 1], me.cum_neg[j - 1]);
            me.cum_pos.push(lp + p);
            me.cum_neg.push(ln + n);
        }
        me
    }

    fn at(&self, phi: f64) -> f64 {
        let h = FRAC_PI_2 / INNER_PIECES as f64;
        let j = ((phi.abs() / h) as usize).min(INNER_PIECES - 1);
        let (start, cum) = if phi >= 0.0 {
            (j as f64 * h, self.cum_pos[j])
        } else {
            (-(j as f64) * h, self.cum_neg[j])
        };
        cum + self.piece(start, phi)
    }
}

/// `N(rho)` with the pieces used to compute it.
#[derive(Clone, Debug, PartialEq)]
pub struct BifurcationProfile {
    pub rho: f64,
    /// `(u, f_rho(u))` on the integrator mesh.
    pub f_samples: Vec<(f64, f64)>,
    pub n_value: f64,
    pub error_estimate: f64,
    pub quad_tol: f64,
    pub ode_tol: f64,
}

pub fn n_eval(parts: &ReversibleParts, rho: f64, o: &BifurcationOptions) -> Result<BifurcationProfile, BifurcateError> {
    n_eval_compiled(&Compiled::new(parts)?, rho, o)
}

pub fn n_eval_compiled(c: &Compiled, rho: f64, o: &BifurcationOptions) -> Result<BifurcationProfile, BifurcateError> {
    let f = f_rho_compiled(c, rho, o)?;
    let s = Slm::new(c, &f);
    let fail = Cell::new(None);
    let inner = Inner::new(&s, o.quad_tol * 0.1, &fail);
    if let Some(e) = fail.take() {
        return Err(e);
    }
    let outer = |phi: f64| {
        let (u, cp) = phi.sin_cos();
        let v = s.at_w(u, cp * cp);
        if v.den == 0.0 {
            fail.set(Some(BifurcateError::SingularInterior { u }));
        }
        v.m * (-inner.at(phi)).exp() * cp
    };
    let r = quad_detail(outer, -FRAC_PI_2, FRAC_PI_2, o.quad_tol, Endpoint::Plain);
    if let Some(e) = fail.take() {
        return Err(e);
    }
    let r = r.map_err(|e| match e {
        QuadError::NonIntegrableEndpoint { estimate, error } => BifurcateError::NonIntegrableEndpoint { estimate, error },
        QuadError::InvalidInterval { .. } => unreachable!("fixed interval"),
    })?;
    let f_samples = f.mesh().into_iter().map(|u| (u, f.eval(u))).collect();
    Ok(BifurcationProfile {
        rho,
        f_samples,
        n_value: r.value,
        error_estimate: r.error,
        quad_tol: o.quad_tol,
        ode_tol: o.ode_tol,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanPoint {
    pub rho: f64,
    pub n: Result<f64, BifurcateError>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Zero {
    pub rho: f64,
    pub bracket: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub points: Vec<ScanPoint>,
    pub zeros: Vec<Zero>,
    /// Every valid grid value is below `quad_tol` in magnitude.
    pub identically_zero: bool,
}

/// Grid scan with bisection of sign changes; `jobs = 0` uses all cores.
pub fn n_scan(
    parts: &ReversibleParts,
    rho_min: f64,
    rho_max: f64,
    grid_n: usize,
    o: &BifurcationOptions,
    jobs: usize,
) -> Result<ScanReport, BifurcateError> {
    if !(rho_min > 0.0 && rho_min < rho_max && grid_n >= 2) {
        return Err(BifurcateError::BadRho(rho_min));
    }
    let c = Compiled::new(parts)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    let step = (rho_max - rho_min) / (grid_n - 1) as f64;
    let grid: Vec<f64> = (0..grid_n).map(|i| rho_min + i as f64 * step).collect();
    let points: Vec<ScanPoint> = pool.install(|| {
        grid.par_iter()
            .map(|&rho| ScanPoint {
                rho,
                n: n_eval_compiled(&c, rho, o).map(|p| p.n_value),
            })
            .collect()
    });
    let valid: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| p.n.as_ref().ok().map(|&n| (p.rho, n)))
        .collect();
    let identically_zero = !valid.is_empty() && valid.iter().all(|(_, n)| n.abs() < o.quad_tol);
    let mut brackets = Vec::new();
    if !identically_zero {
        for w in valid.windows(2) {
            let ((r0, n0), (r1, n1)) = (w[0], w[1]);
            if n0 == 0.0 {
                brackets.push((r0, r0));
            } else if (n0 > 0.0) != (n1 > 0.0) && n1 != 0.0 {
                brackets.push((r0, r1));
            }
        }
        if let Some(&(r, n)) = valid.last() {
            if n == 0.0 {
                brackets.push((r, r));
            }
        }
    }
    let tol = o.quad_tol * 10.0;
    let zeros: Vec<Zero> = pool.install(|| {
        brackets
            .par_iter()
            .map(|&(a, b)| {
                let rho = if a == b {
                    a
                } else {
                    bisect_with(|r| n_eval_compiled(&c, r, o).map(|p| p.n_value), a, b, tol)?
                };
                Ok(Zero { rho, bracket: (a, b) })
            })
            .collect::<Result<Vec<_>, BifurcateError>>()
    })?;
    Ok(ScanReport {
        points,
        zeros,
        identically_zero,
    })
}

impl Record for BifurcationProfile {
    fn kind(&self) -> &'static str {
        "bifurcation value"
    }
    fn to_json(&self) -> Value {
        json!({
            "kind": "bifurcate-eval",
            "rho": self.rho,
            "N": self.n_value,
            "error_estimate": self.error_estimate,
            "quad_tol": self.quad_tol,
            "ode_tol": self.ode_tol,
        })
    }
    fn table(&self) -> Option<Table> {
        Some(Table {
            header: vec!["rho".into(), "N".into()],
            rows: vec![vec![self.rho, self.n_value]],
        })
    }
}

impl Record for ScanReport {
    fn kind(&self) -> &'static str {
        "bifurcation scan"
    }
    fn to_json(&self) -> Value {
        json!({
            "kind": "bifurcate-scan",
            "identically_zero": self.identically_zero,
            "zeros": self.zeros.iter().map(|z| json!({"rho": z.rho, "bracket": [z.bracket.0, z.bracket.1]})).collect::<Vec<_>>(),
            "points": self.points.iter().map(|p| match &p.n {
                Ok(n) => json!({"rho": p.rho, "N": n}),
                Err(e) => json!({"rho": p.rho, "skipped": e.to_string()}),
            }).collect::<Vec<_>>(),
        })
    }
    fn table(&self) -> Option<Table> {
        Some(Table {
            header: vec!["rho".into(), "N".into()],
            rows: self
                .points
                .iter()
                .map(|p| vec![p.rho, *p.n.as_ref().unwrap_or(&f64::NAN)])
                .collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysio::{parse_poly_in, parse_system};

    fn fgu(s: &str) -> MultiPoly {
        parse_poly_in(s, &["f", "g", "u"]).unwrap()
    }

    fn example1(eps: &str) -> ReversibleParts {
        let text = format!("dx = y - x^2*y\ndy = -x - x*y^2\n{eps}");
        reversible_parts(&parse_system(&text).unwrap()).unwrap()
    }

    #[test]
    fn parts_by_direct_substitution() {
        let p = example1("eps dx = x\neps dy = 0");
        assert_eq!(p.a00, fgu("u*f*(1-(1-u^2)*f^2)"));
        assert_eq!(p.b00, fgu("-(1+u^2*f^2)"));
        assert_eq!(p.c0, fgu("(1-u^2)*g"));
        assert_eq!(p.c1, fgu("f"));
    }

    #[test]
    fn closed_form_orbit() {
        let p = example1("");
        let c = Compiled::new(&p).unwrap();
        let f = f_rho_compiled(&c, 0.5, &BifurcationOptions::default()).unwrap();
        assert_eq!(f.eval(0.0), 0.5);
        for k in 0..100 {
            let u = -0.99 + 1.98 * k as f64 / 99.0;
            assert!(f.residual(&c, u) < 1e-9, "u = {u}: {}", f.residual(&c, u));
        }
        for k in -20..=20 {
            let u = k as f64 / 20.0;
            assert!((f.eval(u) - 0.5 / (1.0 - 0.25 * u * u).sqrt()).abs() < 1e-8, "u = {u}");
        }
    }

    #[test]
    fn closed_form_value() {
        let (a1, a2, a3, b1, b2, b3) = (0.5, -1.0, 0.25, 2.0, -0.75, 1.5);
        let p = example1("eps dx = 1/2*x - x*y^2 + 1/4*x^3\neps dy = 2*y - 3/4*x^2*y + 3/2*y^3");
        for rho in [0.3, 0.5, 0.8] {
            let l: f64 = 1.0 - rho * rho;
            let q = (b2 - b1 + b3) * l * l + 2.0 * (a3 - b2) * l.powf(1.5)
                - (a1 - a2 + 3.0 * a3 - b1 + 3.0 * b3 - b2) * l
                - 2.0 * (a2 - b3) * l.sqrt()
                + a1 + a2 + a3;
            let expect = -std::f64::consts::PI * q / (2.0 * rho);
            let n = n_eval(&p, rho, &BifurcationOptions::default()).unwrap().n_value;
            assert!((n - expect).abs() < 1e-6 * expect.abs(), "rho {rho}: {n} vs {expect}");
        }
    }

    #[test]
    fn single_coefficient_value() {
        let p = example1("eps dx = x\neps dy = 0");
        let n = n_eval(&p, 0.5, &BifurcationOptions::default()).unwrap();
        // -rho * int sqrt(1-u^2) du with rho = 1/2
        assert!((n.n_value + std::f64::consts::FRAC_PI_4).abs() < 1e-8, "{}", n.n_value);
    }

    #[test]
    fn hamiltonian_ratio_agrees() {
        let sys = |c: &str| {
            reversible_parts(&parse_system(&format!("dx = y - y^2\ndy = -2*x\neps dx = {c}\neps dy = 0")).unwrap()).unwrap()
        };
        let (pa, pb) = (sys("x"), sys("x*y"));
        let ham = parse_poly_in("x^2+y^2/2-y^3/3", &["x", "y"]).unwrap();
        let o = BifurcationOptions::default();
        for rho in [0.2, 0.3] {
            let na = n_eval(&pa, rho, &o).unwrap().n_value;
            let nb = n_eval(&pb, rho, &o).unwrap().n_value;
            let r = abelian_ratio(&ham, rho * rho).unwrap();
            assert!((nb / na - r).abs() < 1e-4, "rho {rho}: {} vs {r}", nb / na);
        }
    }

    #[test]
    fn non_reversible_rejected() {
        let sys = parse_system("dx = -y + x*y\ndy = x").unwrap();
        assert_eq!(reversible_parts(&sys), Err(BifurcateError::NotReversibleForm));
    }
}
