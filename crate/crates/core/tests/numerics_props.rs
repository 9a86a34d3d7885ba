mod support;

use std::collections::HashMap;

use proptest::prelude::*;
use starlike::bifurcate::{f_rho_solve, reversible_parts, BifurcationOptions};
use starlike::numerics::{bisect, ode_solve, quad, BisectError, Endpoint, GuardAction, OdeProblem, QuadError};
use support::{planar, q};

type Rhs = fn(f64, &[f64], &mut [f64]);

fn ex2_rhs(u: f64, y: &[f64], d: &mut [f64]) {
    let f = y[0];
    d[0] = -u * f * (u * f + 1.0) / (u.powi(3) * f + u * u - 2.0);
}

/// (name, rhs, t0, t1, y0)
fn suite() -> Vec<(&'static str, Rhs, f64, f64, Vec<f64>)> {
    vec![
        ("exp", |_, y, d| d[0] = y[0], 0.0, 1.0, vec![1.0]),
        ("cubic", |u, y, d| d[0] = u * y[0].powi(3), 0.0, 1.0, vec![0.5]),
        ("ex2", ex2_rhs, 0.0, 0.999, vec![0.3]),
        ("ex2-back", ex2_rhs, 0.0, -0.999, vec![0.8]),
        (
            "oscillator",
            |_, y, d| {
                d[0] = y[1];
                d[1] = -y[0];
            },
            0.0,
            10.0,
            vec![1.0, 0.0],
        ),
        (
            "predator-prey",
            |_, y, d| {
                d[0] = y[0] * (1.0 - y[1]);
                d[1] = y[1] * (y[0] - 1.0);
            },
            0.0,
            12.0,
            vec![1.5, 0.7],
        ),
    ]
}

#[test]
fn cubic_closed_form() {
    let p = OdeProblem::new(|u, y, d| d[0] = u * y[0].powi(3), 0.0, 1.0, vec![0.5]);
    let s = ode_solve(&p).unwrap();
    assert!((s.y_end[0] - 0.5 / 0.75f64.sqrt()).abs() < 1e-8);
}

#[test]
fn ex2_denominator_never_vanishes() {
    let at = HashMap::from([("a".to_string(), q(1, 1)), ("b".to_string(), q(3, 1))]);
    let sys = planar("perturbed_hamiltonian.txt").bind(&at);
    let parts = reversible_parts(&sys).unwrap();
    let f = f_rho_solve(&parts, 0.3, &BifurcationOptions::default()).unwrap();
    let lim = 1.0 - f.delta_end;
    for k in 0..=2000 {
        let u = lim * (k as f64 / 1000.0 - 1.0);
        let fu = f.eval(u);
        assert!(u.powi(3) * fu + u * u - 2.0 < -0.1, "u {u}");
    }
    // the same guard inside the integrator
    let p = OdeProblem::new(ex2_rhs, 0.0, lim, vec![0.3])
        .tolerances(1e-11, 1e-11)
        .guard(GuardAction::Fail, |u, y| u.powi(3) * y[0] + u * u - 2.0);
    let s = ode_solve(&p).unwrap();
    assert!((s.y_end[0] - f.eval(lim)).abs() < 1e-8);
}

#[test]
fn halving_tolerances_is_stable() {
    for tol in [1e-6, 1e-8, 1e-10] {
        for (name, rhs, t0, t1, y0) in suite() {
            let run = |tl: f64| {
                let p = OdeProblem::new(rhs, t0, t1, y0.clone()).tolerances(tl, tl);
                ode_solve(&p).unwrap().y_end
            };
            let (a, b) = (run(tol), run(tol / 2.0));
            for (x, y) in a.iter().zip(&b) {
                let bound = 10.0 * tol * (1.0 + x.abs());
                assert!((x - y).abs() <= bound, "{name} tol {tol}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn solve_is_deterministic() {
    for (_, rhs, t0, t1, y0) in suite() {
        let p = OdeProblem::new(rhs, t0, t1, y0.clone()).tolerances(1e-9, 1e-9);
        let (a, b) = (ode_solve(&p).unwrap(), ode_solve(&p).unwrap());
        assert_eq!(a.y_end, b.y_end);
        assert_eq!(a.mesh(), b.mesh());
    }
}

#[test]
fn quad_examples() {
    assert!((quad(|x| x * x, 0.0, 1.0, 1e-12, Endpoint::Plain).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    let arc = quad(|u| 1.0 / (1.0 - u * u).sqrt(), -1.0, 1.0, 1e-12, Endpoint::SqrtSub).unwrap();
    assert!((arc - std::f64::consts::PI).abs() < 1e-10);
    assert!(matches!(
        quad(|u| 1.0 / (1.0 - u * u), -1.0, 1.0, 1e-10, Endpoint::SqrtSub),
        Err(QuadError::NonIntegrableEndpoint { .. })
    ));
}

#[test]
fn bisect_examples() {
    assert!((bisect(|x| x - 0.3, 0.0, 1.0, 1e-14).unwrap() - 0.3).abs() < 1e-14);
    assert!(matches!(bisect(|x| x * x + 1.0, 0.0, 1.0, 1e-10), Err(BisectError::NoSignChange { .. })));
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn quad_exact_on_polynomials(
        c in prop::collection::vec(-5.0f64..5.0, 1..=24),
        a in -2.0f64..2.0,
        w in 0.05f64..3.0,
    ) {
        let b = a + w;
        let prim: Vec<f64> = std::iter::once(0.0)
            .chain(c.iter().enumerate().map(|(k, ck)| ck / (k + 1) as f64))
            .collect();
        let exact = horner(&prim, b) - horner(&prim, a);
        let tol = 1e-10;
        let got = quad(|x| horner(&c, x), a, b, tol, Endpoint::Plain).unwrap();
        // roundoff in evaluating the polynomial itself
        let m = a.abs().max(b.abs()).max(1.0);
        let scale: f64 = c.iter().enumerate().map(|(k, ck)| ck.abs() * m.powi(k as i32 + 1)).sum();
        prop_assert!((got - exact).abs() <= tol + 1e-13 * scale, "{} vs {}", got, exact);
    }

    #[test]
    fn bisect_within_tol(r in -0.9f64..0.9, tol in 1e-14f64..1e-3) {
        let x = bisect(|x| (x - r).powi(3), -1.0, 1.0, tol).unwrap();
        prop_assert!((x - r).abs() <= tol);
    }
}
