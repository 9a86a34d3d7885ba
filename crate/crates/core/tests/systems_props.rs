mod support;

use proptest::prelude::*;
use starlike::decompose::{one_minus_u2, polar_parts};
use starlike::polyring::MultiPoly;
use starlike::sysio::{parse_poly_in, PlanarSystem};
use starlike::systems::{build_3d, integrate_from, invariant_cofactor, raw_components, HeteroOptions, VectorField};
use support::{bind, planar, poly, var};

const XY: &[&str] = &["x", "y"];

/// Polynomial in x, y without constant term.
fn at_origin_zero(deg: u32) -> impl Strategy<Value = MultiPoly> {
    poly(XY, deg, 5).prop_map(|p| &p - &p.subst(&bind(&[("x", MultiPoly::zero()), ("y", MultiPoly::zero())])))
}

fn system() -> impl Strategy<Value = PlanarSystem> {
    (at_origin_zero(3), at_origin_zero(3)).prop_map(|(x, y)| PlanarSystem::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cancellation_rebuilds_raw_components(sys in system()) {
        let Ok(s) = build_3d(&sys) else { return Ok(()) };
        let (df, dg, du) = raw_components(&polar_parts(&sys).unwrap());
        let k = s.scale_factor();
        prop_assert_eq!(&k * &s.df, df);
        prop_assert_eq!(&k * &s.dg, dg);
        prop_assert_eq!(&k * &s.du, du);
        prop_assert!(s.du.exact_div(&one_minus_u2()).unwrap().is_some(), "du = {}", s.du);
    }

    #[test]
    fn rigid_systems_have_constant_angular_speed(p in at_origin_zero(2)) {
        let x = &(-&var("y")) + &(&var("x") * &p);
        let y = &var("x") + &(&var("y") * &p);
        let s = build_3d(&PlanarSystem::new(x, y)).unwrap();
        let c = s.du.exact_div(&one_minus_u2()).unwrap().expect("1-u^2 divides du");
        prop_assert!(c.is_constant(), "du = {}", s.du);
    }

    #[test]
    fn darboux_construction_cofactor(
        h in poly(XY, 3, 4),
        m in poly(XY, 1, 3),
        p in poly(XY, 1, 3),
        q in poly(XY, 1, 3),
    ) {
        prop_assume!(!h.is_constant());
        // Z = m (H_y, -H_x) + H (p, q), so Z(H) = (p H_x + q H_y) H
        let sys = PlanarSystem::new(
            &(&m * &h.diff("y")) + &(&h * &p),
            &(&(-&m) * &h.diff("x")) + &(&h * &q),
        );
        let k = invariant_cofactor(&sys, &h).unwrap().expect("invariant by construction");
        prop_assert_eq!(&sys.lie_derivative(&h) - &(&k * &h), MultiPoly::zero());
        prop_assert_eq!(k, &(&p * &h.diff("x")) + &(&q * &h.diff("y")));
    }
}

#[test]
fn invariant_surface_conserved_along_orbit() {
    let s = build_3d(&planar("ex2.txt")).unwrap();
    let h = parse_poly_in("2*f*g - 2*u*(f^2 - (1-u^2)*g^2)^2", &["f", "g", "u"]).unwrap();
    assert!(invariant_cofactor(&s, &h).unwrap().is_some());
    let o = HeteroOptions::default();
    let start = [0.8, 0.0, 0.0];
    let eval = |p: &MultiPoly, r: &[f64]| {
        let c = p.compile(&["f", "g", "u"]).unwrap();
        c.eval(r)
    };
    let grad: f64 = ["f", "g", "u"].iter().map(|v| eval(&h.diff(v), &start).powi(2)).sum::<f64>().sqrt();
    let bound = 10.0 * o.rtol * (1.0 + grad);
    let t = integrate_from(&s, start, &o).unwrap();
    assert!(t.reached_plus && t.reached_minus);
    for r in &t.samples {
        assert!(eval(&h, &r[1..]).abs() < bound, "s = {}: {}", r[0], eval(&h, &r[1..]));
    }
}
