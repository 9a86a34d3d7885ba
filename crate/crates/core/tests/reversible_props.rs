mod support;

use std::collections::HashMap;

use proptest::prelude::*;
use starlike::polyring::{MultiPoly, Rational};
use starlike::reversible::{reversible_H, reversible_pipeline};
use starlike::sysio::{parse_poly_in, PlanarSystem};
use starlike::systems::{build_3d, integrate_from, HeteroOptions};
use support::{bind, planar, poly, q, var};

/// `K(x^2, y)` for `K` in `(s, y)`.
fn even(k: &MultiPoly) -> MultiPoly {
    k.subst(&bind(&[("s", var("x").pow(2))]))
}

fn reversible_system() -> impl Strategy<Value = PlanarSystem> {
    (poly(&["s", "y"], 2, 4), poly(&["s", "y"], 2, 4)).prop_map(|(a, b)| {
        let a = &a - &a.subst(&bind(&[("s", MultiPoly::zero()), ("y", MultiPoly::zero())]));
        PlanarSystem::new(even(&a), &var("x") * &even(&b))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn curve_is_even_in_x(sys in reversible_system()) {
        let Ok(r) = reversible_pipeline(&sys) else { return Ok(()) };
        if let Some(c) = r.curve_xy {
            prop_assert_eq!(c.subst(&bind(&[("x", -&var("x"))])), c);
        }
    }

    #[test]
    fn parameters_commute_with_the_curve(vals in prop::collection::vec((-9i64..=9, 1i64..=4), 7)) {
        let sys = planar("quintic.txt");
        let names = ["a1", "a2", "b1", "b2", "b3", "b4", "b5"];
        let at: HashMap<String, Rational> = names.iter().zip(&vals).map(|(n, (a, b))| (n.to_string(), q(*a, *b))).collect();
        let late = reversible_H(&sys).unwrap().h_fu.eval_partial(&at);
        let early = reversible_H(&sys.bind(&at)).unwrap();
        if late.is_zero() {
            prop_assert!(early.continuum);
        } else {
            prop_assert_eq!(late.strip_content().unwrap().0, early.h_fu);
        }
    }
}

#[test]
fn integrated_cycle_lies_on_the_curve() {
    let sys = planar("cla.txt");
    let curve = reversible_pipeline(&sys).unwrap().curve_xy.unwrap();
    assert!(curve == parse_poly_in("x^4 + 2*y^2 - 1", &["x", "y"]).unwrap());
    let s3 = build_3d(&sys).unwrap();
    let t = integrate_from(&s3, [1.0, 0.0, 0.0], &HeteroOptions::default()).unwrap();
    let c = curve.compile(&["x", "y"]).unwrap();
    let (cx, cy) = (curve.diff("x").compile(&["x", "y"]).unwrap(), curve.diff("y").compile(&["x", "y"]).unwrap());
    let n = t.samples.len();
    let mut checked = 0;
    for k in 0..50 {
        let [_, f, g, u] = t.samples[k * (n - 1) / 49];
        let v = (1.0 - u * u).sqrt();
        // both halves of the cycle: theta and pi - theta
        for v in [v, -v] {
            let r = f + v * g;
            let p = [r * v, r * u];
            let grad = cx.eval(&p).hypot(cy.eval(&p));
            assert!(c.eval(&p).abs() < 1e-6 * (1.0 + grad), "at {p:?}: {}", c.eval(&p));
            checked += 1;
        }
    }
    assert_eq!(checked, 100);
}
