use proptest::prelude::*;
use tropinit::tropical::{
    dual_subdivision, duality_report, enumerate_curve, newton_polytope, Monomial, TropicalPolynomial,
};
use tropinit::Window;

fn planar_poly() -> impl Strategy<Value = TropicalPolynomial> {
    prop::collection::vec(((0i64..=3, 0i64..=3), -2.0f64..2.0), 1..=8).prop_map(|terms| {
        TropicalPolynomial::new(2, terms.into_iter().map(|((a, b), c)| Monomial::new(vec![a, b], c)).collect()).unwrap()
    })
}

fn point() -> impl Strategy<Value = [f64; 2]> {
    [-5.0f64..5.0, -5.0f64..5.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn evaluation_is_convex(f in planar_poly(), x in point(), y in point(), t in 0.0f64..=1.0) {
        let z = [t * x[0] + (1.0 - t) * y[0], t * x[1] + (1.0 - t) * y[1]];
        let lhs = f.eval(&z).unwrap();
        let rhs = t * f.eval(&x).unwrap() + (1.0 - t) * f.eval(&y).unwrap();
        prop_assert!(lhs <= rhs + 1e-9);
    }

    #[test]
    fn cells_tile_the_newton_polygon(f in planar_poly()) {
        let s = dual_subdivision(&f).unwrap();
        let total = s.support_area();
        prop_assert!((s.cell_area_sum() - total).abs() <= 1e-9 * total.max(1.0));
        let support: Vec<[i64; 2]> = f.monomials().iter().map(|m| [m.exponent[0], m.exponent[1]]).collect();
        for cell in &s.cells {
            for v in cell {
                prop_assert!(support.contains(v));
            }
        }
        let np = newton_polytope(&f).unwrap();
        prop_assert_eq!(np.planar_vertices().unwrap(), s.support.clone());
    }

    #[test]
    fn duality_counts_agree(f in planar_poly()) {
        let r = duality_report(&f, &Window::square(4.0), 64).unwrap();
        prop_assert!(r.counts_match(), "{:?}", r);
    }

    #[test]
    fn hypersurface_is_the_kink_locus(f in planar_poly(), x in point(), angle in 0.0f64..std::f64::consts::TAU) {
        let d = [angle.cos(), angle.sin()];
        let h = 1e-6;
        let fx = f.eval(&x).unwrap();
        let fwd = (f.eval(&[x[0] + h * d[0], x[1] + h * d[1]]).unwrap() - fx) / h;
        let bwd = (fx - f.eval(&[x[0] - h * d[0], x[1] - h * d[1]]).unwrap()) / h;
        // Away from the curve (with margin larger than the step) F is locally affine.
        let top2 = {
            let mut v: Vec<f64> = f.monomials().iter().map(|m| m.value_at(&x)).collect();
            v.sort_by(|a, b| b.total_cmp(a));
            if v.len() > 1 { v[0] - v[1] } else { f64::INFINITY }
        };
        if top2 > 1e-3 {
            prop_assert!(!f.on_hypersurface(&x, 1e-9).unwrap());
            prop_assert!((fwd - bwd).abs() < 1e-6);
        }

        // Points on curve edges are kinks: the slope jumps across the edge normal.
        let curve = enumerate_curve(&f).unwrap();
        for e in &curve.edges {
            let t = match (e.t_min.is_finite(), e.t_max.is_finite()) {
                (true, true) => 0.5 * (e.t_min + e.t_max),
                (true, false) => e.t_min + 1.0,
                (false, true) => e.t_max - 1.0,
                (false, false) => 0.0,
            };
            let p = e.point_at(t);
            prop_assert!(f.on_hypersurface(&p, 1e-9).unwrap());
            let n = [-e.dir[1], e.dir[0]];
            let fp = f.eval(&p).unwrap();
            let fwd = (f.eval(&[p[0] + h * n[0], p[1] + h * n[1]]).unwrap() - fp) / h;
            let bwd = (fp - f.eval(&[p[0] - h * n[0], p[1] - h * n[1]]).unwrap()) / h;
            prop_assert!(fwd - bwd > 0.5, "slope jump {} at {:?}", fwd - bwd, p);
        }
    }
}

#[test]
fn json_file_format() {
    let text = r#"{"dim": 2, "monomials": [
        {"u": [0, 0], "c": 0.0}, {"u": [1, 0], "c": 0.0}, {"u": [0, 1], "c": 0.0}
    ]}"#;
    let f: TropicalPolynomial = serde_json::from_str(text).unwrap();
    assert_eq!(f.eval(&[2.0, 1.0]).unwrap(), 2.0);
    assert!(f.on_hypersurface(&[0.0, 0.0], 1e-9).unwrap());
}
