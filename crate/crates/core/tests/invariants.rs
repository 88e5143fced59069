use proptest::prelude::*;

use quadlie::connection::{biinvariant_connection, levi_civita};
use quadlie::constructions::{build_oscillator, build_two_step, catalog, two_step_metric, CatalogParams, OscillatorSpec, TwoStepSpec};
use quadlie::dynamics::{energy_drift, euler_field, euler_field_quadratic, integrate_geodesic, integrate_jacobi};
use quadlie::{FloatAlgebra, IntegratorOptions, Matrix, Rational, Scalar, SymBilinearForm};

fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::from_ratio(n, d))
}

fn float_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

fn phi() -> impl Strategy<Value = Matrix<Rational>> {
    prop::collection::vec(small_rational(), 9)
        .prop_map(|v| Matrix::from_fn(3, 3, |i, j| v[3 * i + j].clone()))
        .prop_filter("invertible", |m| m.determinant() != q(0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn two_step_metrics_are_flat_and_metric(phi in phi()) {
        let spec = TwoStepSpec::<Rational>::volume_form();
        let (alg, _) = build_two_step(&spec).unwrap();
        let tm = two_step_metric(&spec.with_phi(phi)).unwrap();
        let p = levi_civita(&alg, &tm.metric).unwrap();
        prop_assert_eq!(p.torsion_residual(), q(0));
        prop_assert_eq!(p.metric_skew_residual(), Some(q(0)));
        prop_assert!(p.curvature().is_zero());
    }

    #[test]
    fn euler_paths_agree(x in prop::collection::vec(small_rational(), 6), phi in phi()) {
        let spec = TwoStepSpec::<Rational>::volume_form();
        let (alg, _) = build_two_step(&spec).unwrap();
        let tm = two_step_metric(&spec.with_phi(phi)).unwrap();
        let p = levi_civita(&alg, &tm.metric).unwrap();
        prop_assert_eq!(euler_field(&p, &x).unwrap(), euler_field_quadratic(&alg, &tm.iso, &x).unwrap());
    }

    #[test]
    fn euler_paths_agree_in_floats(x in float_vec(5)) {
        let e = catalog("dim5-nilpotent", &CatalogParams::default()).unwrap();
        let alg: FloatAlgebra = e.algebra.convert(Scalar::to_f64);
        let u = e.iso.unwrap().to_f64();
        let p = levi_civita(&alg, &e.metric.unwrap().to_f64()).unwrap();
        let a = euler_field(&p, &x).unwrap();
        let b = euler_field_quadratic(&alg, &u, &x).unwrap();
        let scale = a.iter().chain(&b).fold(1.0f64, |m, v| m.max(v.abs()));
        for (s, t) in a.iter().zip(&b) {
            prop_assert!((s - t).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn biinvariant_geodesics_are_constant(x in float_vec(6)) {
        let (alg, _) = build_oscillator(&OscillatorSpec { lambda: vec![q(1), q(2)] }).unwrap();
        let p = biinvariant_connection(&alg);
        let tr = integrate_geodesic(&p, &x, (0.0, 5.0), IntegratorOptions::default()).unwrap();
        for s in &tr.states {
            prop_assert_eq!(s, &x);
        }
    }

    #[test]
    fn energy_is_conserved(x in float_vec(3)) {
        let e = catalog("e2-motion", &CatalogParams::default()).unwrap();
        let g = e.metric.unwrap();
        let p = levi_civita(&e.algebra, &g).unwrap();
        let tr = integrate_geodesic(&p, &x, (0.0, 10.0), IntegratorOptions::default()).unwrap();
        prop_assert!(energy_drift(&tr, &g.to_f64()) <= 1e-7);
    }

    #[test]
    fn zero_initial_data_gives_zero_field(x in float_vec(4)) {
        let e = catalog("oscillator", &CatalogParams::default()).unwrap();
        let p = levi_civita(&e.algebra, e.quadratic_form.as_ref().unwrap()).unwrap();
        let tr = integrate_jacobi(&p, &x, &[0.0; 4], &[0.0; 4], (0.0, 10.0), IntegratorOptions::default()).unwrap();
        for s in &tr.states {
            prop_assert!(s[4..].iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn levi_civita_of_random_metric_on_so3(d in prop::collection::vec(1i64..=5, 3)) {
        let so3 = quadlie::LieAlgebra::<Rational>::from_brackets(
            3,
            None,
            &[(0, 1, vec![(2, q(1))]), (1, 2, vec![(0, q(1))]), (2, 0, vec![(1, q(1))])],
        )
        .unwrap();
        let g = SymBilinearForm::diagonal(&d.iter().map(|&v| q(v)).collect::<Vec<_>>()).unwrap();
        let p = levi_civita(&so3, &g).unwrap();
        prop_assert_eq!(p.torsion_residual(), q(0));
        prop_assert_eq!(p.metric_skew_residual(), Some(q(0)));
        // so(3) is compact and simple: never flat
        prop_assert!(!p.curvature().is_zero());
    }
}
