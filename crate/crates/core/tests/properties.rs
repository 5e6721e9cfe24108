use proptest::prelude::*;

use thermolen::eos::{StatePoint, VirialEos, GAS_CONSTANT};
use thermolen::length::{isotherm_length_closed, isotherm_length_quadrature};
use thermolen::metric::{Character, MetricAtPoint, Signature};
use thermolen::quad::{integrate, QuadratureConfig};
use thermolen::response::{from_eos, HeatCapacityModel};

const R: f64 = GAS_CONSTANT;

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Second- or third-order gases that stay mechanically stable for v ≥ 1e-3.
fn stable_eos() -> impl Strategy<Value = VirialEos> {
    prop_oneof![
        Just(VirialEos::ideal(R).unwrap()),
        (1e-6f64..1e-4).prop_map(|b| VirialEos::quasi_ideal(R, b).unwrap()),
        (-2e-4f64..2e-4).prop_map(|b| VirialEos::virial(R, vec![b]).unwrap()),
        (-2e-4f64..2e-4, 1e-9f64..5e-8).prop_map(|(b, c)| VirialEos::virial(R, vec![b, c]).unwrap()),
    ]
}

fn with_zero_slopes(eos: VirialEos) -> VirialEos {
    let n = eos.coefficients().len();
    if eos.is_quasi_ideal() {
        eos
    } else {
        eos.with_temperature_derivatives(vec![0.0; n], None).unwrap()
    }
}

proptest! {
    #[test]
    fn work_is_antisymmetric_and_additive(
        eos in stable_eos(),
        t in 50.0f64..2000.0,
        a in 1e-3f64..0.5,
        b in 1e-3f64..0.5,
        c in 1e-3f64..0.5,
    ) {
        prop_assert_eq!(eos.work(t, a, b).unwrap(), -eos.work(t, b, a).unwrap());
        let whole = eos.work(t, a, c).unwrap();
        let split = eos.work(t, a, b).unwrap() + eos.work(t, b, c).unwrap();
        // Cancellation between the pieces limits the relative error of the sum.
        let scale = eos.work(t, a, b).unwrap().abs() + eos.work(t, b, c).unwrap().abs();
        prop_assert!((whole - split).abs() <= 1e-12 * scale.max(whole.abs()));
    }

    #[test]
    fn dp_dv_matches_central_difference(eos in stable_eos(), t in 50.0f64..2000.0, v in 1e-3f64..1.0) {
        let h = 1e-6 * v;
        let p = |v| eos.pressure(StatePoint::new(t, v).unwrap()).unwrap();
        let fd = (p(v + h) - p(v - h)) / (2.0 * h);
        let exact = eos.dp_dv(StatePoint::new(t, v).unwrap()).unwrap();
        prop_assert!(exact < 0.0);
        prop_assert!(rel(exact, fd) <= 1e-6, "exact {exact} fd {fd}");
    }

    #[test]
    fn metric_structure_on_stable_states(
        eos in stable_eos(),
        t in 50.0f64..2000.0,
        v in 1e-3f64..1.0,
        cv_factor in 0.5f64..5.0,
    ) {
        let eos = with_zero_slopes(eos);
        let s = StatePoint::new(t, v).unwrap();
        let r = from_eos(&eos, s, HeatCapacityModel::Constant(cv_factor * R)).unwrap();
        let m = MetricAtPoint::assemble(&r, s).unwrap();
        prop_assert!(m.lambda1 < 0.0 && m.lambda2 > 0.0);
        prop_assert!(m.det < 0.0);
        prop_assert_eq!(m.signature(), Signature::Lorentzian);
        let res = m.residuals();
        prop_assert!(res.det_response <= 1e-12, "{:?}", res);
        prop_assert!(res.det_eigen <= 1e-12, "{:?}", res);
        prop_assert!(res.mayer <= 1e-12, "{:?}", res);
        prop_assert!(res.reconstruction <= 1e-12, "{:?}", res);
        prop_assert!(res.inverse <= 1e-12, "{:?}", res);
        prop_assert!(res.delta <= 1e-12, "{:?}", res);
        let [e1, e2] = m.eigen_residuals();
        prop_assert!(e1 <= 1e-10 && e2 <= 1e-10);
    }

    #[test]
    fn vector_character_is_scale_invariant(
        t in 50.0f64..2000.0,
        v in 1e-3f64..1.0,
        dt in -10.0f64..10.0,
        dv in -1e-2f64..1e-2,
        k in prop_oneof![-1e6f64..-1e-6, 1e-6f64..1e6],
    ) {
        prop_assume!(dt != 0.0 || dv != 0.0);
        let eos = VirialEos::ideal(R).unwrap();
        let s = StatePoint::new(t, v).unwrap();
        let m = MetricAtPoint::assemble(&from_eos(&eos, s, HeatCapacityModel::monatomic(R)).unwrap(), s).unwrap();
        let a = m.classify_vector(dt, dv, 1e-10).unwrap();
        let b = m.classify_vector(k * dt, k * dv, 1e-10).unwrap();
        prop_assert_eq!(a.character, b.character);
        for x in m.null_directions().unwrap() {
            prop_assert_eq!(m.classify_vector(k, k * x, 1e-10).unwrap().character, Character::NullLike);
        }
    }

    #[test]
    fn length_is_additive_and_monotone(
        eos in stable_eos(),
        t in 50.0f64..2000.0,
        v1 in 2e-3f64..0.05,
        r1 in 1.01f64..3.0,
        r2 in 1.01f64..3.0,
    ) {
        let cfg = QuadratureConfig { rel_tol: 1e-12, ..Default::default() };
        let (v2, v3) = (v1 * r1, v1 * r1 * r2);
        let l = |a, b| isotherm_length_closed(&eos, t, a, b).unwrap().value;
        prop_assert!(rel(l(v1, v2) + l(v2, v3), l(v1, v3)) <= 1e-10);
        prop_assert!(l(v1, v3) > l(v1, v2));
        let q = |a, b| isotherm_length_quadrature(&eos, t, a, b, &cfg).unwrap().value;
        prop_assert!(rel(q(v1, v2) + q(v2, v3), q(v1, v3)) <= 1e-10);
    }

    #[test]
    fn quadrature_is_linear_and_interval_additive(
        a in -3.0f64..0.0,
        m in 0.1f64..2.0,
        w in 0.1f64..2.0,
        alpha in -5.0f64..5.0,
        beta in -5.0f64..5.0,
    ) {
        let cfg = QuadratureConfig::default();
        let (b, c) = (a + m, a + m + w);
        let f = |x: f64| Ok((2.0 * x).sin() + x * x);
        let g = |x: f64| Ok((x + 4.0).ln() * (-0.3 * x).exp());
        let fa = integrate(f, a, c, &cfg).unwrap();
        let f1 = integrate(f, a, b, &cfg).unwrap();
        let f2 = integrate(f, b, c, &cfg).unwrap();
        prop_assert!((fa.value - f1.value - f2.value).abs() <= fa.err_estimate + f1.err_estimate + f2.err_estimate + 1e-14);

        let ga = integrate(g, a, c, &cfg).unwrap();
        let combined = integrate(|x| Ok(alpha * f(x)? + beta * g(x)?), a, c, &cfg).unwrap();
        let expected = alpha * fa.value + beta * ga.value;
        let bound = combined.err_estimate + alpha.abs() * fa.err_estimate + beta.abs() * ga.err_estimate;
        prop_assert!((combined.value - expected).abs() <= bound + 1e-13 * expected.abs().max(1.0));
    }
}

#[test]
fn quadrature_error_estimates_are_honest() {
    use std::f64::consts::PI;
    type Case = (fn(f64) -> f64, f64, f64, f64);
    let cases: [Case; 7] = [
        (|x| 1.0 / x, 1.0, 2.0, std::f64::consts::LN_2),
        (|x| x.exp(), 0.0, 1.0, std::f64::consts::E - 1.0),
        (|x| x.sin(), 0.0, PI, 2.0),
        (|x| 1.0 / (1.0 + x * x), 0.0, 1.0, PI / 4.0),
        (|x| x.sqrt(), 0.0, 1.0, 2.0 / 3.0),
        (|x| (-x * x).exp(), 0.0, 10.0, 0.886_226_925_452_758),
        (|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 2.0 * 100.0 * (100.0f64).atan()),
    ];
    for (rel_tol, abs_tol) in [(1e-6, 1e-10), (1e-10, 1e-14)] {
        let cfg = QuadratureConfig { rel_tol, abs_tol, max_depth: 60 };
        for (f, a, b, exact) in cases {
            let q = integrate(|x| Ok(f(x)), a, b, &cfg).unwrap();
            let err = (q.value - exact).abs();
            assert!(
                err <= 10.0 * q.err_estimate.max(2.0 * f64::EPSILON * exact.abs()),
                "∫ on [{a}, {b}]: err {err:e} vs estimate {:e}",
                q.err_estimate
            );
        }
    }
}
