//! Property tests for the algebraic and operator invariants.

use std::f64::consts::PI;

use octosusy::algebra::{associator, to_zorn, Basis, Octonion};
use octosusy::expr::{parse_oct_expr, parse_scalar_expr, Var};
use octosusy::grid::{Grid, ScalarField};
use octosusy::observability::{is_representable, scalar_product, Side, WaveFunction};
use octosusy::operator::{octop_apply, ScalarOperator, Scheme, Supercharges};
use octosusy::{random, Scalar};
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = Scalar> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Scalar::new(re, im))
}

fn octonion() -> impl Strategy<Value = Octonion> {
    prop::array::uniform8(coeff()).prop_map(|c| Octonion::new(c, Basis::Real))
}

fn real_octonion() -> impl Strategy<Value = Octonion> {
    prop::array::uniform8(-1.0f64..1.0).prop_map(|c| Octonion::from_real_parts(c, Basis::Real))
}

fn rel(a: Scalar, b: Scalar) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

proptest! {
    #[test]
    fn quadratic_form_composes(x in octonion(), y in octonion()) {
        prop_assert!(rel(x.mul_oct(&y).quadratic_form(), x.quadratic_form() * y.quadratic_form()) <= 1e-10);
    }

    #[test]
    fn real_octonions_have_no_zero_divisors(x in real_octonion(), y in real_octonion()) {
        let n = x.mul_oct(&y).quadratic_form();
        prop_assert!(n.im.abs() <= 1e-12);
        prop_assert!((n.re - x.quadratic_form().re * y.quadratic_form().re).abs() <= 1e-12);
    }

    #[test]
    fn alternative_laws(x in octonion(), y in octonion()) {
        prop_assert!(associator(&x, &x, &y).max_abs() <= 1e-12);
        prop_assert!(associator(&x, &y, &y).max_abs() <= 1e-12);
        prop_assert!(associator(&x, &y, &x).max_abs() <= 1e-12);
    }

    #[test]
    fn zorn_map_is_multiplicative(x in octonion(), y in octonion()) {
        let lhs = to_zorn(&x.mul_oct(&y));
        let rhs = to_zorn(&x).mul_zorn(&to_zorn(&y));
        prop_assert!(lhs.approx_eq(&rhs, 1e-12));
        prop_assert!(rel(to_zorn(&x).norm(), x.quadratic_form()) <= 1e-12);
    }

    #[test]
    fn basis_change_round_trips(x in octonion()) {
        prop_assert!(x.to_split().to_real().distance(&x) <= 1e-14);
    }

    #[test]
    fn conjugation_is_an_antiautomorphism(x in octonion(), y in octonion()) {
        prop_assert!(x.mul_oct(&y).conj().distance(&y.conj().mul_oct(&x.conj())) <= 1e-12);
    }

    #[test]
    fn oct_printing_round_trips(x in prop::array::uniform8(-4i32..4)) {
        let o = Octonion::from_real_parts(x.map(f64::from), Basis::Split);
        let text = o.to_string();
        let back = parse_oct_expr(&text).map(|e| e.eval());
        prop_assert!(back.is_ok(), "{text}");
        prop_assert!(back.unwrap().distance(&o) == 0.0, "{text}");
    }
}

fn scalar_source() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        Just("y".to_string()),
        Just("z".to_string()),
        (1u32..9).prop_map(|n| format!("{}", f64::from(n) / 4.0)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}*{b}")),
            (inner.clone(), 1u32..4).prop_map(|(a, n)| format!("({a})^{n}")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.prop_map(|a| format!("-{a}")),
        ]
    })
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-1.5f64..1.5)
}

proptest! {
    #[test]
    fn scalar_printing_round_trips(src in scalar_source(), p in point()) {
        let e = parse_scalar_expr(&src).unwrap();
        let again = parse_scalar_expr(&e.to_string()).unwrap();
        let (a, b) = (e.eval(p).unwrap(), again.eval(p).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{src} vs {}", e);
    }

    #[test]
    fn derivative_matches_central_difference(src in scalar_source(), p in point(), axis in 0usize..3) {
        let e = parse_scalar_expr(&src).unwrap();
        let d = e.differentiate(Var::from_axis(axis)).eval(p).unwrap();
        let h = 1e-5;
        let (mut lo, mut hi) = (p, p);
        lo[axis] -= h;
        hi[axis] += h;
        let fd = (e.eval(hi).unwrap() - e.eval(lo).unwrap()) / (2.0 * h);
        prop_assert!((d - fd).abs() <= 1e-5 * (1.0 + d.abs()), "{src}: {d} vs {fd}");
    }
}

fn grid() -> Grid {
    Grid::cubic(8, 2.0 * PI).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn momentum_is_hermitian_and_axes_commute(seed in any::<u64>(), a in 0usize..3, b in 0usize..3) {
        let g = grid();
        let mut rng = random::rng(seed, 0);
        let f = ScalarField::random_band_limited(g, 2, &mut rng);
        let h = ScalarField::random_band_limited(g, 2, &mut rng);
        let (pa, pb) = (ScalarOperator::momentum(g, a, Scheme::Spectral), ScalarOperator::momentum(g, b, Scheme::Spectral));
        let lhs = f.inner(&pa.apply(&h).unwrap()).unwrap();
        let rhs = pa.apply(&f).unwrap().inner(&h).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        let ab = pa.compose(&pb).apply(&f).unwrap();
        let ba = pb.compose(&pa).apply(&f).unwrap();
        prop_assert!(ab.sub(&ba).unwrap().norm() <= 1e-12 * (1.0 + ab.norm()));
    }

    #[test]
    fn operators_are_linear(seed in any::<u64>(), c in coeff()) {
        let g = grid();
        let s = Supercharges::new(&parse_scalar_expr("cos(x) + sin(y)").unwrap(), &g, Scheme::Spectral).unwrap();
        let h = s.hamiltonian().h_plus;
        let mut rng = random::rng(seed, 1);
        let f = ScalarField::random_band_limited(g, 2, &mut rng);
        let k = ScalarField::random_band_limited(g, 2, &mut rng);
        let lhs = h.apply(&f.scale(c).add(&k).unwrap()).unwrap();
        let rhs = h.apply(&f).unwrap().scale(c).add(&h.apply(&k).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn hamiltonian_keeps_kets_representable(seed in any::<u64>()) {
        let g = grid();
        let s = Supercharges::new(&parse_scalar_expr("cos(x) + cos(y) + cos(z)").unwrap(), &g, Scheme::Spectral).unwrap();
        let mut rng = random::rng(seed, 2);
        let w = WaveFunction::random(g, 2, &mut rng);
        let out = octop_apply(&s.hamiltonian().h, &w.to_oct_field(Side::Ket)).unwrap();
        prop_assert!(is_representable(&out).representable);
    }

    #[test]
    fn scalar_product_is_hermitian(seed in any::<u64>()) {
        let g = grid();
        let mut rng = random::rng(seed, 3);
        let a = WaveFunction::random(g, 2, &mut rng);
        let b = WaveFunction::random(g, 2, &mut rng);
        let ab = scalar_product(&a, &b).unwrap();
        let ba = scalar_product(&b, &a).unwrap();
        prop_assert!((ab - ba.conj()).norm() <= 1e-12 * (1.0 + ab.norm()));
        prop_assert!(scalar_product(&a, &a).unwrap().re > 0.0);
    }
}
