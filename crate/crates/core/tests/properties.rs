use proptest::prelude::*;

use pg4::curve::{AdmissibleCurve, Helix};
use pg4::energy::{energy_s, Field};
use pg4::flow::extended::{extended_frenet_matrix, skew_defect, ExtendedCoeffs};
use pg4::frenet::{FrenetApparatus, Signs};
use pg4::numerics::{det4, simpson, simpson_with_estimate, Stencil};
use pg4::vector::{pg_cross, pg_dot, pg_norm, PgVec4};

fn coord() -> impl Strategy<Value = f64> {
    -10.0..10.0f64
}

fn vec4() -> impl Strategy<Value = PgVec4> {
    (coord(), coord(), coord(), coord()).prop_map(|(x, y, z, w)| PgVec4::new(x, y, z, w))
}

fn isotropic() -> impl Strategy<Value = PgVec4> {
    (coord(), coord(), coord()).prop_map(|(y, z, w)| PgVec4::new(0.0, y, z, w))
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-9 * scale.max(1.0)
}

proptest! {
    #[test]
    fn dot_is_symmetric(u in vec4(), v in vec4()) {
        prop_assert_eq!(pg_dot(u, v), pg_dot(v, u));
    }

    #[test]
    fn dot_is_bilinear_on_isotropic_vectors(u in isotropic(), u2 in isotropic(), v in isotropic(), a in coord(), b in coord()) {
        let lhs = pg_dot(u * a + u2 * b, v);
        let rhs = a * pg_dot(u, v) + b * pg_dot(u2, v);
        prop_assert!(close(lhs, rhs, 1e4));
    }

    #[test]
    fn norm_is_non_negative(u in vec4()) {
        prop_assert!(pg_norm(u) >= 0.0);
    }

    #[test]
    fn lightlike_vectors_have_zero_norm(y in coord(), angle in 0.0..std::f64::consts::TAU) {
        let u = PgVec4::new(0.0, y, y * angle.cos(), y * angle.sin());
        prop_assert!(pg_norm(u) <= 1e-6 * y.abs().max(1.0));
    }

    #[test]
    fn cross_with_non_isotropic_operand_has_zero_first_component(u in vec4(), v in vec4(), w in vec4()) {
        prop_assume!(u.x.abs() > 1e-6);
        prop_assert_eq!(pg_cross(u, v, w).x, 0.0);
    }

    #[test]
    fn cross_alternates_on_isotropic_operands(u in isotropic(), v in isotropic(), w in isotropic()) {
        let a = pg_cross(u, v, w);
        let b = pg_cross(u, w, v);
        prop_assert!((a + b).max_abs() <= 1e-9 * a.max_abs().max(1.0));
    }

    #[test]
    fn det_is_alternating(a in vec4(), b in vec4(), c in vec4(), d in vec4()) {
        let base = det4([a, b, c, d]);
        prop_assert!(close(det4([b, a, c, d]), -base, 1e4));
        prop_assert!(close(det4([a, b, d, c]), -base, 1e4));
        prop_assert!(det4([a, a, c, d]).abs() <= 1e-9 * 1e4);
    }

    #[test]
    fn det_is_multilinear(a in vec4(), a2 in vec4(), b in vec4(), c in vec4(), d in vec4(), s in coord()) {
        let lhs = det4([a + a2 * s, b, c, d]);
        let rhs = det4([a, b, c, d]) + s * det4([a2, b, c, d]);
        prop_assert!(close(lhs, rhs, 1e6));
    }

    #[test]
    fn simpson_is_exact_on_cubics(c in prop::array::uniform4(-5.0..5.0f64), lo in -3.0..0.0f64, len in 0.5..4.0f64, n in 3usize..60) {
        let f = |x: f64| c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x;
        let prim = |x: f64| c[0] * x + c[1] * x * x / 2.0 + c[2] * x.powi(3) / 3.0 + c[3] * x.powi(4) / 4.0;
        let h = len / (n - 1) as f64;
        let samples: Vec<f64> = (0..n).map(|i| f(lo + i as f64 * h)).collect();
        let exact = prim(lo + len) - prim(lo);
        prop_assert!(close(simpson(&samples, h).unwrap(), exact, 1e3));
    }

    #[test]
    fn stencils_satisfy_moment_conditions(derivative in 1usize..5, accuracy in 1usize..5, shift in 0i64..6) {
        let accuracy = 2 * accuracy;
        let width = (derivative + accuracy) as i64;
        let stencil = Stencil::shifted(derivative, accuracy, -shift.min(width - 1)).unwrap();
        prop_assert!(stencil.moment_defect() <= 1e-12);
    }

    #[test]
    fn extended_matrix_is_eps_skew(xi in prop::array::uniform3(-5.0..5.0f64), g in prop::array::uniform3(-5.0..5.0f64), e1 in prop::bool::ANY, e2 in prop::bool::ANY) {
        let pm = |b: bool| if b { 1.0 } else { -1.0 };
        let signs = Signs::from_pair(pm(e1), pm(e2));
        let m = extended_frenet_matrix(&ExtendedCoeffs::from_parts(xi, g), &signs);
        prop_assert_eq!(skew_defect(&m, &signs), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_is_additive(split in 20usize..230, field in 0usize..4, amp in 0.0..0.3f64) {
        let helix = Helix::new(1.0, 1.0, 1.5).with_wobble(amp, 2.0);
        let curve = AdmissibleCurve::analytic(helix, (0.0, 3.0), 251).unwrap();
        let ap = FrenetApparatus::compute(&curve).unwrap();
        let field = Field::ALL[field];
        let c = curve.grid.at(split);
        let whole = energy_s(&ap, field, (0.0, 3.0)).unwrap();
        let left = energy_s(&ap, field, (0.0, c)).unwrap();
        let right = energy_s(&ap, field, (c, 3.0)).unwrap();
        prop_assert!((whole.value - left.value - right.value).abs() <= 1e-7, "{} vs {}", whole.value, left.value + right.value);
    }
}

#[test]
fn helix_frames_have_fixed_first_components() {
    let ap = FrenetApparatus::compute(
        &AdmissibleCurve::analytic(Helix::new(1.0, 1.0, 2.0), (0.0, 6.0), 64).unwrap(),
    )
    .unwrap();
    for p in &ap.points {
        assert_eq!(p.tangent.x, 1.0);
        assert_eq!((p.normal.x, p.binormal1.x, p.binormal2.x), (0.0, 0.0, 0.0));
        let frame = p.frame();
        let g = ap.signs.gram();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { g[i] } else { 0.0 };
                assert!((pg_dot(frame[i], frame[j]) - want).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn simpson_converges_at_fourth_order() {
    let rate = |n: usize| {
        let h = 2.0 / (n - 1) as f64;
        let s: Vec<f64> = (0..n).map(|i| (i as f64 * h).exp()).collect();
        (simpson_with_estimate(&s, h).unwrap().value - (2f64.exp() - 1.0)).abs()
    };
    let order = (rate(21) / rate(41)).log2();
    assert!(order >= 3.8, "observed order {order}");
}

#[test]
fn stored_integrand_reproduces_energy() {
    let ap = FrenetApparatus::compute(
        &AdmissibleCurve::analytic(
            Helix::new(1.0, 1.0, 2.0).with_wobble(0.2, 3.0),
            (0.0, 4.0),
            101,
        )
        .unwrap(),
    )
    .unwrap();
    let report = energy_s(&ap, Field::T, (0.0, 4.0)).unwrap();
    assert_eq!(simpson(&report.samples, ap.grid().h).unwrap(), report.value);
}
