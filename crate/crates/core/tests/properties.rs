use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use sdeh_core::catalog::build_chart;
use sdeh_core::chart::{MetricChart, Point, ScaledChart};
use sdeh_core::curvature_package;
use sdeh_core::forms::inner2;
use sdeh_core::frobenius::{
    closed_form_jets, closed_form_pq, frobenius_rhs, ode_f_residual, FrobeniusState, SolutionConstants,
};
use sdeh_core::hermitian::{extract_hermitian, hermitian_data};
use sdeh_core::hyper::hyper_lee_forms;
use sdeh_core::jet::Jet2;
use sdeh_core::linalg::{inverse4, matmul4, norm4, transpose4, Mat4, IDENTITY4};

fn canonic() -> Arc<dyn MetricChart> {
    build_chart("canonic", &BTreeMap::new()).unwrap()
}

fn lebrun_pedersen() -> Arc<dyn MetricChart> {
    build_chart("lebrun_pedersen", &BTreeMap::new()).unwrap()
}

fn canonic_point() -> impl Strategy<Value = Point> {
    (0.9f64..1.1, 0.9f64..1.1, -1.0f64..1.0, -2.0f64..2.0).prop_map(|(x, y, z, t)| [x, y, z, t])
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet_product_and_quotient_rules(u in -2.0f64..2.0, v in 0.5f64..2.0, w in -1.0f64..1.0) {
        let x = Jet2::variable(u, 0);
        let y = Jet2::variable(v, 1);
        let z = Jet2::variable(w, 2);
        // f = x² y / (1 + y²) + sin(x z)
        let f = x * x * y / (y * y + 1.0) + (x * z).sin();
        let q = 1.0 + v * v;
        prop_assert!(close(f.value(), u * u * v / q + (u * w).sin(), 1e-14));
        prop_assert!(close(f.d(0), 2.0 * u * v / q + w * (u * w).cos(), 1e-13));
        prop_assert!(close(f.d(1), u * u * (1.0 - v * v) / (q * q), 1e-13));
        prop_assert!(close(f.d(2), u * (u * w).cos(), 1e-13));
        prop_assert!(close(f.hess(0, 0), 2.0 * v / q - w * w * (u * w).sin(), 1e-13));
        prop_assert!(close(f.hess(0, 2), (u * w).cos() - u * w * (u * w).sin(), 1e-13));
        prop_assert!(close(f.hess(1, 1), u * u * (2.0 * v * v * v - 6.0 * v) / (q * q * q), 1e-12));
        prop_assert!(f.hess(0, 1) == f.hess(1, 0) && f.d(3) == 0.0);
    }

    #[test]
    fn jet_exp_ln_and_powers_invert(u in 0.2f64..3.0) {
        let x = Jet2::variable(u, 1);
        let back = x.ln().exp();
        prop_assert!(close(back.value(), u, 1e-14) && close(back.d(1), 1.0, 1e-13) && back.hess(1, 1).abs() < 1e-12);
        let r = x.powf(1.5).powf(2.0 / 3.0);
        prop_assert!(close(r.d(1), 1.0, 1e-12) && r.hess(1, 1).abs() < 1e-11);
        let c = x.cbrt().powi(3);
        prop_assert!(close(c.value(), u, 1e-14) && close(c.d(1), 1.0, 1e-12));
    }

    #[test]
    fn matrix_inverse_and_transpose(entries in proptest::array::uniform16(-1.0f64..1.0)) {
        // Symmetric positive definite: B Bᵀ + I.
        let b: Mat4 = std::array::from_fn(|i| std::array::from_fn(|j| entries[4 * i + j]));
        let mut a = matmul4(&b, &transpose4(&b));
        for (i, row) in a.iter_mut().enumerate() {
            row[i] += 1.0;
        }
        let inv = inverse4(&a).unwrap();
        let e = matmul4(&a, &inv);
        let err: f64 = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| (e[i][j] - IDENTITY4[i][j]).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
        prop_assert_eq!(transpose4(&transpose4(&b)), b);
    }

    #[test]
    fn extracted_structure_is_orthogonal_complex_structure(p in canonic_point()) {
        let chart = canonic();
        let pkg = curvature_package(chart.as_ref(), &p).unwrap();
        let hd = extract_hermitian(&pkg).unwrap();
        let j2 = matmul4(&hd.j, &hd.j);
        let square: f64 = (0..4).flat_map(|i| (0..4).map(move |k| (i, k))).map(|(i, k)| (j2[i][k] + IDENTITY4[i][k]).abs()).fold(0.0, f64::max);
        prop_assert!(square < 1e-12, "J² + 1 = {square}");
        let g = pkg.metric;
        let jgj = matmul4(&transpose4(&hd.j), &matmul4(&g, &hd.j));
        let orth: f64 = (0..4).flat_map(|i| (0..4).map(move |k| (i, k))).map(|(i, k)| (jgj[i][k] - g[i][k]).abs()).fold(0.0, f64::max);
        prop_assert!(orth < 1e-12 * norm4(&g).max(1.0));
        prop_assert!(close(inner2(&hd.f, &hd.f, &pkg.metric_inv), 2.0, 1e-12));
    }

    #[test]
    fn extraction_is_stable_under_constant_rescaling(p in canonic_point(), log_c in -3.0f64..3.0) {
        let c = log_c.exp();
        let chart = canonic();
        let scaled = ScaledChart::new(chart.clone(), c).unwrap();
        let a = extract_hermitian(&curvature_package(chart.as_ref(), &p).unwrap()).unwrap();
        let b = extract_hermitian(&curvature_package(&scaled, &p).unwrap()).unwrap();
        // F scales with the metric, J does not, κ scales inversely.
        let sign = if inner2(&a.f, &b.f, &IDENTITY4) >= 0.0 { 1.0 } else { -1.0 };
        for i in 0..4 {
            for k in 0..4 {
                prop_assert!((sign * b.j[i][k] - a.j[i][k]).abs() < 1e-10);
                prop_assert!((sign * b.f[i][k] - c * a.f[i][k]).abs() < 1e-10 * c.max(1.0));
            }
        }
        prop_assert!(close(b.kappa * c, a.kappa, 1e-10));
    }

    #[test]
    fn closed_form_solves_the_first_order_system(
        s in -6.0f64..6.0, a in -2.0f64..2.0, b in -2.0f64..2.0, x in 0.3f64..2.0, y in 0.3f64..2.0,
    ) {
        let c = SolutionConstants { s, a, b };
        let (p, q2) = closed_form_jets(&c, Jet2::variable(x, 0), Jet2::variable(y, 1));
        let rhs = frobenius_rhs(&FrobeniusState { x, y, p: p.value(), q2: q2.value() }, &c);
        let scale = 1.0 + rhs.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for (got, want) in [p.d(0), p.d(1), q2.d(0), q2.d(1)].iter().zip(&rhs) {
            prop_assert!((got - want).abs() < 1e-11 * scale, "{got} vs {want}");
        }
    }

    #[test]
    fn ode_residual_vanishes_for_the_closed_form(s in -6.0f64..6.0, a in -2.0f64..2.0, b in -2.0f64..2.0, x in 0.2f64..2.0) {
        let r = ode_f_residual(&SolutionConstants { s, a, b }, x);
        prop_assert!(r.abs() < 1e-12, "residual {r}");
    }
}

/// Total derivatives along the system, by central differences in the state.
fn compatibility_defect(st: &FrobeniusState, c: &SolutionConstants) -> [f64; 2] {
    let rhs = |x: f64, y: f64, p: f64, q2: f64| frobenius_rhs(&FrobeniusState { x, y, p, q2 }, c);
    let h = 1e-5;
    let d = |k: usize| -> [f64; 4] {
        let mut lo = [st.x, st.y, st.p, st.q2];
        let mut hi = lo;
        lo[k] -= h;
        hi[k] += h;
        let a = rhs(lo[0], lo[1], lo[2], lo[3]);
        let b = rhs(hi[0], hi[1], hi[2], hi[3]);
        std::array::from_fn(|i| (b[i] - a[i]) / (2.0 * h))
    };
    let [dx, dy, dp, dq] = [d(0), d(1), d(2), d(3)];
    let [px, py, qx, qy] = rhs(st.x, st.y, st.p, st.q2);
    // D_x = ∂_x + p_x ∂_p + q_x ∂_q, D_y likewise; components [px, py, qx, qy].
    let total_x = |i: usize| dx[i] + px * dp[i] + qx * dq[i];
    let total_y = |i: usize| dy[i] + py * dp[i] + qy * dq[i];
    [total_y(0) - total_x(1), total_y(2) - total_x(3)]
}

#[test]
fn first_order_system_has_commuting_mixed_partials() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let c = SolutionConstants { s: rng.gen_range(-6.0..6.0), a: rng.gen_range(-2.0..2.0), b: rng.gen_range(-2.0..2.0) };
        let st = FrobeniusState {
            x: rng.gen_range(0.5..2.0),
            y: rng.gen_range(0.5..2.0),
            p: rng.gen_range(-2.0..2.0),
            q2: rng.gen_range(-2.0..2.0),
        };
        let [d1, d2] = compatibility_defect(&st, &c);
        assert!(d1.abs() < 1e-6 && d2.abs() < 1e-6, "{st:?} {c:?}: defects {d1} {d2}");
    }
}

#[test]
fn spot_values_of_the_system_are_exact() {
    let c = SolutionConstants { s: 0.0, a: -695.0 / 576.0, b: 1.0 };
    let (p, q2) = closed_form_pq(&c, 1.0, 1.0);
    assert!(p.abs() < 1e-15 && (q2 - 551.0 / 576.0).abs() < 1e-15);
    let [px, py, _, _] = frobenius_rhs(&FrobeniusState { x: 1.0, y: 1.0, p: 0.0, q2: 551.0 / 576.0 }, &c);
    assert!((px - 209.0 / 144.0).abs() < 1e-15 && (py - 11.0 / 24.0).abs() < 1e-15);
    let (p, q2) = closed_form_pq(&SolutionConstants { s: 0.0, a: 1.0, b: 1.0 }, 1.0, 1.0);
    assert!((p - 1271.0 / 576.0).abs() < 1e-14 && q2 < 0.0);
}

#[test]
fn hyperhermitian_lee_forms_recombine_into_theta_j() {
    let chart = lebrun_pedersen();
    for p in [[2.0, 1.0, 0.3, 0.2], [1.7, 0.6, 1.0, -2.0], [2.6, 2.0, 4.0, 1.0]] {
        let hd = hermitian_data(chart.as_ref(), &p).unwrap();
        let wd = hyper_lee_forms(&hd).unwrap();
        let l13 = wd.lambda.cbrt();
        let half = 0.5 * (1.0 + l13 * l13);
        for k in 0..4 {
            let sum = half * (wd.theta_prime[k] + wd.theta_second[k]);
            let diff = half * (wd.theta_second[k] - wd.theta_prime[k]);
            assert!((sum - wd.theta_j[k]).abs() <= 1e-12 * (1.0 + wd.theta_j[k].abs()));
            assert!((diff - l13 * wd.j_theta_j[k]).abs() <= 1e-12 * (1.0 + wd.j_theta_j[k].abs()));
        }
    }
}
