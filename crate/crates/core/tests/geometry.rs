use std::collections::BTreeMap;
use std::sync::Arc;

use sdeh_core::catalog::{build_chart, LPParams, LebrunPedersenChart};
use sdeh_core::chart::MetricChart;
use sdeh_core::curvature_package;
use sdeh_core::error::GeometryError;
use sdeh_core::hermitian::{extract_hermitian, hermitian_data, killing_residual, lee_form};
use sdeh_core::hyper::{theta_j_residual, rescale_factor, rescaled};

fn chart(name: &str, params: &[(&str, f64)]) -> Arc<dyn MetricChart> {
    let m: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    build_chart(name, &m).unwrap()
}

#[test]
fn conformally_flat_charts_have_no_hermitian_structure() {
    for name in ["flat", "sphere", "hyperbolic"] {
        let c = chart(name, &[]);
        let pkg = curvature_package(c.as_ref(), &[0.1, 0.2, -0.1, 0.3]).unwrap();
        assert_eq!(extract_hermitian(&pkg), Err(GeometryError::VanishingWeyl), "{name}");
    }
}

#[test]
fn kahler_einstein_chart_has_constant_kappa_and_no_killing_field() {
    let c = chart("fubini_study", &[]);
    let p = [0.3, -0.4, 0.2, 0.1];
    let hd = hermitian_data(c.as_ref(), &p).unwrap();
    assert!(hd.killing.is_none());
    let theta = lee_form(c.as_ref(), &p, &hd).unwrap();
    assert!(theta.route_a.iter().chain(&theta.route_b).all(|v| v.abs() < 1e-8));
    assert!(matches!(killing_residual(c.as_ref(), &p, &hd), Err(GeometryError::ConstantKappa(_))));
}

#[test]
fn canonic_kappa_is_x_cubed() {
    let c = chart("canonic", &[]);
    for p in [[1.0, 1.0, 0.0, 0.0], [1.08, 0.93, 0.4, -1.5]] {
        let hd = hermitian_data(c.as_ref(), &p).unwrap();
        assert!((hd.kappa - p[0].powi(3)).abs() < 1e-12, "{}", hd.kappa);
        let k = killing_residual(c.as_ref(), &p, &hd).unwrap();
        assert!(k.residual < 1e-5 && k.alignment.unwrap() < 1e-10);
    }
}

#[test]
fn outside_points_are_domain_errors() {
    let c = chart("canonic", &[]);
    assert!(curvature_package(c.as_ref(), &[1.0, -1.0, 0.0, 0.0]).unwrap_err().is_domain());
    let c = chart("lebrun_pedersen", &[]);
    assert!(curvature_package(c.as_ref(), &[2.0, 4.0, 0.0, 0.0]).unwrap_err().is_domain());
    assert!(build_chart("nope", &BTreeMap::new()).is_err());
    let bad: BTreeMap<String, f64> = [("q".to_string(), 1.0)].into();
    assert!(build_chart("canonic", &bad).is_err());
}

#[test]
fn rescaling_of_lebrun_pedersen_matches_closed_form() {
    for (b, c) in [(1.0, 2.0), (0.5, 1.0), (1.0, 3.0)] {
        let lp = LebrunPedersenChart::new(LPParams { b, c }).unwrap();
        let expected = lp.hyperhermitian_scale().unwrap();
        let (found, relative) = rescale_factor(&lp, &[2.0, 1.0, 0.3, 0.2]).unwrap();
        assert!((found / expected - 1.0).abs() < 1e-6, "({b}, {c}): {found} vs {expected}");
        assert!(relative < 1e-6);
    }
}

#[test]
fn theta_j_equation_fails_on_the_canonic_chart() {
    let c = chart("canonic", &[]);
    let anchor = [1.0, 1.0, 0.0, 0.0];
    let (scaled, _) = rescaled(c, &anchor).unwrap();
    assert!(theta_j_residual(&scaled, &anchor).unwrap() >= 0.1);
}

#[test]
fn canonic_metric_and_frame_at_the_base_point_are_exact() {
    let c = chart("canonic", &[]);
    let p = [1.0, 1.0, 0.0, 0.0];
    let g = c.metric_value(&p).unwrap();
    for (i, j, want) in [(0, 0, 672.0 / 551.0), (2, 2, 23.0 / 24.0), (2, 3, 1.0 / 24.0), (3, 3, 1.0)] {
        assert!((g[i][j] - want).abs() < 1e-15, "g[{i}][{j}] = {}", g[i][j]);
    }
    let frame = curvature_package(c.as_ref(), &p).unwrap().frame;
    // e⁰ = √g_xx dx, so e_0 has x-component 1/√g_xx.
    assert!((frame.coframe[0][0] - (672.0f64 / 551.0).sqrt()).abs() < 1e-15);
    assert!((frame.frame[0][0] - 1.0 / (672.0f64 / 551.0).sqrt()).abs() < 1e-15);
}
