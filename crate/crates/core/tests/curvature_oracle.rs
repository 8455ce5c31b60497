//! Curvature of the catalog charts against an independent oracle that only
//! sees metric values: Christoffel symbols from finite differences of `g`,
//! Ricci from finite differences of those, inverses through nalgebra.

use std::collections::BTreeMap;

use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sdeh_core::catalog::build_chart;
use sdeh_core::chart::{MetricChart, Point};
use sdeh_core::curvature_package;

type G = [[f64; 4]; 4];
type Gamma = [[[f64; 4]; 4]; 4];

fn five_point<T, F: Fn(&Point) -> T>(f: &F, p: &Point, k: usize, h: f64, combine: impl Fn(&[T; 4]) -> T) -> T {
    let at = |d: f64| {
        let mut q = *p;
        q[k] += d * h;
        f(&q)
    };
    combine(&[at(-2.0), at(-1.0), at(1.0), at(2.0)])
}

fn stencil(v: [f64; 4], h: f64) -> f64 {
    (v[0] - 8.0 * v[1] + 8.0 * v[2] - v[3]) / (12.0 * h)
}

fn inverse(g: &G) -> G {
    let m = Matrix4::from_fn(|i, j| g[i][j]).try_inverse().expect("metric invertible");
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

fn christoffel(chart: &dyn MetricChart, p: &Point, h: f64) -> Gamma {
    let g = |q: &Point| chart.metric_value(q).expect("stencil inside domain");
    let dg: [G; 4] = std::array::from_fn(|k| {
        five_point(&g, p, k, h, |v| std::array::from_fn(|i| std::array::from_fn(|j| stencil(v.map(|m| m[i][j]), h))))
    });
    let gi = inverse(&g(p));
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            std::array::from_fn(|c| {
                (0..4).map(|d| 0.5 * gi[a][d] * (dg[b][d][c] + dg[c][d][b] - dg[d][b][c])).sum()
            })
        })
    })
}

/// `(Ric_bd, s)` with `Ric_bd = ∂_a Γ^a_db - ∂_d Γ^a_ab + Γ^a_ae Γ^e_db - Γ^a_de Γ^e_ab`.
fn oracle_ricci(chart: &dyn MetricChart, p: &Point, h_inner: f64, h_outer: f64) -> (G, f64) {
    let gam = |q: &Point| christoffel(chart, q, h_inner);
    let dgam: [Gamma; 4] = std::array::from_fn(|k| {
        five_point(&gam, p, k, h_outer, |v| {
            std::array::from_fn(|a| {
                std::array::from_fn(|b| std::array::from_fn(|c| stencil(v.map(|t| t[a][b][c]), h_outer)))
            })
        })
    });
    let g0 = gam(p);
    let ric: G = std::array::from_fn(|b| {
        std::array::from_fn(|d| {
            (0..4)
                .map(|a| {
                    dgam[a][a][d][b] - dgam[d][a][a][b]
                        + (0..4).map(|e| g0[a][a][e] * g0[e][d][b] - g0[a][d][e] * g0[e][a][b]).sum::<f64>()
                })
                .sum()
        })
    });
    let gi = inverse(&chart.metric_value(p).unwrap());
    let s = (0..4).flat_map(|b| (0..4).map(move |d| (b, d))).map(|(b, d)| gi[b][d] * ric[b][d]).sum();
    (ric, s)
}

fn chart(name: &str, params: &[(&str, f64)]) -> std::sync::Arc<dyn MetricChart> {
    let m: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    build_chart(name, &m).unwrap()
}

fn random_points(chart: &dyn MetricChart, bounds: [[f64; 2]; 4], n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let p: Point = std::array::from_fn(|k| rng.gen_range(bounds[k][0]..bounds[k][1]));
        if chart.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// Compares engine and oracle Ricci tensors and checks the oracle scalar
/// curvature against `expected_s`.
fn agree(chart: &dyn MetricChart, p: &Point, expected_s: f64, tol: f64) {
    let (ric, s) = oracle_ricci(chart, p, 1e-3, 3e-3);
    let pkg = curvature_package(chart, p).unwrap();
    let size = 1.0 + ric.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    for b in 0..4 {
        for d in 0..4 {
            assert!(
                (ric[b][d] - pkg.ricci[b][d]).abs() <= tol * size,
                "{} at {p:?}: Ric[{b}][{d}] oracle {} engine {}",
                chart.name(),
                ric[b][d],
                pkg.ricci[b][d]
            );
        }
    }
    assert!((s - expected_s).abs() <= tol * (1.0 + expected_s.abs()), "{} at {p:?}: oracle s = {s}, expected {expected_s}", chart.name());
    assert!((pkg.scalar_s - expected_s).abs() <= 1e-9 * (1.0 + expected_s.abs()));
}

#[test]
fn sphere_and_hyperbolic_scalar_curvature_scale_with_radius() {
    for r in [0.5, 1.0, 2.0] {
        let c = chart("sphere", &[("r", r)]);
        for p in random_points(c.as_ref(), [[-1.0, 1.0]; 4], 3, 1) {
            agree(c.as_ref(), &p, 12.0 / (r * r), 1e-6);
        }
        let c = chart("hyperbolic", &[("r", r)]);
        for p in random_points(c.as_ref(), [[-0.3 * r, 0.3 * r]; 4], 3, 2) {
            agree(c.as_ref(), &p, -12.0 / (r * r), 1e-6);
        }
    }
}

#[test]
fn canonic_charts_are_einstein_with_their_scalar_curvature() {
    let c = chart("canonic", &[]);
    for p in random_points(c.as_ref(), [[0.9, 1.1], [0.9, 1.1], [-1.0, 1.0], [-1.0, 1.0]], 3, 3) {
        agree(c.as_ref(), &p, 0.0, 1e-6);
    }
    let c = chart("canonic", &[("s", -6.0), ("a", -587.0 / 576.0), ("b", 1.0)]);
    for p in random_points(c.as_ref(), [[0.95, 1.05], [0.95, 1.05], [-1.0, 1.0], [-1.0, 1.0]], 3, 4) {
        agree(c.as_ref(), &p, -6.0, 1e-6);
    }
}

#[test]
fn toda_chart_has_its_scalar_curvature() {
    let c = chart("toda", &[]);
    for p in random_points(c.as_ref(), [[0.1, 0.3], [0.2, 0.4], [0.4, 0.6], [-1.0, 1.0]], 3, 5) {
        agree(c.as_ref(), &p, -6.0, 1e-6);
    }
}

#[test]
fn lebrun_pedersen_scalar_curvature_is_192_b_times_c_minus_b_squared() {
    for (b, cc) in [(1.0, 2.0), (0.5, 1.0), (1.0, 3.0)] {
        let c = chart("lebrun_pedersen", &[("b", b), ("c", cc)]);
        let s = 192.0 * b * (cc - b * b);
        for p in random_points(c.as_ref(), [[1.5, 3.0], [0.5, 2.5], [0.0, 6.0], [0.0, 6.0]], 2, 6) {
            agree(c.as_ref(), &p, s, 1e-6);
        }
    }
}

#[test]
fn gibbons_hawking_is_ricci_flat() {
    let c = chart("gibbons_hawking", &[("a", 1.0), ("b", 0.0)]);
    for p in random_points(c.as_ref(), [[-1.0, 1.0], [-1.0, 1.0], [0.5, 2.0], [0.0, 6.0]], 3, 7) {
        agree(c.as_ref(), &p, 0.0, 1e-6);
    }
}
