//! Acceptance criteria. Each criterion prints one PASS/FAIL line (written
//! straight to stdout so it shows without `--nocapture`); the test fails if
//! any criterion fails.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sdeh_cli::experiment::frobenius_experiment;
use sdeh_cli::report::RunReport;
use sdeh_cli::scan::scan_domain;
use sdeh_cli::suite::run_config;
use sdeh_cli::{default_suite, parse_config, run_suite, EXIT_PASS};
use sdeh_core::catalog::{build_chart, CanonicChart, CanonicParams, GHParams, GibbonsHawkingChart, TodaChart, TodaParams};
use sdeh_core::chart::{MetricChart, Point};
use sdeh_core::curvature::wplus_spectrum;
use sdeh_core::frobenius::{
    closed_form_pq, frobenius_rhs, gauge_coframe_residuals, ode_f_residual, ode_residual_of, FrobeniusState,
    SolutionConstants,
};
use sdeh_core::hermitian::extract_hermitian;
use sdeh_core::{curvature_package, Jet2};

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn chart(name: &str, params: &[(&str, f64)]) -> Arc<dyn MetricChart> {
    let m: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    build_chart(name, &m).unwrap()
}

fn random_domain_points(chart: &dyn MetricChart, bounds: [[f64; 2]; 4], n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..100_000 {
        if out.len() == n {
            break;
        }
        let p: Point = std::array::from_fn(|k| rng.gen_range(bounds[k][0]..=bounds[k][1]));
        if chart.contains(&p) {
            out.push(p);
        }
    }
    out
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) })
}

fn worst(run: &RunReport, residual: &str) -> f64 {
    run.summary_of(residual).map_or(f64::NAN, |s| s.worst.0)
}

fn run(json: &str) -> RunReport {
    let cfg = parse_config(json).unwrap().remove(0);
    run_config(&cfg, 0, 0).unwrap()
}

fn baselines() -> Outcome {
    let start = Instant::now();
    let flat = chart("flat", &[]);
    let sphere = chart("sphere", &[]);
    let box4 = [[-2.0, 2.0]; 4];
    let mut flat_r: f64 = 0.0;
    let (mut s_err, mut weyl, mut ric0): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for p in random_domain_points(flat.as_ref(), box4, 100, 1) {
        let k = curvature_package(flat.as_ref(), &p).unwrap();
        flat_r = max([flat_r, k.riemann_norm(), k.ricci_norm(), k.scalar_s.abs(), k.wplus_norm(), k.wminus_norm()]);
    }
    for p in random_domain_points(sphere.as_ref(), box4, 100, 2) {
        let k = curvature_package(sphere.as_ref(), &p).unwrap();
        s_err = max([s_err, (k.scalar_s - 12.0).abs()]);
        weyl = max([weyl, k.wplus_norm(), k.wminus_norm()]);
        ric0 = max([ric0, k.ric0_norm()]);
    }
    let elapsed = start.elapsed();
    outcome(
        flat_r <= 1e-10 && s_err <= 1e-9 && weyl <= 1e-9 && ric0 <= 1e-9 && elapsed < Duration::from_secs(1),
        format!("flat |R| {flat_r:.1e}; sphere |s-12| {s_err:.1e}, |W| {weyl:.1e}, |Ric0| {ric0:.1e}; {elapsed:.2?}"),
    )
}

/// Criterion-2 residuals of a canonic chart on `points`: (evaluated, ric0, wminus, eigenvalue error, κ relative error).
fn canonic_residuals(chart: &dyn MetricChart, points: &[Point]) -> (usize, f64, f64, f64, f64) {
    let (mut n, mut ric0, mut wm, mut eig, mut kap) = (0, 0.0, 0.0, 0.0, 0.0);
    for p in points.iter().filter(|p| chart.contains(p)) {
        let k = curvature_package(chart, p).unwrap();
        let expected = chart.expected_kappa(p).unwrap();
        let spec = wplus_spectrum(&k);
        let mut want = [expected / 6.0, -expected / 12.0, -expected / 12.0];
        want.sort_by(|a, b| b.total_cmp(a));
        let hd = extract_hermitian(&k).unwrap();
        n += 1;
        ric0 = max([ric0, k.ric0_norm()]);
        wm = max([wm, k.wminus_norm()]);
        eig = max([eig, max(spec.values.iter().zip(&want).map(|(a, b)| (a - b).abs()))]);
        kap = max([kap, ((hd.kappa - expected) / expected).abs()]);
    }
    (n, ric0, wm, eig, kap)
}

fn canonic_grid() -> Outcome {
    let start = Instant::now();
    let c = chart("canonic", &[]);
    let axis = |lo: f64, hi: f64, n: usize| -> Vec<f64> { (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect() };
    let mut points = Vec::new();
    for x in axis(0.9, 1.1, 5) {
        for y in axis(0.9, 1.1, 5) {
            for z in axis(-0.5, 0.5, 3) {
                for t in axis(-0.5, 0.5, 3) {
                    points.push([x, y, z, t]);
                }
            }
        }
    }
    // κ = x³ for these constants.
    let kappa_ok = points.iter().filter(|p| c.contains(p)).all(|p| c.expected_kappa(p) == Some(p[0].powi(3)));
    let (n, ric0, wm, eig, kap) = canonic_residuals(c.as_ref(), &points);
    let elapsed = start.elapsed();
    outcome(
        n > 0 && kappa_ok && ric0 <= 1e-8 && wm <= 1e-8 && eig <= 1e-8 && kap <= 1e-6 && elapsed < Duration::from_secs(10),
        format!("{n}/{} points in domain; |Ric0| {ric0:.1e}, |W-| {wm:.1e}, eigenvalues {eig:.1e}, kappa rel {kap:.1e}; {elapsed:.2?}", points.len()),
    )
}

fn canonic_nonzero_s() -> Outcome {
    // Candidates with p(1,1) = 0: a = (1-s)/24 - 1/4 - b + (1-s²)/576, b = 1.
    let mut found = Vec::new();
    for s in [-6.0, -1.0, 1.0, 6.0] {
        let b = 1.0;
        let a = (1.0 - s) / 24.0 - 0.25 - b + (1.0 - s * s) / 576.0;
        let Ok(c) = CanonicChart::new(CanonicParams { s, a, b }) else { continue };
        let scan = scan_domain(&c, [[0.8, 1.2], [0.8, 1.2], [0.0, 0.0], [0.0, 0.0]], [9, 9, 1, 1]);
        let Some(anchor) = scan.sample_point() else { continue };
        let mut rng = ChaCha8Rng::seed_from_u64(s.to_bits());
        let mut points = Vec::new();
        while points.len() < 10 {
            let p: Point = [
                anchor[0] + rng.gen_range(-0.05..0.05),
                anchor[1] + rng.gen_range(-0.05..0.05),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            if c.contains(&p) {
                points.push(p);
            }
        }
        let (n, ric0, wm, eig, kap) = canonic_residuals(&c, &points);
        let pass = n == 10 && ric0 <= 1e-8 && wm <= 1e-8 && eig <= 1e-8 && kap <= 1e-6;
        found.push((s, pass, format!("s={s}: fraction {:.2}, |Ric0| {ric0:.1e}, |W-| {wm:.1e}, eig {eig:.1e}, kappa {kap:.1e}", scan.fraction.0)));
    }
    let passing = found.iter().filter(|f| f.1).count();
    outcome(passing >= 1, format!("{passing} passing sets; {}", found.into_iter().map(|f| f.2).collect::<Vec<_>>().join("; ")))
}

fn frobenius_paths() -> Outcome {
    let c = SolutionConstants { s: 0.0, a: -695.0 / 576.0, b: 1.0 };
    let e = frobenius_experiment(c, (1.0, 1.0), (1.2, 1.5)).unwrap();
    let exact = closed_form_pq(&c, 1.2, 1.5);
    let [px, py, _, _] = frobenius_rhs(&FrobeniusState { x: 1.0, y: 1.0, p: 0.0, q2: 551.0 / 576.0 }, &c);
    let spot = (px - 209.0 / 144.0).abs().max((py - 11.0 / 24.0).abs());
    let err = e.paths[0].closed_form_error.0.max(e.paths[1].closed_form_error.0);
    outcome(
        e.path_discrepancy.0 <= 1e-6 && err <= 1e-6 && spot <= 1e-12,
        format!(
            "paths differ by {:.1e}, closed form ({:.12}, {:.12}) off by {err:.1e}; spot values off by {spot:.1e}",
            e.path_discrepancy.0, exact.0, exact.1
        ),
    )
}

fn ode_residual() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_r: f64 = 0.0;
    for _ in 0..100 {
        let c = SolutionConstants { s: rng.gen_range(-6.0..6.0), a: rng.gen_range(-3.0..3.0), b: rng.gen_range(-3.0..3.0) };
        worst_r = max([worst_r, ode_f_residual(&c, rng.gen_range(0.1..2.0)).abs()]);
    }
    let control = ode_residual_of(&Jet2::variable(1.0, 0).powi(3), 1.0, 0.0);
    outcome(
        worst_r <= 1e-12 && (control + 71.0 / 72.0).abs() <= 1e-12,
        format!("max residual {worst_r:.1e}; control x^3 gives {control:.15}"),
    )
}

fn toda() -> Outcome {
    let params = TodaParams { s: -6.0, a: 1.0, b: 1.0, c: 1.0 };
    let c = TodaChart::new(params).unwrap();
    let bounds = [[-0.5, 0.5], [-0.5, 0.5], [0.2, 2.0], [-3.0, 3.0]];
    let pts = random_domain_points(&c, bounds, 100, 6);
    let toda = max(pts.iter().map(|p| c.toda_residual(p).unwrap()));
    let mono = max(pts.iter().map(|p| c.monopole_residual(p).unwrap()));
    let (mut ric0, mut wm): (f64, f64) = (0.0, 0.0);
    for p in &pts[..20] {
        let k = curvature_package(&c, p).unwrap();
        ric0 = max([ric0, k.ric0_norm()]);
        wm = max([wm, k.wminus_norm()]);
    }
    outcome(
        pts.len() == 100 && toda <= 1e-12 && mono <= 1e-10 && ric0 <= 1e-8 && wm <= 1e-8,
        format!("{} points; Toda {toda:.1e}, monopole {mono:.1e}; |Ric0| {ric0:.1e}, |W-| {wm:.1e}", pts.len()),
    )
}

fn gibbons_hawking() -> Outcome {
    let c = GibbonsHawkingChart::new(GHParams { a: 1.0, b: 0.0 }).unwrap();
    let pts = random_domain_points(&c, [[-1.0, 1.0], [-1.0, 1.0], [0.2, 3.0], [0.0, 6.0]], 20, 7);
    let (mut ric, mut one_side) = (0.0f64, true);
    let (mut small, mut large) = (0.0f64, f64::INFINITY);
    for p in &pts {
        let k = curvature_package(&c, p).unwrap();
        ric = max([ric, k.ricci_norm()]);
        let (wp, wm) = (k.wplus_norm(), k.wminus_norm());
        one_side &= (wp <= 1e-9) != (wm <= 1e-9);
        small = max([small, wp.min(wm)]);
        large = large.min(wp.max(wm));
    }
    let flat = GibbonsHawkingChart::new(GHParams { a: 0.0, b: 1.0 }).unwrap();
    let flat_r = max(
        random_domain_points(&flat, [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0], [0.0, 6.0]], 20, 8)
            .iter()
            .map(|p| curvature_package(&flat, p).unwrap().riemann_norm()),
    );
    outcome(
        pts.len() == 20 && ric <= 1e-9 && one_side && flat_r <= 1e-10,
        format!("w = z: |Ric| {ric:.1e}, vanishing half {small:.1e}, other half >= {large:.2}; w = 1: |R| {flat_r:.1e}"),
    )
}

fn lebrun_pedersen() -> Outcome {
    let r = run(r#"{"chart": "lebrun_pedersen", "params": {"b": 1, "c": 2},
        "box": [[1.6, 2.8], [0.6, 2.4], [0.3, 0.3], [0.2, 1.2]], "resolution": [3, 2, 1, 2],
        "checks": ["curvature", "spectrum", "lee", "killing", "nijenhuis"]}"#);
    let einstein = worst(&r, "curvature.ric0");
    let wm = worst(&r, "curvature.wminus");
    let gap = worst(&r, "spectrum.degeneracy_gap");
    let lee = worst(&r, "lee.routes");
    let killing = worst(&r, "killing.residual");
    let nij = worst(&r, "nijenhuis.tensor");
    let rotated = worst(&r, "nijenhuis.rotated_control");
    outcome(
        r.errors.is_empty()
            && r.check_skips.is_empty()
            && r.points_evaluated == 12
            && einstein <= 1e-8
            && wm <= 1e-8
            && gap <= 1e-7
            && lee <= 1e-5
            && killing <= 1e-5
            && nij <= 1e-5
            && rotated > 1e-2,
        format!(
            "{} points; |Ric0| {einstein:.1e}, |W-| {wm:.1e}, gap {gap:.1e}, Lee {lee:.1e}, Killing {killing:.1e}, Nijenhuis {nij:.1e}, rotated {rotated:.2}",
            r.points_evaluated
        ),
    )
}

fn hyperhermitian() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (b, c) in [(1.0, 2.0), (0.5, 1.0)] {
        let r = run(&format!(
            r#"{{"chart": "lebrun_pedersen", "params": {{"b": {b}, "c": {c}}},
               "box": [[1.8, 2.4], [0.8, 1.4], [0.3, 0.3], [0.2, 0.2]], "resolution": [2, 2, 1, 1], "checks": ["hyper"]}}"#
        ));
        let mut family = |names: &[&str], tol: f64| {
            let w = max(names.iter().flat_map(|n| ["prime", "second"].map(|s| worst(&r, &format!("hyper.{n}_{s}")))));
            pass &= w <= tol;
            w
        };
        let ew = family(&["einstein_weyl"], 1e-5);
        let sf = family(&["scalar_flat"], 1e-5);
        let minus = family(&["dtheta_minus"], 1e-5);
        let phi = family(&["lee_gradient", "phi_norm", "nabla_phi_norm", "wplus_phi"], 1e-4);
        let theta_j = worst(&r, "hyper.theta_j_equation");
        pass &= theta_j <= 1e-4 && r.errors.is_empty() && r.points_evaluated == 4 && r.check_skips.is_empty();
        let factor = r.rescale.as_ref().map_or(f64::NAN, |s| s.factor.0);
        detail.push(format!(
            "LP({b},{c}) factor {factor:.6}: EW {ew:.1e}, scalar-flat {sf:.1e}, (dtheta)- {minus:.1e}, theta_J equation {theta_j:.1e}, Phi-identities {phi:.1e}"
        ));
    }
    let control = run(r#"{"chart": "canonic", "box": [[1, 1], [1, 1], [0, 0], [0, 0]], "checks": ["theta_j_control"]}"#);
    let g = worst(&control, "theta_j_control.theta_j_equation");
    pass &= g >= 1e-1;
    detail.push(format!("canonic control theta_j_equation {g:.2}"));
    outcome(pass, detail.join("; "))
}

fn structure_equations() -> Outcome {
    let c = CanonicChart::new(CanonicParams { s: 0.0, a: -695.0 / 576.0, b: 1.0 }).unwrap();
    let pts = random_domain_points(&c, [[0.85, 1.15], [0.85, 1.15], [-2.0, 2.0], [-3.0, 3.0]], 20, 9);
    let w = max(pts.iter().map(|p| gauge_coframe_residuals(&c, p).unwrap().max()));
    outcome(pts.len() == 20 && w <= 1e-8, format!("{} points; max residual {w:.1e}", pts.len()))
}

fn default_suite_runtime_and_determinism() -> Outcome {
    let configs = default_suite();
    let start = Instant::now();
    let (a, code) = run_suite(&configs, 1, 0).unwrap();
    let elapsed = start.elapsed();
    let (b, _) = run_suite(&configs, 1, 0).unwrap();
    let (c, _) = run_suite(&configs, 4, 0).unwrap();
    let (ja, jb, jc) = (a.to_json(), b.to_json(), c.to_json());
    let same_runs = ja == jb;
    let same_threads = ja == jc && a.to_csv() == c.to_csv();
    outcome(
        code == EXIT_PASS && elapsed < Duration::from_secs(120) && same_runs && same_threads,
        format!("exit {code}, single-threaded {elapsed:.2?}, identical across runs {same_runs}, across threads {same_threads}"),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 11] = [
        ("1 flat and round sphere baselines", baselines),
        ("2 canonic chart grid", canonic_grid),
        ("3 canonic chart with s != 0", canonic_nonzero_s),
        ("4 two-path Frobenius integration", frobenius_paths),
        ("5 ODE residual and negative control", ode_residual),
        ("6 Toda chart", toda),
        ("7 Gibbons-Hawking", gibbons_hawking),
        ("8 LeBrun-Pedersen Hermitian structure", lebrun_pedersen),
        ("9 hyperhermitian identities", hyperhermitian),
        ("10 structure equations", structure_equations),
        ("11 default suite runtime and determinism", default_suite_runtime_and_determinism),
    ];
    let mut failed = Vec::new();
    std::io::stdout().lock().write_all(b"\n").unwrap();
    for (name, check) in criteria {
        let o = check();
        let line = format!("{} criterion {name}: {}\n", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        std::io::stdout().lock().write_all(line.as_bytes()).unwrap();
        if !o.pass {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
