//! The check registry. A check evaluates one or more named residuals at a
//! point; each residual carries its tolerance tier and whether it must stay
//! below (ordinary checks) or above (negative controls) its tolerance.

use std::collections::BTreeMap;
use std::sync::Arc;

use sdeh_core::catalog::{build_chart, CanonicChart, CanonicParams, GHParams, GibbonsHawkingChart, TodaChart, TodaParams};
use sdeh_core::chart::{MetricChart, Point, ScaledChart};
use sdeh_core::curvature::{curvature_package, wplus_spectrum};
use sdeh_core::error::{GeometryError, Result};
use sdeh_core::forms::{inner2, norm2_one_form, one_form_value, two_form_value};
use sdeh_core::frobenius::gauge_coframe_residuals;
use sdeh_core::hermitian::{
    extract_hermitian, hermitian_data, killing_residual, kappa_relations_check, lee_form, nijenhuis_norm,
    rotated_nijenhuis_norm,
};
use sdeh_core::hyper::{
    einstein_weyl_residual, theta_j_residual, lee_field, phi_identity_residuals, rescale_factor, scalar_flat_residual,
    weyl_lee_at, LeeChoice,
};
use sdeh_core::linalg::{add4, matmul4, norm4, sub4, transpose4, IDENTITY4};

use crate::config::{Config, ConfigError, Tier};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    /// Passes when `value ≤ tolerance`.
    AtMost,
    /// Passes when `value ≥ tolerance` (negative controls).
    AtLeast,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub tier: Tier,
    pub bound: Bound,
    /// Tolerance used when the configuration does not override it; falls
    /// back to the tier default.
    pub default_tolerance: Option<f64>,
}

impl Residual {
    fn new(name: &str, value: f64, tier: Tier) -> Self {
        Residual { name: name.to_string(), value, tier, bound: Bound::AtMost, default_tolerance: None }
    }

    fn tol(mut self, t: f64) -> Self {
        self.default_tolerance = Some(t);
        self
    }

    fn control(name: &str, value: f64, tier: Tier, floor: f64) -> Self {
        Residual { name: name.to_string(), value, tier, bound: Bound::AtLeast, default_tolerance: Some(floor) }
    }
}

/// Rescaled chart used by the Einstein–Weyl checks.
pub struct HyperContext {
    pub chart: Arc<dyn MetricChart>,
    pub factor: f64,
    pub anchor: Point,
}

/// Everything a check needs besides the point.
pub struct Context {
    pub chart_name: String,
    pub params: BTreeMap<String, f64>,
    pub chart: Arc<dyn MetricChart>,
    pub hyper: Option<std::result::Result<HyperContext, GeometryError>>,
}

fn param(ctx: &Context, key: &str) -> f64 {
    let info = sdeh_core::catalog::CHARTS.iter().find(|c| c.name == ctx.chart_name);
    ctx.params
        .get(key)
        .copied()
        .or_else(|| info.and_then(|i| i.params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)))
        .unwrap_or(0.0)
}

impl Context {
    pub fn new(cfg: &Config, checks: &[&CheckInfo]) -> std::result::Result<Self, ConfigError> {
        let chart = build_chart(&cfg.chart, &cfg.params).map_err(|e| ConfigError(format!("{}: {e}", cfg.label())))?;
        let mut ctx = Context { chart_name: cfg.chart.clone(), params: cfg.params.clone(), chart, hyper: None };
        if checks.iter().any(|c| c.needs_rescale) {
            ctx.hyper = Some(ctx.find_rescale(cfg));
        }
        Ok(ctx)
    }

    /// Picks the anchor (the box center if usable, else the first usable grid
    /// point) and the constant rescaling found there.
    fn find_rescale(&self, cfg: &Config) -> std::result::Result<HyperContext, GeometryError> {
        let chart = self.chart.as_ref();
        let mut last = GeometryError::domain(chart.name(), "no point of the box admits a rescaling");
        for p in std::iter::once(cfg.center()).chain(cfg.grid()) {
            if !chart.contains(&p) {
                continue;
            }
            match rescale_factor(chart, &p) {
                Ok((factor, _)) => {
                    let scaled: Arc<dyn MetricChart> = Arc::new(ScaledChart::new(self.chart.clone(), factor)?);
                    return Ok(HyperContext { chart: scaled, factor, anchor: p });
                }
                Err(e) => last = e,
            }
        }
        Err(last)
    }

    fn hyper(&self) -> Result<&HyperContext> {
        match &self.hyper {
            Some(Ok(h)) => Ok(h),
            Some(Err(e)) => Err(e.clone()),
            None => Err(GeometryError::Unsupported("rescaled chart not prepared".into())),
        }
    }
}

pub type CheckFn = fn(&Context, &Point) -> Result<Vec<Residual>>;

pub struct CheckInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub run: CheckFn,
    pub needs_rescale: bool,
}

pub const CHECKS: &[CheckInfo] = &[
    CheckInfo { name: "curvature", description: "Einstein, W- = 0, curvature symmetries, scalar curvature", run: curvature, needs_rescale: false },
    CheckInfo { name: "flat", description: "full Riemann tensor vanishes", run: flat, needs_rescale: false },
    CheckInfo { name: "spectrum", description: "W+ spectrum (k/6, -k/12, -k/12) and k = 3(W+F, F)", run: spectrum, needs_rescale: false },
    CheckInfo { name: "hermitian", description: "extracted J is orthogonal, J^2 = -1, F matches the chart", run: hermitian, needs_rescale: false },
    CheckInfo { name: "lee", description: "Lee form from dF and from d ln k agree", run: lee, needs_rescale: false },
    CheckInfo { name: "killing", description: "J grad(k^(-1/3)) is Killing", run: killing, needs_rescale: false },
    CheckInfo { name: "nijenhuis", description: "J integrable; rotated J is not", run: nijenhuis, needs_rescale: false },
    CheckInfo { name: "kappa_relations", description: "k = s + 6(dtheta - |theta|^2) and the W+ eigenvalue formula", run: kappa_relations, needs_rescale: false },
    CheckInfo { name: "structure", description: "structure equations of the canonic coframe", run: structure, needs_rescale: false },
    CheckInfo { name: "toda", description: "Toda and monopole equations", run: toda, needs_rescale: false },
    CheckInfo { name: "gibbons_hawking", description: "monopole equation", run: gibbons_hawking, needs_rescale: false },
    CheckInfo { name: "hyper", description: "Einstein-Weyl and hyperhermitian identities after rescaling", run: hyper, needs_rescale: true },
    CheckInfo { name: "theta_j_control", description: "theta_J equation must fail (negative control)", run: theta_j_control, needs_rescale: true },
];

pub fn find_check(name: &str) -> Option<&'static CheckInfo> {
    CHECKS.iter().find(|c| c.name == name)
}

/// Checks run when a configuration names none.
pub fn default_checks(chart: &str) -> &'static [&'static str] {
    match chart {
        "flat" => &["curvature", "flat"],
        "fubini_study" => &["curvature", "hermitian", "lee", "nijenhuis", "kappa_relations"],
        "canonic" => &["curvature", "spectrum", "hermitian", "lee", "killing", "nijenhuis", "kappa_relations", "structure"],
        "toda" => &["curvature", "toda", "hermitian", "lee", "killing", "nijenhuis"],
        "lebrun_pedersen" => &["curvature", "spectrum", "hermitian", "lee", "killing", "nijenhuis", "kappa_relations", "hyper"],
        "gibbons_hawking" => &["curvature", "gibbons_hawking"],
        _ => &["curvature"],
    }
}

fn curvature(ctx: &Context, p: &Point) -> Result<Vec<Residual>> {
    let pkg = curvature_package(ctx.chart.as_ref(), p)?;
    let mut out = vec![
        Residual::new("curvature.ric0", pkg.ric0_norm(), Tier::Jet),
        Residual::new("curvature.wminus", pkg.wminus_norm(), Tier::Jet),
        Residual::new("curvature.symmetry", pkg.symmetry_residual(), Tier::Jet),
        Residual::new("curvature.reassembly", pkg.reassembly_residual(), Tier::Jet),
        Residual::new("curvature.weyl_trace", pkg.weyl_trace_residual(), Tier::Jet),
    ];
    if let Some(s) = ctx.chart.expected_scalar() {
        out.push(Residual::new("curvature.scalar", (pkg.scalar_s - s).abs(), Tier::Jet));
    }
    Ok(out)
}

fn flat(ctx: &Context, p: &Point) -> Result<Vec<Residual>> {
    let pkg = curvature_package(ctx.chart.as_ref(), p)?;
    Ok(vec![Residual::new("flat.riemann", pkg.riemann_norm(), Tier::Jet).tol(1e-10)])
}

fn spectrum(ctx: &Context, p: &Point) -> Result<Vec<Residual>> {
    let pkg = curvature_package(ctx.chart.as_ref(), p)?;
    let spec = wplus_spectrum(&pkg);
    let mut out = vec![Residual::new("spectrum.degeneracy_gap", spec.degeneracy_gap, Tier::Jet).tol(1e-7)];
    if let Some(k) = ctx.chart.expected_kappa(p) {
        let mut expected = [k / 6.0, -k / 12.0, -k / 12.0];
        expected.sort_by(|a, b| b.total_cmp(a));
        let err = spec.values.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        out.push(Residual::new("spectrum.eigenvalues", err, Tier::Jet));
        let hd = extract_hermitian(&pkg)?;
        out.push(Residual::new("spectrum.kappa_relative", ((hd.kappa - k) / k).abs(), Tier::Jet).tol(1e-6));
    }
    Ok(out)
}

fn hermitian(ctx: &Context, p: &Point) -> Result<Vec<Residual>> {
    let pkg = curvature_package(ctx.chart.as_ref(), p)?;
    let hd = extract_hermitian(&pkg)?;
    let j = &hd.j;
    let square = norm4(&add4(&matmul4(j, j), &IDENTITY4));
    let g = &pkg.metric;
    let orth = norm4(&sub4(&matmul4(&transpose4(j), &matmul4(g, j)), g)) / norm4(g);
    let mut out = vec![
        Residual::new("hermitian.j_square", square, Tier::Jet).tol(1e-9),
        Residual::new("hermitian.j_orthogonal", orth, Tier::Jet).tol(1e-9),
    ];
    if let Some(f) = ctx.chart.hermitian_candidate(p) {
        let f = two_form_value(&f?);
        let d = |sign: f64| {
            let diff = std::array::from_fn(|a| std::array::from_fn(|b| hd.f[a][b] - sign * f[a][b]));
            inner2(&diff, &diff, &pkg.metric_inv).max(0.0).sqrt()
        };
        out.push(Residual::new("hermitian.candidate", d(1.0).min(d(-1.0)), Tier::Jet).tol(1e-7));
    }
    Ok(out)
}

fn lee(ctx: &Context, p: &Point) -> Result<Vec<Residual>> {
    let chart = ctx.chart.as_ref();
    let (hd, pkg) = sdeh_core::hermitian::hermitian_at(chart, p, None)?;
    let forms = lee_form(chart, p, &hd)?;
    let mut out = vec![Residual::new("lee.routes", forms.difference, Tier::Stencil)];
    if let Some(c) = chart.lee_candidate(p) {
        let c = one_form_value(&c?);
        let dist = |t: &[f64; 4]| {
            let d: [f64; 4] = std::array::from_fn(|k| t[k] - c[k]);
            norm2_one_form(&d, &pkg.metric_inv).max(0.0).sqrt()
        };
        out.push(Residual::new("lee.analytic", dist(&forms.route_a).max(dist(&forms.route_b)), Tier::Stencil));
    }
    Ok(out)
}

fn killing(ctx: &Context, p: &Point) -> Result<Vec<Residual>> {
    let chart = ctx.chart.as_ref();
    let hd = hermitian_data(chart, p)?;
    let k = killing_residual(chart, p, &hd)?;
    let mut out = vec![Residual::new("killing.residual", k.residual, Tier::Stencil)];
    if let Some(a) = k.alignment {
        out.push(Residual::new("killing.alignment", a.abs(), Tier::Stencil));
    }
    Ok(out)
}

fn nijenhuis(ctx: &Context, p: &Point) -> Result<Vec<Residual>> {
    let chart = ctx.chart.as_ref();
    let hd = hermitian_data(chart, p)?;
    let n = nijenhuis_norm(chart, p, &hd)?;
    let rotated = rotated_nijenhuis_norm(chart, p, &hd)?;
    Ok(vec![
        Residual::new("nijenhuis.tensor", n.nijenhuis, Tier::Stencil),
        Residual::new("nijenhuis.integrable", n.integrable, Tier::Stencil),
        Residual::control("nijenhuis.rotated_control", rotated, Tier::Stencil, 1e-2),
    ])
}

fn kappa_relations(ctx: &Context, p: &Point) -> Result<Vec<Residual>> {
    let chart = ctx.chart.as_ref();
    let (hd, _) = sdeh_core::hermitian::hermitian_at(chart, p, None)?;
    let r = kappa_relations_check(chart, p, &hd)?;
    Ok(vec![
        Residual::new("kappa_relations.scalar", r.kappa_scalar.abs(), Tier::Stencil),
        Residual::new("kappa_relations.eigenvalues", r.lambda, Tier::Stencil),
        Residual::new("kappa_relations.dtheta_plus_f", r.dtheta_f.abs(), Tier::Stencil),
        Residual::new("kappa_relations.dtheta_plus", r.dtheta_plus, Tier::Stencil),
    ])
}

fn structure(ctx: &Context, p: &Point) -> Result<Vec<Residual>> {
    if ctx.chart_name != "canonic" {
        return Err(GeometryError::Unsupported("structure equations need the canonic chart".into()));
    }
    let chart = CanonicChart::new(CanonicParams { s: param(ctx, "s"), a: param(ctx, "a"), b: param(ctx, "b") })?;
    let r = gauge_coframe_residuals(&chart, p)?;
    Ok(vec![
        Residual::new("structure.dalpha", r.dalpha, Tier::Jet),
        Residual::new("structure.djalpha", r.djalpha, Tier::Jet),
        Residual::new("structure.djtheta", r.djtheta, Tier::Jet),
        Residual::new("structure.ricci1", r.ricci1, Tier::Jet),
        Residual::new("structure.ricci2", r.ricci2, Tier::Jet),
    ])
}

fn toda(ctx: &Context, p: &Point) -> Result<Vec<Residual>> {
    if ctx.chart_name != "toda" {
        return Err(GeometryError::Unsupported("Toda residuals need the toda chart".into()));
    }
    let chart = TodaChart::new(TodaParams { s: param(ctx, "s"), a: param(ctx, "a"), b: param(ctx, "b"), c: param(ctx, "c") })?;
    Ok(vec![
        Residual::new("toda.equation", chart.toda_residual(p)?, Tier::Jet).tol(1e-12),
        Residual::new("toda.monopole", chart.monopole_residual(p)?, Tier::Jet).tol(1e-10),
    ])
}

fn gibbons_hawking(ctx: &Context, p: &Point) -> Result<Vec<Residual>> {
    if ctx.chart_name != "gibbons_hawking" {
        return Err(GeometryError::Unsupported("monopole residual needs the gibbons_hawking chart".into()));
    }
    let chart = GibbonsHawkingChart::new(GHParams { a: param(ctx, "a"), b: param(ctx, "b") })?;
    Ok(vec![Residual::new("gibbons_hawking.monopole", chart.monopole_residual(p)?, Tier::Jet).tol(1e-10)])
}

fn hyper(ctx: &Context, p: &Point) -> Result<Vec<Residual>> {
    let h = ctx.hyper()?;
    let chart = h.chart.as_ref();
    let (wd, _) = weyl_lee_at(chart, p, None)?;
    let mut out = Vec::new();
    for which in [LeeChoice::Prime, LeeChoice::Second] {
        let suffix = match which {
            LeeChoice::Prime => "prime",
            LeeChoice::Second => "second",
        };
        let field = lee_field(chart, wd.phi, which);
        let ew = einstein_weyl_residual(chart, p, &field)?;
        let sf = scalar_flat_residual(chart, p, &field)?;
        let ids = phi_identity_residuals(chart, p, which)?;
        out.push(Residual::new(&format!("hyper.einstein_weyl_{suffix}"), ew, Tier::Stencil));
        out.push(Residual::new(&format!("hyper.scalar_flat_{suffix}"), sf, Tier::Stencil));
        out.push(Residual::new(&format!("hyper.dtheta_minus_{suffix}"), ids.dtheta_minus, Tier::Stencil));
        out.push(Residual::new(&format!("hyper.closure_{suffix}"), ids.closure, Tier::DoubleStencil));
        out.push(Residual::new(&format!("hyper.lee_gradient_{suffix}"), ids.lee_gradient, Tier::DoubleStencil));
        out.push(Residual::new(&format!("hyper.phi_norm_{suffix}"), ids.phi_norm, Tier::DoubleStencil));
        out.push(Residual::new(&format!("hyper.nabla_phi_norm_{suffix}"), ids.nabla_phi_norm, Tier::DoubleStencil));
        out.push(Residual::new(&format!("hyper.wplus_phi_{suffix}"), ids.wplus_phi, Tier::DoubleStencil));
    }
    out.push(Residual::new("hyper.theta_j_equation", theta_j_residual(chart, p)?, Tier::DoubleStencil));
    Ok(out)
}

fn theta_j_control(ctx: &Context, p: &Point) -> Result<Vec<Residual>> {
    let h = ctx.hyper()?;
    Ok(vec![Residual::control("theta_j_control.theta_j_equation", theta_j_residual(h.chart.as_ref(), p)?, Tier::DoubleStencil, 1e-1)])
}
