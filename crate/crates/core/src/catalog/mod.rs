//! Analytic charts for the explicit metrics.

pub mod bianchi;
pub mod canonic;
pub mod gibbons_hawking;
pub mod lebrun_pedersen;
pub mod space_forms;
pub mod toda;

use std::collections::BTreeMap;
use std::sync::Arc;

pub use bianchi::{bianchi_coframe, BianchiClass, DiagonalBianchiChart};
pub use canonic::{CanonicChart, CanonicParams};
pub use gibbons_hawking::{GHParams, GibbonsHawkingChart};
pub use lebrun_pedersen::{LPParams, LebrunPedersenChart};
pub use space_forms::{space_form_chart, SpaceFormChart, SpaceFormKind};
pub use toda::{TodaChart, TodaParams};

use crate::chart::MetricChart;
use crate::error::{GeometryError, Result};

pub fn canonic_chart(p: CanonicParams) -> Result<CanonicChart> {
    CanonicChart::new(p)
}

pub fn toda_chart(p: TodaParams) -> Result<TodaChart> {
    TodaChart::new(p)
}

pub fn lebrun_pedersen_chart(p: LPParams) -> Result<LebrunPedersenChart> {
    LebrunPedersenChart::new(p)
}

pub fn gibbons_hawking_chart(p: GHParams) -> Result<GibbonsHawkingChart> {
    GibbonsHawkingChart::new(p)
}

/// A chart name with its parameter names and defaults.
#[derive(Clone, Debug)]
pub struct ChartInfo {
    pub name: &'static str,
    pub params: &'static [(&'static str, f64)],
    pub description: &'static str,
}

pub const CHARTS: &[ChartInfo] = &[
    ChartInfo { name: "flat", params: &[], description: "Euclidean metric" },
    ChartInfo { name: "sphere", params: &[("r", 1.0)], description: "round 4-sphere, stereographic" },
    ChartInfo { name: "hyperbolic", params: &[("r", 1.0)], description: "hyperbolic 4-space, ball model" },
    ChartInfo { name: "fubini_study", params: &[], description: "complex projective plane, affine patch" },
    ChartInfo {
        name: "canonic",
        params: &[("s", 0.0), ("a", -695.0 / 576.0), ("b", 1.0)],
        description: "generic self-dual Einstein Hermitian metric in (x, y, z, t)",
    },
    ChartInfo {
        name: "toda",
        params: &[("s", -6.0), ("a", 1.0), ("b", 1.0), ("c", 1.0)],
        description: "separable Toda metric in (x, y, z, tau)",
    },
    ChartInfo {
        name: "lebrun_pedersen",
        params: &[("b", 1.0), ("c", 2.0)],
        description: "U(2)-invariant metric in (t, theta, phi, psi)",
    },
    ChartInfo { name: "gibbons_hawking", params: &[("a", 1.0), ("b", 0.0)], description: "w = a z + b" },
];

/// Builds a chart by name, filling unspecified parameters with defaults.
pub fn build_chart(name: &str, params: &BTreeMap<String, f64>) -> Result<Arc<dyn MetricChart>> {
    let info = CHARTS
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| GeometryError::InvalidParameter(format!("unknown chart '{name}'")))?;
    for key in params.keys() {
        if !info.params.iter().any(|(k, _)| k == key) {
            return Err(GeometryError::InvalidParameter(format!("chart '{name}' has no parameter '{key}'")));
        }
    }
    let get = |key: &str| -> f64 {
        params
            .get(key)
            .copied()
            .unwrap_or_else(|| info.params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v).unwrap_or(0.0))
    };
    Ok(match name {
        "flat" => Arc::new(space_form_chart(SpaceFormKind::Flat)?),
        "sphere" => Arc::new(space_form_chart(SpaceFormKind::Sphere(get("r")))?),
        "hyperbolic" => Arc::new(space_form_chart(SpaceFormKind::Hyperbolic(get("r")))?),
        "fubini_study" => Arc::new(space_form_chart(SpaceFormKind::FubiniStudy)?),
        "canonic" => Arc::new(canonic_chart(CanonicParams { s: get("s"), a: get("a"), b: get("b") })?),
        "toda" => Arc::new(toda_chart(TodaParams { s: get("s"), a: get("a"), b: get("b"), c: get("c") })?),
        "lebrun_pedersen" => Arc::new(lebrun_pedersen_chart(LPParams { b: get("b"), c: get("c") })?),
        "gibbons_hawking" => Arc::new(gibbons_hawking_chart(GHParams { a: get("a"), b: get("b") })?),
        _ => unreachable!("registry and constructor list disagree"),
    })
}
