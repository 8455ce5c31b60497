//! The [`MetricChart`] abstraction: an analytic coordinate chart whose metric
//! components are evaluated as [`Jet2`]s.

use std::sync::Arc;

use crate::error::{GeometryError, Result};
use crate::jet::{seed_coordinates, Jet2, DIM};

pub type Point = [f64; DIM];
/// Symmetric 4×4 matrix of metric jets `g_ab`.
pub type MetricJets = [[Jet2; DIM]; DIM];
/// Coordinate components `ω_a` of a 1-form.
pub type OneFormJets = [Jet2; DIM];
/// Coordinate components `ω_ab = -ω_ba` of a 2-form.
pub type TwoFormJets = [[Jet2; DIM]; DIM];

/// Orientation of the coordinate volume form `dx⁰∧dx¹∧dx²∧dx³`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }

    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

/// An immutable analytic coordinate chart.
///
/// Implementors supply the metric as jets of the seeded coordinates together
/// with a pure domain predicate. Optional analytic candidate fields (Kähler
/// form, Lee form, Killing fields) are used to cross-check quantities the
/// engine extracts from curvature.
pub trait MetricChart: Send + Sync {
    fn name(&self) -> &str;

    /// Parameters in a fixed order, used for reporting.
    fn params(&self) -> Vec<(&'static str, f64)>;

    fn coordinate_names(&self) -> [&'static str; DIM];

    /// `Ok(())` if `p` lies in the chart domain, otherwise a domain error
    /// naming the violated inequality.
    fn check_domain(&self, p: &Point) -> Result<()>;

    /// Metric components at the seeded coordinates `x`. Only called on points
    /// that passed [`MetricChart::check_domain`].
    fn metric_jets(&self, x: &[Jet2; DIM]) -> Result<MetricJets>;

    /// Orientation of the coordinate volume form relative to the chart's
    /// declared orientation.
    fn orientation(&self, _p: &Point) -> Sign {
        Sign::Positive
    }

    /// Analytic Kähler form candidate `F`, if the chart has one.
    fn hermitian_candidate(&self, _p: &Point) -> Option<Result<TwoFormJets>> {
        None
    }

    /// Analytic Lee form candidate `θ`, if the chart has one.
    fn lee_candidate(&self, _p: &Point) -> Option<Result<OneFormJets>> {
        None
    }

    /// Analytic Killing vector field candidates at `p` (coordinate components).
    fn killing_candidates(&self, _p: &Point) -> Vec<[f64; DIM]> {
        Vec::new()
    }

    /// Scalar curvature the chart is constructed to have, if known.
    fn expected_scalar(&self) -> Option<f64> {
        None
    }

    /// Conformal scalar curvature the chart is constructed to have, if known.
    fn expected_kappa(&self, _p: &Point) -> Option<f64> {
        None
    }

    /// Local coordinate scale used to size finite-difference steps.
    fn coordinate_scale(&self, p: &Point) -> [f64; DIM] {
        std::array::from_fn(|i| p[i].abs().max(1.0))
    }

    fn contains(&self, p: &Point) -> bool {
        self.check_domain(p).is_ok()
    }

    /// Domain-checked metric jets at `p`.
    fn metric(&self, p: &Point) -> Result<MetricJets> {
        self.check_domain(p)?;
        let g = self.metric_jets(&seed_coordinates(*p))?;
        if g.iter().flatten().all(Jet2::is_finite) {
            Ok(g)
        } else {
            Err(GeometryError::domain(self.name(), "metric not finite"))
        }
    }

    /// Metric value matrix at `p`.
    fn metric_value(&self, p: &Point) -> Result<[[f64; DIM]; DIM]> {
        let g = self.metric(p)?;
        Ok(std::array::from_fn(|i| std::array::from_fn(|j| g[i][j].value())))
    }
}

/// Fills a symmetric jet matrix from its upper triangle entries.
pub fn symmetric_from_upper(upper: [[Jet2; DIM]; DIM]) -> MetricJets {
    std::array::from_fn(|i| std::array::from_fn(|j| if i <= j { upper[i][j] } else { upper[j][i] }))
}

/// Outer product `a ⊗ b + b ⊗ a` scaled by `½`, i.e. the symmetric product `a·b`.
pub fn sym_product(a: &OneFormJets, b: &OneFormJets) -> MetricJets {
    std::array::from_fn(|i| std::array::from_fn(|j| (a[i] * b[j] + a[j] * b[i]) * 0.5))
}

/// Adds `w · (a ⊗ a)` into `g`.
pub fn add_square(g: &mut MetricJets, a: &OneFormJets, w: Jet2) {
    for i in 0..DIM {
        for j in 0..DIM {
            g[i][j] += w * a[i] * a[j];
        }
    }
}

pub fn zero_metric() -> MetricJets {
    [[Jet2::constant(0.0); DIM]; DIM]
}

/// Wedge product `a ∧ b` as antisymmetric components.
pub fn wedge(a: &OneFormJets, b: &OneFormJets) -> TwoFormJets {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i] * b[j] - a[j] * b[i]))
}

/// A chart whose metric is a constant multiple `factor · g` of another chart.
pub struct ScaledChart {
    inner: Arc<dyn MetricChart>,
    factor: f64,
    name: String,
}

impl ScaledChart {
    pub fn new(inner: Arc<dyn MetricChart>, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(GeometryError::InvalidParameter(format!("scale factor must be positive, got {factor}")));
        }
        let name = format!("{}*{}", inner.name(), factor);
        Ok(Self { inner, factor, name })
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }
}

impl MetricChart for ScaledChart {
    fn name(&self) -> &str {
        &self.name
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        let mut p = self.inner.params();
        p.push(("scale", self.factor));
        p
    }

    fn coordinate_names(&self) -> [&'static str; DIM] {
        self.inner.coordinate_names()
    }

    fn check_domain(&self, p: &Point) -> Result<()> {
        self.inner.check_domain(p)
    }

    fn metric_jets(&self, x: &[Jet2; DIM]) -> Result<MetricJets> {
        let g = self.inner.metric_jets(x)?;
        Ok(g.map(|row| row.map(|v| v * self.factor)))
    }

    fn orientation(&self, p: &Point) -> Sign {
        self.inner.orientation(p)
    }

    fn hermitian_candidate(&self, p: &Point) -> Option<Result<TwoFormJets>> {
        let f = self.factor;
        self.inner.hermitian_candidate(p).map(|r| r.map(|w| w.map(|row| row.map(|v| v * f))))
    }

    fn lee_candidate(&self, p: &Point) -> Option<Result<OneFormJets>> {
        self.inner.lee_candidate(p)
    }

    fn killing_candidates(&self, p: &Point) -> Vec<[f64; DIM]> {
        self.inner.killing_candidates(p)
    }

    fn expected_scalar(&self) -> Option<f64> {
        self.inner.expected_scalar().map(|s| s / self.factor)
    }

    fn expected_kappa(&self, p: &Point) -> Option<f64> {
        self.inner.expected_kappa(p).map(|k| k / self.factor)
    }

    fn coordinate_scale(&self, p: &Point) -> [f64; DIM] {
        self.inner.coordinate_scale(p)
    }
}

/// The same metric with the opposite orientation.
pub struct ReorientedChart {
    inner: Arc<dyn MetricChart>,
    name: String,
}

impl ReorientedChart {
    pub fn new(inner: Arc<dyn MetricChart>) -> Self {
        let name = format!("{}(reoriented)", inner.name());
        Self { inner, name }
    }
}

impl MetricChart for ReorientedChart {
    fn name(&self) -> &str {
        &self.name
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        self.inner.params()
    }

    fn coordinate_names(&self) -> [&'static str; DIM] {
        self.inner.coordinate_names()
    }

    fn check_domain(&self, p: &Point) -> Result<()> {
        self.inner.check_domain(p)
    }

    fn metric_jets(&self, x: &[Jet2; DIM]) -> Result<MetricJets> {
        self.inner.metric_jets(x)
    }

    fn orientation(&self, p: &Point) -> Sign {
        self.inner.orientation(p).flip()
    }

    fn killing_candidates(&self, p: &Point) -> Vec<[f64; DIM]> {
        self.inner.killing_candidates(p)
    }

    fn expected_scalar(&self) -> Option<f64> {
        self.inner.expected_scalar()
    }

    fn coordinate_scale(&self, p: &Point) -> [f64; DIM] {
        self.inner.coordinate_scale(p)
    }
}
