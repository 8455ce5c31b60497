use thiserror::Error;

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    /// A point lies outside the chart's coordinate domain.
    #[error("{chart}: point outside domain ({reason})")]
    Domain { chart: String, reason: String },

    /// Jet arithmetic left its domain (division by zero, log of a non-positive value, ...).
    #[error("jet domain violation in {op} at value {value}")]
    JetDomain { op: &'static str, value: f64 },

    /// A finite-difference stencil around a domain point left the domain.
    #[error("stencil along axis {axis} leaves the domain: {reason}")]
    StencilDomain { axis: usize, reason: String },

    #[error("metric is not positive definite")]
    SingularMetric,

    #[error("self-dual Weyl tensor vanishes")]
    VanishingWeyl,

    #[error("self-dual Weyl spectrum is not degenerate (relative gap {gap:e})")]
    NonDegenerateSpectrum { gap: f64 },

    #[error("roots of W+ are undefined: all eigenvalues coincide")]
    UndefinedRoots,

    #[error("conformal scalar curvature is locally constant; {0}")]
    ConstantKappa(&'static str),

    #[error("Lee form vanishes; {0}")]
    VanishingLeeForm(&'static str),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl GeometryError {
    pub fn domain(chart: &str, reason: impl Into<String>) -> Self {
        GeometryError::Domain { chart: chart.to_string(), reason: reason.into() }
    }

    /// True for errors meaning "this point is not usable", as opposed to a
    /// configuration problem.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            GeometryError::Domain { .. }
                | GeometryError::JetDomain { .. }
                | GeometryError::SingularMetric
                | GeometryError::StencilDomain { .. }
        )
    }
}
