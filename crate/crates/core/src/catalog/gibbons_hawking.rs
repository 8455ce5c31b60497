use crate::chart::{add_square, zero_metric, MetricChart, MetricJets, Point};
use crate::error::{GeometryError, Result};
use crate::forms::{d_one_form, wedge_values};
use crate::jet::{seed_coordinates, Jet2};
use crate::linalg::{norm4, sub4};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GHParams {
    pub a: f64,
    pub b: f64,
}

/// `g = w (dx² + dy² + dz²) + w⁻¹ ω²` with `w = az + b` and `ω = dτ - a x dy`,
/// coordinates `(x, y, z, τ)`.
#[derive(Clone, Debug)]
pub struct GibbonsHawkingChart {
    params: GHParams,
}

impl GibbonsHawkingChart {
    pub fn new(params: GHParams) -> Result<Self> {
        if !(params.a.is_finite() && params.b.is_finite()) {
            return Err(GeometryError::InvalidParameter("Gibbons–Hawking parameters must be finite".into()));
        }
        Ok(Self { params })
    }

    fn omega(&self, x: &[Jet2; 4]) -> [Jet2; 4] {
        let zero = Jet2::constant(0.0);
        [zero, x[0] * -self.params.a, zero, Jet2::constant(1.0)]
    }

    /// Coordinate norm of `dω + w_z dx∧dy`.
    pub fn monopole_residual(&self, p: &Point) -> Result<f64> {
        self.check_domain(p)?;
        let x = seed_coordinates(*p);
        let d = d_one_form(&self.omega(&x));
        let rhs = wedge_values(&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]).map(|r| r.map(|v| -self.params.a * v));
        Ok(norm4(&sub4(&d, &rhs)))
    }
}

impl MetricChart for GibbonsHawkingChart {
    fn name(&self) -> &str {
        "gibbons_hawking"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("a", self.params.a), ("b", self.params.b)]
    }

    fn coordinate_names(&self) -> [&'static str; 4] {
        ["x", "y", "z", "tau"]
    }

    fn check_domain(&self, p: &Point) -> Result<()> {
        if !p.iter().all(|v| v.is_finite()) {
            return Err(GeometryError::domain("gibbons_hawking", "non-finite coordinate"));
        }
        if !(self.params.a * p[2] + self.params.b > 0.0) {
            return Err(GeometryError::domain("gibbons_hawking", "w = a z + b > 0 violated"));
        }
        Ok(())
    }

    fn metric_jets(&self, x: &[Jet2; 4]) -> Result<MetricJets> {
        let w = x[2] * self.params.a + self.params.b;
        let zero = Jet2::constant(0.0);
        let one = Jet2::constant(1.0);
        let mut g = zero_metric();
        add_square(&mut g, &[one, zero, zero, zero], w);
        add_square(&mut g, &[zero, one, zero, zero], w);
        add_square(&mut g, &[zero, zero, one, zero], w);
        add_square(&mut g, &self.omega(x), w.try_recip()?);
        Ok(g)
    }

    fn killing_candidates(&self, _p: &Point) -> Vec<[f64; 4]> {
        vec![[0.0, 0.0, 0.0, 1.0]]
    }

    fn expected_scalar(&self) -> Option<f64> {
        Some(0.0)
    }
}
