use crate::catalog::bianchi::{bianchi_coframe, BianchiClass};
use crate::chart::{add_square, zero_metric, MetricChart, MetricJets, Point};
use crate::error::{GeometryError, Result};
use crate::jet::Jet2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LPParams {
    pub b: f64,
    pub c: f64,
}

/// U(2)-invariant metric in coordinates `(t, θ, φ, ψ)`:
///
/// `g = (bt² + 4c)⁻² [Δ⁻¹ dt² + (t²/4)(σ₁² + σ₂² + Δ σ₃²)]`,
/// `Δ = 1 + 8b/t² + 16c/t⁴`, with the Euler-angle coframe of class IX.
#[derive(Clone, Debug)]
pub struct LebrunPedersenChart {
    params: LPParams,
}

impl LebrunPedersenChart {
    pub fn new(params: LPParams) -> Result<Self> {
        if !(params.b.is_finite() && params.c.is_finite()) {
            return Err(GeometryError::InvalidParameter("LeBrun–Pedersen parameters must be finite".into()));
        }
        Ok(Self { params })
    }

    pub fn lp_params(&self) -> LPParams {
        self.params
    }

    /// Constant `c` such that `c·g` carries the normalisation in which the
    /// two hyperhermitian Lee forms exist, `32 (c - b²)^{3/2}`; `None` unless
    /// `c > b²`.
    pub fn hyperhermitian_scale(&self) -> Option<f64> {
        let d = self.params.c - self.params.b * self.params.b;
        (d > 0.0).then(|| 32.0 * d.powf(1.5))
    }

    fn delta(&self, t: f64) -> f64 {
        1.0 + 8.0 * self.params.b / (t * t) + 16.0 * self.params.c / t.powi(4)
    }
}

impl MetricChart for LebrunPedersenChart {
    fn name(&self) -> &str {
        "lebrun_pedersen"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("b", self.params.b), ("c", self.params.c)]
    }

    fn coordinate_names(&self) -> [&'static str; 4] {
        ["t", "theta", "phi", "psi"]
    }

    fn check_domain(&self, p: &Point) -> Result<()> {
        let [t, theta, _, _] = *p;
        if !p.iter().all(|v| v.is_finite()) {
            return Err(GeometryError::domain("lebrun_pedersen", "non-finite coordinate"));
        }
        if t <= 0.0 {
            return Err(GeometryError::domain("lebrun_pedersen", "t > 0 violated"));
        }
        if self.params.b * t * t + 4.0 * self.params.c == 0.0 {
            return Err(GeometryError::domain("lebrun_pedersen", "b t^2 + 4c != 0 violated"));
        }
        if !(self.delta(t) > 0.0) {
            return Err(GeometryError::domain("lebrun_pedersen", "1 + 8b/t^2 + 16c/t^4 > 0 violated"));
        }
        if !(theta > 0.0 && theta < std::f64::consts::PI) {
            return Err(GeometryError::domain("lebrun_pedersen", "0 < theta < pi violated"));
        }
        Ok(())
    }

    fn metric_jets(&self, x: &[Jet2; 4]) -> Result<MetricJets> {
        let t = x[0];
        let LPParams { b, c } = self.params;
        let t2 = t * t;
        let delta = 1.0 + (8.0 * b) * t2.try_recip()? + (16.0 * c) * t2.powi(-2);
        let pre = (t2 * b + 4.0 * c).try_recip()?.powi(2);
        let s = bianchi_coframe(BianchiClass::IX, x)?;
        let mut g = zero_metric();
        g[0][0] = pre * delta.try_recip()?;
        let quarter = pre * t2 * 0.25;
        add_square(&mut g, &s[0], quarter);
        add_square(&mut g, &s[1], quarter);
        add_square(&mut g, &s[2], quarter * delta);
        Ok(g)
    }

    fn killing_candidates(&self, _p: &Point) -> Vec<[f64; 4]> {
        vec![[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]
    }

    /// `s = 192 b (c - b²)`.
    fn expected_scalar(&self) -> Option<f64> {
        let LPParams { b, c } = self.params;
        Some(192.0 * b * (c - b * b))
    }

    fn coordinate_scale(&self, p: &Point) -> [f64; 4] {
        [p[0], 1.0, 1.0, 1.0]
    }
}
