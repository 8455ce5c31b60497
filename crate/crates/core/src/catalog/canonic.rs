use crate::chart::{add_square, wedge, zero_metric, MetricChart, MetricJets, OneFormJets, Point, Sign, TwoFormJets};
use crate::error::{GeometryError, Result};
use crate::frobenius::{closed_form_jets, SolutionConstants};
use crate::jet::{seed_coordinates, Jet2};

pub type CanonicParams = SolutionConstants;

/// Generic-case metric in coordinates `(x, y, z, t)`:
///
/// `g = (θ² + (Jθ)² + α² + (Jα)²) / y` with `θ = dx/x`,
/// `Jθ = (y/x)(dt + h dz)`, `α = (dy/2y - (p - (x³-s)/24y + ½) dx/x) / q`,
/// `Jα = (q y²/x³) dz`, `h = y p/x² + x/24` and `(p, q²)` the closed-form
/// solution, `q = +√q²`.
#[derive(Clone, Debug)]
pub struct CanonicChart {
    params: CanonicParams,
}

/// The analytic coframe of a canonic chart and the scalar fields it is built from.
#[derive(Clone, Debug)]
pub struct CanonicForms {
    pub theta: OneFormJets,
    pub jtheta: OneFormJets,
    pub alpha: OneFormJets,
    pub jalpha: OneFormJets,
    pub p: Jet2,
    pub q2: Jet2,
    pub q: Jet2,
    pub h: Jet2,
    pub y: Jet2,
    pub kappa: Jet2,
}

impl CanonicChart {
    pub fn new(params: CanonicParams) -> Result<Self> {
        if ![params.s, params.a, params.b].iter().all(|v| v.is_finite()) {
            return Err(GeometryError::InvalidParameter("canonic parameters must be finite".into()));
        }
        Ok(Self { params })
    }

    pub fn constants(&self) -> SolutionConstants {
        self.params
    }

    /// `q²` at `(x, y)` (no domain check beyond `x ≠ 0`, `y > 0`).
    pub fn q2_at(&self, x: f64, y: f64) -> f64 {
        crate::frobenius::closed_form_pq(&self.params, x, y).1
    }

    /// Coframe fields at the seeded coordinates `c`.
    pub fn forms(&self, c: &[Jet2; 4]) -> Result<CanonicForms> {
        let [x, y, _, _] = *c;
        let s = self.params.s;
        let zero = Jet2::constant(0.0);
        let one = Jet2::constant(1.0);
        let (p, q2) = closed_form_jets(&self.params, x, y);
        let q = q2.try_sqrt()?;
        let xi = x.try_recip()?;
        let yi = y.try_recip()?;
        let h = y * p * xi * xi + x / 24.0;
        let big_a = p - (x.powi(3) - s) * yi / 24.0 + 0.5;
        let qi = q.try_recip()?;
        let theta = [xi, zero, zero, zero];
        let jtheta = [zero, zero, y * xi * h, y * xi * one];
        let alpha = [-(big_a * xi * qi), yi * qi * 0.5, zero, zero];
        let jalpha = [zero, zero, q * y * y * xi.powi(3), zero];
        Ok(CanonicForms { theta, jtheta, alpha, jalpha, p, q2, q, h, y, kappa: x.powi(3) })
    }

    /// Kähler form candidate `F = (θ∧Jθ + α∧Jα)/y` as jets.
    pub fn kahler_form(&self, c: &[Jet2; 4]) -> Result<TwoFormJets> {
        let f = self.forms(c)?;
        let a = wedge(&f.theta, &f.jtheta);
        let b = wedge(&f.alpha, &f.jalpha);
        let yi = f.y.try_recip()?;
        Ok(std::array::from_fn(|i| std::array::from_fn(|j| (a[i][j] + b[i][j]) * yi)))
    }
}

impl MetricChart for CanonicChart {
    fn name(&self) -> &str {
        "canonic"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("s", self.params.s), ("a", self.params.a), ("b", self.params.b)]
    }

    fn coordinate_names(&self) -> [&'static str; 4] {
        ["x", "y", "z", "t"]
    }

    fn check_domain(&self, p: &Point) -> Result<()> {
        let [x, y, z, t] = *p;
        if !p.iter().all(|v| v.is_finite()) {
            return Err(GeometryError::domain("canonic", "non-finite coordinate"));
        }
        let _ = (z, t);
        if x == 0.0 {
            return Err(GeometryError::domain("canonic", "x != 0 violated"));
        }
        if y <= 0.0 {
            return Err(GeometryError::domain("canonic", "y > 0 violated"));
        }
        let q2 = self.q2_at(x, y);
        if !(q2 > 0.0) {
            return Err(GeometryError::domain("canonic", format!("q^2 > 0 violated (q^2 = {q2:e})")));
        }
        Ok(())
    }

    fn metric_jets(&self, c: &[Jet2; 4]) -> Result<MetricJets> {
        let f = self.forms(c)?;
        let w = f.y.try_recip()?;
        let mut g = zero_metric();
        for form in [&f.theta, &f.jtheta, &f.alpha, &f.jalpha] {
            add_square(&mut g, form, w);
        }
        Ok(g)
    }

    /// `(θ, Jθ, α, Jα)` has coordinate determinant `y²/(2x⁵)`, so the
    /// coordinate orientation agrees with it exactly when `x > 0`.
    fn orientation(&self, p: &Point) -> Sign {
        Sign::of(p[0])
    }

    fn hermitian_candidate(&self, p: &Point) -> Option<Result<TwoFormJets>> {
        Some(self.check_domain(p).and_then(|_| self.kahler_form(&seed_coordinates(*p))))
    }

    fn lee_candidate(&self, p: &Point) -> Option<Result<OneFormJets>> {
        Some(self.check_domain(p).and_then(|_| {
            let c = seed_coordinates(*p);
            Ok([c[0].try_recip()?, Jet2::constant(0.0), Jet2::constant(0.0), Jet2::constant(0.0)])
        }))
    }

    fn killing_candidates(&self, _p: &Point) -> Vec<[f64; 4]> {
        vec![[0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 1.0, 0.0]]
    }

    fn expected_scalar(&self) -> Option<f64> {
        Some(self.params.s)
    }

    fn expected_kappa(&self, p: &Point) -> Option<f64> {
        Some(p[0].powi(3))
    }

    fn coordinate_scale(&self, p: &Point) -> [f64; 4] {
        [p[0].abs(), p[1], 1.0, 1.0]
    }
}
