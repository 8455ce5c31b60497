use crate::chart::{add_square, wedge, zero_metric, MetricChart, MetricJets, OneFormJets, Point, TwoFormJets};
use crate::error::{GeometryError, Result};
use crate::forms::{d_one_form, wedge_values};
use crate::jet::{seed_coordinates, Jet2};
use crate::linalg::{norm4, sub4};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TodaParams {
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Metric built from the separable Toda solution
/// `e^u = 4(c + bz + az²)/(1 + a(x² + y²))²` in coordinates `(x, y, z, τ)`:
///
/// `g = z⁻² [e^u w (dx² + dy²) + w dz² + w⁻¹ ω²]`,
/// `w = -6(bz + 2c)/(s(c + bz + az²))`,
/// `ω = dτ + Φ (y dx - x dy)`, `Φ = -12b/(s(1 + a(x² + y²)))`.
#[derive(Clone, Debug)]
pub struct TodaChart {
    params: TodaParams,
}

/// The scalar fields and the connection form of a Toda chart.
#[derive(Clone, Debug)]
pub struct TodaFields {
    pub u: Jet2,
    pub exp_u: Jet2,
    pub w: Jet2,
    pub omega: OneFormJets,
}

impl TodaChart {
    pub fn new(params: TodaParams) -> Result<Self> {
        if params.s == 0.0 || !params.s.is_finite() {
            return Err(GeometryError::InvalidParameter("Toda chart needs s != 0".into()));
        }
        if ![params.a, params.b, params.c].iter().all(|v| v.is_finite()) {
            return Err(GeometryError::InvalidParameter("Toda parameters must be finite".into()));
        }
        Ok(Self { params })
    }

    pub fn toda_params(&self) -> TodaParams {
        self.params
    }

    pub fn fields(&self, x: &[Jet2; 4]) -> Result<TodaFields> {
        let TodaParams { s, a, b, c } = self.params;
        let (xx, yy, z) = (x[0], x[1], x[2]);
        let r2 = xx * xx + yy * yy;
        let conf = r2 * a + 1.0;
        let quad = z * z * a + z * b + c;
        let u = Jet2::constant(4.0f64.ln()) + quad.try_ln()? - conf.try_ln()? * 2.0;
        let exp_u = u.exp();
        let w = (z * b + 2.0 * c) * quad.try_recip()? * (-6.0 / s);
        let phi = conf.try_recip()? * (-12.0 * b / s);
        let zero = Jet2::constant(0.0);
        let omega = [phi * yy, -(phi * xx), zero, Jet2::constant(1.0)];
        Ok(TodaFields { u, exp_u, w, omega })
    }

    /// `w` recomputed from its defining relation `w = 6(z u_z - 2)/s`.
    pub fn w_from_u(&self, p: &Point) -> Result<f64> {
        let f = self.fields(&seed_coordinates(*p))?;
        Ok(6.0 * (p[2] * f.u.d(2) - 2.0) / self.params.s)
    }

    /// `u_xx + u_yy + (e^u)_zz`.
    pub fn toda_residual(&self, p: &Point) -> Result<f64> {
        self.check_domain(p)?;
        let f = self.fields(&seed_coordinates(*p))?;
        Ok(f.u.hess(0, 0) + f.u.hess(1, 1) + f.exp_u.hess(2, 2))
    }

    /// Coordinate norm of `dω + w_x dy∧dz + w_y dz∧dx + (w e^u)_z dx∧dy`.
    pub fn monopole_residual(&self, p: &Point) -> Result<f64> {
        self.check_domain(p)?;
        let f = self.fields(&seed_coordinates(*p))?;
        let d_omega = d_one_form(&f.omega);
        let e = |i: usize| -> [f64; 4] { std::array::from_fn(|k| if k == i { 1.0 } else { 0.0 }) };
        let weu = f.w * f.exp_u;
        let mut rhs = [[0.0; 4]; 4];
        for (coef, (i, j)) in [(-f.w.d(0), (1, 2)), (-f.w.d(1), (2, 0)), (-weu.d(2), (0, 1))] {
            let w = wedge_values(&e(i), &e(j));
            for m in 0..4 {
                for n in 0..4 {
                    rhs[m][n] += coef * w[m][n];
                }
            }
        }
        Ok(norm4(&sub4(&d_omega, &rhs)))
    }
}

impl MetricChart for TodaChart {
    fn name(&self) -> &str {
        "toda"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        let p = self.params;
        vec![("s", p.s), ("a", p.a), ("b", p.b), ("c", p.c)]
    }

    fn coordinate_names(&self) -> [&'static str; 4] {
        ["x", "y", "z", "tau"]
    }

    fn check_domain(&self, p: &Point) -> Result<()> {
        let TodaParams { s, a, b, c } = self.params;
        let [x, y, z, _] = *p;
        if !p.iter().all(|v| v.is_finite()) {
            return Err(GeometryError::domain("toda", "non-finite coordinate"));
        }
        if z == 0.0 {
            return Err(GeometryError::domain("toda", "z != 0 violated"));
        }
        let quad = c + b * z + a * z * z;
        if !(quad > 0.0) {
            return Err(GeometryError::domain("toda", "c + b z + a z^2 > 0 violated"));
        }
        if !(1.0 + a * (x * x + y * y) > 0.0) {
            return Err(GeometryError::domain("toda", "1 + a(x^2 + y^2) > 0 violated"));
        }
        let w = -6.0 * (b * z + 2.0 * c) / (s * quad);
        if !(w > 0.0) {
            return Err(GeometryError::domain("toda", "w > 0 violated"));
        }
        Ok(())
    }

    fn metric_jets(&self, x: &[Jet2; 4]) -> Result<MetricJets> {
        let f = self.fields(x)?;
        let z2i = (x[2] * x[2]).try_recip()?;
        let zero = Jet2::constant(0.0);
        let one = Jet2::constant(1.0);
        let mut g = zero_metric();
        let horiz = f.exp_u * f.w * z2i;
        add_square(&mut g, &[one, zero, zero, zero], horiz);
        add_square(&mut g, &[zero, one, zero, zero], horiz);
        add_square(&mut g, &[zero, zero, one, zero], f.w * z2i);
        add_square(&mut g, &f.omega, f.w.try_recip()? * z2i);
        Ok(g)
    }

    /// `F = z⁻² (w e^u dx∧dy + dz∧ω)`.
    fn hermitian_candidate(&self, p: &Point) -> Option<Result<TwoFormJets>> {
        Some(self.check_domain(p).and_then(|_| {
            let x = seed_coordinates(*p);
            let f = self.fields(&x)?;
            let zero = Jet2::constant(0.0);
            let one = Jet2::constant(1.0);
            let dx = [one, zero, zero, zero];
            let dy = [zero, one, zero, zero];
            let dz = [zero, zero, one, zero];
            let a = wedge(&dx, &dy);
            let b = wedge(&dz, &f.omega);
            let z2i = (x[2] * x[2]).try_recip()?;
            let weu = f.w * f.exp_u;
            Ok(std::array::from_fn(|i| std::array::from_fn(|j| (weu * a[i][j] + b[i][j]) * z2i)))
        }))
    }

    fn killing_candidates(&self, _p: &Point) -> Vec<[f64; 4]> {
        vec![[0.0, 0.0, 0.0, 1.0]]
    }

    fn expected_scalar(&self) -> Option<f64> {
        Some(self.params.s)
    }
}
