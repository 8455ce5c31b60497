use std::sync::Arc;

use crate::chart::{add_square, MetricChart, MetricJets, OneFormJets, Point};
use crate::error::{GeometryError, Result};
use crate::forms::{d_one_form, one_form_value, wedge_values};
use crate::jet::{seed_coordinates, Jet2};
use crate::linalg::{norm4, sub4, Mat4};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BianchiClass {
    I,
    II,
    VI0,
    VII0,
    VIII,
    IX,
}

impl BianchiClass {
    /// Structure constants `(n₁, n₂, n₃)` in
    /// `dσ₁ = n₁ σ₂∧σ₃`, `dσ₂ = -n₂ σ₁∧σ₃`, `dσ₃ = n₃ σ₁∧σ₂`.
    pub fn structure_constants(self) -> [f64; 3] {
        match self {
            BianchiClass::I => [0.0, 0.0, 0.0],
            BianchiClass::II => [0.0, 0.0, 1.0],
            BianchiClass::VI0 => [1.0, -1.0, 0.0],
            BianchiClass::VII0 => [1.0, 1.0, 0.0],
            BianchiClass::VIII => [1.0, 1.0, -1.0],
            BianchiClass::IX => [1.0, 1.0, 1.0],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BianchiClass::I => "I",
            BianchiClass::II => "II",
            BianchiClass::VI0 => "VI0",
            BianchiClass::VII0 => "VII0",
            BianchiClass::VIII => "VIII",
            BianchiClass::IX => "IX",
        }
    }
}

/// Left-invariant coframe `(σ₁, σ₂, σ₃)` on group coordinates `x[1..4]`
/// (coordinate 0 is the transversal parameter and does not appear).
///
/// Class IX uses Euler angles `(θ, φ, ψ)` with
/// `σ₁ = -(cos ψ dθ + sin ψ sin θ dφ)`, `σ₂ = sin ψ dθ - cos ψ sin θ dφ`,
/// `σ₃ = -(dψ + cos θ dφ)`; the overall sign makes `dσ₁ = σ₂∧σ₃`.
pub fn bianchi_coframe(class: BianchiClass, x: &[Jet2; 4]) -> Result<[OneFormJets; 3]> {
    let zero = Jet2::constant(0.0);
    let one = Jet2::constant(1.0);
    let (a, c) = (x[1], x[3]);
    Ok(match class {
        BianchiClass::I => [[zero, one, zero, zero], [zero, zero, one, zero], [zero, zero, zero, one]],
        BianchiClass::II => [[zero, one, zero, zero], [zero, zero, one, zero], [zero, zero, a, one]],
        BianchiClass::VII0 => {
            let (cz, sz) = (c.cos(), c.sin());
            [[zero, cz, -sz, zero], [zero, sz, cz, zero], [zero, zero, zero, one]]
        }
        BianchiClass::VI0 => {
            let (cz, sz) = (c.cosh(), c.sinh());
            [[zero, cz, -sz, zero], [zero, -sz, cz, zero], [zero, zero, zero, one]]
        }
        BianchiClass::IX => {
            let (theta, psi) = (a, c);
            let (ct, st) = (theta.cos(), theta.sin());
            let (cp, sp) = (psi.cos(), psi.sin());
            [[zero, -cp, -(sp * st), zero], [zero, sp, -(cp * st), zero], [zero, zero, -ct, -one]]
        }
        BianchiClass::VIII => return Err(GeometryError::Unsupported("Bianchi class VIII coframe".into())),
    })
}

/// Largest coordinate-component residual of the three structure equations at `p`.
pub fn bianchi_structure_residual(class: BianchiClass, p: &Point) -> Result<f64> {
    let x = seed_coordinates(*p);
    let s = bianchi_coframe(class, &x)?;
    let [n1, n2, n3] = class.structure_constants();
    let v = s.map(|f| one_form_value(&f));
    let scaled = |m: Mat4, k: f64| m.map(|r| r.map(|e| e * k));
    let r1 = norm4(&sub4(&d_one_form(&s[0]), &scaled(wedge_values(&v[1], &v[2]), n1)));
    let r2 = norm4(&sub4(&d_one_form(&s[1]), &scaled(wedge_values(&v[0], &v[2]), -n2)));
    let r3 = norm4(&sub4(&d_one_form(&s[2]), &scaled(wedge_values(&v[0], &v[1]), n3)));
    Ok(r1.max(r2).max(r3))
}

/// A coefficient function of the transversal coordinate.
pub type Profile = Arc<dyn Fn(Jet2) -> Result<Jet2> + Send + Sync>;

/// Diagonal metric `dt² + A(t) σ₁² + B(t) σ₂² + C(t) σ₃²`.
pub struct DiagonalBianchiChart {
    class: BianchiClass,
    profiles: [Profile; 3],
    name: String,
}

impl DiagonalBianchiChart {
    pub fn new(class: BianchiClass, profiles: [Profile; 3]) -> Result<Self> {
        if class == BianchiClass::VIII {
            return Err(GeometryError::Unsupported("Bianchi class VIII coframe".into()));
        }
        Ok(Self { class, profiles, name: format!("bianchi_{}", class.name()) })
    }

    /// Constant coefficients `(A, B, C)`.
    pub fn constant(class: BianchiClass, coeffs: [f64; 3]) -> Result<Self> {
        let profiles = coeffs.map(|c| -> Profile { Arc::new(move |_t: Jet2| Ok(Jet2::constant(c))) });
        Self::new(class, profiles)
    }
}

impl MetricChart for DiagonalBianchiChart {
    fn name(&self) -> &str {
        &self.name
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        Vec::new()
    }

    fn coordinate_names(&self) -> [&'static str; 4] {
        match self.class {
            BianchiClass::IX => ["t", "theta", "phi", "psi"],
            _ => ["t", "x", "y", "z"],
        }
    }

    fn check_domain(&self, p: &Point) -> Result<()> {
        if !p.iter().all(|v| v.is_finite()) {
            return Err(GeometryError::domain(&self.name, "non-finite coordinate"));
        }
        if self.class == BianchiClass::IX && !(p[1] > 0.0 && p[1] < std::f64::consts::PI) {
            return Err(GeometryError::domain(&self.name, "0 < theta < pi violated"));
        }
        for prof in &self.profiles {
            let v = prof(Jet2::constant(p[0]))?.value();
            if !(v > 0.0) {
                return Err(GeometryError::domain(&self.name, "positive coefficients violated"));
            }
        }
        Ok(())
    }

    fn metric_jets(&self, x: &[Jet2; 4]) -> Result<MetricJets> {
        let s = bianchi_coframe(self.class, x)?;
        let mut g = crate::chart::zero_metric();
        g[0][0] = Jet2::constant(1.0);
        for (form, prof) in s.iter().zip(&self.profiles) {
            add_square(&mut g, form, prof(x[0])?);
        }
        Ok(g)
    }
}
