use crate::chart::{MetricChart, MetricJets, OneFormJets, Point, TwoFormJets};
use crate::error::{GeometryError, Result};
use crate::jet::Jet2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpaceFormKind {
    Flat,
    /// Round sphere of radius `r`, stereographic coordinates.
    Sphere(f64),
    /// Hyperbolic space of radius `r`, Poincaré ball coordinates.
    Hyperbolic(f64),
    /// Complex projective plane on the affine patch `(x₁, y₁, x₂, y₂)`.
    FubiniStudy,
}

#[derive(Clone, Debug)]
pub struct SpaceFormChart {
    kind: SpaceFormKind,
    name: &'static str,
}

pub fn space_form_chart(kind: SpaceFormKind) -> Result<SpaceFormChart> {
    let name = match kind {
        SpaceFormKind::Flat => "flat",
        SpaceFormKind::Sphere(r) | SpaceFormKind::Hyperbolic(r) if !(r > 0.0 && r.is_finite()) => {
            return Err(GeometryError::InvalidParameter(format!("radius must be positive, got {r}")))
        }
        SpaceFormKind::Sphere(_) => "sphere",
        SpaceFormKind::Hyperbolic(_) => "hyperbolic",
        SpaceFormKind::FubiniStudy => "fubini_study",
    };
    Ok(SpaceFormChart { kind, name })
}

fn conformally_flat(factor: Jet2) -> MetricJets {
    let zero = Jet2::constant(0.0);
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { factor } else { zero }))
}

impl SpaceFormChart {
    pub fn kind(&self) -> SpaceFormKind {
        self.kind
    }

    /// Hermitian matrix `h = A + iB` of the Fubini–Study metric,
    /// `h_jk̄ = δ_jk/(1+|z|²) - z̄_j z_k/(1+|z|²)²`.
    fn fubini_study_blocks(x: &[Jet2; 4]) -> ([[Jet2; 2]; 2], [[Jet2; 2]; 2]) {
        let (x1, y1, x2, y2) = (x[0], x[1], x[2], x[3]);
        let n = (x1 * x1 + y1 * y1 + x2 * x2 + y2 * y2) + 1.0;
        let ni = n.recip();
        let ni2 = ni * ni;
        let re = [x1, x2];
        let im = [y1, y2];
        let mut a = [[Jet2::constant(0.0); 2]; 2];
        let mut b = [[Jet2::constant(0.0); 2]; 2];
        for j in 0..2 {
            for k in 0..2 {
                // z̄_j z_k = (x_j - i y_j)(x_k + i y_k)
                let pr = re[j] * re[k] + im[j] * im[k];
                let pi = re[j] * im[k] - im[j] * re[k];
                a[j][k] = -(pr * ni2);
                b[j][k] = -(pi * ni2);
                if j == k {
                    a[j][k] += ni;
                }
            }
        }
        (a, b)
    }
}

impl MetricChart for SpaceFormChart {
    fn name(&self) -> &str {
        self.name
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        match self.kind {
            SpaceFormKind::Sphere(r) | SpaceFormKind::Hyperbolic(r) => vec![("r", r)],
            _ => Vec::new(),
        }
    }

    fn coordinate_names(&self) -> [&'static str; 4] {
        match self.kind {
            SpaceFormKind::FubiniStudy => ["x1", "y1", "x2", "y2"],
            _ => ["x0", "x1", "x2", "x3"],
        }
    }

    fn check_domain(&self, p: &Point) -> Result<()> {
        if !p.iter().all(|v| v.is_finite()) {
            return Err(GeometryError::domain(self.name, "non-finite coordinate"));
        }
        if let SpaceFormKind::Hyperbolic(r) = self.kind {
            let n2: f64 = p.iter().map(|v| v * v).sum();
            if n2 >= r * r {
                return Err(GeometryError::domain(self.name, "|x| < r violated"));
            }
        }
        Ok(())
    }

    fn metric_jets(&self, x: &[Jet2; 4]) -> Result<MetricJets> {
        let n2: Jet2 = x.iter().map(|v| *v * *v).sum();
        Ok(match self.kind {
            SpaceFormKind::Flat => conformally_flat(Jet2::constant(1.0)),
            SpaceFormKind::Sphere(r) => conformally_flat((n2 + r * r).powi(-2) * (4.0 * r.powi(4))),
            SpaceFormKind::Hyperbolic(r) => conformally_flat((r * r - n2).try_recip()?.powi(2) * (4.0 * r.powi(4))),
            SpaceFormKind::FubiniStudy => {
                let (a, b) = Self::fubini_study_blocks(x);
                // Coordinates ordered (x₁, y₁, x₂, y₂): index 2k is x_k, 2k+1 is y_k.
                std::array::from_fn(|m| {
                    std::array::from_fn(|n| {
                        let (k, l) = (m / 2, n / 2);
                        match (m % 2, n % 2) {
                            (0, 0) | (1, 1) => a[k][l],
                            (0, 1) => b[k][l],
                            _ => b[l][k],
                        }
                    })
                })
            }
        })
    }

    /// For Fubini–Study, `F(X, Y) = g(JX, Y)` with `J ∂x_k = ∂y_k`.
    fn hermitian_candidate(&self, p: &Point) -> Option<Result<TwoFormJets>> {
        if self.kind != SpaceFormKind::FubiniStudy {
            return None;
        }
        Some(self.metric(p).map(|g| {
            // J ∂_{2k} = ∂_{2k+1}, J ∂_{2k+1} = -∂_{2k}
            let j_of = |m: usize| -> (usize, f64) {
                if m.is_multiple_of(2) {
                    (m + 1, 1.0)
                } else {
                    (m - 1, -1.0)
                }
            };
            std::array::from_fn(|m| {
                std::array::from_fn(|n| {
                    let (jm, sign) = j_of(m);
                    g[jm][n] * sign
                })
            })
        }))
    }

    fn lee_candidate(&self, p: &Point) -> Option<Result<OneFormJets>> {
        if self.kind != SpaceFormKind::FubiniStudy {
            return None;
        }
        Some(self.check_domain(p).map(|_| [Jet2::constant(0.0); 4]))
    }

    fn expected_scalar(&self) -> Option<f64> {
        match self.kind {
            SpaceFormKind::Flat => Some(0.0),
            SpaceFormKind::Sphere(r) => Some(12.0 / (r * r)),
            SpaceFormKind::Hyperbolic(r) => Some(-12.0 / (r * r)),
            SpaceFormKind::FubiniStudy => Some(24.0),
        }
    }
}
