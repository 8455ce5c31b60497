//! Levi-Civita curvature of a chart at a point and its block decomposition
//! on `Λ² = Λ⁺ ⊕ Λ⁻`.
//!
//! Conventions: `Γ^a_bc = ½ g^ad (∂_b g_dc + ∂_c g_db - ∂_d g_bc)`,
//! `R^a_bcd = ∂_c Γ^a_db - ∂_d Γ^a_cb + Γ^a_ce Γ^e_db - Γ^a_de Γ^e_cb`,
//! `R_abcd = g_ae R^e_bcd`, `Ric_bd = R^a_bad`. With these, the unit round
//! sphere has `R_abcd = g_ac g_bd - g_ad g_bc` and `s = 12`. The curvature
//! operator acts on 2-forms by `R(ω)_ab = ½ R_abcd ω^cd`, which is `+1` on
//! the unit sphere.

use crate::chart::{MetricChart, Point, Sign};
use crate::error::{GeometryError, Result};
use crate::forms::{inner2_frame, lambda_bases_frame, orthonormal_frame, star_frame, Frame};
use crate::linalg::{inverse4, matmul4, norm3, sym_eigen3, Mat3, Mat4, Mat6};

pub type Tensor3 = [[[f64; 4]; 4]; 4];
pub type Tensor4 = [[[[f64; 4]; 4]; 4]; 4];

/// Relative gap below which `W⁺` is declared degenerate.
pub const DEGENERACY_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct CurvaturePackage {
    pub point: Point,
    pub orientation: Sign,
    pub metric: Mat4,
    pub metric_inv: Mat4,
    /// `gamma[a][b][c] = Γ^a_bc`.
    pub gamma: Tensor3,
    /// `dgamma[a][b][c][d] = ∂_d Γ^a_bc`.
    pub dgamma: Tensor4,
    /// Fully covariant `R_abcd` in coordinates.
    pub riemann: Tensor4,
    pub ricci: Mat4,
    pub scalar_s: f64,
    /// Trace-free Ricci tensor in coordinates.
    pub ric0: Mat4,
    pub frame: Frame,
    /// `R_abcd` in the orthonormal frame.
    pub riemann_frame: Tensor4,
    /// Trace-free Ricci tensor in the orthonormal frame.
    pub ric0_frame: Mat4,
    /// Weyl tensor in the orthonormal frame, computed from its defining formula.
    pub weyl_frame: Tensor4,
    /// `Λ⁺` basis, coordinate components.
    pub lambda_plus_basis: [Mat4; 3],
    /// `Λ⁻` basis, coordinate components.
    pub lambda_minus_basis: [Mat4; 3],
    /// Curvature operator on the basis `(Λ⁺, Λ⁻)`: `M_ij = (B_i, R(B_j)) / 2`.
    pub curv_op: Mat6,
    pub wplus: Mat3,
    pub wminus: Mat3,
    /// Block `Λ⁻ → Λ⁺` of `½ Ric₀~`, i.e. `curv_op[0..3][3..6]`.
    pub ric0_block: Mat3,
}

/// Curvature package at `p` from the chart's metric jets.
pub fn curvature_package(chart: &dyn MetricChart, p: &Point) -> Result<CurvaturePackage> {
    let g = chart.metric(p)?;
    let value: Mat4 = std::array::from_fn(|i| std::array::from_fn(|j| g[i][j].value()));
    let dg: Tensor3 = std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| g[i][j].d(k))));
    let ddg: Tensor4 = std::array::from_fn(|i| {
        std::array::from_fn(|j| std::array::from_fn(|k| std::array::from_fn(|l| g[i][j].hess(k, l))))
    });
    CurvaturePackage::from_derivatives(*p, &value, &dg, &ddg, chart.orientation(p))
}

fn zero3() -> Tensor3 {
    [[[0.0; 4]; 4]; 4]
}

fn zero4() -> Tensor4 {
    [[[[0.0; 4]; 4]; 4]; 4]
}

impl CurvaturePackage {
    /// Builds the package from `g_ab`, `dg[a][b][c] = ∂_c g_ab` and
    /// `ddg[a][b][c][d] = ∂_c ∂_d g_ab`.
    pub fn from_derivatives(point: Point, g: &Mat4, dg: &Tensor3, ddg: &Tensor4, orientation: Sign) -> Result<Self> {
        let frame = orthonormal_frame(g, orientation)?;
        let ginv = inverse4(g)?;

        // Γ_dbc (first kind) and its derivatives.
        let mut gamma1 = zero3();
        let mut dgamma1 = zero4();
        for d in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    gamma1[d][b][c] = 0.5 * (dg[d][c][b] + dg[d][b][c] - dg[b][c][d]);
                    for e in 0..4 {
                        dgamma1[d][b][c][e] = 0.5 * (ddg[d][c][b][e] + ddg[d][b][c][e] - ddg[b][c][d][e]);
                    }
                }
            }
        }
        // ∂_e g^ad = -g^am ∂_e g_mn g^nd
        let mut dginv = zero3();
        for a in 0..4 {
            for d in 0..4 {
                for e in 0..4 {
                    let mut acc = 0.0;
                    for m in 0..4 {
                        for n in 0..4 {
                            acc -= ginv[a][m] * dg[m][n][e] * ginv[n][d];
                        }
                    }
                    dginv[a][d][e] = acc;
                }
            }
        }
        let mut gamma = zero3();
        let mut dgamma = zero4();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    gamma[a][b][c] = (0..4).map(|d| ginv[a][d] * gamma1[d][b][c]).sum();
                    for e in 0..4 {
                        dgamma[a][b][c][e] =
                            (0..4).map(|d| dginv[a][d][e] * gamma1[d][b][c] + ginv[a][d] * dgamma1[d][b][c][e]).sum();
                    }
                }
            }
        }

        let mut rup = zero4();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let mut v = dgamma[a][d][b][c] - dgamma[a][c][b][d];
                        for e in 0..4 {
                            v += gamma[a][c][e] * gamma[e][d][b] - gamma[a][d][e] * gamma[e][c][b];
                        }
                        rup[a][b][c][d] = v;
                    }
                }
            }
        }
        let mut riemann = zero4();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        riemann[a][b][c][d] = (0..4).map(|e| g[a][e] * rup[e][b][c][d]).sum();
                    }
                }
            }
        }
        let ricci: Mat4 = std::array::from_fn(|b| std::array::from_fn(|d| (0..4).map(|a| rup[a][b][a][d]).sum()));
        let ricci = crate::linalg::sym4(&ricci);
        let scalar_s: f64 = (0..4).map(|a| (0..4).map(|b| ginv[a][b] * ricci[a][b]).sum::<f64>()).sum();
        let ric0: Mat4 = std::array::from_fn(|a| std::array::from_fn(|b| ricci[a][b] - 0.25 * scalar_s * g[a][b]));

        // Frame components.
        let v = &frame.frame;
        let mut riemann_frame = zero4();
        {
            // Contract one index at a time.
            let mut t1 = zero4();
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        for d in 0..4 {
                            t1[a][b][c][d] = (0..4).map(|m| v[m][a] * riemann[m][b][c][d]).sum();
                        }
                    }
                }
            }
            let mut t2 = zero4();
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        for d in 0..4 {
                            t2[a][b][c][d] = (0..4).map(|m| v[m][b] * t1[a][m][c][d]).sum();
                        }
                    }
                }
            }
            let mut t3 = zero4();
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        for d in 0..4 {
                            t3[a][b][c][d] = (0..4).map(|m| v[m][c] * t2[a][b][m][d]).sum();
                        }
                    }
                }
            }
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        for d in 0..4 {
                            riemann_frame[a][b][c][d] = (0..4).map(|m| v[m][d] * t3[a][b][c][m]).sum();
                        }
                    }
                }
            }
        }
        let ric0_frame = frame.tensor_to_frame(&ric0);
        let ricci_frame = frame.tensor_to_frame(&ricci);
        let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
        let mut weyl_frame = zero4();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let kn = delta(a, c) * ricci_frame[b][d] - delta(a, d) * ricci_frame[b][c]
                            + delta(b, d) * ricci_frame[a][c]
                            - delta(b, c) * ricci_frame[a][d];
                        let gg = delta(a, c) * delta(b, d) - delta(a, d) * delta(b, c);
                        weyl_frame[a][b][c][d] = riemann_frame[a][b][c][d] - 0.5 * kn + scalar_s / 6.0 * gg;
                    }
                }
            }
        }

        let (plus, minus) = lambda_bases_frame();
        let basis: [Mat4; 6] = [plus[0], plus[1], plus[2], minus[0], minus[1], minus[2]];
        let curv_op: Mat6 = std::array::from_fn(|i| {
            std::array::from_fn(|j| 0.5 * inner2_frame(&basis[i], &apply_frame(&riemann_frame, &basis[j])))
        });
        let weyl_block = |bs: &[Mat4; 3]| -> Mat3 {
            std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * inner2_frame(&bs[i], &apply_frame(&weyl_frame, &bs[j]))))
        };
        let wplus = weyl_block(&plus);
        let wminus = weyl_block(&minus);
        let ric0_block: Mat3 = std::array::from_fn(|i| std::array::from_fn(|j| curv_op[i][j + 3]));
        let (lambda_plus_basis, lambda_minus_basis) = frame.lambda_bases();

        Ok(CurvaturePackage {
            point,
            orientation,
            metric: *g,
            metric_inv: ginv,
            gamma,
            dgamma,
            riemann,
            ricci,
            scalar_s,
            ric0,
            frame,
            riemann_frame,
            ric0_frame,
            weyl_frame,
            lambda_plus_basis,
            lambda_minus_basis,
            curv_op,
            wplus,
            wminus,
            ric0_block,
        })
    }

    /// Frame norm of the trace-free Ricci tensor.
    pub fn ric0_norm(&self) -> f64 {
        crate::linalg::norm4(&self.ric0_frame)
    }

    /// Frobenius norm of the `W⁺` block.
    pub fn wplus_norm(&self) -> f64 {
        norm3(&self.wplus)
    }

    /// Frobenius norm of the `W⁻` block.
    pub fn wminus_norm(&self) -> f64 {
        norm3(&self.wminus)
    }

    /// Frame norm of the full Riemann tensor.
    pub fn riemann_norm(&self) -> f64 {
        self.riemann_frame.iter().flatten().flatten().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Frame norm of the Ricci tensor.
    pub fn ricci_norm(&self) -> f64 {
        crate::linalg::norm4(&self.frame.tensor_to_frame(&self.ricci))
    }

    /// Curvature operator applied to a coordinate 2-form, returned in coordinates.
    pub fn apply_curvature(&self, w: &Mat4) -> Mat4 {
        let wf = self.frame.tensor_to_frame(w);
        self.frame.tensor_from_frame(&apply_frame(&self.riemann_frame, &wf))
    }

    /// `W⁺` applied to a coordinate 2-form (its `Λ⁻` part is discarded).
    pub fn apply_wplus(&self, w: &Mat4) -> Mat4 {
        let (plus, _) = lambda_bases_frame();
        let wf = self.frame.tensor_to_frame(w);
        let c: [f64; 3] = std::array::from_fn(|i| 0.5 * inner2_frame(&plus[i], &wf));
        let mut out = [[0.0; 4]; 4];
        for i in 0..3 {
            let coeff: f64 = (0..3).map(|j| self.wplus[i][j] * c[j]).sum();
            for a in 0..4 {
                for b in 0..4 {
                    out[a][b] += coeff * plus[i][a][b];
                }
            }
        }
        self.frame.tensor_from_frame(&out)
    }

    /// Largest relative violation of the pair symmetries and first Bianchi identity.
    pub fn symmetry_residual(&self) -> f64 {
        let r = &self.riemann_frame;
        let scale = self.riemann_norm().max(1.0);
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let v = r[a][b][c][d];
                        worst = worst
                            .max((v + r[b][a][c][d]).abs())
                            .max((v + r[a][b][d][c]).abs())
                            .max((v - r[c][d][a][b]).abs())
                            .max((v + r[a][c][d][b] + r[a][d][b][c]).abs());
                    }
                }
            }
        }
        worst / scale
    }

    /// `|tr W⁺| + |tr W⁻|`.
    pub fn weyl_trace_residual(&self) -> f64 {
        (self.wplus[0][0] + self.wplus[1][1] + self.wplus[2][2]).abs()
            + (self.wminus[0][0] + self.wminus[1][1] + self.wminus[2][2]).abs()
    }

    /// Largest entry of `s/12 Id + ½Ric₀~ + W⁺ + W⁻ - curv_op`, with `Ric₀~`
    /// and the Weyl halves computed independently of the curvature operator.
    pub fn reassembly_residual(&self) -> f64 {
        let (plus, minus) = lambda_bases_frame();
        let basis: [Mat4; 6] = [plus[0], plus[1], plus[2], minus[0], minus[1], minus[2]];
        let r0 = &self.ric0_frame;
        let mut worst: f64 = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                let bj = &basis[j];
                let ric_tilde = std::array::from_fn(|a| {
                    std::array::from_fn(|b| (0..4).map(|k| r0[a][k] * bj[k][b] + bj[a][k] * r0[k][b]).sum::<f64>())
                });
                let mut v = 0.25 * inner2_frame(&basis[i], &ric_tilde);
                if i == j {
                    v += self.scalar_s / 12.0;
                }
                if i < 3 && j < 3 {
                    v += self.wplus[i][j];
                }
                if i >= 3 && j >= 3 {
                    v += self.wminus[i - 3][j - 3];
                }
                worst = worst.max((v - self.curv_op[i][j]).abs());
            }
        }
        worst
    }

    /// Norm of the commutator of the curvature operator with the Hodge star.
    pub fn star_commutator(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in a + 1..4 {
                let w = crate::forms::basis_wedge(a, b);
                let lhs = apply_frame(&self.riemann_frame, &star_frame(&w));
                let rhs = star_frame(&apply_frame(&self.riemann_frame, &w));
                worst = worst.max(crate::linalg::norm4(&crate::linalg::sub4(&lhs, &rhs)));
            }
        }
        worst
    }

    /// Raises both indices of a covariant 2-tensor.
    pub fn raise2(&self, w: &Mat4) -> Mat4 {
        matmul4(&self.metric_inv, &matmul4(w, &self.metric_inv))
    }
}

/// `R(ω)_ab = ½ R_abcd ω_cd` in frame components.
pub fn apply_frame(r: &Tensor4, w: &Mat4) -> Mat4 {
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            let mut acc = 0.0;
            for c in 0..4 {
                for d in 0..4 {
                    acc += r[a][b][c][d] * w[c][d];
                }
            }
            0.5 * acc
        })
    })
}

/// Sorted spectrum of `W⁺` with eigenforms.
#[derive(Clone, Debug, PartialEq)]
pub struct WplusSpectrum {
    /// `λ₊ ≥ λ₀ ≥ λ₋`.
    pub values: [f64; 3],
    /// Coefficients of the unit eigenvectors on the `Λ⁺` basis.
    pub coefficients: [[f64; 3]; 3],
    /// Eigenforms (norm² 2) in coordinate components.
    pub eigenforms: [Mat4; 3],
    pub degeneracy_gap: f64,
}

pub fn wplus_spectrum(pkg: &CurvaturePackage) -> WplusSpectrum {
    let e = sym_eigen3(&pkg.wplus);
    let [lp, l0, lm] = e.values;
    let degeneracy_gap = if lp - lm > f64::EPSILON * lp.abs().max(lm.abs()).max(f64::MIN_POSITIVE) {
        (lp - l0).min(l0 - lm) / (lp - lm)
    } else {
        0.0
    };
    let eigenforms = e.vectors.map(|v| combine(&pkg.lambda_plus_basis, &v));
    let values = if pkg.wplus_norm() == 0.0 { [0.0; 3] } else { e.values };
    WplusSpectrum { values, coefficients: e.vectors, eigenforms, degeneracy_gap }
}

fn combine(basis: &[Mat4; 3], c: &[f64; 3]) -> Mat4 {
    std::array::from_fn(|a| std::array::from_fn(|b| (0..3).map(|k| c[k] * basis[k][a][b]).sum()))
}

/// Roots of `W⁺`: `±(√((λ₊-λ₀)/(λ₊-λ₋)) F₋ ± √((λ₀-λ₋)/(λ₊-λ₋)) F₊)`.
///
/// Returns the distinct roots up to overall sign: two in general, one when one
/// of the coefficients vanishes.
pub fn wplus_roots(spec: &WplusSpectrum) -> Result<Vec<Mat4>> {
    let [lp, l0, lm] = spec.values;
    let width = lp - lm;
    if !(width > DEGENERACY_TOL * lp.abs().max(lm.abs())) || width <= 0.0 {
        return Err(GeometryError::UndefinedRoots);
    }
    let cm = ((lp - l0) / width).max(0.0).sqrt();
    let cp = ((l0 - lm) / width).max(0.0).sqrt();
    let fp = &spec.eigenforms[0];
    let fm = &spec.eigenforms[2];
    let root = |sp: f64| -> Mat4 { std::array::from_fn(|a| std::array::from_fn(|b| cm * fm[a][b] + sp * cp * fp[a][b])) };
    if cm * cp <= DEGENERACY_TOL {
        Ok(vec![root(1.0)])
    } else {
        Ok(vec![root(1.0), root(-1.0)])
    }
}
