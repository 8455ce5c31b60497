//! The positive Hermitian structure carried by a degenerate `W⁺`: the Kähler
//! form `F`, the complex structure `J`, the conformal scalar curvature `κ`,
//! the Lee form `θ` and the Killing field `K = J grad(κ^{-1/3})`.
//!
//! `F`, `J` and `κ` come out of an eigen-decomposition and are not jets, so
//! everything built on their derivatives goes through [`crate::stencil`].
//!
//! Conventions: `J^σ_μ = j[σ][μ]`, `F(X, Y) = g(JX, Y)`, hence `J = -g⁻¹F`;
//! on 1-forms `(Jα)(X) = -α(JX)`.

use crate::chart::{MetricChart, Point};
use crate::curvature::{curvature_package, wplus_spectrum, CurvaturePackage, Tensor3, DEGENERACY_TOL};
use crate::error::{GeometryError, Result};
use crate::forms::{inner2, norm2_one_form, Frame};
use crate::linalg::{matmul4, matvec4, norm4, sym4, Mat4, Vec4};
use crate::stencil::{gradient, scalar_gradient, steps};

/// `W⁺` counts as zero below this fraction of `max(1, |R|)`.
pub const VANISHING_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianData {
    pub point: Point,
    /// Kähler form, coordinate components, `|F|² = 2`.
    pub f: Mat4,
    /// `j[σ][μ] = J^σ_μ`.
    pub j: Mat4,
    /// `κ = 3(W⁺(F), F)`.
    pub kappa: f64,
    pub lambda_simple: f64,
    /// `λ₊ ≥ λ₀ ≥ λ₋`.
    pub spectrum: [f64; 3],
    pub degeneracy_gap: f64,
    /// Lee form from `θ = ⅓ d ln|κ|`, once computed.
    pub theta: Option<Vec4>,
    /// Killing field `J grad(κ^{-1/3})`, once computed.
    pub killing: Option<Vec4>,
}

/// `J = -g⁻¹F`.
pub fn j_from_f(f: &Mat4, ginv: &Mat4) -> Mat4 {
    let m = matmul4(ginv, f);
    m.map(|r| r.map(|v| -v))
}

/// `(Jα)_μ = -α_σ J^σ_μ`.
pub fn j_one_form(j: &Mat4, a: &Vec4) -> Vec4 {
    std::array::from_fn(|m| -(0..4).map(|s| a[s] * j[s][m]).sum::<f64>())
}

pub fn extract_hermitian(pkg: &CurvaturePackage) -> Result<HermitianData> {
    if pkg.wplus_norm() <= VANISHING_TOL * pkg.riemann_norm().max(1.0) {
        return Err(GeometryError::VanishingWeyl);
    }
    let spec = wplus_spectrum(pkg);
    if spec.degeneracy_gap > DEGENERACY_TOL {
        return Err(GeometryError::NonDegenerateSpectrum { gap: spec.degeneracy_gap });
    }
    let [lp, l0, lm] = spec.values;
    let simple = if lp - l0 >= l0 - lm { 0 } else { 2 };
    let f = spec.eigenforms[simple];
    let kappa = 3.0 * inner2(&pkg.apply_wplus(&f), &f, &pkg.metric_inv);
    Ok(HermitianData {
        point: pkg.point,
        f,
        j: j_from_f(&f, &pkg.metric_inv),
        kappa,
        lambda_simple: spec.values[simple],
        spectrum: spec.values,
        degeneracy_gap: spec.degeneracy_gap,
        theta: None,
        killing: None,
    })
}

impl HermitianData {
    /// Flips `F` and `J` if `F` has negative inner product with `reference`.
    pub fn align(&mut self, reference: &Mat4, ginv: &Mat4) {
        if inner2(&self.f, reference, ginv) < 0.0 {
            self.flip();
        }
    }

    pub fn flip(&mut self) {
        self.f = self.f.map(|r| r.map(|v| -v));
        self.j = self.j.map(|r| r.map(|v| -v));
        self.killing = self.killing.map(|k| k.map(|v| -v));
    }

    /// `(Jα)` for a 1-form `α`.
    pub fn j_form(&self, a: &Vec4) -> Vec4 {
        j_one_form(&self.j, a)
    }
}

/// Fixes the signs along a scan: each entry is aligned with the previous one
/// (`ginvs[i]` is the inverse metric at entry `i`).
pub fn align_sequence(data: &mut [HermitianData], ginvs: &[Mat4]) {
    for i in 1..data.len().min(ginvs.len()) {
        let prev = data[i - 1].f;
        data[i].align(&prev, &ginvs[i]);
    }
}

/// Extraction at `q`, with the sign of `F` aligned to `reference` if given.
pub fn hermitian_at(chart: &dyn MetricChart, q: &Point, reference: Option<&Mat4>) -> Result<(HermitianData, CurvaturePackage)> {
    let pkg = curvature_package(chart, q)?;
    let mut hd = extract_hermitian(&pkg)?;
    if let Some(r) = reference {
        hd.align(r, &pkg.metric_inv);
    }
    Ok((hd, pkg))
}

pub fn kappa_at(chart: &dyn MetricChart, q: &Point) -> Result<f64> {
    Ok(hermitian_at(chart, q, None)?.0.kappa)
}

/// `θ = ⅓ d ln|κ|` from a stencil of `κ`.
pub fn lee_form_kappa(chart: &dyn MetricChart, p: &Point) -> Result<Vec4> {
    let k0 = kappa_at(chart, p)?;
    let dk = scalar_gradient(&|q: &Point| kappa_at(chart, q), p, &steps(chart, p))?;
    Ok(dk.map(|v| v / (3.0 * k0)))
}

/// Extraction plus the Lee form (from `κ`) and the Killing field; the latter
/// stays `None` where `κ` is locally constant.
pub fn hermitian_data(chart: &dyn MetricChart, p: &Point) -> Result<HermitianData> {
    let (mut hd, pkg) = hermitian_at(chart, p, None)?;
    hd.theta = Some(lee_form_kappa(chart, p)?);
    hd.killing = match killing_field(chart, p, &hd.j, &pkg.metric_inv) {
        Ok(k) => Some(k),
        Err(GeometryError::ConstantKappa(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(hd)
}

/// `∇_a α_b = ∂_a α_b - Γ^σ_ab α_σ`, with `da[a][b] = ∂_a α_b`.
pub fn nabla_one_form(gamma: &Tensor3, a: &Vec4, da: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| da[i][j] - (0..4).map(|s| gamma[s][i][j] * a[s]).sum::<f64>()))
}

/// `δα = -g^ab ∇_a α_b`.
pub fn codifferential_one_form(pkg: &CurvaturePackage, a: &Vec4, da: &Mat4) -> f64 {
    let n = nabla_one_form(&pkg.gamma, a, da);
    -(0..4).map(|i| (0..4).map(|j| pkg.metric_inv[i][j] * n[i][j]).sum::<f64>()).sum::<f64>()
}

pub(crate) fn flatten(m: &Mat4) -> Vec<f64> {
    m.iter().flatten().copied().collect()
}

pub(crate) fn unflatten(v: &[f64]) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| v[4 * i + j]))
}

/// `d[l][a][b] = ∂_l M_ab` for a matrix-valued field.
pub(crate) fn matrix_gradient<F>(f: &F, p: &Point, h: &[f64; 4]) -> Result<[Mat4; 4]>
where
    F: Fn(&Point) -> Result<Mat4> + ?Sized,
{
    let g = gradient(&|q: &Point| f(q).map(|m| flatten(&m)), p, h)?;
    Ok(std::array::from_fn(|l| unflatten(&g[l])))
}

/// `d[l][b] = ∂_l α_b` for a 1-form field.
pub(crate) fn one_form_gradient<F>(f: &F, p: &Point, h: &[f64; 4]) -> Result<Mat4>
where
    F: Fn(&Point) -> Result<Vec4> + ?Sized,
{
    let g = gradient(&|q: &Point| f(q).map(|v| v.to_vec()), p, h)?;
    Ok(std::array::from_fn(|l| std::array::from_fn(|b| g[l][b])))
}

/// Both determinations of the Lee form and their metric distance.
#[derive(Clone, Debug, PartialEq)]
pub struct LeeForms {
    /// `θ = -½ J δF`.
    pub route_a: Vec4,
    /// `θ = ⅓ d ln|κ|`.
    pub route_b: Vec4,
    pub difference: f64,
}

/// `(δF)_ν = -g^λμ ∇_λ F_μν`, with `df[l][m][n] = ∂_l F_mn`.
pub fn codifferential_two_form(pkg: &CurvaturePackage, f: &Mat4, df: &[Mat4; 4]) -> Vec4 {
    let gam = &pkg.gamma;
    let gi = &pkg.metric_inv;
    std::array::from_fn(|n| {
        let mut acc = 0.0;
        for l in 0..4 {
            for m in 0..4 {
                let mut nab = df[l][m][n];
                for s in 0..4 {
                    nab -= gam[s][l][m] * f[s][n] + gam[s][l][n] * f[m][s];
                }
                acc += gi[l][m] * nab;
            }
        }
        -acc
    })
}

pub fn lee_form(chart: &dyn MetricChart, p: &Point, hd: &HermitianData) -> Result<LeeForms> {
    if hd.kappa == 0.0 {
        return Err(GeometryError::VanishingWeyl);
    }
    let pkg = curvature_package(chart, p)?;
    let h = steps(chart, p);
    let reference = hd.f;
    let df = matrix_gradient(&|q: &Point| hermitian_at(chart, q, Some(&reference)).map(|(d, _)| d.f), p, &h)?;
    let delta_f = codifferential_two_form(&pkg, &hd.f, &df);
    let route_a = j_one_form(&hd.j, &delta_f).map(|v| -0.5 * v);
    let route_b = match hd.theta {
        Some(t) => t,
        None => lee_form_kappa(chart, p)?,
    };
    let diff: Vec4 = std::array::from_fn(|k| route_a[k] - route_b[k]);
    let difference = norm2_one_form(&diff, &pkg.metric_inv).max(0.0).sqrt();
    Ok(LeeForms { route_a, route_b, difference })
}

/// `K = J grad(κ^{-1/3})` at `q`, for the given `J` and `g⁻¹` at `q`.
pub fn killing_field(chart: &dyn MetricChart, q: &Point, j: &Mat4, ginv: &Mat4) -> Result<Vec4> {
    let h = steps(chart, q);
    let k0 = kappa_at(chart, q)?;
    let dk = scalar_gradient(&|r: &Point| kappa_at(chart, r), q, &h)?;
    if norm2_one_form(&dk, ginv).max(0.0).sqrt() <= 1e-10 * k0.abs() {
        return Err(GeometryError::ConstantKappa("no Killing field from κ"));
    }
    // d(κ^{-1/3}) = -⅓ κ^{-4/3} dκ with the real cube root.
    let c = -1.0 / (3.0 * k0 * k0.cbrt());
    let df = dk.map(|v| c * v);
    let grad = matvec4(ginv, &df);
    Ok(matvec4(j, &grad))
}

#[derive(Clone, Debug, PartialEq)]
pub struct KillingCheck {
    /// Frame norm of `∇_a K_b + ∇_b K_a`.
    pub residual: f64,
    pub field: Vec4,
    /// `sin²` of the angle between `K` and the closest chart Killing candidate.
    pub alignment: Option<f64>,
}

pub fn killing_residual(chart: &dyn MetricChart, p: &Point, hd: &HermitianData) -> Result<KillingCheck> {
    let pkg = curvature_package(chart, p)?;
    let reference = hd.f;
    let flat_k = |q: &Point| -> Result<Vec4> {
        let (d, pk) = hermitian_at(chart, q, Some(&reference))?;
        let k = killing_field(chart, q, &d.j, &pk.metric_inv)?;
        Ok(matvec4(&pk.metric, &k))
    };
    let k_up = killing_field(chart, p, &hd.j, &pkg.metric_inv)?;
    let k_flat = matvec4(&pkg.metric, &k_up);
    let dk = one_form_gradient(&flat_k, p, &steps(chart, p))?;
    let n = nabla_one_form(&pkg.gamma, &k_flat, &dk);
    let sym = sym4(&n).map(|r| r.map(|v| 2.0 * v));
    let residual = norm4(&pkg.frame.tensor_to_frame(&sym));
    let kk = k_up.iter().zip(&k_flat).map(|(a, b)| a * b).sum::<f64>();
    let alignment = chart
        .killing_candidates(p)
        .iter()
        .map(|c| {
            let cc: f64 = (0..4).map(|i| (0..4).map(|j| pkg.metric[i][j] * c[i] * c[j]).sum::<f64>()).sum();
            let kc: f64 = (0..4).map(|i| k_flat[i] * c[i]).sum();
            1.0 - kc * kc / (kk * cc)
        })
        .min_by(f64::total_cmp);
    Ok(KillingCheck { residual, field: k_up, alignment })
}

/// `N^σ_μν` of an almost complex structure from `dj[l][σ][μ] = ∂_l J^σ_μ`,
/// returned as `n[μ][ν][σ]`.
pub fn nijenhuis_tensor(j: &Mat4, dj: &[Mat4; 4]) -> [[Vec4; 4]; 4] {
    std::array::from_fn(|m| {
        std::array::from_fn(|n| {
            std::array::from_fn(|s| {
                let mut v = 0.0;
                for l in 0..4 {
                    v += j[l][m] * dj[l][s][n] - j[l][n] * dj[l][s][m];
                    v -= j[s][l] * (dj[m][l][n] - dj[n][l][m]);
                }
                v
            })
        })
    })
}

/// `(Σ_{a<b} |N(e_a, e_b)|²)^{1/2}` in the orthonormal frame.
pub fn nijenhuis_frame_norm(frame: &Frame, n: &[[Vec4; 4]; 4]) -> f64 {
    let v = &frame.frame;
    let mut acc = 0.0;
    for a in 0..4 {
        for b in a + 1..4 {
            let mut vec = [0.0; 4];
            for m in 0..4 {
                for nn in 0..4 {
                    let w = v[m][a] * v[nn][b];
                    for s in 0..4 {
                        vec[s] += w * n[m][nn][s];
                    }
                }
            }
            let fv = frame.vector_to_frame(&vec);
            acc += fv.iter().map(|x| x * x).sum::<f64>();
        }
    }
    acc.sqrt()
}

/// Sign `ε` in `D_X J = ε [X∧θ, J]` with `(X∧θ)(Z) = g(X,Z) θ♯ - θ(Z) X`.
pub const INTEGRABLE_SIGN: f64 = 1.0;

/// Frame norm of `D_X J - ε[X∧θ, J]` over the frame vectors `X = e_a`.
pub fn integrable_residual(pkg: &CurvaturePackage, j: &Mat4, dj: &[Mat4; 4], theta: &Vec4) -> f64 {
    let gam = &pkg.gamma;
    let g = &pkg.metric;
    let theta_up = matvec4(&pkg.metric_inv, theta);
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    // E[l] = ∇_l J - ε [A_l, J] as coordinate endomorphisms.
    let e: [Mat4; 4] = std::array::from_fn(|l| {
        let a: Mat4 = std::array::from_fn(|s| std::array::from_fn(|r| g[l][r] * theta_up[s] - theta[r] * delta(s, l)));
        let aj = matmul4(&a, j);
        let ja = matmul4(j, &a);
        std::array::from_fn(|s| {
            std::array::from_fn(|m| {
                let mut nab = dj[l][s][m];
                for r in 0..4 {
                    nab += gam[s][l][r] * j[r][m] - gam[r][l][m] * j[s][r];
                }
                nab - INTEGRABLE_SIGN * (aj[s][m] - ja[s][m])
            })
        })
    });
    let fr = &pkg.frame;
    let mut acc = 0.0;
    for a in 0..4 {
        let mut ea = [[0.0; 4]; 4];
        for l in 0..4 {
            for s in 0..4 {
                for m in 0..4 {
                    ea[s][m] += fr.frame[l][a] * e[l][s][m];
                }
            }
        }
        let framed = matmul4(&fr.coframe, &matmul4(&ea, &fr.frame));
        acc += framed.iter().flatten().map(|v| v * v).sum::<f64>();
    }
    acc.sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct NijenhuisCheck {
    pub nijenhuis: f64,
    /// Residual of `D_X J = ε[X∧θ, J]` with `θ` from `κ`.
    pub integrable: f64,
}

pub fn nijenhuis_norm(chart: &dyn MetricChart, p: &Point, hd: &HermitianData) -> Result<NijenhuisCheck> {
    let pkg = curvature_package(chart, p)?;
    let reference = hd.f;
    let dj = matrix_gradient(&|q: &Point| hermitian_at(chart, q, Some(&reference)).map(|(d, _)| d.j), p, &steps(chart, p))?;
    let n = nijenhuis_tensor(&hd.j, &dj);
    let theta = match hd.theta {
        Some(t) => t,
        None => lee_form_kappa(chart, p)?,
    };
    Ok(NijenhuisCheck { nijenhuis: nijenhuis_frame_norm(&pkg.frame, &n), integrable: integrable_residual(&pkg, &hd.j, &dj, &theta) })
}

/// `J′ = -g⁻¹F′` with `F′ = cos φ F + sin φ ψ`, `φ = 0.5 + 0.3 x⁰` and `ψ ⊥ F`
/// a fixed `Λ⁺` direction. `J′` is almost complex and orthogonal but rotates
/// non-holomorphically, so its Nijenhuis tensor does not vanish.
pub fn rotated_structure(pkg: &CurvaturePackage, f: &Mat4, basis_index: usize) -> Mat4 {
    let gi = &pkg.metric_inv;
    let b = pkg.lambda_plus_basis[basis_index];
    let c = 0.5 * inner2(&b, f, gi);
    let mut psi: Mat4 = std::array::from_fn(|i| std::array::from_fn(|k| b[i][k] - c * f[i][k]));
    let scale = (2.0 / inner2(&psi, &psi, gi)).sqrt();
    psi = psi.map(|r| r.map(|v| v * scale));
    let phi = 0.5 + 0.3 * pkg.point[0];
    let fp: Mat4 = std::array::from_fn(|i| std::array::from_fn(|k| phi.cos() * f[i][k] + phi.sin() * psi[i][k]));
    j_from_f(&fp, gi)
}

/// Nijenhuis norm of the rotated structure: a negative control.
pub fn rotated_nijenhuis_norm(chart: &dyn MetricChart, p: &Point, hd: &HermitianData) -> Result<f64> {
    let pkg = curvature_package(chart, p)?;
    let gi = &pkg.metric_inv;
    let index = (0..3)
        .min_by(|&a, &b| {
            inner2(&pkg.lambda_plus_basis[a], &hd.f, gi).abs().total_cmp(&inner2(&pkg.lambda_plus_basis[b], &hd.f, gi).abs())
        })
        .unwrap_or(0);
    let reference = hd.f;
    let field = |q: &Point| -> Result<Mat4> {
        let (d, pk) = hermitian_at(chart, q, Some(&reference))?;
        Ok(rotated_structure(&pk, &d.f, index))
    };
    let j0 = field(p)?;
    let dj = matrix_gradient(&field, p, &steps(chart, p))?;
    Ok(nijenhuis_frame_norm(&pkg.frame, &nijenhuis_tensor(&j0, &dj)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct KappaRelations {
    /// `κ - s - 6(δθ - |θ|²)`.
    pub kappa_scalar: f64,
    /// Largest `|λ± - [κ/24 ± ⅛√(κ² + 32|dθ⁺|²)]|`.
    pub lambda: f64,
    /// `(dθ⁺, F)`.
    pub dtheta_f: f64,
    /// `|dθ⁺|`.
    pub dtheta_plus: f64,
}

impl KappaRelations {
    pub fn max(&self) -> f64 {
        self.kappa_scalar.abs().max(self.lambda).max(self.dtheta_f.abs()).max(self.dtheta_plus)
    }
}

pub fn kappa_relations_check(chart: &dyn MetricChart, p: &Point, hd: &HermitianData) -> Result<KappaRelations> {
    let pkg = curvature_package(chart, p)?;
    let theta = match hd.theta {
        Some(t) => t,
        None => lee_form_kappa(chart, p)?,
    };
    let dth = one_form_gradient(&|q: &Point| lee_form_kappa(chart, q), p, &steps(chart, p))?;
    let gi = &pkg.metric_inv;
    let delta_theta = codifferential_one_form(&pkg, &theta, &dth);
    let norm2 = norm2_one_form(&theta, gi);
    let kappa_scalar = hd.kappa - pkg.scalar_s - 6.0 * (delta_theta - norm2);
    let d: Mat4 = std::array::from_fn(|a| std::array::from_fn(|b| dth[a][b] - dth[b][a]));
    let star = pkg.frame.hodge_star(&d);
    let dplus: Mat4 = std::array::from_fn(|a| std::array::from_fn(|b| 0.5 * (d[a][b] + star[a][b])));
    let dp2 = inner2(&dplus, &dplus, gi).max(0.0);
    let root = (hd.kappa * hd.kappa + 32.0 * dp2).sqrt() / 8.0;
    let k24 = hd.kappa / 24.0;
    let lambda = (hd.spectrum[0] - (k24 + root)).abs().max((hd.spectrum[2] - (k24 - root)).abs());
    Ok(KappaRelations { kappa_scalar, lambda, dtheta_f: inner2(&dplus, &hd.f, gi), dtheta_plus: dp2.sqrt() })
}
