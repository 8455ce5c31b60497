//! Einstein–Weyl and hyperhermitian checks built on the Hermitian structure:
//! the two Lee forms `θ′`, `θ″`, the Einstein–Weyl equation, the scalar
//! curvature identity, the second-order equation for `θ_J` and the identities
//! satisfied by `Φ = ½λ^{2/3}F`.
//!
//! `λ = κ/6` may be negative; cube roots are real and sign-preserving.

use std::sync::Arc;

use crate::chart::{MetricChart, Point, ScaledChart};
use crate::curvature::{curvature_package, CurvaturePackage};
use crate::error::{GeometryError, Result};
use crate::forms::{inner2, norm2_one_form};
use crate::hermitian::{
    codifferential_one_form, hermitian_at, lee_form_kappa, matrix_gradient, nabla_one_form, one_form_gradient,
    HermitianData,
};
use crate::linalg::{matmul4, matvec4, norm4, Mat4, Vec4};
use crate::stencil::steps;

#[derive(Clone, Debug, PartialEq)]
pub struct WeylLeeData {
    pub point: Point,
    /// `λ = κ/6`.
    pub lambda: f64,
    /// `θ_J = dλ/3λ`.
    pub theta_j: Vec4,
    pub j_theta_j: Vec4,
    pub theta_prime: Vec4,
    pub theta_second: Vec4,
    /// `Φ = ½ λ^{2/3} F`.
    pub phi: Mat4,
    /// Set when `λ ≤ 0`.
    pub negative_lambda: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LeeChoice {
    Prime,
    Second,
}

impl LeeChoice {
    pub fn pick(self, wd: &WeylLeeData) -> Vec4 {
        match self {
            LeeChoice::Prime => wd.theta_prime,
            LeeChoice::Second => wd.theta_second,
        }
    }

    /// Sign of `Φ` for this structure: `dθ′ = Φ` and `dθ″ = -Φ`.
    pub fn phi_sign(self) -> f64 {
        match self {
            LeeChoice::Prime => 1.0,
            LeeChoice::Second => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LeeChoice::Prime => "theta_prime",
            LeeChoice::Second => "theta_second",
        }
    }
}

/// `θ′, θ″ = (θ_J ∓ λ^{1/3} Jθ_J)/(1 + λ^{2/3})`.
pub fn hyper_lee_forms(hd: &HermitianData) -> Result<WeylLeeData> {
    let theta_j = hd.theta.ok_or(GeometryError::VanishingLeeForm("Lee form not computed"))?;
    if theta_j.iter().all(|v| *v == 0.0) {
        return Err(GeometryError::VanishingLeeForm("θ′ = θ″"));
    }
    let lambda = hd.kappa / 6.0;
    let l13 = lambda.cbrt();
    let l23 = l13 * l13;
    let jt = hd.j_form(&theta_j);
    let den = 1.0 + l23;
    Ok(WeylLeeData {
        point: hd.point,
        lambda,
        theta_j,
        j_theta_j: jt,
        theta_prime: std::array::from_fn(|k| (theta_j[k] - l13 * jt[k]) / den),
        theta_second: std::array::from_fn(|k| (theta_j[k] + l13 * jt[k]) / den),
        phi: hd.f.map(|r| r.map(|v| 0.5 * l23 * v)),
        negative_lambda: lambda <= 0.0,
    })
}

/// Hermitian structure, Lee form and Weyl–Lee data at `q`, with `F` aligned to `reference`.
pub fn weyl_lee_at(chart: &dyn MetricChart, q: &Point, reference: Option<&Mat4>) -> Result<(WeylLeeData, CurvaturePackage)> {
    let (mut hd, pkg) = hermitian_at(chart, q, reference)?;
    hd.theta = Some(lee_form_kappa(chart, q)?);
    Ok((hyper_lee_forms(&hd)?, pkg))
}

/// A 1-form field sampled pointwise.
pub type OneFormField<'a> = dyn Fn(&Point) -> Result<Vec4> + 'a;

fn frame_norm(pkg: &CurvaturePackage, t: &Mat4) -> f64 {
    norm4(&pkg.frame.tensor_to_frame(t))
}

/// Frame norm of `Dθ - θ⊗θ + ¼(δθ + |θ|²)g - ½dθ - ½Ric₀`.
pub fn einstein_weyl_residual(chart: &dyn MetricChart, p: &Point, theta: &OneFormField) -> Result<f64> {
    let pkg = curvature_package(chart, p)?;
    let t = theta(p)?;
    let dt = one_form_gradient(theta, p, &steps(chart, p))?;
    let nab = nabla_one_form(&pkg.gamma, &t, &dt);
    let div = codifferential_one_form(&pkg, &t, &dt);
    let n2 = norm2_one_form(&t, &pkg.metric_inv);
    let e: Mat4 = std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            nab[a][b] - t[a] * t[b] + 0.25 * (div + n2) * pkg.metric[a][b] - 0.5 * (dt[a][b] - dt[b][a]) - 0.5 * pkg.ric0[a][b]
        })
    });
    Ok(frame_norm(&pkg, &e))
}

/// `|s - 6(-δθ + |θ|²)|`.
pub fn scalar_flat_residual(chart: &dyn MetricChart, p: &Point, theta: &OneFormField) -> Result<f64> {
    let pkg = curvature_package(chart, p)?;
    let t = theta(p)?;
    let dt = one_form_gradient(theta, p, &steps(chart, p))?;
    let div = codifferential_one_form(&pkg, &t, &dt);
    Ok((pkg.scalar_s - 6.0 * (-div + norm2_one_form(&t, &pkg.metric_inv))).abs())
}

/// The `θ′` or `θ″` field of `chart`, with `F` aligned to `reference`.
pub fn lee_field<'a>(chart: &'a dyn MetricChart, reference: Mat4, which: LeeChoice) -> impl Fn(&Point) -> Result<Vec4> + 'a {
    move |q: &Point| weyl_lee_at(chart, q, Some(&reference)).map(|(w, _)| which.pick(&w))
}

/// Ingredients of the second-order equation for `θ_J` at one point,
/// kept separate from the metric scale so the scale can be varied cheaply.
#[derive(Clone, Debug)]
pub struct ThetaJTerms {
    pub nabla_theta: Mat4,
    pub theta_j: Vec4,
    pub j_theta_j: Vec4,
    pub lambda: f64,
    pub scalar_s: f64,
    pub metric: Mat4,
    pub metric_inv: Mat4,
}

impl ThetaJTerms {
    pub fn collect(chart: &dyn MetricChart, p: &Point) -> Result<Self> {
        let (wd, pkg) = weyl_lee_at(chart, p, None)?;
        let dt = one_form_gradient(&|q: &Point| lee_form_kappa(chart, q), p, &steps(chart, p))?;
        Ok(ThetaJTerms {
            nabla_theta: nabla_one_form(&pkg.gamma, &wd.theta_j, &dt),
            theta_j: wd.theta_j,
            j_theta_j: wd.j_theta_j,
            lambda: wd.lambda,
            scalar_s: pkg.scalar_s,
            metric: pkg.metric,
            metric_inv: pkg.metric_inv,
        })
    }

    /// The residual tensor for the metric `c·g`, as covariant components.
    pub fn residual_tensor(&self, c: f64) -> Mat4 {
        let lambda = self.lambda / c;
        let s = self.scalar_s / c;
        let l13 = lambda.cbrt();
        let l23 = l13 * l13;
        let a = (1.0 + l23) * (s + 3.0 * l13) / 12.0 * c;
        let b = (1.0 + 2.0 * l23) / (1.0 + l23);
        let d = l23 / (1.0 + l23);
        let (t, jt) = (&self.theta_j, &self.j_theta_j);
        std::array::from_fn(|i| {
            std::array::from_fn(|k| self.nabla_theta[i][k] - a * self.metric[i][k] - b * t[i] * t[k] - d * jt[i] * jt[k])
        })
    }

    /// Frame norm of the residual for the metric `c·g`.
    pub fn residual(&self, c: f64) -> f64 {
        let t = self.residual_tensor(c);
        let raised = matmul4(&self.metric_inv, &matmul4(&t, &self.metric_inv));
        let n2: f64 = t.iter().flatten().zip(raised.iter().flatten()).map(|(a, b)| a * b).sum();
        n2.max(0.0).sqrt() / c
    }
}

/// Constant `c` for which `c·g` satisfies the `θ_J` equation best at `anchor`,
/// with the relative residual there. Searches `log c` on a grid, then refines by
/// golden sections.
pub fn rescale_factor(chart: &dyn MetricChart, anchor: &Point) -> Result<(f64, f64)> {
    let terms = ThetaJTerms::collect(chart, anchor)?;
    let f = |u: f64| terms.residual(u.exp()) * u.exp();
    let (lo, hi, n) = (-20.0f64, 20.0f64, 800);
    let grid: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let best = (0..grid.len()).min_by(|&i, &j| f(grid[i]).total_cmp(&f(grid[j]))).unwrap_or(0);
    let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(n)]);
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    for _ in 0..200 {
        let x1 = b - phi * (b - a);
        let x2 = a + phi * (b - a);
        if f(x1) < f(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let u = 0.5 * (a + b);
    let scale = norm4(&terms.nabla_theta).max(1e-300);
    Ok((u.exp(), terms.residual(u.exp()) * u.exp() / scale))
}

/// Rescales `chart` by the factor found at `anchor`.
pub fn rescaled(chart: Arc<dyn MetricChart>, anchor: &Point) -> Result<(ScaledChart, f64)> {
    let (c, _) = rescale_factor(chart.as_ref(), anchor)?;
    Ok((ScaledChart::new(chart, c)?, c))
}

/// Frame norm of the `θ_J` equation residual at `p` (no rescaling).
pub fn theta_j_residual(chart: &dyn MetricChart, p: &Point) -> Result<f64> {
    Ok(ThetaJTerms::collect(chart, p)?.residual(1.0))
}

/// `Φ(θ)_b = θ^a Φ_ab`.
pub fn contract_first(phi: &Mat4, theta_up: &Vec4) -> Vec4 {
    std::array::from_fn(|b| (0..4).map(|a| theta_up[a] * phi[a][b]).sum())
}

/// 2-form as an endomorphism, identified the same way as `F ↦ J`: `A = -g⁻¹ω`.
pub fn endomorphism(w: &Mat4, ginv: &Mat4) -> Mat4 {
    matmul4(ginv, w).map(|r| r.map(|v| -v))
}

/// Inverse of [`endomorphism`]: `ω = -gA`.
pub fn two_form_of(a: &Mat4, g: &Mat4) -> Mat4 {
    matmul4(g, a).map(|r| r.map(|v| -v))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhiIdentities {
    pub lee_gradient: f64,
    pub phi_norm: f64,
    pub nabla_phi_norm: f64,
    pub wplus_phi: f64,
    /// `|(dθ)⁻|` for the chosen Lee form.
    pub dtheta_minus: f64,
    /// `|dθ - Φ|`.
    pub closure: f64,
}

impl PhiIdentities {
    pub fn max(&self) -> f64 {
        [self.lee_gradient, self.phi_norm, self.nabla_phi_norm, self.wplus_phi, self.dtheta_minus, self.closure].into_iter().fold(0.0, f64::max)
    }
}

/// Individual terms of the identities for one of the two structures.
#[derive(Clone, Debug)]
pub struct PhiTerms {
    pub pkg: CurvaturePackage,
    pub wd: WeylLeeData,
    pub theta: Vec4,
    /// `Φ` of the chosen structure, `±½λ^{2/3}F`.
    pub phi: Mat4,
    /// `∂_l θ_b`.
    pub dtheta: Mat4,
    /// `∂_l Φ_ab`.
    pub dphi: [Mat4; 4],
    /// `∇_l Φ_ab`.
    pub nabla_phi: [Mat4; 4],
    /// `∂_l |θ|²`.
    pub dnorm: Vec4,
}

impl PhiTerms {
    pub fn collect(chart: &dyn MetricChart, p: &Point, which: LeeChoice) -> Result<Self> {
        let (wd, pkg) = weyl_lee_at(chart, p, None)?;
        let reference = wd.phi;
        let sign = which.phi_sign();
        let h = steps(chart, p);
        let field = lee_field(chart, reference, which);
        let theta = which.pick(&wd);
        let dtheta = one_form_gradient(&field, p, &h)?;
        let dphi = matrix_gradient(
            &|q: &Point| weyl_lee_at(chart, q, Some(&reference)).map(|(w, _)| w.phi.map(|r| r.map(|v| sign * v))),
            p,
            &h,
        )?;
        let norm_field = |q: &Point| -> Result<Vec4> {
            let (w, pk) = weyl_lee_at(chart, q, Some(&reference))?;
            Ok([norm2_one_form(&which.pick(&w), &pk.metric_inv), 0.0, 0.0, 0.0])
        };
        let dn = one_form_gradient(&norm_field, p, &h)?;
        let dnorm = std::array::from_fn(|l| dn[l][0]);
        let phi = wd.phi.map(|r| r.map(|v| sign * v));
        let nabla_phi = std::array::from_fn(|l| {
            std::array::from_fn(|a| {
                std::array::from_fn(|b| {
                    dphi[l][a][b]
                        - (0..4).map(|s| pkg.gamma[s][l][a] * phi[s][b] + pkg.gamma[s][l][b] * phi[a][s]).sum::<f64>()
                })
            })
        });
        Ok(PhiTerms { pkg, wd, theta, phi, dtheta, dphi, nabla_phi, dnorm })
    }

    /// `d|θ|² - (s/12 + |θ|²)θ` and `Φ(θ)`; the identity is their sum.
    pub fn lee_gradient_terms(&self) -> (Vec4, Vec4) {
        let gi = &self.pkg.metric_inv;
        let n2 = norm2_one_form(&self.theta, gi);
        let c = self.pkg.scalar_s / 12.0 + n2;
        let lhs = std::array::from_fn(|k| self.dnorm[k] - c * self.theta[k]);
        (lhs, contract_first(&self.phi, &matvec4(gi, &self.theta)))
    }

    /// `D_X Φ` for a vector `X`.
    pub fn nabla_phi_along(&self, x: &Vec4) -> Mat4 {
        std::array::from_fn(|a| std::array::from_fn(|b| (0..4).map(|l| x[l] * self.nabla_phi[l][a][b]).sum()))
    }

    /// `Σ_a |D_{e_a} Φ|²`.
    pub fn nabla_phi_norm2(&self) -> f64 {
        let fr = &self.pkg.frame.frame;
        (0..4)
            .map(|a| {
                let x = std::array::from_fn(|l| fr[l][a]);
                let d = self.nabla_phi_along(&x);
                inner2(&d, &d, &self.pkg.metric_inv)
            })
            .sum()
    }

    /// For each `Λ⁺` basis form `ψ`: `W⁺(ψ)`, `½[ψ, Φ]` and `|θ|⁻² D_{ψ(θ)}Φ`,
    /// with 2-forms acting as endomorphisms via [`endomorphism`].
    pub fn wplus_phi_terms(&self) -> [(Mat4, Mat4, Mat4); 3] {
        let pkg = &self.pkg;
        let gi = &pkg.metric_inv;
        let theta_up = matvec4(gi, &self.theta);
        let n2 = norm2_one_form(&self.theta, gi);
        let phi_e = endomorphism(&self.phi, gi);
        pkg.lambda_plus_basis.map(|psi| {
            let w = pkg.apply_wplus(&psi);
            let psi_e = endomorphism(&psi, gi);
            let comm = crate::linalg::sub4(&matmul4(&psi_e, &phi_e), &matmul4(&phi_e, &psi_e));
            let comm_low = two_form_of(&comm, &pkg.metric).map(|r| r.map(|v| 0.5 * v));
            let x = matvec4(&psi_e, &theta_up);
            let d = self.nabla_phi_along(&x).map(|r| r.map(|v| v / n2));
            (w, comm_low, d)
        })
    }

    pub fn identities(&self) -> PhiIdentities {
        let pkg = &self.pkg;
        let gi = &pkg.metric_inv;
        let s = pkg.scalar_s;
        let lambda = self.wd.lambda;
        let n2 = norm2_one_form(&self.theta, gi);
        let (lhs, ph) = self.lee_gradient_terms();
        let g2: Vec4 = std::array::from_fn(|k| lhs[k] + ph[k]);
        let lee_gradient = norm2_one_form(&g2, gi).max(0.0).sqrt();
        let phi2 = inner2(&self.phi, &self.phi, gi);
        let phi_norm = (phi2 + lambda * (s / 12.0 + n2)).abs();
        let nabla_phi_norm = (self.nabla_phi_norm2() + (phi2 / lambda + s / 12.0) * (6.0 * phi2 + 3.0 * lambda * lambda)).abs();
        let wplus_phi = self
            .wplus_phi_terms()
            .iter()
            .map(|(w, c, d)| {
                let r: Mat4 = std::array::from_fn(|a| std::array::from_fn(|b| w[a][b] - c[a][b] - d[a][b]));
                inner2(&r, &r, gi).max(0.0).sqrt()
            })
            .fold(0.0, f64::max);
        let dt: Mat4 = std::array::from_fn(|a| std::array::from_fn(|b| self.dtheta[a][b] - self.dtheta[b][a]));
        let star = pkg.frame.hodge_star(&dt);
        let minus: Mat4 = std::array::from_fn(|a| std::array::from_fn(|b| 0.5 * (dt[a][b] - star[a][b])));
        let dtheta_minus = inner2(&minus, &minus, gi).max(0.0).sqrt();
        let diff: Mat4 = std::array::from_fn(|a| std::array::from_fn(|b| dt[a][b] - self.phi[a][b]));
        let closure = inner2(&diff, &diff, gi).max(0.0).sqrt();
        PhiIdentities { lee_gradient, phi_norm, nabla_phi_norm, wplus_phi, dtheta_minus, closure }
    }
}

pub fn phi_identity_residuals(chart: &dyn MetricChart, p: &Point, which: LeeChoice) -> Result<PhiIdentities> {
    Ok(PhiTerms::collect(chart, p, which)?.identities())
}

