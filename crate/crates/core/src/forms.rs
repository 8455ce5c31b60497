//! Differential forms on the 4-dimensional chart: orthonormal frames, the
//! Hodge star on 2-forms, the `Λ±` bases and exterior derivatives of
//! jet-valued forms.
//!
//! 2-forms are antisymmetric 4×4 arrays `ω_ab`, so `e⁰∧e¹` has `ω_01 = 1`,
//! `ω_10 = -1`. The inner product on 2-forms is `(ψ, φ) = ½ Σ ψ_ab φ^ab`,
//! which equals `-½ tr(ψ∘φ)` and gives `|e⁰∧e¹|² = 1`.

use crate::chart::{OneFormJets, Sign, TwoFormJets};
use crate::error::Result;
use crate::linalg::{cholesky_lower, inverse4, matmul4, transpose4, Mat4, Vec4};

/// 3-form components `ω_abc`, totally antisymmetric.
pub type ThreeForm = [[[f64; 4]; 4]; 4];

/// An oriented orthonormal coframe together with its dual frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    /// `coframe[a][μ]`: component `μ` of the 1-form `eᵃ`.
    pub coframe: Mat4,
    /// `frame[μ][a]`: component `μ` of the vector `e_a`.
    pub frame: Mat4,
}

/// Cholesky-based oriented orthonormal coframe for the metric value `g`.
///
/// With `g = L Lᵀ` the coframe is `Lᵀ`, so its determinant is positive; for a
/// negative orientation the last covector is negated.
pub fn orthonormal_frame(g: &Mat4, orientation: Sign) -> Result<Frame> {
    let l = cholesky_lower(g)?;
    let mut coframe = transpose4(&l);
    if orientation == Sign::Negative {
        coframe[3].iter_mut().for_each(|v| *v = -*v);
    }
    let frame = inverse4(&coframe)?;
    Ok(Frame { coframe, frame })
}

impl Frame {
    /// Frame components `ω(e_a, e_b)` of a covariant 2-tensor.
    pub fn tensor_to_frame(&self, w: &Mat4) -> Mat4 {
        matmul4(&transpose4(&self.frame), &matmul4(w, &self.frame))
    }

    /// Coordinate components of a covariant 2-tensor given in the frame.
    pub fn tensor_from_frame(&self, w: &Mat4) -> Mat4 {
        matmul4(&transpose4(&self.coframe), &matmul4(w, &self.coframe))
    }

    pub fn one_form_to_frame(&self, a: &Vec4) -> Vec4 {
        std::array::from_fn(|k| (0..4).map(|m| self.frame[m][k] * a[m]).sum())
    }

    pub fn one_form_from_frame(&self, a: &Vec4) -> Vec4 {
        std::array::from_fn(|m| (0..4).map(|k| self.coframe[k][m] * a[k]).sum())
    }

    pub fn vector_to_frame(&self, v: &Vec4) -> Vec4 {
        std::array::from_fn(|k| (0..4).map(|m| self.coframe[k][m] * v[m]).sum())
    }

    pub fn vector_from_frame(&self, v: &Vec4) -> Vec4 {
        std::array::from_fn(|m| (0..4).map(|k| self.frame[m][k] * v[k]).sum())
    }

    /// Coordinate-component Hodge star of a 2-form.
    pub fn hodge_star(&self, w: &Mat4) -> Mat4 {
        self.tensor_from_frame(&star_frame(&self.tensor_to_frame(w)))
    }

    /// `Λ⁺` and `Λ⁻` bases in coordinate components.
    pub fn lambda_bases(&self) -> ([Mat4; 3], [Mat4; 3]) {
        let (p, m) = lambda_bases_frame();
        (p.map(|b| self.tensor_from_frame(&b)), m.map(|b| self.tensor_from_frame(&b)))
    }
}

/// `eᵃ∧eᵇ` in frame components.
pub fn basis_wedge(a: usize, b: usize) -> Mat4 {
    let mut w = [[0.0; 4]; 4];
    w[a][b] = 1.0;
    w[b][a] = -1.0;
    w
}

fn combo(a: &Mat4, sign: f64, b: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] + sign * b[i][j]))
}

/// `Λ±` bases in frame components:
/// `e⁰¹ ± e²³`, `e⁰² ∓ e¹³`, `e⁰³ ± e¹²`, each of norm² 2.
pub fn lambda_bases_frame() -> ([Mat4; 3], [Mat4; 3]) {
    let w = basis_wedge;
    let plus = [combo(&w(0, 1), 1.0, &w(2, 3)), combo(&w(0, 2), -1.0, &w(1, 3)), combo(&w(0, 3), 1.0, &w(1, 2))];
    let minus = [combo(&w(0, 1), -1.0, &w(2, 3)), combo(&w(0, 2), 1.0, &w(1, 3)), combo(&w(0, 3), -1.0, &w(1, 2))];
    (plus, minus)
}

/// Levi-Civita symbol `ε_abcd` with `ε_0123 = 1`.
pub fn levi_civita(a: usize, b: usize, c: usize, d: usize) -> f64 {
    let p = [a, b, c, d];
    if (0..4).any(|i| (i + 1..4).any(|j| p[i] == p[j])) {
        return 0.0;
    }
    let mut inversions = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Hodge star on frame components: `(*ω)_ab = ½ ε_abcd ω_cd`.
pub fn star_frame(w: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut acc = 0.0;
            for c in 0..4 {
                for d in 0..4 {
                    acc += levi_civita(a, b, c, d) * w[c][d];
                }
            }
            out[a][b] = 0.5 * acc;
        }
    }
    out
}

/// `(ψ, φ) = ½ Σ ψ_ab φ_ab` on frame components.
pub fn inner2_frame(psi: &Mat4, phi: &Mat4) -> f64 {
    0.5 * psi.iter().flatten().zip(phi.iter().flatten()).map(|(a, b)| a * b).sum::<f64>()
}

/// `(ψ, φ) = ½ ψ_ab φ_cd g^ac g^bd` on coordinate components.
pub fn inner2(psi: &Mat4, phi: &Mat4, ginv: &Mat4) -> f64 {
    let raised = matmul4(ginv, &matmul4(phi, ginv));
    0.5 * psi.iter().flatten().zip(raised.iter().flatten()).map(|(a, b)| a * b).sum::<f64>()
}

/// `|α|² = g^ab α_a α_b`.
pub fn norm2_one_form(a: &Vec4, ginv: &Mat4) -> f64 {
    (0..4).map(|i| (0..4).map(|j| ginv[i][j] * a[i] * a[j]).sum::<f64>()).sum()
}

/// Values of `a ∧ b`.
pub fn wedge_values(a: &Vec4, b: &Vec4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i] * b[j] - a[j] * b[i]))
}

/// Values of a jet 1-form.
pub fn one_form_value(a: &OneFormJets) -> Vec4 {
    a.map(|c| c.value())
}

/// Values of a jet 2-form.
pub fn two_form_value(w: &TwoFormJets) -> Mat4 {
    w.map(|row| row.map(|c| c.value()))
}

/// Exterior derivative of a jet 1-form: `(dα)_ab = ∂_a α_b - ∂_b α_a`.
pub fn d_one_form(a: &OneFormJets) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j].d(i) - a[i].d(j)))
}

/// Exterior derivative of a jet 2-form: `(dω)_abc = ∂_a ω_bc + ∂_b ω_ca + ∂_c ω_ab`.
pub fn d_two_form(w: &TwoFormJets) -> ThreeForm {
    std::array::from_fn(|a| {
        std::array::from_fn(|b| std::array::from_fn(|c| w[b][c].d(a) + w[c][a].d(b) + w[a][b].d(c)))
    })
}

/// Values of `α ∧ ω` for a 1-form and a 2-form.
pub fn wedge_one_two(a: &Vec4, w: &Mat4) -> ThreeForm {
    std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| a[i] * w[j][k] + a[j] * w[k][i] + a[k] * w[i][j])))
}

pub fn norm_three_form(w: &ThreeForm) -> f64 {
    w.iter().flatten().flatten().map(|v| v * v).sum::<f64>().sqrt()
}
