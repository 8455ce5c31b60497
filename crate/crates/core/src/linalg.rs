//! Small dense linear algebra on fixed-size arrays.
//!
//! Tensors are stored as plain nested arrays so index-heavy code reads like the
//! formulas; nalgebra is used for the factorizations.

use nalgebra::{Matrix3, Matrix4, SymmetricEigen};

use crate::error::{GeometryError, Result};

pub type Vec4 = [f64; 4];
pub type Mat4 = [[f64; 4]; 4];
pub type Mat3 = [[f64; 3]; 3];
pub type Mat6 = [[f64; 6]; 6];

pub const IDENTITY4: Mat4 = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];

pub fn zeros4() -> Mat4 {
    [[0.0; 4]; 4]
}

pub fn to_na4(m: &Mat4) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| m[i][j])
}

pub fn from_na4(m: &Matrix4<f64>) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

pub fn matmul4(a: &Mat4, b: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|k| a[i][k] * b[k][j]).sum()))
}

pub fn transpose4(a: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

pub fn matvec4(a: &Mat4, v: &Vec4) -> Vec4 {
    std::array::from_fn(|i| (0..4).map(|k| a[i][k] * v[k]).sum())
}

pub fn add4(a: &Mat4, b: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] + b[i][j]))
}

pub fn sub4(a: &Mat4, b: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] - b[i][j]))
}

pub fn scale4(a: &Mat4, c: f64) -> Mat4 {
    a.map(|row| row.map(|v| v * c))
}

pub fn dot4(a: &Vec4, b: &Vec4) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Frobenius norm of a 4×4 array.
pub fn norm4(a: &Mat4) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn norm3(a: &Mat3) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn det4(a: &Mat4) -> f64 {
    to_na4(a).determinant()
}

pub fn inverse4(a: &Mat4) -> Result<Mat4> {
    to_na4(a).try_inverse().map(|m| from_na4(&m)).ok_or(GeometryError::SingularMetric)
}

/// Lower-triangular `L` with `a = L Lᵀ`; fails unless `a` is symmetric positive definite.
pub fn cholesky_lower(a: &Mat4) -> Result<Mat4> {
    if !a.iter().flatten().all(|v| v.is_finite()) {
        return Err(GeometryError::SingularMetric);
    }
    let chol = to_na4(a).cholesky().ok_or(GeometryError::SingularMetric)?;
    Ok(from_na4(&chol.l()))
}

/// Symmetric part `½(a + aᵀ)`.
pub fn sym4(a: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (a[i][j] + a[j][i])))
}

/// Eigen-decomposition of a symmetric 3×3 matrix with deterministic output.
#[derive(Clone, Debug, PartialEq)]
pub struct SymEigen3 {
    /// Eigenvalues in descending order.
    pub values: [f64; 3],
    /// `vectors[k]` is the unit eigenvector for `values[k]`; its first
    /// component that is not negligible is positive.
    pub vectors: [[f64; 3]; 3],
}

pub fn sym_eigen3(m: &Mat3) -> SymEigen3 {
    let a = Matrix3::from_fn(|i, j| 0.5 * (m[i][j] + m[j][i]));
    let eig = SymmetricEigen::new(a);
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = idx.map(|k| eig.eigenvalues[k]);
    let vectors = idx.map(|k| {
        let mut v = [eig.eigenvectors[(0, k)], eig.eigenvectors[(1, k)], eig.eigenvectors[(2, k)]];
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= n);
        if let Some(&lead) = v.iter().find(|x| x.abs() > 1e-12) {
            if lead < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        v
    });
    SymEigen3 { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_reproduces_matrix() {
        let a = [[4.0, 1.0, 0.0, 0.5], [1.0, 3.0, 0.2, 0.0], [0.0, 0.2, 2.0, 0.1], [0.5, 0.0, 0.1, 1.0]];
        let l = cholesky_lower(&a).unwrap();
        let back = matmul4(&l, &transpose4(&l));
        assert!(norm4(&sub4(&a, &back)) < 1e-14);
        assert!(cholesky_lower(&[[1.0, 2.0, 0.0, 0.0], [2.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]).is_err());
    }

    #[test]
    fn eigen_is_sorted_with_sign_rule() {
        let m = [[2.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 5.0]];
        let e = sym_eigen3(&m);
        assert_eq!(e.values, [5.0, 2.0, -1.0]);
        assert_eq!(e.vectors[0], [0.0, 0.0, 1.0]);
        let m = [[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 0.0]];
        let e = sym_eigen3(&m);
        assert!((e.values[0] - 2.0).abs() < 1e-14);
        assert!(e.vectors[0][0] > 0.0 && e.vectors[0][1] > 0.0);
    }
}
