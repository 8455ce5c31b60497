//! Second-order forward-mode automatic differentiation over four coordinates.
//!
//! A [`Jet2`] carries a value, its gradient and its (symmetric) Hessian with
//! respect to the four chart coordinates. Arithmetic propagates all three
//! through the exact first- and second-order chain rules, so a metric written
//! in terms of jets yields exact `∂g` and `∂∂g` at a point.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::{GeometryError, Result};

/// Number of coordinates.
pub const DIM: usize = 4;

const TRI: usize = DIM * (DIM + 1) / 2;

/// Position of `(i, j)` in the packed upper triangle.
#[inline(always)]
const fn tri(i: usize, j: usize) -> usize {
    const TABLE: [[usize; DIM]; DIM] = [[0, 1, 2, 3], [1, 4, 5, 6], [2, 5, 7, 8], [3, 6, 8, 9]];
    TABLE[i][j]
}

/// Value, gradient and Hessian of a scalar field at a point.
///
/// The Hessian is stored as a packed upper triangle and mirrored on read, so
/// `hess(i, j) == hess(j, i)` holds by construction.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet2 {
    value: f64,
    grad: [f64; DIM],
    hess: [f64; TRI],
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet2")
            .field("value", &self.value)
            .field("grad", &self.grad)
            .field("hess", &self.hessian())
            .finish()
    }
}

impl Default for Jet2 {
    fn default() -> Self {
        Self::constant(0.0)
    }
}

impl From<f64> for Jet2 {
    fn from(value: f64) -> Self {
        Self::constant(value)
    }
}

/// Four coordinate jets seeded at `point`: jet `i` has value `point[i]`,
/// gradient `e_i` and zero Hessian.
pub fn seed_coordinates(point: [f64; DIM]) -> [Jet2; DIM] {
    std::array::from_fn(|i| Jet2::variable(point[i], i))
}

impl Jet2 {
    pub const fn constant(value: f64) -> Self {
        Self { value, grad: [0.0; DIM], hess: [0.0; TRI] }
    }

    /// The coordinate function `x_index` evaluated at `value`.
    pub fn variable(value: f64, index: usize) -> Self {
        let mut grad = [0.0; DIM];
        grad[index] = 1.0;
        Self { value, grad, hess: [0.0; TRI] }
    }

    /// Builds a jet from explicit derivative data. The Hessian is symmetrised.
    pub fn from_parts(value: f64, grad: [f64; DIM], hess: [[f64; DIM]; DIM]) -> Self {
        let mut packed = [0.0; TRI];
        for i in 0..DIM {
            for j in i..DIM {
                packed[tri(i, j)] = 0.5 * (hess[i][j] + hess[j][i]);
            }
        }
        Self { value, grad, hess: packed }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }

    #[inline]
    pub fn grad(&self) -> [f64; DIM] {
        self.grad
    }

    /// First partial `∂_i`.
    #[inline]
    pub fn d(&self, i: usize) -> f64 {
        self.grad[i]
    }

    /// Second partial `∂_i ∂_j`.
    #[inline]
    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[tri(i, j)]
    }

    pub fn hessian(&self) -> [[f64; DIM]; DIM] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.hess(i, j)))
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad.iter().all(|v| v.is_finite()) && self.hess.iter().all(|v| v.is_finite())
    }

    /// Composition `f ∘ self` given `f(u)`, `f'(u)` and `f''(u)` at `u = self.value`.
    #[inline]
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut out = Self::constant(f0);
        for i in 0..DIM {
            out.grad[i] = f1 * self.grad[i];
        }
        for i in 0..DIM {
            for j in i..DIM {
                let k = tri(i, j);
                out.hess[k] = f1 * self.hess[k] + f2 * self.grad[i] * self.grad[j];
            }
        }
        out
    }

    pub fn square(self) -> Self {
        self * self
    }

    pub fn recip(self) -> Self {
        let v = self.value;
        let r = 1.0 / v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    /// Natural logarithm; NaN-propagating outside the domain, see [`Jet2::try_ln`].
    pub fn ln(self) -> Self {
        let v = self.value;
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    pub fn sqrt(self) -> Self {
        let r = self.value.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.value))
    }

    /// Real (sign-preserving) cube root.
    pub fn cbrt(self) -> Self {
        let c = self.value.cbrt();
        let d1 = 1.0 / (3.0 * c * c);
        let d2 = -2.0 / (9.0 * c * c * c * c * c);
        self.chain(c, d1, d2)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn cosh(self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(c, s, c)
    }

    pub fn sinh(self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(s, c, s)
    }

    pub fn atan(self) -> Self {
        let v = self.value;
        let d = 1.0 / (1.0 + v * v);
        self.chain(v.atan(), d, -2.0 * v * d * d)
    }

    pub fn powi(self, n: i32) -> Self {
        let v = self.value;
        match n {
            0 => Self::constant(1.0),
            1 => self,
            _ => {
                let nf = n as f64;
                self.chain(v.powi(n), nf * v.powi(n - 1), nf * (nf - 1.0) * v.powi(n - 2))
            }
        }
    }

    pub fn powf(self, p: f64) -> Self {
        let v = self.value;
        self.chain(v.powf(p), p * v.powf(p - 1.0), p * (p - 1.0) * v.powf(p - 2.0))
    }

    /// Four-quadrant arctangent of `self / x`.
    pub fn atan2(self, x: Self) -> Self {
        let y = self;
        let value = y.value.atan2(x.value);
        // Derivatives agree with atan(y/x) or -atan(x/y) up to a constant.
        let branch = if x.value.abs() >= y.value.abs() { (y / x).atan() } else { -(x / y).atan() };
        Self { value, ..branch }
    }

    pub fn try_ln(self) -> Result<Self> {
        if self.value > 0.0 {
            Ok(self.ln())
        } else {
            Err(GeometryError::JetDomain { op: "ln", value: self.value })
        }
    }

    pub fn try_sqrt(self) -> Result<Self> {
        if self.value > 0.0 {
            Ok(self.sqrt())
        } else {
            Err(GeometryError::JetDomain { op: "sqrt", value: self.value })
        }
    }

    pub fn try_recip(self) -> Result<Self> {
        if self.value != 0.0 && self.value.is_finite() {
            Ok(self.recip())
        } else {
            Err(GeometryError::JetDomain { op: "div", value: self.value })
        }
    }

    pub fn try_div(self, rhs: Self) -> Result<Self> {
        Ok(self * rhs.try_recip()?)
    }

    pub fn try_powf(self, p: f64) -> Result<Self> {
        if self.value > 0.0 {
            Ok(self.powf(p))
        } else {
            Err(GeometryError::JetDomain { op: "pow", value: self.value })
        }
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    #[inline]
    fn add(mut self, rhs: Jet2) -> Jet2 {
        self += rhs;
        self
    }
}

impl AddAssign for Jet2 {
    #[inline]
    fn add_assign(&mut self, rhs: Jet2) {
        self.value += rhs.value;
        for i in 0..DIM {
            self.grad[i] += rhs.grad[i];
        }
        for k in 0..TRI {
            self.hess[k] += rhs.hess[k];
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    #[inline]
    fn sub(mut self, rhs: Jet2) -> Jet2 {
        self -= rhs;
        self
    }
}

impl SubAssign for Jet2 {
    #[inline]
    fn sub_assign(&mut self, rhs: Jet2) {
        self.value -= rhs.value;
        for i in 0..DIM {
            self.grad[i] -= rhs.grad[i];
        }
        for k in 0..TRI {
            self.hess[k] -= rhs.hess[k];
        }
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    #[inline]
    fn neg(self) -> Jet2 {
        self * -1.0
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    #[inline]
    fn mul(self, rhs: Jet2) -> Jet2 {
        let (u, v) = (self, rhs);
        let mut out = Jet2::constant(u.value * v.value);
        for i in 0..DIM {
            out.grad[i] = u.value * v.grad[i] + v.value * u.grad[i];
        }
        for i in 0..DIM {
            for j in i..DIM {
                let k = tri(i, j);
                out.hess[k] = u.value * v.hess[k]
                    + v.value * u.hess[k]
                    + u.grad[i] * v.grad[j]
                    + u.grad[j] * v.grad[i];
            }
        }
        out
    }
}

impl MulAssign for Jet2 {
    fn mul_assign(&mut self, rhs: Jet2) {
        *self = *self * rhs;
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn add(mut self, rhs: f64) -> Jet2 {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn mul(mut self, rhs: f64) -> Jet2 {
        self.value *= rhs;
        for g in &mut self.grad {
            *g *= rhs;
        }
        for h in &mut self.hess {
            *h *= rhs;
        }
        self
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn div(self, rhs: f64) -> Jet2 {
        self * (1.0 / rhs)
    }
}

impl Add<Jet2> for f64 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        rhs + self
    }
}

impl Sub<Jet2> for f64 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        -rhs + self
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs * self
    }
}

impl Div<Jet2> for f64 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet2) -> Jet2 {
        rhs.recip() * self
    }
}

impl std::iter::Sum for Jet2 {
    fn sum<I: Iterator<Item = Jet2>>(iter: I) -> Jet2 {
        iter.fold(Jet2::constant(0.0), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn seeded_coordinates_are_unit_jets() {
        let jets = seed_coordinates([1.0, 2.0, 3.0, 4.0]);
        assert_eq!(jets[2].value(), 3.0);
        assert_eq!(jets[2].grad(), [0.0, 0.0, 1.0, 0.0]);
        let sum: Jet2 = jets.iter().copied().sum();
        assert_eq!(sum.grad(), [1.0; 4]);
        assert_eq!(sum.hessian(), [[0.0; 4]; 4]);
        let origin = seed_coordinates([0.0; 4]);
        for (i, j) in origin.iter().enumerate() {
            assert_eq!(j.value(), 0.0);
            assert_eq!(j.d(i), 1.0);
        }
    }

    #[test]
    fn square_of_seeded_coordinate() {
        let u = Jet2::variable(3.0, 1);
        let sq = u.square();
        assert_eq!(sq.value(), 9.0);
        assert_eq!(sq.grad(), [0.0, 6.0, 0.0, 0.0]);
        let mut expected = [[0.0; 4]; 4];
        expected[1][1] = 2.0;
        assert_eq!(sq.hessian(), expected);
    }

    #[test]
    fn log_of_seeded_coordinate() {
        let u = Jet2::variable(1.0, 0);
        let l = u.ln();
        assert_eq!(l.value(), 0.0);
        assert_eq!(l.grad(), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(l.hess(0, 0), -1.0);
    }

    #[test]
    fn checked_ops_report_domain() {
        assert!(Jet2::constant(-1.0).try_ln().is_err());
        assert!(Jet2::constant(0.0).try_sqrt().is_err());
        assert!(Jet2::constant(0.0).try_recip().is_err());
        assert!(Jet2::constant(1.0).try_div(Jet2::constant(0.0)).is_err());
        assert!(Jet2::constant(2.0).try_ln().is_ok());
    }

    #[test]
    fn atan2_matches_branch_derivatives_in_all_quadrants() {
        for &(x0, y0) in &[(1.0, 0.3), (0.2, 1.5), (-0.7, 0.4), (-0.1, -2.0), (0.5, -0.5)] {
            let x = Jet2::variable(x0, 0);
            let y = Jet2::variable(y0, 1);
            let a = y.atan2(x);
            let r2: f64 = x0 * x0 + y0 * y0;
            assert_abs_diff_eq!(a.value(), f64::atan2(y0, x0), epsilon = 1e-15);
            assert_abs_diff_eq!(a.d(0), -y0 / r2, epsilon = 1e-14);
            assert_abs_diff_eq!(a.d(1), x0 / r2, epsilon = 1e-14);
            // ∂x∂x atan2 = 2xy/r⁴, ∂y∂y = -2xy/r⁴, ∂x∂y = (y²-x²)/r⁴
            let r4 = r2 * r2;
            assert_abs_diff_eq!(a.hess(0, 0), 2.0 * x0 * y0 / r4, epsilon = 1e-13);
            assert_abs_diff_eq!(a.hess(1, 1), -2.0 * x0 * y0 / r4, epsilon = 1e-13);
            assert_abs_diff_eq!(a.hess(0, 1), (y0 * y0 - x0 * x0) / r4, epsilon = 1e-13);
        }
    }

    #[test]
    fn cbrt_is_sign_preserving() {
        let u = Jet2::variable(-8.0, 0);
        let c = u.cbrt();
        assert_abs_diff_eq!(c.value(), -2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.d(0), 1.0 / 12.0, epsilon = 1e-15);
        // d²/du² u^{1/3} = -2/9 u^{-5/3} = -2/9 / (-32) at u = -8
        assert_abs_diff_eq!(c.hess(0, 0), 2.0 / 288.0, epsilon = 1e-15);
    }
}
