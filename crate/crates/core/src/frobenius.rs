//! The generic-case first-order system for `(p, q²)` in the coordinates
//! `x = κ^{1/3}`, `y = |θ|²`, its closed-form solution, path integration and
//! the structure equations of the resulting coframe.

use nalgebra::Vector2;
use ode_solvers::dop_shared::OutputType;
use ode_solvers::{Dopri5, System};

use crate::catalog::canonic::CanonicChart;
use crate::chart::{MetricChart, OneFormJets, Point};
use crate::error::{GeometryError, Result};
use crate::forms::{d_one_form, inner2, one_form_value, wedge_values};
use crate::jet::{seed_coordinates, Jet2};
use crate::linalg::{inverse4, Mat4};

/// Integration constants of the closed-form solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolutionConstants {
    pub s: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrobeniusState {
    pub x: f64,
    pub y: f64,
    pub p: f64,
    pub q2: f64,
}

/// `f(x) = a x² + b x⁴ - (x⁶ - s²)/576` and `f'(x)`.
pub fn f_and_derivative<T>(c: &SolutionConstants, x: T) -> (T, T)
where
    T: Copy + std::ops::Mul<T, Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Add<T, Output = T> + std::ops::Sub<f64, Output = T> + std::ops::Sub<T, Output = T>,
{
    let x2 = x * x;
    let x3 = x2 * x;
    let x4 = x2 * x2;
    let x5 = x4 * x;
    let x6 = x3 * x3;
    let f = x2 * c.a + x4 * c.b - (x6 - c.s * c.s) * (1.0 / 576.0);
    let fp = x * (2.0 * c.a) + x3 * (4.0 * c.b) - x5 * (6.0 / 576.0);
    (f, fp)
}

/// Closed-form `(p, q²)` as jets of `x`, `y`.
pub fn closed_form_jets(c: &SolutionConstants, x: Jet2, y: Jet2) -> (Jet2, Jet2) {
    let (f, fp) = f_and_derivative(c, x);
    let e = (x.powi(3) - c.s) / 24.0;
    let y2 = y * y;
    let p = f / y2 - e / y + 0.25;
    let q2 = (x * fp * 0.5 - f + e * e) / y2 - x.powi(3) / (y * 24.0) - p * p;
    (p, q2)
}

/// Closed-form `(p, q²)` at `(x, y)`.
pub fn closed_form_pq(c: &SolutionConstants, x: f64, y: f64) -> (f64, f64) {
    let (p, q2) = closed_form_jets(c, Jet2::constant(x), Jet2::constant(y));
    (p.value(), q2.value())
}

/// `(∂p/∂x, ∂p/∂y, ∂q²/∂x, ∂q²/∂y)` of the first-order system.
pub fn frobenius_rhs(state: &FrobeniusState, c: &SolutionConstants) -> [f64; 4] {
    let FrobeniusState { x, y, p, q2 } = *state;
    let e = (x.powi(3) - c.s) / (24.0 * y);
    let k = x.powi(3) / (24.0 * y);
    let dpdx = (2.0 * q2 + 2.0 * (p + e) * (p - e + 1.0) - 0.5 - k) / x;
    let dpdy = -(2.0 * p + e - 0.5) / y;
    let dq2dy = -(2.0 * q2 - 2.0 * p * (p + e - 0.5) + k) / y;
    let dq2dx = -2.0 / x * ((p - e + 0.5) * (2.0 * p * (p + e - 0.5) - k) - 2.0 * q2 * (1.0 - p));
    [dpdx, dpdy, dq2dx, dq2dy]
}

/// Result of integrating along a polyline.
#[derive(Clone, Debug, PartialEq)]
pub struct PathOutcome {
    pub end: FrobeniusState,
    /// True if `q²` changed sign somewhere along the path.
    pub q2_crossed_zero: bool,
    pub accepted_steps: usize,
}

/// Per-step tolerance of the adaptive integrator.
pub const PATH_TOLERANCE: f64 = 1e-11;

struct Segment {
    start: (f64, f64),
    delta: (f64, f64),
    constants: SolutionConstants,
}

impl System<f64, Vector2<f64>> for Segment {
    fn system(&self, sigma: f64, v: &Vector2<f64>, dv: &mut Vector2<f64>) {
        let state = FrobeniusState {
            x: self.start.0 + sigma * self.delta.0,
            y: self.start.1 + sigma * self.delta.1,
            p: v[0],
            q2: v[1],
        };
        let [px, py, qx, qy] = frobenius_rhs(&state, &self.constants);
        dv[0] = px * self.delta.0 + py * self.delta.1;
        dv[1] = qx * self.delta.0 + qy * self.delta.1;
    }
}

/// Integrates `(p, q²)` from `start` along the polyline `path` (the first
/// vertex is `(start.x, start.y)` implicitly) with adaptive Dormand–Prince
/// steps on each segment.
pub fn integrate_frobenius(start: &FrobeniusState, c: &SolutionConstants, path: &[(f64, f64)]) -> Result<PathOutcome> {
    let mut state = *start;
    let mut crossed = false;
    let mut accepted = 0;
    for &(x1, y1) in path {
        if !(x1 != 0.0 && y1 > 0.0) || (state.x.signum() != x1.signum()) {
            return Err(GeometryError::domain("frobenius", "path must stay in x ≠ 0, y > 0"));
        }
        if !(state.y > 0.0 && state.x != 0.0) {
            return Err(GeometryError::domain("frobenius", "start must satisfy x ≠ 0, y > 0"));
        }
        let delta = (x1 - state.x, y1 - state.y);
        if delta.0 == 0.0 && delta.1 == 0.0 {
            continue;
        }
        let seg = Segment { start: (state.x, state.y), delta, constants: *c };
        // Sparse output: one record per accepted step (dense output with a zero
        // increment never terminates).
        let mut solver = Dopri5::from_param(
            seg,
            0.0,
            1.0,
            0.0,
            Vector2::new(state.p, state.q2),
            PATH_TOLERANCE,
            PATH_TOLERANCE,
            0.9,
            0.04,
            0.2,
            10.0,
            1.0,
            0.0,
            100_000,
            1000,
            OutputType::Sparse,
        );
        let stats = solver
            .integrate()
            .map_err(|e| GeometryError::Unsupported(format!("path integration failed: {e:?}")))?;
        accepted += stats.accepted_steps as usize;
        let ys = solver.y_out();
        let q0 = state.q2;
        crossed |= ys.iter().any(|v| v[1].signum() != q0.signum());
        let last = ys.last().copied().unwrap_or_else(|| Vector2::new(state.p, state.q2));
        state = FrobeniusState { x: x1, y: y1, p: last[0], q2: last[1] };
    }
    Ok(PathOutcome { end: state, q2_crossed_zero: crossed, accepted_steps: accepted })
}

/// Residual of `x² f'' - 5x f' + 8f + (x⁶ - s²)/72` for the closed-form `f`.
pub fn ode_f_residual(c: &SolutionConstants, x: f64) -> f64 {
    let (f, _) = f_and_derivative(c, Jet2::variable(x, 0));
    ode_residual_of(&f, x, c.s)
}

/// The same residual for an arbitrary function given as a jet in coordinate 0.
pub fn ode_residual_of(f: &Jet2, x: f64, s: f64) -> f64 {
    x * x * f.hess(0, 0) - 5.0 * x * f.d(0) + 8.0 * f.value() + (x.powi(6) - s * s) / 72.0
}

/// Residual norms of the structure equations of the canonic coframe.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureResiduals {
    /// `dα - ((κ-s)/12|θ|²) α∧θ`.
    pub dalpha: f64,
    /// `d(Jα) - Jα∧Jβ` together with `d(κ/(q|θ|⁴) Jα)`.
    pub djalpha: f64,
    /// `d((κ^{1/3}/|θ|²) Jθ) - (κ^{1/3}/|θ|²) Jα∧η`.
    pub djtheta: f64,
    /// Both Ricci identities of the first kind.
    pub ricci1: f64,
    /// `dβ + α∧Jα + ((s+2κ)/12) F`.
    pub ricci2: f64,
}

impl StructureResiduals {
    pub fn max(&self) -> f64 {
        [self.dalpha, self.djalpha, self.djtheta, self.ricci1, self.ricci2].into_iter().fold(0.0, f64::max)
    }
}

fn scale(a: &OneFormJets, k: Jet2) -> OneFormJets {
    a.map(|c| c * k)
}

fn lin(terms: &[(f64, &Mat4)]) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| terms.iter().map(|(c, m)| c * m[i][j]).sum()))
}

/// Evaluates the structure equations of the analytic coframe `(θ, Jθ, α, Jα)`
/// of a canonic chart with jet-exact exterior derivatives.
pub fn gauge_coframe_residuals(chart: &CanonicChart, p: &Point) -> Result<StructureResiduals> {
    chart.check_domain(p)?;
    let c = chart.constants();
    let x = seed_coordinates(*p);
    let forms = chart.forms(&x)?;
    let g = chart.metric_value(p)?;
    let ginv = inverse4(&g)?;
    let norm = |w: &Mat4| inner2(w, w, &ginv).max(0.0).sqrt();

    let kappa = forms.kappa;
    let y = forms.y;
    let big_c = (kappa - c.s) / (y * 12.0);
    let q = forms.q;
    let pj = forms.p;
    let big_b = (pj * (pj * 2.0 + big_c - 1.0) - kappa / (y * 24.0) + forms.q2 * 2.0) / q;

    let theta = &forms.theta;
    let jtheta = &forms.jtheta;
    let alpha = &forms.alpha;
    let jalpha = &forms.jalpha;
    // β = B Jα - C Jθ and Jβ = -B α + C θ.
    let beta: OneFormJets = std::array::from_fn(|i| big_b * jalpha[i] - big_c * jtheta[i]);
    let jbeta: OneFormJets = std::array::from_fn(|i| -(big_b * alpha[i]) + big_c * theta[i]);

    let tv = one_form_value(theta);
    let jtv = one_form_value(jtheta);
    let av = one_form_value(alpha);
    let jav = one_form_value(jalpha);
    let bv = one_form_value(&beta);
    let jbv = one_form_value(&jbeta);
    let cv = big_c.value();
    let yv = y.value();
    let kv = kappa.value();

    let d_alpha = d_one_form(alpha);
    let d_jalpha = d_one_form(jalpha);
    let d_beta = d_one_form(&beta);

    let a_t = wedge_values(&av, &tv);
    let ja_jt = wedge_values(&jav, &jtv);
    let a_jt = wedge_values(&av, &jtv);
    let ja_t = wedge_values(&jav, &tv);
    let t_jt = wedge_values(&tv, &jtv);
    let a_ja = wedge_values(&av, &jav);

    let dalpha = norm(&lin(&[(1.0, &d_alpha), (-cv, &a_t)]));

    let ja_jb = wedge_values(&jav, &jbv);
    let closed = d_one_form(&scale(jalpha, kappa / (q * y * y)));
    let djalpha = norm(&lin(&[(1.0, &d_jalpha), (-1.0, &ja_jb)])).max(norm(&closed));

    let eta: OneFormJets = std::array::from_fn(|i| theta[i] * (q * -2.0) + (pj * 2.0 + big_c - 1.0) * alpha[i]);
    let weight = kappa.cbrt() / y;
    let lhs = d_one_form(&scale(jtheta, weight));
    let rhs = wedge_values(&jav, &one_form_value(&eta));
    let djtheta = norm(&lin(&[(1.0, &lhs), (-weight.value(), &rhs)]));

    // Jφ = (α∧θ - Jα∧Jθ)/y, φ = -(α∧Jθ + Jα∧θ)/y.
    let b_ja = wedge_values(&bv, &jav);
    let b_a = wedge_values(&bv, &av);
    let first = lin(&[(1.0, &d_alpha), (-1.0, &b_ja), (-(kv - c.s) / (12.0 * yv), &a_t), ((kv - c.s) / (12.0 * yv), &ja_jt)]);
    let second = lin(&[(1.0, &d_jalpha), (1.0, &b_a), (-(kv - c.s) / (12.0 * yv), &a_jt), (-(kv - c.s) / (12.0 * yv), &ja_t)]);
    let ricci1 = norm(&first).max(norm(&second));

    let f_coef = (c.s + 2.0 * kv) / (12.0 * yv);
    let r2 = lin(&[(1.0, &d_beta), (1.0, &a_ja), (f_coef, &t_jt), (f_coef, &a_ja)]);
    let ricci2 = norm(&r2);

    Ok(StructureResiduals { dalpha, djalpha, djtheta, ricci1, ricci2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_constants_reduce_to_monomial() {
        let c = SolutionConstants { s: 0.0, a: 0.0, b: 0.0 };
        let (p, _) = closed_form_pq(&c, 1.5, 2.0);
        let f = -1.5f64.powi(6) / 576.0;
        let expected = f / 4.0 - 1.5f64.powi(3) / 48.0 + 0.25;
        assert!((p - expected).abs() < 1e-15);
    }

    #[test]
    fn zero_length_path_is_identity() {
        let c = SolutionConstants { s: 0.0, a: -695.0 / 576.0, b: 1.0 };
        let start = FrobeniusState { x: 1.0, y: 1.0, p: 0.0, q2: 551.0 / 576.0 };
        let out = integrate_frobenius(&start, &c, &[(1.0, 1.0)]).unwrap();
        assert_eq!(out.end, start);
    }
}
