//! Central finite differences for fields that are not jet-differentiable
//! (anything passing through an eigen-decomposition).
//!
//! One derivative uses the 5-point central formula at steps `h` and `h/2`,
//! combined by one Richardson step `(16 D(h/2) - D(h)) / 15`.

use crate::chart::{MetricChart, Point};
use crate::error::{GeometryError, Result};

/// Relative step: `h_i = STEP * coordinate_scale_i`.
pub const STEP: f64 = 1e-3;

/// Step sizes for each axis at `p`.
pub fn steps(chart: &dyn MetricChart, p: &Point) -> [f64; 4] {
    chart.coordinate_scale(p).map(|s| STEP * s)
}

fn shifted(p: &Point, axis: usize, delta: f64) -> Point {
    let mut q = *p;
    q[axis] += delta;
    q
}

fn five_point(fm2: &[f64], fm1: &[f64], fp1: &[f64], fp2: &[f64], h: f64) -> Vec<f64> {
    (0..fm2.len()).map(|k| (fm2[k] - 8.0 * fm1[k] + 8.0 * fp1[k] - fp2[k]) / (12.0 * h)).collect()
}

/// Derivative of a vector-valued field along one axis.
pub fn derivative<F>(f: &F, p: &Point, axis: usize, h: f64) -> Result<Vec<f64>>
where
    F: Fn(&Point) -> Result<Vec<f64>> + ?Sized,
{
    let eval = |delta: f64| {
        f(&shifted(p, axis, delta)).map_err(|e| match e {
            GeometryError::StencilDomain { .. } => e,
            e if e.is_domain() => GeometryError::StencilDomain { axis, reason: e.to_string() },
            e => e,
        })
    };
    let m2 = eval(-2.0 * h)?;
    let m1 = eval(-h)?;
    let mh = eval(-0.5 * h)?;
    let ph = eval(0.5 * h)?;
    let p1 = eval(h)?;
    let p2 = eval(2.0 * h)?;
    let coarse = five_point(&m2, &m1, &p1, &p2, h);
    let fine = five_point(&m1, &mh, &ph, &p1, 0.5 * h);
    Ok(fine.iter().zip(&coarse).map(|(f, c)| (16.0 * f - c) / 15.0).collect())
}

/// Partial derivatives along all four axes: `out[i][k] = ∂_i f_k`.
pub fn gradient<F>(f: &F, p: &Point, h: &[f64; 4]) -> Result<[Vec<f64>; 4]>
where
    F: Fn(&Point) -> Result<Vec<f64>> + ?Sized,
{
    let d0 = derivative(f, p, 0, h[0])?;
    let d1 = derivative(f, p, 1, h[1])?;
    let d2 = derivative(f, p, 2, h[2])?;
    let d3 = derivative(f, p, 3, h[3])?;
    Ok([d0, d1, d2, d3])
}

/// Gradient of a scalar field.
pub fn scalar_gradient<F>(f: &F, p: &Point, h: &[f64; 4]) -> Result<[f64; 4]>
where
    F: Fn(&Point) -> Result<f64> + ?Sized,
{
    let g = gradient(&|q: &Point| f(q).map(|v| vec![v]), p, h)?;
    Ok(g.map(|v| v[0]))
}
