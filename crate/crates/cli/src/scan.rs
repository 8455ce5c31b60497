//! Empirical domain discovery over a coordinate grid.

use serde::Serialize;

use sdeh_core::chart::{MetricChart, Point};

use crate::report::Num;

#[derive(Clone, Debug, Serialize)]
pub struct DomainReport {
    pub total: usize,
    pub inside: usize,
    pub fraction: Num,
    /// Per-axis `[min, max]` of the grid points inside the domain.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<[[Num; 2]; 4]>,
    /// Inside point closest to the box center, usable as an anchor.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<[Num; 4]>,
}

impl DomainReport {
    pub fn sample_point(&self) -> Option<Point> {
        self.sample.map(|s| s.map(|x| x.0))
    }
}

/// Evaluates the domain predicate on the grid spanned by `bounds` and
/// `resolution` (axes with resolution 1 use the midpoint).
pub fn scan_domain(chart: &dyn MetricChart, bounds: [[f64; 2]; 4], resolution: [usize; 4]) -> DomainReport {
    let axes: [Vec<f64>; 4] = std::array::from_fn(|k| {
        let [lo, hi] = bounds[k];
        let n = resolution[k].max(1);
        if n == 1 {
            vec![0.5 * (lo + hi)]
        } else {
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        }
    });
    let center: Point = bounds.map(|[lo, hi]| 0.5 * (lo + hi));
    let mut total = 0;
    let mut inside = 0;
    let mut lo = [f64::INFINITY; 4];
    let mut hi = [f64::NEG_INFINITY; 4];
    let mut best: Option<(f64, Point)> = None;
    for &a in &axes[0] {
        for &b in &axes[1] {
            for &c in &axes[2] {
                for &d in &axes[3] {
                    let p = [a, b, c, d];
                    total += 1;
                    if !chart.contains(&p) {
                        continue;
                    }
                    inside += 1;
                    for k in 0..4 {
                        lo[k] = lo[k].min(p[k]);
                        hi[k] = hi[k].max(p[k]);
                    }
                    let dist: f64 = (0..4).map(|k| (p[k] - center[k]).powi(2)).sum();
                    if best.is_none_or(|(d0, _)| dist < d0) {
                        best = Some((dist, p));
                    }
                }
            }
        }
    }
    DomainReport {
        total,
        inside,
        fraction: Num(if total > 0 { inside as f64 / total as f64 } else { 0.0 }),
        bounds: (inside > 0).then(|| std::array::from_fn(|k| [Num(lo[k]), Num(hi[k])])),
        sample: best.map(|(_, p)| p.map(Num)),
    }
}
