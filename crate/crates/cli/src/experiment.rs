//! Path-integration experiment for the first-order `(p, q²)` system: integrate
//! along the two L-shaped paths between two points and compare with each other
//! and with the closed form.

use serde::Serialize;

use sdeh_core::error::Result;
use sdeh_core::frobenius::{closed_form_pq, integrate_frobenius, FrobeniusState, SolutionConstants};

use crate::report::Num;

#[derive(Clone, Debug, Serialize)]
pub struct PathResult {
    /// `"x_then_y"` or `"y_then_x"`.
    pub route: &'static str,
    pub p: Num,
    pub q2: Num,
    pub q2_crossed_zero: bool,
    pub accepted_steps: usize,
    /// Distance of the endpoint from the closed form.
    pub closed_form_error: Num,
}

#[derive(Clone, Debug, Serialize)]
pub struct FrobeniusExperiment {
    pub s: Num,
    pub a: Num,
    pub b: Num,
    pub start: [Num; 2],
    pub end: [Num; 2],
    pub start_state: [Num; 2],
    pub closed_form_end: [Num; 2],
    pub paths: [PathResult; 2],
    /// Distance between the two path endpoints.
    pub path_discrepancy: Num,
}

pub fn frobenius_experiment(c: SolutionConstants, start: (f64, f64), end: (f64, f64)) -> Result<FrobeniusExperiment> {
    let (p0, q0) = closed_form_pq(&c, start.0, start.1);
    let state = FrobeniusState { x: start.0, y: start.1, p: p0, q2: q0 };
    let exact = closed_form_pq(&c, end.0, end.1);
    let run = |route: &'static str, corner: (f64, f64)| -> Result<PathResult> {
        let out = integrate_frobenius(&state, &c, &[corner, end])?;
        Ok(PathResult {
            route,
            p: Num(out.end.p),
            q2: Num(out.end.q2),
            q2_crossed_zero: out.q2_crossed_zero,
            accepted_steps: out.accepted_steps,
            closed_form_error: Num((out.end.p - exact.0).hypot(out.end.q2 - exact.1)),
        })
    };
    let a = run("x_then_y", (end.0, start.1))?;
    let b = run("y_then_x", (start.0, end.1))?;
    let discrepancy = (a.p.0 - b.p.0).hypot(a.q2.0 - b.q2.0);
    Ok(FrobeniusExperiment {
        s: Num(c.s),
        a: Num(c.a),
        b: Num(c.b),
        start: [Num(start.0), Num(start.1)],
        end: [Num(end.0), Num(end.1)],
        start_state: [Num(p0), Num(q0)],
        closed_form_end: [Num(exact.0), Num(exact.1)],
        paths: [a, b],
        path_discrepancy: Num(discrepancy),
    })
}
