//! Suite execution: grid or random points, parallel over points, results
//! collected in point order so the report does not depend on scheduling.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use sdeh_core::chart::Point;
use sdeh_core::error::GeometryError;

use crate::checks::{default_checks, find_check, CheckInfo, Context, Residual};
use crate::config::{Config, ConfigError};
use crate::report::{Num, PointError, Record, Report, Rescale, RunReport};

/// The configuration shipped with the tool and exercised by the acceptance
/// tests.
pub const DEFAULT_SUITE: &str = include_str!("../suites/default.json");

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Resolves the tolerance of a residual: full name, then check name, then
/// tier name, then the residual's own default, then the tier default.
pub fn tolerance_for(cfg: &Config, r: &Residual) -> f64 {
    let check = r.name.split('.').next().unwrap_or(&r.name);
    [r.name.as_str(), check, r.tier.name()]
        .iter()
        .find_map(|k| cfg.tolerances.get(*k).copied())
        .or(r.default_tolerance)
        .unwrap_or_else(|| r.tier.default_tolerance())
}

fn resolve_checks(cfg: &Config) -> Result<Vec<&'static CheckInfo>, ConfigError> {
    let names: Vec<&str> = if cfg.checks.is_empty() {
        default_checks(&cfg.chart).to_vec()
    } else {
        cfg.checks.iter().map(String::as_str).collect()
    };
    names
        .into_iter()
        .map(|n| find_check(n).ok_or_else(|| ConfigError(format!("{}: unknown check '{n}'", cfg.label()))))
        .collect()
}

/// Sample points of a run: the grid, or `samples` uniform points drawn from a
/// generator seeded by `seed` and the run index.
pub fn sample_points(cfg: &Config, seed: u64, run_index: usize) -> Vec<Point> {
    match cfg.samples {
        None => cfg.grid(),
        Some(n) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(run_index as u64));
            (0..n)
                .map(|_| {
                    std::array::from_fn(|k| {
                        let [lo, hi] = cfg.bounds[k];
                        if hi > lo {
                            rng.gen_range(lo..hi)
                        } else {
                            lo
                        }
                    })
                })
                .collect()
        }
    }
}

enum Outcome {
    Residuals(Vec<Residual>),
    Skipped,
    Failed(String),
}

struct PointResult {
    point: Point,
    in_domain: bool,
    outcomes: Vec<(&'static str, Outcome)>,
}

fn evaluate(ctx: &Context, checks: &[&'static CheckInfo], p: Point) -> PointResult {
    if !ctx.chart.contains(&p) {
        return PointResult { point: p, in_domain: false, outcomes: Vec::new() };
    }
    let outcomes = checks
        .iter()
        .map(|c| {
            let o = match (c.run)(ctx, &p) {
                Ok(rs) => Outcome::Residuals(rs),
                Err(e) if is_skip(&e) => Outcome::Skipped,
                Err(e) => Outcome::Failed(e.to_string()),
            };
            (c.name, o)
        })
        .collect();
    PointResult { point: p, in_domain: true, outcomes }
}

/// Errors that mean "this point cannot be evaluated by this check" rather than
/// "the check failed".
fn is_skip(e: &GeometryError) -> bool {
    e.is_domain()
}

/// Runs one configuration. Configuration errors are returned; everything that
/// happens at individual points ends up in the report.
pub fn run_config(cfg: &Config, seed: u64, run_index: usize) -> Result<RunReport, ConfigError> {
    cfg.validate()?;
    let checks = resolve_checks(cfg)?;
    let ctx = Context::new(cfg, &checks)?;
    let points = sample_points(cfg, seed, run_index);
    let results: Vec<PointResult> = points.par_iter().map(|&p| evaluate(&ctx, &checks, p)).collect();

    let mut report = RunReport {
        name: cfg.label().to_string(),
        chart: cfg.chart.clone(),
        params: ctx.chart.params().into_iter().map(|(k, v)| (k.to_string(), Num(v))).collect(),
        checks: checks.iter().map(|c| c.name.to_string()).collect(),
        rescale: match &ctx.hyper {
            Some(Ok(h)) => Some(Rescale { factor: Num(h.factor), anchor: h.anchor.map(Num) }),
            _ => None,
        },
        points_total: points.len(),
        points_evaluated: 0,
        points_skipped: 0,
        check_skips: BTreeMap::new(),
        errors: Vec::new(),
        summary: Vec::new(),
        records: Vec::new(),
        pass: false,
    };
    for pr in results {
        if !pr.in_domain {
            report.points_skipped += 1;
            continue;
        }
        report.points_evaluated += 1;
        for (check, outcome) in pr.outcomes {
            match outcome {
                Outcome::Residuals(rs) => {
                    for r in rs {
                        let tol = tolerance_for(cfg, &r);
                        report.records.push(Record::new(&pr.point, r.name, r.value, tol, r.bound));
                    }
                }
                Outcome::Skipped => *report.check_skips.entry(check.to_string()).or_default() += 1,
                Outcome::Failed(message) => {
                    report.errors.push(PointError { point: pr.point.map(Num), check: check.to_string(), message })
                }
            }
        }
    }
    report.finish();
    Ok(report)
}

/// Runs every configuration on a pool of `threads` workers (0 = automatic)
/// and returns the report with its exit code: 0 when everything passes, 1 when
/// a tolerance fails, 2 when a configuration is invalid or a run evaluated no
/// point at all.
pub fn run_suite(configs: &[Config], threads: usize, seed: u64) -> Result<(Report, i32), ConfigError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ConfigError(format!("cannot start worker pool: {e}")))?;
    // Validate everything before spending time on any run.
    for cfg in configs {
        cfg.validate()?;
        resolve_checks(cfg)?;
        sdeh_core::catalog::build_chart(&cfg.chart, &cfg.params).map_err(|e| ConfigError(format!("{}: {e}", cfg.label())))?;
    }
    let runs = pool.install(|| {
        configs.iter().enumerate().map(|(i, cfg)| run_config(cfg, seed, i)).collect::<Result<Vec<_>, _>>()
    })?;
    let report = Report::new(seed, runs);
    let code = if report.runs.iter().any(|r| r.points_evaluated == 0) {
        EXIT_CONFIG
    } else if report.pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    };
    Ok((report, code))
}

pub fn default_suite() -> Vec<Config> {
    crate::config::parse_config(DEFAULT_SUITE).expect("bundled suite is valid")
}
