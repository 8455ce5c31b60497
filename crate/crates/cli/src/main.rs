use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sdeh_cli::checks::{default_checks, CHECKS};
use sdeh_cli::experiment::frobenius_experiment;
use sdeh_cli::scan::scan_domain;
use sdeh_cli::{default_suite, parse_config, run_suite, EXIT_CONFIG, EXIT_PASS};
use sdeh_core::catalog::{build_chart, CHARTS};
use sdeh_core::frobenius::SolutionConstants;

#[derive(Parser)]
#[command(name = "sdeh", version, about = "Verify self-dual Einstein Hermitian 4-metrics numerically")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite (the bundled default suite without --config).
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Worker threads; 0 picks the number of cores.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Seed for configurations that draw random points.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the report here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Report which points of a grid lie in a chart's domain.
    Scan {
        /// Config file; only chart, params, box and resolution are used.
        #[arg(long)]
        config: PathBuf,
    },
    /// Integrate the (p, q²) system along both L-shaped paths and compare with the closed form.
    Frobenius {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, default_value_t = -695.0 / 576.0, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        b: f64,
        /// Start point `x,y`.
        #[arg(long, default_value = "1,1", value_parser = parse_pair)]
        from: (f64, f64),
        /// End point `x,y`.
        #[arg(long, default_value = "1.2,1.5", value_parser = parse_pair)]
        to: (f64, f64),
    },
    /// List charts with their parameters and default checks, and all checks.
    ListCharts,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected x,y")?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t}: {e}"));
    Ok((p(a)?, p(b)?))
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), String> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn fail(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_CONFIG as u8)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Verify { config, format, threads, seed, output } => {
            let configs = match config {
                Some(path) => match std::fs::read_to_string(&path) {
                    Ok(text) => match parse_config(&text) {
                        Ok(c) => c,
                        Err(e) => return fail(format!("{}: {e}", path.display())),
                    },
                    Err(e) => return fail(format!("{}: {e}", path.display())),
                },
                None => default_suite(),
            };
            let (report, code) = match run_suite(&configs, threads, seed) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let text = match format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            if let Err(e) = emit(&text, output.as_ref()) {
                return fail(e);
            }
            for run in &report.runs {
                let failed: Vec<&str> = run.summary.iter().filter(|s| !s.pass).map(|s| s.residual.as_str()).collect();
                eprintln!(
                    "{}: {} ({} points evaluated, {} outside domain{}{})",
                    run.name,
                    if run.pass { "pass" } else { "FAIL" },
                    run.points_evaluated,
                    run.points_skipped,
                    if failed.is_empty() { String::new() } else { format!("; failing: {}", failed.join(", ")) },
                    if run.errors.is_empty() { String::new() } else { format!("; {} errors", run.errors.len()) },
                );
            }
            ExitCode::from(code as u8)
        }
        Command::Scan { config } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => return fail(format!("{}: {e}", config.display())),
            };
            let configs = match parse_config(&text) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let mut out = BTreeMap::new();
            for cfg in &configs {
                let chart = match build_chart(&cfg.chart, &cfg.params) {
                    Ok(c) => c,
                    Err(e) => return fail(format!("{}: {e}", cfg.label())),
                };
                out.insert(cfg.label().to_string(), scan_domain(chart.as_ref(), cfg.bounds, cfg.resolution));
            }
            let mut text = serde_json::to_string_pretty(&out).expect("scan report serialises");
            text.push('\n');
            match emit(&text, None) {
                Ok(()) => ExitCode::from(EXIT_PASS as u8),
                Err(e) => fail(e),
            }
        }
        Command::Frobenius { s, a, b, from, to } => match frobenius_experiment(SolutionConstants { s, a, b }, from, to) {
            Ok(result) => {
                let mut text = serde_json::to_string_pretty(&result).expect("experiment serialises");
                text.push('\n');
                match emit(&text, None) {
                    Ok(()) => ExitCode::from(EXIT_PASS as u8),
                    Err(e) => fail(e),
                }
            }
            Err(e) => fail(e),
        },
        Command::ListCharts => {
            let mut text = String::new();
            for info in CHARTS {
                let params: Vec<String> = info.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                text.push_str(&format!("{:<16} {}\n", info.name, info.description));
                text.push_str(&format!("{:<16} params: {}\n", "", if params.is_empty() { "none".into() } else { params.join(" ") }));
                text.push_str(&format!("{:<16} default checks: {}\n", "", default_checks(info.name).join(" ")));
            }
            text.push_str("\nchecks:\n");
            for c in CHECKS {
                text.push_str(&format!("  {:<16} {}\n", c.name, c.description));
            }
            match emit(&text, None) {
                Ok(()) => ExitCode::from(EXIT_PASS as u8),
                Err(e) => fail(e),
            }
        }
    }
}
