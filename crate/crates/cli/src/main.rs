mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use convrad::cutlocus::{cut_locus, cut_locus_csv, CutOptions};
use convrad::odes::shoot_geodesic;
use convrad::profiles::{ProfileError, ProfileKind};
use convrad::radii::{radial_sweep, radius_report, Radius, ReportOptions, ScanOptions};
use convrad::theorems::{run_suite, summarize, summary_csv, Claim, Suite, SuiteOptions, TheoremError};
use convrad::{Metric, Point};
use serde::Serialize;

use config::{config_error, ConfigError, ConfigFile, RunConfig, RunParams};

/// Radius functions and convexity-radius checks on rotationally symmetric surfaces.
#[derive(Debug, Parser)]
#[command(name = "convrad", version)]
struct Cli {
    /// TOML file with a [profile] table and an optional [run] table.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout if absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Launch directions on [0, π] for Jacobi scans.
    #[arg(long, global = true)]
    dirs: Option<usize>,
    #[arg(long, global = true)]
    horizon: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Slack tolerance for suite inequalities.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Radius report at a point (JSON), or a meridian sweep of conj/foc/foc_e (CSV).
    Radii {
        #[command(flatten)]
        at: At,
        /// `r0:r1:n`
        #[arg(long, conflicts_with = "r")]
        sweep: Option<String>,
    },
    /// Run a verification suite (JSON records); exit 1 on any non-vacuous failure.
    Verify {
        /// A suite id, `gulliver`, `cone` or `all`.
        suite: String,
        /// Sample points per suite.
        #[arg(long)]
        points: Option<usize>,
        /// Also write the per-record summary table as CSV.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Cut time per launch angle from a point (CSV).
    Cutlocus {
        #[command(flatten)]
        at: At,
        #[arg(long, default_value_t = 128)]
        n_psi: usize,
    },
    /// One geodesic with its Jacobi fields (CSV).
    Trace {
        #[command(flatten)]
        at: At,
        /// Launch angle from the outward radial direction.
        #[arg(long)]
        psi: f64,
        #[arg(long, default_value_t = 10.0)]
        length: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Table of φ, φ' and K (CSV).
    Profile {
        #[arg(long, default_value_t = 0.0)]
        r0: f64,
        #[arg(long)]
        r1: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
}

#[derive(Debug, Clone, Copy, Args)]
struct At {
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
}

impl At {
    fn point(&self) -> Result<Point> {
        let r = self.r.ok_or_else(|| config_error("--r is required"))?;
        Ok(Point::new(r, self.theta))
    }
}

fn suite_from(name: &str) -> Result<Suite> {
    match name {
        "gulliver" => Ok(Suite::One(Claim::FocalDiscontinuity)),
        "cone" => Ok(Suite::One(Claim::ConeSharpness)),
        s => s.parse().map_err(config_error),
    }
}

fn default_kind(command: &Command) -> ProfileKind {
    match command {
        Command::Verify { suite, .. } => match suite_from(suite) {
            Ok(Suite::One(c)) => c.required_kind().unwrap_or(ProfileKind::Sphere),
            _ => ProfileKind::Sphere,
        },
        _ => ProfileKind::Sphere,
    }
}

fn command_line() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

#[derive(Serialize)]
struct Provenance<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
}

fn provenance(cfg: &RunConfig) -> Provenance<'_> {
    Provenance {
        tool: "convrad",
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
    }
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    provenance: Provenance<'a>,
    #[serde(flatten)]
    body: T,
}

fn json<T: Serialize>(cfg: &RunConfig, body: T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Report {
        provenance: provenance(cfg),
        body,
    })?;
    s.push('\n');
    Ok(s)
}

/// CSV with the provenance as leading `#` comment lines.
fn csv(cfg: &RunConfig, table: &str) -> Result<String> {
    let p = provenance(cfg);
    Ok(format!(
        "# {} {}\n# config: {}\n{table}",
        p.tool,
        p.version,
        serde_json::to_string(p.config)?
    ))
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn radius_cell(r: Radius) -> String {
    r.value().map_or_else(|| "inf".to_string(), |v| format!("{v:.12}"))
}

fn parse_sweep(s: &str) -> Result<(f64, f64, usize)> {
    let bad = || config_error(format!("--sweep {s:?}: expected r0:r1:n"));
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else { return Err(bad()) };
    let (r0, r1, n) = (
        a.parse::<f64>().map_err(|_| bad())?,
        b.parse::<f64>().map_err(|_| bad())?,
        n.parse::<usize>().map_err(|_| bad())?,
    );
    if !(r0 >= 0.0 && r1 >= r0 && n >= 1) {
        return Err(bad());
    }
    Ok((r0, r1, n))
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("CONVRAD_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| config_error(format!("CONVRAD_THREADS = {v:?} is not a positive integer")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

/// `Ok(false)` when a suite reported non-vacuous failures.
fn run(cli: Cli) -> Result<bool> {
    init_threads()?;
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let points = match &cli.command {
        Command::Verify { points, .. } => *points,
        _ => None,
    };
    let flags = RunParams {
        n_dirs: cli.dirs,
        horizon: cli.horizon,
        seed: cli.seed,
        tol: cli.tol,
        points,
    };
    // suites run on a lighter direction grid than single reports
    let default_dirs = match &cli.command {
        Command::Verify { .. } => SuiteOptions::default().report.scan.n_dirs,
        _ => ScanOptions::default().n_dirs,
    };
    let cfg = RunConfig::resolve(command_line(), &file, &flags, default_kind(&cli.command), default_dirs)?;
    let metric = Metric::new(cfg.profile.build()?);
    let scan = ScanOptions {
        n_dirs: cfg.n_dirs,
        horizon: cfg.horizon,
        ..ScanOptions::default()
    };
    let out = cli.out.as_ref();
    match &cli.command {
        Command::Radii { sweep: Some(s), .. } => {
            let (r0, r1, n) = parse_sweep(s)?;
            let rows = radial_sweep(&metric, r0, r1, n, &scan)?;
            let mut t = String::from("r,conj,foc,foc_e\n");
            for row in rows {
                t.push_str(&format!(
                    "{:.12},{},{},{}\n",
                    row.r,
                    radius_cell(row.conj),
                    radius_cell(row.foc),
                    radius_cell(row.foc_e)
                ));
            }
            write_out(out, &csv(&cfg, &t)?)?;
        }
        Command::Radii { at, sweep: None } => {
            let opts = ReportOptions::default().with_horizon(cfg.horizon).with_dirs(cfg.n_dirs);
            let report = radius_report(&metric, at.point()?, &opts)?;
            #[derive(Serialize)]
            struct Body<T> {
                report: T,
            }
            write_out(out, &json(&cfg, Body { report })?)?;
        }
        Command::Verify { suite, summary, .. } => {
            let suite = suite_from(suite)?;
            let mut opts = SuiteOptions {
                n_points: cfg.points,
                seed: cfg.seed,
                tol: cfg.tol,
                ..SuiteOptions::default()
            }
            .with_horizon(cfg.horizon);
            opts.report.scan.n_dirs = cfg.n_dirs;
            let records = run_suite(&metric, suite, &opts)?;
            let s = summarize(&records);
            #[derive(Serialize)]
            struct Body<S, R> {
                summary: S,
                records: R,
            }
            write_out(
                out,
                &json(
                    &cfg,
                    Body {
                        summary: s,
                        records: &records,
                    },
                )?,
            )?;
            if let Some(p) = summary {
                std::fs::write(p, csv(&cfg, &summary_csv(&records))?)
                    .with_context(|| format!("writing {}", p.display()))?;
            }
            eprintln!(
                "{} records: {} passed ({} vacuous), {} failed ({} non-vacuous), {} not applicable",
                s.total, s.passed, s.vacuous, s.failed, s.non_vacuous_failures, s.not_applicable
            );
            return Ok(s.non_vacuous_failures == 0);
        }
        Command::Cutlocus { at, n_psi } => {
            if *n_psi < 1 {
                return Err(config_error("--n-psi must be positive"));
            }
            let samples = cut_locus(&metric, at.point()?, *n_psi, &CutOptions::default().with_horizon(cfg.horizon))?;
            write_out(out, &csv(&cfg, &cut_locus_csv(&samples))?)?;
        }
        Command::Trace { at, psi, length, step } => {
            if !(*length > 0.0 && *step > 0.0) {
                return Err(config_error("--length and --step must be positive"));
            }
            let path = shoot_geodesic(&metric, at.point()?, *psi, *length)?;
            let n = (path.length / step).floor() as usize;
            let mut t = String::from("t,r,theta,dr,dtheta,j,jp,j2,j2p\n");
            let ts = (0..=n).map(|k| k as f64 * step).chain((path.length > n as f64 * step).then_some(path.length));
            for s in ts.map(|t| path.full_at(t)) {
                let g = s.geo;
                t.push_str(&format!(
                    "{:.9},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12}\n",
                    g.t, g.r, g.theta, g.dr, g.dtheta, s.j, s.jp, s.j2, s.j2p
                ));
            }
            write_out(out, &csv(&cfg, &t)?)?;
        }
        Command::Profile { r0, r1, step } => {
            let r_max = metric.profile.r_max();
            let r1 = r1.unwrap_or(r_max);
            if !(*r0 >= 0.0 && r1 > *r0 && r1 <= r_max && *step > 0.0) {
                return Err(config_error(format!("need 0 <= r0 < r1 <= {r_max} and step > 0")));
            }
            let mut t = String::from("r,phi,phi_prime,K\n");
            for row in metric.profile.table(*r0, r1, *step) {
                t.push_str(&format!("{:.9},{:.12},{:.12},{:.12}\n", row.r, row.phi, row.phi_prime, row.k));
            }
            write_out(out, &csv(&cfg, &t)?)?;
        }
    }
    Ok(true)
}

/// 2 for bad input, 3 for numerical failures.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() || cause.is::<ProfileError>() {
            return 2;
        }
        if let Some(t) = cause.downcast_ref::<TheoremError>() {
            return match t {
                TheoremError::Profile(_) | TheoremError::WrongProfile { .. } => 2,
                _ => 3,
            };
        }
    }
    3
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
