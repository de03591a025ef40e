mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use apcone::apengine::{run_ap_with, APTrace, RunOptions};
use apcone::builtins::{builtin, fit_with_plan, random_start, resolve_start, FitPlan, Start};
use apcone::planes::{build_plane, singularity_degree};
use apcone::rates::{write_trace_csv, RateFit, RateModel};
use apcone::verify::{run_suite, Suite};
use clap::{Parser, Subcommand};
use log::{debug, info};

use config::{PlaneRef, RunConfig};

const USAGE: u8 = 2;
const FAILED: u8 = 1;

#[derive(Parser)]
#[command(name = "apcone", version, about = "Alternating projections onto the PSD cone: example runs, rate fits and verification suites")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a builtin example, write its trace CSV and print a fit summary.
    Example {
        /// One of ex3.2, ex3.3, ex3.4, ex4.4, ex6.1.
        id: String,
        /// Branch, e.g. `pos` or `neg` for the line examples.
        #[arg(long)]
        variant: Option<String>,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
        #[arg(long)]
        stride: Option<usize>,
        /// CSV path; `-` writes the CSV to stdout and the summary to stderr.
        #[arg(long)]
        out: Option<PathBuf>,
        /// `t0`, `a,b,c` or `slowest-curve:t0`.
        #[arg(long)]
        start: Option<Start>,
    },
    /// Run a verification suite and print one PASS/FAIL line per check.
    Verify {
        /// Suite name, or `all`.
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run AP from a JSON config.
    Run { config: PathBuf },
}

struct Failure {
    code: u8,
    msg: String,
}

fn usage(msg: impl ToString) -> Failure {
    Failure { code: USAGE, msg: msg.to_string() }
}

fn failed(msg: impl ToString) -> Failure {
    Failure { code: FAILED, msg: msg.to_string() }
}

fn init_logging() {
    let level = match std::env::var("APCONE_LOG").as_deref() {
        Ok("debug") => log::LevelFilter::Debug,
        Ok("info") => log::LevelFilter::Info,
        _ => log::LevelFilter::Off,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Example { id, variant, iters, tol, stride, out, start } => {
            cmd_example(&id, variant.as_deref(), iters, tol, stride, out, start)
        }
        Cmd::Verify { suite, seed } => cmd_verify(&suite, seed),
        Cmd::Run { config } => cmd_run(&config),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.msg.is_empty() {
                eprintln!("apcone: {}", f.msg);
            }
            ExitCode::from(f.code)
        }
    }
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol >= 0.0 {
        Ok(())
    } else {
        Err(usage("tol must be non-negative"))
    }
}

fn headline(fit: &RateFit) -> String {
    match fit.model {
        RateModel::Geometric => format!("geometric ratio {:.6}", fit.params.1),
        RateModel::InversePower(p) => format!("slope of 1/dist^{p} {:.6}", fit.params.1),
    }
}

fn summary(label: &str, trace: &APTrace<f64>, fit: &RateFit) -> String {
    format!(
        "{label}: {}; {fit}; {} iterations, stop {}, final dist {:.6e}",
        headline(fit),
        trace.last().k,
        trace.stop_reason,
        trace.last().dist
    )
}

/// Writes the CSV to `out` (or stdout for `-`). Returns whether stdout was used.
fn emit_csv(trace: &APTrace<f64>, out: &Path) -> Result<bool, Failure> {
    if out.as_os_str() == "-" {
        let stdout = io::stdout();
        write_trace_csv(trace, stdout.lock()).map_err(failed)?;
        return Ok(true);
    }
    let file = File::create(out).map_err(|e| usage(format!("{}: {e}", out.display())))?;
    let mut w = BufWriter::new(file);
    write_trace_csv(trace, &mut w).map_err(failed)?;
    w.flush().map_err(|e| failed(format!("{}: {e}", out.display())))?;
    info!("wrote {} rows to {}", trace.len(), out.display());
    Ok(false)
}

fn report(label: &str, trace: &APTrace<f64>, plan: FitPlan, to_stderr: bool) -> Result<(), Failure> {
    let fit = fit_with_plan(plan, trace).map_err(|e| failed(format!("{label}: fit failed: {e}")))?;
    let line = summary(label, trace, &fit);
    if to_stderr {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
    Ok(())
}

fn cmd_example(
    id: &str,
    variant: Option<&str>,
    iters: Option<usize>,
    tol: f64,
    stride: Option<usize>,
    out: Option<PathBuf>,
    start: Option<Start>,
) -> Result<(), Failure> {
    check_tol(tol)?;
    let mut ex = builtin(id, variant).map_err(usage)?;
    if let Some(s) = start {
        ex.start = s;
    }
    let p0 = ex.start_coeffs().map_err(usage)?;
    let mut opts = RunOptions::new(iters.unwrap_or(ex.iters), tol);
    opts.stride = stride;
    debug!("{}: start {:?}, {} iterations", ex.label, p0, opts.max_iter);
    let trace = run_ap_with(&ex.plane, &p0, &opts).map_err(failed)?;
    let out = out.unwrap_or_else(|| PathBuf::from(format!("{}.csv", ex.label.replace('/', "_"))));
    let to_stderr = emit_csv(&trace, &out)?;
    report(&ex.label, &trace, ex.fit, to_stderr)
}

fn cmd_verify(name: &str, seed: u64) -> Result<(), Failure> {
    let suites = if name == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![name.parse::<Suite>().map_err(usage)?]
    };
    let mut failures = 0;
    for suite in suites {
        info!("running {}", suite.name());
        for check in run_suite(suite, seed) {
            println!("{check}");
            failures += usize::from(!check.passed);
        }
    }
    if failures == 0 {
        Ok(())
    } else {
        Err(failed(format!("{failures} check(s) failed")))
    }
}

fn cmd_run(path: &Path) -> Result<(), Failure> {
    let cfg = RunConfig::load(path).map_err(usage)?;
    let start: Option<Start> = cfg.start.as_ref().map(|s| s.resolve()).transpose().map_err(usage)?;

    let (label, plane, spec, iters, plan, default_start) = match &cfg.plane {
        PlaneRef::Builtin(id) => {
            let ex = builtin(id, cfg.variant.as_deref()).map_err(usage)?;
            (ex.label, ex.plane, ex.spec, ex.iters, ex.fit, Some(ex.start))
        }
        PlaneRef::Spec(spec) => {
            if cfg.variant.is_some() {
                return Err(usage("variant only applies to builtin examples"));
            }
            let plane = build_plane::<f64>(spec).map_err(usage)?.plane;
            // the slow family converges like k^{-1/6}, the rest like k^{-1/2}
            let p = if singularity_degree(spec) == 2 { 6 } else { 2 };
            ("custom".to_string(), plane, Some(spec.clone()), 10_000, FitPlan::InversePower(p, None), None)
        }
    };
    if let Some(spec) = &spec {
        println!("singularity degree: {}", singularity_degree(spec));
    }
    let p0 = match start.as_ref().or(default_start.as_ref()) {
        Some(s) => resolve_start(&plane, spec.as_ref(), s).map_err(usage)?,
        None => random_start(plane.dim(), 0.05, cfg.seed),
    };
    let mut opts = RunOptions::new(cfg.max_iter.unwrap_or(iters), cfg.tol);
    opts.stride = cfg.stride;
    let trace = run_ap_with(&plane, &p0, &opts).map_err(failed)?;
    let to_stderr = emit_csv(&trace, &cfg.out_path(path))?;
    if trace.len() < 2 {
        // nothing to fit on a single row
        println!("{label}: 0 iterations, stop {}, dist {:.6e}", trace.stop_reason, trace.last().dist);
        return Ok(());
    }
    report(&label, &trace, plan, to_stderr)
}
