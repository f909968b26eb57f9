//! Command-line front end: `constants`, `criteria`, `scan`, `simulate`, `verify`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::constants::{
    exponential_kappa, sharp_cstar, sharp_interp_constant, sharp_interp_constant_printed, KappaVariant,
};
use crate::criteria::{auto_select, run_criterion, DrConstant};
use crate::error::{Error, Result};
use crate::observables::{compute_observables, compute_observables_with, QuadratureOptions};
use crate::profiles::{chirp_negative_energy_check, scan_region, Axis, ClosedForm, ScanView};
use crate::solver::{analyze_trace, evolve, trace_sidecar};
use crate::verify;

mod config;

// Write errors on stdout (a closed pipe) are ignored.
macro_rules! say {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

pub use config::{
    CriteriaConfig, DrChoice, FamilyKind, GridConfig, NonlinearityConfig, NonlinearityKind, OutputConfig,
    ProfileConfig, RunConfig, ScanConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_APPLICABLE: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "nls-blowup",
    version,
    about = "Blow-up criteria for the 1D NLS with combined nonlinearities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print κ, C*(p) and interpolation constants.
    Constants(ConstantsArgs),
    /// Evaluate the blow-up criteria on a configured initial profile.
    Criteria(RunArgs),
    /// Scan a closed-form condition over a parameter region.
    Scan(ScanArgs),
    /// Evolve a configured profile with the split-step solver.
    Simulate(RunArgs),
    /// Run the built-in oracle suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    /// Print only κ.
    #[arg(long)]
    kappa: bool,
    /// Also print C(δ) with the printed outer exponent.
    #[arg(long)]
    printed_exponent: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// subcondition2-exp, weighted-exp, p5q7 or poly.
    #[arg(long)]
    which: Option<String>,
    /// printed, direct or positive-energy.
    #[arg(long)]
    view: Option<String>,
    /// Axis as name:min:max:count.
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    y: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Restrict to one suite (sharpness, inequalities, virial, closed-form).
    #[arg(long)]
    suite: Option<String>,
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let res = match cli.command {
        Command::Constants(a) => constants(&a),
        Command::Criteria(a) => criteria(&a),
        Command::Scan(a) => scan(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Verify(a) => Ok(verify_cmd(&a)),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn load(path: Option<&Path>) -> Result<RunConfig> {
    path.map_or_else(|| Ok(RunConfig::default()), RunConfig::load)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Config(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::File::create(&path)
        .and_then(|mut f| f.write_all(contents.as_bytes()))
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes") + "\n"
}

fn constants(a: &ConstantsArgs) -> Result<i32> {
    let main = exponential_kappa(KappaVariant::MainProof)?;
    if a.kappa {
        say!("kappa = {:.6}", main.kappa);
        return Ok(EXIT_OK);
    }
    say!("kappa (main proof)        = {:.6}   inner sum = {:.5}", main.kappa, main.inner_sum);
    let opt = exponential_kappa(KappaVariant::MainProofOptimal)?;
    say!("kappa (optimal split)     = {:.6}", opt.kappa);
    let cf = exponential_kappa(KappaVariant::CriticalFreeVariant)?;
    say!("kappa (critical-free)     = {:.6}   theta = {:.4}", cf.kappa, cf.theta.unwrap_or(f64::NAN));
    say!();
    say!("{:>6} {:>20}", "p", "C*(p)");
    for p in [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 9.0] {
        say!("{p:>6} {:>20.15}", sharp_cstar(p)?);
    }
    say!();
    let head = if a.printed_exponent { format!("{:>20}", "C printed") } else { String::new() };
    say!("{:>6} {:>6} {:>10} {:>20}{head}", "p", "q", "delta", "C(delta)");
    for (p, q) in [(3.0, 6.0), (4.0, 6.0), (4.0, 8.0), (5.0, 8.0)] {
        for delta in [0.01, 0.1, 1.0] {
            let c = sharp_interp_constant(p, q, delta)?.constant;
            let extra = if a.printed_exponent {
                format!("{:>20.12}", sharp_interp_constant_printed(p, q, delta)?)
            } else {
                String::new()
            };
            say!("{p:>6} {q:>6} {delta:>10} {c:>20.12}{extra}");
        }
    }
    Ok(EXIT_OK)
}

/// Criteria implied by the nonlinearity's shape.
fn dr_constant(c: DrChoice) -> DrConstant {
    match c {
        DrChoice::Sharp => DrConstant::Sharp,
        DrChoice::AsPrinted => DrConstant::AsPrinted,
    }
}

fn criteria(a: &RunArgs) -> Result<i32> {
    let mut cfg = load(a.config.as_deref())?;
    if let Some(out) = &a.out {
        cfg.output.dir = out.clone();
    }
    let nl = cfg.nonlinearity.build()?;
    let field = cfg.field()?;
    let obs = compute_observables(&field, &nl)?;
    let names: Vec<String> = if cfg.criteria.select.iter().any(|s| s == "auto") {
        auto_select(&nl).into_iter().map(String::from).collect()
    } else {
        cfg.criteria.select.clone()
    };
    let reports = names
        .iter()
        .map(|n| {
            run_criterion(
                n,
                &nl,
                &obs,
                cfg.criteria.real_data_shortcut,
                dr_constant(cfg.criteria.dr_constant),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let chirp = match cfg.profile.family().and_then(|f| f.unchirped()) {
        Some((fam, b)) if b < 0.0 => {
            let v0 = crate::profiles::build_profile(&fam, field.grid().to_owned())?;
            Some(chirp_negative_energy_check(&v0, b, &nl)?)
        }
        _ => None,
    };
    let out = json!({
        "config": cfg,
        "observables": obs,
        "chirp": chirp,
        "reports": reports,
    });
    let text = pretty(&out);
    let _ = std::io::stdout().write_all(text.as_bytes());
    write_file(&cfg.output.dir, "criteria.json", &text)?;
    if reports.iter().any(|r| r.applicable) {
        Ok(EXIT_OK)
    } else {
        eprintln!("no selected criterion is applicable");
        Ok(EXIT_NOT_APPLICABLE)
    }
}

fn scan(a: &ScanArgs) -> Result<i32> {
    let mut cfg = load(a.config.as_deref())?;
    if let Some(w) = &a.which {
        cfg.scan.which = w.clone();
    }
    if let Some(v) = &a.view {
        cfg.scan.view = v.clone();
    }
    if let Some(x) = &a.x {
        cfg.scan.x = x.clone();
        if a.y.is_none() {
            cfg.scan.y = None;
        }
    }
    if let Some(y) = &a.y {
        cfg.scan.y = Some(y.clone());
    }
    if let Some(out) = &a.out {
        cfg.output.dir = out.clone();
    }
    let which = ClosedForm::parse(&cfg.scan.which)?;
    let view = ScanView::parse(&cfg.scan.view)?;
    let x = Axis::parse(&cfg.scan.x)?;
    let y = cfg.scan.y.as_deref().map(Axis::parse).transpose()?;
    let res = scan_region(which, view, &x, y.as_ref())?;
    let path = write_file(&cfg.output.dir, &res.file_name(), &res.to_csv())?;
    say!(
        "{}: {} of {} cells satisfied -> {}",
        which.name(),
        res.satisfied_count(),
        res.cells.len(),
        path.display()
    );
    Ok(EXIT_OK)
}

fn simulate(a: &RunArgs) -> Result<i32> {
    let mut cfg = load(a.config.as_deref())?;
    if let Some(out) = &a.out {
        cfg.output.dir = out.clone();
    }
    let nl = cfg.nonlinearity.build()?;
    let field = cfg.field()?;
    let trace = evolve(&field, &nl, &cfg.solver)?;
    let obs0 = compute_observables_with(&field, &nl, QuadratureOptions { far_field_tail: false }, None)?;
    let analysis = analyze_trace(&trace, &obs0, &nl).ok();
    let mut side = trace_sidecar(&trace, analysis.as_ref());
    side["config"] = serde_json::to_value(&cfg).map_err(|e| Error::Internal(e.to_string()))?;
    let csv = write_file(&cfg.output.dir, "trace.csv", &trace.to_csv())?;
    write_file(&cfg.output.dir, "trace.json", &pretty(&side))?;
    say!(
        "{} after {} steps, t = {}; trace -> {}",
        trace.stop_reason,
        trace.steps,
        trace.times.last().copied().unwrap_or(0.0),
        csv.display()
    );
    Ok(EXIT_OK)
}

fn verify_cmd(a: &VerifyArgs) -> i32 {
    let report = match &a.suite {
        Some(s) => {
            let mut r = verify::VerifyReport::default();
            verify::run_suite(s, &mut r);
            r
        }
        None => verify::run_all(),
    };
    for line in report.lines() {
        say!("{line}");
    }
    if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}
