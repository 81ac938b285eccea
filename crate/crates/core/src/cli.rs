//! Command-line front end.
//!
//! Exit codes: 0 success, 1 input error, 2 geometric degeneracy, 3 residual
//! check failure. Logging is controlled by `PG4_LOG` (`quiet`, `info`,
//! `debug`).

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use crate::curve::{AdmissibleCurve, CurveProvider};
use crate::energy::{energy_s, energy_t, pseudo_angle_s, pseudo_angle_t, Field};
use crate::error::{Error, Result};
use crate::example::helix_example;
use crate::flow::evolve::{arc_length_drift, evolve, History};
use crate::flow::field::{is_inextensible, FlowComponent, FlowField};
use crate::flow::residuals::{
    refinement_orders, residual_report, structure_checks, ConvergenceEntry, ResidualReport,
    REFINEMENT_FLOOR, STRUCTURAL_IDENTITIES,
};
use crate::frenet::FrenetApparatus;
use crate::io::{self as pio, CurveOverrides, IntegralRecord, RunMeta};

/// Relative arc-length drift accepted as inextensible.
pub const DRIFT_TOL: f64 = 1e-6;
/// Minimum observed order in refinement mode.
pub const MIN_ORDER: f64 = 1.9;
/// Tolerance on `∂f₁/∂s` when classifying a flow.
pub const RATE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, Args)]
pub struct RunArgs {
    /// Curve definition file (JSON).
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Flow definition file (JSON); the static flow when omitted.
    #[arg(long)]
    pub flow: Option<PathBuf>,
    /// Grid size, overriding the curve file.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Parameter domain `A,B`, overriding the curve file.
    #[arg(long, value_parser = parse_domain, allow_hyphen_values = true)]
    pub domain: Option<(f64, f64)>,
    /// Tolerance for residuals that must vanish.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Number of grid levels for a convergence study (at least 3).
    #[arg(long)]
    pub refine: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Debug, Args)]
pub struct ExampleArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub k: f64,
    #[arg(long, default_value_t = 512)]
    pub n: usize,
    /// Also write the report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Frenet apparatus at every grid point.
    Apparatus(RunArgs),
    /// Evolve a curve under a flow and record every time level.
    Evolve(RunArgs),
    /// Residuals of the frame compatibility conditions.
    Verify(RunArgs),
    /// Bending energies of the four frame fields.
    Energy(RunArgs),
    /// Pseudo-angles of the four frame fields.
    Angles(RunArgs),
    /// Stated against computed values for the reference helix.
    Example(ExampleArgs),
}

#[derive(Clone, Debug, Parser)]
#[command(
    name = "pg4",
    version,
    about = "Frenet frames and curve flows in pseudo-Galilean 4-space"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

fn parse_domain(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected A,B")?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if !(b > a) {
        return Err(format!("empty domain [{a}, {b}]"));
    }
    Ok((a, b))
}

/// Validated settings for one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: &'static str,
    pub curve: Option<PathBuf>,
    pub flow: Option<PathBuf>,
    pub n: Option<usize>,
    pub domain: Option<(f64, f64)>,
    pub dt: f64,
    pub steps: usize,
    pub tol: f64,
    pub refine: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: &'static str, a: RunArgs, default_format: Format) -> Result<Self> {
        let cfg = Self {
            command,
            curve: a.curve,
            flow: a.flow,
            n: a.n,
            domain: a.domain,
            dt: a.dt.unwrap_or(0.01),
            steps: a.steps.unwrap_or(100),
            tol: a.tol.unwrap_or(1e-10),
            refine: a.refine,
            out: a.out,
            format: a.format.unwrap_or(default_format),
        };
        if let Some(n) = cfg.n {
            if n < 16 {
                return Err(Error::InvalidInput(format!(
                    "--n {n}: at least 16 grid points are required"
                )));
            }
        }
        if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "--dt {} must be positive",
                cfg.dt
            )));
        }
        if cfg.steps < 1 {
            return Err(Error::InvalidInput("--steps must be at least 1".into()));
        }
        if !(cfg.tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "--tol {} must be positive",
                cfg.tol
            )));
        }
        if let Some(r) = cfg.refine {
            if r < 3 {
                return Err(Error::InvalidInput(format!(
                    "--refine {r}: at least 3 levels are required"
                )));
            }
        }
        Ok(cfg)
    }

    fn curve(&self) -> Result<AdmissibleCurve> {
        let path = self
            .curve
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("--curve is required".into()))?;
        pio::load_curve(
            path,
            CurveOverrides {
                n: self.n,
                domain: self.domain,
            },
        )
    }

    fn flow(&self) -> Result<FlowField> {
        match &self.flow {
            Some(p) => pio::load_flow(p),
            None => Ok(FlowField::zero()),
        }
    }

    fn horizon(&self) -> (f64, f64) {
        (0.0, self.steps as f64 * self.dt)
    }

    fn open_output(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn finish(&self, args: &[String]) -> Result<()> {
        if let Some(p) = &self.out {
            pio::write_sidecar(p, &RunMeta::new(self.command, args.to_vec()))?;
        }
        Ok(())
    }
}

fn init_logging() {
    let level = match std::env::var("PG4_LOG").as_deref() {
        Ok("quiet") => log::LevelFilter::Off,
        Ok("info") => log::LevelFilter::Info,
        Ok("debug") => log::LevelFilter::Debug,
        _ => log::LevelFilter::Warn,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .try_init();
}

fn exit_code(e: &Error) -> i32 {
    if e.is_degeneracy() {
        2
    } else {
        1
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let raw: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match dispatch(cli.command, &raw) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command, raw: &[String]) -> Result<i32> {
    match command {
        Command::Apparatus(a) => cmd_apparatus(&RunConfig::new("apparatus", a, Format::Csv)?, raw),
        Command::Evolve(a) => cmd_evolve(&RunConfig::new("evolve", a, Format::Csv)?, raw),
        Command::Verify(a) => cmd_verify(&RunConfig::new("verify", a, Format::Json)?, raw),
        Command::Energy(a) => {
            cmd_integrals(&RunConfig::new("energy", a, Format::Json)?, raw, false)
        }
        Command::Angles(a) => cmd_integrals(&RunConfig::new("angles", a, Format::Json)?, raw, true),
        Command::Example(a) => cmd_example(&a, raw),
    }
}

pub fn cmd_apparatus(cfg: &RunConfig, raw: &[String]) -> Result<i32> {
    let curve = cfg.curve()?;
    let ap = FrenetApparatus::compute(&curve)?;
    let mut out = cfg.open_output()?;
    match cfg.format {
        Format::Csv => pio::write_apparatus_csv(&mut out, &ap)?,
        Format::Json => writeln!(out, "{}", pio::apparatus_json(&ap)?)?,
    }
    out.flush()?;
    cfg.finish(raw)?;
    Ok(0)
}

pub fn cmd_evolve(cfg: &RunConfig, raw: &[String]) -> Result<i32> {
    let curve = cfg.curve()?;
    let flow = cfg.flow()?;
    let states = evolve(&curve, &flow, cfg.dt, cfg.steps)?;
    let mut out = cfg.open_output()?;
    match cfg.format {
        Format::Csv => pio::write_evolution_csv(&mut out, &states)?,
        Format::Json => {
            let rows: Vec<_> = states
                .iter()
                .map(|s| serde_json::json!({"t": s.t, "arclength": s.arc_length, "points": s.points}))
                .collect();
            writeln!(out, "{}", pio::to_json_string(&rows)?)?;
        }
    }
    out.flush()?;
    drop(out);

    let mut report: Box<dyn Write> = if cfg.out.is_some() {
        Box::new(io::stdout().lock())
    } else {
        Box::new(io::stderr().lock())
    };
    writeln!(report, "t,arclength")?;
    let stride = (states.len() / 10).max(1);
    for (j, s) in states.iter().enumerate() {
        if j % stride == 0 || j + 1 == states.len() {
            writeln!(report, "{},{}", pio::fmt17(s.t), pio::fmt17(s.arc_length))?;
        }
    }
    let drift = arc_length_drift(&states);
    let inextensible = is_inextensible(&flow, curve.domain(), curve.grid.n, 0.0, RATE_TOL)?;
    if inextensible {
        let verdict = if drift < DRIFT_TOL { "PASS" } else { "FAIL" };
        writeln!(
            report,
            "inextensibility drift {drift:.3e} (limit {DRIFT_TOL:e}): {verdict}"
        )?;
    } else {
        writeln!(
            report,
            "flow not inextensible: f1 varies along the curve; relative length drift {drift:.3e}"
        )?;
    }
    cfg.finish(raw)?;
    Ok(0)
}

/// `Some(c)` for flows `f = (c, 0, 0, 0)`.
fn tangential_speed(flow: &FlowField) -> Option<f64> {
    match &flow.components {
        [FlowComponent::Const(c), FlowComponent::Const(a), FlowComponent::Const(b), FlowComponent::Const(d)]
            if *a == 0.0 && *b == 0.0 && *d == 0.0 =>
        {
            Some(*c)
        }
        _ => None,
    }
}

/// Tangential transport of an analytic curve has a closed-form history;
/// any other combination is evolved numerically.
fn history_for(
    curve: &AdmissibleCurve,
    flow: &FlowField,
    dt: f64,
    steps: usize,
) -> Result<History> {
    match (&curve.provider, tangential_speed(flow)) {
        (CurveProvider::Analytic(c), Some(speed)) => {
            info!("tangential transport: using the exact translated history");
            History::transported(c.as_ref(), speed, curve.grid, 0.0, dt, steps + 1)
        }
        _ => History::from_states(&evolve(curve, flow, dt, steps)?, curve.grid),
    }
}

fn full_report(history: &History, flow: &FlowField) -> Result<ResidualReport> {
    let mut report = residual_report(history, flow)?;
    report.entries.extend(structure_checks(history, flow)?);
    Ok(report)
}

pub fn cmd_verify(cfg: &RunConfig, raw: &[String]) -> Result<i32> {
    let curve = cfg.curve()?;
    let flow = cfg.flow()?;
    let history = history_for(&curve, &flow, cfg.dt, cfg.steps)?;
    let report = full_report(&history, &flow)?;

    let mut out = cfg.open_output()?;
    match cfg.format {
        Format::Json => writeln!(out, "{}", pio::to_json_string(&report)?)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["identity", "max_abs", "mean_abs", "h", "dt", "skipped"])?;
            for e in &report.entries {
                w.write_record([
                    e.identity.clone(),
                    pio::fmt17(e.max_abs),
                    pio::fmt17(e.mean_abs),
                    pio::fmt17(e.h),
                    pio::fmt17(e.dt),
                    e.skipped.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    drop(out);

    let static_flow = flow.is_zero();
    let mut failed = false;
    for e in &report.entries {
        let structural = STRUCTURAL_IDENTITIES.contains(&e.identity.as_str());
        let forced = structural || (static_flow && !e.identity.starts_with("frenet."));
        if forced && !(e.max_abs <= cfg.tol) {
            eprintln!(
                "FAIL {}: max |residual| {:e} exceeds {:e}",
                e.identity, e.max_abs, cfg.tol
            );
            failed = true;
        }
    }

    if let Some(levels) = cfg.refine {
        let orders = refinement_study(&curve, &flow, cfg.dt, cfg.steps, levels)?;
        for o in &orders {
            let verdict = match o.order {
                Some(p) if p >= MIN_ORDER => format!("{p:.3} PASS"),
                Some(p) => {
                    failed = true;
                    format!("{p:.3} FAIL")
                }
                None => "saturated PASS".to_string(),
            };
            println!("{:<36} {verdict}", o.identity);
        }
    }
    cfg.finish(raw)?;
    Ok(if failed { 3 } else { 0 })
}

/// Reports on `levels` grids refined by factors of two in both `s` and `t`.
pub fn refinement_study(
    curve: &AdmissibleCurve,
    flow: &FlowField,
    dt: f64,
    steps: usize,
    levels: usize,
) -> Result<Vec<ConvergenceEntry>> {
    let CurveProvider::Analytic(analytic) = &curve.provider else {
        return Err(Error::InvalidInput(
            "refinement needs an analytic curve".into(),
        ));
    };
    let (a, b) = curve.domain();
    let reports = (0..levels)
        .map(|l| {
            let f = 1usize << l;
            let c =
                AdmissibleCurve::from_arc(analytic.clone(), (a, b), (curve.grid.n - 1) * f + 1)?;
            let h = history_for(&c, flow, dt / f as f64, steps * f)?;
            full_report(&h, flow)
        })
        .collect::<Result<Vec<_>>>()?;
    refinement_orders(&reports, REFINEMENT_FLOOR)
}

pub fn cmd_integrals(cfg: &RunConfig, raw: &[String], angles: bool) -> Result<i32> {
    let curve = cfg.curve()?;
    let flow = cfg.flow()?;
    let ap = FrenetApparatus::compute(&curve)?;
    let history = history_for(&curve, &flow, cfg.dt, cfg.steps)?;
    let node = curve.grid.n / 2;
    let (s_dom, t_dom) = (curve.domain(), cfg.horizon());

    // (record, params, samples) for the s-lines, then the t-lines
    let mut results: Vec<(IntegralRecord, Vec<f64>, Vec<f64>)> = Vec::new();
    for field in Field::ALL {
        if angles {
            let r = pseudo_angle_s(&ap, field, s_dom)?;
            results.push(((&r).into(), r.params, r.samples));
        } else {
            let r = energy_s(&ap, field, s_dom)?;
            results.push(((&r).into(), r.params, r.samples));
        }
    }
    for field in Field::ALL {
        if angles {
            let r = pseudo_angle_t(&history, &flow, node, field, t_dom)?;
            results.push(((&r).into(), r.params, r.samples));
        } else {
            let r = energy_t(&history, &flow, node, field, t_dom)?;
            results.push(((&r).into(), r.params, r.samples));
        }
    }

    let mut out = cfg.open_output()?;
    match cfg.format {
        Format::Json => {
            let records: Vec<&IntegralRecord> = results.iter().map(|r| &r.0).collect();
            writeln!(out, "{}", pio::to_json_string(&records)?)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["field", "direction", "param", "integrand"])?;
            for (rec, params, samples) in &results {
                let dir = match rec.direction {
                    crate::energy::Direction::S => "s-line",
                    crate::energy::Direction::T => "t-line",
                };
                for (p, v) in params.iter().zip(samples) {
                    w.write_record([
                        rec.field.to_string(),
                        dir.to_string(),
                        pio::fmt17(*p),
                        pio::fmt17(*v),
                    ])?;
                }
            }
            w.flush()?;
        }
    }
    out.flush()?;
    cfg.finish(raw)?;
    Ok(0)
}

pub fn cmd_example(a: &ExampleArgs, raw: &[String]) -> Result<i32> {
    if a.n < 16 {
        return Err(Error::InvalidInput(format!(
            "--n {}: at least 16 grid points are required",
            a.n
        )));
    }
    let report = helix_example(a.a, a.b, a.k, a.n)?;
    print!("{report}");
    if let Some(p) = &a.out {
        std::fs::write(p, pio::to_json_string(&report)?)?;
        pio::write_sidecar(p, &RunMeta::new("example", raw.to_vec()))?;
    }
    Ok(0)
}
