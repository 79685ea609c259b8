//! `swp`: run spin-wave memory protocols, sweep their knobs, and solve
//! grating amplitude conditions from the command line.
//!
//! Exit codes: 0 success, 1 parse/validation problems, 2 numerical
//! (time step too large), 3 I/O.

mod manifest;
mod outputs;
mod paramfile;
mod runner;

use std::fmt;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use swp_core::dsl::{self, DslError};
use swp_core::error::CoreError;
use swp_core::grating::{fourier_coeff, solve_equal_orders, GratingShape, SolveCondition};
use swp_core::protocol::{builtin, BUILTIN_NAMES};

#[derive(Parser)]
#[command(name = "swp", version, about = "Spin-wave optical memory simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a protocol once and export its traces
    Run(RunArgs),
    /// Execute a protocol's SWEEP and export the fringe table
    Sweep(SweepArgs),
    /// Solve a grating amplitude condition (prints JSON)
    Solve(SolveArgs),
    /// Print diffraction-order coefficients as CSV
    Coeffs(CoeffsArgs),
    /// Run a built-in protocol, or list them
    Demo(DemoArgs),
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Longitudinal grid points (default: sized from the protocol)
    #[arg(long)]
    nz: Option<usize>,
    /// Transverse grid points (default: sized from the protocol)
    #[arg(long)]
    nx: Option<usize>,
    /// Time step inside coupling windows, nanoseconds
    #[arg(long)]
    dt_ns: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    /// Protocol file (.swp), or a manifest.json from a previous run
    protocol: PathBuf,
    /// Parameter file (flat JSON; missing keys take defaults)
    #[arg(long)]
    params: Option<PathBuf>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    /// Export a k-space snapshot every N solver steps
    #[arg(long)]
    snapshot_every: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    /// Protocol file (.swp) containing a SWEEP, or a manifest.json
    protocol: PathBuf,
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    /// Worker threads for sweep points (output is identical regardless)
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    /// Fringe-fit period in sweep units; pi-suffix numbers accepted.
    /// Defaults to 2pi for .zeta/.phase sweeps, otherwise no fit.
    #[arg(long)]
    fit_period: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    /// Grating shape: tri, saw, sawr, square, sine
    shape: String,
    /// Condition: zero_c0, equal_012, square_antisym
    condition: String,
}

#[derive(Args)]
struct CoeffsArgs {
    /// Grating shape: tri, saw, sawr, square, sine
    shape: String,
    /// Amplitude in rad; pi-suffix numbers accepted (e.g. 1.16pi)
    #[arg(long)]
    a: String,
    /// Profile offset in rad
    #[arg(long, default_value = "0")]
    zeta: String,
    /// Print orders -n..=n
    #[arg(long, default_value_t = 5)]
    orders: usize,
}

#[derive(Args)]
struct DemoArgs {
    /// Built-in name; omit to list them
    name: Option<String>,
    /// Write the protocol as DSL text to this file instead of running
    #[arg(long)]
    write_swp: Option<PathBuf>,
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    snapshot_every: Option<usize>,
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    #[arg(long)]
    fit_period: Option<String>,
}

/// Anything that ends the process with a non-zero code.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or an unusable request: exit 1.
    Usage(String),
    /// Protocol text error with its source span: exit 1.
    Dsl(DslError),
    /// Simulator-side error: exit 1, except DtTooLarge (2) and Io (3).
    Core(CoreError),
    /// Filesystem problem outside the solver: exit 3.
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Dsl(_) => 1,
            Failure::Core(CoreError::DtTooLarge(_)) => 2,
            Failure::Core(CoreError::Io(_)) => 3,
            Failure::Core(_) => 1,
            Failure::Io(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Io(m) => write!(f, "{m}"),
            Failure::Dsl(e) => write!(f, "{e}"),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Failure {
        Failure::Core(e)
    }
}

impl From<DslError> for Failure {
    fn from(e: DslError) -> Failure {
        Failure::Dsl(e)
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(f) = dispatch(cli) {
        eprintln!("error: {f}");
        std::process::exit(f.exit_code());
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Run(a) => cmd_run(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Coeffs(a) => cmd_coeffs(a),
        Cmd::Demo(a) => cmd_demo(a),
    }
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let loaded = runner::load(&args.protocol)?;
    let params = runner::resolve_params(args.params.as_deref(), loaded.base_params)?;
    let grid = runner::resolve_grid(&loaded.protocol, loaded.base_grid, &args.grid);
    runner::run_to_dir(
        &loaded.protocol,
        &params,
        grid,
        args.snapshot_every,
        &args.out,
    )
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    let loaded = runner::load(&args.protocol)?;
    let params = runner::resolve_params(args.params.as_deref(), loaded.base_params)?;
    let grid = runner::resolve_grid(&loaded.protocol, loaded.base_grid, &args.grid);
    let period = fit_period(&loaded.protocol, args.fit_period.as_deref())?;
    runner::sweep_to_dir(
        &loaded.protocol,
        &params,
        grid,
        args.parallel,
        period,
        &args.out,
    )
}

/// Fit period: explicit flag wins; angle sweeps default to 2pi; anything
/// else (detunings, times, amplitudes) has no universal period, so no fit.
fn fit_period(
    protocol: &swp_core::protocol::Protocol,
    flag: Option<&str>,
) -> Result<Option<f64>, Failure> {
    if let Some(s) = flag {
        let v = dsl::parse_scalar(s).map_err(|m| Failure::Usage(format!("--fit-period: {m}")))?;
        if !(v > 0.0) {
            return Err(Failure::Usage(format!(
                "--fit-period must be positive, got {v}"
            )));
        }
        return Ok(Some(v));
    }
    let angular = protocol
        .sweep
        .as_ref()
        .is_some_and(|sw| sw.path.ends_with(".zeta") || sw.path.ends_with(".phase"));
    Ok(angular.then_some(std::f64::consts::TAU))
}

fn cmd_solve(args: SolveArgs) -> Result<(), Failure> {
    let shape = parse_shape(&args.shape)?;
    let cond = SolveCondition::from_name(&args.condition).ok_or_else(|| {
        Failure::Usage(format!(
            "unknown condition '{}'; expected zero_c0, equal_012 or square_antisym",
            args.condition
        ))
    })?;
    let sol = solve_equal_orders(shape, cond)?;
    let pi = std::f64::consts::PI;
    let doc = serde_json::json!({
        "shape": shape.name(),
        "condition": cond.name(),
        "amplitude_rad": sol.amplitude,
        "amplitude_pi": sol.amplitude / pi,
        "zeta_rad": sol.zeta,
        "zeta_pi": sol.zeta.map(|z| z / pi),
        "common_magnitude": sol.common_magnitude,
        "residual": sol.residual,
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
    Ok(())
}

fn cmd_coeffs(args: CoeffsArgs) -> Result<(), Failure> {
    let shape = parse_shape(&args.shape)?;
    let a = dsl::parse_scalar(&args.a).map_err(|m| Failure::Usage(format!("--a: {m}")))?;
    let zeta =
        dsl::parse_scalar(&args.zeta).map_err(|m| Failure::Usage(format!("--zeta: {m}")))?;
    if a < 0.0 {
        return Err(Failure::Usage(format!("amplitude must be >= 0, got {a}")));
    }
    println!("n,re,im,abs");
    let n = args.orders as i32;
    for order in -n..=n {
        let c = fourier_coeff(shape, a, zeta, order);
        println!("{order},{},{},{}", c.re, c.im, c.norm());
    }
    Ok(())
}

fn parse_shape(name: &str) -> Result<GratingShape, Failure> {
    GratingShape::from_name(name).ok_or_else(|| {
        Failure::Usage(format!(
            "unknown shape '{name}'; expected tri, saw, sawr, square or sine"
        ))
    })
}

fn cmd_demo(args: DemoArgs) -> Result<(), Failure> {
    let Some(name) = args.name.as_deref() else {
        for n in BUILTIN_NAMES {
            println!("{n}");
        }
        return Ok(());
    };
    let protocol = builtin(name).map_err(|_| {
        Failure::Usage(format!(
            "unknown demo '{name}'; one of: {}",
            BUILTIN_NAMES.join(", ")
        ))
    })?;
    if let Some(path) = &args.write_swp {
        let text = dsl::serialize(&protocol);
        std::fs::write(path, text)
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        return Ok(());
    }
    let params = runner::resolve_params(args.params.as_deref(), None)?;
    let grid = runner::resolve_grid(&protocol, None, &args.grid);
    if protocol.sweep.is_some() {
        let period = fit_period(&protocol, args.fit_period.as_deref())?;
        runner::sweep_to_dir(&protocol, &params, grid, args.parallel, period, &args.out)
    } else {
        runner::run_to_dir(&protocol, &params, grid, args.snapshot_every, &args.out)
    }
}
