use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use shishkin_rd::analysis::{default_epsilons, run_sweep, SweepConfig};
use shishkin_rd::config::{builtin_example_config, load_config, MeshConfig, RunConfig, SweepBlock};
use shishkin_rd::mesh::{build_space_mesh, build_time_mesh};
use shishkin_rd::problem::validate_problem;
use shishkin_rd::solver::{discrete_x_derivative, march};
use shishkin_rd::Error;

#[derive(Parser)]
#[command(
    name = "shishkin-rd",
    about = "Fitted-mesh solver and two-mesh convergence harness for singularly \
             perturbed parabolic reaction-diffusion problems with Robin boundary conditions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and write the solution (or its x-derivative) as CSV
    Solve(SolveArgs),
    /// Run a two-mesh sweep and print the convergence table
    Table(TableArgs),
    /// Validate a problem's positivity and corner compatibility
    Validate(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Use the built-in example problem instead of a config file
    #[arg(long)]
    builtin_example: bool,
    /// Override the perturbation parameter (accepts `2^-14` style)
    #[arg(long, value_parser = parse_real)]
    epsilon: Option<f64>,
    /// Abort (exit 1) instead of warning on corner-compatibility violation
    #[arg(long)]
    strict_compat: bool,
    /// Worker threads for sweeps (default: available parallelism)
    #[arg(long, value_name = "K")]
    jobs: Option<usize>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Space intervals (divisible by 4)
    #[arg(long = "N")]
    n: Option<usize>,
    /// Time intervals
    #[arg(long = "M")]
    m: Option<usize>,
    /// What to write: the solution grid or its discrete x-derivative
    #[arg(long, default_value = "solution", value_parser = ["solution", "derivative"])]
    what: String,
    /// Output format
    #[arg(long, default_value = "csv", value_parser = ["text", "csv"])]
    format: String,
    /// Output path (default: stdout)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which mesh direction to refine
    #[arg(long, value_parser = ["time", "space", "both"])]
    axis: Option<String>,
    /// Space intervals held fixed on the time axis
    #[arg(long = "fixed-N")]
    fixed_n: Option<usize>,
    /// Time intervals held fixed on the space axis
    #[arg(long = "fixed-M")]
    fixed_m: Option<usize>,
    /// Comma-separated refinement values, each double the previous
    #[arg(long, value_delimiter = ',')]
    refine: Option<Vec<usize>>,
    /// Comma-separated epsilon values (accepts `2^-6` style)
    #[arg(long, value_delimiter = ',', value_parser = parse_real)]
    epsilons: Option<Vec<f64>>,
    /// Output format
    #[arg(long, default_value = "text", value_parser = ["text", "csv"])]
    format: String,
    /// Output path (default: stdout)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

/// Accept plain floats and `base^exponent` powers like `2^-14`.
fn parse_real(s: &str) -> Result<f64, String> {
    if let Some((base, exp)) = s.split_once('^') {
        let base: f64 = base.trim().parse().map_err(|e| format!("bad base: {e}"))?;
        let exp: f64 = exp.trim().parse().map_err(|e| format!("bad exponent: {e}"))?;
        Ok(base.powf(exp))
    } else {
        s.trim().parse().map_err(|e| format!("bad number: {e}"))
    }
}

enum CliError {
    /// Exit 1: configuration or usage problem.
    Config(String),
    /// Exit 2: numeric failure.
    Numeric(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        match e {
            Error::Config(_) | Error::BadArgument(_) | Error::Parse(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numeric(other.to_string()),
        }
    }
}

fn load(common: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut cfg = if common.builtin_example {
        builtin_example_config()
    } else {
        let path = common.config.as_ref().ok_or_else(|| {
            CliError::Config("either --config PATH or --builtin-example is required".into())
        })?;
        load_config(path)?
    };
    if let Some(eps) = common.epsilon {
        cfg.problem.epsilon = eps;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn init_jobs(common: &CommonArgs) -> Result<(), CliError> {
    #[cfg(feature = "parallel")]
    if let Some(jobs) = common.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(format!("--jobs: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    if common.jobs.is_some() {
        eprintln!("warning: built without the `parallel` feature; --jobs ignored");
    }
    Ok(())
}

fn check_compat(cfg: &RunConfig, strict: bool) -> Result<(), CliError> {
    let p = cfg.build_problem()?;
    let report = validate_problem(&p, 32)?;
    if !report.positivity_ok {
        return Err(CliError::Config(format!(
            "positivity violated: min sampled a = {} at (x={}, t={}) is not above alpha = {}",
            report.min_sampled_a, report.min_location.0, report.min_location.1, p.alpha
        )));
    }
    let (rl, rr) = report.compatibility_residuals;
    if rl.abs() > 1e-6 || rr.abs() > 1e-6 {
        let msg = format!(
            "corner compatibility violated: residuals ({rl:.3e}, {rr:.3e}); \
             the regularity theory behind the error bound may not apply"
        );
        if strict {
            return Err(CliError::Config(msg));
        }
        eprintln!("warning: {msg}");
    }
    Ok(())
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = File::create(p)
                .map_err(|e| CliError::Config(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let cfg = load(&args.common)?;
    init_jobs(&args.common)?;
    let mesh = cfg
        .mesh
        .clone()
        .or(Some(MeshConfig { n: 64, m: 64 }))
        .unwrap();
    let n = args.n.unwrap_or(mesh.n);
    let m = args.m.unwrap_or(mesh.m);
    if n % 4 != 0 || n < 8 {
        return Err(CliError::Config(format!(
            "N must be divisible by 4 and >= 8, got {n}"
        )));
    }
    check_compat(&cfg, args.common.strict_compat)?;
    let p = cfg.build_problem()?;
    let sm = build_space_mesh(p.epsilon, p.alpha, n)?;
    let tm = build_time_mesh(p.t_final, m)?;
    let sol = march(&p, &sm, &tm)?;
    let mut out = open_out(&args.out)?;
    match args.what.as_str() {
        "derivative" => {
            let deriv = discrete_x_derivative(&sol);
            sol.write_derivative_csv(&mut out, &deriv)?;
        }
        _ => sol.write_csv(&mut out)?,
    }
    out.flush().map_err(|e| CliError::Numeric(e.to_string()))?;
    Ok(())
}

fn cmd_table(args: &TableArgs) -> Result<(), CliError> {
    let mut cfg = load(&args.common)?;
    init_jobs(&args.common)?;
    // CLI flags override or stand in for the config's sweep block.
    let mut sweep = cfg.sweep.clone().unwrap_or(SweepBlock {
        axis: "time".into(),
        fixed_n: None,
        fixed_m: None,
        refine_values: vec![],
        epsilons: None,
    });
    if let Some(axis) = &args.axis {
        sweep.axis = axis.clone();
    }
    if let Some(n) = args.fixed_n {
        sweep.fixed_n = Some(n);
    }
    if let Some(m) = args.fixed_m {
        sweep.fixed_m = Some(m);
    }
    if let Some(refine) = &args.refine {
        sweep.refine_values = refine.clone();
    }
    if let Some(eps) = &args.epsilons {
        sweep.epsilons = Some(eps.clone());
    }
    if sweep.refine_values.is_empty() {
        return Err(CliError::Config(
            "no refinement values: pass --refine or a sweep block in the config".into(),
        ));
    }
    if sweep.epsilons.is_none() {
        sweep.epsilons = Some(default_epsilons());
    }
    cfg.sweep = Some(sweep);
    check_compat(&cfg, args.common.strict_compat)?;
    let sweep_cfg: SweepConfig = cfg.build_sweep()?;
    let report = run_sweep(&sweep_cfg)?;
    let mut out = open_out(&args.out)?;
    match args.format.as_str() {
        "csv" => report.write_csv(&mut out)?,
        _ => out
            .write_all(report.format_table().as_bytes())
            .map_err(|e| CliError::Numeric(e.to_string()))?,
    }
    out.flush().map_err(|e| CliError::Numeric(e.to_string()))?;
    Ok(())
}

fn cmd_validate(common: &CommonArgs) -> Result<(), CliError> {
    let cfg = load(common)?;
    let p = cfg.build_problem()?;
    let report = validate_problem(&p, 32)?;
    println!(
        "positivity: {} (min sampled a = {:.6} at x={:.4}, t={:.4}; alpha = {})",
        if report.positivity_ok { "ok" } else { "VIOLATED" },
        report.min_sampled_a,
        report.min_location.0,
        report.min_location.1,
        p.alpha
    );
    let (rl, rr) = report.compatibility_residuals;
    println!("corner compatibility residuals: left = {rl:.6e}, right = {rr:.6e}");
    if !report.positivity_ok {
        return Err(CliError::Config("positivity condition violated".into()));
    }
    if common.strict_compat && (rl.abs() > 1e-6 || rr.abs() > 1e-6) {
        return Err(CliError::Config("corner compatibility violated".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Table(args) => cmd_table(args),
        Command::Validate(common) => cmd_validate(common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
