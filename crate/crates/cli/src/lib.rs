//! Command-line front end: bound assembly, parameter optimization,
//! convergence-rate tables, simulation, smoothing estimates and the
//! validation suites.

use clap::{Args, Parser, Subcommand};
use smoothbound_core::bounds::{
    indicator_discrepancy_bound, levy_prokhorov_bound, optimize_bound,
    partial_sum_lipschitz_rate_params, partial_sum_rate_params, TracePhase,
};
use smoothbound_core::harness::{run_validate, ExperimentConfig, SmoothConfig, Suite};
use smoothbound_core::smoothing::{
    d2_covariance_estimate, derivative_estimate, McConfig, SmoothingParams,
};
use smoothbound_core::{Error, PiecewisePath};
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "smoothbound",
    about = "Gaussian-smoothing discrepancy bounds for cadlag processes: assembly, optimization, simulation and empirical certification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the discrepancy bounds at fixed parameters from a config.
    Bound(ConfigArgs),
    /// Minimize a bound over the configured search box.
    Optimize(ConfigArgs),
    /// Closed-form balanced parameters and exact rate exponents.
    Rates(RatesArgs),
    /// Sample paths from the configured model and write them as CSV.
    Simulate(SimulateArgs),
    /// Smoothing-operator value or derivative estimate from a config.
    Smooth(ConfigArgs),
    /// Run a validation suite and write its report.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Path to the JSON config ("-" reads stdin).
    #[arg(long)]
    config: String,
    /// Directory for JSON/CSV outputs (stdout always gets the JSON).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RatesArgs {
    /// Moment order (>= 3).
    #[arg(long)]
    p: f64,
    /// Horizon (>= 1).
    #[arg(long = "T", default_value_t = 1.0)]
    horizon: f64,
    /// Number of increments for the concrete parameter point.
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,
    /// Use the bounded-Lipschitz balancing instead of the indicator one.
    #[arg(long)]
    lipschitz: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: String,
    #[arg(long)]
    out: PathBuf,
    /// Number of paths to write.
    #[arg(long, default_value_t = 10)]
    count: u64,
    /// Which process to sample: the configured model ("x") or the Brownian
    /// target ("z").
    #[arg(long, default_value = "x")]
    target: String,
}

#[derive(Args)]
struct ValidateArgs {
    /// Suite: smoothing, tails, theorem or all.
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Multiplies every Monte-Carlo budget (floored at 100 samples).
    #[arg(long, default_value_t = 1.0)]
    budget_scale: f64,
    /// Worker threads for the run (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
}

/// Run the CLI; returns the process exit code (0 success, 1 validation
/// failure, 2 config/usage error).
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap reports --help and --version through the error path
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Bound(args) => cmd_bound(&args),
        Command::Optimize(args) => cmd_optimize(&args),
        Command::Rates(args) => cmd_rates(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Smooth(args) => cmd_smooth(&args),
        Command::Validate(args) => cmd_validate(&args),
    }
}

fn read_config_text(path: &str) -> Result<String, Error> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn write_out(dir: &Option<PathBuf>, name: &str, content: &str) -> Result<(), Error> {
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(name), content)?;
    }
    Ok(())
}

fn cmd_bound(args: &ConfigArgs) -> Result<i32, Error> {
    let cfg = ExperimentConfig::from_json(&read_config_text(&args.config)?)?;
    let params = cfg.params.ok_or_else(|| {
        Error::Config("the bound subcommand needs fixed parameters (\"params\")".into())
    })?;
    let (inputs, note) = cfg.theorem_inputs()?;
    let breakdown = indicator_discrepancy_bound(
        &inputs,
        params.epsilon,
        params.delta,
        params.theta,
        params.gamma,
    )?;
    let lp = levy_prokhorov_bound(
        &inputs,
        params.epsilon,
        params.delta,
        params.theta,
        params.gamma,
    )?;
    let out = serde_json::json!({
        "kappa_note": note,
        "breakdown": breakdown,
        "levy_prokhorov": lp,
    });
    let text = serde_json::to_string_pretty(&out)?;
    println!("{text}");
    write_out(&args.out, "breakdown.json", &text)?;
    Ok(0)
}

fn cmd_optimize(args: &ConfigArgs) -> Result<i32, Error> {
    let cfg = ExperimentConfig::from_json(&read_config_text(&args.config)?)?;
    let opt_cfg = cfg.optimize.clone().ok_or_else(|| {
        Error::Config("the optimize subcommand needs an \"optimize\" section".into())
    })?;
    let (inputs, note) = cfg.theorem_inputs()?;
    let result = optimize_bound(
        &inputs,
        opt_cfg.objective,
        &opt_cfg.search_box,
        &opt_cfg.budget,
    )?;
    let mut trace = String::from("phase,epsilon,delta,theta,gamma,objective\n");
    for t in &result.trace {
        let phase = match t.phase {
            TracePhase::WarmStart => "warm_start",
            TracePhase::Grid => "grid",
            TracePhase::Descent => "descent",
        };
        trace.push_str(&format!(
            "{phase},{},{},{},{},{}\n",
            t.epsilon,
            t.delta,
            t.theta,
            t.gamma,
            t.objective.map(|v| format!("{v}")).unwrap_or_default()
        ));
    }
    let out = serde_json::json!({
        "kappa_note": note,
        "optimized": result,
    });
    let text = serde_json::to_string_pretty(&out)?;
    println!("{text}");
    write_out(&args.out, "optimized.json", &text)?;
    write_out(&args.out, "trace.csv", &trace)?;
    Ok(0)
}

fn cmd_rates(args: &RatesArgs) -> Result<i32, Error> {
    let out = if args.lipschitz {
        let rp = partial_sum_lipschitz_rate_params(args.p, args.n)?;
        serde_json::to_string_pretty(&rp)?
    } else {
        let rp = partial_sum_rate_params(args.p, args.horizon, args.n)?;
        serde_json::to_string_pretty(&rp)?
    };
    println!("{out}");
    Ok(0)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<i32, Error> {
    let cfg = ExperimentConfig::from_json(&read_config_text(&args.config)?)?;
    std::fs::create_dir_all(&args.out)?;
    for i in 0..args.count {
        let path: PiecewisePath = match args.target.as_str() {
            "x" => smoothbound_core::harness::simulate_partial_sum(
                &cfg.model,
                cfg.horizon,
                cfg.seed,
                i,
            )?,
            "z" => {
                let bm = smoothbound_core::gaussian::BrownianMotion::uniform(
                    1,
                    cfg.horizon,
                    (512.0 * cfg.horizon) as usize,
                    cfg.seed,
                )?;
                bm.sample(i)
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown target {other:?} (expected \"x\" or \"z\")"
                )))
            }
        };
        let mut buf = Vec::new();
        path.write_csv(&mut buf)?;
        std::fs::write(args.out.join(format!("path_{i:04}.csv")), buf)?;
    }
    println!(
        "wrote {} {} paths to {}",
        args.count,
        args.target,
        args.out.display()
    );
    Ok(0)
}

fn cmd_smooth(args: &ConfigArgs) -> Result<i32, Error> {
    let cfg = SmoothConfig::from_json(&read_config_text(&args.config)?)?;
    let params = SmoothingParams::new(
        cfg.epsilon,
        cfg.delta,
        cfg.base_path.horizon(),
        cfg.base_path.dim(),
    )?;
    let mc = McConfig {
        samples: cfg.samples,
        seed: cfg.seed,
    };
    let dirs: Vec<&PiecewisePath> = cfg.directions.iter().collect();
    let estimate = if cfg.covariance_form {
        d2_covariance_estimate(
            &cfg.functional,
            &cfg.base_path,
            dirs[0],
            dirs[1],
            &params,
            &mc,
        )?
    } else {
        derivative_estimate(&cfg.functional, &cfg.base_path, &dirs, &params, &mc)?
    };
    let text = serde_json::to_string_pretty(&estimate)?;
    println!("{text}");
    write_out(&args.out, "estimate.json", &text)?;
    Ok(0)
}

fn cmd_validate(args: &ValidateArgs) -> Result<i32, Error> {
    let suite = Suite::from_str(&args.suite)?;
    let out: Option<&Path> = args.out.as_deref();
    let report = match args.workers {
        Some(workers) => smoothbound_core::rng::with_worker_pool(workers, || {
            run_validate(suite, args.seed, args.budget_scale, out)
        })??,
        None => run_validate(suite, args.seed, args.budget_scale, out)?,
    };
    println!("{}", report.to_json()?);
    if report.all_pass() {
        Ok(0)
    } else {
        eprintln!(
            "{} of {} rows failed",
            report.failed,
            report.failed + report.passed
        );
        Ok(1)
    }
}
