//! Command-line front end: computes bounds, runs simulations and
//! experiments, and writes the reference tables as CSV.

mod tables;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use madqueue::ambiguity::{AmbiguitySet, QueueSpec};
use madqueue::classical::{chen_whitt, daley, kingman, mad_bracket_bound, Horizon, MomentSpec};
use madqueue::error::Error;
use madqueue::estimate::{build_ambiguity, RangeMode, SampleSet};
use madqueue::extremal::{best_case_two_point, worst_case_three_point};
use madqueue::lattice_oracle::cross_check;
use madqueue::simulate::{
    simulate_lindley_steady, simulate_lindley_transient, simulate_max, ExpSampler, SimConfig,
    SimEstimate,
};
use madqueue::steady_state::{
    cumulant_lower, cumulant_upper, gg1_cumulant_lower, gg1_cumulant_upper, ContourConfig,
};
use madqueue::transient::{gg1_transient_upper, lower_bound_spitzer, upper_bound_spitzer};

#[derive(Parser)]
#[command(name = "madqueue", about = "Tight queueing bounds from support, mean, and MAD")]
struct Cli {
    /// Worker threads (falls back to MADQUEUE_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Decimal places in printed numbers and CSV cells.
    #[arg(long, global = true, default_value_t = 5)]
    precision: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a single bound.
    Bound(BoundArgs),
    /// Regenerate a reference table as CSV.
    Table(TableArgs),
    /// Monte-Carlo estimates of walk maxima and waiting times.
    Simulate(SimulateArgs),
    /// Fit ambiguity sets from sample files and bound the waiting time.
    Estimate(EstimateArgs),
    /// Compare the contour integral against the lattice oracle.
    Crosscheck(CrosscheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundMode {
    RwUpper,
    RwLower,
    Gg1Upper,
    Gg1Lower,
    Kingman,
    Daley,
    ChenWhitt,
    Bracket,
}

#[derive(Args)]
struct BoundArgs {
    mode: BoundMode,
    /// Interarrival ambiguity set as JSON, e.g. '{"a":0,"b":10,"mu":1,"d":1}'.
    #[arg(long)]
    arrival: Option<String>,
    /// Service ambiguity set as JSON.
    #[arg(long)]
    service: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    #[arg(long)]
    mad: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Standard deviation for the bracket mode.
    #[arg(long)]
    sigma: Option<f64>,
    /// Transient horizon; omit (or pass --steady) for the steady state.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    steady: bool,
    /// Cumulant order for steady-state bounds.
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long)]
    offset_fraction: Option<f64>,
    #[arg(long)]
    tail_tol: Option<f64>,
    #[arg(long)]
    quad_tol: Option<f64>,
    #[arg(long)]
    max_height: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableId {
    /// Range-rule bounds for the M/M/1 increment.
    #[value(name = "trunc")]
    Trunc,
    /// Scaled GI/G/1 bound comparison on the main parameter grid.
    #[value(name = "gg1_main")]
    Gg1Main,
    /// Accuracy of bounds estimated from samples.
    #[value(name = "mape")]
    Mape,
    /// Unscaled variant of the main grid.
    #[value(name = "ec_unscaled")]
    EcUnscaled,
    /// Grid driven by squared coefficients of variation.
    #[value(name = "ec_cov_grid")]
    EcCovGrid,
}

#[derive(Args)]
struct TableArgs {
    table_id: TableId,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Sample paths per cell (mape only).
    #[arg(long, default_value_t = 100)]
    paths: usize,
    /// Comma-separated sample sizes (mape only).
    #[arg(long, default_value = "150,500,2000,10000")]
    sizes: String,
    /// Upper end of the uniform service range (mape only; arrivals are U(0,10)).
    #[arg(long, default_value_t = 5.0)]
    service_max: f64,
    /// Squared coefficient of variation of U (ec_cov_grid only).
    #[arg(long, default_value_t = 0.5)]
    cu2: f64,
    /// Squared coefficient of variation of V (ec_cov_grid only).
    #[arg(long, default_value_t = 0.5)]
    cv2: f64,
    /// Report (1-rho) E[W] / rho instead of E[W] (ec_cov_grid only).
    #[arg(long)]
    scaled: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(subcommand)]
    system: SimSystem,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true)]
    replications: Option<usize>,
    #[arg(long, global = true)]
    horizon: Option<usize>,
    #[arg(long, global = true)]
    batch_count: Option<usize>,
}

#[derive(Subcommand)]
enum SimSystem {
    /// M/M/1 queue with unit-rate arrivals: steady-state E[W], or E[W_n]
    /// with --transient.
    Mm1 {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        transient: Option<usize>,
    },
    /// E[M_n] of the walk driven by the worst-case three-point law.
    Walk {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long)]
        mad: f64,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    arrivals: PathBuf,
    #[arg(long)]
    services: PathBuf,
    /// Column name when the sample files are CSV.
    #[arg(long)]
    column: Option<String>,
    /// Explicit range "a,b" for both streams.
    #[arg(long)]
    range: Option<String>,
    #[arg(long)]
    arrival_range: Option<String>,
    #[arg(long)]
    service_range: Option<String>,
    /// Range rule constant; uses mean +- k MAD instead of observed min/max.
    #[arg(long)]
    k: Option<f64>,
}

#[derive(Args)]
struct CrosscheckArgs {
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, allow_negative_numbers = true)]
    mu: f64,
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
    #[arg(long)]
    mad: f64,
    #[arg(long, default_value_t = 1)]
    m: u32,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("MADQUEUE_THREADS").ok().and_then(|s| s.parse().ok())
    });
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().ok();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (class, code) = match e {
                Error::QuadratureFailure(_) | Error::RootCountMismatch { .. } => ("numerical", 3),
                Error::Io(_) => ("io", 4),
                _ => ("validation", 2),
            };
            eprintln!("ERROR {class}: {e}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Bound(args) => cmd_bound(args, cli.precision),
        Command::Table(args) => cmd_table(args, cli.precision),
        Command::Simulate(args) => cmd_simulate(args, cli.precision),
        Command::Estimate(args) => cmd_estimate(args, cli.precision),
        Command::Crosscheck(args) => cmd_crosscheck(args),
    }
}

fn parse_set(json: &Option<String>, flag: &str) -> Result<AmbiguitySet, Error> {
    let text = json
        .as_ref()
        .ok_or_else(|| Error::BadParameter(format!("--{flag} is required for this mode")))?;
    let set: AmbiguitySet = serde_json::from_str(text)
        .map_err(|e| Error::BadParameter(format!("--{flag}: {e}")))?;
    set.validated()
}

fn inline_set(args: &BoundArgs) -> Result<AmbiguitySet, Error> {
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| Error::BadParameter(format!("--{name} is required for this mode")))
    };
    let a = need(args.a, "a")?;
    let b = need(args.b, "b")?;
    let mu = need(args.mu, "mu")?;
    let d = need(args.mad, "mad")?;
    match args.beta {
        Some(beta) => AmbiguitySet::with_beta(a, mu, b, d, beta),
        None => AmbiguitySet::new(a, mu, b, d),
    }
}

fn contour_config(args: &BoundArgs) -> Result<ContourConfig, Error> {
    let mut cfg = ContourConfig::default();
    if let Some(v) = args.offset_fraction {
        cfg.offset_fraction = v;
    }
    if let Some(v) = args.tail_tol {
        cfg.tail_tol = v;
    }
    if let Some(v) = args.quad_tol {
        cfg.quad_tol = v;
    }
    if let Some(v) = args.max_height {
        cfg.max_height = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn contour_provenance(cfg: &ContourConfig) -> String {
    format!(
        "# contour: offset_fraction={} tail_tol={:e} quad_tol={:e} max_height={:e}",
        cfg.offset_fraction, cfg.tail_tol, cfg.quad_tol, cfg.max_height
    )
}

fn queue_spec(args: &BoundArgs) -> Result<QueueSpec, Error> {
    QueueSpec::new(parse_set(&args.arrival, "arrival")?, parse_set(&args.service, "service")?)
}

fn cmd_bound(args: &BoundArgs, precision: usize) -> Result<(), Error> {
    let cfg = contour_config(args)?;
    let steady = args.steady || args.n.is_none();
    let horizon_note = match args.n {
        Some(n) if !args.steady => format!("transient n={n}"),
        _ => format!("steady m={}", args.m),
    };
    let (label, values): (&str, Vec<f64>) = match args.mode {
        BoundMode::RwUpper => {
            let set = inline_set(args)?;
            let v = if steady {
                cumulant_upper(&set, args.m, &cfg)?.value
            } else {
                upper_bound_spitzer(&worst_case_three_point(&set)?, args.n.unwrap())?
            };
            ("rw-upper", vec![v])
        }
        BoundMode::RwLower => {
            let set = inline_set(args)?;
            let v = if steady {
                cumulant_lower(&set, args.m, &cfg)?.value
            } else {
                lower_bound_spitzer(&best_case_two_point(&set)?, args.n.unwrap())?
            };
            ("rw-lower", vec![v])
        }
        BoundMode::Gg1Upper => {
            let spec = queue_spec(args)?;
            let v = if steady {
                gg1_cumulant_upper(&spec, args.m, &cfg)?.value
            } else {
                gg1_transient_upper(&spec, args.n.unwrap())?
            };
            ("gg1-upper", vec![v])
        }
        BoundMode::Gg1Lower => {
            if !steady {
                return Err(Error::BadParameter(
                    "gg1-lower is a steady-state bound; drop --n".into(),
                ));
            }
            ("gg1-lower", vec![gg1_cumulant_lower(&queue_spec(args)?, args.m, &cfg)?.value])
        }
        BoundMode::Kingman => {
            let spec = queue_spec(args)?;
            ("kingman", vec![kingman(&MomentSpec::from_ambiguity(&spec.arrival, &spec.service)?)?])
        }
        BoundMode::Daley => {
            let spec = queue_spec(args)?;
            ("daley", vec![daley(&MomentSpec::from_ambiguity(&spec.arrival, &spec.service)?)?])
        }
        BoundMode::ChenWhitt => {
            let spec = queue_spec(args)?;
            (
                "chen-whitt",
                vec![chen_whitt(&MomentSpec::from_ambiguity(&spec.arrival, &spec.service)?)?],
            )
        }
        BoundMode::Bracket => {
            let need = |v: Option<f64>, name: &str| {
                v.ok_or_else(|| Error::BadParameter(format!("--{name} is required for bracket")))
            };
            let horizon = match args.n {
                Some(n) if !args.steady => Horizon::Transient(n),
                _ => Horizon::Steady,
            };
            let (lo, hi) = mad_bracket_bound(
                need(args.mu, "mu")?,
                need(args.sigma, "sigma")?,
                need(args.a, "a")?,
                need(args.b, "b")?,
                horizon,
                args.m,
            )?;
            ("bracket", vec![lo, hi])
        }
    };
    println!("# bound: {label} ({horizon_note})");
    println!("{}", contour_provenance(&cfg));
    if let Some(json) = &args.arrival {
        println!("# arrival: {json}");
    }
    if let Some(json) = &args.service {
        println!("# service: {json}");
    }
    let formatted: Vec<String> =
        values.iter().map(|v| format!("{v:.precision$}")).collect();
    println!("{}", formatted.join(","));
    Ok(())
}

fn cmd_table(args: &TableArgs, precision: usize) -> Result<(), Error> {
    let csv = match args.table_id {
        TableId::Trunc => tables::trunc_table(precision)?,
        TableId::Gg1Main => tables::main_grid_table(None, true, precision)?,
        TableId::EcUnscaled => tables::main_grid_table(None, false, precision)?,
        TableId::EcCovGrid => {
            tables::main_grid_table(Some((args.cu2, args.cv2)), args.scaled, precision)?
        }
        TableId::Mape => {
            let sizes: Result<Vec<usize>, _> =
                args.sizes.split(',').map(|s| s.trim().parse::<usize>()).collect();
            let sizes =
                sizes.map_err(|e| Error::BadParameter(format!("--sizes: {e}")))?;
            tables::mape_table(&sizes, args.paths, args.seed, args.service_max, precision)?
        }
    };
    std::fs::write(&args.output, csv)
        .map_err(|e| Error::Io(format!("{}: {e}", args.output.display())))?;
    println!("wrote {}", args.output.display());
    Ok(())
}

fn print_estimate(label: &str, est: &SimEstimate, precision: usize) {
    println!(
        "{label}: mean={:.p$} std_error={:.p$} replications={}",
        est.mean,
        est.std_error,
        est.replications_used,
        p = precision
    );
}

fn cmd_simulate(args: &SimulateArgs, precision: usize) -> Result<(), Error> {
    let mut cfg = SimConfig { seed: args.seed, ..SimConfig::default() };
    if let Some(r) = args.replications {
        cfg.replications = r;
    }
    if let Some(h) = args.horizon {
        cfg.horizon = h;
    }
    if let Some(b) = args.batch_count {
        cfg.batch_count = b;
    }
    println!(
        "# sim: replications={} horizon={} seed={} batch_count={}",
        cfg.replications, cfg.horizon, cfg.seed, cfg.batch_count
    );
    match &args.system {
        SimSystem::Mm1 { rho, transient } => {
            let arrival = ExpSampler { mean: 1.0 };
            let service = ExpSampler { mean: *rho };
            let est = match transient {
                Some(n) => simulate_lindley_transient(&arrival, &service, *n, &cfg)?,
                None => simulate_lindley_steady(&arrival, &service, *rho, &cfg)?,
            };
            print_estimate("mm1", &est, precision);
        }
        SimSystem::Walk { a, b, mu, mad, n } => {
            let set = AmbiguitySet::new(*a, *mu, *b, *mad)?;
            let dist = worst_case_three_point(&set)?;
            let est = simulate_max(&dist, *n, &cfg)?;
            print_estimate("walk", &est, precision);
        }
    }
    Ok(())
}

fn parse_range(text: &str, flag: &str) -> Result<RangeMode, Error> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::BadParameter(format!("--{flag} expects \"a,b\", got {text:?}")));
    }
    let a: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|e| Error::BadParameter(format!("--{flag}: {e}")))?;
    let b: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|e| Error::BadParameter(format!("--{flag}: {e}")))?;
    Ok(RangeMode::Explicit(a, b))
}

fn cmd_estimate(args: &EstimateArgs, precision: usize) -> Result<(), Error> {
    let load = |path: &PathBuf| -> Result<SampleSet, Error> {
        match &args.column {
            Some(col) => SampleSet::from_csv(path, col),
            None => SampleSet::from_file(path),
        }
    };
    let mode_for = |specific: &Option<String>, flag: &str| -> Result<RangeMode, Error> {
        if let Some(text) = specific {
            return parse_range(text, flag);
        }
        if let Some(text) = &args.range {
            return parse_range(text, "range");
        }
        match args.k {
            Some(k) => Ok(RangeMode::RuleK(k)),
            None => Ok(RangeMode::ObservedMinMax),
        }
    };
    let arrivals = load(&args.arrivals)?;
    let services = load(&args.services)?;
    let arrival = build_ambiguity(&arrivals, mode_for(&args.arrival_range, "arrival-range")?)?;
    let service = build_ambiguity(&services, mode_for(&args.service_range, "service-range")?)?;
    let spec = QueueSpec::new(arrival, service)?;
    let cfg = ContourConfig::default();
    let upper = gg1_cumulant_upper(&spec, 1, &cfg)?.value;
    let lower = gg1_cumulant_lower(&spec, 1, &cfg)?.value;
    println!("{}", contour_provenance(&cfg));
    let report = serde_json::json!({
        "arrival": spec.arrival,
        "service": spec.service,
        "lower": format!("{lower:.precision$}"),
        "upper": format!("{upper:.precision$}"),
    });
    println!("{report}");
    Ok(())
}

fn cmd_crosscheck(args: &CrosscheckArgs) -> Result<(), Error> {
    let check = cross_check(args.a, args.mu, args.b, args.mad, args.m)?;
    println!(
        "oracle={:.12} contour={:.12} abs_diff={:.3e}",
        check.oracle, check.contour, check.abs_diff
    );
    Ok(())
}
