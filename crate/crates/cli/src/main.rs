//! `swipt`: robust secure beamforming designs from the command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use swipt_core::harness::{
    parse_values, realization_channels, run_cdf, run_sweep, summarize, write_csv, Axis, DesignFile, RunOptions,
};
use swipt_core::search::{solve_design, Formulation, GridSpec, SolveOptions, DEFAULT_CANDIDATES};
use swipt_core::validation::{validate, DEFAULT_SAMPLES};
use swipt_core::{DesignStatus, ErrorModel, ProblemKind, Scenario};

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

#[derive(Parser)]
#[command(name = "swipt", version, about = "Robust secure beamforming for cognitive SWIPT networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and write the design as JSON.
    Solve(SolveArgs),
    /// Validate a saved design against its error model.
    Validate(ValidateArgs),
    /// Sweep one scenario quantity over seeded realizations.
    Sweep(SweepArgs),
    /// Per-realization minimum power of perfect-CSI, bounded and outage designs.
    Cdf(CdfArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    PowerMin,
    MaxminEh,
}

impl From<ProblemArg> for ProblemKind {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::PowerMin => ProblemKind::PowerMin,
            ProblemArg::MaxminEh => ProblemKind::MaxminEh,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Bounded,
    Outage,
}

impl From<ModelArg> for ErrorModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Bounded => ErrorModel::Bounded,
            ModelArg::Outage => ErrorModel::Outage,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Rmin,
    Ehrs,
    Antennas,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::Rmin => Axis::RMin,
            AxisArg::Ehrs => Axis::Ehrs,
            AxisArg::Antennas => Axis::Antennas,
        }
    }
}

/// Search and validation knobs shared by the batch commands.
#[derive(Args)]
struct Common {
    /// Base seed; defaults to the scenario's `rng_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Outer search grid: `uniform:<step>` or `log:<n>`.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<GridSpec>,
    /// Gaussian randomization candidates when W is not rank one.
    #[arg(long, default_value_t = DEFAULT_CANDIDATES)]
    candidates: usize,
    /// Validation draws per constraint.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Record wall time per design in `solve_ms` (output stops being reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, value_enum)]
    problem: ProblemArg,
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long, value_parser = parse_grid)]
    grid: Option<GridSpec>,
    /// Channel seed; defaults to the scenario's `rng_seed`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_CANDIDATES)]
    candidates: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the per-grid-point search trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    design: PathBuf,
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, value_enum)]
    axis: AxisArg,
    /// `a:b:step`, inclusive.
    #[arg(long)]
    values: String,
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    problem: Vec<ProblemArg>,
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    model: Vec<ModelArg>,
    #[arg(long, default_value_t = 100)]
    realizations: usize,
    #[arg(long)]
    out: PathBuf,
    /// Per-value means and infeasible counts; defaults to `<out>.summary.csv`.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CdfArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value_t = 100)]
    realizations: usize,
    #[arg(long, value_enum, default_value = "power-min")]
    problem: ProblemArg,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    common: Common,
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    s.parse().map_err(|e: swipt_core::Error| e.to_string())
}

fn load_scenario(path: &Path) -> anyhow::Result<Scenario> {
    Scenario::load(path).with_context(|| format!("loading scenario {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run_options(common: &Common, sc: &Scenario, realizations: usize) -> RunOptions {
    RunOptions {
        realizations,
        seed: common.seed.unwrap_or(sc.rng_seed),
        samples: common.samples,
        grid: common.grid,
        candidates: common.candidates,
        timing: common.timing,
    }
}

fn status_code(status: DesignStatus) -> u8 {
    match status {
        DesignStatus::Optimal => 0,
        DesignStatus::Infeasible => EXIT_INFEASIBLE,
        DesignStatus::NumericalFailure => EXIT_NUMERICAL,
    }
}

fn solve(args: SolveArgs) -> anyhow::Result<u8> {
    let sc = load_scenario(&args.scenario)?;
    let seed = args.seed.unwrap_or(sc.rng_seed);
    let channels = realization_channels(&sc, sc.n_ehr, seed, 0);
    let f = Formulation::new(args.problem.into(), args.model.into(), &sc, &channels)?;
    let mut opts = SolveOptions {
        plan: None,
        candidates: args.candidates,
        seed,
    };
    if let Some(g) = args.grid {
        opts.plan = Some(f.default_plan()?.with_grid(g));
    }
    let (design, trace) = solve_design(&f, &opts)?;
    if let Some(path) = &args.trace {
        let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_csv(file, &trace)?;
    }
    eprintln!(
        "{} {} {}: objective {} W, search parameter {}",
        design.problem.as_str(),
        design.model.as_str(),
        design.status.as_str(),
        design.objective,
        design.search_param
    );
    if design.status == DesignStatus::Optimal {
        let bundle = DesignFile {
            seed,
            channels,
            design,
            trace,
        };
        let json = bundle.to_json()?;
        match &args.out {
            Some(path) => write_text(path, &json)?,
            None => println!("{json}"),
        }
        return Ok(0);
    }
    Ok(status_code(design.status))
}

fn validate_cmd(args: ValidateArgs) -> anyhow::Result<u8> {
    let sc = load_scenario(&args.scenario)?;
    let text = fs::read_to_string(&args.design).with_context(|| format!("reading {}", args.design.display()))?;
    let bundle = DesignFile::from_json(&text)?;
    let report = validate(&bundle.design, &sc, &bundle.channels, args.samples, args.seed)?;
    let json = report.to_json()?;
    match &args.out {
        Some(path) => write_text(path, &json)?,
        None => println!("{json}"),
    }
    for c in report.failures() {
        eprintln!("failed: {}", c.name);
    }
    Ok(if report.pass { 0 } else { EXIT_VALIDATION })
}

fn sweep(args: SweepArgs) -> anyhow::Result<u8> {
    let sc = load_scenario(&args.scenario)?;
    let values = parse_values(&args.values)?;
    let problems: Vec<ProblemKind> = args.problem.iter().map(|&p| p.into()).collect();
    let models: Vec<ErrorModel> = args.model.iter().map(|&m| m.into()).collect();
    if args.realizations == 0 {
        bail!("--realizations must be at least 1");
    }
    let opts = run_options(&args.common, &sc, args.realizations);
    let rows = run_sweep(&sc, args.axis.into(), &values, &problems, &models, &opts)?;
    let file = fs::File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_csv(file, &rows)?;
    let summary_path = args.summary.unwrap_or_else(|| args.out.with_extension("summary.csv"));
    let summary = summarize(&rows);
    let file = fs::File::create(&summary_path).with_context(|| format!("creating {}", summary_path.display()))?;
    write_csv(file, &summary)?;
    for s in &summary {
        eprintln!(
            "{} {} {}: {} feasible, {} infeasible, {} failed, mean {}",
            s.model,
            s.problem,
            s.axis_value,
            s.feasible,
            s.infeasible,
            s.failed,
            s.mean_objective_w.map_or("-".into(), |v| format!("{v:.6}"))
        );
    }
    let failed = rows.iter().filter(|r| r.validation_pass == Some(false)).count();
    if failed > 0 {
        eprintln!("{failed} optimal designs failed validation");
        return Ok(EXIT_VALIDATION);
    }
    Ok(0)
}

fn cdf(args: CdfArgs) -> anyhow::Result<u8> {
    let sc = load_scenario(&args.scenario)?;
    let opts = run_options(&args.common, &sc, args.realizations);
    let rows = run_cdf(&sc, args.problem.into(), &opts)?;
    let file = fs::File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_csv(file, &rows)?;
    let failed = rows.iter().filter(|r| r.validation_pass == Some(false)).count();
    if failed > 0 {
        eprintln!("{failed} optimal designs failed validation");
        return Ok(EXIT_VALIDATION);
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with 2 on usage errors, which would read as "infeasible".
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Validate(a) => validate_cmd(a),
        Command::Sweep(a) => sweep(a),
        Command::Cdf(a) => cdf(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
