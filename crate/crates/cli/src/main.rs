use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use quantile_motion::experiment::{
    run_experiment, run_ingested, write_outputs, OutputFormat, Preset, RunConfig, RunOutput,
    Targets,
};
use quantile_motion::{
    compare, read_series_file, DensityTolerances, Error, Execution, Inversion, ModelKind,
    PhysicalConstants, SolverOptions, Trajectory, TwoSlitParams, WavefunctionModel,
};

const EXIT_FAILURE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_THRESHOLD: u8 = 3;

/// Quantile (conserved left probability) trajectories and Bohm cross-checks.
#[derive(Parser, Debug)]
#[command(name = "qmotion", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a preset experiment or a custom model and compare against Bohm trajectories.
    Simulate(SimulateArgs),
    /// Compare two trajectory CSV files (`t,x[,y]`).
    Compare(CompareArgs),
    /// Compute quantile trajectories for a density series file.
    Ingest(IngestArgs),
    /// Preset catalogue.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand, Debug)]
enum PresetAction {
    List,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Long,
    Split,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Long => OutputFormat::Long,
            Format::Split => OutputFormat::Split,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InversionArg {
    Quadratic,
    Linear,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Harmonic,
    HarmonicEigenstate,
    Free,
    TwoSlit,
    Well,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Conserved left probabilities, comma separated, sorted and distinct.
    #[arg(long, value_delimiter = ',', conflicts_with = "x0")]
    quantiles: Option<Vec<f64>>,
    /// Initial positions, comma separated; use `:` between axes (`0.1:0.4`).
    #[arg(long, value_delimiter = ',')]
    x0: Option<Vec<String>>,
    /// Output directory.
    #[arg(long, default_value = "qmotion-out")]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "long")]
    format: Format,
    #[arg(long, value_enum, default_value = "quadratic")]
    inversion: InversionArg,
    /// Evaluate without worker threads (output is identical).
    #[arg(long)]
    serial: bool,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// `harmonic`, `free`, `two-slit`, `well-2d` or `custom`.
    target: String,
    #[arg(long)]
    dx: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<f64>,
    /// Largest accepted quantile-vs-Bohm deviation.
    #[arg(long)]
    threshold: Option<f64>,
    /// RK4 steps per frame interval for the Bohm reference.
    #[arg(long)]
    bohm_substeps: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    custom: CustomModelArgs,
}

#[derive(Args, Debug)]
struct CustomModelArgs {
    /// Model for `custom`.
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long, default_value_t = 3.0)]
    omega: f64,
    /// Eigenstate level (0 or 1) for `harmonic-eigenstate`.
    #[arg(long, default_value_t = 0)]
    level: u8,
    /// Free Gaussian width parameter, psi ~ exp(-a x^2).
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    a: f64,
    /// Well width.
    #[arg(long, default_value_t = 1.0)]
    length: f64,
    #[arg(long, default_value_t = TwoSlitParams::default().slit_offset)]
    slit_offset: f64,
    #[arg(long, default_value_t = TwoSlitParams::default().slit_width)]
    slit_width: f64,
    /// Observation time of the two-slit model.
    #[arg(long, default_value_t = TwoSlitParams::default().t_max)]
    slit_t_max: f64,
    /// Number of identical separable axes.
    #[arg(long, default_value_t = 1)]
    dims: usize,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
}

#[derive(Args, Debug)]
struct CompareArgs {
    quantile: PathBuf,
    reference: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args, Debug)]
struct IngestArgs {
    density: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = DensityTolerances::default().mass)]
    mass_tolerance: f64,
    #[arg(long, default_value_t = DensityTolerances::default().boundary)]
    boundary_tolerance: f64,
}

enum Failure {
    Validation(anyhow::Error),
    Threshold(String),
    Other(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.into())
        } else {
            Failure::Other(e.into())
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Compare(args) => compare_files(args),
        Command::Ingest(args) => ingest(args),
        Command::Presets {
            action: PresetAction::List,
        } => {
            for p in Preset::ALL {
                println!("{:<10} {}", p.name(), p.description());
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Threshold(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(EXIT_THRESHOLD)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn solver_options(common: &CommonArgs) -> SolverOptions {
    let mut opts = SolverOptions::default();
    opts.cpf.inversion = match common.inversion {
        InversionArg::Quadratic => Inversion::Quadratic,
        InversionArg::Linear => Inversion::Linear,
    };
    if common.serial {
        opts.execution = Execution::Serial;
    }
    opts
}

fn targets(common: &CommonArgs) -> Result<Option<Targets>, Failure> {
    if let Some(ps) = &common.quantiles {
        return Ok(Some(Targets::Quantiles(ps.clone())));
    }
    let Some(points) = &common.x0 else {
        return Ok(None);
    };
    let parsed = points
        .iter()
        .map(|p| {
            p.split(':')
                .map(|c| c.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Error::Configuration(format!("x0: cannot parse `{p}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Some(Targets::Starts(parsed)))
}

fn custom_model(args: &CustomModelArgs) -> Result<WavefunctionModel, Error> {
    let model = args
        .model
        .ok_or_else(|| Error::Configuration("model: `custom` requires --model".into()))?;
    let kind = match model {
        ModelArg::Harmonic => ModelKind::HarmonicSuperposition { omega: args.omega },
        ModelArg::HarmonicEigenstate => ModelKind::HarmonicEigenstate {
            omega: args.omega,
            level: args.level,
        },
        ModelArg::Free => ModelKind::FreeGaussian { a: args.a },
        ModelArg::TwoSlit => ModelKind::TwoSlit(TwoSlitParams {
            slit_offset: args.slit_offset,
            slit_width: args.slit_width,
            t_max: args.slit_t_max,
        }),
        ModelArg::Well => ModelKind::SquareWellSuperposition {
            length: args.length,
        },
    };
    let constants = PhysicalConstants::new(args.hbar, args.mass)
        .map_err(|e| Error::Configuration(format!("constants: {e}")))?;
    WavefunctionModel::new(kind, constants).map_err(|e| Error::Configuration(format!("model: {e}")))
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let mut cfg: RunConfig = if args.target == "custom" {
        let model = custom_model(&args.custom)?;
        let quantiles = Targets::Quantiles((1..10).map(|i| i as f64 / 10.0).collect());
        RunConfig::from_model("custom", model, args.custom.dims, quantiles, 5e-2)
    } else {
        args.target.parse::<Preset>()?.config()
    };
    if let Some(v) = args.dx {
        cfg.dx = v;
    }
    if let Some(v) = args.dt {
        cfg.dt = v;
    }
    if let Some(v) = args.t_max {
        cfg.t_max = v;
    }
    if let Some(v) = args.x_min {
        cfg.x_min = v;
    }
    if let Some(v) = args.x_max {
        cfg.x_max = v;
    }
    if let Some(v) = args.threshold {
        cfg.threshold = v;
    }
    if let Some(v) = args.bohm_substeps {
        cfg.bohm_substeps = v;
    }
    if let Some(t) = targets(&args.common)? {
        cfg.targets = t;
    }
    cfg.solver = solver_options(&args.common);

    let out = run_experiment(&cfg)?;
    emit(&out, &args.common.output, args.common.format.into())?;
    let report = &out.report;
    let max_dev = report.max_deviation.unwrap_or(0.0);
    println!(
        "{}: {} trajectories, max |x_quantile - x_bohm| = {:.3e} (threshold {:.3e}), max P drift = {:.1e}",
        cfg.name,
        out.quantile.len(),
        max_dev,
        cfg.threshold,
        report.max_p_drift
    );
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Threshold(format!(
            "max deviation {max_dev:e} (threshold {:e}), P drift {:e} (tolerance {:e})",
            cfg.threshold, report.max_p_drift, report.drift_tolerance
        )))
    }
}

fn emit(out: &RunOutput, dir: &Path, format: OutputFormat) -> Result<(), Failure> {
    let files = write_outputs(out, dir, format)
        .with_context(|| format!("writing outputs to {}", dir.display()))?;
    println!("wrote {} files to {}", files.len(), dir.display());
    Ok(())
}

fn read_trajectory(path: &Path) -> Result<Trajectory, Failure> {
    let file = std::fs::File::open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    Trajectory::from_csv(std::io::BufReader::new(file)).map_err(|e| {
        Failure::Validation(anyhow::Error::new(e).context(format!("reading {}", path.display())))
    })
}

fn compare_files(args: CompareArgs) -> Result<(), Failure> {
    let q = read_trajectory(&args.quantile)?;
    let r = read_trajectory(&args.reference)?;
    let report = compare(&q, &r)?;
    let mut json = serde_json::to_string_pretty(&report).context("serializing report")?;
    json.push('\n');
    match &args.output {
        Some(path) => std::fs::write(path, &json)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{json}"),
    }
    match args.threshold {
        Some(th) if report.max_deviation > th => Err(Failure::Threshold(format!(
            "max deviation {:e} exceeds {th:e}",
            report.max_deviation
        ))),
        _ => Ok(()),
    }
}

fn ingest(args: IngestArgs) -> Result<(), Failure> {
    let tol = DensityTolerances {
        boundary: args.boundary_tolerance,
        mass: args.mass_tolerance,
    };
    let series = read_series_file(&args.density, &tol).map_err(|e| match e {
        Error::Io(io) => Failure::Other(
            anyhow::Error::new(io).context(format!("reading {}", args.density.display())),
        ),
        other => Failure::Validation(
            anyhow::Error::new(other).context(format!("ingesting {}", args.density.display())),
        ),
    })?;
    let targets = targets(&args.common)?
        .unwrap_or_else(|| Targets::Quantiles((1..10).map(|i| i as f64 / 10.0).collect()));
    let name = args
        .density
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "ingested".into());
    let out = run_ingested(&name, &series, &targets, &solver_options(&args.common))?;
    emit(&out, &args.common.output, args.common.format.into())?;
    println!(
        "{name}: {} trajectories over {} frames, max P drift = {:.1e}",
        out.quantile.len(),
        series.len(),
        out.report.max_p_drift
    );
    if out.report.passed {
        Ok(())
    } else {
        Err(Failure::Threshold(format!(
            "P drift {:e} exceeds {:e}",
            out.report.max_p_drift, out.report.drift_tolerance
        )))
    }
}
