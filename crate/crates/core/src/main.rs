use std::error::Error as StdError;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::Serialize;

use loewner::analysis::io::{
    read_curve_json, read_driver_csv, read_numbers, render_svg, write_curve_json, write_driver_csv, CurveFile,
};
use loewner::analysis::{check_capacity_bounds, lip_norm_estimate, relative_self_similarity, self_similarity_residual, DEFAULT_PAIR_BUDGET};
use loewner::capture::{capture_scan, phase_inequality_margin, CaptureRecord};
use loewner::dense::{build_dense_driver, DenseOptions};
use loewner::Error;
use loewner::fractal::{koch_standing, FractalKind, FractalSpec};
use loewner::loewner::{sample_uniform, solve_trace, ClosedForm, Driver, DrivingFunction, StepPolicy};
use loewner::verify::{run_suite, Suite};
use loewner::welding::extract_driving;
use loewner::HalfPlanePoint;

type CliResult<T> = std::result::Result<T, Box<dyn StdError>>;

/// Samples used when a closed-form driver has to be tabulated.
const TABLE_SAMPLES: usize = 4096;

#[derive(Parser)]
#[command(name = "loewner", version, about = "Chordal Loewner equation laboratory")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the trace of a driver.
    Trace {
        /// CSV file or `builtin:NAME` (const:c, sqrt:k, bubble:C, koch-approx:L).
        #[arg(long)]
        driver: String,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long)]
        out_curve: PathBuf,
        #[arg(long)]
        out_svg: Option<PathBuf>,
    },
    /// Extract the driving function of a curve.
    Extract {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        out_driver: PathBuf,
    },
    /// Generate a fractal curve.
    Fractal {
        #[arg(long)]
        kind: FractalKind,
        #[arg(long)]
        level: u32,
        /// Numbers `ε_1, ε_2, …` for the positive-area curve.
        #[arg(long)]
        epsilons: Option<PathBuf>,
        #[arg(long)]
        out_curve: PathBuf,
    },
    /// Analyze a driver.
    Analyze(AnalyzeArgs),
    /// Scan capture times of real points.
    Capture {
        #[arg(long)]
        driver: String,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
        range: Vec<f64>,
        #[arg(long, default_value_t = 9)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Factored phase inequality margin.
    PhaseMargin {
        #[arg(long = "M")]
        m: f64,
        #[arg(long)]
        epsilon: f64,
    },
    /// Build a driver whose trace visits the given points.
    BuildDense {
        /// Coordinates `x y` per point.
        #[arg(long)]
        points: PathBuf,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
        #[arg(long)]
        out_driver: PathBuf,
    },
    /// Run acceptance suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
    },
}

#[derive(Args)]
#[command(group(ArgGroup::new("analysis").required(true).multiple(false)))]
struct AnalyzeArgs {
    #[arg(long)]
    driver: String,
    #[arg(long, group = "analysis")]
    lip_norm: bool,
    /// Value and time factors `A B` of `A λ(t / B) = λ(t)`.
    #[arg(long, num_args = 2, value_names = ["A", "B"], group = "analysis")]
    self_similar: Option<Vec<f64>>,
    #[arg(long, group = "analysis")]
    capacity_bounds: bool,
}

/// A driver read from a file or named by a builtin.
enum Source {
    Sampled(DrivingFunction),
    Closed(ClosedForm),
}

impl Source {
    fn parse(spec: &str) -> CliResult<Self> {
        let Some(name) = spec.strip_prefix("builtin:") else {
            return Ok(Source::Sampled(read_driver_csv(BufReader::new(open(spec)?))?));
        };
        let (kind, arg) = name.split_once(':').ok_or_else(|| Error::InvalidArgument(format!("builtin '{name}' needs an argument")))?;
        Ok(match kind {
            "const" => Source::Closed(ClosedForm::Constant { c: arg.parse()?, horizon: 1.0 }),
            "sqrt" => Source::Closed(ClosedForm::SqrtRay { k: arg.parse()?, horizon: 1.0 }),
            "bubble" => Source::Closed(ClosedForm::Bubble { c: arg.parse()? }),
            "koch-approx" => Source::Sampled(extract_driving(&koch_standing(arg.parse()?)?, 1.0)?),
            other => return Err(Error::InvalidArgument(format!("unknown builtin '{other}'")).into()),
        })
    }

    fn driver(&self) -> &dyn Driver {
        match self {
            Source::Sampled(d) => d,
            Source::Closed(c) => c,
        }
    }

    fn sampled(&self) -> CliResult<DrivingFunction> {
        Ok(match self {
            Source::Sampled(d) => d.clone(),
            Source::Closed(c) => sample_uniform(c, TABLE_SAMPLES)?,
        })
    }

    /// Substeps clustered at the horizon for drivers with a square-root end.
    fn policy(&self, steps: usize) -> StepPolicy {
        match self {
            Source::Closed(ClosedForm::Bubble { .. }) => StepPolicy::geometric(steps, 120.0),
            _ => StepPolicy::uniform(steps),
        }
    }
}

fn open(path: impl AsRef<Path>) -> CliResult<File> {
    let path = path.as_ref();
    File::open(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn create(path: impl AsRef<Path>) -> CliResult<BufWriter<File>> {
    let path = path.as_ref();
    Ok(BufWriter::new(File::create(path).map_err(|e| format!("{}: {e}", path.display()))?))
}

fn print_json(value: &impl Serialize) -> CliResult<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

#[derive(Serialize)]
struct SimilarityReport {
    value_factor: f64,
    time_factor: f64,
    residual: f64,
    relative: f64,
}

#[derive(Serialize)]
struct CaptureOutput {
    captured: Vec<CaptureRecord>,
    survivors: Vec<f64>,
    errors: Vec<(f64, String)>,
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Trace { driver, steps, out_curve, out_svg } => {
            let source = Source::parse(&driver)?;
            let trace = solve_trace(&source.driver(), &source.policy(steps))?;
            let curve = trace.polyline();
            let mut out = create(&out_curve)?;
            write_curve_json(&CurveFile::from_polyline(&curve, Some(trace.times.clone())), &mut out)?;
            out.flush()?;
            if let Some(svg) = out_svg {
                std::fs::write(&svg, render_svg(&[&curve], 800, 600))?;
            }
            println!("tip {:?} at capacity {}", trace.last(), trace.horizon());
        }
        Command::Extract { curve, delta, out_driver } => {
            let curve = read_curve_json(BufReader::new(open(&curve)?))?.polyline();
            let lambda = extract_driving(&curve, delta)?;
            let mut out = create(&out_driver)?;
            write_driver_csv(&lambda, &mut out)?;
            out.flush()?;
            println!("{} samples, capacity {}", lambda.len(), lambda.horizon());
        }
        Command::Fractal { kind, level, epsilons, out_curve } => {
            let mut spec = FractalSpec::new(kind, level);
            if let Some(path) = epsilons {
                spec.epsilons = Some(read_numbers(BufReader::new(open(&path)?), &path.display().to_string())?);
            }
            let curve = spec.generate()?;
            let mut out = create(&out_curve)?;
            write_curve_json(&CurveFile::from_polyline(&curve, None), &mut out)?;
            out.flush()?;
            println!("{} vertices", curve.len());
        }
        Command::Analyze(args) => {
            let source = Source::parse(&args.driver)?;
            if args.lip_norm {
                print_json(&lip_norm_estimate(&source.sampled()?, DEFAULT_PAIR_BUDGET))?;
            } else if let Some(f) = args.self_similar {
                let lambda = source.sampled()?;
                print_json(&SimilarityReport {
                    value_factor: f[0],
                    time_factor: f[1],
                    residual: self_similarity_residual(&lambda, f[0], f[1])?,
                    relative: relative_self_similarity(&lambda, f[0], f[1])?,
                })?;
            } else {
                let trace = solve_trace(&source.driver(), &source.policy(2000))?;
                print_json(&check_capacity_bounds(&source.driver(), &trace, 1e-3))?;
            }
        }
        Command::Capture { driver, range, n, out } => {
            let source = Source::parse(&driver)?;
            let scan = capture_scan(&source.driver(), range[0], range[1], n, 1e-9)?;
            let report = CaptureOutput { captured: scan.captured, survivors: scan.survivors, errors: scan.errors };
            let mut file = create(&out)?;
            serde_json::to_writer_pretty(&mut file, &report)?;
            file.flush()?;
            println!("{} captured, {} survivors", report.captured.len(), report.survivors.len());
        }
        Command::PhaseMargin { m, epsilon } => {
            println!("{}", phase_inequality_margin(m, epsilon)?);
        }
        Command::BuildDense { points, tol, out_driver } => {
            let numbers = read_numbers(BufReader::new(open(&points)?), &points.display().to_string())?;
            if numbers.len() % 2 != 0 {
                return Err(Error::InvalidArgument("points file needs an even count of coordinates".into()).into());
            }
            let pts = numbers.chunks(2).map(|p| HalfPlanePoint::new(p[0], p[1])).collect::<Result<Vec<_>, _>>()?;
            let build = build_dense_driver(&pts, &DenseOptions::new(tol))?;
            let mut out = create(&out_driver)?;
            write_driver_csv(&build.sampled, &mut out)?;
            out.flush()?;
            print_json(&build.stages)?;
            println!("norm estimate {} at capacity {}", build.norm.estimate, build.driver.horizon());
        }
        Command::Verify { suite } => {
            let mut all = true;
            for outcome in run_suite(suite, cli.seed) {
                println!("{outcome}");
                all &= outcome.passed;
            }
            return Ok(all);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
