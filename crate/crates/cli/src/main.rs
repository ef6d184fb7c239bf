use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gramcharlier::empirical::{fit_diagnostics, standard_reference};
use gramcharlier::kron::set_entry_budget;
use gramcharlier::moment_table::MomentTable;
use gramcharlier::validation::{self, Suite, ValidationConfig};
use gramcharlier::{
    cumulants_from_moments, fit_expansion, ggc_density, moments_from_cumulants, CumulantSet, Error,
    ExpansionModel, MomentSet, PointGrid, ReferenceDensity, SampleMatrix,
};

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

/// Fit and evaluate multivariate Gram-Charlier density expansions.
#[derive(Parser)]
#[command(name = "gramcharlier", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit an expansion to samples from a CSV file.
    Fit(FitArgs),
    /// Evaluate a fitted model's density or characteristic function.
    Eval(EvalArgs),
    /// Convert between moment and cumulant files.
    Convert(ConvertArgs),
    /// Run the built-in validation suite.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Sample CSV, one observation per row.
    #[arg(long)]
    input: PathBuf,
    /// Model JSON (stdout if omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Truncation order.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u8).range(2..=10))]
    order: u8,
    /// Expected number of columns.
    #[arg(long)]
    dim: Option<usize>,
    /// `gaussian` or `mixture:<file>`, in standardized coordinates.
    #[arg(long, default_value = "gaussian")]
    reference: String,
    /// The first CSV row is a header.
    #[arg(long)]
    header: bool,
    /// Diagnostics JSON; printed to stdout when omitted and `--output` is set.
    #[arg(long)]
    diagnostics: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Model JSON written by `fit`.
    #[arg(long)]
    input: PathBuf,
    /// CSV output (stdout if omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Grid as `min:max:n`, one triple per axis or one for all.
    #[arg(long, conflicts_with = "points", required_unless_present = "points", allow_hyphen_values = true)]
    grid: Option<String>,
    /// CSV of evaluation points.
    #[arg(long)]
    points: Option<PathBuf>,
    /// The points file has a header row.
    #[arg(long)]
    header: bool,
    /// Evaluate the characteristic function instead of the density.
    #[arg(long)]
    charfn: bool,
    /// Expected model dimension.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Cumulants,
    Moments,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    /// What to produce; the input is the other kind.
    #[arg(long, value_enum)]
    to: Target,
}

#[derive(Args)]
struct ValidateArgs {
    /// Restrict to these suites (cumulants, hermite, quadrature, series).
    #[arg(long, value_delimiter = ',')]
    only: Vec<Suite>,
    #[arg(long, default_value_t = validation::DEFAULT_SEED)]
    seed: u64,
    /// Replacement moment/cumulant table JSON.
    #[arg(long)]
    golden_table: Option<PathBuf>,
    /// Report JSON (stdout if omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
}

enum Failure {
    Lib(Error),
    Usage(String),
    Validation(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Lib(e.into())
    }
}

fn report(kind: &str, message: String) {
    let text = serde_json::to_string(&ErrorReport { error: kind, message }).expect("report serializes");
    eprintln!("{text}");
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report("usage", e.to_string().trim().to_string());
            return ExitCode::from(EXIT_INPUT);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            report("usage", msg);
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Lib(e)) if e.is_numerical() => {
            report("numerical", e.to_string());
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(Failure::Lib(e)) => {
            report("input", e.to_string());
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Validation(n)) => {
            report("validation", format!("{n} check(s) failed"));
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Ok(budget) = std::env::var("KRON_BUDGET") {
        let entries = budget
            .trim()
            .parse::<usize>()
            .map_err(|_| Failure::Usage(format!("KRON_BUDGET must be a positive integer, got {budget:?}")))?;
        set_entry_budget(entries);
    }
    match cli.command {
        Command::Fit(args) => fit(args),
        Command::Eval(args) => eval(args),
        Command::Convert(args) => convert(args),
        Command::Validate(args) => validate(args),
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<(), Failure> {
    let mut w = writer(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn check_dim(expected: Option<usize>, found: usize) -> Result<(), Failure> {
    match expected {
        Some(d) if d != found => Err(Error::DimensionMismatch { expected: d, found }.into()),
        _ => Ok(()),
    }
}

fn parse_reference(spec: &str, dim: usize) -> Result<ReferenceDensity, Failure> {
    if spec == "gaussian" {
        return Ok(standard_reference(dim));
    }
    let Some(path) = spec.strip_prefix("mixture:") else {
        return Err(Failure::Usage(format!(
            "--reference must be `gaussian` or `mixture:<file>`, got {spec:?}"
        )));
    };
    let reference: ReferenceDensity = serde_json::from_reader(open(Path::new(path))?)?;
    reference.validate()?;
    if reference.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: reference.dim(),
        }
        .into());
    }
    Ok(reference)
}

fn fit(args: FitArgs) -> Result<(), Failure> {
    let samples = SampleMatrix::from_csv(open(&args.input)?, args.header)?;
    check_dim(args.dim, samples.dim())?;
    let reference = parse_reference(&args.reference, samples.dim())?;
    let model = fit_expansion(&samples, args.order as usize, &reference)?;
    let diagnostics = fit_diagnostics(&model, samples.len())?;
    write_json(args.output.as_deref(), &model)?;
    match (&args.diagnostics, &args.output) {
        (Some(path), _) => write_json(Some(path), &diagnostics)?,
        (None, Some(_)) => write_json(None, &diagnostics)?,
        (None, None) => {}
    }
    Ok(())
}

fn eval(args: EvalArgs) -> Result<(), Failure> {
    let model: ExpansionModel = serde_json::from_reader(open(&args.input)?)?;
    let d = model.dim();
    check_dim(args.dim, d)?;
    let points: Vec<Vec<f64>> = match (&args.grid, &args.points) {
        (Some(spec), _) => PointGrid::parse(spec, d)?.points(),
        (None, Some(path)) => {
            let pts = SampleMatrix::from_csv(open(path)?, args.header)?;
            check_dim(Some(d), pts.dim())?;
            pts.rows().map(<[f64]>::to_vec).collect()
        }
        (None, None) => unreachable!("clap requires --grid or --points"),
    };

    let axis = if args.charfn { "lambda" } else { "x" };
    let mut header: Vec<String> = (1..=d).map(|i| format!("{axis}_{i}")).collect();
    if args.charfn {
        header.extend(["re".to_string(), "im".to_string()]);
    } else {
        header.push("f_hat".to_string());
    }
    let mut out = csv::Writer::from_writer(writer(args.output.as_deref())?);
    out.write_record(&header).map_err(Error::from)?;
    for p in &points {
        let mut row: Vec<String> = p.iter().map(f64::to_string).collect();
        if args.charfn {
            let cf = model.char_fn(p)?;
            row.extend([cf.re.to_string(), cf.im.to_string()]);
        } else {
            row.push(ggc_density(&model, p)?.to_string());
        }
        out.write_record(&row).map_err(Error::from)?;
    }
    out.flush()?;
    Ok(())
}

fn convert(args: ConvertArgs) -> Result<(), Failure> {
    let input = open(&args.input)?;
    match args.to {
        Target::Cumulants => {
            let m: MomentSet = serde_json::from_reader(input)?;
            write_json(args.output.as_deref(), &cumulants_from_moments(&m)?)
        }
        Target::Moments => {
            let c: CumulantSet = serde_json::from_reader(input)?;
            write_json(args.output.as_deref(), &moments_from_cumulants(&c)?)
        }
    }
}

fn validate(args: ValidateArgs) -> Result<(), Failure> {
    let table = match &args.golden_table {
        Some(path) => MomentTable::from_json(&std::fs::read_to_string(path)?)?,
        None => MomentTable::embedded(),
    };
    let config = ValidationConfig {
        seed: args.seed,
        table,
        suites: if args.only.is_empty() { Suite::ALL.to_vec() } else { args.only },
    };
    let results = validation::run(&config)?;
    write_json(args.output.as_deref(), &results)?;
    match results.iter().filter(|r| !r.pass).count() {
        0 => Ok(()),
        n => Err(Failure::Validation(n)),
    }
}
