//! Command-line front end: reads numeric records, encodes them onto the
//! unit interval, fits the tree, and emits machine-readable reports.
//!
//! Exit codes: 0 on success, 2 on malformed input or arguments (with a
//! line-numbered message where a data line is at fault), 3 on model
//! errors such as coincident points under the erroring duplicate policy.

mod report;

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use dyadens::domains::{classify_posterior, encode_unit, DomainSpec};
use dyadens::testkit::{consistency_experiment, TestDistribution};
use dyadens::{DuplicatePolicy, Error, FittedTree, ModelConfig};

use report::{ConfigBlock, DimsBlock, Format, GridRow, HeightsBlock, Number, Report};

#[derive(Parser)]
#[command(
    name = "dyadens",
    version,
    about = "Bayesian adaptive-bin density estimation on recursively halved intervals"
)]
struct Cli {
    /// Sample space of the input records.
    #[arg(long, global = true, default_value = "unit", value_parser = DomainSpec::from_str)]
    domain: DomainSpec,

    /// Prior probability that any cell splits in half, in (0, 1/2].
    #[arg(long, global = true, default_value_t = 0.5)]
    split_prior: f64,

    /// Number of reported dimension coefficients.
    #[arg(long, global = true, default_value_t = 16)]
    dim_trunc: usize,

    /// Depth bound; cells this deep never split further.
    #[arg(long, global = true, default_value_t = 52)]
    max_depth: u32,

    /// Handling of points that still coincide at the depth bound.
    #[arg(long, global = true, value_enum, default_value_t = DuplicatesArg::Truncate)]
    duplicates: DuplicatesArg,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum DuplicatesArg {
    Truncate,
    Error,
}

#[derive(Subcommand)]
enum Cmd {
    /// Marginal likelihood of the data and the size of the fitted tree.
    Evidence(InputArgs),
    /// Posterior predictive density on a grid or at one point.
    Density(QueryArgs),
    /// Posterior predictive distribution function.
    Cdf(QueryArgs),
    /// Draws from the posterior predictive.
    Sample(SampleArgs),
    /// Posterior distribution of the number of effective splits.
    Dims(InputArgs),
    /// Expected tree heights.
    Heights(HeightsArgs),
    /// Class-1 posterior probabilities; input lines are "observation,label".
    Classify(QueryArgs),
    /// The single most probable partition of the unit interval.
    MapTree(InputArgs),
    /// Fit nested samples from a known test density and report the fits.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Data file; standard input when absent.
    file: Option<PathBuf>,
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Number of evaluation points, placed at cell midpoints (i + 1/2)/grid.
    #[arg(long, default_value_t = 100)]
    grid: usize,

    /// Evaluate at one source-domain point instead (comma-separated
    /// coordinates where the domain has several).
    #[arg(long, conflicts_with = "grid")]
    at: Option<String>,
}

#[derive(Args)]
struct SampleArgs {
    /// Number of draws.
    count: usize,

    #[command(flatten)]
    input: InputArgs,

    /// RNG seed; equal seeds reproduce the draws exactly.
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct HeightsArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Also report the expected height above one source-domain point.
    #[arg(long)]
    at: Option<String>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Target density: singular | linear | beta | step.
    dist: String,

    /// Comma-separated sample sizes, fitted as nested prefixes of one stream.
    #[arg(long, required = true, value_delimiter = ',')]
    sizes: Vec<usize>,

    /// Number of density comparison points.
    #[arg(long, default_value_t = 1000)]
    grid: usize,

    /// RNG seed for the data stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: String) -> Failure {
        Failure { code: 2, message }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Failure {
        let code = match err {
            Error::DuplicateData { .. } | Error::NotFound(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(rendered) => {
            print!("{rendered}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let config = ModelConfig {
        split_prior: cli.split_prior,
        dim_trunc: cli.dim_trunc,
        max_depth: cli.max_depth,
        duplicate_policy: match cli.duplicates {
            DuplicatesArg::Truncate => DuplicatePolicy::Truncate,
            DuplicatesArg::Error => DuplicatePolicy::Error,
        },
        ..ModelConfig::default()
    };

    let report = match &cli.command {
        Cmd::Evidence(args) => {
            let tree = fit_input(args, &cli.domain, &config)?;
            fitted_report("evidence", &cli.domain, &tree)
        }
        Cmd::Density(args) => {
            let tree = fit_input(&args.input, &cli.domain, &config)?;
            let rows = unit_grid_rows(args, &cli.domain, &config, |x| {
                tree.predictive_density(x).map_err(Failure::from)
            })?;
            let mut report = fitted_report("density", &cli.domain, &tree);
            report.grid = Some(rows);
            report
        }
        Cmd::Cdf(args) => {
            let tree = fit_input(&args.input, &cli.domain, &config)?;
            let rows = unit_grid_rows(args, &cli.domain, &config, |x| {
                tree.cdf(x).map_err(Failure::from)
            })?;
            let mut report = fitted_report("cdf", &cli.domain, &tree);
            report.grid = Some(rows);
            report
        }
        Cmd::Sample(args) => {
            let tree = fit_input(&args.input, &cli.domain, &config)?;
            let rows = tree
                .sample_many(args.count, args.seed)
                .into_iter()
                .enumerate()
                .map(|(i, draw)| GridRow {
                    x: Number::Int(i as u64),
                    value: draw,
                })
                .collect();
            let mut report = fitted_report("sample", &cli.domain, &tree);
            report.grid = Some(rows);
            report
        }
        Cmd::Dims(args) => {
            let tree = fit_input(args, &cli.domain, &config)?;
            let dims = &tree.summary().dims;
            let mut report = fitted_report("dims", &cli.domain, &tree);
            report.dims = Some(DimsBlock {
                probs: dims.probs.clone(),
                tail_mass: dims.tail_mass,
            });
            report
        }
        Cmd::Heights(args) => {
            let tree = fit_input(&args.input, &cli.domain, &config)?;
            let at_query = match &args.at {
                Some(raw) => {
                    let x = encode_query(raw, &cli.domain, &config)?;
                    Some(tree.height_at(x)?)
                }
                None => None,
            };
            let mut report = fitted_report("heights", &cli.domain, &tree);
            report.heights = Some(HeightsBlock {
                at_query,
                average: tree.summary().avg_height,
            });
            report
        }
        Cmd::Classify(args) => {
            let domain = classified_domain(&cli.domain)?;
            let tree = fit_input(&args.input, &domain, &config)?;
            let observations: Vec<f64> = match &args.at {
                Some(raw) => vec![parse_point(raw)?],
                None => midpoints(args.grid)?,
            };
            let rows = observations
                .into_iter()
                .map(|obs| {
                    let stream = encode_unit(obs)
                        .map_err(|e| Failure::input(format!("query point: {e}")))?;
                    let value = classify_posterior(&tree, stream)?;
                    Ok(GridRow {
                        x: Number::Float(obs),
                        value,
                    })
                })
                .collect::<Result<Vec<GridRow>, Failure>>()?;
            let mut report = fitted_report("classify", &domain, &tree);
            report.grid = Some(rows);
            report
        }
        Cmd::MapTree(args) => {
            let tree = fit_input(args, &cli.domain, &config)?;
            let mut report = fitted_report("map-tree", &cli.domain, &tree);
            report.map_cells = Some(tree.map_partition());
            report
        }
        Cmd::Experiment(args) => {
            let dist = TestDistribution::by_name(&args.dist)?;
            let outcome =
                consistency_experiment(dist, &args.sizes, args.grid, args.seed, &config)?;
            let mut report = Report::bare("experiment", config_block(&cli.domain, &config));
            report.experiment = Some(outcome);
            report
        }
    };

    Ok(report.render(cli.format))
}

fn config_block(domain: &DomainSpec, config: &ModelConfig) -> ConfigBlock {
    ConfigBlock {
        domain: domain.to_string(),
        split_prior: config.split_prior,
        dim_trunc: config.dim_trunc,
        max_depth: config.max_depth,
        overflow_threshold: config.overflow_threshold,
        duplicate_policy: match config.duplicate_policy {
            DuplicatePolicy::Truncate => "truncate",
            DuplicatePolicy::Error => "error",
        },
    }
}

fn fitted_report(command: &'static str, domain: &DomainSpec, tree: &FittedTree) -> Report {
    let mut report = Report::bare(command, config_block(domain, tree.config()));
    report.ln_evidence = Some(tree.log_evidence());
    report.node_count = Some(tree.summary().node_count);
    report
}

fn fit_input(
    args: &InputArgs,
    domain: &DomainSpec,
    config: &ModelConfig,
) -> Result<FittedTree, Failure> {
    let text = match &args.file {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?,
        None => {
            let mut buffer = String::new();
            std::io::stdin()
                .read_to_string(&mut buffer)
                .map_err(|e| Failure::input(format!("cannot read standard input: {e}")))?;
            buffer
        }
    };

    let mut encoded = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let record = parse_fields(trimmed)
            .map_err(|message| Failure::input(format!("line {}: {message}", index + 1)))?;
        let point = domain
            .encode_record(&record, config.max_depth)
            .map_err(|e| Failure::input(format!("line {}: {e}", index + 1)))?;
        encoded.push(point);
    }

    FittedTree::fit(&encoded, config.clone()).map_err(Failure::from)
}

fn parse_fields(line: &str) -> Result<Vec<f64>, String> {
    line.split(',')
        .map(|field| {
            let field = field.trim();
            field
                .parse::<f64>()
                .map_err(|_| format!("bad number {field:?}"))
        })
        .collect()
}

fn parse_point(raw: &str) -> Result<f64, Failure> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| Failure::input(format!("bad query point {raw:?}")))
}

fn encode_query(raw: &str, domain: &DomainSpec, config: &ModelConfig) -> Result<f64, Failure> {
    let fields =
        parse_fields(raw.trim()).map_err(|message| Failure::input(format!("query point: {message}")))?;
    domain
        .encode_record(&fields, config.max_depth)
        .map_err(|e| Failure::input(format!("query point: {e}")))
}

fn midpoints(grid: usize) -> Result<Vec<f64>, Failure> {
    if grid < 2 {
        return Err(Failure::input(format!(
            "a grid needs at least 2 points, got {grid}"
        )));
    }
    Ok((0..grid)
        .map(|i| (i as f64 + 0.5) / grid as f64)
        .collect())
}

fn unit_grid_rows(
    args: &QueryArgs,
    domain: &DomainSpec,
    config: &ModelConfig,
    mut value_at: impl FnMut(f64) -> Result<f64, Failure>,
) -> Result<Vec<GridRow>, Failure> {
    let points = match &args.at {
        Some(raw) => vec![encode_query(raw, domain, config)?],
        None => midpoints(args.grid)?,
    };
    points
        .into_iter()
        .map(|x| {
            Ok(GridRow {
                x: Number::Float(x),
                value: value_at(x)?,
            })
        })
        .collect()
}

fn classified_domain(requested: &DomainSpec) -> Result<DomainSpec, Failure> {
    match requested {
        DomainSpec::Unit | DomainSpec::Classified => Ok(DomainSpec::Classified),
        other => Err(Failure::input(format!(
            "the classify command reads \"observation,label\" records; --domain {other} does not apply"
        ))),
    }
}
