//! `eqsphere`: build equal-area partitions of S^d, emit their point codes,
//! locate points, compute quality metrics and compare constructions.
//!
//! Data goes to stdout (or `--output`), diagnostics to stderr. Exit codes:
//! 0 success, 1 usage error, 2 data error.

use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eqsphere::export::{
    boundaries, boundaries_to_csv, indices_to_csv, points_to_csv, points_to_json, read_point_rows,
    read_points, regions_to_csv, report_to_csv, report_to_json, table_to_csv, table_to_json,
};
use eqsphere::points::eq_points_with;
use eqsphere::{
    compare, eq_partition, generate, lookup, metrics_report, CenterMode, CodeSet, CompareOptions,
    Dimension, Error, GeneratorKind, Metric, MetricsConfig, OffsetScheme, PartitionSpec,
    RegionTree,
};

#[derive(Parser)]
#[command(
    name = "eqsphere",
    version,
    about = "Equal-area partitions of the unit sphere S^d and their point codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build EQ(d, N) and write it as a JSON tree or a CSV region table.
    Partition(PartitionArgs),
    /// Write a point set: the EQP(d, N) centres or another construction.
    Points(PointsArgs),
    /// Compute quality metrics of a point set.
    Metrics(MetricsArgs),
    /// Find the region of every point in a file.
    Lookup(LookupArgs),
    /// Write region boundary polylines of a partition of S² for plotting.
    Boundaries(BoundariesArgs),
    /// Tabulate metrics for several constructions over a sweep of N.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Offsets {
    None,
    Stagger,
}

impl From<Offsets> for OffsetScheme {
    fn from(o: Offsets) -> Self {
        match o {
            Offsets::None => OffsetScheme::None,
            Offsets::Stagger => OffsetScheme::Stagger,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Center {
    Midpoint,
    AreaMedian,
}

impl From<Center> for CenterMode {
    fn from(c: Center) -> Self {
        match c {
            Center::Midpoint => CenterMode::Midpoint,
            Center::AreaMedian => CenterMode::AreaMedian,
        }
    }
}

/// A partition given either by (d, N) or by a tree file.
#[derive(Args)]
struct SpecArgs {
    /// Sphere dimension d of S^d.
    #[arg(short = 'd', long = "dim", value_parser = clap::value_parser!(u32).range(1..))]
    d: Option<u32>,
    /// Number of regions N.
    #[arg(short = 'n', long = "count", value_parser = clap::value_parser!(u64).range(1..))]
    n: Option<u64>,
    /// Azimuth offsets between adjacent collars of S².
    #[arg(long, value_enum, default_value = "none")]
    offsets: Offsets,
}

#[derive(Args)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PartitionArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long = "out", value_enum, default_value = "json")]
    format: Format,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PointsArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Construction: eqp, random, spiral, fibonacci or halton.
    #[arg(short = 'g', long, default_value = "eqp", value_parser = parse_generator)]
    generator: GeneratorKind,
    /// Seed of randomized constructions.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Centre of each EQP region.
    #[arg(long, value_enum, default_value = "midpoint")]
    center: Center,
    /// Take d, N and offsets from a partition file written by `partition`.
    #[arg(long)]
    tree: Option<PathBuf>,
    #[arg(long = "out", value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct MetricsArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(short = 'g', long, default_value = "eqp", value_parser = parse_generator)]
    generator: GeneratorKind,
    /// Read the points from a CSV or JSON file instead of generating them.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Partition file, used for region diameters.
    #[arg(long)]
    tree: Option<PathBuf>,
    /// Riesz exponents.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    s_values: Vec<f64>,
    /// Random caps for the discrepancy estimate.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Random points for the covering-radius estimate.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Boundary samples per edge for diameters when d ≥ 3.
    #[arg(long, default_value_t = 5)]
    diameter_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "out", value_enum, default_value = "json")]
    format: Format,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct LookupArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Partition file written by `partition`.
    #[arg(long)]
    tree: Option<PathBuf>,
    /// CSV or JSON point file; `-` reads stdin.
    #[arg(long)]
    points: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct BoundariesArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    tree: Option<PathBuf>,
    /// Largest angular step between polyline vertices, in radians.
    #[arg(long, default_value_t = 0.01)]
    resolution: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(short = 'd', long = "dim", default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    d: u32,
    /// Constructions to compare.
    #[arg(short = 'g', long = "generators", value_delimiter = ',', default_value = "eqp,random,spiral,fibonacci", value_parser = parse_generator)]
    generators: Vec<GeneratorKind>,
    /// Point counts to sweep.
    #[arg(
        short = 'n',
        long = "counts",
        value_delimiter = ',',
        default_value = "100,400"
    )]
    counts: Vec<usize>,
    /// Metrics, e.g. min_distance,log_energy,riesz_energy_s1.
    #[arg(short = 'm', long = "metrics", value_delimiter = ',', default_value = "min_distance,log_energy", value_parser = parse_metric)]
    metrics: Vec<Metric>,
    #[arg(long, value_enum, default_value = "none")]
    offsets: Offsets,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long = "out", value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_generator(s: &str) -> Result<GeneratorKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failed command, classified by exit code.
enum Failure {
    Usage(String),
    Data(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Data(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Unsupported(_) | Error::Domain(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Data(e.to_string()),
        }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn read_input(path: &PathBuf) -> Outcome<String> {
    let mut text = String::new();
    let res = if path.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    Ok(text)
}

fn read_tree(path: &PathBuf) -> Outcome<RegionTree> {
    let text = read_input(path)?;
    RegionTree::from_json(&text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn read_code(path: &PathBuf) -> Outcome<CodeSet> {
    let text = read_input(path)?;
    read_points(&text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: &OutputArgs) -> Outcome {
    let mut text = text.to_string();
    if !text.is_empty() && !text.ends_with('\n') {
        text.push('\n');
    }
    let res = match &out.output {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    res.map_err(Failure::Data)
}

impl SpecArgs {
    fn dims(&self) -> Outcome<(usize, usize)> {
        match (self.d, self.n) {
            (Some(d), Some(n)) => Ok((d as usize, n as usize)),
            _ => Err(Failure::Usage("both -d and -n are required".into())),
        }
    }

    fn build(&self) -> Outcome<RegionTree> {
        let (d, n) = self.dims()?;
        Ok(eq_partition(
            &PartitionSpec::new(d, n)?.with_offsets(self.offsets.into()),
        )?)
    }

    /// The tree file if one is given, otherwise the partition built from d and N.
    fn resolve(&self, tree: Option<&PathBuf>) -> Outcome<RegionTree> {
        match tree {
            Some(path) => {
                if self.d.is_some() || self.n.is_some() {
                    return Err(Failure::Usage(
                        "give either --tree or -d/-n, not both".into(),
                    ));
                }
                read_tree(path)
            }
            None => self.build(),
        }
    }
}

fn partition(a: PartitionArgs) -> Outcome {
    let tree = a.spec.build()?;
    let text = match a.format {
        Format::Json => tree.to_json()?,
        Format::Csv => regions_to_csv(&tree)?,
    };
    emit(&text, &a.output)
}

fn write_code(code: &CodeSet, format: Format, out: &OutputArgs) -> Outcome {
    let text = match format {
        Format::Json => points_to_json(code)?,
        Format::Csv => points_to_csv(code)?,
    };
    emit(&text, out)
}

fn points(a: PointsArgs) -> Outcome {
    let code = if let Some(path) = &a.tree {
        if a.generator != GeneratorKind::Eqp {
            return Err(Failure::Usage(
                "--tree only applies to the eqp generator".into(),
            ));
        }
        eq_points_with(&a.spec.resolve(Some(path))?, a.center.into())
    } else if a.generator == GeneratorKind::Eqp {
        eq_points_with(&a.spec.build()?, a.center.into())
    } else {
        let (d, n) = a.spec.dims()?;
        let code = generate(
            a.generator,
            Dimension::new(d)?,
            n,
            a.seed,
            a.spec.offsets.into(),
        )?;
        eprintln!("eqsphere: generator {} seed {}", a.generator.name(), a.seed);
        code
    };
    write_code(&code, a.format, &a.output)
}

fn metrics(a: MetricsArgs) -> Outcome {
    let tree = match &a.tree {
        Some(path) => Some(read_tree(path)?),
        None if a.points.is_none() && a.generator == GeneratorKind::Eqp => Some(a.spec.build()?),
        None => None,
    };
    let code = match (&a.points, &tree) {
        (Some(path), _) => {
            if a.spec.d.is_some() || a.spec.n.is_some() {
                return Err(Failure::Usage(
                    "give either --points or -d/-n, not both".into(),
                ));
            }
            read_code(path)?
        }
        (None, Some(t)) if a.generator == GeneratorKind::Eqp => eqsphere::eq_points(t),
        (None, _) => {
            let (d, n) = a.spec.dims()?;
            generate(
                a.generator,
                Dimension::new(d)?,
                n,
                a.seed,
                a.spec.offsets.into(),
            )?
        }
    };
    let config = MetricsConfig {
        s_values: a.s_values,
        mc_samples: a.samples,
        cap_trials: a.trials,
        seed: a.seed,
        diameter_samples: a.diameter_samples,
    };
    let report = metrics_report(&code, tree.as_ref(), &config)?;
    eprintln!(
        "eqsphere: metrics of {} points, seed {}",
        code.len(),
        a.seed
    );
    let text = match a.format {
        Format::Json => report_to_json(&report)?,
        Format::Csv => report_to_csv(&report)?,
    };
    emit(&text, &a.output)
}

fn lookup_cmd(a: LookupArgs) -> Outcome {
    let tree = a.spec.resolve(a.tree.as_ref())?;
    let text = read_input(&a.points)?;
    if text.trim().is_empty() {
        return emit("", &a.output);
    }
    let (_, rows) = read_point_rows(&text, Some(tree.d()))
        .map_err(|e| Failure::Data(format!("{}: {e}", a.points.display())))?;
    let indices = rows
        .iter()
        .map(|(_, p)| lookup(&tree, p))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Data(e.to_string()))?;
    emit(&indices_to_csv(&indices)?, &a.output)
}

fn boundaries_cmd(a: BoundariesArgs) -> Outcome {
    let tree = a.spec.resolve(a.tree.as_ref())?;
    let lines = boundaries(&tree, a.resolution)?;
    emit(&boundaries_to_csv(&lines)?, &a.output)
}

fn compare_cmd(a: CompareArgs) -> Outcome {
    if a.counts.contains(&0) {
        return Err(Failure::Usage("point counts must be positive".into()));
    }
    let options = CompareOptions {
        mc_samples: a.samples,
        cap_trials: a.trials,
        offsets: a.offsets.into(),
    };
    let table = compare(
        Dimension::new(a.d as usize)?,
        &a.generators,
        &a.counts,
        &a.metrics,
        a.seed,
        &options,
    )?;
    eprintln!("eqsphere: {} rows, seed {}", table.rows.len(), a.seed);
    let text = match a.format {
        Format::Json => table_to_json(&table)?,
        Format::Csv => table_to_csv(&table)?,
    };
    emit(&text, &a.output)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Partition(a) => partition(a),
        Command::Points(a) => points(a),
        Command::Metrics(a) => metrics(a),
        Command::Lookup(a) => lookup_cmd(a),
        Command::Boundaries(a) => boundaries_cmd(a),
        Command::Compare(a) => compare_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("eqsphere: {f}");
            ExitCode::from(f.code())
        }
    }
}
