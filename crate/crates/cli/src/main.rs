mod report;

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use ari::evaluation::{cv_accuracy, top_k_features, EvalConfig, LogisticConfig};
use ari::protocol::dimensionality_sweep;
use ari::{
    load_csv, run_protocol, CategoricalDataset, CsvOptions, FeatureId, MethodId, ProtocolConfig,
    SampleSize, SamplingMode, SyntheticFunction, SyntheticSpec,
};
use clap::{Args, Parser, Subcommand};

use report::{
    AccuracyRow, AccuracySection, DatasetDescriptor, MethodSection, ReportDocument, SweepRow,
};

#[derive(Parser)]
#[command(name = "ari", version, about = "Feature relevance scoring for categorical data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset as CSV.
    Generate(GenerateArgs),
    /// Score the features of a CSV dataset.
    Score(ScoreArgs),
    /// Cross-validated accuracy on the top-k features of each method.
    Eval(EvalArgs),
    /// Scores on synthetic samples across dimensions, ranges and sizes.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    function: SyntheticFunction,
    #[arg(long, default_value_t = 10)]
    dim: usize,
    #[arg(long, default_value_t = 2)]
    range: u32,
    /// Enumerate every point of the domain (the default).
    #[arg(long, conflicts_with = "sample")]
    full: bool,
    /// Draw this many rows uniformly with replacement instead.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, env = "ARI_SEED", default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DataArgs {
    /// CSV file: header row, features first, label last.
    data: PathBuf,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
}

#[derive(Args)]
struct ProtocolArgs {
    #[arg(long, value_delimiter = ',', default_value = "ari,chi2,mi,relief")]
    methods: Vec<MethodId>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Sample size as a fraction of the rows (default 1/3).
    #[arg(long, conflicts_with = "size")]
    fraction: Option<f64>,
    /// Sample size as an absolute row count.
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, env = "ARI_SEED", default_value_t = 0)]
    seed: u64,
    /// Report mean raw scores without sum-normalising.
    #[arg(long)]
    no_normalize: bool,
    #[arg(long, default_value_t = 10)]
    relief_k: usize,
}

impl ProtocolArgs {
    fn config(&self) -> ProtocolConfig {
        let sample = match (self.size, self.fraction) {
            (Some(n), _) => SampleSize::Absolute(n),
            (None, Some(f)) => SampleSize::Fraction(f),
            (None, None) => SampleSize::Fraction(1.0 / 3.0),
        };
        ProtocolConfig {
            repetitions: self.reps,
            sample,
            seed: self.seed,
            normalize: !self.no_normalize,
            relief: ari::baselines::ReliefConfig {
                k_neighbors: self.relief_k,
            },
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of the table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ScoreArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    protocol: ProtocolArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// Number of top-ranked features handed to the classifier.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long)]
    no_stratify: bool,
    #[arg(long, default_value_t = 1e-3)]
    l2: f64,
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    #[arg(long, default_value_t = 500)]
    iters: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    function: SyntheticFunction,
    #[arg(long, value_delimiter = ',', default_value = "10")]
    dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    ranges: Vec<u32>,
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value = "ari")]
    method: MethodId,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, env = "ARI_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    no_normalize: bool,
    #[arg(long, default_value_t = 10)]
    relief_k: usize,
    /// Largest universe that is enumerated and subsampled without replacement.
    #[arg(long, default_value_t = ari::synthetic::DEFAULT_ENUMERATION_CAP)]
    enumeration_cap: u128,
    #[command(flatten)]
    output: OutputArgs,
}

fn load(args: &DataArgs) -> Result<CategoricalDataset> {
    let delimiter = u8::try_from(args.delimiter).context("delimiter must be a single-byte character")?;
    load_csv(&args.data, &CsvOptions { delimiter })
        .with_context(|| format!("reading {}", args.data.display()))
}

fn emit(doc: &ReportDocument, output: &OutputArgs, table: String) -> Result<()> {
    let json = doc.to_json();
    if let Some(path) = &output.out {
        std::fs::write(path, &json).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut stdout = io::stdout().lock();
    if output.json {
        stdout.write_all(json.as_bytes())?;
    } else {
        stdout.write_all(table.as_bytes())?;
    }
    Ok(())
}

fn source(path: &Path) -> String {
    path.display().to_string()
}

fn generate(args: GenerateArgs) -> Result<()> {
    let mode = match (args.full, args.sample) {
        (false, Some(size)) => SamplingMode::Sample {
            size,
            seed: args.seed,
        },
        _ => SamplingMode::FullEnumeration,
    };
    let spec = SyntheticSpec::new(args.function)
        .with_dimension(args.dim)
        .with_range(args.range)
        .with_mode(mode);
    let ds = spec.generate()?;
    match &args.out {
        Some(path) => {
            ds.save_csv(path)?;
            println!(
                "wrote {} rows x {} features to {}",
                ds.n_rows(),
                ds.n_features(),
                path.display()
            );
        }
        None => {
            ds.write_csv(io::stdout().lock())?;
            eprintln!("{} rows x {} features", ds.n_rows(), ds.n_features());
        }
    }
    Ok(())
}

fn score_sections(ds: &CategoricalDataset, protocol: &ProtocolArgs) -> Result<Vec<(MethodId, ari::ScoreReport)>> {
    let cfg = protocol.config();
    protocol
        .methods
        .iter()
        .map(|&m| {
            let r = run_protocol(ds, m, &cfg).with_context(|| format!("scoring with {m}"))?;
            Ok((m, r))
        })
        .collect()
}

fn score(args: ScoreArgs) -> Result<()> {
    let ds = load(&args.data)?;
    let reports = score_sections(&ds, &args.protocol)?;
    let mut doc = ReportDocument::new("score", args.protocol.seed);
    doc.dataset = Some(DatasetDescriptor::new(&source(&args.data.data), &ds));
    doc.protocol = Some(args.protocol.config());
    doc.methods = reports
        .iter()
        .map(|(_, r)| MethodSection::new(r, ds.feature_names()))
        .collect();
    let table = report::score_table(&doc.methods);
    emit(&doc, &args.output, table)
}

fn names(ds: &CategoricalDataset, features: &[FeatureId]) -> Vec<String> {
    features.iter().map(|&f| ds.feature_name(f).to_owned()).collect()
}

fn eval(args: EvalArgs) -> Result<()> {
    let ds = load(&args.data)?;
    let cfg = EvalConfig {
        k: args.k as usize,
        folds: args.folds,
        stratified: !args.no_stratify,
        classifier: LogisticConfig {
            l2_strength: args.l2,
            learning_rate: args.lr,
            max_iterations: args.iters,
        },
        seed: args.protocol.seed,
    };
    let reports = score_sections(&ds, &args.protocol)?;

    let all: Vec<FeatureId> = ds.feature_ids().collect();
    let baseline = AccuracyRow {
        method: "all".to_owned(),
        features: names(&ds, &all),
        accuracy: cv_accuracy(&ds, &all, &cfg)?,
    };
    let mut rows = Vec::new();
    for (m, r) in &reports {
        let selected = top_k_features(r, cfg.k).with_context(|| format!("selecting features for {m}"))?;
        rows.push(AccuracyRow {
            method: m.to_string(),
            features: names(&ds, &selected),
            accuracy: cv_accuracy(&ds, &selected, &cfg)?,
        });
    }

    let mut doc = ReportDocument::new("eval", args.protocol.seed);
    doc.dataset = Some(DatasetDescriptor::new(&source(&args.data.data), &ds));
    doc.protocol = Some(args.protocol.config());
    doc.methods = reports
        .iter()
        .map(|(_, r)| MethodSection::new(r, ds.feature_names()))
        .collect();
    doc.accuracy = Some(AccuracySection {
        k: cfg.k,
        folds: cfg.folds,
        stratified: cfg.stratified,
        l2_strength: cfg.classifier.l2_strength,
        learning_rate: cfg.classifier.learning_rate,
        max_iterations: cfg.classifier.max_iterations,
        baseline,
        methods: rows,
    });
    let table = report::accuracy_table(doc.accuracy.as_ref().expect("just set"));
    emit(&doc, &args.output, table)
}

fn sweep(args: SweepArgs) -> Result<()> {
    if args.dims.is_empty() || args.ranges.is_empty() || args.sizes.is_empty() {
        bail!("--dims, --ranges and --sizes must be nonempty");
    }
    let cfg = ProtocolConfig {
        repetitions: args.reps,
        sample: SampleSize::Fraction(1.0),
        seed: args.seed,
        normalize: !args.no_normalize,
        relief: ari::baselines::ReliefConfig {
            k_neighbors: args.relief_k,
        },
    };
    let mut doc = ReportDocument::new("sweep", args.seed);
    doc.protocol = Some(cfg);
    for &dim in &args.dims {
        for &range in &args.ranges {
            let mut template = SyntheticSpec::new(args.function)
                .with_dimension(dim)
                .with_range(range);
            template.enumeration_cap = args.enumeration_cap;
            if template.universe_size() > args.enumeration_cap {
                template = template.with_mode(SamplingMode::Sample {
                    size: 1,
                    seed: args.seed,
                });
            }
            let entries = dimensionality_sweep(&template, &args.sizes, args.method, &cfg)
                .with_context(|| format!("{} dim {dim} range {range}", args.function))?;
            doc.sweep.extend(entries.iter().map(SweepRow::new));
        }
    }
    let table = report::sweep_table(&doc.sweep);
    emit(&doc, &args.output, table)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Score(a) => score(a),
        Command::Eval(a) => eval(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
