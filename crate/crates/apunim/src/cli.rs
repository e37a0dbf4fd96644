//! Command-line definitions and command implementations.

use std::path::PathBuf;
use std::time::Instant;

use apunim_core::synth::{
    self, max_sufficient_k, sensitivity, Effect, SensitivityOptions, SensitivityScope,
    SyntheticDimension, SyntheticSpec,
};
use apunim_core::{
    analyze_all, analyze_dimensions, item_ndfu, AnalysisConfig, ApunimReport, Dataset,
    LabelScale, PartitionScoreMode, SignificanceMode,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::FileConfig;
use crate::manifest::RunManifest;
use crate::{io, report, AppError};

#[derive(Debug, Parser)]
#[command(name = "apunim", version, about = "Attribute annotation polarization to annotator groups")]
pub struct Cli {
    /// Worker threads; defaults to the available cores. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apunim and corrected significance per dimension and group.
    Analyze(AnalyzeArgs),
    /// Per-item nDFU, or a histogram of it with --bins.
    Polarization(PolarizationArgs),
    /// Apunim along the ordered groups of ordinal dimensions.
    Trend(TrendArgs),
    /// Write a synthetic dataset with known ground truth.
    Simulate(SimulateArgs),
    /// Spread of the observed polarization against the annotator count.
    Sensitivity(SensitivityArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Annotations CSV: item_id,annotator_id,value
    #[arg(long)]
    pub annotations: PathBuf,
    /// Annotators CSV: annotator_id,<dimension>...
    #[arg(long)]
    pub annotators: PathBuf,
    /// TOML file declaring the scale, dimensions and analysis defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScoreMode {
    Mean,
    SizeMatched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestMode {
    Calibrated,
    Literal,
}

#[derive(Debug, Args)]
pub struct AnalysisArgs {
    /// Items need an nDFU strictly above this to be analyzed.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Random partitions per item.
    #[arg(long)]
    pub partitions: Option<usize>,
    /// Family-wise level, confidence style (0.95 rejects at corrected p < 0.05).
    #[arg(long)]
    pub fwer: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Smallest group (and pseudo-group) that is scored.
    #[arg(long)]
    pub min_group: Option<usize>,
    #[arg(long, value_enum)]
    pub partition_score_mode: Option<ScoreMode>,
    #[arg(long, value_enum)]
    pub significance_mode: Option<TestMode>,
    /// Restrict to these dimensions (repeatable).
    #[arg(long = "dimension")]
    pub dimensions: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write every output format plus manifest.json here instead of printing.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Format printed to stdout.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PolarizationArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Emit counts in this many equal-width nDFU bins instead of per-item rows.
    #[arg(long)]
    pub bins: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TrendArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    /// Keep only dimensions with at least two significant groups.
    #[arg(long)]
    pub significant_only: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EffectArg {
    None,
    PlantedBimodal,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 500)]
    pub items: usize,
    #[arg(long, default_value_t = 10)]
    pub annotators_per_item: usize,
    /// Ordinal levels, named 0..N-1.
    #[arg(long, default_value_t = 5)]
    pub levels: usize,
    /// Dimension as `name=group:share,group:share` (repeatable); defaults to
    /// `group=a:0.5,b:0.5`.
    #[arg(long = "groups")]
    pub groups: Vec<String>,
    #[arg(long, value_enum, default_value_t = EffectArg::None)]
    pub effect: EffectArg,
    /// Dimension of the planted effect; defaults to the first one.
    #[arg(long)]
    pub planted_dimension: Option<String>,
    /// Group pushed to the lowest level; defaults to the first group.
    #[arg(long)]
    pub group_low: Option<String>,
    /// Group pushed to the highest level; defaults to the second group.
    #[arg(long)]
    pub group_high: Option<String>,
    /// Share of items carrying the planted effect.
    #[arg(long, default_value_t = 0.8)]
    pub strength: f64,
    /// Probability of replacing a label by a uniform random level.
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Largest annotator count; defaults to the largest sufficient one.
    #[arg(long)]
    pub max_k: Option<usize>,
    #[arg(long, default_value_t = 30)]
    pub resamples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Share of items that must have k annotations for k to be used.
    #[arg(long, default_value_t = 0.5)]
    pub min_item_fraction: f64,
    /// Resample only one group's annotations: dimension of that group.
    #[arg(long, requires = "scope_group")]
    pub scope_dimension: Option<String>,
    #[arg(long, requires = "scope_dimension")]
    pub scope_group: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn run(cli: Cli) -> Result<(), AppError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(AppError::Validation("--threads must be positive".to_owned()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| AppError::Internal(e.to_string()))?;
    }
    let started = Instant::now();
    match cli.command {
        Command::Analyze(a) => analyze(a, started),
        Command::Polarization(a) => polarization(a, started),
        Command::Trend(a) => trend(a, started),
        Command::Simulate(a) => simulate(a, started),
        Command::Sensitivity(a) => sensitivity_cmd(a, started),
    }
}

fn load(data: &DataArgs) -> Result<(FileConfig, Dataset), AppError> {
    let cfg = match &data.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let ds = io::load_dataset(&data.annotations, &data.annotators, &cfg)?;
    Ok((cfg, ds))
}

fn analysis_config(file: &FileConfig, args: &AnalysisArgs) -> Result<AnalysisConfig, AppError> {
    let base = file.analysis_config();
    let cfg = AnalysisConfig {
        alpha: args.alpha.unwrap_or(base.alpha),
        partitions: args.partitions.unwrap_or(base.partitions),
        fwer: args.fwer.unwrap_or(base.fwer),
        master_seed: args.seed.unwrap_or(base.master_seed),
        min_group: args.min_group.unwrap_or(base.min_group),
        partition_score_mode: match args.partition_score_mode {
            Some(ScoreMode::Mean) => PartitionScoreMode::Mean,
            Some(ScoreMode::SizeMatched) => PartitionScoreMode::SizeMatched,
            None => base.partition_score_mode,
        },
        significance_mode: match args.significance_mode {
            Some(TestMode::Calibrated) => SignificanceMode::Calibrated,
            Some(TestMode::Literal) => SignificanceMode::Literal,
            None => base.significance_mode,
        },
    };
    cfg.validate()?;
    Ok(cfg)
}

fn manifest_for(command: &str, data: &DataArgs, ds: &Dataset) -> Result<RunManifest, AppError> {
    let mut m = RunManifest::new(command);
    m.add_input(&data.annotations)?;
    m.add_input(&data.annotators)?;
    if let Some(c) = &data.config {
        m.add_input(c)?;
    }
    m.scale = Some(ds.scale().clone());
    m.dimensions = ds.dimensions().iter().map(|d| d.name().to_owned()).collect();
    Ok(m)
}

/// Writes `files` into the output directory with the manifest, or prints the
/// one matching `format`.
fn emit(
    output: &OutputArgs,
    default: Format,
    files: &[(Format, &str, String)],
    mut manifest: RunManifest,
    started: Instant,
) -> Result<(), AppError> {
    let format = output.format.unwrap_or(default);
    match &output.output_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(AppError::io(dir))?;
            for (_, name, text) in files {
                let path = dir.join(name);
                std::fs::write(&path, text).map_err(AppError::io(&path))?;
            }
            manifest.duration_seconds = started.elapsed().as_secs_f64();
            manifest.write(dir)?;
            log::info!("wrote {} file(s) to {}", files.len() + 1, dir.display());
        }
        None => {
            let text = files
                .iter()
                .find(|(f, _, _)| *f == format)
                .or_else(|| files.first())
                .map(|(_, _, t)| t.as_str())
                .unwrap_or_default();
            print!("{text}");
        }
    }
    Ok(())
}

fn run_analysis(ds: &Dataset, cfg: &AnalysisConfig, dims: &[String]) -> Result<ApunimReport, AppError> {
    Ok(if dims.is_empty() {
        analyze_all(ds, cfg)?
    } else {
        analyze_dimensions(ds, dims, cfg)?
    })
}

fn analyze(args: AnalyzeArgs, started: Instant) -> Result<(), AppError> {
    let (file, ds) = load(&args.data)?;
    let cfg = analysis_config(&file, &args.analysis)?;
    let rep = run_analysis(&ds, &cfg, &args.analysis.dimensions)?;
    let mut m = manifest_for("analyze", &args.data, &ds)?;
    m.config = Some(rep.config.clone());
    let files = [
        (Format::Table, "report.txt", report::report_table(&rep)),
        (Format::Csv, "report.csv", report::report_csv(&rep)?),
        (Format::Json, "report.json", report::report_json(&rep)?),
    ];
    emit(&args.output, Format::Table, &files, m, started)
}

/// Renders CSV text as aligned columns.
fn csv_table(text: &str) -> String {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut rows: Vec<Vec<String>> = Vec::new();
    if let Ok(h) = rdr.headers() {
        rows.push(h.iter().map(str::to_owned).collect());
    }
    rows.extend(
        rdr.records()
            .flatten()
            .map(|r| r.iter().map(str::to_owned).collect()),
    );
    let cols = rows.first().map_or(0, Vec::len);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().map(|r| r.get(c).map_or(0, String::len)).max().unwrap_or(0))
        .collect();
    rows.iter()
        .map(|r| {
            let cells: Vec<String> = r
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            format!("{}\n", cells.join("  ").trim_end())
        })
        .collect()
}

fn json<T: serde::Serialize>(value: &T) -> Result<String, AppError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| AppError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn polarization(args: PolarizationArgs, started: Instant) -> Result<(), AppError> {
    let (_, ds) = load(&args.data)?;
    let scores = ds
        .item_ids()
        .map(|id| Ok((id.to_owned(), item_ndfu(&ds, id)?)))
        .collect::<Result<Vec<_>, AppError>>()?;
    let m = manifest_for("polarization", &args.data, &ds)?;
    let (stem, csv_text, json_text) = match args.bins {
        Some(0) => return Err(AppError::Validation("--bins must be positive".to_owned())),
        Some(bins) => {
            let values: Vec<f64> = scores.iter().map(|(_, s)| s.value).collect();
            let counts = report::histogram_counts(&values, bins);
            ("polarization_histogram", report::histogram_csv(&values, bins)?, json(&counts)?)
        }
        None => {
            let rows: Vec<serde_json::Value> = scores
                .iter()
                .map(|(id, s)| serde_json::json!({"item_id": id, "ndfu": s.value, "n_annotations": s.n_annotations}))
                .collect();
            ("polarization", report::polarization_csv(&scores)?, json(&rows)?)
        }
    };
    let files = [
        (Format::Csv, format!("{stem}.csv"), csv_text.clone()),
        (Format::Json, format!("{stem}.json"), json_text),
        (Format::Table, format!("{stem}.txt"), csv_table(&csv_text)),
    ];
    let files: Vec<(Format, &str, String)> = files
        .iter()
        .map(|(f, n, t)| (*f, n.as_str(), t.clone()))
        .collect();
    emit(&args.output, Format::Csv, &files, m, started)
}

fn trend(args: TrendArgs, started: Instant) -> Result<(), AppError> {
    let (file, ds) = load(&args.data)?;
    let cfg = analysis_config(&file, &args.analysis)?;
    let dims: Vec<String> = if args.analysis.dimensions.is_empty() {
        ds.dimensions()
            .iter()
            .filter(|d| d.is_ordinal())
            .map(|d| d.name().to_owned())
            .collect()
    } else {
        args.analysis.dimensions.clone()
    };
    if dims.is_empty() {
        return Err(AppError::Validation(
            "no ordinal dimension declared (set `ordinal_order` in the config)".to_owned(),
        ));
    }
    for name in &dims {
        let d = ds
            .dimension(name)
            .ok_or_else(|| AppError::Validation(format!("unknown dimension `{name}`")))?;
        if !d.is_ordinal() {
            return Err(AppError::Validation(format!(
                "dimension `{name}` is not ordinal (no `ordinal_order` declared)"
            )));
        }
    }
    let rep = run_analysis(&ds, &cfg, &dims)?;
    let rows = report::trend_rows(&rep, &ds, args.significant_only);
    let csv_text = report::trend_csv(&rows)?;
    let mut m = manifest_for("trend", &args.data, &ds)?;
    m.config = Some(rep.config.clone());
    let files = [
        (Format::Csv, "trend.csv", csv_text.clone()),
        (Format::Json, "trend.json", json(&rows)?),
        (Format::Table, "trend.txt", csv_table(&csv_text)),
    ];
    emit(&args.output, Format::Csv, &files, m, started)
}

fn parse_groups(spec: &str) -> Result<SyntheticDimension, AppError> {
    let bad = || AppError::Validation(format!("expected `name=group:share,...`, got `{spec}`"));
    let (name, rest) = spec.split_once('=').ok_or_else(bad)?;
    let mut props = Vec::new();
    for part in rest.split(',') {
        let (g, p) = part.split_once(':').ok_or_else(bad)?;
        let p: f64 = p.trim().parse().map_err(|_| bad())?;
        props.push((g.trim().to_owned(), p));
    }
    Ok(SyntheticDimension::new(name.trim(), props))
}

fn simulate(args: SimulateArgs, started: Instant) -> Result<(), AppError> {
    let dimensions = if args.groups.is_empty() {
        vec![SyntheticDimension::balanced("group", ["a", "b"])]
    } else {
        args.groups
            .iter()
            .map(|s| parse_groups(s))
            .collect::<Result<Vec<_>, _>>()?
    };
    let effect = match args.effect {
        EffectArg::None => Effect::None,
        EffectArg::PlantedBimodal => {
            let dim = match &args.planted_dimension {
                Some(n) => dimensions
                    .iter()
                    .find(|d| &d.name == n)
                    .ok_or_else(|| AppError::Validation(format!("unknown dimension `{n}`")))?,
                None => &dimensions[0],
            };
            let group = |explicit: &Option<String>, i: usize| -> Result<String, AppError> {
                match explicit {
                    Some(g) => Ok(g.clone()),
                    None => dim.proportions.get(i).map(|(g, _)| g.clone()).ok_or_else(|| {
                        AppError::Validation(format!("dimension `{}` needs two groups", dim.name))
                    }),
                }
            };
            Effect::PlantedBimodal {
                dimension: dim.name.clone(),
                group_low: group(&args.group_low, 0)?,
                group_high: group(&args.group_high, 1)?,
                strength: args.strength,
            }
        }
    };
    let spec = SyntheticSpec {
        n_items: args.items,
        annotators_per_item: args.annotators_per_item,
        dimensions,
        effect,
        scale: LabelScale::ordinal_range(args.levels)?,
        noise: args.noise,
        seed: args.seed,
    };
    let ds = synth::generate(&spec)?;
    io::write_dataset(&ds, &args.output_dir)?;
    let mut m = RunManifest::new("simulate");
    m.scale = Some(ds.scale().clone());
    m.dimensions = ds.dimensions().iter().map(|d| d.name().to_owned()).collect();
    m.duration_seconds = started.elapsed().as_secs_f64();
    m.write(&args.output_dir)?;
    let spec_path = args.output_dir.join("spec.json");
    std::fs::write(&spec_path, json(&spec)?).map_err(AppError::io(&spec_path))?;
    Ok(())
}

fn sensitivity_cmd(args: SensitivityArgs, started: Instant) -> Result<(), AppError> {
    let (_, ds) = load(&args.data)?;
    let scope = match (&args.scope_dimension, &args.scope_group) {
        (Some(d), Some(g)) => SensitivityScope::Group {
            dimension: d.clone(),
            group: g.clone(),
        },
        _ => SensitivityScope::All,
    };
    let max_k = match args.max_k {
        Some(k) => k,
        None => max_sufficient_k(&ds, args.min_item_fraction, &scope)?,
    };
    let options = SensitivityOptions {
        max_k,
        resamples: args.resamples,
        seed: args.seed,
        min_item_fraction: args.min_item_fraction,
        scope,
    };
    let curve = sensitivity(&ds, &options)?;
    let csv_text = report::sensitivity_csv(&curve)?;
    let m = manifest_for("sensitivity", &args.data, &ds)?;
    let files = [
        (Format::Csv, "sensitivity.csv", csv_text.clone()),
        (Format::Json, "sensitivity.json", json(&curve)?),
        (Format::Table, "sensitivity.txt", csv_table(&csv_text)),
    ];
    emit(&args.output, Format::Csv, &files, m, started)
}
