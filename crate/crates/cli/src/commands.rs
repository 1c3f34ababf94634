use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use prspace::bounds::recall_grid;
use prspace::curves::DEFAULT_GRID_STEP;
use prspace::{
    ap_min, aucpr_min, aucpr_min_range, group_metrics, mean_scores_with, merged_metrics,
    min_precision, pr_curve, ratio_sweep, vertical_average, AggregateOptions, ClassBalance,
    GroupBy, MetricsReport, Ratio, RecallRange, SweepDispersion,
};

use crate::error::{CliError, Result};
use crate::format::{self, BoundPoint, BoundsRecord, Format, Precision};
use crate::input::read_predictions;
use crate::plot::{self, NamedCurve, PlotSpec};

#[derive(Debug, Parser)]
#[command(
    name = "prspace",
    version,
    about = "Precision-recall analysis with achievability bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Metrics for one prediction file.
    Analyze(AnalyzeArgs),
    /// Per-fold or per-task metrics, their means and the merged set.
    Aggregate(AggregateArgs),
    /// Downsample negatives to target ratios and compare scores.
    Downsample(DownsampleArgs),
    /// Minimum precision, AUCPR and AP for a skew or class counts.
    Bounds(BoundsArgs),
    /// SVG plot of PR curves over the unachievable region.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, default_value = "json")]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Print floats at full precision instead of six significant digits.
    #[arg(long)]
    pub full_precision: bool,
}

impl OutputArgs {
    fn precision(&self) -> Precision {
        Precision {
            full: self.full_precision,
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "0:1")]
    pub recall_range: RecallRange,
    /// Also report the threshold with the best F-beta.
    #[arg(long)]
    pub beta: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "fold")]
    pub group_by: GroupBy,
    #[arg(long, default_value = "0:1")]
    pub recall_range: RecallRange,
    /// Weight group means by group size.
    #[arg(long)]
    pub weighted: bool,
    /// Skew difference across groups above which a warning is raised.
    #[arg(long, default_value_t = prspace::aggregate::DEFAULT_SKEW_SPREAD)]
    pub skew_spread: f64,
    /// Include a vertical average of the group curves.
    #[arg(long)]
    pub vertical_average: bool,
    /// Recall grid step of the vertical average; implies --vertical-average.
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DownsampleArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Target positive:negative ratios, e.g. 1:1,1:2,1:5.
    #[arg(long, required = true, value_delimiter = ',')]
    pub ratio: Vec<Ratio>,
    /// Seeds as a list with inclusive ranges, e.g. 1,2,10-20.
    #[arg(long, default_value = "0")]
    pub seeds: String,
    #[arg(long, default_value = "0:1")]
    pub recall_range: RecallRange,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, conflicts_with = "counts", required_unless_present = "counts")]
    pub skew: Option<f64>,
    /// Class counts as pos:neg.
    #[arg(long)]
    pub counts: Option<String>,
    /// Recalls at which to print the minimum precision; defaults to a grid
    /// over the recall range.
    #[arg(long, value_delimiter = ',')]
    pub recall: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
    pub grid_step: f64,
    #[arg(long, default_value = "0:1")]
    pub recall_range: RecallRange,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Prediction file; repeat for several curves.
    #[arg(long)]
    pub input: Vec<PathBuf>,
    /// Draw one curve per fold or task instead of one per file.
    #[arg(long)]
    pub group_by: Option<GroupBy>,
    /// Skews of the minimum curves; defaults to the skews of the inputs.
    #[arg(long, value_delimiter = ',')]
    pub skew: Vec<f64>,
    #[arg(long, default_value = "0:1")]
    pub recall_range: RecallRange,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = plot::DEFAULT_WIDTH)]
    pub width: u32,
    #[arg(long, default_value_t = plot::DEFAULT_HEIGHT)]
    pub height: u32,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze(a) => emit(&a.out, analyze(&a)?),
        Command::Aggregate(a) => emit(&a.out, aggregate(&a)?),
        Command::Downsample(a) => emit(&a.out, downsample(&a)?),
        Command::Bounds(a) => emit(&a.out, bounds(&a)?),
        Command::Plot(a) => write_file(&a.output, &plot(&a)?),
    }
}

fn emit(out: &OutputArgs, text: String) -> Result<()> {
    match &out.output {
        Some(path) => write_file(path, &text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Write {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_owned(),
        source,
    })
}

pub fn analyze_report(args: &AnalyzeArgs) -> Result<MetricsReport> {
    let data = read_predictions(&args.input)?;
    let report = MetricsReport::compute(&data, args.recall_range)?;
    Ok(match args.beta {
        Some(beta) => report.with_operating_point(&data, beta)?,
        None => report,
    })
}

pub fn analyze(args: &AnalyzeArgs) -> Result<String> {
    let report = analyze_report(args)?;
    let prec = args.out.precision();
    Ok(match args.out.format {
        Format::Json => format::analyze_json(&report, prec),
        Format::Csv => format::analyze_csv(&report, prec),
    })
}

pub fn aggregate(args: &AggregateArgs) -> Result<String> {
    let data = read_predictions(&args.input)?;
    let groups = group_metrics(&data, args.group_by, args.recall_range)?;
    let opts = AggregateOptions {
        weighted: args.weighted,
        skew_spread_threshold: args.skew_spread,
    };
    let report =
        mean_scores_with(groups, opts)?.with_merged(merged_metrics(&data, args.recall_range)?);
    if report.skew_spread.warning {
        eprintln!(
            "warning: group skews range from {} to {}; AUCPR means mix different floors, compare AUCNPR",
            format::sig6(report.skew_spread.min),
            format::sig6(report.skew_spread.max)
        );
    }
    let vertical = if args.vertical_average || args.grid_step.is_some() {
        let curves = prspace::aggregate::split_groups(&data, args.group_by)?
            .values()
            .map(pr_curve)
            .collect::<prspace::Result<Vec<_>>>()?;
        Some(vertical_average(
            &curves,
            args.grid_step.unwrap_or(DEFAULT_GRID_STEP),
        )?)
    } else {
        None
    };
    let prec = args.out.precision();
    Ok(match args.out.format {
        Format::Json => format::aggregate_json(&report, vertical.as_ref(), prec),
        Format::Csv => format::aggregate_csv(&report, vertical.as_ref(), prec),
    })
}

/// Parses `1,2,10-20` into seeds, ranges inclusive.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = |part: &str| CliError::Usage(format!("invalid seed `{part}` in --seeds"));
    let mut seeds = Vec::new();
    for part in text.split(',').map(str::trim) {
        match part.split_once('-') {
            Some((a, b)) => {
                let a: u64 = a.trim().parse().map_err(|_| bad(part))?;
                let b: u64 = b.trim().parse().map_err(|_| bad(part))?;
                if a > b {
                    return Err(bad(part));
                }
                seeds.extend(a..=b);
            }
            None => seeds.push(part.parse().map_err(|_| bad(part))?),
        }
    }
    Ok(seeds)
}

pub fn downsample(args: &DownsampleArgs) -> Result<String> {
    let data = read_predictions(&args.input)?;
    let seeds = parse_seeds(&args.seeds)?;
    let rows = ratio_sweep(&data, &args.ratio, &seeds, args.recall_range)?;
    let dispersion = SweepDispersion::of(&rows);
    let prec = args.out.precision();
    Ok(match args.out.format {
        Format::Json => format::sweep_json(&rows, dispersion, prec),
        Format::Csv => {
            if let Some(d) = dispersion {
                eprintln!(
                    "sd across ratios and seeds: aucpr {}, aucnpr {}",
                    format::sig6(d.aucpr_sd),
                    format::sig6(d.aucnpr_sd)
                );
            }
            format::sweep_csv(&rows, prec)
        }
    })
}

fn parse_counts(text: &str) -> Result<ClassBalance> {
    let bad = || CliError::Usage(format!("invalid --counts `{text}`; expected pos:neg"));
    let (p, n) = text.split_once(':').ok_or_else(bad)?;
    let pos = p.trim().parse().map_err(|_| bad())?;
    let neg = n.trim().parse().map_err(|_| bad())?;
    Ok(ClassBalance::new(pos, neg)?)
}

pub fn bounds_record(args: &BoundsArgs) -> Result<BoundsRecord> {
    let (skew, counts) = match (&args.counts, args.skew) {
        (Some(c), _) => {
            let b = parse_counts(c)?;
            (b.strict_skew()?, Some(b))
        }
        (None, Some(s)) => (s, None),
        (None, None) => return Err(CliError::Usage("give --skew or --counts".into())),
    };
    let range = args.recall_range;
    let recalls = if args.recall.is_empty() {
        if !(args.grid_step > 0.0 && args.grid_step <= range.width()) {
            return Err(CliError::Core(prspace::Error::InvalidGridStep(
                args.grid_step,
            )));
        }
        recall_grid(range.lo(), range.hi(), args.grid_step)
    } else {
        args.recall.clone()
    };
    let f = |x| args.out.precision().apply(x);
    let min_precision = recalls
        .iter()
        .map(|&r| {
            Ok(BoundPoint {
                recall: f(r),
                min_precision: f(min_precision(r, skew)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundsRecord {
        skew: f(skew),
        pos: counts.map(|b| b.pos()),
        neg: counts.map(|b| b.neg()),
        aucpr_min: f(aucpr_min(skew)?),
        range: [range.lo(), range.hi()],
        aucpr_min_range: f(aucpr_min_range(skew, range)?),
        ap_min: counts.map(|b| ap_min(b.pos(), b.neg())).transpose()?.map(f),
        min_precision,
    })
}

pub fn bounds(args: &BoundsArgs) -> Result<String> {
    let record = bounds_record(args)?;
    Ok(match args.out.format {
        Format::Json => format::bounds_json(&record),
        Format::Csv => format::bounds_csv(&record),
    })
}

fn file_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn plot_spec(args: &PlotArgs) -> Result<PlotSpec> {
    let mut curves = Vec::new();
    for path in &args.input {
        let data = read_predictions(path)?;
        match args.group_by {
            Some(by) => {
                let label = file_label(path);
                for (group, subset) in prspace::aggregate::split_groups(&data, by)? {
                    curves.push(NamedCurve {
                        name: format!("{label} {group}"),
                        curve: pr_curve(&subset)?,
                    });
                }
            }
            None => curves.push(NamedCurve {
                name: file_label(path),
                curve: pr_curve(&data)?,
            }),
        }
    }
    for &s in &args.skew {
        prspace::confusion::check_skew(s)?;
    }
    let mut spec = PlotSpec::new(curves, args.skew.clone(), args.recall_range);
    spec.width = args.width;
    spec.height = args.height;
    Ok(spec)
}

pub fn plot(args: &PlotArgs) -> Result<String> {
    plot::render(&plot_spec(args)?)
}
