use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use interchange::report::{
    parse_tau_grid, render_text, resolve_config, run_analysis, write_plot_data, Analysis, AnalysisConfig,
    ComparisonReport, ConfigOverrides,
};
use interchange::synthetic::{write_synthetic_outputs, SyntheticSpec};
use interchange::{load_baseline_table, parse_trial_log, BaselineTable, Execution, TrialDataset};

/// Statistical differential testing of stochastic implementations.
#[derive(Parser)]
#[command(name = "interchange", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full comparison: profiles, pairwise POI, per-environment ANOVA, verdict.
    Compare(AnalysisArgs),
    /// Performance profiles only.
    Profile(AnalysisArgs),
    /// Pairwise probability of improvement only.
    Poi(AnalysisArgs),
    /// Per-environment one-way ANOVA on MeanReward100 only.
    Anova(AnalysisArgs),
    /// Generate synthetic trial logs and their truth sidecar from a spec file.
    Synth(SynthArgs),
    /// Write plot-ready CSV tables (training curves, profiles, POI intervals).
    PlotData(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct AnalysisFlags {
    /// Trial log (episode or pre-aggregated format).
    #[arg(long)]
    trials: PathBuf,
    /// Baseline table (environment,random_play,human_play).
    #[arg(long)]
    baselines: Option<PathBuf>,
    /// TOML config file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    resamples: Option<usize>,
    #[arg(long)]
    confidence: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma list (`0,0.5,1`) or `start:stop:step`.
    #[arg(long)]
    tau_grid: Option<String>,
    /// ANOVA significance level.
    #[arg(long)]
    alpha: Option<f64>,
    /// POI interval upper bound required for a meaningful improvement.
    #[arg(long)]
    meaningful_threshold: Option<f64>,
    /// Comma-separated subset of implementations to analyse.
    #[arg(long, value_delimiter = ',')]
    implementations: Option<Vec<String>>,
    /// Evaluate bootstrap resamples on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct AnalysisArgs {
    #[command(flatten)]
    flags: AnalysisFlags,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Synthetic spec (TOML).
    #[arg(long)]
    spec: PathBuf,
    /// Output directory for trials.csv, truth.json and baselines.csv.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    flags: AnalysisFlags,
    /// Output directory for curves.csv, profile.csv and poi.csv.
    #[arg(long)]
    out: PathBuf,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

fn load_inputs(flags: &AnalysisFlags) -> Result<(TrialDataset, Option<BaselineTable>, AnalysisConfig)> {
    let dataset = parse_trial_log(open(&flags.trials)?)
        .with_context(|| format!("reading trial log {}", flags.trials.display()))?;
    let baselines = flags
        .baselines
        .as_ref()
        .map(|p| load_baseline_table(open(p)?).with_context(|| format!("reading baselines {}", p.display())))
        .transpose()?;
    let file = flags
        .config
        .as_ref()
        .map(|p| -> Result<ConfigOverrides> {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(ConfigOverrides::from_toml(&text)?)
        })
        .transpose()?;
    let cli = ConfigOverrides {
        resamples: flags.resamples,
        confidence: flags.confidence,
        seed: flags.seed,
        tau_grid: flags.tau_grid.as_deref().map(parse_tau_grid).transpose()?,
        alpha: flags.alpha,
        meaningful_threshold: flags.meaningful_threshold,
        implementations: flags.implementations.clone(),
    };
    let mut config = resolve_config(file.as_ref(), &cli)?;
    if flags.sequential {
        config.execution = Execution::Sequential;
    }
    Ok((dataset, baselines, config))
}

fn analyse(analysis: Analysis, flags: &AnalysisFlags) -> Result<(TrialDataset, ComparisonReport)> {
    let (dataset, baselines, config) = load_inputs(flags)?;
    if analysis != Analysis::Anova && baselines.is_none() {
        anyhow::bail!("--baselines is required for this analysis");
    }
    let report = run_analysis(analysis, &dataset, baselines.as_ref(), &config)?;
    Ok((dataset, report))
}

fn emit(report: &ComparisonReport, format: Format, output: Option<&Path>) -> Result<()> {
    let body = match format {
        Format::Json => report.to_json()?,
        Format::Text => render_text(report),
    };
    match output {
        Some(path) => std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let (analysis, args) = match cli.command {
        Command::Compare(a) => (Analysis::Compare, a),
        Command::Profile(a) => (Analysis::Profile, a),
        Command::Poi(a) => (Analysis::Poi, a),
        Command::Anova(a) => (Analysis::Anova, a),
        Command::Synth(s) => {
            let text = std::fs::read_to_string(&s.spec).with_context(|| format!("reading {}", s.spec.display()))?;
            let spec = SyntheticSpec::from_toml(&text).with_context(|| format!("in {}", s.spec.display()))?;
            let out = write_synthetic_outputs(&spec, s.seed, Execution::Parallel, &s.out)?;
            eprintln!("wrote {}", out.trials.display());
            eprintln!("wrote {}", out.truth.display());
            if let Some(b) = out.baselines {
                eprintln!("wrote {}", b.display());
            }
            return Ok(());
        }
        Command::PlotData(p) => {
            let (dataset, mut report) = analyse(Analysis::Profile, &p.flags)?;
            if report.metadata.implementations.len() >= 2 {
                report.poi = analyse(Analysis::Poi, &p.flags)?.1.poi;
            }
            for name in write_plot_data(&p.out, &dataset, &report)? {
                eprintln!("wrote {}", p.out.join(name).display());
            }
            return Ok(());
        }
    };
    let (_, report) = analyse(analysis, &args.flags)?;
    emit(&report, args.format, args.output.as_deref())
}
